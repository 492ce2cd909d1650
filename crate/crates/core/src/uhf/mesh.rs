use crate::error::{Error, Result};

/// Largest node count accepted by [`build_mesh`].
pub const MAX_NODES: usize = 4000;

/// How cell centres are spread over the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stretch {
    Uniform,
    /// x = w atanh(ξ tanh(X/w)) for uniform ξ ∈ (−1, 1), with widths (wx, wy) in nm.
    Tanh { wx: f64, wy: f64 },
    /// Tanh stretching with widths chosen so that the given fractions of the
    /// nodes on each axis fall inside |x| ≤ half_x and |y| ≤ half_y.
    Core { half_x: f64, half_y: f64, fraction_x: f64, fraction_y: f64 },
}

/// Tensor-product mesh of cell centres with cell-area weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nx: usize,
    pub ny: usize,
    /// Cell centres along each axis.
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Quadrature widths along each axis (cell sizes in the mapped coordinate).
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    /// Half extents of the box.
    pub extent: (f64, f64),
    /// Tanh widths actually used (infinite for uniform axes).
    pub stretch_params: (f64, f64),
}

impl Mesh {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat node index, x fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &y in &self.ys {
            for &x in &self.xs {
                out.push((x, y));
            }
        }
        out
    }

    pub fn weights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for &hy in &self.dy {
            for &hx in &self.dx {
                out.push(hx * hy);
            }
        }
        out
    }

    /// Σ w f(x, y).
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (j, &y) in self.ys.iter().enumerate() {
            for (i, &x) in self.xs.iter().enumerate() {
                acc += self.dx[i] * self.dy[j] * f(x, y);
            }
        }
        acc
    }

    /// Fraction of nodes inside |x| ≤ cx, |y| ≤ cy.
    pub fn core_fraction(&self, cx: f64, cy: f64) -> f64 {
        let fx = self.xs.iter().filter(|x| x.abs() <= cx).count();
        let fy = self.ys.iter().filter(|y| y.abs() <= cy).count();
        (fx * fy) as f64 / self.len() as f64
    }
}

fn map(xi: f64, half: f64, w: f64) -> f64 {
    if w.is_infinite() {
        xi * half
    } else {
        w * (xi * (half / w).tanh()).atanh()
    }
}

/// Width w for which tanh(c/w)/tanh(X/w) = fraction.
fn width_for_fraction(core: f64, half: f64, fraction: f64) -> Result<f64> {
    if core >= half || fraction <= core / half {
        return Ok(f64::INFINITY);
    }
    if fraction >= 1.0 {
        return Err(Error::InvalidInput("core fraction must be below 1".into()));
    }
    let frac = |w: f64| (core / w).tanh() / (half / w).tanh();
    // frac decreases with w
    let (mut lo, mut hi) = (1e-3 * core, 1e3 * half);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if frac(mid) > fraction {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Cell centres at uniform ξ and widths x'(ξ)Δξ, i.e. the midpoint rule in
/// the mapped coordinate. The two end cells absorb what is left of the box
/// so that the widths add up to 2X exactly.
fn axis(n: usize, half: f64, w: f64) -> (Vec<f64>, Vec<f64>) {
    let dxi = 2.0 / n as f64;
    let xi = |k: usize| -1.0 + (k as f64 + 0.5) * dxi;
    let jac = |xi: f64| {
        if w.is_infinite() {
            half
        } else {
            let t = (half / w).tanh();
            w * t / (1.0 - xi * xi * t * t)
        }
    };
    let mut centres: Vec<f64> = (0..n).map(|k| map(xi(k), half, w)).collect();
    let mut widths: Vec<f64> = (0..n).map(|k| jac(xi(k)) * dxi).collect();
    // exact mirror symmetry
    for k in 0..n / 2 {
        let s = 0.5 * (centres[n - 1 - k] - centres[k]);
        centres[k] = -s;
        centres[n - 1 - k] = s;
        let s = 0.5 * (widths[k] + widths[n - 1 - k]);
        widths[k] = s;
        widths[n - 1 - k] = s;
    }
    if n % 2 == 1 {
        centres[n / 2] = 0.0;
    }
    let inner: f64 = widths[1..n - 1].iter().sum();
    widths[0] = 0.5 * (2.0 * half - inner);
    widths[n - 1] = widths[0];
    (centres, widths)
}

/// Tensor mesh on [−X, X] × [−Y, Y], symmetric under x → −x and y → −y.
pub fn build_mesh(nx: usize, ny: usize, extent: (f64, f64), stretch: Stretch) -> Result<Mesh> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidInput("mesh needs at least two nodes per axis".into()));
    }
    if nx * ny > MAX_NODES {
        return Err(Error::InvalidInput(format!("mesh of {} nodes exceeds the {MAX_NODES}-node budget", nx * ny)));
    }
    let (hx, hy) = extent;
    if !(hx > 0.0 && hy > 0.0) {
        return Err(Error::InvalidInput("mesh extent must be positive".into()));
    }
    let (wx, wy) = match stretch {
        Stretch::Uniform => (f64::INFINITY, f64::INFINITY),
        Stretch::Tanh { wx, wy } => {
            if !(wx > 0.0 && wy > 0.0) {
                return Err(Error::InvalidInput("tanh widths must be positive".into()));
            }
            (wx, wy)
        }
        Stretch::Core { half_x, half_y, fraction_x, fraction_y } => {
            (width_for_fraction(half_x, hx, fraction_x)?, width_for_fraction(half_y, hy, fraction_y)?)
        }
    };
    let (xs, dx) = axis(nx, hx, wx);
    let (ys, dy) = axis(ny, hy, wy);
    Ok(Mesh { nx, ny, xs, ys, dx, dy, extent, stretch_params: (wx, wy) })
}
