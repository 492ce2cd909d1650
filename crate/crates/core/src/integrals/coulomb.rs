use crate::basis::{pair_density, Orbital};
use crate::error::{Error, Result};
use crate::gaussian::PairDensity;
use crate::model::MaterialParams;
use crate::quadrature::gauss_legendre;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombOptions {
    pub rtol: f64,
    /// Number of grid refinements before giving up.
    pub max_depth: usize,
}

impl Default for CoulombOptions {
    fn default() -> Self {
        CoulombOptions { rtol: 1e-6, max_depth: 12 }
    }
}

/// Canonical representative of the symmetry class
/// {(ij|kl), (ji|lk), (kl|ij)*, (lk|ji)*}. The flag is set when the value of
/// the requested element is the conjugate of the stored one.
pub fn canonical_quadruple(q: [usize; 4]) -> ([usize; 4], bool) {
    let [i, j, k, l] = q;
    let cands = [([i, j, k, l], false), ([j, i, l, k], false), ([k, l, i, j], true), ([l, k, j, i], true)];
    *cands.iter().min_by_key(|c| c.0).unwrap()
}

/// Random access to two-body elements (ij|kl).
pub trait TwoBody {
    fn n_orbitals(&self) -> usize;
    fn element(&self, i: usize, j: usize, k: usize, l: usize) -> C64;
}

/// Unique Coulomb elements over an orbital list, in meV.
#[derive(Debug, Clone, PartialEq)]
pub struct CoulombTensor {
    n: usize,
    elements: BTreeMap<[usize; 4], C64>,
    /// Quadrature points (q × θ) of the accepted level.
    pub grid_points: usize,
}

impl CoulombTensor {
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = ([usize; 4], C64)>) -> Result<Self> {
        let mut elements = BTreeMap::new();
        for (q, v) in entries {
            if q.iter().any(|&x| x >= n) || canonical_quadruple(q).0 != q {
                return Err(Error::InvalidInput(format!("bad Coulomb index {q:?}")));
            }
            elements.insert(q, v);
        }
        let t = CoulombTensor { n, elements, grid_points: 0 };
        if t.elements.len() != all_canonical(n).len() {
            return Err(Error::InvalidInput("incomplete Coulomb tensor".into()));
        }
        Ok(t)
    }

    pub fn entries(&self) -> impl Iterator<Item = ([usize; 4], C64)> + '_ {
        self.elements.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn to_dense(&self) -> DenseCoulomb {
        let n = self.n;
        let mut data = vec![C64::new(0.0, 0.0); n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        data[((i * n + j) * n + k) * n + l] = self.element(i, j, k, l);
                    }
                }
            }
        }
        DenseCoulomb { n, data }
    }
}

impl TwoBody for CoulombTensor {
    fn n_orbitals(&self) -> usize {
        self.n
    }

    fn element(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        let (q, c) = canonical_quadruple([i, j, k, l]);
        let v = self.elements[&q];
        if c {
            v.conj()
        } else {
            v
        }
    }
}

/// All n⁴ elements, used after a change of orbital basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCoulomb {
    n: usize,
    data: Vec<C64>,
}

impl DenseCoulomb {
    /// Elements over χ_p = Σ_a U_ap φ_a (bra indices conjugated).
    pub fn transform(&self, u: &DMatrix<C64>) -> DenseCoulomb {
        let n = self.n;
        let m = u.ncols();
        assert_eq!(u.nrows(), n);
        // contract one index at a time, cycling the index order
        let mut cur = self.data.clone();
        let mut dims = [n, n, n, n];
        for pos in 0..4 {
            let conj = pos < 2;
            let [d0, d1, d2, d3] = dims;
            let mut next = vec![C64::new(0.0, 0.0); m * d1 * d2 * d3];
            // new layout: (d1, d2, d3, m), i.e. the contracted index moves last
            for a in 0..d0 {
                for b in 0..d1 {
                    for c in 0..d2 {
                        for d in 0..d3 {
                            let v = cur[((a * d1 + b) * d2 + c) * d3 + d];
                            if v == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for p in 0..m {
                                let w = if conj { u[(a, p)].conj() } else { u[(a, p)] };
                                next[((b * d2 + c) * d3 + d) * m + p] += v * w;
                            }
                        }
                    }
                }
            }
            cur = next;
            dims = [d1, d2, d3, m];
        }
        DenseCoulomb { n: m, data: cur }
    }
}

impl TwoBody for DenseCoulomb {
    fn n_orbitals(&self) -> usize {
        self.n
    }

    fn element(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        let n = self.n;
        self.data[((i * n + j) * n + k) * n + l]
    }
}

/// Elements of another source multiplied by a constant.
pub struct ScaledTwoBody<'a> {
    pub inner: &'a dyn TwoBody,
    pub scale: f64,
}

impl TwoBody for ScaledTwoBody<'_> {
    fn n_orbitals(&self) -> usize {
        self.inner.n_orbitals()
    }

    fn element(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.inner.element(i, j, k, l) * self.scale
    }
}

fn all_canonical(n: usize) -> Vec<[usize; 4]> {
    let mut set = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    set.insert(canonical_quadruple([i, j, k, l]).0);
                }
            }
        }
    }
    set.into_iter().collect()
}

struct Grid {
    qx: Vec<f64>,
    qy: Vec<f64>,
    /// Combined weight w_q · (2π/nθ) · (1/2π) per point.
    w: Vec<f64>,
    nq: usize,
    nt: usize,
}

impl Grid {
    fn new(nq: usize, nt: usize, qmax: f64) -> Grid {
        let (qs, ws) = gauss_legendre(nq, 0.0, qmax);
        let mut qx = Vec::with_capacity(nq * nt);
        let mut qy = Vec::with_capacity(nq * nt);
        let mut w = Vec::with_capacity(nq * nt);
        for (q, wq) in qs.iter().zip(&ws) {
            for t in 0..nt {
                let th = 2.0 * PI * t as f64 / nt as f64;
                qx.push(q * th.cos());
                qy.push(q * th.sin());
                w.push(wq / nt as f64);
            }
        }
        Grid { qx, qy, w, nq, nt }
    }

    /// Index of −q for point idx (θ → θ + π).
    #[inline]
    fn opposite(&self, idx: usize) -> usize {
        let (iq, it) = (idx / self.nt, idx % self.nt);
        iq * self.nt + (it + self.nt / 2) % self.nt
    }
}

/// Fourier-space evaluation of a set of quadruples with grid refinement.
fn evaluate(orbitals: &[Orbital], quads: &[[usize; 4]], mat: &MaterialParams, opts: &CoulombOptions) -> Result<(Vec<C64>, usize)> {
    if orbitals.is_empty() || quads.is_empty() {
        return Ok((vec![C64::new(0.0, 0.0); quads.len()], 0));
    }
    let l0 = orbitals[0].l0;
    for o in orbitals {
        if (o.l0 - l0).abs() > 1e-12 * l0 || !(o.lb == orbitals[0].lb || (o.lb - orbitals[0].lb).abs() <= 1e-12 * o.lb) {
            return Err(Error::InvalidInput("Coulomb elements need orbitals with shared lengths".into()));
        }
    }
    let coulomb = mat.scales().coulomb;
    // pairs (i,k) and (j,l) that appear
    let mut pair_set = BTreeSet::new();
    for q in quads {
        pair_set.insert((q[0], q[2]));
        pair_set.insert((q[1], q[3]));
    }
    let pairs: Vec<(usize, usize)> = pair_set.into_iter().collect();
    let pair_index: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let dens: Vec<PairDensity> = pairs.iter().map(|&(i, k)| pair_density(&orbitals[i], &orbitals[k])).collect();
    let kmax = dens.iter().map(|d| d.k.abs()).fold(0.0, f64::max);
    let qmax = kmax + 14.0 / l0;
    let atol = opts.rtol * 1e-3 * coulomb / l0;

    let mut prev: Option<Vec<C64>> = None;
    let mut worst = f64::INFINITY;
    for depth in 0..=opts.max_depth {
        let n = 24 + 16 * depth;
        let grid = Grid::new(n, n, qmax);
        let fts: Vec<Vec<C64>> = dens
            .par_iter()
            .map(|d| (0..grid.qx.len()).map(|p| d.fourier(grid.qx[p], grid.qy[p])).collect())
            .collect();
        let vals: Vec<C64> = quads
            .par_iter()
            .map(|q| {
                let a = &fts[pair_index[&(q[0], q[2])]];
                let b = &fts[pair_index[&(q[1], q[3])]];
                let mut acc = C64::new(0.0, 0.0);
                for p in 0..grid.w.len() {
                    acc += a[grid.opposite(p)] * b[p] * grid.w[p];
                }
                acc * coulomb
            })
            .collect();
        if let Some(old) = prev {
            worst = 0.0;
            let mut ok = true;
            for (v, o) in vals.iter().zip(&old) {
                let d = (v - o).norm();
                worst = f64::max(worst, d);
                if d > opts.rtol * v.norm() + atol {
                    ok = false;
                }
            }
            if ok {
                return Ok((vals, grid.nq * grid.nt));
            }
        }
        prev = Some(vals);
    }
    Err(Error::QuadratureNotConverged { what: "Coulomb tensor".into(), change: worst })
}

/// All unique Coulomb elements over `orbitals`.
pub fn coulomb_tensor(orbitals: &[Orbital], mat: &MaterialParams, opts: &CoulombOptions) -> Result<CoulombTensor> {
    let n = orbitals.len();
    let quads = all_canonical(n);
    let (vals, grid_points) = evaluate(orbitals, &quads, mat, opts)?;
    Ok(CoulombTensor { n, elements: quads.into_iter().zip(vals).collect(), grid_points })
}

/// A single element (ij|kl).
pub fn coulomb_element(oi: &Orbital, oj: &Orbital, ok: &Orbital, ol: &Orbital, mat: &MaterialParams) -> Result<C64> {
    let orbs = [*oi, *oj, *ok, *ol];
    let (v, _) = evaluate(&orbs, &[[0, 1, 2, 3]], mat, &CoulombOptions::default())?;
    Ok(v[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{dot_orbitals, length_scales, Shell};

    #[test]
    fn on_site_repulsion_is_closed_form() {
        let mat = MaterialParams::gaas();
        for b in [0.0, 4.0] {
            let ls = length_scales(b, 8.0, &mat);
            let s = Orbital::new(0.0, Shell::S, &ls);
            let u = coulomb_element(&s, &s, &s, &s, &mat).unwrap();
            let expect = (PI / 2.0).sqrt() * mat.scales().coulomb / ls.l0;
            assert!((u.re - expect).abs() < 1e-6 * expect, "{u} vs {expect}");
            assert!(u.im.abs() < 1e-9);
        }
    }

    #[test]
    fn distant_charges_repel_like_points() {
        let mat = MaterialParams::gaas();
        let ls = length_scales(0.0, 12.0, &mat);
        let a = 120.0;
        let orbs = dot_orbitals(a, false, &ls);
        let v = coulomb_element(&orbs[0], &orbs[1], &orbs[0], &orbs[1], &mat).unwrap();
        let point = mat.scales().coulomb / (2.0 * a);
        // the leading correction is quadrupolar, O((l0/2a)²)
        assert!((v.re - point).abs() < 2e-3 * point, "{v} {point}");
    }

    #[test]
    fn symmetry_classes_hold_numerically() {
        let mat = MaterialParams::gaas();
        let ls = length_scales(5.0, 9.0, &mat);
        let orbs = dot_orbitals(15.0, true, &ls);
        let t = coulomb_tensor(&orbs, &mat, &CoulombOptions::default()).unwrap();
        // compare stored elements against fresh evaluations of their partners
        for &q in &[[0usize, 1, 2, 3], [2, 5, 1, 4], [3, 3, 0, 1]] {
            let direct = evaluate(&orbs, &[q, [q[1], q[0], q[3], q[2]], [q[2], q[3], q[0], q[1]]], &mat, &CoulombOptions::default())
                .unwrap()
                .0;
            assert!((direct[0] - direct[1]).norm() < 1e-9);
            assert!((direct[0] - direct[2].conj()).norm() < 1e-9);
            assert!((t.element(q[0], q[1], q[2], q[3]) - direct[0]).norm() < 1e-6 * direct[0].norm().max(1e-3));
        }
    }

    #[test]
    fn zero_field_elements_are_real() {
        let mat = MaterialParams::gaas();
        let ls = length_scales(0.0, 9.0, &mat);
        let t = coulomb_tensor(&dot_orbitals(15.0, true, &ls), &mat, &CoulombOptions::default()).unwrap();
        // 4-fold complex classes: (1296 + 3·36) / 4
        assert_eq!(t.len(), 351);
        for (_, v) in t.entries() {
            assert!(v.im.abs() < 1e-10, "{v}");
        }
        // real orbitals add (ij|kl) = (kj|il)
        let a = t.element(0, 2, 1, 4);
        let b = t.element(1, 2, 0, 4);
        assert!((a - b).norm() < 1e-6 * a.norm().max(1e-3));
    }

    #[test]
    fn round_trip_through_entries() {
        let mat = MaterialParams::gaas();
        let ls = length_scales(2.0, 9.0, &mat);
        let t = coulomb_tensor(&dot_orbitals(15.0, false, &ls), &mat, &CoulombOptions::default()).unwrap();
        let back = CoulombTensor::from_entries(2, t.entries()).unwrap();
        for q in all_canonical(2) {
            assert_eq!(back.element(q[0], q[1], q[2], q[3]), t.element(q[0], q[1], q[2], q[3]));
        }
        assert!(CoulombTensor::from_entries(2, t.entries().take(2)).is_err());
    }

    #[test]
    fn dense_transform_by_identity_is_a_no_op() {
        let mat = MaterialParams::gaas();
        let ls = length_scales(3.0, 9.0, &mat);
        let t = coulomb_tensor(&dot_orbitals(15.0, false, &ls), &mat, &CoulombOptions::default()).unwrap();
        let d = t.to_dense();
        let e = d.transform(&DMatrix::identity(2, 2));
        assert_eq!(d, e);
    }

    #[test]
    fn refinement_failure_is_reported() {
        let mat = MaterialParams::gaas();
        let ls = length_scales(0.0, 9.0, &mat);
        let orbs = dot_orbitals(15.0, true, &ls);
        let r = coulomb_tensor(&orbs, &mat, &CoulombOptions { rtol: 1e-30, max_depth: 1 });
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }
}
