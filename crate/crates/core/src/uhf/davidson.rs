//! Block Davidson for a few lowest eigenpairs of a Hermitian operator.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DavidsonOptions {
    /// Residual norm ‖Ax − θx‖ accepted for each wanted pair.
    pub tol: f64,
    pub max_iter: usize,
    /// Subspace size that triggers a restart, as a multiple of the block.
    pub max_subspace_factor: usize,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        DavidsonOptions { tol: 1e-6, max_iter: 500, max_subspace_factor: 6 }
    }
}

fn orthonormalize_against(v: &mut DVector<C64>, basis: &[DVector<C64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(v);
            v.axpy(-c, b, C64::new(1.0, 0.0));
        }
    }
    let n = v.norm();
    if n > 0.0 {
        *v /= C64::new(n, 0.0);
    }
    n
}

/// Diagonal (Jacobi) preconditioner r ↦ r/(θ − d).
pub fn diagonal_preconditioner(diag: &[f64]) -> impl Fn(&DVector<C64>, f64) -> DVector<C64> + '_ {
    move |r, theta| {
        DVector::from_fn(r.len(), |a, _| {
            let d = theta - diag[a];
            let d = if d.abs() < 1e-8 { 1e-8_f64.copysign(d) } else { d };
            r[a] / d
        })
    }
}

/// `k` lowest eigenpairs of the Hermitian operator `apply`. `precond(r, θ)`
/// turns a residual into a correction; `diag` (the operator diagonal) seeds
/// missing start vectors. Eigenvalues come out ascending.
pub fn lowest_eigenpairs<F, P>(
    apply: F,
    precond: P,
    diag: &[f64],
    k: usize,
    guess: &[DVector<C64>],
    opts: &DavidsonOptions,
) -> Result<(Vec<f64>, Vec<DVector<C64>>)>
where
    F: Fn(&DVector<C64>) -> DVector<C64>,
    P: Fn(&DVector<C64>, f64) -> DVector<C64>,
{
    let n = diag.len();
    if k == 0 || k > n {
        return Err(Error::InvalidInput("invalid number of eigenpairs".into()));
    }
    let block = (k + 2).min(n);
    let max_sub = (opts.max_subspace_factor * block).clamp(block + 1, n.max(block + 1));
    let mut v: Vec<DVector<C64>> = Vec::new();
    for g in guess {
        let mut x = g.clone();
        if orthonormalize_against(&mut x, &v) > 1e-8 {
            v.push(x);
        }
    }
    // fill with unit vectors on the lowest diagonal entries
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].partial_cmp(&diag[b]).unwrap());
    for &i in &order {
        if v.len() >= block {
            break;
        }
        let mut x = DVector::zeros(n);
        x[i] = C64::new(1.0, 0.0);
        if orthonormalize_against(&mut x, &v) > 1e-8 {
            v.push(x);
        }
    }
    let mut av: Vec<DVector<C64>> = v.iter().map(&apply).collect();
    let mut worst = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let m = v.len();
        let h = DMatrix::from_fn(m, m, |i, j| v[i].dotc(&av[j]));
        let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let nb = block.min(m);
        let mut ritz = Vec::with_capacity(nb);
        let mut ritz_av = Vec::with_capacity(nb);
        let mut theta = Vec::with_capacity(nb);
        for &c in idx.iter().take(nb) {
            let y = eig.eigenvectors.column(c);
            let mut x = DVector::zeros(n);
            let mut ax = DVector::zeros(n);
            for j in 0..m {
                x.axpy(y[j], &v[j], C64::new(1.0, 0.0));
                ax.axpy(y[j], &av[j], C64::new(1.0, 0.0));
            }
            theta.push(eig.eigenvalues[c]);
            ritz.push(x);
            ritz_av.push(ax);
        }
        let residuals: Vec<DVector<C64>> = (0..nb).map(|i| &ritz_av[i] - &ritz[i] * C64::new(theta[i], 0.0)).collect();
        worst = residuals.iter().take(k).map(|r| r.norm()).fold(0.0, f64::max);
        if worst < opts.tol {
            return Ok((theta[..k].to_vec(), ritz.into_iter().take(k).collect()));
        }
        if m + nb > max_sub {
            v = ritz;
            av = ritz_av;
        }
        let mut added = 0;
        for (i, r) in residuals.iter().enumerate() {
            if r.norm() < opts.tol {
                continue;
            }
            let mut t = precond(r, theta[i]);
            if orthonormalize_against(&mut t, &v) > 1e-10 {
                av.push(apply(&t));
                v.push(t);
                added += 1;
            }
        }
        if added == 0 {
            break;
        }
    }
    Err(Error::EigensolverNotConverged(worst))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> DMatrix<C64> {
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(i as f64 * 0.37 + (i as f64).sin(), 0.0)
            } else {
                C64::new(0.05 / (1.0 + (i as f64 - j as f64).abs()), 0.02 * ((i * j) as f64).sin())
            }
        });
        (&m + m.adjoint()) * C64::new(0.5, 0.0)
    }

    #[test]
    fn matches_dense_solver() {
        let a = test_matrix(120);
        let diag: Vec<f64> = (0..120).map(|i| a[(i, i)].re).collect();
        let (vals, vecs) = lowest_eigenpairs(|x| &a * x, diagonal_preconditioner(&diag), &diag, 3, &[], &DavidsonOptions::default()).unwrap();
        let mut dense: Vec<f64> = nalgebra::SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
        dense.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for i in 0..3 {
            assert!((vals[i] - dense[i]).abs() < 1e-9, "{vals:?} {:?}", &dense[..3]);
            assert!((&a * &vecs[i] - &vecs[i] * C64::new(vals[i], 0.0)).norm() < 1e-6);
        }
        assert!(vecs[0].dotc(&vecs[1]).norm() < 1e-8);
    }

    #[test]
    fn warm_start_converges_immediately() {
        let a = test_matrix(80);
        let diag: Vec<f64> = (0..80).map(|i| a[(i, i)].re).collect();
        let (_, vecs) = lowest_eigenpairs(|x| &a * x, diagonal_preconditioner(&diag), &diag, 2, &[], &DavidsonOptions::default()).unwrap();
        let calls = std::cell::Cell::new(0);
        let (_, _) = lowest_eigenpairs(
            |x| {
                calls.set(calls.get() + 1);
                &a * x
            },
            diagonal_preconditioner(&diag),
            &diag,
            2,
            &vecs,
            &DavidsonOptions::default(),
        )
        .unwrap();
        assert!(calls.get() <= 12, "{}", calls.get());
    }
}
