//! Action of `exp(-i dt H)` on a vector for sparse Hermitian `H`, by an
//! adaptive-step Lanczos (Krylov) scheme.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::dense::ZERO;
use super::sparse::SparseOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    /// Relative error allowed over the whole step.
    pub tol: f64,
    /// Largest Krylov subspace built before the step is split.
    pub max_krylov_dim: usize,
    pub max_substeps: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_krylov_dim: 30, max_substeps: 100_000 }
    }
}

impl KrylovConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Tridiagonal Lanczos matrix kept in eigen-decomposed form so the small
/// exponential can be evaluated for many step lengths.
struct SmallExp {
    values: Vec<f64>,
    /// First row of the eigenvector matrix, `Q[0, k]`.
    first: Vec<f64>,
    /// Last row, `Q[m-1, k]`.
    last: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SmallExp {
    fn new(alpha: &[f64], beta: &[f64]) -> Self {
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let first = (0..m).map(|k| eig.eigenvectors[(0, k)]).collect();
        let last = (0..m).map(|k| eig.eigenvectors[(m - 1, k)]).collect();
        Self { values: eig.eigenvalues.iter().copied().collect(), first, last, vectors: eig.eigenvectors }
    }

    /// Last component of `exp(-i tau T) e_1`.
    fn last_component(&self, tau: f64) -> C64 {
        self.values
            .iter()
            .zip(&self.first)
            .zip(&self.last)
            .map(|((&l, &f), &g)| C64::from_polar(g * f, -tau * l))
            .sum()
    }

    /// `exp(-i tau T) e_1`.
    fn coefficients(&self, tau: f64) -> Vec<C64> {
        let m = self.values.len();
        let phased: Vec<C64> = self
            .values
            .iter()
            .zip(&self.first)
            .map(|(&l, &f)| C64::from_polar(f, -tau * l))
            .collect();
        (0..m)
            .map(|i| (0..m).map(|k| phased[k] * self.vectors[(i, k)]).sum())
            .collect()
    }
}

/// `exp(-i dt h) psi` to relative accuracy `cfg.tol`.
///
/// `h` must be Hermitian; `dt` may be negative.
pub fn expm_action(h: &SparseOperator, dt: f64, psi: &[C64], cfg: &KrylovConfig) -> Result<Vec<C64>> {
    if psi.len() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for operator of dimension {}",
            psi.len(),
            h.dim()
        )));
    }
    if !h.is_hermitian(super::dense::HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation: h.hermiticity_deviation() });
    }
    let mut v = psi.to_vec();
    let scale = norm(&v);
    if dt == 0.0 || scale == 0.0 || h.nnz() == 0 {
        return Ok(v);
    }

    let n = h.dim();
    let m_max = cfg.max_krylov_dim.clamp(2, n.max(2));
    let total = dt.abs();
    let sign = dt.signum();
    let h_norm = h.norm_bound().max(f64::MIN_POSITIVE);
    let mut done = 0.0;
    let mut substeps = 0;
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max);
    let mut w = vec![ZERO; n];

    while done < total {
        substeps += 1;
        if substeps > cfg.max_substeps {
            return Err(Error::NoConvergence(format!(
                "{} substeps covered only {done} of {total}",
                cfg.max_substeps
            )));
        }
        let remaining = total - done;
        let beta0 = norm(&v);
        basis.clear();
        basis.push(v.iter().map(|z| z / beta0).collect());
        let mut alpha = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);

        let mut accepted: Option<(f64, Vec<C64>)> = None;
        for j in 0..m_max {
            h.apply_into(&basis[j], &mut w);
            let a = dotc(&basis[j], &w).re;
            for (wi, bi) in w.iter_mut().zip(&basis[j]) {
                *wi -= a * bi;
            }
            if j > 0 {
                let b = beta[j - 1];
                for (wi, bi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= b * bi;
                }
            }
            // One pass of full reorthogonalization keeps the basis orthonormal.
            for b in &basis {
                let c = dotc(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
            alpha.push(a);
            let b_next = norm(&w);
            let small = SmallExp::new(&alpha, &beta);
            let step_tol = cfg.tol * 0.5;

            // Invariant subspace: the projection is exact for any step.
            if b_next <= 1e-13 * h_norm {
                accepted = Some((remaining, small.coefficients(sign * remaining)));
                break;
            }
            let err = |tau: f64| b_next * small.last_component(sign * tau).norm();
            let budget = |tau: f64| step_tol * (tau / total).max(1e-3);
            if err(remaining) <= budget(remaining) {
                accepted = Some((remaining, small.coefficients(sign * remaining)));
                break;
            }
            if j + 1 == m_max {
                // Largest admissible step on the current basis, by bisection.
                let (mut lo, mut hi) = (0.0, remaining);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if err(mid) <= budget(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                if lo <= 0.0 {
                    return Err(Error::NoConvergence("Krylov step collapsed to zero".into()));
                }
                accepted = Some((lo, small.coefficients(sign * lo)));
                break;
            }
            beta.push(b_next);
            basis.push(w.iter().map(|z| z / b_next).collect());
        }

        let (tau, coeffs) = accepted.expect("loop always accepts or returns");
        v.iter_mut().for_each(|z| *z = ZERO);
        for (c, b) in coeffs.iter().zip(&basis) {
            let c = c * beta0;
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += c * bi;
            }
        }
        done += tau;
        if remaining - tau <= 1e-15 * total {
            break;
        }
    }
    Ok(v)
}
