use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix. Row-major semantics for indexing; storage is whatever
/// nalgebra picks.
pub type ComplexMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative tolerance used when a Hermiticity claim is verified.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Build a matrix from nested rows of complex entries.
pub fn from_rows(rows: &[&[C64]]) -> ComplexMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    ComplexMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn from_real_diag(diag: &[f64]) -> ComplexMatrix {
    let n = diag.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
}

/// `|i><j|` in dimension `dim`.
pub fn dyad(dim: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    m[(i, j)] = ONE;
    m
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "commutator of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a * b - b * a)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `tr(a^dag b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `max|M - M^dag| <= tol * max|M|`, with square shape required.
pub fn is_hermitian(m: &ComplexMatrix, rel_tol: f64) -> bool {
    m.is_square() && hermiticity_deviation(m) <= rel_tol * max_abs(m).max(f64::MIN_POSITIVE)
}

pub fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("non-square matrix {:?}", m.shape())));
    }
    let dev = hermiticity_deviation(m);
    // Loose enough for density matrices assembled by floating-point contraction.
    if dev > 1e-10 * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are ascending and the
/// columns of the returned matrix are the matching orthonormal eigenvectors.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(m)?;
    let n = m.nrows();
    let sym = symmetrize(m);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Ascending eigenvalues of a Hermitian matrix, without eigenvectors.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let mut values: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Row-major `[re, im]` pairs, the matrix encoding used in model and report files.
pub fn to_pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(Error::Parse("matrix rows must be non-empty and of equal length".into()));
    }
    Ok(ComplexMatrix::from_fn(n, m, |r, c| C64::new(rows[r][c][0], rows[r][c][1])))
}

/// `(M + M^dag) / 2`.
pub fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::operators::{gellmann_x01, gellmann_z2, pauli_x, pauli_y, pauli_z};
    use approx::assert_abs_diff_eq;

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        let diff = max_abs(&(a - b));
        assert!(diff <= tol, "matrices differ by {diff:e}\n{a}\n{b}");
    }

    /// Index-arithmetic tensor product used as an independent oracle.
    fn kron_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let (ra, ca) = a.shape();
        let (rb, cb) = b.shape();
        let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                for k in 0..rb {
                    for l in 0..cb {
                        out[(i * rb + k, j * cb + l)] = a[(i, j)] * b[(k, l)];
                    }
                }
            }
        }
        out
    }

    #[test]
    fn kron_identities_and_paulis() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        assert_eq!(kron(&pauli_z(), &pauli_z()), from_real_diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_xz_on_basis_vector() {
        let xz = kron(&pauli_x(), &pauli_z());
        assert_eq!(xz, kron_oracle(&pauli_x(), &pauli_z()));
        // |10> is basis index 2.
        let mut v = nalgebra::DVector::<C64>::zeros(4);
        v[2] = ONE;
        let out = &xz * v;
        let mut expected = nalgebra::DVector::<C64>::zeros(4);
        expected[0] = ONE;
        assert_eq!(out, expected);
    }

    #[test]
    fn commutator_examples() {
        let zero = ComplexMatrix::zeros(2, 2);
        assert_eq!(commutator(&pauli_z(), &pauli_z()).unwrap(), zero);
        let zx = commutator(&pauli_z(), &pauli_x()).unwrap();
        assert_close(&zx, &(pauli_y() * C64::new(0.0, 2.0)), 1e-15);
        assert!(commutator(&pauli_z(), &identity(3)).is_err());
    }

    #[test]
    fn gellmann_pair_commutes() {
        // 3x3 multiplication oracle.
        let z2 = gellmann_z2();
        let x01 = gellmann_x01();
        let mut ab = ComplexMatrix::zeros(3, 3);
        let mut ba = ComplexMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    ab[(i, j)] += z2[(i, k)] * x01[(k, j)];
                    ba[(i, j)] += x01[(i, k)] * z2[(k, j)];
                }
            }
        }
        assert!(max_abs(&(ab - ba)) < 1e-15);
        assert!(max_abs(&commutator(&z2, &x01).unwrap()) < 1e-15);
    }

    #[test]
    fn eig_examples() {
        let (vals, vecs) = hermitian_eig(&from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        for (col, row) in [(0, 1), (1, 2), (2, 0)] {
            assert_abs_diff_eq!(vecs[(row, col)].norm(), 1.0, epsilon = 1e-14);
        }

        let (vals, vecs) = hermitian_eig(&pauli_x()).unwrap();
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = nalgebra::DVector::from_vec(vec![C64::new(s, 0.0), C64::new(-s, 0.0)]);
        let plus = nalgebra::DVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]);
        assert_abs_diff_eq!(vecs.column(0).dotc(&minus).norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vecs.column(1).dotc(&plus).norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_of_model_a_operator_gives_pointer_states() {
        let op = gellmann_z2() + gellmann_x01();
        let (vals, vecs) = hermitian_eig(&op).unwrap();
        let r3 = 3f64.sqrt();
        let expected_vals = [-2.0 / r3, 1.0 / r3 - 1.0, 1.0 / r3 + 1.0];
        for (v, e) in vals.iter().zip(expected_vals) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-12);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Ascending order: |2>, (|0>-|1>)/sqrt2, (|0>+|1>)/sqrt2.
        let p2 = [0.0, 0.0, 1.0];
        let p1 = [s, -s, 0.0];
        let p0 = [s, s, 0.0];
        for (col, p) in [(0, p2), (1, p1), (2, p0)] {
            let overlap: C64 = (0..3).map(|i| vecs[(i, col)].conj() * p[i]).sum();
            assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
        }
        let v = &vecs;
        assert!(max_abs(&(v.adjoint() * v - identity(3))) < 1e-10);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = dyad(2, 0, 1);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn kron_is_associative_bitwise() {
        // Integer entries keep every product exact, so equality is bitwise.
        let a = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64 - 1.0, j as f64));
        let b = ComplexMatrix::from_fn(3, 2, |i, j| C64::new(2.0 * j as f64, i as f64 - 2.0));
        let c = pauli_y() + pauli_x() * C64::new(3.0, 0.0);
        assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
    }
}
