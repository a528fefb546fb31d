use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::dense::{hermitian_eig, hs_inner, hs_norm, identity, ComplexMatrix};
use crate::model::operators::{asym_offdiag, sym_offdiag};

/// Singular values below this fraction of the largest are treated as zero.
pub const NULL_SPACE_TOL: f64 = 1e-10;

/// Orthonormal (Hilbert-Schmidt) basis of the Hermitian `d x d` matrices.
/// `I / sqrt(d)` comes first; every other element is traceless.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = vec![identity(d).unscale((d as f64).sqrt())];
    for i in 0..d {
        for j in i + 1..d {
            basis.push(sym_offdiag(d, i, j).scale(s));
            basis.push(asym_offdiag(d, i, j).scale(s));
        }
    }
    for k in 1..d {
        let norm = ((k * (k + 1)) as f64).sqrt();
        basis.push(ComplexMatrix::from_fn(d, d, |r, c| {
            if r != c || r > k {
                C64::new(0.0, 0.0)
            } else if r < k {
                C64::new(1.0 / norm, 0.0)
            } else {
                C64::new(-(k as f64) / norm, 0.0)
            }
        }));
    }
    basis
}

/// Gram-Schmidt against `basis` (assumed orthonormal). Returns the normalized
/// residual, or `None` when `op` is already in the span up to `rel_tol`.
pub fn orthonormalize_against(op: &ComplexMatrix, basis: &[ComplexMatrix], rel_tol: f64) -> Option<ComplexMatrix> {
    let scale = hs_norm(op);
    if scale == 0.0 {
        return None;
    }
    let mut r = op.clone();
    // Two passes keep the residual orthogonal when op is nearly dependent.
    for _ in 0..2 {
        for b in basis {
            let c = hs_inner(b, &r);
            r -= b * c;
        }
    }
    let n = hs_norm(&r);
    (n > rel_tol * scale).then(|| r.unscale(n))
}

/// Orthonormal basis of the span of `ops`.
pub fn span_basis(ops: &[ComplexMatrix], rel_tol: f64) -> Vec<ComplexMatrix> {
    let mut basis = Vec::new();
    for op in ops {
        if let Some(b) = orthonormalize_against(op, &basis, rel_tol) {
            basis.push(b);
        }
    }
    basis
}

/// Hermitian system operators commuting with every generator.
#[derive(Debug, Clone)]
pub struct CommutantBasis {
    pub generators: Vec<ComplexMatrix>,
    /// Orthonormal, Hermitian, `I / sqrt(d)` first.
    pub basis: Vec<ComplexMatrix>,
}

impl CommutantBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// True when something beyond the identity commutes with all generators.
    pub fn is_nontrivial(&self) -> bool {
        self.basis.len() > 1
    }

    pub fn traceless(&self) -> &[ComplexMatrix] {
        &self.basis[1..]
    }
}

/// Commutant of `generators` within the Hermitian `d x d` matrices, from the
/// null space of `X -> [G, X]` stacked over all generators and written in the
/// real coordinates of [`hermitian_basis`].
pub fn commutant(generators: &[ComplexMatrix], d: usize) -> Result<CommutantBasis> {
    for g in generators {
        if g.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!("generator shape {:?}, expected {d}x{d}", g.shape())));
        }
    }
    let herm = hermitian_basis(d);
    let gens = span_basis(generators, 1e-12);
    let n = herm.len();
    if gens.is_empty() {
        return Ok(CommutantBasis { generators: generators.to_vec(), basis: herm });
    }

    let rows_per_gen = 2 * d * d;
    let mut map = DMatrix::<f64>::zeros(gens.len() * rows_per_gen, n);
    for (a, b) in herm.iter().enumerate() {
        for (g_idx, g) in gens.iter().enumerate() {
            let c = g * b - b * g;
            let base = g_idx * rows_per_gen;
            for r in 0..d {
                for col in 0..d {
                    let k = r * d + col;
                    map[(base + 2 * k, a)] = c[(r, col)].re;
                    map[(base + 2 * k + 1, a)] = c[(r, col)].im;
                }
            }
        }
    }

    let svd = map.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    // Rows of v_t without a matching non-negligible singular value also span
    // the null space; there are none here since the map has at least n rows.
    let mut null_ops = Vec::new();
    for (k, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma <= NULL_SPACE_TOL * sigma_max {
            let mut x = ComplexMatrix::zeros(d, d);
            for (a, b) in herm.iter().enumerate() {
                x += b.scale(v_t[(k, a)]);
            }
            null_ops.push(x);
        }
    }

    let mut basis = vec![herm[0].clone()];
    for x in &null_ops {
        if let Some(b) = orthonormalize_against(x, &basis, 1e-8) {
            basis.push(fix_sign(b));
        }
    }
    Ok(CommutantBasis { generators: generators.to_vec(), basis })
}

/// Flip the sign so the first entry with a noticeable real (else imaginary)
/// part is positive. Keeps reported operators reproducible despite the SVD's
/// sign freedom.
pub fn fix_sign(m: ComplexMatrix) -> ComplexMatrix {
    let tol = 1e-9 * crate::linalg::dense::max_abs(&m);
    let first = |part: fn(&C64) -> f64| {
        (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| (r, c))).map(|rc| part(&m[rc])).find(|v| v.abs() > tol)
    };
    match first(|z| z.re).or_else(|| first(|z| z.im)) {
        Some(v) if v < 0.0 => -m,
        _ => m,
    }
}

/// Pointer observable derived from a commutant.
#[derive(Debug, Clone)]
pub struct PointerObservable {
    pub operator: ComplexMatrix,
    pub spectrum: Vec<f64>,
    /// Columns are the pointer states, ordered by ascending eigenvalue.
    pub basis: ComplexMatrix,
    pub degenerate: bool,
    /// Groups of basis columns sharing one eigenvalue.
    pub blocks: Vec<Vec<usize>>,
}

fn generic_weight(k: usize) -> f64 {
    ((k + 1) as f64 * 0.618_033_988_749_894_9).fract() + 0.5
}

/// Representative pointer observable: a fixed generic combination of the
/// traceless elements of the commutant's centre. Elements of the centre commute
/// with everything that commutes with the generators, so their joint eigenbasis
/// is the finest basis every admissible pointer observable is diagonal in.
/// Returns `None` when the commutant is trivial.
pub fn pointer_observable(comm: &CommutantBasis) -> Result<Option<PointerObservable>> {
    if !comm.is_nontrivial() {
        return Ok(None);
    }
    let d = comm.basis[0].nrows();
    let mut extended = comm.generators.clone();
    extended.extend(comm.basis.iter().cloned());
    let center = commutant(&extended, d)?;
    let pool = if center.is_nontrivial() { center.traceless() } else { comm.traceless() };
    let mut op = ComplexMatrix::zeros(d, d);
    for (k, b) in pool.iter().enumerate() {
        op += b.scale(generic_weight(k));
    }
    let op = fix_sign(op.unscale(hs_norm(&op)));
    let (spectrum, basis) = hermitian_eig(&op)?;
    let scale = spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for k in 0..spectrum.len() {
        match blocks.last_mut() {
            Some(block) if (spectrum[k] - spectrum[k - 1]).abs() <= 1e-8 * scale => block.push(k),
            _ => blocks.push(vec![k]),
        }
    }
    let degenerate = blocks.len() < spectrum.len();
    Ok(Some(PointerObservable { operator: op, spectrum, basis, degenerate, blocks }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{commutator, hs_norm};
    use crate::model::operators::{gellmann_x01, gellmann_x02, gellmann_z2, pauli_x, pauli_z};

    #[test]
    fn basis_is_orthonormal() {
        for d in 2..5 {
            let b = hermitian_basis(d);
            assert_eq!(b.len(), d * d);
            for (i, x) in b.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((hs_inner(x, y) - C64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_pauli() {
        let c = commutant(&[pauli_z()], 2).unwrap();
        assert_eq!(c.dim(), 2);
        let p = pointer_observable(&c).unwrap().unwrap();
        let expect = pauli_z().unscale(2f64.sqrt());
        assert!(hs_norm(&(p.operator - expect)) < 1e-10);
        assert!(!p.degenerate);
    }

    #[test]
    fn pauli_pair_is_trivial() {
        let c = commutant(&[pauli_z(), pauli_x()], 2).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(pointer_observable(&c).unwrap().is_none());
    }

    #[test]
    fn qutrit_pair_without_common_basis() {
        let c = commutant(&[gellmann_x02(), gellmann_x01()], 3).unwrap();
        assert!(!c.is_nontrivial());
    }

    #[test]
    fn model_a_operator() {
        let a = gellmann_z2() + gellmann_x01();
        let c = commutant(&[a.clone()], 3).unwrap();
        assert_eq!(c.dim(), 3);
        for b in &c.basis {
            assert!(hs_norm(&commutator(b, &a).unwrap()) < 1e-10);
        }
        let p = pointer_observable(&c).unwrap().unwrap();
        assert!(!p.degenerate);
        // Each pointer state is an eigenvector of the coupling operator.
        for k in 0..3 {
            let v = p.basis.column(k).into_owned();
            let av = &a * &v;
            let lambda = (v.adjoint() * &av)[(0, 0)];
            assert!((av - v * lambda).norm() < 1e-10);
        }
    }

    #[test]
    fn degenerate_when_centre_is_trivial() {
        // Generators acting only on the first qubit of a 2x2 pair: commutant is
        // I (x) M_2, a full matrix algebra with trivial centre.
        let z = crate::linalg::dense::kron(&pauli_z(), &identity(2));
        let x = crate::linalg::dense::kron(&pauli_x(), &identity(2));
        let c = commutant(&[z, x], 4).unwrap();
        assert_eq!(c.dim(), 4);
        let p = pointer_observable(&c).unwrap().unwrap();
        assert!(p.degenerate);
        assert_eq!(p.blocks.len(), 2);
    }
}
