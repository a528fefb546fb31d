use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::dense::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;

/// Square sparse complex operator in compressed-row form.
///
/// Entries are unique per `(row, col)` and sorted by column within a row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl SparseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), values: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            cols: (0..dim).collect(),
            values: vec![C64::new(1.0, 0.0); dim],
        }
    }

    /// Duplicate `(row, col)` pairs are summed. Exact zeros are kept out.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r}, {c}) outside dimension {dim}"
                )));
            }
            *rows[r].entry(c).or_insert(ZERO) += v;
        }
        Ok(Self::from_rows(dim, rows))
    }

    fn from_rows(dim: usize, rows: Vec<BTreeMap<usize, C64>>) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != ZERO {
                    cols.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { dim, row_ptr, cols, values }
    }

    pub fn from_dense(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!("non-square matrix {:?}", m.shape())));
        }
        let n = m.nrows();
        let triplets = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| (m[(i, j)] != ZERO).then_some((i, j, m[(i, j)])));
        Self::from_triplets(n, triplets)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzero entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.values[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => ZERO,
        }
    }

    /// `out = self * x`.
    pub fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        self.apply_into(x, &mut out);
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out.prune();
        out
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &Self, factor: C64) -> Result<Self> {
        self.check_same_dim(other)?;
        let triplets = self
            .iter()
            .chain(other.iter().map(|(r, c, v)| (r, c, v * factor)));
        Self::from_triplets(self.dim, triplets)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); self.dim];
        for (r, row) in rows.iter_mut().enumerate() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let mid = self.cols[k];
                let a = self.values[k];
                for l in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    *row.entry(other.cols[l]).or_insert(ZERO) += a * other.values[l];
                }
            }
        }
        Ok(Self::from_rows(self.dim, rows))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(r, c, v)| (c, r, v.conj())))
            .expect("indices already validated")
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }

    /// `max|H - H^dag|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.iter()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_deviation() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// Upper bound on the spectral norm: the largest absolute row sum.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.values[self.row_ptr[r]..self.row_ptr[r + 1]].iter().map(|v| v.norm()).sum())
            .fold(0.0, f64::max)
    }

    fn prune(&mut self) {
        if self.values.iter().all(|v| *v != ZERO) {
            return;
        }
        let triplets: Vec<_> = self.iter().collect();
        *self = Self::from_triplets(self.dim, triplets).expect("indices already validated");
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)))
        }
    }
}

/// Joint-space operator acting as `local` on `site` and as the identity
/// everywhere else.
pub fn embed(local: &ComplexMatrix, site: usize, layout: &SubsystemLayout) -> Result<SparseOperator> {
    embed_product(&[(site, local)], layout)
}

/// Joint-space tensor string: the product of site-local operators on distinct
/// sites, identity on the rest.
pub fn embed_product(
    factors: &[(usize, &ComplexMatrix)],
    layout: &SubsystemLayout,
) -> Result<SparseOperator> {
    let mut seen = vec![false; layout.n_sites()];
    for &(site, op) in factors {
        layout.check_site(site)?;
        if seen[site] {
            return Err(Error::DimensionMismatch(format!("site {site} appears twice in a tensor string")));
        }
        seen[site] = true;
        let d = layout.dim(site);
        if op.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "operator of shape {:?} on site {site} with local dimension {d}",
                op.shape()
            )));
        }
    }
    // Per-factor sparse columns: for each local input level, (output level, value).
    let columns: Vec<(usize, Vec<Vec<(usize, C64)>>)> = factors
        .iter()
        .map(|&(site, op)| {
            let d = layout.dim(site);
            let cols = (0..d)
                .map(|c| (0..d).filter(|&r| op[(r, c)] != ZERO).map(|r| (r, op[(r, c)])).collect())
                .collect();
            (site, cols)
        })
        .collect();

    let dim = layout.total_dim();
    let mut triplets = Vec::new();
    let mut frontier: Vec<(usize, C64)> = Vec::new();
    let mut next: Vec<(usize, C64)> = Vec::new();
    for col in 0..dim {
        frontier.clear();
        frontier.push((col, C64::new(1.0, 0.0)));
        for (site, cols) in &columns {
            let stride = layout.stride(*site);
            let level = layout.digit(col, *site);
            next.clear();
            for &(row, amp) in &frontier {
                let base = row - level * stride;
                for &(out, v) in &cols[level] {
                    next.push((base + out * stride, amp * v));
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        triplets.extend(frontier.iter().map(|&(row, v)| (row, col, v)));
    }
    SparseOperator::from_triplets(dim, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{from_real_diag, identity, kron};
    use crate::model::operators::{pauli_x, pauli_z};

    #[test]
    fn embed_identity_is_joint_identity() {
        let layout = SubsystemLayout::new(vec![2, 2, 2]).unwrap();
        for site in 0..3 {
            assert_eq!(embed(&identity(2), site, &layout).unwrap(), SparseOperator::identity(8));
        }
    }

    #[test]
    fn embed_matches_kron_oracle() {
        let layout = SubsystemLayout::new(vec![2, 2]).unwrap();
        let on1 = embed(&pauli_z(), 1, &layout).unwrap().to_dense();
        assert_eq!(on1, from_real_diag(&[1.0, -1.0, 1.0, -1.0]));
        assert_eq!(on1, kron(&identity(2), &pauli_z()));
        let on0 = embed(&pauli_z(), 0, &layout).unwrap().to_dense();
        assert_eq!(on0, from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
        assert_eq!(on0, kron(&pauli_z(), &identity(2)));
    }

    #[test]
    fn embed_rejects_bad_input() {
        let layout = SubsystemLayout::new(vec![3, 2]).unwrap();
        assert!(matches!(embed(&pauli_z(), 2, &layout), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(embed(&pauli_z(), 0, &layout), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn tensor_string_matches_kron() {
        let layout = SubsystemLayout::new(vec![2, 3, 2]).unwrap();
        let x3 = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let op = embed_product(&[(0, &pauli_x()), (1, &x3)], &layout).unwrap();
        let oracle = kron(&kron(&pauli_x(), &x3), &identity(2));
        assert_eq!(op.to_dense(), oracle);
    }

    #[test]
    fn triplets_sum_duplicates() {
        let op = SparseOperator::from_triplets(
            2,
            [(0, 0, C64::new(1.0, 0.0)), (0, 0, C64::new(2.0, 0.0)), (1, 0, C64::new(0.0, 1.0))],
        )
        .unwrap();
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.get(0, 0), C64::new(3.0, 0.0));
        assert!(SparseOperator::from_triplets(2, [(2, 0, C64::new(1.0, 0.0))]).is_err());
    }

    #[test]
    fn dense_round_trip_is_exact() {
        let m = ComplexMatrix::from_fn(4, 4, |i, j| {
            if (i + j) % 3 == 0 { C64::new(0.1 * i as f64, -0.7 * j as f64) } else { ZERO }
        });
        assert_eq!(SparseOperator::from_dense(&m).unwrap().to_dense(), m);
    }
}
