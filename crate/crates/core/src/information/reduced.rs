use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::evolution::StateVector;
use crate::layout::SubsystemLayout;
use crate::linalg::dense::{check_hermitian, ComplexMatrix};

/// Eigenvalues this far outside `[0, 1]` are rounding noise and get clipped.
pub const CLIP_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-8;

/// Bitmask of sites; bit `s` set means site `s` is included.
pub type SiteMask = u64;

pub fn mask_of(sites: &[usize]) -> SiteMask {
    sites.iter().fold(0, |m, &s| m | (1 << s))
}

fn check_mask(layout: &SubsystemLayout, mask: SiteMask) -> Result<()> {
    let n = layout.n_sites();
    if n > 63 || mask >> n != 0 {
        return Err(Error::SiteOutOfRange { site: 63 - mask.leading_zeros() as usize, sites: n });
    }
    Ok(())
}

/// Joint index -> (index within `mask` sites, index within the rest), both
/// row-major with lower site numbers more significant.
fn split_indices(layout: &SubsystemLayout, mask: SiteMask) -> (Vec<(u32, u32)>, usize, usize) {
    let dims = layout.dims();
    let (mut d_in, mut d_out) = (1usize, 1usize);
    let mut w_in = vec![0usize; dims.len()];
    let mut w_out = vec![0usize; dims.len()];
    for s in (0..dims.len()).rev() {
        if mask >> s & 1 == 1 {
            w_in[s] = d_in;
            d_in *= dims[s];
        } else {
            w_out[s] = d_out;
            d_out *= dims[s];
        }
    }
    let mut idx: Vec<(u32, u32)> = vec![(0, 0)];
    for s in 0..dims.len() {
        let mut next = Vec::with_capacity(idx.len() * dims[s]);
        for &(a, b) in &idx {
            for digit in 0..dims[s] {
                next.push(((a as usize + digit * w_in[s]) as u32, (b as usize + digit * w_out[s]) as u32));
            }
        }
        idx = next;
    }
    (idx, d_in, d_out)
}

/// Reduced density matrix of the `mask` sites, computed as a Gram matrix of the
/// reshaped amplitudes.
fn gram(psi: &StateVector, mask: SiteMask) -> ComplexMatrix {
    let (idx, d_in, d_out) = split_indices(psi.layout(), mask);
    let amps = psi.amplitudes();
    // a[(r, k)] = conj(psi[k, r]) gives (a^dag a)[k, k'] = sum_r psi[k, r] conj(psi[k', r]).
    let mut a = DMatrix::<C64>::zeros(d_out, d_in);
    for (&(k, r), z) in idx.iter().zip(amps) {
        a[(r as usize, k as usize)] = z.conj();
    }
    a.ad_mul(&a)
}

/// Reduced density matrix on the sites in `keep` (sorted, distinct).
pub fn partial_trace(psi: &StateVector, keep: &[usize]) -> Result<ComplexMatrix> {
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("kept sites must be sorted and distinct".into()));
    }
    let mask = mask_of(keep);
    check_mask(psi.layout(), mask)?;
    Ok(gram(psi, mask))
}

fn entropy_of_spectrum(values: impl Iterator<Item = f64>) -> f64 {
    values
        .map(|l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in bits.
pub fn entropy(rho: &ComplexMatrix) -> Result<f64> {
    check_hermitian(rho)?;
    let tr: C64 = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
        return Err(Error::BadTrace { trace: tr.re });
    }
    let values = crate::linalg::dense::symmetrize(rho).symmetric_eigenvalues();
    Ok(entropy_of_spectrum(values.iter().copied()))
}

/// Entropy of the reduced state on the `mask` sites of a pure state, computed
/// on whichever side of the bipartition is smaller.
pub fn subsystem_entropy(psi: &StateVector, mask: SiteMask) -> Result<f64> {
    let layout = psi.layout();
    check_mask(layout, mask)?;
    let full: SiteMask = (1 << layout.n_sites()) - 1;
    let d_in: usize = (0..layout.n_sites()).filter(|s| mask >> s & 1 == 1).map(|s| layout.dim(s)).product();
    if mask == 0 || mask == full {
        return Ok(0.0);
    }
    let side = if d_in * d_in <= layout.total_dim() { mask } else { full & !mask };
    let rho = gram(psi, side);
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::BadTrace { trace: tr });
    }
    Ok(entropy_of_spectrum(rho.symmetric_eigenvalues().iter().copied()))
}

/// Subsystem entropies of one pure state, memoized by site mask.
pub struct EntropyCache<'a> {
    psi: &'a StateVector,
    full: SiteMask,
    cache: HashMap<SiteMask, f64>,
}

impl<'a> EntropyCache<'a> {
    pub fn new(psi: &'a StateVector) -> Self {
        let full = (1 << psi.layout().n_sites()) - 1;
        Self { psi, full, cache: HashMap::new() }
    }

    pub fn state(&self) -> &StateVector {
        self.psi
    }

    pub fn entropy(&mut self, mask: SiteMask) -> Result<f64> {
        // S(A) = S(complement of A) for pure states.
        let key = mask.min(self.full & !mask);
        if let Some(&s) = self.cache.get(&key) {
            return Ok(s);
        }
        let s = subsystem_entropy(self.psi, key)?;
        self.cache.insert(key, s);
        Ok(s)
    }

    pub fn system_entropy(&mut self) -> Result<f64> {
        self.entropy(1)
    }

    /// `I(S:F) = S(S) + S(F) - S(SF)` for environment sites `fragment`.
    pub fn mutual_information(&mut self, fragment: &[usize]) -> Result<f64> {
        let f = mask_of(fragment);
        check_mask(self.psi.layout(), f)?;
        if f & 1 == 1 {
            return Err(Error::InvalidParameter("a fragment cannot contain the system".into()));
        }
        if f == 0 {
            return Ok(0.0);
        }
        Ok(self.entropy(1)? + self.entropy(f)? - self.entropy(f | 1)?)
    }
}

/// `I(S:F)` in bits for a pure joint state.
pub fn mutual_information(psi: &StateVector, fragment: &[usize]) -> Result<f64> {
    EntropyCache::new(psi).mutual_information(fragment)
}
