use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;

pub const NORM_TOL: f64 = 1e-10;

/// Normalized amplitude vector over a joint Hilbert space. Index order is
/// row-major in the layout's sites, site 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: SubsystemLayout,
    amps: Vec<C64>,
}

pub fn norm(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

impl StateVector {
    pub fn new(layout: SubsystemLayout, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for joint dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        let n = norm(&amps);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self { layout, amps })
    }

    /// Normalizes `amps` first; fails only for a zero vector or a length mismatch.
    pub fn normalized(layout: SubsystemLayout, mut amps: Vec<C64>) -> Result<Self> {
        let n = norm(&amps);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Self::new(layout, amps)
    }

    pub fn basis(layout: SubsystemLayout, index: usize) -> Result<Self> {
        let mut amps = vec![C64::new(0.0, 0.0); layout.total_dim()];
        *amps
            .get_mut(index)
            .ok_or_else(|| Error::DimensionMismatch(format!("basis index {index} out of range")))? = C64::new(1.0, 0.0);
        Ok(Self { layout, amps })
    }

    /// Tensor product of one local vector per site, each normalized first.
    pub fn product(layout: SubsystemLayout, locals: &[Vec<C64>]) -> Result<Self> {
        if locals.len() != layout.n_sites() {
            return Err(Error::DimensionMismatch(format!(
                "{} local states for {} sites",
                locals.len(),
                layout.n_sites()
            )));
        }
        let mut amps = vec![C64::new(1.0, 0.0)];
        for (site, v) in locals.iter().enumerate() {
            if v.len() != layout.dim(site) {
                return Err(Error::DimensionMismatch(format!(
                    "local state of length {} on site {site} with dimension {}",
                    v.len(),
                    layout.dim(site)
                )));
            }
            let n = norm(v);
            if n == 0.0 {
                return Err(Error::NotNormalized { norm: 0.0 });
            }
            amps = amps.iter().flat_map(|a| v.iter().map(move |b| a * b / n)).collect();
        }
        Self::normalized(layout, amps)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut Vec<C64> {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch("inner product of states on different layouts".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_state_amplitudes() {
        let layout = SubsystemLayout::new(vec![2, 3]).unwrap();
        let s = StateVector::product(
            layout,
            &[vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)], vec![C64::new(0.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 0.0)]],
        )
        .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[1] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[4] - C64::new(0.0, h)).norm() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized_and_wrong_length() {
        let layout = SubsystemLayout::new(vec![2]).unwrap();
        assert!(StateVector::new(layout.clone(), vec![C64::new(1.0, 0.0); 2]).is_err());
        assert!(StateVector::new(layout.clone(), vec![C64::new(1.0, 0.0)]).is_err());
        assert!(StateVector::normalized(layout, vec![C64::new(0.0, 0.0); 2]).is_err());
    }
}
