use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the joint Hilbert-space dimension.
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

/// Ordered local dimensions of the joint space. Site 0 is the system; sites
/// `1..=n_env` are the environment degrees of freedom.
///
/// Joint basis indices are row-major with site 0 most significant:
/// `index = i_0 * d_1 * ... * d_n + i_1 * d_2 * ... * d_n + ... + i_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SubsystemLayout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(dims: Vec<usize>, cap: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidLayout("layout must contain at least the system".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidLayout(format!("local dimension {d} < 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= cap)
                .ok_or(Error::DimensionCap { dim: usize::MAX.min(total.saturating_mul(d)), cap })?;
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len() - 1).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(Self { dims, strides, total })
    }

    /// System of dimension `system` plus `n_env` environment sites of dimension `env`.
    pub fn uniform(system: usize, env: usize, n_env: usize) -> Result<Self> {
        let mut dims = vec![system];
        dims.extend(std::iter::repeat_n(env, n_env));
        Self::new(dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, site: usize) -> usize {
        self.dims[site]
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn n_env(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn system_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    /// Distance in the joint index between consecutive levels of `site`.
    pub fn stride(&self, site: usize) -> usize {
        self.strides[site]
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site < self.dims.len() {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange { site, sites: self.dims.len() })
        }
    }

    /// Local level of `site` within the joint basis index.
    #[inline]
    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.strides[site]) % self.dims[site]
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.dims.len()).map(|s| self.digit(index, s)).collect()
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    /// Layout restricted to the given sites, in the given order.
    pub fn sub_layout(&self, sites: &[usize]) -> Result<Self> {
        for &s in sites {
            self.check_site(s)?;
        }
        Self::with_cap(sites.iter().map(|&s| self.dims[s]).collect(), usize::MAX)
    }

    /// Layout of the environment alone (sites 1..).
    pub fn environment(&self) -> Option<Self> {
        if self.dims.len() < 2 {
            return None;
        }
        Self::with_cap(self.dims[1..].to_vec(), usize::MAX).ok()
    }
}

impl TryFrom<Vec<usize>> for SubsystemLayout {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<SubsystemLayout> for Vec<usize> {
    fn from(layout: SubsystemLayout) -> Self {
        layout.dims
    }
}
