use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution a Hamiltonian coefficient is drawn from, once per instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientDistribution {
    Constant { value: f64 },
    Normal { mean: f64, sigma: f64 },
    /// `+magnitude` or `-magnitude` with equal probability.
    Rademacher { magnitude: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl CoefficientDistribution {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn normal(mean: f64, sigma: f64) -> Result<Self> {
        let d = Self::Normal { mean, sigma };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_normal() -> Self {
        Self::Normal { mean: 0.0, sigma: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64| x.is_finite();
        match *self {
            Self::Constant { value } if finite(value) => Ok(()),
            Self::Normal { mean, sigma } if finite(mean) && finite(sigma) && sigma > 0.0 => Ok(()),
            Self::Rademacher { magnitude } if finite(magnitude) => Ok(()),
            Self::Uniform { lo, hi } if finite(lo) && finite(hi) && lo < hi => Ok(()),
            other => Err(Error::InvalidDistribution(format!("{other:?}"))),
        }
    }

    pub fn support_is_continuous(&self) -> bool {
        matches!(self, Self::Normal { .. } | Self::Uniform { .. })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::Normal { mean, sigma } => {
                Normal::new(mean, sigma).expect("validated at construction").sample(rng)
            }
            Self::Rademacher { magnitude } => {
                if rng.random::<bool>() { magnitude } else { -magnitude }
            }
            Self::Uniform { lo, hi } => rng.random_range(lo..hi),
        }
    }

    /// Same distribution for `factor * X`, `factor > 0`.
    pub fn rescaled(&self, factor: f64) -> Self {
        match *self {
            Self::Constant { value } => Self::Constant { value: value * factor },
            Self::Normal { mean, sigma } => Self::Normal { mean: mean * factor, sigma: sigma * factor },
            Self::Rademacher { magnitude } => Self::Rademacher { magnitude: magnitude * factor },
            Self::Uniform { lo, hi } => Self::Uniform { lo: lo * factor, hi: hi * factor },
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Normal { .. } => "normal",
            Self::Rademacher { .. } => "rademacher",
            Self::Uniform { .. } => "uniform",
        }
    }
}

/// `kind[:a[:b]]`, e.g. `normal`, `normal:0:2`, `rademacher:1`, `uniform:-1:1`,
/// `constant:0.5`. Omitted arguments take unit defaults.
impl std::str::FromStr for CoefficientDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default().trim().to_ascii_lowercase();
        let args: Vec<f64> = parts
            .map(|p| p.trim().parse::<f64>().map_err(|_| Error::InvalidDistribution(format!("bad number in {s:?}"))))
            .collect::<Result<_>>()?;
        let arg = |k: usize, default: f64| args.get(k).copied().unwrap_or(default);
        let (d, max_args) = match kind.as_str() {
            "constant" => (Self::Constant { value: arg(0, 1.0) }, 1),
            "normal" => (Self::Normal { mean: arg(0, 0.0), sigma: arg(1, 1.0) }, 2),
            "rademacher" => (Self::Rademacher { magnitude: arg(0, 1.0) }, 1),
            "uniform" => (Self::Uniform { lo: arg(0, -1.0), hi: arg(1, 1.0) }, 2),
            _ => return Err(Error::InvalidDistribution(format!("unknown distribution {s:?}"))),
        };
        if args.len() > max_args {
            return Err(Error::InvalidDistribution(format!("too many arguments in {s:?}")));
        }
        d.validate()?;
        Ok(d)
    }
}

impl std::fmt::Display for CoefficientDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Self::Constant { value } => write!(f, "constant:{value}"),
            Self::Normal { mean, sigma } => write!(f, "normal:{mean}:{sigma}"),
            Self::Rademacher { magnitude } => write!(f, "rademacher:{magnitude}"),
            Self::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};

    #[test]
    fn validation() {
        assert!(CoefficientDistribution::normal(0.0, 0.0).is_err());
        assert!(CoefficientDistribution::Uniform { lo: 1.0, hi: 1.0 }.validate().is_err());
        assert!(CoefficientDistribution::Uniform { lo: 0.0, hi: 1.0 }.validate().is_ok());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["normal:0:2", "rademacher:1", "uniform:-1:3", "constant:0.5"] {
            let d: CoefficientDistribution = text.parse().unwrap();
            assert_eq!(d.to_string(), text);
        }
        assert_eq!("normal".parse::<CoefficientDistribution>().unwrap(), CoefficientDistribution::unit_normal());
        assert!("normal:0:0".parse::<CoefficientDistribution>().is_err());
        assert!("gamma".parse::<CoefficientDistribution>().is_err());
        assert!("rademacher:1:2".parse::<CoefficientDistribution>().is_err());
    }

    #[test]
    fn continuity_flags() {
        assert!(CoefficientDistribution::unit_normal().support_is_continuous());
        assert!(CoefficientDistribution::Uniform { lo: -1.0, hi: 1.0 }.support_is_continuous());
        assert!(!CoefficientDistribution::constant(1.0).support_is_continuous());
        assert!(!CoefficientDistribution::Rademacher { magnitude: 1.0 }.support_is_continuous());
    }

    #[test]
    fn rademacher_takes_both_signs() {
        let mut rng = stream_rng(1, Stream::Coefficients, &[]);
        let d = CoefficientDistribution::Rademacher { magnitude: 2.0 };
        let draws: Vec<f64> = (0..64).map(|_| d.sample(&mut rng)).collect();
        assert!(draws.iter().all(|x| x.abs() == 2.0));
        assert!(draws.contains(&2.0) && draws.contains(&-2.0));
    }
}
