use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default dead time at the end of every alternation period.
pub const DEFAULT_GUARD: f64 = 0.01;

/// Which half of an alternating pair a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AltGroup {
    /// Active while `floor(t / tau)` is even.
    A,
    /// Active while `floor(t / tau)` is odd.
    B,
}

/// Piecewise-constant on/off switch multiplying a Hamiltonian term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    AlwaysOn,
    /// Period `tau`; the last `guard` of every period has both groups off.
    Alternating { tau: f64, guard: f64, group: AltGroup },
    /// On for `start <= t < stop`.
    Window { start: f64, stop: f64 },
}

impl Schedule {
    pub fn alternating(tau: f64, group: AltGroup) -> Self {
        Self::Alternating { tau, guard: DEFAULT_GUARD, group }
    }

    /// Collision window of unit `n` (1-based): `[(n-1) tau, (n-1) tau + delta)`.
    pub fn collision(n: usize, tau: f64, delta: f64) -> Self {
        let start = (n - 1) as f64 * tau;
        Self::Window { start, stop: start + delta }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::AlwaysOn => Ok(()),
            Self::Alternating { tau, guard, .. } if tau > 0.0 && (0.0..tau).contains(&guard) => Ok(()),
            Self::Window { start, stop } if start >= 0.0 && stop > start && stop.is_finite() => Ok(()),
            other => Err(Error::InvalidSchedule(format!("{other:?}"))),
        }
    }

    pub fn is_active(&self, t: f64) -> bool {
        match *self {
            Self::AlwaysOn => true,
            Self::Alternating { tau, guard, group } => {
                let period = (t / tau).floor();
                let within = t - period * tau;
                let even = (period as i64).rem_euclid(2) == 0;
                let on_group = match group {
                    AltGroup::A => even,
                    AltGroup::B => !even,
                };
                on_group && within < tau - guard
            }
            Self::Window { start, stop } => start <= t && t < stop,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if self.is_active(t) { 1.0 } else { 0.0 }
    }

    /// Discontinuities inside `[0, horizon]`.
    pub fn breakpoints(&self, horizon: f64) -> Vec<f64> {
        let in_range = |t: &f64| (0.0..=horizon).contains(t);
        match *self {
            Self::AlwaysOn => Vec::new(),
            Self::Alternating { tau, guard, .. } => {
                let mut out = Vec::new();
                let mut k = 0u64;
                loop {
                    let start = k as f64 * tau;
                    if start > horizon {
                        break;
                    }
                    out.push(start);
                    if guard > 0.0 {
                        out.push(start + tau - guard);
                    }
                    k += 1;
                }
                out.retain(in_range);
                out
            }
            Self::Window { start, stop } => [start, stop].into_iter().filter(in_range).collect(),
        }
    }

    /// Length after which the schedule repeats, if it does.
    pub fn period(&self) -> Option<f64> {
        match *self {
            Self::Alternating { tau, .. } => Some(2.0 * tau),
            _ => None,
        }
    }

    pub fn is_window(&self) -> bool {
        matches!(self, Self::Window { .. })
    }

    /// Time at which a windowed term first switches on.
    pub fn opens_at(&self) -> Option<f64> {
        match *self {
            Self::Window { start, .. } => Some(start),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternation_is_complementary_outside_guard() {
        let a = Schedule::alternating(3.0, AltGroup::A);
        let b = Schedule::alternating(3.0, AltGroup::B);
        assert!(a.is_active(1.5) && !b.is_active(1.5));
        assert!(!a.is_active(4.5) && b.is_active(4.5));
        // Guard interval: both off.
        assert!(!a.is_active(2.995) && !b.is_active(2.995));
        for k in 0..600 {
            let t = k as f64 * 0.0173;
            let within = t % 3.0;
            if within < 2.99 {
                assert_eq!(a.value(t) + b.value(t), 1.0, "t = {t}");
            }
        }
    }

    #[test]
    fn window_is_half_open() {
        let w = Schedule::collision(4, 1.0, 0.95);
        assert!(w.is_active(3.0));
        assert!(w.is_active(3.94));
        assert!(!w.is_active(3.95));
        assert!(!w.is_active(2.999));
    }

    #[test]
    fn invalid_schedules() {
        assert!(Schedule::Alternating { tau: 0.0, guard: 0.0, group: AltGroup::A }.validate().is_err());
        assert!(Schedule::Alternating { tau: 1.0, guard: 1.0, group: AltGroup::A }.validate().is_err());
        assert!(Schedule::Window { start: 1.0, stop: 1.0 }.validate().is_err());
    }
}
