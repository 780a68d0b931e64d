//! Pauli dynamical maps generated by `L(t)[ρ] = ½ Σ γα(t) (σα ρ σα − ρ)`.
//!
//! The generator acts as `L[σβ] = −(γ0 − γβ) σβ` with `γ0 = γ1 + γ2 + γ3`, so
//! the eigenvalues evolve in closed form:
//!
//! ```text
//! λα(t) = exp[Γα(t) − Γ0(t)],   Γα(t) = ∫₀ᵗ γα(τ) dτ
//! ```
//!
//! Rates are piecewise constant, which makes every `Γα` exact.

use serde::{Deserialize, Serialize};

use crate::channel::EigenvalueTriple;
use crate::error::{Error, Result};
use crate::regions::Membership;

/// Decay rates `(γ1, γ2, γ3)`; negative values are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct RateTriple {
    pub g: [f64; 3],
}

impl RateTriple {
    pub fn new(g1: f64, g2: f64, g3: f64) -> Result<Self> {
        Self::try_from([g1, g2, g3])
    }

    pub fn total(&self) -> f64 {
        self.g.iter().sum()
    }

    /// Markovian (GKSL semigroup) rates are all nonnegative.
    pub fn is_markovian(&self) -> bool {
        self.g.iter().all(|&g| g >= 0.0)
    }
}

impl TryFrom<[f64; 3]> for RateTriple {
    type Error = Error;

    fn try_from(g: [f64; 3]) -> Result<Self> {
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("rate triple"));
        }
        Ok(Self { g })
    }
}

impl From<RateTriple> for [f64; 3] {
    fn from(r: RateTriple) -> Self {
        r.g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub rates: RateTriple,
}

/// Piecewise-constant rates. Serialized as a JSON list of
/// `{"duration": number, "rates": [g1, g2, g3]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct RateSchedule {
    segments: Vec<Segment>,
}

impl RateSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("no segments"));
        }
        for s in &segments {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(Error::InvalidSchedule("durations must be finite and positive"));
            }
        }
        if !segments.iter().map(|s| s.duration).sum::<f64>().is_finite() {
            return Err(Error::InvalidSchedule("total duration is not finite"));
        }
        Ok(Self { segments })
    }

    /// A single segment of constant rates.
    pub fn constant(rates: RateTriple, duration: f64) -> Result<Self> {
        Self::new(vec![Segment { duration, rates }])
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Schedules covering `[0, s]` and `[s, T]` (the latter shifted to start at 0).
    /// Either side is `None` when it would be empty.
    pub fn split_at(&self, s: f64) -> Result<(Option<RateSchedule>, Option<RateSchedule>)> {
        let total = self.total_duration();
        if !(0.0..=total).contains(&s) {
            return Err(Error::TimeOutOfRange { t: s, total });
        }
        let mut before = Vec::new();
        let mut after = Vec::new();
        let mut start = 0.0;
        for seg in &self.segments {
            let end = start + seg.duration;
            if end <= s {
                before.push(*seg);
            } else if start >= s {
                after.push(*seg);
            } else {
                before.push(Segment {
                    duration: s - start,
                    rates: seg.rates,
                });
                after.push(Segment {
                    duration: end - s,
                    rates: seg.rates,
                });
            }
            start = end;
        }
        let wrap = |v: Vec<Segment>| (!v.is_empty()).then_some(RateSchedule { segments: v });
        Ok((wrap(before), wrap(after)))
    }
}

impl TryFrom<Vec<Segment>> for RateSchedule {
    type Error = Error;

    fn try_from(segments: Vec<Segment>) -> Result<Self> {
        Self::new(segments)
    }
}

impl From<RateSchedule> for Vec<Segment> {
    fn from(s: RateSchedule) -> Self {
        s.segments
    }
}

/// `Γα(t) = ∫₀ᵗ γα`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratedRates {
    pub big_g: [f64; 3],
}

impl IntegratedRates {
    pub fn total(&self) -> f64 {
        self.big_g.iter().sum()
    }

    /// `λα = exp(Γα − Γ0) = exp(−(Γβ + Γγ))`.
    pub fn eigenvalues(&self) -> EigenvalueTriple {
        let [a, b, c] = self.big_g;
        EigenvalueTriple::from_array_unchecked([(-(b + c)).exp(), (-(a + c)).exp(), (-(a + b)).exp()])
    }
}

pub fn integrated_rates(schedule: &RateSchedule, t: f64) -> Result<IntegratedRates> {
    let total = schedule.total_duration();
    if !(0.0..=total).contains(&t) {
        return Err(Error::TimeOutOfRange { t, total });
    }
    let mut big_g = [0.0; 3];
    let mut start = 0.0;
    for seg in schedule.segments() {
        if start >= t {
            break;
        }
        let dt = seg.duration.min(t - start);
        for (acc, g) in big_g.iter_mut().zip(seg.rates.g) {
            *acc += g * dt;
        }
        start += seg.duration;
    }
    Ok(IntegratedRates { big_g })
}

/// Eigenvalues of the dynamical map at time `t`.
pub fn evolve(schedule: &RateSchedule, t: f64) -> Result<EigenvalueTriple> {
    Ok(integrated_rates(schedule, t)?.eigenvalues())
}

/// Integrated rates that reach `l`: `Γα = (μβ + μγ − μα)/2` with `μα = −ln λα`.
fn target_integrated_rates(l: EigenvalueTriple) -> Result<IntegratedRates> {
    let lam = l.to_array();
    if let Some(&bad) = lam.iter().find(|&&x| x <= 0.0) {
        return Err(Error::NotReachable(bad));
    }
    let mu = lam.map(|x| -x.ln());
    let total: f64 = mu.iter().sum();
    Ok(IntegratedRates {
        big_g: mu.map(|m| (total - 2.0 * m) / 2.0),
    })
}

/// Constant rates that take the identity to `l` at time `t_star`.
pub fn rates_for_target(l: EigenvalueTriple, t_star: f64) -> Result<RateTriple> {
    if !(t_star.is_finite() && t_star > 0.0) {
        return Err(Error::InvalidSchedule("target time must be finite and positive"));
    }
    let big = target_integrated_rates(l)?;
    RateTriple::try_from(big.big_g.map(|g| g / t_star))
}

/// Reachable by a Markovian semigroup: strictly positive eigenvalues and
/// nonnegative constant rates.
pub fn is_semigroup_reachable(l: EigenvalueTriple) -> bool {
    target_integrated_rates(l).is_ok_and(|big| big.big_g.iter().all(|&g| g >= 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub lambda: EigenvalueTriple,
    pub regions: Membership,
}

/// All region predicates at `steps` equally spaced times covering `[0, T]`.
pub fn classify_trajectory(schedule: &RateSchedule, steps: usize) -> Result<Vec<TrajectoryPoint>> {
    if steps < 2 {
        return Err(Error::TooFewSteps(steps));
    }
    let total = schedule.total_duration();
    (0..steps)
        .map(|k| {
            let time = if k == steps - 1 {
                total
            } else {
                total * k as f64 / (steps - 1) as f64
            };
            let lambda = evolve(schedule, time)?;
            Ok(TrajectoryPoint {
                time,
                lambda,
                regions: Membership::of(lambda),
            })
        })
        .collect()
}
