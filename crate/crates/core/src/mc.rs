//! Seeded Monte Carlo volume estimates.
//!
//! Work is split into chunks of `chunk_size` draws. Chunk `i` draws from a
//! ChaCha8 generator seeded with `seed` on stream `i`, so results depend only
//! on `(seed, samples, chunk_size)` and never on the number of worker threads.
//! Hit counts are integers reduced in chunk order.
//!
//! Hilbert–Schmidt estimates sample uniformly from the PT cube `[-1, 1]³`.
//! Its HS volume is exactly 1 (`8 × 1/8`), so a hit fraction is a volume.
//!
//! Fisher–Rao estimates use importance sampling. With `p = lambda_to_p(λ)`,
//! `dλ = 16 dp` on the simplex, so
//!
//! ```text
//! ∫ dλ / (8 √(p0 p1 p2 p3)) = 2 ∫ Π pα^(-1/2) dp = 2 Γ(1/2)⁴ / Γ(2) = 2π²
//! ```
//!
//! Drawing `p ~ Dirichlet(1/2, 1/2, 1/2, 1/2)` therefore makes the FR volume of
//! a CPT subregion equal to `2π²` times its hit fraction.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{lambda_from_weights, EigenvalueTriple};
use crate::error::{Error, Result};
use crate::exact::ExactVolume;
use crate::regions::{RegionExpr, RegionId};

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

/// Fisher–Rao volume of the whole channel tetrahedron.
pub const FR_CHANNEL_VOLUME: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::PI;

/// Draws used to probe a sampler's acceptance rate.
pub const PROBE_DRAWS: u64 = 1 << 18;

/// Acceptance below this rate triggers the low-acceptance warning.
pub const LOW_ACCEPTANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: u64,
    pub chunk_size: u64,
}

impl SamplerConfig {
    pub fn new(seed: u64, samples: u64) -> Result<Self> {
        Self::with_chunk_size(seed, samples, DEFAULT_CHUNK_SIZE)
    }

    pub fn with_chunk_size(seed: u64, samples: u64, chunk_size: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1"));
        }
        if chunk_size == 0 {
            return Err(Error::InvalidConfig("chunk_size must be at least 1"));
        }
        Ok(Self {
            seed,
            samples,
            chunk_size,
        })
    }

    fn chunk_count(&self) -> u64 {
        self.samples.div_ceil(self.chunk_size)
    }

    fn chunk_len(&self, chunk: u64) -> u64 {
        let start = chunk * self.chunk_size;
        self.chunk_size.min(self.samples - start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "mc-hs")]
    McHs,
    #[serde(rename = "mc-fr")]
    McFr,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::McHs => "mc-hs",
            Method::McFr => "mc-fr",
        }
    }
}

/// Result of either volume engine.
///
/// For Monte Carlo methods `std_error = scale · √(f(1−f)/samples)` with `f =
/// hits / samples`. For ratios, `samples` is the number of draws that landed
/// in the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl VolumeEstimate {
    fn binomial(hits: u64, samples: u64, scale: f64, method: Method, seed: u64) -> Self {
        let f = hits as f64 / samples as f64;
        Self {
            value: scale * f,
            std_error: scale * (f * (1.0 - f) / samples as f64).sqrt(),
            samples,
            hits,
            method,
            seed: Some(seed),
        }
    }

    pub fn from_exact(v: &ExactVolume) -> Self {
        Self {
            value: v.to_f64(),
            std_error: 0.0,
            samples: 0,
            hits: 0,
            method: Method::Exact,
            seed: None,
        }
    }

    /// `|value − target| ≤ k · std_error`.
    pub fn within_sigma(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `work(rng, draws)` for each chunk in parallel; results are in chunk order.
fn run_chunks<T, F>(cfg: &SamplerConfig, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    (0..cfg.chunk_count())
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(cfg.seed, chunk);
            work(&mut rng, cfg.chunk_len(chunk))
        })
        .collect()
}

#[inline]
fn uniform_cube<R: Rng>(rng: &mut R) -> EigenvalueTriple {
    let mut coord = || rng.random::<f64>() * 2.0 - 1.0;
    EigenvalueTriple::from_array_unchecked([coord(), coord(), coord()])
}

/// `Dirichlet(1,1,1,1)` weights mapped to eigenvalues: uniform on the CPT tetrahedron.
#[inline]
fn uniform_channel<R: Rng>(rng: &mut R) -> EigenvalueTriple {
    let g: [f64; 4] = std::array::from_fn(|_| rng.sample::<f64, _>(Exp1));
    let total: f64 = g.iter().sum();
    EigenvalueTriple::from_array_unchecked(lambda_from_weights(g.map(|x| x / total)))
}

/// `Dirichlet(1/2,1/2,1/2,1/2)` weights via `Gamma(1/2) = Z²/2`; the factor 1/2 cancels.
#[inline]
fn fisher_rao_channel<R: Rng>(rng: &mut R) -> EigenvalueTriple {
    let g: [f64; 4] = std::array::from_fn(|_| {
        let z: f64 = rng.sample(StandardNormal);
        z * z
    });
    let total: f64 = g.iter().sum();
    EigenvalueTriple::from_array_unchecked(lambda_from_weights(g.map(|x| x / total)))
}

/// Hilbert–Schmidt volume of `expr` by uniform sampling of the PT cube.
pub fn hs_volume_mc(expr: &RegionExpr, cfg: &SamplerConfig) -> VolumeEstimate {
    hs_split_mc(expr, cfg).0
}

/// Volumes of `expr` and of its complement within the PT cube, from the same draws.
/// The two hit counts always sum to `cfg.samples`.
pub fn hs_split_mc(expr: &RegionExpr, cfg: &SamplerConfig) -> (VolumeEstimate, VolumeEstimate) {
    let hits: u64 = run_chunks(cfg, |rng, draws| {
        (0..draws).filter(|_| expr.contains(uniform_cube(rng))).count() as u64
    })
    .into_iter()
    .sum();
    let misses = cfg.samples - hits;
    (
        VolumeEstimate::binomial(hits, cfg.samples, 1.0, Method::McHs, cfg.seed),
        VolumeEstimate::binomial(misses, cfg.samples, 1.0, Method::McHs, cfg.seed),
    )
}

/// `V(num ∧ den) / V(den)` by conditional hit counting on one stream of cube draws.
pub fn ratio_mc(num: &RegionExpr, den: &RegionExpr, cfg: &SamplerConfig) -> Result<VolumeEstimate> {
    let counts = run_chunks(cfg, |rng, draws| {
        let mut in_den = 0u64;
        let mut in_both = 0u64;
        for _ in 0..draws {
            let l = uniform_cube(rng);
            if den.contains(l) {
                in_den += 1;
                if num.contains(l) {
                    in_both += 1;
                }
            }
        }
        (in_den, in_both)
    });
    let (in_den, in_both) = counts.into_iter().fold((0, 0), |(a, b), (c, d)| (a + c, b + d));
    if in_den == 0 {
        return Err(Error::EmptyDenominator(den.to_string()));
    }
    Ok(VolumeEstimate::binomial(in_both, in_den, 1.0, Method::McHs, cfg.seed))
}

/// Fisher–Rao volume `∫ dλ / (8 √(p0p1p2p3))` over a CPT-conjoined region.
pub fn fr_volume_mc(expr: &RegionExpr, cfg: &SamplerConfig) -> Result<VolumeEstimate> {
    if !expr.has(RegionId::Cpt) {
        return Err(Error::NotChannelRegion(expr.to_string()));
    }
    // Draws are channels by construction; only the other conjuncts are tested.
    let rest = expr.without(RegionId::Cpt);
    let hits: u64 = run_chunks(cfg, |rng, draws| {
        (0..draws)
            .filter(|_| {
                let l = fisher_rao_channel(rng);
                rest.as_ref().is_none_or(|r| r.contains(l))
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(VolumeEstimate::binomial(
        hits,
        cfg.samples,
        FR_CHANNEL_VOLUME,
        Method::McFr,
        cfg.seed,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proposal {
    /// Uniform on the PT cube.
    Cube,
    /// Uniform on the CPT tetrahedron.
    Channel,
}

/// Stream of HS-uniform samples from a region, by rejection.
///
/// Output block `i` (of `chunk_size` accepted samples) is drawn sequentially
/// from chunk generator `i`.
#[derive(Debug, Clone)]
pub struct RegionSampler {
    cfg: SamplerConfig,
    proposal: Proposal,
    check: Option<RegionExpr>,
    rng: ChaCha8Rng,
    chunk: u64,
    emitted_in_chunk: u64,
    emitted: u64,
    proposals: u64,
    accepted: u64,
    probe_acceptance: f64,
}

/// Builds the sampler, probing acceptance first. Fails if the probe accepts nothing.
pub fn sample_region(expr: &RegionExpr, cfg: &SamplerConfig) -> Result<RegionSampler> {
    let (proposal, check) = if expr.has(RegionId::Cpt) {
        (Proposal::Channel, expr.without(RegionId::Cpt))
    } else {
        (Proposal::Cube, Some(expr.clone()))
    };
    let mut sampler = RegionSampler {
        cfg: *cfg,
        proposal,
        check,
        rng: chunk_rng(cfg.seed, 0),
        chunk: 0,
        emitted_in_chunk: 0,
        emitted: 0,
        proposals: 0,
        accepted: 0,
        probe_acceptance: 0.0,
    };
    let mut probe_rng = chunk_rng(cfg.seed, u64::MAX);
    let hits = (0..PROBE_DRAWS)
        .filter(|_| sampler.propose(&mut probe_rng).is_some())
        .count();
    if hits == 0 {
        return Err(Error::EmptyRegion(expr.to_string(), PROBE_DRAWS));
    }
    sampler.probe_acceptance = hits as f64 / PROBE_DRAWS as f64;
    Ok(sampler)
}

impl RegionSampler {
    fn propose(&self, rng: &mut ChaCha8Rng) -> Option<EigenvalueTriple> {
        let l = match self.proposal {
            Proposal::Cube => uniform_cube(rng),
            Proposal::Channel => uniform_channel(rng),
        };
        self.check.as_ref().is_none_or(|c| c.contains(l)).then_some(l)
    }

    pub fn proposal(&self) -> Proposal {
        self.proposal
    }

    /// Acceptance rate measured by the construction-time probe.
    pub fn probe_acceptance(&self) -> f64 {
        self.probe_acceptance
    }

    pub fn is_low_acceptance(&self) -> bool {
        self.probe_acceptance < LOW_ACCEPTANCE
    }

    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    /// Acceptance rate of the emitted stream so far.
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

impl Iterator for RegionSampler {
    type Item = EigenvalueTriple;

    fn next(&mut self) -> Option<EigenvalueTriple> {
        if self.emitted == self.cfg.samples {
            return None;
        }
        if self.emitted_in_chunk == self.cfg.chunk_size {
            self.chunk += 1;
            self.rng = chunk_rng(self.cfg.seed, self.chunk);
            self.emitted_in_chunk = 0;
        }
        let mut rng = self.rng.clone();
        let l = loop {
            self.proposals += 1;
            if let Some(l) = self.propose(&mut rng) {
                break l;
            }
        };
        self.rng = rng;
        self.accepted += 1;
        self.emitted += 1;
        self.emitted_in_chunk += 1;
        Some(l)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.cfg.samples - self.emitted) as usize;
        (left, Some(left))
    }
}
