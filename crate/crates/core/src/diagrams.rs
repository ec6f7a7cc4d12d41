//! Monte-Carlo information diagrams, entropy regions and bound-gap reports.
//!
//! Sample `i` always draws from ChaCha stream `i` of the run seed, so output
//! is independent of thread scheduling. Index 0 is reserved for the
//! maximally mixed state.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{applicable_bounds, gsic_tight_purity, gsic_tightness_state, Family, FormulaId, Side, Status};
use crate::error::{domain, Error, Result};
use crate::probdist::{EntropyOrder, ProbDist};
use crate::quantum::{
    conjecture_spectrum_state_with, flat_dirichlet, measure, mub_set, random_density_fixed_purity_rank_with,
    random_density_hs_with, stream_rng, DensityMatrix, MeasurementKind, MeasurementSet,
};

pub const DEFAULT_BINS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Full-rank Hilbert-Schmidt states.
    Hs,
    /// Fixed-purity states spread evenly over purity bins.
    Stratified,
    /// Conjecture-spectrum states over purity bins.
    Conjecture,
    /// Hilbert-Schmidt states cycling through every rank.
    RankSweep,
    /// Round-robin over all of the above.
    Mixed,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hs" => Ok(Self::Hs),
            "stratified" => Ok(Self::Stratified),
            "conjecture" => Ok(Self::Conjecture),
            "rank_sweep" | "rank-sweep" => Ok(Self::RankSweep),
            "mixed" => Ok(Self::Mixed),
            _ => Err(Error::Parse(format!(
                "unknown strategy `{s}` (expected hs, stratified, conjecture, rank_sweep or mixed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Purity,
    Ic,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "purity" => Ok(Self::Purity),
            "ic" => Ok(Self::Ic),
            _ => Err(Error::Parse(format!("unknown axis `{s}` (expected purity or ic)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    MaximallyMixed,
    Hs,
    FixedPurity,
    Conjecture,
    Witness,
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramPoint {
    pub x: f64,
    pub y: f64,
    pub sampler: Sampler,
    pub rank: usize,
    pub sample_index: usize,
    #[serde(skip)]
    pub purity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramConfig {
    pub order: EntropyOrder,
    pub samples: usize,
    pub strategy: Strategy,
    pub seed: u64,
    pub axis: Axis,
    pub bins: usize,
}

impl DiagramConfig {
    pub fn new(order: EntropyOrder, samples: usize, strategy: Strategy, seed: u64) -> Self {
        Self {
            order,
            samples,
            strategy,
            seed,
            axis: Axis::Purity,
            bins: DEFAULT_BINS,
        }
    }
}

/// Purity drawn uniformly inside bin `index mod bins`.
fn binned_purity(d: usize, index: usize, bins: usize, rng: &mut ChaCha8Rng) -> f64 {
    let lo = 1.0 / d as f64;
    let width = (1.0 - lo) / bins as f64;
    let b = index % bins;
    (lo + width * (b as f64 + rng.random::<f64>())).min(1.0)
}

/// The state for sample `index` under `strategy`.
pub fn sample_state(d: usize, index: usize, strategy: Strategy, seed: u64, bins: usize) -> Result<(DensityMatrix, Sampler)> {
    if index == 0 {
        return Ok((DensityMatrix::maximally_mixed(d), Sampler::MaximallyMixed));
    }
    let mut rng = stream_rng(seed, index as u64);
    // successive indices within one strategy walk through bins and ranks
    let (strategy, slot) = match strategy {
        Strategy::Mixed => (
            [Strategy::Hs, Strategy::Stratified, Strategy::Conjecture, Strategy::RankSweep][index % 4],
            index / 4,
        ),
        s => (s, index),
    };
    Ok(match strategy {
        Strategy::Hs => (random_density_hs_with(d, d, &mut rng)?, Sampler::Hs),
        Strategy::RankSweep => (random_density_hs_with(d, 1 + slot % d, &mut rng)?, Sampler::Hs),
        Strategy::Stratified => {
            let p = binned_purity(d, slot, bins, &mut rng);
            (random_density_fixed_purity_rank_with(d, d, p, &mut rng)?, Sampler::FixedPurity)
        }
        Strategy::Conjecture => {
            let p = binned_purity(d, slot, bins, &mut rng);
            (conjecture_spectrum_state_with(d, p, &mut rng)?, Sampler::Conjecture)
        }
        Strategy::Mixed => unreachable!(),
    })
}

/// Summed entropy and summed index of coincidence of `set` on `rho`.
pub fn entropy_sum(set: &MeasurementSet, rho: &DensityMatrix, order: EntropyOrder) -> Result<(f64, f64)> {
    let mut h = 0.0;
    let mut ic = 0.0;
    for povm in set.povms() {
        let p = measure(povm, rho)?;
        h += p.entropy(order);
        ic += p.index_of_coincidence();
    }
    Ok((h, ic))
}

fn point(set: &MeasurementSet, rho: &DensityMatrix, sampler: Sampler, index: usize, cfg: &DiagramConfig) -> Result<DiagramPoint> {
    let (y, ic) = entropy_sum(set, rho, cfg.order)?;
    Ok(DiagramPoint {
        x: match cfg.axis {
            Axis::Purity => rho.purity(),
            Axis::Ic => ic,
        },
        y,
        sampler,
        rank: rho.rank(1e-10),
        sample_index: index,
        purity: rho.purity(),
    })
}

fn sort_points(points: &mut [DiagramPoint]) {
    points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.sample_index.cmp(&b.sample_index)));
}

/// Information diagram of `set`: one point per sampled state.
pub fn info_diagram(set: &MeasurementSet, cfg: &DiagramConfig) -> Result<Vec<DiagramPoint>> {
    if cfg.samples == 0 {
        return Err(domain("need at least one sample"));
    }
    if cfg.bins == 0 {
        return Err(domain("need at least one purity bin"));
    }
    let d = set.dim();
    let mut points = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let (rho, sampler) = sample_state(d, i, cfg.strategy, cfg.seed, cfg.bins)?;
            point(set, &rho, sampler, i, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    sort_points(&mut points);
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundViolation {
    pub sample_index: usize,
    pub formula: FormulaId,
    pub purity: f64,
    pub entropy: f64,
    pub bound: f64,
}

/// Points that fall outside a proven bound by more than `tol`.
pub fn soundness_violations(set: &MeasurementSet, order: EntropyOrder, points: &[DiagramPoint], tol: f64) -> Result<Vec<BoundViolation>> {
    let per_point = points
        .par_iter()
        .map(|pt| {
            let bounds = applicable_bounds(set, pt.purity, order)?;
            Ok(bounds
                .into_iter()
                .filter(|b| b.status == Status::Proven)
                .filter(|b| match b.side {
                    Side::Lower => pt.y < b.value - tol,
                    Side::Upper => pt.y > b.value + tol,
                })
                .map(|b| BoundViolation {
                    sample_index: pt.sample_index,
                    formula: b.formula,
                    purity: pt.purity,
                    entropy: pt.y,
                    bound: b.value,
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// Per-measurement entropies, ordered as the measurement set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyVector {
    pub components: Vec<f64>,
    pub sampler: Sampler,
    pub sample_index: usize,
}

impl EntropyVector {
    pub fn sum(&self) -> f64 {
        self.components.iter().sum()
    }
}

/// Shannon entropy triples for the first three MUBs in `d ∈ {2, 3}`.
pub fn entropy_region_mub(d: usize, samples: usize, seed: u64) -> Result<Vec<EntropyVector>> {
    if !(d == 2 || d == 3) {
        return Err(domain(format!("three-MUB region is supported for d in {{2, 3}}, got {d}")));
    }
    let set = mub_set(d)?.subset(&[0, 1, 2])?;
    (0..samples)
        .into_par_iter()
        .map(|i| {
            // half the samples are pure: the region boundary lives there
            let strategy = if i % 2 == 1 { Strategy::RankSweep } else { Strategy::Mixed };
            let (rho, sampler) = sample_state(d, i, strategy, seed, DEFAULT_BINS)?;
            let components = set
                .povms()
                .iter()
                .map(|p| Ok(measure(p, &rho)?.entropy(EntropyOrder::SHANNON)))
                .collect::<Result<Vec<_>>>()?;
            Ok(EntropyVector { components, sampler, sample_index: i })
        })
        .collect()
}

/// Summed-IC window for three distributions over `d` outcomes.
pub fn constrained_ic_window(d: usize) -> (f64, f64) {
    let df = d as f64;
    (3.0 / df, 1.0 + 2.0 / df)
}

pub fn satisfies_ic_window(d: usize, dists: &[ProbDist]) -> bool {
    let (lo, hi) = constrained_ic_window(d);
    let s: f64 = dists.iter().map(ProbDist::index_of_coincidence).sum();
    s >= lo - 1e-12 && s <= hi + 1e-12
}

/// Entropy triples of three flat-Dirichlet distributions, rejected unless
/// their summed IC lies in the three-MUB window. The draw budget is 100 per
/// requested sample.
pub fn entropy_region_constrained(d: usize, samples: usize, seed: u64) -> Result<Vec<EntropyVector>> {
    if d < 2 {
        return Err(domain(format!("dimension must be at least 2, got {d}")));
    }
    let budget = 100;
    let draws: Vec<Option<EntropyVector>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            if i == 0 {
                let u = ProbDist::uniform(d).entropy(EntropyOrder::SHANNON);
                return Ok(Some(EntropyVector { components: vec![u; 3], sampler: Sampler::MaximallyMixed, sample_index: 0 }));
            }
            let mut rng = stream_rng(seed, i as u64);
            for _ in 0..budget {
                let dists = (0..3)
                    .map(|_| ProbDist::new(flat_dirichlet(d, &mut rng)))
                    .collect::<Result<Vec<_>>>()?;
                if satisfies_ic_window(d, &dists) {
                    let components = dists.iter().map(|p| p.entropy(EntropyOrder::SHANNON)).collect();
                    return Ok(Some(EntropyVector { components, sampler: Sampler::Dirichlet, sample_index: i }));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    let accepted = draws.iter().filter(|v| v.is_some()).count();
    if accepted < samples {
        return Err(Error::RejectionBudget { accepted, requested: samples, draws: samples * budget });
    }
    Ok(draws.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundGap {
    pub formula: FormulaId,
    pub side: Side,
    pub status: Status,
    /// Smallest slack `H - bound` (lower) or `bound - H` (upper) in the stratum.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub purity_lo: f64,
    pub purity_hi: f64,
    pub samples: usize,
    pub empirical_min: f64,
    pub empirical_max: f64,
    pub gaps: Vec<BoundGap>,
}

/// Empirical entropy range per purity stratum and the slack of every
/// applicable bound. Strata sample fixed-purity and conjecture states; SIC
/// strata also receive tightness witnesses where they exist, and the first
/// stratum always contains the maximally mixed state.
pub fn gap_report(set: &MeasurementSet, order: EntropyOrder, strata: usize, per_stratum: usize, seed: u64) -> Result<Vec<GapRow>> {
    if strata == 0 || per_stratum == 0 {
        return Err(domain("need at least one stratum and one sample per stratum"));
    }
    let d = set.dim();
    let lo = 1.0 / d as f64;
    let width = (1.0 - lo) / strata as f64;
    (0..strata)
        .into_par_iter()
        .map(|s| {
            let (p_lo, p_hi) = (lo + width * s as f64, lo + width * (s + 1) as f64);
            let mut states = Vec::new();
            if s == 0 {
                states.push(DensityMatrix::maximally_mixed(d));
            }
            for j in 0..per_stratum {
                let mut rng = stream_rng(seed, (s * per_stratum + j) as u64 + 1);
                let p = (p_lo + width * rng.random::<f64>()).min(1.0);
                states.push(if j % 2 == 0 {
                    random_density_fixed_purity_rank_with(d, d, p, &mut rng)?
                } else {
                    conjecture_spectrum_state_with(d, p, &mut rng)?
                });
            }
            let gsic_a = match set.kind() {
                MeasurementKind::Gsic { a } => Some(a),
                MeasurementKind::Sic => Some(1.0 / (d * d) as f64),
                _ => None,
            };
            if let Some(a) = gsic_a {
                for family in [Family::X, Family::Y] {
                    let p = 0.5 * (p_lo + p_hi);
                    if p <= gsic_tight_purity(d, a, family) {
                        states.push(gsic_tightness_state(set, p, family)?);
                    }
                }
            }
            let mut gaps: BTreeMap<FormulaId, BoundGap> = BTreeMap::new();
            let (mut hmin, mut hmax) = (f64::INFINITY, f64::NEG_INFINITY);
            for rho in &states {
                let (h, _) = entropy_sum(set, rho, order)?;
                hmin = hmin.min(h);
                hmax = hmax.max(h);
                for b in applicable_bounds(set, rho.purity(), order)? {
                    let slack = match b.side {
                        Side::Lower => h - b.value,
                        Side::Upper => b.value - h,
                    };
                    gaps.entry(b.formula)
                        .and_modify(|g| g.gap = g.gap.min(slack))
                        .or_insert(BoundGap { formula: b.formula, side: b.side, status: b.status, gap: slack });
                }
            }
            Ok(GapRow {
                purity_lo: p_lo,
                purity_hi: p_hi,
                samples: states.len(),
                empirical_min: hmin,
                empirical_max: hmax,
                gaps: gaps.into_values().collect(),
            })
        })
        .collect()
}

/// Writes `x,y,sampler,rank,sample_index`.
pub fn write_diagram_csv<W: Write>(points: &[DiagramPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RegionRow {
    h1: f64,
    h2: f64,
    h3: f64,
    sampler: Sampler,
    sample_index: usize,
}

/// Writes `h1,h2,h3,sampler,sample_index`.
pub fn write_region_csv<W: Write>(vectors: &[EntropyVector], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for v in vectors {
        if v.components.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: v.components.len() });
        }
        w.serialize(RegionRow {
            h1: v.components[0],
            h2: v.components[1],
            h3: v.components[2],
            sampler: v.sampler,
            sample_index: v.sample_index,
        })?;
    }
    w.flush()?;
    Ok(())
}
