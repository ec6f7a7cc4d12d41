//! Closed-form entropic bounds.
//!
//! Every function returns a [`BoundResult`] carrying the value together with
//! the intermediate quantities it was computed from, so callers and tests can
//! inspect `C`, `n`, `k`, `c`, `p_a`, `p_b` directly.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::probdist::{extremal_x, extremal_y, theorem1_bounds, EntropyOrder, ProbDist};
use crate::quantum::{CMatrix, DensityMatrix, MeasurementKind, MeasurementSet};

/// Slack used when flooring quantities that land on integers exactly.
const FLOOR_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormulaId {
    Thm1Upper,
    Thm1Lower,
    GsicMinent,
    Thm2,
    Thm2Reduced,
    Wym,
    Thm3,
    Ras1,
    Ras2,
    ConjSic3,
    ConjMub3,
    BertaForm,
    ApproxPure,
    ApproxMixed,
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        write!(f, "{}", s.as_str().expect("string tag"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proven,
    Conjecture,
    /// Unproved approximation, reported but never asserted.
    Diagnostic,
}

/// Which extremal family realises a single-distribution bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub formula: FormulaId,
    pub side: Side,
    pub status: Status,
    pub params: BTreeMap<String, f64>,
    /// Whether the bound is known to be attained at these parameters.
    pub tight: Option<bool>,
    /// The formula's argument left its feasible range and was clamped.
    pub out_of_domain: bool,
}

impl BoundResult {
    fn new(value: f64, formula: FormulaId, side: Side, status: Status) -> Self {
        Self {
            value,
            formula,
            side,
            status,
            params: BTreeMap::new(),
            tight: None,
            out_of_domain: false,
        }
    }

    fn with(mut self, key: &str, v: f64) -> Self {
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(domain(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

fn check_purity(d: usize, purity: f64) -> Result<f64> {
    let lo = 1.0 / d as f64;
    if !purity.is_finite() || purity < lo - 1e-12 || purity > 1.0 + 1e-12 {
        return Err(domain(format!("purity {purity} outside [1/d, 1] = [{lo}, 1]")));
    }
    Ok(purity.clamp(lo, 1.0))
}

fn check_a(d: usize, a: f64) -> Result<f64> {
    let df = d as f64;
    let (lo, hi) = (1.0 / (df * df * df), 1.0 / (df * df));
    if !a.is_finite() || a <= lo || a > hi + 1e-12 {
        return Err(domain(format!("a = {a} outside (1/d³, 1/d²] = ({lo}, {hi}]")));
    }
    Ok(a.min(hi))
}

fn check_kappa(d: usize, kappa: f64) -> Result<f64> {
    let lo = 1.0 / d as f64;
    if !kappa.is_finite() || kappa <= lo || kappa > 1.0 + 1e-12 {
        return Err(domain(format!("kappa {kappa} outside (1/d, 1] = ({lo}, 1]")));
    }
    Ok(kappa.min(1.0))
}

fn check_count(d: usize, m: usize) -> Result<()> {
    if m == 0 || m > d + 1 {
        return Err(domain(format!("number of measurements M = {m} outside [1, d+1]")));
    }
    Ok(())
}

/// `I(S|ρ)` for a general SIC-POVM with parameter `a`.
pub fn gsic_index(d: usize, a: f64, purity: f64) -> Result<f64> {
    check_dim(d)?;
    let a = check_a(d, a)?;
    let p = check_purity(d, purity)?;
    let df = d as f64;
    // 1/d² + excess keeps I exact at the maximally mixed point
    Ok(1.0 / (df * df) + (a * df.powi(3) - 1.0) * (df * p - 1.0) / (df * df * (df * df - 1.0)))
}

/// Largest purity at which the given family is realised by `ρ = Σ x_i S_i`.
pub fn gsic_tight_purity(d: usize, a: f64, family: Family) -> f64 {
    let df = d as f64;
    match family {
        Family::X => df * df * a,
        Family::Y => (df - 2.0 + a * df * df) / ((df - 1.0) * (df - 1.0)),
    }
}

/// Single-measurement bound for a general SIC-POVM from its index of
/// coincidence. Below α = 2 the lower side comes from `P_y` and the upper
/// side from `P_x`; above α = 2 the roles swap.
pub fn gsic_entropy_bound(d: usize, a: f64, purity: f64, order: EntropyOrder, side: Side) -> Result<BoundResult> {
    let ic = gsic_index(d, a, purity)?;
    let p = check_purity(d, purity)?;
    let range = theorem1_bounds(d * d, ic, order)?;
    let family = match (side, order.below_collision()) {
        (Side::Lower, true) | (Side::Upper, false) => Family::Y,
        (Side::Upper, true) | (Side::Lower, false) => Family::X,
    };
    let (value, formula) = match side {
        Side::Lower => (range.lower, FormulaId::Thm1Lower),
        Side::Upper => (range.upper, FormulaId::Thm1Upper),
    };
    let collision = order.alpha() == 2.0;
    let mut r = BoundResult::new(value, formula, side, Status::Proven)
        .with("I", ic)
        .with("a", a)
        .with("family_y", if family == Family::Y { 1.0 } else { 0.0 });
    r.tight = Some(collision || p <= gsic_tight_purity(d, a, family) + 1e-12);
    Ok(r)
}

/// Closed-form min-entropy lower bound for a general SIC-POVM.
pub fn gsic_min_entropy_bound(d: usize, a: f64, purity: f64) -> Result<BoundResult> {
    check_dim(d)?;
    let a = check_a(d, a)?;
    let p = check_purity(d, purity)?;
    let df = d as f64;
    let root = ((a * df.powi(3) - 1.0).max(0.0)).sqrt() * ((p * df - 1.0).max(0.0)).sqrt();
    let value = 2.0 * df.log2() - (1.0 + root).log2();
    Ok(BoundResult::new(value, FormulaId::GsicMinent, Side::Lower, Status::Proven).with("a", a))
}

/// Witness `ρ = Σ x_i S_i` whose outcome distribution is the requested
/// extremal family at `I(S|ρ)`; it is positive on the flagged purity range.
pub fn gsic_tightness_state(set: &MeasurementSet, purity: f64, family: Family) -> Result<DensityMatrix> {
    let d = set.dim();
    let df = d as f64;
    let a = match set.kind() {
        MeasurementKind::Gsic { a } => a,
        MeasurementKind::Sic => 1.0 / (df * df),
        other => return Err(domain(format!("tightness witness needs a SIC-POVM, got {other}"))),
    };
    let ic = gsic_index(d, a, purity)?;
    let dist = match family {
        Family::X => extremal_x(d * d, ic)?,
        Family::Y => extremal_y(d * d, ic)?,
    };
    let mut p = dist.probs().to_vec();
    p.resize(d * d, 0.0);
    let denom = df.powi(3) * a - 1.0;
    let mut rho = CMatrix::zeros(d, d);
    for (s, pi) in set.povms()[0].elements().iter().zip(&p) {
        let x = (df * (df * a - 1.0) + df * (df * df - 1.0) * pi) / denom;
        rho += s.map(|z| z * Complex64::new(x, 0.0));
    }
    DensityMatrix::new(rho)
}

/// Upper bound `C(P|ρ)` on the summed index of coincidence of `M` MUMs.
pub fn mum_index_max(d: usize, m: usize, kappa: f64, purity: f64) -> Result<f64> {
    check_dim(d)?;
    check_count(d, m)?;
    let kappa = check_kappa(d, kappa)?;
    let p = check_purity(d, purity)?;
    let df = d as f64;
    Ok(m as f64 / df + (kappa * df - 1.0) / (df * (df - 1.0)) * (df * p - 1.0))
}

/// Segment data of the summed-IC minimiser: `n`, `k` and the residual `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    n: usize,
    k: usize,
    c: f64,
}

fn segment(d: usize, m: usize, total: f64) -> Segment {
    let mf = m as f64;
    let n = ((mf / total + FLOOR_SLACK).floor() as usize).clamp(1, d);
    let nf = n as f64;
    let k_raw = ((total - mf / (nf + 1.0)) * (nf + 1.0) * nf + FLOOR_SLACK).floor();
    let k = (k_raw.max(0.0) as usize).min(m - 1);
    let c = total - k as f64 / nf - (m - k - 1) as f64 / (nf + 1.0);
    let lo = (1.0 / (nf + 1.0)).max(1.0 / d as f64);
    Segment { n, k, c: c.clamp(lo, 1.0 / nf) }
}

fn seg_value(d: usize, m: usize, s: Segment) -> Result<f64> {
    let nf = s.n as f64;
    let tail = s.k as f64 * nf.log2() + (m - s.k - 1) as f64 * (nf + 1.0).log2();
    Ok(extremal_y(d, s.c)?.entropy(EntropyOrder::SHANNON) + tail)
}

/// Shannon lower bound for `M` MUMs with efficiency `κ`.
pub fn mum_shannon_lower(d: usize, m: usize, kappa: f64, purity: f64) -> Result<BoundResult> {
    let total = mum_index_max(d, m, kappa, purity)?;
    let s = segment(d, m, total);
    Ok(BoundResult::new(seg_value(d, m, s)?, FormulaId::Thm2, Side::Lower, Status::Proven)
        .with("C", total)
        .with("n", s.n as f64)
        .with("k", s.k as f64)
        .with("c", s.c))
}

/// The minimising distributions behind [`mum_shannon_lower`].
pub fn theorem2_witness(d: usize, m: usize, kappa: f64, purity: f64) -> Result<Vec<ProbDist>> {
    let total = mum_index_max(d, m, kappa, purity)?;
    let s = segment(d, m, total);
    let mut out = Vec::with_capacity(m);
    out.extend(std::iter::repeat_n(ProbDist::uniform(s.n), s.k));
    out.extend(std::iter::repeat_n(ProbDist::uniform(s.n + 1), m - s.k - 1));
    out.push(extremal_y(d, s.c)?);
    Ok(out)
}

/// Purity range on which [`mum_reduced_lower`] applies.
pub fn mum_reduced_purity_max(d: usize, kappa: f64) -> f64 {
    let df = d as f64;
    (df + kappa - 2.0) / ((df - 1.0) * (df - 1.0))
}

/// `(M-1)log₂d + H_α(P_y^d[C - (M-1)/d])` for α ≤ 1, valid while the purity
/// stays below [`mum_reduced_purity_max`]. Returns `None` outside that range.
pub fn mum_reduced_lower(d: usize, m: usize, kappa: f64, purity: f64, order: EntropyOrder) -> Result<Option<BoundResult>> {
    if order.alpha() > 1.0 {
        return Err(domain(format!("reduced form needs α <= 1, got {order}")));
    }
    let total = mum_index_max(d, m, kappa, purity)?;
    if purity > mum_reduced_purity_max(d, kappa) + 1e-12 {
        return Ok(None);
    }
    let df = d as f64;
    let c = (total - (m - 1) as f64 / df).clamp(1.0 / df, 1.0);
    let value = (m - 1) as f64 * df.log2() + extremal_y(d, c)?.entropy(order);
    let mut r = BoundResult::new(value, FormulaId::Thm2Reduced, Side::Lower, Status::Proven)
        .with("C", total)
        .with("c", c);
    r.tight = Some(true);
    Ok(Some(r))
}

/// Linearised Shannon bound for `M` MUBs.
pub fn wym_bound(d: usize, m: usize, purity: f64) -> Result<BoundResult> {
    let total = mum_index_max(d, m, 1.0, purity)?;
    let mf = m as f64;
    let n = ((mf / total + FLOOR_SLACK).floor() as usize).clamp(1, d);
    let nf = n as f64;
    let value = (mf - nf * total) * (nf + 1.0) * (nf + 1.0).log2() - (mf - (nf + 1.0) * total) * nf * nf.log2();
    Ok(BoundResult::new(value, FormulaId::Wym, Side::Lower, Status::Proven)
        .with("C", total)
        .with("n", nf))
}

fn two_point(d: usize, c: f64) -> (f64, f64) {
    let df = d as f64;
    let e = (df * c - 1.0).max(0.0);
    let pa = (1.0 + ((df - 1.0) * e).sqrt()) / df;
    let pb = ((1.0 - (e / (df - 1.0)).sqrt()) / df).max(0.0);
    (pa, pb)
}

/// Per-measurement value of the α ≥ 2 bound at average index `c`.
pub fn theorem3_per_measurement(d: usize, c: f64, order: EntropyOrder) -> Result<f64> {
    check_dim(d)?;
    let alpha = order.alpha();
    if alpha < 2.0 {
        return Err(domain(format!("bound needs α >= 2, got {order}")));
    }
    let df = d as f64;
    if !c.is_finite() || c < 1.0 / df - 1e-12 || c > 1.0 + 1e-12 {
        return Err(domain(format!("c = {c} outside [1/d, 1]")));
    }
    let c = c.clamp(1.0 / df, 1.0);
    let (pa, pb) = two_point(d, c);
    if alpha == 2.0 {
        return Ok(-c.log2());
    }
    if order.is_min_entropy() {
        return Ok(-pa.log2());
    }
    let w = (df - 1.0).powf(2.0 / alpha);
    let ratio = pb / pa;
    Ok(alpha / (1.0 - alpha) * pa.log2() + df.log2() / ((1.0 - alpha) * w.ln_1p()) * (w * ratio * ratio).ln_1p())
}

/// Rényi lower bound (α ≥ 2) for `M` MUMs.
pub fn mum_renyi_lower(d: usize, m: usize, kappa: f64, purity: f64, order: EntropyOrder) -> Result<BoundResult> {
    let total = mum_index_max(d, m, kappa, purity)?;
    let c = total / m as f64;
    let per = theorem3_per_measurement(d, c, order)?;
    let (pa, pb) = two_point(d, c.clamp(1.0 / d as f64, 1.0));
    Ok(BoundResult::new(m as f64 * per, FormulaId::Thm3, Side::Lower, Status::Proven)
        .with("C", total)
        .with("c", c)
        .with("p_a", pa)
        .with("p_b", pb))
}

/// The two earlier per-distribution bounds at index `c`, for α ≥ 2.
pub fn rastegin_bounds(d: usize, c: f64, order: EntropyOrder) -> Result<(BoundResult, BoundResult)> {
    check_dim(d)?;
    let alpha = order.alpha();
    if alpha < 2.0 {
        return Err(domain(format!("bounds need α >= 2, got {order}")));
    }
    let df = d as f64;
    if !c.is_finite() || c < 1.0 / df - 1e-12 || c > 1.0 + 1e-12 {
        return Err(domain(format!("c = {c} outside [1/d, 1]")));
    }
    let c = c.clamp(1.0 / df, 1.0);
    let (pa, _) = two_point(d, c);
    let (r1, r2) = if order.is_min_entropy() {
        (-0.5 * c.log2(), -pa.log2())
    } else {
        (
            alpha / (2.0 * (1.0 - alpha)) * c.log2(),
            (alpha - 2.0) / (1.0 - alpha) * pa.log2() + c.log2() / (1.0 - alpha),
        )
    };
    Ok((
        BoundResult::new(r1, FormulaId::Ras1, Side::Lower, Status::Proven).with("c", c),
        BoundResult::new(r2, FormulaId::Ras2, Side::Lower, Status::Proven).with("c", c).with("p_a", pa),
    ))
}

/// Rastegin bounds summed over `M` MUMs at the average index `C/M`.
pub fn mum_rastegin_lower(d: usize, m: usize, kappa: f64, purity: f64, order: EntropyOrder) -> Result<(BoundResult, BoundResult)> {
    let total = mum_index_max(d, m, kappa, purity)?;
    let (mut r1, mut r2) = rastegin_bounds(d, total / m as f64, order)?;
    let mf = m as f64;
    r1.value *= mf;
    r2.value *= mf;
    r1.params.insert("C".into(), total);
    r2.params.insert("C".into(), total);
    Ok((r1, r2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConjectureKind {
    /// SIC-POVM in d = 3.
    Sic3,
    /// Complete MUBs in d = 3.
    Mub3,
    /// Complete MUBs, entropy of the conjectured extremal spectrum.
    Berta,
}

/// Conjectured tight Shannon lower bounds. When the argument of an extremal
/// family leaves its feasible range the value is clamped and flagged.
pub fn conjectured_bounds(d: usize, kind: ConjectureKind, purity: f64) -> Result<BoundResult> {
    check_dim(d)?;
    let p = check_purity(d, purity)?;
    let df = d as f64;
    let shannon = EntropyOrder::SHANNON;
    let r = match kind {
        ConjectureKind::Sic3 => {
            if d != 3 {
                return Err(Error::Unsupported(format!("SIC conjecture is stated for d = 3, got {d}")));
            }
            let ic = (1.0 + p) / 12.0;
            let arg = 2.0 * ic;
            let clamped = arg.clamp(0.25, 1.0);
            let mut r = BoundResult::new(extremal_y(4, clamped)?.entropy(shannon) + 1.0, FormulaId::ConjSic3, Side::Lower, Status::Conjecture)
                .with("I", ic)
                .with("c", clamped);
            r.out_of_domain = arg < 0.25 - 1e-12;
            r
        }
        ConjectureKind::Mub3 => {
            if d != 3 {
                return Err(Error::Unsupported(format!("MUB conjecture is stated for d = 3, got {d}")));
            }
            let c = (1.0 + p) / 3.0;
            BoundResult::new(1.0 + 3.0 * extremal_y(3, c)?.entropy(shannon), FormulaId::ConjMub3, Side::Lower, Status::Conjecture)
                .with("c", c)
        }
        ConjectureKind::Berta => {
            let m = d + 1;
            let mut r = BoundResult::new(
                (m - 1) as f64 * df.log2() + extremal_y(d, p)?.entropy(shannon),
                FormulaId::BertaForm,
                Side::Lower,
                Status::Conjecture,
            )
            .with("M", m as f64);
            r.out_of_domain = p > 1.0 / (df - 1.0) + 1e-12;
            r
        }
    };
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Pure,
    Mixed,
}

/// Unproved upper approximations for complete MUBs.
pub fn mub_upper_approx(d: usize, purity: f64, regime: Regime) -> Result<BoundResult> {
    let total = mum_index_max(d, d + 1, 1.0, purity)?;
    let df = d as f64;
    let (arg, formula) = match regime {
        Regime::Pure => (total / (df + 1.0), FormulaId::ApproxPure),
        Regime::Mixed => (total - 1.0, FormulaId::ApproxMixed),
    };
    let clamped = arg.clamp(1.0 / df, 1.0);
    let h = extremal_x(d, clamped)?.entropy(EntropyOrder::SHANNON);
    let value = match regime {
        Regime::Pure => (df + 1.0) * h,
        Regime::Mixed => df * df.log2() + h,
    };
    let mut r = BoundResult::new(value, formula, Side::Upper, Status::Diagnostic)
        .with("I", total)
        .with("c", clamped);
    r.out_of_domain = (arg - clamped).abs() > 1e-12;
    Ok(r)
}

/// Every bound that applies to the summed entropy of `set` at the given
/// purity and order.
pub fn applicable_bounds(set: &MeasurementSet, purity: f64, order: EntropyOrder) -> Result<Vec<BoundResult>> {
    applicable_bounds_for(set.kind(), set.dim(), set.len(), purity, order)
}

pub fn applicable_bounds_for(
    kind: MeasurementKind,
    d: usize,
    m: usize,
    purity: f64,
    order: EntropyOrder,
) -> Result<Vec<BoundResult>> {
    let df = d as f64;
    let alpha = order.alpha();
    let mut out = Vec::new();
    match kind {
        MeasurementKind::Gsic { .. } | MeasurementKind::Sic => {
            let a = match kind {
                MeasurementKind::Gsic { a } => a,
                _ => 1.0 / (df * df),
            };
            out.push(gsic_entropy_bound(d, a, purity, order, Side::Lower)?);
            out.push(gsic_entropy_bound(d, a, purity, order, Side::Upper)?);
            if order.is_min_entropy() {
                out.push(gsic_min_entropy_bound(d, a, purity)?);
            }
            if kind == MeasurementKind::Sic && d == 3 && order.is_shannon() {
                out.push(conjectured_bounds(3, ConjectureKind::Sic3, purity)?);
            }
        }
        MeasurementKind::Mub | MeasurementKind::Mum { .. } => {
            let kappa = match kind {
                MeasurementKind::Mum { kappa } => kappa,
                _ => 1.0,
            };
            if alpha <= 1.0 {
                out.push(mum_shannon_lower(d, m, kappa, purity)?);
                if let Some(r) = mum_reduced_lower(d, m, kappa, purity, order)? {
                    out.push(r);
                }
                if kind == MeasurementKind::Mub {
                    out.push(wym_bound(d, m, purity)?);
                }
            }
            if alpha >= 2.0 {
                out.push(mum_renyi_lower(d, m, kappa, purity, order)?);
                let (r1, r2) = mum_rastegin_lower(d, m, kappa, purity, order)?;
                out.push(r1);
                out.push(r2);
            }
            if kind == MeasurementKind::Mub && m == d + 1 && order.is_shannon() {
                out.push(mub_upper_approx(d, purity, Regime::Pure)?);
                out.push(mub_upper_approx(d, purity, Regime::Mixed)?);
                out.push(conjectured_bounds(d, ConjectureKind::Berta, purity)?);
                if d == 3 {
                    out.push(conjectured_bounds(3, ConjectureKind::Mub3, purity)?);
                }
            }
        }
        MeasurementKind::Custom => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{gsic, gsic_t_max, measure, sic_set};
    use approx::assert_abs_diff_eq;

    fn order(a: f64) -> EntropyOrder {
        EntropyOrder::new(a).unwrap()
    }

    #[test]
    fn gsic_examples() {
        for a in [0.5, 1.0, 3.0, f64::INFINITY] {
            for side in [Side::Lower, Side::Upper] {
                let r = gsic_entropy_bound(2, 0.25, 0.5, order(a), side).unwrap();
                assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
                assert_abs_diff_eq!(r.param("I").unwrap(), 0.25, epsilon = 1e-15);
            }
        }
        let r = gsic_entropy_bound(3, 1.0 / 9.0, 1.0, EntropyOrder::SHANNON, Side::Upper).unwrap();
        let expected = extremal_x(9, 2.0 / 12.0).unwrap().entropy(EntropyOrder::SHANNON);
        assert_abs_diff_eq!(r.value, expected, epsilon = 1e-12);

        let lo = gsic_entropy_bound(3, 1.0 / 9.0, 1.0 / 3.0, EntropyOrder::SHANNON, Side::Lower).unwrap();
        let up = gsic_entropy_bound(3, 1.0 / 9.0, 1.0 / 3.0, EntropyOrder::SHANNON, Side::Upper).unwrap();
        assert_eq!(lo.tight, Some(true));
        assert_eq!(up.tight, Some(true));
        assert!(gsic_entropy_bound(3, 0.2, 0.5, EntropyOrder::SHANNON, Side::Lower).is_err());
        assert!(gsic_entropy_bound(3, 1.0 / 9.0, 0.2, EntropyOrder::SHANNON, Side::Lower).is_err());
    }

    #[test]
    fn min_entropy_closed_form() {
        assert_abs_diff_eq!(gsic_min_entropy_bound(3, 0.1, 1.0 / 3.0).unwrap().value, 2.0 * 3f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(gsic_min_entropy_bound(2, 0.25, 1.0).unwrap().value, 1.0, epsilon = 1e-12);
        for d in 2..=5 {
            let df = d as f64;
            for a in [1.0 / df.powi(3) + 1e-3, 0.5 / (df * df) + 0.5 / df.powi(3), 1.0 / (df * df)] {
                for i in 0..=10 {
                    let p = 1.0 / df + (1.0 - 1.0 / df) * i as f64 / 10.0;
                    let closed = gsic_min_entropy_bound(d, a, p).unwrap().value;
                    let lower = gsic_entropy_bound(d, a, p, EntropyOrder::MIN, Side::Lower).unwrap().value;
                    assert!(closed <= lower + 1e-9, "d={d} a={a} p={p}: {closed} > {lower}");
                    assert_abs_diff_eq!(closed, lower, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn tightness_witness_realises_bound() {
        let set = sic_set(3).unwrap();
        let rho = gsic_tightness_state(&set, 0.5, Family::Y).unwrap();
        assert_abs_diff_eq!(rho.purity(), 0.5, epsilon = 1e-10);
        let h = measure(&set.povms()[0], &rho).unwrap().entropy(EntropyOrder::SHANNON);
        let b = gsic_entropy_bound(3, 1.0 / 9.0, 0.5, EntropyOrder::SHANNON, Side::Lower).unwrap();
        assert_abs_diff_eq!(h, b.value, epsilon = 1e-10);

        let g = gsic(3, 0.5 * gsic_t_max(3).unwrap()).unwrap();
        let MeasurementKind::Gsic { a } = g.kind() else { panic!() };
        let p = 9.0 * a;
        let rho = gsic_tightness_state(&g, p, Family::X).unwrap();
        let h = measure(&g.povms()[0], &rho).unwrap().entropy(EntropyOrder::SHANNON);
        let b = gsic_entropy_bound(3, a, p, EntropyOrder::SHANNON, Side::Upper).unwrap();
        assert_abs_diff_eq!(h, b.value, epsilon = 1e-10);
    }

    #[test]
    fn mum_index_examples() {
        assert_abs_diff_eq!(mum_index_max(3, 4, 0.7, 1.0 / 3.0).unwrap(), 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mum_index_max(3, 4, 1.0, 1.0).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mum_index_max(2, 3, 1.0, 1.0).unwrap(), 2.0, epsilon = 1e-15);
        assert!(mum_index_max(3, 5, 1.0, 1.0).is_err());
        assert!(mum_index_max(3, 4, 0.3, 1.0).is_err());
    }

    #[test]
    fn theorem2_hand_trace() {
        let r = mum_shannon_lower(2, 3, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
        assert_eq!(r.param("n"), Some(1.0));
        assert_eq!(r.param("k"), Some(1.0));
        assert_abs_diff_eq!(r.param("c").unwrap(), 0.5, epsilon = 1e-12);
        let w = wym_bound(2, 3, 1.0).unwrap();
        assert_abs_diff_eq!(w.value, 2.0, epsilon = 1e-12);

        let g = theorem2_witness(2, 3, 1.0, 1.0).unwrap();
        let lens: Vec<usize> = g.iter().map(ProbDist::len).collect();
        assert_eq!(lens, vec![1, 2, 2]);
    }

    #[test]
    fn maximally_mixed_saturates() {
        for d in 2..=5 {
            for m in 1..=d + 1 {
                let p = 1.0 / d as f64;
                let expected = m as f64 * (d as f64).log2();
                assert_abs_diff_eq!(mum_shannon_lower(d, m, 1.0, p).unwrap().value, expected, epsilon = 1e-10);
                assert_abs_diff_eq!(wym_bound(d, m, p).unwrap().value, expected, epsilon = 1e-10);
                assert_abs_diff_eq!(mum_renyi_lower(d, m, 0.9, p, order(3.0)).unwrap().value, expected, epsilon = 1e-10);
                let g = theorem2_witness(d, m, 1.0, p).unwrap();
                assert!(g.iter().all(|x| x.len() == d));
            }
        }
    }

    #[test]
    fn witness_sums_match() {
        for d in 2..=5 {
            for m in 2..=d + 1 {
                for kappa in [0.6, 0.8, 1.0] {
                    if kappa <= 1.0 / d as f64 {
                        continue;
                    }
                    for i in 0..=20 {
                        let p = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * i as f64 / 20.0;
                        let b = mum_shannon_lower(d, m, kappa, p).unwrap();
                        let g = theorem2_witness(d, m, kappa, p).unwrap();
                        let ic: f64 = g.iter().map(ProbDist::index_of_coincidence).sum();
                        let h: f64 = g.iter().map(|x| x.entropy(EntropyOrder::SHANNON)).sum();
                        assert_abs_diff_eq!(ic, b.param("C").unwrap(), epsilon = 1e-10);
                        assert_abs_diff_eq!(h, b.value, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn reduced_form_agrees_on_its_range() {
        for d in 2..=5 {
            let pmax = mum_reduced_purity_max(d, 1.0).min(1.0);
            for i in 0..=10 {
                let p = 1.0 / d as f64 + (pmax - 1.0 / d as f64) * i as f64 / 10.0;
                let full = mum_shannon_lower(d, d + 1, 1.0, p).unwrap().value;
                let red = mum_reduced_lower(d, d + 1, 1.0, p, EntropyOrder::SHANNON).unwrap().unwrap().value;
                assert_abs_diff_eq!(full, red, epsilon = 1e-9);
            }
        }
        assert!(mum_reduced_lower(3, 4, 1.0, 0.9, EntropyOrder::SHANNON).unwrap().is_none());
    }

    #[test]
    fn theorem3_examples() {
        let r = mum_renyi_lower(2, 3, 1.0, 1.0, order(2.0)).unwrap();
        assert_abs_diff_eq!(r.value, -3.0 * (2.0f64 / 3.0).log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.value, 1.7549, epsilon = 1e-4);
        for c in [0.2, 0.4, 0.7, 1.0] {
            let (r1, r2) = rastegin_bounds(5, c, order(2.0)).unwrap();
            let t = theorem3_per_measurement(5, c, order(2.0)).unwrap();
            assert_abs_diff_eq!(r1.value, -c.log2(), epsilon = 1e-12);
            assert_abs_diff_eq!(r2.value, -c.log2(), epsilon = 1e-12);
            assert_abs_diff_eq!(t, -c.log2(), epsilon = 1e-12);
        }
        // at c = 1/d the second bound is log₂d, the first α/(2(α-1))·log₂d
        let (r1, r2) = rastegin_bounds(8, 0.125, order(3.0)).unwrap();
        assert_abs_diff_eq!(r1.value, 2.25, epsilon = 1e-12);
        assert_abs_diff_eq!(r2.value, 3.0, epsilon = 1e-12);
        let t = theorem3_per_measurement(8, 0.5, order(3.0)).unwrap();
        let (r1, r2) = rastegin_bounds(8, 0.5, order(3.0)).unwrap();
        assert!(t >= r1.value && t >= r2.value);
        assert!(mum_renyi_lower(2, 3, 1.0, 1.0, order(1.5)).is_err());
    }

    #[test]
    fn theorem3_continuous_in_alpha() {
        for c in [0.3, 0.6, 0.95] {
            let big = theorem3_per_measurement(4, c, order(1e7)).unwrap();
            let inf = theorem3_per_measurement(4, c, EntropyOrder::MIN).unwrap();
            assert_abs_diff_eq!(big, inf, epsilon = 1e-5);
            let near = theorem3_per_measurement(4, c, order(2.0 + 1e-7)).unwrap();
            assert_abs_diff_eq!(near, -c.log2(), epsilon = 1e-5);
        }
    }

    #[test]
    fn conjectures() {
        let r = conjectured_bounds(3, ConjectureKind::Mub3, 1.0 / 3.0).unwrap();
        let expected = 1.0 + 3.0 * extremal_y(3, 4.0 / 9.0).unwrap().entropy(EntropyOrder::SHANNON);
        assert_abs_diff_eq!(r.value, expected, epsilon = 1e-12);
        assert_eq!(r.status, Status::Conjecture);

        let s = conjectured_bounds(3, ConjectureKind::Sic3, 1.0 / 3.0).unwrap();
        assert!(s.out_of_domain);
        assert_abs_diff_eq!(s.value, 3.0, epsilon = 1e-12);
        assert!(!conjectured_bounds(3, ConjectureKind::Sic3, 0.75).unwrap().out_of_domain);

        let b = conjectured_bounds(3, ConjectureKind::Berta, 1.0 / 3.0).unwrap();
        assert_abs_diff_eq!(b.value, 4.0 * 3f64.log2(), epsilon = 1e-12);
        assert!(conjectured_bounds(3, ConjectureKind::Berta, 0.9).unwrap().out_of_domain);
        // at κ = 1 the Berta form equals the reduced form of the MUB bound
        for p in [0.34, 0.4, 0.5] {
            let red = mum_reduced_lower(3, 4, 1.0, p, EntropyOrder::SHANNON).unwrap().unwrap();
            let berta = conjectured_bounds(3, ConjectureKind::Berta, p).unwrap();
            assert_abs_diff_eq!(red.value, berta.value, epsilon = 1e-12);
        }
        assert!(conjectured_bounds(4, ConjectureKind::Mub3, 0.5).is_err());
    }

    #[test]
    fn approximations() {
        let r = mub_upper_approx(3, 1.0 / 3.0, Regime::Mixed).unwrap();
        assert_abs_diff_eq!(r.value, 4.0 * 3f64.log2(), epsilon = 1e-12);
        let r = mub_upper_approx(3, 1.0, Regime::Pure).unwrap();
        let expected = 4.0 * extremal_x(3, 0.5).unwrap().entropy(EntropyOrder::SHANNON);
        assert_abs_diff_eq!(r.value, expected, epsilon = 1e-12);
        assert_eq!(r.status, Status::Diagnostic);
    }

    #[test]
    fn formula_ids_render() {
        assert_eq!(FormulaId::Thm2Reduced.to_string(), "THM2_REDUCED");
        assert_eq!(FormulaId::GsicMinent.to_string(), "GSIC_MINENT");
    }
}
