//! Finite probability distributions, Rényi entropies and the two extremal
//! families that bound entropy at a fixed index of coincidence.
//!
//! Distributions are always kept in canonical form: probabilities sorted in
//! descending order with (numerically) zero entries removed, since zeros do
//! not contribute to any Rényi entropy.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

mod oracle;

pub use oracle::{
    oracle_extremal, oracle_sum_shannon_min, Extremum, OracleConfig, OracleOutcome,
};

/// Entries below this are treated as exact zeros.
pub const ZERO_CUTOFF: f64 = 1e-15;

/// Accepted deviation of the raw probability sum from one. The stored vector is
/// renormalised afterwards.
pub const SUM_TOLERANCE: f64 = 1e-10;

/// Slack applied when an index of coincidence is checked against `[1/L, 1]`.
pub const IC_TOLERANCE: f64 = 1e-12;

/// A probability vector in canonical (descending, zero-stripped) form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbDist {
    probs: Vec<f64>,
}

impl ProbDist {
    /// Builds a canonical distribution from raw probabilities.
    ///
    /// Entries in `(-1e-12, 1e-15)` are taken as roundoff and dropped; anything
    /// more negative, non-finite, or a sum further than [`SUM_TOLERANCE`] from
    /// one is rejected.
    pub fn new(raw: impl Into<Vec<f64>>) -> Result<Self> {
        let raw = raw.into();
        let mut probs = Vec::with_capacity(raw.len());
        let mut sum = 0.0;
        for &p in &raw {
            if !p.is_finite() {
                return Err(domain(format!("probability {p} is not finite")));
            }
            if p < -1e-12 {
                return Err(domain(format!("probability {p} is negative")));
            }
            sum += p.max(0.0);
            if p >= ZERO_CUTOFF {
                probs.push(p);
            }
        }
        if probs.is_empty() {
            return Err(domain("distribution has no nonzero entries"));
        }
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(domain(format!("probabilities sum to {sum}, not 1")));
        }
        let kept: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= kept;
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { probs })
    }

    /// Uniform distribution over `n` outcomes.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs at least one outcome");
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Two-level distribution `(n_a ⊙ p_a, n_b ⊙ p_b)`, assumed normalised.
    fn from_levels(n_a: usize, p_a: f64, n_b: usize, p_b: f64) -> Result<Self> {
        let mut raw = vec![p_a; n_a];
        raw.extend(std::iter::repeat_n(p_b, n_b));
        Self::new(raw)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of retained (nonzero) outcomes.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.probs[0]
    }

    /// Σ p_i², in `[1/L, 1]`.
    pub fn index_of_coincidence(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum()
    }

    pub fn entropy(&self, order: EntropyOrder) -> f64 {
        renyi_entropy(self, order)
    }
}

impl TryFrom<Vec<f64>> for ProbDist {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbDist> for Vec<f64> {
    fn from(d: ProbDist) -> Self {
        d.probs
    }
}

/// Rényi order α ∈ (0, ∞]. α = 1 is Shannon entropy and α = ∞ is
/// min-entropy; both are evaluated by their exact limit forms.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EntropyOrder(f64);

impl EntropyOrder {
    pub const SHANNON: Self = Self(1.0);
    pub const COLLISION: Self = Self(2.0);
    pub const MIN: Self = Self(f64::INFINITY);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(domain(format!("entropy order must be > 0, got {alpha}")));
        }
        Ok(Self(alpha))
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    pub fn is_shannon(self) -> bool {
        self.0 == 1.0
    }

    pub fn is_min_entropy(self) -> bool {
        self.0.is_infinite()
    }

    /// Sign of `2 - α`; orders below two have `P_y` as the entropy minimiser.
    pub fn below_collision(self) -> bool {
        self.0 < 2.0
    }
}

impl fmt::Display for EntropyOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_min_entropy() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for EntropyOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "min" => Ok(Self::MIN),
            "shannon" => Ok(Self::SHANNON),
            other => {
                let alpha: f64 = other
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid entropy order '{s}'")))?;
                Self::new(alpha)
            }
        }
    }
}

/// Rényi α-entropy in bits, clamped to `[0, log2 L]` to absorb roundoff.
pub fn renyi_entropy(dist: &ProbDist, order: EntropyOrder) -> f64 {
    let probs = dist.probs();
    let alpha = order.alpha();
    let h = if order.is_min_entropy() {
        -dist.max().log2()
    } else if order.is_shannon() {
        -probs.iter().map(|&p| p * p.log2()).sum::<f64>()
    } else if alpha == 2.0 {
        -dist.index_of_coincidence().log2()
    } else {
        probs.iter().map(|&p| p.powf(alpha)).sum::<f64>().log2() / (1.0 - alpha)
    };
    debug_assert!(h.is_finite(), "entropy of a valid distribution is finite");
    h.clamp(0.0, (probs.len() as f64).log2())
}

pub fn index_of_coincidence(dist: &ProbDist) -> f64 {
    dist.index_of_coincidence()
}

/// Validates `c ∈ [1/L, 1]` (with [`IC_TOLERANCE`] slack) and clamps it.
pub(crate) fn checked_ic(len: usize, c: f64) -> Result<f64> {
    if len < 2 {
        return Err(domain(format!("distribution length must be >= 2, got {len}")));
    }
    let lo = 1.0 / len as f64;
    if !c.is_finite() || c < lo - IC_TOLERANCE || c > 1.0 + IC_TOLERANCE {
        return Err(domain(format!(
            "index of coincidence {c} outside [1/{len}, 1]"
        )));
    }
    Ok(c.clamp(lo, 1.0))
}

/// Number of nonzero entries of `P_y[c]`, i.e. ⌈1/c⌉ with the boundary
/// guard so that `c = 1/k` selects the k-outcome segment.
pub fn support_of_y(c: f64) -> usize {
    ((1.0 / c) - IC_TOLERANCE).ceil().max(1.0) as usize
}

/// `P_x^L[c]`: one large probability and `L - 1` equal small ones.
pub fn extremal_x(len: usize, c: f64) -> Result<ProbDist> {
    let c = checked_ic(len, c)?;
    let l = len as f64;
    let spread = ((l * c - 1.0).max(0.0) * (l - 1.0)).sqrt();
    let big = (1.0 + spread) / l;
    let small = (1.0 - spread / (l - 1.0)) / l;
    ProbDist::from_levels(1, big, len - 1, small.max(0.0))
}

/// `P_y^L[c]`: `N - 1` equal large probabilities and one smaller one, with
/// `N = ⌈1/c⌉ ≤ L`.
pub fn extremal_y(len: usize, c: f64) -> Result<ProbDist> {
    let c = checked_ic(len, c)?;
    let n = support_of_y(c).min(len);
    if n == 1 {
        return Ok(ProbDist::uniform(1));
    }
    let nf = n as f64;
    let excess = (nf * c - 1.0).max(0.0);
    let big = (1.0 + (excess / (nf - 1.0)).sqrt()) / nf;
    let small = (1.0 - (excess * (nf - 1.0)).sqrt()) / nf;
    ProbDist::from_levels(n - 1, big, 1, small.max(0.0))
}

/// Parameters of the two-level family `(N_a ⊙ p_a, (N - N_a) ⊙ p_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelParams {
    c: f64,
    n: usize,
    n_a: usize,
}

impl TwoLevelParams {
    pub fn new(c: f64, n: usize, n_a: usize) -> Result<Self> {
        if n_a == 0 || n_a > n {
            return Err(domain(format!("need 1 <= N_a <= N, got N={n}, N_a={n_a}")));
        }
        let lo = 1.0 / n as f64;
        let hi = 1.0 / n_a as f64;
        if !c.is_finite() || c < lo - IC_TOLERANCE || c > hi + IC_TOLERANCE {
            return Err(domain(format!("c={c} outside [1/{n}, 1/{n_a}]")));
        }
        if n_a == n && (c - lo).abs() > IC_TOLERANCE {
            return Err(domain(format!("N_a = N = {n} requires c = 1/N, got {c}")));
        }
        Ok(Self {
            c: c.clamp(lo, hi),
            n,
            n_a,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    fn excess(&self) -> f64 {
        (self.n as f64 * self.c - 1.0).max(0.0)
    }

    pub fn p_a(&self) -> f64 {
        if self.n_a == self.n {
            return 1.0 / self.n as f64;
        }
        let ratio = (self.n - self.n_a) as f64 / self.n_a as f64;
        (1.0 + (self.excess() * ratio).sqrt()) / self.n as f64
    }

    pub fn p_b(&self) -> f64 {
        if self.n_a == self.n {
            return 0.0;
        }
        let ratio = self.n_a as f64 / (self.n - self.n_a) as f64;
        ((1.0 - (self.excess() * ratio).sqrt()) / self.n as f64).max(0.0)
    }

    /// Angular form θ = 2·arccos√(N_a/N) ∈ [0, π).
    pub fn theta(&self) -> f64 {
        2.0 * (self.n_a as f64 / self.n as f64).sqrt().acos()
    }
}

pub fn two_level_dist(params: TwoLevelParams) -> Result<ProbDist> {
    ProbDist::from_levels(
        params.n_a,
        params.p_a(),
        params.n - params.n_a,
        params.p_b(),
    )
}

/// Entropy range attainable at a fixed index of coincidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyRange {
    pub lower: f64,
    pub upper: f64,
}

/// Lower and upper Rényi entropy over all length-`len` distributions with
/// index of coincidence `c`. For α < 2 the minimiser is `P_y` and the
/// maximiser `P_x`; the roles swap for α > 2 and collapse at α = 2.
pub fn theorem1_bounds(len: usize, c: f64, order: EntropyOrder) -> Result<EntropyRange> {
    let c = checked_ic(len, c)?;
    if order.alpha() == 2.0 {
        let h = -c.log2();
        return Ok(EntropyRange { lower: h, upper: h });
    }
    let hx = extremal_x(len, c)?.entropy(order);
    let hy = extremal_y(len, c)?.entropy(order);
    Ok(if order.below_collision() {
        EntropyRange {
            lower: hy,
            upper: hx,
        }
    } else {
        EntropyRange {
            lower: hx,
            upper: hy,
        }
    })
}
