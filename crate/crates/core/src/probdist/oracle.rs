//! Brute-force extremality oracle.
//!
//! Optimises entropy directly over the slice
//! `{p : Σp = 1, Σp² = c, p ≥ 0}` without using the closed-form extremal
//! families, so it can check them independently.
//!
//! The slice is split by support size. On a fixed support of size `k` the
//! constraint set is a sphere of radius `√(c - 1/k)` around the uniform
//! point inside the simplex hyperplane; its relative boundary belongs to
//! smaller supports, so searching every open piece covers the closed slice.
//! Each piece is searched by random restarts followed by projected gradient
//! steps along the sphere. Several distributions can be optimised jointly
//! (block structure) under a constraint on the *sum* of their indices of
//! coincidence.
//!
//! Min-entropy is non-smooth and is handled separately: its extremes reduce
//! to feasibility questions over the box-constrained simplex, answered by
//! vertex enumeration and bisection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{checked_ic, EntropyOrder, ProbDist};
use crate::error::{domain, Error, Result};

/// Largest distribution length the oracle accepts.
pub const MAX_ORACLE_LEN: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extremum {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Restart budget, shared across the support pieces of one call.
    pub restarts: usize,
    pub seed: u64,
    /// Stationarity tolerance on the projected gradient.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            restarts: 200,
            seed: 0,
            tolerance: 1e-10,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOutcome {
    /// Optimal entropy (sum of entropies for the joint search), in bits.
    pub value: f64,
    /// One optimiser per distribution.
    pub argopt: Vec<ProbDist>,
}

/// Extreme Rényi entropy over distributions of length `len ≤ 6` with index of
/// coincidence `c`.
pub fn oracle_extremal(
    len: usize,
    c: f64,
    order: EntropyOrder,
    direction: Extremum,
    cfg: &OracleConfig,
) -> Result<OracleOutcome> {
    if len > MAX_ORACLE_LEN {
        return Err(domain(format!(
            "oracle supports L <= {MAX_ORACLE_LEN}, got {len}"
        )));
    }
    let c = checked_ic(len, c)?;
    if order.is_min_entropy() {
        let dist = match direction {
            Extremum::Min => max_largest_probability(len, c)?,
            Extremum::Max => min_largest_probability(len, c)?,
        };
        return Ok(OracleOutcome {
            value: -dist.max().log2(),
            argopt: vec![dist],
        });
    }
    let patterns: Vec<Vec<usize>> = (1..=len).map(|k| vec![k]).collect();
    search(&patterns, c, order, direction, cfg)
}

/// Minimum of `Σ_m H(P^m)` over `count` distributions of length `len` whose
/// indices of coincidence sum to `total_ic`.
pub fn oracle_sum_shannon_min(
    len: usize,
    count: usize,
    total_ic: f64,
    cfg: &OracleConfig,
) -> Result<OracleOutcome> {
    if !(2..=MAX_ORACLE_LEN).contains(&len) {
        return Err(domain(format!("oracle supports 2 <= L <= {MAX_ORACLE_LEN}, got {len}")));
    }
    if count == 0 || count > 5 {
        return Err(domain(format!("joint oracle supports 1..=5 distributions, got {count}")));
    }
    let lo = count as f64 / len as f64;
    let hi = count as f64;
    if !total_ic.is_finite() || total_ic < lo - 1e-12 || total_ic > hi + 1e-12 {
        return Err(domain(format!("total IC {total_ic} outside [{lo}, {hi}]")));
    }
    let total_ic = total_ic.clamp(lo, hi);
    // blocks are interchangeable, so nondecreasing support patterns suffice
    let mut patterns = Vec::new();
    let mut current = vec![1usize; count];
    loop {
        patterns.push(current.clone());
        let Some(pos) = (0..count).rev().find(|&i| current[i] < len) else {
            break;
        };
        let next = current[pos] + 1;
        for slot in &mut current[pos..] {
            *slot = next;
        }
    }
    search(&patterns, total_ic, EntropyOrder::SHANNON, Extremum::Min, cfg)
}

/// One open piece of the slice: fixed block supports, fixed total Σp².
struct Piece {
    blocks: Vec<usize>,
    center: Vec<f64>,
    radius: f64,
}

impl Piece {
    fn new(blocks: &[usize], total_ic: f64) -> Option<Self> {
        let floor: f64 = blocks.iter().map(|&k| 1.0 / k as f64).sum();
        let r2 = total_ic - floor;
        if r2 < -1e-12 {
            return None;
        }
        // every block of size >= 2 has Σp² < 1 on the open piece
        let ceiling: f64 = blocks.len() as f64;
        let all_points = blocks.iter().all(|&k| k == 1);
        if !all_points && total_ic >= ceiling - 1e-14 {
            return None;
        }
        if all_points && (total_ic - ceiling).abs() > 1e-12 {
            return None;
        }
        let center = blocks
            .iter()
            .flat_map(|&k| std::iter::repeat_n(1.0 / k as f64, k))
            .collect();
        Some(Self {
            blocks: blocks.to_vec(),
            center,
            radius: r2.max(0.0).sqrt(),
        })
    }

    fn dim(&self) -> usize {
        self.center.len()
    }

    /// Removes per-block means, projecting onto the simplex tangent space.
    fn center_blocks(&self, v: &mut [f64]) {
        let mut offset = 0;
        for &k in &self.blocks {
            let block = &mut v[offset..offset + k];
            let mean = block.iter().sum::<f64>() / k as f64;
            block.iter_mut().for_each(|x| *x -= mean);
            offset += k;
        }
    }

    /// Maps an arbitrary displacement onto the sphere.
    fn retract(&self, mut w: Vec<f64>) -> Option<Vec<f64>> {
        self.center_blocks(&mut w);
        let norm = norm(&w);
        if norm == 0.0 {
            return None;
        }
        let scale = self.radius / norm;
        let x: Vec<f64> = self
            .center
            .iter()
            .zip(&w)
            .map(|(u, d)| u + scale * d)
            .collect();
        x.iter().all(|&p| p > 0.0).then_some(x)
    }

    /// Random interior starting point: a Dirichlet draw `z` with
    /// `|z - u| ≥ r`, pulled back along the segment to the sphere.
    fn start(&self, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        if self.radius == 0.0 {
            return Some(self.center.clone());
        }
        for attempt in 0..400 {
            let conc = [1.0, 0.5, 0.2, 0.08, 0.03, 0.01][(attempt / 20).min(5)];
            let conc = conc * rng.random_range(0.5..1.5);
            let gamma = Gamma::new(conc, 1.0).expect("positive shape");
            let mut z = Vec::with_capacity(self.dim());
            for &k in &self.blocks {
                let draws: Vec<f64> = (0..k).map(|_| f64::max(gamma.sample(rng), 1e-300)).collect();
                let s: f64 = draws.iter().sum();
                z.extend(draws.into_iter().map(|g| g / s));
            }
            let w: Vec<f64> = z.iter().zip(&self.center).map(|(a, b)| a - b).collect();
            if norm(&w) >= self.radius {
                if let Some(x) = self.retract(w) {
                    return Some(x);
                }
            }
        }
        // fall back to isotropic directions
        for _ in 0..400 {
            let w: Vec<f64> = (0..self.dim()).map(|_| rng.sample(StandardNormal)).collect();
            if let Some(x) = self.retract(w) {
                return Some(x);
            }
        }
        None
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Objective (entropy sum, sign-adjusted so that we always minimise) and
/// its gradient.
struct Objective {
    order: EntropyOrder,
    sign: f64,
}

impl Objective {
    fn value(&self, piece: &Piece, x: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut offset = 0;
        for &k in &piece.blocks {
            total += block_entropy(&x[offset..offset + k], self.order);
            offset += k;
        }
        self.sign * total
    }

    fn gradient(&self, piece: &Piece, x: &[f64], out: &mut [f64]) {
        let alpha = self.order.alpha();
        let ln2 = std::f64::consts::LN_2;
        let mut offset = 0;
        for &k in &piece.blocks {
            let block = &x[offset..offset + k];
            let grad = &mut out[offset..offset + k];
            if self.order.is_shannon() {
                for (g, &p) in grad.iter_mut().zip(block) {
                    *g = -(p.ln() + 1.0) / ln2;
                }
            } else {
                let s: f64 = block.iter().map(|p| p.powf(alpha)).sum();
                let factor = alpha / ((1.0 - alpha) * s * ln2);
                for (g, &p) in grad.iter_mut().zip(block) {
                    *g = factor * p.powf(alpha - 1.0);
                }
            }
            offset += k;
        }
        out.iter_mut().for_each(|g| *g *= self.sign);
    }
}

fn block_entropy(p: &[f64], order: EntropyOrder) -> f64 {
    if order.is_shannon() {
        -p.iter().map(|&q| q * q.log2()).sum::<f64>()
    } else {
        let a = order.alpha();
        p.iter().map(|q| q.powf(a)).sum::<f64>().log2() / (1.0 - a)
    }
}

struct LocalResult {
    value: f64,
    x: Vec<f64>,
    converged: bool,
}

/// Projected gradient descent with Armijo backtracking on one piece.
fn local_search(piece: &Piece, obj: &Objective, mut x: Vec<f64>, cfg: &OracleConfig) -> LocalResult {
    let n = piece.dim();
    let mut f = obj.value(piece, &x);
    if piece.radius == 0.0 || n <= 1 {
        return LocalResult { value: f, x, converged: true };
    }
    let mut g = vec![0.0; n];
    let mut eta = 0.1;
    for _ in 0..cfg.max_iter {
        obj.gradient(piece, &x, &mut g);
        piece.center_blocks(&mut g);
        let v: Vec<f64> = x.iter().zip(&piece.center).map(|(a, b)| a - b).collect();
        let radial = dot(&g, &v) / (piece.radius * piece.radius);
        g.iter_mut().zip(&v).for_each(|(gi, vi)| *gi -= radial * vi);
        let gn2 = dot(&g, &g);
        if gn2.sqrt() * piece.radius < cfg.tolerance {
            return LocalResult { value: f, x, converged: true };
        }
        let mut accepted = false;
        while eta * gn2.sqrt() > 1e-17 {
            let w: Vec<f64> = v.iter().zip(&g).map(|(vi, gi)| vi - eta * gi).collect();
            if let Some(y) = piece.retract(w) {
                let fy = obj.value(piece, &y);
                if fy <= f - 1e-4 * eta * gn2 {
                    x = y;
                    f = fy;
                    accepted = true;
                    break;
                }
            }
            eta *= 0.5;
        }
        if !accepted {
            // no descent step exists at machine resolution: the iterate sits
            // at a stationary point or is pressed against the piece boundary
            return LocalResult { value: f, x, converged: true };
        }
        eta *= 2.0;
    }
    LocalResult { value: f, x, converged: false }
}

fn search(
    patterns: &[Vec<usize>],
    total_ic: f64,
    order: EntropyOrder,
    direction: Extremum,
    cfg: &OracleConfig,
) -> Result<OracleOutcome> {
    let obj = Objective {
        order,
        sign: match direction {
            Extremum::Min => 1.0,
            Extremum::Max => -1.0,
        },
    };
    let pieces: Vec<Piece> = patterns
        .iter()
        .filter_map(|p| Piece::new(p, total_ic))
        .collect();
    if pieces.is_empty() {
        return Err(domain("no feasible support pattern for this index of coincidence"));
    }
    let per_piece = cfg.restarts.div_ceil(pieces.len()).max(4);
    let jobs: Vec<(usize, usize)> = (0..pieces.len())
        .flat_map(|p| (0..per_piece).map(move |r| (p, r)))
        .collect();
    let results: Vec<Option<(usize, LocalResult)>> = jobs
        .par_iter()
        .enumerate()
        .map(|(job, &(p, _))| {
            let piece = &pieces[p];
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(job as u64);
            let start = piece.start(&mut rng)?;
            Some((p, local_search(piece, &obj, start, cfg)))
        })
        .collect();

    let mut best: Option<(usize, LocalResult)> = None;
    let mut any_converged = false;
    for (p, res) in results.into_iter().flatten() {
        any_converged |= res.converged;
        if best.as_ref().is_none_or(|(_, b)| res.value < b.value) {
            best = Some((p, res));
        }
    }
    let (p, best) = best.ok_or_else(|| domain("oracle found no feasible starting point"))?;
    let value = obj.sign * best.value;
    if !any_converged {
        return Err(Error::NotConverged {
            restarts: jobs.len(),
            best: value,
        });
    }
    let mut argopt = Vec::new();
    let mut offset = 0;
    for &k in &pieces[p].blocks {
        argopt.push(ProbDist::new(best.x[offset..offset + k].to_vec())?);
        offset += k;
    }
    Ok(OracleOutcome { value, argopt })
}

/// Largest achievable `max p` on the slice: maximise `p_1 = t` subject to the
/// remaining `L - 1` entries having mass `1 - t` and Σq² = c - t².
fn max_largest_probability(len: usize, c: f64) -> Result<ProbDist> {
    if c <= 1.0 / len as f64 + 1e-14 {
        // the slice is the single uniform point
        return Ok(ProbDist::uniform(len));
    }
    let rest = (len - 1) as f64;
    let feasible = |t: f64| {
        let m = 1.0 - t;
        let s = c - t * t;
        s >= m * m / rest - 1e-15 && s <= m * m + 1e-15
    };
    let steps = 100_000;
    let mut hi = None;
    for i in (0..=steps).rev() {
        let t = i as f64 / steps as f64;
        if feasible(t) {
            hi = Some(t);
            break;
        }
    }
    let mut lo = hi.ok_or_else(|| domain("empty slice"))?;
    let mut up = (lo + 1.0 / steps as f64).min(1.0);
    if !feasible(up) {
        for _ in 0..200 {
            let mid = 0.5 * (lo + up);
            if feasible(mid) {
                lo = mid;
            } else {
                up = mid;
            }
        }
    } else {
        lo = up;
    }
    let t = lo;
    let m = 1.0 - t;
    let s = (c - t * t).max(0.0);
    let mut p = vec![t];
    if len == 2 {
        p.push(m);
    } else {
        // witness for the remainder: one large entry, the rest equal
        let disc = ((rest - 1.0) * (rest * s - m * m)).max(0.0).sqrt();
        let a = (m + disc) / rest;
        let b = ((m - a) / (rest - 1.0)).max(0.0);
        p.push(a);
        p.extend(std::iter::repeat_n(b, len - 2));
    }
    ProbDist::new(p)
}

/// Largest Σp² over the polytope `{0 ≤ p ≤ t, Σp = 1}` by vertex
/// enumeration. Returns the value and a maximising vertex.
fn max_square_sum_in_box(len: usize, t: f64) -> (f64, Vec<f64>) {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for free in 0..len {
        for mask in 0u32..(1 << (len - 1)) {
            let mut p = vec![0.0; len];
            let mut at_cap = 0usize;
            let mut bit = 0;
            for (i, slot) in p.iter_mut().enumerate() {
                if i == free {
                    continue;
                }
                if mask & (1 << bit) != 0 {
                    *slot = t;
                    at_cap += 1;
                }
                bit += 1;
            }
            let rest = 1.0 - at_cap as f64 * t;
            if rest < -1e-15 || rest > t + 1e-15 {
                continue;
            }
            p[free] = rest.clamp(0.0, t);
            let sq: f64 = p.iter().map(|x| x * x).sum();
            if sq > best.0 {
                best = (sq, p);
            }
        }
    }
    best
}

/// Smallest achievable `max p` on the slice: the least cap `t` for which the
/// capped simplex still reaches Σp² = c (it always reaches 1/L, and the set is
/// connected).
fn min_largest_probability(len: usize, c: f64) -> Result<ProbDist> {
    let mut lo = 1.0 / len as f64;
    let mut hi = 1.0;
    if max_square_sum_in_box(len, lo).0 >= c {
        return Ok(ProbDist::uniform(len));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if max_square_sum_in_box(len, mid).0 >= c {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    ProbDist::new(max_square_sum_in_box(len, hi).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probdist::{extremal_x, extremal_y};
    use approx::assert_abs_diff_eq;

    fn cfg() -> OracleConfig {
        OracleConfig {
            restarts: 60,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn uniform_slice() {
        let out = oracle_extremal(3, 1.0 / 3.0, EntropyOrder::SHANNON, Extremum::Min, &cfg()).unwrap();
        assert_abs_diff_eq!(out.value, 3f64.log2(), epsilon = 1e-12);
        assert_eq!(out.argopt[0].len(), 3);
    }

    #[test]
    fn shannon_minimum_at_half() {
        let out = oracle_extremal(4, 0.5, EntropyOrder::SHANNON, Extremum::Min, &cfg()).unwrap();
        assert_abs_diff_eq!(out.value, 1.0, epsilon = 1e-6);
        let arg = &out.argopt[0];
        assert_eq!(arg.len(), 2);
        assert_abs_diff_eq!(arg.probs()[0], 0.5, epsilon = 1e-5);
    }

    #[test]
    fn roles_swap_above_collision_order() {
        let a5 = EntropyOrder::new(5.0).unwrap();
        let out = oracle_extremal(4, 0.5, a5, Extremum::Min, &cfg()).unwrap();
        let expected = extremal_x(4, 0.5).unwrap().entropy(a5);
        assert_abs_diff_eq!(out.value, expected, epsilon = 1e-6);
    }

    #[test]
    fn min_entropy_routes() {
        for (len, c) in [(3, 0.4), (4, 0.3), (5, 0.6), (6, 0.21), (4, 1.0)] {
            let min = oracle_extremal(len, c, EntropyOrder::MIN, Extremum::Min, &cfg()).unwrap();
            let max = oracle_extremal(len, c, EntropyOrder::MIN, Extremum::Max, &cfg()).unwrap();
            assert_abs_diff_eq!(min.argopt[0].index_of_coincidence(), c, epsilon = 1e-9);
            assert_abs_diff_eq!(max.argopt[0].index_of_coincidence(), c, epsilon = 1e-9);
            assert!(min.value <= max.value + 1e-12);
            let hx = extremal_x(len, c).unwrap().entropy(EntropyOrder::MIN);
            let hy = extremal_y(len, c).unwrap().entropy(EntropyOrder::MIN);
            assert_abs_diff_eq!(min.value, hx, epsilon = 1e-9);
            assert_abs_diff_eq!(max.value, hy, epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_large_lengths() {
        assert!(oracle_extremal(7, 0.5, EntropyOrder::SHANNON, Extremum::Min, &cfg()).is_err());
    }

    #[test]
    fn joint_search_qubit_triple() {
        // three binary distributions with IC sum 2: one deterministic, two fair
        let out = oracle_sum_shannon_min(2, 3, 2.0, &cfg()).unwrap();
        assert_abs_diff_eq!(out.value, 2.0, epsilon = 1e-8);
        let ics: f64 = out.argopt.iter().map(|d| d.index_of_coincidence()).sum();
        assert_abs_diff_eq!(ics, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = oracle_extremal(5, 0.37, EntropyOrder::new(0.7).unwrap(), Extremum::Max, &cfg()).unwrap();
        let b = oracle_extremal(5, 0.37, EntropyOrder::new(0.7).unwrap(), Extremum::Max, &cfg()).unwrap();
        assert_eq!(a, b);
    }
}
