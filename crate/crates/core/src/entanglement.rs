//! Entropic separability criterion for bipartite states.
//!
//! For a separable `ρ_AB` and bases `{A_m}`, `{B_m}`,
//! `Σ_m H_α(A_m ⊗ B_m | ρ_AB) ≥ max(D_A, D_B)` where `D_A`, `D_B` are the
//! marginal entropy sums. A violation certifies entanglement.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::probdist::{EntropyOrder, ProbDist};
use crate::quantum::{measure, mub_set, trace_product, CMatrix, CVector, DensityMatrix, Povm};

/// Violation margin: `lhs < rhs - VIOLATION_MARGIN`.
pub const VIOLATION_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    da: usize,
    db: usize,
    state: DensityMatrix,
    marginal_a: DensityMatrix,
    marginal_b: DensityMatrix,
}

/// `Tr_B` of a `(da·db)`-dimensional matrix.
pub fn partial_trace_b(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, da, |i, k| (0..db).map(|j| m[(i * db + j, k * db + j)]).sum())
}

/// `Tr_A` of a `(da·db)`-dimensional matrix.
pub fn partial_trace_a(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(db, db, |j, l| (0..da).map(|i| m[(i * db + j, i * db + l)]).sum())
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, da: usize, db: usize) -> Result<Self> {
        if da == 0 || db == 0 || da * db != state.dim() {
            return Err(Error::DimensionMismatch { expected: da * db, got: state.dim() });
        }
        let marginal_a = DensityMatrix::new(partial_trace_b(state.matrix(), da, db))?;
        let marginal_b = DensityMatrix::new(partial_trace_a(state.matrix(), da, db))?;
        Ok(Self { da, db, state, marginal_a, marginal_b })
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        Self::new(DensityMatrix::new(a.matrix().kronecker(b.matrix()))?, a.dim(), b.dim())
    }

    /// Convex mixture of states on the same bipartition.
    pub fn mixture(parts: &[(f64, BipartiteState)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or_else(|| domain("empty mixture"))?;
        let (da, db) = (first.da, first.db);
        let mut m = CMatrix::zeros(da * db, da * db);
        for (w, s) in parts {
            if s.da != da || s.db != db {
                return Err(Error::DimensionMismatch { expected: da * db, got: s.da * s.db });
            }
            if *w < 0.0 {
                return Err(domain("mixture weights must be nonnegative"));
            }
            m += s.state.matrix().scale(*w);
        }
        Self::new(DensityMatrix::new(m)?, da, db)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.da, self.db)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn marginal_a(&self) -> &DensityMatrix {
        &self.marginal_a
    }

    pub fn marginal_b(&self) -> &DensityMatrix {
        &self.marginal_b
    }
}

/// `(1-p)/d²·1 + p|ψ⟩⟨ψ|` with `|ψ⟩ = Σ|ii⟩/√d`.
pub fn werner(d: usize, p: f64) -> Result<BipartiteState> {
    if d < 2 {
        return Err(domain(format!("dimension must be at least 2, got {d}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(format!("mixing weight p = {p} outside [0, 1]")));
    }
    let n = d * d;
    let amp = 1.0 / (d as f64).sqrt();
    let psi = CVector::from_fn(n, |k, _| {
        if k % (d + 1) == 0 {
            Complex64::new(amp, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let m = CMatrix::identity(n, n).scale((1.0 - p) / n as f64) + (&psi * psi.adjoint()).scale(p);
    BipartiteState::new(DensityMatrix::new(m)?, d, d)
}

/// Joint outcome distribution of `A ⊗ B`, with raw `p(i, j)` kept.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    /// `table[i][j] = Tr[(A_i ⊗ B_j) ρ]`.
    pub table: Vec<Vec<f64>>,
}

impl JointDist {
    pub fn dist(&self) -> Result<ProbDist> {
        ProbDist::new(self.table.iter().flatten().copied().collect::<Vec<_>>())
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        self.table.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        let cols = self.table.first().map_or(0, Vec::len);
        (0..cols).map(|j| self.table.iter().map(|row| row[j]).sum()).collect()
    }
}

pub fn joint_dist(a: &Povm, b: &Povm, state: &BipartiteState) -> Result<JointDist> {
    if a.dim() != state.da {
        return Err(Error::DimensionMismatch { expected: state.da, got: a.dim() });
    }
    if b.dim() != state.db {
        return Err(Error::DimensionMismatch { expected: state.db, got: b.dim() });
    }
    let rho = state.state.matrix();
    let table = a
        .elements()
        .iter()
        .map(|ea| {
            b.elements()
                .iter()
                .map(|eb| trace_product(&ea.kronecker(eb), rho).re.max(0.0))
                .collect()
        })
        .collect();
    Ok(JointDist { table })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub d_a: f64,
    pub d_b: f64,
    pub violated: bool,
}

pub fn eur_criterion(pairs: &[(Povm, Povm)], state: &BipartiteState, order: EntropyOrder) -> Result<CriterionOutcome> {
    if pairs.is_empty() {
        return Err(domain("criterion needs at least one pair of observables"));
    }
    let (mut lhs, mut d_a, mut d_b) = (0.0, 0.0, 0.0);
    for (a, b) in pairs {
        lhs += joint_dist(a, b, state)?.dist()?.entropy(order);
        d_a += measure(a, &state.marginal_a)?.entropy(order);
        d_b += measure(b, &state.marginal_b)?.entropy(order);
    }
    let rhs = d_a.max(d_b);
    Ok(CriterionOutcome { lhs, rhs, d_a, d_b, violated: lhs < rhs - VIOLATION_MARGIN })
}

/// `(σ_m, σ_m)` pairs over a complete MUB set.
pub fn complete_mub_pairs(d: usize) -> Result<Vec<(Povm, Povm)>> {
    Ok(mub_set(d)?.povms().iter().map(|p| (p.clone(), p.clone())).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub d: usize,
    pub alpha: String,
    /// Smallest violating `p`, or 1.0 when nothing in `[0, 1]` violates.
    pub threshold: f64,
    pub found: bool,
    pub scan_points: Vec<ScanPoint>,
}

/// Left-hand side of the Werner-state criterion with complete MUBs and the
/// state-independent right-hand side `(d+1)log₂d`.
pub fn werner_lhs(d: usize, p: f64, pairs: &[(Povm, Povm)], order: EntropyOrder) -> Result<f64> {
    let state = werner(d, p)?;
    pairs
        .iter()
        .map(|(a, b)| Ok(joint_dist(a, b, &state)?.dist()?.entropy(order)))
        .sum()
}

/// Smallest Werner weight `p` violating the complete-MUB criterion: a coarse
/// scan in steps of 0.01 followed by bisection to `resolution`.
pub fn werner_threshold(d: usize, order: EntropyOrder, resolution: f64) -> Result<ThresholdReport> {
    if !(resolution > 0.0 && resolution <= 1e-3) {
        return Err(domain(format!("resolution must lie in (0, 1e-3], got {resolution}")));
    }
    let pairs = complete_mub_pairs(d)?;
    let rhs = (d + 1) as f64 * (d as f64).log2();
    let scan_points = (0..=100)
        .into_par_iter()
        .map(|i| {
            let p = i as f64 / 100.0;
            Ok(ScanPoint { p, lhs: werner_lhs(d, p, &pairs, order)?, rhs })
        })
        .collect::<Result<Vec<_>>>()?;
    let violated = |lhs: f64| lhs < rhs - VIOLATION_MARGIN;
    let first = scan_points.iter().position(|s| violated(s.lhs));
    let (threshold, found) = match first {
        None => (1.0, false),
        Some(0) => (0.0, true),
        Some(i) => {
            let (mut lo, mut hi) = (scan_points[i - 1].p, scan_points[i].p);
            while hi - lo > resolution {
                let mid = 0.5 * (lo + hi);
                if violated(werner_lhs(d, mid, &pairs, order)?) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            (hi, true)
        }
    };
    Ok(ThresholdReport { d, alpha: order.to_string(), threshold, found, scan_points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{random_density_hs, stream_rng};
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn werner_examples() {
        let w0 = werner(3, 0.0).unwrap();
        assert_abs_diff_eq!(w0.state().purity(), 1.0 / 9.0, epsilon = 1e-12);
        let w1 = werner(3, 1.0).unwrap();
        assert_abs_diff_eq!(w1.state().purity(), 1.0, epsilon = 1e-12);
        for p in [0.0, 0.4, 1.0] {
            let w = werner(2, p).unwrap();
            assert_abs_diff_eq!(w.marginal_a().purity(), 0.5, epsilon = 1e-12);
            let set = mub_set(2).unwrap();
            let z = &set.povms()[0];
            let j = joint_dist(z, z, &w).unwrap();
            assert_abs_diff_eq!(j.table[0][0], (1.0 - p) / 4.0 + p / 2.0, epsilon = 1e-12);
        }
        assert!(werner(2, 1.5).is_err());
    }

    #[test]
    fn product_states_factorise() {
        let a = random_density_hs(2, 2, 1).unwrap();
        let b = random_density_hs(3, 2, 2).unwrap();
        let s = BipartiteState::product(&a, &b).unwrap();
        assert!((s.marginal_a().matrix() - a.matrix()).norm() < 1e-12);
        assert!((s.marginal_b().matrix() - b.matrix()).norm() < 1e-12);
        let (sa, sb) = (mub_set(2).unwrap(), mub_set(3).unwrap());
        let (pa, pb) = (&sa.povms()[1], &sb.povms()[2]);
        let j = joint_dist(pa, pb, &s).unwrap();
        let ma = crate::quantum::probabilities(pa, &a).unwrap();
        let mb = crate::quantum::probabilities(pb, &b).unwrap();
        let total: f64 = j.table.iter().flatten().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        for (i, row) in j.table.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                assert_abs_diff_eq!(*v, ma[i] * mb[k], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bell_state_correlations() {
        let w = werner(2, 1.0).unwrap();
        for povm in mub_set(2).unwrap().povms() {
            let j = joint_dist(povm, povm, &w).unwrap();
            for m in j.marginal_a().iter().chain(&j.marginal_b()) {
                assert_abs_diff_eq!(*m, 0.5, epsilon = 1e-12);
            }
            // perfectly (anti)correlated: two outcomes of weight 1/2
            assert_eq!(j.dist().unwrap().len(), 2);
        }
    }

    #[test]
    fn separable_states_never_violate() {
        let mut rng = stream_rng(9, 0);
        for d in [2, 3] {
            let pairs = complete_mub_pairs(d).unwrap();
            for i in 0..40 {
                let parts: Vec<(f64, BipartiteState)> = (0..3)
                    .map(|k| {
                        let seed = (i * 7 + k) as u64;
                        let a = random_density_hs(d, 1 + k % d, seed).unwrap();
                        let b = random_density_hs(d, d, seed + 1000).unwrap();
                        (rng.random::<f64>(), BipartiteState::product(&a, &b).unwrap())
                    })
                    .collect();
                let total: f64 = parts.iter().map(|(w, _)| w).sum();
                let parts: Vec<_> = parts.into_iter().map(|(w, s)| (w / total, s)).collect();
                let s = BipartiteState::mixture(&parts).unwrap();
                for order in [EntropyOrder::SHANNON, EntropyOrder::COLLISION, EntropyOrder::MIN] {
                    assert!(!eur_criterion(&pairs, &s, order).unwrap().violated);
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_is_far_from_violation() {
        let pairs = complete_mub_pairs(3).unwrap();
        let out = eur_criterion(&pairs, &werner(3, 0.0).unwrap(), EntropyOrder::MIN).unwrap();
        assert_abs_diff_eq!(out.lhs, 2.0 * out.rhs, epsilon = 1e-12);
        assert_abs_diff_eq!(out.rhs, 4.0 * 3f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn werner_lhs_is_monotone() {
        let pairs = complete_mub_pairs(2).unwrap();
        let vals: Vec<f64> = (0..=20)
            .map(|i| werner_lhs(2, i as f64 / 20.0, &pairs, EntropyOrder::MIN).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn threshold_report_shape() {
        let r = werner_threshold(2, EntropyOrder::MIN, 1e-4).unwrap();
        assert_eq!(r.scan_points.len(), 101);
        assert_eq!(r.alpha, "inf");
        assert!(werner_threshold(2, EntropyOrder::MIN, 0.1).is_err());
        assert!(werner_threshold(6, EntropyOrder::MIN, 1e-4).is_err());
    }
}
