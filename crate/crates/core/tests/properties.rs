use eur_core::bounds::{
    mum_renyi_lower, mum_shannon_lower, rastegin_bounds, theorem3_per_measurement, wym_bound,
};
use eur_core::probdist::{
    extremal_x, extremal_y, renyi_entropy, theorem1_bounds, two_level_dist, EntropyOrder, ProbDist, TwoLevelParams,
};
use eur_core::quantum::{mub_set, probabilities, random_density_hs};
use proptest::prelude::*;

const ALPHAS: [f64; 8] = [0.3, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, f64::INFINITY];

fn order(alpha: f64) -> EntropyOrder {
    EntropyOrder::new(alpha).unwrap()
}

fn dist() -> impl Strategy<Value = ProbDist> {
    (2usize..=6)
        .prop_flat_map(|len| prop::collection::vec(0.0f64..1.0, len))
        .prop_filter_map("nonzero mass", |raw| {
            let total: f64 = raw.iter().sum();
            (total > 1e-6).then(|| ProbDist::new(raw.iter().map(|x| x / total).collect::<Vec<_>>()).unwrap())
        })
}

fn two_level() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=8).prop_flat_map(|n| (Just(n), 1..n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn sandwich_between_extremal_families(p in dist(), len_pad in 0usize..=2) {
        let len = (p.len() + len_pad).min(6);
        let c = p.index_of_coincidence();
        for alpha in ALPHAS {
            let o = order(alpha);
            let h = p.entropy(o);
            let hx = extremal_x(len, c).unwrap().entropy(o);
            let hy = extremal_y(len, c).unwrap().entropy(o);
            // (2 - α) decides which family bounds from above
            let sign = if alpha.is_infinite() { -1.0 } else { 2.0 - alpha };
            prop_assert!(sign * h <= sign * hx + 1e-9, "α={alpha}: H={h} x={hx}");
            prop_assert!(sign * h >= sign * hy - 1e-9, "α={alpha}: H={h} y={hy}");
            let range = theorem1_bounds(len, c, o).unwrap();
            prop_assert!(h >= range.lower - 1e-9 && h <= range.upper + 1e-9);
        }
    }

    #[test]
    fn renyi_non_increasing_in_alpha(p in dist()) {
        let values: Vec<f64> = ALPHAS.iter().map(|&a| renyi_entropy(&p, order(a))).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "{values:?}");
        }
    }

    #[test]
    fn two_level_entropy_decreases_in_c((n, n_a) in two_level(), u in 0.02f64..0.98, v in 0.02f64..0.98) {
        prop_assume!((u - v).abs() > 1e-3);
        let (lo, hi) = (1.0 / n as f64, 1.0 / n_a as f64);
        let (c1, c2) = (lo + (hi - lo) * u.min(v), lo + (hi - lo) * u.max(v));
        for alpha in ALPHAS {
            let o = order(alpha);
            let h1 = two_level_dist(TwoLevelParams::new(c1, n, n_a).unwrap()).unwrap().entropy(o);
            let h2 = two_level_dist(TwoLevelParams::new(c2, n, n_a).unwrap()).unwrap().entropy(o);
            prop_assert!(h2 < h1, "N={n} N_a={n_a} α={alpha}: H({c1})={h1} H({c2})={h2}");
        }
    }

    #[test]
    fn two_level_curvature_sign((n, n_a) in two_level(), u in 0.05f64..0.95) {
        prop_assume!(2 * n_a >= n);
        let (lo, hi) = (1.0 / n as f64, 1.0 / n_a as f64);
        let c = lo + (hi - lo) * u;
        let h = 1e-4 * (hi - lo);
        for alpha in ALPHAS {
            let o = order(alpha);
            let f = |x: f64| two_level_dist(TwoLevelParams::new(x, n, n_a).unwrap()).unwrap().entropy(o);
            let second = f(c + h) - 2.0 * f(c) + f(c - h);
            if alpha <= 1.0 {
                prop_assert!(second <= 1e-7, "N={n} N_a={n_a} α={alpha} c={c}: {second}");
            } else if alpha >= 2.0 {
                prop_assert!(second >= -1e-7, "N={n} N_a={n_a} α={alpha} c={c}: {second}");
            }
        }
    }

    #[test]
    fn theorem2_dominates_wym(d in 2usize..=9, m_off in 0usize..=8, u in 0.0f64..=1.0) {
        let m = 2 + m_off % d;
        let p = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * u;
        let thm2 = mum_shannon_lower(d, m, 1.0, p).unwrap().value;
        let wym = wym_bound(d, m, p).unwrap().value;
        prop_assert!(thm2 >= wym - 1e-9, "d={d} M={m} P={p}: {thm2} < {wym}");
    }

    #[test]
    fn theorem3_dominates_rastegin(d in 2usize..=10, u in 0.0f64..=1.0, alpha in 2.0f64..8.0) {
        let c = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * u;
        let o = order(alpha);
        let thm3 = theorem3_per_measurement(d, c, o).unwrap();
        let (r1, r2) = rastegin_bounds(d, c, o).unwrap();
        prop_assert!(thm3 >= r1.value - 1e-9 && thm3 >= r2.value - 1e-9, "d={d} c={c} α={alpha}");
    }

    #[test]
    fn mub_subset_index_inequality(d in 2usize..=5, m_off in 0usize..=5, seed in any::<u64>(), rank_off in 0usize..5) {
        let set = mub_set(d).unwrap();
        let m = 1 + m_off % (d + 1);
        let rho = random_density_hs(d, 1 + rank_off % d, seed).unwrap();
        let idx: Vec<usize> = (0..m).collect();
        let total: f64 = set
            .subset(&idx)
            .unwrap()
            .povms()
            .iter()
            .map(|p| probabilities(p, &rho).unwrap().iter().map(|x| x * x).sum::<f64>())
            .sum();
        let cap = rho.purity() + (m as f64 - 1.0) / d as f64;
        prop_assert!(total <= cap + 1e-10);
        if m == d + 1 {
            prop_assert!((total - cap).abs() < 1e-10);
        }
    }

    #[test]
    fn sum_bounds_agree_at_collision_order(d in 2usize..=8, m_off in 0usize..=8, u in 0.0f64..=1.0) {
        let m = 1 + m_off % (d + 1);
        let p = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * u;
        let o = EntropyOrder::COLLISION;
        let thm3 = mum_renyi_lower(d, m, 1.0, p, o).unwrap().value;
        let c = (p + (m as f64 - 1.0) / d as f64) / m as f64;
        let (r1, r2) = rastegin_bounds(d, c, o).unwrap();
        let want = -(m as f64) * c.log2();
        prop_assert!((thm3 - want).abs() < 1e-12);
        prop_assert!((r1.value - want / m as f64).abs() < 1e-12 && (r2.value - want / m as f64).abs() < 1e-12);
    }
}
