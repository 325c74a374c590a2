use std::f64::consts::{E, PI};
use std::sync::atomic::{AtomicU64, Ordering};

use approx::assert_relative_eq;
use proptest::prelude::*;
use rcbbo_core::bbo::{run, BboParams};
use rcbbo_core::model::{DesignCandidate, DesignVariableSpec};
use rcbbo_core::objective::{DiscreteObjective, SpaceObjective};
use rcbbo_core::tuning::benchmark::{ackley, symmetric_grid, DiscreteAckley, ACKLEY_BOUND};
use rcbbo_core::tuning::cache::{load_records, CachedObjective, EvalCache};
use rcbbo_core::tuning::landscape::{landscape, LandscapeAxis, LandscapeConfig, Param};
use rcbbo_core::tuning::{
    average_curve, run_seed, scaled_utility, utility_a, utility_b, utility_c, PerformanceCurve, UtilityReport,
};

/// 9 × 6 × 6 = 324 candidates with a unique minimum, counting evaluations.
struct Bowl {
    spec: DesignVariableSpec,
    calls: AtomicU64,
}

impl Bowl {
    fn new() -> Self {
        let list = |m: usize| (0..m).map(|i| i as f64).collect::<Vec<_>>();
        Bowl {
            spec: DesignVariableSpec::generic(vec![("a".into(), list(9)), ("b".into(), list(6)), ("c".into(), list(6))]),
            calls: AtomicU64::new(0),
        }
    }
}

impl DiscreteObjective for Bowl {
    fn spec(&self) -> &DesignVariableSpec {
        &self.spec
    }

    fn evaluate_candidate(&self, c: &DesignCandidate) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let v = &c.values;
        (v[0] - 4.0).powi(2) + (v[1] - 2.0).powi(2) + 2.0 * (v[2] - 3.0).powi(2)
    }
}

#[test]
fn curve_checkpoints() {
    let a: Vec<f64> = (0..=200).map(|i| 200.0 - i as f64).collect();
    let b: Vec<f64> = (0..=200).map(|i| 100.0 - 0.5 * i as f64).collect();
    let c = average_curve(&[a, b], 14).unwrap();
    assert_eq!(c.values.len(), 15);
    assert_eq!(c.runs, 2);
    assert_relative_eq!(c.interval, 200.0 / 14.0, max_relative = 1e-12);
    // checkpoint 7 is iteration 100: mean of 100 and 50
    assert_eq!(c.values[7], 75.0);
    assert_eq!(c.values[0], 150.0);
    assert_eq!(c.values[14], 0.0);
}

#[test]
fn mismatched_or_empty_histories_are_rejected() {
    assert!(average_curve(&[], 14).is_err());
    assert!(average_curve(&[vec![1.0, 2.0], vec![1.0, 2.0, 3.0]], 14).is_err());
    assert!(average_curve(&[vec![1.0, 2.0]], 0).is_err());
}

#[test]
fn utility_reference_values() {
    assert_eq!(utility_a(&[9.0, 7.0, 5.0]), 5.0);
    assert_eq!(utility_b(&[4.0, 2.0]), 3.0);
    // trapezoid over two intervals: ((10 + 6)/2 + (6 + 4)/2) / 2
    assert_eq!(utility_b(&[10.0, 6.0, 4.0]), 6.5);
    assert_relative_eq!(utility_c(6.0, 8.0, 4.0).unwrap(), 6.4, max_relative = 1e-15);
    assert_eq!(scaled_utility(200.0, 100.0).unwrap(), 50.0);
    assert_eq!(scaled_utility(100.0, 100.0).unwrap(), 100.0);
    assert_eq!(utility_c(6.0, 8.0, f64::INFINITY).unwrap(), 6.0);
    assert!((utility_c(6.0, 8.0, 1e12).unwrap() - 6.0).abs() < 1e-9);
    assert!(scaled_utility(100.0, 200.0).is_err());
}

#[test]
fn report_from_a_curve() {
    let curve = PerformanceCurve {
        values: vec![10.0, 6.0, 4.0],
        runs: 1,
        interval: 1.0,
    };
    let mut r = UtilityReport::from_curve(&curve, 4.0).unwrap();
    assert_eq!(r.f_a, 4.0);
    assert_eq!(r.f_b, 6.5);
    assert_relative_eq!(r.f_c, (4.0 * 4.0 + 6.5) / 5.0, max_relative = 1e-15);
    r.scale(r.f_c / 2.0).unwrap();
    assert_relative_eq!(r.sc_ut.unwrap(), 50.0, max_relative = 1e-12);
}

#[test]
fn ackley_reference_points() {
    assert_eq!(ackley(&[0.0; 16]), 0.0);
    // with every x = 1 the cosine term is e and the result is 20(1 − e^−0.2)
    let want = -20.0 * (-0.2f64).exp() - (2.0 * PI).cos().exp() + 20.0 + E;
    assert_relative_eq!(ackley(&[1.0; 16]), want, max_relative = 1e-12);
    assert_relative_eq!(want, 3.6254, epsilon = 1e-4);
}

#[test]
fn ackley_grid_has_the_origin() {
    let g = symmetric_grid(65, ACKLEY_BOUND);
    assert_eq!(g[32], 0.0);
    assert_relative_eq!(g[64] - g[63], 2.0 * ACKLEY_BOUND / 65.0, max_relative = 1e-12);
    let obj = DiscreteAckley::new(16, 65);
    assert_eq!(obj.spec().len(), 16);
    let centre = obj.spec().candidate_from_indices(vec![32; 16], vec![]);
    assert_eq!(obj.evaluate_candidate(&centre), 0.0);
}

#[test]
fn seeds_are_distinct_per_run_and_cell() {
    let mut seen = std::collections::HashSet::new();
    for cell in 0..20 {
        for r in 0..30 {
            assert!(seen.insert(run_seed(7, cell, r)));
        }
    }
    assert_eq!(run_seed(7, 3, 4), run_seed(7, 3, 4));
    assert_ne!(run_seed(7, 3, 4), run_seed(8, 3, 4));
}

fn small_config(seed: u64) -> LandscapeConfig {
    let mut cfg = LandscapeConfig::new(
        vec![
            LandscapeAxis {
                param: Param::Alpha,
                values: vec![0.7, 0.8, 0.9, 0.99],
            },
            LandscapeAxis {
                param: Param::PopSize,
                values: vec![4.0, 6.0, 8.0, 10.0, 12.0],
            },
        ],
        seed,
    );
    cfg.runs_per_cell = 3;
    cfg.base.max_iterations = 14;
    cfg.intervals = 7;
    cfg
}

#[test]
fn landscape_covers_every_cell() {
    let obj = SpaceObjective::new(Bowl::new());
    let l = landscape(&obj, &small_config(5)).unwrap();
    assert_eq!(l.cells.len(), 20);
    assert_eq!(l.cells[7].coords, vec![0.8, 8.0]);
    let best = l.cells.iter().map(|c| c.utility.f_c).fold(f64::INFINITY, f64::min);
    assert_eq!(l.best_ut, best);
    assert_eq!(l.cells[l.best_cell].utility.sc_ut, Some(100.0));
    for c in &l.cells {
        let sc = c.utility.sc_ut.unwrap();
        assert!(sc > 0.0 && sc <= 100.0 || c.utility.f_c == 0.0);
        assert_eq!(c.curve.len(), 8);
    }
}

#[test]
fn landscape_is_reproducible() {
    let obj = SpaceObjective::new(Bowl::new());
    let a = landscape(&obj, &small_config(5)).unwrap();
    let b = landscape(&obj, &small_config(5)).unwrap();
    assert_eq!(a.cells, b.cells);
    let c = landscape(&obj, &small_config(6)).unwrap();
    assert_ne!(a.cells, c.cells);
}

#[test]
fn run_parameters_follow_axes_and_fixed_values() {
    let mut cfg = small_config(1);
    cfg.fixed.insert(Param::MutProb, 0.35);
    for cell in 0..cfg.cell_count() {
        let coords = cfg.cell_coords(cell);
        for r in 0..5 {
            let p = cfg.run_params(cell, r);
            assert_eq!(p.alpha, coords[0]);
            assert_eq!(p.pop_size as f64, coords[1]);
            assert_eq!(p.mut_prob, 0.35);
            assert!((0.2..0.6).contains(&p.keep_rate));
            assert_eq!(p.seed, run_seed(1, cell as u64, r as u64));
        }
    }
}

#[test]
fn bad_landscape_configs_are_rejected() {
    let obj = SpaceObjective::new(Bowl::new());
    let mut cfg = small_config(1);
    cfg.axes.clear();
    assert!(landscape(&obj, &cfg).is_err());
    let mut cfg = small_config(1);
    cfg.axes[1].param = Param::Alpha;
    assert!(landscape(&obj, &cfg).is_err());
    let mut cfg = small_config(1);
    cfg.fixed.insert(Param::Alpha, 0.9);
    assert!(landscape(&obj, &cfg).is_err());
    assert!("speed".parse::<Param>().is_err());
    assert_eq!("KeepRate".parse::<Param>().unwrap(), Param::KeepRate);
}

#[test]
fn repeated_queries_hit_the_cache() {
    let cache = EvalCache::in_memory();
    let obj = CachedObjective::new(Bowl::new(), &cache);
    let p = BboParams {
        pop_size: 30,
        max_iterations: 20,
        seed: 4,
        ..Default::default()
    };
    let first = run(&obj, p).unwrap();
    let calls = obj.inner().calls.load(Ordering::Relaxed);
    assert_eq!(calls, obj.calls());
    assert!(cache.len() <= 324);
    assert_eq!(cache.len() as u64, calls);
    let second = run(&obj, p).unwrap();
    assert_eq!(first, second);
    assert_eq!(obj.inner().calls.load(Ordering::Relaxed), calls);
}

#[test]
fn cached_values_match_direct_evaluation() {
    let cache = EvalCache::in_memory();
    let cached = CachedObjective::new(Bowl::new(), &cache);
    let plain = SpaceObjective::new(Bowl::new());
    let p = BboParams {
        pop_size: 20,
        max_iterations: 15,
        seed: 8,
        ..Default::default()
    };
    assert_eq!(run(&cached, p).unwrap(), run(&plain, p).unwrap());
}

#[test]
fn genomes_in_one_bin_share_a_record() {
    use rcbbo_core::bbo::Objective;
    let cache = EvalCache::in_memory();
    let obj = CachedObjective::new(Bowl::new(), &cache);
    let v = obj.evaluate_batch(&[vec![0.50, 0.40, 0.55], vec![0.51, 0.41, 0.56], vec![0.5, 0.4, 0.5]]);
    assert_eq!(v[0], v[1]);
    assert_eq!(v[0], v[2]);
    assert_eq!(obj.calls(), 1);
    assert_eq!(cache.len(), 1);
}

#[test]
fn persisted_cache_survives_a_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.csv");
    let bowl = Bowl::new();
    let p = BboParams {
        pop_size: 20,
        max_iterations: 10,
        seed: 2,
        ..Default::default()
    };
    let first_calls;
    {
        let (cache, warn) = EvalCache::open(&path, &bowl.spec).unwrap();
        assert!(warn.is_none());
        let obj = CachedObjective::new(Bowl::new(), &cache);
        run(&obj, p).unwrap();
        first_calls = obj.calls();
        assert!(first_calls > 0);
    }
    let records = load_records(&path, &bowl.spec).unwrap();
    assert_eq!(records.len() as u64, first_calls);
    let (cache, _) = EvalCache::open(&path, &bowl.spec).unwrap();
    assert_eq!(cache.len() as u64, first_calls);
    let obj = CachedObjective::new(Bowl::new(), &cache);
    run(&obj, p).unwrap();
    assert_eq!(obj.calls(), 0);
}

#[test]
fn corrupt_cache_is_rebuilt_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.csv");
    std::fs::write(&path, "not a cache\n1,2\n").unwrap();
    let bowl = Bowl::new();
    let (cache, warn) = EvalCache::open(&path, &bowl.spec).unwrap();
    assert!(warn.is_some());
    assert!(cache.is_empty());
}

fn curve() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..100.0, 2..20)
}

proptest! {
    #[test]
    fn utilities_stay_within_the_curve(c in curve(), z in 1.0f64..50.0) {
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (a, b) = (utility_a(&c), utility_b(&c));
        let u = utility_c(a, b, z).unwrap();
        prop_assert!(lo - 1e-9 <= b && b <= hi + 1e-9);
        prop_assert!(a.min(b) - 1e-9 <= u && u <= a.max(b) + 1e-9);
    }

    #[test]
    fn improving_curves_end_below_their_mean(mut c in curve()) {
        c.sort_by(|x, y| y.total_cmp(x));
        prop_assert!(utility_a(&c) <= utility_b(&c) + 1e-12);
    }

    #[test]
    fn ranking_ignores_the_unit_of_the_objective(cs in prop::collection::vec(curve(), 2..6), k in 0.01f64..100.0) {
        let score = |scale: f64| -> Vec<f64> {
            cs.iter().map(|c| {
                let s: Vec<f64> = c.iter().map(|v| v * scale).collect();
                utility_c(utility_a(&s), utility_b(&s), 4.0).unwrap()
            }).collect()
        };
        let argmin = |v: &[f64]| v.iter().enumerate().fold((0, f64::INFINITY), |a, (i, &x)| if x < a.1 { (i, x) } else { a }).0;
        let base = score(1.0);
        let scaled = score(k);
        prop_assert_eq!(argmin(&base), argmin(&scaled));
        let best = base[argmin(&base)];
        let best_k = scaled[argmin(&scaled)];
        for (u, uk) in base.iter().zip(&scaled) {
            if *u > 0.0 {
                let a = scaled_utility(*u, best).unwrap();
                let b = scaled_utility(*uk, best_k).unwrap();
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn ackley_is_symmetric_and_non_negative(x in prop::collection::vec(-32.768f64..32.768, 1..20)) {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let mut rev = x.clone();
        rev.reverse();
        let f = ackley(&x);
        prop_assert!(f >= 0.0);
        prop_assert!((f - ackley(&neg)).abs() <= 1e-12);
        prop_assert!((f - ackley(&rev)).abs() <= 1e-12);
    }
}
