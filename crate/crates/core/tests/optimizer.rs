use std::f64::consts::PI;

use hecool::optimizer::{
    global_phase_cost, gp_fit, gp_global_search, imfil_minimize, initial_sample_count,
    surrogate_then_local, Objective, OptTrace, NOISE_FLOOR,
};
use hecool::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

fn check_trace(trace: &OptTrace, evals: usize, budget: usize) {
    assert_eq!(trace.len(), evals);
    assert!(trace.len() <= budget);
    assert!(trace.best_so_far.windows(2).all(|w| w[1] <= w[0]));
    for (i, r) in trace.records.iter().enumerate() {
        assert_eq!(r.index, i);
        assert_eq!(trace.best_so_far[i], trace.records[..=i].iter().map(|r| r.value).fold(f64::INFINITY, f64::min));
    }
}

#[test]
fn rastrigin_contract() {
    let bounds = vec![(-5.12, 5.12); 2];
    for seed in 0..5 {
        let mut obj = Objective::new(bounds.clone(), |x| Ok(rastrigin(x))).unwrap();
        let a = surrogate_then_local(&mut obj, 8, 300, seed).unwrap();
        check_trace(&a, obj.eval_count(), 300);
        let mut obj = Objective::new(bounds.clone(), |x| Ok(rastrigin(x))).unwrap();
        let b = surrogate_then_local(&mut obj, 8, 300, seed).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn quadratic_reaches_minimum() {
    let target = [0.4, -1.3, 2.0];
    let f = |x: &[f64]| -> hecool::Result<f64> {
        Ok(x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum())
    };
    let mut obj = Objective::new(vec![(-PI, PI); 3], f).unwrap();
    let trace = surrogate_then_local(&mut obj, 4, 200, 3).unwrap();
    check_trace(&trace, obj.eval_count(), 200);
    let best = trace.best().unwrap();
    assert!(best.value < 1e-3, "{}", best.value);
}

#[test]
fn constant_objective_is_handled() {
    let mut obj = Objective::new(vec![(-1.0, 1.0); 2], |_| Ok(-2.0)).unwrap();
    let trace = surrogate_then_local(&mut obj, 3, 100, 0).unwrap();
    check_trace(&trace, obj.eval_count(), 100);
    assert!(trace.records.iter().all(|r| r.value == -2.0));
}

#[test]
fn global_phase_sizes() {
    assert_eq!(initial_sample_count(5), 4);
    assert_eq!(initial_sample_count(10), 103);
    let mut obj = Objective::new(vec![(-PI, PI); 2], |x| Ok(x[0] * x[0] + x[1] * x[1])).unwrap();
    let res = gp_global_search(&mut obj, 10, 1).unwrap();
    assert!(res.trace.len() >= 103 && res.trace.len() <= global_phase_cost(10));
}

#[test]
fn insufficient_budget_is_an_error() {
    let mut obj = Objective::new(vec![(-1.0, 1.0); 3], |x| Ok(x[0])).unwrap();
    let err = surrogate_then_local(&mut obj, 5, global_phase_cost(5) + 5, 0).unwrap_err();
    assert!(matches!(err.error, Error::InsufficientBudget { .. }));
    assert_eq!(obj.eval_count(), 0);
}

#[test]
fn objective_failure_keeps_partial_trace() {
    let mut calls = 0;
    let mut obj = Objective::new(vec![(-1.0, 1.0)], |x| {
        calls += 1;
        if calls > 6 {
            Err(Error::Objective("backend gone".into()))
        } else {
            Ok(x[0].abs())
        }
    })
    .unwrap();
    let err = surrogate_then_local(&mut obj, 3, 50, 0).unwrap_err();
    assert!(matches!(err.error, Error::Objective(_)));
    assert_eq!(err.partial.len(), 6);
}

#[test]
fn surrogate_beats_plain_imfil_on_rastrigin() {
    let bounds = vec![(-5.12, 5.12); 2];
    let mut combined = Vec::new();
    let mut plain = Vec::new();
    for seed in 0..10u64 {
        let mut obj = Objective::new(bounds.clone(), |x| Ok(rastrigin(x))).unwrap();
        combined.push(surrogate_then_local(&mut obj, 8, 300, seed).unwrap().best().unwrap().value);
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let x0: Vec<f64> = bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
        let mut obj = Objective::new(bounds.clone(), |x| Ok(rastrigin(x))).unwrap();
        plain.push(imfil_minimize(&mut obj, &x0, None, 300, seed).unwrap().best().unwrap().value);
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        (v[4] + v[5]) / 2.0
    };
    let (a, b) = (median(&mut combined), median(&mut plain));
    assert!(a < b, "surrogate+local {a} vs imfil {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gp_interpolates_training_data(
        pts in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -3.0..3.0f64), 3..12),
    ) {
        // drop near-duplicate inputs so interpolation is well posed
        let mut xs: Vec<Vec<f64>> = Vec::new();
        let mut ys = Vec::new();
        for (a, b, y) in pts {
            if xs.iter().all(|x| (x[0] - a).abs() + (x[1] - b).abs() > 0.2) {
                xs.push(vec![a, b]);
                ys.push(y);
            }
        }
        prop_assume!(xs.len() >= 2);
        let gp = gp_fit(&xs, &ys, &[(-2.0, 2.0), (-2.0, 2.0)], NOISE_FLOOR).unwrap();
        let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs())).max(1.0);
        for (x, y) in xs.iter().zip(&ys) {
            let (m, v) = gp.predict(x);
            prop_assert!((m - y).abs() < 1e-3 * scale, "{m} vs {y}");
            prop_assert!(v < 1e-3 * scale * scale);
        }
    }

    #[test]
    fn imfil_trace_is_well_formed(
        seed in any::<u64>(),
        x0 in prop::collection::vec(-1.0..1.0f64, 3),
        budget in 6usize..80,
    ) {
        let mut obj = Objective::new(vec![(-1.0, 1.0); 3], |x| {
            Ok(x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 0.2).powi(2)).sum())
        })
        .unwrap();
        let trace = imfil_minimize(&mut obj, &x0, None, budget, seed).unwrap();
        prop_assert_eq!(trace.len(), obj.eval_count());
        prop_assert!(trace.len() <= budget);
        prop_assert!(trace.best_so_far.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(trace.records.iter().all(|r| r.params.iter().all(|p| (-1.0..=1.0).contains(p))));
    }
}
