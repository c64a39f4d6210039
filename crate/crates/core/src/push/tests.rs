use super::*;
use crate::graph::fixtures::{build, g2, g3};
use crate::oracle::{exact_hpp, DenseHpp};
use crate::testutil::random_graph;

const ALPHA: f64 = 0.15;

/// `π(u_i, t) − estimate[u_i] − Σ_j π(u_i, u_j)·r(u_j)` over all `u_i`.
fn lemma_gap(d: &DenseHpp, ledger: &ResidueLedger) -> f64 {
    let t = ledger.target();
    let n = ledger.estimate().len();
    (0..n)
        .map(|i| {
            let carried: f64 = (0..n).map(|j| d.get(i, j) * ledger.residue_u()[j]).sum();
            (d.get(i, t) - ledger.estimate()[i] - carried).abs()
        })
        .fold(0.0, f64::max)
}

fn assert_backward_bound(d: &DenseHpp, out: &PushOutcome, eps: f64) {
    let t = out.ledger.target();
    for (i, &est) in out.estimate().iter().enumerate() {
        let gap = d.get(i, t) - est;
        assert!(gap >= -1e-12 && gap <= eps, "node {i}: gap {gap} outside [0, {eps}]");
    }
}

#[test]
fn selective_threshold_is_strict() {
    let out = selective_push(&g2(), 0, ALPHA, 1.0);
    assert_eq!(out.estimate(), [0.0, 0.0]);
    assert_eq!(out.ledger.residue_u(), [1.0, 0.0]);
    assert_eq!(out.trace.pushes, 0);
}

#[test]
fn selective_on_g2_reaches_closed_form() {
    let out = selective_push(&g2(), 0, ALPHA, 1e-8);
    assert!((out.estimate()[0] - 0.575).abs() <= 1e-8);
    assert!((out.estimate()[1] - 0.425).abs() <= 1e-8);
    assert_eq!(out.terminated_by, Termination::ThresholdMet);
}

#[test]
fn selective_bound_on_random_graphs() {
    for seed in 0..10 {
        let g = random_graph(50, 50, seed);
        let d = exact_hpp(&g, ALPHA, 1e-15).unwrap();
        for target in [0, g.u_count() / 2, g.u_count() - 1] {
            for eps in [1e-2, 1e-4, 1e-6] {
                assert_backward_bound(&d, &selective_push(&g, target, ALPHA, eps), eps);
            }
        }
    }
}

#[test]
fn ss_push_large_threshold_returns_immediately() {
    let g = random_graph(10, 30, 4);
    let out = ss_push(&g, 3, ALPHA, 1.0);
    assert!(out.estimate().iter().all(|&x| x == 0.0));
    assert_eq!(out.ledger.residue_u()[3], 1.0);
    assert_eq!(out.ledger.residue_mass(), 1.0);
    assert_eq!(out.terminated_by, Termination::ThresholdMet);
}

#[test]
fn ss_push_on_g3_matches_dense_column() {
    let g = g3();
    let d = exact_hpp(&g, ALPHA, 1e-15).unwrap();
    let out = ss_push(&g, 1, ALPHA, 1e-7);
    assert_backward_bound(&d, &out, 1e-7);
}

#[test]
fn ss_push_bound_on_random_graphs() {
    for seed in 10..20 {
        let g = random_graph(20, 80, seed);
        let d = exact_hpp(&g, ALPHA, 1e-15).unwrap();
        for eps in [1e-3, 1e-5, 1e-7] {
            let out = ss_push(&g, seed as usize % g.u_count(), ALPHA, eps);
            assert_backward_bound(&d, &out, eps);
        }
    }
}

#[test]
fn ss_push_switches_and_saves_work() {
    let g = random_graph(20, 200, 42);
    let (target, eps) = (134, 1e-4);
    let ss = ss_push(&g, target, ALPHA, eps);
    let sel = selective_push(&g, target, ALPHA, eps);
    assert_eq!(ss.terminated_by, Termination::BudgetSwitch);
    assert!(ss.trace.sequential_rounds > 0);
    assert!(ss.trace.pushes < sel.trace.pushes, "ss-push {} vs selective {}", ss.trace.pushes, sel.trace.pushes);
    let d = exact_hpp(&g, ALPHA, 1e-15).unwrap();
    assert_backward_bound(&d, &ss, eps);
    assert_backward_bound(&d, &sel, eps);
}

#[test]
fn uniform_star_matches_selective() {
    // Equal residues everywhere: the sequential phase pushes exactly what a
    // selective round would.
    let edges: Vec<(u32, u32, f64)> = (0..100).map(|u| (u, 0, 1.0)).collect();
    let g = build(100, 1, &edges);
    let ss = ss_push(&g, 0, ALPHA, 1e-6);
    let sel = selective_push(&g, 0, ALPHA, 1e-6);
    assert_eq!(ss.trace.pushes, sel.trace.pushes);
    assert_eq!(ss.estimate(), sel.estimate());
}

#[test]
fn residual_identity_holds_every_round() {
    for seed in 0..6 {
        let g = random_graph(5, 40, 100 + seed);
        let d = exact_hpp(&g, ALPHA, 1e-15).unwrap();
        let target = seed as usize % g.u_count();
        let mut worst = 0.0f64;
        let mut rounds = 0;
        let mut check = |_: &RoundRecord, l: &ResidueLedger| {
            assert!(l.is_flushed());
            worst = worst.max(lemma_gap(&d, l));
            rounds += 1;
        };
        selective_push_observed(&g, target, ALPHA, 1e-5, &mut check);
        ss_push_observed(&g, target, ALPHA, 1e-6, &mut check);
        assert!(rounds > 0);
        assert!(worst < 1e-9, "identity violated by {worst}");
    }
}

#[test]
fn estimates_grow_and_weighted_mass_shrinks() {
    for seed in 0..6 {
        let g = random_graph(10, 60, 200 + seed);
        let mut prev_est = vec![0.0; g.u_count()];
        let mut prev_mass = f64::INFINITY;
        let mut prev_pushes = 0;
        let mut check = |r: &RoundRecord, l: &ResidueLedger| {
            for (p, &e) in prev_est.iter_mut().zip(l.estimate()) {
                assert!(e >= *p && e >= 0.0);
                *p = e;
            }
            assert!(l.residue_u().iter().all(|&x| x >= 0.0));
            let mass = l.degree_weighted_mass(&g);
            assert!(mass <= prev_mass * (1.0 + 1e-12));
            prev_mass = mass;
            assert!(r.pushes >= prev_pushes);
            prev_pushes = r.pushes;
        };
        ss_push_observed(&g, 0, ALPHA, 1e-6, &mut check);
    }
}

#[test]
fn plain_residue_mass_can_grow() {
    // The target's heavy edge feeds a hub whose other neighbors have no other
    // edges: each of them receives the hub's full residue.
    let mut edges: Vec<(u32, u32, f64)> = (1..100).map(|u| (u, 0, 1.0)).collect();
    edges.push((0, 0, 10.0));
    let g = build(100, 1, &edges);
    let mut masses = Vec::new();
    selective_push_observed(&g, 0, ALPHA, 1e-3, &mut |_: &RoundRecord, l: &ResidueLedger| {
        masses.push(l.residue_mass());
    });
    assert!(masses[0] > 1.0, "first-round mass {}", masses[0]);
}

#[test]
fn pi_push_from_drained_seed_is_rescaled_backward() {
    let g = g2();
    let mut seed = ss_push(&g, 0, ALPHA, 1e-9).ledger;
    seed.residue_u.iter_mut().for_each(|r| *r = 0.0);
    let out = pi_push(&g, 0, ALPHA, 1.0, 1e-6, &seed).unwrap();
    assert_eq!(out.estimate, seed.estimate());
    assert_eq!(out.terminated_by, Termination::MassDrained);
    assert_eq!(out.gamma, 0.0);
}

#[test]
fn forward_residue_rescaling_on_g3() {
    let g = g3();
    assert_eq!((g.ws_u(0), g.ws_u(1)), (2.0, 1.0));
    let fwd = rescale(&[0.0, 0.3], g.ws_u_all(), g.ws_u(0));
    assert_eq!(fwd, vec![0.0, 0.15]);
}

#[test]
fn pi_push_rejects_unflushed_ledger() {
    let g = g3();
    let mut seed = ResidueLedger::new(&g, 0);
    seed.residue_v[1] = 0.25;
    assert!(matches!(pi_push(&g, 0, ALPHA, 1.0, 1e-3, &seed), Err(crate::Error::UnflushedLedger)));
}

#[test]
fn pi_push_rejects_mismatched_source() {
    let g = g3();
    let seed = ss_push(&g, 0, ALPHA, 1e-3).ledger;
    assert!(pi_push(&g, 1, ALPHA, 1.0, 1e-3, &seed).is_err());
}

#[test]
fn forward_identity_holds_during_pi_push() {
    for seed in 0..6 {
        let g = random_graph(5, 40, 300 + seed);
        let d = exact_hpp(&g, ALPHA, 1e-15).unwrap();
        let lambda = d.max_column_sum();
        let u = seed as usize % g.u_count();
        let backward = ss_push(&g, u, ALPHA, 1e-2);
        let ws = g.ws_u_all();
        let mut worst = 0.0f64;
        let mut check = |r: &RoundRecord, l: &ResidueLedger| {
            if r.phase != Phase::ForwardSelective {
                return;
            }
            let est = rescale(l.estimate(), ws, ws[u]);
            let res = rescale(l.residue_u(), ws, ws[u]);
            for i in 0..est.len() {
                let carried: f64 = (0..est.len()).map(|j| res[j] * d.get(j, i)).sum();
                worst = worst.max((d.get(u, i) - est[i] - carried).abs());
            }
        };
        let out =
            pi_push_observed(&g, u, ALPHA, lambda, 1e-6, &backward.ledger, &mut check).unwrap();
        assert!(worst < 1e-9, "forward identity off by {worst}");
        for i in 0..g.u_count() {
            let gap = d.get(u, i) - out.estimate[i];
            assert!((-1e-12..=1e-6).contains(&gap), "gap {gap}");
        }
    }
}

#[test]
fn pi_push_bound_on_random_graphs() {
    for seed in 0..8 {
        let g = random_graph(20, 100, 400 + seed);
        let d = exact_hpp(&g, ALPHA, 1e-15).unwrap();
        let lambda = d.max_column_sum();
        for (eps_b, eps_f) in [(1e-2, 1e-3), (1e-4, 1e-5), (1e-3, 1e-7)] {
            let u = (seed as usize * 7) % g.u_count();
            let backward = ss_push(&g, u, ALPHA, eps_b);
            let out = pi_push(&g, u, ALPHA, lambda, eps_f, &backward.ledger).unwrap();
            for i in 0..g.u_count() {
                let gap = d.get(u, i) - out.estimate[i];
                assert!(gap >= -1e-12 && gap <= eps_f, "gap {gap} > {eps_f}");
            }
        }
    }
}

#[test]
fn trace_records_serialize_as_json_lines() {
    let g = random_graph(10, 20, 9);
    let mut rec = TraceRecorder::default();
    ss_push_observed(&g, 0, ALPHA, 1e-4, &mut rec);
    let mut buf = Vec::new();
    rec.write_json_lines(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), rec.records.len());
    let first: RoundRecord = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first, rec.records[0]);
    assert!(text.contains("\"phase\":\"selective\""));
}
