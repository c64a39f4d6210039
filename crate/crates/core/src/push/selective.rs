use super::ledger::{
    Phase, PhaseTrace, PushOutcome, ResidueLedger, RoundObserver, RoundRecord, Termination,
};
use crate::graph::BipartiteGraph;

/// Plain selective backward push toward `target`.
///
/// Rounds alternate a U-side push of every node whose residue is strictly
/// above `epsilon_b` with a full V-side flush, until no U residue exceeds
/// `epsilon_b`. On return `π(u_i, target) − estimate[u_i] ∈ [0, ε_b]`.
pub fn selective_push(g: &BipartiteGraph, target: usize, alpha: f64, epsilon_b: f64) -> PushOutcome {
    selective_push_observed(g, target, alpha, epsilon_b, &mut ())
}

pub fn selective_push_observed(
    g: &BipartiteGraph,
    target: usize,
    alpha: f64,
    epsilon_b: f64,
    observer: &mut impl RoundObserver,
) -> PushOutcome {
    check_params(alpha, epsilon_b);
    let mut ledger = ResidueLedger::new(g, target);
    ledger.requeue(g, |_| epsilon_b);
    let mut trace = PhaseTrace::default();
    while !ledger.queue_is_empty() {
        ledger.selective_round(g, alpha, |_| epsilon_b);
        trace.selective_rounds += 1;
        report(observer, Phase::Selective, trace.selective_rounds, &ledger);
    }
    trace.pushes = ledger.pushes;
    PushOutcome { ledger, trace, terminated_by: Termination::ThresholdMet }
}

/// Selective pushes that fall back to sequential full-graph rounds once
/// the push count `n_p` reaches `2|E|·log_{1/(1-α)}(1/Σ r(u_i))`.
///
/// The sequential phase stops when every U residue is at most `ε_b` or
/// their sum is. Either way `π(u_i, target) − estimate[u_i] ∈ [0, ε_b]`.
pub fn ss_push(g: &BipartiteGraph, target: usize, alpha: f64, epsilon_b: f64) -> PushOutcome {
    ss_push_observed(g, target, alpha, epsilon_b, &mut ())
}

pub fn ss_push_observed(
    g: &BipartiteGraph,
    target: usize,
    alpha: f64,
    epsilon_b: f64,
    observer: &mut impl RoundObserver,
) -> PushOutcome {
    check_params(alpha, epsilon_b);
    let mut ledger = ResidueLedger::new(g, target);
    ledger.requeue(g, |_| epsilon_b);
    let mut trace = PhaseTrace::default();
    let two_m = 2.0 * g.edge_count() as f64;
    let log_base = (1.0 / (1.0 - alpha)).ln();

    loop {
        ledger.selective_round(g, alpha, |_| epsilon_b);
        trace.selective_rounds += 1;
        report(observer, Phase::Selective, trace.selective_rounds, &ledger);
        if ledger.queue_is_empty() {
            trace.pushes = ledger.pushes;
            return PushOutcome { ledger, trace, terminated_by: Termination::ThresholdMet };
        }
        let mass = ledger.tracked_mass_u();
        // A vanished mass means an unbounded budget; the empty queue above
        // then ends the phase.
        if mass > 0.0 {
            let budget = two_m * (1.0 / mass).ln() / log_base;
            if ledger.pushes as f64 >= budget {
                break;
            }
        }
    }

    ledger.resync_mass(g);
    let mut round = 0;
    loop {
        let mass = ledger.tracked_mass_u();
        let above = ledger.residue_u.iter().any(|&r| r > epsilon_b);
        if !above || mass <= epsilon_b {
            break;
        }
        ledger.sequential_round(g, alpha);
        round += 1;
        trace.sequential_rounds += 1;
        report(observer, Phase::Sequential, round, &ledger);
    }
    trace.pushes = ledger.pushes;
    PushOutcome { ledger, trace, terminated_by: Termination::BudgetSwitch }
}

pub(crate) fn check_params(alpha: f64, epsilon: f64) {
    assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1], got {alpha}");
    assert!(epsilon > 0.0, "error threshold must be positive, got {epsilon}");
}

pub(crate) fn report(
    observer: &mut impl RoundObserver,
    phase: Phase,
    round: u64,
    ledger: &ResidueLedger,
) {
    let record = RoundRecord {
        phase,
        round,
        pushes: ledger.pushes,
        residue_mass: ledger.tracked_mass_u(),
    };
    observer.on_round(&record, ledger);
}
