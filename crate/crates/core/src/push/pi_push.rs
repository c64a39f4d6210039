use super::ledger::{Phase, PhaseTrace, ResidueLedger, RoundObserver, Termination};
use super::power::{power_iteration, required_iterations};
use super::selective::{check_params, report};
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

/// Result of the forward refinement for one source node.
#[derive(Debug, Clone)]
pub struct ForwardOutcome {
    /// `→π(source, u_i)` for every `u_i`.
    pub estimate: Vec<f64>,
    /// `γ = Σ_i ws(u_i)/ws(source) · r(u_i)` of the seed ledger.
    pub gamma: f64,
    /// Backward ledger after the forward-threshold pushes.
    pub ledger: ResidueLedger,
    pub trace: PhaseTrace,
    pub terminated_by: Termination,
}

/// Turns a flushed backward ledger toward `source` into forward estimates
/// `→π(source, ·)` with additive error at most `epsilon_f`.
///
/// Backward pushes continue with the per-node threshold
/// `ws(source)/ws(u_i) · ε_f/λ`. If every residue gets under its threshold,
/// the estimates are rescaled by `ws(u_i)/ws(source)`. If instead the push
/// count reaches `2|E|·log_{1/(1-α)}(γ / Σ_i ws(u_i)/ws(source)·r(u_i))`,
/// the rescaled residues seed a power iteration that finishes the job.
///
/// `lambda` must bound every column sum `Σ_j π(u_j, u_i)` from above.
pub fn pi_push(
    g: &BipartiteGraph,
    source: usize,
    alpha: f64,
    lambda: f64,
    epsilon_f: f64,
    seed: &ResidueLedger,
) -> Result<ForwardOutcome> {
    pi_push_observed(g, source, alpha, lambda, epsilon_f, seed, &mut ())
}

pub fn pi_push_observed(
    g: &BipartiteGraph,
    source: usize,
    alpha: f64,
    lambda: f64,
    epsilon_f: f64,
    seed: &ResidueLedger,
    observer: &mut impl RoundObserver,
) -> Result<ForwardOutcome> {
    check_params(alpha, epsilon_f);
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    g.check_u(source)?;
    if seed.target() != source {
        return Err(Error::InvalidParameter(format!(
            "seed ledger targets node {}, not {source}",
            seed.target()
        )));
    }
    if !seed.is_flushed() {
        return Err(Error::UnflushedLedger);
    }

    let ws_source = g.ws_u(source);
    let ws = g.ws_u_all();
    let scaled = epsilon_f / lambda;
    let thresholds: Vec<f64> = ws.iter().map(|w| ws_source / w * scaled).collect();
    let threshold = |u: usize| thresholds[u];

    let mut ledger = seed.clone();
    ledger.reset_pushes();
    ledger.requeue(g, threshold);
    let gamma = ledger.tracked_weighted_mass_u() / ws_source;
    let mut trace = PhaseTrace::default();

    if gamma == 0.0 {
        let estimate = rescale(&ledger.estimate, ws, ws_source);
        return Ok(ForwardOutcome {
            estimate,
            gamma,
            ledger,
            trace,
            terminated_by: Termination::MassDrained,
        });
    }

    let two_m = 2.0 * g.edge_count() as f64;
    let log_base = (1.0 / (1.0 - alpha)).ln();
    loop {
        ledger.selective_round(g, alpha, threshold);
        trace.selective_rounds += 1;
        trace.pushes = ledger.pushes;
        report(observer, Phase::ForwardSelective, trace.selective_rounds, &ledger);
        if ledger.queue_is_empty() {
            let estimate = rescale(&ledger.estimate, ws, ws_source);
            return Ok(ForwardOutcome {
                estimate,
                gamma,
                ledger,
                trace,
                terminated_by: Termination::ThresholdMet,
            });
        }
        let current = ledger.tracked_weighted_mass_u() / ws_source;
        if current > 0.0 {
            let budget = two_m * (gamma / current).ln() / log_base;
            if ledger.pushes as f64 >= budget {
                break;
            }
        }
    }

    let mut estimate = rescale(&ledger.estimate, ws, ws_source);
    let forward_residue = rescale(&ledger.residue_u, ws, ws_source);
    let mass: f64 = forward_residue.iter().sum();
    let t = required_iterations(alpha, epsilon_f, mass);
    let refined = power_iteration(g, &forward_residue, alpha, t);
    for (e, p) in estimate.iter_mut().zip(&refined) {
        *e += p;
    }
    trace.power_iterations = t as u64;
    report(observer, Phase::Power, t as u64, &ledger);
    Ok(ForwardOutcome { estimate, gamma, ledger, trace, terminated_by: Termination::BudgetSwitch })
}

/// `x[u_i] · ws(u_i) / ws(source)`.
pub fn rescale(x: &[f64], ws: &[f64], ws_source: f64) -> Vec<f64> {
    x.iter().zip(ws).map(|(v, w)| w / ws_source * v).collect()
}
