use crate::graph::BipartiteGraph;

/// Truncated hidden-graph PageRank series `α · Σ_{ℓ=0..t} (1-α)^ℓ · e·P^ℓ`.
///
/// Each iteration applies `P = U·V` as two sparse gathers,
/// `x = π·U` over V then `π·P = x·V` over U, so `P` is never formed and an
/// iteration costs `O(|E|)`.
pub fn power_iteration(g: &BipartiteGraph, e: &[f64], alpha: f64, t: usize) -> Vec<f64> {
    assert_eq!(e.len(), g.u_count(), "initial vector must cover U");
    let mut pi = e.to_vec();
    let mut via_v = vec![0.0; g.v_count()];
    let mut next = vec![0.0; g.u_count()];
    for _ in 0..t {
        step_into(g, &pi, &mut via_v, &mut next);
        for (n, &ei) in next.iter_mut().zip(e) {
            *n = ei + (1.0 - alpha) * *n;
        }
        std::mem::swap(&mut pi, &mut next);
    }
    for x in &mut pi {
        *x *= alpha;
    }
    pi
}

/// `x·P^steps`, one hidden step at a time.
pub fn hidden_steps(g: &BipartiteGraph, x: &[f64], steps: usize) -> Vec<f64> {
    let mut cur = x.to_vec();
    let mut via_v = vec![0.0; g.v_count()];
    let mut next = vec![0.0; g.u_count()];
    for _ in 0..steps {
        step_into(g, &cur, &mut via_v, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// `out = pi·U·V`.
fn step_into(g: &BipartiteGraph, pi: &[f64], via_v: &mut [f64], out: &mut [f64]) {
    for (v, slot) in via_v.iter_mut().enumerate() {
        let (targets, probs) = g.v_adj_probs(v);
        *slot = targets.iter().zip(probs).map(|(&u, &p)| pi[u as usize] * p).sum();
    }
    for (u, slot) in out.iter_mut().enumerate() {
        let (targets, probs) = g.u_adj_probs(u);
        *slot = targets.iter().zip(probs).map(|(&v, &p)| via_v[v as usize] * p).sum();
    }
}

/// Smallest `t ≥ 0` whose truncation tail `mass·(1-α)^{t+1}` is at most
/// `epsilon_f`, i.e. `max(0, ⌈log_{1/(1-α)}(mass/ε_f) − 1⌉)`.
pub fn required_iterations(alpha: f64, epsilon_f: f64, mass: f64) -> usize {
    assert!(epsilon_f > 0.0 && mass >= 0.0, "epsilon_f must be positive, mass non-negative");
    if mass <= epsilon_f {
        return 0;
    }
    let x = (mass / epsilon_f).ln() / (1.0 / (1.0 - alpha)).ln() - 1.0;
    let mut t = x.ceil().max(0.0) as usize;
    // Guard against the logarithm rounding one ulp low.
    while mass * (1.0 - alpha).powi(t as i32 + 1) > epsilon_f {
        t += 1;
    }
    t
}
