use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::BipartiteGraph;

/// Live state of a backward push computation toward one target node.
///
/// `estimate[u_i]` approximates `π(u_i, target)`; unconverted mass sits in
/// the residues. Between rounds all V-side residues are zero.
#[derive(Debug, Clone)]
pub struct ResidueLedger {
    pub(crate) target: usize,
    pub(crate) residue_u: Vec<f64>,
    pub(crate) residue_v: Vec<f64>,
    pub(crate) estimate: Vec<f64>,
    pub(crate) pushes: u64,
    /// Running `Σ r(u_i)` and `Σ ws(u_i)·r(u_i)`, resynchronised by
    /// [`Self::resync_mass`].
    mass_u: f64,
    weighted_mass_u: f64,
    active_u: VecDeque<u32>,
    queued_u: Vec<bool>,
    active_v: Vec<u32>,
    queued_v: Vec<bool>,
}

/// What a single round did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct RoundStats {
    pub(crate) u_pushed: usize,
}

impl ResidueLedger {
    /// Unit residue at `target`, everything else zero.
    pub fn new(g: &BipartiteGraph, target: usize) -> Self {
        let mut residue_u = vec![0.0; g.u_count()];
        residue_u[target] = 1.0;
        Self {
            target,
            residue_u,
            residue_v: vec![0.0; g.v_count()],
            estimate: vec![0.0; g.u_count()],
            pushes: 0,
            mass_u: 1.0,
            weighted_mass_u: g.ws_u(target),
            active_u: VecDeque::new(),
            queued_u: vec![false; g.u_count()],
            active_v: Vec::new(),
            queued_v: vec![false; g.v_count()],
        }
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn residue_u(&self) -> &[f64] {
        &self.residue_u
    }

    pub fn residue_v(&self) -> &[f64] {
        &self.residue_v
    }

    pub fn estimate(&self) -> &[f64] {
        &self.estimate
    }

    /// Neighbor touches performed so far.
    pub fn pushes(&self) -> u64 {
        self.pushes
    }

    pub fn residue_mass_u(&self) -> f64 {
        self.residue_u.iter().sum()
    }

    pub fn residue_mass(&self) -> f64 {
        self.residue_mass_u() + self.residue_v.iter().sum::<f64>()
    }

    /// `Σ_i ws(u_i) · r(u_i)`.
    pub fn degree_weighted_mass(&self, g: &BipartiteGraph) -> f64 {
        self.residue_u.iter().zip(g.ws_u_all()).map(|(r, w)| r * w).sum()
    }

    pub fn is_flushed(&self) -> bool {
        self.residue_v.iter().all(|&r| r == 0.0)
    }

    /// Running U-side residue mass, exact up to rounding drift.
    pub(crate) fn tracked_mass_u(&self) -> f64 {
        self.mass_u.max(0.0)
    }

    pub(crate) fn tracked_weighted_mass_u(&self) -> f64 {
        self.weighted_mass_u.max(0.0)
    }

    pub(crate) fn resync_mass(&mut self, g: &BipartiteGraph) {
        self.mass_u = self.residue_mass_u();
        self.weighted_mass_u = self.degree_weighted_mass(g);
    }

    pub(crate) fn reset_pushes(&mut self) {
        self.pushes = 0;
    }

    /// Rebuilds the U work queue from scratch under a new threshold.
    pub(crate) fn requeue(&mut self, g: &BipartiteGraph, threshold: impl Fn(usize) -> f64) {
        self.resync_mass(g);
        self.active_u.clear();
        self.queued_u.iter_mut().for_each(|q| *q = false);
        for (u, &r) in self.residue_u.iter().enumerate() {
            if r > threshold(u) {
                self.active_u.push_back(u as u32);
                self.queued_u[u] = true;
            }
        }
    }

    /// True when no U-node's residue exceeds the threshold the queue was
    /// built with.
    pub(crate) fn queue_is_empty(&self) -> bool {
        self.active_u.is_empty()
    }

    /// One selective round: push every queued U-node whose residue exceeds
    /// its threshold, then flush all V residues back to U.
    pub(crate) fn selective_round(
        &mut self,
        g: &BipartiteGraph,
        alpha: f64,
        threshold: impl Fn(usize) -> f64,
    ) -> RoundStats {
        let mut stats = RoundStats::default();
        let batch = self.active_u.len();
        for _ in 0..batch {
            let u = self.active_u.pop_front().expect("queue length checked") as usize;
            self.queued_u[u] = false;
            if self.residue_u[u] > threshold(u) {
                self.push_u(g, u, alpha);
                stats.u_pushed += 1;
            }
        }
        self.flush_v(g, Some(threshold));
        stats
    }

    /// One sequential round: push every U-node with positive residue, then
    /// flush all V residues. Leaves the work queue empty.
    pub(crate) fn sequential_round(&mut self, g: &BipartiteGraph, alpha: f64) -> RoundStats {
        let mut stats = RoundStats::default();
        self.active_u.clear();
        self.queued_u.iter_mut().for_each(|q| *q = false);
        for u in 0..g.u_count() {
            if self.residue_u[u] > 0.0 {
                self.push_u(g, u, alpha);
                stats.u_pushed += 1;
            }
        }
        self.flush_v(g, None::<fn(usize) -> f64>);
        self.resync_mass(g);
        stats
    }

    #[inline]
    fn push_u(&mut self, g: &BipartiteGraph, u: usize, alpha: f64) {
        let r = self.residue_u[u];
        self.estimate[u] += alpha * r;
        self.residue_u[u] = 0.0;
        self.mass_u -= r;
        self.weighted_mass_u -= g.ws_u(u) * r;
        let spread = (1.0 - alpha) * r;
        let (targets, probs) = g.u_adj_probs(u);
        for (&v, &p) in targets.iter().zip(probs) {
            let v = v as usize;
            self.residue_v[v] += spread * p;
            if !self.queued_v[v] {
                self.queued_v[v] = true;
                self.active_v.push(v as u32);
            }
        }
        self.pushes += targets.len() as u64;
    }

    /// Moves every V residue back to U. With a threshold, U-nodes raised
    /// above it are queued for the next round.
    fn flush_v(&mut self, g: &BipartiteGraph, threshold: Option<impl Fn(usize) -> f64>) {
        let Self { residue_u, residue_v, queued_u, active_u, active_v, queued_v, .. } = self;
        let mut gained_total = 0.0;
        let mut weighted_total = 0.0;
        let mut touches = 0u64;
        for &v in active_v.iter() {
            let v = v as usize;
            queued_v[v] = false;
            let r = std::mem::take(&mut residue_v[v]);
            if r <= 0.0 {
                continue;
            }
            let (targets, probs) = g.v_adj_probs(v);
            for (&u, &p) in targets.iter().zip(probs) {
                let u = u as usize;
                let delta = p * r;
                let raised = residue_u[u] + delta;
                residue_u[u] = raised;
                gained_total += delta;
                if let Some(threshold) = &threshold {
                    if !queued_u[u] && raised > threshold(u) {
                        queued_u[u] = true;
                        active_u.push_back(u as u32);
                    }
                }
            }
            // Σ_j ws(u_j)·w(u_j,v)/ws(u_j)·r = ws(v)·r
            weighted_total += g.ws_v(v) * r;
            touches += targets.len() as u64;
        }
        active_v.clear();
        self.mass_u += gained_total;
        self.weighted_mass_u += weighted_total;
        self.pushes += touches;
    }
}

/// Where a push computation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// Every residue fell to its threshold during the selective phase.
    ThresholdMet,
    /// The push budget ran out and the fallback phase finished the job.
    BudgetSwitch,
    /// No residue mass was left at all.
    MassDrained,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTrace {
    pub selective_rounds: u64,
    pub sequential_rounds: u64,
    pub power_iterations: u64,
    /// Neighbor touches across all phases, power iterations excluded.
    pub pushes: u64,
}

#[derive(Debug, Clone)]
pub struct PushOutcome {
    pub ledger: ResidueLedger,
    pub trace: PhaseTrace,
    pub terminated_by: Termination,
}

impl PushOutcome {
    pub fn estimate(&self) -> &[f64] {
        &self.ledger.estimate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Selective,
    Sequential,
    ForwardSelective,
    Power,
}

/// One line of the per-round trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub phase: Phase,
    pub round: u64,
    pub pushes: u64,
    pub residue_mass: f64,
}

/// Called at every round boundary, when V-side residues are zero.
pub trait RoundObserver {
    fn on_round(&mut self, record: &RoundRecord, ledger: &ResidueLedger);
}

impl RoundObserver for () {
    fn on_round(&mut self, _: &RoundRecord, _: &ResidueLedger) {}
}

impl<F: FnMut(&RoundRecord, &ResidueLedger)> RoundObserver for F {
    fn on_round(&mut self, record: &RoundRecord, ledger: &ResidueLedger) {
        self(record, ledger)
    }
}

/// Collects round records, e.g. for writing a JSON-lines trace.
#[derive(Debug, Default, Clone)]
pub struct TraceRecorder {
    pub records: Vec<RoundRecord>,
}

impl RoundObserver for TraceRecorder {
    fn on_round(&mut self, record: &RoundRecord, _: &ResidueLedger) {
        self.records.push(*record);
    }
}

impl TraceRecorder {
    pub fn write_json_lines<W: std::io::Write>(&self, mut out: W) -> crate::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}
