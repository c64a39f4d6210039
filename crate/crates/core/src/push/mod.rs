//! Residue push and power-iteration kernels on the hidden U-to-U graph.

mod ledger;
mod pi_push;
mod power;
mod selective;

pub use ledger::{
    Phase, PhaseTrace, PushOutcome, ResidueLedger, RoundObserver, RoundRecord, Termination,
    TraceRecorder,
};
pub use pi_push::{pi_push, pi_push_observed, rescale, ForwardOutcome};
pub use power::{hidden_steps, power_iteration, required_iterations};
pub use selective::{selective_push, selective_push_observed, ss_push, ss_push_observed};

#[cfg(test)]
mod tests;
