//! Exact gate-level tools for the discrete Fourier transform on a qubit
//! register, in two interchangeable forms: the fully coherent gate array,
//! and the measurement-driven form in which every two-qubit conditional
//! phase is replaced by a mid-circuit measurement feeding classically
//! controlled one-qubit gates.
//!
//! The pieces:
//!
//! - [`phase::DyadicPhase`] — phases as exact fractions `k/2^m` of a turn;
//!   every phase in these circuits is one, so phase arithmetic never
//!   touches floating point until an amplitude is actually needed.
//! - [`circuit::Circuit`] — a minimal instruction list over quantum and
//!   classical registers, with structural validation and a JSON format.
//! - [`state::StateVector`] and [`exec`] — a dense simulator with
//!   mid-circuit measurement: seeded single trajectories, and exact
//!   readout distributions by enumerating every measurement branch.
//! - [`qft`] — builders for both transform circuits, plus the direct
//!   matrix oracle and closed-form phase helpers to check them against.
//! - [`rewrite`] — the compiler pass that recognizes a terminal coherent
//!   transform and replaces it with the measurement-driven form, and the
//!   report that proves the swap preserved readout statistics.

pub mod circuit;
pub mod exec;
pub mod phase;
pub mod qft;
pub mod rewrite;
pub mod state;

#[cfg(test)]
pub(crate) mod testutil;

pub use circuit::{
    feedforward_phase, Circuit, CircuitError, GateCounts, Instruction, PhaseTerm, Violation,
    ViolationKind,
};
pub use exec::{
    readout_integer, run_exact, run_trajectory, run_trajectory_with_rng, ExecError,
    OutcomeDistribution, Trajectory,
};
pub use num_complex::Complex64;
pub use phase::{DyadicPhase, MAX_LOG2_DEN};
pub use qft::{
    build_coherent_qft, build_semiclassical_qft, dft_oracle, fourier_phase, periodic_state,
    product_form_state, trace_wire_phase, QftError, QftLayout, MAX_S,
};
pub use rewrite::{
    detect_terminal_qft, equivalence_report, rewrite_semiclassical, EquivalenceError,
    EquivalenceReport, NoMatch, QftMatch, RewriteReport,
};
pub use state::{StateError, StateVector, MAX_QUBITS};
