//! The compiler pass: recognize a coherent transform that ends a circuit
//! and replace it with the measurement-driven form.
//!
//! [`detect_terminal_qft`] matches the trailing instructions against the
//! coherent pattern — one zero-phase split per wire, the complete
//! controlled-phase ladder with labels `m = (wire separation) + 1`, and a
//! measurement of every matched wire. Matching is structural but tolerant
//! of the orderings that leave the unitary unchanged: wires may be any
//! physical qubits in any permutation, and gates may appear in any order
//! consistent with the pattern's dependency structure (controlled phases
//! all commute with one another; a controlled phase never commutes past a
//! split on a shared wire). The split order therefore identifies the wire
//! roles uniquely, and each controlled phase pins the role distance of its
//! operands through `m`.
//!
//! [`rewrite_semiclassical`] replaces the matched span with per-wire
//! classically controlled splits and immediate measurements, reusing the
//! matched classical bits, and reports exact gate savings.
//! [`equivalence_report`] then quantifies — by exact simulation — that the
//! readout statistics are unchanged.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, Instruction, PhaseTerm};
use crate::exec::{run_exact, ExecError};
use crate::phase::DyadicPhase;
use crate::state::StateVector;

/// A recognized terminal transform pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QftMatch {
    /// The matched trailing instructions (always ends at the circuit end).
    pub span: Range<usize>,
    /// Matched qubits in role order: `wires[0]` is the wire that splits
    /// first and carries the longest controlled-phase ladder.
    pub wires: Vec<usize>,
    /// The classical bit each wire is measured into, aligned with `wires`.
    pub readout_cbits: Vec<usize>,
}

/// Why no trailing span matches the pattern. Carries the diagnostic from
/// the candidate span that got furthest before failing.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no terminal transform pattern: {reason}")]
pub struct NoMatch {
    pub reason: String,
}

/// Exact accounting for one rewrite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteReport {
    /// Two-qubit gates deleted: `n(n−1)/2` for an `n`-wire match.
    pub two_bit_gates_removed: usize,
    /// Classically controlled splits inserted: one per wire.
    pub classically_controlled_gates_added: usize,
    /// Measurements in the span (count unchanged by the rewrite).
    pub measurements: usize,
    pub matched: bool,
}

/// Errors from the equivalence analyzer.
#[derive(Debug, Error)]
pub enum EquivalenceError {
    #[error(
        "circuits act on different registers: {a_qubits}×{a_cbits} vs {b_qubits}×{b_cbits} \
         (qubits×classical bits)"
    )]
    RegisterMismatch {
        a_qubits: usize,
        a_cbits: usize,
        b_qubits: usize,
        b_cbits: usize,
    },
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// Per-input total-variation distances between two circuits' exact readout
/// distributions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// TV distance per input, in input order.
    pub per_input: Vec<f64>,
    /// Largest distance seen (0 when `inputs` is empty).
    pub max_tv: f64,
    /// Index of the input achieving `max_tv`, if any inputs were given.
    pub worst_input: Option<usize>,
}

/// Searches the circuit's trailing instructions for the coherent transform
/// pattern, longest span first. The circuit is expected to be valid
/// (`validate()` empty); on invalid circuits the result is a no-match, not
/// a panic.
pub fn detect_terminal_qft(circuit: &Circuit) -> Result<QftMatch, NoMatch> {
    let instructions = circuit.instructions();
    let len = instructions.len();
    let mut best: Option<(usize, String)> = None;
    for start in 0..=len {
        match parse_span(&instructions[start..]) {
            Ok((wires, readout_cbits)) => {
                return Ok(QftMatch {
                    span: start..len,
                    wires,
                    readout_cbits,
                });
            }
            Err((consumed, reason)) => {
                if best.as_ref().is_none_or(|(p, _)| consumed > *p) {
                    best = Some((consumed, reason));
                }
            }
        }
    }
    let (_, reason) = best.expect("at least the empty span is always attempted");
    Err(NoMatch { reason })
}

/// Tries to parse an entire instruction slice as the `n`-wire pattern for
/// some `n ≥ 1`. Returns the wires in role order with their readout bits,
/// or `(instructions consumed, diagnostic)` on the first structural
/// mismatch.
fn parse_span(span: &[Instruction]) -> Result<(Vec<usize>, Vec<usize>), (usize, String)> {
    let mut wires: Vec<usize> = Vec::new();
    let mut role_of: HashMap<usize, usize> = HashMap::new();
    let mut predicted: HashMap<usize, usize> = HashMap::new();
    let mut ladder_seen: HashSet<(usize, usize)> = HashSet::new();
    let mut cbit_of: HashMap<usize, usize> = HashMap::new();

    for (i, inst) in span.iter().enumerate() {
        let fail = |reason: String| Err((i, reason));
        match inst {
            Instruction::Split { target, phase } => {
                if *phase != DyadicPhase::ZERO {
                    return fail(format!(
                        "split gate on qubit {target} has phase {phase}, but the pattern needs phase 0"
                    ));
                }
                if cbit_of.contains_key(target) {
                    return fail(format!(
                        "split gate on qubit {target} after its measurement"
                    ));
                }
                if role_of.contains_key(target) {
                    return fail(format!("qubit {target} splits twice within the span"));
                }
                let role = wires.len();
                if let Some(&implied) = predicted.get(target) {
                    if implied != role {
                        return fail(format!(
                            "controlled-phase labels place qubit {target} as wire {implied} \
                             but it splits as wire {role}"
                        ));
                    }
                }
                role_of.insert(*target, role);
                wires.push(*target);
            }
            Instruction::ControlledPhase { a, b, m } => {
                if cbit_of.contains_key(a) || cbit_of.contains_key(b) {
                    return fail(format!(
                        "controlled-phase between qubits {a} and {b} touches a measured qubit"
                    ));
                }
                let (split_role, open_qubit) = match (role_of.get(a), role_of.get(b)) {
                    (Some(_), Some(_)) => {
                        return fail(format!(
                            "controlled-phase between qubits {a} and {b} appears after both \
                             wires split (it must sit between the two split gates)"
                        ));
                    }
                    (None, None) => {
                        return fail(format!(
                            "controlled-phase between qubits {a} and {b} appears before either \
                             wire splits"
                        ));
                    }
                    (Some(&role), None) => (role, *b),
                    (None, Some(&role)) => (role, *a),
                };
                if *m < 2 {
                    return fail(format!(
                        "controlled-phase with m={m} cannot link two distinct wires \
                         (the pattern uses m = wire separation + 1 ≥ 2)"
                    ));
                }
                let implied_role = split_role + (*m as usize - 1);
                if let Some(&previous) = predicted.get(&open_qubit) {
                    if previous != implied_role {
                        return fail(format!(
                            "conflicting controlled-phase labels for qubit {open_qubit}: \
                             wire {previous} vs wire {implied_role}"
                        ));
                    }
                }
                predicted.insert(open_qubit, implied_role);
                if !ladder_seen.insert((split_role, implied_role)) {
                    return fail(format!(
                        "duplicate controlled-phase between wires {split_role} and {implied_role}"
                    ));
                }
            }
            Instruction::Measure { qubit, cbit } => {
                if !role_of.contains_key(qubit) {
                    return fail(format!(
                        "measurement of qubit {qubit}, which never splits within the span"
                    ));
                }
                if cbit_of.insert(*qubit, *cbit).is_some() {
                    return fail(format!("qubit {qubit} measured twice within the span"));
                }
            }
            Instruction::ClassicallyControlled { target, .. } => {
                return fail(format!(
                    "classically controlled gate on qubit {target} cannot be part of the \
                     coherent pattern"
                ));
            }
        }
    }

    let consumed = span.len();
    let n = wires.len();
    if n == 0 {
        return Err((
            consumed,
            "the trailing span contains no split gates".to_string(),
        ));
    }
    for (&qubit, &role) in &predicted {
        if !role_of.contains_key(&qubit) {
            return Err((
                consumed,
                format!(
                    "a controlled-phase labels qubit {qubit} as wire {role}, but it never splits"
                ),
            ));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !ladder_seen.contains(&(i, j)) {
                return Err((
                    consumed,
                    format!(
                        "missing controlled-phase between qubit {} and qubit {} (expected m={})",
                        wires[i],
                        wires[j],
                        j - i + 1
                    ),
                ));
            }
        }
    }
    let mut readout_cbits = Vec::with_capacity(n);
    for &qubit in &wires {
        match cbit_of.get(&qubit) {
            Some(&cbit) => readout_cbits.push(cbit),
            None => {
                return Err((
                    consumed,
                    format!("qubit {qubit} splits but is never measured within the span"),
                ));
            }
        }
    }
    Ok((wires, readout_cbits))
}

/// Replaces the detected terminal transform with the measurement-driven
/// form: per wire `k` (role order), a classically controlled split with
/// terms `(cbit_j, 1/2^(k+1−j))` over the bits measured by earlier wires,
/// then an immediate measurement into the wire's original classical bit.
/// The prefix before the span is preserved verbatim.
pub fn rewrite_semiclassical(circuit: &Circuit) -> Result<(Circuit, RewriteReport), NoMatch> {
    let qft = detect_terminal_qft(circuit)?;
    let n = qft.wires.len();

    let mut rewritten = Circuit::new(circuit.n_qubits(), circuit.n_cbits());
    for inst in &circuit.instructions()[..qft.span.start] {
        rewritten.push(inst.clone());
    }
    for k in 0..n {
        let terms = (0..k)
            .map(|j| {
                PhaseTerm::new(
                    qft.readout_cbits[j],
                    DyadicPhase::pow2_recip((k + 1 - j) as u32),
                )
            })
            .collect();
        rewritten.classically_controlled(qft.wires[k], DyadicPhase::ZERO, terms);
        rewritten.measure(qft.wires[k], qft.readout_cbits[k]);
    }

    let two_bit_gates_removed = circuit.instructions()[qft.span.clone()]
        .iter()
        .filter(|inst| matches!(inst, Instruction::ControlledPhase { .. }))
        .count();
    debug_assert_eq!(two_bit_gates_removed, n * (n - 1) / 2);
    let report = RewriteReport {
        two_bit_gates_removed,
        classically_controlled_gates_added: n,
        measurements: n,
        matched: true,
    };
    Ok((rewritten, report))
}

/// Runs both circuits exactly on every input and reports the
/// total-variation distance between their readout distributions.
pub fn equivalence_report(
    circuit_a: &Circuit,
    circuit_b: &Circuit,
    inputs: &[StateVector],
) -> Result<EquivalenceReport, EquivalenceError> {
    if circuit_a.n_qubits() != circuit_b.n_qubits() || circuit_a.n_cbits() != circuit_b.n_cbits() {
        return Err(EquivalenceError::RegisterMismatch {
            a_qubits: circuit_a.n_qubits(),
            a_cbits: circuit_a.n_cbits(),
            b_qubits: circuit_b.n_qubits(),
            b_cbits: circuit_b.n_cbits(),
        });
    }
    let mut per_input = Vec::with_capacity(inputs.len());
    for input in inputs {
        let dist_a = run_exact(circuit_a, input)?;
        let dist_b = run_exact(circuit_b, input)?;
        per_input.push(dist_a.total_variation(&dist_b));
    }
    let mut max_tv = 0.0f64;
    let mut worst_input = None;
    for (index, &tv) in per_input.iter().enumerate() {
        if worst_input.is_none() || tv > max_tv {
            max_tv = tv;
            worst_input = Some(index);
        }
    }
    Ok(EquivalenceReport {
        per_input,
        max_tv,
        worst_input,
    })
}
