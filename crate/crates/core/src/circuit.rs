//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered instruction list over a quantum register and a
//! classical register. The gate set is deliberately small: the split gate,
//! the two-qubit controlled phase, computational-basis measurement, and a
//! split gate whose phase is a linear expression over already-measured
//! classical bits. That is exactly what the coherent Fourier transform and
//! its measurement-driven replacement need.
//!
//! Values are immutable once built (all operations take `&self`); validation
//! returns every violation rather than failing on the first.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase::DyadicPhase;

/// One additive term of a feedforward phase expression: contributes
/// `coeff` when classical bit `cbit` read 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseTerm {
    pub cbit: usize,
    pub coeff: DyadicPhase,
}

impl PhaseTerm {
    pub fn new(cbit: usize, coeff: DyadicPhase) -> Self {
        Self { cbit, coeff }
    }
}

/// Evaluates `constant + Σ bit·coeff mod 1` against a readout, exactly.
pub fn feedforward_phase(
    constant: DyadicPhase,
    terms: &[PhaseTerm],
    readout: &[u8],
) -> DyadicPhase {
    let mut phase = constant;
    for term in terms {
        if readout[term.cbit] == 1 {
            phase += term.coeff;
        }
    }
    phase
}

/// A single circuit instruction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Instruction {
    /// One-qubit split gate: `|0⟩ → (|0⟩+|1⟩)/√2`,
    /// `|1⟩ → e^(2πiφ)(|0⟩−|1⟩)/√2`. With `φ = 0` this is the plain
    /// basis-splitting gate every wire of the coherent transform starts with.
    #[serde(rename = "split")]
    Split { target: usize, phase: DyadicPhase },

    /// Symmetric two-qubit diagonal gate labeled by `m ≥ 1`: multiplies the
    /// `|11⟩` amplitude by `e^(2πi/2^m)` and leaves the rest alone. Either
    /// operand may be regarded as the control.
    #[serde(rename = "cphase")]
    ControlledPhase { a: usize, b: usize, m: u32 },

    /// Computational-basis measurement of `qubit`, recorded into `cbit`.
    #[serde(rename = "measure")]
    Measure { qubit: usize, cbit: usize },

    /// Split gate whose phase is `const + Σ bit·coeff mod 1`, evaluated at
    /// run time against classical bits written by earlier measurements.
    #[serde(rename = "ccsplit")]
    ClassicallyControlled {
        target: usize,
        #[serde(rename = "const")]
        constant: DyadicPhase,
        terms: Vec<PhaseTerm>,
    },
}

/// Exact per-kind instruction tallies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub one_bit: usize,
    pub two_bit: usize,
    pub measurements: usize,
    pub classically_controlled: usize,
}

/// A quantum circuit: register sizes plus an ordered instruction list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    n_qubits: usize,
    n_cbits: usize,
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_cbits: usize) -> Self {
        Self {
            n_qubits,
            n_cbits,
            instructions: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_cbits(&self) -> usize {
        self.n_cbits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn push(&mut self, instruction: Instruction) -> &mut Self {
        self.instructions.push(instruction);
        self
    }

    pub fn split(&mut self, target: usize, phase: DyadicPhase) -> &mut Self {
        self.push(Instruction::Split { target, phase })
    }

    pub fn controlled_phase(&mut self, a: usize, b: usize, m: u32) -> &mut Self {
        self.push(Instruction::ControlledPhase { a, b, m })
    }

    pub fn measure(&mut self, qubit: usize, cbit: usize) -> &mut Self {
        self.push(Instruction::Measure { qubit, cbit })
    }

    pub fn classically_controlled(
        &mut self,
        target: usize,
        constant: DyadicPhase,
        terms: Vec<PhaseTerm>,
    ) -> &mut Self {
        self.push(Instruction::ClassicallyControlled {
            target,
            constant,
            terms,
        })
    }

    /// Checks every structural invariant and returns all violations found,
    /// each tagged with the offending instruction index. An empty list means
    /// the circuit is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut measured: HashSet<usize> = HashSet::new();
        let mut written: HashSet<usize> = HashSet::new();

        for (index, inst) in self.instructions.iter().enumerate() {
            let mut report = |kind: ViolationKind| violations.push(Violation { index, kind });

            let check_qubit = |q: usize, report: &mut dyn FnMut(ViolationKind)| {
                if q >= self.n_qubits {
                    report(ViolationKind::QubitOutOfRange {
                        qubit: q,
                        n_qubits: self.n_qubits,
                    });
                }
            };
            let check_cbit = |c: usize, report: &mut dyn FnMut(ViolationKind)| {
                if c >= self.n_cbits {
                    report(ViolationKind::CbitOutOfRange {
                        cbit: c,
                        n_cbits: self.n_cbits,
                    });
                }
            };
            let check_live =
                |q: usize, measured: &HashSet<usize>, report: &mut dyn FnMut(ViolationKind)| {
                    if measured.contains(&q) {
                        report(ViolationKind::QuantumAfterMeasure { qubit: q });
                    }
                };

            match inst {
                Instruction::Split { target, .. } => {
                    check_qubit(*target, &mut report);
                    check_live(*target, &measured, &mut report);
                }
                Instruction::ControlledPhase { a, b, m } => {
                    check_qubit(*a, &mut report);
                    check_qubit(*b, &mut report);
                    if a == b {
                        report(ViolationKind::EqualOperands { qubit: *a });
                    }
                    if *m == 0 {
                        report(ViolationKind::ZeroM);
                    }
                    check_live(*a, &measured, &mut report);
                    check_live(*b, &measured, &mut report);
                }
                Instruction::Measure { qubit, cbit } => {
                    check_qubit(*qubit, &mut report);
                    check_cbit(*cbit, &mut report);
                    if !measured.insert(*qubit) {
                        report(ViolationKind::SecondMeasure { qubit: *qubit });
                    }
                    if !written.insert(*cbit) {
                        report(ViolationKind::CbitRewritten { cbit: *cbit });
                    }
                }
                Instruction::ClassicallyControlled { target, terms, .. } => {
                    check_qubit(*target, &mut report);
                    check_live(*target, &measured, &mut report);
                    for term in terms {
                        check_cbit(term.cbit, &mut report);
                        if !written.contains(&term.cbit) {
                            report(ViolationKind::ReadBeforeWrite { cbit: term.cbit });
                        }
                    }
                }
            }
        }
        violations
    }

    /// Exact instruction tallies by kind.
    pub fn gate_counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for inst in &self.instructions {
            match inst {
                Instruction::Split { .. } => counts.one_bit += 1,
                Instruction::ControlledPhase { .. } => counts.two_bit += 1,
                Instruction::Measure { .. } => counts.measurements += 1,
                Instruction::ClassicallyControlled { .. } => counts.classically_controlled += 1,
            }
        }
        counts
    }

    /// Serializes to the JSON file format. Phases are written as exact
    /// integer pairs, never as floats.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization cannot fail")
    }

    /// Parses and validates a circuit from the JSON file format.
    ///
    /// Malformed text, unknown kinds, and unknown fields are reported with
    /// position information; structural violations (out-of-range ids,
    /// `m = 0`, reordered measurement dependencies) are reported with the
    /// offending instruction index.
    pub fn from_json(text: &str) -> Result<Self, CircuitError> {
        let circuit: Circuit = serde_json::from_str(text)?;
        let violations = circuit.validate();
        if violations.is_empty() {
            Ok(circuit)
        } else {
            Err(CircuitError::Invalid(violations))
        }
    }
}

/// A structural invariant broken by one instruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Index of the offending instruction.
    pub index: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    QubitOutOfRange {
        qubit: usize,
        n_qubits: usize,
    },
    CbitOutOfRange {
        cbit: usize,
        n_cbits: usize,
    },
    /// Controlled phase with both operands the same qubit.
    EqualOperands {
        qubit: usize,
    },
    /// Controlled phase with `m = 0`.
    ZeroM,
    /// Quantum instruction acting on a qubit after its measurement.
    QuantumAfterMeasure {
        qubit: usize,
    },
    /// A qubit measured more than once.
    SecondMeasure {
        qubit: usize,
    },
    /// A classical bit written by more than one measurement.
    CbitRewritten {
        cbit: usize,
    },
    /// Feedforward reading a classical bit no earlier measurement wrote.
    ReadBeforeWrite {
        cbit: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instruction {}: {}", self.index, self.kind)
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::QubitOutOfRange { qubit, n_qubits } => {
                write!(
                    f,
                    "qubit {qubit} out of range (circuit has {n_qubits} qubits)"
                )
            }
            ViolationKind::CbitOutOfRange { cbit, n_cbits } => {
                write!(
                    f,
                    "classical bit {cbit} out of range (circuit has {n_cbits} classical bits)"
                )
            }
            ViolationKind::EqualOperands { qubit } => {
                write!(
                    f,
                    "controlled-phase operands must be distinct (both are qubit {qubit})"
                )
            }
            ViolationKind::ZeroM => write!(f, "controlled-phase m must be \u{2265} 1"),
            ViolationKind::QuantumAfterMeasure { qubit } => {
                write!(
                    f,
                    "quantum operation on qubit {qubit} after its measurement"
                )
            }
            ViolationKind::SecondMeasure { qubit } => {
                write!(f, "qubit {qubit} measured more than once")
            }
            ViolationKind::CbitRewritten { cbit } => {
                write!(
                    f,
                    "classical bit {cbit} written by more than one measurement"
                )
            }
            ViolationKind::ReadBeforeWrite { cbit } => {
                write!(
                    f,
                    "classical bit {cbit} read before any measurement writes it"
                )
            }
        }
    }
}

/// Errors from parsing or validating circuit files.
#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("malformed circuit JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid circuit: {}", display_violations(.0))]
    Invalid(Vec<Violation>),
}

pub(crate) fn display_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(Violation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Raw wire form of an instruction: one flat object whose meaningful fields
/// depend on `kind`. Deserialization goes through this so that unknown
/// kinds, unknown fields, and fields that do not apply to the kind are all
/// rejected with a precise message.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstruction {
    kind: String,
    target: Option<usize>,
    phase: Option<DyadicPhase>,
    a: Option<usize>,
    b: Option<usize>,
    m: Option<u32>,
    qubit: Option<usize>,
    cbit: Option<usize>,
    #[serde(rename = "const")]
    constant: Option<DyadicPhase>,
    terms: Option<Vec<PhaseTerm>>,
}

impl<'de> Deserialize<'de> for Instruction {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let raw = RawInstruction::deserialize(deserializer)?;
        raw.into_instruction().map_err(serde::de::Error::custom)
    }
}

impl RawInstruction {
    fn into_instruction(self) -> Result<Instruction, String> {
        fn need<T>(field: Option<T>, kind: &str, name: &str) -> Result<T, String> {
            field.ok_or_else(|| format!("missing field `{name}` for kind `{kind}`"))
        }
        let reject_unused = |kind: &str, unused: &[(&str, bool)]| -> Result<(), String> {
            for (name, present) in unused {
                if *present {
                    return Err(format!("field `{name}` does not apply to kind `{kind}`"));
                }
            }
            Ok(())
        };

        match self.kind.as_str() {
            "split" => {
                reject_unused(
                    "split",
                    &[
                        ("a", self.a.is_some()),
                        ("b", self.b.is_some()),
                        ("m", self.m.is_some()),
                        ("qubit", self.qubit.is_some()),
                        ("cbit", self.cbit.is_some()),
                        ("const", self.constant.is_some()),
                        ("terms", self.terms.is_some()),
                    ],
                )?;
                Ok(Instruction::Split {
                    target: need(self.target, "split", "target")?,
                    phase: need(self.phase, "split", "phase")?,
                })
            }
            "cphase" => {
                reject_unused(
                    "cphase",
                    &[
                        ("target", self.target.is_some()),
                        ("phase", self.phase.is_some()),
                        ("qubit", self.qubit.is_some()),
                        ("cbit", self.cbit.is_some()),
                        ("const", self.constant.is_some()),
                        ("terms", self.terms.is_some()),
                    ],
                )?;
                Ok(Instruction::ControlledPhase {
                    a: need(self.a, "cphase", "a")?,
                    b: need(self.b, "cphase", "b")?,
                    m: need(self.m, "cphase", "m")?,
                })
            }
            "measure" => {
                reject_unused(
                    "measure",
                    &[
                        ("target", self.target.is_some()),
                        ("phase", self.phase.is_some()),
                        ("a", self.a.is_some()),
                        ("b", self.b.is_some()),
                        ("m", self.m.is_some()),
                        ("const", self.constant.is_some()),
                        ("terms", self.terms.is_some()),
                    ],
                )?;
                Ok(Instruction::Measure {
                    qubit: need(self.qubit, "measure", "qubit")?,
                    cbit: need(self.cbit, "measure", "cbit")?,
                })
            }
            "ccsplit" => {
                reject_unused(
                    "ccsplit",
                    &[
                        ("phase", self.phase.is_some()),
                        ("a", self.a.is_some()),
                        ("b", self.b.is_some()),
                        ("m", self.m.is_some()),
                        ("qubit", self.qubit.is_some()),
                        ("cbit", self.cbit.is_some()),
                    ],
                )?;
                Ok(Instruction::ClassicallyControlled {
                    target: need(self.target, "ccsplit", "target")?,
                    constant: need(self.constant, "ccsplit", "const")?,
                    terms: need(self.terms, "ccsplit", "terms")?,
                })
            }
            other => Err(format!(
                "unknown instruction kind `{other}`, expected one of split, cphase, measure, ccsplit"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::DyadicPhase;

    fn ph(num: u64, log2_den: u32) -> DyadicPhase {
        DyadicPhase::new(num, log2_den)
    }

    #[test]
    fn empty_circuit_is_valid() {
        assert!(Circuit::new(0, 0).validate().is_empty());
    }

    #[test]
    fn quantum_after_measure_is_flagged() {
        let mut c = Circuit::new(1, 1);
        c.measure(0, 0).split(0, DyadicPhase::ZERO);
        let v = c.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].index, 1);
        assert_eq!(v[0].kind, ViolationKind::QuantumAfterMeasure { qubit: 0 });
    }

    #[test]
    fn range_and_operand_violations() {
        let mut c = Circuit::new(2, 1);
        c.split(5, DyadicPhase::ZERO);
        c.controlled_phase(0, 0, 2);
        c.controlled_phase(0, 1, 0);
        c.measure(1, 3);
        let v = c.validate();
        assert!(v.contains(&Violation {
            index: 0,
            kind: ViolationKind::QubitOutOfRange {
                qubit: 5,
                n_qubits: 2
            },
        }));
        assert!(v.contains(&Violation {
            index: 1,
            kind: ViolationKind::EqualOperands { qubit: 0 }
        }));
        assert!(v.contains(&Violation {
            index: 2,
            kind: ViolationKind::ZeroM
        }));
        assert!(v.contains(&Violation {
            index: 3,
            kind: ViolationKind::CbitOutOfRange {
                cbit: 3,
                n_cbits: 1
            },
        }));
    }

    #[test]
    fn measurement_bookkeeping_violations() {
        let mut c = Circuit::new(2, 2);
        c.measure(0, 0).measure(0, 1);
        let v = c.validate();
        assert_eq!(
            v,
            vec![Violation {
                index: 1,
                kind: ViolationKind::SecondMeasure { qubit: 0 }
            }]
        );

        let mut c = Circuit::new(2, 1);
        c.measure(0, 0).measure(1, 0);
        let v = c.validate();
        assert_eq!(
            v,
            vec![Violation {
                index: 1,
                kind: ViolationKind::CbitRewritten { cbit: 0 }
            }]
        );
    }

    #[test]
    fn feedforward_ordering() {
        let mut c = Circuit::new(2, 2);
        c.classically_controlled(1, DyadicPhase::ZERO, vec![PhaseTerm::new(0, ph(1, 2))]);
        let v = c.validate();
        assert_eq!(
            v,
            vec![Violation {
                index: 0,
                kind: ViolationKind::ReadBeforeWrite { cbit: 0 }
            }]
        );

        let mut c = Circuit::new(2, 2);
        c.measure(0, 0)
            .classically_controlled(1, DyadicPhase::ZERO, vec![PhaseTerm::new(0, ph(1, 2))])
            .measure(1, 1);
        assert!(c.validate().is_empty());
    }

    #[test]
    fn gate_counts_tally_by_kind() {
        assert_eq!(Circuit::new(0, 0).gate_counts(), GateCounts::default());

        let mut c = Circuit::new(3, 3);
        c.split(0, DyadicPhase::ZERO)
            .split(1, ph(1, 2))
            .controlled_phase(0, 1, 2)
            .measure(0, 0)
            .classically_controlled(2, DyadicPhase::ZERO, vec![PhaseTerm::new(0, ph(1, 2))])
            .measure(2, 1);
        assert_eq!(
            c.gate_counts(),
            GateCounts {
                one_bit: 2,
                two_bit: 1,
                measurements: 2,
                classically_controlled: 1
            }
        );
    }

    #[test]
    fn feedforward_phase_evaluation() {
        let terms = vec![
            PhaseTerm::new(0, ph(1, 4)),
            PhaseTerm::new(1, ph(1, 3)),
            PhaseTerm::new(2, ph(1, 2)),
        ];
        assert_eq!(
            feedforward_phase(DyadicPhase::ZERO, &terms, &[1, 1, 1]),
            ph(7, 4)
        );
        assert_eq!(
            feedforward_phase(DyadicPhase::ZERO, &terms, &[0, 0, 0]),
            DyadicPhase::ZERO
        );
        assert_eq!(feedforward_phase(ph(1, 1), &terms, &[0, 0, 1]), ph(3, 2));
        // The sum is taken mod 1, so a constant of 1/2 plus a set bit with
        // coefficient 1/2 wraps back to zero.
        let wrap = vec![PhaseTerm::new(0, ph(1, 1))];
        assert_eq!(feedforward_phase(ph(1, 1), &wrap, &[1]), DyadicPhase::ZERO);
    }

    fn sample_circuit() -> Circuit {
        let mut c = Circuit::new(2, 2);
        c.split(1, DyadicPhase::ZERO)
            .controlled_phase(1, 0, 2)
            .measure(1, 0)
            .classically_controlled(0, ph(1, 3), vec![PhaseTerm::new(0, ph(1, 2))])
            .measure(0, 1);
        c
    }

    #[test]
    fn json_round_trip_is_identity() {
        let c = sample_circuit();
        let text = c.to_json();
        let back = Circuit::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn json_field_order_is_irrelevant() {
        let text = r#"{
            "instructions": [
                {"phase": {"log2den": 0, "num": 0}, "kind": "split", "target": 0},
                {"cbit": 0, "qubit": 0, "kind": "measure"}
            ],
            "n_cbits": 1,
            "n_qubits": 1
        }"#;
        let c = Circuit::from_json(text).unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn json_rejects_unknown_kind() {
        let text = r#"{"n_qubits":1,"n_cbits":0,"instructions":[{"kind":"hadamard","target":0}]}"#;
        let err = Circuit::from_json(text).unwrap_err();
        assert!(
            err.to_string()
                .contains("unknown instruction kind `hadamard`"),
            "{err}"
        );
    }

    #[test]
    fn json_rejects_unknown_and_misplaced_fields() {
        let unknown = r#"{"n_qubits":1,"n_cbits":0,"instructions":[
            {"kind":"split","target":0,"phase":{"num":0,"log2den":0},"extra":1}]}"#;
        assert!(Circuit::from_json(unknown).is_err());

        let misplaced = r#"{"n_qubits":2,"n_cbits":0,"instructions":[
            {"kind":"split","target":0,"phase":{"num":0,"log2den":0},"m":3}]}"#;
        let err = Circuit::from_json(misplaced).unwrap_err();
        assert!(
            err.to_string()
                .contains("field `m` does not apply to kind `split`"),
            "{err}"
        );

        let missing = r#"{"n_qubits":1,"n_cbits":0,"instructions":[{"kind":"split","target":0}]}"#;
        let err = Circuit::from_json(missing).unwrap_err();
        assert!(
            err.to_string()
                .contains("missing field `phase` for kind `split`"),
            "{err}"
        );

        let top_level = r#"{"n_qubits":1,"n_cbits":0,"instructions":[],"comment":"hi"}"#;
        assert!(Circuit::from_json(top_level).is_err());
    }

    #[test]
    fn json_rejects_zero_m() {
        let text =
            r#"{"n_qubits":2,"n_cbits":0,"instructions":[{"kind":"cphase","a":0,"b":1,"m":0}]}"#;
        let err = Circuit::from_json(text).unwrap_err();
        assert!(err.to_string().contains("m must be \u{2265} 1"), "{err}");
    }

    #[test]
    fn json_phase_encoding_is_exact() {
        let text = r#"{"n_qubits":1,"n_cbits":0,"instructions":[
            {"kind":"split","target":0,"phase":{"num":3,"log2den":3}}]}"#;
        let c = Circuit::from_json(text).unwrap();
        assert_eq!(
            c.instructions()[0],
            Instruction::Split {
                target: 0,
                phase: ph(3, 3)
            }
        );
    }

    #[test]
    fn random_valid_circuits_round_trip() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let c = crate::testutil::random_valid_circuit(&mut rng);
            assert!(c.validate().is_empty());
            let back = Circuit::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c);
        }
    }
}
