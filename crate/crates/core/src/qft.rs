//! Builders and reference objects for the discrete Fourier transform on a
//! register of `s + 1` qubits (`q = 2^(s+1)` basis states).
//!
//! Three independent routes to the same readout statistics live here:
//!
//! 1. [`build_coherent_qft`] — the standard gate array: one split gate per
//!    wire, a descending ladder of controlled phases, and a final
//!    measurement of every wire.
//! 2. [`build_semiclassical_qft`] — the measurement-driven form: each wire
//!    is split with a phase computed classically from the bits already
//!    measured, then measured immediately. No two-qubit gates at all.
//! 3. [`dft_oracle`] — the transform matrix applied directly from its
//!    definition, deliberately naive (`O(q²)`), as an independent check on
//!    both circuits.
//!
//! Plus the closed-form helpers the tests lean on: [`fourier_phase`] (the
//! exact per-qubit phase of the transformed basis state),
//! [`product_form_state`] (the transform of a basis state assembled as a
//! tensor product of one-qubit states), [`periodic_state`] (a Shor-style
//! test input), and [`trace_wire_phase`] (symbolic phase accumulation
//! through a circuit).
//!
//! ## Wire and readout conventions
//!
//! Qubit `j` carries input bit `a_j` (basis index `a = Σ a_j 2^j`). The
//! circuits process wires from qubit `s` (the "top" wire) down to qubit 0,
//! and readout bit `c_k` is measured on qubit `s − k`: the top wire yields
//! the *least* significant output bit. This bit reversal is wired into the
//! measurement instructions, so readout integers compare directly against
//! the oracle with no further relabeling.

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Instruction, PhaseTerm};
use crate::phase::DyadicPhase;
use crate::state::{StateVector, MAX_QUBITS};

/// Largest supported `s`: phase denominators reach `2^(s+1)`, which must
/// stay within [`DyadicPhase`]'s 63-bit denominator budget.
pub const MAX_S: usize = 62;

/// Errors from constructing reference states.
#[derive(Debug, Error, PartialEq)]
pub enum QftError {
    #[error("value {value} out of range for a {bits}-bit register (q = {q})")]
    ValueOutOfRange { value: usize, bits: usize, q: usize },
    #[error("period {r} with offset {offset} must satisfy offset < r ≤ q = {q}")]
    BadPeriod { r: usize, offset: usize, q: usize },
    #[error(transparent)]
    State(#[from] crate::state::StateError),
}

/// Register geometry for a transform over `s + 1` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QftLayout {
    s: usize,
}

impl QftLayout {
    /// # Panics
    /// If `s` exceeds [`MAX_S`].
    pub fn new(s: usize) -> Self {
        assert!(
            s <= MAX_S,
            "s = {s} exceeds the supported maximum of {MAX_S}"
        );
        Self { s }
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Register width: numbers have `s + 1` bits.
    pub fn n_bits(&self) -> usize {
        self.s + 1
    }

    /// Modulus `q = 2^(s+1)`.
    pub fn q(&self) -> usize {
        1usize << (self.s + 1)
    }

    /// The qubit that readout bit `c_k` is measured from: the bit-reversal
    /// map `k ↦ s − k`.
    pub fn readout_qubit(&self, k: usize) -> usize {
        assert!(
            k <= self.s,
            "readout bit {k} out of range for s = {}",
            self.s
        );
        self.s - k
    }
}

/// Builds the coherent transform circuit on `s + 1` qubits.
///
/// For each wire `w` from `s` down to 0: a split gate with phase 0, then
/// controlled phases `(w, w − d)` labeled `m = d + 1` for `d = 1..=w`.
/// After all gates, qubit `s − k` is measured into classical bit `k`.
///
/// # Panics
/// If `s` exceeds [`MAX_S`].
pub fn build_coherent_qft(s: usize) -> Circuit {
    let layout = QftLayout::new(s);
    let mut circuit = Circuit::new(layout.n_bits(), layout.n_bits());
    for w in (0..=s).rev() {
        circuit.split(w, DyadicPhase::ZERO);
        for d in 1..=w {
            circuit.controlled_phase(w, w - d, (d + 1) as u32);
        }
    }
    for k in 0..=s {
        circuit.measure(layout.readout_qubit(k), k);
    }
    circuit
}

/// The feedforward phase expression of semiclassical box `k`: terms
/// `(c_j, 1/2^(k+1−j))` for `j = 0..k`, the closed form of iterating
/// [`DyadicPhase::halve_plus`] over the measured bits starting from 0.
fn box_terms(k: usize) -> Vec<PhaseTerm> {
    (0..k)
        .map(|j| PhaseTerm::new(j, DyadicPhase::pow2_recip((k + 1 - j) as u32)))
        .collect()
}

/// Builds the measurement-driven transform circuit on `s + 1` qubits.
///
/// For each `k` from 0 to `s`, acting on qubit `s − k`: a classically
/// controlled split whose phase is `Σ_(j<k) c_j/2^(k+1−j)` (constant 0 —
/// box 0 has no terms at all and is the plain split gate), then an
/// immediate measurement into classical bit `k`. The circuit contains no
/// two-qubit gates.
///
/// # Panics
/// If `s` exceeds [`MAX_S`].
pub fn build_semiclassical_qft(s: usize) -> Circuit {
    let layout = QftLayout::new(s);
    let mut circuit = Circuit::new(layout.n_bits(), layout.n_bits());
    for k in 0..=s {
        let wire = layout.readout_qubit(k);
        circuit.classically_controlled(wire, DyadicPhase::ZERO, box_terms(k));
        circuit.measure(wire, k);
    }
    circuit
}

/// Applies the transform matrix directly from its definition: output
/// amplitude `c` is `(1/√q) Σ_a e^(2πi·ac/q) · input_a`.
///
/// Deliberately naive (`O(q²)`) so it shares no code — and no mistakes —
/// with the circuit path. The angle is computed from `ac mod q`, keeping
/// the argument small and exact.
pub fn dft_oracle(input: &StateVector) -> StateVector {
    let q = input.amplitudes().len();
    let scale = 1.0 / (q as f64).sqrt();
    let amps = (0..q)
        .map(|c| {
            let mut sum = Complex64::ZERO;
            for (a, amp) in input.amplitudes().iter().enumerate() {
                let angle = std::f64::consts::TAU * ((a * c) % q) as f64 / q as f64;
                sum += amp * Complex64::from_polar(1.0, angle);
            }
            sum * scale
        })
        .collect();
    StateVector::from_normalized_amplitudes(amps)
}

/// The exact phase carried by qubit `j` of the transformed basis state
/// `|a⟩`: `φ_j = Σ_(k=0..s−j) a_k · 2^(j+k−s−1)`, as a dyadic fraction of
/// a turn.
///
/// # Panics
/// If `j > s`, `s > MAX_S`, or `a ≥ 2^(s+1)`.
pub fn fourier_phase(a: usize, s: usize, j: usize) -> DyadicPhase {
    let layout = QftLayout::new(s);
    assert!(j <= s, "qubit {j} out of range for s = {s}");
    assert!(
        a < layout.q(),
        "value {a} out of range for q = {}",
        layout.q()
    );
    let mut phi = DyadicPhase::ZERO;
    for k in 0..=(s - j) {
        if a >> k & 1 == 1 {
            // a_k · 2^(j+k−s−1): always a negative power of two here.
            phi += DyadicPhase::pow2_recip((s + 1 - j - k) as u32);
        }
    }
    phi
}

/// The transformed basis state `|a⟩` assembled as a tensor product: qubit
/// `j` carries `(|0⟩ + e^(2πi·φ_j)|1⟩)/√2` with `φ_j` from
/// [`fourier_phase`]. Amplitudes are `(1/√q) e^(2πi Σ_(j∈b) φ_j)`, the
/// phase sum done exactly before the single conversion to floating point.
pub fn product_form_state(a: usize, s: usize) -> Result<StateVector, QftError> {
    let layout = QftLayout::new(s);
    if layout.n_bits() > MAX_QUBITS {
        return Err(crate::state::StateError::TooManyQubits {
            n_qubits: layout.n_bits(),
        }
        .into());
    }
    let q = layout.q();
    if a >= q {
        return Err(QftError::ValueOutOfRange {
            value: a,
            bits: layout.n_bits(),
            q,
        });
    }
    let phases: Vec<DyadicPhase> = (0..=s).map(|j| fourier_phase(a, s, j)).collect();
    let scale = 1.0 / (q as f64).sqrt();
    let amps = (0..q)
        .map(|b| {
            let mut phi = DyadicPhase::ZERO;
            for (j, &phase) in phases.iter().enumerate() {
                if b >> j & 1 == 1 {
                    phi += phase;
                }
            }
            phi.phasor() * scale
        })
        .collect();
    Ok(StateVector::from_normalized_amplitudes(amps))
}

/// An equal-amplitude superposition of `|offset⟩, |offset + r⟩, …` below
/// `q = 2^(s+1)`, normalized. When `r` divides `q`, transforming this
/// state puts all probability on multiples of `q/r`.
pub fn periodic_state(s: usize, r: usize, offset: usize) -> Result<StateVector, QftError> {
    let layout = QftLayout::new(s);
    if layout.n_bits() > MAX_QUBITS {
        return Err(crate::state::StateError::TooManyQubits {
            n_qubits: layout.n_bits(),
        }
        .into());
    }
    let q = layout.q();
    if r > q || offset >= r {
        return Err(QftError::BadPeriod { r, offset, q });
    }
    let count = (q - offset).div_ceil(r);
    let amp = Complex64::new(1.0 / (count as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::ZERO; q];
    let mut index = offset;
    while index < q {
        amps[index] = amp;
        index += r;
    }
    Ok(StateVector::from_normalized_amplitudes(amps))
}

/// Per-wire symbolic state during [`trace_wire_phase`].
#[derive(Clone, Copy, PartialEq, Eq)]
enum WireTrace {
    /// Still a definite basis bit.
    Classical(u8),
    /// Split into `(|0⟩ + e^(2πiφ)|1⟩)/√2` with exactly known φ.
    Split(DyadicPhase),
    Measured,
}

/// Follows a basis input `|a⟩` through the circuit symbolically and
/// returns the exact phase `φ` such that `wire` holds
/// `(|0⟩ + e^(2πiφ)|1⟩)/√2` at the moment it is measured (or at the end
/// of the circuit), with global phases discarded.
///
/// Returns `None` when the phase stops being traceable as a single exact
/// value: a second split on an already-split wire, a controlled phase
/// between two split wires (entanglement), any classically controlled
/// gate (the phase becomes branch-dependent), or a wire that never splits.
pub fn trace_wire_phase(circuit: &Circuit, wire: usize, a: usize) -> Option<DyadicPhase> {
    use WireTrace::{Classical, Measured, Split};

    if wire >= circuit.n_qubits() || a >= 1usize << circuit.n_qubits() {
        return None;
    }
    let mut wires: Vec<WireTrace> = (0..circuit.n_qubits())
        .map(|j| Classical((a >> j & 1) as u8))
        .collect();
    let mut frozen: Option<DyadicPhase> = None;

    for inst in circuit.instructions() {
        match inst {
            Instruction::Split { target, .. } => match wires[*target] {
                // The gate phase multiplies only the |1⟩-input column, so on
                // a definite bit it is a global phase and drops out.
                Classical(bit) => {
                    wires[*target] = Split(if bit == 1 {
                        DyadicPhase::HALF
                    } else {
                        DyadicPhase::ZERO
                    });
                }
                _ => return None,
            },
            Instruction::ControlledPhase { a: x, b: y, m } => {
                match (wires[*x], wires[*y]) {
                    // Control bit 0, or both bits definite: the gate acts as
                    // (at most) a global phase.
                    (Classical(0), _) | (_, Classical(0)) => {}
                    (Classical(_), Classical(_)) => {}
                    (Classical(_), Split(phi)) if *m <= crate::phase::MAX_LOG2_DEN => {
                        wires[*y] = Split(phi + DyadicPhase::pow2_recip(*m));
                    }
                    (Split(phi), Classical(_)) if *m <= crate::phase::MAX_LOG2_DEN => {
                        wires[*x] = Split(phi + DyadicPhase::pow2_recip(*m));
                    }
                    _ => return None,
                }
            }
            Instruction::Measure { qubit, .. } => {
                if *qubit == wire {
                    if let Split(phi) = wires[*qubit] {
                        frozen = Some(phi);
                    }
                }
                wires[*qubit] = Measured;
            }
            Instruction::ClassicallyControlled { .. } => return None,
        }
    }
    frozen.or(match wires[wire] {
        Split(phi) => Some(phi),
        _ => None,
    })
}
