//! Helpers shared by unit tests: randomized but always-valid circuits.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::circuit::{Circuit, PhaseTerm};
use crate::phase::DyadicPhase;

/// A random phase with denominator up to 2^8.
pub(crate) fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> DyadicPhase {
    DyadicPhase::new(rng.random(), rng.random_range(0..=8))
}

/// Generates a structurally valid circuit by construction: instructions are
/// drawn only from the kinds that remain legal given which qubits are still
/// unmeasured and which classical bits have been written. Registers stay
/// small (≤ 5 qubits) so exact enumeration over the result is cheap.
pub(crate) fn random_valid_circuit<R: Rng + ?Sized>(rng: &mut R) -> Circuit {
    let n_qubits = rng.random_range(1..=5);
    let n_cbits = rng.random_range(0..=5);
    let mut circuit = Circuit::new(n_qubits, n_cbits);

    let mut live: Vec<usize> = (0..n_qubits).collect();
    let mut fresh_cbits: Vec<usize> = (0..n_cbits).collect();
    fresh_cbits.shuffle(rng);
    let mut written: Vec<usize> = Vec::new();

    let target_len = rng.random_range(0..=20);
    while circuit.len() < target_len {
        let mut kinds: Vec<u8> = Vec::new();
        if !live.is_empty() {
            kinds.push(0); // split
            kinds.push(3); // classically controlled split
        }
        if live.len() >= 2 {
            kinds.push(1); // controlled phase
        }
        if !live.is_empty() && !fresh_cbits.is_empty() {
            kinds.push(2); // measure
        }
        let Some(&kind) = kinds.as_slice().choose(rng) else {
            break;
        };

        match kind {
            0 => {
                let q = *live.choose(rng).unwrap();
                circuit.split(q, random_phase(rng));
            }
            1 => {
                let i = rng.random_range(0..live.len());
                let mut j = rng.random_range(0..live.len() - 1);
                if j >= i {
                    j += 1;
                }
                circuit.controlled_phase(live[i], live[j], rng.random_range(1..=6));
            }
            2 => {
                let i = rng.random_range(0..live.len());
                let q = live.swap_remove(i);
                let cb = fresh_cbits.pop().unwrap();
                circuit.measure(q, cb);
                written.push(cb);
            }
            _ => {
                let q = *live.choose(rng).unwrap();
                let mut pool = written.clone();
                pool.shuffle(rng);
                let n_terms = rng.random_range(0..=pool.len());
                let terms = pool[..n_terms]
                    .iter()
                    .map(|&cb| PhaseTerm::new(cb, random_phase(rng)))
                    .collect();
                circuit.classically_controlled(q, random_phase(rng), terms);
            }
        }
    }
    circuit
}
