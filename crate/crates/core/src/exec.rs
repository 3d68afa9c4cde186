//! Circuit execution: sampled trajectories and exact outcome distributions.
//!
//! Both entry points share one instruction-stepping core; they differ only
//! at measurements. [`run_trajectory`] draws each outcome from a seeded
//! generator and follows a single path. [`run_exact`] follows *both*
//! branches of every measurement (pruning branches of probability below
//! `1e-15`), accumulating exact path probabilities per readout integer —
//! with at most one measurement per qubit that is never more than `2^n`
//! leaves.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{display_violations, feedforward_phase, Circuit, Instruction, Violation};
use crate::state::{StateError, StateVector, BRANCH_EPSILON, MAX_QUBITS};

/// Errors from running a circuit.
#[derive(Debug, Error)]
pub enum ExecError {
    #[error("invalid circuit: {}", display_violations(.0))]
    InvalidCircuit(Vec<Violation>),
    #[error("input state has {input} qubits but the circuit has {circuit}")]
    QubitCountMismatch { input: usize, circuit: usize },
    #[error("exact enumeration over {n_cbits} classical bits exceeds the limit of {MAX_QUBITS}")]
    TooManyClassicalBits { n_cbits: usize },
    #[error(transparent)]
    State(#[from] StateError),
}

/// One sampled run of a circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// Value of every classical bit after the run; bits no measurement
    /// wrote stay 0.
    pub readout: Vec<u8>,
    /// The post-collapse state.
    pub final_state: StateVector,
    /// Product of the branch probabilities taken at each measurement.
    pub probability_of_path: f64,
}

impl Trajectory {
    /// The readout as an integer, classical bit `j` contributing `2^j`.
    pub fn readout_integer(&self) -> usize {
        readout_integer(&self.readout)
    }
}

/// Packs classical bits into an integer, bit `j` contributing `2^j`.
pub fn readout_integer(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .map(|(j, &b)| (b as usize) << j)
        .sum()
}

/// A probability distribution over readout integers.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    n_cbits: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    fn zero(n_cbits: usize) -> Self {
        Self {
            n_cbits,
            probs: vec![0.0; 1 << n_cbits],
        }
    }

    /// The distribution a full computational-basis readout of `state`
    /// would produce: qubit `k` is read into classical bit `k`, so outcome
    /// `c` occurs with probability `|amplitude_c|²`.
    pub fn from_state(state: &StateVector) -> Self {
        Self {
            n_cbits: state.n_qubits(),
            probs: state.probabilities(),
        }
    }

    pub fn n_cbits(&self) -> usize {
        self.n_cbits
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of readout integer `c`.
    pub fn prob(&self, c: usize) -> f64 {
        self.probs[c]
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Total variation distance `½ Σ|p_c − q_c|`: 0 for identical
    /// distributions, 1 for disjoint support.
    ///
    /// # Panics
    /// If the distributions range over different numbers of classical bits.
    pub fn total_variation(&self, other: &Self) -> f64 {
        assert_eq!(
            self.n_cbits, other.n_cbits,
            "total variation needs distributions over the same classical register"
        );
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }
}

fn check(circuit: &Circuit, input: &StateVector) -> Result<(), ExecError> {
    let violations = circuit.validate();
    if !violations.is_empty() {
        return Err(ExecError::InvalidCircuit(violations));
    }
    if input.n_qubits() != circuit.n_qubits() {
        return Err(ExecError::QubitCountMismatch {
            input: input.n_qubits(),
            circuit: circuit.n_qubits(),
        });
    }
    Ok(())
}

/// Applies one non-measurement instruction, resolving feedforward phases
/// against the classical bits written so far.
fn apply_quantum(
    state: &mut StateVector,
    inst: &Instruction,
    readout: &[u8],
) -> Result<(), StateError> {
    match inst {
        Instruction::Split { target, phase } => state.apply_one_bit_split(*target, *phase),
        Instruction::ControlledPhase { a, b, m } => state.apply_controlled_phase(*a, *b, *m),
        Instruction::ClassicallyControlled {
            target,
            constant,
            terms,
        } => {
            let phi = feedforward_phase(*constant, terms, readout);
            state.apply_one_bit_split(*target, phi)
        }
        Instruction::Measure { .. } => unreachable!("measurements are handled by the caller"),
    }
}

/// Runs the circuit once, drawing measurement outcomes from a generator
/// seeded with `seed`. Deterministic in `(circuit, input, seed)`.
pub fn run_trajectory(
    circuit: &Circuit,
    input: &StateVector,
    seed: u64,
) -> Result<Trajectory, ExecError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_trajectory_with_rng(circuit, input, &mut rng)
}

/// [`run_trajectory`] with a caller-supplied random source.
pub fn run_trajectory_with_rng<R: Rng + ?Sized>(
    circuit: &Circuit,
    input: &StateVector,
    rng: &mut R,
) -> Result<Trajectory, ExecError> {
    check(circuit, input)?;
    let mut state = input.clone();
    let mut readout = vec![0u8; circuit.n_cbits()];
    let mut probability_of_path = 1.0;
    for inst in circuit.instructions() {
        if let Instruction::Measure { qubit, cbit } = inst {
            let u: f64 = rng.random();
            let (bit, branch_probability) = state.measure(*qubit, u)?;
            readout[*cbit] = bit;
            probability_of_path *= branch_probability;
        } else {
            apply_quantum(&mut state, inst, &readout)?;
        }
    }
    Ok(Trajectory {
        readout,
        final_state: state,
        probability_of_path,
    })
}

/// Computes the exact readout distribution by walking every measurement
/// branch. Branches with probability below `1e-15` are pruned; everything
/// else is accumulated with its exact path probability, visiting outcome 0
/// before outcome 1 so the floating-point accumulation order is fixed.
pub fn run_exact(circuit: &Circuit, input: &StateVector) -> Result<OutcomeDistribution, ExecError> {
    check(circuit, input)?;
    if circuit.n_cbits() > MAX_QUBITS {
        return Err(ExecError::TooManyClassicalBits {
            n_cbits: circuit.n_cbits(),
        });
    }
    let mut dist = OutcomeDistribution::zero(circuit.n_cbits());
    let readout = vec![0u8; circuit.n_cbits()];
    explore(
        circuit.instructions(),
        input.clone(),
        readout,
        1.0,
        &mut dist.probs,
    )?;
    Ok(dist)
}

fn explore(
    rest: &[Instruction],
    mut state: StateVector,
    readout: Vec<u8>,
    path_probability: f64,
    probs: &mut [f64],
) -> Result<(), StateError> {
    for (idx, inst) in rest.iter().enumerate() {
        if let Instruction::Measure { qubit, cbit } = inst {
            let p_one = state.prob_one(*qubit)?;
            for outcome in [0u8, 1u8] {
                let branch = if outcome == 0 { 1.0 - p_one } else { p_one };
                if branch < BRANCH_EPSILON {
                    continue;
                }
                let mut branch_state = state.clone();
                branch_state.project(*qubit, outcome);
                let mut branch_readout = readout.clone();
                branch_readout[*cbit] = outcome;
                explore(
                    &rest[idx + 1..],
                    branch_state,
                    branch_readout,
                    path_probability * branch,
                    probs,
                )?;
            }
            return Ok(());
        }
        apply_quantum(&mut state, inst, &readout)?;
    }
    probs[readout_integer(&readout)] += path_probability;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::PhaseTerm;
    use crate::phase::DyadicPhase;
    use num_complex::Complex64;

    fn split_then_measure() -> Circuit {
        let mut c = Circuit::new(1, 1);
        c.split(0, DyadicPhase::ZERO).measure(0, 0);
        c
    }

    #[test]
    fn no_measurements_means_empty_readout_and_unit_probability() {
        let mut c = Circuit::new(2, 0);
        c.split(0, DyadicPhase::ZERO).controlled_phase(0, 1, 2);
        let t = run_trajectory(&c, &StateVector::basis(2, 0).unwrap(), 1).unwrap();
        assert!(t.readout.is_empty());
        assert_eq!(t.probability_of_path, 1.0);
    }

    #[test]
    fn one_split_readout_is_uniform_over_seeds() {
        let c = split_then_measure();
        let input = StateVector::basis(1, 0).unwrap();
        let trials = 10_000;
        let ones: usize = (0..trials)
            .map(|seed| run_trajectory(&c, &input, seed).unwrap().readout[0] as usize)
            .sum();
        let freq = ones as f64 / trials as f64;
        // 3σ band around 1/2 at 10⁴ trials is ±0.015.
        assert!((freq - 0.5).abs() < 0.015, "frequency {freq}");
    }

    #[test]
    fn trajectories_are_seed_deterministic() {
        let c = split_then_measure();
        let input = StateVector::basis(1, 0).unwrap();
        let a = run_trajectory(&c, &input, 42).unwrap();
        let b = run_trajectory(&c, &input, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn path_probability_multiplies_branch_probabilities() {
        let mut c = Circuit::new(2, 2);
        c.split(0, DyadicPhase::ZERO)
            .split(1, DyadicPhase::ZERO)
            .measure(0, 0)
            .measure(1, 1);
        let input = StateVector::basis(2, 0).unwrap();
        for seed in 0..20 {
            let t = run_trajectory(&c, &input, seed).unwrap();
            assert!((t.probability_of_path - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_distribution_of_a_plain_measurement() {
        let mut c = Circuit::new(1, 1);
        c.measure(0, 0);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let input = StateVector::from_amplitudes(vec![h, h]).unwrap();
        let dist = run_exact(&c, &input).unwrap();
        assert!((dist.prob(0) - 0.5).abs() < 1e-15);
        assert!((dist.prob(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_enumeration_prunes_impossible_branches() {
        let mut c = Circuit::new(1, 1);
        c.measure(0, 0);
        let dist = run_exact(&c, &StateVector::basis(1, 1).unwrap()).unwrap();
        assert_eq!(dist.prob(0), 0.0);
        assert_eq!(dist.prob(1), 1.0);
    }

    #[test]
    fn superpositions_interfere_rather_than_mix() {
        // split is self-inverse at φ = 0, so the uniform superposition maps
        // back to |0⟩ and reads out 0 with certainty — while each basis
        // input reads out uniformly. A mixture of the basis results could
        // never be deterministic.
        let c = split_then_measure();
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let superposed = StateVector::from_amplitudes(vec![h, h]).unwrap();
        let dist = run_exact(&c, &superposed).unwrap();
        assert!((dist.prob(0) - 1.0).abs() < 1e-12);

        for basis in 0..2 {
            let dist = run_exact(&c, &StateVector::basis(1, basis).unwrap()).unwrap();
            assert!((dist.prob(0) - 0.5).abs() < 1e-12);
        }
    }

    fn feedforward_demo() -> (Circuit, StateVector) {
        let mut c = Circuit::new(2, 2);
        c.split(0, DyadicPhase::ZERO)
            .measure(0, 0)
            .classically_controlled(
                1,
                DyadicPhase::ZERO,
                vec![PhaseTerm::new(0, DyadicPhase::QUARTER)],
            )
            .measure(1, 1);
        let half = Complex64::new(0.5, 0.0);
        let input =
            StateVector::from_amplitudes(vec![half, half, half, Complex64::new(0.0, 0.5)]).unwrap();
        (c, input)
    }

    #[test]
    fn sampled_frequencies_match_exact_distribution() {
        let (c, input) = feedforward_demo();
        let exact = run_exact(&c, &input).unwrap();
        assert!((exact.sum() - 1.0).abs() < 1e-10);

        let trials = 100_000usize;
        let mut counts = [0usize; 4];
        for seed in 0..trials as u64 {
            counts[run_trajectory(&c, &input, seed).unwrap().readout_integer()] += 1;
        }
        for (c_val, &count) in counts.iter().enumerate() {
            let p = exact.prob(c_val);
            let freq = count as f64 / trials as f64;
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (freq - p).abs() <= 3.0 * se + 1e-9,
                "outcome {c_val}: frequency {freq} vs exact {p} (3se = {})",
                3.0 * se
            );
        }
    }

    #[test]
    fn invalid_circuits_and_mismatched_inputs_are_rejected() {
        let mut bad = Circuit::new(2, 0);
        bad.controlled_phase(0, 1, 0);
        let input = StateVector::basis(2, 0).unwrap();
        assert!(matches!(
            run_exact(&bad, &input),
            Err(ExecError::InvalidCircuit(_))
        ));

        let c = split_then_measure();
        let wide = StateVector::basis(2, 0).unwrap();
        assert!(matches!(
            run_trajectory(&c, &wide, 0),
            Err(ExecError::QubitCountMismatch {
                input: 2,
                circuit: 1
            })
        ));
    }

    #[test]
    fn exact_leaf_probabilities_sum_to_one_on_random_circuits() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let c = crate::testutil::random_valid_circuit(&mut rng);
            let input = StateVector::random(c.n_qubits(), rng.random()).unwrap();
            let dist = run_exact(&c, &input).unwrap();
            assert!((dist.sum() - 1.0).abs() < 1e-10, "sum = {}", dist.sum());
            let t = run_trajectory(&c, &input, rng.random()).unwrap();
            assert!(t.probability_of_path > 0.0 && t.probability_of_path <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn total_variation_basics() {
        let mut c = Circuit::new(1, 1);
        c.measure(0, 0);
        let zero = run_exact(&c, &StateVector::basis(1, 0).unwrap()).unwrap();
        let one = run_exact(&c, &StateVector::basis(1, 1).unwrap()).unwrap();
        assert_eq!(zero.total_variation(&zero), 0.0);
        assert!((zero.total_variation(&one) - 1.0).abs() < 1e-15);
        assert_eq!(zero.total_variation(&one), one.total_variation(&zero));
    }
}
