//! Dense statevector simulation.
//!
//! A [`StateVector`] stores all `2^n` complex amplitudes of an `n`-qubit
//! register. Basis index `b` encodes qubit `j` as bit `j` of `b`
//! (little-endian), so amplitude `b` belongs to the product state whose
//! qubit-`j` value is `(b >> j) & 1`.
//!
//! The gate set matches the circuit IR: the one-bit split gate, the
//! two-qubit controlled phase, and computational-basis measurement with an
//! explicit random draw so runs can be replayed deterministically.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Hard ceiling on register width: `2^24` amplitudes (256 MiB) is already
/// far past the point where dense simulation makes sense on a desktop.
pub const MAX_QUBITS: usize = 24;

/// Branch probabilities below this are treated as exactly zero: a dead
/// measurement branch must never be selected or renormalized.
pub(crate) const BRANCH_EPSILON: f64 = 1e-15;

/// Errors from statevector construction and gate application.
#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("qubit {target} out of range (state has {n_qubits} qubits)")]
    TargetOutOfRange { target: usize, n_qubits: usize },
    #[error("controlled-phase operands must be distinct (both are qubit {qubit})")]
    OperandsEqual { qubit: usize },
    #[error("controlled-phase m must be ≥ 1")]
    ZeroM,
    #[error("{n_qubits} qubits exceeds the dense-simulation limit of {MAX_QUBITS}")]
    TooManyQubits { n_qubits: usize },
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, n_qubits: usize },
    #[error("amplitude list length {len} is not a power of two")]
    LengthNotPowerOfTwo { len: usize },
    #[error("squared norm {norm_sq} is too far from 1 to be a typo (tolerance 1e-3)")]
    NotNormalized { norm_sq: f64 },
}

/// A normalized pure state of `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, StateError> {
        if n_qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits { n_qubits });
        }
        let len = 1usize << n_qubits;
        if index >= len {
            return Err(StateError::BasisIndexOutOfRange { index, n_qubits });
        }
        let mut amps = vec![Complex64::ZERO; len];
        amps[index] = Complex64::ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state from explicit amplitudes.
    ///
    /// The length must be a power of two. The squared norm must be within
    /// `1e-3` of 1 — loose enough to accept hand-typed values like `0.707`,
    /// tight enough to catch lists that were never meant to be normalized —
    /// and the state is then renormalized exactly.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, StateError> {
        if !amps.len().is_power_of_two() {
            return Err(StateError::LengthNotPowerOfTwo { len: amps.len() });
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits { n_qubits });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-3 {
            return Err(StateError::NotNormalized { norm_sq });
        }
        let mut state = Self { n_qubits, amps };
        state.renormalize();
        Ok(state)
    }

    /// A reproducible pseudo-random normalized state: independent standard
    /// Gaussian real and imaginary parts, then exact renormalization. This
    /// samples the Haar-uniform distribution on pure states.
    pub fn random(n_qubits: usize, seed: u64) -> Result<Self, StateError> {
        if n_qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits { n_qubits });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << n_qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut state = Self { n_qubits, amps };
        state.renormalize();
        Ok(state)
    }

    /// Wraps amplitudes that are already normalized by construction
    /// (callers inside the crate compute them analytically).
    pub(crate) fn from_normalized_amplitudes(amps: Vec<Complex64>) -> Self {
        debug_assert!(amps.len().is_power_of_two());
        let n_qubits = amps.len().trailing_zeros() as usize;
        let state = Self { n_qubits, amps };
        debug_assert!((state.norm() - 1.0).abs() < 1e-9, "norm = {}", state.norm());
        state
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `|amp|²` for every basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// The 2-norm, 1 for any healthy state.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn renormalize(&mut self) {
        let scale = 1.0 / self.norm();
        for amp in &mut self.amps {
            *amp *= scale;
        }
    }

    fn check_target(&self, target: usize) -> Result<(), StateError> {
        if target >= self.n_qubits {
            Err(StateError::TargetOutOfRange {
                target,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    /// Applies the one-bit split gate with phase `phi` (in turns) to
    /// `target`: `|0⟩ → (|0⟩+|1⟩)/√2`, `|1⟩ → w(|0⟩−|1⟩)/√2` with
    /// `w = e^(2πi·phi)`.
    pub fn apply_one_bit_split(
        &mut self,
        target: usize,
        phi: crate::phase::DyadicPhase,
    ) -> Result<(), StateError> {
        self.check_target(target)?;
        let w = phi.phasor();
        let mask = 1usize << target;
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        for b in 0..self.amps.len() {
            if b & mask == 0 {
                let x = self.amps[b];
                let y = w * self.amps[b | mask];
                self.amps[b] = (x + y) * scale;
                self.amps[b | mask] = (x - y) * scale;
            }
        }
        Ok(())
    }

    /// Applies the symmetric controlled phase: every basis state with both
    /// qubits equal to 1 picks up `e^(2πi/2^m)`; everything else is
    /// untouched.
    pub fn apply_controlled_phase(&mut self, a: usize, b: usize, m: u32) -> Result<(), StateError> {
        self.check_target(a)?;
        self.check_target(b)?;
        if a == b {
            return Err(StateError::OperandsEqual { qubit: a });
        }
        if m == 0 {
            return Err(StateError::ZeroM);
        }
        // exp2 keeps huge m finite: the factor limits smoothly to 1.
        let angle = std::f64::consts::TAU * (-(f64::from(m))).exp2();
        let factor = Complex64::from_polar(1.0, angle);
        let mask = (1usize << a) | (1usize << b);
        for (index, amp) in self.amps.iter_mut().enumerate() {
            if index & mask == mask {
                *amp *= factor;
            }
        }
        Ok(())
    }

    /// Probability that measuring `target` yields 1.
    pub fn prob_one(&self, target: usize) -> Result<f64, StateError> {
        self.check_target(target)?;
        let mask = 1usize << target;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(b, _)| b & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Measures `target` in the computational basis using the explicit
    /// draw `u ∈ [0,1)`: outcome 1 iff `u < P(1)`. The state collapses and
    /// renormalizes in place; the return value is `(outcome, branch
    /// probability)`. Branches with probability below `1e-15` are never
    /// selected, so collapse cannot divide by (numerical) zero.
    pub fn measure(&mut self, target: usize, u: f64) -> Result<(u8, f64), StateError> {
        let p_one = self.prob_one(target)?;
        // A draw can only stray outside [0,1] if the caller let the norm rot.
        debug_assert!(
            (-1e-12..=1.0 + 1e-12).contains(&p_one),
            "prob_one = {p_one}"
        );
        let decision = if p_one < BRANCH_EPSILON {
            0.0
        } else if p_one > 1.0 - BRANCH_EPSILON {
            1.0
        } else {
            p_one
        };
        let outcome = u8::from(u < decision);
        let branch_probability = self.project(target, outcome);
        Ok((outcome, branch_probability))
    }

    /// Collapses `target` to `outcome`, renormalizes, and returns the
    /// branch probability. The caller must only project onto reachable
    /// branches.
    pub(crate) fn project(&mut self, target: usize, outcome: u8) -> f64 {
        let mask = 1usize << target;
        let keep = (outcome as usize) << target;
        let mut branch_probability = 0.0;
        for (b, amp) in self.amps.iter_mut().enumerate() {
            if b & mask == keep {
                branch_probability += amp.norm_sqr();
            } else {
                *amp = Complex64::ZERO;
            }
        }
        debug_assert!(branch_probability > 0.0, "projected onto a dead branch");
        let scale = 1.0 / branch_probability.sqrt();
        for amp in &mut self.amps {
            *amp *= scale;
        }
        branch_probability
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::DyadicPhase;
    use proptest::prelude::*;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn assert_amps_close(state: &StateVector, expected: &[Complex64], tol: f64) {
        assert_eq!(state.amplitudes().len(), expected.len());
        for (got, want) in state.amplitudes().iter().zip(expected) {
            assert!((got - want).norm() <= tol, "got {got}, want {want}");
        }
    }

    #[test]
    fn split_on_zero_gives_uniform_pair() {
        let mut s = StateVector::basis(1, 0).unwrap();
        s.apply_one_bit_split(0, DyadicPhase::ZERO).unwrap();
        assert_amps_close(
            &s,
            &[
                Complex64::new(SQRT_HALF, 0.0),
                Complex64::new(SQRT_HALF, 0.0),
            ],
            1e-15,
        );
    }

    #[test]
    fn split_on_one_gives_signed_pair() {
        let mut s = StateVector::basis(1, 1).unwrap();
        s.apply_one_bit_split(0, DyadicPhase::ZERO).unwrap();
        assert_amps_close(
            &s,
            &[
                Complex64::new(SQRT_HALF, 0.0),
                Complex64::new(-SQRT_HALF, 0.0),
            ],
            1e-15,
        );
    }

    #[test]
    fn split_phase_multiplies_the_one_branch() {
        // |1⟩ with φ = 1/4 → i(|0⟩−|1⟩)/√2.
        let mut s = StateVector::basis(1, 1).unwrap();
        s.apply_one_bit_split(0, DyadicPhase::QUARTER).unwrap();
        assert_amps_close(
            &s,
            &[
                Complex64::new(0.0, SQRT_HALF),
                Complex64::new(0.0, -SQRT_HALF),
            ],
            1e-15,
        );
    }

    #[test]
    fn split_acts_on_the_named_tensor_factor() {
        let mut s = StateVector::basis(2, 0).unwrap();
        s.apply_one_bit_split(1, DyadicPhase::ZERO).unwrap();
        let h = Complex64::new(SQRT_HALF, 0.0);
        assert_amps_close(&s, &[h, Complex64::ZERO, h, Complex64::ZERO], 1e-15);
    }

    #[test]
    fn controlled_phase_special_values() {
        // m = 1 flips the sign of |11⟩.
        let mut s = StateVector::basis(2, 3).unwrap();
        s.apply_controlled_phase(0, 1, 1).unwrap();
        let mut expected = vec![Complex64::ZERO; 4];
        expected[3] = -Complex64::ONE;
        assert_amps_close(&s, &expected, 1e-15);

        // m = 2 multiplies |11⟩ by i.
        let mut s = StateVector::basis(2, 3).unwrap();
        s.apply_controlled_phase(0, 1, 2).unwrap();
        expected[3] = Complex64::I;
        assert_amps_close(&s, &expected, 1e-15);

        // |01⟩ is untouched for every m.
        for m in 1..=8 {
            let mut s = StateVector::basis(2, 1).unwrap();
            s.apply_controlled_phase(0, 1, m).unwrap();
            assert_eq!(s, StateVector::basis(2, 1).unwrap());
        }
    }

    #[test]
    fn controlled_phase_rejects_bad_operands() {
        let mut s = StateVector::basis(2, 0).unwrap();
        assert_eq!(
            s.apply_controlled_phase(0, 0, 1),
            Err(StateError::OperandsEqual { qubit: 0 })
        );
        assert_eq!(s.apply_controlled_phase(0, 1, 0), Err(StateError::ZeroM));
        assert_eq!(
            s.apply_controlled_phase(0, 2, 1),
            Err(StateError::TargetOutOfRange {
                target: 2,
                n_qubits: 2
            })
        );
    }

    #[test]
    fn measure_deterministic_state() {
        let mut s = StateVector::basis(1, 1).unwrap();
        let (outcome, p) = s.measure(0, 0.3).unwrap();
        assert_eq!(outcome, 1);
        assert_eq!(p, 1.0);
        assert_eq!(s, StateVector::basis(1, 1).unwrap());
    }

    #[test]
    fn measure_uniform_state_follows_the_draw() {
        let uniform = || {
            let mut s = StateVector::basis(1, 0).unwrap();
            s.apply_one_bit_split(0, DyadicPhase::ZERO).unwrap();
            s
        };
        let mut s = uniform();
        let (outcome, p) = s.measure(0, 0.49).unwrap();
        assert_eq!(outcome, 1);
        assert!((p - 0.5).abs() < 1e-15);
        assert_amps_close(&s, &[Complex64::ZERO, Complex64::ONE], 1e-15);

        let mut s = uniform();
        let (outcome, p) = s.measure(0, 0.51).unwrap();
        assert_eq!(outcome, 0);
        assert!((p - 0.5).abs() < 1e-15);
        assert_amps_close(&s, &[Complex64::ONE, Complex64::ZERO], 1e-15);
    }

    #[test]
    fn constructors_enforce_their_domains() {
        assert_eq!(
            StateVector::basis(1, 2).unwrap_err(),
            StateError::BasisIndexOutOfRange {
                index: 2,
                n_qubits: 1
            }
        );
        assert_eq!(
            StateVector::basis(25, 0).unwrap_err(),
            StateError::TooManyQubits { n_qubits: 25 }
        );
        assert_eq!(
            StateVector::from_amplitudes(vec![Complex64::ONE; 3]).unwrap_err(),
            StateError::LengthNotPowerOfTwo { len: 3 }
        );
        assert!(matches!(
            StateVector::from_amplitudes(vec![Complex64::new(0.5, 0.0); 2]).unwrap_err(),
            StateError::NotNormalized { .. }
        ));
    }

    #[test]
    fn from_amplitudes_accepts_hand_typed_roots_and_renormalizes() {
        let h = Complex64::new(0.707, 0.0);
        let s = StateVector::from_amplitudes(vec![h, h]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!((s.amplitudes()[0].re - SQRT_HALF).abs() < 1e-6);
    }

    #[test]
    fn random_states_are_normalized_and_seed_deterministic() {
        let a = StateVector::random(4, 7).unwrap();
        let b = StateVector::random(4, 7).unwrap();
        let c = StateVector::random(4, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prob_one_sums_the_upper_branch() {
        let amps = vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
        ];
        let s = StateVector::from_amplitudes(amps).unwrap();
        assert!((s.prob_one(0).unwrap() - 0.5).abs() < 1e-15);
        assert!((s.prob_one(1).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            s.prob_one(2),
            Err(StateError::TargetOutOfRange {
                target: 2,
                n_qubits: 2
            })
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn split_preserves_norm(seed in any::<u64>(), n in 1usize..=10, target_raw in 0usize..10, num in any::<u64>(), den in 0u32..=12) {
            let target = target_raw % n;
            let mut s = StateVector::random(n, seed).unwrap();
            s.apply_one_bit_split(target, crate::phase::DyadicPhase::new(num, den)).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn controlled_phase_preserves_norm_and_is_symmetric(
            seed in any::<u64>(), n in 2usize..=10, a_raw in 0usize..10, b_off in 1usize..10, m in 1u32..=16,
        ) {
            let a = a_raw % n;
            let b = (a + (b_off % (n - 1)) + 1) % n;
            let mut s1 = StateVector::random(n, seed).unwrap();
            let mut s2 = s1.clone();
            s1.apply_controlled_phase(a, b, m).unwrap();
            s2.apply_controlled_phase(b, a, m).unwrap();
            prop_assert!((s1.norm() - 1.0).abs() < 1e-12);
            prop_assert_eq!(s1, s2);
        }

        #[test]
        fn plain_split_is_self_inverse(seed in any::<u64>(), n in 1usize..=8, target_raw in 0usize..8) {
            let target = target_raw % n;
            let original = StateVector::random(n, seed).unwrap();
            let mut s = original.clone();
            s.apply_one_bit_split(target, crate::phase::DyadicPhase::ZERO).unwrap();
            s.apply_one_bit_split(target, crate::phase::DyadicPhase::ZERO).unwrap();
            for (got, want) in s.amplitudes().iter().zip(original.amplitudes()) {
                prop_assert!((got - want).norm() < 1e-14);
            }
        }
    }
}
