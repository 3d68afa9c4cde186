//! Exact phase arithmetic on dyadic rationals.
//!
//! Every phase that appears in the split and controlled-phase gates, and in
//! the feedforward recursion, is a dyadic rational number of *turns* (the
//! physical rotation angle is `2π` times the value). Keeping phases as exact
//! `num / 2^k` pairs means circuit construction, rewriting, and feedforward
//! bookkeeping never touch floating point; floats enter only when a phase is
//! finally turned into a complex amplitude.

use std::fmt;
use std::ops::{Add, AddAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// An exact phase in turns: `num / 2^log2_den`, always reduced modulo 1.
///
/// Canonical form: the value lies in `[0, 1)` and the numerator is odd, with
/// zero stored as `0 / 2^0`. All constructors and arithmetic maintain this.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPhase", into = "RawPhase")]
pub struct DyadicPhase {
    num: u64,
    log2_den: u32,
}

/// Largest representable `log2_den`. Bounds the numerator below `2^63` so
/// that addition over a common denominator cannot overflow `u64`.
pub const MAX_LOG2_DEN: u32 = 63;

impl DyadicPhase {
    /// The canonical zero phase.
    pub const ZERO: Self = Self {
        num: 0,
        log2_den: 0,
    };

    /// Phase of half a turn (the `-1` phase factor).
    pub const HALF: Self = Self {
        num: 1,
        log2_den: 1,
    };

    /// Phase of a quarter turn (the `i` phase factor).
    pub const QUARTER: Self = Self {
        num: 1,
        log2_den: 2,
    };

    /// Builds `num / 2^log2_den`, reduced modulo 1 and canonicalized.
    ///
    /// Panics if `log2_den` exceeds [`MAX_LOG2_DEN`]; use [`checked_new`]
    /// for untrusted input.
    ///
    /// [`checked_new`]: Self::checked_new
    pub fn new(num: u64, log2_den: u32) -> Self {
        Self::checked_new(num, log2_den)
            .unwrap_or_else(|| panic!("phase denominator 2^{log2_den} exceeds 2^{MAX_LOG2_DEN}"))
    }

    /// Like [`new`](Self::new) but returns `None` when `log2_den` is too large.
    pub fn checked_new(mut num: u64, mut log2_den: u32) -> Option<Self> {
        if log2_den > MAX_LOG2_DEN {
            return None;
        }
        num &= (1u64 << log2_den) - 1;
        while num != 0 && num & 1 == 0 {
            num >>= 1;
            log2_den -= 1;
        }
        if num == 0 {
            log2_den = 0;
        }
        Some(Self { num, log2_den })
    }

    /// The phase `2^-m`. With `m = 0` this is a full turn, i.e. zero.
    pub fn pow2_recip(m: u32) -> Self {
        Self::new(1, m)
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn log2_denominator(self) -> u32 {
        self.log2_den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Exactly half of this phase. Cannot wrap, so the result is `φ/2` with
    /// no reduction. Panics if the denominator would exceed [`MAX_LOG2_DEN`].
    pub fn halve(self) -> Self {
        if self.num == 0 {
            return Self::ZERO;
        }
        assert!(
            self.log2_den < MAX_LOG2_DEN,
            "halving {self} exceeds the 2^{MAX_LOG2_DEN} denominator limit"
        );
        Self {
            num: self.num,
            log2_den: self.log2_den + 1,
        }
    }

    /// The feedforward recursion step: `(φ/2 + c/4) mod 1` for a measured
    /// bit `c`. Iterating this from zero over bits `c_0 .. c_{k-1}` yields
    /// exactly `Σ_j c_j / 2^(k+1-j)`.
    pub fn halve_plus(self, c: bool) -> Self {
        let shifted = self.halve();
        if c {
            shifted + Self::QUARTER
        } else {
            shifted
        }
    }

    /// The phase as a fraction of a turn, in `[0, 1)`.
    pub fn turns(self) -> f64 {
        self.num as f64 / (1u64 << self.log2_den) as f64
    }

    /// The phase as an angle in radians, `2π` times [`turns`](Self::turns).
    pub fn angle(self) -> f64 {
        std::f64::consts::TAU * self.turns()
    }

    /// The unit phase factor `e^(2πiφ)`.
    pub fn phasor(self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle())
    }
}

impl Add for DyadicPhase {
    type Output = Self;

    /// Exact modular addition of turns.
    fn add(self, rhs: Self) -> Self {
        let den = self.log2_den.max(rhs.log2_den);
        let num = (self.num << (den - self.log2_den)) + (rhs.num << (den - rhs.log2_den));
        Self::new(num, den)
    }
}

impl AddAssign for DyadicPhase {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl fmt::Display for DyadicPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.log2_den)
        }
    }
}

impl fmt::Debug for DyadicPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DyadicPhase({self})")
    }
}

impl Default for DyadicPhase {
    fn default() -> Self {
        Self::ZERO
    }
}

/// On-disk encoding: a phase is always an exact integer pair, never a float.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhase {
    num: u64,
    log2den: u32,
}

impl TryFrom<RawPhase> for DyadicPhase {
    type Error = String;

    fn try_from(raw: RawPhase) -> Result<Self, String> {
        DyadicPhase::checked_new(raw.num, raw.log2den).ok_or_else(|| {
            format!(
                "phase log2den must be at most {MAX_LOG2_DEN}, got {}",
                raw.log2den
            )
        })
    }
}

impl From<DyadicPhase> for RawPhase {
    fn from(phase: DyadicPhase) -> Self {
        RawPhase {
            num: phase.num,
            log2den: phase.log2_den,
        }
    }
}
