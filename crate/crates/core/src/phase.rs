//! Spider phases.
//!
//! A phase is either an exact rational multiple of π, kept reduced in
//! `[0, 2)`, or a generic real angle in `[0, 2π)`. Clifford detection
//! only ever looks at the exact branch, so a generic real is never
//! classified as Clifford even if it happens to be numerically close
//! to a multiple of π/2.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Phase {
    /// `num/den · π` with `gcd(num, den) = 1`, `den > 0` and `0 ≤ num/den < 2`.
    Exact { num: i64, den: i64 },
    /// Angle in radians, normalized to `[0, 2π)`.
    Real(f64),
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Phase {
    pub const fn zero() -> Phase {
        Phase::Exact { num: 0, den: 1 }
    }

    pub const fn pi() -> Phase {
        Phase::Exact { num: 1, den: 1 }
    }

    /// The phase `num/den · π`, reduced modulo 2π.
    ///
    /// Panics if `den == 0`.
    pub fn rational(num: i64, den: i64) -> Phase {
        assert!(den != 0, "phase denominator must be non-zero");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num, den).max(1);
        num /= g;
        den /= g;
        num = num.rem_euclid(2 * den);
        Phase::Exact { num, den }
    }

    /// A generic real phase. Never treated as Clifford.
    pub fn real(radians: f64) -> Phase {
        let mut r = radians.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if r >= TAU {
            r = 0.0;
        }
        Phase::Real(r)
    }

    /// `k · π/2`.
    pub fn quarter_turns(k: i64) -> Phase {
        Phase::rational(k, 2)
    }

    pub fn radians(&self) -> f64 {
        match *self {
            Phase::Exact { num, den } => num as f64 / den as f64 * PI,
            Phase::Real(r) => r,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Phase::Exact { .. })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Phase::Exact { num: 0, .. })
    }

    /// Exact multiple of π/2.
    pub fn is_clifford(&self) -> bool {
        matches!(self, Phase::Exact { den, .. } if *den == 1 || *den == 2)
    }

    /// Exact multiple of π.
    pub fn is_pauli(&self) -> bool {
        matches!(self, Phase::Exact { den: 1, .. })
    }

    /// Exactly ±π/2.
    pub fn is_proper_clifford(&self) -> bool {
        matches!(self, Phase::Exact { den: 2, .. })
    }

    /// For a Pauli phase, `0` or `1` such that the phase is that many π.
    pub fn pauli_bit(&self) -> Option<u8> {
        match *self {
            Phase::Exact { num, den: 1 } => Some(num as u8),
            _ => None,
        }
    }

    /// `e^{i·phase}`.
    pub fn unit(&self) -> num_complex::Complex64 {
        match *self {
            // exact values for the Clifford quadrant points
            Phase::Exact { num, den: 1 } => {
                if num == 0 {
                    num_complex::Complex64::new(1.0, 0.0)
                } else {
                    num_complex::Complex64::new(-1.0, 0.0)
                }
            }
            Phase::Exact { num, den: 2 } => {
                if num == 1 {
                    num_complex::Complex64::new(0.0, 1.0)
                } else {
                    num_complex::Complex64::new(0.0, -1.0)
                }
            }
            _ => num_complex::Complex64::from_polar(1.0, self.radians()),
        }
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::zero()
    }
}

impl Add for Phase {
    type Output = Phase;

    fn add(self, rhs: Phase) -> Phase {
        match (self, rhs) {
            (Phase::Exact { num: a, den: b }, Phase::Exact { num: c, den: d }) => {
                // keep the intermediate small: lcm instead of b*d
                let g = gcd(b, d);
                let l = b / g * d;
                Phase::rational(a * (l / b) + c * (l / d), l)
            }
            (x, y) => Phase::real(x.radians() + y.radians()),
        }
    }
}

impl AddAssign for Phase {
    fn add_assign(&mut self, rhs: Phase) {
        *self = *self + rhs;
    }
}

impl Neg for Phase {
    type Output = Phase;

    fn neg(self) -> Phase {
        match self {
            Phase::Exact { num, den } => Phase::rational(-num, den),
            Phase::Real(r) => Phase::real(-r),
        }
    }
}

impl Sub for Phase {
    type Output = Phase;

    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Phase::Exact { num: 0, .. } => write!(f, "0"),
            Phase::Exact { num, den: 1 } => write!(f, "{num}π"),
            Phase::Exact { num, den } => write!(f, "{num}π/{den}"),
            Phase::Real(r) => write!(f, "{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_is_reduced_mod_two() {
        assert_eq!(Phase::rational(5, 2), Phase::rational(1, 2));
        assert_eq!(Phase::rational(-1, 2), Phase::Exact { num: 3, den: 2 });
        assert_eq!(Phase::rational(4, 4), Phase::pi());
        assert_eq!(Phase::rational(3, -4), Phase::Exact { num: 5, den: 4 });
        assert_eq!(Phase::rational(0, 7), Phase::zero());
    }

    #[test]
    fn classification() {
        assert!(Phase::zero().is_pauli());
        assert!(Phase::pi().is_clifford());
        assert!(Phase::rational(1, 2).is_clifford());
        assert!(!Phase::rational(1, 2).is_pauli());
        assert!(!Phase::rational(1, 4).is_clifford());
        // numerically pi/2 but generic: never Clifford
        assert!(!Phase::real(PI / 2.0).is_clifford());
        assert!(!Phase::real(0.0).is_pauli());
    }

    #[test]
    fn mixed_addition_falls_back_to_real() {
        let p = Phase::rational(1, 4) + Phase::real(0.5);
        assert!(!p.is_exact());
        assert!((p.radians() - (PI / 4.0 + 0.5)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn exact_addition_stays_exact(a in -50i64..50, b in 1i64..12, c in -50i64..50, d in 1i64..12) {
            let s = Phase::rational(a, b) + Phase::rational(c, d);
            prop_assert!(s.is_exact());
            let expect = (a as f64 / b as f64 + c as f64 / d as f64) * PI;
            let diff = (s.radians() - expect.rem_euclid(TAU)).abs();
            prop_assert!(diff < 1e-9 || (diff - TAU).abs() < 1e-9);
            if let Phase::Exact { num, den } = s {
                prop_assert!(num >= 0 && num < 2 * den);
                prop_assert_eq!(gcd(num, den).max(1), 1);
            }
        }

        #[test]
        fn real_stays_in_range(x in -100.0f64..100.0) {
            let r = Phase::real(x).radians();
            prop_assert!((0.0..TAU).contains(&r));
        }
    }
}
