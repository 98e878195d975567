//! Exact-exponent complex scalars `c · 2^{k/2}`.
//!
//! Every rewrite and every cut produces powers of √2. Keeping the
//! exponent as an integer avoids drifting the mantissa through long
//! chains of `1/√2` factors and keeps very small amplitudes away from
//! underflow.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::phase::Phase;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    coeff: Complex64,
    half_power: i32,
}

impl Scalar {
    pub const fn one() -> Scalar {
        Scalar { coeff: Complex64::new(1.0, 0.0), half_power: 0 }
    }

    pub const fn zero() -> Scalar {
        Scalar { coeff: Complex64::new(0.0, 0.0), half_power: 0 }
    }

    /// `coeff · 2^{half_power/2}`, normalized.
    pub fn new(coeff: Complex64, half_power: i32) -> Scalar {
        Scalar { coeff, half_power }.normalized()
    }

    pub fn from_complex(c: Complex64) -> Scalar {
        Scalar::new(c, 0)
    }

    /// `2^{k/2}`.
    pub fn sqrt2_pow(k: i32) -> Scalar {
        Scalar { coeff: Complex64::new(1.0, 0.0), half_power: k }.normalized()
    }

    /// `e^{iα}`.
    pub fn from_phase(p: Phase) -> Scalar {
        Scalar::new(p.unit(), 0)
    }

    /// `1 + e^{iα}`, the value of an isolated Z-spider.
    pub fn one_plus_phase(p: Phase) -> Scalar {
        Scalar::new(Complex64::new(1.0, 0.0) + p.unit(), 0)
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    pub fn half_power(&self) -> i32 {
        self.half_power
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.re == 0.0 && self.coeff.im == 0.0
    }

    /// Shift whole factors of two between mantissa and exponent so that
    /// `1 ≤ |coeff|_∞ < 2`. Scaling by 2 is exact in binary floating
    /// point, so the represented value is unchanged bit for bit.
    pub fn normalized(mut self) -> Scalar {
        if self.is_zero() || !self.coeff.re.is_finite() || !self.coeff.im.is_finite() {
            if self.is_zero() {
                self.coeff = Complex64::new(0.0, 0.0);
                self.half_power = 0;
            }
            return self;
        }
        let m = self.coeff.re.abs().max(self.coeff.im.abs());
        let e = m.log2().floor() as i32;
        if e != 0 {
            let f = 2f64.powi(-e);
            self.coeff = Complex64::new(self.coeff.re * f, self.coeff.im * f);
            self.half_power += 2 * e;
        }
        // guard against log2 rounding at the band edges
        let m = self.coeff.re.abs().max(self.coeff.im.abs());
        if m >= 2.0 {
            self.coeff *= 0.5;
            self.half_power += 2;
        } else if m < 1.0 {
            self.coeff *= 2.0;
            self.half_power -= 2;
        }
        self
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let whole = self.half_power.div_euclid(2);
        let odd = self.half_power.rem_euclid(2) == 1;
        let mut c = self.coeff * 2f64.powi(whole);
        if odd {
            c *= std::f64::consts::SQRT_2;
        }
        c
    }

    pub fn mul_sqrt2_pow(&mut self, k: i32) {
        if !self.is_zero() {
            self.half_power += k;
        }
    }

    pub fn mul_phase(&mut self, p: Phase) {
        *self = *self * Scalar::from_phase(p);
    }

    pub fn conj(&self) -> Scalar {
        Scalar { coeff: self.coeff.conj(), half_power: self.half_power }
    }

    /// `|self|` as a plain float (may overflow for huge exponents).
    pub fn norm(&self) -> f64 {
        self.to_complex().norm()
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::one()
    }
}

impl Mul for Scalar {
    type Output = Scalar;

    fn mul(self, rhs: Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        Scalar { coeff: self.coeff * rhs.coeff, half_power: self.half_power + rhs.half_power }
            .normalized()
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self = *self * rhs;
    }
}

impl Add for Scalar {
    type Output = Scalar;

    fn add(self, rhs: Scalar) -> Scalar {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        // bring both to the smaller exponent, then the odd half-step (if any)
        // is a single multiplication by √2
        let (hi, lo) = if self.half_power >= rhs.half_power { (self, rhs) } else { (rhs, self) };
        let diff = hi.half_power - lo.half_power;
        if diff > 240 {
            return hi;
        }
        let mut scaled = hi.coeff * 2f64.powi(diff / 2);
        if diff % 2 == 1 {
            scaled *= std::f64::consts::SQRT_2;
        }
        Scalar { coeff: scaled + lo.coeff, half_power: lo.half_power }.normalized()
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = *self + rhs;
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        Scalar { coeff: -self.coeff, half_power: self.half_power }
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |a, b| a * b)
    }
}

impl From<Complex64> for Scalar {
    fn from(c: Complex64) -> Self {
        Scalar::from_complex(c)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})·√2^{}", self.coeff, self.half_power)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
    }

    #[test]
    fn unit_and_zero() {
        let x = Scalar::new(Complex64::new(3.0, -1.0), 3);
        assert_eq!(x * Scalar::one(), x);
        assert!((x * Scalar::zero()).is_zero());
        assert_eq!(x + Scalar::zero(), x);
    }

    #[test]
    fn sqrt2_powers() {
        assert!(close(Scalar::sqrt2_pow(1).to_complex(), Complex64::new(2f64.sqrt(), 0.0)));
        assert!(close(Scalar::sqrt2_pow(-3).to_complex(), Complex64::new(2f64.powf(-1.5), 0.0)));
        let mut s = Scalar::one();
        s.mul_sqrt2_pow(-1);
        s.mul_sqrt2_pow(-1);
        assert_eq!(s.to_complex(), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn addition_with_odd_exponent_gap() {
        let a = Scalar::sqrt2_pow(1);
        let b = Scalar::one();
        assert!(close((a + b).to_complex(), Complex64::new(1.0 + 2f64.sqrt(), 0.0)));
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (-4.0f64..4.0, -4.0f64..4.0, -20i32..20).prop_map(|(re, im, k)| Scalar::new(Complex64::new(re, im), k))
    }

    proptest! {
        #[test]
        fn mul_associative_commutative(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert!(close(((a * b) * c).to_complex(), (a * (b * c)).to_complex()));
            prop_assert!(close((a * b).to_complex(), (b * a).to_complex()));
        }

        #[test]
        fn normalization_is_exact(re in -1e6f64..1e6, im in -1e6f64..1e6, k in -40i32..40) {
            let raw = Scalar { coeff: Complex64::new(re, im), half_power: 2 * k };
            let n = raw.normalized();
            // whole powers of two only: value identical bit for bit
            prop_assert_eq!(n.to_complex(), raw.to_complex());
            prop_assert_eq!(n.normalized(), n);
            prop_assert_eq!((n.half_power - raw.half_power).rem_euclid(2), 0);
            if !n.is_zero() {
                let m = n.coeff.re.abs().max(n.coeff.im.abs());
                prop_assert!((1.0..2.0).contains(&m));
            }
        }
    }
}
