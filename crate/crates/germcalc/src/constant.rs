//! Exact constants of the form `q + r*pi` with `q`, `r` rational.
//!
//! Pi enters only through domain bounds such as `pi/2`; keeping the pi
//! coefficient symbolic makes comparisons against such bounds exact.  Since
//! pi is irrational the representation is unique, so equality is structural
//! and the sign is decidable by evaluating pi to sufficient precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::interval::{Interval, IntervalCtx};

pub type Rational = BigRational;

/// `rational_part + pi_coefficient * pi`, both exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactConstant {
    rational_part: Rational,
    pi_coefficient: Rational,
}

impl ExactConstant {
    pub fn new(rational_part: Rational, pi_coefficient: Rational) -> Self {
        ExactConstant { rational_part, pi_coefficient }
    }

    pub fn from_rational(q: Rational) -> Self {
        ExactConstant { rational_part: q, pi_coefficient: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn pi() -> Self {
        ExactConstant { rational_part: Rational::zero(), pi_coefficient: Rational::one() }
    }

    pub fn pi_times(r: Rational) -> Self {
        ExactConstant { rational_part: Rational::zero(), pi_coefficient: r }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational_part
    }

    pub fn pi_coefficient(&self) -> &Rational {
        &self.pi_coefficient
    }

    pub fn is_zero(&self) -> bool {
        self.rational_part.is_zero() && self.pi_coefficient.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rational_part.is_one() && self.pi_coefficient.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.pi_coefficient.is_zero()
    }

    /// The rational value, if the pi coefficient vanishes.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            Some(&self.rational_part)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        ExactConstant {
            rational_part: &self.rational_part + &other.rational_part,
            pi_coefficient: &self.pi_coefficient + &other.pi_coefficient,
        }
    }

    pub fn neg(&self) -> Self {
        ExactConstant {
            rational_part: -self.rational_part.clone(),
            pi_coefficient: -self.pi_coefficient.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product, when it stays inside `Q + Q*pi` (one factor rational).
    pub fn mul(&self, other: &Self) -> Option<Self> {
        if other.is_rational() {
            Some(ExactConstant {
                rational_part: &self.rational_part * &other.rational_part,
                pi_coefficient: &self.pi_coefficient * &other.rational_part,
            })
        } else if self.is_rational() {
            other.mul(self)
        } else {
            None
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        ExactConstant {
            rational_part: &self.rational_part * q,
            pi_coefficient: &self.pi_coefficient * q,
        }
    }

    /// Reciprocal, when it stays inside the representation.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return Some(Self::from_rational(self.rational_part.recip()));
        }
        None
    }

    /// Exact sign.  Decidable because pi is irrational: when both parts are
    /// nonzero the value `q + r*pi` vanishes for no rationals, so some finite
    /// precision separates it from zero.
    pub fn sign(&self) -> Ordering {
        if self.pi_coefficient.is_zero() {
            return rational_sign(&self.rational_part);
        }
        if self.rational_part.is_zero() {
            return rational_sign(&self.pi_coefficient);
        }
        let mut prec = 128usize;
        loop {
            let mut ctx = IntervalCtx::new(prec);
            let iv = self.to_interval(&mut ctx);
            if let Some(s) = iv.sign() {
                return s;
            }
            prec *= 2;
            assert!(prec <= 1 << 24, "pi sign evaluation runaway");
        }
    }

    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        self.sub(other).sign()
    }

    pub fn to_interval(&self, ctx: &mut IntervalCtx) -> Interval {
        let q = ctx.from_rational(&self.rational_part);
        if self.pi_coefficient.is_zero() {
            return q;
        }
        let r = ctx.from_rational(&self.pi_coefficient);
        let pi = ctx.pi();
        q.add(&r.mul(&pi, ctx), ctx)
    }

    pub fn to_f64(&self) -> f64 {
        let mut ctx = IntervalCtx::new(128);
        self.to_interval(&mut ctx).midpoint_f64()
    }
}

pub fn rational_sign(q: &Rational) -> Ordering {
    if q.is_zero() {
        Ordering::Equal
    } else if q.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

impl fmt::Debug for ExactConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExactConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pi_coefficient.is_zero() {
            return write!(f, "{}", fmt_rational(&self.rational_part));
        }
        let pi_part = if self.pi_coefficient.is_one() {
            "pi".to_string()
        } else if self.pi_coefficient == -Rational::one() {
            "-pi".to_string()
        } else if self.pi_coefficient.is_integer() {
            format!("{}*pi", self.pi_coefficient)
        } else {
            format!("{}*pi/{}", self.pi_coefficient.numer(), self.pi_coefficient.denom())
        };
        if self.rational_part.is_zero() {
            write!(f, "{}", pi_part)
        } else if pi_part.starts_with('-') {
            write!(f, "{} - {}", fmt_rational(&self.rational_part), &pi_part[1..])
        } else {
            write!(f, "{} + {}", fmt_rational(&self.rational_part), pi_part)
        }
    }
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_mixed_constant() {
        // 22/7 - pi > 0, 3 - pi < 0
        let c = ExactConstant::new(Rational::new(22.into(), 7.into()), -Rational::one());
        assert_eq!(c.sign(), Ordering::Greater);
        let d = ExactConstant::new(Rational::from_integer(3.into()), -Rational::one());
        assert_eq!(d.sign(), Ordering::Less);
    }

    #[test]
    fn equality_is_structural() {
        let a = ExactConstant::from_frac(1, 2);
        let b = ExactConstant::from_frac(2, 4);
        assert_eq!(a, b);
        assert_ne!(a, ExactConstant::pi_times(Rational::new(1.into(), 2.into())));
    }

    #[test]
    fn mul_closure() {
        let pi = ExactConstant::pi();
        assert!(pi.mul(&pi).is_none());
        let two = ExactConstant::from_int(2);
        let two_pi = pi.mul(&two).unwrap();
        assert_eq!(two_pi.pi_coefficient(), &Rational::from_integer(2.into()));
    }
}
