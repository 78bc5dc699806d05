//! Certified real interval arithmetic on arbitrary-precision floats.
//!
//! Every operation rounds the lower endpoint down and the upper endpoint up,
//! so the true real value is always enclosed.  Overflow surfaces as an
//! infinite endpoint, which callers treat as precision exhaustion rather than
//! a silent saturation.

use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_rational::BigRational;

const DOWN: RoundingMode = RoundingMode::Down;
const UP: RoundingMode = RoundingMode::Up;

/// Shared precision and constants cache for interval computations.
pub struct IntervalCtx {
    pub prec: usize,
    consts: Consts,
}

impl IntervalCtx {
    pub fn new(prec: usize) -> Self {
        IntervalCtx { prec, consts: Consts::new().expect("constants cache") }
    }

    pub fn pi(&mut self) -> Interval {
        let lo = self.consts.pi(self.prec, DOWN);
        let hi = self.consts.pi(self.prec, UP);
        Interval { lo, hi }
    }

    pub fn from_i64(&self, v: i64) -> Interval {
        let x = BigFloat::from_i64(v, self.prec);
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_f64(&self, v: f64) -> Interval {
        let x = BigFloat::from_f64(v, self.prec);
        Interval { lo: x.clone(), hi: x }
    }

    /// Exact conversion of a big rational, with outward rounding of the quotient.
    pub fn from_rational(&mut self, q: &BigRational) -> Interval {
        let num = bigint_to_bigfloat(q.numer(), self.prec);
        let den = bigint_to_bigfloat(q.denom(), self.prec);
        Interval {
            lo: num.div(&den, self.prec, DOWN),
            hi: num.div(&den, self.prec, UP),
        }
    }

    pub fn consts(&mut self) -> &mut Consts {
        &mut self.consts
    }
}

fn bigint_to_bigfloat(n: &num_bigint::BigInt, prec: usize) -> BigFloat {
    // Build from the decimal representation; exact when precision suffices,
    // otherwise the interval endpoints absorb the rounding.
    let s = n.to_string();
    let p = prec.max(64 + 4 * s.len());
    let mut cc = Consts::new().expect("constants cache");
    BigFloat::parse(&s, astro_float::Radix::Dec, p, RoundingMode::ToEven, &mut cc)
}

#[derive(Clone, Debug)]
pub struct Interval {
    pub lo: BigFloat,
    pub hi: BigFloat,
}

impl Interval {
    pub fn point(x: BigFloat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn is_finite(&self) -> bool {
        !(self.lo.is_inf() || self.hi.is_inf() || self.lo.is_nan() || self.hi.is_nan())
    }

    /// Strict sign of every point of the interval, if uniform.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_nan() || self.hi.is_nan() {
            return None;
        }
        if self.lo.is_positive() && !self.lo.is_zero() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() && !self.hi.is_zero() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.sign().map_or(true, |s| s == Ordering::Equal)
    }

    pub fn add(&self, other: &Self, ctx: &IntervalCtx) -> Self {
        Interval {
            lo: self.lo.add(&other.lo, ctx.prec, DOWN),
            hi: self.hi.add(&other.hi, ctx.prec, UP),
        }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn sub(&self, other: &Self, ctx: &IntervalCtx) -> Self {
        self.add(&other.neg(), ctx)
    }

    pub fn mul(&self, other: &Self, ctx: &IntervalCtx) -> Self {
        let p = ctx.prec;
        let cands_lo = [
            self.lo.mul(&other.lo, p, DOWN),
            self.lo.mul(&other.hi, p, DOWN),
            self.hi.mul(&other.lo, p, DOWN),
            self.hi.mul(&other.hi, p, DOWN),
        ];
        let cands_hi = [
            self.lo.mul(&other.lo, p, UP),
            self.lo.mul(&other.hi, p, UP),
            self.hi.mul(&other.lo, p, UP),
            self.hi.mul(&other.hi, p, UP),
        ];
        let mut lo = cands_lo[0].clone();
        for c in &cands_lo[1..] {
            if bf_lt(c, &lo) {
                lo = c.clone();
            }
        }
        let mut hi = cands_hi[0].clone();
        for c in &cands_hi[1..] {
            if bf_lt(&hi, c) {
                hi = c.clone();
            }
        }
        Interval { lo, hi }
    }

    /// Reciprocal; `None` when the interval contains zero.
    pub fn recip(&self, ctx: &IntervalCtx) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        let one = BigFloat::from_i8(1, ctx.prec);
        Some(Interval {
            lo: one.div(&self.hi, ctx.prec, DOWN),
            hi: one.div(&self.lo, ctx.prec, UP),
        })
    }

    /// `exp`, monotone increasing.
    pub fn exp(&self, ctx: &mut IntervalCtx) -> Self {
        let p = ctx.prec;
        Interval {
            lo: self.lo.exp(p, DOWN, &mut ctx.consts),
            hi: self.hi.exp(p, UP, &mut ctx.consts),
        }
    }

    /// Natural log; `None` unless the interval is strictly positive.
    pub fn ln(&self, ctx: &mut IntervalCtx) -> Option<Self> {
        if self.sign() != Some(Ordering::Greater) {
            return None;
        }
        let p = ctx.prec;
        Some(Interval {
            lo: self.lo.ln(p, DOWN, &mut ctx.consts),
            hi: self.hi.ln(p, UP, &mut ctx.consts),
        })
    }

    /// Rational power of a strictly positive interval, via exp(r * ln).
    /// Integer exponents also work for negative intervals.
    pub fn pow_rational(&self, r: &BigRational, ctx: &mut IntervalCtx) -> Option<Self> {
        use num_traits::{ToPrimitive, Zero};
        if r.is_zero() {
            return Some(ctx.from_i64(1));
        }
        if r.is_integer() {
            if let Some(k) = r.numer().to_i64() {
                if k.unsigned_abs() <= 1 << 20 {
                    return Some(self.powi_signed(k, ctx));
                }
            }
        }
        let ln = self.ln(ctx)?;
        let ri = ctx.from_rational(r);
        Some(ln.mul(&ri, ctx).exp(ctx))
    }

    fn powi_signed(&self, k: i64, ctx: &mut IntervalCtx) -> Self {
        let mut acc = ctx.from_i64(1);
        let base = if k >= 0 {
            self.clone()
        } else {
            match self.recip(ctx) {
                Some(r) => r,
                None => {
                    return Interval {
                        lo: BigFloat::from_f64(f64::NEG_INFINITY, ctx.prec),
                        hi: BigFloat::from_f64(f64::INFINITY, ctx.prec),
                    }
                }
            }
        };
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base, ctx);
        }
        acc
    }

    pub fn sin(&self, ctx: &mut IntervalCtx) -> Self {
        self.trig(ctx, true)
    }

    pub fn cos(&self, ctx: &mut IntervalCtx) -> Self {
        self.trig(ctx, false)
    }

    // Conservative enclosure: evaluate at both endpoints and pad by the
    // interval width (|sin'|, |cos'| <= 1); clamp to [-1, 1].
    fn trig(&self, ctx: &mut IntervalCtx, sine: bool) -> Self {
        let p = ctx.prec;
        let (a, b) = if sine {
            (self.lo.sin(p, DOWN, &mut ctx.consts), self.hi.sin(p, DOWN, &mut ctx.consts))
        } else {
            (self.lo.cos(p, DOWN, &mut ctx.consts), self.hi.cos(p, DOWN, &mut ctx.consts))
        };
        let width = self.hi.sub(&self.lo, p, UP);
        let lo0 = if bf_lt(&a, &b) { a.clone() } else { b.clone() };
        let hi0 = if bf_lt(&a, &b) { b } else { a };
        let one = BigFloat::from_i8(1, p);
        let neg_one = BigFloat::from_i8(-1, p);
        let lo = lo0.sub(&width, p, DOWN).max(&neg_one);
        let hi = hi0.add(&width, p, UP).min(&one);
        Interval { lo, hi }
    }

    pub fn atan(&self, ctx: &mut IntervalCtx) -> Self {
        let p = ctx.prec;
        Interval {
            lo: self.lo.atan(p, DOWN, &mut ctx.consts),
            hi: self.hi.atan(p, UP, &mut ctx.consts),
        }
    }

    pub fn sqrt(&self, ctx: &mut IntervalCtx) -> Option<Self> {
        self.pow_rational(&BigRational::new(1.into(), 2.into()), ctx)
    }

    pub fn midpoint_f64(&self) -> f64 {
        let lo = bf_to_f64(&self.lo);
        let hi = bf_to_f64(&self.hi);
        if lo.is_finite() && hi.is_finite() {
            (lo + hi) / 2.0
        } else if lo.is_finite() {
            lo
        } else {
            hi
        }
    }

    pub fn width_f64(&self) -> f64 {
        bf_to_f64(&self.hi) - bf_to_f64(&self.lo)
    }

    /// Certified: every point of `self` is strictly below every point of `other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        bf_lt(&self.hi, &other.lo)
    }
}

pub fn bf_lt(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c < 0)
}

/// Lossy conversion for reporting.  Saturates to +-inf when the binary
/// exponent exceeds the f64 range.
pub fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (m, n, s, e, _) = x.as_raw_parts().expect("finite raw parts");
    if m.is_empty() || n == 0 {
        return 0.0;
    }
    let top = m[m.len() - 1];
    let mut v = top as f64;
    // value = mantissa * 2^(e - n) with the mantissa's top word holding the
    // most significant 64 bits.
    let shift = e as i64 - 64;
    if shift > 1030 {
        v = f64::INFINITY;
    } else if shift < -1090 {
        v = 0.0;
    } else {
        v *= 2f64.powi(shift as i32);
    }
    if s == Sign::Neg {
        v = -v;
    }
    v
}

/// log2 magnitude of a float, for overflow-aware reporting.
pub fn bf_log2_abs(x: &BigFloat) -> f64 {
    match x.exponent() {
        Some(e) => e as f64,
        None => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn enclosure_of_exp() {
        let mut ctx = IntervalCtx::new(128);
        let ten = ctx.from_i64(10);
        let e10 = ten.exp(&mut ctx);
        assert!(bf_lt(&e10.lo, &e10.hi) || e10.lo.cmp(&e10.hi) == Some(0));
        let mid = e10.midpoint_f64();
        assert!((mid - 22026.465794806718).abs() < 1e-6);
        assert_eq!(e10.sign(), Some(Ordering::Greater));
    }

    #[test]
    fn mixed_sign_multiplication() {
        let mut ctx = IntervalCtx::new(128);
        let a = Interval { lo: BigFloat::from_i8(-2, 128), hi: BigFloat::from_i8(3, 128) };
        let b = Interval { lo: BigFloat::from_i8(-5, 128), hi: BigFloat::from_i8(7, 128) };
        let c = a.mul(&b, &ctx);
        assert!((bf_to_f64(&c.lo) - -15.0).abs() < 1e-9);
        assert!((bf_to_f64(&c.hi) - 21.0).abs() < 1e-9);
        let r = ctx.from_rational(&BigRational::new(1.into(), 3.into()));
        assert!(r.contains_zero() == false);
    }

    #[test]
    fn rational_power() {
        let mut ctx = IntervalCtx::new(192);
        let two = ctx.from_i64(2);
        let r = BigRational::new(1.into(), 2.into());
        let s = two.pow_rational(&r, &mut ctx).unwrap();
        assert!((s.midpoint_f64() - std::f64::consts::SQRT_2).abs() < 1e-12);
        let neg = ctx.from_i64(-3);
        assert!(neg.pow_rational(&r, &mut ctx).is_none());
        let cube = neg.pow_rational(&BigRational::from_integer(3.into()), &mut ctx).unwrap();
        assert!((cube.midpoint_f64() + 27.0).abs() < 1e-9);
    }

    #[test]
    fn overflow_becomes_infinite_endpoint() {
        let mut ctx = IntervalCtx::new(128);
        let huge = ctx.from_f64(3.0e9);
        let e = huge.exp(&mut ctx);
        assert!(!e.is_finite());
    }
}
