//! Certified interval evaluation of terms and the numeric sign ladder.
//!
//! The ladder evaluates a term at `x = exp_j(10)` for `j = 0, 1, 2`,
//! escalating precision from 256 to 4096 bits, and accepts a sign when the
//! deepest representable point yields an interval excluding zero and the
//! decided points agree.  This is the base semi-decision behind
//! zero-equivalence; terms whose germ sign is truly zero stay `Undecided`
//! here unless rewriting already produced a literal zero.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalCtx};
use crate::term::{Term, TermKind};

/// Evaluates `t` at the (interval) point `x`.  Errors on log of a
/// non-positive enclosure, division through zero, and indeterminate
/// overflow.
pub fn eval_interval(t: &Term, x: &Interval, ctx: &mut IntervalCtx) -> Result<Interval> {
    let v = eval_rec(t, x, ctx)?;
    if v.lo.is_nan() || v.hi.is_nan() {
        return Err(Error::PrecisionExhausted("NaN in interval evaluation".into()));
    }
    Ok(v)
}

fn eval_rec(t: &Term, x: &Interval, ctx: &mut IntervalCtx) -> Result<Interval> {
    match t.kind() {
        TermKind::Const(c) => Ok(c.to_interval(ctx)),
        TermKind::X => Ok(x.clone()),
        TermKind::Add(ss) => {
            let mut acc = ctx.from_i64(0);
            for s in ss {
                let v = eval_rec(s, x, ctx)?;
                acc = acc.add(&v, ctx);
            }
            Ok(acc)
        }
        TermKind::Mul(fs) => {
            let mut acc = ctx.from_i64(1);
            for f in fs {
                let v = eval_rec(f, x, ctx)?;
                acc = acc.mul(&v, ctx);
            }
            Ok(acc)
        }
        TermKind::Recip(s) => {
            let v = eval_rec(s, x, ctx)?;
            v.recip(ctx)
                .ok_or_else(|| Error::PrecisionExhausted("division through zero enclosure".into()))
        }
        TermKind::Pow(b, r) => {
            let v = eval_rec(b, x, ctx)?;
            v.pow_rational(r, ctx)
                .ok_or_else(|| Error::PrecisionExhausted("power of non-positive enclosure".into()))
        }
        TermKind::Exp(a) => {
            let v = eval_rec(a, x, ctx)?;
            let e = v.exp(ctx);
            if !e.is_finite() {
                return Err(Error::PrecisionExhausted("exp overflow".into()));
            }
            Ok(e)
        }
        TermKind::Log(a) => {
            let v = eval_rec(a, x, ctx)?;
            v.ln(ctx)
                .ok_or_else(|| Error::PrecisionExhausted("log of non-positive enclosure".into()))
        }
    }
}

/// Evaluates a term with no `x` to a certified interval, escalating precision
/// until the interval is usefully narrow or excludes zero.
pub fn eval_constant(t: &Term, start_prec: usize, max_prec: usize) -> Result<Interval> {
    debug_assert!(!t.has_x());
    let mut prec = start_prec.max(64);
    let mut best: Option<Interval> = None;
    while prec <= max_prec {
        let mut ctx = IntervalCtx::new(prec);
        let x = ctx.from_i64(0);
        match eval_interval(t, &x, &mut ctx) {
            Ok(iv) => {
                if iv.sign().is_some() {
                    return Ok(iv);
                }
                best = Some(iv);
            }
            Err(_) => {}
        }
        prec *= 2;
    }
    best.ok_or_else(|| Error::PrecisionExhausted(format!("constant evaluation of {t}")))
}

/// Sign of a constant term (no `x`), exact when the constant is a literal.
pub fn constant_sign(t: &Term, max_prec: usize) -> Result<Ordering> {
    if let Some(c) = t.as_const() {
        return Ok(c.sign());
    }
    let iv = eval_constant(t, 256, max_prec)?;
    iv.sign().ok_or_else(|| {
        Error::Undecided(format!("sign of constant {t} not separated from zero"))
    })
}

/// The ladder points `exp_j(10)`, largest first, as interval values.
fn ladder_points(ctx: &mut IntervalCtx, max_j: u32) -> Vec<Interval> {
    let mut points = Vec::new();
    let mut cur = ctx.from_i64(10);
    points.push(cur.clone());
    for _ in 0..max_j {
        cur = cur.exp(ctx);
        if !cur.is_finite() {
            break;
        }
        points.push(cur.clone());
    }
    points.reverse();
    points
}

/// Numeric germ-sign fallback: certified signs on the ladder, deepest point
/// wins, with agreement required between the two deepest decided points.
pub fn ladder_sign(t: &Term, max_prec: usize) -> Result<Ordering> {
    if !t.has_x() {
        return constant_sign(t, max_prec);
    }
    // deeper points than the tower suggests are harmless: overflow skips
    // them, and shallow terms need deep points to clear the pre-asymptotic
    // regime
    let max_j = 3;
    let mut prec = 256usize;
    while prec <= max_prec {
        let mut ctx = IntervalCtx::new(prec);
        let points = ladder_points(&mut ctx, max_j);
        let mut decided: Vec<Ordering> = Vec::new();
        for p in &points {
            match eval_interval(t, p, &mut ctx) {
                Ok(iv) => {
                    if let Some(s) = iv.sign() {
                        if s != Ordering::Equal {
                            decided.push(s);
                        }
                    }
                }
                Err(_) => continue,
            }
        }
        match decided.len() {
            0 => {}
            1 => return Ok(decided[0]),
            _ => {
                if decided[0] == decided[1] {
                    return Ok(decided[0]);
                }
                // deepest points disagree: closer to the asymptotic regime wins
                // only if precision escalation keeps confirming it
            }
        }
        prec *= 4;
    }
    Err(Error::Undecided(format!("numeric sign ladder exhausted for {t}")))
}

/// Plain (non-interval) high-precision evaluation at a real point, for
/// samplers and oracles that do their own certification.
pub fn eval_point_f64(t: &Term, x: f64, prec: usize) -> Result<f64> {
    let mut ctx = IntervalCtx::new(prec);
    let xi = ctx.from_f64(x);
    let iv = eval_interval(t, &xi, &mut ctx)?;
    Ok(iv.midpoint_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;
    use crate::term::simplify::simplify;

    fn sgn(text: &str) -> Result<Ordering> {
        ladder_sign(&simplify(&parse(text).unwrap()), 4096)
    }

    #[test]
    fn ladder_decides_easy_signs() {
        assert_eq!(sgn("x - 100").unwrap(), Ordering::Greater);
        assert_eq!(sgn("1/x - 1/log(x)").unwrap(), Ordering::Less);
        assert_eq!(sgn("exp(-x)").unwrap(), Ordering::Greater);
    }

    #[test]
    fn constant_signs() {
        assert_eq!(sgn("exp(1) - 3").unwrap(), Ordering::Less);
        assert_eq!(sgn("pi - 3").unwrap(), Ordering::Greater);
        assert_eq!(sgn("log(2) - 1").unwrap(), Ordering::Less);
    }

    #[test]
    fn interval_log_domain_error() {
        let t = parse("log(1 - x)").unwrap();
        let mut ctx = IntervalCtx::new(128);
        let x = ctx.from_i64(10);
        assert!(eval_interval(&t, &x, &mut ctx).is_err());
    }
}
