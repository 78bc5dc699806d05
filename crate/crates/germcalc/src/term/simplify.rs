//! Confluent rewriting to a coefficient-collected normal form.
//!
//! The normal form folds constants in `Q + Q*pi`, pushes `exp` through sums
//! and `log` through products (the latter only when the factors are
//! syntactically positive), cancels `exp/log` inverse pairs, collects
//! multiplicative exponents per base, and orders Add/Mul lists by the
//! canonical term order.  Rules requiring positivity are applied only when a
//! conservative syntactic check establishes it; otherwise they are skipped.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::constant::{ExactConstant, Rational};
use crate::term::{split_const_factor, Term, TermKind};

/// Normalizing sum constructor.  Constant coefficients distribute over sum
/// cores, so `-(a+b) + a + b` collects to zero.
pub fn norm_add(ts: Vec<Term>) -> Term {
    let mut const_acc = ExactConstant::zero();
    let mut pairs: Vec<(Term, ExactConstant)> = Vec::new();
    for t in ts {
        collect_summands(t, ExactConstant::one(), &mut const_acc, &mut pairs);
    }
    pairs.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    let mut merged: Vec<(Term, ExactConstant)> = Vec::new();
    for (core, coeff) in pairs {
        if let Some(last) = merged.last_mut() {
            if last.0.same(&core) {
                last.1 = last.1.add(&coeff);
                continue;
            }
        }
        merged.push((core, coeff));
    }
    let mut out: Vec<Term> = Vec::new();
    for (core, coeff) in merged {
        if coeff.is_zero() {
            continue;
        }
        out.push(attach_coeff(coeff, core));
    }
    if !const_acc.is_zero() {
        out.push(Term::constant(const_acc));
    }
    match out.len() {
        0 => Term::int(0),
        1 => out.pop().unwrap(),
        _ => Term::add_raw(out),
    }
}

fn collect_summands(
    t: Term,
    mult: ExactConstant,
    const_acc: &mut ExactConstant,
    pairs: &mut Vec<(Term, ExactConstant)>,
) {
    match t.kind() {
        TermKind::Add(ss) => {
            for s in ss {
                collect_summands(s.clone(), mult.clone(), const_acc, pairs);
            }
        }
        TermKind::Const(c) => match mult.mul(c) {
            Some(v) => *const_acc = const_acc.add(&v),
            // pi * pi and friends: keep the literal as its own core
            None => pairs.push((t, mult)),
        },
        _ => {
            let (coeff, core) = split_const_factor(&t);
            let total = match mult.mul(&coeff) {
                Some(v) => v,
                None => {
                    pairs.push((t, mult));
                    return;
                }
            };
            if core.is_one_const() {
                *const_acc = const_acc.add(&total);
            } else if matches!(core.kind(), TermKind::Add(_)) {
                collect_summands(core, total, const_acc, pairs);
            } else {
                pairs.push((core, total));
            }
        }
    }
}

/// Rebuilds `coeff * core` with raw constructors, keeping canonical factor
/// order (constants first).
fn attach_coeff(coeff: ExactConstant, core: Term) -> Term {
    if coeff.is_one() {
        return core;
    }
    let mut factors = vec![Term::constant(coeff)];
    match core.kind() {
        TermKind::Mul(fs) => factors.extend(fs.iter().cloned()),
        _ => factors.push(core),
    }
    Term::mul_raw(factors)
}

/// Normalizing product constructor.
pub fn norm_mul(ts: Vec<Term>) -> Term {
    let mut flat = Vec::with_capacity(ts.len());
    for t in ts {
        flatten_mul(t, &mut flat);
    }
    let mut coeff = ExactConstant::one();
    let mut stray_consts: Vec<Term> = Vec::new(); // pi*pi and friends
    let mut exp_args: Vec<Term> = Vec::new();
    let mut bases: Vec<(Term, Rational)> = Vec::new();
    for f in flat {
        match f.kind() {
            TermKind::Const(c) => match coeff.mul(c) {
                Some(folded) => coeff = folded,
                None => stray_consts.push(f.clone()),
            },
            TermKind::Exp(a) => exp_args.push(a.clone()),
            TermKind::Pow(b, r) => bases.push((b.clone(), r.clone())),
            TermKind::Recip(inner) => match inner.kind() {
                TermKind::Pow(b, r) => bases.push((b.clone(), -r.clone())),
                _ => bases.push((inner.clone(), -crate::term::q_one())),
            },
            _ => bases.push((f.clone(), crate::term::q_one())),
        }
    }
    if coeff.is_zero() {
        return Term::int(0);
    }
    // Merge all exponential content through a single combined argument, then
    // split the argument back into one factor per summand.  Log summands with
    // rational coefficients become rational powers.
    if !exp_args.is_empty() {
        let combined = norm_add(exp_args);
        for s in add_summands(&combined) {
            let (c, core) = split_const_factor(&s);
            if let TermKind::Log(g) = core.kind() {
                if let Some(q) = c.as_rational() {
                    bases.push((g.clone(), q.clone()));
                    continue;
                }
            }
            if !s.is_zero_const() {
                bases.push((Term::exp_raw(s), crate::term::q_one()));
            }
        }
    }
    for sc in stray_consts {
        bases.push((sc, crate::term::q_one()));
    }
    bases.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    let mut merged: Vec<(Term, Rational)> = Vec::new();
    for (b, r) in bases {
        if let Some(last) = merged.last_mut() {
            if last.0.same(&b) {
                last.1 += r;
                continue;
            }
        }
        merged.push((b, r));
    }
    let mut factors: Vec<Term> = Vec::new();
    for (b, r) in merged {
        if r.is_zero() {
            continue;
        }
        if b.is_one_const() {
            continue;
        }
        factors.push(emit_power(b, r));
    }
    factors.sort_by(|a, b| mul_factor_order(a, b));
    if factors.is_empty() {
        return Term::constant(coeff);
    }
    if !coeff.is_one() {
        factors.insert(0, Term::constant(coeff));
    }
    match factors.len() {
        1 => factors.pop().unwrap(),
        _ => Term::mul_raw(factors),
    }
}

fn mul_factor_order(a: &Term, b: &Term) -> Ordering {
    let rank = |t: &Term| u8::from(!t.is_const());
    rank(a).cmp(&rank(b)).then_with(|| a.canonical_cmp(b))
}

fn flatten_mul(t: Term, out: &mut Vec<Term>) {
    match t.kind() {
        TermKind::Mul(fs) => {
            for f in fs {
                flatten_mul(f.clone(), out);
            }
        }
        _ => out.push(t),
    }
}

pub fn add_summands(t: &Term) -> Vec<Term> {
    match t.kind() {
        TermKind::Add(ss) => ss.clone(),
        _ if t.is_zero_const() => vec![],
        _ => vec![t.clone()],
    }
}

pub fn mul_factors(t: &Term) -> Vec<Term> {
    match t.kind() {
        TermKind::Mul(fs) => fs.clone(),
        _ if t.is_one_const() => vec![],
        _ => vec![t.clone()],
    }
}

fn emit_power(base: Term, r: Rational) -> Term {
    use num_traits::One;
    if r.is_one() {
        return base;
    }
    if r == -Rational::one() {
        return Term::recip_raw(base);
    }
    if r.is_negative() {
        Term::recip_raw(Term::pow_raw(base, -r))
    } else {
        Term::pow_raw(base, r)
    }
}

/// Normalizing reciprocal constructor.
pub fn norm_recip(t: Term) -> Term {
    match t.kind() {
        TermKind::Const(c) => {
            if let Some(r) = c.recip() {
                return Term::constant(r);
            }
            Term::recip_raw(t)
        }
        TermKind::Recip(s) => s.clone(),
        TermKind::Mul(fs) => norm_mul(fs.iter().cloned().map(norm_recip).collect()),
        TermKind::Pow(b, r) => norm_pow(b.clone(), -r.clone()),
        TermKind::Exp(a) => norm_exp(neg_term(a.clone())),
        _ => Term::recip_raw(t),
    }
}

fn neg_term(t: Term) -> Term {
    norm_mul(vec![Term::int(-1), t])
}

/// Normalizing rational power constructor.
pub fn norm_pow(b: Term, r: Rational) -> Term {
    use num_traits::One;
    if r.is_zero() {
        return Term::int(1);
    }
    if r.is_one() {
        return b;
    }
    match b.kind() {
        TermKind::Const(c) => {
            if let Some(q) = c.as_const_rational_pow(&r) {
                return Term::constant(q);
            }
            emit_power(b.clone(), r)
        }
        TermKind::Mul(fs) => {
            let distributable =
                r.is_integer() || fs.iter().all(syntactically_positive);
            if distributable {
                norm_mul(fs.iter().map(|f| norm_pow(f.clone(), r.clone())).collect())
            } else {
                emit_power(b.clone(), r)
            }
        }
        TermKind::Pow(b2, r2) => norm_pow(b2.clone(), &r * r2),
        TermKind::Recip(inner) => norm_recip(norm_pow(inner.clone(), r)),
        TermKind::Exp(a) => norm_exp(norm_mul(vec![
            Term::constant(ExactConstant::from_rational(r)),
            a.clone(),
        ])),
        _ => emit_power(b.clone(), r),
    }
}

trait ConstPow {
    fn as_const_rational_pow(&self, r: &Rational) -> Option<ExactConstant>;
}

impl ConstPow for ExactConstant {
    /// `c^r` when it stays an exact rational: integer exponents of rationals,
    /// and perfect roots.
    fn as_const_rational_pow(&self, r: &Rational) -> Option<ExactConstant> {
        use num_bigint::BigInt;
        use num_traits::{One, Signed as _, ToPrimitive};
        let q = self.as_rational()?;
        if q.is_one() {
            return Some(ExactConstant::one());
        }
        if q.is_zero() {
            return if r.is_positive() { Some(ExactConstant::zero()) } else { None };
        }
        let p = r.numer().to_i64()?;
        let s = r.denom().to_i64()?;
        if p.unsigned_abs() > 64 || s > 64 {
            return None;
        }
        let base = if p >= 0 { q.clone() } else { q.recip() };
        let mut acc = Rational::one();
        for _ in 0..p.unsigned_abs() {
            acc *= &base;
        }
        if s == 1 {
            return Some(ExactConstant::from_rational(acc));
        }
        if acc.is_negative() {
            return None;
        }
        let nr = |n: &BigInt| -> Option<BigInt> {
            let root = n.nth_root(s as u32);
            if num_traits::pow(root.clone(), s as usize) == *n {
                Some(root)
            } else {
                None
            }
        };
        let rn = nr(acc.numer())?;
        let rd = nr(acc.denom())?;
        Some(ExactConstant::from_rational(Rational::new(rn, rd)))
    }
}

/// Normalizing exponential constructor.
pub fn norm_exp(a: Term) -> Term {
    if a.is_zero_const() {
        return Term::int(1);
    }
    match a.kind() {
        TermKind::Log(g) => g.clone(),
        TermKind::Add(ss) => norm_mul(ss.iter().cloned().map(norm_exp).collect()),
        _ => {
            let (c, core) = split_const_factor(&a);
            if let TermKind::Log(g) = core.kind() {
                if let Some(q) = c.as_rational() {
                    return norm_pow(g.clone(), q.clone());
                }
            }
            Term::exp_raw(a)
        }
    }
}

/// Normalizing logarithm constructor.
pub fn norm_log(g: Term) -> Term {
    match g.kind() {
        TermKind::Exp(a) => a.clone(),
        TermKind::Const(c) => {
            if c.is_one() {
                return Term::int(0);
            }
            Term::log_raw(g)
        }
        TermKind::Mul(fs) => {
            if fs.iter().all(syntactically_positive) {
                norm_add(fs.iter().cloned().map(norm_log).collect())
            } else {
                Term::log_raw(g)
            }
        }
        TermKind::Pow(b, r) => {
            if syntactically_positive(b) {
                norm_mul(vec![
                    Term::constant(ExactConstant::from_rational(r.clone())),
                    norm_log(b.clone()),
                ])
            } else {
                Term::log_raw(g)
            }
        }
        TermKind::Recip(inner) => {
            if syntactically_positive(inner) {
                neg_term(norm_log(inner.clone()))
            } else {
                Term::log_raw(g)
            }
        }
        _ => Term::log_raw(g),
    }
}

/// Conservative syntactic check that a term is eventually positive.  Used
/// only to gate rewrite rules; the authoritative test lives in the
/// asymptotics engine.
pub fn syntactically_positive(t: &Term) -> bool {
    match t.kind() {
        TermKind::Const(c) => c.sign() == Ordering::Greater,
        TermKind::X => true,
        TermKind::Exp(_) => true,
        TermKind::Pow(b, _) => syntactically_positive(b),
        TermKind::Recip(s) => syntactically_positive(s),
        TermKind::Mul(fs) => fs.iter().all(syntactically_positive),
        TermKind::Add(ss) => ss.iter().all(syntactically_positive),
        TermKind::Log(g) => syntactically_gt1(g),
    }
}

/// Conservative check that a term is eventually greater than 1.
fn syntactically_gt1(t: &Term) -> bool {
    match t.kind() {
        TermKind::Const(c) => c.cmp_exact(&ExactConstant::one()) == Ordering::Greater,
        TermKind::X => true,
        TermKind::Exp(a) => syntactically_positive(a),
        TermKind::Pow(b, r) => r.is_positive() && syntactically_gt1(b),
        TermKind::Mul(fs) => fs.iter().all(syntactically_gt1),
        TermKind::Add(ss) => {
            ss.iter().all(syntactically_positive) && ss.iter().any(syntactically_gt1)
        }
        TermKind::Log(g) => match g.kind() {
            // log(exp(h)) with h > 1 (already rewritten away in normal forms)
            TermKind::Exp(a) => syntactically_gt1(a),
            _ => false,
        },
        TermKind::Recip(_) => false,
    }
}

thread_local! {
    static SIMPLIFY_CACHE: RefCell<HashMap<Term, Term>> = RefCell::new(HashMap::new());
}

/// Full normalization: bottom-up rebuild through the normalizing
/// constructors, iterated to a fixed point.
pub fn simplify(t: &Term) -> Term {
    if let Some(hit) = SIMPLIFY_CACHE.with(|c| c.borrow().get(t).cloned()) {
        return hit;
    }
    let mut cur = t.clone();
    for _ in 0..8 {
        let next = simplify_once(&cur);
        if next.same(&cur) {
            break;
        }
        cur = next;
    }
    SIMPLIFY_CACHE.with(|c| {
        let mut cache = c.borrow_mut();
        if cache.len() > 1 << 18 {
            cache.clear();
        }
        cache.insert(t.clone(), cur.clone());
        cache.insert(cur.clone(), cur.clone());
    });
    cur
}

fn simplify_once(t: &Term) -> Term {
    match t.kind() {
        TermKind::Const(_) | TermKind::X => t.clone(),
        TermKind::Add(ss) => norm_add(ss.iter().map(simplify_once).collect()),
        TermKind::Mul(fs) => norm_mul(fs.iter().map(simplify_once).collect()),
        TermKind::Recip(s) => norm_recip(simplify_once(s)),
        TermKind::Pow(b, r) => norm_pow(simplify_once(b), r.clone()),
        TermKind::Exp(a) => norm_exp(simplify_once(a)),
        TermKind::Log(g) => norm_log(simplify_once(g)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{build, parse};

    fn s(text: &str) -> Term {
        simplify(&parse(text).unwrap())
    }

    #[test]
    fn exp_log_inverse_pair() {
        assert_eq!(s("exp(log(x))"), Term::x());
        assert_eq!(s("log(exp(x))"), Term::x());
    }

    #[test]
    fn exp_homomorphism() {
        // exp(x + log x) -> x * exp(x)
        let lhs = s("exp(x + log(x))");
        let rhs = s("x * exp(x)");
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn field_cancellation() {
        let one = s("x * 1/x");
        assert_eq!(one, Term::int(1));
        assert_eq!(s("exp(x) * exp(-x)"), Term::int(1));
    }

    #[test]
    fn coefficient_collection() {
        assert_eq!(s("x + x + x"), s("3*x"));
        assert_eq!(s("x - x"), Term::int(0));
        assert_eq!(s("2*x + 3*x - 5*x"), Term::int(0));
    }

    #[test]
    fn log_splits_positive_products() {
        assert_eq!(s("log(x*exp(x))"), s("x + log(x)"));
        assert_eq!(s("log(x^2)"), s("2*log(x)"));
    }

    #[test]
    fn pow_laws() {
        assert_eq!(s("(x^2)^(1/2)"), Term::x());
        assert_eq!(s("(x*exp(x))^2"), s("x^2 * exp(2*x)"));
        assert_eq!(s("4^(1/2)"), Term::int(2));
        assert_eq!(s("x^(1/2) * x^(1/2)"), Term::x());
    }

    #[test]
    fn simplify_is_idempotent_on_samples() {
        for text in [
            "exp(x + exp(-x))",
            "log(2*x) - log(x)",
            "x^(1/2) + 2*x - x^(1/2)",
            "1/(x*log(x))",
            "exp(2*log(x) + 1)",
            "pi/2 - 1/x",
        ] {
            let a = s(text);
            assert_eq!(a, simplify(&a), "not idempotent on {text}");
        }
    }

    #[test]
    fn exp_of_rational_log_multiple_is_power() {
        assert_eq!(s("exp(2*log(x))"), s("x^2"));
        assert_eq!(s("exp((1/2)*log(x))"), s("x^(1/2)"));
        // pi * log x stays under exp
        let t = s("exp(pi*log(x))");
        assert!(matches!(t.kind(), TermKind::Exp(_)));
    }

    #[test]
    fn negative_exponents_become_recip() {
        let t = build::pow(Term::x(), crate::term::q(-3, 2));
        assert!(matches!(t.kind(), TermKind::Recip(_)));
    }
}
