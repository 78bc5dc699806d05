//! Leading monomials: the unique representative of a germ's Archimedean
//! class in the monomial group.
//!
//! A monomial is a finite product of rational powers of iterated logarithms
//! `l_j` (with `l_0 = x`) and exponential factors `exp(e)` with purely
//! infinite argument.  No two factors share a comparability class; in
//! particular the normal form is grouped in "log space": the monomial is
//! `exp` of a sum of class-distinct contributions.

use std::cmp::Ordering;

use crate::asymptotics::limit::{
    germ_sign_simplified, lead_class, leading_term, limit_simplified, validate_domain, LeadClass,
};
use crate::asymptotics::LimitValue;
use crate::constant::Rational;
use crate::error::{Error, Result};
use crate::term::simplify::simplify;
use crate::term::{build, q_one, split_const_factor, substitute, Term, TermKind};

/// One factor of a monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialFactor {
    /// `l_depth ^ exponent`; depth 0 is `x` itself.
    LogPower { depth: u32, exponent: Rational },
    /// `exp(arg) ^ exponent` with `arg` a simplified purely infinite germ
    /// term, coefficient-free when the class coefficient is rational.
    ExpFactor { arg: Term, exponent: Rational },
}

impl MonomialFactor {
    /// The factor's contribution in log space: `(term, multiplier)` with
    /// `log(factor) = multiplier * term`.
    fn log_space(&self) -> (Term, Rational) {
        match self {
            MonomialFactor::LogPower { depth, exponent } => {
                (Term::log_iter(depth + 1), exponent.clone())
            }
            MonomialFactor::ExpFactor { arg, exponent } => (arg.clone(), exponent.clone()),
        }
    }

    pub fn as_term(&self) -> Term {
        match self {
            MonomialFactor::LogPower { depth, exponent } => {
                build::pow(Term::log_iter(*depth), exponent.clone())
            }
            MonomialFactor::ExpFactor { arg, exponent } => {
                build::pow(build::exp(arg.clone()), exponent.clone())
            }
        }
    }
}

/// Normal form for elements of the monomial group restricted to the
/// fragment.  The empty product denotes the monomial 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialNF {
    /// Factors sorted by descending comparability class.
    pub factors: Vec<MonomialFactor>,
}

impl MonomialNF {
    pub fn one() -> MonomialNF {
        MonomialNF { factors: Vec::new() }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Maximum iterated-log depth appearing among the log-power factors.
    pub fn log_depth(&self) -> u32 {
        self.factors
            .iter()
            .map(|f| match f {
                MonomialFactor::LogPower { depth, .. } => *depth,
                MonomialFactor::ExpFactor { .. } => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn as_term(&self) -> Term {
        if self.factors.is_empty() {
            return Term::int(1);
        }
        simplify(&Term::mul_raw(self.factors.iter().map(|f| f.as_term()).collect()))
    }

    pub fn inverse(&self) -> MonomialNF {
        MonomialNF {
            factors: self
                .factors
                .iter()
                .map(|f| match f {
                    MonomialFactor::LogPower { depth, exponent } => MonomialFactor::LogPower {
                        depth: *depth,
                        exponent: -exponent.clone(),
                    },
                    MonomialFactor::ExpFactor { arg, exponent } => MonomialFactor::ExpFactor {
                        arg: arg.clone(),
                        exponent: -exponent.clone(),
                    },
                })
                .collect(),
        }
    }

    /// Composition with `log` on the right: `m(log x)`.
    fn compose_log(&self) -> Result<MonomialNF> {
        let mut contribs = Vec::new();
        for f in &self.factors {
            let (t, q) = f.log_space();
            contribs.push((simplify(&substitute(&t, &Term::log_raw(Term::x()))), q));
        }
        normalize_contributions(contribs)
    }

    /// `m1 * m2` with class grouping.
    pub fn mul(&self, other: &MonomialNF) -> Result<MonomialNF> {
        let mut contribs = Vec::new();
        for f in self.factors.iter().chain(other.factors.iter()) {
            contribs.push(f.log_space());
        }
        normalize_contributions(contribs)
    }

    pub fn pow(&self, r: &Rational) -> MonomialNF {
        use num_traits::Zero;
        if r.is_zero() {
            return MonomialNF::one();
        }
        MonomialNF {
            factors: self
                .factors
                .iter()
                .map(|f| match f {
                    MonomialFactor::LogPower { depth, exponent } => MonomialFactor::LogPower {
                        depth: *depth,
                        exponent: exponent * r,
                    },
                    MonomialFactor::ExpFactor { arg, exponent } => MonomialFactor::ExpFactor {
                        arg: arg.clone(),
                        exponent: exponent * r,
                    },
                })
                .collect(),
        }
    }

    /// Whether the monomial tends to +infinity (it is "large").
    pub fn is_large(&self) -> Result<bool> {
        match self.factors.first() {
            None => Ok(false),
            Some(f) => factor_is_large(f),
        }
    }
}

fn factor_is_large(f: &MonomialFactor) -> Result<bool> {
    use num_traits::Signed;
    match f {
        MonomialFactor::LogPower { exponent, .. } => Ok(exponent.is_positive()),
        MonomialFactor::ExpFactor { arg, exponent } => {
            let (lv, _) = limit_simplified(&simplify(arg))?;
            match lv {
                LimitValue::PlusInfinity => Ok(exponent.is_positive()),
                LimitValue::MinusInfinity => Ok(exponent.is_negative()),
                _ => Err(Error::Unsupported(format!(
                    "exponential factor argument {arg} is not large"
                ))),
            }
        }
    }
}

impl std::fmt::Display for MonomialNF {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        // factors print in normal-form order: most rapidly varying first
        let parts: Vec<String> = self.factors.iter().map(|x| format!("{}", x.as_term())).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Groups log-space contributions by comparability class and rebuilds
/// canonical factors, largest class first.
fn normalize_contributions(
    contribs: Vec<(Term, Rational)>,
) -> Result<MonomialNF> {
    use num_traits::Zero;
    // group by class: ratio of log-space terms finite and nonzero
    let mut groups: Vec<(Term, Vec<(Term, Rational)>)> = Vec::new();
    'outer: for (t, q) in contribs {
        if q.is_zero() {
            continue;
        }
        for (rep, members) in groups.iter_mut() {
            if same_class(rep, &t)? {
                members.push((t, q));
                continue 'outer;
            }
        }
        groups.push((t.clone(), vec![(t, q)]));
    }
    let mut factors: Vec<(Term, MonomialFactor)> = Vec::new();
    for (_, members) in groups {
        let combined = simplify(&crate::term::simplify::norm_add(
            members
                .into_iter()
                .map(|(t, q)| build::scale_q(q, t))
                .collect(),
        ));
        if combined.is_zero_const() {
            continue;
        }
        let (lv, _) = limit_simplified(&combined)?;
        if !lv.is_infinite() {
            return Err(Error::Unsupported(
                "same-class monomial factors combined into a bounded germ".into(),
            ));
        }
        let factor = factor_from_log_space(&combined);
        let (ls, _) = factor.log_space();
        factors.push((ls, factor));
    }
    sort_factors_by_class(&mut factors)?;
    Ok(MonomialNF { factors: factors.into_iter().map(|(_, f)| f).collect() })
}

/// Builds the canonical factor for a log-space sum `s`: a rational multiple
/// of an iterated log becomes a log power, everything else an exponential
/// factor with coefficient-free argument when possible.
fn factor_from_log_space(s: &Term) -> MonomialFactor {
    let (c, core) = split_const_factor(s);
    if let Some(q) = c.as_rational() {
        if let Some(depth) = as_log_chain(&core) {
            if depth >= 1 {
                // exp(q * l_{d+1}) = l_d ^ q
                return MonomialFactor::LogPower { depth: depth - 1, exponent: q.clone() };
            }
            // depth 0 means the contribution is q*x: the factor exp(x)^q
            return MonomialFactor::ExpFactor { arg: core, exponent: q.clone() };
        }
        return MonomialFactor::ExpFactor { arg: core, exponent: q.clone() };
    }
    MonomialFactor::ExpFactor { arg: s.clone(), exponent: q_one() }
}

/// Recognizes `log_k(x)` and returns `k`.
pub fn as_log_chain(t: &Term) -> Option<u32> {
    match t.kind() {
        TermKind::X => Some(0),
        TermKind::Log(inner) => as_log_chain(inner).map(|k| k + 1),
        _ => None,
    }
}

fn same_class(a: &Term, b: &Term) -> Result<bool> {
    if a.same(b) {
        return Ok(true);
    }
    let ratio = simplify(&build::div(a.clone(), b.clone()));
    let (lv, _) = limit_simplified(&ratio)?;
    Ok(matches!(lv, LimitValue::FiniteNonzero { .. }))
}

/// Descending class order: `a` before `b` when `|a| > |b|` in log space.
fn sort_factors_by_class(factors: &mut Vec<(Term, MonomialFactor)>) -> Result<()> {
    // insertion sort with explicit limit queries; factor counts are tiny
    let mut sorted: Vec<(Term, MonomialFactor)> = Vec::with_capacity(factors.len());
    for (ls, f) in factors.drain(..) {
        let mut at = sorted.len();
        for (i, (ls2, _)) in sorted.iter().enumerate() {
            if class_gt(&ls, ls2)? {
                at = i;
                break;
            }
        }
        sorted.insert(at, (ls, f));
    }
    *factors = sorted;
    Ok(())
}

fn class_gt(a: &Term, b: &Term) -> Result<bool> {
    let ratio = simplify(&build::div(a.clone(), b.clone()));
    let (lv, _) = limit_simplified(&ratio)?;
    Ok(lv.is_infinite())
}

/// Leading monomial and coefficient: `f ≍ c * m` with `f/(c*m) -> 1`.
pub fn lm(f: &Term) -> Result<(LimitValue, MonomialNF)> {
    crate::asymptotics::limit::with_budget(|| lm_impl(f))
}

fn lm_impl(f: &Term) -> Result<(LimitValue, MonomialNF)> {
    validate_domain(f)?;
    let s = simplify(f);
    if s.is_zero_const() {
        return Err(Error::ZeroGerm("leading monomial of the zero germ".into()));
    }
    lead_rec(&s, 0)
}

const MAX_LEAD_DEPTH: u32 = 64;

fn lead_rec(s: &Term, depth: u32) -> Result<(LimitValue, MonomialNF)> {
    if depth > MAX_LEAD_DEPTH {
        return Err(Error::Undecided("leading-monomial recursion budget exhausted".into()));
    }
    if !s.has_x() {
        let (lv, sign) = limit_simplified(s)?;
        if sign == Ordering::Equal {
            return Err(Error::ZeroGerm("leading monomial of the zero germ".into()));
        }
        return Ok((lv, MonomialNF::one()));
    }
    match lead_class(s)? {
        LeadClass::Constant => unreachable!("has_x was checked"),
        LeadClass::LogOnly => {
            let up = simplify(&substitute(s, &Term::exp_raw(Term::x())));
            let (c, mono) = lead_rec(&up, depth + 1)?;
            Ok((c, mono.compose_log()?))
        }
        LeadClass::Class { h } => {
            let (e0, a0) = leading_term(s, &h)?;
            let (c, inner) = lead_rec(&simplify(&a0), depth + 1)?;
            if e0.is_zero() {
                return Ok((c, inner));
            }
            // contribution exp(e0 * h) in log space
            let contrib = simplify(&build::scale(e0, h));
            let mut contribs = vec![(contrib, q_one())];
            for f in &inner.factors {
                contribs.push(f.log_space());
            }
            Ok((c, normalize_contributions(contribs)?))
        }
    }
}

/// Convenience for tests and the CLI: the eventual sign of the leading
/// coefficient of `f` together with the monomial.
pub fn lm_with_sign(f: &Term) -> Result<(LimitValue, MonomialNF, Ordering)> {
    let (c, m) = lm(f)?;
    let sign = germ_sign_simplified(&simplify(f))?;
    Ok((c, m, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn monomial_of(text: &str) -> MonomialNF {
        lm(&parse(text).unwrap()).unwrap().1
    }

    fn coeff_of(text: &str) -> LimitValue {
        lm(&parse(text).unwrap()).unwrap().0
    }

    #[test]
    fn dominant_summand() {
        let m = monomial_of("x + exp(-x)");
        assert_eq!(
            m.factors,
            vec![MonomialFactor::LogPower { depth: 0, exponent: crate::term::qi(1) }]
        );
        match coeff_of("x + exp(-x)") {
            LimitValue::FiniteNonzero { exact: Some(c), .. } => assert!(c.is_one()),
            other => panic!("coefficient should be exactly 1, got {other:?}"),
        }
    }

    #[test]
    fn monomial_times_constant() {
        // 3 x^2 log x
        let m = monomial_of("3*x^2*log(x)");
        assert_eq!(
            m.factors,
            vec![
                MonomialFactor::LogPower { depth: 0, exponent: crate::term::qi(2) },
                MonomialFactor::LogPower { depth: 1, exponent: crate::term::qi(1) },
            ]
        );
        match coeff_of("3*x^2*log(x)") {
            LimitValue::FiniteNonzero { exact: Some(c), .. } => {
                assert_eq!(c, crate::ExactConstant::from_int(3))
            }
            other => panic!("expected exact 3, got {other:?}"),
        }
    }

    #[test]
    fn unit_is_stripped() {
        // (x+1) e^x  ~  x e^x
        let m = monomial_of("(x+1)*exp(x)");
        assert_eq!(m.factors.len(), 2);
        assert!(matches!(
            &m.factors[0],
            MonomialFactor::ExpFactor { arg, exponent }
                if arg.same(&Term::x()) && exponent == &crate::term::qi(1)
        ));
        assert!(matches!(
            &m.factors[1],
            MonomialFactor::LogPower { depth: 0, exponent } if exponent == &crate::term::qi(1)
        ));
    }

    #[test]
    fn lm_is_idempotent_on_its_monomial() {
        for text in ["x^2*log(x)", "exp(x)/x", "x^(1/2)/log(log(x))"] {
            let m = monomial_of(text);
            let t = m.as_term();
            let (c2, m2) = lm(&t).unwrap();
            assert_eq!(m2, m, "monomial of {text} not idempotent");
            match c2 {
                LimitValue::FiniteNonzero { exact: Some(c), .. } => assert!(c.is_one()),
                other => panic!("expected coefficient 1, got {other:?}"),
            }
        }
    }

    #[test]
    fn log_depth_bookkeeping() {
        let m = monomial_of("log(log(x))^3");
        assert_eq!(m.log_depth(), 2);
        assert_eq!(
            m.factors,
            vec![MonomialFactor::LogPower { depth: 2, exponent: crate::term::qi(3) }]
        );
    }
}
