//! Exponential height, the purely-infinite/bounded split, and the grading
//! of sums by height.
//!
//! The height recursion follows the tower structure: constants sit at
//! -infinity, `x` at 0, reciprocals are height-neutral, logarithms go
//! through the leading-monomial expansion `log(c m u) = log m + log(c u)`
//! with `eh(log u) = eh(u)` for units, and exponentials of large arguments
//! use the level dichotomy: the height grows by one exactly when the
//! argument's level equals its height.  Sums and products take the maximum
//! when a unique top exists; tied tops fall back to a certified range, with
//! a rewriting pass to detect cancellation first.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use crate::asymptotics::level::level_simplified;
use crate::asymptotics::limit::{
    classify_simplified, germ_sign_simplified, validate_domain,
};
use crate::asymptotics::monomial::{lm, MonomialFactor, MonomialNF};
use crate::asymptotics::{EhValue, Extended, GermClass};
use crate::error::{Error, Result};
use crate::term::simplify::{add_summands, simplify};
use crate::term::{build, Term, TermKind};

thread_local! {
    static EH_CACHE: RefCell<HashMap<Term, std::result::Result<EhValue, Error>>> =
        RefCell::new(HashMap::new());
}

/// Exponential height of the germ of `f`.
pub fn eh(f: &Term) -> Result<EhValue> {
    crate::asymptotics::limit::with_budget(|| {
        validate_domain(f)?;
        let s = simplify(f);
        let guard = 2 * s.tower_height() as i64 + 4;
        eh_rec(&s, guard)
    })
}

fn eh_rec(s: &Term, budget: i64) -> Result<EhValue> {
    if budget < 0 {
        return Err(Error::DepthExceeded(format!("eh recursion guard tripped on {s}")));
    }
    if let Some(hit) = EH_CACHE.with(|c| c.borrow().get(s).cloned()) {
        return hit;
    }
    let out = eh_rec_inner(s, budget);
    EH_CACHE.with(|c| {
        let mut cache = c.borrow_mut();
        if cache.len() > 1 << 16 {
            cache.clear();
        }
        cache.insert(s.clone(), out.clone());
    });
    out
}

fn eh_rec_inner(s: &Term, budget: i64) -> Result<EhValue> {
    match s.kind() {
        TermKind::Const(_) => Ok(EhValue::neg_inf()),
        TermKind::X => Ok(EhValue::exact_int(0)),
        TermKind::Recip(t) => eh_rec(&simplify(t), budget),
        TermKind::Add(ss) => {
            let parts: Vec<(Term, EhValue)> = ss
                .iter()
                .map(|t| {
                    let st = simplify(t);
                    eh_rec(&st, budget).map(|v| (st, v))
                })
                .collect::<Result<_>>()?;
            combine_add(s, parts, budget)
        }
        TermKind::Mul(fs) => {
            let parts: Vec<(Term, EhValue)> = fs
                .iter()
                .map(|t| {
                    let st = simplify(t);
                    eh_rec(&st, budget).map(|v| (st, v))
                })
                .collect::<Result<_>>()?;
            combine_mul(s, parts, budget)
        }
        TermKind::Pow(b, r) => {
            // b^r = exp(r log b); height through the exponential dichotomy,
            // on |b| so that internal integer powers of negative germs work.
            let sb = simplify(b);
            let base = match germ_sign_simplified(&sb)? {
                Ordering::Greater => sb,
                Ordering::Less => simplify(&build::neg(sb)),
                Ordering::Equal => {
                    return Err(Error::Domain("power of the zero germ".into()))
                }
            };
            let arg = simplify(&build::scale_q(r.clone(), build::log(base)));
            eh_exp_arg(&arg, budget - 1)
        }
        TermKind::Exp(a) => {
            let sa = simplify(a);
            eh_exp_arg(&sa, budget - 1)
        }
        TermKind::Log(g) => {
            let sg = simplify(g);
            eh_log(&sg, budget - 1)
        }
    }
}

/// `eh(exp o a)`.
fn eh_exp_arg(a: &Term, budget: i64) -> Result<EhValue> {
    if budget < 0 {
        return Err(Error::DepthExceeded(format!(
            "eh recursion guard tripped on exp argument {a}"
        )));
    }
    let cls = classify_simplified(a)?;
    if cls.is_bounded() {
        // exp(c + s) = exp(c) exp(s); constants are height-neutral and
        // exp of a small germ expands with the same height as the germ.
        return eh_rec(a, budget);
    }
    let positive = if cls == GermClass::InfIncreasing {
        a.clone()
    } else {
        simplify(&build::neg(a.clone()))
    };
    let lvl = match level_simplified(&positive)? {
        Extended::Int(l) => l,
        Extended::NegInf => {
            return Err(Error::Undecided(format!(
                "large germ {a} reported level -inf"
            )))
        }
    };
    let height = eh_rec(a, budget)?;
    Ok(match height {
        EhValue::Exact(Extended::Int(e)) => {
            if lvl == e {
                EhValue::exact_int(e + 1)
            } else {
                EhValue::exact_int(e)
            }
        }
        EhValue::Exact(Extended::NegInf) => {
            return Err(Error::Undecided(format!(
                "unbounded germ {a} reported height -inf"
            )))
        }
        EhValue::Range { lo, hi } => {
            // level <= true height always; the dichotomy adds one exactly
            // when the height sits at the level.
            if lvl >= hi {
                EhValue::exact_int(hi + 1)
            } else {
                let m = match lo {
                    Extended::Int(l) => l.max(lvl),
                    Extended::NegInf => lvl,
                };
                let lower = if m == lvl { lvl + 1 } else { m };
                EhValue::range(Extended::Int(lower), hi)
            }
        }
    })
}

/// `eh(log o g)` for eventually positive `g`, through the expansion
/// `log(c m u) = log m + log c + log u` with `eh(log u) = eh(u)`.
fn eh_log(g: &Term, budget: i64) -> Result<EhValue> {
    if budget < 0 {
        return Err(Error::DepthExceeded(format!(
            "eh recursion guard tripped on log argument {g}"
        )));
    }
    let (_, mono) = lm(g)?;
    let mut parts: Vec<(Term, EhValue)> = Vec::new();
    for f in &mono.factors {
        match f {
            MonomialFactor::LogPower { depth, exponent } => {
                let t = build::scale_q(exponent.clone(), Term::log_iter(depth + 1));
                parts.push((t, EhValue::exact_int(-((*depth as i64) + 1))));
            }
            MonomialFactor::ExpFactor { arg, exponent } => {
                let sa = simplify(arg);
                let v = eh_rec(&sa, budget)?;
                parts.push((build::scale_q(exponent.clone(), sa), v));
            }
        }
    }
    // the unit part g/m contributes eh(log u) = eh(u)
    let unit = simplify(&build::div(g.clone(), mono.as_term()));
    if !unit.is_one_const() {
        let v = eh_rec(&unit, budget)?;
        if v != EhValue::neg_inf() {
            parts.push((unit, v));
        }
    }
    if parts.is_empty() {
        return Ok(EhValue::neg_inf());
    }
    // Monomial contributions are purely infinite with pairwise distinct
    // classes and the unit part is bounded, so tied tops cannot cancel:
    // the maximum is attained.
    let hi = parts.iter().map(|(_, v)| v.upper()).max().unwrap();
    let all_exact_top = parts
        .iter()
        .filter(|(_, v)| v.upper() == hi)
        .all(|(_, v)| v.as_exact().is_some());
    match hi {
        Extended::NegInf => Ok(EhValue::neg_inf()),
        Extended::Int(h) => {
            if all_exact_top {
                Ok(EhValue::exact_int(h))
            } else {
                let lo = parts.iter().map(|(_, v)| v.lower()).max().unwrap();
                Ok(EhValue::range(lo, h))
            }
        }
    }
}

/// Height of a sum: unique top wins; tied tops try cancellation detection by
/// re-simplifying the tied part, then fall back to a range with a
/// level-based lower bound.
fn combine_add(whole: &Term, parts: Vec<(Term, EhValue)>, budget: i64) -> Result<EhValue> {
    combine_sum_like(whole, parts, budget, true)
}

/// Height of a product: heights differ, the maximum wins exactly; ties are
/// treated like sums (cancellation through rewriting, then a range).
fn combine_mul(whole: &Term, parts: Vec<(Term, EhValue)>, budget: i64) -> Result<EhValue> {
    combine_sum_like(whole, parts, budget, false)
}

fn combine_sum_like(
    whole: &Term,
    parts: Vec<(Term, EhValue)>,
    budget: i64,
    additive: bool,
) -> Result<EhValue> {
    let hi = match parts.iter().map(|(_, v)| v.upper()).max() {
        Some(h) => h,
        None => return Ok(EhValue::neg_inf()),
    };
    let top: Vec<&(Term, EhValue)> =
        parts.iter().filter(|(_, v)| v.upper() == hi).collect();
    let hi_int = match hi {
        Extended::NegInf => return Ok(EhValue::neg_inf()),
        Extended::Int(h) => h,
    };
    if top.len() == 1 {
        if let Some(v) = top[0].1.as_exact() {
            return Ok(EhValue::Exact(v));
        }
        // single inexact top: its true height may drop below the others
        let lo = parts.iter().map(|(_, v)| v.lower()).max().unwrap();
        return Ok(EhValue::range(lo, hi_int));
    }
    // tie: try cancellation detection through rewriting of the tied part
    if top.iter().all(|(_, v)| v.as_exact().is_some()) {
        let tied_terms: Vec<Term> = top.iter().map(|(t, _)| t.clone()).collect();
        let recombined = if additive {
            simplify(&crate::term::simplify::norm_add(tied_terms.clone()))
        } else {
            simplify(&crate::term::simplify::norm_mul(tied_terms.clone()))
        };
        let plain = if additive {
            tied_terms.len() != add_summands(&recombined).len()
        } else {
            tied_terms.len() != crate::term::simplify::mul_factors(&recombined).len()
        };
        if plain {
            // structure changed: recurse on the recombination plus the rest
            let mut rest: Vec<Term> =
                parts.iter().filter(|(_, v)| v.upper() != hi).map(|(t, _)| t.clone()).collect();
            rest.push(recombined);
            let whole2 = if additive {
                simplify(&crate::term::simplify::norm_add(rest))
            } else {
                simplify(&crate::term::simplify::norm_mul(rest))
            };
            if !whole2.same(whole) {
                return eh_rec(&whole2, budget - 1);
            }
        }
    }
    // certified range; the lower bound comes from the level of the whole
    let lo = level_lower_bound(whole)?;
    Ok(EhValue::range(lo, hi_int))
}

/// `eh(f) >= eh(lm(f)) = level(|f|)`, with `-inf` when the sign or level is
/// out of reach.
fn level_lower_bound(whole: &Term) -> Result<Extended> {
    let sign = match germ_sign_simplified(whole) {
        Ok(s) => s,
        Err(Error::Undecided(_)) => return Ok(Extended::NegInf),
        Err(e) => return Err(e),
    };
    let positive = match sign {
        Ordering::Equal => return Ok(Extended::NegInf), // zero germ: eh = -inf
        Ordering::Greater => whole.clone(),
        Ordering::Less => simplify(&build::neg(whole.clone())),
    };
    match level_simplified(&positive) {
        Ok(l) => Ok(l),
        Err(Error::Undecided(_)) | Err(Error::DepthExceeded(_)) => Ok(Extended::NegInf),
        Err(e) => Err(e),
    }
}

/// Splits `f = purely_infinite + bounded` by peeling large leading
/// monomials with exact coefficients.
pub fn decompose_ub(f: &Term) -> Result<(Term, Term)> {
    validate_domain(f)?;
    let mut rem = simplify(f);
    let mut large_parts: Vec<Term> = Vec::new();
    for _ in 0..64 {
        let cls = match classify_simplified(&rem) {
            Ok(c) => c,
            Err(Error::Undecided(msg)) => return Err(Error::Undecomposable(msg)),
            Err(e) => return Err(e),
        };
        match cls {
            GermClass::ZeroGerm => {
                rem = Term::int(0);
                break;
            }
            GermClass::InfIncreasing | GermClass::InfDecreasing => {}
            _ => break, // bounded remainder
        }
        let (coeff, mono) = match lm(&rem) {
            Ok(r) => r,
            Err(Error::Undecided(msg)) | Err(Error::Unsupported(msg)) => {
                return Err(Error::Undecomposable(msg))
            }
            Err(e) => return Err(e),
        };
        if !mono.is_large()? {
            break;
        }
        let exact = match coeff {
            crate::asymptotics::LimitValue::FiniteNonzero { exact: Some(c), .. } => c,
            _ => {
                return Err(Error::Undecomposable(format!(
                    "leading coefficient of {rem} is not exactly representable"
                )))
            }
        };
        let piece = simplify(&build::scale(exact, mono.as_term()));
        large_parts.push(piece.clone());
        rem = simplify(&build::sub(rem, piece));
    }
    let purely_infinite = if large_parts.is_empty() {
        Term::int(0)
    } else {
        simplify(&crate::term::simplify::norm_add(large_parts))
    };
    // remainder must be bounded or the budget was too small
    match classify_simplified(&rem)? {
        GermClass::InfIncreasing | GermClass::InfDecreasing => Err(Error::Undecomposable(
            format!("large monomial peeling did not terminate on {f}"),
        )),
        GermClass::ZeroGerm => Ok((purely_infinite, Term::int(0))),
        _ => Ok((purely_infinite, rem)),
    }
}

/// Groups the summands of `f` by exact height.  Errors with
/// `Undecomposable` when any summand's height is a range.
pub fn eh_components(f: &Term) -> Result<Vec<(Extended, Term)>> {
    validate_domain(f)?;
    let s = simplify(f);
    if s.is_zero_const() {
        return Ok(vec![(Extended::NegInf, s)]);
    }
    let guard = 2 * s.tower_height() as i64 + 4;
    let mut groups: Vec<(Extended, Vec<Term>)> = Vec::new();
    for summand in add_summands(&s) {
        let st = simplify(&summand);
        let v = eh_rec(&st, guard)?;
        let e = v.as_exact().ok_or_else(|| {
            Error::Undecomposable(format!(
                "summand {st} has height range {v}, not an exact value"
            ))
        })?;
        match groups.iter_mut().find(|(k, _)| *k == e) {
            Some((_, ts)) => ts.push(st),
            None => groups.push((e, vec![st])),
        }
    }
    groups.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(groups
        .into_iter()
        .map(|(k, ts)| (k, simplify(&crate::term::simplify::norm_add(ts))))
        .collect())
}

/// The leading monomial's height, used to cross-check `level = eh(lm)`.
pub fn monomial_eh(m: &MonomialNF) -> Result<Extended> {
    let mut best = Extended::NegInf;
    for f in &m.factors {
        let v = match f {
            MonomialFactor::LogPower { depth, .. } => Extended::Int(-((*depth as i64))),
            MonomialFactor::ExpFactor { arg, .. } => {
                let sa = simplify(arg);
                let guard = 2 * sa.tower_height() as i64 + 4;
                match eh_rec(&sa, guard)? {
                    EhValue::Exact(v) => v.plus(1),
                    EhValue::Range { .. } => {
                        return Err(Error::Undecided(
                            "exponential factor argument has inexact height".into(),
                        ))
                    }
                }
            }
        };
        best = best.max(v);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::EhValue;
    use crate::term::parse;

    fn height(text: &str) -> EhValue {
        eh(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn paper_values() {
        assert_eq!(height("x + exp(-x)"), EhValue::exact_int(1));
        assert_eq!(height("exp(x + exp(-x))"), EhValue::exact_int(1));
        assert_eq!(height("x*log(x)"), EhValue::exact_int(0));
        assert_eq!(height("log(x)"), EhValue::exact_int(-1));
        assert_eq!(height("x"), EhValue::exact_int(0));
        assert_eq!(height("7/3"), EhValue::neg_inf());
    }

    #[test]
    fn shift_laws_on_samples() {
        // eh(f o log) = eh(f) - 1, eh(f o exp) = eh(f) + 1
        for (text, expected) in [
            ("x^(1/2)", 0i64),
            ("x*exp(x)", 1),
            ("x + log(x)", 0),
            ("exp(x)*log(x)", 1),
        ] {
            assert_eq!(height(text), EhValue::exact_int(expected), "eh({text})");
            let f = parse(text).unwrap();
            let with_log = crate::term::substitute(&f, &Term::log_raw(Term::x()));
            assert_eq!(eh(&with_log).unwrap(), EhValue::exact_int(expected - 1), "eh({text} o log)");
            let with_exp = crate::term::substitute(&f, &Term::exp_raw(Term::x()));
            assert_eq!(eh(&with_exp).unwrap(), EhValue::exact_int(expected + 1), "eh({text} o exp)");
        }
    }

    #[test]
    fn reciprocal_is_height_neutral() {
        assert_eq!(height("1/(x + exp(-x))"), EhValue::exact_int(1));
        assert_eq!(height("1/log(x)"), EhValue::exact_int(-1));
    }

    #[test]
    fn grading() {
        let parts = eh_components(&parse("x + exp(-x)").unwrap()).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, Extended::Int(0));
        assert_eq!(parts[0].1, Term::x());
        assert_eq!(parts[1].0, Extended::Int(1));
        let parts = eh_components(&parse("log(x) + 5").unwrap()).unwrap();
        assert_eq!(parts[0].0, Extended::NegInf);
        assert_eq!(parts[1].0, Extended::Int(-1));
        let parts = eh_components(&parse("x").unwrap()).unwrap();
        assert_eq!(parts, vec![(Extended::Int(0), Term::x())]);
    }

    #[test]
    fn ub_split() {
        let (u, b) = decompose_ub(&parse("x + 1 + 1/x").unwrap()).unwrap();
        assert_eq!(u, Term::x());
        assert_eq!(b, crate::term::simplify::simplify(&parse("1 + 1/x").unwrap()));

        let (u, b) = decompose_ub(&parse("exp(x)*(1 + 1/x)").unwrap()).unwrap();
        assert_eq!(u, crate::term::simplify::simplify(&parse("exp(x) + exp(x)/x").unwrap()));
        assert!(b.is_zero_const());

        let (u, b) = decompose_ub(&parse("1/log(x)").unwrap()).unwrap();
        assert!(u.is_zero_const());
        assert_eq!(b, crate::term::simplify::simplify(&parse("1/log(x)").unwrap()));
    }
}
