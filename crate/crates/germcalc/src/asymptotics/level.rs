//! Growth level, angular level, simplicity, and the compositional-inverse
//! bounds.
//!
//! The level of an infinitely increasing germ is computed by the iterated
//! sandwich recursion: when `f` outgrows every power the problem reduces to
//! `log o f`, when it grows slower than every power to `f o exp`, and when
//! some power sandwich `x^(1/n) <= f <= x^n` applies the level is 0.  Each
//! reduction strictly peels the tower, and a guard of `2*towerheight + 2`
//! turns nontermination bugs into errors.

use crate::asymptotics::limit::{classify_simplified, limit_simplified, validate_domain};
use crate::asymptotics::{Extended, GermClass, LimitValue};
use crate::error::{Error, Result};
use crate::term::simplify::simplify;
use crate::term::{build, substitute, Term};

/// Level of an eventually positive germ; `NegInf` exactly for germs
/// asymptotic to a positive constant.
pub fn level(f: &Term) -> Result<Extended> {
    crate::asymptotics::limit::with_budget(|| {
        validate_domain(f)?;
        let s = simplify(f);
        level_simplified(&s)
    })
}

pub(crate) fn level_simplified(s: &Term) -> Result<Extended> {
    let cls = classify_simplified(s)?;
    match cls {
        GermClass::FinitePositive => Ok(Extended::NegInf),
        GermClass::InfIncreasing => {
            let guard = 2 * s.tower_height() as i64 + 2;
            level_inf(s.clone(), guard).map(Extended::Int)
        }
        GermClass::SmallPositive => {
            let r = simplify(&build::recip(s.clone()));
            let guard = 2 * r.tower_height() as i64 + 2;
            level_inf(r, guard).map(Extended::Int)
        }
        other => Err(Error::Positivity(format!(
            "level needs an eventually positive germ, got class {}",
            other.name()
        ))),
    }
}

fn level_inf(s: Term, budget: i64) -> Result<i64> {
    if budget < 0 {
        return Err(Error::DepthExceeded(format!(
            "level recursion guard tripped on {s}"
        )));
    }
    // position of f against the powers of x, through log f / log x
    let ratio = simplify(&build::div(build::log(s.clone()), Term::log_raw(Term::x())));
    let (lv, _) = limit_simplified(&ratio)?;
    match lv {
        LimitValue::PlusInfinity => {
            let peeled = simplify(&build::log(s));
            Ok(level_inf(peeled, budget - 1)? + 1)
        }
        LimitValue::Zero => {
            let lifted = simplify(&substitute(&s, &Term::exp_raw(Term::x())));
            Ok(level_inf(lifted, budget - 1)? - 1)
        }
        LimitValue::FiniteNonzero { .. } => Ok(0),
        LimitValue::MinusInfinity => Err(Error::Positivity(format!(
            "log of {s} tends to -infinity; germ is not infinitely increasing"
        ))),
    }
}

/// Angular level: `max(-1, level(f/log) + 1)` when `f/log` tends to zero
/// from above, and `-1` otherwise.
pub fn alevel(f: &Term) -> Result<i64> {
    crate::asymptotics::limit::with_budget(|| alevel_impl(f))
}

fn alevel_impl(f: &Term) -> Result<i64> {
    validate_domain(f)?;
    let s = simplify(f);
    let cls = classify_simplified(&s)?;
    if !cls.is_eventually_positive() {
        return Err(Error::Positivity(format!(
            "angular level needs an eventually positive germ, got class {}",
            cls.name()
        )));
    }
    let g = simplify(&build::div(s, Term::log_raw(Term::x())));
    if classify_simplified(&g)? != GermClass::SmallPositive {
        return Ok(-1);
    }
    match level_simplified(&g)? {
        Extended::Int(l) => Ok((-1i64).max(l + 1)),
        Extended::NegInf => Err(Error::Undecided(
            "germ in D reported level -inf; engine inconsistency".into(),
        )),
    }
}

/// Simplicity verdict: whether `eh(f) = level(f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Simplicity {
    Simple,
    NotSimple,
    Undecided,
}

pub fn is_simple(f: &Term) -> Result<Simplicity> {
    use crate::asymptotics::{eh, EhValue};
    let lvl = level(f)?;
    let height = eh(f)?;
    Ok(match height {
        EhValue::Exact(v) => {
            if v == lvl {
                Simplicity::Simple
            } else {
                Simplicity::NotSimple
            }
        }
        EhValue::Range { lo, hi } => {
            if lvl < lo || lvl > Extended::Int(hi) {
                Simplicity::NotSimple
            } else {
                Simplicity::Undecided
            }
        }
    })
}

/// Upper bound on `eh(g o f^{-1})` for infinitely increasing `f`:
/// `max(eh(g) + eh(f) - 2*level(f), eh(f) - level(f))`.
pub fn inverse_eh_bound(eh_g: i64, eh_f: i64, level_f: i64) -> i64 {
    (eh_g + eh_f - 2 * level_f).max(eh_f - level_f)
}

/// `level(f^{-1}) = -level(f)` for infinitely increasing `f`.
pub fn inverse_level(level_f: i64) -> i64 {
    -level_f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn lvl(text: &str) -> Extended {
        level(&parse(text).unwrap()).unwrap()
    }

    fn alvl(text: &str) -> i64 {
        alevel(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn paper_level_values() {
        assert_eq!(lvl("exp(x)"), Extended::Int(1));
        assert_eq!(lvl("log(x)"), Extended::Int(-1));
        assert_eq!(lvl("x^(1/2)"), Extended::Int(0));
        assert_eq!(lvl("x + exp(-x)"), Extended::Int(0));
        // (log/log_3) * (1/log) = 1/log_3 has level -3
        assert_eq!(lvl("(log(x)/log_3(x)) * (1/log(x))"), Extended::Int(-3));
        assert_eq!(lvl("5"), Extended::NegInf);
    }

    #[test]
    fn sandwich_level_zero() {
        assert_eq!(lvl("exp(log(x)/log_2(x))"), Extended::Int(0));
        assert_eq!(lvl("x*log(x)"), Extended::Int(0));
        assert_eq!(lvl("exp(sqrt(log(x)))"), Extended::Int(0));
    }

    #[test]
    fn paper_alevel_values() {
        assert_eq!(alvl("1/x"), 1);
        assert_eq!(alvl("pi/4"), 0);
        assert_eq!(alvl("x^2"), -1);
        assert_eq!(alvl("1/exp(x)"), 2);
        assert_eq!(alvl("sqrt(log(x))"), 0);
        assert_eq!(alvl("x"), -1);
        assert_eq!(alvl("log(x)"), -1);
    }

    #[test]
    fn inverse_formulas() {
        assert_eq!(inverse_eh_bound(1, 1, 1), 0);
        assert_eq!(inverse_eh_bound(0, 0, 0), 0);
        assert_eq!(inverse_eh_bound(2, 1, 0), 3);
        assert_eq!(inverse_level(1), -1);
        assert_eq!(inverse_level(0), 0);
        assert_eq!(inverse_level(-2), 2);
    }

    #[test]
    fn level_rejects_negative_germs() {
        assert!(matches!(level(&parse("-x").unwrap()), Err(Error::Positivity(_))));
    }
}
