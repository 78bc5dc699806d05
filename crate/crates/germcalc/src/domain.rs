//! Real domains on the Riemann surface of the logarithm, keyed by positive
//! germ terms, and the arg-transfer maps nu for scaling, powers, log and
//! exp.
//!
//! A spec `(h, a)` denotes `U_h = { x : |x| > a, |arg x| < h(|x|) }`.  All
//! semantics are germs at infinity: the base radius is metadata, and two
//! specs with asymptotically equal bounds denote the same domain germ.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{alevel, classify, compare, level, limit, Comparison, GermClass, LimitValue};
use crate::constant::ExactConstant;
use crate::error::{Error, Result};
use crate::term::simplify::simplify;
use crate::term::{build, substitute, Term};

/// A real domain `U_h` at infinity.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    /// Angular bound; must be eventually positive.
    pub bound: Term,
    /// Radius below which the domain is not considered; metadata only.
    pub base_radius: f64,
}

impl DomainSpec {
    pub fn new(bound: Term, base_radius: f64) -> DomainSpec {
        DomainSpec { bound, base_radius }
    }
}

/// Angular-level class of a domain, with the witness pair of bound germs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainClass {
    pub k: i64,
    #[serde(skip)]
    pub witnesses: Option<(Term, Term)>,
}

/// The class of a real domain is the angular level of its bound, witnessed
/// by the bound itself on both sides.
pub fn domain_class(spec: &DomainSpec) -> Result<DomainClass> {
    let k = alevel(&spec.bound)?;
    Ok(DomainClass { k, witnesses: Some((spec.bound.clone(), spec.bound.clone())) })
}

/// Bound of the image of `U_h` under scalar multiplication by `r`:
/// `nu_{m_r}(h) = h o m_{1/r}`.
pub fn nu_mr(h: &Term, r: &crate::Rational) -> Result<Term> {
    require_positive_rational(r)?;
    let inner = build::scale_q(r.recip(), Term::x());
    Ok(simplify(&substitute(h, &inner)))
}

/// Bound of the image of `U_h` under the power map `p_r`:
/// `nu_{p_r}(h) = m_r o h o p_{1/r}`.
pub fn nu_pr(h: &Term, r: &crate::Rational) -> Result<Term> {
    require_positive_rational(r)?;
    let inner = build::pow(Term::x(), r.recip());
    Ok(simplify(&build::scale_q(r.clone(), substitute(h, &inner))))
}

fn require_positive_rational(r: &crate::Rational) -> Result<()> {
    use num_traits::Signed;
    if r.is_positive() {
        Ok(())
    } else {
        Err(Error::Positivity("the map parameter r must be positive".into()))
    }
}

/// Class and asymptotic template of the bound of `log(U_h)`.
#[derive(Clone, Debug)]
pub struct NuLogResult {
    /// `alevel(h) + 1`.
    pub class: i64,
    /// `(h/log) o exp(x*u)` with `u` an unresolved unit-at-infinity
    /// placeholder; for reporting only.
    pub asymptotic_form: NuLogTemplate,
}

#[derive(Clone, Debug)]
pub struct NuLogTemplate {
    pub outer: Term,
}

impl std::fmt::Display for NuLogTemplate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})(exp(x*u)), u -> 1 at infinity", self.outer)
    }
}

/// The image of a real domain under `log` has angular level one higher,
/// with bound asymptotic to `(h/log) o exp(x*u)` for a unit `u`.
pub fn nu_log_class(h: &Term) -> Result<NuLogResult> {
    let class = alevel(h)? + 1;
    let outer = simplify(&build::div(h.clone(), Term::log_raw(Term::x())));
    Ok(NuLogResult { class, asymptotic_form: NuLogTemplate { outer } })
}

/// The image class under `exp`, defined on standard domains only:
/// `alevel(h) - 1`, floored at -1.
pub fn nu_exp_class(h: &Term) -> Result<i64> {
    match is_standard(h)? {
        Standardness::Standard => {}
        Standardness::NotStandard => return Err(Error::NotStandardDomain),
        Standardness::Undecided => {
            return Err(Error::Undecided(
                "standardness of the domain could not be decided".into(),
            ))
        }
    }
    Ok((alevel(h)? - 1).max(-1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Standardness {
    Standard,
    NotStandard,
    Undecided,
}

/// Standardness of `U_h`: inside the half-opening `pi/2` with, at the
/// boundary opening, `x cos(h(x))` infinitely increasing.
///
/// Sufficient conditions decided symbolically: a finite limit strictly below
/// `pi/2` is standard; exceeding `pi/2` on an unbounded set is not.  The
/// boundary case `h -> pi/2` falls back to a numeric monotonicity probe of
/// `x cos(h(x))` on an escalating grid.
pub fn is_standard(h: &Term) -> Result<Standardness> {
    let half_pi = Term::constant(ExactConstant::pi_times(crate::term::q(1, 2)));
    let lv = limit(h)?;
    match lv {
        LimitValue::PlusInfinity => return Ok(Standardness::NotStandard),
        LimitValue::MinusInfinity => {
            return Err(Error::Positivity("domain bound tends to -infinity".into()))
        }
        LimitValue::Zero => return Ok(Standardness::Standard),
        LimitValue::FiniteNonzero { sign, .. } => {
            if sign < 0 {
                return Err(Error::Positivity("domain bound has negative limit".into()));
            }
        }
    }
    // compare the limit against pi/2 exactly through the difference germ
    let diff = simplify(&build::sub(half_pi.clone(), h.clone()));
    match classify(&diff)? {
        GermClass::InfIncreasing | GermClass::FinitePositive | GermClass::SmallPositive => {
            // h stays below pi/2; standard iff the limit is < pi/2 or the
            // boundary probe succeeds.  limit < pi/2 exactly:
            match compare_limit_to_half_pi(h)? {
                Some(std::cmp::Ordering::Less) => Ok(Standardness::Standard),
                Some(std::cmp::Ordering::Equal) => boundary_probe(h),
                Some(std::cmp::Ordering::Greater) | None => boundary_probe(h),
            }
        }
        GermClass::ZeroGerm => boundary_probe(h), // h = pi/2 identically
        _ => Ok(Standardness::NotStandard),       // h exceeds pi/2 unboundedly often
    }
}

fn compare_limit_to_half_pi(h: &Term) -> Result<Option<std::cmp::Ordering>> {
    let lv = limit(h)?;
    let half_pi = ExactConstant::pi_times(crate::term::q(1, 2));
    Ok(match lv {
        LimitValue::FiniteNonzero { exact: Some(c), .. } => Some(c.cmp_exact(&half_pi)),
        LimitValue::FiniteNonzero { enclosure: (lo, hi), .. } => {
            let hp = half_pi.to_f64();
            if hi < hp {
                Some(std::cmp::Ordering::Less)
            } else if lo > hp {
                Some(std::cmp::Ordering::Greater)
            } else {
                None
            }
        }
        LimitValue::Zero => Some(std::cmp::Ordering::Less),
        _ => None,
    })
}

/// Numeric probe: is `x cos(h(x))` increasing along a geometric grid?
/// Comparisons are certified interval comparisons; an inseparable pair
/// leaves the question undecided.
fn boundary_probe(h: &Term) -> Result<Standardness> {
    use crate::interval::{Interval, IntervalCtx};
    let mut ctx = IntervalCtx::new(768);
    let mut prev: Option<Interval> = None;
    let mut increases = 0;
    let mut x = 16.0f64;
    for _ in 0..24 {
        let xi = ctx.from_f64(x);
        let hv = match crate::asymptotics::sign::eval_interval(h, &xi, &mut ctx) {
            Ok(iv) => iv,
            Err(_) => break,
        };
        let c = hv.cos(&mut ctx);
        let v = xi.mul(&c, &ctx);
        if let Some(p) = &prev {
            if p.certainly_lt(&v) {
                increases += 1;
            } else if v.certainly_lt(p) {
                return Ok(Standardness::NotStandard);
            } else {
                return Ok(Standardness::Undecided);
            }
        }
        prev = Some(v);
        x *= 4.0;
    }
    if increases >= 4 {
        Ok(Standardness::Standard)
    } else {
        Ok(Standardness::Undecided)
    }
}

/// Translation sandwich for infinitely increasing bounds:
/// `U_{h o t_{-eps}}  <=  t_a(U_h)  <=  U_{h o t_{+eps}}`.
pub fn translate_sandwich(h: &Term, eps: &crate::Rational) -> Result<(Term, Term)> {
    require_positive_rational(eps)?;
    if classify(h)? != GermClass::InfIncreasing {
        return Err(Error::NotInfinitelyIncreasing);
    }
    let e = ExactConstant::from_rational(eps.clone());
    let lower = simplify(&substitute(h, &build::add2(Term::x(), Term::constant(e.neg()))));
    let upper = simplify(&substitute(h, &build::add2(Term::x(), Term::constant(e))));
    Ok((lower, upper))
}

/// A domain is angle-bounded when its bound germ is bounded.
pub fn angle_bounded(h: &Term) -> Result<bool> {
    Ok(classify(h)? != GermClass::InfIncreasing)
}

/// `h1 < h2` eventually, for positive bounds (used by tests).
pub fn bound_lt(h1: &Term, h2: &Term) -> Result<bool> {
    let diff = simplify(&build::sub(h2.clone(), h1.clone()));
    match crate::asymptotics::germ_sign(&diff)? {
        std::cmp::Ordering::Greater => Ok(true),
        _ => Ok(false),
    }
}

/// Asymptotic equality with ratio 1, used by the nu_pr inverse law.
pub fn asymptotically_equal(h1: &Term, h2: &Term) -> Result<bool> {
    match compare(h1, h2)? {
        Comparison::Comparable(LimitValue::FiniteNonzero { exact: Some(c), .. }) => {
            Ok(c.is_one())
        }
        Comparison::Comparable(LimitValue::FiniteNonzero { enclosure, .. }) => {
            Ok(enclosure.0 <= 1.0 && 1.0 <= enclosure.1)
        }
        _ => Ok(false),
    }
}

/// Extended level of a positive bound germ, re-exported for CLI use.
pub fn bound_level(h: &Term) -> Result<crate::asymptotics::Extended> {
    level(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn domain_classes() {
        assert_eq!(domain_class(&DomainSpec::new(t("pi/2"), 0.0)).unwrap().k, 0);
        assert_eq!(domain_class(&DomainSpec::new(t("1/x"), 0.0)).unwrap().k, 1);
        assert_eq!(domain_class(&DomainSpec::new(t("x"), 0.0)).unwrap().k, -1);
    }

    #[test]
    fn nu_maps() {
        let h = t("1/x");
        let two = crate::term::qi(2);
        assert_eq!(nu_mr(&h, &two).unwrap(), crate::simplify(&t("2/x")));
        assert_eq!(nu_pr(&h, &two).unwrap(), crate::simplify(&t("2/x^(1/2)")));
        let c = t("pi/2");
        assert_eq!(nu_mr(&c, &crate::term::qi(5)).unwrap(), crate::simplify(&c));
        let l = t("1/log(x)");
        let three = crate::term::qi(3);
        assert_eq!(nu_mr(&l, &three).unwrap(), crate::simplify(&t("1/log(x/3)")));
        assert_eq!(nu_pr(&l, &three).unwrap(), crate::simplify(&t("9/log(x)")));
    }

    #[test]
    fn nu_log_and_exp_classes() {
        assert_eq!(nu_log_class(&t("x")).unwrap().class, 0);
        assert_eq!(nu_log_class(&t("pi/2")).unwrap().class, 1);
        assert_eq!(nu_log_class(&t("1/x")).unwrap().class, 2);
        assert_eq!(nu_exp_class(&t("1/x")).unwrap(), 0);
        assert_eq!(nu_exp_class(&t("1/exp(x)")).unwrap(), 1);
        assert_eq!(nu_exp_class(&t("pi/4")).unwrap(), -1);
    }

    #[test]
    fn standardness() {
        assert_eq!(is_standard(&t("pi/4")).unwrap(), Standardness::Standard);
        assert_eq!(is_standard(&t("x")).unwrap(), Standardness::NotStandard);
        assert_eq!(is_standard(&t("pi/2 - 1/x")).unwrap(), Standardness::Standard);
        assert_eq!(is_standard(&t("pi")).unwrap(), Standardness::NotStandard);
    }

    #[test]
    fn sandwich() {
        let (lo, hi) = translate_sandwich(&t("x"), &crate::term::qi(1)).unwrap();
        assert_eq!(lo, crate::simplify(&t("x - 1")));
        assert_eq!(hi, crate::simplify(&t("x + 1")));
        let (lo, hi) = translate_sandwich(&t("log(x)"), &crate::term::qi(1)).unwrap();
        assert_eq!(lo, crate::simplify(&t("log(x - 1)")));
        assert_eq!(hi, crate::simplify(&t("log(x + 1)")));
        assert!(matches!(
            translate_sandwich(&t("1/x"), &crate::term::qi(1)),
            Err(Error::NotInfinitelyIncreasing)
        ));
    }

    #[test]
    fn angle_boundedness() {
        assert!(angle_bounded(&t("pi/2")).unwrap());
        assert!(!angle_bounded(&t("x")).unwrap());
        assert!(!angle_bounded(&t("log(x)")).unwrap());
    }
}
