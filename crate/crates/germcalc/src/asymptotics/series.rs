//! Generalized truncated series in a small parameter `w = exp(h)`.
//!
//! Exponents live in `Q + Q*pi` (exact, totally ordered); coefficients are
//! germ terms of strictly lower comparability class than `w`.  A series is
//! valid strictly below its truncation cap; `exact` marks expansions that
//! lost nothing to truncation, which is what licenses zero-germ conclusions.

use std::cmp::Ordering;

use num_traits::One;

use crate::constant::{ExactConstant, Rational};
use crate::error::{Error, Result};
use crate::term::simplify::simplify;
use crate::term::{build, Term};

/// Hard limits that keep runaway expansions in check.
pub const MAX_TERMS: usize = 56;

#[derive(Clone, Debug)]
pub struct Series {
    /// (exponent, coefficient), sorted by exponent ascending; coefficients
    /// are simplified and not literally zero.
    pub terms: Vec<(ExactConstant, Term)>,
    /// All exponents are < cap; contributions at or above cap were dropped.
    pub cap: ExactConstant,
    /// No truncation happened anywhere in the construction of this series.
    pub exact: bool,
}

impl Series {
    pub fn zero(cap: ExactConstant) -> Series {
        Series { terms: Vec::new(), cap, exact: true }
    }

    pub fn constant(t: Term, cap: ExactConstant) -> Series {
        Series::monomial(ExactConstant::zero(), t, cap)
    }

    pub fn monomial(e: ExactConstant, coeff: Term, cap: ExactConstant) -> Series {
        let c = simplify(&coeff);
        let mut terms = Vec::new();
        let mut exact = true;
        if !c.is_zero_const() {
            if e.cmp_exact(&cap) == Ordering::Less {
                terms.push((e, c));
            } else {
                exact = false;
            }
        }
        Series { terms, cap, exact }
    }

    pub fn valuation(&self) -> Option<&ExactConstant> {
        self.terms.first().map(|(e, _)| e)
    }

    fn push_raw(&mut self, e: ExactConstant, c: Term) {
        if e.cmp_exact(&self.cap) != Ordering::Less {
            self.exact = false;
            return;
        }
        self.terms.push((e, c));
    }

    fn normalize(mut self) -> Result<Series> {
        self.terms.sort_by(|a, b| a.0.cmp_exact(&b.0));
        let mut out: Vec<(ExactConstant, Term)> = Vec::new();
        for (e, c) in self.terms {
            if let Some(last) = out.last_mut() {
                if last.0 == e || last.0.cmp_exact(&e) == Ordering::Equal {
                    last.1 = build::add2(last.1.clone(), c);
                    continue;
                }
            }
            out.push((e, c));
        }
        let mut cleaned = Vec::with_capacity(out.len());
        for (e, c) in out {
            let c = simplify(&c);
            if !c.is_zero_const() {
                cleaned.push((e, c));
            }
        }
        if cleaned.len() > MAX_TERMS {
            // truncate soundly: lower the cap to the first dropped exponent
            let new_cap = cleaned[MAX_TERMS].0.clone();
            cleaned.truncate(MAX_TERMS);
            self.cap = min_const(&self.cap, &new_cap);
            self.exact = false;
        }
        self.terms = cleaned;
        Ok(self)
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        let cap = min_const(&self.cap, &other.cap);
        let mut s = Series { terms: Vec::new(), cap, exact: self.exact && other.exact };
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            s.push_raw(e.clone(), c.clone());
        }
        s.normalize()
    }

    pub fn neg(&self) -> Series {
        Series {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), build::neg(c.clone()))).collect(),
            cap: self.cap.clone(),
            exact: self.exact,
        }
    }

    pub fn scale_term(&self, t: &Term) -> Result<Series> {
        let mut s = Series { terms: Vec::new(), cap: self.cap.clone(), exact: self.exact };
        for (e, c) in &self.terms {
            s.push_raw(e.clone(), build::mul2(c.clone(), t.clone()));
        }
        s.normalize()
    }

    pub fn shift(&self, by: &ExactConstant) -> Series {
        Series {
            terms: self.terms.iter().map(|(e, c)| (e.add(by), c.clone())).collect(),
            cap: self.cap.add(by),
            exact: self.exact,
        }
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        // Valid order of the product: each side's truncation shifted by the
        // other's valuation.
        let zero = ExactConstant::zero();
        let va = self.valuation().unwrap_or(&zero).clone();
        let vb = other.valuation().unwrap_or(&zero).clone();
        let mut cap = min_const(&self.cap.add(&vb), &other.cap.add(&va));
        if self.exact && other.exact {
            cap = min_const(&self.cap, &other.cap);
        }
        let mut s = Series {
            terms: Vec::new(),
            cap,
            exact: self.exact && other.exact,
        };
        if self.terms.is_empty() || other.terms.is_empty() {
            // zero series; exactness decides whether that means the zero germ
            return Ok(Series { terms: Vec::new(), cap: s.cap, exact: s.exact });
        }
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.add(eb);
                // push_raw records the loss of any above-cap product, so an
                // empty result is never mistaken for an exact zero
                s.push_raw(e, build::mul2(ca.clone(), cb.clone()));
            }
        }
        s.normalize()
    }

    /// Splits at exponent zero: (strictly negative part, coefficient at 0,
    /// strictly positive part).
    pub fn split_at_zero(&self) -> (Vec<(ExactConstant, Term)>, Option<Term>, Series) {
        let mut neg = Vec::new();
        let mut at_zero = None;
        let mut pos = Series { terms: Vec::new(), cap: self.cap.clone(), exact: self.exact };
        for (e, c) in &self.terms {
            match e.sign() {
                Ordering::Less => neg.push((e.clone(), c.clone())),
                Ordering::Equal => at_zero = Some(c.clone()),
                Ordering::Greater => pos.terms.push((e.clone(), c.clone())),
            }
        }
        (neg, at_zero, pos)
    }
}

pub fn min_const(a: &ExactConstant, b: &ExactConstant) -> ExactConstant {
    if a.cmp_exact(b) == Ordering::Less {
        a.clone()
    } else {
        b.clone()
    }
}

/// Outcome of the leading-term search.
pub enum Leading {
    /// The series is exactly empty: the expanded germ is zero.
    ZeroGerm,
    /// Leading exponent, coefficient, and the coefficient's germ sign.
    Found { exponent: ExactConstant, coeff: Term, sign: Ordering },
    /// Ran out of computed terms below the cap without finding a nonzero
    /// coefficient; the caller should expand to a higher order.
    NeedMoreOrder,
}

impl Series {
    /// Finds the first coefficient with nonzero germ sign.  `germ_sign`
    /// returns `Equal` for the zero germ and errors with `Undecided` when
    /// it cannot tell.
    pub fn leading(
        &self,
        germ_sign: &mut dyn FnMut(&Term) -> Result<Ordering>,
    ) -> Result<Leading> {
        for (e, c) in &self.terms {
            match germ_sign(c)? {
                Ordering::Equal => continue,
                s => {
                    return Ok(Leading::Found { exponent: e.clone(), coeff: c.clone(), sign: s })
                }
            }
        }
        if self.exact {
            Ok(Leading::ZeroGerm)
        } else {
            Ok(Leading::NeedMoreOrder)
        }
    }

    /// `1 / self`.  Requires a leading coefficient with nonzero germ sign.
    pub fn recip(
        &self,
        germ_sign: &mut dyn FnMut(&Term) -> Result<Ordering>,
    ) -> Result<Series> {
        let (e0, c0) = match self.leading(germ_sign)? {
            Leading::Found { exponent, coeff, .. } => (exponent, coeff),
            Leading::ZeroGerm => {
                return Err(Error::Domain("reciprocal of the zero germ".into()))
            }
            Leading::NeedMoreOrder => {
                return Err(Error::Undecided("reciprocal needs higher series order".into()))
            }
        };
        // self = c0 w^{e0} (1 + s), s of positive valuation
        let s = self.reduced(&e0, &c0)?;
        let geo = s.geometric()?;
        let inv_c0 = build::recip(c0);
        geo.scale_term(&inv_c0).map(|g| g.shift(&e0.neg()))
    }

    /// `self / (c0 w^{e0}) - 1`, truncated like `self`.  Terms at exponents
    /// up to `e0` are dropped: anything strictly below the leading exponent
    /// had a zero germ coefficient, and the term at `e0` is the factored-out
    /// leading term itself.
    fn reduced(&self, e0: &ExactConstant, c0: &Term) -> Result<Series> {
        let inv = build::recip(c0.clone());
        let mut s = Series {
            terms: Vec::new(),
            cap: self.cap.add(&e0.neg()),
            exact: self.exact,
        };
        for (e, c) in &self.terms {
            if e.cmp_exact(e0) != Ordering::Greater {
                continue;
            }
            s.push_raw(e.add(&e0.neg()), build::mul2(c.clone(), inv.clone()));
        }
        s.normalize()
    }

    /// `sum_k (-s)^k` for a series `s` of strictly positive valuation.
    fn geometric(&self) -> Result<Series> {
        let cap = self.cap.clone();
        let mut acc = Series::constant(Term::int(1), cap.clone());
        if self.terms.is_empty() {
            acc.exact = self.exact;
            return Ok(acc);
        }
        let val = self.valuation().unwrap().clone();
        if val.sign() != Ordering::Greater {
            return Err(Error::Undecided("geometric tail lacks positive valuation".into()));
        }
        let mut power = Series::constant(Term::int(1), cap.clone());
        let neg = self.neg();
        let mut k_val = ExactConstant::zero();
        loop {
            k_val = k_val.add(&val);
            if k_val.cmp_exact(&cap) != Ordering::Less {
                break;
            }
            power = power.mul(&neg)?;
            if power.terms.is_empty() {
                break;
            }
            acc = acc.add(&power)?;
        }
        acc.exact = false; // infinite tail was cut
        Ok(acc)
    }

    /// `self^r` for rational `r`; the leading coefficient must be a positive
    /// germ unless `r` is an integer.
    pub fn pow_rational(
        &self,
        r: &Rational,
        germ_sign: &mut dyn FnMut(&Term) -> Result<Ordering>,
    ) -> Result<Series> {
        use num_traits::Zero;
        if r.is_zero() {
            return Ok(Series::constant(Term::int(1), self.cap.clone()));
        }
        let (e0, c0, sign) = match self.leading(germ_sign)? {
            Leading::Found { exponent, coeff, sign } => (exponent, coeff, sign),
            Leading::ZeroGerm => {
                return if crate::term::q_is_pos(r) {
                    Ok(Series::zero(self.cap.clone()))
                } else {
                    Err(Error::Domain("negative power of the zero germ".into()))
                };
            }
            Leading::NeedMoreOrder => {
                return Err(Error::Undecided("power needs higher series order".into()))
            }
        };
        if sign == Ordering::Less && !r.is_integer() {
            return Err(Error::Domain(format!(
                "non-integer power of eventually negative germ {c0}"
            )));
        }
        let s = self.reduced(&e0, &c0)?;
        let binom = s.binomial(r)?;
        let c0r = build::pow(c0, r.clone());
        binom
            .scale_term(&c0r)
            .map(|b| b.shift(&e0.scale(r)))
    }

    /// `(1 + s)^r = sum_k C(r, k) s^k`.
    fn binomial(&self, r: &Rational) -> Result<Series> {
        let cap = self.cap.clone();
        let mut acc = Series::constant(Term::int(1), cap.clone());
        if self.terms.is_empty() {
            acc.exact = self.exact;
            return Ok(acc);
        }
        let val = self.valuation().unwrap().clone();
        if val.sign() != Ordering::Greater {
            return Err(Error::Undecided("binomial tail lacks positive valuation".into()));
        }
        let mut power = Series::constant(Term::int(1), cap.clone());
        let mut coeff = Rational::one();
        let mut k = 0i64;
        let mut k_val = ExactConstant::zero();
        loop {
            k += 1;
            k_val = k_val.add(&val);
            if k_val.cmp_exact(&cap) != Ordering::Less {
                break;
            }
            // C(r, k) = C(r, k-1) * (r - k + 1) / k
            coeff = coeff * (r - Rational::from_integer((k - 1).into()))
                / Rational::from_integer(k.into());
            if num_traits::Zero::is_zero(&coeff) {
                break; // integer exponent: expansion terminates
            }
            power = power.mul(self)?;
            if power.terms.is_empty() {
                break;
            }
            let contrib = power.scale_term(&Term::constant(ExactConstant::from_rational(
                coeff.clone(),
            )))?;
            acc = acc.add(&contrib)?;
        }
        if !(r.is_integer() && !num_traits::Signed::is_negative(r)) {
            acc.exact = false;
        }
        Ok(acc)
    }

    /// `exp(self)` for a series of nonnegative valuation: the exponent-zero
    /// coefficient becomes an `exp` factor of the result's coefficients, and
    /// the positive tail is expanded by its Taylor series.
    pub fn exp(&self) -> Result<Series> {
        let (neg, at_zero, pos) = self.split_at_zero();
        if !neg.is_empty() {
            return Err(Error::Unsupported(
                "exponential of a series with negative valuation".into(),
            ));
        }
        let head = match at_zero {
            Some(t) => build::exp(t),
            None => Term::int(1),
        };
        let tail = pos.taylor_exp()?;
        tail.scale_term(&head)
    }

    fn taylor_exp(&self) -> Result<Series> {
        let cap = self.cap.clone();
        let mut acc = Series::constant(Term::int(1), cap.clone());
        if self.terms.is_empty() {
            acc.exact = self.exact;
            return Ok(acc);
        }
        let val = self.valuation().unwrap().clone();
        debug_assert_eq!(val.sign(), Ordering::Greater);
        let mut power = Series::constant(Term::int(1), cap.clone());
        let mut fact = Rational::one();
        let mut k = 0i64;
        let mut k_val = ExactConstant::zero();
        loop {
            k += 1;
            k_val = k_val.add(&val);
            if k_val.cmp_exact(&cap) != Ordering::Less {
                break;
            }
            fact = fact * Rational::from_integer(k.into());
            power = power.mul(self)?;
            if power.terms.is_empty() {
                break;
            }
            let contrib = power.scale_term(&Term::constant(ExactConstant::from_rational(
                fact.recip(),
            )))?;
            acc = acc.add(&contrib)?;
        }
        acc.exact = false;
        Ok(acc)
    }

    /// `log(self)`, with `h = log w` supplied as a term.  Requires an
    /// eventually positive leading coefficient.
    pub fn log(
        &self,
        h: &Term,
        germ_sign: &mut dyn FnMut(&Term) -> Result<Ordering>,
    ) -> Result<Series> {
        let (e0, c0, sign) = match self.leading(germ_sign)? {
            Leading::Found { exponent, coeff, sign } => (exponent, coeff, sign),
            Leading::ZeroGerm => return Err(Error::Domain("log of the zero germ".into())),
            Leading::NeedMoreOrder => {
                return Err(Error::Undecided("log needs higher series order".into()))
            }
        };
        if sign != Ordering::Greater {
            return Err(Error::Domain(format!("log of eventually negative germ {c0}")));
        }
        let s = self.reduced(&e0, &c0)?;
        let tail = s.taylor_log1p()?;
        // log(c0) + e0 * h
        let cap = self.cap.add(&e0.neg());
        let head = build::add2(build::log(c0), build::scale(e0, h.clone()));
        tail.add(&Series::constant(head, cap))
    }

    fn taylor_log1p(&self) -> Result<Series> {
        let cap = self.cap.clone();
        let mut acc = Series::zero(cap.clone());
        if self.terms.is_empty() {
            acc.exact = self.exact;
            return Ok(acc);
        }
        let val = self.valuation().unwrap().clone();
        if val.sign() != Ordering::Greater {
            return Err(Error::Undecided("log tail lacks positive valuation".into()));
        }
        let mut power = Series::constant(Term::int(1), cap.clone());
        let mut k = 0i64;
        let mut k_val = ExactConstant::zero();
        loop {
            k += 1;
            k_val = k_val.add(&val);
            if k_val.cmp_exact(&cap) != Ordering::Less {
                break;
            }
            power = power.mul(self)?;
            if power.terms.is_empty() {
                break;
            }
            let c = Rational::new(
                if k % 2 == 1 { 1.into() } else { (-1).into() },
                k.into(),
            );
            let contrib =
                power.scale_term(&Term::constant(ExactConstant::from_rational(c)))?;
            acc = acc.add(&contrib)?;
        }
        acc.exact = false;
        Ok(acc)
    }
}
