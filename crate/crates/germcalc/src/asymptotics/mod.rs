//! The symbolic core: limits at +infinity, dominance, leading monomials,
//! level, exponential height, angular level, grading, and the compositional
//! inverse bounds.
//!
//! The limit engine rewrites by most-rapidly-varying comparability classes:
//! it finds the maximal class among the exponential subterms, expands the
//! term as a generalized series in a small representative `w = exp(h)` of
//! that class, and recurses on the leading coefficient, which lives in a
//! strictly lower class.  Zero-equivalence of germs is a semi-decision:
//! rewrite to normal form, and otherwise decide signs with certified
//! interval arithmetic at escalating precision, reporting `Undecided` when
//! the budget runs out.

mod eh;
mod level;
pub mod limit;
pub mod monomial;
mod series;
pub mod sign;

pub use eh::{decompose_ub, eh, eh_components, monomial_eh};
pub use level::{alevel, inverse_eh_bound, inverse_level, is_simple, level, Simplicity};
pub use limit::{classify, compare, germ_sign, limit, Comparison};
pub use monomial::{lm, MonomialFactor, MonomialNF};

use std::cmp::Ordering;

use serde::Serialize;

use crate::constant::ExactConstant;

/// The class of a germ: exactly one of these holds for every denoting term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GermClass {
    /// The zero germ.
    ZeroGerm,
    /// Tends to +infinity (membership in the compositional group `I`).
    InfIncreasing,
    /// Tends to -infinity.
    InfDecreasing,
    /// Finite nonzero positive limit.
    FinitePositive,
    /// Finite nonzero negative limit.
    FiniteNegative,
    /// Tends to zero from above (the reciprocals of `I`).
    SmallPositive,
    /// Tends to zero from below.
    SmallNegative,
}

impl GermClass {
    pub fn is_eventually_positive(self) -> bool {
        matches!(
            self,
            GermClass::InfIncreasing | GermClass::FinitePositive | GermClass::SmallPositive
        )
    }

    pub fn is_bounded(self) -> bool {
        !matches!(self, GermClass::InfIncreasing | GermClass::InfDecreasing)
    }

    pub fn name(self) -> &'static str {
        match self {
            GermClass::ZeroGerm => "zero",
            GermClass::InfIncreasing => "inf-increasing",
            GermClass::InfDecreasing => "inf-decreasing",
            GermClass::FinitePositive => "finite-positive",
            GermClass::FiniteNegative => "finite-negative",
            GermClass::SmallPositive => "small-positive",
            GermClass::SmallNegative => "small-negative",
        }
    }
}

/// Limit of a germ at +infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitValue {
    PlusInfinity,
    MinusInfinity,
    Zero,
    FiniteNonzero {
        /// +1 or -1.
        sign: i8,
        /// Certified enclosure of the limit.
        enclosure: (f64, f64),
        /// Present when the constant is derivable by rewriting.
        exact: Option<ExactConstant>,
    },
}

impl LimitValue {
    pub fn finite_exact(c: ExactConstant) -> LimitValue {
        let sign = match c.sign() {
            Ordering::Greater => 1,
            Ordering::Less => -1,
            Ordering::Equal => panic!("finite_exact of zero"),
        };
        let v = c.to_f64();
        LimitValue::FiniteNonzero { sign, enclosure: (v, v), exact: Some(c) }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LimitValue::Zero)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LimitValue::PlusInfinity | LimitValue::MinusInfinity)
    }
}

/// Exponential height: an exact value in `Z ∪ {-inf}`, or a certified
/// integer range when top-component cancellation cannot be ruled out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EhValue {
    Exact(Extended),
    Range { lo: Extended, hi: i64 },
}

/// An integer or -infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Extended {
    NegInf,
    Int(i64),
}

impl Extended {
    pub fn int(self) -> Option<i64> {
        match self {
            Extended::NegInf => None,
            Extended::Int(n) => Some(n),
        }
    }

    pub fn plus(self, k: i64) -> Extended {
        match self {
            Extended::NegInf => Extended::NegInf,
            Extended::Int(n) => Extended::Int(n + k),
        }
    }
}

impl std::fmt::Display for Extended {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extended::NegInf => write!(f, "-inf"),
            Extended::Int(n) => write!(f, "{n}"),
        }
    }
}

impl EhValue {
    pub fn exact_int(n: i64) -> EhValue {
        EhValue::Exact(Extended::Int(n))
    }

    pub fn neg_inf() -> EhValue {
        EhValue::Exact(Extended::NegInf)
    }

    /// Builds a range, collapsing to an exact value when the bounds meet.
    pub fn range(lo: Extended, hi: i64) -> EhValue {
        if lo == Extended::Int(hi) {
            EhValue::Exact(lo)
        } else {
            debug_assert!(lo < Extended::Int(hi));
            EhValue::Range { lo, hi }
        }
    }

    pub fn as_exact(&self) -> Option<Extended> {
        match self {
            EhValue::Exact(v) => Some(*v),
            EhValue::Range { .. } => None,
        }
    }

    pub fn upper(&self) -> Extended {
        match self {
            EhValue::Exact(v) => *v,
            EhValue::Range { hi, .. } => Extended::Int(*hi),
        }
    }

    pub fn lower(&self) -> Extended {
        match self {
            EhValue::Exact(v) => *v,
            EhValue::Range { lo, .. } => *lo,
        }
    }
}

impl std::fmt::Display for EhValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EhValue::Exact(v) => write!(f, "{v}"),
            EhValue::Range { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}
