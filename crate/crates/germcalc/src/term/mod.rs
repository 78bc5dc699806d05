//! Term algebra for exp-log germs at +infinity.
//!
//! A [`Term`] is an immutable tree over constants, the identity `x`,
//! field operations, rational powers, `exp` and `log`.  Terms are cheap to
//! clone (shared via `Arc`), carry a structural hash computed once at
//! construction, and are ordered by that hash so that normal forms are
//! deterministic across runs.

mod display;
mod parse;
pub mod simplify;
mod subst;

pub use parse::parse;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::constant::{ExactConstant, Rational};

#[derive(Clone)]
pub struct Term(Arc<Node>);

pub struct Node {
    kind: TermKind,
    hash: u64,
    tower: u32,
    has_x: bool,
}

#[derive(Clone)]
pub enum TermKind {
    Const(ExactConstant),
    X,
    Add(Vec<Term>),
    Mul(Vec<Term>),
    Recip(Term),
    Pow(Term, Rational),
    Exp(Term),
    Log(Term),
}

/// Canonical hash of a simplified term.  Equal simplified terms have equal
/// ids; distinct ids imply structurally distinct terms.  Id equality does
/// not decide germ equality.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TermId(pub u64);

const H_CONST: u64 = 0x9E37_79B9_7F4A_7C15;
const H_X: u64 = 0xC2B2_AE3D_27D4_EB4F;
const H_ADD: u64 = 0x1656_67B1_9E37_79F9;
const H_MUL: u64 = 0x27D4_EB2F_1656_67C5;
const H_RECIP: u64 = 0x9E37_79B9_2545_F491;
const H_POW: u64 = 0x8538_ECB5_BD45_6F3D;
const H_EXP: u64 = 0xFF51_AFD7_ED55_8CCD;
const H_LOG: u64 = 0xC4CE_B9FE_1A85_EC53;

fn mix(mut h: u64, v: u64) -> u64 {
    h ^= v;
    h = h.wrapping_mul(0x100_0000_01B3);
    h ^= h >> 29;
    h
}

fn hash_rational(q: &Rational) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64;
    for b in q.numer().to_signed_bytes_le() {
        h = mix(h, b as u64);
    }
    h = mix(h, 0x2D);
    for b in q.denom().to_signed_bytes_le() {
        h = mix(h, b as u64);
    }
    h
}

impl Term {
    fn make(kind: TermKind) -> Term {
        let (hash, tower, has_x) = match &kind {
            TermKind::Const(c) => {
                let h = mix(mix(H_CONST, hash_rational(c.rational_part())), hash_rational(c.pi_coefficient()));
                (h, 0, false)
            }
            TermKind::X => (H_X, 0, true),
            TermKind::Add(ts) => {
                let mut h = H_ADD;
                let mut tw = 0;
                let mut hx = false;
                for t in ts {
                    h = mix(h, t.hash());
                    tw = tw.max(t.tower_height());
                    hx |= t.has_x();
                }
                (h, tw, hx)
            }
            TermKind::Mul(ts) => {
                let mut h = H_MUL;
                let mut tw = 0;
                let mut hx = false;
                for t in ts {
                    h = mix(h, t.hash());
                    tw = tw.max(t.tower_height());
                    hx |= t.has_x();
                }
                (h, tw, hx)
            }
            TermKind::Recip(t) => (mix(H_RECIP, t.hash()), t.tower_height(), t.has_x()),
            TermKind::Pow(t, r) => {
                (mix(mix(H_POW, t.hash()), hash_rational(r)), t.tower_height(), t.has_x())
            }
            TermKind::Exp(t) => (mix(H_EXP, t.hash()), t.tower_height() + 1, t.has_x()),
            TermKind::Log(t) => (mix(H_LOG, t.hash()), t.tower_height() + 1, t.has_x()),
        };
        Term(Arc::new(Node { kind, hash, tower, has_x }))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn hash(&self) -> u64 {
        self.0.hash
    }

    pub fn id(&self) -> TermId {
        TermId(self.0.hash)
    }

    /// Maximum nesting depth of `exp`/`log` nodes.
    pub fn tower_height(&self) -> u32 {
        self.0.tower
    }

    pub fn has_x(&self) -> bool {
        self.0.has_x
    }

    pub fn is_const(&self) -> bool {
        matches!(self.kind(), TermKind::Const(_))
    }

    pub fn as_const(&self) -> Option<&ExactConstant> {
        match self.kind() {
            TermKind::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        self.as_const().map_or(false, |c| c.is_zero())
    }

    pub fn is_one_const(&self) -> bool {
        self.as_const().map_or(false, |c| c.is_one())
    }

    // Raw constructors.  These build the requested node verbatim; the
    // normalizing constructors live in `simplify`.
    pub fn constant(c: ExactConstant) -> Term {
        Term::make(TermKind::Const(c))
    }

    pub fn int(n: i64) -> Term {
        Term::constant(ExactConstant::from_int(n))
    }

    pub fn frac(num: i64, den: i64) -> Term {
        Term::constant(ExactConstant::from_frac(num, den))
    }

    pub fn pi() -> Term {
        Term::constant(ExactConstant::pi())
    }

    pub fn x() -> Term {
        Term::make(TermKind::X)
    }

    pub fn add_raw(ts: Vec<Term>) -> Term {
        assert!(!ts.is_empty(), "Add lists are nonempty");
        Term::make(TermKind::Add(ts))
    }

    pub fn mul_raw(ts: Vec<Term>) -> Term {
        assert!(!ts.is_empty(), "Mul lists are nonempty");
        Term::make(TermKind::Mul(ts))
    }

    pub fn recip_raw(t: Term) -> Term {
        Term::make(TermKind::Recip(t))
    }

    pub fn pow_raw(t: Term, r: Rational) -> Term {
        Term::make(TermKind::Pow(t, r))
    }

    pub fn exp_raw(t: Term) -> Term {
        Term::make(TermKind::Exp(t))
    }

    pub fn log_raw(t: Term) -> Term {
        Term::make(TermKind::Log(t))
    }

    /// Iterated logarithm `log_k(x)` as a raw term; `k = 0` is `x`.
    pub fn log_iter(k: u32) -> Term {
        let mut t = Term::x();
        for _ in 0..k {
            t = Term::log_raw(t);
        }
        t
    }

    /// Iterated exponential `exp_k(x)`; `k = 0` is `x`.
    pub fn exp_iter(k: u32) -> Term {
        let mut t = Term::x();
        for _ in 0..k {
            t = Term::exp_raw(t);
        }
        t
    }

    /// Deterministic total order used for canonical Add/Mul lists:
    /// by structural hash first, with a full structural comparison as the
    /// tie-break so the order is well defined even across hash collisions.
    pub fn canonical_cmp(&self, other: &Term) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.hash().cmp(&other.hash()).then_with(|| self.structural_cmp(other))
    }

    fn structural_cmp(&self, other: &Term) -> Ordering {
        fn tag(k: &TermKind) -> u8 {
            match k {
                TermKind::Const(_) => 0,
                TermKind::X => 1,
                TermKind::Add(_) => 2,
                TermKind::Mul(_) => 3,
                TermKind::Recip(_) => 4,
                TermKind::Pow(..) => 5,
                TermKind::Exp(_) => 6,
                TermKind::Log(_) => 7,
            }
        }
        let (a, b) = (self.kind(), other.kind());
        tag(a).cmp(&tag(b)).then_with(|| match (a, b) {
            (TermKind::Const(c), TermKind::Const(d)) => c
                .rational_part()
                .cmp(d.rational_part())
                .then_with(|| c.pi_coefficient().cmp(d.pi_coefficient())),
            (TermKind::X, TermKind::X) => Ordering::Equal,
            (TermKind::Add(xs), TermKind::Add(ys)) | (TermKind::Mul(xs), TermKind::Mul(ys)) => {
                xs.len().cmp(&ys.len()).then_with(|| {
                    for (x, y) in xs.iter().zip(ys) {
                        let c = x.canonical_cmp(y);
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                })
            }
            (TermKind::Recip(x), TermKind::Recip(y)) => x.canonical_cmp(y),
            (TermKind::Pow(x, r), TermKind::Pow(y, s)) => {
                x.canonical_cmp(y).then_with(|| r.cmp(s))
            }
            (TermKind::Exp(x), TermKind::Exp(y)) | (TermKind::Log(x), TermKind::Log(y)) => {
                x.canonical_cmp(y)
            }
            _ => unreachable!("tags equal"),
        })
    }

    /// Structural equality of the underlying trees.
    pub fn same(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.hash() == other.hash() && self.structural_cmp(other) == Ordering::Equal)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Convenience constructors that apply full normalization; thin wrappers
/// over the rewrite system in [`simplify`].
pub mod build {
    use super::*;

    pub fn add2(a: Term, b: Term) -> Term {
        simplify::norm_add(vec![a, b])
    }

    pub fn sub(a: Term, b: Term) -> Term {
        add2(a, neg(b))
    }

    pub fn neg(a: Term) -> Term {
        simplify::norm_mul(vec![Term::int(-1), a])
    }

    pub fn mul2(a: Term, b: Term) -> Term {
        simplify::norm_mul(vec![a, b])
    }

    pub fn div(a: Term, b: Term) -> Term {
        simplify::norm_mul(vec![a, simplify::norm_recip(b)])
    }

    pub fn recip(a: Term) -> Term {
        simplify::norm_recip(a)
    }

    pub fn pow(a: Term, r: Rational) -> Term {
        simplify::norm_pow(a, r)
    }

    pub fn powi(a: Term, n: i64) -> Term {
        pow(a, Rational::from_integer(n.into()))
    }

    pub fn sqrt(a: Term) -> Term {
        pow(a, Rational::new(1.into(), 2.into()))
    }

    pub fn exp(a: Term) -> Term {
        simplify::norm_exp(a)
    }

    pub fn log(a: Term) -> Term {
        simplify::norm_log(a)
    }

    pub fn scale(c: ExactConstant, a: Term) -> Term {
        simplify::norm_mul(vec![Term::constant(c), a])
    }

    pub fn scale_q(q: Rational, a: Term) -> Term {
        scale(ExactConstant::from_rational(q), a)
    }
}

/// Splits a term into `(rational coefficient, core)` without rewriting:
/// peels leading exact-constant factors of a product.
pub fn split_const_factor(t: &Term) -> (ExactConstant, Term) {
    match t.kind() {
        TermKind::Const(c) => (c.clone(), Term::int(1)),
        TermKind::Mul(fs) => {
            let mut coeff = ExactConstant::one();
            let mut rest = Vec::new();
            for f in fs {
                match f.as_const() {
                    Some(c) => match coeff.mul(c) {
                        Some(folded) => coeff = folded,
                        None => rest.push(f.clone()),
                    },
                    None => rest.push(f.clone()),
                }
            }
            let core = match rest.len() {
                0 => Term::int(1),
                1 => rest.pop().unwrap(),
                _ => Term::mul_raw(rest),
            };
            (coeff, core)
        }
        _ => (ExactConstant::one(), t.clone()),
    }
}

/// True when the rational is, e.g., usable as a small machine exponent.
pub fn rational_to_i64(q: &Rational) -> Option<i64> {
    use num_traits::ToPrimitive;
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn q_is_pos(r: &Rational) -> bool {
    r.is_positive() && !r.is_zero()
}

pub fn q_one() -> Rational {
    Rational::one()
}

pub fn q_zero() -> Rational {
    Rational::zero()
}

impl From<&Term> for Term {
    fn from(t: &Term) -> Term {
        t.clone()
    }
}

pub use subst::substitute;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashes_are_stable_and_structural() {
        let a = build::add2(Term::x(), Term::int(1));
        let b = build::add2(Term::int(1), Term::x());
        assert_eq!(a, b);
        assert_eq!(a.id(), b.id());
        let c = build::add2(Term::x(), Term::int(2));
        assert_ne!(a.id(), c.id());
    }

    #[test]
    fn tower_height_counts_exp_log_nesting() {
        let t = Term::exp_raw(Term::log_raw(Term::x()));
        assert_eq!(t.tower_height(), 2);
        assert_eq!(Term::x().tower_height(), 0);
        let u = build::mul2(Term::exp_raw(Term::x()), Term::log_iter(3));
        assert_eq!(u.tower_height(), 3);
    }
}
