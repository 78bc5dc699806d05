//! Limits at +infinity by most-rapidly-varying rewriting.
//!
//! `limit_full` finds the maximal comparability class among the exponential
//! subterms (with the class of `x` itself as the base case), expands the
//! term as a generalized series in a representative `w = exp(h) -> 0` of
//! that class, and recurses on the leading coefficient, which lies in a
//! strictly lower class.  When `x` itself is maximal the problem is moved up
//! through `x := exp(x)`, which preserves the limit.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use crate::asymptotics::series::{Leading, Series};
use crate::asymptotics::sign::{constant_sign, eval_constant, ladder_sign};
use crate::asymptotics::{GermClass, LimitValue};
use crate::constant::ExactConstant;
use crate::error::{Error, Result};
use crate::interval::bf_to_f64;
use crate::term::simplify::simplify;
use crate::term::{build, substitute, Term, TermKind};

pub const MAX_PRECISION: usize = 4096;
const MAX_DEPTH: u32 = 512;
const ORDER_LADDER: [i64; 3] = [4, 8, 24];

/// Dominance comparison verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Comparison {
    /// `f` is dominated: `f/g -> 0`.
    Less,
    /// Same Archimedean class; carries the limit of the ratio.
    Comparable(LimitValue),
    /// `f` dominates: `|f/g| -> infinity`.
    Greater,
}

struct Ctx {
    depth: u32,
}

impl Ctx {
    fn new() -> Ctx {
        Ctx { depth: 0 }
    }
}

fn with_depth<T>(ctx: &mut Ctx, f: impl FnOnce(&mut Ctx) -> Result<T>) -> Result<T> {
    if ctx.depth >= MAX_DEPTH {
        if std::env::var_os("GERMCALC_PANIC_DEPTH").is_some() {
            panic!("limit engine recursion budget exhausted");
        }
        return Err(Error::Undecided("limit engine recursion budget exhausted".into()));
    }
    ctx.depth += 1;
    let out = f(ctx);
    ctx.depth -= 1;
    out
}

type LimitOutcome = (LimitValue, Ordering);

thread_local! {
    static LIMIT_CACHE: RefCell<HashMap<Term, std::result::Result<LimitOutcome, Error>>> =
        RefCell::new(HashMap::new());
    static VALIDATED: RefCell<std::collections::HashSet<Term>> =
        RefCell::new(std::collections::HashSet::new());
    static IN_PROGRESS: RefCell<std::collections::HashSet<Term>> =
        RefCell::new(std::collections::HashSet::new());
    static QUERY_DEPTH: std::cell::Cell<u32> = const { std::cell::Cell::new(0) };
}

const MAX_QUERY_NESTING: u32 = 600;

thread_local! {
    static DEADLINE: std::cell::Cell<Option<std::time::Instant>> =
        const { std::cell::Cell::new(None) };
}

/// Wall-clock budget for one public engine query; exhaustion surfaces as
/// `Undecided`, the same semi-decision outcome as a precision or rewrite
/// budget.  Nested internal queries inherit the active deadline.
pub(crate) fn with_budget<T>(f: impl FnOnce() -> T) -> T {
    let installed = DEADLINE.with(|d| {
        if d.get().is_none() {
            let ms = std::env::var("GERMCALC_BUDGET_MS")
                .ok()
                .and_then(|v| v.parse::<u64>().ok())
                .unwrap_or(3000);
            d.set(Some(std::time::Instant::now() + std::time::Duration::from_millis(ms)));
            true
        } else {
            false
        }
    });
    let out = f();
    if installed {
        DEADLINE.with(|d| d.set(None));
    }
    out
}

fn budget_expired() -> bool {
    DEADLINE.with(|d| d.get().map_or(false, |t| std::time::Instant::now() > t))
}

thread_local! {
    static EXPAND_GUARD: RefCell<std::collections::HashSet<(Term, Term)>> =
        RefCell::new(std::collections::HashSet::new());
}

/// Clears the engine caches (used by tests that probe cache-independence).
pub fn reset_caches() {
    LIMIT_CACHE.with(|c| c.borrow_mut().clear());
    VALIDATED.with(|c| c.borrow_mut().clear());
}

/// The class of the germ of `f`.
pub fn classify(f: &Term) -> Result<GermClass> {
    with_budget(|| classify_impl(f))
}

fn classify_impl(f: &Term) -> Result<GermClass> {
    validate_domain(f)?;
    let s = simplify(f);
    if s.is_zero_const() {
        return Ok(GermClass::ZeroGerm);
    }
    let (lv, sign) = limit_full_cached(&s, &mut Ctx::new())?;
    Ok(match lv {
        LimitValue::PlusInfinity => GermClass::InfIncreasing,
        LimitValue::MinusInfinity => GermClass::InfDecreasing,
        LimitValue::FiniteNonzero { sign: s, .. } => {
            if s > 0 {
                GermClass::FinitePositive
            } else {
                GermClass::FiniteNegative
            }
        }
        LimitValue::Zero => match sign {
            Ordering::Greater => GermClass::SmallPositive,
            Ordering::Less => GermClass::SmallNegative,
            Ordering::Equal => GermClass::ZeroGerm,
        },
    })
}

/// The limit of `f` at +infinity.
pub fn limit(f: &Term) -> Result<LimitValue> {
    with_budget(|| limit_impl(f))
}

fn limit_impl(f: &Term) -> Result<LimitValue> {
    validate_domain(f)?;
    let s = simplify(f);
    if s.is_zero_const() {
        return Ok(LimitValue::Zero);
    }
    Ok(limit_full_cached(&s, &mut Ctx::new())?.0)
}

/// Eventual sign of the germ of `f` (`Equal` means the zero germ).
pub fn germ_sign(f: &Term) -> Result<Ordering> {
    with_budget(|| {
        validate_domain(f)?;
        let s = simplify(f);
        germ_sign_inner(&s, &mut Ctx::new())
    })
}

/// Dominance comparison of two eventually positive germs.
pub fn compare(f: &Term, g: &Term) -> Result<Comparison> {
    with_budget(|| compare_impl(f, g))
}

fn compare_impl(f: &Term, g: &Term) -> Result<Comparison> {
    validate_domain(f)?;
    validate_domain(g)?;
    let sf = simplify(f);
    let sg = simplify(g);
    for (t, name) in [(&sf, "left"), (&sg, "right")] {
        let cls = classify_simplified(t)?;
        if !cls.is_eventually_positive() {
            return Err(Error::Positivity(format!(
                "{name} operand is not eventually positive (class {})",
                cls.name()
            )));
        }
    }
    let ratio = simplify(&build::div(sf, sg));
    let (lv, _) = limit_full_cached(&ratio, &mut Ctx::new())?;
    Ok(match lv {
        LimitValue::Zero => Comparison::Less,
        LimitValue::PlusInfinity | LimitValue::MinusInfinity => Comparison::Greater,
        fin => Comparison::Comparable(fin),
    })
}

/// `classify` for a term that is already simplified and validated.
pub(crate) fn classify_simplified(s: &Term) -> Result<GermClass> {
    if s.is_zero_const() {
        return Ok(GermClass::ZeroGerm);
    }
    let (lv, sign) = limit_full_cached(s, &mut Ctx::new())?;
    Ok(match lv {
        LimitValue::PlusInfinity => GermClass::InfIncreasing,
        LimitValue::MinusInfinity => GermClass::InfDecreasing,
        LimitValue::FiniteNonzero { sign: sg, .. } => {
            if sg > 0 {
                GermClass::FinitePositive
            } else {
                GermClass::FiniteNegative
            }
        }
        LimitValue::Zero => match sign {
            Ordering::Greater => GermClass::SmallPositive,
            Ordering::Less => GermClass::SmallNegative,
            Ordering::Equal => GermClass::ZeroGerm,
        },
    })
}

/// Checks that every `log`/`pow`/`recip` subterm has a denoting argument:
/// `log` and `pow` need eventually positive arguments, `recip` a nonzero
/// germ.  Memoized per thread.
pub fn validate_domain(f: &Term) -> Result<()> {
    if VALIDATED.with(|v| v.borrow().contains(f)) {
        return Ok(());
    }
    match f.kind() {
        TermKind::Const(_) | TermKind::X => {}
        TermKind::Add(ss) => {
            for s in ss {
                validate_domain(s)?;
            }
        }
        TermKind::Mul(fs) => {
            for s in fs {
                validate_domain(s)?;
            }
        }
        TermKind::Recip(g) => {
            validate_domain(g)?;
            let sign = germ_sign_inner(&simplify(g), &mut Ctx::new())?;
            if sign == Ordering::Equal {
                return Err(Error::Domain(format!("reciprocal of the zero germ {g}")));
            }
        }
        TermKind::Pow(g, _) | TermKind::Log(g) => {
            validate_domain(g)?;
            let sign = germ_sign_inner(&simplify(g), &mut Ctx::new())?;
            if sign != Ordering::Greater {
                return Err(Error::Domain(format!(
                    "argument {g} is not eventually positive"
                )));
            }
        }
        TermKind::Exp(a) => validate_domain(a)?,
    }
    VALIDATED.with(|v| {
        let mut set = v.borrow_mut();
        if set.len() > 1 << 16 {
            set.clear();
        }
        set.insert(f.clone());
    });
    Ok(())
}

/// Each limit query runs with its own expansion budget; cycles between
/// queries are broken by an in-progress set, and runaway nesting of
/// distinct queries by a generous global counter.
fn limit_full_cached(s: &Term, _outer: &mut Ctx) -> Result<LimitOutcome> {
    if let Some(hit) = LIMIT_CACHE.with(|c| c.borrow().get(s).cloned()) {
        return hit;
    }
    if budget_expired() {
        return Err(Error::Undecided("engine time budget exhausted".into()));
    }
    let cyclic = IN_PROGRESS.with(|p| !p.borrow_mut().insert(s.clone()));
    if cyclic {
        return Err(Error::Undecided(format!("cyclic limit dependency on {s}")));
    }
    let too_deep = QUERY_DEPTH.with(|d| {
        let v = d.get();
        d.set(v + 1);
        if std::env::var_os("GERMCALC_TRACE").is_some() && v > MAX_QUERY_NESTING - 6 {
            eprintln!("query depth {v}: {s}");
        }
        v >= MAX_QUERY_NESTING
    });
    let t0 = std::time::Instant::now();
    let out = if too_deep {
        Err(Error::Undecided("limit query nesting budget exhausted".into()))
    } else {
        limit_full(s, &mut Ctx::new())
    };
    if std::env::var_os("GERMCALC_TRACE").is_some() {
        let ms = t0.elapsed().as_millis();
        if ms > 2000 {
            let txt = format!("{s}");
            eprintln!("slow query {ms} ms: {}", &txt[..txt.len().min(160)]);
        }
    }
    if budget_expired() && out.is_err() {
        // do not make a deadline artifact look like a definitive verdict
        QUERY_DEPTH.with(|d| d.set(d.get() - 1));
        IN_PROGRESS.with(|p| {
            p.borrow_mut().remove(s);
        });
        return out;
    }
    QUERY_DEPTH.with(|d| d.set(d.get() - 1));
    IN_PROGRESS.with(|p| {
        p.borrow_mut().remove(s);
    });
    LIMIT_CACHE.with(|c| {
        let mut cache = c.borrow_mut();
        if cache.len() > 1 << 17 {
            cache.clear();
        }
        cache.insert(s.clone(), out.clone());
    });
    out
}

/// Core: limit and germ sign of a simplified, nonzero-by-rewriting term.
fn limit_full(s: &Term, ctx: &mut Ctx) -> Result<LimitOutcome> {
    if std::env::var_os("GERMCALC_TRACE").is_some() && ctx.depth > 480 {
        eprintln!("depth {} limit {s}", ctx.depth);
    }
    with_depth(ctx, |ctx| limit_full_inner(s, ctx))
}

fn limit_full_inner(s: &Term, ctx: &mut Ctx) -> Result<LimitOutcome> {
    if s.is_zero_const() {
        return Ok((LimitValue::Zero, Ordering::Equal));
    }
    if let Some(c) = s.as_const() {
        return Ok((LimitValue::finite_exact(c.clone()), c.sign()));
    }
    if !s.has_x() {
        return constant_term_limit(s);
    }
    if s.same(&Term::x()) {
        return Ok((LimitValue::PlusInfinity, Ordering::Greater));
    }
    let m = mrv(s, ctx)?;
    let h = if m.has_x {
        // the class of x itself is maximal: expand in w = 1/x
        simplify(&build::neg(Term::log_raw(Term::x())))
    } else if let Some(rep) = m.args.first() {
        choose_h(rep, ctx)?
    } else {
        // every occurrence of x sits strictly below the class of x (all
        // content is logarithmic): composing with exp lifts the whole term
        // one level and preserves the limit
        let down = simplify(&substitute(s, &Term::exp_raw(Term::x())));
        if down.same(s) {
            return Err(Error::Undecided(format!("log-level reduction stalled on {s}")));
        }
        return limit_full_cached(&down, ctx);
    };
    for ord in ORDER_LADDER {
        let cap = ExactConstant::from_int(ord);
        let series = expand(s, &h, &cap, ctx)?;
        let mut sign_fn = |t: &Term| germ_sign_inner(t, &mut Ctx::new());
        match series.leading(&mut sign_fn)? {
            Leading::ZeroGerm => return Ok((LimitValue::Zero, Ordering::Equal)),
            Leading::Found { exponent, coeff, sign } => {
                return match exponent.sign() {
                    Ordering::Greater => Ok((LimitValue::Zero, sign)),
                    Ordering::Less => Ok((
                        if sign == Ordering::Greater {
                            LimitValue::PlusInfinity
                        } else {
                            LimitValue::MinusInfinity
                        },
                        sign,
                    )),
                    Ordering::Equal => {
                        // the tail tends to zero; the limit is the
                        // coefficient's limit
                        let c = simplify(&coeff);
                        limit_full_cached(&c, ctx)
                    }
                };
            }
            Leading::NeedMoreOrder => continue,
        }
    }
    Err(Error::Undecided(format!("series order budget exhausted for {s}")))
}

fn germ_sign_inner(t: &Term, ctx: &mut Ctx) -> Result<Ordering> {
    let s = simplify(t);
    if s.is_zero_const() {
        return Ok(Ordering::Equal);
    }
    if let Some(c) = s.as_const() {
        return Ok(c.sign());
    }
    // cheap syntactic positivity covers most series coefficients
    if crate::term::simplify::syntactically_positive(&s) {
        return Ok(Ordering::Greater);
    }
    if let Some(inner) = strip_negation(&s) {
        if crate::term::simplify::syntactically_positive(&inner) {
            return Ok(Ordering::Less);
        }
    }
    if !s.has_x() {
        return constant_sign(&s, MAX_PRECISION);
    }
    match limit_full_cached(&s, ctx) {
        Ok((_, sign)) => Ok(sign),
        Err(Error::Undecided(_)) => ladder_sign(&s, MAX_PRECISION),
        Err(e) => Err(e),
    }
}

/// `-t` for a product with a negative leading constant.
fn strip_negation(s: &Term) -> Option<Term> {
    if let TermKind::Mul(fs) = s.kind() {
        if let Some(c) = fs[0].as_const() {
            if c.sign() == Ordering::Less {
                let mut factors = vec![Term::constant(c.neg())];
                factors.extend_from_slice(&fs[1..]);
                return Some(crate::term::simplify::norm_mul(factors));
            }
        }
    }
    None
}

fn constant_term_limit(s: &Term) -> Result<LimitOutcome> {
    let iv = eval_constant(s, 256, MAX_PRECISION)?;
    match iv.sign() {
        Some(Ordering::Greater) => Ok((
            LimitValue::FiniteNonzero {
                sign: 1,
                enclosure: (bf_to_f64(&iv.lo), bf_to_f64(&iv.hi)),
                exact: s.as_const().cloned(),
            },
            Ordering::Greater,
        )),
        Some(Ordering::Less) => Ok((
            LimitValue::FiniteNonzero {
                sign: -1,
                enclosure: (bf_to_f64(&iv.lo), bf_to_f64(&iv.hi)),
                exact: s.as_const().cloned(),
            },
            Ordering::Less,
        )),
        _ => Err(Error::Undecided(format!(
            "constant term {s} not separated from zero"
        ))),
    }
}

/// Limit and germ sign for a term that is already simplified and validated.
pub(crate) fn limit_simplified(s: &Term) -> Result<(LimitValue, Ordering)> {
    if s.is_zero_const() {
        return Ok((LimitValue::Zero, Ordering::Equal));
    }
    limit_full_cached(s, &mut Ctx::new())
}

/// Germ sign for a term that is already simplified and validated.
pub(crate) fn germ_sign_simplified(s: &Term) -> Result<Ordering> {
    germ_sign_inner(s, &mut Ctx::new())
}

/// How the leading behavior of a term is extracted.
pub(crate) enum LeadClass {
    /// No `x` at all: the term is its own (constant) leading coefficient.
    Constant,
    /// Every `x` sits under a log: analyze `f(exp(x))` and map back.
    LogOnly,
    /// A maximal exponential class with chosen base `w = exp(h) -> 0`;
    /// when the class of `x` itself is maximal, `h = -log x`.
    Class { h: Term },
}

pub(crate) fn lead_class(s: &Term) -> Result<LeadClass> {
    let mut ctx = Ctx::new();
    if !s.has_x() {
        return Ok(LeadClass::Constant);
    }
    let m = mrv(s, &mut ctx)?;
    if m.has_x {
        return Ok(LeadClass::Class { h: simplify(&build::neg(Term::log_raw(Term::x()))) });
    }
    match m.args.first() {
        None => Ok(LeadClass::LogOnly),
        Some(rep) => {
            let h = choose_h(rep, &mut ctx)?;
            Ok(LeadClass::Class { h })
        }
    }
}

/// Leading exponent and coefficient of `s` as a series in `exp(h)`.
/// Errors with `ZeroGerm` when the expansion proves the germ zero.
pub(crate) fn leading_term(s: &Term, h: &Term) -> Result<(ExactConstant, Term)> {
    let mut ctx = Ctx::new();
    for ord in ORDER_LADDER {
        let cap = ExactConstant::from_int(ord);
        let series = expand(s, h, &cap, &mut ctx)?;
        let mut sign_fn = |t: &Term| germ_sign_inner(t, &mut Ctx::new());
        match series.leading(&mut sign_fn)? {
            Leading::ZeroGerm => {
                return Err(Error::ZeroGerm(format!("{s} is the zero germ")))
            }
            Leading::Found { exponent, coeff, .. } => return Ok((exponent, coeff)),
            Leading::NeedMoreOrder => continue,
        }
    }
    Err(Error::Undecided(format!("series order budget exhausted for {s}")))
}

/// The maximal comparability class of a term: whether the class of `x`
/// itself is maximal, and the arguments of the maximal exponential subterms.
struct Mrv {
    has_x: bool,
    args: Vec<Term>,
}

impl Mrv {
    fn empty() -> Mrv {
        Mrv { has_x: false, args: Vec::new() }
    }

    fn is_empty(&self) -> bool {
        !self.has_x && self.args.is_empty()
    }

    /// The log-magnitude of a class representative, used for comparisons.
    fn log_rep(&self) -> Term {
        if let Some(a) = self.args.first() {
            a.clone()
        } else {
            Term::log_raw(Term::x())
        }
    }
}

fn mrv(s: &Term, ctx: &mut Ctx) -> Result<Mrv> {
    if std::env::var_os("GERMCALC_TRACE").is_some() && ctx.depth > 480 {
        eprintln!("depth {} mrv {s}", ctx.depth);
    }
    with_depth(ctx, |ctx| mrv_inner(s, ctx))
}

fn mrv_inner(s: &Term, ctx: &mut Ctx) -> Result<Mrv> {
    match s.kind() {
        TermKind::Const(_) => Ok(Mrv::empty()),
        TermKind::X => Ok(Mrv { has_x: true, args: Vec::new() }),
        TermKind::Add(ss) | TermKind::Mul(ss) => {
            let mut acc = Mrv::empty();
            for t in ss {
                let m = mrv(t, ctx)?;
                acc = combine_max(acc, m, ctx)?;
            }
            Ok(acc)
        }
        TermKind::Recip(t) => mrv(t, ctx),
        TermKind::Pow(b, _) => mrv(b, ctx),
        TermKind::Log(g) => {
            // a log demotes the class of x content by one level, so the
            // x-class flag does not survive; exponential classes dominate
            // through the logarithm and stay
            let m = mrv(g, ctx)?;
            Ok(Mrv { has_x: false, args: m.args })
        }
        TermKind::Exp(a) => {
            let sa = simplify(a);
            let inner = mrv(&sa, ctx)?;
            let (lv, _) = limit_full_cached(&sa, ctx)?;
            if lv.is_infinite() {
                let this = Mrv { has_x: false, args: vec![sa] };
                combine_max(this, inner, ctx)
            } else {
                Ok(inner)
            }
        }
    }
}

fn combine_max(a: Mrv, b: Mrv, ctx: &mut Ctx) -> Result<Mrv> {
    if a.is_empty() {
        return Ok(b);
    }
    if b.is_empty() {
        return Ok(a);
    }
    let ra = a.log_rep();
    let rb = b.log_rep();
    if ra.same(&rb) {
        return Ok(union(a, b));
    }
    let ratio = simplify(&build::div(ra, rb));
    let (lv, _) = limit_full_cached(&ratio, ctx)?;
    Ok(match lv {
        LimitValue::PlusInfinity | LimitValue::MinusInfinity => a,
        LimitValue::Zero => b,
        LimitValue::FiniteNonzero { .. } => union(a, b),
    })
}

fn union(mut a: Mrv, b: Mrv) -> Mrv {
    a.has_x |= b.has_x;
    for arg in b.args {
        if !a.args.iter().any(|t| t.same(&arg)) {
            a.args.push(arg);
        }
    }
    a
}

/// Picks `h` with `exp(h) -> 0` from the class of the representative
/// argument: strips bounded summands of the distributed argument and
/// orients the result negatively.
fn choose_h(rep: &Term, ctx: &mut Ctx) -> Result<Term> {
    let dist = simplify(&distribute(rep));
    let mut unbounded: Vec<Term> = Vec::new();
    for s in crate::term::simplify::add_summands(&dist) {
        let (lv, _) = limit_full_cached(&simplify(&s), ctx)?;
        if lv.is_infinite() {
            unbounded.push(s);
        }
    }
    let core = if unbounded.is_empty() {
        dist
    } else {
        simplify(&crate::term::simplify::norm_add(unbounded))
    };
    let (lv, _) = limit_full_cached(&core, ctx)?;
    match lv {
        LimitValue::PlusInfinity => Ok(simplify(&build::neg(core))),
        LimitValue::MinusInfinity => Ok(core),
        _ => Err(Error::Undecided(format!(
            "class representative {rep} lost its growth during purification"
        ))),
    }
}

/// Distributes products and small integer powers over sums.  Gives up (and
/// returns the input) when the expansion would explode.
pub fn distribute(t: &Term) -> Term {
    fn summand_count(t: &Term) -> usize {
        match t.kind() {
            TermKind::Add(ss) => ss.len(),
            _ => 1,
        }
    }
    match t.kind() {
        TermKind::Const(_) | TermKind::X => t.clone(),
        TermKind::Add(ss) => Term::add_raw(ss.iter().map(distribute).collect()),
        TermKind::Mul(fs) => {
            let parts: Vec<Term> = fs.iter().map(distribute).collect();
            let total: usize = parts.iter().map(summand_count).product();
            if total > 128 || !parts.iter().any(|p| matches!(p.kind(), TermKind::Add(_))) {
                return Term::mul_raw(parts);
            }
            let mut acc: Vec<Term> = vec![Term::int(1)];
            for p in parts {
                let summands = crate::term::simplify::add_summands(&p);
                let summands = if summands.is_empty() { vec![Term::int(0)] } else { summands };
                let mut next = Vec::with_capacity(acc.len() * summands.len());
                for a in &acc {
                    for s in &summands {
                        next.push(Term::mul_raw(vec![a.clone(), s.clone()]));
                    }
                }
                acc = next;
            }
            Term::add_raw(acc)
        }
        TermKind::Pow(b, r) => {
            let db = distribute(b);
            if let Some(n) = crate::term::rational_to_i64(r) {
                if (2..=6).contains(&n) && matches!(db.kind(), TermKind::Add(_)) {
                    let base_count = summand_count(&db);
                    if base_count.pow(n as u32) <= 128 {
                        let mut acc = db.clone();
                        for _ in 1..n {
                            acc = distribute(&Term::mul_raw(vec![acc, db.clone()]));
                        }
                        return acc;
                    }
                }
            }
            Term::pow_raw(db, r.clone())
        }
        TermKind::Recip(s) => Term::recip_raw(distribute(s)),
        TermKind::Exp(a) => Term::exp_raw(distribute(a)),
        TermKind::Log(a) => Term::log_raw(distribute(a)),
    }
}

/// Generalized series expansion of `s` in `w = exp(h)`, truncated at `cap`.
fn expand(s: &Term, h: &Term, cap: &ExactConstant, ctx: &mut Ctx) -> Result<Series> {
    if std::env::var_os("GERMCALC_TRACE").is_some() && ctx.depth > 480 {
        eprintln!("depth {} expand {s} | h = {h}", ctx.depth);
    }
    with_depth(ctx, |ctx| expand_inner(s, h, cap, ctx))
}

fn expand_inner(s: &Term, h: &Term, cap: &ExactConstant, ctx: &mut Ctx) -> Result<Series> {
    let mut sign_fn = |t: &Term| germ_sign_inner(t, &mut Ctx::new());
    match s.kind() {
        TermKind::Const(_) => Ok(Series::constant(s.clone(), cap.clone())),
        TermKind::X => {
            // x = exp(log x): either a plain coefficient (lower class than
            // the base) or a shifted power of the base
            expand_exp_like(s, &Term::log_raw(Term::x()), h, cap, ctx)
        }
        TermKind::Add(ss) => {
            let mut acc = Series::zero(cap.clone());
            for t in ss {
                let st = expand(t, h, cap, ctx)?;
                acc = acc.add(&st)?;
            }
            Ok(acc)
        }
        TermKind::Mul(fs) => {
            let mut acc = Series::constant(Term::int(1), cap.clone());
            for t in fs {
                let st = expand(t, h, cap, ctx)?;
                acc = acc.mul(&st)?;
            }
            Ok(acc)
        }
        TermKind::Recip(t) => expand(t, h, cap, ctx)?.recip(&mut sign_fn),
        TermKind::Pow(b, r) => expand(b, h, cap, ctx)?.pow_rational(r, &mut sign_fn),
        TermKind::Log(g) => expand(g, h, cap, ctx)?.log(h, &mut sign_fn),
        TermKind::Exp(a) => {
            let sa = simplify(a);
            if !sa.has_x() {
                return Ok(Series::constant(s.clone(), cap.clone()));
            }
            expand_exp_like(s, &sa, h, cap, ctx)
        }
    }
}

/// Expands `whole = exp(arg)` (with `x` itself viewed as `exp(log x)`)
/// against the base `w = exp(h)`.
fn expand_exp_like(
    whole: &Term,
    arg: &Term,
    h: &Term,
    cap: &ExactConstant,
    ctx: &mut Ctx,
) -> Result<Series> {
    let ratio = simplify(&build::div(arg.clone(), h.clone()));
    let (lv, _) = limit_full_cached(&ratio, ctx)?;
    match lv {
        LimitValue::Zero => {
            if matches!(whole.kind(), TermKind::X) {
                // x is of strictly lower class than the base: a coefficient
                return Ok(Series::constant(whole.clone(), cap.clone()));
            }
            let inner = expand(arg, h, cap, ctx)?;
            inner.exp()
        }
        LimitValue::FiniteNonzero { exact, .. } => {
            let c = exact.ok_or_else(|| {
                Error::Unsupported(format!(
                    "class ratio of {arg} against the expansion base is not exactly representable"
                ))
            })?;
            // exp(arg) = exp(arg - c*h) * w^c; the argument is distributed so
            // that the subtraction cancels against the (distributed) base
            // structurally, not just as germs
            let shifted = simplify(&build::add2(
                distribute(arg),
                build::neg(build::scale(c.clone(), h.clone())),
            ));
            let guard_key = (whole.clone(), h.clone());
            let reentered = EXPAND_GUARD.with(|g| !g.borrow_mut().insert(guard_key.clone()));
            if reentered {
                return Err(Error::Undecided(format!(
                    "expansion of {whole} re-entered itself; residual did not reduce"
                )));
            }
            let residual = expand(&build::exp(shifted), h, cap, ctx);
            EXPAND_GUARD.with(|g| {
                g.borrow_mut().remove(&guard_key);
            });
            Ok(residual?.shift(&c))
        }
        LimitValue::PlusInfinity | LimitValue::MinusInfinity => Err(Error::Undecided(format!(
            "exponential argument {arg} outgrows the chosen expansion base"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::GermClass;
    use crate::term::parse;

    fn cls(text: &str) -> GermClass {
        classify(&parse(text).unwrap()).unwrap()
    }

    fn lim(text: &str) -> LimitValue {
        limit(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn classify_spec_examples() {
        assert_eq!(cls("x + exp(-x)"), GermClass::InfIncreasing);
        assert_eq!(cls("1/log(x)"), GermClass::SmallPositive);
        assert_eq!(cls("exp(log(x)) - x"), GermClass::ZeroGerm);
    }

    #[test]
    fn limit_spec_examples() {
        match lim("exp(1 + 1/x)") {
            LimitValue::FiniteNonzero { sign, enclosure, exact } => {
                assert_eq!(sign, 1);
                assert!(enclosure.0 <= std::f64::consts::E && std::f64::consts::E <= enclosure.1);
                assert!(exact.is_none());
            }
            other => panic!("expected finite limit, got {other:?}"),
        }
        match lim("x/(x+1)") {
            LimitValue::FiniteNonzero { exact: Some(c), .. } => {
                assert!(c.is_one());
            }
            other => panic!("expected exact limit 1, got {other:?}"),
        }
        assert_eq!(lim("x - x"), LimitValue::Zero);
    }

    #[test]
    fn compare_spec_examples() {
        let x = parse("x").unwrap();
        let ex = parse("exp(x)").unwrap();
        assert_eq!(compare(&x, &ex).unwrap(), Comparison::Less);
        let t = parse("x*log(x)").unwrap();
        match compare(&t, &t).unwrap() {
            Comparison::Comparable(LimitValue::FiniteNonzero { exact: Some(c), .. }) => {
                assert!(c.is_one())
            }
            other => panic!("expected ratio 1, got {other:?}"),
        }
        // log x / log_3 x  >  sqrt(log x)
        let f = parse("log(x)/log_3(x)").unwrap();
        let g = parse("sqrt(log(x))").unwrap();
        assert_eq!(compare(&f, &g).unwrap(), Comparison::Greater);
    }

    #[test]
    fn deep_cancellation_via_series() {
        // exp(x + 1/x) - exp(x) ~ exp(x)/x -> +inf
        assert_eq!(lim("exp(x + 1/x) - exp(x)"), LimitValue::PlusInfinity);
        // x*(exp(1/x) - 1) -> 1
        match lim("x*(exp(1/x) - 1)") {
            LimitValue::FiniteNonzero { sign: 1, enclosure, .. } => {
                assert!(enclosure.0 <= 1.0 && 1.0 <= enclosure.1);
            }
            other => panic!("expected limit 1, got {other:?}"),
        }
    }

    #[test]
    fn classic_gruntz_cases() {
        assert_eq!(cls("exp(x)/x^100"), GermClass::InfIncreasing);
        assert_eq!(cls("log(x)^10/x^(1/10)"), GermClass::SmallPositive);
        assert_eq!(cls("exp(-x)*exp(x)"), GermClass::FinitePositive);
        assert_eq!(cls("exp(x + exp(-x)) - exp(x)"), GermClass::FinitePositive);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            classify(&parse("log(1 - x)").unwrap()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            classify(&parse("sqrt(-x)").unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn positivity_error_in_compare() {
        let f = parse("-x").unwrap();
        let g = parse("x").unwrap();
        assert!(matches!(compare(&f, &g), Err(Error::Positivity(_))));
    }
}
