//! Continuous-lift evaluation along paths in the Log chart.
//!
//! Products, powers, exponentials and logarithms are computed directly in
//! the chart.  Addition projects its operands to complex coordinates and
//! lifts the principal argument of the sum to the branch closest to the
//! node's previous value; a jump of more than pi/2 triggers adaptive step
//! halving (up to 20 levels) and ultimately a branch-collision error.

use std::collections::HashMap;

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::error::{Error, Result};
use crate::interval::bf_to_f64;
use crate::lchart::LPoint;
use crate::term::{Term, TermKind};

const RM: RoundingMode = RoundingMode::ToEven;
const MAX_HALVINGS: u32 = 20;

/// High-precision point value in the chart.
#[derive(Clone, Debug)]
pub struct LValue {
    pub logmod: BigFloat,
    pub arg: BigFloat,
}

impl LValue {
    pub fn to_point(&self) -> LPoint {
        LPoint { logmod: bf_to_f64(&self.logmod), arg: bf_to_f64(&self.arg) }
    }
}

/// Branch memory: the previously accepted argument of every addition and
/// logarithm node along the path.
#[derive(Default)]
pub struct PathEvalState {
    prev_arg: HashMap<Term, BigFloat>,
}

struct Fl {
    p: usize,
    cc: Consts,
}

impl Fl {
    fn new(p: usize) -> Fl {
        Fl { p, cc: Consts::new().expect("constants cache") }
    }

    fn f(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.p)
    }

    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc)
    }

    fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc)
    }

    fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.p, RM, &mut self.cc)
    }

    fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.p, RM, &mut self.cc)
    }

    fn atan(&mut self, a: &BigFloat) -> BigFloat {
        a.atan(self.p, RM, &mut self.cc)
    }

    fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    /// Full-plane `atan2(y, x)`.
    fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        if x.is_positive() && !x.is_zero() {
            return self.atan(&self.div(y, x));
        }
        let pi = self.pi();
        if x.is_zero() {
            let half = self.div(&pi, &self.f(2.0));
            return if y.is_negative() { half.neg() } else { half };
        }
        // x < 0
        let base = self.atan(&self.div(y, x));
        if y.is_negative() {
            self.sub(&base, &pi)
        } else {
            self.add(&base, &pi)
        }
    }

    fn const_interval(&mut self, c: &crate::constant::ExactConstant) -> BigFloat {
        let mut ctx = crate::interval::IntervalCtx::new(self.p);
        let iv = c.to_interval(&mut ctx);
        iv.lo.add(&iv.hi, self.p, RM).div(&self.f(2.0), self.p, RM)
    }
}

/// Evaluates the unique continuous lift of `f` along the path, which must
/// start on the positive real axis (`arg = 0`).  Returns the values at the
/// given path points; intermediate refinement points are internal.
pub fn eval_along_path(f: &Term, path: &[LPoint], precision: usize) -> Result<Vec<LPoint>> {
    if precision < 64 {
        return Err(Error::PrecisionExhausted("precision must be at least 64 bits".into()));
    }
    let first = path
        .first()
        .ok_or_else(|| Error::DomainViolation("empty path".into()))?;
    if first.arg.abs() > 1e-12 {
        return Err(Error::DomainViolation(
            "path must start on the positive real axis (arg = 0)".into(),
        ));
    }
    let mut fl = Fl::new(precision);
    let mut state = PathEvalState::default();
    let mut out = Vec::with_capacity(path.len());
    // initialize the branch memory at the first point
    let v0 = eval_at(f, first, &mut fl, &mut state, true)?;
    out.push(v0.to_point());
    let mut prev = *first;
    for target in &path[1..] {
        let v = advance(f, &prev, target, &mut fl, &mut state, 0)?;
        out.push(v.to_point());
        prev = *target;
    }
    Ok(out)
}

/// Evaluates `f` at one off-axis point by lifting along the vertical segment
/// from the positive real axis; convenience used by the samplers.
pub fn eval_at_sample(f: &Term, point: &LPoint, precision: usize) -> Result<LValue> {
    let mut fl = Fl::new(precision);
    let mut state = PathEvalState::default();
    let base = LPoint::on_axis(point.logmod);
    eval_at(f, &base, &mut fl, &mut state, true)?;
    if point.arg == 0.0 {
        return eval_at(f, &base, &mut fl, &mut state, false);
    }
    advance(f, &base, point, &mut fl, &mut state, 0)
}

fn advance(
    f: &Term,
    from: &LPoint,
    to: &LPoint,
    fl: &mut Fl,
    state: &mut PathEvalState,
    depth: u32,
) -> Result<LValue> {
    match eval_at(f, to, fl, state, false) {
        Ok(v) => Ok(v),
        Err(Error::BranchCollision(msg)) => {
            if depth >= MAX_HALVINGS {
                return Err(Error::BranchCollision(format!(
                    "{msg} (after {MAX_HALVINGS} step halvings)"
                )));
            }
            let mid = LPoint {
                logmod: 0.5 * (from.logmod + to.logmod),
                arg: 0.5 * (from.arg + to.arg),
            };
            advance(f, from, &mid, fl, state, depth + 1)?;
            advance(f, &mid, to, fl, state, depth + 1)
        }
        Err(e) => Err(e),
    }
}

/// Evaluates every node of `f` at `point`, updating the branch memory.
/// `init` marks the first path point, where arguments are initialized from
/// real values instead of being checked for continuity.
fn eval_at(
    f: &Term,
    point: &LPoint,
    fl: &mut Fl,
    state: &mut PathEvalState,
    init: bool,
) -> Result<LValue> {
    let mut memo: HashMap<Term, LValue> = HashMap::new();
    let mut pending: Vec<(Term, BigFloat)> = Vec::new();
    let v = eval_node(f, point, fl, state, init, &mut memo, &mut pending)?;
    // commit branch memory only after the whole step was accepted
    for (t, arg) in pending {
        state.prev_arg.insert(t, arg);
    }
    Ok(v)
}

fn eval_node(
    t: &Term,
    point: &LPoint,
    fl: &mut Fl,
    state: &mut PathEvalState,
    init: bool,
    memo: &mut HashMap<Term, LValue>,
    pending: &mut Vec<(Term, BigFloat)>,
) -> Result<LValue> {
    if let Some(hit) = memo.get(t) {
        return Ok(hit.clone());
    }
    let value = match t.kind() {
        TermKind::Const(c) => {
            let v = fl.const_interval(c);
            if v.is_zero() {
                return Err(Error::BranchCollision("zero constant has no lift".into()));
            }
            let (m, a) = if v.is_negative() { (v.neg(), fl.pi()) } else { (v, fl.f(0.0)) };
            LValue { logmod: fl.ln(&m), arg: a }
        }
        TermKind::X => LValue { logmod: fl.f(point.logmod), arg: fl.f(point.arg) },
        TermKind::Mul(fs) => {
            let mut logmod = fl.f(0.0);
            let mut arg = fl.f(0.0);
            for s in fs {
                let v = eval_node(s, point, fl, state, init, memo, pending)?;
                logmod = fl.add(&logmod, &v.logmod);
                arg = fl.add(&arg, &v.arg);
            }
            LValue { logmod, arg }
        }
        TermKind::Recip(s) => {
            let v = eval_node(s, point, fl, state, init, memo, pending)?;
            LValue { logmod: v.logmod.neg(), arg: v.arg.neg() }
        }
        TermKind::Pow(b, r) => {
            let v = eval_node(b, point, fl, state, init, memo, pending)?;
            let mut ctx = crate::interval::IntervalCtx::new(fl.p);
            let ri = ctx.from_rational(r);
            let rv = ri.lo.add(&ri.hi, fl.p, RM).div(&fl.f(2.0), fl.p, RM);
            LValue { logmod: fl.mul(&v.logmod, &rv), arg: fl.mul(&v.arg, &rv) }
        }
        TermKind::Exp(a) => {
            let v = eval_node(a, point, fl, state, init, memo, pending)?;
            // value exp(z), z = e^u (cos v + i sin v): logmod = Re z, arg = Im z
            let r = fl.exp(&v.logmod);
            if r.is_inf() {
                return Err(Error::PrecisionExhausted(format!(
                    "exp overflow at logmod {:.3e}",
                    bf_to_f64(&v.logmod)
                )));
            }
            let c = fl.cos(&v.arg);
            let s = fl.sin(&v.arg);
            LValue { logmod: fl.mul(&r, &c), arg: fl.mul(&r, &s) }
        }
        TermKind::Log(a) => {
            let v = eval_node(a, point, fl, state, init, memo, pending)?;
            // value Log z = u + i v as a surface point; requires u > 0
            // (the argument must have modulus > 1 for the llog chart)
            if !v.logmod.is_positive() || v.logmod.is_zero() {
                return Err(Error::DomainViolation(format!(
                    "log applied where |argument| <= 1 (logmod {:.3e})",
                    bf_to_f64(&v.logmod)
                )));
            }
            let uu = fl.mul(&v.logmod, &v.logmod);
            let vv = fl.mul(&v.arg, &v.arg);
            let half = fl.f(0.5);
            let sum = fl.add(&uu, &vv);
            let lnsum = fl.ln(&sum);
            let logmod = fl.mul(&lnsum, &half);
            let arg = fl.atan2(&v.arg.clone(), &v.logmod.clone());
            track_branch(t, &arg, fl, state, init, pending)?;
            LValue { logmod, arg }
        }
        TermKind::Add(ss) => {
            let mut re = fl.f(0.0);
            let mut im = fl.f(0.0);
            let mut max_mag = fl.f(0.0);
            for s in ss {
                let v = eval_node(s, point, fl, state, init, memo, pending)?;
                let r = fl.exp(&v.logmod);
                if r.is_inf() {
                    return Err(Error::PrecisionExhausted(format!(
                        "summand overflow at logmod {:.3e}",
                        bf_to_f64(&v.logmod)
                    )));
                }
                let cv = fl.cos(&v.arg);
                let sv = fl.sin(&v.arg);
                let rc = fl.mul(&r, &cv);
                let rs = fl.mul(&r, &sv);
                re = fl.add(&re, &rc);
                im = fl.add(&im, &rs);
                max_mag = max_mag.max(&r);
            }
            let mag2 = fl.add(&fl.mul(&re, &re), &fl.mul(&im, &im));
            let tol = fl.mul(&max_mag, &fl.f(1e-30));
            let tol2 = fl.mul(&tol, &tol);
            if matches!(mag2.cmp(&tol2), Some(c) if c <= 0) {
                return Err(Error::BranchCollision(format!(
                    "sum passes through zero near logmod {:.4}, arg {:.4}",
                    point.logmod, point.arg
                )));
            }
            let half = fl.f(0.5);
            let lnmag2 = fl.ln(&mag2);
            let logmod = fl.mul(&lnmag2, &half);
            let principal = fl.atan2(&im, &re);
            let arg = lift_argument(t, principal, fl, state, init, pending)?;
            LValue { logmod, arg }
        }
    };
    memo.insert(t.clone(), value.clone());
    Ok(value)
}

/// Checks continuity of a principal-valued node argument against the branch
/// memory (no lifting needed, the chart is continuous there).
fn track_branch(
    t: &Term,
    arg: &BigFloat,
    fl: &mut Fl,
    state: &PathEvalState,
    init: bool,
    pending: &mut Vec<(Term, BigFloat)>,
) -> Result<()> {
    if !init {
        if let Some(prev) = state.prev_arg.get(t) {
            let jump = fl.sub(arg, prev).abs();
            let pi = fl.pi();
            let half_pi = fl.div(&pi, &fl.f(2.0));
            if matches!(jump.cmp(&half_pi), Some(c) if c > 0) {
                return Err(Error::BranchCollision(
                    "log-node argument jumped by more than pi/2".into(),
                ));
            }
        }
    }
    pending.push((t.clone(), arg.clone()));
    Ok(())
}

/// Lifts the principal argument of an addition node to the branch closest
/// to the node's previous argument.
fn lift_argument(
    t: &Term,
    principal: BigFloat,
    fl: &mut Fl,
    state: &PathEvalState,
    init: bool,
    pending: &mut Vec<(Term, BigFloat)>,
) -> Result<BigFloat> {
    let pi = fl.pi();
    let two_pi = fl.mul(&pi, &fl.f(2.0));
    let arg = match state.prev_arg.get(t) {
        None => {
            // first visit: the path starts on the positive real axis, where
            // the node value is real; pick the principal branch
            principal
        }
        Some(prev) => {
            // arg = principal + 2*pi*k with k minimizing |arg - prev|
            let k = {
                let diff = fl.sub(prev, &principal);
                let ratio = fl.div(&diff, &two_pi);
                // round to nearest integer
                let rounded = ratio.add(&fl.f(0.5), fl.p, RoundingMode::Down).floor();
                rounded
            };
            let lifted = fl.add(&principal, &fl.mul(&k, &two_pi));
            if !init {
                let jump = fl.sub(&lifted, prev).abs();
                let pi2 = fl.pi();
                let half_pi = fl.div(&pi2, &fl.f(2.0));
                if matches!(jump.cmp(&half_pi), Some(c) if c > 0) {
                    return Err(Error::BranchCollision(
                        "addition-node argument jumped by more than pi/2".into(),
                    ));
                }
            }
            lifted
        }
    };
    pending.push((t.clone(), arg.clone()));
    Ok(arg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn ev(text: &str, pts: &[(f64, f64)]) -> Vec<LPoint> {
        let f = parse(text).unwrap();
        let path: Vec<LPoint> = pts.iter().map(|&(u, v)| LPoint::new(u, v)).collect();
        eval_along_path(&f, &path, 256).unwrap()
    }

    #[test]
    fn squaring_doubles_the_chart() {
        let out = ev("x^2", &[(1.0, 0.0), (1.0, 0.7), (1.5, 2.0)]);
        assert!((out[1].logmod - 2.0).abs() < 1e-12);
        assert!((out[1].arg - 1.4).abs() < 1e-12);
        assert!((out[2].logmod - 3.0).abs() < 1e-12);
        assert!((out[2].arg - 4.0).abs() < 1e-12);
    }

    #[test]
    fn exp_formula() {
        // f = exp at (1, pi/4): (e cos(pi/4), e sin(pi/4))
        let out = ev("exp(x)", &[(1.0, 0.0), (1.0, std::f64::consts::FRAC_PI_4)]);
        let expect = std::f64::consts::E * (0.5f64).sqrt();
        assert!((out[1].logmod - expect).abs() < 1e-9, "{:?}", out[1]);
        assert!((out[1].arg - expect).abs() < 1e-9);
    }

    #[test]
    fn real_positive_addition() {
        // x + 1 at logmod 0 on the axis: value 2
        let out = ev("x + 1", &[(0.0, 0.0)]);
        assert!((out[0].logmod - 2.0f64.ln()).abs() < 1e-12);
        assert_eq!(out[0].arg, 0.0);
    }

    #[test]
    fn continuous_lift_beyond_principal_branch() {
        // follow x + 1 around a wide arc: the lift tracks continuously
        let mut path = vec![LPoint::on_axis(2.0)];
        for i in 1..=40 {
            path.push(LPoint::new(2.0, 2.6 * i as f64 / 40.0));
        }
        let f = parse("x + 1").unwrap();
        let out = eval_along_path(&f, &path, 256).unwrap();
        // at arg 2.6 and |x| = e^2, x + 1 stays close to x
        let last = out.last().unwrap();
        assert!((last.arg - 2.6).abs() < 0.2);
    }

    #[test]
    fn branch_collision_at_zero() {
        // a sum that is identically zero has no lift anywhere
        let f = parse("x - x").unwrap();
        let path = vec![LPoint::on_axis(2.0)];
        match eval_along_path(&f, &path, 256) {
            Err(Error::BranchCollision(_)) => {}
            other => panic!("expected branch collision, got {other:?}"),
        }
    }

    #[test]
    fn log_domain_violation() {
        let f = parse("log(x)").unwrap();
        let path = vec![LPoint::on_axis(-1.0)];
        match eval_along_path(&f, &path, 256) {
            Err(Error::DomainViolation(_)) => {}
            other => panic!("expected domain violation, got {other:?}"),
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let f = parse("x^2 + x*log(x)").unwrap();
        let up = eval_along_path(&f, &[LPoint::on_axis(2.0), LPoint::new(2.0, 0.9)], 256).unwrap();
        let down =
            eval_along_path(&f, &[LPoint::on_axis(2.0), LPoint::new(2.0, -0.9)], 256).unwrap();
        assert!((up[1].logmod - down[1].logmod).abs() < 1e-10);
        assert!((up[1].arg + down[1].arg).abs() < 1e-10);
    }
}
