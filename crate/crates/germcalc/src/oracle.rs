//! Independent brute-force numeric asymptotics, used by tests to
//! cross-check the symbolic engine.  The oracle never simplifies and never
//! calls the limit engine: it evaluates raw ASTs with certified interval
//! arithmetic on escalating grids and reports trend verdicts with a
//! confidence level.

use std::cmp::Ordering;

use serde::Serialize;

use crate::asymptotics::sign::eval_interval;
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalCtx};
use crate::term::{Term, TermKind};

/// What the oracle was asked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Limit,
    Level,
    Compare,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleValue {
    PlusInfinity,
    MinusInfinity,
    Zero,
    Finite(f64),
    Level(i64),
    Less,
    Comparable(f64),
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    /// Agreement across at least three escalating grid points and two
    /// precision levels.
    Confirmed,
    Weak,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleEstimate {
    pub quantity: Quantity,
    pub value: OracleValue,
    pub confidence: Confidence,
    pub trace: Vec<String>,
}

/// Default evaluation grid: the spec points `1e2, 1e4, 1e8` plus deep
/// points that are still cheap at 256 bits.
pub fn default_grid() -> Vec<f64> {
    vec![1e2, 1e4, 1e8, 40f64.exp(), 160f64.exp(), 640f64.exp()]
}

fn eval_grid(f: &Term, grid: &[f64], precision: usize) -> Vec<(f64, Option<Interval>)> {
    let mut ctx = IntervalCtx::new(precision);
    grid.iter()
        .map(|&x| {
            let xi = ctx.from_f64(x);
            let v = eval_interval(f, &xi, &mut ctx).ok().filter(|iv| iv.is_finite());
            (x, v)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Trend {
    PlusInf,
    MinusInf,
    Zero,
    Finite(f64),
}

/// Trend classification of a tail of values.
fn classify_trend(vals: &[f64]) -> Option<Trend> {
    if vals.len() < 3 {
        return None;
    }
    let n = vals.len();
    let tail = &vals[n.saturating_sub(4)..];
    let k = tail.len();
    // divergence: strictly growing magnitudes with a consistent sign, a
    // meaningful per-step factor, and solid overall growth along the tail
    let growing = (1..k).all(|i| tail[i].abs() > tail[i - 1].abs() * 1.15);
    let overall = tail[k - 1].abs() > 2.0 * tail[0].abs();
    let same_sign = tail.iter().all(|v| *v > 0.0) || tail.iter().all(|v| *v < 0.0);
    if growing && overall && same_sign && tail[k - 1].abs() > 10.0 {
        return Some(if tail[k - 1] > 0.0 { Trend::PlusInf } else { Trend::MinusInf });
    }
    // decay to zero
    let shrinking = (1..k).all(|i| tail[i].abs() < tail[i - 1].abs() * 0.75);
    if shrinking && tail[k - 1].abs() < 1e-3 {
        return Some(Trend::Zero);
    }
    if tail.iter().all(|v| v.abs() < 1e-12) {
        return Some(Trend::Zero);
    }
    // stabilization: contracting differences that have become small in
    // absolute terms (slow log-speed drifts stay unclassified)
    let d1 = (tail[k - 2] - tail[k - 3]).abs();
    let d2 = (tail[k - 1] - tail[k - 2]).abs();
    let scale = tail[k - 1].abs().max(1.0);
    if d2 < 1e-12 * scale || (d2 < 0.25 * d1 && d2 < 1e-3 * scale) {
        return Some(Trend::Finite(tail[k - 1]));
    }
    None
}

/// Brute-force limit estimate on the grid.
pub fn numeric_limit(f: &Term, grid: &[f64], precision: usize) -> Result<OracleEstimate> {
    let mut verdicts = Vec::new();
    let mut trace = Vec::new();
    for p in [precision, precision * 2] {
        let evals = eval_grid(f, grid, p);
        let vals: Vec<f64> = evals
            .iter()
            .filter_map(|(_, v)| v.as_ref().map(|iv| iv.midpoint_f64()))
            .collect();
        trace.push(format!(
            "precision {p}: {} of {} grid points evaluable",
            vals.len(),
            grid.len()
        ));
        if vals.len() < 3 {
            return Err(Error::PrecisionExhausted(
                "fewer than three evaluable grid points".into(),
            ));
        }
        verdicts.push(classify_trend(&vals));
    }
    let value = match (verdicts[0], verdicts[1]) {
        (Some(a), Some(b)) if trends_agree(a, b) => Some((a, Confidence::Confirmed)),
        (Some(a), _) => Some((a, Confidence::Weak)),
        (None, Some(b)) => Some((b, Confidence::Weak)),
        (None, None) => None,
    };
    match value {
        Some((t, conf)) => Ok(OracleEstimate {
            quantity: Quantity::Limit,
            value: match t {
                Trend::PlusInf => OracleValue::PlusInfinity,
                Trend::MinusInf => OracleValue::MinusInfinity,
                Trend::Zero => OracleValue::Zero,
                Trend::Finite(v) => OracleValue::Finite(v),
            },
            confidence: conf,
            trace,
        }),
        None => Ok(OracleEstimate {
            quantity: Quantity::Limit,
            value: OracleValue::Finite(f64::NAN),
            confidence: Confidence::Weak,
            trace,
        }),
    }
}

fn trends_agree(a: Trend, b: Trend) -> bool {
    match (a, b) {
        (Trend::PlusInf, Trend::PlusInf)
        | (Trend::MinusInf, Trend::MinusInf)
        | (Trend::Zero, Trend::Zero) => true,
        (Trend::Finite(x), Trend::Finite(y)) => {
            (x - y).abs() <= 1e-6 * x.abs().max(y.abs()).max(1.0)
        }
        _ => false,
    }
}

/// Builds `exp_k(t^nu) o log_l` as a raw term.
fn sandwich_bound(k: u32, l: u32, nu_num: i64, nu_den: i64) -> Term {
    let mut t = Term::log_iter(l);
    t = Term::pow_raw(t, crate::term::q(nu_num, nu_den));
    for _ in 0..k {
        t = Term::exp_raw(t);
    }
    t
}

/// Level estimate by iterated-exponential sandwich search: find `(k, l,
/// nu)` with `exp_k(x^nu) o log_l >= |f| >= exp_k(x^(1/nu)) o log_l` at all
/// representable grid points `exp_j(t)`, `t in {10, 20, 40}`, `j <= 2`.
pub fn numeric_level(
    f: &Term,
    max_k: u32,
    max_nu: u32,
    precision: usize,
) -> Result<OracleEstimate> {
    let mut grid: Vec<f64> = Vec::new();
    for j in 0..=2u32 {
        for t in [10.0f64, 20.0, 40.0] {
            let mut x = t;
            let mut ok = true;
            for _ in 0..j {
                x = x.exp();
                if !x.is_finite() {
                    ok = false;
                    break;
                }
            }
            if ok {
                grid.push(x);
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut trace = Vec::new();
    let mut successes: Vec<(u32, u32, u32, f64)> = Vec::new(); // (k, l, nu, min margin)
    let mut ctx = IntervalCtx::new(precision);
    // |f| on the grid
    let mut fvals: Vec<(f64, Interval)> = Vec::new();
    for &x in &grid {
        let xi = ctx.from_f64(x);
        if let Ok(v) = eval_interval(f, &xi, &mut ctx) {
            if v.is_finite() && !v.contains_zero() {
                let a = abs_interval(&v);
                fvals.push((x, a));
            }
        }
    }
    if fvals.len() < 3 {
        return Err(Error::PrecisionExhausted(
            "fewer than three evaluable grid points for the sandwich".into(),
        ));
    }
    for k in 0..=max_k {
        for l in 0..=max_k {
            'nu: for nu in 1..=max_nu {
                let upper = sandwich_bound(k, l, nu as i64, 1);
                let lower = sandwich_bound(k, l, 1, nu as i64);
                let mut margin = f64::INFINITY;
                let mut points = 0;
                for (x, fa) in &fvals {
                    let xi = ctx.from_f64(*x);
                    let up = match eval_interval(&upper, &xi, &mut ctx) {
                        Ok(v) if v.is_finite() => v,
                        _ => continue,
                    };
                    let lo = match eval_interval(&lower, &xi, &mut ctx) {
                        Ok(v) if v.is_finite() => v,
                        _ => continue,
                    };
                    points += 1;
                    // certified: fa <= up and lo <= fa
                    if !(le_certified(fa, &up) && le_certified(&lo, fa)) {
                        continue 'nu;
                    }
                    let m = log_gap(fa, &up).min(log_gap(&lo, fa));
                    margin = margin.min(m);
                }
                if points >= 3 {
                    successes.push((k, l, nu, margin));
                    trace.push(format!(
                        "sandwich holds: k={k} l={l} nu={nu} margin {margin:.3}"
                    ));
                }
            }
        }
    }
    if successes.is_empty() {
        return Err(Error::NoSandwichFound);
    }
    let levels: std::collections::BTreeSet<i64> =
        successes.iter().map(|(k, l, _, _)| *k as i64 - *l as i64).collect();
    let best = successes.iter().max_by(|a, b| a.3.total_cmp(&b.3)).unwrap();
    let level = best.0 as i64 - best.1 as i64;
    let confidence = if levels.len() == 1 && best.3 > 0.5 {
        Confidence::Confirmed
    } else {
        Confidence::Weak
    };
    Ok(OracleEstimate {
        quantity: Quantity::Level,
        value: OracleValue::Level(level),
        confidence,
        trace,
    })
}

fn abs_interval(v: &Interval) -> Interval {
    if v.sign() == Some(Ordering::Less) {
        v.neg()
    } else {
        v.clone()
    }
}

fn le_certified(a: &Interval, b: &Interval) -> bool {
    matches!(a.hi.cmp(&b.lo), Some(c) if c <= 0)
}

fn log_gap(a: &Interval, b: &Interval) -> f64 {
    use crate::interval::bf_log2_abs;
    // crude log-scale separation, in bits
    (bf_log2_abs(&b.lo) - bf_log2_abs(&a.hi)).max(0.0)
}

/// Dominance estimate from the ratio trend on the grid.  Both germs must be
/// positive at the sampled points.
pub fn numeric_compare(
    f: &Term,
    g: &Term,
    grid: &[f64],
    precision: usize,
) -> Result<OracleEstimate> {
    let mut verdicts = Vec::new();
    let mut trace = Vec::new();
    for p in [precision, precision * 2] {
        let mut ctx = IntervalCtx::new(p);
        let mut ratios = Vec::new();
        for &x in grid {
            let xi = ctx.from_f64(x);
            let fv = match eval_interval(f, &xi, &mut ctx) {
                Ok(v) if v.is_finite() => v,
                _ => continue,
            };
            let gv = match eval_interval(g, &xi, &mut ctx) {
                Ok(v) if v.is_finite() => v,
                _ => continue,
            };
            if fv.sign() != Some(Ordering::Greater) || gv.sign() != Some(Ordering::Greater) {
                continue;
            }
            if let Some(gi) = gv.recip(&ctx) {
                ratios.push(fv.mul(&gi, &ctx).midpoint_f64());
            }
        }
        trace.push(format!("precision {p}: {} ratio points", ratios.len()));
        if ratios.len() < 3 {
            return Err(Error::PrecisionExhausted(
                "fewer than three positive ratio points".into(),
            ));
        }
        verdicts.push(classify_trend(&ratios));
    }
    let (trend, confidence) = match (verdicts[0], verdicts[1]) {
        (Some(a), Some(b)) if trends_agree(a, b) => (Some(a), Confidence::Confirmed),
        (Some(a), _) => (Some(a), Confidence::Weak),
        (None, Some(b)) => (Some(b), Confidence::Weak),
        (None, None) => (None, Confidence::Weak),
    };
    let value = match trend {
        Some(Trend::Zero) => OracleValue::Less,
        Some(Trend::PlusInf) | Some(Trend::MinusInf) => OracleValue::Greater,
        Some(Trend::Finite(v)) => OracleValue::Comparable(v),
        None => {
            return Ok(OracleEstimate {
                quantity: Quantity::Compare,
                value: OracleValue::Comparable(f64::NAN),
                confidence: Confidence::Weak,
                trace,
            })
        }
    };
    Ok(OracleEstimate { quantity: Quantity::Compare, value, confidence, trace })
}

/// Parses a corpus file: one expression per line, `#` starts a comment,
/// blank lines are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<(usize, Term)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        let t = crate::term::parse(body)?;
        out.push((lineno + 1, t));
    }
    Ok(out)
}

/// Tower depth of exponentials, used to pick grid points where iterated
/// exponentials stay representable.
pub fn exp_depth(t: &Term) -> u32 {
    match t.kind() {
        TermKind::Exp(a) => exp_depth(a) + 1,
        TermKind::Const(_) | TermKind::X => 0,
        TermKind::Add(ss) | TermKind::Mul(ss) => ss.iter().map(exp_depth).max().unwrap_or(0),
        TermKind::Recip(s) => exp_depth(s),
        TermKind::Pow(b, _) => exp_depth(b),
        TermKind::Log(a) => exp_depth(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    #[test]
    fn numeric_limit_examples() {
        let grid = vec![1e2, 1e4, 1e8];
        let f = parse("x/(x+1)").unwrap();
        let e = numeric_limit(&f, &grid, 256).unwrap();
        assert_eq!(e.confidence, Confidence::Confirmed);
        match e.value {
            OracleValue::Finite(v) => assert!((v - 1.0).abs() < 1e-6),
            other => panic!("expected finite 1, got {other:?}"),
        }

        let e = numeric_limit(&parse("exp(1 + 1/x)").unwrap(), &grid, 256).unwrap();
        match e.value {
            OracleValue::Finite(v) => assert!((v - std::f64::consts::E).abs() < 1e-6),
            other => panic!("expected e, got {other:?}"),
        }

        let e = numeric_limit(&parse("x - x").unwrap(), &grid, 256).unwrap();
        assert_eq!(e.value, OracleValue::Zero);
        assert_eq!(e.confidence, Confidence::Confirmed);
    }

    #[test]
    fn numeric_level_examples() {
        let e = numeric_level(&parse("exp(x)").unwrap(), 2, 3, 256).unwrap();
        assert_eq!(e.value, OracleValue::Level(1));
        let e = numeric_level(&parse("log(x)").unwrap(), 2, 3, 256).unwrap();
        assert_eq!(e.value, OracleValue::Level(-1));
        let e = numeric_level(&parse("x*log(x)").unwrap(), 2, 3, 256).unwrap();
        assert_eq!(e.value, OracleValue::Level(0));
    }

    #[test]
    fn numeric_compare_examples() {
        let grid = default_grid();
        let e = numeric_compare(&parse("x").unwrap(), &parse("exp(x)").unwrap(), &grid, 256)
            .unwrap();
        assert_eq!(e.value, OracleValue::Less);
        let e =
            numeric_compare(&parse("x+1").unwrap(), &parse("x").unwrap(), &grid, 256).unwrap();
        match e.value {
            OracleValue::Comparable(v) => assert!((v - 1.0).abs() < 1e-4),
            other => panic!("expected comparable 1, got {other:?}"),
        }
        let e = numeric_compare(
            &parse("log(x)/log_3(x)").unwrap(),
            &parse("sqrt(log(x))").unwrap(),
            &grid,
            256,
        )
        .unwrap();
        assert_eq!(e.value, OracleValue::Greater);
    }

    #[test]
    fn corpus_format() {
        let text = "# header\nx + 1\n\nexp(x) # trailing\n";
        let c = parse_corpus(text).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].0, 2);
        assert_eq!(c[1].0, 4);
    }
}
