//! The acceptance suite: paper-anchored values, algebraic identities on
//! random germs, oracle cross-checks, and sampled continuation properties.
//! Used by the `acceptance` integration test target and by `germcalc
//! selftest`.

use std::fmt::Write as _;
use std::time::Instant;

use crate::asymptotics::{
    alevel, classify, compare, eh, inverse_eh_bound, inverse_level, level, limit, Comparison,
    EhValue, Extended, GermClass, LimitValue,
};
use crate::domain::{domain_class, nu_log_class, nu_pr, translate_sandwich, DomainSpec};
use crate::error::Error;
use crate::gen;
use crate::lchart::{
    check_angle_positive, check_arg_distortion, check_dlipschitz, check_expansive,
    check_half_bounded, check_unit_at_infinity, CheckParams,
};
use crate::oracle::{
    self, numeric_compare, numeric_level, numeric_limit, Confidence, OracleValue,
};
use crate::term::simplify::simplify;
use crate::term::{build, parse, q, substitute, Term};

/// The deterministic 500-term corpus shipped with the crate.
pub const CORPUS: &str = include_str!("../data/corpus_500.txt");

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}] {} ({} ms): {}",
            self.id,
            if self.passed { "pass" } else { "FAIL" },
            self.name,
            self.millis,
            self.detail
        )
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=10).map(|id| run_one(id, seed)).collect()
}

pub fn run_one(id: u32, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let (name, result) = match id {
        1 => ("paper-value table", criterion_paper_values()),
        2 => ("level identities on random germs", criterion_level_identities(seed)),
        3 => ("eh shift laws on random germs", criterion_eh_shift_laws(seed)),
        4 => ("oracle equivalence on the corpus", criterion_oracle_equivalence()),
        5 => ("compositional-inverse height bound", criterion_inverse_bound()),
        6 => ("expansiveness of exp", criterion_expansiveness(seed)),
        7 => ("angle positivity", criterion_angle_positivity()),
        8 => ("unit behavior", criterion_units(seed)),
        9 => ("half-boundedness at height <= 0", criterion_half_bounded()),
        10 => ("domain calculus invariances", criterion_domain_calculus(seed)),
        _ => ("unknown criterion", Err("no such criterion".to_string())),
    };
    let millis = start.elapsed().as_millis();
    match result {
        Ok(detail) => CriterionResult { id, name, passed: true, detail, millis },
        Err(detail) => CriterionResult { id, name, passed: false, detail, millis },
    }
}

type CResult = Result<String, String>;

fn t(text: &str) -> Term {
    parse(text).unwrap_or_else(|e| panic!("bad builtin expression {text}: {e}"))
}

// ---------------------------------------------------------------- criterion 1

fn criterion_paper_values() -> CResult {
    let mut checked = 0;
    let mut fail = String::new();

    let eh_cases: &[(&str, Option<i64>)] = &[
        ("x + exp(-x)", Some(1)),
        ("exp(x + exp(-x))", Some(1)),
        ("x*log(x)", Some(0)),
        ("log(x)", Some(-1)),
        ("exp(x)", Some(1)),
        ("x", Some(0)),
        ("5", None),
    ];
    for (text, expect) in eh_cases {
        checked += 1;
        let got = eh(&t(text)).map_err(|e| format!("eh({text}): {e}"))?;
        let want = match expect {
            Some(n) => EhValue::exact_int(*n),
            None => EhValue::neg_inf(),
        };
        if got != want {
            let _ = writeln!(fail, "eh({text}) = {got}, expected {want}");
        }
    }

    let level_cases: &[(&str, Option<i64>)] = &[
        ("x + exp(-x)", Some(0)),
        ("exp(x)", Some(1)),
        ("log(x)", Some(-1)),
        ("x^(1/2)", Some(0)),
        ("x^2", Some(0)),
        ("x^(7/3)", Some(0)),
        ("(log(x)/log_3(x))*(1/log(x))", Some(-3)),
        ("exp(log(x)/log_2(x))", Some(0)),
        ("3", None),
    ];
    for (text, expect) in level_cases {
        checked += 1;
        let got = level(&t(text)).map_err(|e| format!("level({text}): {e}"))?;
        let want = match expect {
            Some(n) => Extended::Int(*n),
            None => Extended::NegInf,
        };
        if got != want {
            let _ = writeln!(fail, "level({text}) = {got}, expected {want}");
        }
    }

    let alevel_cases: &[(&str, i64)] = &[
        ("1/x", 1),
        ("1/exp(x)", 2),
        ("pi/4", 0),
        ("x", -1),
        ("x^2", -1),
        ("sqrt(log(x))", 0),
    ];
    for (text, expect) in alevel_cases {
        checked += 1;
        let got = alevel(&t(text)).map_err(|e| format!("alevel({text}): {e}"))?;
        if got != *expect {
            let _ = writeln!(fail, "alevel({text}) = {got}, expected {expect}");
        }
    }

    // dominance from the strict-level-inequality example
    checked += 1;
    match compare(&t("log(x)/log_3(x)"), &t("sqrt(log(x))"))
        .map_err(|e| format!("compare: {e}"))?
    {
        Comparison::Greater => {}
        other => {
            let _ = writeln!(fail, "compare(log/log_3, sqrt(log)) = {other:?}, expected Greater");
        }
    }

    if fail.is_empty() {
        Ok(format!("{checked} paper-anchored values exact"))
    } else {
        Err(fail)
    }
}

// ---------------------------------------------------------------- criterion 2

fn criterion_level_identities(seed: u64) -> CResult {
    let mut rng = gen::rng_from_seed(seed ^ 0xA11CE);
    let trials = 200;
    let mut skipped = 0;
    let mut done = 0;
    for i in 0..trials {
        let f = match gen::random_inf_increasing(&mut rng, 3, 2, 40) {
            Some(f) => f,
            None => return Err(format!("trial {i}: could not draw f in I")),
        };
        let g = match gen::random_inf_increasing(&mut rng, 3, 2, 40) {
            Some(g) => g,
            None => return Err(format!("trial {i}: could not draw g in I")),
        };
        let u = gen::random_unit(&mut rng, 2, 1);
        match level_identity_trial(&f, &g, &u) {
            Ok(true) => done += 1,
            Ok(false) => skipped += 1,
            Err(msg) => return Err(format!("trial {i} (f = {f}, g = {g}, u = {u}): {msg}")),
        }
    }
    let limit = trials / 20; // 5%
    if skipped > limit {
        return Err(format!("{skipped} of {trials} trials undecided (limit {limit})"));
    }
    Ok(format!("{done} trials exact, {skipped} undecided (allowed {limit})"))
}

/// Ok(true) = identities verified, Ok(false) = undecided (skip), Err = violated.
fn level_identity_trial(f: &Term, g: &Term, u: &Term) -> Result<bool, String> {
    let undecided = |e: &Error| {
        matches!(
            e,
            Error::Undecided(_) | Error::DepthExceeded(_) | Error::Unsupported(_)
        )
    };
    macro_rules! lv {
        ($t:expr) => {
            match level($t) {
                Ok(Extended::Int(n)) => n,
                Ok(Extended::NegInf) => return Err(format!("level of {} is -inf", $t)),
                Err(ref e) if undecided(e) => return Ok(false),
                Err(e) => return Err(format!("level({}): {e}", $t)),
            }
        };
    }
    let lf = lv!(f);
    let lg = lv!(g);
    let comp = simplify(&substitute(f, g));
    let lcomp = lv!(&comp);
    if lcomp != lf + lg {
        return Err(format!("level(f o g) = {lcomp}, expected {lf} + {lg}"));
    }
    let prod = simplify(&build::mul2(f.clone(), g.clone()));
    let sum = simplify(&build::add2(f.clone(), g.clone()));
    let lprod = lv!(&prod);
    let lsum = lv!(&sum);
    let mx = lf.max(lg);
    if lprod != mx {
        return Err(format!("level(f*g) = {lprod}, expected max = {mx}"));
    }
    if lsum != mx {
        return Err(format!("level(f+g) = {lsum}, expected max = {mx}"));
    }
    let fu = simplify(&build::mul2(f.clone(), u.clone()));
    let lfu = lv!(&fu);
    if lfu != lf {
        return Err(format!("level(f*u) = {lfu}, expected {lf}"));
    }
    Ok(true)
}

// ---------------------------------------------------------------- criterion 3

fn criterion_eh_shift_laws(seed: u64) -> CResult {
    let mut rng = gen::rng_from_seed(seed ^ 0xE4);
    let trials = 100;
    let mut skipped = 0;
    let mut done = 0;
    for i in 0..trials {
        let (f, n) = match gen::random_exact_eh_term(&mut rng, 3, 2, 60) {
            Some(p) => p,
            None => return Err(format!("trial {i}: could not draw a term with exact eh")),
        };
        match eh_shift_trial(&f, n) {
            Ok(true) => done += 1,
            Ok(false) => skipped += 1,
            Err(msg) => return Err(format!("trial {i} (f = {f}, eh = {n}): {msg}")),
        }
    }
    Ok(format!("{done} trials exact, {skipped} skipped on inexact composite height"))
}

fn eh_shift_trial(f: &Term, n: i64) -> Result<bool, String> {
    let with_exp = simplify(&substitute(f, &Term::exp_raw(Term::x())));
    let with_log = simplify(&substitute(f, &Term::log_raw(Term::x())));
    let up = match eh(&with_exp) {
        Ok(v) => v,
        Err(Error::Undecided(_)) | Err(Error::DepthExceeded(_)) | Err(Error::Unsupported(_)) => {
            return Ok(false)
        }
        Err(e) => return Err(format!("eh(f o exp): {e}")),
    };
    if up != EhValue::exact_int(n + 1) {
        return Err(format!("eh(f o exp) = {up}, expected {}", n + 1));
    }
    let down = match eh(&with_log) {
        Ok(v) => v,
        Err(Error::Undecided(_)) | Err(Error::DepthExceeded(_)) | Err(Error::Unsupported(_)) => {
            return Ok(false)
        }
        Err(e) => return Err(format!("eh(f o log): {e}")),
    };
    if down != EhValue::exact_int(n - 1) {
        return Err(format!("eh(f o log) = {down}, expected {}", n - 1));
    }
    // reciprocal invariance (the germ must be nonzero for 1/f to denote)
    match classify(f) {
        Ok(GermClass::ZeroGerm) | Err(_) => return Ok(true),
        Ok(_) => {}
    }
    let rec = simplify(&build::recip(f.clone()));
    match eh(&rec) {
        Ok(v) if v == EhValue::exact_int(n) => {}
        Ok(v) => return Err(format!("eh(1/f) = {v}, expected {n}")),
        Err(Error::Undecided(_)) | Err(Error::DepthExceeded(_)) => return Ok(false),
        Err(e) => return Err(format!("eh(1/f): {e}")),
    }
    // level <= eh for infinitely increasing germs
    if matches!(classify(f), Ok(GermClass::InfIncreasing)) {
        match level(f) {
            Ok(Extended::Int(l)) => {
                if l > n {
                    return Err(format!("level {l} exceeds eh {n}"));
                }
            }
            Ok(Extended::NegInf) => {}
            Err(Error::Undecided(_)) | Err(Error::DepthExceeded(_)) => return Ok(false),
            Err(e) => return Err(format!("level(f): {e}")),
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------- criterion 4

fn criterion_oracle_equivalence() -> CResult {
    let corpus = oracle::parse_corpus(CORPUS).map_err(|e| format!("corpus: {e}"))?;
    if corpus.len() < 500 {
        return Err(format!("corpus has {} terms, expected at least 500", corpus.len()));
    }
    let grid = oracle::default_grid();
    let mut limit_checked = 0;
    let mut level_checked = 0;
    let mut cmp_checked = 0;
    let mut skipped = 0;
    let mut prev_positive: Option<Term> = None;
    for (lineno, term) in &corpus {
        // limits
        match (numeric_limit(term, &grid, 256), limit(term)) {
            (Ok(est), Ok(engine)) if est.confidence == Confidence::Confirmed => {
                if let Some(msg) = limit_mismatch(&est.value, &engine) {
                    return Err(format!("line {lineno} ({term}): limit {msg}"));
                }
                limit_checked += 1;
            }
            _ => skipped += 1,
        }
        // levels, on germs the engine can sign
        let cls = classify(term);
        if let Ok(c) = &cls {
            let positive_version = match c {
                GermClass::InfIncreasing | GermClass::FinitePositive | GermClass::SmallPositive => {
                    Some(simplify(term))
                }
                GermClass::InfDecreasing | GermClass::FiniteNegative | GermClass::SmallNegative => {
                    Some(simplify(&build::neg(term.clone())))
                }
                GermClass::ZeroGerm => None,
            };
            if let Some(p) = positive_version {
                match (numeric_level(&p, 2, 4, 256), level(&p)) {
                    (Ok(est), Ok(Extended::Int(n))) if est.confidence == Confidence::Confirmed => {
                        if est.value != OracleValue::Level(n) {
                            return Err(format!(
                                "line {lineno} ({term}): oracle level {:?} vs engine {n}",
                                est.value
                            ));
                        }
                        level_checked += 1;
                    }
                    _ => skipped += 1,
                }
                // dominance against the previous positive corpus term
                if let Some(prev) = &prev_positive {
                    match (numeric_compare(&p, prev, &grid, 256), compare(&p, prev)) {
                        (Ok(est), Ok(engine)) if est.confidence == Confidence::Confirmed => {
                            if let Some(msg) = compare_mismatch(&est.value, &engine) {
                                return Err(format!(
                                    "line {lineno} ({p} vs {prev}): compare {msg}"
                                ));
                            }
                            cmp_checked += 1;
                        }
                        _ => skipped += 1,
                    }
                }
                prev_positive = Some(p);
            }
        }
    }
    Ok(format!(
        "{} terms: {limit_checked} limits, {level_checked} levels, {cmp_checked} comparisons confirmed and matching; {skipped} weak/undecided checks skipped",
        corpus.len()
    ))
}

fn limit_mismatch(oracle: &OracleValue, engine: &LimitValue) -> Option<String> {
    match (oracle, engine) {
        (OracleValue::PlusInfinity, LimitValue::PlusInfinity) => None,
        (OracleValue::MinusInfinity, LimitValue::MinusInfinity) => None,
        (OracleValue::Zero, LimitValue::Zero) => None,
        (OracleValue::Finite(v), LimitValue::FiniteNonzero { enclosure, .. }) => {
            let mid = 0.5 * (enclosure.0 + enclosure.1);
            if (v - mid).abs() <= 1e-3 * v.abs().max(mid.abs()).max(1.0) {
                None
            } else {
                Some(format!("oracle {v} vs engine {mid}"))
            }
        }
        // a confirmed tiny finite value against an engine zero is treated as
        // agreement at desk scale
        (OracleValue::Finite(v), LimitValue::Zero) if v.abs() < 1e-6 => None,
        (o, e) => Some(format!("oracle {o:?} vs engine {e:?}")),
    }
}

fn compare_mismatch(oracle: &OracleValue, engine: &Comparison) -> Option<String> {
    match (oracle, engine) {
        (OracleValue::Less, Comparison::Less) => None,
        (OracleValue::Greater, Comparison::Greater) => None,
        (OracleValue::Comparable(v), Comparison::Comparable(lv)) => match lv {
            LimitValue::FiniteNonzero { enclosure, .. } => {
                let mid = 0.5 * (enclosure.0 + enclosure.1);
                if (v - mid).abs() <= 1e-3 * v.abs().max(mid.abs()).max(1.0) {
                    None
                } else {
                    Some(format!("ratio {v} vs engine {mid}"))
                }
            }
            _ => Some(format!("oracle comparable {v} vs engine {lv:?}")),
        },
        (o, e) => Some(format!("oracle {o:?} vs engine {e:?}")),
    }
}

// ---------------------------------------------------------------- criterion 5

fn criterion_inverse_bound() -> CResult {
    // (f, hand-coded inverse)
    let inverses: &[(&str, &str)] = &[
        ("x^2", "x^(1/2)"),
        ("x^3", "x^(1/3)"),
        ("exp(x)", "log(x)"),
        ("2*x", "x/2"),
        ("5*x", "x/5"),
    ];
    let gs: &[&str] = &["x", "x^2", "log(x)", "exp(x)", "x*log(x)"];
    let mut pairs = 0;
    for (ftext, finv_text) in inverses {
        let f = t(ftext);
        let finv = t(finv_text);
        // sanity: f o f^{-1} = x as germs (zero difference after rewriting)
        let comp = simplify(&substitute(&f, &finv));
        let residual = simplify(&build::sub(comp, Term::x()));
        if !residual.is_zero_const() {
            return Err(format!("{ftext} o {finv_text} does not rewrite to x"));
        }
        let eh_f = exact_eh(&f).map_err(|e| format!("eh({ftext}): {e}"))?;
        let level_f = exact_level(&f).map_err(|e| format!("level({ftext}): {e}"))?;
        let level_finv = exact_level(&finv).map_err(|e| format!("level({finv_text}): {e}"))?;
        if level_finv != inverse_level(level_f) {
            return Err(format!(
                "level({finv_text}) = {level_finv}, expected -level({ftext}) = {}",
                inverse_level(level_f)
            ));
        }
        for gtext in gs {
            let g = t(gtext);
            let eh_g = exact_eh(&g).map_err(|e| format!("eh({gtext}): {e}"))?;
            let composed = simplify(&substitute(&g, &finv));
            let eh_comp = exact_eh(&composed)
                .map_err(|e| format!("eh({gtext} o {finv_text}): {e}"))?;
            let bound = inverse_eh_bound(eh_g, eh_f, level_f);
            if eh_comp > bound {
                return Err(format!(
                    "eh({gtext} o {finv_text}) = {eh_comp} exceeds bound {bound}"
                ));
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} curated pairs within the height bound, inverse levels exact"))
}

fn exact_eh(f: &Term) -> Result<i64, Error> {
    match eh(f)? {
        EhValue::Exact(Extended::Int(n)) => Ok(n),
        other => Err(Error::Undecided(format!("eh is {other}, not an exact integer"))),
    }
}

fn exact_level(f: &Term) -> Result<i64, Error> {
    match level(f)? {
        Extended::Int(n) => Ok(n),
        Extended::NegInf => Err(Error::Undecided("level is -inf".into())),
    }
}

// ---------------------------------------------------------------- criterion 6

fn criterion_expansiveness(seed: u64) -> CResult {
    let mut params = CheckParams::default();
    params.shrink = 0.02;
    params.n_radial = 16;
    params.n_angular = 10;
    params.radial_span = 6.0;
    // S_L(pi/2) n H_L(1)
    let region = DomainSpec::new(t("pi/2"), 1.0);
    let r = check_expansive(&t("exp(x)"), &region, &params, 10_000, seed ^ 0x5EED)
        .map_err(|e| format!("check_expansive(exp): {e}"))?;
    let a = r.statistic.unwrap_or(0.0);
    if !r.passed() || a < 0.05 {
        return Err(format!("measured expansion constant {a:.4} below 0.05 ({})", r.detail));
    }
    let r2 = check_expansive(&t("x^2"), &region, &params, 4_000, seed ^ 0x5EED)
        .map_err(|e| format!("check_expansive(x^2): {e}"))?;
    let a2 = r2.statistic.unwrap_or(0.0);
    if (a2 - 2.0).abs() > 1e-10 {
        return Err(format!("p_2 expansion constant {a2} differs from 2 beyond 1e-10"));
    }
    Ok(format!("exp: a = {a:.4} >= 0.05 on 10^4 pairs; p_2: a = {a2:.12}"))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_angle_positivity() -> CResult {
    let mut params = CheckParams::default();
    params.n_radial = 12;
    params.n_angular = 10;
    params.radial_span = 5.0;
    let spec = DomainSpec::new(t("pi/2 - 1/10"), 100.0);
    for ftext in ["x^2", "x^(3/2)", "x*log(x)", "exp(x)"] {
        let r = check_angle_positive(&t(ftext), &spec, &params)
            .map_err(|e| format!("angle-positive({ftext}): {e}"))?;
        if !r.passed() {
            return Err(format!("angle positivity failed for {ftext}: {}", r.detail));
        }
    }
    // the sub-quadratic case: arg distortion below 2 and image off the cut
    let f = t("x^(3/2)");
    let samples = crate::lchart::sample_domain(&spec, 12, 10, params.shrink, &params)
        .map_err(|e| format!("sampling: {e}"))?;
    for s in &samples {
        let v = crate::lchart::eval_along_path(
            &f,
            &[crate::lchart::LPoint::on_axis(s.logmod), *s],
            params.precision_bits,
        )
        .map_err(|e| format!("eval x^(3/2): {e}"))?;
        let y = v.last().unwrap();
        if s.arg != 0.0 && y.arg.abs() >= 2.0 * s.arg.abs() {
            return Err(format!(
                "x^(3/2): |arg f(z)| = {:.4} not below 2|arg z| = {:.4}",
                y.arg.abs(),
                2.0 * s.arg.abs()
            ));
        }
        if y.arg.abs() >= std::f64::consts::PI {
            return Err(format!(
                "x^(3/2): image argument {:.4} reaches the negative real axis",
                y.arg
            ));
        }
    }
    Ok("sign(arg f) = sign(arg x) for all four germs; x^(3/2) image avoids the cut".into())
}

// ---------------------------------------------------------------- criterion 8

fn criterion_units(seed: u64) -> CResult {
    let mut params = CheckParams::default();
    params.n_radial = 16;
    params.n_angular = 6;
    params.radial_span = 8.0;
    let spec = DomainSpec::new(t("pi/4"), 10.0);
    for utext in ["1 + 1/x", "(1 + 1/x)/(1 + 2/x)"] {
        let u = t(utext);
        let r = check_unit_at_infinity(&u, &spec, &params)
            .map_err(|e| format!("unit({utext}): {e}"))?;
        if !r.passed() {
            return Err(format!("unit-at-infinity failed for {utext}: {}", r.detail));
        }
        let r = check_dlipschitz(&u, &spec, &params, 4_000, seed ^ 0xD11)
            .map_err(|e| format!("dlipschitz({utext}): {e}"))?;
        if !r.passed() || !r.detail.contains("level-0 fit: true") {
            return Err(format!(
                "D-Lipschitz level-0 normalization failed for {utext}: {}",
                r.detail
            ));
        }
    }
    let spec2 = DomainSpec::new(t("pi/4"), 100.0);
    let r = check_arg_distortion(&t("x^2"), &t("1 + 1/x"), &spec2, &params)
        .map_err(|e| format!("arg-distortion: {e}"))?;
    if !r.passed() {
        return Err(format!("argument distortion failed: {}", r.detail));
    }
    Ok("units pass decay, level-0 D-Lipschitz and the 1/2..3/2 distortion bounds".into())
}

// ---------------------------------------------------------------- criterion 9

fn criterion_half_bounded() -> CResult {
    let mut params = CheckParams::default();
    params.arg_cap = Some(4.0 * std::f64::consts::PI);
    params.n_radial = 12;
    params.n_angular = 8;
    params.radial_span = 6.0;
    let spec = DomainSpec::new(t("x"), 100.0);
    let germs = [
        "x",
        "x*log(x)",
        "x^(1/2)",
        "log(x)",
        "1/log(x)",
        "x/log(x)^2",
        "x + 1/x",
        "x/(x + 1)",
        "x^2",
        "sqrt(x)*log(x)",
    ];
    for gtext in germs {
        let g = t(gtext);
        match eh(&g) {
            Ok(v) if v.upper() <= Extended::Int(0) => {}
            Ok(v) => return Err(format!("{gtext} has eh {v}, not <= 0")),
            Err(e) => return Err(format!("eh({gtext}): {e}")),
        }
        let r = check_half_bounded(&g, &spec, &params)
            .map_err(|e| format!("half-bounded({gtext}): {e}"))?;
        if !r.passed() {
            return Err(format!("half-boundedness failed for {gtext}: {}", r.detail));
        }
    }
    Ok(format!("{} germs with eh <= 0 half-bounded on the capped (-1)-domain", germs.len()))
}

// --------------------------------------------------------------- criterion 10

fn criterion_domain_calculus(seed: u64) -> CResult {
    let mut rng = gen::rng_from_seed(seed ^ 0xD0);
    let ratios = [q(2, 1), q(3, 1), q(1, 2), q(5, 2), q(1, 3)];
    let mut done = 0;
    let mut draws = 0;
    while done < 100 {
        draws += 1;
        if draws > 2000 {
            return Err(format!("only {done} decidable bound germs in 2000 draws"));
        }
        let h = match gen::random_positive_germ(&mut rng, 2, 1, 20) {
            Some(h) => h,
            None => continue,
        };
        let k = match alevel(&h) {
            Ok(k) => k,
            Err(_) => continue,
        };
        let r = &ratios[done % ratios.len()];
        // alevel(nu_pr(h, r)) = alevel(h)
        let image = nu_pr(&h, r).map_err(|e| format!("nu_pr({h}): {e}"))?;
        match alevel(&image) {
            Ok(k2) if k2 == k => {}
            Ok(k2) => {
                return Err(format!("alevel(nu_pr({h}, {r})) = {k2}, expected {k}"))
            }
            Err(Error::Undecided(_)) | Err(Error::DepthExceeded(_)) => continue,
            Err(e) => return Err(format!("alevel(nu_pr({h})): {e}")),
        }
        // alevel(m_r o h o m_s) = alevel(h)
        let scaled = simplify(&build::scale_q(
            r.clone(),
            substitute(&h, &build::scale_q(q(3, 2), Term::x())),
        ));
        match alevel(&scaled) {
            Ok(k2) if k2 == k => {}
            Ok(k2) => return Err(format!("alevel({r}*h(3x/2)) = {k2}, expected {k} for {h}")),
            Err(Error::Undecided(_)) | Err(Error::DepthExceeded(_)) => continue,
            Err(e) => return Err(format!("alevel(scaled {h}): {e}")),
        }
        // domain_class consistency and the log-image class arithmetic
        let spec = DomainSpec::new(h.clone(), 4.0);
        let dc = domain_class(&spec).map_err(|e| format!("domain_class({h}): {e}"))?;
        if dc.k != k {
            return Err(format!("domain_class({h}) = {}, expected {k}", dc.k));
        }
        let nl = nu_log_class(&h).map_err(|e| format!("nu_log_class({h}): {e}"))?;
        if nl.class != k + 1 {
            return Err(format!("nu_log_class({h}) = {}, expected {}", nl.class, k + 1));
        }
        // nu_pr inverse law: nu_pr(nu_pr(h, r), 1/r) has ratio 1 against h
        let back = nu_pr(&image, &r.recip()).map_err(|e| format!("nu_pr back: {e}"))?;
        match crate::domain::asymptotically_equal(&back, &h) {
            Ok(true) => {}
            Ok(false) => {
                return Err(format!("nu_pr inverse law failed for {h} with r = {r}"))
            }
            Err(Error::Undecided(_)) => continue,
            Err(e) => return Err(format!("inverse law compare: {e}")),
        }
        // translation sandwich preserves the angular level for increasing bounds
        if matches!(classify(&h), Ok(GermClass::InfIncreasing)) {
            let (lo, hi) = match translate_sandwich(&h, &q(1, 1)) {
                Ok(p) => p,
                Err(Error::NotInfinitelyIncreasing) => continue,
                Err(e) => return Err(format!("sandwich({h}): {e}")),
            };
            for side in [lo, hi] {
                match alevel(&side) {
                    Ok(k2) if k2 == k => {}
                    Ok(k2) => {
                        return Err(format!(
                            "sandwich output {side} has alevel {k2}, expected {k}"
                        ))
                    }
                    Err(Error::Undecided(_)) | Err(Error::DepthExceeded(_)) => break,
                    Err(e) => return Err(format!("alevel(sandwich): {e}")),
                }
            }
        }
        done += 1;
    }
    Ok(format!("{done} random bound germs verified ({draws} draws)"))
}

// -------------------------------------------------------- criterion 6 helper

/// Exposes the limit engine for doc examples; thin wrapper kept here so the
/// acceptance module is self-contained for the CLI selftest.
pub fn engine_limit(f: &Term) -> Result<LimitValue, Error> {
    limit(f)
}
