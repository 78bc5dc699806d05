//! Sampled verification of continuation properties: angle positivity,
//! half-boundedness, expansiveness, D-Lipschitz bounds, image classes,
//! units at infinity, and the argument-distortion bound for products with
//! units.
//!
//! Verdicts are sampled evidence at desk scale, not proofs: every check
//! reports its sample count, a measured statistic, and a witness on
//! failure.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::asymptotics::sign::eval_point_f64;
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::lchart::eval::eval_at_sample;
use crate::lchart::{CheckParams, CheckReport, LPoint, Witness};
use crate::term::{build, Term};

/// Grid over `U_h`: logmod ranges over the radial span above the base
/// radius, and for each radius the arguments are `±t(1-shrink)h(|x|)` for
/// `t = 0, 1/n, ..., 1`.  Every sampled point lies inside the domain.
pub fn sample_domain(
    spec: &DomainSpec,
    n_radial: usize,
    n_angular: usize,
    shrink: f64,
    params: &CheckParams,
) -> Result<Vec<LPoint>> {
    if !(0.0..1.0).contains(&shrink) {
        return Err(Error::Positivity("shrink must lie in (0,1)".into()));
    }
    let base = spec.base_radius.max(2.0);
    let lm0 = base.ln();
    let span = params.radial_span.max(0.5);
    let n_radial = n_radial.max(2);
    let mut out = Vec::new();
    for i in 0..n_radial {
        let logmod = lm0 + span * (i as f64) / ((n_radial - 1) as f64);
        let r = logmod.exp();
        let mut hv = eval_point_f64(&spec.bound, r, params.precision_bits)?;
        if !hv.is_finite() || hv <= 0.0 {
            return Err(Error::Positivity(format!(
                "domain bound is not positive at |x| = {r:.3e}"
            )));
        }
        if let Some(cap) = params.arg_cap {
            hv = hv.min(cap);
        }
        out.push(LPoint::on_axis(logmod));
        for j in 1..=n_angular {
            let a = (1.0 - shrink) * hv * (j as f64) / (n_angular as f64);
            out.push(LPoint::new(logmod, a));
            out.push(LPoint::new(logmod, -a));
        }
    }
    Ok(out)
}

fn eval_samples(
    f: &Term,
    samples: &[LPoint],
    precision: usize,
) -> Result<Vec<(LPoint, LPoint)>> {
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        let v = eval_at_sample(f, s, precision)?;
        out.push((*s, v.to_point()));
    }
    Ok(out)
}

fn sgn_tol(v: f64, tol: f64) -> i8 {
    if v.abs() <= tol {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// Does the argument of `f(x)` carry the sign of the argument of `x` at
/// every sample?
pub fn check_angle_positive(
    f: &Term,
    spec: &DomainSpec,
    params: &CheckParams,
) -> Result<CheckReport> {
    let samples = sample_domain(spec, params.n_radial, params.n_angular, params.shrink, params)?;
    let values = eval_samples(f, &samples, params.precision_bits)?;
    let min_arg = samples
        .iter()
        .map(|p| p.arg.abs())
        .filter(|a| *a > 0.0)
        .fold(f64::INFINITY, f64::min);
    let tol = params.thresholds.angle_sign_rel_tol * min_arg.min(1.0);
    let mut min_pos_image = f64::INFINITY;
    for (x, y) in &values {
        let sx = sgn_tol(x.arg, 0.0);
        let sy = sgn_tol(y.arg, tol);
        if sx != sy {
            return Ok(CheckReport::fail(
                values.len(),
                Witness { point: *x, partner: None, value: Some(*y) },
                Some(y.arg),
                format!(
                    "sign(arg f(x)) = {sy} differs from sign(arg x) = {sx} at logmod {:.3}, arg {:.4}",
                    x.logmod, x.arg
                ),
            ));
        }
        if sx > 0 {
            min_pos_image = min_pos_image.min(y.arg);
        }
    }
    Ok(CheckReport::pass(
        values.len(),
        Some(min_pos_image),
        "argument signs preserved at every sample".into(),
    ))
}

fn band_index(samples_min: f64, samples_max: f64, logmod: f64) -> usize {
    let bands = 4.0;
    let w = ((samples_max - samples_min) / bands).max(1e-9);
    (((logmod - samples_min) / w) as usize).min(3)
}

/// Half-boundedness: the smaller of the band suprema of `|f|` and `1/|f|`
/// must not grow across radial bands.
pub fn check_half_bounded(
    f: &Term,
    spec: &DomainSpec,
    params: &CheckParams,
) -> Result<CheckReport> {
    let samples = sample_domain(spec, params.n_radial, params.n_angular, params.shrink, params)?;
    let values = eval_samples(f, &samples, params.precision_bits)?;
    let lm_min = samples.iter().map(|p| p.logmod).fold(f64::INFINITY, f64::min);
    let lm_max = samples.iter().map(|p| p.logmod).fold(f64::NEG_INFINITY, f64::max);
    // band suprema of log|f| and log(1/|f|)
    let mut sup_log = [f64::NEG_INFINITY; 4];
    let mut sup_neg = [f64::NEG_INFINITY; 4];
    for (x, y) in &values {
        let b = band_index(lm_min, lm_max, x.logmod);
        sup_log[b] = sup_log[b].max(y.logmod);
        sup_neg[b] = sup_neg[b].max(-y.logmod);
    }
    let s: Vec<f64> = (0..4).map(|b| sup_log[b].min(sup_neg[b])).collect();
    let allowance = params.thresholds.band_factor.ln();
    for b in 0..3 {
        if s[b + 1] > s[b] + allowance {
            let witness = values
                .iter()
                .max_by(|a, c| a.1.logmod.abs().total_cmp(&c.1.logmod.abs()))
                .unwrap();
            return Ok(CheckReport::fail(
                values.len(),
                Witness { point: witness.0, partner: None, value: Some(witness.1) },
                Some(s[b + 1]),
                format!(
                    "half-bounded envelope grows: band {b} -> {} (log suprema {:.3} -> {:.3})",
                    b + 1,
                    s[b],
                    s[b + 1]
                ),
            ));
        }
    }
    Ok(CheckReport::pass(
        values.len(),
        Some(*s.last().unwrap()),
        "smaller modulus envelope is non-increasing across bands".into(),
    ))
}

/// Measured expansion constant: the minimum of `d(f(x), f(y))/d(x, y)` over
/// sampled pairs.
pub fn check_expansive(
    f: &Term,
    spec: &DomainSpec,
    params: &CheckParams,
    n_pairs: usize,
    seed: u64,
) -> Result<CheckReport> {
    let samples = sample_domain(spec, params.n_radial, params.n_angular, params.shrink, params)?;
    let values = eval_samples(f, &samples, params.precision_bits)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut witness: Option<(LPoint, LPoint)> = None;
    let mut used = 0;
    for _ in 0..n_pairs {
        let i = rng.gen_range(0..values.len());
        let j = rng.gen_range(0..values.len());
        let (xi, yi) = &values[i];
        let (xj, yj) = &values[j];
        let d = xi.dist(xj);
        if d < 1e-9 {
            continue;
        }
        used += 1;
        let ratio = yi.dist(yj) / d;
        if ratio < min_ratio {
            min_ratio = ratio;
            witness = Some((*xi, *xj));
        }
    }
    if used == 0 {
        return Ok(CheckReport::inconclusive(0, "no usable sample pairs".into()));
    }
    if min_ratio >= params.thresholds.expansive_min {
        Ok(CheckReport::pass(
            used,
            Some(min_ratio),
            format!("min expansion ratio {min_ratio:.6}"),
        ))
    } else {
        let (a, b) = witness.unwrap();
        Ok(CheckReport::fail(
            used,
            Witness { point: a, partner: Some(b), value: None },
            Some(min_ratio),
            format!(
                "expansion ratio {min_ratio:.3e} below threshold {:.1e}",
                params.thresholds.expansive_min
            ),
        ))
    }
}

/// D-Lipschitz test for a unit: fits the contraction rate against the
/// normalizations `1/x` (level 0) and `1/log^2 x`, and passes when some
/// normalized statistic stays bounded band-to-band.  The report records
/// which normalization fits.
pub fn check_dlipschitz(
    u: &Term,
    spec: &DomainSpec,
    params: &CheckParams,
    n_pairs: usize,
    seed: u64,
) -> Result<CheckReport> {
    let mut diagnostics = Vec::new();
    match crate::asymptotics::classify(u) {
        Ok(crate::asymptotics::GermClass::FinitePositive) => {}
        Ok(other) => diagnostics.push(format!(
            "argument is not a unit at +infinity symbolically (class {})",
            other.name()
        )),
        Err(e) => diagnostics.push(format!("unit precondition undecided: {e}")),
    }
    let samples = sample_domain(spec, params.n_radial, params.n_angular, params.shrink, params)?;
    let values = eval_samples(u, &samples, params.precision_bits)?;
    let lm_min = samples.iter().map(|p| p.logmod).fold(f64::INFINITY, f64::min);
    let lm_max = samples.iter().map(|p| p.logmod).fold(f64::NEG_INFINITY, f64::max);
    let mut rng = StdRng::seed_from_u64(seed);
    // log-scale band maxima of ratio * normalization
    let mut level0 = [f64::NEG_INFINITY; 4];
    let mut level_m1 = [f64::NEG_INFINITY; 4];
    let mut used = 0;
    for _ in 0..n_pairs {
        let i = rng.gen_range(0..values.len());
        let j = rng.gen_range(0..values.len());
        if i == j {
            continue;
        }
        let (xi, yi) = &values[i];
        let (xj, yj) = &values[j];
        let d = xi.dist(xj);
        if d < 1e-9 {
            continue;
        }
        used += 1;
        let log_ratio = (yi.dist(yj) / d).max(1e-300).ln();
        let min_lm = xi.logmod.min(xj.logmod);
        let b = band_index(lm_min, lm_max, min_lm);
        // rho = C/x: C = ratio * x ; rho = C/log^2 x: C = ratio * log^2 x
        level0[b] = level0[b].max(log_ratio + min_lm);
        level_m1[b] = level_m1[b].max(log_ratio + 2.0 * min_lm.max(1.0).ln());
        let _ = yj;
    }
    if used < 8 {
        return Ok(CheckReport::inconclusive(used, "too few usable pairs".into()));
    }
    let allowance = params.thresholds.band_factor.ln();
    let bounded = |bands: &[f64; 4]| -> bool {
        (0..3).all(|b| {
            bands[b + 1] == f64::NEG_INFINITY
                || bands[b] == f64::NEG_INFINITY
                || bands[b + 1] <= bands[b] + allowance
        })
    };
    let fit0 = bounded(&level0);
    let fit1 = bounded(&level_m1);
    let stat = level0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut report = if fit0 || fit1 {
        let which = if fit0 { "level 0 (rho ~ C/x)" } else { "level -1 (rho ~ C/log^2 x)" };
        CheckReport::pass(
            used,
            Some(if stat < 700.0 { stat.exp() } else { f64::INFINITY }),
            format!("D-Lipschitz with normalization {which}; level-0 fit: {fit0}"),
        )
    } else {
        CheckReport::fail(
            used,
            Witness { point: samples[0], partner: None, value: None },
            Some(stat),
            "no tried D-normalization keeps the statistic bounded across bands".into(),
        )
    };
    report.diagnostics = diagnostics;
    Ok(report)
}

/// Image-class evidence: every image point satisfies `|arg y| < g2(|y|)`,
/// and some boundary sample in some band exceeds `g1(|y|)`.
pub fn check_image_class(
    f: &Term,
    spec: &DomainSpec,
    targets: (&Term, &Term),
    params: &CheckParams,
) -> Result<CheckReport> {
    let (g1, g2) = targets;
    let samples = sample_domain(spec, params.n_radial, params.n_angular, params.shrink, params)?;
    let values = eval_samples(f, &samples, params.precision_bits)?;
    let boundary_arg: std::collections::HashMap<i64, f64> = samples
        .iter()
        .map(|p| {
            let key = (p.logmod * 1e9) as i64;
            (key, p.arg.abs())
        })
        .fold(std::collections::HashMap::new(), |mut m, (k, a)| {
            let e = m.entry(k).or_insert(0.0);
            if a > *e {
                *e = a;
            }
            m
        });
    let mut lower_witnessed = false;
    for (x, y) in &values {
        let ylm = y.logmod;
        // evaluate bounds at |y|; requires |y| in evaluable range
        let r = if ylm.abs() < 700.0 { ylm.exp() } else { f64::INFINITY };
        if !r.is_finite() {
            continue;
        }
        if r < 2.0 {
            continue;
        }
        let g2v = eval_point_f64(g2, r, params.precision_bits)?;
        if y.arg.abs() >= g2v {
            return Ok(CheckReport::fail(
                values.len(),
                Witness { point: *x, partner: None, value: Some(*y) },
                Some(y.arg.abs()),
                format!(
                    "image argument {:.5} exceeds upper bound {:.5} at |y| = {:.3e}",
                    y.arg.abs(),
                    g2v,
                    r
                ),
            ));
        }
        let key = (x.logmod * 1e9) as i64;
        let is_boundary = boundary_arg
            .get(&key)
            .map_or(false, |m| (x.arg.abs() - m).abs() < 1e-12 && *m > 0.0);
        if is_boundary {
            let g1v = eval_point_f64(g1, r, params.precision_bits)?;
            if y.arg.abs() > g1v {
                lower_witnessed = true;
            }
        }
    }
    if !lower_witnessed {
        return Ok(CheckReport::inconclusive(
            values.len(),
            "no boundary sample exceeded the lower target bound".into(),
        ));
    }
    Ok(CheckReport::pass(
        values.len(),
        None,
        "image arguments inside upper bound; lower inclusion witnessed".into(),
    ))
}

/// Unit at infinity: the band maxima of `d(u(x), 1)` decrease across radial
/// bands, and clearly so overall.
pub fn check_unit_at_infinity(
    u: &Term,
    spec: &DomainSpec,
    params: &CheckParams,
) -> Result<CheckReport> {
    let samples = sample_domain(spec, params.n_radial, params.n_angular, params.shrink, params)?;
    let values = eval_samples(u, &samples, params.precision_bits)?;
    let lm_min = samples.iter().map(|p| p.logmod).fold(f64::INFINITY, f64::min);
    let lm_max = samples.iter().map(|p| p.logmod).fold(f64::NEG_INFINITY, f64::max);
    let mut band_max = [f64::NEG_INFINITY; 4];
    for (x, y) in &values {
        let b = band_index(lm_min, lm_max, x.logmod);
        band_max[b] = band_max[b].max(y.dist_to_one());
    }
    let tol = 1e-9;
    for b in 0..3 {
        if band_max[b + 1] > band_max[b] * (1.0 + tol) {
            let witness = values
                .iter()
                .max_by(|a, c| a.1.dist_to_one().total_cmp(&c.1.dist_to_one()))
                .unwrap();
            return Ok(CheckReport::fail(
                values.len(),
                Witness { point: witness.0, partner: None, value: Some(witness.1) },
                Some(band_max[b + 1]),
                format!(
                    "d(u(x),1) band maxima not decreasing: {:.3e} -> {:.3e}",
                    band_max[b], band_max[b + 1]
                ),
            ));
        }
    }
    if band_max[3] > 0.5 * band_max[0] {
        let witness = values
            .iter()
            .max_by(|a, c| a.1.dist_to_one().total_cmp(&c.1.dist_to_one()))
            .unwrap();
        return Ok(CheckReport::fail(
            values.len(),
            Witness { point: witness.0, partner: None, value: Some(witness.1) },
            Some(band_max[3]),
            format!(
                "d(u(x),1) does not decay: first band {:.3e}, last band {:.3e}",
                band_max[0], band_max[3]
            ),
        ));
    }
    Ok(CheckReport::pass(
        values.len(),
        Some(band_max[3]),
        "distance to 1 decays across radial bands".into(),
    ))
}

/// Argument distortion of multiplication by a unit:
/// `|arg f(x)|/2 <= |arg (f u)(x)| <= 3|arg f(x)|/2` above an
/// auto-selected radius (the first radial band is skipped).
pub fn check_arg_distortion(
    f: &Term,
    u: &Term,
    spec: &DomainSpec,
    params: &CheckParams,
) -> Result<CheckReport> {
    let samples = sample_domain(spec, params.n_radial, params.n_angular, params.shrink, params)?;
    let product = build::mul2(f.clone(), u.clone());
    let fv = eval_samples(f, &samples, params.precision_bits)?;
    let pv = eval_samples(&product, &samples, params.precision_bits)?;
    let lm_min = samples.iter().map(|p| p.logmod).fold(f64::INFINITY, f64::min);
    let lm_max = samples.iter().map(|p| p.logmod).fold(f64::NEG_INFINITY, f64::max);
    let cutoff = lm_min + 0.25 * (lm_max - lm_min);
    let mut checked = 0;
    for ((x, yf), (_, yp)) in fv.iter().zip(pv.iter()) {
        if x.logmod < cutoff {
            continue;
        }
        let af = yf.arg.abs();
        let ap = yp.arg.abs();
        if x.arg == 0.0 {
            continue;
        }
        checked += 1;
        if !(0.5 * af <= ap && ap <= 1.5 * af) {
            return Ok(CheckReport::fail(
                fv.len(),
                Witness { point: *x, partner: None, value: Some(*yp) },
                Some(ap / af.max(1e-300)),
                format!(
                    "arg distortion out of [1/2, 3/2]: |arg f| = {af:.5}, |arg fu| = {ap:.5} at logmod {:.3}",
                    x.logmod
                ),
            ));
        }
    }
    if checked == 0 {
        return Ok(CheckReport::inconclusive(0, "no off-axis samples above the radius".into()));
    }
    Ok(CheckReport::pass(
        checked,
        None,
        "argument distortion within the half/three-halves band".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn spec(bound: &str, radius: f64) -> DomainSpec {
        DomainSpec::new(parse(bound).unwrap(), radius)
    }

    #[test]
    fn sampler_respects_bounds() {
        let params = CheckParams::default();
        let s = spec("pi/2", 2.0);
        let pts = sample_domain(&s, 2, 1, 0.5, &params).unwrap();
        // args 0, +-pi/4
        let args: Vec<f64> = pts.iter().map(|p| p.arg).collect();
        assert!(args.contains(&0.0));
        assert!(args.iter().any(|a| (a - std::f64::consts::FRAC_PI_4).abs() < 1e-12));
        let s2 = spec("1/x", 4.0);
        let pts = sample_domain(&s2, 4, 3, 0.25, &params).unwrap();
        for p in pts {
            assert!(p.arg.abs() < (-p.logmod).exp());
        }
    }

    #[test]
    fn angle_positive_for_squaring() {
        let params = CheckParams::default();
        let r = check_angle_positive(&parse("x^2").unwrap(), &spec("pi/2 - 1/10", 10.0), &params)
            .unwrap();
        assert!(r.passed(), "{:?}", r.detail);
    }

    #[test]
    fn expansive_power_is_exact() {
        let params = CheckParams::default();
        let r =
            check_expansive(&parse("x^2").unwrap(), &spec("pi/2 - 1/10", 5.0), &params, 2000, 7)
                .unwrap();
        assert!(r.passed());
        let a = r.statistic.unwrap();
        assert!((a - 2.0).abs() < 1e-10, "measured {a}");
    }

    #[test]
    fn unit_checks() {
        let params = CheckParams::default();
        let r = check_unit_at_infinity(&parse("1 + 1/x").unwrap(), &spec("pi/4", 5.0), &params)
            .unwrap();
        assert!(r.passed(), "{}", r.detail);
        let r2 =
            check_unit_at_infinity(&parse("2").unwrap(), &spec("pi/4", 5.0), &params).unwrap();
        assert!(!r2.passed());
    }

    #[test]
    fn half_bounded_examples() {
        let params = CheckParams::default();
        for text in ["1/x", "x + 1/x", "exp(x)"] {
            let r = check_half_bounded(&parse(text).unwrap(), &spec("pi/4", 5.0), &params)
                .unwrap();
            assert!(r.passed(), "{text}: {}", r.detail);
        }
    }
}
