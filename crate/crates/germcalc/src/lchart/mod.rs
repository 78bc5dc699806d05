//! Numeric evaluation of germ terms on the Riemann surface of the
//! logarithm, in the Log chart, plus the sampled verification suite for
//! continuation properties.
//!
//! A point is stored as `(logmod, arg) = (log|x|, arg x)`; the metric is the
//! Euclidean metric of the chart, `d(x, y) = |Log x - Log y|`.  All node
//! arithmetic happens in the chart: products and powers are linear,
//! exponentials and logarithms are closed-form, and only addition drops to
//! complex coordinates, where the continuous branch is tracked per node.

mod checks;
mod eval;

pub use checks::{
    check_angle_positive, check_arg_distortion, check_dlipschitz, check_expansive,
    check_half_bounded, check_image_class, check_unit_at_infinity, sample_domain,
};
pub use eval::{eval_along_path, LValue, PathEvalState};

use serde::{Deserialize, Serialize};

/// A point of the surface in the Log chart: `logmod = log|x|`, `arg` the
/// unbounded argument.  The projection to the punctured plane is
/// `exp(logmod) * exp(i*arg)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LPoint {
    pub logmod: f64,
    pub arg: f64,
}

impl LPoint {
    pub fn new(logmod: f64, arg: f64) -> LPoint {
        LPoint { logmod, arg }
    }

    pub fn on_axis(logmod: f64) -> LPoint {
        LPoint { logmod, arg: 0.0 }
    }

    /// Chart metric `d(x, y) = |Log x - Log y|`.
    pub fn dist(&self, other: &LPoint) -> f64 {
        let du = self.logmod - other.logmod;
        let dv = self.arg - other.arg;
        (du * du + dv * dv).sqrt()
    }

    /// Distance to the point 1 (the chart origin).
    pub fn dist_to_one(&self) -> f64 {
        (self.logmod * self.logmod + self.arg * self.arg).sqrt()
    }
}

/// Check configuration record; the CLI reads it from JSON via `--params`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckParams {
    /// Width of the sampled radial range, in `log|x|` units.
    pub radial_span: f64,
    pub n_radial: usize,
    pub n_angular: usize,
    /// Boundary shrink factor in (0,1): sampled args stay below
    /// `(1 - shrink) * h(|x|)`.
    pub shrink: f64,
    pub precision_bits: usize,
    pub thresholds: Thresholds,
    /// Optional hard cap on sampled |arg|, for unbounded-angle domains.
    pub arg_cap: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Minimal admissible expansion constant.
    pub expansive_min: f64,
    /// Relative tolerance for "a zero angle maps to a zero angle".
    pub angle_sign_rel_tol: f64,
    /// Allowed band-to-band growth of bounded statistics.
    pub band_factor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { expansive_min: 1e-3, angle_sign_rel_tol: 1e-3, band_factor: 2.0 }
    }
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            radial_span: 8.0,
            n_radial: 24,
            n_angular: 8,
            shrink: 0.2,
            precision_bits: 256,
            thresholds: Thresholds::default(),
            arg_cap: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Outcome of one sampled continuation check.  A failing report always
/// carries a concrete witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub samples: usize,
    /// Extremal sample point (and partner, for pair statistics).
    pub witness: Option<Witness>,
    /// Measured statistic, when the check defines one (minimum expansion
    /// ratio, maximum distance to 1 in the last band, ...).
    pub statistic: Option<f64>,
    pub detail: String,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub point: LPoint,
    pub partner: Option<LPoint>,
    pub value: Option<LPoint>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub(crate) fn pass(samples: usize, statistic: Option<f64>, detail: String) -> CheckReport {
        CheckReport {
            verdict: Verdict::Pass,
            samples,
            witness: None,
            statistic,
            detail,
            diagnostics: Vec::new(),
        }
    }

    pub(crate) fn fail(
        samples: usize,
        witness: Witness,
        statistic: Option<f64>,
        detail: String,
    ) -> CheckReport {
        CheckReport {
            verdict: Verdict::Fail,
            samples,
            witness: Some(witness),
            statistic,
            detail,
            diagnostics: Vec::new(),
        }
    }

    pub(crate) fn inconclusive(samples: usize, detail: String) -> CheckReport {
        CheckReport {
            verdict: Verdict::Inconclusive,
            samples,
            witness: None,
            statistic: None,
            detail,
            diagnostics: Vec::new(),
        }
    }
}
