//! Weibull reliability model with method-of-moments fitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, require_non_negative, require_positive, Error, Result};
use crate::numerics::{find_root_bracketed, log_gamma, Bracket};

pub const SHAPE_MIN: f64 = 0.05;
pub const SHAPE_MAX: f64 = 20.0;

/// Which moment equation determines the shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MomentForm {
    /// `Γ(1+2/m)/Γ²(1+1/m) - 1 = s²/t̄²`: matches the population coefficient
    /// of variation.
    #[default]
    CvCorrected,
    /// `Γ(1+2/m)/Γ²(1+1/m) = s²/t̄²`, taken verbatim.
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeibullFit {
    /// Shape.
    pub m: f64,
    /// Scale, in inverse time units.
    pub lam: f64,
    pub moment_form: MomentForm,
}

impl WeibullFit {
    pub fn new(m: f64, lam: f64) -> Result<Self> {
        require_positive("m", m)?;
        require_positive("lambda", lam)?;
        Ok(Self {
            m,
            lam,
            moment_form: MomentForm::CvCorrected,
        })
    }

    /// True when the hazard is not decreasing, i.e. no reliability growth.
    pub fn growth_warning(&self) -> Option<String> {
        (self.m >= 1.0).then(|| {
            format!(
                "shape m = {} >= 1: hazard does not decrease, data show no reliability growth",
                self.m
            )
        })
    }
}

/// `λ(t) = m·λ^m·t^{m-1}`
pub fn hazard(fit: &WeibullFit, t: f64) -> Result<f64> {
    require_positive("t", t)?;
    Ok(fit.m * fit.lam.powf(fit.m) * t.powf(fit.m - 1.0))
}

/// `R(t) = exp(-(λt)^m)`
pub fn reliability(fit: &WeibullFit, t: f64) -> Result<f64> {
    require_non_negative("t", t)?;
    Ok((-(fit.lam * t).powf(fit.m)).exp())
}

/// `T = Γ(1 + 1/m) / λ`
pub fn mttf(fit: &WeibullFit) -> Result<f64> {
    Ok(log_gamma(1.0 + 1.0 / fit.m)?.exp() / fit.lam)
}

/// `ln G(m)` with `G(m) = Γ(1 + 2/m) / Γ²(1 + 1/m)`.
pub fn ln_gamma_ratio(m: f64) -> Result<f64> {
    require_positive("m", m)?;
    Ok(log_gamma(1.0 + 2.0 / m)? - 2.0 * log_gamma(1.0 + 1.0 / m)?)
}

/// Method-of-moments fit from a sample of inter-failure times.
///
/// Uses the sample mean and the `1/k` central variance, solves the gamma
/// ratio equation for `m` on `[0.05, 20]`, then sets `λ = Γ(1 + 1/m)/t̄`.
pub fn fit_moments(intervals: &[f64], form: MomentForm) -> Result<WeibullFit> {
    if intervals.len() < 2 {
        return Err(Error::TooFewIntervals(intervals.len()));
    }
    if intervals.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(domain("intervals must be finite and > 0"));
    }
    let k = intervals.len() as f64;
    let mean = intervals.iter().sum::<f64>() / k;
    let var = intervals
        .iter()
        .map(|t| (t - mean) * (t - mean))
        .sum::<f64>()
        / k;
    if !(var > 0.0) {
        return Err(Error::DegenerateSample);
    }
    fit_moment_ratio(var / (mean * mean), mean, form)
}

/// Solves the moment equation for a given `s²/t̄²` and mean.
pub fn fit_moment_ratio(ratio: f64, mean: f64, form: MomentForm) -> Result<WeibullFit> {
    require_positive("mean", mean)?;
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::DegenerateSample);
    }
    // G(m) is strictly decreasing, so the target on the ln G scale fixes m
    let target = match form {
        MomentForm::CvCorrected => ratio.ln_1p(),
        MomentForm::PaperLiteral => ratio.ln(),
    };
    let f = |m: f64| ln_gamma_ratio(m).map_or(f64::NAN, |g| g - target);
    let m = find_root_bracketed(f, Bracket::with_tolerance(SHAPE_MIN, SHAPE_MAX, 1e-14)?).map_err(
        |e| match e {
            Error::NoSignChange { .. } => Error::NoConvergence(format!(
                "moment ratio {ratio} has no shape solution in [{SHAPE_MIN}, {SHAPE_MAX}]"
            )),
            other => other,
        },
    )?;
    let lam = log_gamma(1.0 + 1.0 / m)?.exp() / mean;
    Ok(WeibullFit {
        m,
        lam,
        moment_form: form,
    })
}

/// Inverse of the survival function, `(1/λ)(-ln u)^{1/m}`.
pub fn quantile_from_survival(m: f64, lam: f64, u: f64) -> f64 {
    (-u.ln()).powf(1.0 / m) / lam
}

pub fn generate(m: f64, lam: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    require_positive("m", m)?;
    require_positive("lambda", lam)?;
    if n == 0 {
        return Err(domain("sample size must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            // u in (0, 1); u = 1 would give a zero-length interval
            let u = loop {
                let u = 1.0 - rng.random::<f64>();
                if u < 1.0 {
                    break u;
                }
            };
            quantile_from_survival(m, lam, u)
        })
        .collect())
}
