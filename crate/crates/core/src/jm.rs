//! Jelinski-Moranda model: after `i - 1` corrections the failure intensity
//! is `K·(E₀ - i + 1)`, constant until the next failure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, require_non_negative, require_positive, Error, Result};
use crate::numerics::{expand_upper, find_root_bracketed, Bracket, Info2x2};
use crate::uncertainty::Uncertainty;

fn residual_count(e0: f64, i: u32) -> Result<f64> {
    if i == 0 {
        return Err(domain("failure index starts at 1"));
    }
    let r = e0 - f64::from(i) + 1.0;
    if r > 0.0 {
        Ok(r)
    } else {
        Err(Error::ResidualNonPositive { residual: r })
    }
}

/// Failure intensity in the `i`-th inter-failure interval.
pub fn intensity(e0: f64, k_jm: f64, i: u32) -> Result<f64> {
    require_positive("k_jm", k_jm)?;
    Ok(k_jm * residual_count(e0, i)?)
}

/// Probability of running `dt` without failure after failure `i - 1`.
pub fn reliability(e0: f64, k_jm: f64, i: u32, dt: f64) -> Result<f64> {
    require_non_negative("dt", dt)?;
    Ok((-intensity(e0, k_jm, i)? * dt).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JmFit {
    pub e0_hat: f64,
    pub k_hat: f64,
    /// Number of observed failures.
    pub k_obs: usize,
    /// Relative residual of the `E₀` likelihood equation at the solution.
    pub residual: f64,
    pub uncertainty: Option<Uncertainty>,
}

struct Sums {
    k: f64,
    /// `Σ x_i`
    a: f64,
    /// `Σ (i - 1) x_i`
    b: f64,
}

fn sums(intervals: &[f64]) -> Result<Sums> {
    let mut a = 0.0;
    let mut b = 0.0;
    for (i, &x) in intervals.iter().enumerate() {
        if !(x.is_finite() && x > 0.0) {
            return Err(domain(format!(
                "interval {} must be finite and > 0, got {x}",
                i + 1
            )));
        }
        a += x;
        b += i as f64 * x;
    }
    Ok(Sums {
        k: intervals.len() as f64,
        a,
        b,
    })
}

/// `Σ 1/(E₀ - i + 1) - k·A/(E₀·A - B)` scaled by the first sum.
fn relative_score(e0: f64, s: &Sums) -> f64 {
    let n = s.k as usize;
    let lhs: f64 = (0..n).map(|i| 1.0 / (e0 - i as f64)).sum();
    let rhs = s.k * s.a / (e0 * s.a - s.b);
    (lhs - rhs) / lhs
}

const MAX_DOUBLINGS: usize = 60;

/// Maximum-likelihood estimate of `(E₀, K)` from inter-failure intervals.
///
/// A finite maximizer exists only when `B/A > (k - 1)/2`, i.e. when later
/// intervals are longer on average than earlier ones.
pub fn fit_mle(intervals: &[f64]) -> Result<JmFit> {
    if intervals.len() < 2 {
        return Err(Error::TooFewIntervals(intervals.len()));
    }
    let s = sums(intervals)?;
    let ratio = s.b / s.a;
    let threshold = (s.k - 1.0) / 2.0;
    if !(ratio > threshold) {
        return Err(Error::NoGrowthEvidence { ratio, threshold });
    }

    let score = |e0: f64| relative_score(e0, &s);
    let floor = s.k - 1.0;
    let lo = floor + 1e-9 * floor.max(1.0);
    let hi = expand_upper(score, lo, 2.0 * s.k, MAX_DOUBLINGS)?
        .ok_or(Error::NoGrowthEvidence { ratio, threshold })?;
    let e0_hat = find_root_bracketed(score, Bracket::with_tolerance(lo, hi, 1e-15)?)?;
    let k_hat = s.k / (e0_hat * s.a - s.b);
    Ok(JmFit {
        e0_hat,
        k_hat,
        k_obs: intervals.len(),
        residual: relative_score(e0_hat, &s).abs(),
        uncertainty: None,
    })
}

/// Observed information of `(E₀, K)`.
pub fn information(e0: f64, k_jm: f64, intervals: &[f64]) -> Result<Info2x2> {
    let s = sums(intervals)?;
    let mut s2 = 0.0;
    for i in 1..=intervals.len() as u32 {
        let r = residual_count(e0, i)?;
        s2 += 1.0 / (r * r);
    }
    Info2x2::new(s2, s.a, s.k / (k_jm * k_jm))
}

/// Attaches asymptotic variances, correlation and Gaussian intervals.
///
/// Equivalent to `DÊ₀ = k/(k·S₂ - A²K²)`, `DK̂ = S₂K²/(k·S₂ - A²K²)` and
/// `ρ = A·K/sqrt(k·S₂)` with `S₂ = Σ(E₀ - i + 1)⁻²`.
pub fn covariance(fit: &JmFit, intervals: &[f64], level: f64) -> Result<JmFit> {
    let info = information(fit.e0_hat, fit.k_hat, intervals)?;
    let unc = Uncertainty::from_information(&info, fit.e0_hat, fit.k_hat, level)?;
    Ok(JmFit {
        uncertainty: Some(unc),
        ..fit.clone()
    })
}

/// Draws `count` inter-failure intervals by inverse-CDF sampling of
/// exponentials with rates `K·(E₀ - i + 1)`.
pub fn generate_intervals(e0: f64, k_jm: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    require_positive("e0", e0)?;
    require_positive("k_jm", k_jm)?;
    if count as f64 > e0 {
        return Err(domain(format!(
            "cannot draw {count} failures from E0 = {e0}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=count as u32)
        .map(|i| {
            let rate = intensity(e0, k_jm, i)?;
            // u in (0, 1]
            let u = 1.0 - rng.random::<f64>();
            Ok(-u.ln() / rate)
        })
        .collect()
}
