//! Schumann exponential reliability-growth model.
//!
//! Failure intensity is proportional to the residual error content per
//! instruction: `λ = C·(E₀/I - εB(τ))`, where `εB(τ)` is the corrected-error
//! count after debugging time `τ` divided by the instruction count `I`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::data::{DebugPeriod, ScheduleEntry};
use crate::error::{domain, require_non_negative, require_positive, Error, Result};
use crate::numerics::{expand_upper, find_root_bracketed, Bracket, Info2x2};
use crate::uncertainty::Uncertainty;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchumannParams {
    pub e0: f64,
    pub c: f64,
    pub instructions: u64,
}

impl SchumannParams {
    pub fn new(e0: f64, c: f64, instructions: u64) -> Result<Self> {
        require_positive("e0", e0)?;
        require_positive("c", c)?;
        if instructions == 0 {
            return Err(domain("instruction count must be >= 1"));
        }
        Ok(Self {
            e0,
            c,
            instructions,
        })
    }

    /// Residual errors per instruction given the corrected fraction `eps_b`.
    pub fn residual(&self, eps_b: f64) -> Result<f64> {
        let r = self.e0 / self.instructions as f64 - eps_b;
        if r > 0.0 {
            Ok(r)
        } else {
            Err(Error::ResidualNonPositive { residual: r })
        }
    }
}

/// Probability of failure-free operation for time `t` after the program has
/// had `eps_b` errors per instruction corrected.
pub fn reliability(p: &SchumannParams, eps_b: f64, t: f64) -> Result<f64> {
    require_non_negative("t", t)?;
    Ok((-p.c * p.residual(eps_b)? * t).exp())
}

/// Mean time to failure, `1 / (C·(E₀/I - εB))`.
pub fn mttf(p: &SchumannParams, eps_b: f64) -> Result<f64> {
    Ok(1.0 / (p.c * p.residual(eps_b)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPeriodEstimate {
    pub e0_hat: f64,
    pub c_hat: f64,
    /// Ratio of the per-failure exposure times, `T̂₁ / T̂₂`.
    pub gamma: f64,
}

/// Closed-form estimate from the mean exposure per failure observed at two
/// debugging stages.
pub fn fit_two_period(
    t_hat_1: f64,
    t_hat_2: f64,
    eps_b_1: f64,
    eps_b_2: f64,
    instructions: u64,
) -> Result<TwoPeriodEstimate> {
    require_positive("t_hat_1", t_hat_1)?;
    require_positive("t_hat_2", t_hat_2)?;
    require_non_negative("eps_b_1", eps_b_1)?;
    if !(eps_b_2 > eps_b_1) {
        return Err(domain(
            "the second stage must have more corrected errors than the first",
        ));
    }
    if instructions == 0 {
        return Err(domain("instruction count must be >= 1"));
    }
    let i = instructions as f64;
    let gamma = t_hat_1 / t_hat_2;
    if (gamma - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Err(Error::DegenerateGamma);
    }
    let e0_hat = i * (gamma * eps_b_1 - eps_b_2) / (gamma - 1.0);
    if !(e0_hat > i * eps_b_2) {
        return Err(Error::NegativeEstimate {
            e0: e0_hat,
            corrected: i * eps_b_2,
        });
    }
    let c_hat = 1.0 / (t_hat_1 * (e0_hat / i - eps_b_1));
    Ok(TwoPeriodEstimate {
        e0_hat,
        c_hat,
        gamma,
    })
}

/// [`fit_two_period`] from raw exposure and failure counts, `T̂_j = T_j / n_j`.
pub fn fit_two_period_counts(
    (exposure_1, failures_1): (f64, u64),
    (exposure_2, failures_2): (f64, u64),
    eps_b_1: f64,
    eps_b_2: f64,
    instructions: u64,
) -> Result<TwoPeriodEstimate> {
    if failures_1 == 0 || failures_2 == 0 {
        return Err(domain("both stages need at least one failure"));
    }
    fit_two_period(
        exposure_1 / failures_1 as f64,
        exposure_2 / failures_2 as f64,
        eps_b_1,
        eps_b_2,
        instructions,
    )
}

/// The two expressions for `Ĉ` that coincide at the likelihood maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stationarity {
    /// `Σn_j / Σ(r_j·H_j)`
    pub c_from_exposure: f64,
    /// `Σ(n_j / r_j) / ΣH_j`
    pub c_from_counts: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchumannFit {
    pub e0_hat: f64,
    pub c_hat: f64,
    pub instructions: u64,
    pub periods: usize,
    pub stationarity: Stationarity,
    pub uncertainty: Option<Uncertainty>,
}

impl SchumannFit {
    pub fn params(&self) -> SchumannParams {
        SchumannParams {
            e0: self.e0_hat,
            c: self.c_hat,
            instructions: self.instructions,
        }
    }
}

fn stationarity(periods: &[DebugPeriod], e0: f64, instructions: u64) -> Stationarity {
    let i = instructions as f64;
    let (mut n_sum, mut rh, mut n_over_r, mut h_sum) = (0.0, 0.0, 0.0, 0.0);
    for p in periods {
        let r = (e0 - p.corrected as f64) / i;
        let n = p.failures as f64;
        n_sum += n;
        rh += r * p.exposure;
        n_over_r += n / r;
        h_sum += p.exposure;
    }
    let a = n_sum / rh;
    let b = n_over_r / h_sum;
    Stationarity {
        c_from_exposure: a,
        c_from_counts: b,
        relative: ((a - b) / a).abs(),
    }
}

const MAX_DOUBLINGS: usize = 60;

/// Maximum-likelihood fit over `k >= 2` debugging periods.
///
/// Profiling out `C` leaves one equation in `E₀`, solved by bracketed root
/// finding between the largest corrected count and an upper bound grown
/// by doubling.
pub fn fit_mle(periods: &[DebugPeriod], instructions: u64) -> Result<SchumannFit> {
    if instructions == 0 {
        return Err(domain("instruction count must be >= 1"));
    }
    if periods.len() < 2 {
        return Err(Error::Underdetermined(format!(
            "need at least 2 periods, got {}",
            periods.len()
        )));
    }
    let total_failures: u64 = periods.iter().map(|p| p.failures).sum();
    if total_failures < 2 {
        return Err(Error::Underdetermined(format!(
            "need at least 2 failures in total, got {total_failures}"
        )));
    }
    let c_max = periods.iter().map(|p| p.corrected).max().unwrap_or(0) as f64;
    if periods.iter().all(|p| p.corrected == periods[0].corrected) {
        return Err(Error::Degenerate(
            "all periods have the same corrected count; E0 is unidentifiable".into(),
        ));
    }

    let n_sum = total_failures as f64;
    let h_sum: f64 = periods.iter().map(|p| p.exposure).sum();
    // the score tends to zero from above only if failures thin out as
    // corrections accumulate; otherwise there is no finite maximum
    let ch_sum: f64 = periods
        .iter()
        .map(|p| p.corrected as f64 * p.exposure)
        .sum();
    let nc_sum: f64 = periods
        .iter()
        .map(|p| p.failures as f64 * p.corrected as f64)
        .sum();
    if !(n_sum * ch_sum > nc_sum * h_sum) {
        return Err(Error::NoConvergence(
            "failure rate does not fall as errors are corrected; data show no reliability growth"
                .into(),
        ));
    }
    // zero exactly where the two expressions for C agree
    let score = |e0: f64| -> f64 {
        let (mut n_over_d, mut dh) = (0.0, 0.0);
        for p in periods {
            let d = e0 - p.corrected as f64;
            n_over_d += p.failures as f64 / d;
            dh += d * p.exposure;
        }
        1.0 - n_over_d * dh / (n_sum * h_sum)
    };

    let lo = c_max + 1e-9 * c_max.max(1.0);
    if !(score(lo) < 0.0) {
        return Err(Error::NoConvergence(
            "likelihood is maximized at the corrected-count boundary".into(),
        ));
    }
    let start = 2.0 * c_max.max(1.0);
    let hi = expand_upper(score, lo, start, MAX_DOUBLINGS)?.ok_or_else(|| {
        Error::NoConvergence(format!(
            "no root for E0 after {MAX_DOUBLINGS} doublings; data show no reliability growth"
        ))
    })?;
    let e0_hat = find_root_bracketed(score, Bracket::with_tolerance(lo, hi, 1e-15)?)?;

    let st = stationarity(periods, e0_hat, instructions);
    Ok(SchumannFit {
        e0_hat,
        c_hat: st.c_from_exposure,
        instructions,
        periods: periods.len(),
        stationarity: st,
        uncertainty: None,
    })
}

/// Observed information of `(E₀, C)` over the given periods.
pub fn information(params: &SchumannParams, periods: &[DebugPeriod]) -> Result<Info2x2> {
    let i = params.instructions as f64;
    let (mut n_sum, mut h_sum, mut n_over_r2) = (0.0, 0.0, 0.0);
    for p in periods {
        let r = params.residual(p.corrected as f64 / i)?;
        let n = p.failures as f64;
        n_sum += n;
        h_sum += p.exposure;
        n_over_r2 += n / (r * r);
    }
    Info2x2::new(
        n_over_r2 / (i * i),
        h_sum / i,
        n_sum / (params.c * params.c),
    )
}

/// Attaches asymptotic variances, correlation and Gaussian confidence
/// intervals at `level` to a fit.
pub fn covariance(fit: &SchumannFit, periods: &[DebugPeriod], level: f64) -> Result<SchumannFit> {
    if periods.len() < 2 {
        // one Poisson count only identifies the product C·r
        return Err(Error::SingularInformation { det: 0.0 });
    }
    let info = information(&fit.params(), periods)?;
    let unc = Uncertainty::from_information(&info, fit.e0_hat, fit.c_hat, level)?;
    Ok(SchumannFit {
        uncertainty: Some(unc),
        ..fit.clone()
    })
}

/// Schumann parameters with an exponential correction curve
/// `εB(τ) = (E₀/I)(1 - e^{-τ/τ₀})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpGrowthParams {
    pub e0: f64,
    pub tau0: f64,
    pub c: f64,
    pub instructions: u64,
}

impl ExpGrowthParams {
    pub fn new(e0: f64, tau0: f64, c: f64, instructions: u64) -> Result<Self> {
        require_positive("tau0", tau0)?;
        SchumannParams::new(e0, c, instructions)?;
        Ok(Self {
            e0,
            tau0,
            c,
            instructions,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthPrediction {
    pub eps_b: f64,
    pub reliability: f64,
    pub mttf: f64,
}

pub fn exp_growth_predict(p: &ExpGrowthParams, tau: f64, t: f64) -> Result<GrowthPrediction> {
    require_non_negative("tau", tau)?;
    require_non_negative("t", t)?;
    let per_instr = p.e0 / p.instructions as f64;
    let decay = (-tau / p.tau0).exp();
    Ok(GrowthPrediction {
        eps_b: per_instr * -(-tau / p.tau0).exp_m1(),
        reliability: (-p.c * per_instr * decay * t).exp(),
        mttf: p.instructions as f64 / (p.c * p.e0) * (tau / p.tau0).exp(),
    })
}

/// Draws a failure count for each scheduled period from a Poisson law with
/// mean `C·(E₀ - corrected)/I·H`.
pub fn generate_periods(
    e0: f64,
    c: f64,
    instructions: u64,
    schedule: &[ScheduleEntry],
    seed: u64,
) -> Result<Vec<DebugPeriod>> {
    let params = SchumannParams::new(e0, c, instructions)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prev = 0;
    let mut out = Vec::with_capacity(schedule.len());
    for s in schedule {
        if s.corrected < prev {
            return Err(domain(
                "corrected counts in the schedule must be non-decreasing",
            ));
        }
        prev = s.corrected;
        if s.corrected as f64 > e0 {
            return Err(domain(format!(
                "corrected count {} exceeds E0 = {e0}",
                s.corrected
            )));
        }
        let mean = params.c * (e0 - s.corrected as f64) / instructions as f64 * s.exposure;
        let failures = if mean > 0.0 {
            let poisson = Poisson::new(mean).map_err(|e| domain(e.to_string()))?;
            poisson.sample(&mut rng) as u64
        } else {
            0
        };
        out.push(DebugPeriod::new(s.tau, s.corrected, s.exposure, failures)?);
    }
    Ok(out)
}
