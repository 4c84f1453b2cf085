//! Exponential error-discovery model and the economics of when to stop
//! debugging.
//!
//! Errors are discovered at rate `f(t) = (ε₀/τ₀)·exp(-t/τ₀)`, so after
//! debugging time `τ` the per-command corrected and residual error contents
//! are `(ε₀/R)(1 - e^{-τ/τ₀})` and `(ε₀/R)e^{-τ/τ₀}`.

use serde::Serialize;

use crate::data::DiscoveryPoint;
use crate::error::{domain, require_non_negative, require_positive, Error, Result};
use crate::numerics::{find_root_bracketed, Bracket};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscoveryParams {
    /// Total errors present before testing.
    pub eps0: f64,
    /// Decay constant of the discovery rate.
    pub tau0: f64,
    /// Program size in commands.
    pub size: u64,
    /// Execution tempo, commands per time unit.
    pub tempo: f64,
}

impl DiscoveryParams {
    pub fn new(eps0: f64, tau0: f64, size: u64, tempo: f64) -> Result<Self> {
        require_positive("eps0", eps0)?;
        require_positive("tau0", tau0)?;
        require_positive("tempo", tempo)?;
        if size == 0 {
            return Err(domain("program size must be >= 1"));
        }
        Ok(Self {
            eps0,
            tau0,
            size,
            tempo,
        })
    }

    /// Initial errors per command, `ε₀ / R`.
    pub fn per_command(&self) -> f64 {
        self.eps0 / self.size as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EconParams {
    /// Loss per in-service failure.
    pub cost_error: f64,
    /// Testing cost per unit of debugging time.
    pub cost_test: f64,
    /// Planned operation time.
    pub horizon: f64,
}

impl EconParams {
    pub fn new(cost_error: f64, cost_test: f64, horizon: f64) -> Result<Self> {
        require_positive("cost_error", cost_error)?;
        require_positive("cost_test", cost_test)?;
        require_positive("horizon", horizon)?;
        Ok(Self {
            cost_error,
            cost_test,
            horizon,
        })
    }
}

pub fn cumulative_corrected(p: &DiscoveryParams, tau: f64) -> Result<f64> {
    require_non_negative("tau", tau)?;
    Ok(p.per_command() * -(-tau / p.tau0).exp_m1())
}

pub fn residual_errors(p: &DiscoveryParams, tau: f64) -> Result<f64> {
    require_non_negative("tau", tau)?;
    Ok(p.per_command() * (-tau / p.tau0).exp())
}

/// Probability of a failure within a window `dt`, `ε(τ)·δ·Δt`.
///
/// The linear form only makes sense while the product stays below 1.
pub fn failure_probability(p: &DiscoveryParams, tau: f64, dt: f64) -> Result<f64> {
    require_non_negative("dt", dt)?;
    let prob = residual_errors(p, tau)? * p.tempo * dt;
    if prob > 1.0 {
        return Err(Error::OutOfRange {
            value: prob,
            msg: "linear failure probability exceeds 1; shorten dt".into(),
        });
    }
    Ok(prob)
}

/// Mean operating time to failure after debugging for `tau`.
pub fn mttf(p: &DiscoveryParams, tau: f64) -> Result<f64> {
    require_non_negative("tau", tau)?;
    Ok(p.size as f64 / (p.eps0 * p.tempo) * (tau / p.tau0).exp())
}

/// Failure losses over the horizon plus testing cost:
/// `C(τ) = C_n·T_p·ε₀·δ/R·e^{-τ/τ₀} + C₀·τ`.
pub fn total_cost(p: &DiscoveryParams, e: &EconParams, tau: f64) -> Result<f64> {
    require_non_negative("tau", tau)?;
    Ok(loss_scale(p, e) * (-tau / p.tau0).exp() + e.cost_test * tau)
}

fn loss_scale(p: &DiscoveryParams, e: &EconParams) -> f64 {
    e.cost_error * e.horizon * p.eps0 * p.tempo / p.size as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DebugOptimum {
    pub tau_m: f64,
    pub cost: f64,
    /// True when the interior stationary point is not positive and the
    /// optimum sits at `τ = 0`.
    pub boundary: bool,
}

/// Debugging time minimizing [`total_cost`].
///
/// `τ_M = τ₀·ln(C_n·T_p·ε₀·δ / (C₀·R·τ₀))` when the argument exceeds 1;
/// otherwise the cost is increasing on `τ >= 0` and `τ_M = 0`.
pub fn optimal_debug_time(p: &DiscoveryParams, e: &EconParams) -> DebugOptimum {
    let arg = loss_scale(p, e) / (e.cost_test * p.tau0);
    let (tau_m, boundary) = if arg > 1.0 {
        (p.tau0 * arg.ln(), false)
    } else {
        (0.0, true)
    };
    let cost = loss_scale(p, e) * (-tau_m / p.tau0).exp() + e.cost_test * tau_m;
    DebugOptimum {
        tau_m,
        cost,
        boundary,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscoveryFit {
    pub eps0: f64,
    pub tau0: f64,
    /// Residual sum of squares on the cumulative count scale.
    pub sse: f64,
}

/// Least-squares fit of `(ε₀, τ₀)` to cumulative corrected-error counts.
///
/// For a fixed `τ₀` the model is linear in `ε₀`, which is profiled out in
/// closed form. The remaining 1-D problem is scanned on a log grid over
/// `[τ_min/100, 100·τ_max]` and polished by root finding on the derivative
/// of the profiled objective.
pub fn fit_discovery_curve(obs: &[DiscoveryPoint], size: u64) -> Result<DiscoveryFit> {
    if size == 0 {
        return Err(domain("program size must be >= 1"));
    }
    if obs.len() < 3 {
        return Err(Error::Underdetermined(format!(
            "need at least 3 points, got {}",
            obs.len()
        )));
    }
    for w in obs.windows(2) {
        if !(w[1].tau > w[0].tau) {
            return Err(domain("observation times must be distinct and increasing"));
        }
        if w[1].corrected < w[0].corrected {
            return Err(domain("cumulative counts must be non-decreasing"));
        }
    }
    if obs.iter().all(|o| o.corrected == obs[0].corrected) {
        return Err(Error::Underdetermined(
            "all counts are equal; no decay information".into(),
        ));
    }
    let tau_min = obs
        .iter()
        .map(|o| o.tau)
        .filter(|&t| t > 0.0)
        .fold(f64::INFINITY, f64::min);
    let tau_max = obs[obs.len() - 1].tau;
    if !tau_min.is_finite() {
        return Err(Error::Underdetermined(
            "no positive observation time".into(),
        ));
    }

    let profile = |tau0: f64| -> (f64, f64) {
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for o in obs {
            let b = -(-o.tau / tau0).exp_m1();
            sxy += b * o.corrected;
            sxx += b * b;
        }
        let eps0 = sxy / sxx;
        let sse = obs
            .iter()
            .map(|o| {
                let r = o.corrected - eps0 * -(-o.tau / tau0).exp_m1();
                r * r
            })
            .sum();
        (eps0, sse)
    };
    // dS/dτ₀ at the profiled ε₀ (envelope theorem)
    let slope = |tau0: f64| -> f64 {
        let (eps0, _) = profile(tau0);
        obs.iter()
            .map(|o| {
                let decay = (-o.tau / tau0).exp();
                let b = -(-o.tau / tau0).exp_m1();
                let db = -decay * o.tau / (tau0 * tau0);
                -2.0 * eps0 * (o.corrected - eps0 * b) * db
            })
            .sum()
    };

    let lo = tau_min / 100.0;
    let hi = tau_max * 100.0;
    const GRID: usize = 400;
    let grid: Vec<f64> = (0..=GRID)
        .map(|i| lo * (hi / lo).powf(i as f64 / GRID as f64))
        .collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| (i, profile(t).1))
        .fold(
            (0, f64::INFINITY),
            |acc, (i, s)| if s < acc.1 { (i, s) } else { acc },
        );
    if best == 0 || best == GRID {
        return Err(Error::NoConvergence(format!(
            "least-squares objective has no interior minimum for tau0 in [{lo}, {hi}]"
        )));
    }

    let (a, b) = (grid[best - 1], grid[best + 1]);
    let tau0 = if slope(a) < 0.0 && slope(b) > 0.0 {
        find_root_bracketed(slope, Bracket::with_tolerance(a, b, 1e-14)?)?
    } else {
        // exact fit on the grid, or a flat valley
        grid[best]
    };
    let (eps0, sse) = profile(tau0);
    Ok(DiscoveryFit { eps0, tau0, sse })
}
