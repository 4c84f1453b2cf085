//! Double execution of program modules: each module is re-executed until two
//! executions have succeeded, and the module length trades re-run cost
//! against per-module comparison overhead.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, require_positive, Error, Result};
use crate::numerics::{find_root_bracketed, Bracket};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualRunConfig {
    /// Single-pass run time of the whole program.
    pub total_time: f64,
    /// Compare-and-store overhead per module.
    pub overhead: f64,
    /// Failure intensity during execution.
    pub failure_rate: f64,
    /// Number of intermediate results; carried along, not used.
    pub k_results: Option<u64>,
}

impl DualRunConfig {
    pub fn new(total_time: f64, overhead: f64, failure_rate: f64) -> Result<Self> {
        require_positive("total_time", total_time)?;
        require_positive("overhead", overhead)?;
        require_positive("failure_rate", failure_rate)?;
        Ok(Self {
            total_time,
            overhead,
            failure_rate,
            k_results: None,
        })
    }

    /// Probability that one execution of a module of length `t` succeeds.
    pub fn success_probability(&self, t: f64) -> f64 {
        (-self.failure_rate * t).exp()
    }

    fn check_module_time(&self, t: f64) -> Result<()> {
        if !(t > 0.0 && t <= self.total_time) {
            return Err(domain(format!(
                "module time must lie in (0, {}], got {t}",
                self.total_time
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualRunPlan {
    pub t_star: f64,
    pub module_count: f64,
    pub tp_min: f64,
    pub p1_at_t: f64,
    /// True when the stationary point lies beyond the program length and a
    /// single module is optimal.
    pub boundary: bool,
}

fn check_p1(p1: f64) -> Result<()> {
    if !(p1 > 0.0 && p1 <= 1.0) {
        return Err(domain(format!("p1 must lie in (0, 1], got {p1}")));
    }
    Ok(())
}

/// Probability that a module completes on exactly the `i`-th execution:
/// `(i - 1)·p₁²·q^{i-2}`.
pub fn rerun_probability(p1: f64, i: u32) -> Result<f64> {
    check_p1(p1)?;
    if i < 2 {
        return Err(domain(format!("execution index must be >= 2, got {i}")));
    }
    let q = 1.0 - p1;
    Ok((i - 1) as f64 * p1 * p1 * q.powi(i as i32 - 2))
}

/// Mean number of executions per module, `2 / p₁`.
pub fn expected_executions(p1: f64) -> Result<f64> {
    check_p1(p1)?;
    Ok(2.0 / p1)
}

/// Solution time with modules of length `t`: `T·(2/p₁(t) + a/t)`.
pub fn total_time(cfg: &DualRunConfig, t: f64) -> Result<f64> {
    cfg.check_module_time(t)?;
    Ok(cfg.total_time * (2.0 / cfg.success_probability(t) + cfg.overhead / t))
}

/// Minimizes [`total_time`] over the module length.
///
/// The stationarity condition `2λt²e^{λt} = a` has a single root on
/// `(0, ∞)`; when it lies beyond `T` the optimum is one module, `t* = T`.
pub fn optimal_module_time(cfg: &DualRunConfig) -> Result<DualRunPlan> {
    let lam = cfg.failure_rate;
    let a = cfg.overhead;
    let stationarity = |t: f64| 2.0 * lam * t * t * (lam * t).exp() - a;

    let (t_star, boundary) = if stationarity(cfg.total_time) <= 0.0 {
        (cfg.total_time, true)
    } else {
        // f(0) = -a < 0 and f(T) > 0
        match find_root_bracketed(
            stationarity,
            Bracket::with_tolerance(0.0, cfg.total_time, 1e-14)?,
        ) {
            Ok(t) => (t, false),
            Err(Error::NoSignChange { .. }) => (cfg.total_time, true),
            Err(e) => return Err(e),
        }
    };
    Ok(DualRunPlan {
        t_star,
        module_count: cfg.total_time / t_star,
        tp_min: total_time(cfg, t_star)?,
        p1_at_t: cfg.success_probability(t_star),
        boundary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub modules: u64,
    pub mean_executions: f64,
    /// Execution count at completion -> number of modules.
    pub histogram: BTreeMap<u32, u64>,
    /// Simulated time: executions times module length plus overhead per module.
    pub elapsed: f64,
}

/// Monte Carlo run of the double-execution scheme.
///
/// Every execution independently succeeds with probability `e^{-λt}`; a
/// module completes at the execution that brings its success count to two.
/// A single ChaCha8 stream seeded from `seed` drives all draws.
pub fn simulate_dual_execution(
    cfg: &DualRunConfig,
    t: f64,
    modules: u64,
    seed: u64,
) -> Result<SimulationResult> {
    cfg.check_module_time(t)?;
    if modules == 0 {
        return Err(domain("at least one module is required"));
    }
    simulate_with_probability(cfg.success_probability(t), t, cfg.overhead, modules, seed)
}

/// As [`simulate_dual_execution`], driven directly by a per-execution
/// success probability.
pub fn simulate_with_probability(
    p1: f64,
    t: f64,
    overhead: f64,
    modules: u64,
    seed: u64,
) -> Result<SimulationResult> {
    check_p1(p1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut histogram = BTreeMap::new();
    let mut executions_total: u64 = 0;
    for _ in 0..modules {
        let mut successes = 0;
        let mut executions: u32 = 0;
        while successes < 2 {
            executions += 1;
            if rng.random::<f64>() < p1 {
                successes += 1;
            }
        }
        executions_total += u64::from(executions);
        *histogram.entry(executions).or_insert(0) += 1;
    }
    Ok(SimulationResult {
        modules,
        mean_executions: executions_total as f64 / modules as f64,
        histogram,
        elapsed: executions_total as f64 * t + modules as f64 * overhead,
    })
}
