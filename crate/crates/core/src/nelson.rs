//! Nelson's input-domain model: a run fails with the probability mass its
//! input profile puts on failing input sets.

use serde::Serialize;

use crate::error::{domain, Error, Result};

const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunProfile {
    /// Probability of each input set being used in this run.
    pub probs: Vec<f64>,
    /// 1 where the input set triggers a failure.
    pub indicators: Vec<u8>,
}

impl RunProfile {
    pub fn new(probs: Vec<f64>, indicators: Vec<u8>) -> Result<Self> {
        if probs.len() != indicators.len() {
            return Err(domain(format!(
                "{} probabilities but {} indicators",
                probs.len(),
                indicators.len()
            )));
        }
        if probs.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
            return Err(domain("input-set probabilities must be non-negative"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(domain(format!(
                "input-set probabilities sum to {sum}, expected 1"
            )));
        }
        if indicators.iter().any(|&y| y > 1) {
            return Err(domain("failure indicators must be 0 or 1"));
        }
        Ok(Self { probs, indicators })
    }
}

/// `Q_j = Σ p_ji·y_i`
pub fn run_failure_prob(profile: &RunProfile) -> f64 {
    let q: f64 = profile
        .probs
        .iter()
        .zip(&profile.indicators)
        .map(|(p, &y)| p * f64::from(y))
        .sum();
    q.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunReliability {
    pub value: f64,
    /// Some run fails with certainty, so the product is exactly zero.
    pub certain_failure: bool,
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(domain(format!(
            "failure probability must lie in [0, 1], got {q}"
        )));
    }
    Ok(())
}

/// Probability that `n` runs all succeed, `Π(1 - Q_j)`, accumulated as
/// `exp(Σ ln(1 - Q_j))`.
pub fn reliability_n(qs: &[f64]) -> Result<RunReliability> {
    let mut log_sum = 0.0;
    for &q in qs {
        check_q(q)?;
        if q == 1.0 {
            return Ok(RunReliability {
                value: 0.0,
                certain_failure: true,
            });
        }
        log_sum += (-q).ln_1p();
    }
    Ok(RunReliability {
        value: log_sum.exp(),
        certain_failure: false,
    })
}

/// Direct product `Π(1 - Q_j)`.
pub fn reliability_product(qs: &[f64]) -> Result<f64> {
    qs.iter().try_fold(1.0, |acc, &q| {
        check_q(q)?;
        Ok(acc * (1.0 - q))
    })
}

/// Equivalent per-run failure rate, `-ln(1 - q)/Δt`.
pub fn failure_rate(q: f64, dt: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(domain(format!(
            "failure probability must lie in [0, 1), got {q}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(domain(format!("run time must be > 0, got {dt}")));
    }
    Ok(-(-q).ln_1p() / dt)
}

/// `exp(-Σ λ_j·Δt_j)` from per-run rates and durations.
pub fn reliability_from_rates(rates: &[f64], dts: &[f64]) -> Result<f64> {
    if rates.len() != dts.len() {
        return Err(domain("rates and run times differ in length"));
    }
    let exposure: f64 = rates.iter().zip(dts).map(|(l, dt)| l * dt).sum();
    Ok((-exposure).exp())
}

/// Weighted share of error-free runs, `(1/N)·Σ E_i·W_i` with `ΣW_i = N`.
pub fn simplified_reliability(error_free: &[bool], weights: &[f64]) -> Result<f64> {
    if error_free.len() != weights.len() {
        return Err(domain(format!(
            "{} run indicators but {} weights",
            error_free.len(),
            weights.len()
        )));
    }
    if error_free.is_empty() {
        return Err(domain("at least one run is required"));
    }
    if weights.iter().any(|&w| !(w.is_finite() && w >= 0.0)) {
        return Err(domain("weights must be non-negative"));
    }
    let n = weights.len() as f64;
    let sum: f64 = weights.iter().sum();
    if (sum - n).abs() > SUM_TOL * n.max(1.0) {
        return Err(Error::WeightSumMismatch { sum, expected: n });
    }
    let hit: f64 = error_free
        .iter()
        .zip(weights)
        .filter(|(&e, _)| e)
        .map(|(_, w)| w)
        .sum();
    Ok((hit / n).clamp(0.0, 1.0))
}

/// Input domain split into disjoint subsets, each exercised along one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSpec {
    pub path_probs: Vec<f64>,
    /// Probability that an input from the subset hits an error on its path.
    pub path_error_rates: Vec<f64>,
}

impl PartitionSpec {
    pub fn new(path_probs: Vec<f64>, path_error_rates: Vec<f64>) -> Result<Self> {
        if path_probs.len() != path_error_rates.len() {
            return Err(domain(
                "path probabilities and error rates differ in length",
            ));
        }
        if path_probs.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
            return Err(domain("path probabilities must be non-negative"));
        }
        let sum: f64 = path_probs.iter().sum();
        if sum > 1.0 + SUM_TOL {
            return Err(domain(format!("path probabilities sum to {sum} > 1")));
        }
        if path_error_rates.iter().any(|&e| !(0.0..1.0).contains(&e)) {
            return Err(domain("path error rates must lie in [0, 1)"));
        }
        Ok(Self {
            path_probs,
            path_error_rates,
        })
    }
}

/// Single-run reliability `1 - Σ p_j·ε_j`.
pub fn partitioned_single_run(spec: &PartitionSpec) -> f64 {
    let loss: f64 = spec
        .path_probs
        .iter()
        .zip(&spec.path_error_rates)
        .map(|(p, e)| p * e)
        .sum();
    (1.0 - loss).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_failure_examples() {
        let uniform = vec![0.25; 4];
        assert_eq!(
            run_failure_prob(&RunProfile::new(uniform.clone(), vec![0; 4]).unwrap()),
            0.0
        );
        assert_eq!(
            run_failure_prob(&RunProfile::new(uniform.clone(), vec![1, 0, 0, 0]).unwrap()),
            0.25
        );
        assert_eq!(
            run_failure_prob(&RunProfile::new(uniform, vec![1; 4]).unwrap()),
            1.0
        );
        assert!(RunProfile::new(vec![0.5, 0.4], vec![0, 1]).is_err());
        assert!(RunProfile::new(vec![0.5, 0.5], vec![0, 2]).is_err());
        assert!(RunProfile::new(vec![1.0], vec![0, 1]).is_err());
    }

    #[test]
    fn reliability_examples() {
        assert_eq!(reliability_n(&[0.0, 0.0]).unwrap().value, 1.0);
        assert!((reliability_n(&[0.1, 0.2]).unwrap().value - 0.72).abs() < 1e-15);
        let qs = vec![0.01; 100];
        let r = reliability_n(&qs).unwrap().value;
        assert!((r - reliability_product(&qs).unwrap()).abs() < 1e-13);
        assert!((r - 0.366032).abs() < 1e-6);
        let dead = reliability_n(&[0.1, 1.0]).unwrap();
        assert!(dead.certain_failure);
        assert_eq!(dead.value, 0.0);
        assert!(reliability_n(&[1.2]).is_err());
    }

    #[test]
    fn failure_rate_examples() {
        assert_eq!(failure_rate(0.0, 3.0).unwrap(), 0.0);
        assert!((failure_rate(0.18127, 2.0).unwrap() - 0.1).abs() < 1e-5);
        let q = 0.37;
        assert!((failure_rate(q, 4.0).unwrap() * 4.0 + (1.0f64 - q).ln()).abs() < 1e-12);
        assert!(failure_rate(1.0, 1.0).is_err());
        assert!(failure_rate(0.5, 0.0).is_err());
    }

    #[test]
    fn simplified_examples() {
        assert_eq!(simplified_reliability(&[true; 3], &[1.0; 3]).unwrap(), 1.0);
        assert_eq!(
            simplified_reliability(&[true, true, true, false], &[1.0; 4]).unwrap(),
            0.75
        );
        assert_eq!(
            simplified_reliability(&[true, false], &[1.5, 0.5]).unwrap(),
            0.75
        );
        assert!(matches!(
            simplified_reliability(&[true, false], &[1.0, 0.5]),
            Err(Error::WeightSumMismatch { .. })
        ));
    }

    #[test]
    fn partition_examples() {
        let all_clean = PartitionSpec::new(vec![0.3, 0.7], vec![0.0, 0.0]).unwrap();
        assert_eq!(partitioned_single_run(&all_clean), 1.0);
        let spec = PartitionSpec::new(vec![0.5, 0.5], vec![0.2, 0.0]).unwrap();
        assert!((partitioned_single_run(&spec) - 0.9).abs() < 1e-15);
        let spec = PartitionSpec::new(vec![0.2, 0.5, 0.3], vec![0.4, 0.1, 0.9]).unwrap();
        assert!(partitioned_single_run(&spec) >= 1.0 - 0.9);
        assert!(PartitionSpec::new(vec![0.6, 0.6], vec![0.0, 0.0]).is_err());
        assert!(PartitionSpec::new(vec![0.5], vec![1.0]).is_err());
    }
}
