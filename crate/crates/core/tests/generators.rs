//! Seeded generators against their analytic moments, and closed forms
//! against independent numerical oracles.

use relgauge_core::data::ScheduleEntry;
use relgauge_core::fault_tolerance::{
    optimal_module_time, simulate_dual_execution, total_time, DualRunConfig,
};
use relgauge_core::numerics::log_gamma;
use relgauge_core::{jm, schumann, weibull};

#[test]
fn jm_interval_means() {
    let (e0, k, count) = (50.0, 0.004, 40);
    let reps = 100_000;
    let mut sums = vec![0.0; count];
    for seed in 0..reps {
        let x = jm::generate_intervals(e0, k, count, seed).unwrap();
        for (s, v) in sums.iter_mut().zip(&x) {
            *s += v;
        }
    }
    for (i, s) in sums.iter().enumerate() {
        let mean = 1.0 / (k * (e0 - i as f64));
        // exponential: sd equals the mean
        let se = mean / (reps as f64).sqrt();
        let got = s / reps as f64;
        assert!(
            (got - mean).abs() <= 3.0 * se,
            "interval {}: {got} vs {mean}",
            i + 1
        );
    }
}

#[test]
fn schumann_count_means() {
    let (e0, c, instr) = (100.0, 0.125, 1000u64);
    let schedule: Vec<ScheduleEntry> = [40u64, 55, 70, 80, 90]
        .iter()
        .enumerate()
        .map(|(j, &corrected)| ScheduleEntry {
            tau: j as f64 + 1.0,
            corrected,
            exposure: 1000.0,
        })
        .collect();
    let reps = 200;
    let mut sums = vec![0.0; schedule.len()];
    for seed in 0..reps {
        let periods = schumann::generate_periods(e0, c, instr, &schedule, seed).unwrap();
        for (s, p) in sums.iter_mut().zip(&periods) {
            *s += p.failures as f64;
        }
    }
    for (s, e) in sums.iter().zip(&schedule) {
        let mean = c * (e0 - e.corrected as f64) / instr as f64 * e.exposure;
        let se = (mean / reps as f64).sqrt();
        let got = s / reps as f64;
        assert!(
            (got - mean).abs() <= 3.0 * se,
            "corrected {}: {got} vs {mean}",
            e.corrected
        );
    }
}

#[test]
fn weibull_sample_means() {
    let lam = 2.0;
    let n = 100_000;
    for m in [0.5, 1.0, 2.0] {
        let x = weibull::generate(m, lam, n, 11).unwrap();
        let mean = log_gamma(1.0 + 1.0 / m).unwrap().exp() / lam;
        let second = log_gamma(1.0 + 2.0 / m).unwrap().exp() / (lam * lam);
        let se = ((second - mean * mean) / n as f64).sqrt();
        let got = x.iter().sum::<f64>() / n as f64;
        assert!((got - mean).abs() <= 3.0 * se, "m = {m}: {got} vs {mean}");
    }
}

#[test]
fn weibull_generate_then_fit() {
    let x = weibull::generate(0.5, 2.0, 100_000, 7).unwrap();
    let fit = weibull::fit_moments(&x, weibull::MomentForm::CvCorrected).unwrap();
    assert!((fit.m / 0.5 - 1.0).abs() < 0.02, "{fit:?}");
    assert!((fit.lam / 2.0 - 1.0).abs() < 0.02, "{fit:?}");
}

#[test]
fn dual_execution_mean() {
    let cfg = DualRunConfig::new(1000.0, 1.0, 0.01).unwrap();
    let t = 30.0;
    let p1 = cfg.success_probability(t);
    let n = 100_000;
    let sim = simulate_dual_execution(&cfg, t, n, 5).unwrap();
    // trials to the second success: negative binomial
    let var = 2.0 * (1.0 - p1) / (p1 * p1);
    let se = (var / n as f64).sqrt();
    assert!((sim.mean_executions - 2.0 / p1).abs() <= 3.0 * se);
    assert_eq!(sim.histogram.values().sum::<u64>(), n);
    assert_eq!(sim, simulate_dual_execution(&cfg, t, n, 5).unwrap());
}

/// Golden-section search on the objective itself, without the
/// stationarity condition.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-9 * b {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    (a + b) / 2.0
}

#[test]
fn module_time_against_direct_minimization() {
    for (t_total, a, lam) in [(1000.0, 1.0, 0.001), (500.0, 0.2, 0.01), (1e4, 5.0, 1e-4)] {
        let cfg = DualRunConfig::new(t_total, a, lam).unwrap();
        let plan = optimal_module_time(&cfg).unwrap();
        let oracle = golden_min(|t| total_time(&cfg, t).unwrap(), 1e-6, t_total);
        assert!(
            (plan.t_star - oracle).abs() < 1e-4 * oracle,
            "{plan:?} vs {oracle}"
        );
        assert!(plan.t_star < (a / (2.0 * lam)).sqrt());
    }
}
