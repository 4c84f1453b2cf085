use std::collections::BTreeMap;
use std::path::PathBuf;

use relgauge_core::data::{
    intervals_from_epochs, parse_discovery, parse_epochs, parse_periods, parse_profile,
    parse_run_log, parse_schedule, parse_weights, summarize_runs, FailureEpochs, Outcome,
};
use relgauge_core::economics::{
    fit_discovery_curve, mttf, optimal_debug_time, residual_errors, DiscoveryParams, EconParams,
};
use relgauge_core::fault_tolerance::{
    expected_executions, optimal_module_time, simulate_dual_execution, DualRunConfig,
};
use relgauge_core::nelson::{
    reliability_n, reliability_product, run_failure_prob, simplified_reliability, RunProfile,
};
use relgauge_core::weibull::MomentForm;
use relgauge_core::{jm, schumann, weibull, Error, ParamInterval};
use serde_json::{json, Value};

use crate::args::{
    Command, EconomicsArgs, FaulttolArgs, FitCommand, MomentFormArg, PredictCommand,
    SimulateCommand,
};
use crate::report::{finish, CliError, CliResult, Inputs};

/// A finished report and where it should go.
pub struct Finished {
    pub report: Value,
    pub output: Option<PathBuf>,
}

pub fn execute(command: Command) -> CliResult<Finished> {
    let mut inputs = Inputs::default();
    let (body, seed, output) = match command {
        Command::Fit(fit) => fit_cmd(fit, &mut inputs)?,
        Command::Economics(args) => economics_cmd(args, &mut inputs)?,
        Command::Faulttol(args) => faulttol_cmd(args)?,
        Command::Simulate(sim) => simulate_cmd(sim, &mut inputs)?,
        Command::Predict(pred) => predict_cmd(pred)?,
    };
    Ok(Finished {
        report: finish(body, &inputs, seed),
        output,
    })
}

type Handled = (Value, Option<u64>, Option<PathBuf>);

fn ci(p: &ParamInterval) -> Value {
    json!([p.lo, p.hi])
}

fn fit_cmd(cmd: FitCommand, inputs: &mut Inputs) -> CliResult<Handled> {
    match cmd {
        FitCommand::Schumann {
            input,
            instructions,
            confidence,
            out,
        } => {
            let periods = parse_periods(&inputs.read("input", &input)?)?;
            let fit = schumann::fit_mle(&periods, instructions)?;
            let fit = schumann::covariance(&fit, &periods, confidence.confidence)?;
            let u = fit.uncertainty.expect("covariance attaches uncertainty");
            let st = fit.stationarity;
            let body = json!({
                "model": "schumann",
                "e0": fit.e0_hat,
                "e0_rounded": fit.e0_hat.round(),
                "c": fit.c_hat,
                "var_e0": u.e0.variance,
                "var_c": u.rate.variance,
                "cov": u.cov,
                "rho": u.rho,
                "ci": { "e0": ci(&u.e0), "c": ci(&u.rate) },
                "confidence": u.level,
                "residuals": {
                    "stationarity_relative": st.relative,
                    "c_from_exposure": st.c_from_exposure,
                    "c_from_counts": st.c_from_counts,
                },
                "k": periods.len(),
                "n_failures": periods.iter().map(|p| p.failures).sum::<u64>(),
                "instructions": instructions,
            });
            Ok((body, None, out.output))
        }
        FitCommand::Jm {
            input,
            confidence,
            out,
        } => {
            let epochs = parse_epochs(&inputs.read("input", &input)?)?;
            let intervals = intervals_from_epochs(&epochs);
            let fit = jm::fit_mle(&intervals)?;
            let fit = jm::covariance(&fit, &intervals, confidence.confidence)?;
            let u = fit.uncertainty.expect("covariance attaches uncertainty");
            let body = json!({
                "model": "jm",
                "e0": fit.e0_hat,
                "e0_rounded": fit.e0_hat.round(),
                "k": fit.k_hat,
                "var_e0": u.e0.variance,
                "var_k": u.rate.variance,
                "cov": u.cov,
                "rho": u.rho,
                "ci": { "e0": ci(&u.e0), "k": ci(&u.rate) },
                "confidence": u.level,
                "residuals": { "likelihood_equation_relative": fit.residual },
                "n_failures": fit.k_obs,
            });
            Ok((body, None, out.output))
        }
        FitCommand::Weibull {
            input,
            moment_form,
            out,
        } => {
            let epochs = parse_epochs(&inputs.read("input", &input)?)?;
            let intervals = intervals_from_epochs(&epochs);
            let form = match moment_form {
                MomentFormArg::Cv => MomentForm::CvCorrected,
                MomentFormArg::Literal => MomentForm::PaperLiteral,
            };
            let fit = weibull::fit_moments(&intervals, form)?;
            let k = intervals.len() as f64;
            let mean = intervals.iter().sum::<f64>() / k;
            let var = intervals
                .iter()
                .map(|t| (t - mean) * (t - mean))
                .sum::<f64>()
                / k;
            let ratio = var / (mean * mean);
            let target = match form {
                MomentForm::CvCorrected => ratio.ln_1p(),
                MomentForm::PaperLiteral => ratio.ln(),
            };
            let mut body = json!({
                "model": "weibull",
                "m": fit.m,
                "lambda": fit.lam,
                "mttf": weibull::mttf(&fit)?,
                "moment_form": match moment_form {
                    MomentFormArg::Cv => "cv",
                    MomentFormArg::Literal => "literal",
                },
                "residuals": { "moment_equation_log": weibull::ln_gamma_ratio(fit.m)? - target },
                "n_failures": intervals.len(),
            });
            if let Some(w) = fit.growth_warning() {
                body["warning"] = json!(w);
            }
            Ok((body, None, out.output))
        }
        FitCommand::Nelson {
            profile,
            simplified,
            weights,
            out,
        } => {
            let rows = parse_profile(&inputs.read("profile", &profile)?)?;
            let mut by_run: BTreeMap<u64, (Vec<f64>, Vec<u8>)> = BTreeMap::new();
            for r in rows {
                let entry = by_run.entry(r.run).or_default();
                entry.0.push(r.p);
                entry.1.push(r.y);
            }
            let mut runs = Vec::with_capacity(by_run.len());
            let mut qs = Vec::with_capacity(by_run.len());
            let mut max_sum_error: f64 = 0.0;
            for (run, (probs, ys)) in by_run {
                max_sum_error = max_sum_error.max((probs.iter().sum::<f64>() - 1.0).abs());
                let p = RunProfile::new(probs, ys)
                    .map_err(|e| Error::Domain(format!("run {run}: {e}")))?;
                let q = run_failure_prob(&p);
                qs.push(q);
                runs.push(json!({ "run": run, "q": q }));
            }
            let r = reliability_n(&qs)?;
            let mut body = json!({
                "model": "nelson",
                "runs": runs,
                "reliability": r.value,
                "certain_failure": r.certain_failure,
                "residuals": { "max_profile_sum_error": max_sum_error },
            });
            if let Some(path) = simplified {
                let log = parse_run_log(&inputs.read("simplified", &path)?)?;
                let w = match weights {
                    Some(wp) => parse_weights(&inputs.read("weights", &wp)?)?,
                    None => vec![1.0; log.len()],
                };
                let error_free: Vec<bool> = log
                    .runs
                    .iter()
                    .map(|r| r.outcome == Outcome::Success)
                    .collect();
                let value = simplified_reliability(&error_free, &w)?;
                let summary = match summarize_runs(&log) {
                    Ok(s) => json!({
                        "exposure": s.exposure,
                        "runs": s.runs,
                        "failures": s.failures,
                        "lambda_hat": s.lambda_hat,
                        "t_hat": s.t_hat,
                    }),
                    Err(Error::NoFailures { exposure }) => json!({
                        "exposure": exposure,
                        "runs": log.len(),
                        "failures": 0,
                        "lambda_hat": 0.0,
                        "t_hat": null,
                    }),
                    Err(e) => return Err(e.into()),
                };
                body["simplified"] = json!({ "reliability": value, "run_summary": summary });
            }
            Ok((body, None, out.output))
        }
    }
}

fn economics_cmd(args: EconomicsArgs, inputs: &mut Inputs) -> CliResult<Handled> {
    let (eps0, tau0, fit) = match &args.fit {
        Some(path) => {
            if args.eps0.is_some() || args.tau0.is_some() {
                return Err(CliError::Usage(
                    "--fit estimates eps0 and tau0; do not pass them too".into(),
                ));
            }
            let obs = parse_discovery(&inputs.read("fit", path)?)?;
            let f = fit_discovery_curve(&obs, args.size)?;
            (
                f.eps0,
                f.tau0,
                Some(json!({ "eps0": f.eps0, "tau0": f.tau0, "sse": f.sse, "points": obs.len() })),
            )
        }
        None => match (args.eps0, args.tau0) {
            (Some(e), Some(t)) => (e, t, None),
            _ => {
                return Err(CliError::Usage(
                    "--eps0 and --tau0 are required without --fit".into(),
                ))
            }
        },
    };
    let p = DiscoveryParams::new(eps0, tau0, args.size, args.tempo)?;
    let e = EconParams::new(args.cost_error, args.cost_test, args.horizon)?;
    let opt = optimal_debug_time(&p, &e);
    let mut body = json!({
        "verb": "economics",
        "tau_m": opt.tau_m,
        "cost_at_tau_m": opt.cost,
        "boundary": opt.boundary,
        "mttf_at_tau_m": mttf(&p, opt.tau_m)?,
        "residual_errors_at_tau_m": residual_errors(&p, opt.tau_m)?,
        "parameters": {
            "eps0": eps0,
            "tau0": tau0,
            "size": args.size,
            "tempo": args.tempo,
            "cost_error": args.cost_error,
            "cost_test": args.cost_test,
            "horizon": args.horizon,
        },
    });
    if let Some(f) = fit {
        body["fit"] = f;
    }
    Ok((body, None, args.out.output))
}

fn faulttol_cmd(args: FaulttolArgs) -> CliResult<Handled> {
    let cfg = DualRunConfig::new(args.total_time, args.overhead, args.failure_rate)?;
    let plan = optimal_module_time(&cfg)?;
    let mut body = json!({
        "verb": "faulttol",
        "t_star": plan.t_star,
        "module_count": plan.module_count,
        "tp_min": plan.tp_min,
        "p1_at_t": plan.p1_at_t,
        "boundary": plan.boundary,
        "parameters": {
            "total_time": args.total_time,
            "overhead": args.overhead,
            "failure_rate": args.failure_rate,
        },
    });
    if let Some(modules) = args.simulate {
        let seed = args
            .seed
            .ok_or_else(|| CliError::Usage("--simulate requires --seed".into()))?;
        let t = args.module_time.unwrap_or(plan.t_star);
        let sim = simulate_dual_execution(&cfg, t, modules, seed)?;
        let p1 = cfg.success_probability(t);
        body["simulation"] = json!({
            "modules": sim.modules,
            "module_time": t,
            "p1": p1,
            "mean_executions": sim.mean_executions,
            "expected_executions": expected_executions(p1)?,
            "histogram": sim.histogram,
            "elapsed": sim.elapsed,
        });
    }
    Ok((body, args.seed, args.out.output))
}

fn epochs_of(intervals: &[f64]) -> CliResult<Vec<f64>> {
    Ok(FailureEpochs::from_intervals(intervals)?
        .as_slice()
        .to_vec())
}

fn simulate_cmd(cmd: SimulateCommand, inputs: &mut Inputs) -> CliResult<Handled> {
    match cmd {
        SimulateCommand::Jm {
            e0,
            k,
            count,
            seed,
            out,
        } => {
            let x = jm::generate_intervals(e0, k, count, seed)?;
            let body = json!({
                "model": "jm",
                "parameters": { "e0": e0, "k": k, "count": count },
                "epochs": epochs_of(&x)?,
                "intervals": x,
            });
            Ok((body, Some(seed), out.output))
        }
        SimulateCommand::Schumann {
            e0,
            c,
            instructions,
            schedule,
            seed,
            out,
        } => {
            let entries = parse_schedule(&inputs.read("schedule", &schedule)?)?;
            let periods = schumann::generate_periods(e0, c, instructions, &entries, seed)?;
            let body = json!({
                "model": "schumann",
                "parameters": { "e0": e0, "c": c, "instructions": instructions },
                "periods": periods,
            });
            Ok((body, Some(seed), out.output))
        }
        SimulateCommand::Weibull {
            m,
            lambda,
            count,
            seed,
            out,
        } => {
            let x = weibull::generate(m, lambda, count, seed)?;
            let body = json!({
                "model": "weibull",
                "parameters": { "m": m, "lambda": lambda, "count": count },
                "epochs": epochs_of(&x)?,
                "intervals": x,
            });
            Ok((body, Some(seed), out.output))
        }
        SimulateCommand::Nelson => Err(CliError::Usage(
            "the nelson model has no generator; supply a profile to `fit nelson`".into(),
        )),
    }
}

fn predict_cmd(cmd: PredictCommand) -> CliResult<Handled> {
    match cmd {
        PredictCommand::Schumann {
            e0,
            c,
            instructions,
            corrected,
            tau0,
            tau,
            time,
            out,
        } => {
            let body = match (tau0, tau) {
                (Some(tau0), Some(tau)) => {
                    let p = schumann::ExpGrowthParams::new(e0, tau0, c, instructions)?;
                    let g = schumann::exp_growth_predict(&p, tau, time)?;
                    json!({
                        "model": "schumann",
                        "eps_b": g.eps_b,
                        "reliability": g.reliability,
                        "mttf": g.mttf,
                        "parameters": { "e0": e0, "c": c, "instructions": instructions, "tau0": tau0, "tau": tau, "time": time },
                    })
                }
                _ => {
                    let p = schumann::SchumannParams::new(e0, c, instructions)?;
                    let eps_b = corrected as f64 / instructions as f64;
                    json!({
                        "model": "schumann",
                        "eps_b": eps_b,
                        "residual_per_instruction": p.residual(eps_b)?,
                        "reliability": schumann::reliability(&p, eps_b, time)?,
                        "mttf": schumann::mttf(&p, eps_b)?,
                        "parameters": { "e0": e0, "c": c, "instructions": instructions, "corrected": corrected, "time": time },
                    })
                }
            };
            Ok((body, None, out.output))
        }
        PredictCommand::Jm {
            e0,
            k,
            index,
            time,
            out,
        } => {
            let rate = jm::intensity(e0, k, index)?;
            let body = json!({
                "model": "jm",
                "intensity": rate,
                "reliability": jm::reliability(e0, k, index, time)?,
                "mttf": 1.0 / rate,
                "parameters": { "e0": e0, "k": k, "index": index, "time": time },
            });
            Ok((body, None, out.output))
        }
        PredictCommand::Weibull {
            m,
            lambda,
            time,
            out,
        } => {
            let fit = weibull::WeibullFit::new(m, lambda)?;
            let mut body = json!({
                "model": "weibull",
                "hazard": weibull::hazard(&fit, time)?,
                "reliability": weibull::reliability(&fit, time)?,
                "mttf": weibull::mttf(&fit)?,
                "parameters": { "m": m, "lambda": lambda, "time": time },
            });
            if let Some(w) = fit.growth_warning() {
                body["warning"] = json!(w);
            }
            Ok((body, None, out.output))
        }
        PredictCommand::Nelson { q, out } => {
            let r = reliability_n(&q)?;
            let body = json!({
                "model": "nelson",
                "reliability": r.value,
                "reliability_product": reliability_product(&q)?,
                "certain_failure": r.certain_failure,
                "runs": q.len(),
            });
            Ok((body, None, out.output))
        }
    }
}
