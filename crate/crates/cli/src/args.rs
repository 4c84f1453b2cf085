use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Software reliability estimation with JSON reports.
#[derive(Parser, Debug)]
#[command(name = "relgauge", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate model parameters from observed data.
    #[command(subcommand)]
    Fit(FitCommand),
    /// Optimal debugging time under the exponential discovery curve.
    Economics(EconomicsArgs),
    /// Optimal module length for double execution.
    Faulttol(FaulttolArgs),
    /// Draw synthetic data from a model.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Evaluate reliability measures for given parameters.
    #[command(subcommand)]
    Predict(PredictCommand),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArg {
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ConfidenceArg {
    /// Two-sided confidence level of the Gaussian intervals.
    #[arg(long, default_value_t = relgauge_core::DEFAULT_CI_LEVEL)]
    pub confidence: f64,
}

#[derive(Subcommand, Debug)]
pub enum FitCommand {
    /// Schumann model from debugging periods (tau,corrected,exposure,failures).
    Schumann {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Program size in instructions.
        #[arg(long)]
        instructions: u64,
        #[command(flatten)]
        confidence: ConfidenceArg,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Jelinski-Moranda model from failure epochs (epoch).
    Jm {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[command(flatten)]
        confidence: ConfidenceArg,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Weibull model by the method of moments from failure epochs.
    Weibull {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MomentFormArg::Cv)]
        moment_form: MomentFormArg,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Nelson input-domain reliability from run profiles.
    Nelson {
        /// Input-set probabilities and failure indicators (p,y or run,p,y).
        #[arg(long, value_name = "FILE")]
        profile: PathBuf,
        /// Run log (duration,outcome) for the weighted error-free share.
        #[arg(long, value_name = "FILE")]
        simplified: Option<PathBuf>,
        /// Per-run weights (weight) summing to the run count; defaults to 1 each.
        #[arg(long, value_name = "FILE", requires = "simplified")]
        weights: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArg,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MomentFormArg {
    /// Match the coefficient of variation: G(m) - 1 = s²/t̄².
    Cv,
    /// G(m) = s²/t̄² as written.
    Literal,
}

#[derive(Args, Debug)]
pub struct EconomicsArgs {
    /// Initial error count; estimated from --fit when omitted.
    #[arg(long)]
    pub eps0: Option<f64>,
    /// Discovery decay constant; estimated from --fit when omitted.
    #[arg(long)]
    pub tau0: Option<f64>,
    /// Program size in commands.
    #[arg(long)]
    pub size: u64,
    /// Execution tempo in commands per time unit.
    #[arg(long)]
    pub tempo: f64,
    /// Loss per in-service failure.
    #[arg(long)]
    pub cost_error: f64,
    /// Testing cost per unit of debugging time.
    #[arg(long)]
    pub cost_test: f64,
    /// Planned operation time.
    #[arg(long)]
    pub horizon: f64,
    /// Cumulative corrected-error counts (tau,corrected) to fit eps0 and tau0.
    #[arg(long, value_name = "FILE")]
    pub fit: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Args, Debug)]
pub struct FaulttolArgs {
    /// Single-pass run time of the program.
    #[arg(long)]
    pub total_time: f64,
    /// Compare-and-store overhead per module.
    #[arg(long)]
    pub overhead: f64,
    /// Failure intensity during execution.
    #[arg(long)]
    pub failure_rate: f64,
    /// Number of modules to simulate.
    #[arg(long, requires = "seed")]
    pub simulate: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Module length for the simulation; defaults to the optimum.
    #[arg(long, requires = "simulate")]
    pub module_time: Option<f64>,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Subcommand, Debug)]
pub enum SimulateCommand {
    /// Inter-failure intervals with rates K·(E0 - i + 1).
    Jm {
        #[arg(long)]
        e0: f64,
        #[arg(long)]
        k: f64,
        /// Number of failures to draw.
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Poisson failure counts for a debugging schedule (tau,corrected,exposure).
    Schumann {
        #[arg(long)]
        e0: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        instructions: u64,
        #[arg(long, value_name = "FILE")]
        schedule: PathBuf,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Independent Weibull inter-failure intervals.
    Weibull {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Not available: the input-domain model has no generative process.
    Nelson,
}

#[derive(Subcommand, Debug)]
pub enum PredictCommand {
    /// Reliability over `time` after `corrected` errors have been removed.
    Schumann {
        #[arg(long)]
        e0: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        instructions: u64,
        /// Corrected errors so far (ignored with --tau0).
        #[arg(long, default_value_t = 0)]
        corrected: u64,
        /// Decay constant of an exponential correction curve.
        #[arg(long, requires = "tau")]
        tau0: Option<f64>,
        /// Debugging time at which to predict, with --tau0.
        #[arg(long, requires = "tau0")]
        tau: Option<f64>,
        #[arg(long)]
        time: f64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Intensity and reliability in the `index`-th inter-failure interval.
    Jm {
        #[arg(long)]
        e0: f64,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        index: u32,
        #[arg(long)]
        time: f64,
        #[command(flatten)]
        out: OutputArg,
    },
    Weibull {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        time: f64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Reliability of a sequence of runs with failure probabilities Q_j.
    Nelson {
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<f64>,
        #[command(flatten)]
        out: OutputArg,
    },
}
