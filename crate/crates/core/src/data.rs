//! Test-run logs, failure epochs and debugging-period summaries, with the
//! CSV formats they are exchanged in.
//!
//! All times are in caller-chosen units; nothing here converts them.

use std::fmt::Write as _;

use csv::{ReaderBuilder, StringRecord, Trim};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Failure,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Failure => "failure",
        }
    }
}

/// One test run: how long it executed and whether it ended in a failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub duration: f64,
    pub outcome: Outcome,
}

impl RunRecord {
    pub fn new(duration: f64, outcome: Outcome) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(domain(format!(
                "run duration must be finite and > 0, got {duration}"
            )));
        }
        Ok(Self { duration, outcome })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub runs: Vec<RunRecord>,
}

impl RunLog {
    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn failures(&self) -> usize {
        self.runs
            .iter()
            .filter(|r| r.outcome == Outcome::Failure)
            .count()
    }
}

/// Total exposure and failure-rate estimate of a run log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSummary {
    /// Summed duration of every run, successful or not.
    pub exposure: f64,
    pub runs: usize,
    pub failures: usize,
    pub lambda_hat: f64,
    /// Exposure per failure, `1 / lambda_hat`.
    pub t_hat: f64,
}

/// Computes total exposure `H`, `λ = (n - r) / H` and `T = H / (n - r)`.
///
/// Returns [`Error::NoFailures`] carrying `H` when every run succeeded.
pub fn summarize_runs(log: &RunLog) -> Result<RunSummary> {
    if log.is_empty() {
        return Err(domain("run log is empty"));
    }
    let exposure: f64 = log.runs.iter().map(|r| r.duration).sum();
    let failures = log.failures();
    if failures == 0 {
        return Err(Error::NoFailures { exposure });
    }
    Ok(RunSummary {
        exposure,
        runs: log.len(),
        failures,
        lambda_hat: failures as f64 / exposure,
        t_hat: exposure / failures as f64,
    })
}

/// Cumulative execution times at which failures were observed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureEpochs(Vec<f64>);

impl FailureEpochs {
    pub fn new(epochs: Vec<f64>) -> Result<Self> {
        for (i, &t) in epochs.iter().enumerate() {
            if !t.is_finite() {
                return Err(domain(format!("epoch {i} is not finite")));
            }
            let prev = if i == 0 { 0.0 } else { epochs[i - 1] };
            if i == 0 && t <= 0.0 {
                return Err(domain(format!("epochs must be positive, got {t}")));
            }
            if i > 0 && t <= prev {
                return Err(Error::NotMonotone { index: i });
            }
        }
        Ok(Self(epochs))
    }

    /// Rebuilds epochs as the running sum of positive intervals.
    pub fn from_intervals(intervals: &[f64]) -> Result<Self> {
        let mut acc = 0.0;
        let mut epochs = Vec::with_capacity(intervals.len());
        for &x in intervals {
            if !(x.is_finite() && x > 0.0) {
                return Err(domain(format!("intervals must be positive, got {x}")));
            }
            acc += x;
            epochs.push(acc);
        }
        Self::new(epochs)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Differences consecutive epochs: `Δt_1 = t_1`, `Δt_i = t_i - t_{i-1}`.
pub fn intervals_from_epochs(epochs: &FailureEpochs) -> Vec<f64> {
    let mut prev = 0.0;
    epochs
        .as_slice()
        .iter()
        .map(|&t| {
            let dt = t - prev;
            prev = t;
            dt
        })
        .collect()
}

/// Validating variant of [`intervals_from_epochs`] for raw slices.
pub fn intervals_from_raw_epochs(epochs: &[f64]) -> Result<Vec<f64>> {
    Ok(intervals_from_epochs(&FailureEpochs::new(epochs.to_vec())?))
}

/// One debugging observation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DebugPeriod {
    /// Debugging time at the end of the window.
    pub tau: f64,
    /// Cumulative number of corrected errors.
    pub corrected: u64,
    /// Execution time spent on runs during the window.
    pub exposure: f64,
    /// Runs that ended in failure.
    pub failures: u64,
}

impl DebugPeriod {
    pub fn new(tau: f64, corrected: u64, exposure: f64, failures: u64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(domain(format!("tau must be >= 0, got {tau}")));
        }
        if !(exposure.is_finite() && exposure > 0.0) {
            return Err(domain(format!("exposure must be > 0, got {exposure}")));
        }
        Ok(Self {
            tau,
            corrected,
            exposure,
            failures,
        })
    }
}

/// Planned debugging window without an observed failure count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub tau: f64,
    pub corrected: u64,
    pub exposure: f64,
}

/// One row of a discovery curve: cumulative corrected errors at time `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryPoint {
    pub tau: f64,
    pub corrected: f64,
}

/// One input set of a Nelson run profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub run: u64,
    pub p: f64,
    pub y: u8,
}

// ---------------------------------------------------------------------------
// CSV plumbing

struct Rows {
    header: Vec<String>,
    rows: Vec<(usize, StringRecord)>,
}

fn read_rows(text: &str) -> Result<Rows> {
    let mut reader = ReaderBuilder::new()
        .has_headers(true)
        .trim(Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            msg: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect::<Vec<_>>();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let fallback = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row: fallback,
            msg: e.to_string(),
        })?;
        let row = rec.position().map_or(fallback, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        rows.push((row, rec));
    }
    Ok(Rows { header, rows })
}

fn expect_header(rows: &Rows, expected: &[&str]) -> Result<()> {
    if rows
        .header
        .iter()
        .map(String::as_str)
        .eq(expected.iter().copied())
    {
        Ok(())
    } else {
        Err(Error::Parse {
            row: 1,
            msg: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                rows.header.join(",")
            ),
        })
    }
}

fn field(rec: &StringRecord, row: usize, idx: usize, width: usize) -> Result<&str> {
    if rec.len() != width {
        return Err(Error::Parse {
            row,
            msg: format!("expected {width} fields, found {}", rec.len()),
        });
    }
    Ok(rec.get(idx).unwrap_or(""))
}

fn parse_real(s: &str, row: usize, name: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| Error::Parse {
        row,
        msg: format!("{name}: `{s}` is not a decimal number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            msg: format!("{name}: `{s}` is not finite"),
        });
    }
    Ok(v)
}

fn parse_count(s: &str, row: usize, name: &str) -> Result<u64> {
    s.parse().map_err(|_| Error::Parse {
        row,
        msg: format!("{name}: `{s}` is not a non-negative integer"),
    })
}

fn invalid(row: usize, msg: impl Into<String>) -> Error {
    Error::InvalidRow {
        row,
        msg: msg.into(),
    }
}

/// Parses `runs.csv` (`duration,outcome`).
pub fn parse_run_log(text: &str) -> Result<RunLog> {
    let rows = read_rows(text)?;
    expect_header(&rows, &["duration", "outcome"])?;
    let mut runs = Vec::with_capacity(rows.rows.len());
    for (row, rec) in &rows.rows {
        let row = *row;
        let duration = parse_real(field(rec, row, 0, 2)?, row, "duration")?;
        if duration <= 0.0 {
            return Err(invalid(
                row,
                format!("duration must be > 0, got {duration}"),
            ));
        }
        let token = field(rec, row, 1, 2)?;
        let outcome = match token.to_ascii_lowercase().as_str() {
            "success" => Outcome::Success,
            "failure" => Outcome::Failure,
            _ => return Err(invalid(row, format!("unknown outcome `{token}`"))),
        };
        runs.push(RunRecord { duration, outcome });
    }
    Ok(RunLog { runs })
}

pub fn write_run_log(log: &RunLog) -> String {
    let mut out = String::from("duration,outcome\n");
    for r in &log.runs {
        let _ = writeln!(out, "{},{}", r.duration, r.outcome.as_str());
    }
    out
}

/// Parses `failures.csv` (`epoch`).
pub fn parse_epochs(text: &str) -> Result<FailureEpochs> {
    let rows = read_rows(text)?;
    expect_header(&rows, &["epoch"])?;
    let mut epochs: Vec<f64> = Vec::with_capacity(rows.rows.len());
    for (row, rec) in &rows.rows {
        let row = *row;
        let t = parse_real(field(rec, row, 0, 1)?, row, "epoch")?;
        if t <= 0.0 {
            return Err(invalid(row, format!("epoch must be > 0, got {t}")));
        }
        if let Some(&prev) = epochs.last() {
            if t <= prev {
                return Err(Error::NotMonotone {
                    index: epochs.len(),
                });
            }
        }
        epochs.push(t);
    }
    FailureEpochs::new(epochs)
}

pub fn write_epochs(epochs: &FailureEpochs) -> String {
    let mut out = String::from("epoch\n");
    for t in epochs.as_slice() {
        let _ = writeln!(out, "{t}");
    }
    out
}

/// Parses `periods.csv` (`tau,corrected,exposure,failures`).
pub fn parse_periods(text: &str) -> Result<Vec<DebugPeriod>> {
    let rows = read_rows(text)?;
    expect_header(&rows, &["tau", "corrected", "exposure", "failures"])?;
    rows.rows
        .iter()
        .map(|(row, rec)| {
            let row = *row;
            let tau = parse_real(field(rec, row, 0, 4)?, row, "tau")?;
            let corrected = parse_count(field(rec, row, 1, 4)?, row, "corrected")?;
            let exposure = parse_real(field(rec, row, 2, 4)?, row, "exposure")?;
            let failures = parse_count(field(rec, row, 3, 4)?, row, "failures")?;
            DebugPeriod::new(tau, corrected, exposure, failures)
                .map_err(|e| invalid(row, e.to_string()))
        })
        .collect()
}

pub fn write_periods(periods: &[DebugPeriod]) -> String {
    let mut out = String::from("tau,corrected,exposure,failures\n");
    for p in periods {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.tau, p.corrected, p.exposure, p.failures
        );
    }
    out
}

/// Parses a debugging schedule (`tau,corrected,exposure`).
pub fn parse_schedule(text: &str) -> Result<Vec<ScheduleEntry>> {
    let rows = read_rows(text)?;
    expect_header(&rows, &["tau", "corrected", "exposure"])?;
    rows.rows
        .iter()
        .map(|(row, rec)| {
            let row = *row;
            let tau = parse_real(field(rec, row, 0, 3)?, row, "tau")?;
            let corrected = parse_count(field(rec, row, 1, 3)?, row, "corrected")?;
            let exposure = parse_real(field(rec, row, 2, 3)?, row, "exposure")?;
            if tau < 0.0 || exposure <= 0.0 {
                return Err(invalid(row, "tau must be >= 0 and exposure > 0"));
            }
            Ok(ScheduleEntry {
                tau,
                corrected,
                exposure,
            })
        })
        .collect()
}

/// Parses `discovery.csv` (`tau,corrected`).
pub fn parse_discovery(text: &str) -> Result<Vec<DiscoveryPoint>> {
    let rows = read_rows(text)?;
    expect_header(&rows, &["tau", "corrected"])?;
    rows.rows
        .iter()
        .map(|(row, rec)| {
            let row = *row;
            let tau = parse_real(field(rec, row, 0, 2)?, row, "tau")?;
            let corrected = parse_real(field(rec, row, 1, 2)?, row, "corrected")?;
            if tau < 0.0 || corrected < 0.0 {
                return Err(invalid(row, "tau and corrected must be >= 0"));
            }
            Ok(DiscoveryPoint { tau, corrected })
        })
        .collect()
}

/// Parses `profile.csv`, either `p,y` (single run, numbered 1) or `run,p,y`.
pub fn parse_profile(text: &str) -> Result<Vec<ProfileRow>> {
    let rows = read_rows(text)?;
    let multi = match rows
        .header
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["p", "y"] => false,
        ["run", "p", "y"] => true,
        _ => {
            return Err(Error::Parse {
                row: 1,
                msg: format!(
                    "expected header `p,y` or `run,p,y`, found `{}`",
                    rows.header.join(",")
                ),
            })
        }
    };
    let width = if multi { 3 } else { 2 };
    let off = usize::from(multi);
    rows.rows
        .iter()
        .map(|(row, rec)| {
            let row = *row;
            let run = if multi {
                parse_count(field(rec, row, 0, width)?, row, "run")?
            } else {
                1
            };
            let p = parse_real(field(rec, row, off, width)?, row, "p")?;
            let y = parse_count(field(rec, row, off + 1, width)?, row, "y")?;
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(row, format!("p must lie in [0, 1], got {p}")));
            }
            if y > 1 {
                return Err(invalid(row, format!("y must be 0 or 1, got {y}")));
            }
            Ok(ProfileRow { run, p, y: y as u8 })
        })
        .collect()
}

/// Parses a weight list (`weight`).
pub fn parse_weights(text: &str) -> Result<Vec<f64>> {
    let rows = read_rows(text)?;
    expect_header(&rows, &["weight"])?;
    rows.rows
        .iter()
        .map(|(row, rec)| {
            let row = *row;
            let w = parse_real(field(rec, row, 0, 1)?, row, "weight")?;
            if w < 0.0 {
                return Err(invalid(row, format!("weight must be >= 0, got {w}")));
            }
            Ok(w)
        })
        .collect()
}
