//! Command implementations behind the `wecp` binary.
//!
//! Each command returns data or a [`CliError`]; the binary only parses
//! arguments, prints, and maps errors onto exit codes.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{efficiencies, ConcurrenceReport, EfficiencyReport, MetricsError};
use crate::oracle::{check_grid, Analytic, OracleError, OracleSummary};
use crate::protocol::{
    alice_basis, charlie_basis, recurse, run_round_one, Branch, Pattern, ProtocolError,
    WCoefficients,
};

/// Efficiencies above `1 + ETA_WARN_SLACK` are reported with a warning.
pub const ETA_WARN_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::InvalidInput(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        CliError::InvalidInput(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::InvalidInput(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::InvalidInput(e.to_string())
    }
}

/// Resolves command-line coefficients.
///
/// With `beta` given, `(alpha, beta, gamma)` is rescaled to unit norm.
/// Without it, `beta = √(1 − alpha² − gamma²)`.
pub fn coefficients_from_args(
    alpha: f64,
    beta: Option<f64>,
    gamma: f64,
) -> Result<WCoefficients, CliError> {
    let all = [Some(alpha), beta, Some(gamma)];
    if all.iter().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::InvalidInput("coefficients must be finite".into()));
    }
    Ok(match beta {
        Some(b) => WCoefficients::normalized(alpha, b, gamma)?,
        None => WCoefficients::from_alpha_gamma(alpha, gamma)?,
    })
}

/// Formats `x` with 12 significant digits, like C's `%.12g`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= DIGITS {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Serialize, Deserialize, Debug, PartialEq)]
pub struct BranchSummary {
    pub outcome: String,
    pub probability: f64,
    pub posterior: WCoefficients,
    pub posterior_phase_flipped: WCoefficients,
    pub posterior_pattern: Pattern,
    pub is_success: bool,
}

impl From<&Branch> for BranchSummary {
    fn from(b: &Branch) -> Self {
        let flipped = b.posterior.sign_normalized().0;
        BranchSummary {
            outcome: b.outcome.to_string(),
            probability: b.probability,
            posterior: b.posterior,
            posterior_phase_flipped: flipped,
            posterior_pattern: flipped.pattern(),
            is_success: b.is_success,
        }
    }
}

/// Everything known about one parameter point after a single full round.
#[derive(Clone, Serialize, Deserialize, Debug, PartialEq)]
pub struct Report {
    pub coefficients: WCoefficients,
    pub pattern: Pattern,
    pub alice_basis: [f64; 2],
    pub charlie_basis: [f64; 2],
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub branches: Vec<BranchSummary>,
    pub concurrence_before: ConcurrenceReport,
    pub concurrence_after: [f64; 3],
    pub eta_ab: f64,
    pub eta_ac: f64,
    pub eta_a_bc: f64,
    pub warnings: Vec<String>,
}

fn eta_warnings(e: &EfficiencyReport) -> Vec<String> {
    [
        ("eta_ab", e.eta_ab),
        ("eta_ac", e.eta_ac),
        ("eta_a_bc", e.eta_a_bc),
    ]
    .iter()
    .filter(|(_, v)| *v > 1.0 + ETA_WARN_SLACK)
    .map(|(name, v)| format!("{name} = {v} exceeds 1"))
    .collect()
}

pub fn cmd_report(w: &WCoefficients) -> Result<Report, CliError> {
    let round = run_round_one(w)?;
    let eff = efficiencies(w)?;
    let ab = alice_basis(w)?;
    let cb = charlie_basis(w)?;
    let p = round.probabilities();
    Ok(Report {
        coefficients: *w,
        pattern: w.pattern(),
        alice_basis: [ab.cos_component, ab.sin_component],
        charlie_basis: [cb.cos_component, cb.sin_component],
        p0: p[0],
        p1: p[1],
        p2: p[2],
        p3: p[3],
        branches: round.branches.iter().map(BranchSummary::from).collect(),
        concurrence_before: eff.c_before,
        concurrence_after: [eff.c_after_ab, eff.c_after_ac, eff.c_after_a_bc],
        eta_ab: eff.eta_ab,
        eta_ac: eff.eta_ac,
        eta_a_bc: eff.eta_a_bc,
        warnings: eta_warnings(&eff),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    EtaAb,
    EtaAc,
    EtaABc,
    P0,
    TotalSuccess,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::EtaAb => "eta_ab",
            Quantity::EtaAc => "eta_ac",
            Quantity::EtaABc => "eta_a_bc",
            Quantity::P0 => "p0",
            Quantity::TotalSuccess => "total_success",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A one-dimensional scan over `alpha` at fixed `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub gamma: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub steps: usize,
    pub quantity: Quantity,
    /// Rounds of recursion for `total_success`.
    pub depth: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::InvalidInput(m.into()));
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.alpha_min > 0.0 && self.alpha_min < self.alpha_max) {
            return bad("need 0 < alpha-min < alpha-max");
        }
        if !(self.alpha_max * self.alpha_max + self.gamma * self.gamma < 1.0) {
            return bad("alpha-max² + gamma² must stay below 1 so that beta > 0");
        }
        if self.steps < 2 {
            return bad("steps must be at least 2");
        }
        if self.quantity == Quantity::TotalSuccess && self.depth == 0 {
            return bad("depth must be at least 1 for total_success");
        }
        Ok(())
    }

    /// Grid of `alpha` values, evenly spaced and including both ends.
    pub fn alphas(&self) -> Vec<f64> {
        let span = self.alpha_max - self.alpha_min;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.alpha_max
                } else {
                    self.alpha_min + span * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha_squared: f64,
    pub value: f64,
}

pub fn evaluate(quantity: Quantity, w: &WCoefficients, depth: usize) -> Result<f64, CliError> {
    Ok(match quantity {
        Quantity::EtaAb => efficiencies(w)?.eta_ab,
        Quantity::EtaAc => efficiencies(w)?.eta_ac,
        Quantity::EtaABc => efficiencies(w)?.eta_a_bc,
        Quantity::P0 => run_round_one(w)?.probabilities()[0],
        Quantity::TotalSuccess => recurse(w, depth)?.total_success_probability,
    })
}

pub fn sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    cfg.alphas()
        .into_iter()
        .map(|alpha| {
            let w = WCoefficients::from_alpha_gamma(alpha, cfg.gamma)?;
            Ok(SweepRow {
                alpha_squared: alpha * alpha,
                value: evaluate(cfg.quantity, &w, cfg.depth)?,
            })
        })
        .collect()
}

pub fn render_csv(cfg: &SweepConfig, rows: &[SweepRow]) -> String {
    let mut out = format!("alpha_squared,{}\n", cfg.quantity.as_str());
    for r in rows {
        let _ = writeln!(out, "{},{}", fmt_sig(r.alpha_squared), fmt_sig(r.value));
    }
    out
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct SweepDocument {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

pub fn render_json(cfg: &SweepConfig, rows: &[SweepRow]) -> String {
    let doc = SweepDocument {
        config: *cfg,
        rows: rows.to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

/// Runs the sweep and writes it to `out` (or returns it when `out` is `None`).
pub fn cmd_sweep(
    cfg: &SweepConfig,
    out: Option<&Path>,
    format: Format,
) -> Result<String, CliError> {
    let rows = sweep(cfg)?;
    let text = match format {
        Format::Csv => render_csv(cfg, &rows),
        Format::Json => render_json(cfg, &rows),
    };
    if let Some(path) = out {
        std::fs::write(path, &text)?;
    }
    Ok(text)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthRow {
    pub depth: usize,
    pub success_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurseReport {
    pub coefficients: WCoefficients,
    pub max_depth: usize,
    pub rows: Vec<DepthRow>,
    pub unresolved_failure_mass: f64,
}

pub fn cmd_recurse(w: &WCoefficients, max_depth: usize) -> Result<RecurseReport, CliError> {
    let r = recurse(w, max_depth)?;
    let rows: Vec<DepthRow> = r
        .success_by_depth
        .iter()
        .enumerate()
        .map(|(i, &p)| DepthRow {
            depth: i + 1,
            success_probability: p,
        })
        .collect();
    for pair in rows.windows(2) {
        if pair[1].success_probability < pair[0].success_probability {
            return Err(CliError::Verification(format!(
                "success probability decreased between depth {} and {}",
                pair[0].depth, pair[1].depth
            )));
        }
    }
    if rows.iter().any(|r| r.success_probability > 1.0 + 1e-12) {
        return Err(CliError::Verification(
            "success probability exceeds 1".into(),
        ));
    }
    Ok(RecurseReport {
        coefficients: *w,
        max_depth,
        unresolved_failure_mass: if max_depth == 0 {
            1.0
        } else {
            r.failure_mass()
        },
        rows,
    })
}

pub fn cmd_oracle(grid_steps: usize) -> Result<OracleSummary, CliError> {
    if grid_steps < 2 {
        return Err(CliError::InvalidInput(
            "grid steps must be at least 2".into(),
        ));
    }
    Ok(check_grid(grid_steps, &Analytic)?)
}

/// Exit status for an oracle run: 0 within tolerance, 1 otherwise.
pub fn oracle_exit_code(summary: &OracleSummary) -> u8 {
    if summary.passed() {
        0
    } else {
        1
    }
}
