//! Run configuration files.
//!
//! A configuration is a TOML document:
//!
//! ```toml
//! label = "worked example"          # optional
//! equations = ["x1*cos(0.5*x2)", "-x1+0.5*x2^2"]
//! variables = ["x1", "x2"]
//! mode = "pairwise"                   # or "strict_paper"; default pairwise
//! round_decimals = 6                  # default 6
//! repetitions = 50                    # timing repetitions; default 50
//! keep_out_of_domain = false          # default false
//! domain_slack = 1e-9                 # optional uniform slack; default 1e-9*(b-a) per axis
//! jacobian = [["cos(0.5*x2)", "-0.5*x1*sin(0.5*x2)"], ["-1", "x2"]]  # optional analytic entries
//!
//! [[domain]]                          # one table per variable, in order
//! lower = -10
//! upper = 10
//! points = 11                         # required, at least 3
//!
//! [[domain]]
//! lower = -10
//! upper = 10
//! points = 11
//!
//! [newton]                            # all optional
//! residual_tol = 1e-10
//! step_tol = 1e-12
//! max_iterations = 100
//! divergence_bound = 1e12
//! jacobian = "finite_difference"      # or "analytic"
//!
//! [output]                            # optional
//! format = "csv"                      # or "json" (JSON lines)
//! path = "roots.csv"                  # stdout when absent
//!
//! [contours]                          # optional, 2-variable problems only
//! path = "contours/"
//! ```

use std::path::{Path, PathBuf};

use allroots::{DetectionMode, DomainGrid, JacobianMode, NewtonOptions, Problem, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_REPETITIONS: usize = 50;
pub const MAX_ROUND_DECIMALS: u32 = 15;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" | "jsonl" => Ok(OutputFormat::Json),
            other => Err(format!(
                "unknown output format `{other}` (expected `csv` or `json`)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewtonConfig {
    pub residual_tol: f64,
    pub step_tol: f64,
    pub max_iterations: usize,
    pub divergence_bound: f64,
    pub jacobian: String,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        let d = NewtonOptions::default();
        Self {
            residual_tol: d.residual_tol,
            step_tol: d.step_tol,
            max_iterations: d.max_iterations,
            divergence_bound: d.divergence_bound,
            jacobian: d.jacobian.name().to_owned(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourConfig {
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    label: Option<String>,
    equations: Vec<String>,
    variables: Vec<String>,
    domain: Vec<AxisConfig>,
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    newton: NewtonConfig,
    #[serde(default)]
    round_decimals: Option<u32>,
    #[serde(default)]
    domain_slack: Option<f64>,
    #[serde(default)]
    keep_out_of_domain: bool,
    #[serde(default)]
    jacobian: Option<Vec<Vec<String>>>,
    #[serde(default)]
    output: OutputConfig,
    #[serde(default)]
    contours: Option<ContourConfig>,
    #[serde(default)]
    repetitions: Option<usize>,
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub label: String,
    pub equations: Vec<String>,
    pub variables: Vec<String>,
    pub domain: Vec<AxisConfig>,
    pub mode: DetectionMode,
    pub newton: NewtonOptions,
    pub round_decimals: u32,
    pub domain_slack: Option<f64>,
    pub keep_out_of_domain: bool,
    pub jacobian: Option<Vec<Vec<String>>>,
    pub output: OutputConfig,
    pub contours: Option<ContourConfig>,
    pub repetitions: usize,
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.into(),
        message: message.into(),
    }
}

/// Parses and validates a TOML run configuration.
pub fn parse_config(source: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(source).map_err(|e| CliError::Parse(e.to_string()))?;

    if raw.equations.len() != raw.variables.len() {
        return Err(invalid(
            "equations",
            format!(
                "equation/variable count mismatch: {} equation(s), {} variable(s)",
                raw.equations.len(),
                raw.variables.len()
            ),
        ));
    }
    if raw.equations.is_empty() {
        return Err(invalid("equations", "at least one equation is required"));
    }
    if raw.domain.len() != raw.variables.len() {
        return Err(invalid(
            "domain",
            format!(
                "{} domain axis/axes given for {} variable(s)",
                raw.domain.len(),
                raw.variables.len()
            ),
        ));
    }
    for (k, axis) in raw.domain.iter().enumerate() {
        if axis.points < 3 {
            return Err(invalid(
                format!("domain[{k}].points"),
                format!("at least 3 points required, got {}", axis.points),
            ));
        }
        if !(axis.lower.is_finite() && axis.upper.is_finite() && axis.lower < axis.upper) {
            return Err(invalid(
                format!("domain[{k}]"),
                format!("need finite lower < upper, got [{}, {}]", axis.lower, axis.upper),
            ));
        }
    }
    let mode = match &raw.mode {
        Some(m) => m.parse().map_err(|e: String| invalid("mode", e))?,
        None => DetectionMode::Pairwise,
    };
    let jacobian_mode: JacobianMode = raw
        .newton
        .jacobian
        .parse()
        .map_err(|e: String| invalid("newton.jacobian", e))?;
    let newton = NewtonOptions {
        residual_tol: raw.newton.residual_tol,
        step_tol: raw.newton.step_tol,
        max_iterations: raw.newton.max_iterations,
        divergence_bound: raw.newton.divergence_bound,
        jacobian: jacobian_mode,
    };
    newton.validate().map_err(|e| invalid("newton", e))?;
    if jacobian_mode == JacobianMode::Analytic && raw.jacobian.is_none() {
        return Err(invalid(
            "newton.jacobian",
            "`analytic` requires a top-level `jacobian` matrix of expressions",
        ));
    }
    let round_decimals = raw.round_decimals.unwrap_or(SolverConfig::DEFAULT_ROUND_DECIMALS);
    if round_decimals > MAX_ROUND_DECIMALS {
        return Err(invalid(
            "round_decimals",
            format!("must be at most {MAX_ROUND_DECIMALS}, got {round_decimals}"),
        ));
    }
    if let Some(s) = raw.domain_slack {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(invalid(
                "domain_slack",
                format!("must be finite and >= 0, got {s}"),
            ));
        }
    }
    let repetitions = raw.repetitions.unwrap_or(DEFAULT_REPETITIONS);
    if repetitions == 0 {
        return Err(invalid("repetitions", "must be at least 1"));
    }

    let cfg = RunConfig {
        label: raw.label.unwrap_or_else(|| "problem".to_owned()),
        equations: raw.equations,
        variables: raw.variables,
        domain: raw.domain,
        mode,
        newton,
        round_decimals,
        domain_slack: raw.domain_slack,
        keep_out_of_domain: raw.keep_out_of_domain,
        jacobian: raw.jacobian,
        output: raw.output,
        contours: raw.contours,
        repetitions,
    };
    // Surface expression errors at load time.
    cfg.problem()?;
    Ok(cfg)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_config(&text)
}

impl RunConfig {
    pub fn problem(&self) -> Result<Problem, CliError> {
        let p = Problem::new(self.label.clone(), &self.variables, &self.equations)
            .map_err(|e| invalid("equations", e.to_string()))?;
        match &self.jacobian {
            Some(rows) => p
                .with_jacobian(rows)
                .map_err(|e| invalid("jacobian", e.to_string())),
            None => Ok(p),
        }
    }

    pub fn grid(&self) -> Result<DomainGrid, CliError> {
        let bounds: Vec<_> = self.domain.iter().map(|a| (a.lower, a.upper, a.points)).collect();
        DomainGrid::from_bounds(&bounds).map_err(|e| invalid("domain", e.to_string()))
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        Ok(SolverConfig {
            grid: self.grid()?,
            mode: self.mode,
            newton: self.newton,
            round_decimals: self.round_decimals,
            domain_slack: self.domain_slack,
            keep_out_of_domain: self.keep_out_of_domain,
        })
    }

    /// Overrides every axis' point count.
    pub fn set_points(&mut self, points: usize) -> Result<(), CliError> {
        if points < 3 {
            return Err(invalid(
                "points",
                format!("at least 3 points required, got {points}"),
            ));
        }
        for axis in &mut self.domain {
            axis.points = points;
        }
        Ok(())
    }
}
