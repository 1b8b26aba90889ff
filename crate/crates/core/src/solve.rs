//! The end-to-end pipeline: detect candidate cells, polish each with Newton,
//! merge duplicates and drop roots that left the box.

use rayon::prelude::*;
use thiserror::Error;

use crate::detect::{detect_candidates, DetectionMode};
use crate::expr::{ExprError, Expression, VariableSet};
use crate::grid::{DomainGrid, GridError};
use crate::refine::{
    dedupe, domain_filter, newton_raphson, EquationSystem, JacobianMode, NewtonOptions, RefinementStatus,
    Solution,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid variables: {0}")]
    Variables(#[source] ExprError),
    #[error("equation {index}: {source}")]
    Equation {
        index: usize,
        #[source]
        source: ExprError,
    },
    #[error("jacobian entry ({row},{col}): {source}")]
    JacobianEntry {
        row: usize,
        col: usize,
        #[source]
        source: ExprError,
    },
    #[error("equation/variable count mismatch: {equations} equation(s), {variables} variable(s)")]
    CountMismatch { equations: usize, variables: usize },
    #[error("analytic jacobian must be {n}x{n}")]
    JacobianShape { n: usize },
    #[error("problem has {problem} variable(s) but the grid has {grid} axis/axes")]
    DimensionMismatch { problem: usize, grid: usize },
    #[error("analytic jacobian requested but the problem has none")]
    MissingJacobian,
    #[error("invalid newton options: {0}")]
    Options(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("reactor parameter R = {0} outside [0.935, 0.995]")]
    ReactorOutOfRange(f64),
    #[error("effati half-width must be positive and finite, got {0}")]
    InvalidHalfWidth(f64),
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
}

/// `n` scalar equations in `n` named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    label: String,
    vars: VariableSet,
    functions: Vec<Expression>,
    /// Row-major `n x n`.
    jacobian: Option<Vec<Expression>>,
}

impl Problem {
    pub fn new<V: AsRef<str>, E: AsRef<str>>(
        label: impl Into<String>,
        variables: &[V],
        equations: &[E],
    ) -> Result<Self, SolveError> {
        let vars = VariableSet::new(variables.iter().map(|v| v.as_ref().to_owned()))
            .map_err(SolveError::Variables)?;
        if equations.len() != vars.len() {
            return Err(SolveError::CountMismatch {
                equations: equations.len(),
                variables: vars.len(),
            });
        }
        let functions = equations
            .iter()
            .enumerate()
            .map(|(index, src)| {
                Expression::parse(src.as_ref(), &vars)
                    .map_err(|source| SolveError::Equation { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            label: label.into(),
            vars,
            functions,
            jacobian: None,
        })
    }

    /// Attaches analytic Jacobian entries, `rows[i][j] = d f_i / d x_j`.
    pub fn with_jacobian<S: AsRef<str>>(mut self, rows: &[Vec<S>]) -> Result<Self, SolveError> {
        let n = self.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(SolveError::JacobianShape { n });
        }
        let mut entries = Vec::with_capacity(n * n);
        for (row, cells) in rows.iter().enumerate() {
            for (col, src) in cells.iter().enumerate() {
                let e = Expression::parse(src.as_ref(), &self.vars)
                    .map_err(|source| SolveError::JacobianEntry { row, col, source })?;
                entries.push(e);
            }
        }
        self.jacobian = Some(entries);
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn variables(&self) -> &VariableSet {
        &self.vars
    }

    pub fn functions(&self) -> &[Expression] {
        &self.functions
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn jacobian_entries(&self) -> Option<&[Expression]> {
        self.jacobian.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        self.functions.iter().map(|f| f.evaluate(x)).collect()
    }

    /// `max_i |f_i(x)|`, NaN if any component is NaN.
    pub fn residual_norm(&self, x: &[f64]) -> f64 {
        self.evaluate(x).into_iter().fold(0.0f64, |acc, v| {
            if acc.is_nan() || v.is_nan() {
                f64::NAN
            } else {
                acc.max(v.abs())
            }
        })
    }
}

impl EquationSystem for Problem {
    fn dim(&self) -> usize {
        self.vars.len()
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (slot, f) in out.iter_mut().zip(&self.functions) {
            *slot = f.evaluate(x);
        }
    }

    fn analytic_jacobian(&self, x: &[f64], out: &mut [f64]) -> bool {
        match &self.jacobian {
            Some(entries) => {
                for (slot, e) in out.iter_mut().zip(entries) {
                    *slot = e.evaluate(x);
                }
                true
            }
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: DomainGrid,
    pub mode: DetectionMode,
    pub newton: NewtonOptions,
    /// Decimal places of the duplicate-merging key.
    pub round_decimals: u32,
    /// Uniform slack for the domain filter; `None` uses `1e-9 * (b_k - a_k)` per axis.
    pub domain_slack: Option<f64>,
    pub keep_out_of_domain: bool,
}

impl SolverConfig {
    pub const DEFAULT_ROUND_DECIMALS: u32 = 6;
    pub const DEFAULT_POINTS: usize = 500;

    pub fn new(grid: DomainGrid) -> Self {
        Self {
            grid,
            mode: DetectionMode::Pairwise,
            newton: NewtonOptions::default(),
            round_decimals: Self::DEFAULT_ROUND_DECIMALS,
            domain_slack: None,
            keep_out_of_domain: false,
        }
    }

    pub fn with_mode(mut self, mode: DetectionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_jacobian(mut self, jacobian: JacobianMode) -> Self {
        self.newton.jacobian = jacobian;
        self
    }

    pub fn with_points(mut self, points: usize) -> Result<Self, SolveError> {
        self.grid = self.grid.with_points(points)?;
        Ok(self)
    }
}

/// Tally of Newton outcomes over all candidates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RefinementTally {
    pub converged: usize,
    pub non_converged: usize,
    pub diverged: usize,
    pub singular_jacobian: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub label: String,
    pub solutions: Vec<Solution>,
    pub candidate_count: usize,
    pub tally: RefinementTally,
    pub config: SolverConfig,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn roots(&self) -> impl Iterator<Item = &[f64]> {
        self.solutions.iter().map(|s| s.coordinates.as_slice())
    }
}

/// Finds every root of `problem` inside the configured box.
pub fn find_all_roots(problem: &Problem, cfg: &SolverConfig) -> Result<SolutionSet, SolveError> {
    if problem.dim() != cfg.grid.dim() {
        return Err(SolveError::DimensionMismatch {
            problem: problem.dim(),
            grid: cfg.grid.dim(),
        });
    }
    cfg.newton.validate().map_err(SolveError::Options)?;
    if cfg.newton.jacobian == JacobianMode::Analytic && !problem.has_jacobian() {
        return Err(SolveError::MissingJacobian);
    }

    let candidates = detect_candidates(problem, &cfg.grid, cfg.mode);
    let results: Vec<_> = candidates
        .entries
        .par_iter()
        .map(|c| newton_raphson(problem, &c.coordinates, &cfg.newton))
        .collect();

    let mut tally = RefinementTally::default();
    for r in &results {
        match r.status {
            RefinementStatus::Converged => tally.converged += 1,
            RefinementStatus::NonConverged => tally.non_converged += 1,
            RefinementStatus::Diverged => tally.diverged += 1,
            RefinementStatus::SingularJacobian => tally.singular_jacobian += 1,
        }
    }

    let mut solutions = dedupe(&results, cfg.round_decimals);
    if !cfg.keep_out_of_domain {
        solutions = domain_filter(solutions, &cfg.grid, cfg.domain_slack);
    }
    Ok(SolutionSet {
        label: problem.label().to_owned(),
        solutions,
        candidate_count: candidates.len(),
        tally,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_identity_system() {
        let p = Problem::new("identity", &["x1", "x2"], &["x1", "x2"]).unwrap();
        let cfg = SolverConfig::new(DomainGrid::uniform(2, -1.0, 1.0, 5).unwrap());
        let s = find_all_roots(&p, &cfg).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.solutions[0].coordinates, vec![0.0, 0.0]);
        assert_eq!(s.solutions[0].residual_norm, 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let p = Problem::new("p", &["x1", "x2"], &["x1", "x2"]).unwrap();
        let cfg = SolverConfig::new(DomainGrid::uniform(3, -1.0, 1.0, 5).unwrap());
        assert_eq!(
            find_all_roots(&p, &cfg).unwrap_err(),
            SolveError::DimensionMismatch { problem: 2, grid: 3 }
        );
    }

    #[test]
    fn count_mismatch() {
        assert_eq!(
            Problem::new("p", &["x1", "x2", "x3"], &["x1", "x2"]).unwrap_err(),
            SolveError::CountMismatch {
                equations: 2,
                variables: 3
            }
        );
    }

    #[test]
    fn bad_equation_reports_index() {
        let err = Problem::new("p", &["x1", "x2"], &["x1", "x1 + y"]).unwrap_err();
        assert!(matches!(err, SolveError::Equation { index: 1, .. }));
    }

    #[test]
    fn analytic_mode_requires_jacobian() {
        let p = Problem::new("p", &["x"], &["x^2-2"]).unwrap();
        let cfg = SolverConfig::new(DomainGrid::uniform(1, 0.0, 2.0, 11).unwrap())
            .with_jacobian(JacobianMode::Analytic);
        assert_eq!(find_all_roots(&p, &cfg).unwrap_err(), SolveError::MissingJacobian);
        let p = p.with_jacobian(&[vec!["2*x"]]).unwrap();
        let s = find_all_roots(&p, &cfg).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.solutions[0].coordinates[0] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn jacobian_shape_checked() {
        let p = Problem::new("p", &["x", "y"], &["x", "y"]).unwrap();
        assert_eq!(
            p.with_jacobian(&[vec!["1", "0"]]).unwrap_err(),
            SolveError::JacobianShape { n: 2 }
        );
    }

    #[test]
    fn rootless_problem_is_empty_success() {
        let p = Problem::new("p", &["x1", "x2"], &["x1^2+1", "x2"]).unwrap();
        let cfg = SolverConfig::new(DomainGrid::uniform(2, -3.0, 3.0, 31).unwrap());
        let s = find_all_roots(&p, &cfg).unwrap();
        assert!(s.is_empty());
    }
}
