//! Run-time scaling with grid resolution and dimension.
//!
//! Each `(n, N)` point solves the separable system `x_k^2 - 25 = 0` on
//! `[-10, 10]^n`, whose `2^n` roots are known at every resolution.

use std::io::{self, Write};
use std::time::Instant;

use allroots::benchmarks::mean_and_std;
use allroots::{find_all_roots, DomainGrid, Problem, SolverConfig};

use crate::CliError;

pub const SUPPORTED_DIMENSIONS: [usize; 4] = [2, 3, 4, 5];
pub const MIN_START_POINTS: usize = 20;
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub dimensions: Vec<usize>,
    pub start: usize,
    pub stop: usize,
    pub step: usize,
    pub repetitions: usize,
    /// Upper bound on the estimated bytes for value tensors and masks.
    pub memory_budget: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dimensions: vec![2, 3, 4, 5],
            start: 20,
            stop: 1000,
            step: 10,
            repetitions: 50,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, message: String| CliError::Config {
            field: field.into(),
            message,
        };
        if self.dimensions.is_empty() {
            return Err(bad("dimensions", "at least one dimension required".into()));
        }
        if let Some(d) = self.dimensions.iter().find(|d| !SUPPORTED_DIMENSIONS.contains(d)) {
            return Err(bad(
                "dimensions",
                format!("dimension {d} not in {SUPPORTED_DIMENSIONS:?}"),
            ));
        }
        if self.start < MIN_START_POINTS {
            return Err(bad(
                "start",
                format!("must be at least {MIN_START_POINTS}, got {}", self.start),
            ));
        }
        if self.stop < self.start {
            return Err(bad(
                "stop",
                format!("must be >= start ({}), got {}", self.start, self.stop),
            ));
        }
        if self.step == 0 {
            return Err(bad("step", "must be positive".into()));
        }
        if self.repetitions == 0 {
            return Err(bad("repetitions", "must be at least 1".into()));
        }
        Ok(())
    }

    pub fn point_counts(&self) -> impl Iterator<Item = usize> + '_ {
        (self.start..=self.stop).step_by(self.step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepOutcome {
    Timed {
        mean_seconds: f64,
        std_seconds: f64,
        solutions: usize,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub dimension: usize,
    pub points: usize,
    /// `(N - 1)^n`.
    pub cells: u128,
    pub estimated_bytes: u128,
    pub outcome: SweepOutcome,
}

/// `x_k^2 - 25 = 0` for `k = 1..n`.
pub fn separable_quadratic(n: usize) -> Problem {
    let vars: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
    let eqs: Vec<String> = vars.iter().map(|v| format!("{v}^2-25")).collect();
    Problem::new(format!("separable_quadratic_{n}d"), &vars, &eqs).expect("well-formed system")
}

pub fn cell_count(n: usize, points: usize) -> u128 {
    (points as u128 - 1).pow(n as u32)
}

/// Bytes for `n` value tensors of `N^n` doubles plus `n` boolean masks.
pub fn estimated_bytes(n: usize, points: usize) -> u128 {
    let nodes = (points as u128).pow(n as u32);
    n as u128 * (nodes * 8 + cell_count(n, points))
}

/// Times one `(n, N)` point, or explains why it was skipped.
pub fn sweep_point(
    n: usize,
    points: usize,
    repetitions: usize,
    memory_budget: u64,
) -> Result<SweepRow, CliError> {
    let cells = cell_count(n, points);
    let bytes = estimated_bytes(n, points);
    if bytes > memory_budget as u128 {
        return Ok(SweepRow {
            dimension: n,
            points,
            cells,
            estimated_bytes: bytes,
            outcome: SweepOutcome::Skipped {
                reason: "memory budget".into(),
            },
        });
    }
    let problem = separable_quadratic(n);
    let grid = DomainGrid::uniform(n, -10.0, 10.0, points).map_err(|e| CliError::Config {
        field: "points".into(),
        message: e.to_string(),
    })?;
    debug_assert_eq!(grid.cell_count() as u128, cells);
    let cfg = SolverConfig::new(grid);
    let mut samples = Vec::with_capacity(repetitions);
    let mut solutions = 0;
    for _ in 0..repetitions {
        let start = Instant::now();
        let set = find_all_roots(&problem, &cfg)?;
        samples.push(start.elapsed().as_secs_f64());
        solutions = set.len();
    }
    let (mean_seconds, std_seconds) = mean_and_std(&samples);
    Ok(SweepRow {
        dimension: n,
        points,
        cells,
        estimated_bytes: bytes,
        outcome: SweepOutcome::Timed {
            mean_seconds,
            std_seconds,
            solutions,
        },
    })
}

pub fn scaling_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.dimensions {
        for points in cfg.point_counts() {
            rows.push(sweep_point(n, points, cfg.repetitions, cfg.memory_budget)?);
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "n,points,mean_seconds,std_seconds,cells,solutions,status")?;
    for r in rows {
        match &r.outcome {
            SweepOutcome::Timed {
                mean_seconds,
                std_seconds,
                solutions,
            } => writeln!(
                out,
                "{},{},{:e},{:e},{},{},ok",
                r.dimension, r.points, mean_seconds, std_seconds, r.cells, solutions
            )?,
            SweepOutcome::Skipped { reason } => writeln!(
                out,
                "{},{},,,{},,skipped: {reason}",
                r.dimension, r.points, r.cells
            )?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts() {
        assert_eq!(cell_count(2, 20), 361);
        assert_eq!(cell_count(3, 21), 8000);
    }

    #[test]
    fn huge_points_are_skipped() {
        let row = sweep_point(5, 1000, 1, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(
            row.outcome,
            SweepOutcome::Skipped {
                reason: "memory budget".into()
            }
        );
        assert_eq!(row.cells, 999u128.pow(5));
    }

    #[test]
    fn small_point_finds_all_roots() {
        let row = sweep_point(2, 20, 1, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(row.cells, 361);
        match row.outcome {
            SweepOutcome::Timed { solutions, .. } => assert_eq!(solutions, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation() {
        let ok = SweepConfig {
            dimensions: vec![2],
            start: 20,
            stop: 30,
            step: 10,
            repetitions: 1,
            memory_budget: 1 << 20,
        };
        assert!(ok.validate().is_ok());
        assert_eq!(ok.point_counts().collect::<Vec<_>>(), vec![20, 30]);
        assert!(SweepConfig {
            dimensions: vec![6],
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SweepConfig {
            start: 10,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SweepConfig {
            step: 0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SweepConfig { stop: 19, ..ok }.validate().is_err());
    }

    #[test]
    fn budget_respected() {
        let cfg = SweepConfig {
            dimensions: vec![2, 3],
            start: 20,
            stop: 60,
            step: 20,
            repetitions: 1,
            memory_budget: 500_000,
        };
        for row in scaling_sweep(&cfg).unwrap() {
            let timed = matches!(row.outcome, SweepOutcome::Timed { .. });
            assert_eq!(timed, row.estimated_bytes <= 500_000, "{row:?}");
        }
    }
}
