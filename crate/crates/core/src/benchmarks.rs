//! Built-in benchmark systems with their canonical boxes and known root counts.

use std::fmt;
use std::time::Instant;

use crate::grid::DomainGrid;
use crate::solve::{find_all_roots, Problem, SolutionSet, SolveError, SolverConfig};

/// Fixed parameters of the two-reactor system.
pub const REACTOR_GAMMA: f64 = 1000.0;
pub const REACTOR_D: f64 = 22.0;
pub const REACTOR_BETA1: f64 = 2.0;
pub const REACTOR_BETA2: f64 = 2.0;
pub const REACTOR_R_MIN: f64 = 0.935;
pub const REACTOR_R_MAX: f64 = 0.995;

/// Published root counts for `R = 0.935, 0.940, ..., 0.995`.
pub const REACTOR_COUNTS: [usize; 13] = [1, 1, 3, 5, 5, 7, 5, 5, 5, 5, 5, 1, 1];

/// Node count per axis used by the 3-variable girder system; the 2D default
/// of 500 would need 125M nodes per function.
pub const GIRDER_RAW3D_POINTS: usize = 150;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Benchmark {
    /// Trigonometric pair on `[-w, w]^2`.
    Effati { half_width: f64 },
    /// Girder section system with `x2` eliminated, variables `(x1, x3)`.
    GirderReduced,
    /// Original three-variable girder system; has a singular plane.
    GirderRaw3d,
    /// Two stirred-tank reactors with recycle ratio `r`.
    Reactor { r: f64 },
    /// Exponential/trigonometric pair on `[-10, 10]^2`.
    Chen,
}

impl Benchmark {
    pub fn effati(half_width: f64) -> Self {
        Benchmark::Effati { half_width }
    }

    pub fn reactor(r: f64) -> Self {
        Benchmark::Reactor { r }
    }

    /// `R = 0.935 + 0.005 k` for `k = 0..13`, built from integers to avoid drift.
    pub fn reactor_sweep() -> Vec<Benchmark> {
        (0..REACTOR_COUNTS.len())
            .map(|k| Benchmark::Reactor {
                r: (935 + 5 * k) as f64 / 1000.0,
            })
            .collect()
    }

    /// Parses a CLI-style name; `param` is the Effati half-width or reactor `R`.
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Self, SolveError> {
        match name {
            "effati" => Ok(Benchmark::Effati {
                half_width: param.unwrap_or(2.0),
            }),
            "girder_reduced" => Ok(Benchmark::GirderReduced),
            "girder_raw3d" => Ok(Benchmark::GirderRaw3d),
            "reactor" => Ok(Benchmark::Reactor {
                r: param.unwrap_or(0.96),
            }),
            "chen" => Ok(Benchmark::Chen),
            other => Err(SolveError::UnknownBenchmark(other.to_owned())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Benchmark::Effati { .. } => "effati",
            Benchmark::GirderReduced => "girder_reduced",
            Benchmark::GirderRaw3d => "girder_raw3d",
            Benchmark::Reactor { .. } => "reactor",
            Benchmark::Chen => "chen",
        }
    }

    pub fn expected_solution_count(&self) -> Option<usize> {
        match *self {
            Benchmark::Effati { half_width } => match half_width {
                2.0 => Some(1),
                10.0 => Some(13),
                100.0 => Some(127),
                _ => None,
            },
            Benchmark::GirderReduced => Some(6),
            Benchmark::GirderRaw3d => None,
            Benchmark::Reactor { r } => {
                let steps = (r - REACTOR_R_MIN) / 0.005;
                let k = steps.round();
                if (steps - k).abs() < 1e-6 && (0.0..REACTOR_COUNTS.len() as f64).contains(&k) {
                    Some(REACTOR_COUNTS[k as usize])
                } else {
                    None
                }
            }
            Benchmark::Chen => Some(6),
        }
    }

    pub fn canonical_grid(&self) -> Result<DomainGrid, SolveError> {
        let n = SolverConfig::DEFAULT_POINTS;
        let grid = match *self {
            Benchmark::Effati { half_width } => {
                if !(half_width.is_finite() && half_width > 0.0) {
                    return Err(SolveError::InvalidHalfWidth(half_width));
                }
                DomainGrid::uniform(2, -half_width, half_width, n)?
            }
            Benchmark::GirderReduced => DomainGrid::uniform(2, -40.0, 40.0, n)?,
            Benchmark::GirderRaw3d => DomainGrid::uniform(3, -40.0, 40.0, GIRDER_RAW3D_POINTS)?,
            Benchmark::Reactor { .. } => DomainGrid::uniform(2, 0.0, 1.0, n)?,
            Benchmark::Chen => DomainGrid::uniform(2, -10.0, 10.0, n)?,
        };
        Ok(grid)
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Benchmark::Effati { half_width } => write!(f, "effati[-{half_width},{half_width}]"),
            Benchmark::Reactor { r } => write!(f, "reactor(R={r})"),
            other => f.write_str(other.name()),
        }
    }
}

const EFFATI: [&str; 2] = ["cos(2*x1)-cos(2*x2)-0.4", "2*(x2-x1)+sin(2*x2)-sin(2*x1)-1.2"];

const CHEN: [&str; 2] = ["exp(x1-x2)-sin(x1+x2)", "x1^2*x2^2-cos(x1+x2)"];

/// `x2` expressed through `(x1, x3)` from the area constraint.
const GIRDER_X2: &str = "(2*x3-x1+165/(2*x3))";

fn girder_raw_equations() -> [String; 3] {
    [
        "x1*x2-(x1-2*x3)*(x2-2*x3)-165".to_owned(),
        "x1*x2^3/12-(x1-2*x3)*(x2-2*x3)^3/12-9369".to_owned(),
        "2*(x2-x3)^2*(x1-x3)^2*x3/(x2+x1-2*x3)-6835".to_owned(),
    ]
}

fn girder_reduced_equations() -> [String; 2] {
    let [_, g1, g2] = girder_raw_equations();
    [g1.replace("x2", GIRDER_X2), g2.replace("x2", GIRDER_X2)]
}

fn reactor_equations(r: f64) -> [String; 2] {
    let (g, d, b1, b2) = (REACTOR_GAMMA, REACTOR_D, REACTOR_BETA1, REACTOR_BETA2);
    [
        format!("(1-{r:?})*({d:?}/(10*(1+{b1:?}))-x1)*exp(10*x1/(1+10*x1/{g:?}))-x1"),
        format!("x1-(1+{b2:?})*x2+(1-{r:?})*({d:?}/10-{b1:?}*x1-(1+{b2:?})*x2)*exp(10*x2/(1+10*x2/{g:?}))"),
    ]
}

/// The benchmark's system together with its default solver configuration.
pub fn builtin_problem(b: &Benchmark) -> Result<(Problem, SolverConfig), SolveError> {
    let label = b.to_string();
    let problem = match *b {
        Benchmark::Effati { .. } => Problem::new(label, &["x1", "x2"], &EFFATI)?.with_jacobian(&[
            vec!["-2*sin(2*x1)", "2*sin(2*x2)"],
            vec!["-2-2*cos(2*x1)", "2+2*cos(2*x2)"],
        ])?,
        Benchmark::GirderReduced => Problem::new(label, &["x1", "x3"], &girder_reduced_equations())?,
        Benchmark::GirderRaw3d => Problem::new(label, &["x1", "x2", "x3"], &girder_raw_equations())?,
        Benchmark::Reactor { r } => {
            if !(REACTOR_R_MIN - 1e-12..=REACTOR_R_MAX + 1e-12).contains(&r) {
                return Err(SolveError::ReactorOutOfRange(r));
            }
            Problem::new(label, &["x1", "x2"], &reactor_equations(r))?
        }
        Benchmark::Chen => Problem::new(label, &["x1", "x2"], &CHEN)?.with_jacobian(&[
            vec!["exp(x1-x2)-cos(x1+x2)", "-exp(x1-x2)-cos(x1+x2)"],
            vec!["2*x1*x2^2+sin(x1+x2)", "2*x1^2*x2+sin(x1+x2)"],
        ])?,
    };
    Ok((problem, SolverConfig::new(b.canonical_grid()?)))
}

/// Mean and sample standard deviation of `samples`.
pub fn mean_and_std(samples: &[f64]) -> (f64, f64) {
    if samples.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub benchmark: Benchmark,
    pub solutions: SolutionSet,
    pub repetitions: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
    pub expected: Option<usize>,
}

impl BenchmarkReport {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    /// `None` when no published count exists.
    pub fn passed(&self) -> Option<bool> {
        self.expected.map(|e| e == self.count())
    }
}

/// Times `repetitions` solves of the benchmark under `cfg`.
pub fn run_benchmark_with(
    b: &Benchmark,
    cfg: &SolverConfig,
    repetitions: usize,
) -> Result<BenchmarkReport, SolveError> {
    let (problem, _) = builtin_problem(b)?;
    let repetitions = repetitions.max(1);
    let mut samples = Vec::with_capacity(repetitions);
    let mut last: Option<SolutionSet> = None;
    for _ in 0..repetitions {
        let start = Instant::now();
        let set = find_all_roots(&problem, cfg)?;
        samples.push(start.elapsed().as_secs_f64());
        if let Some(prev) = &last {
            debug_assert_eq!(prev.solutions, set.solutions, "solver is deterministic");
        }
        last = Some(set);
    }
    let (mean_seconds, std_seconds) = mean_and_std(&samples);
    Ok(BenchmarkReport {
        benchmark: *b,
        solutions: last.expect("at least one repetition"),
        repetitions,
        mean_seconds,
        std_seconds,
        expected: b.expected_solution_count(),
    })
}

/// Times `repetitions` solves at the benchmark's canonical configuration.
pub fn run_benchmark(b: &Benchmark, repetitions: usize) -> Result<BenchmarkReport, SolveError> {
    let (_, cfg) = builtin_problem(b)?;
    run_benchmark_with(b, &cfg, repetitions)
}
