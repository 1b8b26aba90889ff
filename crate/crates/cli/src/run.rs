//! Executes a [`RunConfig`]: solve, time, write.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use allroots::benchmarks::mean_and_std;
use allroots::{find_all_roots, SolutionSet};

use crate::config::RunConfig;
use crate::contours::dump_contours;
use crate::output::{write_solutions, Timing};
use crate::CliError;

/// Solves `cfg.repetitions` times and returns the last solution set with timing.
pub fn solve_timed(cfg: &RunConfig) -> Result<(SolutionSet, Timing), CliError> {
    let problem = cfg.problem()?;
    let solver = cfg.solver_config()?;
    let repetitions = cfg.repetitions.max(1);
    let mut samples = Vec::with_capacity(repetitions);
    let mut last = None;
    for _ in 0..repetitions {
        let start = Instant::now();
        let set = find_all_roots(&problem, &solver)?;
        samples.push(start.elapsed().as_secs_f64());
        last = Some(set);
    }
    let (mean_seconds, std_seconds) = mean_and_std(&samples);
    let timing = Timing {
        repetitions,
        mean_seconds,
        std_seconds,
    };
    Ok((last.expect("at least one repetition"), timing))
}

/// Runs `cfg`, writing solutions to `out` and contour files if configured.
pub fn run_to<W: Write>(cfg: &RunConfig, out: &mut W, out_path: &Path) -> Result<SolutionSet, CliError> {
    if let Some(c) = &cfg.contours {
        dump_contours(&cfg.problem()?, &cfg.grid()?, &c.path)?;
    }
    let (set, timing) = solve_timed(cfg)?;
    let io_err = |source| CliError::Io {
        path: out_path.to_owned(),
        source,
    };
    write_solutions(out, cfg.output.format, &cfg.variables, &set, Some(timing)).map_err(io_err)?;
    out.flush().map_err(io_err)?;
    Ok(set)
}

/// Runs `cfg` against its configured output: the file at `output.path`, or stdout.
pub fn run(cfg: &RunConfig) -> Result<SolutionSet, CliError> {
    match &cfg.output.path {
        Some(path) => {
            let file = fs::File::create(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            run_to(cfg, &mut BufWriter::new(file), path)
        }
        None => {
            let stdout = io::stdout();
            run_to(cfg, &mut stdout.lock(), &PathBuf::from("<stdout>"))
        }
    }
}
