use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use allroots::{
    builtin_problem, run_benchmark_with, Benchmark, BenchmarkReport, DetectionMode, SolverConfig,
};
use allroots_cli::config::DEFAULT_REPETITIONS;
use allroots_cli::sweep::{write_sweep_csv, DEFAULT_MEMORY_BUDGET};
use allroots_cli::{
    dump_contours, load_config, run, scaling_sweep, write_solutions, CliError, OutputFormat, SweepConfig,
    Timing,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "allroots",
    version,
    about = "Find every real root of a nonlinear system inside a box"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the system described by a TOML configuration file.
    Solve {
        config: PathBuf,
        /// Override the point count of every axis.
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        mode: Option<DetectionMode>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Run a built-in benchmark: effati, girder_reduced, girder_raw3d, reactor, chen, reactor_sweep.
    Bench {
        name: String,
        /// Effati half-width or reactor recycle ratio R.
        #[arg(long)]
        param: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        mode: Option<DetectionMode>,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time the separable quadratic system over a range of resolutions.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        dimensions: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        start: usize,
        #[arg(long, default_value_t = 1000)]
        stop: usize,
        #[arg(long, default_value_t = 10)]
        step: usize,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        repetitions: usize,
        /// Byte budget for value tensors and masks.
        #[arg(long, default_value_t = DEFAULT_MEMORY_BUDGET)]
        memory_budget: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Dump grid values of a 2-variable system for contour plotting.
    Contours {
        config: PathBuf,
        /// Directory receiving f1.csv, f2.csv.
        dir: PathBuf,
        #[arg(long)]
        points: Option<usize>,
    },
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let file = fs::File::create(p).map_err(|source| CliError::Io {
                path: p.to_owned(),
                source,
            })?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn output_name(path: Option<&Path>) -> PathBuf {
    path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_owned)
}

fn summary(report: &BenchmarkReport) {
    let expected = report.expected.map_or_else(|| "-".to_owned(), |e| e.to_string());
    let verdict = match report.passed() {
        Some(true) => "match",
        Some(false) => "MISMATCH",
        None => "no reference",
    };
    eprintln!(
        "{}: {} solution(s), expected {expected} ({verdict}); {} candidate(s); {:.4}s +- {:.4}s over {} run(s)",
        report.benchmark,
        report.count(),
        report.solutions.candidate_count,
        report.mean_seconds,
        report.std_seconds,
        report.repetitions
    );
}

fn bench_config(
    b: &Benchmark,
    points: Option<usize>,
    mode: Option<DetectionMode>,
) -> Result<SolverConfig, CliError> {
    let (_, mut cfg) = builtin_problem(b)?;
    if let Some(n) = points {
        cfg = cfg.with_points(n)?;
    }
    if let Some(m) = mode {
        cfg.mode = m;
    }
    Ok(cfg)
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve {
            config,
            points,
            mode,
            output,
            format,
            repetitions,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(n) = points {
                cfg.set_points(n)?;
            }
            if let Some(m) = mode {
                cfg.mode = m;
            }
            if let Some(p) = output {
                cfg.output.path = Some(p);
            }
            if let Some(f) = format {
                cfg.output.format = f;
            }
            if let Some(r) = repetitions {
                cfg.repetitions = r.max(1);
            }
            let set = run(&cfg)?;
            eprintln!(
                "{}: {} solution(s) from {} candidate(s)",
                set.label,
                set.len(),
                set.candidate_count
            );
            Ok(())
        }
        Command::Bench {
            name,
            param,
            points,
            mode,
            repetitions,
            format,
            output,
        } => {
            let benchmarks = if name == "reactor_sweep" {
                Benchmark::reactor_sweep()
            } else {
                vec![Benchmark::from_name(&name, param)?]
            };
            let mut out = open_output(output.as_deref())?;
            let io_err = |source| CliError::Io {
                path: output_name(output.as_deref()),
                source,
            };
            for b in &benchmarks {
                let cfg = bench_config(b, points, mode)?;
                let report = run_benchmark_with(b, &cfg, repetitions)?;
                summary(&report);
                let (problem, _) = builtin_problem(b)?;
                let timing = Timing {
                    repetitions: report.repetitions,
                    mean_seconds: report.mean_seconds,
                    std_seconds: report.std_seconds,
                };
                write_solutions(
                    &mut out,
                    format,
                    problem.variables().names(),
                    &report.solutions,
                    Some(timing),
                )
                .map_err(io_err)?;
            }
            out.flush().map_err(io_err)
        }
        Command::Sweep {
            dimensions,
            start,
            stop,
            step,
            repetitions,
            memory_budget,
            output,
        } => {
            let cfg = SweepConfig {
                dimensions,
                start,
                stop,
                step,
                repetitions,
                memory_budget,
            };
            let rows = scaling_sweep(&cfg)?;
            let mut out = open_output(output.as_deref())?;
            let io_err = |source| CliError::Io {
                path: output_name(output.as_deref()),
                source,
            };
            write_sweep_csv(&mut out, &rows).map_err(io_err)?;
            out.flush().map_err(io_err)
        }
        Command::Contours { config, dir, points } => {
            let mut cfg = load_config(&config)?;
            if let Some(n) = points {
                cfg.set_points(n)?;
            }
            for path in dump_contours(&cfg.problem()?, &cfg.grid()?, &dir)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
