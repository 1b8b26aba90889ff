//! Solution records as CSV or JSON lines.

use std::io::{self, Write};

use allroots::SolutionSet;
use serde_json::{json, Value};

use crate::config::OutputFormat;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub repetitions: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

/// Header `x1,...,xn,residual_norm,iterations` then one row per solution.
pub fn write_csv<W: Write>(out: &mut W, variables: &[String], set: &SolutionSet) -> io::Result<()> {
    let mut header: Vec<&str> = variables.iter().map(String::as_str).collect();
    header.extend(["residual_norm", "iterations"]);
    writeln!(out, "{}", header.join(","))?;
    for s in &set.solutions {
        let mut row: Vec<String> = s.coordinates.iter().map(|&v| format_number(v)).collect();
        row.push(format_number(s.residual_norm));
        row.push(s.iterations.to_string());
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn json_number(v: f64) -> Value {
    // serde_json writes the shortest representation that parses back to the same bits.
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// One object per solution plus a trailer object with the configuration echo
/// and timing.
pub fn write_json_lines<W: Write>(
    out: &mut W,
    variables: &[String],
    set: &SolutionSet,
    timing: Option<Timing>,
) -> io::Result<()> {
    for s in &set.solutions {
        let mut obj = serde_json::Map::new();
        for (name, &v) in variables.iter().zip(&s.coordinates) {
            obj.insert(name.clone(), json_number(v));
        }
        obj.insert("residual_norm".into(), json_number(s.residual_norm));
        obj.insert("iterations".into(), json!(s.iterations));
        writeln!(out, "{}", Value::Object(obj))?;
    }
    let cfg = &set.config;
    let axes: Vec<Value> = cfg
        .grid
        .axes()
        .iter()
        .map(|a| json!({"lower": json_number(a.lower()), "upper": json_number(a.upper()), "points": a.points()}))
        .collect();
    let trailer = json!({
        "trailer": {
            "label": set.label,
            "variables": variables,
            "solution_count": set.len(),
            "candidate_count": set.candidate_count,
            "config": {
                "domain": axes,
                "mode": cfg.mode.name(),
                "newton": {
                    "residual_tol": json_number(cfg.newton.residual_tol),
                    "step_tol": json_number(cfg.newton.step_tol),
                    "max_iterations": cfg.newton.max_iterations,
                    "divergence_bound": json_number(cfg.newton.divergence_bound),
                    "jacobian": cfg.newton.jacobian.name(),
                },
                "round_decimals": cfg.round_decimals,
                "keep_out_of_domain": cfg.keep_out_of_domain,
            },
            "timing": timing.map(|t| json!({
                "repetitions": t.repetitions,
                "mean_seconds": json_number(t.mean_seconds),
                "std_seconds": json_number(t.std_seconds),
            })),
        }
    });
    writeln!(out, "{trailer}")
}

pub fn write_solutions<W: Write>(
    out: &mut W,
    format: OutputFormat,
    variables: &[String],
    set: &SolutionSet,
    timing: Option<Timing>,
) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(out, variables, set),
        OutputFormat::Json => write_json_lines(out, variables, set, timing),
    }
}

/// `(coordinates, residual_norm, iterations)`.
pub type CsvRow = (Vec<f64>, f64, usize);

/// Parses a solutions CSV back into its variable names and rows.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<CsvRow>), String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or("empty file")?
        .split(',')
        .map(str::to_owned)
        .collect();
    if header.len() < 3 || header[header.len() - 2..] != ["residual_norm", "iterations"] {
        return Err(format!("unexpected header {header:?}"));
    }
    let n = header.len() - 2;
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n + 2 {
            return Err(format!(
                "row {}: expected {} columns, got {}",
                lineno + 1,
                n + 2,
                cells.len()
            ));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", lineno + 1));
        let coords = cells[..n].iter().map(|c| num(c)).collect::<Result<Vec<_>, _>>()?;
        let residual = num(cells[n])?;
        let iterations = cells[n + 1]
            .parse()
            .map_err(|e| format!("row {}: {e}", lineno + 1))?;
        rows.push((coords, residual, iterations));
    }
    Ok((header[..n].to_vec(), rows))
}
