//! Grid dumps of each function for external contour plotting.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use allroots::{evaluate_grid, DomainGrid, Problem};

use crate::output::format_number;
use crate::CliError;

/// Writes `f1.csv`, `f2.csv`, ... into `dir`. Each file has a header row of
/// first-variable node values (after an empty corner cell) and one row per
/// second-variable node, starting with that node's value.
pub fn dump_contours(problem: &Problem, grid: &DomainGrid, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if problem.dim() != 2 || grid.dim() != 2 {
        return Err(CliError::Config {
            field: "contours".into(),
            message: format!("contour dump requires 2 variables, problem has {}", problem.dim()),
        });
    }
    let io_err = |path: &Path| {
        let path = path.to_owned();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let xs = grid.axes()[0].nodes();
    let ys = grid.axes()[1].nodes();
    let tensors = evaluate_grid(problem, grid);
    let mut written = Vec::with_capacity(tensors.len());
    for (i, t) in tensors.iter().enumerate() {
        let path = dir.join(format!("f{}.csv", i + 1));
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        let mut out = BufWriter::new(file);
        let mut write = || -> std::io::Result<()> {
            let header: Vec<String> = xs.iter().map(|&x| format_number(x)).collect();
            writeln!(out, ",{}", header.join(","))?;
            let data = t.data();
            let stride = t.strides()[0];
            for (j, &y) in ys.iter().enumerate() {
                let row: Vec<String> = (0..xs.len())
                    .map(|i| format_number(data[i * stride + j]))
                    .collect();
                writeln!(out, "{},{}", format_number(y), row.join(","))?;
            }
            out.flush()
        };
        write().map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
