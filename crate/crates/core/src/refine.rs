//! Newton-Raphson polishing of candidate cells, duplicate merging and the
//! domain filter.

use std::collections::HashSet;

use crate::grid::DomainGrid;

/// A square system `F: R^n -> R^n`.
pub trait EquationSystem: Sync {
    fn dim(&self) -> usize;

    fn eval_into(&self, x: &[f64], out: &mut [f64]);

    /// Writes the analytic Jacobian row-major into `out` and returns `true`,
    /// or returns `false` when none is available.
    fn analytic_jacobian(&self, _x: &[f64], _out: &mut [f64]) -> bool {
        false
    }
}

/// Dense row-major `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self {
            n,
            data: rows.concat(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }
}

/// Pivot magnitudes below this fraction of the largest entry count as singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Solves `a * x = b` by LU with partial pivoting. Returns `None` when a pivot
/// falls below `PIVOT_TOLERANCE` relative to the largest entry of `a`, or when
/// `a` has non-finite entries.
pub fn lu_solve(a: &SquareMatrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.n;
    assert_eq!(b.len(), n);
    let mut m = a.data.clone();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if !scale.is_finite() || scale == 0.0 || m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let threshold = PIVOT_TOLERANCE * scale;
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= threshold {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            x.swap(col, pivot_row);
        }
        let pivot = m[col * n + col];
        for r in col + 1..n {
            let factor = m[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[r * n + j] -= factor * m[col * n + j];
            }
            x[r] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let tail: f64 = (col + 1..n).map(|j| m[col * n + j] * x[j]).sum();
        x[col] = (x[col] - tail) / m[col * n + col];
    }
    Some(x)
}

/// Forward-difference Jacobian with steps `h_j = sqrt(eps) * max(|x_j|, 1)`.
pub fn numeric_jacobian<S: EquationSystem + ?Sized>(system: &S, x: &[f64]) -> SquareMatrix {
    let n = system.dim();
    let mut base = vec![0.0; n];
    system.eval_into(x, &mut base);
    numeric_jacobian_with(system, x, &base)
}

fn numeric_jacobian_with<S: EquationSystem + ?Sized>(system: &S, x: &[f64], fx: &[f64]) -> SquareMatrix {
    let n = system.dim();
    let mut jac = SquareMatrix::zeros(n);
    let mut shifted = x.to_vec();
    let mut f_shifted = vec![0.0; n];
    let sqrt_eps = f64::EPSILON.sqrt();
    for j in 0..n {
        let h = sqrt_eps * x[j].abs().max(1.0);
        shifted[j] = x[j] + h;
        // Divide by the step actually taken after rounding.
        let step = shifted[j] - x[j];
        system.eval_into(&shifted, &mut f_shifted);
        for i in 0..n {
            jac.set(i, j, (f_shifted[i] - fx[i]) / step);
        }
        shifted[j] = x[j];
    }
    jac
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum JacobianMode {
    Analytic,
    #[default]
    FiniteDifference,
}

impl JacobianMode {
    pub fn name(self) -> &'static str {
        match self {
            JacobianMode::Analytic => "analytic",
            JacobianMode::FiniteDifference => "finite_difference",
        }
    }
}

impl std::str::FromStr for JacobianMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(JacobianMode::Analytic),
            "finite_difference" | "numeric" => Ok(JacobianMode::FiniteDifference),
            other => Err(format!(
                "unknown jacobian mode `{other}` (expected `analytic` or `finite_difference`)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Max-norm of `F` at which an iterate is accepted.
    pub residual_tol: f64,
    /// Max-norm of the update below which iteration stops.
    pub step_tol: f64,
    pub max_iterations: usize,
    /// Max-norm of the iterate beyond which the run is declared divergent.
    pub divergence_bound: f64,
    pub jacobian: JacobianMode,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            step_tol: 1e-12,
            max_iterations: 100,
            divergence_bound: 1e12,
            jacobian: JacobianMode::FiniteDifference,
        }
    }
}

impl NewtonOptions {
    pub fn validate(&self) -> Result<(), String> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be positive and finite, got {v}"))
            }
        };
        positive("residual_tol", self.residual_tol)?;
        positive("step_tol", self.step_tol)?;
        positive("divergence_bound", self.divergence_bound)?;
        if self.max_iterations == 0 {
            return Err("max_iterations must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefinementStatus {
    Converged,
    NonConverged,
    Diverged,
    SingularJacobian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementResult {
    pub status: RefinementStatus,
    /// Final iterate. Only meaningful when `status` is `Converged`.
    pub root: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub start: Vec<f64>,
}

impl RefinementResult {
    pub fn converged(&self) -> bool {
        self.status == RefinementStatus::Converged
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| {
        if acc.is_nan() || x.is_nan() {
            f64::NAN
        } else {
            acc.max(x.abs())
        }
    })
}

/// Plain (undamped) Newton iteration from `x0`.
///
/// Stops as converged once `|F|_inf <= residual_tol`. An update smaller than
/// `step_tol` also stops the iteration, but the result only counts as converged
/// if the residual test passes there too; otherwise it is reported as
/// non-converged. Never runs more than `max_iterations` Newton steps.
pub fn newton_raphson<S: EquationSystem + ?Sized>(
    system: &S,
    x0: &[f64],
    opts: &NewtonOptions,
) -> RefinementResult {
    let n = system.dim();
    assert_eq!(x0.len(), n, "starting point has wrong dimension");
    let mut x = x0.to_vec();
    let mut fx = vec![0.0; n];
    system.eval_into(&x, &mut fx);
    let mut iterations = 0;
    let finish = |status, x: Vec<f64>, fx: &[f64], iterations| RefinementResult {
        status,
        root: x,
        residual_norm: max_norm(fx),
        iterations,
        start: x0.to_vec(),
    };

    if fx.iter().any(|v| !v.is_finite()) {
        return finish(RefinementStatus::Diverged, x, &fx, iterations);
    }
    let mut jac = SquareMatrix::zeros(n);
    loop {
        if max_norm(&fx) <= opts.residual_tol {
            return finish(RefinementStatus::Converged, x, &fx, iterations);
        }
        if iterations >= opts.max_iterations {
            return finish(RefinementStatus::NonConverged, x, &fx, iterations);
        }
        let analytic =
            opts.jacobian == JacobianMode::Analytic && system.analytic_jacobian(&x, jac.as_mut_slice());
        if !analytic {
            jac = numeric_jacobian_with(system, &x, &fx);
        }
        let Some(step) = lu_solve(&jac, &fx) else {
            return finish(RefinementStatus::SingularJacobian, x, &fx, iterations);
        };
        for (xi, di) in x.iter_mut().zip(&step) {
            *xi -= di;
        }
        iterations += 1;
        let size = max_norm(&x);
        if !size.is_finite() || size > opts.divergence_bound {
            return finish(RefinementStatus::Diverged, x, &fx, iterations);
        }
        system.eval_into(&x, &mut fx);
        if fx.iter().any(|v| !v.is_finite()) {
            return finish(RefinementStatus::Diverged, x, &fx, iterations);
        }
        if max_norm(&step) <= opts.step_tol {
            let status = if max_norm(&fx) <= opts.residual_tol {
                RefinementStatus::Converged
            } else {
                RefinementStatus::NonConverged
            };
            return finish(status, x, &fx, iterations);
        }
    }
}

/// A refined root that survived duplicate removal.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub coordinates: Vec<f64>,
    /// Coordinates rounded to the dedup precision.
    pub key: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    /// Position of the originating candidate.
    pub source: usize,
}

fn rounded_key(x: &[f64], decimals: u32) -> Vec<f64> {
    let scale = 10f64.powi(decimals as i32);
    // Adding 0.0 folds -0.0 into +0.0.
    x.iter().map(|v| (v * scale).round() / scale + 0.0).collect()
}

/// Drops unconverged results and keeps the first result for each distinct
/// coordinate tuple rounded to `round_decimals` places. `source` is the index
/// into `results`.
pub fn dedupe(results: &[RefinementResult], round_decimals: u32) -> Vec<Solution> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (source, r) in results.iter().enumerate() {
        if !r.converged() || r.root.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let key = rounded_key(&r.root, round_decimals);
        let bits: Vec<u64> = key.iter().map(|v| v.to_bits()).collect();
        if seen.insert(bits) {
            out.push(Solution {
                coordinates: r.root.clone(),
                key,
                residual_norm: r.residual_norm,
                iterations: r.iterations,
                source,
            });
        }
    }
    out
}

/// Same as [`dedupe`] over already-deduplicated solutions.
pub fn dedupe_solutions(solutions: &[Solution], round_decimals: u32) -> Vec<Solution> {
    let mut seen = HashSet::new();
    solutions
        .iter()
        .filter_map(|s| {
            let key = rounded_key(&s.coordinates, round_decimals);
            let bits: Vec<u64> = key.iter().map(|v| v.to_bits()).collect();
            seen.insert(bits).then(|| Solution { key, ..s.clone() })
        })
        .collect()
}

/// Default per-axis slack: `1e-9 * (b_k - a_k)`.
pub fn default_slack(grid: &DomainGrid) -> Vec<f64> {
    grid.axes()
        .iter()
        .map(|a| 1e-9 * (a.upper() - a.lower()))
        .collect()
}

/// Keeps solutions inside the grid's box widened by `slack` (per-axis default when `None`).
pub fn domain_filter(solutions: Vec<Solution>, grid: &DomainGrid, slack: Option<f64>) -> Vec<Solution> {
    let slack = match slack {
        Some(s) => vec![s; grid.dim()],
        None => default_slack(grid),
    };
    solutions
        .into_iter()
        .filter(|s| grid.contains(&s.coordinates, &slack))
        .collect()
}
