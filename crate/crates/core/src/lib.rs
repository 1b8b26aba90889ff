//! # allroots
//!
//! Finds every real solution of a square nonlinear system `F(x) = 0` inside a
//! box `[a_1,b_1] x ... x [a_n,b_n]`.
//!
//! The box is sampled on a uniform grid and every function is evaluated at
//! every node. A cell is a candidate when each function changes sign between
//! the cell's lower vertex and one of its axis neighbours. Candidates are then
//! polished with Newton-Raphson, merged by rounding and filtered back to the
//! box. Cost and memory grow like `N^n`, so the approach suits systems of up
//! to four or five variables.
//!
//! ```
//! use allroots::{find_all_roots, DomainGrid, Problem, SolverConfig};
//!
//! let problem = Problem::new("circle-line", &["x", "y"], &["x^2+y^2-1", "x-y"]).unwrap();
//! let cfg = SolverConfig::new(DomainGrid::uniform(2, -2.0, 2.0, 101).unwrap());
//! let roots = find_all_roots(&problem, &cfg).unwrap();
//! assert_eq!(roots.len(), 2);
//! ```

pub mod benchmarks;
pub mod detect;
pub mod expr;
pub mod grid;
pub mod refine;
pub mod solve;

pub use benchmarks::{builtin_problem, run_benchmark, run_benchmark_with, Benchmark, BenchmarkReport};
pub use detect::{
    detect_candidates, evaluate_grid, intersect_masks, sign_change_mask, Candidate, CandidateSet,
    DetectionMode, SignChangeMask,
};
pub use expr::{ExprError, Expression, VariableSet};
pub use grid::{linear_to_multi, multi_to_linear, AxisSpec, DomainGrid, GridError, ValueTensor};
pub use refine::{
    dedupe, domain_filter, newton_raphson, numeric_jacobian, EquationSystem, JacobianMode, NewtonOptions,
    RefinementResult, RefinementStatus, Solution, SquareMatrix,
};
pub use solve::{find_all_roots, Problem, RefinementTally, SolutionSet, SolveError, SolverConfig};
