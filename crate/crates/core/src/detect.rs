//! Sign-change detection over the node grid.
//!
//! Every function is evaluated once at every node. A cell is identified by its
//! lower vertex `p`; its probed vertex set is `p` together with the `n` axis
//! neighbours `p + e_k`. Because the perturbation along each axis equals the
//! grid spacing, the displaced lattice is just the node tensor shifted by one
//! stride, so no second evaluation pass is needed.

use rayon::prelude::*;

use crate::grid::{unravel_into, DomainGrid, ValueTensor};
use crate::solve::Problem;

const CHUNK: usize = 4096;

/// How a cell is judged to contain a zero of one function.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum DetectionMode {
    /// Sign of the full product `f(p) * prod_k f(p + e_k)`. Misses cells where
    /// an even number of neighbours flip sign.
    StrictPaper,
    /// Any single pair `f(p), f(p + e_k)` of opposite signs.
    #[default]
    Pairwise,
}

impl DetectionMode {
    pub fn name(self) -> &'static str {
        match self {
            DetectionMode::StrictPaper => "strict_paper",
            DetectionMode::Pairwise => "pairwise",
        }
    }
}

impl std::str::FromStr for DetectionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict_paper" | "strict" => Ok(DetectionMode::StrictPaper),
            "pairwise" => Ok(DetectionMode::Pairwise),
            other => Err(format!(
                "unknown detection mode `{other}` (expected `pairwise` or `strict_paper`)"
            )),
        }
    }
}

/// Per-cell flags for one function, laid out row-major over the cell dims.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignChangeMask {
    dims: Vec<usize>,
    flags: Vec<bool>,
}

impl SignChangeMask {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn is_flagged(&self, cell: usize) -> bool {
        self.flags[cell]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Lower-vertex multi-index of the cell.
    pub index: Vec<usize>,
    pub coordinates: Vec<f64>,
}

/// Cells flagged by every function, in ascending row-major cell order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateSet {
    pub entries: Vec<Candidate>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Candidate> {
        self.entries.iter()
    }
}

/// Values of every function of `problem` at every node of `grid`.
///
/// # Panics
///
/// If the problem and grid dimensions differ.
pub fn evaluate_grid(problem: &Problem, grid: &DomainGrid) -> Vec<ValueTensor> {
    assert_eq!(
        problem.dim(),
        grid.dim(),
        "problem has {} variables but grid has {} axes",
        problem.dim(),
        grid.dim()
    );
    let n = grid.dim();
    problem
        .functions()
        .iter()
        .map(|f| {
            let mut data = vec![0.0; grid.node_count()];
            data.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
                let mut idx = vec![0usize; n];
                let mut point = vec![0.0; n];
                let base = c * CHUNK;
                for (j, slot) in out.iter_mut().enumerate() {
                    grid.node_at_linear(base + j, &mut idx, &mut point);
                    *slot = f.evaluate(&point);
                }
            });
            ValueTensor::new(grid.dims().to_vec(), data).expect("dims match node count")
        })
        .collect()
}

/// Flags every cell whose probed vertices show a sign change of the tensor's function.
///
/// Exact zeros flag the cell in both modes. Non-finite values never produce a
/// flag: `StrictPaper` skips the whole cell, `Pairwise` skips only the pairs
/// that touch them.
pub fn sign_change_mask(tensor: &ValueTensor, mode: DetectionMode) -> SignChangeMask {
    let dims: Vec<usize> = tensor.dims().iter().map(|d| d.saturating_sub(1)).collect();
    let cells: usize = dims.iter().product();
    let strides = tensor.strides();
    let data = tensor.data();
    let n = dims.len();

    let mut flags = vec![false; cells];
    flags.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
        let mut idx = vec![0usize; n];
        let base = c * CHUNK;
        for (j, slot) in out.iter_mut().enumerate() {
            unravel_into(base + j, &dims, &mut idx);
            let node: usize = idx.iter().zip(strides).map(|(i, s)| i * s).sum();
            let origin = data[node];
            let neighbours = strides.iter().map(|s| data[node + s]);
            *slot = match mode {
                DetectionMode::StrictPaper => strict_flag(origin, neighbours),
                DetectionMode::Pairwise => pairwise_flag(origin, neighbours),
            };
        }
    });
    SignChangeMask { dims, flags }
}

/// Product-sign test. The sign of the product is taken from the parity of
/// negative factors so that underflow or overflow of the product cannot hide it.
/// A cell whose probed values are all negative is not a sign change even when
/// the factor count is odd.
fn strict_flag(origin: f64, neighbours: impl Iterator<Item = f64>) -> bool {
    if !origin.is_finite() {
        return false;
    }
    let mut negatives = usize::from(origin < 0.0);
    let mut total = 1;
    let mut zero = origin == 0.0;
    for v in neighbours {
        if !v.is_finite() {
            return false;
        }
        zero |= v == 0.0;
        negatives += usize::from(v < 0.0);
        total += 1;
    }
    zero || (negatives % 2 == 1 && negatives < total)
}

fn pairwise_flag(origin: f64, neighbours: impl Iterator<Item = f64>) -> bool {
    if origin == 0.0 {
        return true;
    }
    let origin_ok = origin.is_finite();
    let mut flagged = false;
    for v in neighbours {
        if v == 0.0 {
            return true;
        }
        if origin_ok && v.is_finite() && (v < 0.0) != (origin < 0.0) {
            flagged = true;
        }
    }
    flagged
}

/// Intersects per-function masks and attaches node coordinates.
///
/// # Panics
///
/// If the masks do not share dims or the grid's cell dims differ from them.
pub fn intersect_masks(masks: &[SignChangeMask], grid: &DomainGrid) -> CandidateSet {
    let Some(first) = masks.first() else {
        return CandidateSet::default();
    };
    assert!(
        masks.iter().all(|m| m.dims == first.dims),
        "all masks must share dims"
    );
    assert_eq!(first.dims, grid.cell_dims(), "mask dims must match grid cells");
    let dims = &first.dims;
    let entries = (0..first.flags.len())
        .into_par_iter()
        .filter(|&cell| masks.iter().all(|m| m.flags[cell]))
        .map(|cell| {
            let mut index = vec![0usize; dims.len()];
            unravel_into(cell, dims, &mut index);
            let coordinates = grid.node_unchecked(&index);
            Candidate { index, coordinates }
        })
        .collect();
    CandidateSet { entries }
}

/// Runs the whole detection stage: evaluate, mask and intersect.
pub fn detect_candidates(problem: &Problem, grid: &DomainGrid, mode: DetectionMode) -> CandidateSet {
    let tensors = evaluate_grid(problem, grid);
    let masks: Vec<_> = tensors.iter().map(|t| sign_change_mask(t, mode)).collect();
    intersect_masks(&masks, grid)
}
