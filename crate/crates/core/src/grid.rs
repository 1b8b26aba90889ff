//! Box domains, their uniform discretization and row-major index arithmetic.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("axis {axis}: lower bound {lower} must be finite and below upper bound {upper}")]
    InvalidBounds { axis: usize, lower: f64, upper: f64 },
    #[error("axis {axis}: at least 3 points required, got {points}")]
    TooFewPoints { axis: usize, points: usize },
    #[error("axis {axis}: spacing is not a positive finite number")]
    DegenerateSpacing { axis: usize },
    #[error("grid needs at least one axis")]
    NoAxes,
    #[error("grid with dims {dims:?} has too many nodes to index")]
    TooLarge { dims: Vec<usize> },
    #[error("index {index:?} out of bounds for dims {dims:?}")]
    IndexOutOfBounds { index: Vec<usize>, dims: Vec<usize> },
    #[error("linear index {index} out of bounds for {len} elements")]
    LinearOutOfBounds { index: usize, len: usize },
    #[error("index has {found} components, expected {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("tensor data has {found} values, dims require {expected}")]
    DataLength { expected: usize, found: usize },
}

/// One axis `[lower, upper]` sampled at `points` equally spaced nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    lower: f64,
    upper: f64,
    points: usize,
}

impl AxisSpec {
    pub fn new(lower: f64, upper: f64, points: usize) -> Result<Self, GridError> {
        Self::validated(0, lower, upper, points)
    }

    fn validated(axis: usize, lower: f64, upper: f64, points: usize) -> Result<Self, GridError> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(GridError::InvalidBounds { axis, lower, upper });
        }
        if points < 3 {
            return Err(GridError::TooFewPoints { axis, points });
        }
        let spec = Self { lower, upper, points };
        let h = spec.spacing();
        if !(h.is_finite() && h > 0.0) {
            return Err(GridError::DegenerateSpacing { axis });
        }
        Ok(spec)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        spacing(self)
    }

    /// Coordinate of node `i`, computed as `lower + i * spacing`.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.lower + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }
}

/// Grid spacing `(b - a) / (N - 1)`.
pub fn spacing(axis: &AxisSpec) -> f64 {
    (axis.upper - axis.lower) / (axis.points - 1) as f64
}

/// Row-major strides for `dims`, or `None` when the element count overflows.
pub fn strides_for(dims: &[usize]) -> Option<Vec<usize>> {
    let mut strides = vec![1usize; dims.len()];
    let mut acc = 1usize;
    for k in (0..dims.len()).rev() {
        strides[k] = acc;
        acc = acc.checked_mul(dims[k])?;
    }
    Some(strides)
}

pub fn multi_to_linear(idx: &[usize], dims: &[usize]) -> Result<usize, GridError> {
    if idx.len() != dims.len() {
        return Err(GridError::RankMismatch {
            expected: dims.len(),
            found: idx.len(),
        });
    }
    if idx.iter().zip(dims).any(|(i, d)| i >= d) {
        return Err(GridError::IndexOutOfBounds {
            index: idx.to_vec(),
            dims: dims.to_vec(),
        });
    }
    Ok(idx.iter().zip(dims).fold(0usize, |acc, (i, d)| acc * d + i))
}

pub fn linear_to_multi(lin: usize, dims: &[usize]) -> Result<Vec<usize>, GridError> {
    let len = dims.iter().product::<usize>();
    if lin >= len {
        return Err(GridError::LinearOutOfBounds { index: lin, len });
    }
    let mut out = vec![0; dims.len()];
    unravel_into(lin, dims, &mut out);
    Ok(out)
}

/// Unchecked row-major unravel used on hot paths.
#[inline]
pub(crate) fn unravel_into(mut lin: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = lin % dims[k];
        lin /= dims[k];
    }
}

/// Uniform grid over the box `[a_1,b_1] x ... x [a_n,b_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainGrid {
    axes: Vec<AxisSpec>,
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl DomainGrid {
    pub fn new(axes: Vec<AxisSpec>) -> Result<Self, GridError> {
        if axes.is_empty() {
            return Err(GridError::NoAxes);
        }
        let axes = axes
            .into_iter()
            .enumerate()
            .map(|(k, a)| AxisSpec::validated(k, a.lower, a.upper, a.points))
            .collect::<Result<Vec<_>, _>>()?;
        let dims: Vec<usize> = axes.iter().map(|a| a.points).collect();
        let strides = strides_for(&dims).ok_or_else(|| GridError::TooLarge { dims: dims.clone() })?;
        Ok(Self { axes, dims, strides })
    }

    /// Builds a grid from `(lower, upper, points)` triples.
    pub fn from_bounds(bounds: &[(f64, f64, usize)]) -> Result<Self, GridError> {
        let axes = bounds
            .iter()
            .enumerate()
            .map(|(k, &(a, b, n))| AxisSpec::validated(k, a, b, n))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(axes)
    }

    /// Same bounds and point count on every one of `dim` axes.
    pub fn uniform(dim: usize, lower: f64, upper: f64, points: usize) -> Result<Self, GridError> {
        Self::from_bounds(&vec![(lower, upper, points); dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    /// Node counts per axis.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn node_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Cell counts per axis (`N_k - 1`): the stationary lattice drops the last node.
    pub fn cell_dims(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d - 1).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.dims.iter().map(|d| d - 1).product()
    }

    /// Same grid with every axis resampled at `points` nodes.
    pub fn with_points(&self, points: usize) -> Result<Self, GridError> {
        let bounds: Vec<_> = self.axes.iter().map(|a| (a.lower, a.upper, points)).collect();
        Self::from_bounds(&bounds)
    }

    pub fn node_coordinates(&self, idx: &[usize]) -> Result<Vec<f64>, GridError> {
        multi_to_linear(idx, &self.dims)?;
        Ok(self.node_unchecked(idx))
    }

    #[inline]
    pub(crate) fn node_unchecked(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.axes)
            .map(|(&i, axis)| axis.node(i))
            .collect()
    }

    /// Writes the coordinates of linear node `lin` into `point`.
    #[inline]
    pub(crate) fn node_at_linear(&self, lin: usize, idx: &mut [usize], point: &mut [f64]) {
        unravel_into(lin, &self.dims, idx);
        for k in 0..idx.len() {
            point[k] = self.axes[k].node(idx[k]);
        }
    }

    pub fn contains(&self, x: &[f64], slack: &[f64]) -> bool {
        x.len() == self.axes.len()
            && x.iter()
                .zip(&self.axes)
                .zip(slack)
                .all(|((&v, a), &s)| v >= a.lower - s && v <= a.upper + s)
    }
}

/// Dense row-major tensor of one function's values.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTensor {
    dims: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<f64>,
}

impl ValueTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self, GridError> {
        let strides = strides_for(&dims).ok_or_else(|| GridError::TooLarge { dims: dims.clone() })?;
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(GridError::DataLength {
                expected,
                found: data.len(),
            });
        }
        Ok(Self { dims, strides, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, idx: &[usize]) -> Result<f64, GridError> {
        Ok(self.data[multi_to_linear(idx, &self.dims)?])
    }

    pub fn get_linear(&self, lin: usize) -> Result<f64, GridError> {
        self.data.get(lin).copied().ok_or(GridError::LinearOutOfBounds {
            index: lin,
            len: self.data.len(),
        })
    }
}
