//! Foundational types for multivariate functional data.
//!
//! A [`MultivariateFunctionalSample`] holds `n` curves with `p` components,
//! all evaluated on one shared [`Grid`] of `m` strictly increasing time
//! points. Time-measure computations are discretized as grid-point
//! fractions: on the equidistant grids used everywhere in this crate the
//! fraction of grid points satisfying a condition is the Riemann
//! approximation of the Lebesgue measure of the condition set divided by
//! the interval length.
//!
//! All types are immutable after construction and safe to share across
//! threads.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Strictly increasing evaluation grid over a compact interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<F: Real> {
    points: Vec<F>,
}

impl<F: Real> Grid<F> {
    /// Builds a grid from its points.
    ///
    /// Requires at least two finite, strictly increasing values.
    pub fn new(points: Vec<F>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Argument(format!(
                "grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("grid contains non-finite values".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument(
                "grid points must be strictly increasing".into(),
            ));
        }
        Ok(Grid { points })
    }

    /// `m` equidistant points covering `[a, b]` inclusive.
    pub fn equidistant(a: F, b: F, m: usize) -> Result<Self> {
        if m < 2 || b <= a {
            return Err(Error::Argument(format!(
                "equidistant grid needs m >= 2 and b > a (m = {m})"
            )));
        }
        let step = (b - a) / F::of_usize(m - 1);
        let mut points: Vec<F> = (0..m).map(|j| a + step * F::of_usize(j)).collect();
        // Pin the right endpoint so the interval is exactly [a, b].
        points[m - 1] = b;
        Grid::new(points)
    }

    pub fn points(&self) -> &[F] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> F {
        self.points[0]
    }

    pub fn last(&self) -> F {
        self.points[self.points.len() - 1]
    }

    /// Length of the underlying interval, `last - first`.
    pub fn interval_length(&self) -> F {
        self.last() - self.first()
    }
}

/// Fraction of grid points flagged by `mask`, the discrete stand-in for
/// "measure of the time set over measure of the interval".
///
/// Returns 0 iff the mask is all false and 1 iff it is all true.
pub fn fraction_of_grid<F: Real>(mask: &[bool], grid: &Grid<F>) -> Result<F> {
    if mask.len() != grid.len() {
        return Err(Error::Dimension(format!(
            "mask has {} entries but grid has {} points",
            mask.len(),
            grid.len()
        )));
    }
    let count = mask.iter().filter(|&&b| b).count();
    Ok(F::of_usize(count) / F::of_usize(mask.len()))
}

/// `n` curves × `p` dimensions × `m` grid evaluations plus optional
/// ground-truth cluster labels.
///
/// Values are stored row-major as `(curve, dimension, grid point)`; labels,
/// when present, are cluster ids in `1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateFunctionalSample<F: Real> {
    values: Vec<F>,
    n: usize,
    p: usize,
    grid: Grid<F>,
    labels: Option<Vec<usize>>,
}

impl<F: Real> MultivariateFunctionalSample<F> {
    /// Builds a sample, validating shapes, finiteness, and label range.
    pub fn new(
        values: Vec<F>,
        n: usize,
        p: usize,
        grid: Grid<F>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let m = grid.len();
        if n == 0 || p == 0 {
            return Err(Error::Argument(format!(
                "sample needs n >= 1 and p >= 1, got n = {n}, p = {p}"
            )));
        }
        if values.len() != n * p * m {
            return Err(Error::Dimension(format!(
                "expected {} values for (n, p, m) = ({n}, {p}, {m}), got {}",
                n * p * m,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("sample contains non-finite values".into()));
        }
        if let Some(ref labels) = labels {
            if labels.len() != n {
                return Err(Error::Dimension(format!(
                    "expected {n} labels, got {}",
                    labels.len()
                )));
            }
            if labels.contains(&0) {
                return Err(Error::Argument("labels must be in 1..=K".into()));
            }
        }
        Ok(MultivariateFunctionalSample {
            values,
            n,
            p,
            grid,
            labels,
        })
    }

    /// Number of curves.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of dimensions per curve.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of grid points.
    pub fn m(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &Grid<F> {
        &self.grid
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// Evaluations of dimension `dim` of curve `curve` on the grid.
    pub fn curve_dim(&self, curve: usize, dim: usize) -> &[F] {
        let m = self.m();
        let start = (curve * self.p + dim) * m;
        &self.values[start..start + m]
    }

    /// Single evaluation `x_{curve, dim}(t_point)`.
    #[inline]
    pub fn value(&self, curve: usize, dim: usize, point: usize) -> F {
        self.values[(curve * self.p + dim) * self.m() + point]
    }

    /// Replaces the labels, keeping everything else.
    pub fn with_labels(mut self, labels: Option<Vec<usize>>) -> Result<Self> {
        if let Some(ref l) = labels {
            if l.len() != self.n {
                return Err(Error::Dimension(format!(
                    "expected {} labels, got {}",
                    self.n,
                    l.len()
                )));
            }
            if l.contains(&0) {
                return Err(Error::Argument("labels must be in 1..=K".into()));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    /// Applies `f(curve, dim, point, value) -> value` pointwise, producing a
    /// new sample on the same grid with the same labels.
    pub fn map_values(&self, mut f: impl FnMut(usize, usize, usize, F) -> F) -> Result<Self> {
        let m = self.m();
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.n {
            for k in 0..self.p {
                for j in 0..m {
                    values.push(f(i, k, j, self.value(i, k, j)));
                }
            }
        }
        MultivariateFunctionalSample::new(values, self.n, self.p, self.grid.clone(), self.labels.clone())
    }
}

/// Restricts a sample to a subset of dimensions, in the order given.
///
/// `dims` are zero-based dimension indices; they must be distinct, nonempty,
/// and in range. Grid and labels are carried through unchanged.
pub fn restrict_dims<F: Real>(
    sample: &MultivariateFunctionalSample<F>,
    dims: &[usize],
) -> Result<MultivariateFunctionalSample<F>> {
    if dims.is_empty() {
        return Err(Error::Argument("dims must be nonempty".into()));
    }
    if let Some(&bad) = dims.iter().find(|&&d| d >= sample.p()) {
        return Err(Error::Argument(format!(
            "dimension index {bad} out of range for p = {}",
            sample.p()
        )));
    }
    let mut seen = vec![false; sample.p()];
    for &d in dims {
        if seen[d] {
            return Err(Error::Argument(format!("duplicate dimension index {d}")));
        }
        seen[d] = true;
    }

    let m = sample.m();
    let mut values = Vec::with_capacity(sample.n() * dims.len() * m);
    for i in 0..sample.n() {
        for &d in dims {
            values.extend_from_slice(sample.curve_dim(i, d));
        }
    }
    MultivariateFunctionalSample::new(
        values,
        sample.n(),
        dims.len(),
        sample.grid().clone(),
        sample.labels().map(|l| l.to_vec()),
    )
}

/// Cluster assignment of `n` items into clusters `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Builds a partition; every id must lie in `1..=k`.
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Argument("k must be positive".into()));
        }
        if assignment.is_empty() {
            return Err(Error::Argument("partition must be nonempty".into()));
        }
        if let Some(&bad) = assignment.iter().find(|&&a| a == 0 || a > k) {
            return Err(Error::Argument(format!(
                "cluster id {bad} outside 1..={k}"
            )));
        }
        Ok(Partition { assignment, k })
    }

    /// Builds a partition from labels, inferring `k` as the largest id.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let k = labels.iter().copied().max().unwrap_or(0);
        Partition::new(labels.to_vec(), k)
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Renames cluster ids to `1, 2, ...` in order of first appearance.
    /// Two partitions that differ only by a relabeling canonicalize equal.
    pub fn canonicalize(&self) -> Partition {
        let mut map = vec![0usize; self.k + 1];
        let mut next = 0usize;
        let assignment = self
            .assignment
            .iter()
            .map(|&a| {
                if map[a] == 0 {
                    next += 1;
                    map[a] = next;
                }
                map[a]
            })
            .collect();
        Partition {
            assignment,
            k: self.k,
        }
    }
}
