//! Epigraph and hypograph indexes for multivariate functional samples.
//!
//! For a curve `x` in a sample of `n` curves with `p` components:
//!
//! * the epigraph index `EI` is one minus the proportion of sample curves
//!   whose components are all everywhere above the matching components of
//!   `x`; the hypograph index `HI` is the proportion entirely below;
//! * the generalized variants `MEI`/`MHI` relax "everywhere" to the
//!   fraction of grid points where the all-components condition holds,
//!   so they average time instead of demanding total domination;
//! * the weighted variants replace the joint condition with a weighted
//!   average of per-dimension univariate indexes (uniform weights or
//!   weights from the leading covariance eigenvalue per dimension);
//! * subset indexes apply `MEI`/`MHI` to a subset of the dimensions.
//!
//! Comparisons are `>=`/`<=` exactly, so every curve participates in its
//! own counts: `EI <= 1 - 1/n`, `HI >= 1/n`, and likewise for `MEI`/`MHI`.
//! The joint `MEI`/`MHI` of a `p`-dimensional sample and its subset
//! indexes are tied together by an inclusion–exclusion identity whose
//! residual [`relation_residual`] vanishes on tie-free samples.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fda::{restrict_dims, MultivariateFunctionalSample};
use crate::linalg;
use crate::scalar::Real;

/// Which index a vector of values represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    Ei,
    Hi,
    Mei,
    Mhi,
    WeightedMei,
    WeightedMhi,
}

/// Per-curve index values in `[0, 1]`, tagged with the index kind and the
/// dimensions that entered the computation (zero-based).
#[derive(Debug, Clone, PartialEq)]
pub struct IndexVector<F: Real> {
    values: Vec<F>,
    kind: IndexKind,
    dims_used: Vec<usize>,
}

impl<F: Real> IndexVector<F> {
    fn new(values: Vec<F>, kind: IndexKind, dims_used: Vec<usize>) -> Self {
        debug_assert!(values
            .iter()
            .all(|v| *v >= -F::epsilon() && *v <= F::one() + F::epsilon()));
        IndexVector {
            values,
            kind,
            dims_used,
        }
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn dims_used(&self) -> &[usize] {
        &self.dims_used
    }

    pub fn into_values(self) -> Vec<F> {
        self.values
    }
}

/// Nonnegative per-dimension weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<F: Real> {
    weights: Vec<F>,
}

impl<F: Real> WeightVector<F> {
    /// Validates nonnegativity and unit sum (to 1e-12).
    pub fn new(weights: Vec<F>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Argument("weight vector must be nonempty".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < F::zero()) {
            return Err(Error::Argument(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let sum: F = weights.iter().copied().sum();
        if (sum - F::one()).abs() > F::of(1e-12) {
            return Err(Error::Argument(format!(
                "weights must sum to 1 within 1e-12, got {sum}"
            )));
        }
        Ok(WeightVector { weights })
    }

    /// Uniform weights `1/p`.
    pub fn uniform(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Argument("weight vector must be nonempty".into()));
        }
        // Normalize explicitly so the sum is exactly 1 even when 1/p is not
        // representable.
        let w = F::one() / F::of_usize(p);
        let mut weights = vec![w; p];
        let sum: F = weights.iter().copied().sum();
        weights[p - 1] += F::one() - sum;
        WeightVector::new(weights)
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Joint multivariate epigraph and hypograph indexes (`EI`, `HI`).
pub fn ei_hi<F: Real>(
    sample: &MultivariateFunctionalSample<F>,
) -> (IndexVector<F>, IndexVector<F>) {
    let (n, p, m) = (sample.n(), sample.p(), sample.m());
    let n_f = F::of_usize(n);
    let dims: Vec<usize> = (0..p).collect();

    let per_curve: Vec<(F, F)> = (0..n)
        .into_par_iter()
        .map(|target| {
            let mut above = 0u64;
            let mut below = 0u64;
            for i in 0..n {
                let mut all_above = true;
                let mut all_below = true;
                'dims: for k in 0..p {
                    let xi = sample.curve_dim(i, k);
                    let xt = sample.curve_dim(target, k);
                    for j in 0..m {
                        if xi[j] < xt[j] {
                            all_above = false;
                        }
                        if xi[j] > xt[j] {
                            all_below = false;
                        }
                        if !all_above && !all_below {
                            break 'dims;
                        }
                    }
                }
                if all_above {
                    above += 1;
                }
                if all_below {
                    below += 1;
                }
            }
            (
                F::one() - F::of_usize(above as usize) / n_f,
                F::of_usize(below as usize) / n_f,
            )
        })
        .collect();

    let ei = per_curve.iter().map(|&(e, _)| e).collect();
    let hi = per_curve.iter().map(|&(_, h)| h).collect();
    (
        IndexVector::new(ei, IndexKind::Ei, dims.clone()),
        IndexVector::new(hi, IndexKind::Hi, dims),
    )
}

/// Joint multivariate generalized indexes (`MEI`, `MHI`): time-averaged
/// versions of `EI`/`HI` through the grid-fraction surrogate of the
/// Lebesgue measure.
pub fn mei_mhi<F: Real>(
    sample: &MultivariateFunctionalSample<F>,
) -> (IndexVector<F>, IndexVector<F>) {
    let dims: Vec<usize> = (0..sample.p()).collect();
    let (mei, mhi) = mei_mhi_values(sample);
    (
        IndexVector::new(mei, IndexKind::Mei, dims.clone()),
        IndexVector::new(mhi, IndexKind::Mhi, dims),
    )
}

/// The raw `MEI`/`MHI` value vectors; grid-point counts are accumulated as
/// integers and divided once, so the result is an exact rational rounded
/// to the scalar type.
fn mei_mhi_values<F: Real>(sample: &MultivariateFunctionalSample<F>) -> (Vec<F>, Vec<F>) {
    let (n, p, m) = (sample.n(), sample.p(), sample.m());
    let denom = F::of_usize(n) * F::of_usize(m);

    let per_curve: Vec<(F, F)> = (0..n)
        .into_par_iter()
        .map(|target| {
            let mut above_points = 0u64;
            let mut below_points = 0u64;
            for i in 0..n {
                for j in 0..m {
                    let mut all_above = true;
                    let mut all_below = true;
                    for k in 0..p {
                        let xi = sample.value(i, k, j);
                        let xt = sample.value(target, k, j);
                        if xi < xt {
                            all_above = false;
                        }
                        if xi > xt {
                            all_below = false;
                        }
                        if !all_above && !all_below {
                            break;
                        }
                    }
                    if all_above {
                        above_points += 1;
                    }
                    if all_below {
                        below_points += 1;
                    }
                }
            }
            (
                F::one() - F::of_usize(above_points as usize) / denom,
                F::of_usize(below_points as usize) / denom,
            )
        })
        .collect();

    (
        per_curve.iter().map(|&(e, _)| e).collect(),
        per_curve.iter().map(|&(_, h)| h).collect(),
    )
}

/// Weighted-average multivariate indexes: per-dimension univariate
/// `MEI`/`MHI` combined with the given weights. Uniform weights give the
/// `uMEI`/`uMHI` variants; covariance-derived weights give `cMEI`/`cMHI`.
pub fn weighted_mei_mhi<F: Real>(
    sample: &MultivariateFunctionalSample<F>,
    weights: &WeightVector<F>,
) -> Result<(IndexVector<F>, IndexVector<F>)> {
    let p = sample.p();
    if weights.len() != p {
        return Err(Error::Argument(format!(
            "expected {p} weights, got {}",
            weights.len()
        )));
    }
    let n = sample.n();
    let mut wmei = vec![F::zero(); n];
    let mut wmhi = vec![F::zero(); n];
    for k in 0..p {
        let w = weights.weights()[k];
        if w == F::zero() {
            continue;
        }
        let restricted = restrict_dims(sample, &[k])?;
        let (mei_k, mhi_k) = mei_mhi_values(&restricted);
        for i in 0..n {
            wmei[i] += w * mei_k[i];
            wmhi[i] += w * mhi_k[i];
        }
    }
    let dims: Vec<usize> = (0..p).collect();
    Ok((
        IndexVector::new(wmei, IndexKind::WeightedMei, dims.clone()),
        IndexVector::new(wmhi, IndexKind::WeightedMhi, dims),
    ))
}

/// Data-driven weights inversely proportional to the largest eigenvalue of
/// each dimension's grid covariance matrix.
pub fn covariance_weights<F: Real>(
    sample: &MultivariateFunctionalSample<F>,
) -> Result<WeightVector<F>> {
    let (n, p, m) = (sample.n(), sample.p(), sample.m());
    if n < 2 {
        return Err(Error::Argument(
            "covariance weights need at least two curves".into(),
        ));
    }

    let mut inverse_leading = Vec::with_capacity(p);
    for k in 0..p {
        // Centered curve matrix of this dimension (n x m).
        let mut mean = vec![F::zero(); m];
        for i in 0..n {
            for (mu, v) in mean.iter_mut().zip(sample.curve_dim(i, k)) {
                *mu += *v;
            }
        }
        for mu in mean.iter_mut() {
            *mu /= F::of_usize(n);
        }
        let mut centered = vec![F::zero(); n * m];
        for i in 0..n {
            for (j, v) in sample.curve_dim(i, k).iter().enumerate() {
                centered[i * m + j] = *v - mean[j];
            }
        }
        let scale = F::of_usize(n - 1);
        let trace: F = centered.iter().map(|v| *v * *v).sum::<F>() / scale;

        // Leading eigenvalue of (1/(n-1)) Xc^T Xc via power iteration; each
        // matvec goes through the n x m factor instead of the m x m matrix.
        let mut projected = vec![F::zero(); n];
        let lambda = linalg::power_iteration_largest(
            m,
            |v, out| {
                for i in 0..n {
                    projected[i] = linalg::dot(&centered[i * m..(i + 1) * m], v);
                }
                for j in 0..m {
                    let mut sum = F::zero();
                    for i in 0..n {
                        sum += centered[i * m + j] * projected[i];
                    }
                    out[j] = sum / scale;
                }
            },
            2000,
            F::of(1e-14),
        )?;

        let floor = trace * F::of(1e-12) + F::min_positive_value();
        if lambda <= floor {
            return Err(Error::Degenerate(format!(
                "dimension {k} has a degenerate covariance (leading eigenvalue {lambda})"
            )));
        }
        inverse_leading.push(F::one() / lambda);
    }

    let total: F = inverse_leading.iter().copied().sum();
    let mut weights: Vec<F> = inverse_leading.iter().map(|&q| q / total).collect();
    // Pin the sum to exactly one against rounding.
    let sum: F = weights.iter().copied().sum();
    weights[p - 1] += F::one() - sum;
    WeightVector::new(weights)
}

/// `MEI`/`MHI` over a subset of dimensions (zero-based, distinct).
pub fn subset_mei_mhi<F: Real>(
    sample: &MultivariateFunctionalSample<F>,
    dims: &[usize],
) -> Result<(IndexVector<F>, IndexVector<F>)> {
    let restricted = restrict_dims(sample, dims)?;
    let (mei, mhi) = mei_mhi_values(&restricted);
    Ok((
        IndexVector::new(mei, IndexKind::Mei, dims.to_vec()),
        IndexVector::new(mhi, IndexKind::Mhi, dims.to_vec()),
    ))
}

/// Residual of the inclusion–exclusion identity tying the joint indexes to
/// the subset hypograph indexes:
///
/// `MHI + (-1)^p MEI
///    - sum_{r=1}^{p-1} sum_{j1<..<jr} (-1)^{r+p+1} MHI_{j1..jr} - (-1)^{p+1}/n`
///
/// For `p = 1` this is `MHI - MEI - 1/n`. The residual is zero whenever no
/// two distinct curves tie on any grid point in any dimension; ties make it
/// nonzero, and it is reported rather than asserted.
pub fn relation_residual<F: Real>(sample: &MultivariateFunctionalSample<F>) -> Vec<F> {
    let (n, p) = (sample.n(), sample.p());
    let (mei, mhi) = mei_mhi_values(sample);

    let sign = |exponent: usize| -> F {
        if exponent.is_multiple_of(2) {
            F::one()
        } else {
            -F::one()
        }
    };
    let sign_mei = sign(p);
    let sign_inv_n = sign(p + 1);
    let inv_n = F::one() / F::of_usize(n);

    let mut residual: Vec<F> = (0..n)
        .map(|i| mhi[i] + sign_mei * mei[i] - sign_inv_n * inv_n)
        .collect();

    // All nonempty proper subsets of the dimensions.
    for mask in 1u32..(1u32 << p) - 1 {
        let dims: Vec<usize> = (0..p).filter(|k| mask >> k & 1 == 1).collect();
        let r = dims.len();
        let restricted = restrict_dims(sample, &dims).expect("subset dims are valid");
        let (_, mhi_subset) = mei_mhi_values(&restricted);
        let s = sign(r + p + 1);
        for i in 0..n {
            residual[i] -= s * mhi_subset[i];
        }
    }
    residual
}
