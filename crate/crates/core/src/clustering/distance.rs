//! Pairwise distances and the pooled-covariance whitening transform.

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

use super::FeatureMatrix;

/// Distance geometry for the k-means family and the distance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    /// Mahalanobis under the pooled covariance of all rows.
    Mahalanobis,
}

/// Symmetric distance matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<F: Real> {
    data: Vec<F>,
    n: usize,
}

impl<F: Real> DistanceMatrix<F> {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.n + j]
    }

    /// Condensed upper triangle in row-major pair order
    /// `(0,1), (0,2), ..., (n-2, n-1)`.
    pub fn condensed(&self) -> Vec<F> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in i + 1..self.n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Median of the off-diagonal distances (upper triangle); the default
    /// bandwidth heuristic for Gaussian kernels and affinities.
    pub fn median_offdiagonal(&self) -> F {
        let mut d = self.condensed();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        if d.is_empty() {
            return F::zero();
        }
        let mid = d.len() / 2;
        if d.len() % 2 == 1 {
            d[mid]
        } else {
            (d[mid - 1] + d[mid]) / F::of(2.0)
        }
    }
}

pub(crate) fn euclidean<F: Real>(a: &[F], b: &[F]) -> F {
    let mut sum = F::zero();
    for (x, y) in a.iter().zip(b) {
        let d = *x - *y;
        sum += d * d;
    }
    sum.sqrt()
}

/// Pooled covariance of all rows.
fn pooled_covariance<F: Real>(data: &FeatureMatrix<F>) -> Vec<F> {
    let (n, q) = (data.n_rows(), data.n_cols());
    let mut mean = vec![F::zero(); q];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(data.row(i)) {
            *m += *v;
        }
    }
    for m in mean.iter_mut() {
        *m /= F::of_usize(n);
    }
    let mut cov = vec![F::zero(); q * q];
    for i in 0..n {
        let row = data.row(i);
        for a in 0..q {
            let da = row[a] - mean[a];
            for b in 0..q {
                cov[a * q + b] += da * (row[b] - mean[b]);
            }
        }
    }
    let denom = F::of_usize(n.saturating_sub(1).max(1));
    for v in cov.iter_mut() {
        *v /= denom;
    }
    cov
}

/// Rows mapped to the whitened coordinates `L^{-1} (x - mean)` where
/// `cov = L L^T`; Euclidean geometry there equals Mahalanobis geometry on
/// the original rows.
///
/// Index features can be nearly collinear, so a factorization failure is
/// retried once with a `1e-8 * trace / q` ridge on the diagonal; a
/// covariance still singular after the ridge is a numerical error.
pub(crate) fn whiten<F: Real>(data: &FeatureMatrix<F>) -> Result<FeatureMatrix<F>> {
    let (n, q) = (data.n_rows(), data.n_cols());
    let mut cov = pooled_covariance(data);
    let factor = match linalg::cholesky(&cov, q) {
        Ok(f) => f,
        Err(_) => {
            let trace: F = (0..q).map(|a| cov[a * q + a]).sum();
            let ridge = F::of(1e-8) * trace / F::of_usize(q);
            for a in 0..q {
                cov[a * q + a] += ridge;
            }
            linalg::cholesky(&cov, q).map_err(|e| {
                Error::Numerical(format!(
                    "pooled covariance is singular even after regularization: {e}"
                ))
            })?
        }
    };
    let mut mean = vec![F::zero(); q];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(data.row(i)) {
            *m += *v;
        }
    }
    for m in mean.iter_mut() {
        *m /= F::of_usize(n);
    }

    let mut out = Vec::with_capacity(n * q);
    let mut centered = vec![F::zero(); q];
    for i in 0..n {
        for (c, (v, m)) in centered.iter_mut().zip(data.row(i).iter().zip(&mean)) {
            *c = *v - *m;
        }
        out.extend(linalg::forward_substitute(&factor, q, &centered));
    }
    FeatureMatrix::new(out, n, q, data.column_names().to_vec())
}

/// Pairwise distances between all rows under the chosen metric.
///
/// Mahalanobis uses the pooled covariance of all `n` rows; a covariance
/// still singular after regularization is a numerical error.
pub fn pairwise_distances<F: Real>(
    data: &FeatureMatrix<F>,
    metric: Metric,
) -> Result<DistanceMatrix<F>> {
    let source = match metric {
        Metric::Euclidean => data.clone(),
        Metric::Mahalanobis => whiten(data)?,
    };
    let n = source.n_rows();
    let mut out = vec![F::zero(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(source.row(i), source.row(j));
            out[i * n + j] = d;
            out[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { data: out, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[f64]]) -> FeatureMatrix<f64> {
        let q = rows[0].len();
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        let names = (0..q).map(|i| format!("c{i}")).collect();
        FeatureMatrix::new(data, rows.len(), q, names).unwrap()
    }

    #[test]
    fn identical_rows_have_zero_distance() {
        let m = matrix(&[&[1.0, 2.0], &[1.0, 2.0], &[0.0, 0.0]]);
        let d = pairwise_distances(&m, Metric::Euclidean).unwrap();
        assert_eq!(d.get(0, 1), 0.0);
        assert_eq!(d.get(1, 0), 0.0);
    }

    #[test]
    fn three_four_five() {
        let m = matrix(&[&[0.0, 0.0], &[3.0, 4.0]]);
        let d = pairwise_distances(&m, Metric::Euclidean).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn mahalanobis_on_whitened_data_is_euclidean() {
        // Correlated cloud; whiten it, then Mahalanobis distances on the
        // whitened rows must agree with plain Euclidean ones there.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 40;
        let mut data = Vec::new();
        for _ in 0..n {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            data.push(3.0 * a + 0.5 * b);
            data.push(a - 0.2 * b);
        }
        let m = FeatureMatrix::new(data, n, 2, vec!["a".into(), "b".into()]).unwrap();
        let white = whiten(&m).unwrap();
        let maha = pairwise_distances(&white, Metric::Mahalanobis).unwrap();
        let eucl = pairwise_distances(&white, Metric::Euclidean).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (maha.get(i, j) - eucl.get(i, j)).abs() < 1e-10,
                    "({i},{j}): {} vs {}",
                    maha.get(i, j),
                    eucl.get(i, j)
                );
            }
        }
    }

    #[test]
    fn symmetric_nonnegative_zero_diagonal() {
        let m = matrix(&[&[0.1, 0.9], &[0.4, 0.2], &[0.8, 0.8], &[0.3, 0.3]]);
        for metric in [Metric::Euclidean, Metric::Mahalanobis] {
            let d = pairwise_distances(&m, metric).unwrap();
            for i in 0..4 {
                assert_eq!(d.get(i, i), 0.0);
                for j in 0..4 {
                    assert!(d.get(i, j) >= 0.0);
                    assert_eq!(d.get(i, j), d.get(j, i));
                }
            }
        }
    }

    #[test]
    fn collinear_features_take_the_ridge_path() {
        // Second column is an exact copy of the first: the plain covariance
        // is singular and whitening must fall back to the ridge.
        let rows: Vec<f64> = vec![0.1, 0.1, 0.5, 0.5, 0.9, 0.9, 0.3, 0.3];
        let m = FeatureMatrix::new(rows, 4, 2, vec!["a".into(), "b".into()]).unwrap();
        let d = pairwise_distances(&m, Metric::Mahalanobis).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(d.get(i, j).is_finite());
            }
        }
        assert!(d.get(0, 1) > 0.0);
    }

    #[test]
    fn median_heuristic_on_a_known_set() {
        let m = matrix(&[&[0.0], &[1.0], &[3.0]]);
        let d = pairwise_distances(&m, Metric::Euclidean).unwrap();
        // Distances: 1, 3, 2 -> median 2.
        assert_eq!(d.median_offdiagonal(), 2.0);
    }
}
