//! Spectral clustering in the normalized-cut embedding.
//!
//! Gaussian affinity with zero diagonal, symmetric normalization
//! `M = D^{-1/2} W D^{-1/2}`, the `k` leading eigenvectors of `M`
//! (equivalently the `k` smallest of `L = I - M`), unit-normalized rows,
//! and Euclidean k-means on the embedded rows.

use crate::error::{Error, Result};
use crate::fda::Partition;
use crate::linalg;
use crate::scalar::Real;

use super::distance::euclidean;
use super::kernel::median_pairwise;
use super::{FeatureMatrix, Hyperparams};

/// Spectral clustering into `k` groups.
///
/// `sigma = None` takes the affinity width from a quarter of the median
/// pairwise distance: the median sets the scale, and the factor keeps
/// locally connected but globally separated shapes (concentric rings) from
/// being bridged by the affinity.
pub fn spectral<F: Real>(
    data: &FeatureMatrix<F>,
    k: usize,
    sigma: Option<f64>,
    seed: u64,
    hyper: &Hyperparams,
) -> Result<Partition> {
    let n = data.n_rows();
    if k == 0 || k > n {
        return Err(Error::Argument(format!(
            "spectral clustering needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let sigma = match sigma {
        Some(s) if s > 0.0 => F::of(s),
        Some(s) => {
            return Err(Error::Argument(format!(
                "affinity width must be positive, got {s}"
            )))
        }
        None => {
            let med = median_pairwise(data);
            if med <= F::zero() {
                return Err(Error::Degenerate(
                    "median pairwise distance is zero; all points coincide".into(),
                ));
            }
            med / F::of(4.0)
        }
    };

    // Affinity with zero diagonal.
    let denom = F::of(2.0) * sigma * sigma;
    let mut affinity = vec![F::zero(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(data.row(i), data.row(j));
            let w = (-(d * d) / denom).exp();
            affinity[i * n + j] = w;
            affinity[j * n + i] = w;
        }
    }

    // Symmetric normalization; a vertex with (numerically) zero degree has
    // no connection the embedding could preserve.
    let mut inv_sqrt_degree = vec![F::zero(); n];
    for i in 0..n {
        let degree: F = affinity[i * n..(i + 1) * n].iter().copied().sum();
        if degree <= F::of(1e-300) {
            return Err(Error::Degenerate(format!(
                "vertex {i} is isolated under sigma = {sigma}; increase sigma"
            )));
        }
        inv_sqrt_degree[i] = F::one() / degree.sqrt();
    }
    for i in 0..n {
        for j in 0..n {
            affinity[i * n + j] = affinity[i * n + j] * inv_sqrt_degree[i] * inv_sqrt_degree[j];
        }
    }

    let (_, eigvecs) = linalg::top_eigenpairs_symmetric(&affinity, n, k, 600, F::of(1e-12))?;

    // Embed as rows and normalize each to unit length.
    let mut embedding = vec![F::zero(); n * k];
    for i in 0..n {
        for r in 0..k {
            embedding[i * k + r] = eigvecs[r * n + i];
        }
        let norm = linalg::norm2(&embedding[i * k..(i + 1) * k]);
        if norm > F::zero() {
            for v in embedding[i * k..(i + 1) * k].iter_mut() {
                *v /= norm;
            }
        }
    }
    let names = (0..k).map(|r| format!("e{}", r + 1)).collect();
    let embedded = FeatureMatrix::new(embedding, n, k, names)?;
    let out = super::kmeans::kmeans(&embedded, k, super::Metric::Euclidean, seed, hyper)?;
    Ok(out.partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::test_support::{blobs, rings};
    use crate::metrics;

    fn defaults() -> Hyperparams {
        Hyperparams::default()
    }

    #[test]
    fn disconnected_blocks_are_recovered_exactly() {
        // Affinity across these blobs underflows to zero: two exact blocks.
        let (data, truth) = blobs(12, &[(0.0, 0.0), (1000.0, 1000.0)], 0.4, 5);
        let part = spectral(&data, 2, Some(1.0), 3, &defaults()).unwrap();
        let truth = Partition::from_labels(&truth).unwrap();
        let report = metrics::evaluate(&part, &truth).unwrap();
        assert_eq!(report.rand_index, 1.0);
    }

    #[test]
    fn separated_blobs_with_auto_sigma() {
        let (data, truth) = blobs(20, &[(0.0, 0.0), (10.0, 10.0)], 0.5, 13);
        let part = spectral(&data, 2, None, 7, &defaults()).unwrap();
        let truth = Partition::from_labels(&truth).unwrap();
        let report = metrics::evaluate(&part, &truth).unwrap();
        assert_eq!(report.rand_index, 1.0);
    }

    #[test]
    fn concentric_rings_with_auto_sigma() {
        let (data, truth) = rings(40, 1.0, 5.0);
        let part = spectral(&data, 2, None, 19, &defaults()).unwrap();
        let truth = Partition::from_labels(&truth).unwrap();
        let report = metrics::evaluate(&part, &truth).unwrap();
        assert_eq!(report.rand_index, 1.0, "rings not separated");
    }

    #[test]
    fn isolated_vertex_is_a_degeneracy_error() {
        let mut data = vec![0.0, 0.0, 0.1, 0.1, 0.2, 0.0];
        data.extend_from_slice(&[1e6, 1e6]);
        let fm = FeatureMatrix::new(data, 4, 2, vec!["x".into(), "y".into()]).unwrap();
        let err = spectral(&fm, 2, Some(0.5), 1, &defaults()).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
        assert!(err.to_string().contains("sigma"));
    }

    #[test]
    fn deterministic_given_seed() {
        let (data, _) = blobs(15, &[(0.0, 0.0), (4.0, 0.0)], 0.9, 29);
        let a = spectral(&data, 2, None, 11, &defaults()).unwrap();
        let b = spectral(&data, 2, None, 11, &defaults()).unwrap();
        assert_eq!(a, b);
    }
}
