//! Multivariate clustering over index feature matrices.
//!
//! Four families cover the benchmark method grid: agglomerative
//! hierarchical clustering with five linkages, Lloyd k-means under
//! Euclidean or Mahalanobis geometry, kernel k-means with Gaussian or
//! polynomial kernels, and normalized-cut spectral clustering. Every entry
//! point is a pure function of `(data, spec)`: identical inputs produce
//! identical partitions, with restarts and internal RNG streams derived
//! from the spec seed.

mod distance;
mod hierarchical;
mod kernel;
mod kmeans;
mod spectral;

pub use distance::{pairwise_distances, DistanceMatrix, Metric};
pub use hierarchical::{hierarchical, Linkage};
pub use kernel::{kernel_kmeans, Kernel};
pub use kmeans::{kmeans, KMeansOutcome};
pub use spectral::spectral;

use crate::error::{Error, Result};
use crate::fda::Partition;
use crate::scalar::Real;

/// `n` observations by `q` named feature columns, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<F: Real> {
    data: Vec<F>,
    n: usize,
    q: usize,
    column_names: Vec<String>,
}

impl<F: Real> FeatureMatrix<F> {
    pub fn new(data: Vec<F>, n: usize, q: usize, column_names: Vec<String>) -> Result<Self> {
        if q == 0 || n < 2 {
            return Err(Error::Argument(format!(
                "feature matrix needs n >= 2 and q >= 1, got n = {n}, q = {q}"
            )));
        }
        if data.len() != n * q {
            return Err(Error::Dimension(format!(
                "expected {} values for {n} x {q}, got {}",
                n * q,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument(
                "feature matrix contains non-finite values".into(),
            ));
        }
        if column_names.len() != q {
            return Err(Error::Dimension(format!(
                "expected {q} column names, got {}",
                column_names.len()
            )));
        }
        Ok(FeatureMatrix {
            data,
            n,
            q,
            column_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.q
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.q..(i + 1) * self.q]
    }

    pub fn values(&self) -> &[F] {
        &self.data
    }

    /// New matrix with the rows rearranged as `order` (row `i` of the result
    /// is row `order[i]` of `self`).
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n {
            return Err(Error::Dimension("row order length mismatch".into()));
        }
        let mut data = Vec::with_capacity(self.data.len());
        for &src in order {
            data.extend_from_slice(self.row(src));
        }
        FeatureMatrix::new(data, self.n, self.q, self.column_names.clone())
    }
}

/// The closed method vocabulary of the benchmark grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Single,
    Complete,
    Average,
    Centroid,
    WardD2,
    KMeansEuclidean,
    KMeansMahalanobis,
    KernelKMeansGaussian,
    KernelKMeansPolynomial,
    Spectral,
}

impl Method {
    /// Every supported method, in grid order.
    pub const ALL: [Method; 10] = [
        Method::Single,
        Method::Complete,
        Method::Average,
        Method::Centroid,
        Method::WardD2,
        Method::KMeansEuclidean,
        Method::KMeansMahalanobis,
        Method::KernelKMeansGaussian,
        Method::KernelKMeansPolynomial,
        Method::Spectral,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Single => "single",
            Method::Complete => "complete",
            Method::Average => "average",
            Method::Centroid => "centroid",
            Method::WardD2 => "ward.D2",
            Method::KMeansEuclidean => "kmeans-euclidean",
            Method::KMeansMahalanobis => "kmeans-mahalanobis",
            Method::KernelKMeansGaussian => "kkmeans-gaussian",
            Method::KernelKMeansPolynomial => "kkmeans-polynomial",
            Method::Spectral => "spc",
        }
    }

    pub fn parse(name: &str) -> Result<Method> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == name)
            .ok_or_else(|| {
                let vocab: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::UnknownName(format!(
                    "method '{name}' is not one of: {}",
                    vocab.join(", ")
                ))
            })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Fully resolved clustering request: method, target cluster count, seed,
/// and the hyperparameters shared across families.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub method: Method,
    pub k: usize,
    pub seed: u64,
    pub hyper: Hyperparams,
}

/// Tunables with the benchmark defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    /// Seeded restarts for the k-means style methods.
    pub restarts: usize,
    /// Lloyd iteration cap.
    pub max_iter: usize,
    /// Gaussian kernel width; `None` = median of pairwise distances.
    pub gaussian_sigma: Option<f64>,
    pub poly_degree: u32,
    pub poly_scale: f64,
    pub poly_offset: f64,
    /// Spectral affinity width; `None` = median of pairwise distances.
    pub spectral_sigma: Option<f64>,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            restarts: 10,
            max_iter: 300,
            gaussian_sigma: None,
            poly_degree: 1,
            poly_scale: 1.0,
            poly_offset: 1.0,
            spectral_sigma: None,
        }
    }
}

impl MethodSpec {
    pub fn new(method: Method, k: usize, seed: u64) -> Self {
        MethodSpec {
            method,
            k,
            seed,
            hyper: Hyperparams::default(),
        }
    }
}

/// Runs the requested method on `data` and returns the partition.
pub fn cluster<F: Real>(data: &FeatureMatrix<F>, spec: &MethodSpec) -> Result<Partition> {
    let k = spec.k;
    match spec.method {
        Method::Single | Method::Complete | Method::Average | Method::Centroid | Method::WardD2 => {
            let linkage = match spec.method {
                Method::Single => Linkage::Single,
                Method::Complete => Linkage::Complete,
                Method::Average => Linkage::Average,
                Method::Centroid => Linkage::Centroid,
                _ => Linkage::WardD2,
            };
            let dist = pairwise_distances(data, Metric::Euclidean)?;
            hierarchical(&dist, linkage, k)
        }
        Method::KMeansEuclidean => {
            Ok(kmeans(data, k, Metric::Euclidean, spec.seed, &spec.hyper)?.partition)
        }
        Method::KMeansMahalanobis => {
            Ok(kmeans(data, k, Metric::Mahalanobis, spec.seed, &spec.hyper)?.partition)
        }
        Method::KernelKMeansGaussian => {
            let kern = Kernel::Gaussian {
                sigma: spec.hyper.gaussian_sigma,
            };
            Ok(kernel_kmeans(data, k, kern, spec.seed, &spec.hyper)?.partition)
        }
        Method::KernelKMeansPolynomial => {
            let kern = Kernel::Polynomial {
                degree: spec.hyper.poly_degree,
                scale: spec.hyper.poly_scale,
                offset: spec.hyper.poly_offset,
            };
            Ok(kernel_kmeans(data, k, kern, spec.seed, &spec.hyper)?.partition)
        }
        Method::Spectral => spectral(data, k, spec.hyper.spectral_sigma, spec.seed, &spec.hyper),
    }
}
