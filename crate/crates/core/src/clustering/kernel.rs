//! Kernel k-means on the Gram matrix.
//!
//! Lloyd-type updates in feature space through the kernel trick. Feature
//! space distances to a cluster decompose as
//! `K(i,i) - 2/|c| * sum_{j in c} K(i,j) + 1/|c|^2 * sum_{j,l in c} K(j,l)`,
//! so one pass over the Gram matrix per iteration suffices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fda::Partition;
use crate::scalar::Real;

use super::distance::euclidean;
use super::kmeans::KMeansOutcome;
use super::{FeatureMatrix, Hyperparams};

/// Kernel functions of the method grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `exp(-||u - v||^2 / (2 sigma^2))`; `None` takes sigma from the
    /// median of pairwise distances.
    Gaussian { sigma: Option<f64> },
    /// `(<u, v> * scale + offset)^degree`.
    Polynomial { degree: u32, scale: f64, offset: f64 },
}

/// Kernel k-means with kernel-space k-means++ seeding and seeded restarts.
pub fn kernel_kmeans<F: Real>(
    data: &FeatureMatrix<F>,
    k: usize,
    kernel: Kernel,
    seed: u64,
    hyper: &Hyperparams,
) -> Result<KMeansOutcome<F>> {
    let n = data.n_rows();
    if k == 0 || k > n {
        return Err(Error::Argument(format!(
            "kernel k-means needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let gram = gram_matrix(data, kernel)?;

    let mut best: Option<KMeansOutcome<F>> = None;
    for restart in 0..hyper.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0x4B00 + restart as u64);
        let outcome = kernel_lloyd(&gram, n, k, &mut rng, hyper.max_iter);
        let replace = match &best {
            None => true,
            Some(b) => outcome.objective < b.objective,
        };
        if replace {
            best = Some(outcome);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Builds the Gram matrix, resolving the Gaussian bandwidth if needed.
fn gram_matrix<F: Real>(data: &FeatureMatrix<F>, kernel: Kernel) -> Result<Vec<F>> {
    let n = data.n_rows();
    match kernel {
        Kernel::Gaussian { sigma } => {
            let sigma = match sigma {
                Some(s) if s > 0.0 => F::of(s),
                Some(s) => {
                    return Err(Error::Argument(format!(
                        "gaussian kernel width must be positive, got {s}"
                    )))
                }
                None => {
                    let med = median_pairwise(data);
                    if med <= F::zero() {
                        return Err(Error::Degenerate(
                            "median pairwise distance is zero; all points coincide".into(),
                        ));
                    }
                    med
                }
            };
            let denom = F::of(2.0) * sigma * sigma;
            let mut gram = vec![F::zero(); n * n];
            for i in 0..n {
                gram[i * n + i] = F::one();
                for j in i + 1..n {
                    let d = euclidean(data.row(i), data.row(j));
                    let v = (-(d * d) / denom).exp();
                    gram[i * n + j] = v;
                    gram[j * n + i] = v;
                }
            }
            Ok(gram)
        }
        Kernel::Polynomial {
            degree,
            scale,
            offset,
        } => {
            let scale = F::of(scale);
            let offset = F::of(offset);
            let mut gram = vec![F::zero(); n * n];
            for i in 0..n {
                for j in i..n {
                    let dot = crate::linalg::dot(data.row(i), data.row(j));
                    let v = (dot * scale + offset).powi(degree as i32);
                    gram[i * n + j] = v;
                    gram[j * n + i] = v;
                }
            }
            Ok(gram)
        }
    }
}

pub(crate) fn median_pairwise<F: Real>(data: &FeatureMatrix<F>) -> F {
    let n = data.n_rows();
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d.push(euclidean(data.row(i), data.row(j)));
        }
    }
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

fn kernel_lloyd<F: Real>(
    gram: &[F],
    n: usize,
    k: usize,
    rng: &mut ChaCha8Rng,
    max_iter: usize,
) -> KMeansOutcome<F> {
    // Kernel-induced squared distance between points.
    let point_d2 = |i: usize, j: usize| -> F {
        let d = gram[i * n + i] + gram[j * n + j] - F::of(2.0) * gram[i * n + j];
        d.max(F::zero())
    };

    // k-means++ seeding in kernel space.
    let mut seeds = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    seeds.push(first);
    let mut d2: Vec<F> = (0..n).map(|i| point_d2(i, first)).collect();
    while seeds.len() < k {
        let total: F = d2.iter().copied().sum();
        let next = if total > F::zero() {
            let target = F::of(rng.gen::<f64>()) * total;
            let mut cum = F::zero();
            let mut chosen = n - 1;
            for i in 0..n {
                cum += d2[i];
                if cum > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            (0..n).find(|i| !seeds.contains(i)).unwrap_or(0)
        };
        seeds.push(next);
        for i in 0..n {
            let d = point_d2(i, next);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }

    let mut assignment: Vec<usize> = (0..n)
        .map(|i| {
            let mut best = (0usize, F::infinity());
            for (c, &s) in seeds.iter().enumerate() {
                let d = point_d2(i, s);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best.0
        })
        .collect();

    let mut converged = false;
    let mut dist = vec![F::zero(); n * k];
    for _ in 0..max_iter {
        cluster_distances(gram, n, k, &assignment, &mut dist);

        let mut changed = false;
        for i in 0..n {
            let mut best = (assignment[i], dist[i * k + assignment[i]]);
            for c in 0..k {
                let d = dist[i * k + c];
                if d < best.1 || (d == best.1 && c < best.0) {
                    best = (c, d);
                }
            }
            if best.0 != assignment[i] {
                assignment[i] = best.0;
                changed = true;
            }
        }

        // Reseed empty clusters from the point farthest from its own cluster.
        let mut counts = vec![0usize; k];
        for &c in &assignment {
            counts[c] += 1;
        }
        for empty in 0..k {
            if counts[empty] > 0 {
                continue;
            }
            let mut far = (0usize, F::neg_infinity());
            for i in 0..n {
                if counts[assignment[i]] <= 1 {
                    continue;
                }
                let d = dist[i * k + assignment[i]];
                if d > far.1 {
                    far = (i, d);
                }
            }
            counts[assignment[far.0]] -= 1;
            assignment[far.0] = empty;
            counts[empty] += 1;
            changed = true;
        }

        if !changed {
            converged = true;
            break;
        }
    }

    cluster_distances(gram, n, k, &assignment, &mut dist);
    let mut objective = F::zero();
    for i in 0..n {
        objective += dist[i * k + assignment[i]];
    }

    let partition = Partition::new(assignment.iter().map(|&c| c + 1).collect(), k)
        .expect("assignment ids in range");
    KMeansOutcome {
        partition,
        objective,
        converged,
    }
}

/// Squared feature-space distance of every point to every cluster mean,
/// written into `dist` (`n x k`, row-major).
fn cluster_distances<F: Real>(
    gram: &[F],
    n: usize,
    k: usize,
    assignment: &[usize],
    dist: &mut [F],
) {
    let mut counts = vec![0usize; k];
    for &c in assignment {
        counts[c] += 1;
    }
    // rowsum[i][c] = sum over j in c of K(i, j)
    let mut rowsum = vec![F::zero(); n * k];
    for i in 0..n {
        let row = &gram[i * n..(i + 1) * n];
        for j in 0..n {
            rowsum[i * k + assignment[j]] += row[j];
        }
    }
    let mut intra = vec![F::zero(); k];
    for i in 0..n {
        intra[assignment[i]] += rowsum[i * k + assignment[i]];
    }
    for i in 0..n {
        for c in 0..k {
            if counts[c] == 0 {
                dist[i * k + c] = F::infinity();
                continue;
            }
            let size = F::of_usize(counts[c]);
            let d = gram[i * n + i] - F::of(2.0) * rowsum[i * k + c] / size
                + intra[c] / (size * size);
            dist[i * k + c] = d.max(F::zero());
        }
    }
}
