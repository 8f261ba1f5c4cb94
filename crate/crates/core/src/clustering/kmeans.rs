//! Lloyd k-means with k-means++ seeding and seeded restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fda::Partition;
use crate::scalar::Real;

use super::distance::whiten;
use super::{FeatureMatrix, Hyperparams, Metric};

/// Result of a k-means style run: the winning partition over all restarts,
/// its within-cluster sum of squares, and whether Lloyd reached a fixpoint
/// within the iteration cap.
#[derive(Debug, Clone)]
pub struct KMeansOutcome<F: Real> {
    pub partition: Partition,
    pub objective: F,
    pub converged: bool,
}

/// Runs Lloyd k-means. Mahalanobis geometry is implemented as pooled
/// whitening followed by Euclidean Lloyd, so the objective is reported in
/// whitened coordinates for that metric.
pub fn kmeans<F: Real>(
    data: &FeatureMatrix<F>,
    k: usize,
    metric: Metric,
    seed: u64,
    hyper: &Hyperparams,
) -> Result<KMeansOutcome<F>> {
    let working = match metric {
        Metric::Euclidean => data.clone(),
        Metric::Mahalanobis => whiten(data)?,
    };
    lloyd_restarts(&working, k, seed, hyper.restarts.max(1), hyper.max_iter)
}

fn lloyd_restarts<F: Real>(
    data: &FeatureMatrix<F>,
    k: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
) -> Result<KMeansOutcome<F>> {
    let n = data.n_rows();
    if k == 0 || k > n {
        return Err(Error::Argument(format!(
            "k-means needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }

    let mut best: Option<KMeansOutcome<F>> = None;
    for restart in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64 + 1);
        let outcome = lloyd_once(data, k, &mut rng, max_iter);
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

fn lloyd_once<F: Real>(
    data: &FeatureMatrix<F>,
    k: usize,
    rng: &mut ChaCha8Rng,
    max_iter: usize,
) -> KMeansOutcome<F> {
    let (n, q) = (data.n_rows(), data.n_cols());
    let seeds = kmeanspp_seeds(data, k, rng);
    let mut centers: Vec<F> = Vec::with_capacity(k * q);
    for &s in &seeds {
        centers.extend_from_slice(data.row(s));
    }

    let mut assignment = vec![0usize; n];
    let mut converged = false;
    for _ in 0..max_iter {
        let mut changed = false;
        // Assignment step; ties go to the lowest center index.
        for i in 0..n {
            let c = nearest_center(data.row(i), &centers, k, q).0;
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
        }

        repair_empty_clusters(data, &mut assignment, &centers, k, q);

        // Update step.
        let mut counts = vec![0usize; k];
        let mut sums = vec![F::zero(); k * q];
        for i in 0..n {
            let c = assignment[i];
            counts[c] += 1;
            for (s, v) in sums[c * q..(c + 1) * q].iter_mut().zip(data.row(i)) {
                *s += *v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..q {
                    centers[c * q + j] = sums[c * q + j] / F::of_usize(counts[c]);
                }
            }
        }

        if !changed {
            converged = true;
            break;
        }
    }

    // Objective with centroids refit to the final assignment.
    let objective = wcss(data, &assignment, k);
    let partition = Partition::new(assignment.iter().map(|&c| c + 1).collect(), k)
        .expect("assignment ids are in range");
    KMeansOutcome {
        partition,
        objective,
        converged,
    }
}

/// k-means++ seeding: first seed uniform, subsequent seeds sampled with
/// probability proportional to the squared distance to the nearest chosen
/// seed. When every remaining point coincides with a seed, the lowest
/// unchosen index is taken.
fn kmeanspp_seeds<F: Real>(data: &FeatureMatrix<F>, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = data.n_rows();
    let mut seeds = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    seeds.push(first);

    let mut d2: Vec<F> = (0..n)
        .map(|i| squared_euclidean(data.row(i), data.row(first)))
        .collect();

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
            let d = squared_euclidean(data.row(i), data.row(next));
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    seeds
}

/// Any empty cluster is reseeded from the farthest point (largest squared
/// distance to its current center; ties to the lowest index).
fn repair_empty_clusters<F: Real>(
    data: &FeatureMatrix<F>,
    assignment: &mut [usize],
    centers: &[F],
    k: usize,
    q: usize,
) {
    let n = data.n_rows();
    let mut counts = vec![0usize; k];
    for &c in assignment.iter() {
        counts[c] += 1;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut far_idx = 0usize;
        let mut far_d2 = F::neg_infinity();
        for i in 0..n {
            if counts[assignment[i]] <= 1 {
                continue; // do not empty another cluster
            }
            let c = assignment[i];
            let d = squared_euclidean(data.row(i), &centers[c * q..(c + 1) * q]);
            if d > far_d2 {
                far_d2 = d;
                far_idx = i;
            }
        }
        counts[assignment[far_idx]] -= 1;
        assignment[far_idx] = empty;
        counts[empty] += 1;
    }
}

fn nearest_center<F: Real>(row: &[F], centers: &[F], k: usize, q: usize) -> (usize, F) {
    let mut best = (0usize, F::infinity());
    for c in 0..k {
        let d = squared_euclidean(row, &centers[c * q..(c + 1) * q]);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Within-cluster sum of squares with centroids refit to `assignment`.
pub(crate) fn wcss<F: Real>(data: &FeatureMatrix<F>, assignment: &[usize], k: usize) -> F {
    let (n, q) = (data.n_rows(), data.n_cols());
    let mut counts = vec![0usize; k];
    let mut sums = vec![F::zero(); k * q];
    for i in 0..n {
        let c = assignment[i];
        counts[c] += 1;
        for (s, v) in sums[c * q..(c + 1) * q].iter_mut().zip(data.row(i)) {
            *s += *v;
        }
    }
    let mut obj = F::zero();
    for i in 0..n {
        let c = assignment[i];
        for j in 0..q {
            let center = sums[c * q + j] / F::of_usize(counts[c].max(1));
            let d = data.row(i)[j] - center;
            obj += d * d;
        }
    }
    obj
}

fn squared_euclidean<F: Real>(a: &[F], b: &[F]) -> F {
    let mut sum = F::zero();
    for (x, y) in a.iter().zip(b) {
        let d = *x - *y;
        sum += d * d;
    }
    sum
}
