//! Agglomerative hierarchical clustering cut to a fixed cluster count.
//!
//! The Lance–Williams merge sequence is delegated to the `kodama` crate
//! (nearest-neighbor chain for the reducible linkages, Müllner's generic
//! algorithm for centroid); distances are converted to `f64` at this
//! boundary, which is exact for both supported scalar types. Ward follows
//! the squared-distance convention (the `ward.D2` variant), as does
//! centroid. Cutting the dendrogram at `k` and the cluster numbering are
//! handled here: clusters are numbered `1..=k` by their lowest member
//! index, so the output is deterministic given the input.

use kodama::Method as KodamaMethod;

use crate::error::{Error, Result};
use crate::fda::Partition;
use crate::scalar::Real;

use super::DistanceMatrix;

/// Linkage criteria of the method grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    Single,
    Complete,
    Average,
    Centroid,
    WardD2,
}

impl Linkage {
    fn kodama(self) -> KodamaMethod {
        match self {
            Linkage::Single => KodamaMethod::Single,
            Linkage::Complete => KodamaMethod::Complete,
            Linkage::Average => KodamaMethod::Average,
            Linkage::Centroid => KodamaMethod::Centroid,
            Linkage::WardD2 => KodamaMethod::Ward,
        }
    }
}

/// Agglomerates to exactly `k` clusters.
pub fn hierarchical<F: Real>(
    dist: &DistanceMatrix<F>,
    linkage: Linkage,
    k: usize,
) -> Result<Partition> {
    let n = dist.n();
    if k == 0 || k > n {
        return Err(Error::Argument(format!(
            "cannot cut {n} observations into {k} clusters"
        )));
    }
    if k == n {
        return Partition::new((1..=n).collect(), n);
    }

    let mut condensed: Vec<f64> = dist.condensed().iter().map(|d| d.as_f64()).collect();
    let dendrogram = kodama::linkage(&mut condensed, n, linkage.kodama());

    // Union-find over the first n - k merges. Kodama labels originals
    // 0..n-1 and the cluster born at step i as n + i.
    let mut parent: Vec<usize> = (0..2 * n - 1).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (step_idx, step) in dendrogram.steps().iter().take(n - k).enumerate() {
        let merged = n + step_idx;
        let a = find(&mut parent, step.cluster1);
        let b = find(&mut parent, step.cluster2);
        parent[a] = merged;
        parent[b] = merged;
    }

    // Number clusters 1..=k by lowest member index.
    let mut cluster_of_root = std::collections::HashMap::new();
    let mut assignment = vec![0usize; n];
    let mut next = 0usize;
    for i in 0..n {
        let root = find(&mut parent, i);
        let id = *cluster_of_root.entry(root).or_insert_with(|| {
            next += 1;
            next
        });
        assignment[i] = id;
    }
    debug_assert_eq!(next, k);
    Partition::new(assignment, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{pairwise_distances, FeatureMatrix, Metric};

    const ALL_LINKAGES: [Linkage; 5] = [
        Linkage::Single,
        Linkage::Complete,
        Linkage::Average,
        Linkage::Centroid,
        Linkage::WardD2,
    ];

    fn points_1d(xs: &[f64]) -> DistanceMatrix<f64> {
        let data: Vec<f64> = xs.to_vec();
        let m = FeatureMatrix::new(data, xs.len(), 1, vec!["x".into()]).unwrap();
        pairwise_distances(&m, Metric::Euclidean).unwrap()
    }

    #[test]
    fn separated_pairs_split_under_every_linkage() {
        let dist = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        for linkage in ALL_LINKAGES {
            let part = hierarchical(&dist, linkage, 2).unwrap();
            assert_eq!(part.assignment(), &[1, 1, 2, 2], "{linkage:?}");
        }
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let dist = points_1d(&[0.0, 2.0, 5.0]);
        let part = hierarchical(&dist, Linkage::Average, 3).unwrap();
        assert_eq!(part.assignment(), &[1, 2, 3]);
    }

    #[test]
    fn k_one_gives_a_single_cluster() {
        let dist = points_1d(&[0.0, 2.0, 5.0, 9.0]);
        let part = hierarchical(&dist, Linkage::WardD2, 1).unwrap();
        assert_eq!(part.assignment(), &[1, 1, 1, 1]);
    }

    #[test]
    fn chain_isolates_the_outlier_for_single_and_complete() {
        // A tight chain 0..9 plus a far point: both linkages must isolate it
        // at k = 2, even though they build different dendrograms.
        let mut xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        xs.push(100.0);
        let dist = points_1d(&xs);
        for linkage in [Linkage::Single, Linkage::Complete] {
            let part = hierarchical(&dist, linkage, 2).unwrap();
            let expected: Vec<usize> = (0..10).map(|_| 1).chain([2]).collect();
            assert_eq!(part.assignment(), expected.as_slice(), "{linkage:?}");
        }
    }

    #[test]
    fn rejects_k_larger_than_n() {
        let dist = points_1d(&[0.0, 1.0]);
        assert!(hierarchical(&dist, Linkage::Single, 3).is_err());
    }

    #[test]
    fn merge_heights_non_decreasing_for_monotone_linkages() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let xs: Vec<f64> = (0..25).map(|_| rng.gen_range(0.0..10.0)).collect();
        let m = FeatureMatrix::new(xs.clone(), 25, 1, vec!["x".into()]).unwrap();
        let dist = pairwise_distances(&m, Metric::Euclidean).unwrap();
        for linkage in [
            Linkage::Single,
            Linkage::Complete,
            Linkage::Average,
            Linkage::WardD2,
        ] {
            let mut condensed: Vec<f64> = dist.condensed();
            let dend = kodama::linkage(&mut condensed, 25, linkage.kodama());
            let heights: Vec<f64> = dend.steps().iter().map(|s| s.dissimilarity).collect();
            assert!(
                heights.windows(2).all(|w| w[1] >= w[0] - 1e-12),
                "{linkage:?} inverted"
            );
        }
    }

    #[test]
    fn permutation_equivariance_on_tie_free_data() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 30;
        let data: Vec<f64> = (0..n * 2).map(|_| rng.gen_range(0.0..1.0)).collect();
        let m = FeatureMatrix::new(data, n, 2, vec!["a".into(), "b".into()]).unwrap();

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let permuted = m.reordered(&order).unwrap();

        for linkage in ALL_LINKAGES {
            let base = hierarchical(&pairwise_distances(&m, Metric::Euclidean).unwrap(), linkage, 4)
                .unwrap();
            let perm = hierarchical(
                &pairwise_distances(&permuted, Metric::Euclidean).unwrap(),
                linkage,
                4,
            )
            .unwrap();
            // Undo the permutation and compare up to relabeling.
            let mut unpermuted = vec![0usize; n];
            for (new_pos, &src) in order.iter().enumerate() {
                unpermuted[src] = perm.assignment()[new_pos];
            }
            let lhs = Partition::new(unpermuted, perm.k()).unwrap().canonicalize();
            let rhs = base.canonicalize();
            assert_eq!(lhs, rhs, "{linkage:?}");
        }
    }

    #[test]
    fn deterministic_across_calls() {
        let dist = points_1d(&[0.3, 1.7, 2.2, 8.9, 9.4, 4.4]);
        for linkage in ALL_LINKAGES {
            let a = hierarchical(&dist, linkage, 3).unwrap();
            let b = hierarchical(&dist, linkage, 3).unwrap();
            assert_eq!(a, b);
        }
    }
}
