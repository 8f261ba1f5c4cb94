//! External clustering validation: purity, pairwise F-measure, Rand index.
//!
//! All three metrics are computed from the contingency table in one pass
//! (`O(n + K_truth * K_pred)`), using exact integer pair counts, so they
//! agree bit-for-bit with direct enumeration over all `C(n, 2)` pairs.

use crate::error::{Error, Result};
use crate::fda::Partition;

/// Scores of one partition against a reference, plus the wall time the
/// caller chooses to attach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationReport {
    pub purity: f64,
    pub f_measure: f64,
    pub rand_index: f64,
    pub elapsed_seconds: f64,
}

/// Contingency table of true classes (rows) against predicted clusters
/// (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<usize>,
    k_truth: usize,
    k_pred: usize,
}

impl ConfusionMatrix {
    pub fn k_truth(&self) -> usize {
        self.k_truth
    }

    pub fn k_pred(&self) -> usize {
        self.k_pred
    }

    /// Number of items with truth class `row + 1` and predicted cluster
    /// `col + 1`.
    pub fn get(&self, row: usize, col: usize) -> usize {
        self.counts[row * self.k_pred + col]
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.k_truth)
            .map(|a| (0..self.k_pred).map(|b| self.get(a, b)).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.k_pred)
            .map(|b| (0..self.k_truth).map(|a| self.get(a, b)).sum())
            .collect()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Builds the confusion matrix of `pred` against `truth`.
pub fn confusion_matrix(pred: &Partition, truth: &Partition) -> Result<ConfusionMatrix> {
    if pred.len() != truth.len() {
        return Err(Error::Argument(format!(
            "partitions have different lengths: {} vs {}",
            pred.len(),
            truth.len()
        )));
    }
    let (k_truth, k_pred) = (truth.k(), pred.k());
    let mut counts = vec![0usize; k_truth * k_pred];
    for (&p, &t) in pred.assignment().iter().zip(truth.assignment()) {
        counts[(t - 1) * k_pred + (p - 1)] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        k_truth,
        k_pred,
    })
}

fn choose2(x: usize) -> u64 {
    let x = x as u64;
    x * x.saturating_sub(1) / 2
}

/// Pair counts underlying the Rand index and pairwise F-measure:
/// `(tp, pairs_pred, pairs_truth)` where `tp` is the number of pairs
/// co-clustered in both partitions.
fn pair_counts(cm: &ConfusionMatrix) -> (u64, u64, u64) {
    let tp: u64 = cm.counts.iter().map(|&c| choose2(c)).sum();
    let pairs_pred: u64 = cm.col_sums().iter().map(|&c| choose2(c)).sum();
    let pairs_truth: u64 = cm.row_sums().iter().map(|&c| choose2(c)).sum();
    (tp, pairs_pred, pairs_truth)
}

/// Scores `pred` against `truth`.
///
/// * purity: mean over predicted clusters of the majority true-label count;
/// * Rand index: agreeing pairs over all `C(n, 2)` unordered pairs;
/// * F-measure: pairwise F1 with precision `tp / pairs_pred` and recall
///   `tp / pairs_truth`; defined as 0 when no pair is co-clustered.
///
/// `elapsed_seconds` is returned as 0 and filled by the caller.
pub fn evaluate(pred: &Partition, truth: &Partition) -> Result<EvaluationReport> {
    let n = pred.len();
    if n < 2 {
        return Err(Error::Argument(
            "evaluation needs at least two items".into(),
        ));
    }
    let cm = confusion_matrix(pred, truth)?;

    let majority: usize = (0..cm.k_pred)
        .map(|b| (0..cm.k_truth).map(|a| cm.get(a, b)).max().unwrap_or(0))
        .sum();
    let purity = majority as f64 / n as f64;

    let (tp, pairs_pred, pairs_truth) = pair_counts(&cm);
    let all_pairs = choose2(n);
    let agree = all_pairs + 2 * tp - pairs_pred - pairs_truth;
    let rand_index = agree as f64 / all_pairs as f64;

    let f_measure = if pairs_pred + pairs_truth == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (pairs_pred + pairs_truth) as f64
    };

    Ok(EvaluationReport {
        purity,
        f_measure,
        rand_index,
        elapsed_seconds: 0.0,
    })
}

/// Direct `O(n^2)` pair enumeration of the same three metrics; the
/// reference the fast path is validated against.
pub fn evaluate_by_pair_enumeration(
    pred: &Partition,
    truth: &Partition,
) -> Result<EvaluationReport> {
    let n = pred.len();
    if n != truth.len() {
        return Err(Error::Argument("length mismatch".into()));
    }
    if n < 2 {
        return Err(Error::Argument("need at least two items".into()));
    }
    let p = pred.assignment();
    let t = truth.assignment();

    let (mut tp, mut pairs_pred, mut pairs_truth, mut agree) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let same_p = p[i] == p[j];
            let same_t = t[i] == t[j];
            if same_p {
                pairs_pred += 1;
            }
            if same_t {
                pairs_truth += 1;
            }
            if same_p && same_t {
                tp += 1;
            }
            if same_p == same_t {
                agree += 1;
            }
        }
    }

    // Purity by explicit majority count per predicted cluster.
    let mut majority = 0usize;
    for b in 1..=pred.k() {
        let mut counts = vec![0usize; truth.k() + 1];
        for i in 0..n {
            if p[i] == b {
                counts[t[i]] += 1;
            }
        }
        majority += counts.iter().max().copied().unwrap_or(0);
    }

    let all_pairs = choose2(n);
    Ok(EvaluationReport {
        purity: majority as f64 / n as f64,
        f_measure: if pairs_pred + pairs_truth == 0 {
            0.0
        } else {
            2.0 * tp as f64 / (pairs_pred + pairs_truth) as f64
        },
        rand_index: agree as f64 / all_pairs as f64,
        elapsed_seconds: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn part(ids: &[usize]) -> Partition {
        Partition::from_labels(ids).unwrap()
    }

    #[test]
    fn identical_partitions_score_one() {
        let p = part(&[1, 2, 2, 3, 1, 3, 3]);
        let r = evaluate(&p, &p).unwrap();
        assert_eq!((r.purity, r.f_measure, r.rand_index), (1.0, 1.0, 1.0));
    }

    #[test]
    fn four_item_example() {
        let truth = part(&[1, 1, 2, 2]);
        let pred = part(&[1, 2, 2, 2]);
        let r = evaluate(&pred, &truth).unwrap();
        assert_eq!(r.purity, 0.75);
        assert_eq!(r.rand_index, 0.5);
        // tp = 1, precision = 1/3, recall = 1/2 -> F = 0.4
        assert!((r.f_measure - 0.4).abs() < 1e-15);
    }

    #[test]
    fn relabeling_does_not_change_the_report() {
        let truth = part(&[1, 1, 2, 2]);
        let pred = part(&[1, 2, 2, 2]);
        let swapped = part(&[2, 1, 1, 1]);
        assert_eq!(
            evaluate(&pred, &truth).unwrap(),
            evaluate(&swapped, &truth).unwrap()
        );
    }

    #[test]
    fn confusion_matrix_of_identity() {
        let truth = part(&[1, 1, 1, 2, 2]);
        let cm = confusion_matrix(&truth, &truth).unwrap();
        assert_eq!(cm.get(0, 0), 3);
        assert_eq!(cm.get(1, 1), 2);
        assert_eq!(cm.get(0, 1), 0);
        assert_eq!(cm.get(1, 0), 0);
        assert_eq!(cm.total(), 5);
    }

    #[test]
    fn confusion_matrix_counts_mismatches() {
        let truth = part(&[1, 1, 2, 2]);
        let pred = part(&[1, 2, 2, 2]);
        let cm = confusion_matrix(&pred, &truth).unwrap();
        assert_eq!(
            [cm.get(0, 0), cm.get(0, 1), cm.get(1, 0), cm.get(1, 1)],
            [1, 1, 0, 2]
        );
        assert_eq!(cm.row_sums(), vec![2, 2]);
    }

    #[test]
    fn surveillance_style_confusion_matrix() {
        // Ground truth 401 + 105; 13 of class 2 predicted as class 1.
        let mut truth_ids = vec![1usize; 401];
        truth_ids.extend(vec![2usize; 105]);
        let mut pred_ids = vec![1usize; 401];
        pred_ids.extend(vec![1usize; 13]);
        pred_ids.extend(vec![2usize; 92]);
        let cm = confusion_matrix(&part(&pred_ids), &part(&truth_ids)).unwrap();
        assert_eq!(
            [cm.get(0, 0), cm.get(0, 1), cm.get(1, 0), cm.get(1, 1)],
            [401, 0, 13, 92]
        );
        assert_eq!(cm.total(), 506);
    }

    #[test]
    fn zero_coclustered_pairs_give_zero_f() {
        let singletons = part(&[1, 2, 3]);
        let r = evaluate(&singletons, &singletons).unwrap();
        assert_eq!(r.f_measure, 0.0);
        assert_eq!(r.rand_index, 1.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let a = part(&[1, 2]);
        let b = part(&[1, 2, 1]);
        assert!(evaluate(&a, &b).is_err());
        assert!(confusion_matrix(&a, &b).is_err());
    }

    #[test]
    fn rand_index_is_symmetric_and_f_swaps_components() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let n = rng.gen_range(2..12);
            let a: Vec<usize> = (0..n).map(|_| rng.gen_range(1..4)).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.gen_range(1..4)).collect();
            let (pa, pb) = (part(&a), part(&b));
            let ab = evaluate(&pa, &pb).unwrap();
            let ba = evaluate(&pb, &pa).unwrap();
            assert_eq!(ab.rand_index, ba.rand_index);
            // Swapping arguments swaps precision and recall, leaving their
            // harmonic mean unchanged.
            assert_eq!(ab.f_measure, ba.f_measure);
            let (tp1, pp1, pt1) = pair_counts(&confusion_matrix(&pa, &pb).unwrap());
            let (tp2, pp2, pt2) = pair_counts(&confusion_matrix(&pb, &pa).unwrap());
            assert_eq!(tp1, tp2);
            assert_eq!(pp1, pt2);
            assert_eq!(pt1, pp2);
        }
    }

    #[test]
    fn matches_pair_enumeration_on_random_partitions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let n = rng.gen_range(2..=12);
            let kp = rng.gen_range(1..=4);
            let kt = rng.gen_range(1..=4);
            let a: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=kp)).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=kt)).collect();
            let (pa, pb) = (part(&a), part(&b));
            let fast = evaluate(&pa, &pb).unwrap();
            let slow = evaluate_by_pair_enumeration(&pa, &pb).unwrap();
            assert_eq!(fast.purity, slow.purity);
            assert_eq!(fast.f_measure, slow.f_measure);
            assert_eq!(fast.rand_index, slow.rand_index);
        }
    }

    proptest! {
        // A refinement of the truth has purity at least the largest true
        // class frequency.
        #[test]
        fn refinement_purity_bound(seed in 0u64..200) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(4..30usize);
            let truth_ids: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3usize)).collect();
            // Split each truth class into up to two pred clusters.
            let pred_ids: Vec<usize> = truth_ids
                .iter()
                .map(|&t| 2 * t - rng.gen_range(0..=1usize))
                .collect();
            let truth = part(&truth_ids);
            let pred = part(&pred_ids);
            let r = evaluate(&pred, &truth).unwrap();
            let mut class_counts = vec![0usize; truth.k() + 1];
            for &t in truth.assignment() { class_counts[t] += 1; }
            let max_freq = *class_counts.iter().max().unwrap() as f64 / n as f64;
            prop_assert!(r.purity >= max_freq - 1e-15);
        }
    }
}
