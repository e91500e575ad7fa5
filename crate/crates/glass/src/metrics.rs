//! Classification metrics, least-squares fitting, and classifier weight
//! distribution summaries.

use crate::error::{GlassError, Result};
use serde::{Deserialize, Serialize};

/// Metrics of one evaluation pass over a labelled set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub accuracy: f64,
    /// Macro-averaged over the two classes.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub ece: f64,
    pub mean_loss: f64,
    pub sample_count: usize,
}

/// Accuracy and macro precision/recall/F1 at a probability threshold.
///
/// Prediction is class 1 iff `prob >= threshold`. Per-class precision and
/// recall use the 0/0 -> 0 convention; the macro average is the plain mean
/// over the two classes.
pub fn binary_metrics(
    labels: &[usize],
    prob_positive: &[f64],
    threshold: f64,
) -> Result<(f64, f64, f64, f64)> {
    if labels.is_empty() {
        return Err(GlassError::InvalidArgument("empty input".into()));
    }
    if labels.len() != prob_positive.len() {
        return Err(GlassError::ShapeMismatch(format!(
            "{} labels vs {} probabilities",
            labels.len(),
            prob_positive.len()
        )));
    }
    // confusion[target][predicted]
    let mut confusion = [[0usize; 2]; 2];
    for (&label, &p) in labels.iter().zip(prob_positive) {
        let pred = usize::from(p >= threshold);
        confusion[label][pred] += 1;
    }
    let accuracy = (confusion[0][0] + confusion[1][1]) as f64 / labels.len() as f64;

    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    let mut f1_sum = 0.0;
    for class in 0..2 {
        let tp = confusion[class][class];
        let fp = confusion[1 - class][class];
        let fn_ = confusion[class][1 - class];
        let p = ratio(tp, tp + fp);
        let r = ratio(tp, tp + fn_);
        precision_sum += p;
        recall_sum += r;
        f1_sum += if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    }
    Ok((accuracy, precision_sum / 2.0, recall_sum / 2.0, f1_sum / 2.0))
}

/// Area under the ROC curve via the rank-based Mann-Whitney estimator.
///
/// Equivalent to the fraction of (positive, negative) pairs where the
/// positive scores higher, counting ties as one half. Computed from
/// tie-averaged ranks in `O(n log n)`.
pub fn auc(labels: &[usize], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(GlassError::ShapeMismatch(format!(
            "{} labels vs {} scores",
            labels.len(),
            scores.len()
        )));
    }
    let positives = labels.iter().filter(|&&l| l == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(GlassError::InvalidArgument(
            "AUC needs at least one positive and one negative".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));

    // tie-averaged ranks, 1-based
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }
    let p = positives as f64;
    let u = rank_sum_pos - p * (p + 1.0) / 2.0;
    Ok(u / (p * negatives as f64))
}

/// Expected calibration error with equal-width confidence bins on
/// `[0.5, 1]`.
///
/// Confidence of a prediction is `max(p, 1 - p)`; each non-empty bin
/// contributes its sample share times the absolute gap between bin accuracy
/// and bin mean confidence.
pub fn ece(labels: &[usize], prob_positive: &[f64], bins: usize) -> Result<f64> {
    if labels.is_empty() {
        return Err(GlassError::InvalidArgument("empty input".into()));
    }
    if labels.len() != prob_positive.len() {
        return Err(GlassError::ShapeMismatch(format!(
            "{} labels vs {} probabilities",
            labels.len(),
            prob_positive.len()
        )));
    }
    if bins == 0 {
        return Err(GlassError::InvalidArgument("bins must be >= 1".into()));
    }
    let mut count = vec![0usize; bins];
    let mut conf_sum = vec![0.0f64; bins];
    let mut correct = vec![0usize; bins];
    for (&label, &p) in labels.iter().zip(prob_positive) {
        let pred = usize::from(p >= 0.5);
        let conf = p.max(1.0 - p);
        // conf is in [0.5, 1]; map onto bins, clamping conf == 1 into the top bin
        let b = (((conf - 0.5) / 0.5) * bins as f64).floor() as usize;
        let b = b.min(bins - 1);
        count[b] += 1;
        conf_sum[b] += conf;
        correct[b] += usize::from(pred == label);
    }
    let total = labels.len() as f64;
    let mut e = 0.0;
    for b in 0..bins {
        if count[b] == 0 {
            continue;
        }
        let acc = correct[b] as f64 / count[b] as f64;
        let conf = conf_sum[b] / count[b] as f64;
        e += (count[b] as f64 / total) * (acc - conf).abs();
    }
    Ok(e)
}

/// Ordinary least-squares line fit with intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(GlassError::ShapeMismatch(format!(
            "{} xs vs {} ys",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(GlassError::InvalidArgument(
            "linear fit needs at least two points".into(),
        ));
    }
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    if sxx == 0.0 {
        return Err(GlassError::InvalidArgument(
            "all x values are identical".into(),
        ));
    }
    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean) * (y - y_mean)).sum();
    if ss_tot == 0.0 {
        return Err(GlassError::InvalidArgument(
            "y values have zero variance".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(LinearFit {
        intercept,
        slope,
        r_squared: 1.0 - ss_res / ss_tot,
    })
}

/// Summary statistics and a fixed-bin histogram of one set of weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// Counts over [`WeightDistribution::bin_edges`].
    pub histogram: Vec<usize>,
}

/// Per-half weight summary of a classifier weight matrix: the columns fed
/// by the global embedding vs the columns fed by the local aggregate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightDistribution {
    pub global_half: WeightStats,
    pub local_half: WeightStats,
    /// Shared histogram bin edges, `bins + 1` values symmetric around zero.
    pub bin_edges: Vec<f64>,
}

pub const WEIGHT_HIST_BINS: usize = 41;

/// Splits a `rows x (2D)` weight matrix column-wise into halves and
/// summarizes each with stats and a shared 41-bin symmetric histogram.
pub fn weight_distribution(weights: &[f64], rows: usize, cols: usize) -> Result<WeightDistribution> {
    if weights.len() != rows * cols {
        return Err(GlassError::ShapeMismatch(format!(
            "{} weights for a {rows}x{cols} matrix",
            weights.len()
        )));
    }
    if cols % 2 != 0 {
        return Err(GlassError::ShapeMismatch(format!(
            "weight matrix has odd column count {cols}, cannot split into halves"
        )));
    }
    let half = cols / 2;
    let mut global = Vec::with_capacity(rows * half);
    let mut local = Vec::with_capacity(rows * half);
    for r in 0..rows {
        for c in 0..cols {
            let v = weights[r * cols + c];
            if c < half {
                global.push(v);
            } else {
                local.push(v);
            }
        }
    }

    let absmax = weights
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let lo = -absmax;
    let width = 2.0 * absmax / WEIGHT_HIST_BINS as f64;
    let bin_edges: Vec<f64> = (0..=WEIGHT_HIST_BINS)
        .map(|i| lo + i as f64 * width)
        .collect();

    let stats = |vals: &[f64]| -> WeightStats {
        let count = vals.len();
        let mean = vals.iter().sum::<f64>() / count as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
        let mut histogram = vec![0usize; WEIGHT_HIST_BINS];
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in vals {
            min = min.min(v);
            max = max.max(v);
            let b = (((v - lo) / width).floor() as usize).min(WEIGHT_HIST_BINS - 1);
            histogram[b] += 1;
        }
        WeightStats {
            count,
            mean,
            std: var.sqrt(),
            min,
            max,
            histogram,
        }
    };

    Ok(WeightDistribution {
        global_half: stats(&global),
        local_half: stats(&local),
        bin_edges,
    })
}

impl WeightDistribution {
    /// CSV: one row per bin with both halves' counts, then summary rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,global_count,local_count\n");
        for b in 0..WEIGHT_HIST_BINS {
            out.push_str(&format!(
                "{:.6},{:.6},{},{}\n",
                self.bin_edges[b],
                self.bin_edges[b + 1],
                self.global_half.histogram[b],
                self.local_half.histogram[b]
            ));
        }
        out.push_str("half,count,mean,std,min,max\n");
        for (name, s) in [("global", &self.global_half), ("local", &self.local_half)] {
            out.push_str(&format!(
                "{name},{},{:.6},{:.6},{:.6},{:.6}\n",
                s.count, s.mean, s.std, s.min, s.max
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedRng;

    #[test]
    fn perfect_predictions() {
        let labels = [1, 0, 1, 0];
        let probs = [0.9, 0.1, 0.8, 0.2];
        let (acc, p, r, f1) = binary_metrics(&labels, &probs, 0.5).unwrap();
        assert_eq!((acc, p, r, f1), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn hand_confusion_matrix_case() {
        // labels (1,0,1,0), predictions (1,0,0,0)
        let labels = [1, 0, 1, 0];
        let probs = [0.9, 0.2, 0.3, 0.1];
        let (acc, p, r, f1) = binary_metrics(&labels, &probs, 0.5).unwrap();
        assert!((acc - 0.75).abs() < 1e-12);
        assert!((p - 5.0 / 6.0).abs() < 1e-12);
        assert!((r - 0.75).abs() < 1e-12);
        // class1 F1 = 2/3, class0 F1 = 0.8
        assert!((f1 - (2.0 / 3.0 + 0.8) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_denominator_convention() {
        // everything predicted class 0, all labels class 1
        let labels = [1, 1];
        let probs = [0.1, 0.2];
        let (acc, p, r, f1) = binary_metrics(&labels, &probs, 0.5).unwrap();
        assert_eq!(acc, 0.0);
        assert_eq!(p, 0.0); // class1: 0/0 -> 0; class0: 0/2 = 0
        assert_eq!(r, 0.0);
        assert_eq!(f1, 0.0);
    }

    #[test]
    fn metrics_agree_with_brute_force_confusion() {
        // randomized oracle: direct TP/TN counting on 1000 instances
        let mut rng = SeedRng::new(77);
        for _ in 0..1000 {
            let n = rng.int_in(2, 40);
            let labels: Vec<usize> = (0..n).map(|_| rng.int_in(0, 1)).collect();
            let probs: Vec<f64> = (0..n).map(|_| rng.unit_f64()).collect();
            let (acc, _, _, _) = binary_metrics(&labels, &probs, 0.5).unwrap();
            let correct = labels
                .iter()
                .zip(&probs)
                .filter(|(&l, &p)| usize::from(p >= 0.5) == l)
                .count();
            assert!((acc - correct as f64 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn auc_perfect_and_inverted() {
        let labels = [1, 1, 0, 0];
        assert_eq!(auc(&labels, &[0.9, 0.8, 0.2, 0.1]).unwrap(), 1.0);
        assert_eq!(auc(&labels, &[0.1, 0.2, 0.8, 0.9]).unwrap(), 0.0);
    }

    #[test]
    fn auc_tie_case() {
        let labels = [1, 1, 0, 0];
        let scores = [0.9, 0.8, 0.8, 0.1];
        assert!((auc(&labels, &scores).unwrap() - 0.875).abs() < 1e-12);
    }

    #[test]
    fn auc_single_class_rejected() {
        assert!(auc(&[1, 1], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn auc_invariant_under_monotone_transform() {
        let mut rng = SeedRng::new(3);
        for _ in 0..200 {
            let n = rng.int_in(4, 30);
            let labels: Vec<usize> = (0..n).map(|i| usize::from(i % 2 == 0)).collect();
            let scores: Vec<f64> = (0..n).map(|_| rng.unit_f64()).collect();
            let squashed: Vec<f64> = scores.iter().map(|s| (4.0 * s).exp() / 100.0).collect();
            let a = auc(&labels, &scores).unwrap();
            let b = auc(&labels, &squashed).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn auc_rank_estimator_matches_pair_enumeration() {
        let mut rng = SeedRng::new(9);
        for _ in 0..300 {
            let n = rng.int_in(4, 25);
            let labels: Vec<usize> = (0..n).map(|_| rng.int_in(0, 1)).collect();
            if labels.iter().all(|&l| l == 0) || labels.iter().all(|&l| l == 1) {
                continue;
            }
            // coarse grid of scores to provoke ties
            let scores: Vec<f64> = (0..n).map(|_| rng.int_in(0, 5) as f64 / 5.0).collect();
            let fast = auc(&labels, &scores).unwrap();
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if labels[i] == 1 && labels[j] == 0 {
                        den += 1.0;
                        num += if scores[i] > scores[j] {
                            1.0
                        } else if scores[i] == scores[j] {
                            0.5
                        } else {
                            0.0
                        };
                    }
                }
            }
            assert!((fast - num / den).abs() < 1e-12);
        }
    }

    #[test]
    fn ece_zero_for_confident_correct() {
        let labels = [1, 0, 1];
        let probs = [1.0, 0.0, 1.0];
        assert_eq!(ece(&labels, &probs, 15).unwrap(), 0.0);
    }

    #[test]
    fn ece_single_bin_hand_case() {
        // (conf 0.8, correct) and (conf 0.6, wrong) in one bin:
        // |acc 0.5 - mean conf 0.7| = 0.2
        let labels = [1, 1];
        let probs = [0.8, 0.4];
        assert!((ece(&labels, &probs, 1).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn ece_near_zero_for_half_confidence() {
        // uniform 0.5-confidence predictions on a balanced set
        let labels = [1, 0, 1, 0];
        let probs = [0.5, 0.5, 0.5, 0.5];
        // all predicted 1, accuracy 0.5, confidence 0.5
        assert!(ece(&labels, &probs, 15).unwrap() < 1e-12);
    }

    #[test]
    fn ece_rejects_empty_and_zero_bins() {
        assert!(ece(&[], &[], 15).is_err());
        assert!(ece(&[1], &[0.9], 0).is_err());
    }

    #[test]
    fn linear_fit_exact_affine() {
        let xs = [1.0, 2.0, 4.0, 8.0, 16.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.5 + 2.25 * x).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope - 2.25).abs() < 1e-9);
        assert!((fit.intercept - 3.5).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_hand_case() {
        let fit = linear_fit(&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0]).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 2.0 / 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 0.75).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
        assert!(linear_fit(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).is_err());
    }

    #[test]
    fn weight_distribution_zero_matrix() {
        let d = 64;
        let w = vec![0.0; 2 * 2 * d];
        let dist = weight_distribution(&w, 2, 2 * d).unwrap();
        for half in [&dist.global_half, &dist.local_half] {
            assert_eq!(half.count, 2 * d);
            assert_eq!(half.mean, 0.0);
            assert_eq!(half.std, 0.0);
        }
    }

    #[test]
    fn weight_distribution_counts_match_embedding_dims() {
        // embedding width 768 -> 2x1536 matrix -> 3072 weights total
        let dist = weight_distribution(&vec![0.1; 2 * 1536], 2, 1536).unwrap();
        assert_eq!(dist.global_half.count + dist.local_half.count, 3072);
        // embedding width 2048 -> 8192 weights total
        let dist = weight_distribution(&vec![0.1; 2 * 4096], 2, 4096).unwrap();
        assert_eq!(dist.global_half.count + dist.local_half.count, 8192);
    }

    #[test]
    fn weight_distribution_histogram_covers_all() {
        let mut rng = SeedRng::new(4);
        let vals: Vec<f64> = (0..256).map(|_| rng.normal_f64() * 0.05).collect();
        let dist = weight_distribution(&vals, 2, 128).unwrap();
        let g: usize = dist.global_half.histogram.iter().sum();
        let l: usize = dist.local_half.histogram.iter().sum();
        assert_eq!(g + l, 256);
        assert_eq!(dist.bin_edges.len(), WEIGHT_HIST_BINS + 1);
    }
}
