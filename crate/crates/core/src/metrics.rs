//! Ground-truth benchmark metrics: confusion counts, removal rates, SNR,
//! accuracy, and ROC/AUC.
//!
//! These metrics need labeled streams. They are monotone in the filter
//! threshold, which is exactly why they cannot rank denoisers on their
//! own; the contrast-curve metrics exist to complement them.

use crate::denoise::ScoredStream;
use crate::error::{Error, Result};
use crate::event::{EventStream, Label};

/// Outcome counts of comparing a denoiser's kept set against labels.
///
/// Positive means kept: a true positive is a kept signal event, a true
/// negative a removed noise event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
    pub false_positives: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_positives + self.false_negatives + self.true_negatives + self.false_positives
    }

    /// Signal events in the input: kept + removed.
    pub fn signal_total(&self) -> u64 {
        self.true_positives + self.false_negatives
    }

    /// Noise events in the input: removed + kept.
    pub fn noise_total(&self) -> u64 {
        self.true_negatives + self.false_positives
    }
}

/// All rate metrics derived from one confusion table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub counts: ConfusionCounts,
    /// Noise event removal rate, TN / (TN + FP).
    pub nerr: f64,
    /// Valid (signal) event removal rate, FN / (FN + TP).
    pub verr: f64,
    /// 10 log10(TP / FP), in dB.
    pub snr_db: f64,
    /// (TP + TN) / total.
    pub acc: f64,
    /// True positive rate, defined as 1 - VeRr.
    pub tpr: f64,
    /// False positive rate, defined as 1 - NeRr.
    pub fpr: f64,
}

/// Compares a denoiser output against its labeled input.
///
/// `kept` must be a subsequence of `input` under (t, x, y, polarity)
/// equality; matching is a linear two-pointer scan, greedy on duplicates.
pub fn confusion(input: &EventStream, kept: &EventStream) -> Result<ConfusionCounts> {
    let labels = input.labels().ok_or(Error::MissingLabels)?;
    if input.geometry() != kept.geometry() {
        return Err(Error::GeometryMismatch {
            left: input.geometry(),
            right: kept.geometry(),
        });
    }
    let mut counts = ConfusionCounts {
        true_positives: 0,
        false_negatives: 0,
        true_negatives: 0,
        false_positives: 0,
    };
    let mut removed = |label: Label| match label {
        Label::Signal => counts.false_negatives += 1,
        Label::Noise => counts.true_negatives += 1,
    };
    let mut j = 0usize;
    for (index, event) in kept.events().iter().enumerate() {
        loop {
            if j == input.len() || input.events()[j].t > event.t {
                return Err(Error::NotASubsequence { index });
            }
            let candidate = input.events()[j];
            j += 1;
            if candidate == *event {
                match labels[j - 1] {
                    Label::Signal => counts.true_positives += 1,
                    Label::Noise => counts.false_positives += 1,
                }
                break;
            }
            removed(labels[j - 1]);
        }
    }
    for &label in &labels[j..] {
        removed(label);
    }
    Ok(counts)
}

/// Derives every rate metric from a confusion table.
///
/// Degenerate denominators produce IEEE sentinels instead of clamps:
/// NeRr is NaN when the input had no noise, VeRr is NaN when it had no
/// signal, and SNR is +inf / -inf / NaN as TP and FP vanish.
pub fn report(counts: ConfusionCounts) -> MetricsReport {
    let tp = counts.true_positives as f64;
    let fn_removed = counts.false_negatives as f64;
    let tn = counts.true_negatives as f64;
    let fp = counts.false_positives as f64;
    let nerr = tn / (tn + fp);
    let verr = fn_removed / (fn_removed + tp);
    MetricsReport {
        counts,
        nerr,
        verr,
        snr_db: 10.0 * (tp / fp).log10(),
        acc: (tp + tn) / counts.total() as f64,
        tpr: 1.0 - verr,
        fpr: 1.0 - nerr,
    }
}

/// One ROC operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// A receiver operating characteristic curve with its area.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<RocPoint>,
    auc: f64,
}

impl RocCurve {
    /// Points sorted by (fpr, tpr), anchors (0,0) and (1,1) included.
    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }

    pub fn auc(&self) -> f64 {
        self.auc
    }
}

/// Sweeps `thresholds` over a labeled scored stream into a ROC curve.
///
/// Each threshold keeps events with score >= threshold; anchors (0,0) and
/// (1,1) are appended with infinite thresholds, and the AUC is the
/// trapezoidal area over the fpr-sorted points.
pub fn roc(scored: &ScoredStream, thresholds: &[f64]) -> Result<RocCurve> {
    let labels = scored.stream().labels().ok_or(Error::MissingLabels)?;
    if thresholds.is_empty() {
        return Err(Error::InvalidGrid("threshold grid is empty"));
    }
    if let Some(&bad) = thresholds.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidThreshold(bad));
    }

    let mut signal_scores = Vec::new();
    let mut noise_scores = Vec::new();
    for (&label, &score) in labels.iter().zip(scored.scores()) {
        match label {
            Label::Signal => signal_scores.push(score),
            Label::Noise => noise_scores.push(score),
        }
    }
    if signal_scores.is_empty() || noise_scores.is_empty() {
        return Err(Error::DegenerateClasses {
            signal: signal_scores.len() as u64,
            noise: noise_scores.len() as u64,
        });
    }
    signal_scores.sort_by(f64::total_cmp);
    noise_scores.sort_by(f64::total_cmp);
    let rate_at_or_above = |sorted: &[f64], tau: f64| {
        let kept = sorted.len() - sorted.partition_point(|&s| s < tau);
        kept as f64 / sorted.len() as f64
    };

    let mut points: Vec<RocPoint> = thresholds
        .iter()
        .map(|&tau| RocPoint {
            threshold: tau,
            fpr: rate_at_or_above(&noise_scores, tau),
            tpr: rate_at_or_above(&signal_scores, tau),
        })
        .collect();
    points.push(RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    });
    points.push(RocPoint {
        threshold: f64::NEG_INFINITY,
        fpr: 1.0,
        tpr: 1.0,
    });
    points.sort_by(|a, b| a.fpr.total_cmp(&b.fpr).then(a.tpr.total_cmp(&b.tpr)));

    let auc = points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}
