//! Diagnostics, baselines, and detection scoring.
//!
//! Three layers: per-function firing statistics over a firing matrix
//! (coverage, overlap, conflict), a majority-vote pixel baseline, and
//! box-level precision/recall/F1 against ground truth via greedy
//! IoU matching.

use crate::error::{Error, Result};
use crate::imgproc::{BinaryMap, WordBox};
use crate::labeling::{LFClass, TauMatrix};

/// Raw firing tallies for one labeling function over one or more images.
/// Ratios are derived lazily so tallies from many images can be summed
/// before dividing.
#[derive(Debug, Clone, PartialEq)]
pub struct LfStats {
    pub lf_id: String,
    /// Total pixels examined.
    pub pixels: u64,
    /// Pixels where this function fired.
    pub covered: u64,
    /// Fired pixels where some other function of the same class also fired.
    pub overlapped: u64,
    /// Fired pixels where some function of the other class also fired.
    pub conflicted: u64,
}

/// Denominator used when turning the conflict tally into a rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConflictDenominator {
    Covered,
    Overlapped,
}

impl LfStats {
    pub fn coverage(&self) -> f64 {
        ratio(self.covered, self.pixels)
    }

    pub fn overlap(&self) -> f64 {
        ratio(self.overlapped, self.covered)
    }

    pub fn conflict(&self, denom: ConflictDenominator) -> f64 {
        match denom {
            ConflictDenominator::Covered => ratio(self.conflicted, self.covered),
            ConflictDenominator::Overlapped => ratio(self.conflicted, self.overlapped),
        }
    }

    /// Adds another image's tallies for the same function.
    pub fn absorb(&mut self, other: &LfStats) {
        self.pixels += other.pixels;
        self.covered += other.covered;
        self.overlapped += other.overlapped;
        self.conflicted += other.conflicted;
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-function firing statistics for one firing matrix.
pub fn lf_stats(tau: &TauMatrix) -> Vec<LfStats> {
    let n = tau.n();
    let mut same_mask = vec![0u64; n];
    let mut diff_mask = vec![0u64; n];
    for j in 0..n {
        for j2 in 0..n {
            if j2 == j {
                continue;
            }
            if tau.lf_classes()[j2] == tau.lf_classes()[j] {
                same_mask[j] |= 1 << j2;
            } else {
                diff_mask[j] |= 1 << j2;
            }
        }
    }

    let mut stats: Vec<LfStats> = tau
        .lf_ids()
        .iter()
        .map(|id| LfStats {
            lf_id: id.clone(),
            pixels: tau.len() as u64,
            covered: 0,
            overlapped: 0,
            conflicted: 0,
        })
        .collect();

    for (pattern, count) in crate::labeling::histogram(tau).iter() {
        let mut bits = pattern;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            stats[j].covered += count;
            if pattern & same_mask[j] != 0 {
                stats[j].overlapped += count;
            }
            if pattern & diff_mask[j] != 0 {
                stats[j].conflicted += count;
            }
            bits &= bits - 1;
        }
    }
    stats
}

/// Majority-vote baseline: a pixel is foreground when strictly more TEXT
/// functions than NONTEXT functions fired on it.
pub fn majority_vote(tau: &TauMatrix) -> BinaryMap {
    let mut text_mask = 0u64;
    let mut nontext_mask = 0u64;
    for (j, class) in tau.lf_classes().iter().enumerate() {
        match class {
            LFClass::Text => text_mask |= 1 << j,
            LFClass::NonText => nontext_mask |= 1 << j,
        }
    }
    let bits: Vec<u8> = tau
        .firings()
        .iter()
        .map(|&p| {
            let text = (p & text_mask).count_ones();
            let nontext = (p & nontext_mask).count_ones();
            u8::from(text > nontext)
        })
        .collect();
    BinaryMap::new(tau.width(), tau.height(), bits)
        .expect("firing matrix dimensions are already validated")
}

/// Intersection over union of two boxes. Zero when the union is empty.
pub fn iou(a: &WordBox, b: &WordBox) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Matching tallies of one prediction set against one ground-truth set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionCounts {
    pub tp: u64,
    pub pred: u64,
    pub gt: u64,
}

impl DetectionCounts {
    pub fn zero() -> Self {
        DetectionCounts { tp: 0, pred: 0, gt: 0 }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.pred)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.gt)
    }

    /// `2 TP / (|pred| + |gt|)`, the harmonic mean of precision and
    /// recall; 0 when both sets are empty.
    pub fn f1(&self) -> f64 {
        ratio(2 * self.tp, self.pred + self.gt)
    }

    pub fn absorb(&mut self, other: &DetectionCounts) {
        self.tp += other.tp;
        self.pred += other.pred;
        self.gt += other.gt;
    }
}

/// Greedy one-to-one matching: candidate pairs with IoU at or above the
/// threshold are visited in descending IoU order (ties by prediction
/// index, then ground-truth index) and a pair is kept when both sides are
/// still unmatched. Kept pairs are the true positives.
pub fn match_boxes(pred: &[WordBox], gt: &[WordBox], iou_threshold: f64) -> DetectionCounts {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (pi, p) in pred.iter().enumerate() {
        for (gi, g) in gt.iter().enumerate() {
            let v = iou(p, g);
            if v >= iou_threshold {
                candidates.push((v, pi, gi));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("IoU values are finite")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut pred_used = vec![false; pred.len()];
    let mut gt_used = vec![false; gt.len()];
    let mut tp = 0u64;
    for (_, pi, gi) in candidates {
        if !pred_used[pi] && !gt_used[gi] {
            pred_used[pi] = true;
            gt_used[gi] = true;
            tp += 1;
        }
    }
    DetectionCounts {
        tp,
        pred: pred.len() as u64,
        gt: gt.len() as u64,
    }
}

/// How corpus-level precision/recall/F1 are combined from per-image
/// tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    /// Sum TP / prediction / ground-truth counts, then divide.
    Micro,
    /// Average each image's own precision, recall, and F1.
    Macro,
}

/// One image's matching result within a corpus evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageEval {
    pub name: String,
    pub counts: DetectionCounts,
}

/// Corpus-level evaluation at one IoU threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEval {
    pub threshold: f64,
    pub averaging: Averaging,
    pub images: Vec<ImageEval>,
}

impl CorpusEval {
    fn micro_counts(&self) -> DetectionCounts {
        let mut total = DetectionCounts::zero();
        for img in &self.images {
            total.absorb(&img.counts);
        }
        total
    }

    fn macro_mean(&self, f: impl Fn(&DetectionCounts) -> f64) -> f64 {
        if self.images.is_empty() {
            return 0.0;
        }
        self.images.iter().map(|i| f(&i.counts)).sum::<f64>() / self.images.len() as f64
    }

    pub fn precision(&self) -> f64 {
        match self.averaging {
            Averaging::Micro => self.micro_counts().precision(),
            Averaging::Macro => self.macro_mean(DetectionCounts::precision),
        }
    }

    pub fn recall(&self) -> f64 {
        match self.averaging {
            Averaging::Micro => self.micro_counts().recall(),
            Averaging::Macro => self.macro_mean(DetectionCounts::recall),
        }
    }

    pub fn f1(&self) -> f64 {
        match self.averaging {
            Averaging::Micro => self.micro_counts().f1(),
            Averaging::Macro => self.macro_mean(DetectionCounts::f1),
        }
    }
}

/// Evaluates a corpus of (name, predictions, ground truth) triples at one
/// threshold.
pub fn evaluate_corpus(
    pairs: &[(String, Vec<WordBox>, Vec<WordBox>)],
    iou_threshold: f64,
    averaging: Averaging,
) -> Result<CorpusEval> {
    check_threshold(iou_threshold)?;
    let images = pairs
        .iter()
        .map(|(name, pred, gt)| ImageEval {
            name: name.clone(),
            counts: match_boxes(pred, gt, iou_threshold),
        })
        .collect();
    Ok(CorpusEval {
        threshold: iou_threshold,
        averaging,
        images,
    })
}

/// Evaluates at several thresholds, which must be strictly ascending.
pub fn sweep(
    pairs: &[(String, Vec<WordBox>, Vec<WordBox>)],
    thresholds: &[f64],
    averaging: Averaging,
) -> Result<Vec<CorpusEval>> {
    if thresholds.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one IoU threshold is required".into(),
        ));
    }
    for pair in thresholds.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::InvalidParameter(format!(
                "thresholds must be strictly ascending, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    thresholds
        .iter()
        .map(|&t| evaluate_corpus(pairs, t, averaging))
        .collect()
}

fn check_threshold(t: f64) -> Result<()> {
    if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
        return Err(Error::InvalidParameter(format!(
            "IoU threshold must lie in [0, 1], got {t}"
        )));
    }
    Ok(())
}
