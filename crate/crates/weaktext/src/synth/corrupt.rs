//! Controlled corruption of ground-truth boxes into pseudo detector
//! output.
//!
//! A corrupted copy of a page's true boxes behaves like the output of an
//! imperfect external detector: some words are missed, neighboring words
//! get merged into one box, edges wobble, and phantom boxes appear. Each
//! corruption stream is seeded independently per labeling function and
//! per page, so one detector's noise never influences another's.

use super::rng::{page_seed, Rng};
use crate::error::{Error, Result};
use crate::imgproc::WordBox;

/// Knobs for one pseudo detector. Defaults are all-off; a default spec
/// reproduces the ground truth exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionSpec {
    /// Probability of dropping each true box.
    pub drop_rate: f64,
    /// Probability of merging an eligible adjacent pair into one box.
    pub merge_rate: f64,
    /// Maximum per-edge displacement in pixels.
    pub jitter: u32,
    /// Expected number of phantom boxes per page.
    pub spurious_rate: f64,
    /// Stream seed for this detector, combined with the page index.
    pub seed: u64,
}

impl Default for CorruptionSpec {
    fn default() -> Self {
        CorruptionSpec {
            drop_rate: 0.0,
            merge_rate: 0.0,
            jitter: 0,
            spurious_rate: 0.0,
            seed: 0,
        }
    }
}

impl CorruptionSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("drop_rate", self.drop_rate), ("merge_rate", self.merge_rate)] {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        if !(self.spurious_rate.is_finite() && self.spurious_rate >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spurious_rate must be non-negative, got {}",
                self.spurious_rate
            )));
        }
        Ok(())
    }
}

const SPURIOUS_W_MIN: u32 = 10;
const SPURIOUS_W_MAX: u32 = 50;
const SPURIOUS_H_MIN: u32 = 8;
const SPURIOUS_H_MAX: u32 = 20;
const MERGE_MAX_GAP: u32 = 10;

/// Applies drop, merge, jitter, and spurious stages in that order and
/// returns the corrupted boxes sorted by (y, x). `boxes` must lie inside
/// the `width` x `height` page.
pub fn corrupt_boxes(
    boxes: &[WordBox],
    width: u32,
    height: u32,
    spec: &CorruptionSpec,
    page_index: u64,
) -> Result<Vec<WordBox>> {
    spec.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(
            "page dimensions must be positive".into(),
        ));
    }
    let mut rng = Rng::new(page_seed(spec.seed, page_index));

    let mut kept: Vec<WordBox> = boxes
        .iter()
        .filter(|_| !rng.chance(spec.drop_rate))
        .copied()
        .collect();

    let mut merged: Vec<WordBox> = Vec::with_capacity(kept.len());
    let mut i = 0;
    while i < kept.len() {
        if i + 1 < kept.len()
            && mergeable(&kept[i], &kept[i + 1])
            && rng.chance(spec.merge_rate)
        {
            merged.push(union_box(&kept[i], &kept[i + 1]));
            i += 2;
        } else {
            merged.push(kept[i]);
            i += 1;
        }
    }
    kept = merged;

    let j = spec.jitter as i32;
    for b in kept.iter_mut() {
        let dl = rng.range_i32(-j, j);
        let dt = rng.range_i32(-j, j);
        let dr = rng.range_i32(-j, j);
        let db = rng.range_i32(-j, j);
        *b = jittered(b, dl, dt, dr, db, width, height);
    }

    let mut count = spec.spurious_rate.floor() as u64;
    if rng.chance(spec.spurious_rate.fract()) {
        count += 1;
    }
    for _ in 0..count {
        let w = rng.range_u32(SPURIOUS_W_MIN, SPURIOUS_W_MAX).min(width);
        let h = rng.range_u32(SPURIOUS_H_MIN, SPURIOUS_H_MAX).min(height);
        let x = rng.range_u32(0, width - w);
        let y = rng.range_u32(0, height - h);
        kept.push(WordBox { x, y, w, h });
    }

    kept.sort_by_key(|b| (b.y, b.x, b.w, b.h));
    Ok(kept)
}

/// Two boxes merge when they look like words of one line: their vertical
/// overlap covers at least half the shorter box and the horizontal gap is
/// small.
fn mergeable(a: &WordBox, b: &WordBox) -> bool {
    let top = a.y.max(b.y);
    let bottom = a.bottom().min(b.bottom());
    let v_overlap = bottom.saturating_sub(top);
    if 2 * v_overlap < a.h.min(b.h) {
        return false;
    }
    let gap = if a.right() <= b.x {
        b.x - a.right()
    } else if b.right() <= a.x {
        a.x - b.right()
    } else {
        0
    };
    gap <= MERGE_MAX_GAP
}

fn union_box(a: &WordBox, b: &WordBox) -> WordBox {
    let x = a.x.min(b.x);
    let y = a.y.min(b.y);
    let right = a.right().max(b.right());
    let bottom = a.bottom().max(b.bottom());
    WordBox { x, y, w: right - x, h: bottom - y }
}

/// Moves the four edges independently, then clamps the box back into the
/// page at size at least 1x1.
fn jittered(b: &WordBox, dl: i32, dt: i32, dr: i32, db: i32, width: u32, height: u32) -> WordBox {
    let clamp_span = |lo: i64, hi: i64, limit: u32| -> (u32, u32) {
        let lo = lo.clamp(0, limit as i64 - 1);
        let hi = hi.clamp(lo + 1, limit as i64);
        (lo as u32, (hi - lo) as u32)
    };
    let (x, w) = clamp_span(
        b.x as i64 + dl as i64,
        b.right() as i64 + dr as i64,
        width,
    );
    let (y, h) = clamp_span(
        b.y as i64 + dt as i64,
        b.bottom() as i64 + db as i64,
        height,
    );
    WordBox { x, y, w, h }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize) -> Vec<WordBox> {
        (0..n)
            .map(|i| WordBox {
                x: 4 + i as u32 * 30,
                y: 10,
                w: 24,
                h: 12,
            })
            .collect()
    }

    #[test]
    fn default_spec_is_the_identity() {
        let boxes = row(5);
        let got = corrupt_boxes(&boxes, 200, 100, &CorruptionSpec::default(), 0).unwrap();
        assert_eq!(got, boxes);
    }

    #[test]
    fn corruption_is_deterministic_per_seed_and_page() {
        let boxes = row(6);
        let spec = CorruptionSpec {
            drop_rate: 0.3,
            merge_rate: 0.5,
            jitter: 2,
            spurious_rate: 1.5,
            seed: 11,
        };
        let a = corrupt_boxes(&boxes, 300, 100, &spec, 2).unwrap();
        let b = corrupt_boxes(&boxes, 300, 100, &spec, 2).unwrap();
        assert_eq!(a, b);
        let other_page = corrupt_boxes(&boxes, 300, 100, &spec, 3).unwrap();
        assert_ne!(a, other_page);
        let other_seed = corrupt_boxes(
            &boxes,
            300,
            100,
            &CorruptionSpec { seed: 12, ..spec },
            2,
        )
        .unwrap();
        assert_ne!(a, other_seed);
    }

    #[test]
    fn drop_rate_one_removes_everything_but_spurious() {
        let spec = CorruptionSpec {
            drop_rate: 1.0,
            ..CorruptionSpec::default()
        };
        assert!(corrupt_boxes(&row(8), 300, 100, &spec, 0).unwrap().is_empty());
    }

    #[test]
    fn drop_rate_thins_roughly_proportionally() {
        let boxes = row(6);
        let spec = CorruptionSpec {
            drop_rate: 0.25,
            ..CorruptionSpec::default()
        };
        let total: usize = (0..200)
            .map(|page| corrupt_boxes(&boxes, 300, 100, &spec, page).unwrap().len())
            .sum();
        let rate = 1.0 - total as f64 / 1200.0;
        assert!((rate - 0.25).abs() < 0.05, "observed drop rate {rate}");
    }

    #[test]
    fn merge_rate_one_merges_adjacent_row_words_pairwise() {
        let boxes = row(4);
        let spec = CorruptionSpec {
            merge_rate: 1.0,
            ..CorruptionSpec::default()
        };
        let got = corrupt_boxes(&boxes, 300, 100, &spec, 0).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0], WordBox { x: 4, y: 10, w: 54, h: 12 });
        assert_eq!(got[1], WordBox { x: 64, y: 10, w: 54, h: 12 });
    }

    #[test]
    fn distant_or_misaligned_boxes_never_merge() {
        let far = vec![
            WordBox { x: 4, y: 10, w: 20, h: 12 },
            WordBox { x: 40, y: 10, w: 20, h: 12 },
        ];
        let spec = CorruptionSpec {
            merge_rate: 1.0,
            ..CorruptionSpec::default()
        };
        assert_eq!(corrupt_boxes(&far, 300, 100, &spec, 0).unwrap().len(), 2);
        let stacked = vec![
            WordBox { x: 4, y: 10, w: 20, h: 12 },
            WordBox { x: 6, y: 21, w: 20, h: 12 },
        ];
        // Vertical overlap is a single row, less than half of 12.
        assert_eq!(corrupt_boxes(&stacked, 300, 100, &spec, 0).unwrap().len(), 2);
    }

    #[test]
    fn jitter_stays_inside_the_page_and_keeps_min_size() {
        let edge_boxes = vec![
            WordBox { x: 0, y: 0, w: 3, h: 3 },
            WordBox { x: 57, y: 37, w: 3, h: 3 },
            WordBox { x: 30, y: 20, w: 1, h: 1 },
        ];
        let spec = CorruptionSpec {
            jitter: 5,
            ..CorruptionSpec::default()
        };
        for page in 0..50 {
            for b in corrupt_boxes(&edge_boxes, 60, 40, &spec, page).unwrap() {
                assert!(b.w >= 1 && b.h >= 1);
                assert!(b.right() <= 60 && b.bottom() <= 40);
            }
        }
    }

    #[test]
    fn jitter_moves_edges_at_most_jitter_pixels() {
        let boxes = vec![WordBox { x: 20, y: 20, w: 30, h: 10 }];
        let spec = CorruptionSpec {
            jitter: 2,
            ..CorruptionSpec::default()
        };
        for page in 0..50 {
            let got = corrupt_boxes(&boxes, 100, 60, &spec, page).unwrap();
            let b = got[0];
            assert!((b.x as i64 - 20).abs() <= 2);
            assert!((b.y as i64 - 20).abs() <= 2);
            assert!((b.right() as i64 - 50).abs() <= 2);
            assert!((b.bottom() as i64 - 30).abs() <= 2);
        }
    }

    #[test]
    fn spurious_rate_adds_the_expected_count() {
        let spec = CorruptionSpec {
            spurious_rate: 2.0,
            ..CorruptionSpec::default()
        };
        let got = corrupt_boxes(&[], 300, 100, &spec, 0).unwrap();
        assert_eq!(got.len(), 2);
        for b in &got {
            assert!(b.right() <= 300 && b.bottom() <= 100);
            assert!((SPURIOUS_W_MIN..=SPURIOUS_W_MAX).contains(&b.w));
            assert!((SPURIOUS_H_MIN..=SPURIOUS_H_MAX).contains(&b.h));
        }
        let fractional = CorruptionSpec {
            spurious_rate: 0.5,
            ..CorruptionSpec::default()
        };
        let total: usize = (0..400)
            .map(|page| corrupt_boxes(&[], 300, 100, &fractional, page).unwrap().len())
            .sum();
        let mean = total as f64 / 400.0;
        assert!((mean - 0.5).abs() < 0.1, "observed spurious mean {mean}");
    }

    #[test]
    fn output_is_sorted_by_row_then_column() {
        let boxes = vec![
            WordBox { x: 100, y: 40, w: 20, h: 10 },
            WordBox { x: 4, y: 10, w: 20, h: 10 },
            WordBox { x: 60, y: 10, w: 20, h: 10 },
        ];
        let spec = CorruptionSpec {
            jitter: 3,
            spurious_rate: 3.0,
            seed: 5,
            ..CorruptionSpec::default()
        };
        let got = corrupt_boxes(&boxes, 300, 100, &spec, 1).unwrap();
        let keys: Vec<(u32, u32)> = got.iter().map(|b| (b.y, b.x)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn rejects_invalid_specs() {
        let bad = CorruptionSpec {
            drop_rate: 1.5,
            ..CorruptionSpec::default()
        };
        assert!(corrupt_boxes(&[], 10, 10, &bad, 0).is_err());
        let bad = CorruptionSpec {
            spurious_rate: -1.0,
            ..CorruptionSpec::default()
        };
        assert!(corrupt_boxes(&[], 10, 10, &bad, 0).is_err());
    }
}
