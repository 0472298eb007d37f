//! Shared helpers for the integration suites: a brute-force reference
//! implementation of the label model (direct enumeration over all firing
//! patterns in plain arithmetic, no log-space tricks) and seeded random
//! instance generators.

use std::collections::BTreeMap;
use weaktext::aggregator::{LfEntry, ThetaParams};
use weaktext::imgproc::BinaryMap;
use weaktext::labeling::{
    build_tau, LFClass, LFKind, LFSpec, MissingPolicy, PatternHistogram, Polarity, TauMatrix,
};
use weaktext::synth::rng::Rng;

/// The joint distribution tabulated pattern by pattern: `weights[p][y]`
/// is the unnormalized product of potentials for firing pattern `p` and
/// class column `y`, and `z` is their total over all patterns and classes.
pub struct Enumerated {
    pub n: usize,
    pub z: f64,
    pub weights: Vec<[f64; 2]>,
}

pub fn enumerate(theta: &[[f64; 2]]) -> Enumerated {
    let n = theta.len();
    let mut weights = vec![[0.0f64; 2]; 1usize << n];
    for pattern in 0..(1u64 << n) {
        for y in 0..2 {
            let mut w = 1.0;
            for (j, row) in theta.iter().enumerate() {
                if pattern >> j & 1 == 1 {
                    w *= row[y].exp();
                }
            }
            weights[pattern as usize][y] = w;
        }
    }
    let z = weights.iter().map(|w| w[0] + w[1]).sum();
    Enumerated { n, z, weights }
}

impl Enumerated {
    pub fn log_partition(&self) -> f64 {
        self.z.ln()
    }

    /// Log of the unnormalized pattern weight summed over classes.
    pub fn pattern_loglik(&self, pattern: u64) -> f64 {
        let w = self.weights[pattern as usize];
        (w[0] + w[1]).ln()
    }

    pub fn loglik(&self, hist: &PatternHistogram) -> f64 {
        let mut total = 0.0;
        let mut pixels = 0u64;
        for (pattern, count) in hist.iter() {
            total += count as f64 * self.pattern_loglik(pattern);
            pixels += count;
        }
        total - pixels as f64 * self.log_partition()
    }

    pub fn posterior_text(&self, pattern: u64) -> f64 {
        let w = self.weights[pattern as usize];
        w[LFClass::Text.index()] / (w[0] + w[1])
    }

    /// P(y = k_j | labeling function j fired), by summing raw weights over
    /// the patterns where bit j is set.
    pub fn lf_precision(&self, j: usize, class: LFClass) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for pattern in 0..(1u64 << self.n) {
            if pattern >> j & 1 == 1 {
                let w = self.weights[pattern as usize];
                num += w[class.index()];
                den += w[0] + w[1];
            }
        }
        num / den
    }

    pub fn regularizer(&self, entries: &[LfEntry]) -> f64 {
        entries
            .iter()
            .enumerate()
            .map(|(j, e)| {
                let p = self.lf_precision(j, e.class);
                e.quality * p.ln() + (1.0 - e.quality) * (1.0 - p).ln()
            })
            .sum()
    }

    pub fn objective(&self, hist: &PatternHistogram, entries: &[LfEntry]) -> f64 {
        self.loglik(hist) + self.regularizer(entries)
    }
}

/// Central finite differences of the analytic objective, step `h` per
/// parameter.
pub fn fd_gradient(
    hist: &PatternHistogram,
    params: &ThetaParams,
    guides: &[f64],
    h: f64,
) -> Vec<[f64; 2]> {
    let mut grad = vec![[0.0f64; 2]; params.n()];
    for j in 0..params.n() {
        for y in 0..2 {
            let mut plus = params.theta().to_vec();
            plus[j][y] += h;
            let mut minus = params.theta().to_vec();
            minus[j][y] -= h;
            let up = weaktext::aggregator::objective(
                hist,
                &params.with_theta(plus).unwrap(),
                guides,
            )
            .unwrap();
            let down = weaktext::aggregator::objective(
                hist,
                &params.with_theta(minus).unwrap(),
                guides,
            )
            .unwrap();
            grad[j][y] = (up - down) / (2.0 * h);
        }
    }
    grad
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= rel * scale.max(1e-300)
}

pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= abs.max(rel * scale)
}

pub fn random_classes(rng: &mut Rng, n: usize) -> Vec<LFClass> {
    (0..n)
        .map(|_| {
            if rng.chance(0.5) {
                LFClass::Text
            } else {
                LFClass::NonText
            }
        })
        .collect()
}

/// Parameters with ids `lf0..lfN`, the given classes, uniform random
/// guides in (0.05, 0.95), and theta entries in [-3, 3].
pub fn random_params(rng: &mut Rng, classes: &[LFClass]) -> ThetaParams {
    let entries = classes
        .iter()
        .enumerate()
        .map(|(j, &class)| LfEntry {
            id: format!("lf{j}"),
            class,
            quality: 0.05 + 0.9 * rng.unit_f64(),
        })
        .collect();
    let theta = classes
        .iter()
        .map(|_| {
            [
                6.0 * rng.unit_f64() - 3.0,
                6.0 * rng.unit_f64() - 3.0,
            ]
        })
        .collect();
    ThetaParams::from_parts(entries, theta).unwrap()
}

/// A histogram of `pixels` uniform random firing patterns over n bits.
pub fn random_hist(rng: &mut Rng, n: usize, pixels: u64) -> PatternHistogram {
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..pixels {
        *counts.entry(rng.below(1 << n)).or_insert(0) += 1;
    }
    PatternHistogram::new(n, counts)
}

/// Specs whose ids and classes line up with [`random_params`]: id `lf{j}`,
/// polarity chosen to match the class, external kind (never executed).
pub fn specs_for(classes: &[LFClass]) -> Vec<LFSpec> {
    classes
        .iter()
        .enumerate()
        .map(|(j, &class)| LFSpec {
            id: format!("lf{j}"),
            kind: LFKind::External {
                source_suffix: format!(".lf-lf{j}.boxes.txt"),
                on_missing: MissingPolicy::Abstain,
            },
            polarity: match class {
                LFClass::Text => Polarity::Fundamental,
                LFClass::NonText => Polarity::Complementary,
            },
            quality: 0.9,
            shrink_w: 0.0,
            shrink_h: 0.0,
        })
        .collect()
}

/// Places up to `want` boxes (2..=60 x 2..=30) so that every pair is
/// separated by at least 2 pixels along some axis.
pub fn random_disjoint_boxes(
    rng: &mut Rng,
    width: u32,
    height: u32,
    want: usize,
) -> Vec<weaktext::imgproc::WordBox> {
    use weaktext::imgproc::WordBox;
    let mut boxes: Vec<WordBox> = Vec::new();
    for _ in 0..want {
        for _attempt in 0..20 {
            let w = rng.range_u32(2, 60);
            let h = rng.range_u32(2, 30);
            if w + 2 > width || h + 2 > height {
                continue;
            }
            let x = rng.range_u32(0, width - w);
            let y = rng.range_u32(0, height - h);
            let candidate = WordBox { x, y, w, h };
            let clear = boxes.iter().all(|b| {
                let gap_x = b
                    .x
                    .saturating_sub(candidate.x + candidate.w)
                    .max(candidate.x.saturating_sub(b.x + b.w));
                let gap_y = b
                    .y
                    .saturating_sub(candidate.y + candidate.h)
                    .max(candidate.y.saturating_sub(b.y + b.h));
                gap_x >= 2 || gap_y >= 2
            });
            if clear {
                boxes.push(candidate);
                break;
            }
        }
    }
    boxes
}

pub fn random_map(rng: &mut Rng, width: u32, height: u32) -> BinaryMap {
    let mut map = BinaryMap::zeros(width, height).unwrap();
    for y in 0..height {
        for x in 0..width {
            if rng.chance(0.5) {
                map.set(x, y, 1);
            }
        }
    }
    map
}

/// A firing matrix over random maps, agreeing with [`specs_for`] and
/// [`random_params`] on ids and classes.
pub fn random_tau(rng: &mut Rng, classes: &[LFClass], width: u32, height: u32) -> TauMatrix {
    let maps: Vec<BinaryMap> = (0..classes.len())
        .map(|_| random_map(rng, width, height))
        .collect();
    build_tau(&maps, &specs_for(classes)).unwrap()
}
