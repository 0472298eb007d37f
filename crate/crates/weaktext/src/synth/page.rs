//! Deterministic synthetic page rendering.
//!
//! Pages are light-background rasters with dark word rectangles laid out
//! in rows, plus optional salt-and-pepper noise. All randomness flows
//! through one per-page generator seeded from the corpus seed and the
//! page index, so a corpus is a pure function of its seed.

use super::rng::{page_seed, Rng};
use crate::error::{Error, Result};
use crate::imgproc::{GrayImage, WordBox};

/// Border kept clear of words on all four sides.
pub const PAGE_MARGIN: u32 = 4;
/// Vertical gap between rows.
pub const ROW_GAP: u32 = 4;
/// Horizontal gap between words, sampled inclusively from this range.
pub const WORD_GAP_MIN: u32 = 4;
pub const WORD_GAP_MAX: u32 = 10;

/// Layout and appearance ranges for generated pages. All `*_min`/`*_max`
/// bounds are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub page_w: u32,
    pub page_h: u32,
    pub rows_min: u32,
    pub rows_max: u32,
    pub words_min: u32,
    pub words_max: u32,
    pub word_w_min: u32,
    pub word_w_max: u32,
    pub word_h_min: u32,
    pub word_h_max: u32,
    /// Word fill value range; darker than `background`.
    pub ink_min: u8,
    pub ink_max: u8,
    pub background: u8,
    /// Per-pixel probability of being replaced by pure black or white.
    pub noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            page_w: 480,
            page_h: 320,
            rows_min: 3,
            rows_max: 6,
            words_min: 2,
            words_max: 5,
            word_w_min: 20,
            word_w_max: 60,
            word_h_min: 10,
            word_h_max: 18,
            ink_min: 0,
            ink_max: 80,
            background: 255,
            noise: 0.002,
        }
    }
}

impl SynthConfig {
    /// Checks the ranges and proves the worst-case layout fits: the
    /// maximum row count at maximum word height, and the maximum word
    /// count at maximum width with maximal gaps, must stay inside the
    /// margins. After this passes, page generation cannot fail.
    pub fn validate(&self) -> Result<()> {
        let ordered = [
            ("rows", self.rows_min as u64, self.rows_max as u64),
            ("words per row", self.words_min as u64, self.words_max as u64),
            ("word width", self.word_w_min as u64, self.word_w_max as u64),
            ("word height", self.word_h_min as u64, self.word_h_max as u64),
            ("ink", self.ink_min as u64, self.ink_max as u64),
        ];
        for (name, lo, hi) in ordered {
            if lo > hi {
                return Err(Error::InvalidParameter(format!(
                    "{name} range is inverted: {lo} > {hi}"
                )));
            }
        }
        for (name, v) in [
            ("rows_min", self.rows_min),
            ("words_min", self.words_min),
            ("word_w_min", self.word_w_min),
            ("word_h_min", self.word_h_min),
        ] {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be at least 1")));
            }
        }
        if self.ink_max >= self.background {
            return Err(Error::InvalidParameter(format!(
                "ink range must stay darker than the background ({} >= {})",
                self.ink_max, self.background
            )));
        }
        if !(self.noise.is_finite() && (0.0..1.0).contains(&self.noise)) {
            return Err(Error::InvalidParameter(format!(
                "noise rate must lie in [0, 1), got {}",
                self.noise
            )));
        }

        let need_h = 2 * PAGE_MARGIN as u64
            + self.rows_max as u64 * self.word_h_max as u64
            + (self.rows_max as u64 - 1) * ROW_GAP as u64;
        if need_h > self.page_h as u64 {
            return Err(Error::Layout(format!(
                "{} rows of height {} need {} pixels, page is {} tall",
                self.rows_max, self.word_h_max, need_h, self.page_h
            )));
        }
        let need_w = 2 * PAGE_MARGIN as u64
            + self.words_max as u64 * self.word_w_max as u64
            + (self.words_max as u64 - 1) * WORD_GAP_MAX as u64;
        if need_w > self.page_w as u64 {
            return Err(Error::Layout(format!(
                "{} words of width {} need {} pixels, page is {} wide",
                self.words_max, self.word_w_max, need_w, self.page_w
            )));
        }
        Ok(())
    }
}

/// A rendered page and the exact boxes of the words on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Page {
    pub image: GrayImage,
    pub boxes: Vec<WordBox>,
}

/// Renders page `page_index` of the corpus identified by `corpus_seed`.
pub fn gen_page(cfg: &SynthConfig, corpus_seed: u64, page_index: u64) -> Result<Page> {
    cfg.validate()?;
    let mut rng = Rng::new(page_seed(corpus_seed, page_index));
    let mut image = GrayImage::filled(cfg.page_w, cfg.page_h, cfg.background)?;
    let mut boxes = Vec::new();

    let rows = rng.range_u32(cfg.rows_min, cfg.rows_max);
    let pitch = cfg.word_h_max + ROW_GAP;
    for row in 0..rows {
        let row_y = PAGE_MARGIN + row * pitch;
        let words = rng.range_u32(cfg.words_min, cfg.words_max);
        let mut x = PAGE_MARGIN;
        for word in 0..words {
            if word > 0 {
                x += rng.range_u32(WORD_GAP_MIN, WORD_GAP_MAX);
            }
            let w = rng.range_u32(cfg.word_w_min, cfg.word_w_max);
            let h = rng.range_u32(cfg.word_h_min, cfg.word_h_max);
            let ink = rng.range_u32(cfg.ink_min as u32, cfg.ink_max as u32) as u8;
            let b = WordBox { x, y: row_y, w, h };
            fill_rect(&mut image, &b, ink);
            boxes.push(b);
            x += w;
        }
    }

    if cfg.noise > 0.0 {
        for y in 0..cfg.page_h {
            for x in 0..cfg.page_w {
                if rng.chance(cfg.noise) {
                    let v = if rng.chance(0.5) { 0 } else { 255 };
                    image.set(x, y, v);
                }
            }
        }
    }

    Ok(Page { image, boxes })
}

fn fill_rect(image: &mut GrayImage, b: &WordBox, value: u8) {
    for y in b.y..b.bottom() {
        for x in b.x..b.right() {
            image.set(x, y, value);
        }
    }
}
