//! Word-box extraction from inferred pixel maps.
//!
//! Labeling functions rasterize shrunken word boxes, so the pixel model's
//! output map underestimates each word's extent. Generation inverts that:
//! connected foreground components become boxes, tiny specks are dropped,
//! and each box is re-enlarged by the same shrink factors the labeling
//! stage applied, clamped to the image.

use crate::error::{Error, Result};
use crate::imgproc::{component_boxes, connected_components, BinaryMap, WordBox};

/// Settings for [`generate`]. The shrink factors must match the ones used
/// when rasterizing labeling-function maps, or the recovered boxes will be
/// systematically too small or too large.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelGenConfig {
    /// Components with fewer enclosing-box pixels than this are noise.
    pub min_box_area: u64,
    pub shrink_w: f64,
    pub shrink_h: f64,
}

impl Default for LabelGenConfig {
    fn default() -> Self {
        LabelGenConfig {
            min_box_area: 4,
            shrink_w: 0.10,
            shrink_h: 0.20,
        }
    }
}

impl LabelGenConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, s) in [("width", self.shrink_w), ("height", self.shrink_h)] {
            if !(s.is_finite() && (0.0..1.0).contains(&s)) {
                return Err(Error::InvalidParameter(format!(
                    "{name} shrink factor must lie in [0, 1), got {s}"
                )));
            }
        }
        Ok(())
    }
}

/// Boxes of all 8-connected foreground components whose enclosing box
/// covers at least `min_box_area` pixels.
pub fn map_to_boxes(map: &BinaryMap, min_box_area: u64) -> Vec<WordBox> {
    let labeling = connected_components(map);
    component_boxes(&labeling)
        .into_iter()
        .filter(|b| b.area() >= min_box_area)
        .collect()
}

/// Inverse of the labeling-stage shrink: scales the box back up around its
/// center and clamps it to the image. With shrink factor s the width
/// becomes `round(w / (1 - s))`, mirroring `round(w * (1 - s))` on the way
/// down, so a round trip moves each edge by at most one pixel.
pub fn enlarge_box(b: &WordBox, shrink_w: f64, shrink_h: f64, width: u32, height: u32) -> WordBox {
    let grow = |len: u32, pos: u32, s: f64, limit: u32| -> (u32, u32) {
        let new_len = ((len as f64 / (1.0 - s)).round() as u64).max(len as u64);
        let new_pos = (pos as i64 - ((new_len - len as u64) / 2) as i64).max(0) as u64;
        let new_len = new_len.min((limit as u64).saturating_sub(new_pos));
        (new_pos as u32, new_len as u32)
    };
    let (x, w) = grow(b.w, b.x, shrink_w, width);
    let (y, h) = grow(b.h, b.y, shrink_h, height);
    WordBox { x, y, w, h }
}

/// Full map-to-labels pass: extract component boxes, drop specks, enlarge
/// by the shrink factors, and return them sorted by (y, x).
pub fn generate(map: &BinaryMap, cfg: &LabelGenConfig) -> Result<Vec<WordBox>> {
    cfg.validate()?;
    let mut boxes: Vec<WordBox> = map_to_boxes(map, cfg.min_box_area)
        .iter()
        .map(|b| enlarge_box(b, cfg.shrink_w, cfg.shrink_h, map.width(), map.height()))
        .collect();
    boxes.sort_by_key(|b| (b.y, b.x));
    Ok(boxes)
}
