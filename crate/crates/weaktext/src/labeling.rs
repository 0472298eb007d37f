//! Labeling functions: cheap per-pixel voters over document images.
//!
//! A fundamental labeling function proposes word boxes (from native image
//! operators or from another detector's sidecar file), shrinks them toward
//! their centers, and votes TEXT inside the shrunk boxes. Its complementary
//! twin votes NONTEXT on exactly the remaining pixels, so a pair never
//! votes on the same pixel. Per-pixel votes across all functions are packed
//! into a firing matrix and compressed into a pattern histogram, the
//! sufficient statistic the aggregation model trains on.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::imgproc::{
    canny, component_boxes, connected_components, otsu_binarize, sobel_magnitude,
    thicken_boundaries, BinaryMap, GrayImage, WordBox,
};
use crate::io;

/// The two pixel classes a labeling function can vote for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LFClass {
    Text,
    NonText,
}

impl LFClass {
    /// Column index of this class in the parameter matrix.
    pub fn index(self) -> usize {
        match self {
            LFClass::Text => 0,
            LFClass::NonText => 1,
        }
    }

    pub fn other(self) -> LFClass {
        match self {
            LFClass::Text => LFClass::NonText,
            LFClass::NonText => LFClass::Text,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LFClass::Text => "TEXT",
            LFClass::NonText => "NONTEXT",
        }
    }

    pub fn from_name(name: &str) -> Option<LFClass> {
        match name {
            "TEXT" => Some(LFClass::Text),
            "NONTEXT" => Some(LFClass::NonText),
            _ => None,
        }
    }
}

/// Whether a labeling function votes inside its boxes (fundamental, TEXT)
/// or on the complement (complementary, NONTEXT).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Fundamental,
    Complementary,
}

/// What to do when an external labeling function's sidecar file is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingPolicy {
    /// Fail the run.
    Error,
    /// Treat the function (and its complement) as abstaining on every pixel.
    Abstain,
}

/// Box source of a labeling function. Two functions with equal kind produce
/// identical boxes on the same image, which is what lets a complementary
/// function reuse its fundamental partner's output.
#[derive(Debug, Clone, PartialEq)]
pub enum LFKind {
    /// Otsu ink mask, boundaries thickened so characters of a word fuse.
    Contour { thickness: u32 },
    /// Canny edge map, edges thickened, components boxed.
    Canny {
        low: f64,
        high: f64,
        edge_thickness: u32,
    },
    /// Sobel magnitude of the Otsu mask, thresholded at zero, thickened.
    SobelEdges { edge_thickness: u32 },
    /// Boxes ingested from a per-image sidecar file written by some other
    /// detector. The sidecar path is the image path with its extension
    /// replaced by `source_suffix`.
    External {
        source_suffix: String,
        on_missing: MissingPolicy,
    },
}

/// One labeling function: an id, a box source, a polarity, a quality guide
/// (prior belief in its precision), and the box shrink factors applied
/// before rasterization.
#[derive(Debug, Clone, PartialEq)]
pub struct LFSpec {
    pub id: String,
    pub kind: LFKind,
    pub polarity: Polarity,
    pub quality: f64,
    pub shrink_w: f64,
    pub shrink_h: f64,
}

impl LFSpec {
    /// Class this function votes for, fixed by its polarity.
    pub fn class(&self) -> LFClass {
        match self.polarity {
            Polarity::Fundamental => LFClass::Text,
            Polarity::Complementary => LFClass::NonText,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidParameter(
                "labeling function id must not be empty".into(),
            ));
        }
        if self
            .id
            .chars()
            .any(|c| !(c.is_ascii_alphanumeric() || c == '-' || c == '_'))
        {
            return Err(Error::InvalidParameter(format!(
                "labeling function id {:?} may only use ASCII letters, digits, '-' and '_'",
                self.id
            )));
        }
        if !(self.quality > 0.0 && self.quality < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "labeling function {}: quality guide must lie in (0, 1), got {}",
                self.id, self.quality
            )));
        }
        for (name, s) in [("shrink_w", self.shrink_w), ("shrink_h", self.shrink_h)] {
            if !(s >= 0.0 && s < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "labeling function {}: {name} must lie in [0, 1), got {s}",
                    self.id
                )));
            }
        }
        match &self.kind {
            LFKind::Contour { thickness } | LFKind::SobelEdges { edge_thickness: thickness } => {
                if *thickness == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "labeling function {}: thickness must be at least 1",
                        self.id
                    )));
                }
            }
            LFKind::Canny {
                low,
                high,
                edge_thickness,
            } => {
                if *edge_thickness == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "labeling function {}: edge_thickness must be at least 1",
                        self.id
                    )));
                }
                if !(low.is_finite() && high.is_finite()) || *low < 0.0 || low > high {
                    return Err(Error::InvalidParameter(format!(
                        "labeling function {}: invalid canny thresholds low={low} high={high}",
                        self.id
                    )));
                }
            }
            LFKind::External { source_suffix, .. } => {
                if source_suffix.is_empty() {
                    return Err(Error::InvalidParameter(format!(
                        "labeling function {}: source_suffix must not be empty",
                        self.id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Shrinks a box toward its center. The new width is
/// `max(1, round(w * (1 - shrink_w)))` with round-half-up, and the box is
/// re-anchored at `x + floor((w - w') / 2)`; height behaves the same way.
pub fn shrink_box(b: WordBox, shrink_w: f64, shrink_h: f64) -> WordBox {
    let new_w = ((f64::from(b.w) * (1.0 - shrink_w)).round() as u32).max(1);
    let new_h = ((f64::from(b.h) * (1.0 - shrink_h)).round() as u32).max(1);
    WordBox {
        x: b.x + (b.w - new_w) / 2,
        y: b.y + (b.h - new_h) / 2,
        w: new_w,
        h: new_h,
    }
}

/// Paints boxes onto a pixel grid. Fundamental polarity sets the pixels
/// inside the union of the boxes; complementary polarity sets exactly the
/// other pixels. Box regions outside the grid are ignored.
pub fn rasterize(boxes: &[WordBox], polarity: Polarity, width: u32, height: u32) -> Result<BinaryMap> {
    let mut map = BinaryMap::zeros(width, height)?;
    for b in boxes {
        let x0 = b.x.min(width);
        let x1 = b.right().min(width);
        let y0 = b.y.min(height);
        let y1 = b.bottom().min(height);
        for y in y0..y1 {
            for x in x0..x1 {
                map.set(x, y, 1);
            }
        }
    }
    Ok(match polarity {
        Polarity::Fundamental => map,
        Polarity::Complementary => map.complement(),
    })
}

/// Runs the contour labeling function: Otsu ink mask, boundary thickening
/// (so the characters of a word merge into one blob), connected components,
/// component boxes.
pub fn run_contour_lf(img: &GrayImage, thickness: u32) -> Result<Vec<WordBox>> {
    let ink = otsu_binarize(img, true);
    let thick = thicken_boundaries(&ink, thickness)?;
    Ok(component_boxes(&connected_components(&thick)))
}

/// Runs the Canny labeling function: edge map, edge thickening, connected
/// components, component boxes.
pub fn run_canny_lf(img: &GrayImage, low: f64, high: f64, edge_thickness: u32) -> Result<Vec<WordBox>> {
    let edges = canny(img, low, high)?;
    let thick = thicken_boundaries(&edges, edge_thickness)?;
    Ok(component_boxes(&connected_components(&thick)))
}

/// Runs the Sobel labeling function: Otsu ink mask rendered as a 0/255
/// image, Sobel magnitude, nonzero magnitudes kept, thickened, boxed.
pub fn run_sobel_lf(img: &GrayImage, edge_thickness: u32) -> Result<Vec<WordBox>> {
    let ink = otsu_binarize(img, true);
    let as_gray = GrayImage::new(
        ink.width(),
        ink.height(),
        ink.bits().iter().map(|&b| b * 255).collect(),
    )?;
    let mag = sobel_magnitude(&as_gray);
    let band = BinaryMap::new(
        ink.width(),
        ink.height(),
        mag.data().iter().map(|&v| u8::from(v > 0.0)).collect(),
    )?;
    let thick = thicken_boundaries(&band, edge_thickness)?;
    Ok(component_boxes(&connected_components(&thick)))
}

/// Loads external detector boxes for one image, clamping each box to the
/// image bounds and dropping boxes that end up with zero area.
pub fn load_external_boxes(path: &Path, width: u32, height: u32) -> Result<Vec<WordBox>> {
    let raw = io::read_boxes(path)?;
    Ok(clamp_boxes(&raw, width, height))
}

/// Clamps boxes to an image and drops the ones that vanish.
pub fn clamp_boxes(boxes: &[WordBox], width: u32, height: u32) -> Vec<WordBox> {
    boxes
        .iter()
        .filter_map(|b| {
            let x0 = b.x.min(width);
            let y0 = b.y.min(height);
            let x1 = b.right().min(width);
            let y1 = b.bottom().min(height);
            if x1 > x0 && y1 > y0 {
                Some(WordBox::new(x0, y0, x1 - x0, y1 - y0))
            } else {
                None
            }
        })
        .collect()
}

/// Sidecar path for an image: the extension is replaced by `suffix`, so
/// `page01.pgm` with suffix `.boxes.txt` becomes `page01.boxes.txt`.
pub fn sidecar_path(image_path: &Path, suffix: &str) -> PathBuf {
    let stem = image_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    image_path.with_file_name(format!("{stem}{suffix}"))
}

/// Raw (unshrunk) boxes of one fundamental box source on one image.
/// `Ok(None)` means an external source file was absent and its policy says
/// to abstain.
pub fn source_boxes(
    kind: &LFKind,
    img: &GrayImage,
    image_path: &Path,
) -> Result<Option<Vec<WordBox>>> {
    match kind {
        LFKind::Contour { thickness } => run_contour_lf(img, *thickness).map(Some),
        LFKind::Canny {
            low,
            high,
            edge_thickness,
        } => run_canny_lf(img, *low, *high, *edge_thickness).map(Some),
        LFKind::SobelEdges { edge_thickness } => run_sobel_lf(img, *edge_thickness).map(Some),
        LFKind::External {
            source_suffix,
            on_missing,
        } => {
            let path = sidecar_path(image_path, source_suffix);
            if !path.exists() {
                return match on_missing {
                    MissingPolicy::Error => Err(Error::MissingFile { path }),
                    MissingPolicy::Abstain => Ok(None),
                };
            }
            load_external_boxes(&path, img.width(), img.height()).map(Some)
        }
    }
}

/// Runs every labeling function on one image and returns one vote map per
/// function, in registry order. Box computation is shared across functions
/// of equal kind, which makes a complementary map the exact complement of
/// its fundamental partner's. An abstaining external source yields all-zero
/// maps for both polarities.
pub fn run_labeling(specs: &[LFSpec], img: &GrayImage, image_path: &Path) -> Result<Vec<BinaryMap>> {
    for spec in specs {
        spec.validate()?;
    }
    let mut computed: Vec<(usize, Option<Vec<WordBox>>)> = Vec::new();
    let mut maps = Vec::with_capacity(specs.len());
    for (j, spec) in specs.iter().enumerate() {
        let cached = computed
            .iter()
            .find(|(prev, _)| specs[*prev].kind == spec.kind)
            .map(|(_, boxes)| boxes.clone());
        let boxes = match cached {
            Some(b) => b,
            None => {
                let fresh = source_boxes(&spec.kind, img, image_path)?;
                computed.push((j, fresh.clone()));
                fresh
            }
        };
        let map = match boxes {
            None => BinaryMap::zeros(img.width(), img.height())?,
            Some(raw) => {
                let shrunk: Vec<WordBox> = raw
                    .iter()
                    .map(|&b| shrink_box(b, spec.shrink_w, spec.shrink_h))
                    .collect();
                rasterize(&shrunk, spec.polarity, img.width(), img.height())?
            }
        };
        maps.push(map);
    }
    Ok(maps)
}

/// Per-pixel firing matrix: bit `j` of a pixel's pattern is set when
/// labeling function `j` voted there. A function only ever votes for its
/// own class, so the pattern plus the registry fully determines every vote.
#[derive(Debug, Clone, PartialEq)]
pub struct TauMatrix {
    n: usize,
    width: u32,
    height: u32,
    firings: Vec<u64>,
    lf_ids: Vec<String>,
    lf_classes: Vec<LFClass>,
}

impl TauMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.firings.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Firing pattern per pixel, row-major.
    pub fn firings(&self) -> &[u64] {
        &self.firings
    }

    pub fn lf_ids(&self) -> &[String] {
        &self.lf_ids
    }

    pub fn lf_classes(&self) -> &[LFClass] {
        &self.lf_classes
    }

    pub fn fired(&self, pixel: usize, j: usize) -> bool {
        self.firings[pixel] >> j & 1 == 1
    }
}

/// Assembles the firing matrix from one vote map per labeling function.
/// All maps must share the image dimensions; at least 1 and at most 64
/// functions are supported (patterns are stored in a 64-bit word).
pub fn build_tau(maps: &[BinaryMap], specs: &[LFSpec]) -> Result<TauMatrix> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one labeling function is required".into(),
        ));
    }
    if specs.len() > 64 {
        return Err(Error::InvalidParameter(format!(
            "at most 64 labeling functions are supported, got {}",
            specs.len()
        )));
    }
    if maps.len() != specs.len() {
        return Err(Error::InvalidParameter(format!(
            "{} vote maps for {} labeling functions",
            maps.len(),
            specs.len()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for spec in specs {
        if !seen.insert(spec.id.as_str()) {
            return Err(Error::InvalidParameter(format!(
                "duplicate labeling function id {:?}",
                spec.id
            )));
        }
    }
    let (w, h) = (maps[0].width(), maps[0].height());
    for (spec, map) in specs.iter().zip(maps) {
        if map.width() != w || map.height() != h {
            return Err(Error::MapDimensionMismatch {
                lf_id: spec.id.clone(),
                got_w: map.width(),
                got_h: map.height(),
                want_w: w,
                want_h: h,
            });
        }
    }

    let mut firings = vec![0u64; w as usize * h as usize];
    for (j, map) in maps.iter().enumerate() {
        let bit = 1u64 << j;
        for (slot, &b) in firings.iter_mut().zip(map.bits()) {
            if b == 1 {
                *slot |= bit;
            }
        }
    }
    Ok(TauMatrix {
        n: specs.len(),
        width: w,
        height: h,
        firings,
        lf_ids: specs.iter().map(|s| s.id.clone()).collect(),
        lf_classes: specs.iter().map(|s| s.class()).collect(),
    })
}

/// Lossless compression of a firing matrix: how many pixels show each
/// distinct firing pattern. Every aggregate the model needs is a sum over
/// patterns weighted by count, so training cost depends on the number of
/// distinct patterns, not on image size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternHistogram {
    n: usize,
    counts: BTreeMap<u64, u64>,
}

impl PatternHistogram {
    pub fn new(n: usize, counts: BTreeMap<u64, u64>) -> Self {
        PatternHistogram { n, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total pixel count.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Patterns and counts in ascending pattern order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&p, &c)| (p, c))
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }
}

/// Counts firing patterns over all pixels of a matrix.
pub fn histogram(tau: &TauMatrix) -> PatternHistogram {
    let mut counts = BTreeMap::new();
    for &p in tau.firings() {
        *counts.entry(p).or_insert(0u64) += 1;
    }
    PatternHistogram {
        n: tau.n(),
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(id: &str, kind: LFKind, polarity: Polarity) -> LFSpec {
        LFSpec {
            id: id.into(),
            kind,
            polarity,
            quality: 0.85,
            shrink_w: 0.0,
            shrink_h: 0.0,
        }
    }

    fn blank(w: u32, h: u32, level: u8) -> GrayImage {
        GrayImage::filled(w, h, level).unwrap()
    }

    fn with_rect(img: &mut GrayImage, b: WordBox, level: u8) {
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                img.set(x, y, level);
            }
        }
    }

    // ----- shrink -----

    #[test]
    fn shrink_matches_hand_computed_example() {
        let b = shrink_box(WordBox::new(10, 10, 100, 20), 0.10, 0.20);
        assert_eq!(b, WordBox::new(15, 12, 90, 16));
    }

    #[test]
    fn shrink_zero_is_identity() {
        let b = WordBox::new(3, 4, 17, 9);
        assert_eq!(shrink_box(b, 0.0, 0.0), b);
    }

    #[test]
    fn shrink_never_collapses_below_one_pixel() {
        let b = shrink_box(WordBox::new(0, 0, 1, 1), 0.9, 0.9);
        assert_eq!(b, WordBox::new(0, 0, 1, 1));
    }

    #[test]
    fn shrink_rounds_half_up() {
        // 15 * 0.9 = 13.5 rounds to 14
        let b = shrink_box(WordBox::new(0, 0, 15, 10), 0.10, 0.0);
        assert_eq!(b.w, 14);
    }

    #[test]
    fn shrunk_box_stays_inside_the_original() {
        for w in 1..40u32 {
            for h in 1..12u32 {
                let b = WordBox::new(5, 7, w, h);
                let s = shrink_box(b, 0.10, 0.20);
                assert!(s.x >= b.x && s.y >= b.y);
                assert!(s.right() <= b.right() && s.bottom() <= b.bottom());
                assert!(s.w >= 1 && s.h >= 1);
            }
        }
    }

    // ----- rasterize -----

    #[test]
    fn rasterize_empty_lists() {
        let fund = rasterize(&[], Polarity::Fundamental, 4, 3).unwrap();
        assert_eq!(fund.count_ones(), 0);
        let comp = rasterize(&[], Polarity::Complementary, 4, 3).unwrap();
        assert_eq!(comp.count_ones(), 12);
    }

    #[test]
    fn rasterize_pair_partitions_the_pixels() {
        let boxes = [WordBox::new(0, 0, 2, 2), WordBox::new(1, 1, 2, 2)];
        let fund = rasterize(&boxes, Polarity::Fundamental, 5, 4).unwrap();
        let comp = rasterize(&boxes, Polarity::Complementary, 5, 4).unwrap();
        assert_eq!(fund.count_ones(), 7, "union of two overlapping 2x2 boxes");
        for i in 0..fund.len() {
            assert_eq!(fund.bits()[i] + comp.bits()[i], 1);
        }
    }

    #[test]
    fn rasterize_ignores_out_of_bounds_area() {
        let m = rasterize(&[WordBox::new(3, 3, 10, 10)], Polarity::Fundamental, 5, 5).unwrap();
        assert_eq!(m.count_ones(), 4);
    }

    // ----- native labeling functions -----

    #[test]
    fn contour_lf_on_blank_page_returns_nothing() {
        assert_eq!(run_contour_lf(&blank(30, 20, 250), 4).unwrap(), vec![]);
    }

    #[test]
    fn contour_lf_merges_blobs_two_pixels_apart() {
        // Two 4x4 ink blobs separated by a 2 pixel gap; thickness 4 bridges
        // the gap so a single box spans both.
        let mut img = blank(12, 4, 250);
        with_rect(&mut img, WordBox::new(0, 0, 4, 4), 20);
        with_rect(&mut img, WordBox::new(6, 0, 4, 4), 20);
        let boxes = run_contour_lf(&img, 4).unwrap();
        assert_eq!(boxes.len(), 1);
        let b = boxes[0];
        assert!(b.x == 0 && b.right() >= 10);
    }

    #[test]
    fn contour_lf_keeps_distant_blobs_separate() {
        let mut img = blank(40, 10, 250);
        with_rect(&mut img, WordBox::new(2, 2, 5, 5), 20);
        with_rect(&mut img, WordBox::new(25, 2, 5, 5), 20);
        let boxes = run_contour_lf(&img, 2).unwrap();
        assert_eq!(boxes.len(), 2);
        for (b, orig) in boxes.iter().zip([WordBox::new(2, 2, 5, 5), WordBox::new(25, 2, 5, 5)]) {
            assert!(b.x <= orig.x && b.right() >= orig.right());
            assert!(b.x + 2 >= orig.x, "dilation beyond the radius at {b:?}");
        }
    }

    #[test]
    fn canny_lf_boxes_a_solid_glyph() {
        let mut img = blank(20, 20, 245);
        let glyph = WordBox::new(6, 6, 7, 7);
        with_rect(&mut img, glyph, 10);
        let boxes = run_canny_lf(&img, 50.0, 150.0, 2).unwrap();
        assert_eq!(boxes.len(), 1);
        let b = boxes[0];
        assert!(b.x <= glyph.x && b.y <= glyph.y);
        assert!(b.right() >= glyph.right() && b.bottom() >= glyph.bottom());
    }

    #[test]
    fn canny_lf_separates_two_glyphs() {
        let mut img = blank(40, 16, 245);
        with_rect(&mut img, WordBox::new(4, 4, 7, 7), 10);
        with_rect(&mut img, WordBox::new(26, 4, 7, 7), 10);
        let boxes = run_canny_lf(&img, 50.0, 150.0, 2).unwrap();
        assert_eq!(boxes.len(), 2);
    }

    #[test]
    fn sobel_lf_on_blank_page_returns_nothing() {
        assert_eq!(run_sobel_lf(&blank(16, 16, 128), 2).unwrap(), vec![]);
    }

    #[test]
    fn sobel_lf_dilates_a_solid_rectangle_to_one_box() {
        // 4x4 ink block centered in 8x8: the gradient band extends one
        // pixel beyond the block, thickening radius 1 adds another, so the
        // single resulting box is the full frame.
        let mut img = blank(8, 8, 250);
        with_rect(&mut img, WordBox::new(2, 2, 4, 4), 10);
        let boxes = run_sobel_lf(&img, 2).unwrap();
        assert_eq!(boxes, vec![WordBox::new(0, 0, 8, 8)]);
    }

    #[test]
    fn sobel_lf_keeps_isolated_dots_separate() {
        let mut img = blank(30, 10, 250);
        for cx in [4u32, 14, 24] {
            with_rect(&mut img, WordBox::new(cx, 4, 2, 2), 10);
        }
        let boxes = run_sobel_lf(&img, 2).unwrap();
        assert_eq!(boxes.len(), 3);
    }

    // ----- external boxes -----

    #[test]
    fn external_boxes_clamp_and_drop_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("page.lf-det.boxes.txt");
        std::fs::write(&path, "2 2 5 5\n18 2 10 4\n30 30 5 5\n").unwrap();
        let boxes = load_external_boxes(&path, 20, 10).unwrap();
        assert_eq!(
            boxes,
            vec![WordBox::new(2, 2, 5, 5), WordBox::new(18, 2, 2, 4)]
        );
    }

    #[test]
    fn missing_sidecar_policy_error_vs_abstain() {
        let img = blank(10, 10, 200);
        let image_path = Path::new("/nonexistent/page.pgm");
        let erroring = LFKind::External {
            source_suffix: ".lf-det.boxes.txt".into(),
            on_missing: MissingPolicy::Error,
        };
        assert!(matches!(
            source_boxes(&erroring, &img, image_path),
            Err(Error::MissingFile { .. })
        ));
        let abstaining = LFKind::External {
            source_suffix: ".lf-det.boxes.txt".into(),
            on_missing: MissingPolicy::Abstain,
        };
        assert_eq!(source_boxes(&abstaining, &img, image_path).unwrap(), None);
    }

    #[test]
    fn abstaining_source_silences_both_pair_members() {
        let img = blank(6, 6, 200);
        let kind = LFKind::External {
            source_suffix: ".lf-x.boxes.txt".into(),
            on_missing: MissingPolicy::Abstain,
        };
        let specs = vec![
            spec("x", kind.clone(), Polarity::Fundamental),
            spec("x-comp", kind, Polarity::Complementary),
        ];
        let maps = run_labeling(&specs, &img, Path::new("/nonexistent/page.pgm")).unwrap();
        assert_eq!(maps[0].count_ones(), 0);
        assert_eq!(maps[1].count_ones(), 0);
    }

    #[test]
    fn sidecar_path_replaces_the_extension() {
        assert_eq!(
            sidecar_path(Path::new("/data/page01.pgm"), ".boxes.txt"),
            PathBuf::from("/data/page01.boxes.txt")
        );
        assert_eq!(
            sidecar_path(Path::new("rel/p.png"), ".lf-dbnet.boxes.txt"),
            PathBuf::from("rel/p.lf-dbnet.boxes.txt")
        );
    }

    // ----- pair structure through run_labeling -----

    #[test]
    fn complementary_map_is_exact_complement_of_partner() {
        let mut img = blank(24, 12, 250);
        with_rect(&mut img, WordBox::new(3, 3, 6, 5), 15);
        with_rect(&mut img, WordBox::new(14, 3, 6, 5), 15);
        let kind = LFKind::Contour { thickness: 2 };
        let mut f = spec("contour", kind.clone(), Polarity::Fundamental);
        let mut c = spec("contour-comp", kind, Polarity::Complementary);
        f.shrink_w = 0.10;
        f.shrink_h = 0.20;
        c.shrink_w = 0.10;
        c.shrink_h = 0.20;
        let maps = run_labeling(&[f, c], &img, Path::new("page.pgm")).unwrap();
        assert!(maps[0].count_ones() > 0);
        for i in 0..maps[0].len() {
            assert_eq!(maps[0].bits()[i] + maps[1].bits()[i], 1);
        }
    }

    // ----- tau and histogram -----

    #[test]
    fn build_tau_requires_consistent_dimensions() {
        let s = vec![
            spec("a", LFKind::Contour { thickness: 2 }, Polarity::Fundamental),
            spec("b", LFKind::Contour { thickness: 4 }, Polarity::Fundamental),
        ];
        let maps = vec![
            BinaryMap::zeros(4, 4).unwrap(),
            BinaryMap::zeros(5, 4).unwrap(),
        ];
        match build_tau(&maps, &s) {
            Err(Error::MapDimensionMismatch { lf_id, .. }) => assert_eq!(lf_id, "b"),
            other => panic!("expected dimension mismatch, got {other:?}"),
        }
    }

    #[test]
    fn build_tau_rejects_empty_and_duplicate_registries() {
        assert!(build_tau(&[], &[]).is_err());
        let s = vec![
            spec("dup", LFKind::Contour { thickness: 2 }, Polarity::Fundamental),
            spec("dup", LFKind::Contour { thickness: 2 }, Polarity::Complementary),
        ];
        let maps = vec![
            BinaryMap::zeros(2, 2).unwrap(),
            BinaryMap::zeros(2, 2).unwrap(),
        ];
        assert!(build_tau(&maps, &s).is_err());
    }

    #[test]
    fn tau_patterns_reflect_the_vote_maps() {
        let s = vec![
            spec("a", LFKind::Contour { thickness: 2 }, Polarity::Fundamental),
            spec("b", LFKind::Contour { thickness: 4 }, Polarity::Complementary),
        ];
        let m0 = BinaryMap::new(2, 2, vec![1, 1, 0, 0]).unwrap();
        let m1 = BinaryMap::new(2, 2, vec![0, 1, 0, 1]).unwrap();
        let tau = build_tau(&[m0, m1], &s).unwrap();
        assert_eq!(tau.firings(), &[0b01, 0b11, 0b00, 0b10]);
        assert!(tau.fired(1, 0) && tau.fired(1, 1));
        assert_eq!(tau.lf_classes(), &[LFClass::Text, LFClass::NonText]);
    }

    #[test]
    fn histogram_counts_every_pixel_once() {
        let s = vec![spec("a", LFKind::Contour { thickness: 2 }, Polarity::Fundamental)];
        let m = BinaryMap::new(3, 2, vec![1, 0, 1, 1, 0, 0]).unwrap();
        let tau = build_tau(&[m], &s).unwrap();
        let h = histogram(&tau);
        assert_eq!(h.total(), 6);
        let entries: Vec<_> = h.iter().collect();
        assert_eq!(entries, vec![(0b0, 3), (0b1, 3)]);
    }

    #[test]
    fn histogram_of_uniform_firing_has_one_entry() {
        let s = vec![
            spec("a", LFKind::Contour { thickness: 2 }, Polarity::Fundamental),
            spec("b", LFKind::Contour { thickness: 4 }, Polarity::Fundamental),
        ];
        let ones = BinaryMap::new(4, 4, vec![1; 16]).unwrap();
        let tau = build_tau(&[ones.clone(), ones], &s).unwrap();
        let h = histogram(&tau);
        assert_eq!(h.distinct(), 1);
        assert_eq!(h.iter().next(), Some((0b11, 16)));
    }

    #[test]
    fn spec_validation_catches_bad_values() {
        let good = spec("ok", LFKind::Contour { thickness: 4 }, Polarity::Fundamental);
        assert!(good.validate().is_ok());

        let mut bad = good.clone();
        bad.quality = 1.0;
        assert!(bad.validate().is_err());

        let mut bad = good.clone();
        bad.shrink_w = 1.0;
        assert!(bad.validate().is_err());

        let mut bad = good.clone();
        bad.id = "has space".into();
        assert!(bad.validate().is_err());

        let mut bad = good.clone();
        bad.kind = LFKind::Canny {
            low: 100.0,
            high: 50.0,
            edge_thickness: 2,
        };
        assert!(bad.validate().is_err());
    }
}
