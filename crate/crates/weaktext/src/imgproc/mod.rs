//! Grayscale raster types and the low-level vision operations the labeling
//! functions are built from: Otsu binarization, Sobel gradients, Canny edge
//! detection, connected components, bounding boxes, and boundary thickening.

mod binarize;
mod components;
mod edges;

pub use binarize::{otsu_binarize, otsu_threshold};
pub use components::{component_boxes, connected_components, thicken_boundaries};
pub use edges::{canny, gaussian_smooth_5x5, sobel_magnitude, FloatImage};

use crate::error::{Error, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Wraps raw row-major pixel data. Both dimensions must be positive and
    /// `pixels.len()` must equal `width * height`.
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        let want = width as usize * height as usize;
        if pixels.len() != want {
            return Err(Error::InvalidParameter(format!(
                "pixel buffer holds {} bytes, {width}x{height} needs {want}",
                pixels.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    /// Constant-valued image.
    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self> {
        GrayImage::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y as usize * self.width as usize + x as usize] = value;
    }

    /// Pixel value with edge replication: out-of-range coordinates clamp to
    /// the nearest valid pixel.
    #[inline]
    pub fn get_replicated(&self, x: i64, y: i64) -> u8 {
        let cx = x.clamp(0, self.width as i64 - 1) as usize;
        let cy = y.clamp(0, self.height as i64 - 1) as usize;
        self.pixels[cy * self.width as usize + cx]
    }
}

/// Per-pixel binary mask with values 0 and 1, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMap {
    width: u32,
    height: u32,
    bits: Vec<u8>,
}

impl BinaryMap {
    /// Wraps raw 0/1 data. Dimension and value constraints are enforced.
    pub fn new(width: u32, height: u32, bits: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "map dimensions must be positive, got {width}x{height}"
            )));
        }
        let want = width as usize * height as usize;
        if bits.len() != want {
            return Err(Error::InvalidParameter(format!(
                "bit buffer holds {} entries, {width}x{height} needs {want}",
                bits.len()
            )));
        }
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "binary map entries must be 0 or 1, found {bad}"
            )));
        }
        Ok(BinaryMap {
            width,
            height,
            bits,
        })
    }

    /// All-zero map.
    pub fn zeros(width: u32, height: u32) -> Result<Self> {
        BinaryMap::new(width, height, vec![0; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        debug_assert!(x < self.width && y < self.height);
        debug_assert!(value <= 1);
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    /// Number of set pixels.
    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Pointwise complement.
    pub fn complement(&self) -> BinaryMap {
        BinaryMap {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|&b| 1 - b).collect(),
        }
    }
}

/// Connected-component labeling of a binary map. Labels run from 1 to
/// `count` in first-encounter row-major scan order; background pixels keep
/// label 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u32>,
    pub count: u32,
}

impl ComponentLabeling {
    #[inline]
    pub fn label(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }
}

/// Axis-aligned box in pixel coordinates: `x, y` is the top-left corner,
/// `w, h` the extent. A valid box has `w >= 1` and `h >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WordBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl WordBox {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        WordBox { x, y, w, h }
    }

    /// One past the rightmost column.
    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    /// One past the bottom row.
    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    pub fn area(&self) -> u64 {
        u64::from(self.w) * u64::from(self.h)
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x && x < self.right() && y >= self.y && y < self.bottom()
    }

    /// Area of the overlap with another box.
    pub fn intersection_area(&self, other: &WordBox) -> u64 {
        let ix = self.x.max(other.x);
        let iy = self.y.max(other.y);
        let ir = self.right().min(other.right());
        let ib = self.bottom().min(other.bottom());
        if ir > ix && ib > iy {
            u64::from(ir - ix) * u64::from(ib - iy)
        } else {
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_image_validates_dimensions() {
        assert!(GrayImage::new(0, 4, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
        let img = GrayImage::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(img.get(0, 0), 1);
        assert_eq!(img.get(1, 1), 4);
    }

    #[test]
    fn gray_image_replication_clamps() {
        let img = GrayImage::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(img.get_replicated(-5, -5), 1);
        assert_eq!(img.get_replicated(10, 10), 4);
        assert_eq!(img.get_replicated(1, -1), 2);
    }

    #[test]
    fn binary_map_rejects_non_binary_values() {
        assert!(BinaryMap::new(2, 1, vec![0, 2]).is_err());
        let m = BinaryMap::new(2, 1, vec![0, 1]).unwrap();
        assert_eq!(m.count_ones(), 1);
    }

    #[test]
    fn complement_flips_every_pixel() {
        let m = BinaryMap::new(3, 1, vec![0, 1, 0]).unwrap();
        let c = m.complement();
        assert_eq!(c.bits(), &[1, 0, 1]);
        assert_eq!(m.count_ones() + c.count_ones(), m.len());
    }

    #[test]
    fn word_box_geometry() {
        let b = WordBox::new(2, 3, 4, 5);
        assert_eq!(b.right(), 6);
        assert_eq!(b.bottom(), 8);
        assert_eq!(b.area(), 20);
        assert!(b.contains(2, 3));
        assert!(b.contains(5, 7));
        assert!(!b.contains(6, 3));

        let other = WordBox::new(4, 4, 4, 4);
        assert_eq!(b.intersection_area(&other), 2 * 4);
        assert_eq!(other.intersection_area(&b), 2 * 4);
        assert_eq!(b.intersection_area(&WordBox::new(100, 100, 1, 1)), 0);
    }
}
