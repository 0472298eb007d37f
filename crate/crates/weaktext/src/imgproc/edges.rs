//! Gradient and edge operators: Sobel magnitude and a from-scratch Canny
//! detector (Gaussian smoothing, Sobel gradients, non-maximum suppression,
//! hysteresis). All border handling is edge replication.

use super::{BinaryMap, GrayImage};
use crate::error::{Error, Result};

/// Row-major raster of doubles, the intermediate currency of the edge
/// pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl FloatImage {
    fn zeros(width: u32, height: u32) -> Self {
        FloatImage {
            width,
            height,
            data: vec![0.0; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    fn get_replicated(&self, x: i64, y: i64) -> f64 {
        let cx = x.clamp(0, self.width as i64 - 1) as usize;
        let cy = y.clamp(0, self.height as i64 - 1) as usize;
        self.data[cy * self.width as usize + cx]
    }
}

const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
const SOBEL_Y: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

fn sobel_gradients(src: &FloatImage) -> (FloatImage, FloatImage) {
    let (w, h) = (src.width, src.height);
    let mut gx = FloatImage::zeros(w, h);
    let mut gy = FloatImage::zeros(w, h);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut ax = 0.0;
            let mut ay = 0.0;
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let v = src.get_replicated(x + dx, y + dy);
                    ax += SOBEL_X[(dy + 1) as usize][(dx + 1) as usize] * v;
                    ay += SOBEL_Y[(dy + 1) as usize][(dx + 1) as usize] * v;
                }
            }
            let i = y as usize * w as usize + x as usize;
            gx.data[i] = ax;
            gy.data[i] = ay;
        }
    }
    (gx, gy)
}

fn to_float(img: &GrayImage) -> FloatImage {
    FloatImage {
        width: img.width(),
        height: img.height(),
        data: img.pixels().iter().map(|&p| f64::from(p)).collect(),
    }
}

/// Magnitude of the 3x3 Sobel gradient at every pixel.
pub fn sobel_magnitude(img: &GrayImage) -> FloatImage {
    let (gx, gy) = sobel_gradients(&to_float(img));
    let mut out = FloatImage::zeros(img.width(), img.height());
    for (i, slot) in out.data.iter_mut().enumerate() {
        *slot = gx.data[i].hypot(gy.data[i]);
    }
    out
}

/// 5x5 Gaussian smoothing with sigma 1.4, the preconditioning step of the
/// Canny detector.
pub fn gaussian_smooth_5x5(img: &GrayImage) -> FloatImage {
    let sigma = 1.4f64;
    let mut kernel = [[0.0f64; 5]; 5];
    let mut sum = 0.0;
    for (dy, row) in kernel.iter_mut().enumerate() {
        for (dx, cell) in row.iter_mut().enumerate() {
            let fx = dx as f64 - 2.0;
            let fy = dy as f64 - 2.0;
            *cell = (-(fx * fx + fy * fy) / (2.0 * sigma * sigma)).exp();
            sum += *cell;
        }
    }
    for row in kernel.iter_mut() {
        for cell in row.iter_mut() {
            *cell /= sum;
        }
    }

    let src = to_float(img);
    let (w, h) = (src.width, src.height);
    let mut out = FloatImage::zeros(w, h);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for dy in -2..=2i64 {
                for dx in -2..=2i64 {
                    acc += kernel[(dy + 2) as usize][(dx + 2) as usize]
                        * src.get_replicated(x + dx, y + dy);
                }
            }
            out.data[y as usize * w as usize + x as usize] = acc;
        }
    }
    out
}

/// Offset to the neighbor pair used by non-maximum suppression, picked from
/// the gradient angle quantized to four sectors.
fn nms_step(gx: f64, gy: f64) -> (i64, i64) {
    let mut ang = gy.atan2(gx);
    if ang < 0.0 {
        ang += std::f64::consts::PI;
    }
    let pi = std::f64::consts::PI;
    if ang < pi / 8.0 || ang >= 7.0 * pi / 8.0 {
        (1, 0)
    } else if ang < 3.0 * pi / 8.0 {
        (1, 1)
    } else if ang < 5.0 * pi / 8.0 {
        (0, 1)
    } else {
        (1, -1)
    }
}

/// Canny edge detection: Gaussian smoothing, Sobel gradients, non-maximum
/// suppression along the quantized gradient direction, then hysteresis
/// linking of weak (>= `low`) pixels to strong (>= `high`) seeds under
/// 8-connectivity. Pixels with zero gradient magnitude are never edges, so
/// a constant image maps to an all-zero result for any thresholds.
pub fn canny(img: &GrayImage, low: f64, high: f64) -> Result<BinaryMap> {
    if !(low.is_finite() && high.is_finite()) || low < 0.0 || high < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "canny thresholds must be finite and non-negative, got low={low} high={high}"
        )));
    }
    if low > high {
        return Err(Error::InvalidParameter(format!(
            "canny low threshold {low} exceeds high threshold {high}"
        )));
    }

    let smoothed = gaussian_smooth_5x5(img);
    let (gx, gy) = sobel_gradients(&smoothed);
    let (w, h) = (img.width(), img.height());
    let stride = w as usize;

    let mut mag = vec![0.0f64; stride * h as usize];
    for (i, slot) in mag.iter_mut().enumerate() {
        *slot = gx.data[i].hypot(gy.data[i]);
    }
    let mag_at = |x: i64, y: i64| -> f64 {
        let cx = x.clamp(0, w as i64 - 1) as usize;
        let cy = y.clamp(0, h as i64 - 1) as usize;
        mag[cy * stride + cx]
    };

    // Keep a pixel when it beats the neighbor behind it strictly and the
    // neighbor ahead at least ties; the asymmetry thins two-pixel plateaus
    // to a single line.
    let mut kept = vec![0.0f64; stride * h as usize];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * stride + x as usize;
            let m = mag[i];
            if m == 0.0 {
                continue;
            }
            let (dx, dy) = nms_step(gx.data[i], gy.data[i]);
            if m > mag_at(x - dx, y - dy) && m >= mag_at(x + dx, y + dy) {
                kept[i] = m;
            }
        }
    }

    let mut bits = vec![0u8; stride * h as usize];
    let mut stack: Vec<usize> = Vec::new();
    for (i, &m) in kept.iter().enumerate() {
        if m > 0.0 && m >= high {
            bits[i] = 1;
            stack.push(i);
        }
    }
    while let Some(i) = stack.pop() {
        let x = (i % stride) as i64;
        let y = (i / stride) as i64;
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * stride + nx as usize;
                if bits[j] == 0 && kept[j] > 0.0 && kept[j] >= low {
                    bits[j] = 1;
                    stack.push(j);
                }
            }
        }
    }

    BinaryMap::new(w, h, bits)
}
