//! Global thresholding via Otsu's method.

use super::{BinaryMap, GrayImage};

/// Picks the threshold that maximizes the between-class variance of the
/// intensity histogram. Returns the smallest maximizing threshold `t`; the
/// two classes are `[0, t]` and `[t+1, 255]`. A constant image yields
/// `None`: there is nothing to separate.
pub fn otsu_threshold(img: &GrayImage) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let total = img.len() as f64;
    let total_sum: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum();

    let mut best_t: Option<u8> = None;
    let mut best_var = 0.0f64;
    let mut count0 = 0u64;
    let mut sum0 = 0.0f64;
    for t in 0..256usize {
        count0 += hist[t];
        sum0 += t as f64 * hist[t] as f64;
        let count1 = img.len() as u64 - count0;
        if count0 == 0 || count1 == 0 {
            continue;
        }
        let w0 = count0 as f64 / total;
        let w1 = count1 as f64 / total;
        let mu0 = sum0 / count0 as f64;
        let mu1 = (total_sum - sum0) / count1 as f64;
        let var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if var > best_var {
            best_var = var;
            best_t = Some(t as u8);
        }
    }
    best_t
}

/// Binarizes with the Otsu threshold. With `ink_dark` the darker class
/// (values at or below the threshold) becomes foreground, otherwise the
/// brighter class does. A constant image comes back all background.
pub fn otsu_binarize(img: &GrayImage, ink_dark: bool) -> BinaryMap {
    let Some(t) = otsu_threshold(img) else {
        return BinaryMap::zeros(img.width(), img.height()).expect("image dims are valid");
    };
    let bits: Vec<u8> = img
        .pixels()
        .iter()
        .map(|&p| u8::from((p <= t) == ink_dark))
        .collect();
    BinaryMap::new(img.width(), img.height(), bits).expect("bits are 0/1")
}
