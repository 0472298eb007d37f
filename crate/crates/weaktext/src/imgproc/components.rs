//! Connected components, their bounding boxes, and boundary thickening.

use super::{BinaryMap, ComponentLabeling, WordBox};
use crate::error::{Error, Result};

/// Labels 8-connected foreground components. Components are numbered from 1
/// in the order their first pixel appears in a row-major scan; background
/// stays 0.
pub fn connected_components(map: &BinaryMap) -> ComponentLabeling {
    let (w, h) = (map.width(), map.height());
    let stride = w as usize;
    let mut labels = vec![0u32; map.len()];
    let mut count = 0u32;
    let mut stack: Vec<usize> = Vec::new();

    for start in 0..map.len() {
        if map.bits()[start] == 0 || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        stack.push(start);
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
                    if map.bits()[j] == 1 && labels[j] == 0 {
                        labels[j] = count;
                        stack.push(j);
                    }
                }
            }
        }
    }

    ComponentLabeling {
        width: w,
        height: h,
        labels,
        count,
    }
}

/// Tight bounding box of every component, ordered by component label.
pub fn component_boxes(labeling: &ComponentLabeling) -> Vec<WordBox> {
    let n = labeling.count as usize;
    // (min_x, min_y, max_x, max_y) per label
    let mut extents = vec![(u32::MAX, u32::MAX, 0u32, 0u32); n];
    let stride = labeling.width as usize;
    for (i, &label) in labeling.labels.iter().enumerate() {
        if label == 0 {
            continue;
        }
        let x = (i % stride) as u32;
        let y = (i / stride) as u32;
        let e = &mut extents[label as usize - 1];
        e.0 = e.0.min(x);
        e.1 = e.1.min(y);
        e.2 = e.2.max(x);
        e.3 = e.3.max(y);
    }
    extents
        .into_iter()
        .map(|(x0, y0, x1, y1)| WordBox::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1))
        .collect()
}

/// Expands foreground boundaries: every pixel within Chebyshev distance
/// `ceil(thickness / 2)` of a boundary pixel is set in the result. A
/// boundary pixel is a foreground pixel with at least one background
/// 8-neighbor; pixels beyond the image border count as background.
///
/// Components whose boundaries come within roughly `thickness` pixels of
/// each other merge into one component of the output.
pub fn thicken_boundaries(map: &BinaryMap, thickness: u32) -> Result<BinaryMap> {
    if thickness == 0 {
        return Err(Error::InvalidParameter(
            "thickness must be at least 1".into(),
        ));
    }
    let (w, h) = (map.width(), map.height());
    let stride = w as usize;
    let radius = thickness.div_ceil(2) as i64;

    let mut out = vec![0u8; map.len()];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if map.bits()[y as usize * stride + x as usize] == 0 {
                continue;
            }
            let mut is_boundary = false;
            'scan: for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    let neighbor_bg = nx < 0
                        || ny < 0
                        || nx >= w as i64
                        || ny >= h as i64
                        || map.bits()[ny as usize * stride + nx as usize] == 0;
                    if neighbor_bg {
                        is_boundary = true;
                        break 'scan;
                    }
                }
            }
            if !is_boundary {
                continue;
            }
            let x0 = (x - radius).max(0) as usize;
            let x1 = (x + radius).min(w as i64 - 1) as usize;
            for ny in (y - radius).max(0)..=(y + radius).min(h as i64 - 1) {
                let row = ny as usize * stride;
                out[row + x0..=row + x1].fill(1);
            }
        }
    }
    BinaryMap::new(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(w: u32, h: u32, bits: &[u8]) -> BinaryMap {
        BinaryMap::new(w, h, bits.to_vec()).unwrap()
    }

    #[test]
    fn empty_map_has_no_components() {
        let l = connected_components(&BinaryMap::zeros(5, 4).unwrap());
        assert_eq!(l.count, 0);
        assert!(l.labels.iter().all(|&v| v == 0));
        assert!(component_boxes(&l).is_empty());
    }

    #[test]
    fn single_block_is_one_component_with_exact_box() {
        let mut m = BinaryMap::zeros(5, 5).unwrap();
        for y in 1..3 {
            for x in 2..4 {
                m.set(x, y, 1);
            }
        }
        let l = connected_components(&m);
        assert_eq!(l.count, 1);
        let boxes = component_boxes(&l);
        assert_eq!(boxes, vec![WordBox::new(2, 1, 2, 2)]);
    }

    #[test]
    fn diagonal_touch_joins_components() {
        let m = map(2, 2, &[1, 0, 0, 1]);
        assert_eq!(connected_components(&m).count, 1);
    }

    #[test]
    fn separated_blobs_get_scan_ordered_labels() {
        #[rustfmt::skip]
        let m = map(7, 3, &[
            1, 1, 0, 0, 0, 1, 1,
            1, 1, 0, 0, 0, 1, 1,
            0, 0, 0, 1, 0, 0, 0,
        ]);
        let l = connected_components(&m);
        assert_eq!(l.count, 3);
        assert_eq!(l.label(0, 0), 1);
        assert_eq!(l.label(5, 0), 2);
        assert_eq!(l.label(3, 2), 3);
        let boxes = component_boxes(&l);
        assert_eq!(
            boxes,
            vec![
                WordBox::new(0, 0, 2, 2),
                WordBox::new(5, 0, 2, 2),
                WordBox::new(3, 2, 1, 1),
            ]
        );
    }

    #[test]
    fn labels_partition_the_foreground() {
        let bits: Vec<u8> = (0..(9 * 7))
            .map(|i| ((i as u64).wrapping_mul(0x9E3779B97F4A7C15) >> 61) as u8 & 1)
            .collect();
        let m = map(9, 7, &bits);
        let l = connected_components(&m);
        for (i, &b) in m.bits().iter().enumerate() {
            if b == 1 {
                assert!(l.labels[i] >= 1 && l.labels[i] <= l.count);
            } else {
                assert_eq!(l.labels[i], 0);
            }
        }
    }

    #[test]
    fn l_shape_box_covers_extent() {
        let mut m = BinaryMap::zeros(4, 4).unwrap();
        m.set(1, 1, 1);
        m.set(2, 1, 1);
        m.set(1, 2, 1);
        let boxes = component_boxes(&connected_components(&m));
        assert_eq!(boxes, vec![WordBox::new(1, 1, 2, 2)]);
    }

    #[test]
    fn full_frame_component_box_spans_the_map() {
        let m = map(5, 3, &[1; 15]);
        let boxes = component_boxes(&connected_components(&m));
        assert_eq!(boxes, vec![WordBox::new(0, 0, 5, 3)]);
    }

    #[test]
    fn thicken_rejects_zero_thickness() {
        assert!(thicken_boundaries(&BinaryMap::zeros(3, 3).unwrap(), 0).is_err());
    }

    #[test]
    fn thicken_empty_map_stays_empty() {
        let out = thicken_boundaries(&BinaryMap::zeros(6, 6).unwrap(), 4).unwrap();
        assert_eq!(out.count_ones(), 0);
    }

    #[test]
    fn thicken_single_pixel_becomes_centered_block() {
        let mut m = BinaryMap::zeros(5, 5).unwrap();
        m.set(2, 2, 1);
        let out = thicken_boundaries(&m, 1).unwrap();
        for y in 0..5 {
            for x in 0..5u32 {
                let inside = (1..=3).contains(&x) && (1..=3).contains(&y);
                assert_eq!(out.get(x, y), u8::from(inside), "at ({x},{y})");
            }
        }
    }

    #[test]
    fn thicken_clips_at_the_border() {
        let mut m = BinaryMap::zeros(3, 3).unwrap();
        m.set(0, 0, 1);
        let out = thicken_boundaries(&m, 1).unwrap();
        for y in 0..3 {
            for x in 0..3u32 {
                let inside = x <= 1 && y <= 1;
                assert_eq!(out.get(x, y), u8::from(inside));
            }
        }
    }

    #[test]
    fn thickness_four_bridges_a_three_pixel_gap() {
        let mut m = BinaryMap::zeros(7, 1).unwrap();
        m.set(1, 0, 1);
        m.set(5, 0, 1);
        assert_eq!(connected_components(&m).count, 2);
        let out = thicken_boundaries(&m, 4).unwrap();
        assert_eq!(connected_components(&out).count, 1);
        assert_eq!(out.count_ones(), 7);
    }

    #[test]
    fn thicken_output_contains_every_boundary_pixel() {
        let bits: Vec<u8> = (0..(8 * 8))
            .map(|i| ((i as u64).wrapping_mul(0xBF58476D1CE4E5B9) >> 62) as u8 & 1)
            .collect();
        let m = map(8, 8, &bits);
        let out = thicken_boundaries(&m, 3).unwrap();
        for y in 0..8i64 {
            for x in 0..8i64 {
                if m.get(x as u32, y as u32) == 0 {
                    continue;
                }
                let mut boundary = false;
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= 8 || ny >= 8 {
                            boundary = true;
                        } else if m.get(nx as u32, ny as u32) == 0 {
                            boundary = true;
                        }
                    }
                }
                if boundary {
                    assert_eq!(out.get(x as u32, y as u32), 1, "boundary pixel ({x},{y}) lost");
                }
            }
        }
    }

    #[test]
    fn thicker_strokes_cover_thinner_ones() {
        let mut m = BinaryMap::zeros(9, 9).unwrap();
        m.set(4, 4, 1);
        m.set(5, 4, 1);
        let thin = thicken_boundaries(&m, 1).unwrap();
        let thick = thicken_boundaries(&m, 4).unwrap();
        for i in 0..thin.len() {
            assert!(thick.bits()[i] >= thin.bits()[i]);
        }
    }

    #[test]
    fn isolated_blob_thickens_to_one_box_containing_it() {
        let mut m = BinaryMap::zeros(12, 10).unwrap();
        for y in 3..7 {
            for x in 4..9 {
                m.set(x, y, 1);
            }
        }
        let out = thicken_boundaries(&m, 4).unwrap();
        let boxes = component_boxes(&connected_components(&out));
        assert_eq!(boxes.len(), 1);
        let b = boxes[0];
        assert!(b.x <= 4 && b.y <= 3 && b.right() >= 9 && b.bottom() >= 7);
    }
}
