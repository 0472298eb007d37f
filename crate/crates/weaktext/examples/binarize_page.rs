//! Binarize a synthetic page with Otsu's method and box the connected
//! components of the ink mask.
//!
//! Run with: cargo run --example binarize_page

use weaktext::imgproc::{component_boxes, connected_components, otsu_binarize, otsu_threshold};
use weaktext::synth::{gen_page, SynthConfig};
use weaktext::Result;

pub fn run_example() -> Result<()> {
    let cfg = SynthConfig::default();
    let page = gen_page(&cfg, 7, 0)?;

    let threshold = otsu_threshold(&page.image).expect("page has two intensity classes");
    let ink = otsu_binarize(&page.image, true);
    let labeling = connected_components(&ink);
    let boxes = component_boxes(&labeling);

    println!(
        "page {}x{}, Otsu threshold {}, {} ink pixels",
        page.image.width(),
        page.image.height(),
        threshold,
        ink.count_ones()
    );
    println!(
        "{} connected components (ground truth has {} words)",
        boxes.len(),
        page.boxes.len()
    );
    for b in boxes.iter().take(5) {
        println!("  component at ({}, {}) size {}x{}", b.x, b.y, b.w, b.h);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
