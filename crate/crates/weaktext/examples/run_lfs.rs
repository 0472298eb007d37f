//! Run the native labeling functions over a synthetic page and report how
//! much of the page each one votes on.
//!
//! Every fundamental function claims TEXT inside its (shrunk) boxes; its
//! complementary partner claims NONTEXT outside the same boxes, so the two
//! never fire on the same pixel.
//!
//! Run with: cargo run --example run_lfs

use std::path::Path;
use weaktext::labeling::{run_labeling, LFKind, LFSpec, Polarity};
use weaktext::synth::{gen_page, SynthConfig};
use weaktext::Result;

fn pair(id: &str, kind: LFKind, quality: f64, complement_quality: f64) -> Vec<LFSpec> {
    let fundamental = LFSpec {
        id: id.to_string(),
        kind: kind.clone(),
        polarity: Polarity::Fundamental,
        quality,
        shrink_w: 0.10,
        shrink_h: 0.20,
    };
    let complement = LFSpec {
        id: format!("{id}-comp"),
        kind,
        polarity: Polarity::Complementary,
        quality: complement_quality,
        shrink_w: fundamental.shrink_w,
        shrink_h: fundamental.shrink_h,
    };
    vec![fundamental, complement]
}

pub fn run_example() -> Result<()> {
    let page = gen_page(&SynthConfig::default(), 11, 0)?;

    let mut specs = pair("contour", LFKind::Contour { thickness: 4 }, 0.85, 0.95);
    specs.extend(pair(
        "canny",
        LFKind::Canny {
            low: 50.0,
            high: 150.0,
            edge_thickness: 2,
        },
        0.85,
        0.95,
    ));

    let maps = run_labeling(&specs, &page.image, Path::new("page.pgm"))?;
    let pixels = page.image.len() as f64;
    println!("{:<14} {:>6} {:>10}", "lf", "class", "coverage");
    for (spec, map) in specs.iter().zip(&maps) {
        println!(
            "{:<14} {:>6} {:>9.1}%",
            spec.id,
            spec.class().name(),
            100.0 * map.count_ones() as f64 / pixels
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
