//! Full loop on one corpus: synthesize pages, train the label model on the
//! corrupted detectors, infer word boxes, and compare them with the ground
//! truth of a single page.
//!
//! Run with: cargo run --example infer_boxes

use std::path::Path;
use weaktext::config::PipelineConfig;
use weaktext::io::read_boxes;
use weaktext::pipeline::{cmd_infer, cmd_synth, cmd_train};
use weaktext::Result;

const SYNTH: &str = "\
[synth]
pages = 10
seed = 5

[pseudo_lf.alpha]
drop_rate = 0.15
jitter = 2
seed = 30

[pseudo_lf.beta]
drop_rate = 0.05
spurious_rate = 1
seed = 40
";

const LFS: &str = "\
[lf.alpha]
kind = external
quality = 0.85
complement_quality = 0.95

[lf.beta]
kind = external
quality = 0.9
complement_quality = 0.95
";

pub fn run_example() -> Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let corpus = dir.path().join("corpus");
    cmd_synth(&PipelineConfig::parse(SYNTH, Path::new("synth.cfg"))?, &corpus)?;

    let cfg = PipelineConfig::parse(LFS, Path::new("lfs.cfg"))?;
    let model_path = dir.path().join("model.txt");
    cmd_train(&cfg, &corpus, &model_path, None)?;

    let pred_dir = dir.path().join("pred");
    let summary = cmd_infer(&cfg, &corpus, &model_path, &pred_dir, None)?;
    println!("{summary}");

    let predicted = read_boxes(&pred_dir.join("page000.pred.boxes.txt"))?;
    let truth = read_boxes(&corpus.join("page000.boxes.txt"))?;
    println!(
        "\npage000: {} predicted boxes, {} ground-truth words",
        predicted.len(),
        truth.len()
    );
    for b in predicted.iter().take(5) {
        println!("  predicted ({}, {}) size {}x{}", b.x, b.y, b.w, b.h);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
