//! Train the label model on a synthetic corpus whose "detectors" are
//! deliberately corrupted copies of the ground truth, then inspect the
//! precision the model learned for each labeling function.
//!
//! The aggressive dropper gets a low quality guide, the mild one a high
//! guide; training moves each function's precision toward its guide while
//! staying consistent with how often the functions agree on pixels.
//!
//! Run with: cargo run --example train_model

use std::path::Path;
use weaktext::config::PipelineConfig;
use weaktext::pipeline::{cmd_synth, cmd_train};
use weaktext::Result;

const SYNTH: &str = "\
[synth]
pages = 12
seed = 3

[pseudo_lf.rough]
drop_rate = 0.3
jitter = 3
spurious_rate = 2
seed = 10

[pseudo_lf.clean]
drop_rate = 0.05
seed = 20
";

const LFS: &str = "\
[lf.rough]
kind = external
quality = 0.7
complement_quality = 0.9

[lf.clean]
kind = external
quality = 0.95
complement_quality = 0.95
";

pub fn run_example() -> Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let corpus = dir.path().join("corpus");
    cmd_synth(&PipelineConfig::parse(SYNTH, Path::new("synth.cfg"))?, &corpus)?;

    let cfg = PipelineConfig::parse(LFS, Path::new("lfs.cfg"))?;
    let model_path = dir.path().join("model.txt");
    let summary = cmd_train(&cfg, &corpus, &model_path, None)?;
    println!("{summary}");

    let model_text = std::fs::read_to_string(&model_path).expect("read model");
    println!("\nmodel file starts with:");
    for line in model_text.lines().take(5) {
        println!("  {line}");
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
