//! Generate a small synthetic corpus: page rasters, ground-truth word boxes,
//! and corrupted sidecars that imitate imperfect external detectors.
//!
//! Run with: cargo run --example synth_corpus

use std::path::Path;
use weaktext::config::PipelineConfig;
use weaktext::pipeline::cmd_synth;
use weaktext::Result;

const CONFIG: &str = "\
[synth]
pages = 5
seed = 42

[pseudo_lf.dropper]
drop_rate = 0.2
seed = 1

[pseudo_lf.jitterer]
jitter = 3
spurious_rate = 1.5
seed = 2
";

pub fn run_example() -> Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let cfg = PipelineConfig::parse(CONFIG, Path::new("synth.cfg"))?;
    let summary = cmd_synth(&cfg, dir.path())?;
    println!("{summary}");

    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .expect("read corpus dir")
        .map(|e| e.expect("dir entry").file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    println!("files for the first page:");
    for name in names.iter().filter(|n| n.starts_with("page000")) {
        println!("  {name}");
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
