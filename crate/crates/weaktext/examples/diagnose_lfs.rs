//! Diagnose a set of labeling functions: how much of the corpus each one
//! covers, how often it fires together with another function, and how often
//! it disagrees with one.
//!
//! Run with: cargo run --example diagnose_lfs

use std::path::Path;
use weaktext::config::PipelineConfig;
use weaktext::pipeline::{cmd_diagnose, cmd_synth};
use weaktext::Result;

const SYNTH: &str = "\
[synth]
pages = 6
seed = 9

[pseudo_lf.alpha]
drop_rate = 0.25
seed = 50

[pseudo_lf.beta]
jitter = 2
spurious_rate = 2
seed = 60
";

const LFS: &str = "\
[lf.alpha]
kind = external
quality = 0.8
complement_quality = 0.95

[lf.beta]
kind = external
quality = 0.85
complement_quality = 0.95
";

pub fn run_example() -> Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let corpus = dir.path().join("corpus");
    cmd_synth(&PipelineConfig::parse(SYNTH, Path::new("synth.cfg"))?, &corpus)?;

    let cfg = PipelineConfig::parse(LFS, Path::new("lfs.cfg"))?;
    let out = dir.path().join("diag");
    let table = cmd_diagnose(&cfg, &corpus, &out, None)?;
    println!("{table}");

    let csv = std::fs::read_to_string(out.join("lf_stats.csv")).expect("read stats");
    println!("\nlf_stats.csv rows: {}", csv.lines().count() - 1);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
