//! Compare the trained label model against the majority-vote baseline on
//! the same synthetic corpus, sweeping the IoU threshold.
//!
//! Run with: cargo run --example evaluate_reports

use std::path::Path;
use weaktext::config::PipelineConfig;
use weaktext::evalkit::Averaging;
use weaktext::pipeline::{cmd_eval, cmd_infer, cmd_mbv, cmd_synth, cmd_train};
use weaktext::Result;

const SYNTH: &str = "\
[synth]
pages = 15
seed = 21

[pseudo_lf.alpha]
drop_rate = 0.15
jitter = 2
spurious_rate = 2
seed = 70

[pseudo_lf.beta]
drop_rate = 0.1
merge_rate = 0.2
seed = 80

[pseudo_lf.gamma]
drop_rate = 0.05
jitter = 1
seed = 90
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

[lf.gamma]
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
    cmd_train(&cfg, &corpus, &model_path, None)?;

    let trained_pred = dir.path().join("pred-trained");
    let mbv_pred = dir.path().join("pred-mbv");
    cmd_infer(&cfg, &corpus, &model_path, &trained_pred, None)?;
    cmd_mbv(&cfg, &corpus, &mbv_pred, None)?;

    let thresholds = [0.5, 0.6, 0.7, 0.8, 0.9];
    println!("trained model:");
    println!(
        "{}",
        cmd_eval(
            &trained_pred,
            &corpus,
            &thresholds,
            Averaging::Micro,
            &dir.path().join("eval-trained"),
        )?
    );
    println!("\nmajority vote:");
    println!(
        "{}",
        cmd_eval(
            &mbv_pred,
            &corpus,
            &thresholds,
            Averaging::Micro,
            &dir.path().join("eval-mbv"),
        )?
    );
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
