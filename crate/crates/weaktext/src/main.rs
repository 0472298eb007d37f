//! Command line front end for the weaktext pipeline.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use weaktext::config::PipelineConfig;
use weaktext::pipeline;
use weaktext::{Error, Result};

#[derive(Parser)]
#[command(
    name = "weaktext",
    version,
    about = "Weakly supervised text detection: label, aggregate, evaluate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every fundamental labeling function and write its boxes per image
    LfRun {
        /// Pipeline config file (stock configuration when omitted)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory of input images (.pgm or .png)
        #[arg(long)]
        images: PathBuf,
        /// Output directory for sidecar files
        #[arg(long)]
        out: PathBuf,
        /// Also dump every function's vote map as a PGM mask
        #[arg(long)]
        write_maps: bool,
        /// Worker threads (library default when omitted)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Train the label model on a directory of images
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        images: PathBuf,
        /// Where to write the trained model
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Label images with a trained model and write predicted boxes
    Infer {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        images: PathBuf,
        /// Trained model file
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Label images with the majority-vote baseline
    Mbv {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Score predictions against ground truth over IoU thresholds
    Eval {
        /// Config supplying default thresholds and averaging
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory of *.pred.boxes.txt files
        #[arg(long)]
        pred: PathBuf,
        /// Directory of ground-truth *.boxes.txt files
        #[arg(long)]
        gt: PathBuf,
        /// Comma-separated ascending IoU thresholds, e.g. 0.5,0.6,0.7
        #[arg(long)]
        thresholds: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report coverage, overlap, and conflict per labeling function
    Diagnose {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Generate a synthetic corpus with ground truth and pseudo detectors
    Synth {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn parse_thresholds(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad threshold {t:?}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::LfRun {
            config,
            images,
            out,
            write_maps,
            jobs,
        } => pipeline::cmd_lf_run(&load_config(&config)?, &images, &out, write_maps, jobs),
        Command::Train {
            config,
            images,
            model,
            jobs,
        } => pipeline::cmd_train(&load_config(&config)?, &images, &model, jobs),
        Command::Infer {
            config,
            images,
            model,
            out,
            jobs,
        } => pipeline::cmd_infer(&load_config(&config)?, &images, &model, &out, jobs),
        Command::Mbv {
            config,
            images,
            out,
            jobs,
        } => pipeline::cmd_mbv(&load_config(&config)?, &images, &out, jobs),
        Command::Eval {
            config,
            pred,
            gt,
            thresholds,
            out,
        } => {
            let cfg = load_config(&config)?;
            let thresholds = match thresholds {
                Some(text) => parse_thresholds(&text)?,
                None => cfg.thresholds.clone(),
            };
            pipeline::cmd_eval(&pred, &gt, &thresholds, cfg.averaging, &out)
        }
        Command::Diagnose {
            config,
            images,
            out,
            jobs,
        } => pipeline::cmd_diagnose(&load_config(&config)?, &images, &out, jobs),
        Command::Synth { config, out } => pipeline::cmd_synth(&load_config(&config)?, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version render to stdout and exit cleanly; anything
            // else is a usage error.
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
