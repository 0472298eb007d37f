//! Weakly supervised text detection for document images.
//!
//! Several cheap, noisy labeling functions (native edge/contour detectors
//! and ingested third-party detector output) vote on every pixel; a small
//! generative model learns how much to trust each one and produces a
//! consensus text mask, which is then cut into word bounding boxes. No
//! pixel-level ground truth is needed for training: quality guides (a prior
//! belief in each labeling function's precision) anchor the model instead.
//!
//! The `examples/` directory walks through every stage: corpus synthesis,
//! labeling function runs, diagnostics, training, inference, and
//! evaluation. The `weaktext` binary wires the same stages into a
//! file-based pipeline.

pub mod aggregator;
pub mod config;
pub mod error;
pub mod evalkit;
pub mod imgproc;
pub mod io;
pub mod labelgen;
pub mod labeling;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
