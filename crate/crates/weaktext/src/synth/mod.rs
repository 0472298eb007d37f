//! Deterministic synthetic page generation and controlled corruption of
//! ground truth into pseudo detector output.
//!
//! The generator renders row-laid-out word rectangles on a light page;
//! [`corrupt_boxes`] degrades the true boxes into realistic fake detector
//! output (misses, merges, edge wobble, phantoms). Both are pure functions
//! of their seeds, down to the bit, which is the backbone of reproducible
//! benchmark corpora.

mod corrupt;
mod page;
pub mod rng;

pub use corrupt::{corrupt_boxes, CorruptionSpec};
pub use page::{
    gen_page, Page, SynthConfig, PAGE_MARGIN, ROW_GAP, WORD_GAP_MAX, WORD_GAP_MIN,
};
