//! Pipeline configuration: a small line-oriented text format.
//!
//! Top-level keys use dotted names (`shrink.w = 0.1`); labeling functions,
//! corpus synthesis, and pseudo detectors live in sections:
//!
//! ```text
//! shrink.w = 0.1
//! eval.thresholds = 0.5,0.6,0.7,0.8,0.9
//!
//! [lf.contour]
//! kind = contour
//! quality = 0.85
//! complement_quality = 0.95
//!
//! [synth]
//! pages = 20
//!
//! [pseudo_lf.alpha]
//! drop_rate = 0.15
//! ```
//!
//! `#` starts a comment, blank lines are ignored, unknown or duplicate
//! keys are errors. Declaring `complement_quality` on a labeling function
//! expands it into a fundamental/complementary pair: `<id>` followed by
//! `<id>-comp` with the same kind, parameters, and shrink factors. Global
//! keys must appear before the first section.

use crate::aggregator::{ThetaInit, TrainConfig};
use crate::error::{Error, Result};
use crate::evalkit::{Averaging, ConflictDenominator};
use crate::labeling::{LFKind, LFSpec, MissingPolicy, Polarity};
use crate::synth::{CorruptionSpec, SynthConfig};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Everything the pipeline commands need, parsed and validated.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub shrink_w: f64,
    pub shrink_h: f64,
    pub train: TrainConfig,
    pub min_box_area: u64,
    pub thresholds: Vec<f64>,
    pub averaging: Averaging,
    pub conflict_denominator: ConflictDenominator,
    /// Expanded labeling functions: each declared function, immediately
    /// followed by its complement when one was requested.
    pub specs: Vec<LFSpec>,
    pub synth: SynthConfig,
    pub pages: u64,
    pub seed: u64,
    pub pseudo_lfs: Vec<(String, CorruptionSpec)>,
}

impl Default for PipelineConfig {
    /// The stock eight-function setup: native contour and edge detectors
    /// plus two ingested external detectors, each paired with a
    /// high-quality complement.
    fn default() -> Self {
        let declared = [
            ("contour", LFKind::Contour { thickness: 4 }, 0.85),
            (
                "canny",
                LFKind::Canny {
                    low: 50.0,
                    high: 150.0,
                    edge_thickness: 2,
                },
                0.85,
            ),
            (
                "dbnet",
                LFKind::External {
                    source_suffix: ".lf-dbnet.boxes.txt".into(),
                    on_missing: MissingPolicy::Error,
                },
                0.90,
            ),
            (
                "tesseract",
                LFKind::External {
                    source_suffix: ".lf-tesseract.boxes.txt".into(),
                    on_missing: MissingPolicy::Error,
                },
                0.75,
            ),
        ];
        let mut specs = Vec::new();
        for (id, kind, quality) in declared {
            push_pair(&mut specs, id, kind, quality, Some(0.95), 0.10, 0.20);
        }
        PipelineConfig {
            shrink_w: 0.10,
            shrink_h: 0.20,
            train: TrainConfig::default(),
            min_box_area: 4,
            thresholds: vec![0.5, 0.6, 0.7, 0.8, 0.9],
            averaging: Averaging::Micro,
            conflict_denominator: ConflictDenominator::Covered,
            specs,
            synth: SynthConfig::default(),
            pages: 20,
            seed: 1,
            pseudo_lfs: Vec::new(),
        }
    }
}

fn push_pair(
    specs: &mut Vec<LFSpec>,
    id: &str,
    kind: LFKind,
    quality: f64,
    complement_quality: Option<f64>,
    shrink_w: f64,
    shrink_h: f64,
) {
    specs.push(LFSpec {
        id: id.to_string(),
        kind: kind.clone(),
        polarity: Polarity::Fundamental,
        quality,
        shrink_w,
        shrink_h,
    });
    if let Some(q) = complement_quality {
        specs.push(LFSpec {
            id: format!("{id}-comp"),
            kind,
            polarity: Polarity::Complementary,
            quality: q,
            shrink_w,
            shrink_h,
        });
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        PipelineConfig::parse(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, s) in [("shrink.w", self.shrink_w), ("shrink.h", self.shrink_h)] {
            if !(s.is_finite() && (0.0..1.0).contains(&s)) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1), got {s}"
                )));
            }
        }
        self.train.validate()?;
        if self.thresholds.is_empty() {
            return Err(Error::InvalidParameter(
                "eval.thresholds must not be empty".into(),
            ));
        }
        for t in &self.thresholds {
            if !(t.is_finite() && (0.0..=1.0).contains(t)) {
                return Err(Error::InvalidParameter(format!(
                    "IoU threshold must lie in [0, 1], got {t}"
                )));
            }
        }
        for pair in self.thresholds.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::InvalidParameter(format!(
                    "eval.thresholds must be strictly ascending, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        if self.specs.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one labeling function is required".into(),
            ));
        }
        if self.specs.len() > 64 {
            return Err(Error::InvalidParameter(format!(
                "at most 64 labeling functions are supported, got {}",
                self.specs.len()
            )));
        }
        for spec in &self.specs {
            spec.validate()?;
        }
        self.synth.validate()?;
        if self.pages == 0 {
            return Err(Error::InvalidParameter(
                "synth.pages must be at least 1".into(),
            ));
        }
        for (id, spec) in &self.pseudo_lfs {
            if id.is_empty() {
                return Err(Error::InvalidParameter(
                    "pseudo detector ids must be non-empty".into(),
                ));
            }
            spec.validate()?;
        }
        Ok(())
    }

    /// Renders the config in the same format [`PipelineConfig::parse`]
    /// reads. For any config built by `parse` (or `Default`), parsing the
    /// emitted text reproduces it exactly.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "shrink.w = {}", self.shrink_w);
        let _ = writeln!(out, "shrink.h = {}", self.shrink_h);
        let _ = writeln!(out, "train.learning_rate = {}", self.train.learning_rate);
        let _ = writeln!(
            out,
            "train.epochs_per_image = {}",
            self.train.epochs_per_image
        );
        let _ = writeln!(out, "train.reg_weight = {}", self.train.reg_weight);
        let init = match self.train.init {
            ThetaInit::Zeros => "zeros".to_string(),
            ThetaInit::Constant(v) => format!("constant:{v}"),
        };
        let _ = writeln!(out, "train.init = {init}");
        let _ = writeln!(out, "labelgen.min_box_area = {}", self.min_box_area);
        let thresholds: Vec<String> = self.thresholds.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "eval.thresholds = {}", thresholds.join(","));
        let averaging = match self.averaging {
            Averaging::Micro => "micro",
            Averaging::Macro => "macro",
        };
        let _ = writeln!(out, "eval.averaging = {averaging}");
        let denom = match self.conflict_denominator {
            ConflictDenominator::Covered => "covered",
            ConflictDenominator::Overlapped => "overlapped",
        };
        let _ = writeln!(out, "eval.conflict_denominator = {denom}");

        for spec in &self.specs {
            if spec.polarity != Polarity::Fundamental {
                continue;
            }
            let _ = writeln!(out, "\n[lf.{}]", spec.id);
            let _ = writeln!(out, "quality = {}", spec.quality);
            let comp_id = format!("{}-comp", spec.id);
            if let Some(comp) = self.specs.iter().find(|s| s.id == comp_id) {
                let _ = writeln!(out, "complement_quality = {}", comp.quality);
            }
            match &spec.kind {
                LFKind::Contour { thickness } => {
                    let _ = writeln!(out, "kind = contour");
                    let _ = writeln!(out, "contour_thickness = {thickness}");
                }
                LFKind::SobelEdges { edge_thickness } => {
                    let _ = writeln!(out, "kind = sobel");
                    let _ = writeln!(out, "edge_thickness = {edge_thickness}");
                }
                LFKind::Canny {
                    low,
                    high,
                    edge_thickness,
                } => {
                    let _ = writeln!(out, "kind = canny");
                    let _ = writeln!(out, "canny_low = {low}");
                    let _ = writeln!(out, "canny_high = {high}");
                    let _ = writeln!(out, "edge_thickness = {edge_thickness}");
                }
                LFKind::External {
                    source_suffix,
                    on_missing,
                } => {
                    let _ = writeln!(out, "kind = external");
                    let _ = writeln!(out, "source_suffix = {source_suffix}");
                    let policy = match on_missing {
                        MissingPolicy::Error => "error",
                        MissingPolicy::Abstain => "abstain",
                    };
                    let _ = writeln!(out, "on_missing = {policy}");
                }
            }
        }

        let _ = writeln!(out, "\n[synth]");
        let _ = writeln!(out, "pages = {}", self.pages);
        let _ = writeln!(out, "seed = {}", self.seed);
        let s = &self.synth;
        for (key, value) in [
            ("page_w", s.page_w as u64),
            ("page_h", s.page_h as u64),
            ("rows_min", s.rows_min as u64),
            ("rows_max", s.rows_max as u64),
            ("words_min", s.words_min as u64),
            ("words_max", s.words_max as u64),
            ("word_w_min", s.word_w_min as u64),
            ("word_w_max", s.word_w_max as u64),
            ("word_h_min", s.word_h_min as u64),
            ("word_h_max", s.word_h_max as u64),
            ("ink_min", s.ink_min as u64),
            ("ink_max", s.ink_max as u64),
            ("background", s.background as u64),
        ] {
            let _ = writeln!(out, "{key} = {value}");
        }
        let _ = writeln!(out, "noise = {}", s.noise);

        for (id, spec) in &self.pseudo_lfs {
            let _ = writeln!(out, "\n[pseudo_lf.{id}]");
            let _ = writeln!(out, "drop_rate = {}", spec.drop_rate);
            let _ = writeln!(out, "merge_rate = {}", spec.merge_rate);
            let _ = writeln!(out, "jitter = {}", spec.jitter);
            let _ = writeln!(out, "spurious_rate = {}", spec.spurious_rate);
            let _ = writeln!(out, "seed = {}", spec.seed);
        }
        out
    }

    /// Parses the text of a config file. `path` is used in error messages
    /// only. Absent keys keep their defaults; a config with no `[lf.*]`
    /// sections gets the stock labeling-function set.
    pub fn parse(text: &str, path: &Path) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig {
            specs: Vec::new(),
            ..PipelineConfig::default()
        };
        let mut parser = Parser::new(path);

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| parser.err(line_no, "unterminated section header"))?
                    .trim();
                parser.open_section(name, line_no, &mut cfg)?;
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parser.err(line_no, "expected `key = value`"))?;
            parser.set(key.trim(), value.trim(), line_no, &mut cfg)?;
        }
        parser.close_section(&mut cfg)?;
        if cfg.specs.is_empty() {
            cfg.specs = PipelineConfig::default().specs;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn format_err(path: &Path, line: usize, reason: String) -> Error {
    Error::ConfigFormat {
        path: path.to_path_buf(),
        line,
        reason,
    }
}

fn f64_value(path: &Path, value: &str, line: usize) -> Result<f64> {
    value
        .parse()
        .map_err(|_| format_err(path, line, format!("expected a number, got {value:?}")))
}

fn int_value<T: std::str::FromStr>(path: &Path, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| format_err(path, line, format!("expected an integer, got {value:?}")))
}

/// Partially built labeling-function section.
struct LfDraft {
    id: String,
    line: usize,
    kind_name: Option<String>,
    quality: Option<f64>,
    complement_quality: Option<f64>,
    contour_thickness: u32,
    edge_thickness: u32,
    canny_low: f64,
    canny_high: f64,
    source_suffix: Option<String>,
    on_missing: MissingPolicy,
}

enum Section {
    Global,
    Lf(LfDraft),
    Synth,
    PseudoLf(String, CorruptionSpec),
}

struct Parser {
    path: PathBuf,
    section: Section,
    seen_global: BTreeSet<String>,
    seen_section: BTreeSet<String>,
    seen_section_names: BTreeSet<String>,
}

impl Parser {
    fn new(path: &Path) -> Parser {
        Parser {
            path: path.to_path_buf(),
            section: Section::Global,
            seen_global: BTreeSet::new(),
            seen_section: BTreeSet::new(),
            seen_section_names: BTreeSet::new(),
        }
    }

    fn err(&self, line: usize, reason: impl Into<String>) -> Error {
        format_err(&self.path, line, reason.into())
    }

    fn open_section(&mut self, name: &str, line: usize, cfg: &mut PipelineConfig) -> Result<()> {
        self.close_section(cfg)?;
        self.seen_section.clear();
        if !self.seen_section_names.insert(name.to_string()) {
            return Err(self.err(line, format!("duplicate section [{name}]")));
        }
        self.section = if let Some(id) = name.strip_prefix("lf.") {
            Section::Lf(LfDraft {
                id: id.to_string(),
                line,
                kind_name: None,
                quality: None,
                complement_quality: None,
                contour_thickness: 4,
                edge_thickness: 2,
                canny_low: 50.0,
                canny_high: 150.0,
                source_suffix: None,
                on_missing: MissingPolicy::Error,
            })
        } else if let Some(id) = name.strip_prefix("pseudo_lf.") {
            Section::PseudoLf(id.to_string(), CorruptionSpec::default())
        } else if name == "synth" {
            Section::Synth
        } else {
            return Err(self.err(line, format!("unknown section [{name}]")));
        };
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str, line: usize, cfg: &mut PipelineConfig) -> Result<()> {
        let seen = match self.section {
            Section::Global => &mut self.seen_global,
            _ => &mut self.seen_section,
        };
        if !seen.insert(key.to_string()) {
            return Err(format_err(
                &self.path,
                line,
                format!("duplicate key {key:?}"),
            ));
        }

        let path = self.path.clone();
        match &mut self.section {
            Section::Global => set_global(&path, key, value, line, cfg),
            Section::Synth => set_synth(&path, key, value, line, cfg),
            Section::Lf(draft) => set_lf(&path, draft, key, value, line),
            Section::PseudoLf(_, spec) => set_pseudo(&path, spec, key, value, line),
        }
    }

    /// Folds the open section into the config. Called on every section
    /// boundary and once at end of input.
    fn close_section(&mut self, cfg: &mut PipelineConfig) -> Result<()> {
        match std::mem::replace(&mut self.section, Section::Global) {
            Section::Global | Section::Synth => {}
            Section::Lf(draft) => {
                let quality = draft.quality.ok_or_else(|| {
                    self.err(draft.line, format!("[lf.{}] needs `quality`", draft.id))
                })?;
                let kind_name = draft.kind_name.as_deref().ok_or_else(|| {
                    self.err(draft.line, format!("[lf.{}] needs `kind`", draft.id))
                })?;
                let kind = match kind_name {
                    "contour" => LFKind::Contour {
                        thickness: draft.contour_thickness,
                    },
                    "sobel" => LFKind::SobelEdges {
                        edge_thickness: draft.edge_thickness,
                    },
                    "canny" => LFKind::Canny {
                        low: draft.canny_low,
                        high: draft.canny_high,
                        edge_thickness: draft.edge_thickness,
                    },
                    "external" => LFKind::External {
                        source_suffix: draft
                            .source_suffix
                            .clone()
                            .unwrap_or_else(|| format!(".lf-{}.boxes.txt", draft.id)),
                        on_missing: draft.on_missing,
                    },
                    other => {
                        return Err(self.err(
                            draft.line,
                            format!(
                                "kind must be contour, sobel, canny, or external, got {other:?}"
                            ),
                        ))
                    }
                };
                push_pair(
                    &mut cfg.specs,
                    &draft.id,
                    kind,
                    quality,
                    draft.complement_quality,
                    cfg.shrink_w,
                    cfg.shrink_h,
                );
            }
            Section::PseudoLf(id, spec) => {
                cfg.pseudo_lfs.push((id, spec));
            }
        }
        Ok(())
    }
}

fn set_global(
    path: &Path,
    key: &str,
    value: &str,
    line: usize,
    cfg: &mut PipelineConfig,
) -> Result<()> {
    match key {
        "shrink.w" => cfg.shrink_w = f64_value(path, value, line)?,
        "shrink.h" => cfg.shrink_h = f64_value(path, value, line)?,
        "train.learning_rate" => cfg.train.learning_rate = f64_value(path, value, line)?,
        "train.epochs_per_image" => cfg.train.epochs_per_image = int_value(path, value, line)?,
        "train.reg_weight" => cfg.train.reg_weight = f64_value(path, value, line)?,
        "train.init" => {
            cfg.train.init = if value == "zeros" {
                ThetaInit::Zeros
            } else if let Some(v) = value.strip_prefix("constant:") {
                ThetaInit::Constant(f64_value(path, v, line)?)
            } else {
                return Err(format_err(
                    path,
                    line,
                    format!("train.init must be `zeros` or `constant:<value>`, got {value:?}"),
                ));
            }
        }
        "labelgen.min_box_area" => cfg.min_box_area = int_value(path, value, line)?,
        "eval.thresholds" => {
            let mut thresholds = Vec::new();
            for part in value.split(',') {
                thresholds.push(f64_value(path, part.trim(), line)?);
            }
            cfg.thresholds = thresholds;
        }
        "eval.averaging" => {
            cfg.averaging = match value {
                "micro" => Averaging::Micro,
                "macro" => Averaging::Macro,
                other => {
                    return Err(format_err(
                        path,
                        line,
                        format!("eval.averaging must be `micro` or `macro`, got {other:?}"),
                    ))
                }
            }
        }
        "eval.conflict_denominator" => {
            cfg.conflict_denominator = match value {
                "covered" => ConflictDenominator::Covered,
                "overlapped" => ConflictDenominator::Overlapped,
                other => {
                    return Err(format_err(
                        path,
                        line,
                        format!(
                            "eval.conflict_denominator must be `covered` or `overlapped`, \
                             got {other:?}"
                        ),
                    ))
                }
            }
        }
        other => return Err(format_err(path, line, format!("unknown key {other:?}"))),
    }
    Ok(())
}

fn set_synth(
    path: &Path,
    key: &str,
    value: &str,
    line: usize,
    cfg: &mut PipelineConfig,
) -> Result<()> {
    let s = &mut cfg.synth;
    match key {
        "pages" => cfg.pages = int_value(path, value, line)?,
        "seed" => cfg.seed = int_value(path, value, line)?,
        "page_w" => s.page_w = int_value(path, value, line)?,
        "page_h" => s.page_h = int_value(path, value, line)?,
        "rows_min" => s.rows_min = int_value(path, value, line)?,
        "rows_max" => s.rows_max = int_value(path, value, line)?,
        "words_min" => s.words_min = int_value(path, value, line)?,
        "words_max" => s.words_max = int_value(path, value, line)?,
        "word_w_min" => s.word_w_min = int_value(path, value, line)?,
        "word_w_max" => s.word_w_max = int_value(path, value, line)?,
        "word_h_min" => s.word_h_min = int_value(path, value, line)?,
        "word_h_max" => s.word_h_max = int_value(path, value, line)?,
        "ink_min" => s.ink_min = int_value(path, value, line)?,
        "ink_max" => s.ink_max = int_value(path, value, line)?,
        "background" => s.background = int_value(path, value, line)?,
        "noise" => s.noise = f64_value(path, value, line)?,
        other => {
            return Err(format_err(
                path,
                line,
                format!("unknown key {other:?} in [synth]"),
            ))
        }
    }
    Ok(())
}

fn set_lf(path: &Path, draft: &mut LfDraft, key: &str, value: &str, line: usize) -> Result<()> {
    match key {
        "kind" => draft.kind_name = Some(value.to_string()),
        "quality" => draft.quality = Some(f64_value(path, value, line)?),
        "complement_quality" => draft.complement_quality = Some(f64_value(path, value, line)?),
        "contour_thickness" => draft.contour_thickness = int_value(path, value, line)?,
        "edge_thickness" => draft.edge_thickness = int_value(path, value, line)?,
        "canny_low" => draft.canny_low = f64_value(path, value, line)?,
        "canny_high" => draft.canny_high = f64_value(path, value, line)?,
        "source_suffix" => draft.source_suffix = Some(value.to_string()),
        "on_missing" => {
            draft.on_missing = match value {
                "error" => MissingPolicy::Error,
                "abstain" => MissingPolicy::Abstain,
                other => {
                    return Err(format_err(
                        path,
                        line,
                        format!("on_missing must be `error` or `abstain`, got {other:?}"),
                    ))
                }
            }
        }
        other => {
            return Err(format_err(
                path,
                line,
                format!("unknown key {other:?} in a [lf.*] section"),
            ))
        }
    }
    Ok(())
}

fn set_pseudo(
    path: &Path,
    spec: &mut CorruptionSpec,
    key: &str,
    value: &str,
    line: usize,
) -> Result<()> {
    match key {
        "drop_rate" => spec.drop_rate = f64_value(path, value, line)?,
        "merge_rate" => spec.merge_rate = f64_value(path, value, line)?,
        "jitter" => spec.jitter = int_value(path, value, line)?,
        "spurious_rate" => spec.spurious_rate = f64_value(path, value, line)?,
        "seed" => spec.seed = int_value(path, value, line)?,
        other => {
            return Err(format_err(
                path,
                line,
                format!("unknown key {other:?} in a [pseudo_lf.*] section"),
            ))
        }
    }
    Ok(())
}
