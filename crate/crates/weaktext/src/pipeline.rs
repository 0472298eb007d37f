//! File-based pipeline commands.
//!
//! Each function here is one `weaktext` subcommand: they read images and
//! box sidecars from directories, run the library stages, and write
//! sidecars, models, masks, and CSV reports. All outputs go through
//! atomic writes, and every per-image stage processes images in filename
//! order (optionally in parallel, with order-preserving collection), so a
//! rerun over the same inputs produces byte-identical files.

use crate::aggregator::{
    lf_precision, load_model, save_model, train, LfEntry, ThetaParams,
};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::evalkit::{lf_stats, majority_vote, sweep, Averaging, CorpusEval, LfStats};
use crate::io::{atomic_write, load_image, read_boxes, write_boxes, write_map_pgm, write_pgm};
use crate::labelgen::{generate, LabelGenConfig};
use crate::labeling::{
    build_tau, histogram, run_labeling, source_boxes, LFKind, PatternHistogram, Polarity,
    TauMatrix,
};
use crate::synth::{corrupt_boxes, gen_page};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Suffix of prediction sidecars written by `infer` and `mbv`.
pub const PRED_SUFFIX: &str = ".pred.boxes.txt";
/// Suffix of ground-truth sidecars written by `synth`.
pub const GT_SUFFIX: &str = ".boxes.txt";

/// Lists the PGM/PNG images of a directory, sorted by filename.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut images = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        let is_image = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.eq_ignore_ascii_case("pgm") || e.eq_ignore_ascii_case("png"))
            .unwrap_or(false);
        if is_image && path.is_file() {
            images.push(path);
        }
    }
    images.sort();
    if images.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no .pgm or .png images in {}",
            dir.display()
        )));
    }
    Ok(images)
}

fn image_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Maps `f` over the images, in parallel when `jobs` allows, preserving
/// input order in the result.
fn over_images<T, F>(images: &[PathBuf], jobs: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Path) -> Result<T> + Sync,
{
    let work = || images.par_iter().map(|p| f(p)).collect::<Result<Vec<T>>>();
    match jobs {
        None => work(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| {
                    Error::InvalidParameter(format!("cannot build a {n}-thread pool: {e}"))
                })?;
            pool.install(work)
        }
    }
}

fn labeled_tau(cfg: &PipelineConfig, path: &Path) -> Result<TauMatrix> {
    let img = load_image(path)?;
    let maps = run_labeling(&cfg.specs, &img, path)?;
    build_tau(&maps, &cfg.specs)
}

fn labelgen_config(cfg: &PipelineConfig) -> LabelGenConfig {
    LabelGenConfig {
        min_box_area: cfg.min_box_area,
        shrink_w: cfg.shrink_w,
        shrink_h: cfg.shrink_h,
    }
}

/// Generates the synthetic corpus: `pageNNN.pgm` rasters, `pageNNN.boxes.txt`
/// ground truth, and one corrupted sidecar per pseudo detector and page.
pub fn cmd_synth(cfg: &PipelineConfig, out_dir: &Path) -> Result<String> {
    cfg.validate()?;
    ensure_dir(out_dir)?;
    for page_index in 0..cfg.pages {
        let page = gen_page(&cfg.synth, cfg.seed, page_index)?;
        let stem = format!("page{page_index:03}");
        write_pgm(&out_dir.join(format!("{stem}.pgm")), &page.image)?;
        write_boxes(&out_dir.join(format!("{stem}{GT_SUFFIX}")), &page.boxes)?;
        for (id, spec) in &cfg.pseudo_lfs {
            let corrupted = corrupt_boxes(
                &page.boxes,
                cfg.synth.page_w,
                cfg.synth.page_h,
                spec,
                page_index,
            )?;
            write_boxes(
                &out_dir.join(format!("{stem}.lf-{id}{GT_SUFFIX}")),
                &corrupted,
            )?;
        }
    }
    Ok(format!(
        "wrote {} pages ({} pseudo detectors) to {}",
        cfg.pages,
        cfg.pseudo_lfs.len(),
        out_dir.display()
    ))
}

/// Runs every fundamental labeling function and writes its raw box output
/// as `<stem>.lf-<id>.boxes.txt` (externals keep their configured suffix).
/// With `write_maps`, also dumps every function's shrunk vote map as a
/// `<stem>.map-<id>.pgm` mask, complements included.
pub fn cmd_lf_run(
    cfg: &PipelineConfig,
    images_dir: &Path,
    out_dir: &Path,
    write_maps: bool,
    jobs: Option<usize>,
) -> Result<String> {
    cfg.validate()?;
    ensure_dir(out_dir)?;
    let images = list_images(images_dir)?;
    let written: Vec<usize> = over_images(&images, jobs, |path| {
        let img = load_image(path)?;
        let stem = image_stem(path);
        let mut count = 0;
        for spec in &cfg.specs {
            if spec.polarity != Polarity::Fundamental {
                continue;
            }
            let suffix = match &spec.kind {
                LFKind::External { source_suffix, .. } => source_suffix.clone(),
                _ => format!(".lf-{}{GT_SUFFIX}", spec.id),
            };
            if let Some(boxes) = source_boxes(&spec.kind, &img, path)? {
                write_boxes(&out_dir.join(format!("{stem}{suffix}")), &boxes)?;
                count += 1;
            }
        }
        if write_maps {
            let maps = run_labeling(&cfg.specs, &img, path)?;
            for (spec, map) in cfg.specs.iter().zip(&maps) {
                write_map_pgm(&out_dir.join(format!("{stem}.map-{}.pgm", spec.id)), map)?;
            }
        }
        Ok(count)
    })?;
    Ok(format!(
        "wrote {} sidecar files for {} images to {}",
        written.iter().sum::<usize>(),
        images.len(),
        out_dir.display()
    ))
}

/// Builds per-image firing histograms and trains the model, writing it to
/// `model_path`.
pub fn cmd_train(
    cfg: &PipelineConfig,
    images_dir: &Path,
    model_path: &Path,
    jobs: Option<usize>,
) -> Result<String> {
    cfg.validate()?;
    let images = list_images(images_dir)?;
    let hists: Vec<PatternHistogram> = over_images(&images, jobs, |path| {
        let tau = labeled_tau(cfg, path)?;
        Ok(histogram(&tau))
    })?;
    let start = ThetaParams::zeros(LfEntry::from_specs(&cfg.specs))?;
    let trained = train(&hists, &start, &cfg.train)?;
    if let Some(parent) = model_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    save_model(model_path, &trained)?;
    let mut summary = format!(
        "trained {} labeling functions on {} images -> {}\n",
        trained.n(),
        images.len(),
        model_path.display()
    );
    for (j, entry) in trained.entries().iter().enumerate() {
        let _ = writeln!(
            summary,
            "  {:<16} guide {:.2}  learned precision {:.4}",
            entry.id,
            entry.quality,
            lf_precision(j, &trained)
        );
    }
    Ok(summary.trim_end().to_string())
}

fn check_model_registry(cfg: &PipelineConfig, model: &ThetaParams) -> Result<()> {
    let expected = LfEntry::from_specs(&cfg.specs);
    if model.entries().len() != expected.len() {
        return Err(Error::RegistryMismatch(format!(
            "model has {} labeling functions, config declares {}",
            model.entries().len(),
            expected.len()
        )));
    }
    for (got, want) in model.entries().iter().zip(&expected) {
        if got.id != want.id || got.class != want.class {
            return Err(Error::RegistryMismatch(format!(
                "model lists {} ({}), config declares {} ({})",
                got.id,
                got.class.name(),
                want.id,
                want.class.name()
            )));
        }
    }
    Ok(())
}

/// Labels every image with the trained model and writes the recovered
/// word boxes as `<stem>.pred.boxes.txt`.
pub fn cmd_infer(
    cfg: &PipelineConfig,
    images_dir: &Path,
    model_path: &Path,
    out_dir: &Path,
    jobs: Option<usize>,
) -> Result<String> {
    cfg.validate()?;
    let model = load_model(model_path)?;
    check_model_registry(cfg, &model)?;
    ensure_dir(out_dir)?;
    let images = list_images(images_dir)?;
    let gen_cfg = labelgen_config(cfg);
    let box_counts: Vec<usize> = over_images(&images, jobs, |path| {
        let tau = labeled_tau(cfg, path)?;
        let map = crate::aggregator::infer_map(&tau, &model)?;
        let boxes = generate(&map, &gen_cfg)?;
        write_boxes(
            &out_dir.join(format!("{}{PRED_SUFFIX}", image_stem(path))),
            &boxes,
        )?;
        Ok(boxes.len())
    })?;
    Ok(format!(
        "inferred {} boxes over {} images -> {}",
        box_counts.iter().sum::<usize>(),
        images.len(),
        out_dir.display()
    ))
}

/// Labels every image with the majority-vote baseline and writes
/// `<stem>.pred.boxes.txt` files, mirroring [`cmd_infer`].
pub fn cmd_mbv(
    cfg: &PipelineConfig,
    images_dir: &Path,
    out_dir: &Path,
    jobs: Option<usize>,
) -> Result<String> {
    cfg.validate()?;
    ensure_dir(out_dir)?;
    let images = list_images(images_dir)?;
    let gen_cfg = labelgen_config(cfg);
    let box_counts: Vec<usize> = over_images(&images, jobs, |path| {
        let tau = labeled_tau(cfg, path)?;
        let map = majority_vote(&tau);
        let boxes = generate(&map, &gen_cfg)?;
        write_boxes(
            &out_dir.join(format!("{}{PRED_SUFFIX}", image_stem(path))),
            &boxes,
        )?;
        Ok(boxes.len())
    })?;
    Ok(format!(
        "majority vote produced {} boxes over {} images -> {}",
        box_counts.iter().sum::<usize>(),
        images.len(),
        out_dir.display()
    ))
}

fn stems_with_suffix(dir: &Path, suffix: &str) -> Result<Vec<String>> {
    let entries = std::fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut stems = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(suffix) {
            stems.push(stem.to_string());
        }
    }
    stems.sort();
    Ok(stems)
}

/// Ground-truth stems: `<stem>.boxes.txt` files that are neither detector
/// sidecars (`.lf-`) nor predictions (`.pred`).
fn gt_stems(dir: &Path) -> Result<Vec<String>> {
    Ok(stems_with_suffix(dir, GT_SUFFIX)?
        .into_iter()
        .filter(|s| !s.contains(".lf-") && !s.ends_with(".pred"))
        .collect())
}

/// Scores predictions against ground truth at every threshold, writes
/// `report.csv` into `out_dir`, and returns the summary table.
pub fn cmd_eval(
    pred_dir: &Path,
    gt_dir: &Path,
    thresholds: &[f64],
    averaging: Averaging,
    out_dir: &Path,
) -> Result<String> {
    let pred_stems = stems_with_suffix(pred_dir, PRED_SUFFIX)?;
    let truth_stems = gt_stems(gt_dir)?;
    let pred_only: Vec<&String> = pred_stems
        .iter()
        .filter(|s| !truth_stems.contains(s))
        .collect();
    let gt_only: Vec<&String> = truth_stems
        .iter()
        .filter(|s| !pred_stems.contains(s))
        .collect();
    if pred_stems.is_empty() || !pred_only.is_empty() || !gt_only.is_empty() {
        return Err(Error::UnmatchedFiles(format!(
            "predictions without ground truth: {pred_only:?}; \
             ground truth without predictions: {gt_only:?}; \
             matched pairs: {}",
            pred_stems.len() - pred_only.len()
        )));
    }

    let mut pairs = Vec::with_capacity(pred_stems.len());
    for stem in &pred_stems {
        let pred = read_boxes(&pred_dir.join(format!("{stem}{PRED_SUFFIX}")))?;
        let gt = read_boxes(&gt_dir.join(format!("{stem}{GT_SUFFIX}")))?;
        pairs.push((stem.clone(), pred, gt));
    }

    let evals = sweep(&pairs, thresholds, averaging)?;
    ensure_dir(out_dir)?;
    atomic_write(
        &out_dir.join("report.csv"),
        render_report_csv(&evals).as_bytes(),
    )?;
    Ok(render_eval_table(&evals))
}

fn render_report_csv(evals: &[CorpusEval]) -> String {
    let mut out = String::from("threshold,image,tp,pred,gt,precision,recall,f1\n");
    for eval in evals {
        let mut total = crate::evalkit::DetectionCounts::zero();
        for img in &eval.images {
            let c = &img.counts;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.6},{:.6}",
                eval.threshold,
                img.name,
                c.tp,
                c.pred,
                c.gt,
                c.precision(),
                c.recall(),
                c.f1()
            );
            total.absorb(c);
        }
        let _ = writeln!(
            out,
            "{},ALL,{},{},{},{:.6},{:.6},{:.6}",
            eval.threshold,
            total.tp,
            total.pred,
            total.gt,
            eval.precision(),
            eval.recall(),
            eval.f1()
        );
    }
    out
}

fn render_eval_table(evals: &[CorpusEval]) -> String {
    let mut out = String::from("threshold  precision  recall     f1\n");
    for eval in evals {
        let _ = writeln!(
            out,
            "{:<9.2}  {:<9.4}  {:<9.4}  {:.4}",
            eval.threshold,
            eval.precision(),
            eval.recall(),
            eval.f1()
        );
    }
    out.trim_end().to_string()
}

/// Computes per-function coverage/overlap/conflict statistics for every
/// image, writes `lf_stats.csv` into `out_dir`, and returns the corpus
/// aggregate table.
pub fn cmd_diagnose(
    cfg: &PipelineConfig,
    images_dir: &Path,
    out_dir: &Path,
    jobs: Option<usize>,
) -> Result<String> {
    cfg.validate()?;
    ensure_dir(out_dir)?;
    let images = list_images(images_dir)?;
    let per_image: Vec<(String, Vec<LfStats>)> = over_images(&images, jobs, |path| {
        let tau = labeled_tau(cfg, path)?;
        Ok((image_stem(path), lf_stats(&tau)))
    })?;

    let mut totals: Vec<LfStats> = per_image[0]
        .1
        .iter()
        .map(|s| LfStats {
            lf_id: s.lf_id.clone(),
            pixels: 0,
            covered: 0,
            overlapped: 0,
            conflicted: 0,
        })
        .collect();
    let denom = cfg.conflict_denominator;
    let mut csv = String::from(
        "image,lf_id,pixels,covered,overlapped,conflicted,coverage,overlap,conflict\n",
    );
    let mut write_row = |image: &str, s: &LfStats| {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{:.6},{:.6},{:.6}",
            image,
            s.lf_id,
            s.pixels,
            s.covered,
            s.overlapped,
            s.conflicted,
            s.coverage(),
            s.overlap(),
            s.conflict(denom)
        );
    };
    for (image, stats) in &per_image {
        for (total, s) in totals.iter_mut().zip(stats) {
            total.absorb(s);
        }
        for s in stats {
            write_row(image, s);
        }
    }
    for s in &totals {
        write_row("ALL", s);
    }
    drop(write_row);
    atomic_write(&out_dir.join("lf_stats.csv"), csv.as_bytes())?;

    let mut table = format!(
        "{} images, {} labeling functions\n{:<16} {:>9} {:>9} {:>9}\n",
        per_image.len(),
        totals.len(),
        "lf_id",
        "coverage",
        "overlap",
        "conflict"
    );
    for s in &totals {
        let _ = writeln!(
            table,
            "{:<16} {:>9.4} {:>9.4} {:>9.4}",
            s.lf_id,
            s.coverage(),
            s.overlap(),
            s.conflict(denom)
        );
    }
    Ok(table.trim_end().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalkit::ConflictDenominator;
    use tempfile::tempdir;

    fn synth_config(pages: u64) -> PipelineConfig {
        let text = format!(
            "[synth]\npages = {pages}\nseed = 42\n\
             [pseudo_lf.alpha]\ndrop_rate = 0.15\njitter = 2\nspurious_rate = 2\nseed = 100\n\
             [pseudo_lf.beta]\ndrop_rate = 0.05\nseed = 200\n"
        );
        PipelineConfig::parse(&text, Path::new("synth.cfg")).unwrap()
    }

    /// A config whose labeling functions are the two pseudo detectors the
    /// synth config writes, each with a complement.
    fn external_pair_config() -> PipelineConfig {
        let text = "\
[lf.alpha]
kind = external
quality = 0.85
complement_quality = 0.95

[lf.beta]
kind = external
quality = 0.9
complement_quality = 0.95
";
        PipelineConfig::parse(text, Path::new("lfs.cfg")).unwrap()
    }

    #[test]
    fn synth_writes_pages_truth_and_sidecars() {
        let dir = tempdir().unwrap();
        let cfg = synth_config(3);
        let summary = cmd_synth(&cfg, dir.path()).unwrap();
        assert!(summary.contains("3 pages"));
        for i in 0..3 {
            assert!(dir.path().join(format!("page{i:03}.pgm")).exists());
            assert!(dir.path().join(format!("page{i:03}.boxes.txt")).exists());
            assert!(dir.path().join(format!("page{i:03}.lf-alpha.boxes.txt")).exists());
            assert!(dir.path().join(format!("page{i:03}.lf-beta.boxes.txt")).exists());
        }
    }

    #[test]
    fn full_pipeline_runs_and_reruns_identically() {
        let dir = tempdir().unwrap();
        let corpus = dir.path().join("corpus");
        let out = dir.path().join("out");
        let synth_cfg = synth_config(4);
        cmd_synth(&synth_cfg, &corpus).unwrap();

        let cfg = external_pair_config();
        let model_path = out.join("model.txt");
        cmd_train(&cfg, &corpus, &model_path, Some(2)).unwrap();
        let model_bytes = std::fs::read(&model_path).unwrap();

        let pred = out.join("pred");
        cmd_infer(&cfg, &corpus, &model_path, &pred, Some(2)).unwrap();
        let a_pred = std::fs::read(pred.join("page000.pred.boxes.txt")).unwrap();

        let table = cmd_eval(
            &pred,
            &corpus,
            &[0.3, 0.5],
            Averaging::Micro,
            &out.join("eval"),
        )
        .unwrap();
        assert!(table.contains("0.5"));
        let report = std::fs::read(out.join("eval/report.csv")).unwrap();

        cmd_train(&cfg, &corpus, &model_path, None).unwrap();
        assert_eq!(std::fs::read(&model_path).unwrap(), model_bytes);
        cmd_infer(&cfg, &corpus, &model_path, &pred, None).unwrap();
        assert_eq!(
            std::fs::read(pred.join("page000.pred.boxes.txt")).unwrap(),
            a_pred
        );
        cmd_eval(&pred, &corpus, &[0.3, 0.5], Averaging::Micro, &out.join("eval")).unwrap();
        assert_eq!(std::fs::read(out.join("eval/report.csv")).unwrap(), report);
    }

    #[test]
    fn mbv_writes_prediction_sidecars() {
        let dir = tempdir().unwrap();
        let corpus = dir.path().join("corpus");
        cmd_synth(&synth_config(2), &corpus).unwrap();
        let out = dir.path().join("mbv");
        cmd_mbv(&external_pair_config(), &corpus, &out, None).unwrap();
        assert!(out.join("page000.pred.boxes.txt").exists());
        assert!(out.join("page001.pred.boxes.txt").exists());
    }

    #[test]
    fn diagnose_writes_per_image_and_aggregate_rows() {
        let dir = tempdir().unwrap();
        let corpus = dir.path().join("corpus");
        cmd_synth(&synth_config(2), &corpus).unwrap();
        let out = dir.path().join("diag");
        let table = cmd_diagnose(&external_pair_config(), &corpus, &out, None).unwrap();
        assert!(table.contains("alpha-comp"));
        let csv = std::fs::read_to_string(out.join("lf_stats.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        // Header + 2 images x 4 functions + 4 aggregate rows.
        assert_eq!(lines.len(), 1 + 8 + 4);
        assert!(lines[1].starts_with("page000,alpha,"));
        assert!(lines.last().unwrap().starts_with("ALL,beta-comp,"));
    }

    #[test]
    fn lf_run_writes_only_fundamental_sidecars() {
        let dir = tempdir().unwrap();
        let corpus = dir.path().join("corpus");
        cmd_synth(&synth_config(2), &corpus).unwrap();
        let out = dir.path().join("lfout");
        cmd_lf_run(&external_pair_config(), &corpus, &out, false, None).unwrap();
        assert!(out.join("page000.lf-alpha.boxes.txt").exists());
        assert!(out.join("page000.lf-beta.boxes.txt").exists());
        assert!(!out.join("page000.lf-alpha-comp.boxes.txt").exists());
        let names: Vec<String> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names.len(), 4, "{names:?}");
    }

    #[test]
    fn lf_run_write_maps_dumps_all_polarities() {
        let dir = tempdir().unwrap();
        let corpus = dir.path().join("corpus");
        cmd_synth(&synth_config(1), &corpus).unwrap();
        let out = dir.path().join("lfout");
        cmd_lf_run(&external_pair_config(), &corpus, &out, true, None).unwrap();
        for id in ["alpha", "alpha-comp", "beta", "beta-comp"] {
            assert!(out.join(format!("page000.map-{id}.pgm")).exists(), "{id}");
        }
    }

    #[test]
    fn infer_rejects_a_model_from_another_registry() {
        let dir = tempdir().unwrap();
        let corpus = dir.path().join("corpus");
        cmd_synth(&synth_config(2), &corpus).unwrap();
        let cfg = external_pair_config();
        let model_path = dir.path().join("model.txt");
        cmd_train(&cfg, &corpus, &model_path, None).unwrap();

        let other = PipelineConfig::parse(
            "[lf.alpha]\nkind = external\nquality = 0.85\n",
            Path::new("other.cfg"),
        )
        .unwrap();
        let err = cmd_infer(&other, &corpus, &model_path, &dir.path().join("p"), None).unwrap_err();
        assert!(matches!(err, Error::RegistryMismatch(_)), "{err:?}");
    }

    #[test]
    fn eval_rejects_orphans_on_either_side() {
        let dir = tempdir().unwrap();
        let pred = dir.path().join("pred");
        let gt = dir.path().join("gt");
        std::fs::create_dir_all(&pred).unwrap();
        std::fs::create_dir_all(&gt).unwrap();
        std::fs::write(pred.join("a.pred.boxes.txt"), "1 2 3 4\n").unwrap();
        std::fs::write(gt.join("b.boxes.txt"), "1 2 3 4\n").unwrap();
        let err = cmd_eval(&pred, &gt, &[0.5], Averaging::Micro, &dir.path().join("o"))
            .unwrap_err();
        match err {
            Error::UnmatchedFiles(msg) => {
                assert!(msg.contains("\"a\""), "{msg}");
                assert!(msg.contains("\"b\""), "{msg}");
            }
            other => panic!("expected unmatched files, got {other:?}"),
        }
    }

    #[test]
    fn eval_ignores_sidecar_files_when_pairing() {
        let dir = tempdir().unwrap();
        let corpus = dir.path().join("corpus");
        cmd_synth(&synth_config(2), &corpus).unwrap();
        // Predict straight into the corpus directory; the .lf-* sidecars
        // there must not be mistaken for ground truth.
        cmd_mbv(&external_pair_config(), &corpus, &corpus, None).unwrap();
        let table = cmd_eval(
            &corpus,
            &corpus,
            &[0.5],
            Averaging::Micro,
            &dir.path().join("o"),
        )
        .unwrap();
        assert!(table.contains("0.5"));
    }

    #[test]
    fn conflict_denominator_config_changes_the_report() {
        let dir = tempdir().unwrap();
        let corpus = dir.path().join("corpus");
        cmd_synth(&synth_config(1), &corpus).unwrap();
        let mut cfg = external_pair_config();
        let a = cmd_diagnose(&cfg, &corpus, &dir.path().join("d1"), None).unwrap();
        cfg.conflict_denominator = ConflictDenominator::Overlapped;
        let b = cmd_diagnose(&cfg, &corpus, &dir.path().join("d2"), None).unwrap();
        assert_ne!(a, b);
    }
}
