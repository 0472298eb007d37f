//! Gradient-ascent training over a sequence of per-image histograms.
//!
//! Images are visited in order; the parameters carry over from one image
//! to the next. The per-image step objective is the image's log-likelihood
//! scaled by its pixel count, plus the weighted quality-guide term, so the
//! step size is independent of image size and corpus length.

use super::{
    gradient_loglik, gradient_regularizer, loglik, regularizer, ThetaInit, ThetaParams,
    TrainConfig,
};
use crate::error::{Error, Result};
use crate::labeling::PatternHistogram;

fn init_params(params: &ThetaParams, init: ThetaInit) -> Result<ThetaParams> {
    match init {
        ThetaInit::Zeros => ThetaParams::zeros(params.entries().to_vec()),
        ThetaInit::Constant(v) => {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "constant parameter init must be finite, got {v}"
                )));
            }
            ThetaParams::constant(params.entries().to_vec(), v)
        }
    }
}

/// Per-image objective the trainer climbs: pixel-averaged log-likelihood
/// plus the weighted quality-guide term.
pub(crate) fn step_objective(
    hist: &PatternHistogram,
    params: &ThetaParams,
    guides: &[f64],
    reg_weight: f64,
) -> Result<f64> {
    let m = hist.total().max(1) as f64;
    Ok(loglik(hist, params)? / m + reg_weight * regularizer(params, guides)?)
}

fn step_gradient(
    hist: &PatternHistogram,
    params: &ThetaParams,
    guides: &[f64],
    reg_weight: f64,
) -> Result<Vec<[f64; 2]>> {
    let m = hist.total().max(1) as f64;
    let ll = gradient_loglik(hist, params)?;
    let reg = gradient_regularizer(params, guides)?;
    Ok(ll
        .into_iter()
        .zip(reg)
        .map(|(a, b)| [a[0] / m + reg_weight * b[0], a[1] / m + reg_weight * b[1]])
        .collect())
}

/// Trains the model on one histogram per image and returns the final
/// parameters. `start` supplies the registry (ids, classes, quality
/// guides); its parameter values are replaced according to `cfg.init`.
pub fn train(
    hists: &[PatternHistogram],
    start: &ThetaParams,
    cfg: &TrainConfig,
) -> Result<ThetaParams> {
    Ok(train_traced(hists, start, cfg)?.0)
}

/// Like [`train`], but also returns one objective trace per image. Entry 0
/// of a trace is the step objective before the first update on that image;
/// entry e is the value after e updates.
pub fn train_traced(
    hists: &[PatternHistogram],
    start: &ThetaParams,
    cfg: &TrainConfig,
) -> Result<(ThetaParams, Vec<Vec<f64>>)> {
    cfg.validate()?;
    let guides = start.guides();
    let mut params = init_params(start, cfg.init)?;
    let mut traces = Vec::with_capacity(hists.len());

    for (image_idx, hist) in hists.iter().enumerate() {
        let mut trace = Vec::with_capacity(cfg.epochs_per_image as usize + 1);
        trace.push(value_or_abort(
            step_objective(hist, &params, &guides, cfg.reg_weight)?,
            image_idx,
            &params,
        )?);
        for _ in 0..cfg.epochs_per_image {
            let grad = step_gradient(hist, &params, &guides, cfg.reg_weight)?;
            let mut theta = params.theta().to_vec();
            for (row, g) in theta.iter_mut().zip(&grad) {
                row[0] += cfg.learning_rate * g[0];
                row[1] += cfg.learning_rate * g[1];
            }
            if theta.iter().flatten().any(|v| !v.is_finite()) {
                return Err(diverged(image_idx, &params));
            }
            params = params.with_theta(theta)?;
            trace.push(value_or_abort(
                step_objective(hist, &params, &guides, cfg.reg_weight)?,
                image_idx,
                &params,
            )?);
        }
        traces.push(trace);
    }
    Ok((params, traces))
}

fn value_or_abort(value: f64, image_idx: usize, params: &ThetaParams) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(diverged(image_idx, params))
    }
}

fn diverged(image_idx: usize, params: &ThetaParams) -> Error {
    let snapshot: Vec<String> = params
        .entries()
        .iter()
        .zip(params.theta())
        .map(|(e, t)| format!("{}=[{:.6e}, {:.6e}]", e.id, t[0], t[1]))
        .collect();
    Error::Numerical(format!(
        "training diverged on image {image_idx}; last finite parameters: {}",
        snapshot.join(", ")
    ))
}
