//! The generative aggregation model.
//!
//! Each labeling function j owns two parameters, one per class y. A firing
//! contributes a factor exp(theta[j][y]) to the unnormalized joint weight
//! of (pattern, y); an abstention contributes 1. Marginalizing y and
//! normalizing by the partition function gives a pattern likelihood;
//! maximizing it, plus a quality-guide term that anchors each function's
//! modeled precision to its guide, trains the parameters without any
//! pixel-level ground truth. Inference compares the two per-class scores of
//! a pixel's firing pattern.
//!
//! Everything is computed in log space: per-factor `ln(1 + e^x)` terms and
//! two-way log-sum-exp keep all quantities finite for any finite
//! parameters.

mod persist;
mod train;

pub use persist::{load_model, save_model};
pub use train::{train, train_traced};

use crate::error::{Error, Result};
use crate::imgproc::BinaryMap;
use crate::labeling::{LFClass, LFSpec, PatternHistogram, TauMatrix};

/// Registry row of a trained model: which function the parameters belong
/// to, the class it votes for, and the quality guide it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct LfEntry {
    pub id: String,
    pub class: LFClass,
    pub quality: f64,
}

impl LfEntry {
    pub fn from_specs(specs: &[LFSpec]) -> Vec<LfEntry> {
        specs
            .iter()
            .map(|s| LfEntry {
                id: s.id.clone(),
                class: s.class(),
                quality: s.quality,
            })
            .collect()
    }
}

/// Model parameters: one `[text, nontext]` pair per labeling function,
/// plus the registry describing the functions they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaParams {
    entries: Vec<LfEntry>,
    theta: Vec<[f64; 2]>,
}

impl ThetaParams {
    /// All-zero parameters for a registry.
    pub fn zeros(entries: Vec<LfEntry>) -> Result<Self> {
        let n = entries.len();
        ThetaParams::from_parts(entries, vec![[0.0, 0.0]; n])
    }

    /// Constant-valued parameters for a registry.
    pub fn constant(entries: Vec<LfEntry>, value: f64) -> Result<Self> {
        let n = entries.len();
        ThetaParams::from_parts(entries, vec![[value, value]; n])
    }

    /// Wraps a registry and a parameter matrix, validating both.
    pub fn from_parts(entries: Vec<LfEntry>, theta: Vec<[f64; 2]>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter(
                "model needs at least one labeling function".into(),
            ));
        }
        if entries.len() != theta.len() {
            return Err(Error::InvalidParameter(format!(
                "{} registry entries but {} parameter rows",
                entries.len(),
                theta.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &entries {
            if e.id.is_empty() || !seen.insert(e.id.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "registry ids must be unique and non-empty, offending id {:?}",
                    e.id
                )));
            }
            if !(e.quality > 0.0 && e.quality < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "quality guide for {} must lie in (0, 1), got {}",
                    e.id, e.quality
                )));
            }
        }
        if theta.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "model parameters must be finite".into(),
            ));
        }
        Ok(ThetaParams { entries, theta })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[LfEntry] {
        &self.entries
    }

    pub fn theta(&self) -> &[[f64; 2]] {
        &self.theta
    }

    #[inline]
    pub fn get(&self, j: usize, class: LFClass) -> f64 {
        self.theta[j][class.index()]
    }

    /// Quality guides in registry order.
    pub fn guides(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.quality).collect()
    }

    /// Replaces the parameter matrix, keeping the registry.
    pub fn with_theta(&self, theta: Vec<[f64; 2]>) -> Result<Self> {
        ThetaParams::from_parts(self.entries.clone(), theta)
    }

    /// Checks that a firing matrix was built from the same registry (ids
    /// and classes, in order).
    pub fn check_matches_tau(&self, tau: &TauMatrix) -> Result<()> {
        if tau.n() != self.n() {
            return Err(Error::RegistryMismatch(format!(
                "model has {} labeling functions, matrix has {}",
                self.n(),
                tau.n()
            )));
        }
        for (j, e) in self.entries.iter().enumerate() {
            if tau.lf_ids()[j] != e.id {
                return Err(Error::RegistryMismatch(format!(
                    "position {j}: model lists {:?}, matrix lists {:?}",
                    e.id,
                    tau.lf_ids()[j]
                )));
            }
            if tau.lf_classes()[j] != e.class {
                return Err(Error::RegistryMismatch(format!(
                    "labeling function {:?}: model says {}, matrix says {}",
                    e.id,
                    e.class.name(),
                    tau.lf_classes()[j].name()
                )));
            }
        }
        Ok(())
    }
}

/// Class posterior for one firing pattern. The two fields sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub p_text: f64,
    pub p_nontext: f64,
}

/// Gradient-ascent settings for [`train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs_per_image: u32,
    pub init: ThetaInit,
    /// Scale on the quality-guide term of the per-image objective.
    pub reg_weight: f64,
}

/// How the starting parameters are built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaInit {
    Zeros,
    Constant(f64),
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            epochs_per_image: 50,
            init: ThetaInit::Zeros,
            reg_weight: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if !(self.reg_weight.is_finite() && self.reg_weight >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "regularizer weight must be non-negative and finite, got {}",
                self.reg_weight
            )));
        }
        Ok(())
    }
}

/// `ln(1 + e^x)` without overflow for large `x` or cancellation for very
/// negative `x`.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Numerically stable `log(e^a + e^b)` for finite inputs.
#[inline]
fn logsumexp2(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Logistic function.
#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Factor a single labeling function contributes to the joint weight of
/// `(pattern, y)`: `exp(theta[j][y])` when it fired, 1 when it abstained.
pub fn potential(fired: bool, j: usize, y: LFClass, params: &ThetaParams) -> f64 {
    if fired {
        params.get(j, y).exp()
    } else {
        1.0
    }
}

/// Per-class log score of a pattern: the log of the product of firing
/// potentials, i.e. the sum of `theta[j][y]` over fired functions.
#[inline]
fn class_score(pattern: u64, params: &ThetaParams, y: LFClass) -> f64 {
    let mut acc = 0.0;
    let mut bits = pattern;
    while bits != 0 {
        let j = bits.trailing_zeros() as usize;
        acc += params.get(j, y);
        bits &= bits - 1;
    }
    acc
}

/// Log of the partition function: summing the joint weight over both
/// classes and all 2^n patterns collapses to
/// `log sum_y prod_j (1 + exp(theta[j][y]))`.
pub fn log_partition(params: &ThetaParams) -> f64 {
    let [a, b] = log_partition_per_class(params);
    logsumexp2(a, b)
}

/// `log prod_j (1 + exp(theta[j][y]))` for each class.
fn log_partition_per_class(params: &ThetaParams) -> [f64; 2] {
    let mut acc = [0.0f64; 2];
    for row in params.theta() {
        acc[0] += softplus(row[0]);
        acc[1] += softplus(row[1]);
    }
    acc
}

/// Log of the unnormalized pattern weight marginalized over the class:
/// `log sum_y prod_j potential(tau_j, y)`.
pub fn pattern_loglik(pattern: u64, params: &ThetaParams) -> f64 {
    logsumexp2(
        class_score(pattern, params, LFClass::Text),
        class_score(pattern, params, LFClass::NonText),
    )
}

/// Log-likelihood of all pixels in a histogram:
/// `sum_p count(p) * pattern_loglik(p) - m * log_partition`.
pub fn loglik(hist: &PatternHistogram, params: &ThetaParams) -> Result<f64> {
    check_hist(hist, params)?;
    let logz = log_partition(params);
    let mut acc = 0.0;
    for (pattern, count) in hist.iter() {
        acc += count as f64 * pattern_loglik(pattern, params);
    }
    Ok(acc - hist.total() as f64 * logz)
}

fn check_hist(hist: &PatternHistogram, params: &ThetaParams) -> Result<()> {
    if hist.n() != params.n() {
        return Err(Error::RegistryMismatch(format!(
            "histogram covers {} labeling functions, model has {}",
            hist.n(),
            params.n()
        )));
    }
    Ok(())
}

fn check_guides(guides: &[f64], params: &ThetaParams) -> Result<()> {
    if guides.len() != params.n() {
        return Err(Error::InvalidParameter(format!(
            "{} quality guides for {} labeling functions",
            guides.len(),
            params.n()
        )));
    }
    for (j, &q) in guides.iter().enumerate() {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "quality guide {j} must lie in (0, 1), got {q}"
            )));
        }
    }
    Ok(())
}

/// Modeled precision of labeling function `j`: the probability that the
/// true class matches j's class, conditioned on j firing. In closed form
/// this is the logistic of the difference of the two per-class log masses
/// restricted to patterns where j fired.
pub fn lf_precision(j: usize, params: &ThetaParams) -> f64 {
    let k = params.entries()[j].class;
    let mut a = params.get(j, k);
    let mut b = params.get(j, k.other());
    for j2 in 0..params.n() {
        if j2 != j {
            a += softplus(params.get(j2, k));
            b += softplus(params.get(j2, k.other()));
        }
    }
    sigmoid(a - b)
}

/// Quality-guide term: the negative cross-entropy between each guide `q_j`
/// and the modeled precision `p_j`,
/// `sum_j q_j log p_j + (1 - q_j) log(1 - p_j)`. Maximized exactly where
/// every `p_j` equals its guide.
pub fn regularizer(params: &ThetaParams, guides: &[f64]) -> Result<f64> {
    check_guides(guides, params)?;
    let mut acc = 0.0;
    for (j, &q) in guides.iter().enumerate() {
        let k = params.entries()[j].class;
        let mut a = params.get(j, k);
        let mut b = params.get(j, k.other());
        for j2 in 0..params.n() {
            if j2 != j {
                a += softplus(params.get(j2, k));
                b += softplus(params.get(j2, k.other()));
            }
        }
        // log p = -softplus(b - a), log(1 - p) = -softplus(a - b)
        acc += q * -softplus(b - a) + (1.0 - q) * -softplus(a - b);
    }
    Ok(acc)
}

/// Full data objective: log-likelihood plus the quality-guide term.
pub fn objective(hist: &PatternHistogram, params: &ThetaParams, guides: &[f64]) -> Result<f64> {
    Ok(loglik(hist, params)? + regularizer(params, guides)?)
}

/// Analytic gradient of [`objective`] with respect to every parameter.
/// Entry `[j][y]` holds the partial derivative for `theta[j][y]`.
pub fn gradient(
    hist: &PatternHistogram,
    params: &ThetaParams,
    guides: &[f64],
) -> Result<Vec<[f64; 2]>> {
    let ll = gradient_loglik(hist, params)?;
    let reg = gradient_regularizer(params, guides)?;
    Ok(ll
        .into_iter()
        .zip(reg)
        .map(|(a, b)| [a[0] + b[0], a[1] + b[1]])
        .collect())
}

/// Gradient of [`loglik`]: the expected firing count under the per-pattern
/// class posterior, minus `m` times the firing probability under the
/// model's marginal.
pub(crate) fn gradient_loglik(
    hist: &PatternHistogram,
    params: &ThetaParams,
) -> Result<Vec<[f64; 2]>> {
    check_hist(hist, params)?;
    let n = params.n();
    let mut grad = vec![[0.0f64; 2]; n];

    for (pattern, count) in hist.iter() {
        let s_text = class_score(pattern, params, LFClass::Text);
        let s_non = class_score(pattern, params, LFClass::NonText);
        let norm = logsumexp2(s_text, s_non);
        let post = [(s_text - norm).exp(), (s_non - norm).exp()];
        let c = count as f64;
        let mut bits = pattern;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            grad[j][0] += c * post[0];
            grad[j][1] += c * post[1];
            bits &= bits - 1;
        }
    }

    let per_class = log_partition_per_class(params);
    let logz = logsumexp2(per_class[0], per_class[1]);
    let m = hist.total() as f64;
    for (j, slot) in grad.iter_mut().enumerate() {
        for y in 0..2 {
            let fire_prob = sigmoid(params.theta()[j][y]) * (per_class[y] - logz).exp();
            slot[y] -= m * fire_prob;
        }
    }
    Ok(grad)
}

/// Gradient of [`regularizer`]. For each guided function j the pull is
/// `q_j - p_j`, distributed to every parameter that moves `p_j`: its own
/// row with weight 1 and other rows through their firing probability, with
/// the sign set by whether the parameter's class matches j's class.
pub(crate) fn gradient_regularizer(
    params: &ThetaParams,
    guides: &[f64],
) -> Result<Vec<[f64; 2]>> {
    check_guides(guides, params)?;
    let n = params.n();
    let mut grad = vec![[0.0f64; 2]; n];
    for (j, &q) in guides.iter().enumerate() {
        let k = params.entries()[j].class;
        let pull = q - lf_precision(j, params);
        for j2 in 0..n {
            for (y_idx, class) in [LFClass::Text, LFClass::NonText].into_iter().enumerate() {
                let sign = if class == k { 1.0 } else { -1.0 };
                let weight = if j2 == j {
                    1.0
                } else {
                    sigmoid(params.get(j2, class))
                };
                grad[j2][y_idx] += pull * sign * weight;
            }
        }
    }
    Ok(grad)
}

/// Class posterior for one firing pattern: the logistic of the TEXT /
/// NONTEXT score difference. The two probabilities sum to exactly 1.
pub fn posterior(pattern: u64, params: &ThetaParams) -> Posterior {
    let diff = class_score(pattern, params, LFClass::Text)
        - class_score(pattern, params, LFClass::NonText);
    let p_text = sigmoid(diff);
    Posterior {
        p_text,
        p_nontext: 1.0 - p_text,
    }
}

/// Labels every pixel: 1 where the TEXT posterior strictly exceeds 1/2
/// (score difference strictly positive), 0 otherwise -- so an exact tie,
/// including the all-abstain pattern, stays background. The posterior of a
/// pattern is computed once and broadcast to all pixels sharing it.
pub fn infer_map(tau: &TauMatrix, params: &ThetaParams) -> Result<BinaryMap> {
    params.check_matches_tau(tau)?;
    let mut cache: std::collections::BTreeMap<u64, u8> = std::collections::BTreeMap::new();
    let mut bits = Vec::with_capacity(tau.len());
    for &pattern in tau.firings() {
        let bit = *cache.entry(pattern).or_insert_with(|| {
            let diff = class_score(pattern, params, LFClass::Text)
                - class_score(pattern, params, LFClass::NonText);
            u8::from(diff > 0.0)
        });
        bits.push(bit);
    }
    BinaryMap::new(tau.width(), tau.height(), bits)
}
