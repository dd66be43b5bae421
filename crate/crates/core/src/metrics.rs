//! Relative accuracy measures on paired prediction/actual data.
//!
//! Every measure is returned as a dimensionless fraction. Percent formatting
//! is left to the caller.

use crate::error::{Error, Result};

/// Parallel lists of strictly positive actuals and predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedObservations {
    actuals: Vec<f64>,
    predictions: Vec<f64>,
}

impl PairedObservations {
    pub fn new(actuals: Vec<f64>, predictions: Vec<f64>) -> Result<Self> {
        if actuals.len() != predictions.len() {
            return Err(Error::domain(format!(
                "{} actuals but {} predictions",
                actuals.len(),
                predictions.len()
            )));
        }
        if actuals.is_empty() {
            return Err(Error::domain("at least one observation is required"));
        }
        check_positive("actual", &actuals)?;
        check_positive("prediction", &predictions)?;
        Ok(Self {
            actuals,
            predictions,
        })
    }

    pub fn actuals(&self) -> &[f64] {
        &self.actuals
    }

    pub fn predictions(&self) -> &[f64] {
        &self.predictions
    }

    pub fn len(&self) -> usize {
        self.actuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actuals.is_empty()
    }

    /// Swaps the roles of actuals and predictions.
    pub fn swapped(&self) -> Self {
        Self {
            actuals: self.predictions.clone(),
            predictions: self.actuals.clone(),
        }
    }

    fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.actuals
            .iter()
            .copied()
            .zip(self.predictions.iter().copied())
    }
}

fn check_positive(what: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        Some(i) => Err(Error::domain(format!(
            "{what} #{} is {}; values must be finite and strictly positive",
            i + 1,
            values[i]
        ))),
        None => Ok(()),
    }
}

fn check_pair(prediction: f64, actual: f64) -> Result<()> {
    if !(prediction.is_finite() && prediction > 0.0) {
        return Err(Error::domain(format!(
            "prediction must be finite and > 0, got {prediction}"
        )));
    }
    if !(actual.is_finite() && actual > 0.0) {
        return Err(Error::domain(format!(
            "actual must be finite and > 0, got {actual}"
        )));
    }
    Ok(())
}

/// Accuracy ratio `Q = prediction / actual`.
pub fn accuracy_ratio(prediction: f64, actual: f64) -> Result<f64> {
    check_pair(prediction, actual)?;
    Ok(prediction / actual)
}

/// Log accuracy ratio `ln(prediction / actual)`.
///
/// Computed as a difference of logs, so swapping the arguments flips the
/// sign bit-exactly.
pub fn log_accuracy_ratio(prediction: f64, actual: f64) -> Result<f64> {
    check_pair(prediction, actual)?;
    Ok(ln_q(prediction, actual))
}

#[inline]
pub(crate) fn ln_q(prediction: f64, actual: f64) -> f64 {
    prediction.ln() - actual.ln()
}

/// Mean absolute percentage error, `mean |(y - ŷ) / y|`.
pub fn mape(obs: &PairedObservations) -> f64 {
    mape_slices(&obs.actuals, &obs.predictions)
}

/// Mean of `|(y - ŷ) / ŷ|`: the error relative to the prediction.
pub fn mer(obs: &PairedObservations) -> f64 {
    let n = obs.len() as f64;
    obs.pairs().map(|(y, p)| ((y - p) / p).abs()).sum::<f64>() / n
}

/// Symmetric MAPE, dividing by the arithmetic mean of actual and prediction.
/// Lies in `[0, 2)`.
pub fn smape(obs: &PairedObservations) -> f64 {
    smape_slices(&obs.actuals, &obs.predictions)
}

/// Sum of squared log accuracy ratios.
pub fn sum_sq_ln_q(obs: &PairedObservations) -> f64 {
    sum_sq_ln_q_slices(&obs.actuals, &obs.predictions)
}

/// Mean log accuracy ratio.
pub fn mean_ln_q(obs: &PairedObservations) -> f64 {
    obs.pairs().map(|(y, p)| ln_q(p, y)).sum::<f64>() / obs.len() as f64
}

/// Logarithmic standard deviation, `sqrt(Σ(s²/2 - lnQ_i)² / (n-1))`, where
/// `s²` is the sample variance of the `lnQ_i`. Needs at least two points.
pub fn lsd(obs: &PairedObservations) -> Result<f64> {
    if obs.len() < 2 {
        return Err(Error::domain("LSD needs at least two observations"));
    }
    Ok(lsd_slices(&obs.actuals, &obs.predictions))
}

/// Product of the accuracy ratios, evaluated as `exp(Σ lnQ_i)`.
pub fn q_product(obs: &PairedObservations) -> f64 {
    obs.pairs().map(|(y, p)| ln_q(p, y)).sum::<f64>().exp()
}

pub(crate) fn mape_slices(actuals: &[f64], predictions: &[f64]) -> f64 {
    let sum: f64 = actuals
        .iter()
        .zip(predictions)
        .map(|(y, p)| ((y - p) / y).abs())
        .sum();
    sum / actuals.len() as f64
}

pub(crate) fn smape_slices(actuals: &[f64], predictions: &[f64]) -> f64 {
    let sum: f64 = actuals
        .iter()
        .zip(predictions)
        .map(|(y, p)| (y - p).abs() / (0.5 * (y + p)))
        .sum();
    sum / actuals.len() as f64
}

pub(crate) fn sum_sq_ln_q_slices(actuals: &[f64], predictions: &[f64]) -> f64 {
    actuals
        .iter()
        .zip(predictions)
        .map(|(y, p)| ln_q(*p, *y).powi(2))
        .sum()
}

pub(crate) fn lsd_slices(actuals: &[f64], predictions: &[f64]) -> f64 {
    let n = actuals.len();
    debug_assert!(n >= 2);
    let lq: Vec<f64> = actuals
        .iter()
        .zip(predictions)
        .map(|(y, p)| ln_q(*p, *y))
        .collect();
    let dof = (n - 1) as f64;
    let mean = lq.iter().sum::<f64>() / n as f64;
    let s2 = lq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / dof;
    let half = 0.5 * s2;
    (lq.iter().map(|v| (half - v).powi(2)).sum::<f64>() / dof).sqrt()
}

/// Seven measures of relative change between an observed value `f` and a
/// compared value `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TornqvistMeasures {
    /// `(f - g) / f`
    pub rel_error: f64,
    /// `(f - g) / g`
    pub mer_form: f64,
    /// `(f - g) / ((f + g) / 2)`
    pub smape_form: f64,
    /// `ln(g / f)`
    pub log_change: f64,
    /// `(f - g) / sqrt(f g)`
    pub geometric_form: f64,
    /// `(f - g) / min(f, g)`
    pub balanced: f64,
    /// `(f - g) / max(f, g)`
    pub inverted_balanced: f64,
}

impl TornqvistMeasures {
    pub const LABELS: [&'static str; 7] = [
        "rel_error",
        "mer_form",
        "smape_form",
        "log_change",
        "geometric_form",
        "balanced",
        "inverted_balanced",
    ];

    /// The measures paired with their stable labels, in `LABELS` order.
    pub fn labelled(&self) -> [(&'static str, f64); 7] {
        let v = [
            self.rel_error,
            self.mer_form,
            self.smape_form,
            self.log_change,
            self.geometric_form,
            self.balanced,
            self.inverted_balanced,
        ];
        std::array::from_fn(|i| (Self::LABELS[i], v[i]))
    }
}

pub fn tornqvist_measures(f: f64, g: f64) -> Result<TornqvistMeasures> {
    check_pair(g, f)?;
    let d = f - g;
    Ok(TornqvistMeasures {
        rel_error: d / f,
        mer_form: d / g,
        smape_form: d / (0.5 * (f + g)),
        log_change: g.ln() - f.ln(),
        geometric_form: d / (f * g).sqrt(),
        balanced: d / f.min(g),
        inverted_balanced: d / f.max(g),
    })
}

/// All aggregate measures for one set of paired observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub mape: f64,
    pub smape: f64,
    pub mer: f64,
    pub sum_sq_ln_q: f64,
    pub mean_ln_q: f64,
    /// Absent when there is a single observation.
    pub lsd: Option<f64>,
    pub q_product: f64,
}

pub fn evaluate_all(obs: &PairedObservations) -> MetricReport {
    MetricReport {
        mape: mape(obs),
        smape: smape(obs),
        mer: mer(obs),
        sum_sq_ln_q: sum_sq_ln_q(obs),
        mean_ln_q: mean_ln_q(obs),
        lsd: lsd(obs).ok(),
        q_product: q_product(obs),
    }
}
