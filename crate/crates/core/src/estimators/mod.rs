//! Fitting constant, linear and power models under MAPE, least squares on
//! the log accuracy ratio, OLS and LAD, plus residual diagnostics.
//!
//! Objectives are reported as sums over observations:
//!
//! | criterion         | objective                 |
//! |-------------------|---------------------------|
//! | `MinMape`         | `Σ |y_i - ŷ_i| / y_i`     |
//! | `LeastSquaresLnQ` | `Σ (ln ŷ_i - ln y_i)²`    |
//! | `Ols`             | `Σ (y_i - ŷ_i)²`          |
//! | `Lad`             | `Σ |y_i - ŷ_i|`           |
//!
//! so the MAPE objective is `n` times [`crate::metrics::mape`].

mod l1;
mod search;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::ln_q;

pub use l1::weighted_median;

/// Iteration cap shared by every iterative fit.
pub const MAX_ITERATIONS: usize = 10_000;

const GRID_POINTS: usize = 400;
const POWER_STARTS: [f64; 5] = [0.0, -1.0, 1.0, -2.0, 2.0];

/// Regression input: predictor values and strictly positive responses.
#[derive(Debug, Clone, PartialEq)]
pub struct XYDataset {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl XYDataset {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::domain(format!(
                "{} x values but {} y values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::domain("a dataset needs at least two observations"));
        }
        if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!("x #{} is not finite", i + 1)));
        }
        if let Some(i) = ys.iter().position(|y| !(y.is_finite() && *y > 0.0)) {
            return Err(Error::domain(format!(
                "y #{} is {}; responses must be finite and strictly positive",
                i + 1,
                ys[i]
            )));
        }
        Ok(Self { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelForm {
    Constant {
        c: f64,
    },
    Linear {
        intercept: f64,
        slope: f64,
    },
    /// `multiplier * x^exponent`
    Power {
        multiplier: f64,
        exponent: f64,
    },
}

impl ModelForm {
    pub fn predict(&self, x: f64) -> Result<f64> {
        if let ModelForm::Power { .. } = self {
            if !(x > 0.0) {
                return Err(Error::domain(format!("power model needs x > 0, got {x}")));
            }
        }
        Ok(self.eval(x))
    }

    #[inline]
    pub(crate) fn eval(&self, x: f64) -> f64 {
        match *self {
            ModelForm::Constant { c } => c,
            ModelForm::Linear { intercept, slope } => intercept + slope * x,
            ModelForm::Power {
                multiplier,
                exponent,
            } => multiplier * x.powf(exponent),
        }
    }

    pub fn family(&self) -> ModelFamily {
        match self {
            ModelForm::Constant { .. } => ModelFamily::Constant,
            ModelForm::Linear { .. } => ModelFamily::Linear,
            ModelForm::Power { .. } => ModelFamily::Power,
        }
    }

    /// Coefficients in declaration order.
    pub fn params(&self) -> Vec<f64> {
        match *self {
            ModelForm::Constant { c } => vec![c],
            ModelForm::Linear { intercept, slope } => vec![intercept, slope],
            ModelForm::Power {
                multiplier,
                exponent,
            } => vec![multiplier, exponent],
        }
    }
}

impl fmt::Display for ModelForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModelForm::Constant { c } => write!(f, "y = {c}"),
            ModelForm::Linear { intercept, slope } => write!(f, "y = {intercept} + {slope} x"),
            ModelForm::Power {
                multiplier,
                exponent,
            } => write!(f, "y = {multiplier} x^{exponent}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelFamily {
    Constant,
    Linear,
    Power,
}

impl FromStr for ModelFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "constant" => Ok(Self::Constant),
            "linear" => Ok(Self::Linear),
            "power" => Ok(Self::Power),
            other => Err(format!(
                "unknown model `{other}` (expected constant, linear or power)"
            )),
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Constant => "constant",
            Self::Linear => "linear",
            Self::Power => "power",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitCriterion {
    MinMape,
    LeastSquaresLnQ,
    Ols,
    Lad,
}

impl FitCriterion {
    pub const ALL: [FitCriterion; 4] = [Self::MinMape, Self::LeastSquaresLnQ, Self::Ols, Self::Lad];

    /// The criterion's objective (see the module table) for the given
    /// predictions. Non-positive predictions make the log objective infinite.
    pub fn objective(&self, actuals: &[f64], predictions: &[f64]) -> f64 {
        let pairs = actuals.iter().zip(predictions);
        match self {
            Self::MinMape => pairs.map(|(y, p)| (y - p).abs() / y).sum(),
            Self::LeastSquaresLnQ => pairs
                .map(|(y, p)| {
                    if *p > 0.0 {
                        ln_q(*p, *y).powi(2)
                    } else {
                        f64::INFINITY
                    }
                })
                .sum(),
            Self::Ols => pairs.map(|(y, p)| (y - p).powi(2)).sum(),
            Self::Lad => pairs.map(|(y, p)| (y - p).abs()).sum(),
        }
    }
}

impl FromStr for FitCriterion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "mape" => Ok(Self::MinMape),
            "lnq" => Ok(Self::LeastSquaresLnQ),
            "ols" => Ok(Self::Ols),
            "lad" => Ok(Self::Lad),
            other => Err(format!(
                "unknown criterion `{other}` (expected mape, lnq, ols or lad)"
            )),
        }
    }
}

impl fmt::Display for FitCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MinMape => "mape",
            Self::LeastSquaresLnQ => "lnq",
            Self::Ols => "ols",
            Self::Lad => "lad",
        })
    }
}

/// Per-point log accuracy ratios of a model on a dataset and their summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub ln_q_residuals: Vec<f64>,
    /// `exp(Σ ln_q_residuals)`
    pub q_product: f64,
    /// Points with `ŷ_i > y_i`.
    pub n_over: usize,
    /// Points with `ŷ_i < y_i`.
    pub n_under: usize,
}

impl Diagnostics {
    pub fn sum_ln_q(&self) -> f64 {
        self.ln_q_residuals.iter().sum()
    }

    fn from_predictions(actuals: &[f64], predictions: &[f64]) -> Result<Self> {
        if let Some(i) = predictions.iter().position(|p| !(*p > 0.0)) {
            return Err(Error::domain(format!(
                "prediction at observation #{} is {}; accuracy ratios need positive predictions",
                i + 1,
                predictions[i]
            )));
        }
        let ln_q_residuals: Vec<f64> = actuals
            .iter()
            .zip(predictions)
            .map(|(y, p)| ln_q(*p, *y))
            .collect();
        let q_product = ln_q_residuals.iter().sum::<f64>().exp();
        let n_over = actuals
            .iter()
            .zip(predictions)
            .filter(|(y, p)| p > y)
            .count();
        let n_under = actuals
            .iter()
            .zip(predictions)
            .filter(|(y, p)| p < y)
            .count();
        Ok(Self {
            ln_q_residuals,
            q_product,
            n_over,
            n_under,
        })
    }
}

pub fn diagnostics(model: &ModelForm, data: &XYDataset) -> Result<Diagnostics> {
    let predictions = data
        .xs()
        .iter()
        .map(|x| model.predict(*x))
        .collect::<Result<Vec<_>>>()?;
    Diagnostics::from_predictions(data.ys(), &predictions)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: ModelForm,
    pub criterion: FitCriterion,
    /// Criterion objective at the returned parameters.
    pub objective: f64,
    pub diagnostics: Diagnostics,
    pub converged: bool,
    pub iterations: usize,
}

fn finish(
    model: ModelForm,
    criterion: FitCriterion,
    xs: &[f64],
    ys: &[f64],
    iterations: usize,
    converged: bool,
) -> Result<FitResult> {
    let predictions: Vec<f64> = xs.iter().map(|x| model.eval(*x)).collect();
    if let Some(i) = predictions.iter().position(|p| !(*p > 0.0)) {
        return Err(Error::Infeasible(format!(
            "{criterion} optimum {model} predicts {} at x = {}; no positive line attains the minimum",
            predictions[i], xs[i]
        )));
    }
    let objective = criterion.objective(ys, &predictions);
    let diagnostics = Diagnostics::from_predictions(ys, &predictions)?;
    Ok(FitResult {
        model,
        criterion,
        objective,
        diagnostics,
        converged,
        iterations,
    })
}

/// Fits the given family; constants ignore `x`.
pub fn fit(data: &XYDataset, family: ModelFamily, criterion: FitCriterion) -> Result<FitResult> {
    match family {
        ModelFamily::Constant => fit_constant(data.ys(), criterion),
        ModelFamily::Linear => fit_linear(data, criterion),
        ModelFamily::Power => fit_power(data, criterion),
    }
}

/// Best single value for `ys`: the geometric mean under the log criterion,
/// the arithmetic mean under OLS, the median under LAD and the `1/y`
/// weighted median under MAPE. Medians break even splits toward the lower
/// value.
pub fn fit_constant(ys: &[f64], criterion: FitCriterion) -> Result<FitResult> {
    if ys.is_empty() {
        return Err(Error::domain("cannot fit a constant to no observations"));
    }
    if let Some(i) = ys.iter().position(|y| !(y.is_finite() && *y > 0.0)) {
        return Err(Error::domain(format!(
            "y #{} is {}; responses must be finite and strictly positive",
            i + 1,
            ys[i]
        )));
    }
    let n = ys.len() as f64;
    let c = match criterion {
        FitCriterion::LeastSquaresLnQ => (ys.iter().map(|y| y.ln()).sum::<f64>() / n).exp(),
        FitCriterion::Ols => ys.iter().sum::<f64>() / n,
        FitCriterion::Lad => weighted_median(ys, &vec![1.0; ys.len()]).expect("non-empty"),
        FitCriterion::MinMape => {
            let w: Vec<f64> = ys.iter().map(|y| 1.0 / y).collect();
            weighted_median(ys, &w).expect("non-empty")
        }
    };
    let xs = vec![0.0; ys.len()];
    finish(ModelForm::Constant { c }, criterion, &xs, ys, 1, true)
}

fn ols_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::RankDeficient);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

pub fn fit_linear(data: &XYDataset, criterion: FitCriterion) -> Result<FitResult> {
    let (xs, ys) = (data.xs(), data.ys());
    match criterion {
        FitCriterion::Ols => {
            let (intercept, slope) = ols_line(xs, ys)?;
            finish(
                ModelForm::Linear { intercept, slope },
                criterion,
                xs,
                ys,
                1,
                true,
            )
        }
        FitCriterion::Lad | FitCriterion::MinMape => {
            let w: Vec<f64> = match criterion {
                FitCriterion::Lad => vec![1.0; ys.len()],
                _ => ys.iter().map(|y| 1.0 / y).collect(),
            };
            let line = l1::weighted_l1_line(xs, ys, &w, MAX_ITERATIONS)?;
            let model = ModelForm::Linear {
                intercept: line.intercept,
                slope: line.slope,
            };
            finish(model, criterion, xs, ys, line.iterations, line.converged)
        }
        FitCriterion::LeastSquaresLnQ => fit_linear_lnq(xs, ys),
    }
}

/// Least squares on `ln ŷ - ln y` for a straight line.
///
/// Any line that is positive on the data is positive at the mean `x̄`, so it
/// can be written `m (1 + c (x - x̄))` with `m > 0` and `c` confined to an
/// open interval. For fixed `c` the optimal `ln m` is the mean of
/// `ln y_i - ln(1 + c d_i)`, which leaves a one-dimensional search over `c`.
/// That search scans a grid over the whole feasible interval, then polishes
/// every grid-local minimum plus the OLS and log-log starts with safeguarded
/// Newton steps.
fn fit_linear_lnq(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let d: Vec<f64> = xs.iter().map(|x| x - mean_x).collect();
    let d_max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let d_min = d.iter().copied().fold(f64::INFINITY, f64::min);
    if !(d_max > 0.0 && d_min < 0.0) {
        return Err(Error::RankDeficient);
    }
    let (c_lo, c_hi) = (-1.0 / d_max, -1.0 / d_min);
    let ln_y: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let profile = LnqLineProfile { d: &d, ln_y: &ln_y };

    let width = c_hi - c_lo;
    let edge = 1e-12 * width;
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|k| c_lo + width * (k + 1) as f64 / (GRID_POINTS + 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|c| profile.eval(*c).0).collect();

    let mut starts: Vec<(f64, f64, f64)> = Vec::new();
    for k in 0..GRID_POINTS {
        let left = if k == 0 { f64::INFINITY } else { values[k - 1] };
        let right = values.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if values[k] <= left && values[k] <= right {
            let lo = if k == 0 { c_lo + edge } else { grid[k - 1] };
            let hi = if k + 1 == GRID_POINTS {
                c_hi - edge
            } else {
                grid[k + 1]
            };
            starts.push((grid[k], lo, hi));
        }
    }
    for (a, b) in heuristic_lines(xs, ys) {
        let m = a + b * mean_x;
        if m > 0.0 {
            let c = b / m;
            if c > c_lo && c < c_hi {
                starts.push((c, c_lo + edge, c_hi - edge));
            }
        }
    }

    let mut best: Option<search::Minimum> = None;
    let mut iterations = GRID_POINTS;
    for (start, lo, hi) in starts {
        let m = search::newton_bracketed(|c| profile.eval(c), lo, hi, start, 1e-15, 200);
        iterations += m.iterations;
        if best.is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let best = best.ok_or_else(|| Error::Infeasible("no feasible starting line".into()))?;
    let c = best.at;
    let u_mean = profile.u_mean(c);
    let m = u_mean.exp();
    let model = ModelForm::Linear {
        intercept: m * (1.0 - c * mean_x),
        slope: m * c,
    };
    finish(
        model,
        FitCriterion::LeastSquaresLnQ,
        xs,
        ys,
        iterations,
        best.converged && iterations < MAX_ITERATIONS,
    )
}

/// OLS line and a chord of the log-log power fit, used as extra starts.
fn heuristic_lines(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    let mut lines = Vec::new();
    if let Ok(line) = ols_line(xs, ys) {
        lines.push(line);
    }
    if xs.iter().all(|x| *x > 0.0) {
        if let Ok((ln_a, b)) = log_log_ols(xs, ys) {
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let (p_lo, p_hi) = ((ln_a + b * lo.ln()).exp(), (ln_a + b * hi.ln()).exp());
            let slope = (p_hi - p_lo) / (hi - lo);
            lines.push((p_lo - slope * lo, slope));
        }
    }
    lines
}

struct LnqLineProfile<'a> {
    d: &'a [f64],
    ln_y: &'a [f64],
}

impl LnqLineProfile<'_> {
    fn u_mean(&self, c: f64) -> f64 {
        self.ln_y
            .iter()
            .zip(self.d)
            .map(|(ly, d)| ly - (c * d).ln_1p())
            .sum::<f64>()
            / self.d.len() as f64
    }

    /// Profiled objective and its first two derivatives in `c`.
    fn eval(&self, c: f64) -> (f64, f64, f64) {
        let n = self.d.len() as f64;
        let mut u = Vec::with_capacity(self.d.len());
        let mut du = Vec::with_capacity(self.d.len());
        for (ly, d) in self.ln_y.iter().zip(self.d) {
            let g = 1.0 + c * d;
            if !(g > 0.0) {
                return (f64::INFINITY, f64::NAN, f64::NAN);
            }
            u.push(ly - (c * d).ln_1p());
            du.push(-d / g);
        }
        let u_bar = u.iter().sum::<f64>() / n;
        let du_bar = du.iter().sum::<f64>() / n;
        let mut h = 0.0;
        let mut h1 = 0.0;
        let mut h2 = 0.0;
        for i in 0..u.len() {
            let r = u[i] - u_bar;
            h += r * r;
            h1 += r * du[i];
            h2 += (du[i] - du_bar).powi(2) + r * du[i] * du[i];
        }
        (h, 2.0 * h1, 2.0 * h2)
    }
}

/// Least squares of `ln y` on `ln x`, returning `(ln a, b)`.
fn log_log_ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (intercept, slope) = ols_line(&lx, &ly)?;
    Ok((intercept, slope))
}

pub fn fit_power(data: &XYDataset, criterion: FitCriterion) -> Result<FitResult> {
    let (xs, ys) = (data.xs(), data.ys());
    if let Some(i) = xs.iter().position(|x| !(*x > 0.0)) {
        return Err(Error::domain(format!(
            "power model needs every x > 0; x #{} is {}",
            i + 1,
            xs[i]
        )));
    }
    let (ln_a, b0) = log_log_ols(xs, ys)?;
    if criterion == FitCriterion::LeastSquaresLnQ {
        let model = ModelForm::Power {
            multiplier: ln_a.exp(),
            exponent: b0,
        };
        return finish(model, criterion, xs, ys, 1, true);
    }

    // profile out the multiplier, then search the exponent from several starts
    let profile = |b: f64| -> (f64, f64) {
        let z: Vec<f64> = xs.iter().map(|x| x.powf(b)).collect();
        let a = best_multiplier(criterion, ys, &z);
        let preds: Vec<f64> = z.iter().map(|z| a * z).collect();
        (a, criterion.objective(ys, &preds))
    };
    let delta = 0.05 * b0.abs().max(1.0);
    let mut best: Option<search::Minimum> = None;
    let mut iterations = 0;
    let mut converged = true;
    for k in POWER_STARTS {
        let m = search::compass_search(
            |b| {
                let v = profile(b).1;
                if v.is_finite() {
                    v
                } else {
                    f64::INFINITY
                }
            },
            b0 + k * delta,
            delta,
            1e-10,
            MAX_ITERATIONS,
        );
        iterations += m.iterations;
        converged &= m.converged;
        if best.is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let exponent = best.expect("at least one start").at;
    let multiplier = profile(exponent).0;
    finish(
        ModelForm::Power {
            multiplier,
            exponent,
        },
        criterion,
        xs,
        ys,
        iterations,
        converged,
    )
}

/// Optimal `a` in `a z_i` for fixed basis values `z_i > 0`.
fn best_multiplier(criterion: FitCriterion, ys: &[f64], z: &[f64]) -> f64 {
    let ratios: Vec<f64> = ys.iter().zip(z).map(|(y, z)| y / z).collect();
    match criterion {
        FitCriterion::Ols => {
            let num: f64 = ys.iter().zip(z).map(|(y, z)| y * z).sum();
            let den: f64 = z.iter().map(|z| z * z).sum();
            num / den
        }
        // |y - a z| = z |y/z - a|
        FitCriterion::Lad => weighted_median(&ratios, z).unwrap_or(f64::NAN),
        // |y - a z| / y = (z/y) |y/z - a|
        FitCriterion::MinMape => {
            let w: Vec<f64> = ys.iter().zip(z).map(|(y, z)| z / y).collect();
            weighted_median(&ratios, &w).unwrap_or(f64::NAN)
        }
        FitCriterion::LeastSquaresLnQ => {
            let n = ys.len() as f64;
            (ratios.iter().map(|r| r.ln()).sum::<f64>() / n).exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(xs: &[f64], ys: &[f64]) -> XYDataset {
        XYDataset::new(xs.to_vec(), ys.to_vec()).unwrap()
    }

    #[test]
    fn predict_examples() {
        let lin = ModelForm::Linear {
            intercept: 10.05,
            slope: 3.8,
        };
        assert!((lin.predict(100.0).unwrap() - 390.05).abs() < 1e-9);
        let pow = ModelForm::Power {
            multiplier: 2.0,
            exponent: 1.5,
        };
        assert_eq!(pow.predict(4.0).unwrap(), 16.0);
        assert!(matches!(pow.predict(0.0), Err(Error::Domain(_))));
        assert!(matches!(pow.predict(-1.0), Err(Error::Domain(_))));
        assert_eq!(ModelForm::Constant { c: 10.0 }.predict(-7.0).unwrap(), 10.0);
    }

    #[test]
    fn constant_fits_on_one_two_four() {
        let ys = [1.0, 2.0, 4.0];
        let gm = fit_constant(&ys, FitCriterion::LeastSquaresLnQ).unwrap();
        assert!((gm.model.params()[0] - 2.0).abs() < 1e-12);
        let ols = fit_constant(&ys, FitCriterion::Ols).unwrap();
        assert!((ols.model.params()[0] - 7.0 / 3.0).abs() < 1e-12);
        let lad = fit_constant(&ys, FitCriterion::Lad).unwrap();
        assert_eq!(lad.model.params()[0], 2.0);
        let mape = fit_constant(&ys, FitCriterion::MinMape).unwrap();
        assert_eq!(mape.model.params()[0], 1.0);
        assert!((mape.objective - 1.25).abs() < 1e-12);
    }

    #[test]
    fn constant_min_mape_matches_grid_search() {
        let ys = [1.0, 2.0, 4.0];
        let obj = |c: f64| ys.iter().map(|y| (c - y).abs() / y).sum::<f64>();
        let (best_c, best_v) = (1..=50_000)
            .map(|k| k as f64 * 5.0 / 50_000.0)
            .map(|c| (c, obj(c)))
            .fold(
                (0.0, f64::INFINITY),
                |acc, cv| if cv.1 < acc.1 { cv } else { acc },
            );
        assert!((best_c - 1.0).abs() < 1e-3);
        assert!((best_v - 1.25).abs() < 1e-3);
    }

    #[test]
    fn empty_constant_fit_is_an_error() {
        assert!(matches!(
            fit_constant(&[], FitCriterion::Ols),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn linear_exact_recovery_under_every_criterion() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 + 2.0 * x).collect();
        let data = ds(&xs, &ys);
        for criterion in FitCriterion::ALL {
            let fit = fit_linear(&data, criterion).unwrap();
            let p = fit.model.params();
            assert!((p[0] - 3.0).abs() < 1e-6, "{criterion}: {p:?}");
            assert!((p[1] - 2.0).abs() < 1e-6, "{criterion}: {p:?}");
            assert!(
                fit.objective.abs() < 1e-10,
                "{criterion}: {}",
                fit.objective
            );
            assert!(fit.converged);
        }
    }

    #[test]
    fn power_exact_recovery_under_every_criterion() {
        let xs: Vec<f64> = (1..=12).map(|k| f64::from(k) * 1.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x.powf(1.5)).collect();
        let data = ds(&xs, &ys);
        for criterion in FitCriterion::ALL {
            let fit = fit_power(&data, criterion).unwrap();
            let p = fit.model.params();
            assert!((p[0] - 2.0).abs() < 1e-6, "{criterion}: {p:?}");
            assert!((p[1] - 1.5).abs() < 1e-6, "{criterion}: {p:?}");
        }
    }

    #[test]
    fn identical_x_values_are_rank_deficient() {
        let data = ds(&[3.0, 3.0, 3.0], &[1.0, 2.0, 3.0]);
        for criterion in FitCriterion::ALL {
            assert!(matches!(
                fit_linear(&data, criterion),
                Err(Error::RankDeficient)
            ));
            assert!(matches!(
                fit_power(&data, criterion),
                Err(Error::RankDeficient)
            ));
        }
    }

    #[test]
    fn power_rejects_non_positive_x() {
        let data = ds(&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        assert!(matches!(
            fit_power(&data, FitCriterion::LeastSquaresLnQ),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn dataset_validation() {
        assert!(XYDataset::new(vec![1.0], vec![1.0]).is_err());
        assert!(XYDataset::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(XYDataset::new(vec![1.0, 2.0], vec![1.0, 0.0]).is_err());
        assert!(XYDataset::new(vec![f64::NAN, 2.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn diagnostics_of_a_perfect_model() {
        let data = ds(&[1.0, 2.0, 3.0], &[5.0, 7.0, 9.0]);
        let model = ModelForm::Linear {
            intercept: 3.0,
            slope: 2.0,
        };
        let d = diagnostics(&model, &data).unwrap();
        assert!(d.ln_q_residuals.iter().all(|r| *r == 0.0));
        assert_eq!(d.q_product, 1.0);
        assert_eq!((d.n_over, d.n_under), (0, 0));
    }

    #[test]
    fn diagnostics_reject_non_positive_predictions() {
        let data = ds(&[1.0, 2.0], &[1.0, 1.0]);
        let model = ModelForm::Linear {
            intercept: 1.0,
            slope: -1.0,
        };
        assert!(matches!(diagnostics(&model, &data), Err(Error::Domain(_))));
    }

    #[test]
    fn lnq_line_balances_accuracy_ratios() {
        let xs = [50.0, 120.0, 200.0, 310.0, 480.0, 650.0, 900.0];
        let ys = [700.0, 900.0, 2500.0, 1900.0, 4100.0, 3300.0, 7800.0];
        let fit = fit_linear(&ds(&xs, &ys), FitCriterion::LeastSquaresLnQ).unwrap();
        assert!(fit.converged);
        assert!(fit.diagnostics.sum_ln_q().abs() < 1e-9);
        assert!((fit.diagnostics.q_product - 1.0).abs() < 1e-9);
    }
}
