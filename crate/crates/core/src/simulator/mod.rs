//! Seeded Monte Carlo model-selection experiments.
//!
//! Each replication draws its noise from its own ChaCha12 stream: the
//! generator is seeded with the scenario's `master_seed` and the stream
//! number is the replication index. Replications are therefore independent
//! of execution order, and serial and parallel runs produce identical
//! tallies.

mod tables;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::estimators::{ModelForm, XYDataset};
use crate::metrics::{lsd_slices, mape_slices, smape_slices, sum_sq_ln_q_slices};

pub use tables::{
    compare_with_reference, run_table_suite, run_table_suite_with, CellCheck, SuiteRow, TableSuite,
    ADDITIVE_SIGMAS, MULTIPLICATIVE_SIGMAS, REFERENCE_TABLE1, REFERENCE_TABLE2, REFERENCE_TABLE3,
    REFERENCE_TABLE4, REFERENCE_TABLE5, REFERENCE_TOLERANCE_POINTS,
};

/// Intercept on the log scale of the power-law generator.
pub const POWER_ALPHA: f64 = 3.03;
pub const POWER_BETA_TRUE: f64 = 0.943;
pub const POWER_BETA_CANDIDATES: [f64; 5] = [0.92, 0.93, 0.943, 0.95, 0.96];
pub const CONSTANT_TRUE: f64 = 10.0;
pub const CONSTANT_CANDIDATES: [f64; 5] = [8.0, 9.0, 10.0, 11.0, 12.0];
/// Observations per replication.
pub const POINTS_PER_REPLICATION: usize = 30;

/// `x = 50, 100, ..., 1500`.
pub fn power_x_grid() -> Vec<f64> {
    (1..=POINTS_PER_REPLICATION)
        .map(|k| 50.0 * k as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    /// `y = e^alpha x^beta ε`, `ln ε ~ N(0, σ)`.
    PowerMultiplicative {
        alpha: f64,
        beta_true: f64,
        beta_candidates: Vec<f64>,
        x_grid: Vec<f64>,
    },
    /// `y = c ε`, `ln ε ~ N(0, σ)`.
    ConstantMultiplicative { c: f64, candidates: Vec<f64> },
    /// `y = c + e`, `e ~ N(0, σ)`; non-positive draws are redrawn.
    ConstantAdditive { c: f64, candidates: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioFamily {
    PowerMultiplicative,
    ConstantMultiplicative,
    ConstantAdditive,
}

impl FromStr for ScenarioFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "power-mult" => Ok(Self::PowerMultiplicative),
            "const-mult" => Ok(Self::ConstantMultiplicative),
            "const-add" => Ok(Self::ConstantAdditive),
            other => Err(format!(
                "unknown scenario `{other}` (expected power-mult, const-mult or const-add)"
            )),
        }
    }
}

impl fmt::Display for ScenarioFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PowerMultiplicative => "power-mult",
            Self::ConstantMultiplicative => "const-mult",
            Self::ConstantAdditive => "const-add",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationScenario {
    kind: ScenarioKind,
    sigma: f64,
    replications: usize,
    master_seed: u64,
    // cached per-scenario quantities
    xs: Vec<f64>,
    true_index: usize,
}

impl SimulationScenario {
    /// Validates the scenario. `sigma = 0` is accepted as the noise-free
    /// limit.
    pub fn new(
        kind: ScenarioKind,
        sigma: f64,
        replications: usize,
        master_seed: u64,
    ) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::domain(format!(
                "noise scale must be finite and >= 0, got {sigma}"
            )));
        }
        if replications == 0 {
            return Err(Error::domain("at least one replication is required"));
        }
        let (truth, candidates, xs) = match &kind {
            ScenarioKind::PowerMultiplicative {
                alpha,
                beta_true,
                beta_candidates,
                x_grid,
            } => {
                if !alpha.is_finite() {
                    return Err(Error::domain("alpha must be finite"));
                }
                if x_grid.len() < 2 || x_grid.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                    return Err(Error::domain(
                        "the x grid needs at least two finite, positive points",
                    ));
                }
                (*beta_true, beta_candidates, x_grid.clone())
            }
            ScenarioKind::ConstantMultiplicative { c, candidates }
            | ScenarioKind::ConstantAdditive { c, candidates } => {
                if candidates.iter().any(|v| !(*v > 0.0 && v.is_finite())) || !(*c > 0.0) {
                    return Err(Error::domain("constant models must be positive"));
                }
                let xs = (1..=POINTS_PER_REPLICATION).map(|k| k as f64).collect();
                (*c, candidates, xs)
            }
        };
        let hits: Vec<usize> = candidates
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == truth)
            .map(|(i, _)| i)
            .collect();
        if hits.len() != 1 {
            return Err(Error::domain(format!(
                "the true model must appear exactly once among the candidates (found {})",
                hits.len()
            )));
        }
        Ok(Self {
            kind,
            sigma,
            replications,
            master_seed,
            xs,
            true_index: hits[0],
        })
    }

    /// Power-law experiment with the standard parameters.
    pub fn power_multiplicative(sigma: f64, replications: usize, master_seed: u64) -> Result<Self> {
        Self::new(
            ScenarioKind::PowerMultiplicative {
                alpha: POWER_ALPHA,
                beta_true: POWER_BETA_TRUE,
                beta_candidates: POWER_BETA_CANDIDATES.to_vec(),
                x_grid: power_x_grid(),
            },
            sigma,
            replications,
            master_seed,
        )
    }

    pub fn constant_multiplicative(
        sigma: f64,
        replications: usize,
        master_seed: u64,
    ) -> Result<Self> {
        Self::new(
            ScenarioKind::ConstantMultiplicative {
                c: CONSTANT_TRUE,
                candidates: CONSTANT_CANDIDATES.to_vec(),
            },
            sigma,
            replications,
            master_seed,
        )
    }

    pub fn constant_additive(sigma: f64, replications: usize, master_seed: u64) -> Result<Self> {
        Self::new(
            ScenarioKind::ConstantAdditive {
                c: CONSTANT_TRUE,
                candidates: CONSTANT_CANDIDATES.to_vec(),
            },
            sigma,
            replications,
            master_seed,
        )
    }

    pub fn standard(
        family: ScenarioFamily,
        sigma: f64,
        replications: usize,
        master_seed: u64,
    ) -> Result<Self> {
        match family {
            ScenarioFamily::PowerMultiplicative => {
                Self::power_multiplicative(sigma, replications, master_seed)
            }
            ScenarioFamily::ConstantMultiplicative => {
                Self::constant_multiplicative(sigma, replications, master_seed)
            }
            ScenarioFamily::ConstantAdditive => {
                Self::constant_additive(sigma, replications, master_seed)
            }
        }
    }

    pub fn kind(&self) -> &ScenarioKind {
        &self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn replications(&self) -> usize {
        self.replications
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn true_index(&self) -> usize {
        self.true_index
    }

    /// The parameter that orders the candidates (β or c).
    pub fn candidate_params(&self) -> &[f64] {
        match &self.kind {
            ScenarioKind::PowerMultiplicative {
                beta_candidates, ..
            } => beta_candidates,
            ScenarioKind::ConstantMultiplicative { candidates, .. }
            | ScenarioKind::ConstantAdditive { candidates, .. } => candidates,
        }
    }

    pub fn candidates(&self) -> Vec<ModelForm> {
        match &self.kind {
            ScenarioKind::PowerMultiplicative {
                alpha,
                beta_candidates,
                ..
            } => beta_candidates
                .iter()
                .map(|b| ModelForm::Power {
                    multiplier: alpha.exp(),
                    exponent: *b,
                })
                .collect(),
            ScenarioKind::ConstantMultiplicative { candidates, .. }
            | ScenarioKind::ConstantAdditive { candidates, .. } => candidates
                .iter()
                .map(|c| ModelForm::Constant { c: *c })
                .collect(),
        }
    }

    /// Noise-free values of the generating model on the x grid.
    pub fn true_values(&self) -> Vec<f64> {
        let model = self.candidates()[self.true_index];
        self.xs.iter().map(|x| model.eval(*x)).collect()
    }

    fn rng(&self, replication_index: usize) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(replication_index as u64);
        rng
    }

    /// Draws one replication's responses; also returns how many additive
    /// draws were rejected for being non-positive.
    fn draw(&self, truth: &[f64], replication_index: usize) -> (Vec<f64>, u64) {
        let mut rng = self.rng(replication_index);
        let noise = Normal::new(0.0, self.sigma).expect("sigma validated");
        let mut redraws = 0;
        let ys = match self.kind {
            ScenarioKind::PowerMultiplicative { .. }
            | ScenarioKind::ConstantMultiplicative { .. } => truth
                .iter()
                .map(|t| t * noise.sample(&mut rng).exp())
                .collect(),
            ScenarioKind::ConstantAdditive { .. } => truth
                .iter()
                .map(|t| loop {
                    let y = t + noise.sample(&mut rng);
                    if y > 0.0 {
                        break y;
                    }
                    redraws += 1;
                })
                .collect(),
        };
        (ys, redraws)
    }
}

/// Regenerates replication `replication_index`; identical inputs give
/// bit-identical datasets.
pub fn generate_replication(
    scenario: &SimulationScenario,
    replication_index: usize,
) -> Result<XYDataset> {
    if replication_index >= scenario.replications {
        return Err(Error::domain(format!(
            "replication {replication_index} out of range (scenario has {})",
            scenario.replications
        )));
    }
    let (ys, _) = scenario.draw(&scenario.true_values(), replication_index);
    XYDataset::new(scenario.xs.clone(), ys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMetric {
    Mape,
    SumSqLnQ,
    Lsd,
    Smape,
}

impl SelectionMetric {
    pub const ALL: [SelectionMetric; 4] = [Self::Mape, Self::SumSqLnQ, Self::Lsd, Self::Smape];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Mape => "MAPE",
            Self::SumSqLnQ => "Σ(lnQ)²",
            Self::Lsd => "LSD",
            Self::Smape => "SMAPE",
        }
    }

    /// Column-safe identifier.
    pub fn key(&self) -> &'static str {
        match self {
            Self::Mape => "mape",
            Self::SumSqLnQ => "sum_sq_ln_q",
            Self::Lsd => "lsd",
            Self::Smape => "smape",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }

    fn score(&self, actuals: &[f64], predictions: &[f64]) -> f64 {
        match self {
            Self::Mape => mape_slices(actuals, predictions),
            Self::SumSqLnQ => sum_sq_ln_q_slices(actuals, predictions),
            Self::Lsd => lsd_slices(actuals, predictions),
            Self::Smape => smape_slices(actuals, predictions),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub index: usize,
    /// Another candidate scored exactly the same; the earliest one won.
    pub tied: bool,
}

fn argmin_earliest(scores: impl Iterator<Item = f64>) -> Selection {
    let mut best = Selection {
        index: 0,
        tied: false,
    };
    let mut best_score = f64::INFINITY;
    for (i, s) in scores.enumerate() {
        if i == 0 || s < best_score {
            best = Selection {
                index: i,
                tied: false,
            };
            best_score = s;
        } else if s == best_score {
            best.tied = true;
        }
    }
    best
}

/// Index of the candidate whose predictions score lowest on `data` under
/// `metric`; ties go to the earliest candidate.
pub fn select_best_model(
    data: &XYDataset,
    candidates: &[ModelForm],
    metric: SelectionMetric,
) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::domain("no candidate models"));
    }
    let predictions = candidates
        .iter()
        .map(|m| {
            let preds = data
                .xs()
                .iter()
                .map(|x| m.predict(*x))
                .collect::<Result<Vec<_>>>()?;
            if let Some(p) = preds.iter().find(|p| !(**p > 0.0)) {
                return Err(Error::domain(format!("candidate {m} predicts {p}")));
            }
            Ok(preds)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(argmin_earliest(
        predictions.iter().map(|p| metric.score(data.ys(), p)),
    ))
}

/// Outcome counts for one metric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MetricTally {
    pub correct: u64,
    /// Chosen model predicts below the true model.
    pub under: u64,
    pub over: u64,
    /// Selections decided by the earliest-candidate tie rule (also counted
    /// in one of the three outcomes).
    pub ties: u64,
}

impl MetricTally {
    pub fn total(&self) -> u64 {
        self.correct + self.under + self.over
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelectionTally {
    pub replications: u64,
    /// Non-positive additive draws that were rejected and redrawn.
    pub redraws: u64,
    per_metric: [MetricTally; 4],
}

impl SelectionTally {
    pub fn metric(&self, metric: SelectionMetric) -> &MetricTally {
        &self.per_metric[metric.index()]
    }

    /// Associative, commutative combination of two tallies.
    pub fn merge(mut self, other: Self) -> Self {
        self.replications += other.replications;
        self.redraws += other.redraws;
        for (a, b) in self.per_metric.iter_mut().zip(other.per_metric) {
            a.correct += b.correct;
            a.under += b.under;
            a.over += b.over;
            a.ties += b.ties;
        }
        self
    }

    fn percent(&self, count: u64) -> f64 {
        100.0 * count as f64 / self.replications as f64
    }

    pub fn percent_correct(&self, metric: SelectionMetric) -> f64 {
        self.percent(self.metric(metric).correct)
    }

    pub fn percent_under(&self, metric: SelectionMetric) -> f64 {
        self.percent(self.metric(metric).under)
    }

    pub fn percent_over(&self, metric: SelectionMetric) -> f64 {
        self.percent(self.metric(metric).over)
    }
}

/// How replications are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

struct Prepared<'a> {
    scenario: &'a SimulationScenario,
    truth: Vec<f64>,
    candidate_predictions: Vec<Vec<f64>>,
}

impl<'a> Prepared<'a> {
    fn new(scenario: &'a SimulationScenario) -> Self {
        let candidate_predictions = scenario
            .candidates()
            .iter()
            .map(|m| scenario.xs.iter().map(|x| m.eval(*x)).collect())
            .collect();
        Self {
            scenario,
            truth: scenario.true_values(),
            candidate_predictions,
        }
    }

    fn replicate(&self, index: usize) -> SelectionTally {
        let (ys, redraws) = self.scenario.draw(&self.truth, index);
        let params = self.scenario.candidate_params();
        let truth = params[self.scenario.true_index];
        let mut tally = SelectionTally {
            replications: 1,
            redraws,
            ..Default::default()
        };
        for metric in SelectionMetric::ALL {
            let pick = argmin_earliest(
                self.candidate_predictions
                    .iter()
                    .map(|p| metric.score(&ys, p)),
            );
            let cell = &mut tally.per_metric[metric.index()];
            let chosen = params[pick.index];
            if chosen < truth {
                cell.under += 1;
            } else if chosen > truth {
                cell.over += 1;
            } else {
                cell.correct += 1;
            }
            cell.ties += u64::from(pick.tied);
        }
        tally
    }
}

pub fn run_experiment(scenario: &SimulationScenario) -> SelectionTally {
    run_experiment_with(scenario, Execution::default())
}

pub fn run_experiment_with(scenario: &SimulationScenario, execution: Execution) -> SelectionTally {
    let prepared = Prepared::new(scenario);
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..scenario.replications)
                .into_par_iter()
                .map(|i| prepared.replicate(i))
                .reduce(SelectionTally::default, SelectionTally::merge)
        }
        _ => (0..scenario.replications)
            .map(|i| prepared.replicate(i))
            .fold(SelectionTally::default(), SelectionTally::merge),
    }
}
