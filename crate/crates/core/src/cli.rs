//! The `lnq` command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::dataio::{self, TableDocument};
use crate::error::Error;
use crate::estimators::{self, FitCriterion, FitResult, ModelFamily, XYDataset};
use crate::metrics;
use crate::simulator::{
    self, compare_with_reference, ScenarioFamily, SelectionMetric, SimulationScenario,
    ADDITIVE_SIGMAS, MULTIPLICATIVE_SIGMAS, REFERENCE_TOLERANCE_POINTS,
};

pub const DEFAULT_SEED: u64 = 2015;
pub const DEFAULT_REPLICATIONS: usize = 10_000;
/// Replications below this are too few for a meaningful comparison with the
/// published tables.
pub const COMPARISON_MIN_REPLICATIONS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "lnq",
    version,
    about = "Relative accuracy with the log accuracy ratio ln(predicted/actual)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every accuracy measure on a CSV of actuals and predictions.
    Metrics(MetricsArgs),
    /// Fit a model to a CSV of (x, y) observations.
    Fit(FitArgs),
    /// Fit a model and draw its log accuracy ratios as an SVG bar chart.
    Residuals(ResidualArgs),
    /// Run one model-selection experiment over a list of noise levels.
    Simulate(SimulateArgs),
    /// Regenerate all five model-selection tables.
    Tables(TablesArgs),
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub actual: String,
    #[arg(long)]
    pub pred: String,
    /// Also write the report as a one-row CSV table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// constant, linear or power
    #[arg(long)]
    pub model: ModelFamily,
    /// mape, lnq, ols or lad
    #[arg(long)]
    pub criterion: FitCriterion,
    /// Where to write the (x, ln_q) residual series. Defaults to
    /// `<input stem>_<model>_<criterion>_lnq.csv` next to the input.
    #[arg(long)]
    pub residuals: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    pub model: ModelFamily,
    #[arg(long)]
    pub criterion: FitCriterion,
    /// SVG output; the residual CSV is written beside it.
    #[arg(long)]
    pub svg: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// power-mult, const-mult or const-add
    #[arg(long)]
    pub scenario: ScenarioFamily,
    /// Comma-separated noise levels; defaults to the standard grid for the
    /// scenario.
    #[arg(long, value_delimiter = ',', value_parser = parse_sigma)]
    pub sigma: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_REPLICATIONS, value_parser = parse_reps)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Also write the results as a CSV table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_REPLICATIONS, value_parser = parse_reps)]
    pub reps: usize,
    #[arg(long, default_value = "tables")]
    pub out: PathBuf,
}

fn parse_sigma(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("noise level must be finite and >= 0, got {s}"))
    }
}

fn parse_reps(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!(
            "replications must be a whole number >= 1, got `{s}`"
        )),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("optimizer did not converge after {iterations} iterations (objective {objective})")]
    NotConverged { iterations: usize, objective: f64 },
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Metrics(args) => cmd_metrics(&args),
        Command::Fit(args) => cmd_fit(&args),
        Command::Residuals(args) => cmd_residuals(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Tables(args) => cmd_tables(&args),
    }
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

pub fn cmd_metrics(args: &MetricsArgs) -> Result<(), CliError> {
    let obs = dataio::load_paired_csv(&args.input, &args.actual, &args.pred)?;
    let r = metrics::evaluate_all(&obs);
    println!("n\t{}", obs.len());
    println!("MAPE\t{}", fixed(r.mape));
    println!("SMAPE\t{}", fixed(r.smape));
    println!("MER\t{}", fixed(r.mer));
    println!("Σ(lnQ)²\t{}", fixed(r.sum_sq_ln_q));
    println!("mean lnQ\t{}", fixed(r.mean_ln_q));
    match r.lsd {
        Some(v) => println!("LSD\t{}", fixed(v)),
        None => println!("LSD\tn/a (needs at least 2 observations)"),
    }
    println!("ΠQ\t{}", fixed(r.q_product));
    if let Some(out) = &args.out {
        let mut doc = TableDocument::new(
            "metrics",
            [
                "mape",
                "smape",
                "mer",
                "sum_sq_ln_q",
                "mean_ln_q",
                "lsd",
                "q_product",
            ],
        );
        doc.push_row(vec![
            r.mape,
            r.smape,
            r.mer,
            r.sum_sq_ln_q,
            r.mean_ln_q,
            r.lsd.unwrap_or(f64::NAN),
            r.q_product,
        ])?;
        dataio::write_table_csv(&doc, out)?;
    }
    Ok(())
}

fn fit_and_report(
    input: &Path,
    x: &str,
    y: &str,
    family: ModelFamily,
    criterion: FitCriterion,
) -> Result<(XYDataset, FitResult), CliError> {
    let data = dataio::load_xy_csv(input, x, y)?;
    let fit = estimators::fit(&data, family, criterion)?;
    let d = &fit.diagnostics;
    println!("model\t{family}");
    println!("criterion\t{criterion}");
    println!("equation\t{}", fit.model);
    let names: &[&str] = match family {
        ModelFamily::Constant => &["c"],
        ModelFamily::Linear => &["intercept", "slope"],
        ModelFamily::Power => &["multiplier", "exponent"],
    };
    for (name, v) in names.iter().zip(fit.model.params()) {
        println!("{name}\t{v}");
    }
    println!("objective\t{}", fit.objective);
    println!("n\t{}", data.len());
    println!("n_over\t{}", d.n_over);
    println!("n_under\t{}", d.n_under);
    println!("mean lnQ\t{:e}", d.sum_ln_q() / data.len() as f64);
    println!("ΠQ\t{}", fixed(d.q_product));
    println!("converged\t{}", fit.converged);
    println!("iterations\t{}", fit.iterations);
    if !fit.converged {
        return Err(CliError::NotConverged {
            iterations: fit.iterations,
            objective: fit.objective,
        });
    }
    Ok((data, fit))
}

fn write_residual_csv(data: &XYDataset, fit: &FitResult, path: &Path) -> Result<(), CliError> {
    let mut body = String::from("x,ln_q\n");
    for (x, r) in data.xs().iter().zip(&fit.diagnostics.ln_q_residuals) {
        body.push_str(&format!("{x},{r}\n"));
    }
    std::fs::write(path, body).map_err(Error::from)?;
    Ok(())
}

pub fn cmd_fit(args: &FitArgs) -> Result<(), CliError> {
    let (data, fit) = fit_and_report(&args.input, &args.x, &args.y, args.model, args.criterion)?;
    let path = args.residuals.clone().unwrap_or_else(|| {
        let stem = args
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "data".into());
        args.input
            .with_file_name(format!("{stem}_{}_{}_lnq.csv", args.model, args.criterion))
    });
    write_residual_csv(&data, &fit, &path)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

pub fn cmd_residuals(args: &ResidualArgs) -> Result<(), CliError> {
    let (data, fit) = fit_and_report(&args.input, &args.x, &args.y, args.model, args.criterion)?;
    let csv = dataio::write_residual_svg(&fit.diagnostics.ln_q_residuals, data.xs(), &args.svg)?;
    eprintln!("wrote {} and {}", args.svg.display(), csv.display());
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let sigmas: Vec<f64> = if args.sigma.is_empty() {
        match args.scenario {
            ScenarioFamily::ConstantAdditive => ADDITIVE_SIGMAS.to_vec(),
            _ => MULTIPLICATIVE_SIGMAS.to_vec(),
        }
    } else {
        args.sigma.clone()
    };
    let scenarios = sigmas
        .iter()
        .map(|s| SimulationScenario::standard(args.scenario, *s, args.reps, args.seed))
        .collect::<Result<Vec<_>, _>>()?;

    let mut columns = vec!["sigma".to_string()];
    for m in SelectionMetric::ALL {
        for what in ["correct", "under", "over"] {
            columns.push(format!("{}_{what}_pct", m.key()));
        }
    }
    let mut doc = TableDocument::new(format!("{}", args.scenario), columns);
    println!(
        "scenario {} | replications {} | seed {}",
        args.scenario, args.reps, args.seed
    );
    println!("σ\tmetric\tcorrect%\tunder%\tover%\tties");
    for scenario in &scenarios {
        let tally = simulator::run_experiment(scenario);
        let mut row = vec![scenario.sigma()];
        for m in SelectionMetric::ALL {
            let (c, u, o) = (
                tally.percent_correct(m),
                tally.percent_under(m),
                tally.percent_over(m),
            );
            println!(
                "{}\t{}\t{c:.1}\t{u:.1}\t{o:.1}\t{}",
                scenario.sigma(),
                m.label(),
                tally.metric(m).ties
            );
            row.extend([c, u, o]);
        }
        if tally.redraws > 0 {
            eprintln!(
                "σ = {}: redrew {} non-positive additive draws",
                scenario.sigma(),
                tally.redraws
            );
        }
        doc.push_row(row)?;
    }
    if let Some(out) = &args.out {
        dataio::write_table_csv(&doc, out)?;
        eprintln!("wrote {}", out.display());
    }
    Ok(())
}

pub fn cmd_tables(args: &TablesArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out).map_err(Error::from)?;
    let suite = simulator::run_table_suite(args.seed, args.reps)?;
    for doc in suite.tables() {
        let path = args.out.join(format!("{}.csv", doc.title));
        dataio::write_table_csv(&doc, &path)?;
        eprintln!("wrote {}", path.display());
    }
    if args.reps < COMPARISON_MIN_REPLICATIONS {
        println!(
            "comparison: insufficient replications ({} < {COMPARISON_MIN_REPLICATIONS})",
            args.reps
        );
        return Ok(());
    }
    let checks = compare_with_reference(&suite);
    let failed = checks.iter().filter(|c| !c.passes()).count();
    for c in &checks {
        println!(
            "{} Table{} σ={} {}: {:.1} vs published {} (±{REFERENCE_TOLERANCE_POINTS})",
            if c.passes() { "PASS" } else { "FAIL" },
            c.table,
            c.sigma,
            c.column,
            c.observed,
            c.expected
        );
    }
    println!(
        "comparison: {} of {} cells within ±{REFERENCE_TOLERANCE_POINTS} points",
        checks.len() - failed,
        checks.len()
    );
    Ok(())
}
