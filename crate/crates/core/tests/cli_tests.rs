use std::fs;
use std::path::{Path, PathBuf};

use assert_cmd::Command;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn lnq() -> Command {
    Command::cargo_bin("lnq").unwrap()
}

fn stdout_of(cmd: &mut Command) -> String {
    let out = cmd.assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('\t')))
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{text}"))
}

/// Copies a fixture into a scratch directory so default output paths land there.
fn scratch_copy(dir: &TempDir, name: &str) -> PathBuf {
    let dst = dir.path().join(name);
    fs::copy(fixture(name), &dst).unwrap();
    dst
}

fn bars(svg: &str) -> Vec<(f64, f64)> {
    svg.lines()
        .filter(|l| l.starts_with("<rect class=\"bar\""))
        .map(|l| {
            let attr = |name: &str| -> f64 {
                let start = l.find(&format!(" {name}=\"")).unwrap() + name.len() + 3;
                let end = start + l[start..].find('"').unwrap();
                l[start..end].parse().unwrap()
            };
            (attr("data-lnq"), attr("height"))
        })
        .collect()
}

#[test]
fn metrics_on_perfect_predictions() {
    let out = stdout_of(
        lnq()
            .args(["metrics", "--actual", "actual", "--pred", "pred", "--input"])
            .arg(fixture("paired_perfect.csv")),
    );
    assert_eq!(field(&out, "n"), "3");
    assert_eq!(field(&out, "MAPE"), "0.000000");
    assert_eq!(field(&out, "Σ(lnQ)²"), "0.000000");
    assert_eq!(field(&out, "LSD"), "0.000000");
    assert_eq!(field(&out, "ΠQ"), "1.000000");
}

#[test]
fn metrics_on_swapped_pair() {
    let out = stdout_of(
        lnq()
            .args(["metrics", "--actual", "actual", "--pred", "pred", "--input"])
            .arg(fixture("paired_swap.csv")),
    );
    // |10-100|/100 = 0.9 and |100-10|/10 = 9
    assert_eq!(field(&out, "MAPE"), "4.950000");
    assert_eq!(field(&out, "mean lnQ"), "0.000000");
    assert_eq!(field(&out, "ΠQ"), "1.000000");
}

#[test]
fn metrics_writes_optional_table() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.csv");
    lnq()
        .args(["metrics", "--actual", "actual", "--pred", "pred", "--input"])
        .arg(fixture("paired_swap.csv"))
        .arg("--out")
        .arg(&out)
        .assert()
        .success();
    let text = fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("4.95,"));
}

#[test]
fn missing_column_fails_and_names_it() {
    let err = lnq()
        .args([
            "metrics",
            "--actual",
            "Actual_Effort",
            "--pred",
            "pred",
            "--input",
        ])
        .arg(fixture("paired_swap.csv"))
        .assert()
        .failure()
        .get_output()
        .stderr
        .clone();
    assert!(String::from_utf8(err).unwrap().contains("Actual_Effort"));
}

#[test]
fn fit_recovers_noiseless_power_law() {
    let dir = TempDir::new().unwrap();
    let input = scratch_copy(&dir, "power_noiseless.csv");
    for criterion in ["lnq", "mape", "ols", "lad"] {
        let out = stdout_of(
            lnq()
                .args([
                    "fit",
                    "--x",
                    "FP",
                    "--y",
                    "Effort",
                    "--model",
                    "power",
                    "--criterion",
                    criterion,
                    "--input",
                ])
                .arg(&input),
        );
        let a: f64 = field(&out, "multiplier").parse().unwrap();
        let b: f64 = field(&out, "exponent").parse().unwrap();
        assert!((a - 2.0).abs() < 1e-6, "{criterion}: a = {a}");
        assert!((b - 1.5).abs() < 1e-6, "{criterion}: b = {b}");
        assert_eq!(field(&out, "converged"), "true");
        let residuals = dir
            .path()
            .join(format!("power_noiseless_power_{criterion}_lnq.csv"));
        assert!(residuals.exists());
    }
}

#[test]
fn lnq_fit_balances_log_residuals() {
    let dir = TempDir::new().unwrap();
    let input = scratch_copy(&dir, "effort_synthetic.csv");
    let out = stdout_of(
        lnq()
            .args([
                "fit",
                "--x",
                "FP",
                "--y",
                "Effort",
                "--model",
                "power",
                "--criterion",
                "lnq",
                "--input",
            ])
            .arg(&input),
    );
    assert_eq!(field(&out, "ΠQ"), "1.000000");
    let mean: f64 = field(&out, "mean lnQ").parse().unwrap();
    assert!(mean.abs() < 1e-9);
    assert_eq!(field(&out, "n"), "24");
}

#[test]
fn residual_plot_of_lnq_fit_is_centred() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("lnq.svg");
    lnq()
        .args([
            "residuals",
            "--x",
            "FP",
            "--y",
            "Effort",
            "--model",
            "power",
            "--criterion",
            "lnq",
            "--input",
        ])
        .arg(fixture("effort_synthetic.csv"))
        .arg("--svg")
        .arg(&svg)
        .assert()
        .success();
    let b = bars(&fs::read_to_string(&svg).unwrap());
    assert_eq!(b.len(), 24);
    let mean = b.iter().map(|(r, _)| r).sum::<f64>() / b.len() as f64;
    assert!(mean.abs() < 1e-9, "mean plotted lnQ {mean}");
    assert!(dir.path().join("lnq.csv").exists());
}

#[test]
fn residual_plot_of_mape_fit_leans_under() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("mape.svg");
    lnq()
        .args([
            "residuals",
            "--x",
            "FP",
            "--y",
            "Effort",
            "--model",
            "power",
            "--criterion",
            "mape",
            "--input",
        ])
        .arg(fixture("effort_synthetic.csv"))
        .arg("--svg")
        .arg(&svg)
        .assert()
        .success();
    let b = bars(&fs::read_to_string(&svg).unwrap());
    let under = b.iter().filter(|(r, _)| *r < 0.0).count();
    let over = b.iter().filter(|(r, _)| *r > 0.0).count();
    assert!(under > over, "under {under} over {over}");
}

#[test]
fn residual_plot_of_exact_fit_is_flat() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("flat.svg");
    lnq()
        .args([
            "residuals",
            "--x",
            "FP",
            "--y",
            "Effort",
            "--model",
            "power",
            "--criterion",
            "lnq",
            "--input",
        ])
        .arg(fixture("power_noiseless.csv"))
        .arg("--svg")
        .arg(&svg)
        .assert()
        .success();
    let b = bars(&fs::read_to_string(&svg).unwrap());
    assert_eq!(b.len(), 12);
    assert!(b.iter().all(|(r, h)| r.abs() < 1e-9 && *h < 1e-3), "{b:?}");
}

#[test]
fn tables_with_few_replications_skip_comparison() {
    let dir = TempDir::new().unwrap();
    let out = stdout_of(
        lnq()
            .args(["tables", "--reps", "10", "--seed", "7", "--out"])
            .arg(dir.path()),
    );
    assert!(out.contains("comparison: insufficient replications (10 < 10000)"));
    for k in 1..=5 {
        assert!(dir.path().join(format!("Table{k}.csv")).exists());
    }
}

#[test]
fn tables_are_reproducible_from_the_seed() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        lnq()
            .args(["tables", "--reps", "200", "--seed", "99", "--out"])
            .arg(dir.path())
            .assert()
            .success();
    }
    for k in 1..=5 {
        let name = format!("Table{k}.csv");
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap()
        );
    }
}

#[test]
fn simulate_prints_every_metric_per_sigma() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("sim.csv");
    let out = stdout_of(
        lnq()
            .args([
                "simulate",
                "--scenario",
                "const-add",
                "--sigma",
                "1,2.5",
                "--reps",
                "50",
                "--seed",
                "3",
                "--out",
            ])
            .arg(&csv),
    );
    let rows: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("1\t") || l.starts_with("2.5\t"))
        .collect();
    assert_eq!(rows.len(), 8);
    let table = fs::read_to_string(csv).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert_eq!(table.lines().next().unwrap().split(',').count(), 13);
}

#[test]
fn invalid_options_are_rejected() {
    let fit = |model: &str, criterion: &str| {
        lnq()
            .args([
                "fit",
                "--x",
                "FP",
                "--y",
                "Effort",
                "--model",
                model,
                "--criterion",
                criterion,
                "--input",
            ])
            .arg(fixture("power_noiseless.csv"))
            .assert()
            .failure();
    };
    fit("cubic", "lnq");
    fit("power", "rmse");
    lnq().args(["tables", "--reps", "0"]).assert().failure();
    lnq()
        .args([
            "simulate",
            "--scenario",
            "const-add",
            "--sigma",
            "-1",
            "--reps",
            "5",
        ])
        .assert()
        .failure();
    lnq()
        .args(["simulate", "--scenario", "exp-mult"])
        .assert()
        .failure();
    lnq()
        .args([
            "metrics",
            "--actual",
            "a",
            "--pred",
            "p",
            "--input",
            "/nonexistent.csv",
        ])
        .assert()
        .failure();
}
