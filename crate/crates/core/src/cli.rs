//! Command implementations behind the `social-cache` binary.
//!
//! Each command writes its human-readable output to a caller-supplied writer
//! and maps failures onto the process exit codes in [`ExitStatus`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::matching::MatchingError;
use crate::sim::{aggregate, format_g6, results_from_csv, results_to_csv, run_experiment, SimError};
use crate::verify::{run_verification, VerifyOptions, VerifyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ValidationFailure = 1,
    PropertyViolation = 2,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("property violation in {0} of the verified instances")]
    Violation(usize),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Violation(_) => ExitStatus::PropertyViolation,
            CliError::Sim(SimError::Unstable(_) | SimError::TraceViolation(_)) => ExitStatus::PropertyViolation,
            _ => ExitStatus::ValidationFailure,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_owned(), source }
}

/// Runs the experiment sweep and writes the results CSV to `out`.
///
/// Without a config path the built-in defaults are used; `seed` replaces the
/// configured seed list with a single seed.
pub fn cmd_run(config: Option<&Path>, out: &Path, seed: Option<u64>, log: &mut impl Write) -> Result<(), CliError> {
    let mut config = match config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = seed {
        config.seeds = vec![seed];
    }
    config.validate()?;
    let results = run_experiment(&config)?;
    std::fs::write(out, results_to_csv(&results)).map_err(io_err(out))?;

    let stdout = io_err(Path::new("<stdout>"));
    writeln!(
        log,
        "# popularity={:?} requests={:?} seeds={}",
        config.popularity_mode,
        config.request_mode,
        config.seeds.len()
    )
    .map_err(stdout)?;
    for s in aggregate(&results) {
        writeln!(
            log,
            "beta={} requests={} sat_ma={} sat_ra={} time_ma={} time_ra={}",
            format_g6(s.beta),
            s.requests,
            format_g6(s.sat_ma),
            format_g6(s.sat_ra),
            format_g6(s.time_ma),
            format_g6(s.time_ra)
        )
        .map_err(io_err(Path::new("<stdout>")))?;
    }
    Ok(())
}

/// Runs the random-instance property suite. Any violation becomes
/// [`CliError::Violation`] after the first counterexample is printed.
pub fn cmd_verify(options: &VerifyOptions, log: &mut impl Write) -> Result<VerifyReport, CliError> {
    let report = run_verification(options)?;
    let stdout = || io_err(Path::new("<stdout>"));
    writeln!(
        log,
        "trials={} stable={} propositions={} oracle={}/{} failures={}",
        report.trials,
        report.stable,
        report.propositions,
        report.oracle_agreed,
        report.oracle_checked,
        report.failures.len()
    )
    .map_err(stdout())?;
    if let Some(first) = report.failures.first() {
        writeln!(log, "counterexample (trial {}): {}", first.trial, first.reason).map_err(stdout())?;
        writeln!(log, "{}", serde_json::to_string(&first.instance).expect("instance serializes")).map_err(stdout())?;
        return Err(CliError::Violation(report.failures.len()));
    }
    Ok(report)
}

/// Wide table: one row per request count, MA and RA columns per β.
fn series(points: &[crate::sim::SweepSummary], pick: impl Fn(&crate::sim::SweepSummary) -> (f64, f64)) -> String {
    let mut betas: Vec<f64> = Vec::new();
    for p in points {
        if !betas.contains(&p.beta) {
            betas.push(p.beta);
        }
    }
    let counts: BTreeSet<usize> = points.iter().map(|p| p.requests).collect();
    let mut cells: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    for p in points {
        let b = betas.iter().position(|&x| x == p.beta).expect("collected");
        cells.insert((p.requests, b), pick(p));
    }
    let mut out = String::from("requests");
    for b in &betas {
        let b = format_g6(*b);
        write!(out, ",ma_beta{b},ra_beta{b}").unwrap();
    }
    out.push('\n');
    for c in counts {
        write!(out, "{c}").unwrap();
        for b in 0..betas.len() {
            match cells.get(&(c, b)) {
                Some((ma, ra)) => write!(out, ",{},{}", format_g6(*ma), format_g6(*ra)).unwrap(),
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

/// Aggregates a results CSV over seeds into `satisfaction.csv` and
/// `download_time.csv` under `out_dir`.
pub fn cmd_figures(csv: &Path, out_dir: &Path, log: &mut impl Write) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(csv).map_err(io_err(csv))?;
    let results = results_from_csv(&text)?;
    let points = aggregate(&results);
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let files = [
        ("satisfaction.csv", series(&points, |p| (p.sat_ma, p.sat_ra))),
        ("download_time.csv", series(&points, |p| (p.time_ma, p.time_ra))),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, body).map_err(io_err(&path))?;
        writeln!(log, "wrote {}", path.display()).map_err(io_err(Path::new("<stdout>")))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::ExperimentResult;

    fn row(beta: f64, requests: usize, seed: u64, sat_ma: f64) -> ExperimentResult {
        ExperimentResult { beta, requests, seed, sat_ma, sat_ra: 0.25, time_ma: 10.0, time_ra: 20.0 }
    }

    #[test]
    fn figures_aggregate_per_beta() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("results.csv");
        let rows = vec![
            row(0.25, 50, 1, 0.7),
            row(0.25, 50, 2, 0.8),
            row(1.0, 50, 1, 1.0),
            row(1.0, 50, 2, 1.0),
            row(0.25, 100, 1, 0.6),
        ];
        std::fs::write(&csv, results_to_csv(&rows)).unwrap();
        let mut log = Vec::new();
        let files = cmd_figures(&csv, &dir.path().join("figs"), &mut log).unwrap();
        let sat = std::fs::read_to_string(&files[0]).unwrap();
        assert_eq!(sat, "requests,ma_beta0.25,ra_beta0.25,ma_beta1,ra_beta1\n50,0.75,0.25,1,0.25\n100,0.6,0.25,,\n");
        let time = std::fs::read_to_string(&files[1]).unwrap();
        assert!(time.starts_with("requests,ma_beta0.25,ra_beta0.25,ma_beta1,ra_beta1\n50,10,20,10,20\n"));
    }

    #[test]
    fn single_row_gives_single_point() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("one.csv");
        std::fs::write(&csv, results_to_csv(&[row(0.5, 7, 1, 0.5)])).unwrap();
        let files = cmd_figures(&csv, dir.path(), &mut Vec::new()).unwrap();
        let sat = std::fs::read_to_string(&files[0]).unwrap();
        assert_eq!(sat.lines().count(), 2);
    }

    #[test]
    fn malformed_csv_is_a_validation_failure() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("bad.csv");
        std::fs::write(&csv, "not,a,results,file\n").unwrap();
        let err = cmd_figures(&csv, dir.path(), &mut Vec::new()).unwrap_err();
        assert_eq!(err.exit_status(), ExitStatus::ValidationFailure);
    }

    #[test]
    fn missing_config_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.json");
        let err = cmd_run(Some(&missing), &dir.path().join("out.csv"), None, &mut Vec::new()).unwrap_err();
        assert_eq!(err.exit_status(), ExitStatus::ValidationFailure);
        assert!(err.to_string().contains("nope.json"));
    }

    #[test]
    fn verify_fault_maps_to_property_violation() {
        let options = VerifyOptions {
            trials: 50,
            seed: 2,
            fault: Some(crate::verify::Fault::ReversedReceivers),
            ..Default::default()
        };
        let mut log = Vec::new();
        let err = cmd_verify(&options, &mut log).unwrap_err();
        assert_eq!(err.exit_status(), ExitStatus::PropertyViolation);
        assert!(String::from_utf8(log).unwrap().contains("counterexample"));
    }
}
