//! Command-line front end.
//!
//! Four subcommands: `maxcorr` evaluates the closed-form maximal
//! correlation machinery for a family spec, `oracle` re-estimates it
//! numerically without the closed forms, `simulate` runs the Monte Carlo
//! sampling models, and `reproduce` recomputes the full reference matrix.
//!
//! The result document is the only thing written to stdout (or to
//! `--out` when given); all diagnostics go to stderr. Exit codes:
//! 0 success, 1 reproduction failures, 2 invalid input, 3 series or
//! truncation not proven finite, 4 the iterative oracle did not
//! converge, 5 degenerate variance or marginal.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::maxcorr::{maximal_correlation, splitting_record_bound};
use crate::oracle::{ace_maxcorr, discretize, joint_pmf, svd_maxcorr};
use crate::simulate::{run as run_sim, Model, SimEstimate, SimRequest};
use crate::suite::{reproduce, to_csv, SuiteParams};

#[derive(Parser)]
#[command(
    name = "lancaster",
    version,
    about = "Maximal correlation for bivariate families with diagonal cross-moment structure"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal correlation, attaining index, and truncation status for a family.
    Maxcorr {
        /// Path to a family spec JSON document.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Highest polynomial degree examined.
        #[arg(long = "K", default_value_t = 12)]
        k: usize,
    },
    /// Closed-form-free estimate of the maximal correlation for a family.
    Oracle {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Bins per axis when a continuous family must be discretized.
        #[arg(long, default_value_t = 128)]
        bins: usize,
        /// Convergence tolerance for the iterative estimate.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Monte Carlo correlation for a sampling-model request.
    Simulate {
        /// Path to a simulation request JSON document.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Override the seed in the request.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the replicate count in the request.
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Recompute every reference value and compare.
    Reproduce {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Only run checks whose id contains this substring.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = 12345)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        replicates: usize,
        #[arg(long, default_value_t = 128)]
        bins: usize,
    },
}

#[derive(Serialize)]
struct OracleReport {
    #[serde(rename = "R_hat")]
    r_hat: f64,
    method: String,
    residual_vs_closed_form: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    estimate: SimEstimate,
    bound: f64,
}

/// Parse arguments, run, and return the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::SeriesNotTerminated { .. } => 3,
        Error::DegenerateVariance(_) | Error::DegenerateMarginal(_) => 5,
        _ => 2,
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Maxcorr {
            spec,
            out,
            format,
            k,
        } => cmd_maxcorr(&spec, out.as_deref(), format, k),
        Command::Oracle {
            spec,
            out,
            format,
            bins,
            tol,
        } => cmd_oracle(&spec, out.as_deref(), format, bins, tol),
        Command::Simulate {
            spec,
            out,
            format,
            seed,
            replicates,
        } => cmd_simulate(&spec, out.as_deref(), format, seed, replicates),
        Command::Reproduce {
            out,
            format,
            filter,
            seed,
            replicates,
            bins,
        } => cmd_reproduce(out.as_deref(), format, filter.as_deref(), seed, replicates, bins),
    }
}

fn read_family(path: &Path) -> Result<FamilySpec> {
    let text = fs::read_to_string(path)?;
    let spec: FamilySpec = serde_json::from_str(&text)?;
    Ok(spec)
}

fn cmd_maxcorr(spec_path: &Path, out: Option<&Path>, format: Format, k: usize) -> Result<i32> {
    let spec = read_family(spec_path)?;
    let report = maximal_correlation(&spec, k)?;
    emit(&serialize(&report, format)?, out)?;
    if !report.truncation_proven() {
        eprintln!("truncation not proven: {}", report.truncation_note);
        return Ok(3);
    }
    Ok(0)
}

fn cmd_oracle(
    spec_path: &Path,
    out: Option<&Path>,
    format: Format,
    bins: usize,
    tol: f64,
) -> Result<i32> {
    let spec = read_family(spec_path)?;
    let closed = spec.closed_form_r()?;
    let (r_hat, method, converged) = if matches!(spec, FamilySpec::FinitePopOrderStats { .. }) {
        (svd_maxcorr(&joint_pmf(&spec)?)?, "svd-exact-pmf".to_string(), true)
    } else {
        let joint = discretize(&spec, bins)?;
        let ace = ace_maxcorr(&joint, tol, 10_000)?;
        (ace.r_hat, format!("ace-{bins}-bins"), ace.converged)
    };
    let report = OracleReport {
        r_hat,
        method,
        residual_vs_closed_form: r_hat - closed,
    };
    emit(&serialize(&report, format)?, out)?;
    if !converged {
        eprintln!("the iterative estimate did not converge; best value reported");
        return Ok(4);
    }
    Ok(0)
}

fn cmd_simulate(
    spec_path: &Path,
    out: Option<&Path>,
    format: Format,
    seed: Option<u64>,
    replicates: Option<usize>,
) -> Result<i32> {
    let text = fs::read_to_string(spec_path)?;
    let mut request: SimRequest = serde_json::from_str(&text)?;
    if let Some(seed) = seed {
        request.seed = seed;
    }
    if let Some(replicates) = replicates {
        request.replicates = replicates;
    }
    let bound = model_bound(&request)?;
    let estimate = run_sim(&request)?;
    let report = SimulateReport { estimate, bound };
    emit(&serialize(&report, format)?, out)?;
    Ok(0)
}

/// The maximal correlation the simulated plain correlation is bounded by.
fn model_bound(request: &SimRequest) -> Result<f64> {
    let p = &request.params;
    let need = |v: Option<usize>, name: &str| {
        v.ok_or_else(|| Error::InvalidSpec(format!("missing parameter `{name}`")))
    };
    match request.model {
        Model::OrderStats => {
            let spec = FamilySpec::UniformOrderStats {
                i: need(p.i, "i")?,
                j: need(p.j, "j")?,
                n: need(p.n, "n")?,
            };
            Ok(maximal_correlation(&spec, 4)?.r)
        }
        Model::Records => {
            let spec = FamilySpec::ExponentialRecords {
                n: need(p.n, "n")?,
                m: need(p.m, "m")?,
            };
            Ok(maximal_correlation(&spec, 4)?.r)
        }
        Model::Splitting => {
            splitting_record_bound(need(p.n, "n")?, need(p.n1, "n1")?, need(p.n2, "n2")?)
        }
        Model::FinitePop => {
            let values = p
                .values
                .as_ref()
                .ok_or_else(|| Error::InvalidSpec("finite-pop needs `values`".into()))?;
            let spec = FamilySpec::FinitePopOrderStats {
                i: need(p.i, "i")?,
                j: need(p.j, "j")?,
                n: need(p.n, "n")?,
                pop: values.len(),
            };
            Ok(maximal_correlation(&spec, 4)?.r)
        }
    }
}

fn cmd_reproduce(
    out: Option<&Path>,
    format: Format,
    filter: Option<&str>,
    seed: u64,
    replicates: usize,
    bins: usize,
) -> Result<i32> {
    let params = SuiteParams {
        seed,
        replicates,
        bins,
    };
    let rows = reproduce(&params, filter)?;
    let doc = match format {
        Format::Json => {
            let mut doc = serde_json::to_string_pretty(&rows)?;
            doc.push('\n');
            doc
        }
        Format::Csv => to_csv(&rows),
    };
    emit(&doc, out)?;
    let failures: Vec<&str> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.check_id.as_str())
        .collect();
    if rows.is_empty() {
        eprintln!("no checks matched the filter");
    }
    if failures.is_empty() {
        eprintln!("{} checks passed", rows.len());
        Ok(0)
    } else {
        eprintln!("{} of {} checks failed: {}", failures.len(), rows.len(), failures.join(", "));
        Ok(1)
    }
}

fn serialize<T: Serialize>(value: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut doc = serde_json::to_string_pretty(value)?;
            doc.push('\n');
            Ok(doc)
        }
        Format::Csv => Ok(flat_csv(&serde_json::to_value(value)?)),
    }
}

/// Flatten one JSON object (nested objects become dotted keys) into a
/// two-line CSV document.
fn flat_csv(value: &serde_json::Value) -> String {
    fn walk(prefix: &str, value: &serde_json::Value, cells: &mut Vec<(String, String)>) {
        match value {
            serde_json::Value::Object(map) => {
                for (key, inner) in map {
                    let name = if prefix.is_empty() {
                        key.clone()
                    } else {
                        format!("{prefix}.{key}")
                    };
                    walk(&name, inner, cells);
                }
            }
            serde_json::Value::Null => cells.push((prefix.to_string(), String::new())),
            serde_json::Value::String(s) => {
                cells.push((prefix.to_string(), format!("\"{}\"", s.replace('"', "\"\""))))
            }
            other => cells.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut cells = Vec::new();
    walk("", value, &mut cells);
    let header: Vec<&str> = cells.iter().map(|(k, _)| k.as_str()).collect();
    let row: Vec<&str> = cells.iter().map(|(_, v)| v.as_str()).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn emit(doc: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, doc)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{doc}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_csv_handles_nesting_null_and_quotes() {
        let value = serde_json::json!({
            "estimate": {"corr_hat": 0.5, "note": "a \"b\", c"},
            "bound": 1.0,
            "empty": null,
        });
        let csv = flat_csv(&value);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "bound,empty,estimate.corr_hat,estimate.note");
        assert_eq!(lines[1], "1.0,,0.5,\"a \"\"b\"\", c\"");
    }

    #[test]
    fn exit_codes_map_error_classes() {
        assert_eq!(exit_code(&Error::InvalidSpec("x".into())), 2);
        assert_eq!(
            exit_code(&Error::SeriesNotTerminated {
                cap: 3,
                last_term: 0.1
            }),
            3
        );
        assert_eq!(exit_code(&Error::DegenerateVariance("x".into())), 5);
        assert_eq!(exit_code(&Error::DegenerateMarginal("x".into())), 5);
        assert_eq!(exit_code(&Error::UnsupportedFamily("x".into())), 2);
    }

    #[test]
    fn cli_parses_every_subcommand() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from([
            "lancaster", "maxcorr", "--spec", "family.json", "--K", "8",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Maxcorr { k: 8, .. }));
        let cli = Cli::try_parse_from([
            "lancaster",
            "reproduce",
            "--filter",
            "closed-form",
            "--format",
            "csv",
        ])
        .unwrap();
        assert!(matches!(
            cli.command,
            Command::Reproduce {
                replicates: 100_000,
                seed: 12345,
                bins: 128,
                ..
            }
        ));
    }
}
