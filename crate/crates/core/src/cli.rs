//! Dispatch of validated configurations to the numerical modules, and report
//! serialization.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::asymptotics::{
    convergence_study, counting_vs_exact, kunz_shift, thermo_density, KunzShift, ThermoPoint,
};
use crate::coeff::{s_series, write_sk_csv, SeriesValue, TestFunction};
use crate::config::{Command, Format, RunConfig, VerifyMode};
use crate::error::{Error, Result};
use crate::geometry::{self, summarize, DomainSpec, Estimate, GeometrySummary};
use crate::report::{csv_num, json_document};
use crate::special1d::{model_table, write_model_csv};

/// Result of `magtrace coeffs`.
#[derive(Debug, Clone, Serialize)]
pub struct CoeffsReport {
    pub geometry: GeometrySummary,
    pub function: TestFunction,
    pub c0: Estimate,
    pub c1: Estimate,
    /// Field value at which the per-index boundary densities are tabulated.
    pub reference_b: f64,
    pub s_series: SeriesValue,
}

#[derive(Debug, Clone, Serialize)]
pub struct KunzReport {
    pub b: f64,
    pub k: usize,
    pub rows: Vec<KunzShift>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThermoReport {
    pub b: f64,
    pub function: TestFunction,
    pub rows: Vec<ThermoPoint>,
}

/// Serialized output of one run.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub command: Command,
    pub format: Format,
    pub text: String,
}

fn render<T: Serialize>(command: Command, body: &T) -> Result<String> {
    Ok(json_document(command.name(), body)?)
}

fn csv<F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>>(write: F) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}

/// Runs the computation for `config` and renders it in `format` (or the
/// configured one).
pub fn execute(config: &RunConfig, format: Option<Format>) -> Result<Artifact> {
    let format = format.or(config.output().format).unwrap_or_default();
    let command = config.command();
    let text = match config {
        RunConfig::Coeffs {
            domain,
            field,
            function,
            tolerance,
            ..
        } => {
            let geometry = summarize(domain, field);
            let c0 = geometry::c0(function, domain, field, tolerance)?;
            let c1 = geometry::c1(function, domain, field, tolerance)?;
            let reference_b = {
                let nodes = domain.boundary_quadrature(1);
                let b0 = field.eval(nodes[0].x, nodes[0].y);
                if nodes
                    .iter()
                    .all(|n| (field.eval(n.x, n.y) - b0).abs() <= 1e-12 * b0)
                {
                    b0
                } else {
                    geometry.b_min
                }
            };
            let series = s_series(reference_b, function, tolerance)?;
            let report = CoeffsReport {
                geometry,
                function: *function,
                c0,
                c1,
                reference_b,
                s_series: series,
            };
            match format {
                Format::Json => render(command, &report)?,
                Format::Csv => csv(|b| write_sk_csv(b, &report.s_series.terms))?,
            }
        }
        RunConfig::Model1d {
            xi, k_max, spacing, ..
        } => {
            let rows = model_table(xi, *k_max, *spacing)?;
            match format {
                Format::Json => render(command, &rows)?,
                Format::Csv => csv(|b| write_model_csv(b, &rows))?,
            }
        }
        RunConfig::Verify {
            domain,
            field,
            function,
            tolerance,
            mode,
            h,
            e,
            k,
            ..
        } => match mode {
            VerifyMode::Trace => {
                let f = function.ok_or_else(|| {
                    Error::Precondition("trace mode needs a test function".into())
                })?;
                let report = convergence_study(domain, field, &f, h, tolerance)?;
                match format {
                    Format::Json => render(command, &report)?,
                    Format::Csv => csv(|b| report.write_csv(b))?,
                }
            }
            VerifyMode::Count => {
                let (DomainSpec::Disk { radius }, Some(b)) = (domain, field.constant_value())
                else {
                    return Err(Error::Precondition(
                        "count mode needs a disk with constant field".into(),
                    ));
                };
                let (e, k) = (e.unwrap_or(f64::NAN), k.unwrap_or(0));
                let report = counting_vs_exact(*radius, b, e, k, h, 1e-10)?;
                match format {
                    Format::Json => render(command, &report)?,
                    Format::Csv => csv(|b| report.write_csv(b))?,
                }
            }
        },
        RunConfig::Kunz { b, k, e, tol, .. } => {
            let rows = e
                .iter()
                .map(|&ev| kunz_shift(*b, ev, *k, *tol))
                .collect::<Result<Vec<_>>>()?;
            let report = KunzReport { b: *b, k: *k, rows };
            match format {
                Format::Json => render(command, &report)?,
                Format::Csv => csv(|out| {
                    writeln!(out, "E,value,err_est")?;
                    for r in &report.rows {
                        writeln!(
                            out,
                            "{},{},{}",
                            csv_num(r.e),
                            csv_num(r.value),
                            csv_num(r.err_est)
                        )?;
                    }
                    Ok(())
                })?,
            }
        }
        RunConfig::Thermo {
            b,
            beta,
            mu,
            l,
            tolerance,
            ..
        } => {
            let f = TestFunction::LogPressure {
                beta: *beta,
                mu: *mu,
            };
            let rows = l
                .iter()
                .map(|&lv| thermo_density(*b, &f, lv, tolerance))
                .collect::<Result<Vec<_>>>()?;
            let report = ThermoReport {
                b: *b,
                function: f,
                rows,
            };
            match format {
                Format::Json => render(command, &report)?,
                Format::Csv => csv(|out| {
                    writeln!(out, "L,lhs,rhs,gap,gap_times_l,trace_err,bookkeeping_error")?;
                    for r in &report.rows {
                        writeln!(
                            out,
                            "{},{},{},{},{},{},{}",
                            csv_num(r.l),
                            csv_num(r.lhs),
                            csv_num(r.rhs),
                            csv_num(r.gap),
                            csv_num(r.gap_times_l),
                            csv_num(r.trace_err),
                            csv_num(r.bookkeeping_error)
                        )?;
                    }
                    Ok(())
                })?,
            }
        }
    };
    Ok(Artifact {
        command,
        format,
        text,
    })
}

/// Executes `config` and writes the artifact to `out` (or the configured
/// path, or stdout when neither is set).
pub fn run(config: &RunConfig, out: Option<&Path>, format: Option<Format>) -> Result<Artifact> {
    let artifact = execute(config, format)?;
    let target = out
        .map(Path::to_path_buf)
        .or_else(|| config.output().path.as_ref().map(Into::into));
    match target {
        Some(path) => std::fs::write(&path, &artifact.text)?,
        None => std::io::stdout().write_all(artifact.text.as_bytes())?,
    }
    Ok(artifact)
}

/// Caps the worker pool from `MAGTRACE_THREADS` (unset or 0: automatic).
pub fn configure_threads() -> Result<()> {
    let threads = match std::env::var("MAGTRACE_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Error::Precondition(format!(
                "MAGTRACE_THREADS must be a non-negative integer, got {v:?}"
            ))
        })?,
        Err(_) => 0,
    };
    if threads > 0 {
        // a second initialization (e.g. in tests) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}
