//! Command-line commands and exit codes.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use folia_core::algebra::Value;
use folia_core::cones::{certify_transversal, falsify_transversal, SampleOptions};
use folia_core::eta::{continuity_scan, point_to_complex, MetricContext, ProductLeafDecl};
use folia_core::foliation::{classify_order, classify_strong, Ledger};
use folia_core::variety::Slice;

use crate::pipeline::{prepare, recheck_report, run_pipeline, PipelineOptions, Prepared};
use crate::report::{emit_json, emit_scan_csv, emit_text, hypotheses_text, verdicts_json, verdicts_text};
use crate::syntax::{parse_assignments, parse_foliation_file, parse_point, FoliationFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_ANALYSIS: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "folia", version, about = "Removable singularities and transversality for polynomial foliations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full analysis of a .fol file.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-verify every certificate before writing.
        #[arg(long)]
        recheck: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// A_l and B_l at one point.
    Classify {
        file: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long)]
        order: usize,
        /// Frozen coordinates of one submanifold, e.g. "x=0, w=0".
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Transversality at one point.
    Transversal {
        file: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 3)]
        arc_exponent: u32,
        #[arg(long, default_value_t = 3)]
        cert_degree: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Hypotheses of the continuity and extension theorems.
    Theorems { file: PathBuf },
    /// Lower bounds for eta along a segment, as CSV.
    Eta {
        file: PathBuf,
        /// "P->Q": samples q(s) = Q + s (P - Q).
        #[arg(long)]
        scan: String,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Error with its exit code. `stdout` holds output produced before the failure.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
    pub stdout: String,
}

fn parse_fail(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_PARSE, error: e.into(), stdout: String::new() }
}

fn analysis_fail(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_ANALYSIS, error: e.into(), stdout: String::new() }
}

fn violation(stdout: String, e: anyhow::Error) -> Failure {
    Failure { code: EXIT_VIOLATION, error: e, stdout }
}

fn load(path: &Path) -> Result<(FoliationFile, Vec<u8>), Failure> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display())).map_err(parse_fail)?;
    let text = std::str::from_utf8(&bytes).context("input is not UTF-8").map_err(parse_fail)?;
    let file = parse_foliation_file(text).map_err(parse_fail)?;
    Ok((file, bytes))
}

fn point_arg(text: &str, file: &FoliationFile, prepared: &Prepared) -> Result<Vec<Value>, Failure> {
    let p = parse_point(text, &file.ctx).map_err(parse_fail)?;
    match &prepared.change {
        Some(c) => c.point(&p).map_err(analysis_fail),
        None => Ok(p),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<String, Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(analysis_fail)?;
            Ok(String::new())
        }
        None => Ok(text.to_string()),
    }
}

/// Runs a command; the returned text goes to stdout.
pub fn execute(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Analyze { file, out, recheck, format } => {
            let (f, bytes) = load(file)?;
            let report = run_pipeline(&f, &bytes, &PipelineOptions::default()).map_err(analysis_fail)?;
            if *recheck {
                let fails = recheck_report(&report);
                if !fails.is_empty() {
                    return Err(violation(String::new(), anyhow!("recheck failed:\n{}", fails.join("\n"))));
                }
            }
            let text = match format {
                Format::Json => emit_json(&report),
                Format::Text => emit_text(&report),
            };
            let shown = write_out(out.as_deref(), &text)?;
            if !report.consistency.is_empty() {
                let msgs: Vec<String> = report.consistency.iter().map(|v| format!("{}: {}", v.rule, v.message)).collect();
                return Err(violation(shown, anyhow!("consistency violations:\n{}", msgs.join("\n"))));
            }
            Ok(shown)
        }
        Command::Classify { file, point, order, sigma, format } => {
            let (f, _) = load(file)?;
            let prepared = prepare(&f).map_err(analysis_fail)?;
            let model = &prepared.model;
            let p = point_arg(point, &f, &prepared)?;
            let mut opts = PipelineOptions::default().classify;
            opts.assume_exhaustive = f.assume_exhaustive;
            let mut ledger = Ledger::default();
            match sigma {
                Some(spec) => {
                    let a = parse_assignments(spec, &f.ctx).map_err(parse_fail)?;
                    let s = Slice::new(model.nvars(), a);
                    if s.dimension() != order + 1 {
                        return Err(analysis_fail(anyhow!(
                            "a submanifold for order {order} has dimension {}, this one has {}",
                            order + 1,
                            s.dimension()
                        )));
                    }
                    classify_strong(model, &p, &s, &opts, &mut ledger);
                }
                None => {
                    classify_order(model, &p, *order, &[], &opts, &mut ledger);
                }
            }
            Ok(match format {
                Format::Text => verdicts_text(&model.ctx, &ledger),
                Format::Json => serde_json::to_string_pretty(&verdicts_json(&model.ctx, &ledger)).expect("json") + "\n",
            })
        }
        Command::Transversal { file, point, arc_exponent, cert_degree, format } => {
            let (f, _) = load(file)?;
            let prepared = prepare(&f).map_err(analysis_fail)?;
            let model = &prepared.model;
            let p = point_arg(point, &f, &prepared)?;
            let mut ledger = Ledger::default();
            let sample = SampleOptions { max_exponent: (*arc_exponent).max(1), ..SampleOptions::default() };
            let cert = certify_transversal(model, &p, *cert_degree);
            if cert.is_yes() {
                ledger.push(cert);
            } else {
                ledger.push(cert);
                ledger.push(falsify_transversal(model, &p, &sample));
            }
            Ok(match format {
                Format::Text => verdicts_text(&model.ctx, &ledger),
                Format::Json => serde_json::to_string_pretty(&verdicts_json(&model.ctx, &ledger)).expect("json") + "\n",
            })
        }
        Command::Theorems { file } => {
            let (f, bytes) = load(file)?;
            let report = run_pipeline(&f, &bytes, &PipelineOptions::default()).map_err(analysis_fail)?;
            let text = hypotheses_text(&report);
            if !report.consistency.is_empty() {
                return Err(violation(text, anyhow!("consistency violations in the ledger")));
            }
            Ok(text)
        }
        Command::Eta { file, scan, samples, out } => {
            let (f, _) = load(file)?;
            let prepared = prepare(&f).map_err(analysis_fail)?;
            let model = &prepared.model;
            let Some((a, b)) = scan.split_once("->") else {
                return Err(parse_fail(anyhow!("scan must look like \"P->Q\"")));
            };
            let start = point_arg(a.trim(), &f, &prepared)?;
            let target = point_arg(b.trim(), &f, &prepared)?;
            let radius = model
                .domain
                .radius()
                .ok_or_else(|| analysis_fail(anyhow!("eta scans need a polydisc domain")))?;
            let metric = MetricContext::new(radius).map_err(analysis_fail)?;
            let decl = f.product.map(|k| ProductLeafDecl { coordinate: k });
            if decl.is_some() && radius != 1.0 {
                return Err(analysis_fail(anyhow!("exact product values need the unit polydisc")));
            }
            let rows = continuity_scan(
                model,
                &metric,
                &point_to_complex(model, &start),
                &point_to_complex(model, &target),
                *samples,
                decl.as_ref(),
                &PipelineOptions::default().shoot,
            )
            .map_err(analysis_fail)?;
            write_out(out.as_deref(), &emit_scan_csv(&model.ctx.vars, &rows))
        }
    }
}

/// Caps the worker pool from `FOLIA_THREADS`.
pub fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("FOLIA_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("FOLIA_THREADS={v} is not a number"))?;
        if n == 0 {
            bail!("FOLIA_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
