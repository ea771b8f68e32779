//! Command-line runner and HTTP service.
//!
//! Exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 total conflict.

pub mod render;
pub mod server;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use innoscore_core::combination::combine_all;
use innoscore_core::indicators::ImplementabilityConfig;
use innoscore_core::pipeline::{evaluate, group_bodies, indicator_report, EvaluateOptions};
use innoscore_core::survey::{
    diagram_csv, diagram_data, parse_observations, parse_source_data_with_diagnostics,
    DIAGRAM_CSV_HEADER,
};
use innoscore_core::{fixtures, Diagnostic, Error, NormalizationMode, PairRule, SourceData};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_COMPUTATION: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "innoscore",
    version,
    about = "Interval evidence fusion for innovativeness assessment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Semantics {
    Envelope,
    Intersection,
}

impl From<Semantics> for PairRule {
    fn from(s: Semantics) -> Self {
        match s {
            Semantics::Envelope => PairRule::Envelope,
            Semantics::Intersection => PairRule::Intersection,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Norm {
    Linear,
    Statistical,
    Exponential,
}

impl From<Norm> for NormalizationMode {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Linear => NormalizationMode::Linear,
            Norm::Statistical => NormalizationMode::Statistical,
            Norm::Exponential => NormalizationMode::Exponential,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an evaluation document and list every problem found.
    Validate {
        /// Document path, or `-` for stdin.
        path: PathBuf,
    },
    /// Fuse all expert groups for every component and indicator.
    Evaluate {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Semantics::Envelope)]
        semantics: Semantics,
        #[arg(long, value_enum, default_value_t = Norm::Linear)]
        norm: Norm,
        /// Display digits; defaults to the document's RoundDigsNumber.
        #[arg(long)]
        round: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Leave the generation time out of the report.
        #[arg(long)]
        no_timestamp: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Novelty, relevance and implementability from an observation file.
    Indicators {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Norm::Linear)]
        norm: Norm,
        /// Divisor for mean gaps between maxima; defaults to the series span.
        #[arg(long)]
        gap_scale: Option<f64>,
        /// Gap ratio assumed for a series with fewer than two maxima.
        #[arg(long, default_value_t = 1.0)]
        sparse_gap_ratio: f64,
        #[arg(long, default_value_t = 4)]
        round: u32,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cumulated-mass diagram data of each group before fusion.
    Diagram {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        component: usize,
        #[arg(long, default_value_t = 0)]
        indicator: usize,
        /// Display digits for CSV; defaults to full precision.
        #[arg(long)]
        round: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
    /// Run the bundled three-group example and compare with published values.
    Demo {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Write the example document to this path.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

/// Failure carrying the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn io(path: &Path, err: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }

    fn input(err: Error) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: err.to_string(),
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::io(path, e))?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn load_document(path: &Path, err: &mut dyn Write) -> Result<SourceData, Failure> {
    let text = read_input(path)?;
    let (data, warnings) = parse_source_data_with_diagnostics(&text).map_err(Failure::input)?;
    for w in warnings {
        let _ = writeln!(err, "{w}");
    }
    Ok(data)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<u8, Failure> {
    let text = read_input(path)?;
    let diagnostics: Vec<Diagnostic> = match parse_source_data_with_diagnostics(&text) {
        Ok((_, warnings)) => warnings,
        Err(Error::Validation(d)) => d,
        Err(e) => return Err(Failure::input(e)),
    };
    for d in &diagnostics {
        let _ = writeln!(out, "{d}");
    }
    let errors = diagnostics.iter().filter(|d| d.is_error()).count();
    if errors > 0 {
        let _ = writeln!(out, "{}: invalid ({errors} errors)", path.display());
        Ok(EXIT_VALIDATION)
    } else {
        let _ = writeln!(out, "{}: valid", path.display());
        Ok(EXIT_OK)
    }
}

fn cmd_demo(format: Format, export: Option<&Path>, out: &mut dyn Write) -> Result<u8, Failure> {
    if let Some(path) = export {
        std::fs::write(path, fixtures::WORKED_EXAMPLE).map_err(|e| Failure::io(path, e))?;
    }
    let (data, _) =
        parse_source_data_with_diagnostics(fixtures::WORKED_EXAMPLE).map_err(Failure::input)?;
    let text = match format {
        Format::Table => {
            let bodies = group_bodies(&data, 0, 0).map_err(Failure::input)?;
            let result = combine_all(&bodies, PairRule::Envelope).map_err(Failure::input)?;
            let scale = &data.estimate_scale;
            render::demo_comparison(&bodies, &result, |i| scale.term_for(i).map(str::to_owned))
        }
        Format::Json => to_json(&evaluate(&data, &EvaluateOptions::default())),
        Format::Csv => render::run_report_csv(&evaluate(&data, &EvaluateOptions::default())),
    };
    emit(&text, None, out)?;
    Ok(EXIT_OK)
}

/// Runs every subcommand except `serve`.
pub fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match command {
        Command::Validate { path } => cmd_validate(&path, out),
        Command::Evaluate {
            path,
            semantics,
            norm,
            round,
            format,
            no_timestamp,
            output,
        } => load_document(&path, err).and_then(|data| {
            let options = EvaluateOptions {
                rule: semantics.into(),
                normalization: norm.into(),
                round_digits: round,
                generated_at: (!no_timestamp)
                    .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
            };
            let report = evaluate(&data, &options);
            let text = match format {
                Format::Table => render::run_report_table(&report),
                Format::Json => to_json(&report),
                Format::Csv => render::run_report_csv(&report),
            };
            emit(&text, output.as_deref(), out)?;
            for (eval, failure) in report.failures() {
                let _ = writeln!(
                    err,
                    "{} / {}: {}",
                    eval.component, eval.indicator, failure.message
                );
            }
            Ok(if report.has_invalid_input() {
                EXIT_VALIDATION
            } else if report.has_total_conflict() {
                EXIT_COMPUTATION
            } else {
                EXIT_OK
            })
        }),
        Command::Indicators {
            path,
            norm,
            gap_scale,
            sparse_gap_ratio,
            round,
            format,
            output,
        } => read_input(&path).and_then(|text| {
            let config = ImplementabilityConfig {
                gap_scale,
                sparse_gap_ratio,
            };
            let report = parse_observations(&text)
                .and_then(|records| indicator_report(&records, norm.into(), &config))
                .map_err(Failure::input)?;
            let text = match format {
                Format::Json => to_json(&report),
                Format::Table | Format::Csv => render::indicator_table(&report, round),
            };
            emit(&text, output.as_deref(), out)?;
            Ok(EXIT_OK)
        }),
        Command::Diagram {
            path,
            component,
            indicator,
            round,
            format,
            output,
        } => load_document(&path, err).and_then(|data| {
            let rows = if data.interview_results.is_empty() {
                let _ = writeln!(
                    err,
                    "warning: document holds no interview results; diagram is empty"
                );
                Vec::new()
            } else {
                let bodies = group_bodies(&data, component, indicator).map_err(Failure::input)?;
                diagram_data(&bodies)
            };
            let text = match format {
                Format::Json => to_json(&rows),
                Format::Csv | Format::Table if rows.is_empty() => {
                    format!("{}\n", DIAGRAM_CSV_HEADER.join(","))
                }
                Format::Csv | Format::Table => diagram_csv(&rows, round),
            };
            emit(&text, output.as_deref(), out)?;
            Ok(EXIT_OK)
        }),
        Command::Demo { format, export } => cmd_demo(format, export.as_deref(), out),
        Command::Serve { .. } => Err(Failure {
            code: EXIT_VALIDATION,
            message: "serve runs through serve_blocking".into(),
        }),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

/// Binds `addr` and serves until interrupted.
pub fn serve_blocking(addr: &str) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, server::router())
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
