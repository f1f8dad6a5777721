//! Command-line front end. The `rovclass` binary is a thin wrapper around
//! [`run`].
//!
//! Exit status: 0 on success, 1 on usage or configuration errors, 2 when an
//! input file cannot be read or parsed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use crate::classifier::{ClassifyOptions, NoopProbe};
use crate::error::{Error, Result};
use crate::forest::RoaIndex;
use crate::ingest;
use crate::model::ValidationState;
use crate::pipeline::{classify_files, load_relgraph, run_series};
use crate::relgraph::ProviderMode;
use crate::report::{emit, ClassificationReport, Format, SharedStore};
use crate::rov::{validate_table, CountingMode};
use crate::scenarios::{self, ScenarioName, ScenarioSpec};
use crate::stability::Threshold;

#[derive(Debug, Parser)]
#[command(
    name = "rovclass",
    version,
    about = "Validate BGP routes against ROAs and classify invalid announcements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a RIB against ROAs and print a summary table.
    Validate(ValidateArgs),
    /// Classify invalid (prefix, origin) pairs.
    Classify(ClassifyArgs),
    /// Classify a dated snapshot series and report pair stability.
    Stability(StabilityArgs),
    /// Write a synthetic scenario fixture.
    Scenario(ScenarioArgs),
    /// Serve a report over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub rib: PathBuf,
    #[arg(long)]
    pub roas: PathBuf,
    /// Count distinct (prefix, origin) pairs or raw RIB lines.
    #[arg(long, value_enum, default_value = "distinct")]
    pub mode: ModeArg,
    /// Also write one `prefix|origin|state` line per route.
    #[arg(long)]
    pub per_route: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Follow provider chains instead of direct edges only.
    #[arg(long)]
    pub transitive_providers: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub rib: PathBuf,
    #[arg(long)]
    pub roas: PathBuf,
    #[arg(long)]
    pub rel: PathBuf,
    /// Snapshot date recorded in the report.
    #[arg(long)]
    pub date: Option<NaiveDate>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long)]
    pub series: PathBuf,
    /// Relationship file; defaults to `<series>/as-rel.txt`.
    #[arg(long)]
    pub rel: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0, value_parser = parse_threshold)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub name: ScenarioName,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value = "127.0.0.1:5000")]
    pub bind: SocketAddr,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum ModeArg {
    Distinct,
    Raw,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

fn parse_threshold(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Threshold::new(v).map(Threshold::value).map_err(|e| e.to_string())
}

impl From<ModeArg> for CountingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Distinct => CountingMode::Distinct,
            ModeArg::Raw => CountingMode::Raw,
        }
    }
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

impl OutputArgs {
    fn options(&self) -> ClassifyOptions {
        ClassifyOptions {
            provider_mode: if self.transitive_providers {
                ProviderMode::Transitive
            } else {
                ProviderMode::Direct
            },
        }
    }

    fn write(&self, report: &ClassificationReport, stdout: &mut dyn Write) -> Result<()> {
        match &self.out {
            Some(path) => {
                let file = File::create(path).map_err(|e| Error::file(path, e))?;
                let mut w = BufWriter::new(file);
                emit(report, self.format.into(), &mut w)?;
                w.flush().map_err(|e| Error::file(path, e))
            }
            None => emit(report, self.format.into(), stdout),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = e.print();
            return 1;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                2
            } else {
                1
            }
        }
    }
}

pub fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Validate(args) => validate(&args, stdout),
        Command::Classify(args) => {
            let graph = load_relgraph(&args.rel)?;
            let c = classify_files(&args.rib, &args.roas, &graph, &args.output.options(), &NoopProbe)?;
            let report = ClassificationReport::new(args.date, &c);
            args.output.write(&report, stdout)
        }
        Command::Stability(args) => {
            let threshold = Threshold::new(args.threshold)?;
            let series = ingest::load_series(&args.series)?;
            let rel = args
                .rel
                .clone()
                .or_else(|| series.relationships.clone())
                .ok_or_else(|| {
                    Error::Config(format!(
                        "no --rel given and no {} in {}",
                        ingest::REL_FILE,
                        args.series.display()
                    ))
                })?;
            let graph = load_relgraph(&rel)?;
            let (timelines, last) = run_series(&series, &graph, &args.output.options(), &NoopProbe)?;
            let date = series.snapshots.last().map(|s| s.date);
            let report = ClassificationReport::new(date, &last).with_stability(&timelines, threshold);
            args.output.write(&report, stdout)
        }
        Command::Scenario(args) => {
            let manifest = scenarios::generate(
                ScenarioSpec {
                    name: args.name,
                    seed: args.seed,
                },
                &args.out,
            )?;
            writeln!(
                stdout,
                "wrote {} scenario (seed {}) to {}: {} expected invalid pair(s)",
                args.name,
                args.seed,
                args.out.display(),
                manifest.expected.len()
            )?;
            Ok(())
        }
        Command::Serve(args) => {
            let file = File::open(&args.report).map_err(|e| Error::file(&args.report, e))?;
            let report = ClassificationReport::from_json(std::io::BufReader::new(file))?;
            crate::report::serve_blocking(Arc::new(SharedStore::new(report)), args.bind)
        }
    }
}

fn validate(args: &ValidateArgs, stdout: &mut dyn Write) -> Result<()> {
    let (routes, _) = ingest::read_rib_file(&args.rib)?;
    let (roas, _) = ingest::read_roas_file(&args.roas)?;
    let index = RoaIndex::new(roas);
    let table = validate_table(&routes, &index, args.mode.into());
    let s = &table.summary;
    writeln!(
        stdout,
        "{:<18} {:>12} {:>8}",
        "Validation Result", "Count", "Ratio"
    )?;
    for (name, count, pct) in [
        ("Unknown", s.unknown, s.unknown_pct),
        ("Valid", s.valid, s.valid_pct),
        ("Invalid", s.invalid, s.invalid_pct),
    ] {
        writeln!(stdout, "{name:<18} {count:>12} {pct:>7.2}%")?;
    }
    writeln!(stdout, "{:<18} {:>12}", "Total", s.total)?;
    if s.as_set_excluded > 0 {
        writeln!(stdout, "{:<18} {:>12}", "AS_SET excluded", s.as_set_excluded)?;
    }
    if let Some(path) = &args.per_route {
        write_per_route(path, &routes, &table.outcomes)?;
    }
    Ok(())
}

fn write_per_route(
    path: &Path,
    routes: &[crate::model::RouteEntry],
    outcomes: &[Option<crate::rov::ValidationOutcome<'_>>],
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::file(path, e))?;
    let mut w = BufWriter::new(file);
    for (route, outcome) in routes.iter().zip(outcomes) {
        let state = match outcome.as_ref().map(|o| o.state) {
            None => "as-set",
            Some(ValidationState::Unknown) => "unknown",
            Some(ValidationState::Valid) => "valid",
            Some(ValidationState::Invalid) => "invalid",
        };
        writeln!(w, "{}|{}|{}", route.prefix, route.origin(), state)?;
    }
    w.flush().map_err(|e| Error::file(path, e))
}
