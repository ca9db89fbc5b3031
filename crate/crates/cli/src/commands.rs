//! Command-line surface and exit-code policy.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use dirac_reduce::emfield::{FieldConfig, CATALOG};
use dirac_reduce::gridops::{read_dump, write_dump, DumpedField, ScalarGridField};
use dirac_reduce::Error;

use crate::config::ExperimentConfig;
use crate::experiments;
use crate::report::{Format, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

/// Every flag can also be set through an environment variable with the
/// `DIRAC_REDUCE_` prefix, e.g. `DIRAC_REDUCE_SEED=7`.
#[derive(Debug, Parser)]
#[command(
    name = "dirac-reduce",
    version,
    about = "One-component reduction of the Dirac equation: checks and experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON experiment config; every key is optional.
    #[arg(long, global = true, env = "DIRAC_REDUCE_CONFIG")]
    pub config: Option<PathBuf>,
    /// Seed of the single random generator.
    #[arg(long, global = true, env = "DIRAC_REDUCE_SEED")]
    pub seed: Option<u64>,
    /// Number of refinements after the coarse grid.
    #[arg(long, global = true, env = "DIRAC_REDUCE_REFINE")]
    pub refine: Option<usize>,
    /// Output directory for reports and dumps.
    #[arg(long, global = true, env = "DIRAC_REDUCE_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, env = "DIRAC_REDUCE_FORMAT")]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Algebra and identity suite for a gamma representation.
    Validate { representation: String },
    /// Field catalog.
    Fields {
        #[command(subcommand)]
        action: FieldsAction,
    },
    /// Crank-Nicolson reference solutions, one dump per level.
    Evolve,
    /// One-component residual of dumped blocks (spinor or component).
    Reduce { inputs: Vec<PathBuf> },
    /// Rebuilds spinor blocks from dumped components.
    Reconstruct { inputs: Vec<PathBuf> },
    /// Full round trip with convergence orders and the eta sweep.
    Equivalence,
}

#[derive(Debug, Subcommand)]
pub enum FieldsAction {
    List,
    Describe {
        name: String,
        /// Parameters as key=value.
        #[arg(long = "param", short = 'p')]
        params: Vec<String>,
    },
}

impl GlobalArgs {
    pub fn load_config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_path(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(k) = self.refine {
            cfg.levels = k + 1;
        }
        if let Some(o) = &self.out {
            cfg.output.dir = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        Ok(cfg)
    }
}

/// Maps an error chain to an exit code.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::DegenerateField | Error::CoverageShortfall { .. }) => EXIT_DEGENERATE,
        _ => EXIT_CONFIG,
    }
}

/// Runs a parsed command and returns its exit code; errors are printed.
pub fn main_with(cli: Cli) -> i32 {
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code_for(&e)
        }
    }
}

pub fn run(cli: Cli) -> anyhow::Result<i32> {
    let cfg = cli.global.load_config()?;
    let report = match cli.command {
        Command::Validate { representation } => {
            experiments::validate(&representation, cfg.seed, &cfg.tolerances)?
        }
        Command::Fields { action } => {
            fields(action, &cfg)?;
            return Ok(EXIT_PASS);
        }
        Command::Evolve => {
            let dir = require_out(&cfg)?;
            let (blocks, report) = experiments::evolve_levels(&cfg)?;
            for (k, b) in blocks.iter().enumerate() {
                dump_to(&dir.join(format!("psi_level{k}.bin")), b)?;
            }
            report
        }
        Command::Reduce { inputs } => {
            let comps = load_components(&inputs, &cfg)?;
            experiments::reduce_blocks(&cfg, &comps)?
        }
        Command::Reconstruct { inputs } => {
            let comps = load_components(&inputs, &cfg)?;
            let (blocks, report) = experiments::reconstruct_components(&cfg, &comps)?;
            if let Some(dir) = &cfg.output.dir {
                for (k, b) in blocks.iter().enumerate() {
                    dump_to(&dir.join(format!("psi_reconstructed_level{k}.bin")), b)?;
                }
            }
            report
        }
        Command::Equivalence => experiments::equivalence(&cfg)?,
    };
    emit(&report, &cfg)?;
    Ok(if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn require_out(cfg: &ExperimentConfig) -> anyhow::Result<PathBuf> {
    match &cfg.output.dir {
        Some(d) => {
            std::fs::create_dir_all(d).with_context(|| format!("cannot create {}", d.display()))?;
            Ok(d.clone())
        }
        None => bail!("this command writes dumps; pass --out <dir>"),
    }
}

fn dump_to<T: dirac_reduce::gridops::DumpValue>(
    path: &Path,
    field: &dirac_reduce::gridops::GridField<T>,
) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
    );
    write_dump(field, &mut w)?;
    w.flush()?;
    Ok(())
}

fn load_components(
    inputs: &[PathBuf],
    cfg: &ExperimentConfig,
) -> anyhow::Result<Vec<ScalarGridField>> {
    if inputs.is_empty() {
        bail!("no input dumps given");
    }
    inputs
        .iter()
        .map(|p| {
            let f = File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            Ok(match read_dump(BufReader::new(f))? {
                DumpedField::Scalar(s) => s,
                DumpedField::Spinor(b) => experiments::component_of(&b, cfg)?,
            })
        })
        .collect()
}

/// Writes the report to the output directory or stdout; the summary goes to stderr.
fn emit(report: &Report, cfg: &ExperimentConfig) -> anyhow::Result<()> {
    eprint!("{}", report.summary());
    let stem = report.command.split_whitespace().next().unwrap_or("report");
    match &cfg.output.dir {
        Some(dir) => {
            let path = report.export(dir, stem, cfg.output.format)?;
            eprintln!("report written to {}", path.display());
        }
        None => {
            let mut out = std::io::stdout().lock();
            match cfg.output.format {
                Format::Json => out.write_all(report.to_json().as_bytes())?,
                Format::Csv => report.write_csv(&mut out)?,
            }
        }
    }
    Ok(())
}

fn fields(action: FieldsAction, cfg: &ExperimentConfig) -> anyhow::Result<()> {
    match action {
        FieldsAction::List => {
            for name in CATALOG {
                println!("{name}");
            }
        }
        FieldsAction::Describe { name, params } => {
            let mut kv = Vec::new();
            for p in &params {
                let (k, v) = p
                    .split_once('=')
                    .with_context(|| format!("parameter `{p}` is not key=value"))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .with_context(|| format!("parameter `{k}` is not a number"))?;
                kv.push((k.trim().to_string(), v));
            }
            let refs: Vec<(&str, f64)> = kv.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            let field = FieldConfig::new(&name, &refs).build()?;
            print!(
                "{}",
                experiments::describe_field(&field, &cfg.grid.coarse_grid()?)
            );
        }
    }
    Ok(())
}
