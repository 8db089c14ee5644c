//! Command-line front end: `validate`, `gridsearch`, `run`, `extract-check`.
//!
//! Exit codes: 0 success, 1 dataset/validation failure, 2 runtime or solver
//! failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{load_dataset_with, Dataset, LoadOptions, Modality};
use crate::error::DatasetError;
use crate::eval::{
    grid_search_with, make_folds, run_experiment_with, EvalOptions, GridSpec, DEFAULT_FOLDS,
    DEFAULT_GRID_VALUES, DEFAULT_SEED,
};
use crate::features::fuse;
use crate::report::{render_with_footer, FooterInfo, Format};
use crate::svr::{Gamma, HyperParams};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "embodiment",
    version,
    about = "Predict expectations of robots from embodiment features"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a dataset directory.
    Validate(DataArgs),
    /// Select C and epsilon by cross-validated grid search.
    Gridsearch(RunArgs),
    /// Run every modality combination and write the results table.
    Run(RunArgs),
    /// Check embedding files written by the feature extractor.
    ExtractCheck(DataArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Require 165 robots and 59 hand-crafted features.
    #[arg(long)]
    pub expect_reference_shape: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Markdown,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Markdown => Format::Markdown,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// RBF width, or `scale` for 1 / (cols · var(X)).
    #[arg(long, default_value = "scale", value_parser = parse_gamma)]
    pub gamma: Gamma,
    /// Report path (defaults to report.md or report.csv).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
    pub format: FormatArg,
    /// Worker threads for cell-level parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Comma-separated C candidates.
    #[arg(long, value_delimiter = ',')]
    pub grid_c: Option<Vec<f64>>,
    /// Comma-separated epsilon candidates.
    #[arg(long, value_delimiter = ',')]
    pub grid_eps: Option<Vec<f64>>,
}

fn parse_gamma(s: &str) -> Result<Gamma, String> {
    if s.eq_ignore_ascii_case("scale") {
        return Ok(Gamma::Scale);
    }
    match s.parse::<f64>() {
        Ok(g) if g > 0.0 && g.is_finite() => Ok(Gamma::Value(g)),
        _ => Err(format!("expected `scale` or a positive number, got {s:?}")),
    }
}

impl RunArgs {
    fn hp(&self) -> HyperParams {
        HyperParams {
            c: self.c,
            epsilon: self.epsilon,
            gamma: self.gamma,
        }
    }

    fn grid(&self) -> Option<GridSpec> {
        if self.grid_c.is_none() && self.grid_eps.is_none() {
            return None;
        }
        Some(GridSpec {
            c_values: self
                .grid_c
                .clone()
                .unwrap_or_else(|| DEFAULT_GRID_VALUES.to_vec()),
            epsilon_values: self
                .grid_eps
                .clone()
                .unwrap_or_else(|| DEFAULT_GRID_VALUES.to_vec()),
        })
    }

    fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            jobs: self.jobs,
            ..Default::default()
        }
    }

    fn output_path(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| match self.format {
            FormatArg::Markdown => PathBuf::from("report.md"),
            FormatArg::Csv => PathBuf::from("report.csv"),
        })
    }
}

/// Runs a parsed command, writing to `out`/`err`; returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match &cli.command {
        Command::Validate(a) => cmd_validate(a, out, err),
        Command::Gridsearch(a) => cmd_gridsearch(a, out, err),
        Command::Run(a) => cmd_run(a, out, err),
        Command::ExtractCheck(a) => cmd_extract_check(a, out, err),
    }
}

fn load(a: &DataArgs, err: &mut dyn Write) -> Result<Dataset, u8> {
    let opts = LoadOptions {
        expect_reference_shape: a.expect_reference_shape.then_some(true),
    };
    load_dataset_with(&a.data, opts).map_err(|e| {
        match e {
            DatasetError::Invalid(issues) => {
                for i in issues {
                    let _ = writeln!(err, "{i}");
                }
            }
            other => {
                let _ = writeln!(err, "error: {other}");
            }
        }
        EXIT_INVALID
    })
}

pub fn cmd_validate(a: &DataArgs, _out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match load(a, err) {
        Ok(_) => EXIT_OK,
        Err(code) => code,
    }
}

pub fn cmd_gridsearch(a: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let ds = match load(&a.data, err) {
        Ok(ds) => ds,
        Err(code) => return code,
    };
    let grid = a.grid().unwrap_or_default();
    let result = make_folds(ds.len(), a.k, a.seed)
        .and_then(|plan| grid_search_with(&ds, &grid, &plan, a.gamma, &a.eval_options()));
    match result {
        Ok(r) => {
            let _ = writeln!(out, "evaluated {} (C, epsilon) pairs", r.evaluated.len());
            let _ = writeln!(
                out,
                "best C={} epsilon={} pooled_mse={:.6}",
                r.best.c, r.best.epsilon, r.pooled_mse
            );
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

pub fn cmd_run(a: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let ds = match load(&a.data, err) {
        Ok(ds) => ds,
        Err(code) => return code,
    };
    let opts = a.eval_options();
    let plan = match make_folds(ds.len(), a.k, a.seed) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_RUNTIME;
        }
    };
    let (hp, grid_selected) = match a.grid() {
        Some(grid) => match grid_search_with(&ds, &grid, &plan, a.gamma, &opts) {
            Ok(r) => (r.best, true),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_RUNTIME;
            }
        },
        None => (a.hp(), false),
    };
    let results = match run_experiment_with(&ds, &hp, &plan, &opts) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_RUNTIME;
        }
    };
    let info = FooterInfo {
        seed: a.seed,
        hp,
        k: a.k,
        fingerprint: ds.fingerprint(),
        grid_selected,
    };
    let text = match render_with_footer(&results, a.format.into(), &info) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_RUNTIME;
        }
    };
    let path = a.output_path();
    if let Err(e) = write_atomic(&path, text.as_bytes()) {
        let _ = writeln!(err, "error: writing {}: {e}", path.display());
        return EXIT_RUNTIME;
    }
    let _ = writeln!(out, "wrote {}", path.display());
    EXIT_OK
}

/// Validates extractor output and reports the embedding widths. Fails when
/// an embedding block is identical for every robot.
pub fn cmd_extract_check(a: &DataArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let ds = match load(a, err) {
        Ok(ds) => ds,
        Err(code) => return code,
    };
    let mut code = EXIT_OK;
    for m in [Modality::Metaphor, Modality::Image] {
        let block = fuse(
            &ds,
            crate::features::ModalityCombo::new(&[m]).expect("non-empty"),
        );
        let first = block.values.row(0);
        let degenerate = ds.len() > 1 && block.values.rows().all(|r| r == first);
        if degenerate {
            let _ = writeln!(err, "{}: every robot has the same embedding", m.file_name());
            code = EXIT_INVALID;
        }
        let _ = writeln!(
            out,
            "{}: {} robots x {} dims",
            m.file_name(),
            ds.len(),
            ds.dims().get(m)
        );
    }
    code
}

/// Writes to a sibling temp file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    res
}
