//! The `gperiods` command.
//!
//! Exit status: 0 on success, 2 when an input is rejected (the message names
//! the flag), 1 on runtime failures such as IO errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gperiods_core::fillout::{coverage_of_samples, SampleStrategy};
use gperiods_core::numtheory::euler_totient;
use gperiods_core::periods::subplot_containment_check;
use gperiods_core::{
    applicability_check, dihedral_order, period_value, rasterize, rescale_identity_check,
    sample_image, verify_dihedral, ColoringMode, Error, LaurentMap, PeriodParams, PeriodSet,
};

use crate::export::{complex_pair, write_csv, write_json, FilloutJson, OracleCheck, VerifyReport};
use crate::parallel;
use crate::png_io::{encode_png, export_layers, LayerError, RenderSidecar};
use crate::spec_args::{ArgError, RenderArgs};

#[derive(Debug, Parser)]
#[command(name = "gperiods", version, about = "Compute, verify and plot Gaussian periods")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write every orbit of G(n, omega) with its value and color class.
    Compute {
        #[command(flatten)]
        period: PeriodArgs,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format; inferred from the `--out` extension by default.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Render G(n, omega) to a PNG, optionally with one PNG per color class.
    Render {
        #[command(flatten)]
        period: PeriodArgs,
        #[command(flatten)]
        render: RenderArgs,
        /// PNG output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for `layer_<class>.png` files and `render.json`.
        #[arg(long)]
        layers_dir: Option<PathBuf>,
    },
    /// Check the dihedral, rescaling and subplot laws and spot-check values.
    Verify {
        #[command(flatten)]
        period: PeriodArgs,
        /// Matching tolerance for the symmetry check.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure how G(q, omega) covers the image of its Laurent map.
    Fillout {
        #[command(flatten)]
        period: PeriodArgs,
        /// Coverage radius; defaults to 0.05 * d.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Number of image samples (grid strategy rounds up to a full grid).
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Sample the torus randomly with this seed instead of on a grid.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "GP_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Byte budget of the orbit cache.
        #[arg(long, env = "GP_CACHE_BYTES", default_value_t = 1 << 30)]
        cache_bytes: usize,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PeriodArgs {
    /// Modulus.
    #[arg(long)]
    pub n: u64,
    /// Generator; any integer coprime to n.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: i64,
    /// Coloring modulus, a divisor of n.
    #[arg(long, default_value_t = 1)]
    pub c: u64,
    #[arg(long, value_enum, default_value_t = Mode::Standard)]
    pub mode: Mode,
    /// Worker threads; all available cores by default.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Standard,
    PeriodSquared,
}

impl From<Mode> for ColoringMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Standard => ColoringMode::Standard,
            Mode::PeriodSquared => ColoringMode::PeriodSquared,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid {flag}: {message}")]
    Invalid { flag: &'static str, message: String },
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

/// Flag responsible for an engine error.
pub fn flag_for(err: &Error) -> &'static str {
    match err {
        Error::NotCoprime { .. } => "--omega",
        Error::NotDivisor { .. } => "--c",
        Error::TooLarge { .. } => "--n",
        Error::NotPositive { what } if *what == "n" || *what == "q" => "--n",
        Error::NotPositive { .. } | Error::SampleBudget { .. } => "--samples",
        Error::Overflow { .. } | Error::ArityMismatch { .. } => "--omega",
        Error::PaletteTooSmall { .. } => "--palette",
        Error::InvalidLayerOrder { .. } => "--layer-order",
        Error::InvalidDimension { .. } => "--width/--height",
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Invalid {
            flag: flag_for(&err),
            message: err.to_string(),
        }
    }
}

impl From<ArgError> for CliError {
    fn from(err: ArgError) -> Self {
        CliError::Invalid {
            flag: err.flag,
            message: err.reason,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Runtime(err.into())
    }
}

impl From<LayerError> for CliError {
    fn from(err: LayerError) -> Self {
        match err {
            LayerError::Render(e) => e.into(),
            LayerError::Io(e) => e.into(),
        }
    }
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gperiods: {e:#}");
            e.exit_code()
        }
    }
}

fn params_of(args: &PeriodArgs) -> Result<PeriodParams, CliError> {
    if args.threads == Some(0) {
        return Err(CliError::Invalid {
            flag: "--threads",
            message: "must be at least 1".into(),
        });
    }
    Ok(PeriodParams::with_cap(args.n, args.omega, crate::max_n_from_env())?)
}

fn compute_set(args: &PeriodArgs) -> Result<PeriodSet, CliError> {
    let params = params_of(args)?;
    Ok(parallel::compute_period_set(
        &params,
        args.c,
        args.mode.into(),
        args.threads,
    )?)
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_report<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Compute {
            period,
            out,
            format,
        } => {
            let set = compute_set(&period)?;
            let format = format.unwrap_or(match out.as_deref().and_then(Path::extension) {
                Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
                _ => Format::Csv,
            });
            let w = open_out(out.as_deref())?;
            match format {
                Format::Csv => write_csv(&set, w)?,
                Format::Json => write_json(&set, w)?,
            }
            Ok(())
        }
        Command::Render {
            period,
            render,
            out,
            layers_dir,
        } => {
            let spec = render.to_spec()?;
            if out.is_none() && layers_dir.is_none() {
                return Err(CliError::Invalid {
                    flag: "--out",
                    message: "give --out and/or --layers-dir".into(),
                });
            }
            let set = compute_set(&period)?;
            if let Some(path) = out {
                let img = rasterize(&set, &spec)?;
                std::fs::write(&path, encode_png(&img))?;
                RenderSidecar::new(&set, &spec, Vec::new())?.write(&path.with_extension("json"))?;
            }
            if let Some(dir) = layers_dir {
                parallel::with_threads(period.threads, || export_layers(&set, &spec, &dir))?;
            }
            Ok(())
        }
        Command::Verify { period, tol, out } => {
            if !(tol > 0.0) {
                return Err(CliError::Invalid {
                    flag: "--tol",
                    message: "must be positive".into(),
                });
            }
            let set = compute_set(&period)?;
            write_report(&verify_report(&set, tol), out.as_deref())
        }
        Command::Fillout {
            period,
            epsilon,
            samples,
            seed,
            out,
        } => {
            let params = params_of(&period)?;
            let applicability = applicability_check(params.n(), params.omega() as i64)?;
            let d = params.d();
            let epsilon = epsilon.unwrap_or(0.05 * d as f64);
            if !(epsilon > 0.0) {
                return Err(CliError::Invalid {
                    flag: "--epsilon",
                    message: "must be positive".into(),
                });
            }
            let map = LaurentMap::new(d)?;
            let strategy = match seed {
                Some(seed) => SampleStrategy::Random { seed },
                None => SampleStrategy::Grid,
            };
            let image = sample_image(&map, samples, strategy)?;
            let set = parallel::compute_period_set(&params, 1, ColoringMode::Standard, period.threads)?;
            let points: Vec<_> = set.values().collect();
            let coverage = coverage_of_samples(&points, &image, epsilon, strategy);
            write_report(
                &FilloutJson {
                    applicable: applicability.applicable(),
                    applicability,
                    arity: euler_totient(d) as usize,
                    coverage,
                },
                out.as_deref(),
            )
        }
        Command::Serve {
            port,
            bind,
            cache_bytes,
            threads,
        } => {
            let config = crate::service::ServiceConfig {
                cache_bytes,
                workers: threads.unwrap_or_else(default_threads),
                max_n: crate::max_n_from_env(),
                ..crate::service::ServiceConfig::default()
            };
            let addr = format!("{bind}:{port}");
            crate::service::serve_blocking(&addr, config).map_err(CliError::Runtime)
        }
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Up to `count` indices spread evenly over `0..len`.
fn spread(len: usize, count: usize) -> Vec<usize> {
    if len <= count {
        return (0..len).collect();
    }
    (0..count).map(|i| i * (len - 1) / (count - 1)).collect()
}

pub const ORACLE_TOL: f64 = 1e-9;

pub fn verify_report(set: &PeriodSet, tol: f64) -> VerifyReport {
    let params = set.params;
    let fold = dihedral_order(&params);
    let dihedral = verify_dihedral(set, fold, tol);
    let subplot = subplot_containment_check(set);

    let oracle_checks: Vec<OracleCheck> = spread(set.orbits.len(), 32)
        .into_iter()
        .map(|i| {
            let o = &set.orbits[i];
            let definitional = period_value(&params, o.rep as i64);
            OracleCheck {
                rep: o.rep,
                orbit_value: complex_pair(o.value),
                definitional: complex_pair(definitional),
                error: (o.value - definitional).norm(),
            }
        })
        .collect();

    let rescale_checks: Vec<(u64, u64, bool)> = spread(set.orbits.len(), 16)
        .into_iter()
        .map(|i| set.orbits[i].rep)
        .filter(|&k| k > 0)
        .map(|k| {
            let (m, holds) = rescale_identity_check(&params, k);
            (k, m, holds)
        })
        .collect();

    let holds = dihedral.holds
        && subplot
        && rescale_checks.iter().all(|r| r.2)
        && oracle_checks.iter().all(|c| c.error < ORACLE_TOL);
    VerifyReport {
        params: (&params).into(),
        c: set.c,
        dihedral_order: fold,
        dihedral,
        subplot_containment: subplot,
        rescale_checks,
        oracle_checks,
        oracle_tolerance: ORACLE_TOL,
        holds,
    }
}
