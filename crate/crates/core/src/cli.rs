//! Command-line front end: `train`, `sweep`, `plot` and `report`.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 for runtime
//! failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{
    emit_csv, emit_plot, read_csv, report, run_sweep, DetectorId, FileParamStore, PlotKind,
    SweepConfig,
};
use crate::dpst::{save_params, train, LossMode, TrainConfig};
use crate::error::Error;
use crate::sysmodel::{make_constellation, SystemConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dpst-mimo",
    version,
    about = "Deep-unfolded MIMO detection toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a DPST network and write its parameter file.
    Train(TrainArgs),
    /// Run a BER/timing sweep and write a CSV table.
    Sweep(SweepArgs),
    /// Render an SVG chart from a sweep CSV.
    Plot(PlotArgs),
    /// Print a sweep CSV as an aligned table.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    /// Transmit antennas.
    #[arg(long, default_value_t = 4)]
    pub nt: usize,
    /// Receive antennas.
    #[arg(long, default_value_t = 8)]
    pub nr: usize,
    /// Constellation size M (2, 4, 16 or 64).
    #[arg(long, default_value_t = 4)]
    pub mod_order: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Number of unfolded layers T.
    #[arg(long)]
    pub layers: usize,
    /// Shrinkage starts at layers t >= p*T.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Realizations per minibatch.
    #[arg(long, default_value_t = 24)]
    pub batch: usize,
    /// Optimizer steps.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Adam learning rate.
    #[arg(long, default_value_t = 0.001)]
    pub lr: f64,
    /// Training SNRs in dB, sampled uniformly per batch item.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0,5,10,15,20,25"
    )]
    pub snr_set: Vec<f64>,
    /// Training loss: supervised or residual.
    #[arg(long, default_value = "supervised")]
    pub loss: LossMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output parameter file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Comma-separated detectors: zf, mmse, zf-sic, mmse-sic, ml, dpst:<params.json>.
    #[arg(long, default_value = "zf,mmse,zf-sic,mmse-sic,ml")]
    pub detectors: String,
    /// SNR points in dB.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0,5,10,15,20,25"
    )]
    pub snr: Vec<f64>,
    /// Channel realizations per (detector, SNR) cell.
    #[arg(long, default_value_t = 10_000)]
    pub frames: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write 0 for wall_time_ms so the CSV is byte-reproducible.
    #[arg(long, default_value_t = false)]
    pub no_timing: bool,
    /// Transmit without noise.
    #[arg(long, default_value_t = false)]
    pub noiseless: bool,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a BER chart here.
    #[arg(long)]
    pub plot_ber: Option<PathBuf>,
    /// Also write a timing chart here.
    #[arg(long)]
    pub plot_time: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Sweep CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Chart kind: ber or time.
    #[arg(long, default_value = "ber")]
    pub kind: PlotKind,
    /// Output SVG.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Sweep CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Train(a) => cmd_train(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Plot(a) => cmd_plot(a),
        Command::Report(a) => cmd_report(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => CliError::Usage(msg),
            other => CliError::Runtime(other),
        }
    }
}

fn cmd_train(a: TrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let shape = SystemConfig::new(a.shape.nt, a.shape.nr, a.shape.mod_order, 0.0)?;
    let c = make_constellation(a.shape.mod_order).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = TrainConfig {
        layers: a.layers,
        p: a.p,
        batch_size: a.batch,
        steps: a.steps,
        snr_set_db: a.snr_set,
        learning_rate: a.lr,
        seed: a.seed,
        loss_mode: a.loss,
        workers: a.workers,
    };
    if cfg.layers == 0 {
        return Err(CliError::Usage("--layers must be at least 1".into()));
    }
    if !(cfg.p > 0.0 && cfg.p <= 1.0) {
        return Err(CliError::Usage(format!("--p {} is outside (0, 1]", cfg.p)));
    }
    let outcome = train(&cfg, &shape, &c)?;
    save_params(&outcome.params, &a.out)?;
    let _ = writeln!(
        out,
        "trained T={} for {} steps; final mean loss {:.6e}; wrote {}",
        cfg.layers,
        cfg.steps,
        outcome.final_loss(),
        a.out.display()
    );
    Ok(())
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let detectors = DetectorId::parse_list(&a.detectors)?;
    let cfg = SweepConfig {
        nt: a.shape.nt,
        nr: a.shape.nr,
        mod_order: a.shape.mod_order,
        snr_list_db: a.snr,
        detectors,
        frames: a.frames,
        seed: a.seed,
        noiseless: a.noiseless,
        record_timing: !a.no_timing,
        workers: a.workers,
    };
    cfg.validate()?;
    make_constellation(cfg.mod_order).map_err(|e| CliError::Usage(e.to_string()))?;
    let workers = cfg.workers.unwrap_or_else(rayon::current_num_threads);
    let _ = writeln!(err, "# workers={workers}");
    let records = run_sweep(&cfg, &FileParamStore::default()).map_err(CliError::Runtime)?;
    emit_csv(&records, &a.out)?;
    if let Some(path) = &a.plot_ber {
        emit_plot(&records, PlotKind::Ber, path)?;
    }
    if let Some(path) = &a.plot_time {
        emit_plot(&records, PlotKind::Time, path)?;
    }
    let _ = write!(out, "{}", report(&records));
    Ok(())
}

fn cmd_plot(a: PlotArgs) -> Result<(), CliError> {
    let records = read_csv(&a.input).map_err(CliError::Runtime)?;
    emit_plot(&records, a.kind, &a.out).map_err(CliError::Runtime)
}

fn cmd_report(a: ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let records = read_csv(&a.input).map_err(CliError::Runtime)?;
    let text = report(&records);
    let _ = writeln!(out, "{}", text.trim_end());
    Ok(())
}
