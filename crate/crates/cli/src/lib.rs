//! The `rnlm` command-line tool: simulation, denoising, evaluation and
//! diagnostic tables on top of the `rnlm` library.

pub mod commands;
pub mod error;
pub mod format;
pub mod io;
pub mod manifest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{CliError, Result};
pub use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "rnlm", version, about = "Non-local means denoising of Rician magnitude images")]
pub struct Cli {
    /// Worker threads (default: one per hardware thread). Outputs do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=4096))]
    pub threads: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a phantom and a Rician-corrupted copy.
    Simulate(SimulateArgs),
    /// Denoise a magnitude image.
    Denoise(DenoiseArgs),
    /// Compare an estimate with the ground truth.
    Evaluate(EvaluateArgs),
    /// Tabulate similarity measures against a fixed first argument.
    SmTable(SmTableArgs),
    /// Monte-Carlo histogram of the two bias-removal estimators.
    HistExperiment(HistArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// shepp-logan, modified-shepp-logan, disks, ramp or flat:VALUE
    #[arg(long, default_value = "shepp-logan")]
    pub phantom: String,
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    #[arg(long, default_value_t = 255.0)]
    pub intensity_max: f64,
    /// Noise level as a fraction of the phantom maximum.
    #[arg(long, default_value_t = 0.10)]
    pub sigma_frac: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Noisy magnitude image.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Noise-free amplitude image.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("noise").required(true).args(["sigma", "sigma_from_background"])))]
pub struct DenoiseArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// gnlm, nlms or nlmr
    #[arg(long, default_value = "nlmr")]
    pub method: String,
    /// Noise standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Convenience estimate of sigma from a signal-free rectangle x0,y0,w,h
    /// (Rayleigh mean inversion).
    #[arg(long, value_name = "X0,Y0,W,H")]
    pub sigma_from_background: Option<String>,
    /// Patch width in pixels (odd).
    #[arg(long, default_value_t = 5)]
    pub patch: usize,
    /// Search window width in pixels (odd).
    #[arg(long, default_value_t = 11)]
    pub search: usize,
    #[arg(long, default_value_t = 0.4)]
    pub h: f64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub est: PathBuf,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report (and a manifest) to this file.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write the SSIM map, clamped at 0, as an image.
    #[arg(long)]
    pub ssim_map: Option<PathBuf>,
    /// SSIM dynamic range L (default: maximum of the truth image).
    #[arg(long)]
    pub dynamic_range: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SmTableArgs {
    /// Comma-separated measures: gauss, gauss-limit, snl1, snl2, snl3, snl4.
    #[arg(long, default_value = "snl1,snl2,snl3,snl4")]
    pub measures: String,
    /// First argument, held fixed.
    #[arg(long, default_value_t = 10.0)]
    pub fixed: f64,
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    #[arg(long, default_value_t = 40.0)]
    pub to: f64,
    #[arg(long, default_value_t = 401)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// CSV destination (default: standard output).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HistArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// Samples averaged per trial.
    #[arg(long, default_value_t = 25)]
    pub avg: usize,
    /// True amplitude.
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub bins: usize,
    /// Histogram CSV: bin_left,bin_right,count1,count2.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Summary JSON file (default: standard output).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Reports go to `out`, diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let argv: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(cli, &argv, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("rnlm: error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, argv: &[String], out: &mut dyn Write) -> Result<()> {
    if let Command::Replay(r) = &cli.command {
        let manifest = RunManifest::read(&r.manifest)?;
        if manifest.tool != manifest::TOOL {
            return Err(CliError::format(&r.manifest, format!("not an {} manifest", manifest::TOOL)));
        }
        if manifest.argv.first().map(String::as_str) == Some("replay") {
            return Err(CliError::usage("a manifest cannot replay another replay"));
        }
        let mut args = vec![manifest::TOOL.to_string()];
        args.extend(manifest.argv.iter().cloned());
        let replayed = Cli::try_parse_from(&args)
            .map_err(|e| CliError::format(&r.manifest, format!("recorded arguments do not parse: {e}")))?;
        return execute(replayed, &manifest.argv, out);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0) as usize)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start thread pool: {e}")))?;
    // Reports are buffered so the caller's writer need not cross threads.
    let mut report = Vec::new();
    pool.install(|| match &cli.command {
        Command::Simulate(a) => commands::simulate(a, argv),
        Command::Denoise(a) => commands::denoise(a, argv),
        Command::Evaluate(a) => commands::evaluate(a, argv, &mut report),
        Command::SmTable(a) => commands::sm_table(a, argv, &mut report),
        Command::HistExperiment(a) => commands::hist_experiment(a, argv, &mut report),
        Command::Replay(_) => unreachable!("handled above"),
    })?;
    out.write_all(&report)
        .and_then(|()| out.flush())
        .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
}
