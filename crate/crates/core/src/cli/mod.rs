//! Command-line front end of the `qpol` binary.
//!
//! Every command writes one JSON document (to `--out` or stdout); commands
//! that produce sampled data also write CSV when asked. Exit codes: 0 on
//! success, 2 for usage errors and unreadable or unknown inputs, 3 when
//! validation fails, 4 when a reconstruction does not converge.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_NOT_CONVERGED: u8 = 4;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "qpol", version, about = "Quantum polarization of few-photon states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TolProfile {
    Exact,
    Experimental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    OneTwo,
    TwoOne,
    Noon,
    H3,
    V3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HomModeArg {
    SamePair,
    Independent,
}

#[derive(Debug, clap::Args)]
pub struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a state file for a named state or re-emit a state file.
    State {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        output: Output,
    },
    /// Moment tensors and, with --order, a sampled sphere field.
    Moments {
        #[arg(long)]
        state: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        order: Option<u32>,
        /// Number of Fibonacci sample points.
        #[arg(long, default_value_t = 2048)]
        resolution: usize,
        /// Sample a `THETAxPHI` grid instead of the Fibonacci lattice.
        #[arg(long)]
        grid: Option<String>,
        /// Write the sampled field as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Invariance triple and six-class label.
    Classify {
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value_t = TolProfile::Exact)]
        tol_profile: TolProfile,
        /// Threshold for the experimental profile.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Variance-sum bounds and pairwise uncertainty products.
    Bounds {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        output: Output,
    },
    /// Run a preparation chain from a file or a preset.
    Prep {
        #[arg(long, conflicts_with = "preset")]
        chain: Option<PathBuf>,
        #[arg(long, value_enum, required_unless_present = "chain")]
        preset: Option<Preset>,
        /// Splitter phase in degrees (presets only).
        #[arg(long, default_value_t = -85.7, allow_hyphen_values = true)]
        phi: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Simulate the HWP2 scan and estimate the splitter phase.
    Calibrate {
        #[arg(long, default_value_t = -85.7, allow_hyphen_values = true)]
        phi: f64,
        /// Scan step in degrees over [-45, 45].
        #[arg(long, default_value_t = 2.5)]
        step: f64,
        /// Expected counts at the brightest setting; omit for a noiseless scan.
        #[arg(long)]
        shots: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Simulate tomography counts for the sixteen default settings.
    TomoSim {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Poisson-distributed trials per setting.
        #[arg(long)]
        poisson: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Maximum-likelihood reconstruction from a counts file.
    TomoFit {
        #[arg(long)]
        counts: PathBuf,
        /// Named state or state file to compare against.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = 5000)]
        max_iter: usize,
        #[arg(long, value_enum, default_value_t = TolProfile::Experimental)]
        tol_profile: TolProfile,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 2048)]
        resolution: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Joint spectrum, filtering, Schmidt number and two-photon dip.
    Spectral {
        #[arg(long, default_value_t = 3.0)]
        filter_fwhm: f64,
        #[arg(long, default_value_t = 780.0)]
        filter_center: f64,
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[arg(long, value_enum, default_value_t = HomModeArg::SamePair)]
        hom_mode: HomModeArg,
        /// Delay half-range in fs; the scan uses 201 points.
        #[arg(long, default_value_t = 2000.0)]
        delay_range: f64,
        /// Raw dip visibility to correct for multi-pair noise.
        #[arg(long, default_value_t = 0.95)]
        v_raw: f64,
        #[arg(long, default_value_t = 0.025)]
        p1: f64,
        #[arg(long, default_value_t = 0.0006)]
        p2: f64,
        #[arg(long, default_value_t = 0.00002)]
        p3: f64,
        #[arg(long)]
        jsa_csv: Option<PathBuf>,
        #[arg(long)]
        hom_csv: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

/// A failure together with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownState(_) | Error::Io(_) | Error::Json(_) | Error::Format(_) => EXIT_USAGE,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
        }
    };
    match commands::execute(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

pub fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}
