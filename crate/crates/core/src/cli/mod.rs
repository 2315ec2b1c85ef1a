//! Command-line front end: `specfact factorize|verify|generate`.
//!
//! Exit codes: 0 when the result verifies, 1 for unreadable or invalid
//! input (including spectra that are not positive on the boundary), 2 when
//! a factor fails verification or the pipeline breaks down.

pub mod io;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::generate::{generate, GenerateOptions};
use crate::matfact::{factorize, FactorizationCertificate, PipelineOptions, SpectralFactor};
use crate::polycore::Domain;
use crate::verify::{acceptance_profile, verify_factorization, VerificationReport};
use io::{to_canonical_json, CertificateFile, InstanceFile, IoError, ReportFile};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_FAIL: u8 = 2;

const MIN_GRID: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Disc,
    Line,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Domain {
        match d {
            DomainArg::Disc => Domain::Disc,
            DomainArg::Line => Domain::Line,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "specfact", version, about = "Spectral factorization of matrix Laurent polynomials")]
pub struct Cli {
    /// Boundary curve: the unit circle or the real line. Input files carry
    /// their own domain; when given, this must agree with it. Default: disc.
    #[arg(long, global = true, value_enum)]
    pub domain: Option<DomainArg>,
    /// Acceptance threshold for the reconstruction residual.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Number of boundary points for residual checks.
    #[arg(long, global = true, default_value_t = 512)]
    pub grid: usize,
    /// Return the canonical factor (lower triangular with positive diagonal
    /// at the anchor point).
    #[arg(long, global = true, value_enum, default_value = "on")]
    pub canonical: Switch,
    /// Random seed for `generate` (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; for `generate`, an output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor the spectrum in INPUT and write the factor with its certificate.
    Factorize { input: PathBuf },
    /// Check FACTOR against SPECTRUM and print a verification report.
    Verify { spectrum: PathBuf, factor: PathBuf },
    /// Write a random instance and its canonical factor.
    Generate {
        /// Matrix size.
        #[arg(long)]
        m: usize,
        /// Degree of the planted factor.
        #[arg(long)]
        degree: usize,
        /// Plant a determinant zero on the boundary.
        #[arg(long)]
        boundary_zero: bool,
    },
}

/// Parses `std::env::args` and runs the command.
pub fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    ExitCode::from(run_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock()))
}

/// Parses and runs. Usage errors exit with [`EXIT_INPUT`].
pub fn run_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_INPUT
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_PASS
            }
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    if cli.grid < MIN_GRID || !(cli.tol > 0.0 && cli.tol.is_finite()) {
        let _ = writeln!(err, "specfact: --grid must be at least {MIN_GRID} and --tol positive");
        return EXIT_INPUT;
    }
    let result = match &cli.command {
        Command::Factorize { input } => cmd_factorize(cli, input, out),
        Command::Verify { spectrum, factor } => cmd_verify(cli, spectrum, factor, out),
        Command::Generate { m, degree, boundary_zero } => cmd_generate(cli, *m, *degree, *boundary_zero, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "specfact: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_FAIL };
        let message = match e.stage() {
            Some(stage) => format!("[{stage}] {}", e.root()),
            None => e.to_string(),
        };
        Failure { code, message }
    }
}

fn input_failure(message: String) -> Failure {
    Failure { code: EXIT_INPUT, message }
}

fn resolve_domain(cli: &Cli, file: Domain) -> Result<Domain, Failure> {
    match cli.domain.map(Domain::from) {
        Some(requested) if requested != file => Err(IoError::DomainMismatch { file, requested }.into()),
        _ => Ok(file),
    }
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    written.map_err(|message| Failure { code: EXIT_FAIL, message })
}

fn pass_code(report: &VerificationReport) -> u8 {
    if report.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn cmd_factorize(cli: &Cli, input: &Path, out: &mut dyn Write) -> Result<u8, Failure> {
    let file = InstanceFile::load(input)?;
    let d = resolve_domain(cli, file.domain)?;
    let s = file.to_spectrum()?;
    let opts = PipelineOptions {
        canonical: cli.canonical == Switch::On,
        grid: cli.grid,
        ..PipelineOptions::default()
    };
    let f = factorize(&s, d, &opts)?;
    let report = verify_factorization(&s, &f, d, &acceptance_profile(&s, d, cli.tol), cli.grid);
    let mut result = InstanceFile::from_poly(&f.plus, d, Some(0));
    result.certificate = Some(CertificateFile::new(&f.certificate, Some(&report)));
    emit(cli, &result.to_json(), out)?;
    Ok(pass_code(&report))
}

fn cmd_verify(cli: &Cli, spectrum: &Path, factor: &Path, out: &mut dyn Write) -> Result<u8, Failure> {
    let s_file = InstanceFile::load(spectrum)?;
    let f_file = InstanceFile::load(factor)?;
    let d = resolve_domain(cli, s_file.domain)?;
    if f_file.domain != d {
        return Err(IoError::DomainMismatch { file: f_file.domain, requested: d }.into());
    }
    if f_file.m != s_file.m {
        return Err(input_failure(format!(
            "dimension mismatch: spectrum is {0}x{0}, factor is {1}x{1}",
            s_file.m, f_file.m
        )));
    }
    let s = s_file.to_spectrum()?;
    let plus = f_file.to_poly()?;
    let certificate = match &f_file.certificate {
        Some(c) => c.to_certificate(d, f_file.m)?,
        None => FactorizationCertificate::empty(f_file.m),
    };
    let f = SpectralFactor { plus, certificate };
    let report = verify_factorization(&s, &f, d, &acceptance_profile(&s, d, cli.tol), cli.grid);
    emit(cli, &to_canonical_json(&ReportFile::from(&report)), out)?;
    Ok(pass_code(&report))
}

fn cmd_generate(cli: &Cli, m: usize, degree: usize, boundary_zero: bool, out: &mut dyn Write) -> Result<u8, Failure> {
    if m == 0 {
        return Err(input_failure("--m must be at least 1".into()));
    }
    let d = cli.domain.map(Domain::from).unwrap_or(Domain::Disc);
    let planted = generate(&GenerateOptions {
        m,
        degree,
        seed: cli.seed.unwrap_or(0),
        domain: d,
        boundary_zero,
    })?;
    let instance = InstanceFile::from_poly(&planted.spectrum, d, None);
    let reference = InstanceFile::from_poly(&planted.reference, d, Some(0));
    match &cli.out {
        Some(dir) => {
            let io_fail = |e: std::io::Error| Failure { code: EXIT_FAIL, message: format!("{}: {e}", dir.display()) };
            std::fs::create_dir_all(dir).map_err(io_fail)?;
            instance.save(&dir.join("instance.json"))?;
            reference.save(&dir.join("reference.json"))?;
        }
        None => {
            let both = serde_json::json!({ "instance": instance, "reference": reference });
            out.write_all(to_canonical_json(&both).as_bytes())
                .map_err(|e| Failure { code: EXIT_FAIL, message: e.to_string() })?;
        }
    }
    Ok(EXIT_PASS)
}
