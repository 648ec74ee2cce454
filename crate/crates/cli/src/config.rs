//! Command-line surface and the validated problem configuration.

use std::path::{Path, PathBuf};

use ccc_core::funcfield::PrimeField;
use ccc_core::io::{load_coframe, load_variety};
use ccc_core::{Coframe, Hypersurface};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

/// Errors in user-supplied data are configuration errors; anything else
/// raised while computing is internal.
impl From<ccc_core::Error> for CliError {
    fn from(e: ccc_core::Error) -> Self {
        use ccc_core::Error as E;
        match e {
            E::Syntax { .. }
            | E::UnknownVariable(_)
            | E::IndexOutOfRange { .. }
            | E::NotPolynomial(_)
            | E::BadPrime(_)
            | E::NotPrime(_)
            | E::TermBound { .. }
            | E::SingularCoframe(_)
            | E::DimensionTooSmall(_)
            | E::DimensionMismatch { .. }
            | E::InvalidHypersurface(_)
            | E::InvalidInput(_)
            | E::Json(_) => CliError::Config(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ccc", version, about = "Conformal flatness certificates for adapted cone structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: CommonOpts,
}

#[derive(Args, Clone, Debug, Default)]
pub struct CommonOpts {
    /// Variety file (JSON: `variables` or `n`, and `f`).
    #[arg(long, global = true, value_name = "FILE")]
    pub variety: Option<PathBuf>,
    /// Coframe file (JSON: `variables`, `base_point`, `matrix`).
    #[arg(long, global = true, value_name = "FILE")]
    pub coframe: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub backend: Option<Backend>,
    /// Prime for the modular backend; repeat for several.
    #[arg(long = "prime", global = true, value_name = "P")]
    pub primes: Vec<u64>,
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "T")]
    pub tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Compute Xi_Z and the nondegeneracy checks for a variety.
    Xi,
    /// Run the flatness pipeline on a coframe adapted to a variety.
    Certify {
        /// Integrate with path quadrature even when a closed form exists.
        #[arg(long)]
        quadrature: bool,
    },
    /// Exact identity suite on seeded random coframes.
    VerifyIdentities {
        #[arg(long, default_value_t = 25)]
        cases: usize,
        /// Maximum degree of the random coframe entries.
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Emit variety and coframe files for a reference model.
    Model {
        #[arg(value_enum)]
        kind: ModelKind,
        /// Scale factor `s` of the rescaled model, `ω = s·dx`.
        #[arg(long, value_name = "EXPR")]
        scale: Option<String>,
        /// Matrix of the twisted model as a JSON array of string rows.
        #[arg(long, value_name = "JSON")]
        matrix: Option<String>,
        /// Directory receiving `variety.json` and `coframe.json`.
        #[arg(long, value_name = "DIR")]
        emit: PathBuf,
    },
    /// Run the shipped acceptance cases.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Xi => "xi",
            Command::Certify { .. } => "certify",
            Command::VerifyIdentities { .. } => "verify-identities",
            Command::Model { .. } => "model",
            Command::Selftest => "selftest",
        }
    }

    fn samples_randomly(&self) -> bool {
        matches!(self, Command::Xi | Command::Certify { .. } | Command::VerifyIdentities { .. })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Modp,
    Float,
    Rational,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Flat,
    Rescaled,
    Twisted,
}

/// The validated inputs of one run, echoed into its report.
#[derive(Clone, Debug, Serialize)]
pub struct ProblemConfig {
    pub command: String,
    pub variety: Option<PathBuf>,
    pub coframe: Option<PathBuf>,
    pub backend: Option<Backend>,
    pub primes: Vec<u64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub max_terms: usize,
}

fn check_file(p: &Option<PathBuf>, what: &str) -> Result<(), CliError> {
    if let Some(p) = p {
        if !p.is_file() {
            return Err(CliError::Config(format!("{what} file {} does not exist", p.display())));
        }
    }
    Ok(())
}

impl ProblemConfig {
    pub fn new(command: &Command, opts: &CommonOpts) -> Result<Self, CliError> {
        check_file(&opts.variety, "variety")?;
        check_file(&opts.coframe, "coframe")?;
        if command.samples_randomly() && opts.seed.is_none() {
            return Err(CliError::Config(format!("`{}` samples randomly and needs --seed", command.name())));
        }
        for &p in &opts.primes {
            PrimeField::new(p).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if let Some(t) = opts.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("--tol must be positive, got {t}")));
            }
        }
        if opts.samples == Some(0) {
            return Err(CliError::Config("--samples must be positive".into()));
        }
        match command {
            Command::Certify { .. } if opts.coframe.is_none() => {
                return Err(CliError::Config("`certify` needs --coframe".into()))
            }
            Command::Xi | Command::Certify { .. } if opts.variety.is_none() => {
                return Err(CliError::Config(format!("`{}` needs --variety", command.name())))
            }
            Command::Xi | Command::Certify { .. } if opts.backend == Some(Backend::Rational) => {
                return Err(CliError::Config(
                    "Xi_Z is sampled over F_p or C; use --backend modp or float".into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            command: command.name().to_string(),
            variety: opts.variety.clone(),
            coframe: opts.coframe.clone(),
            backend: opts.backend,
            primes: opts.primes.clone(),
            samples: opts.samples,
            seed: opts.seed,
            tol: opts.tol,
            format: opts.format,
            out: opts.out.clone(),
            max_terms: ccc_core::funcfield::max_terms(),
        })
    }

    pub fn load_variety(&self) -> Result<Option<Hypersurface>, CliError> {
        self.variety.as_deref().map(load_variety).transpose().map_err(CliError::from)
    }

    pub fn load_coframe(&self) -> Result<Option<Coframe>, CliError> {
        self.coframe.as_deref().map(load_coframe).transpose().map_err(CliError::from)
    }

    /// The variety, or the Fermat quartic curve when none was given.
    pub fn variety_or_default(&self) -> Result<Hypersurface, CliError> {
        match self.load_variety()? {
            Some(z) => Ok(z),
            None => Ok(Hypersurface::fermat(3, 4)?),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    pub fn xi_config(&self) -> ccc_core::XiConfig {
        let mut cfg = ccc_core::XiConfig {
            seed: self.seed(),
            ..Default::default()
        };
        if !self.primes.is_empty() {
            cfg.primes = self.primes.clone();
        }
        match self.backend {
            Some(Backend::Modp) => cfg.float = false,
            Some(Backend::Float) => cfg.primes.clear(),
            _ => {}
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        cfg
    }
}

pub fn display(p: &Path) -> String {
    p.display().to_string()
}
