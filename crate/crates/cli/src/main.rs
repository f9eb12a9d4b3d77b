use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crmaps_core::classify::classify;
use crmaps_core::generators::{
    counterexample, invariant_family, random_invariant, random_separable, random_spc, Counterexample,
};
use crmaps_core::io::{read_basis_set, read_matrix, to_json, BasisFile, MatrixFile};
use crmaps_core::mub::MubSet;
use crmaps_core::mub::{complete, generate_prime, verify_set};
use crmaps_core::reducibility::{decompose, Verdict};
use crmaps_core::schmidt::{hermitian_schmidt_decompose, schmidt_decompose};
use crmaps_core::symmetry::{l_sigma, sigma_dictionary, Perm4};
use crmaps_core::tensor::{flip, BipartiteOperator};
use crmaps_core::{Error, Tolerances};

mod pretty;

#[derive(Parser)]
#[command(name = "crmaps", version, about = "Completely reducible maps of bipartite operators")]
struct Cli {
    /// Global tolerance; every per-check threshold is scaled by tol / 1e-9.
    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT_GLOBAL)]
    tol: f64,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file overriding individual tolerances (field names as in the JSON reports).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// PSD, PPT, SPC and realignment-invariance tests.
    Classify { file: PathBuf },
    /// Split A into weakly irreducible blocks on orthogonal local supports.
    Decompose { file: PathBuf },
    /// Operator Schmidt decomposition.
    Schmidt {
        file: PathBuf,
        /// Hermitian factors with real coefficients.
        #[arg(long)]
        hermitian: bool,
    },
    #[command(subcommand)]
    Sigma(SigmaCommand),
    #[command(subcommand)]
    Mub(MubCommand),
    /// Write one of the named operators as a matrix file.
    Fixture {
        #[arg(value_enum)]
        name: FixtureName,
        k: usize,
        /// Second local dimension (separable only).
        #[arg(long)]
        m: Option<usize>,
        /// Number of product terms (separable only).
        #[arg(long, default_value_t = 2)]
        terms: usize,
    },
}

#[derive(Subcommand)]
enum SigmaCommand {
    /// Apply L_σ to a matrix file; σ as cycles "(243)", images "[1,4,2,3]" or "id".
    Apply { perm: Perm4, file: PathBuf },
    /// Express every σ ∈ S₄ through transpose, flip conjugation, t₂, S and T.
    Table {
        k: usize,
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum MubCommand {
    /// p + 1 mutually unbiased bases of ℂ^p for prime p.
    Generate {
        p: usize,
        /// Leave out the basis with this index.
        #[arg(long)]
        drop: Option<usize>,
    },
    Verify { file: PathBuf },
    /// Complete k mutually unbiased bases of ℂ^k with the missing one.
    Complete { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureName {
    Uut,
    Identity,
    Flip,
    RealignedPair,
    InvariantNotPpt,
    InvariantFamily,
    Separable,
    Spc,
    Invariant,
}

/// A rendered report plus the exit status it implies.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotCompletelyReducible { .. } => 1,
        Error::NoConvergence(_)
        | Error::ZeroMap(_)
        | Error::NotAnEigenvector { .. }
        | Error::RecursionLimit(_)
        | Error::SpectrumNotZeroOne(_)
        | Error::Indeterminate(_)
        | Error::SpectrumMismatch(_)
        | Error::ExtractionFailure(_)
        | Error::BudgetExhausted(_) => 3,
        _ => 2,
    }
}

fn load_tolerances(cli: &Cli) -> Result<Tolerances, String> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(format!("--tol must be positive, got {}", cli.tol));
    }
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            toml::from_str::<Tolerances>(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => Tolerances::default(),
    };
    Ok(base.scaled(cli.tol))
}

fn fixture(name: FixtureName, k: usize, m: Option<usize>, terms: usize, seed: u64) -> crmaps_core::Result<BipartiteOperator> {
    if k == 0 {
        return Err(Error::BadDimension("k must be positive".into()));
    }
    match name {
        FixtureName::Uut => counterexample(Counterexample::Uut(k)),
        FixtureName::Identity => Ok(BipartiteOperator::identity(k, k)),
        FixtureName::Flip => Ok(flip(k)),
        FixtureName::RealignedPair => counterexample(Counterexample::RealignedPair(k)),
        FixtureName::InvariantNotPpt => counterexample(Counterexample::InvariantNotPpt(k)),
        FixtureName::InvariantFamily => Ok(invariant_family(k)),
        FixtureName::Separable => random_separable(k, m.unwrap_or(k), terms, seed),
        FixtureName::Spc => random_spc(k, seed, 1000),
        FixtureName::Invariant => random_invariant(k, seed),
    }
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn load_matrix(path: &Path) -> crmaps_core::Result<BipartiteOperator> {
    read_matrix(path).map_err(|e| with_path(path, e))
}

fn load_bases(path: &Path) -> crmaps_core::Result<MubSet> {
    read_basis_set(path).map_err(|e| with_path(path, e))
}

fn run(cli: &Cli, tol: &Tolerances) -> crmaps_core::Result<Output> {
    let pretty = cli.format == Format::Pretty;
    let out = match &cli.command {
        Command::Classify { file } => {
            let r = classify(&load_matrix(file)?, tol)?;
            Output::ok(if pretty { pretty::class_report(&r) } else { to_json(&r) })
        }
        Command::Decompose { file } => {
            let r = decompose(&load_matrix(file)?, tol, cli.seed)?;
            let code = match r.verdict {
                Verdict::CompletelyReducible => 0,
                Verdict::NotCompletelyReducible => 1,
                Verdict::Indeterminate => 3,
            };
            Output {
                text: if pretty { pretty::reducibility(&r) } else { to_json(&r) },
                code,
            }
        }
        Command::Schmidt { file, hermitian } => {
            let a = load_matrix(file)?;
            let d = if *hermitian { hermitian_schmidt_decompose(&a, tol)? } else { schmidt_decompose(&a, tol)? };
            Output::ok(if pretty { pretty::schmidt(&d) } else { to_json(&d) })
        }
        Command::Sigma(SigmaCommand::Apply { perm, file }) => {
            let b = l_sigma(perm, &load_matrix(file)?)?;
            Output::ok(if pretty { pretty::operator(&b) } else { to_json(&MatrixFile::from_operator(&b)) })
        }
        Command::Sigma(SigmaCommand::Table { k, samples }) => {
            let t = sigma_dictionary(*k, *samples, cli.seed)?;
            Output::ok(if pretty { pretty::sigma_table(&t) } else { to_json(&t) })
        }
        Command::Mub(MubCommand::Generate { p, drop }) => {
            let mut set = generate_prime(*p)?;
            if let Some(i) = drop {
                if *i > *p {
                    return Err(Error::BadDimension(format!("--drop {i} out of range 0..={p}")));
                }
                set = set.without(*i);
            }
            Output::ok(if pretty { pretty::mub_set(&set) } else { to_json(&BasisFile::from_set(&set)) })
        }
        Command::Mub(MubCommand::Verify { file }) => {
            let r = verify_set(&load_bases(file)?, tol);
            Output {
                code: if r.valid { 0 } else { 1 },
                text: if pretty { pretty::mub_report(&r) } else { to_json(&r) },
            }
        }
        Command::Mub(MubCommand::Complete { file }) => {
            let b = complete(&load_bases(file)?, tol, cli.seed)?;
            Output::ok(if pretty { pretty::basis(&b) } else { to_json(&BasisFile::from_basis(&b)) })
        }
        Command::Fixture { name, k, m, terms } => {
            let a = fixture(*name, *k, *m, *terms, cli.seed)?;
            Output::ok(if pretty { pretty::operator(&a) } else { to_json(&MatrixFile::from_operator(&a)) })
        }
    };
    Ok(out)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match load_tolerances(&cli) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, &tol) {
        Ok(o) => {
            if let Err(msg) = emit(&o.text, cli.out.as_deref()) {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            let mut msg = format!("error: {e}");
            if let Error::NotCompletelyReducible { witness, .. } = &e {
                let _ = write!(msg, " (witness eigenvalue {:.6})", witness.eigenvalue);
            }
            eprintln!("{msg}");
            ExitCode::from(exit_code(&e))
        }
    }
}
