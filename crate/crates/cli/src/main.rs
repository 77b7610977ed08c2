//! `dworkmill` — exact invariants of maximally-unipotent differential
//! operators and p-adic Frobenius data of reflexive-polytope families.
//!
//! Exit codes: 0 success / all checks passed; 1 verification failure;
//! 2 configuration error (no output is produced); 3 precision-inconclusive
//! results.

mod commands;
mod config;
mod pool;
mod render;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Report, Selector};
use config::FileConfig;
use render::Format;

#[derive(Parser)]
#[command(
    name = "dworkmill",
    version,
    about = "Exact mirror-map invariants and p-adic Frobenius data of reflexive-polytope families",
    disable_help_subcommand = true
)]
struct Cli {
    /// TOML configuration file; explicit flags override file values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Report format (default: tsv for tables, json for structured reports).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

/// Operator or family selection shared by the series pipelines.
#[derive(Args, Clone, Default)]
struct SelectorArgs {
    /// Operator: quintic, diagonal4, simplicial:N, hyperoctahedral:N, or an
    /// operator JSON file.
    #[arg(long, value_name = "NAME|PATH", conflicts_with_all = ["family", "dim"])]
    operator: Option<String>,
    /// Family: simplicial or hyperoctahedral (with --dim), "kind:N", or a
    /// custom-family JSON file.
    #[arg(long, value_name = "NAME|PATH")]
    family: Option<String>,
    /// Dimension n for --family simplicial / hyperoctahedral.
    #[arg(long, value_name = "N")]
    dim: Option<usize>,
}

impl SelectorArgs {
    /// Flags win wholesale when any selector flag is present; otherwise the
    /// config file chooses.
    fn merged(&self, file: &FileConfig) -> Result<Selector, String> {
        if self.operator.is_some() || self.family.is_some() || self.dim.is_some() {
            if let Some(op) = &self.operator {
                return Ok(Selector::Operator(op.clone()));
            }
            let name = self
                .family
                .clone()
                .ok_or_else(|| "`--dim` needs `--family`".to_string())?;
            return Ok(Selector::Family {
                name,
                dim: self.dim,
            });
        }
        match (&file.operator, &file.family) {
            (Some(_), Some(_)) => {
                Err("config file sets both `operator` and `family`; pick one".into())
            }
            (Some(op), None) => Ok(Selector::Operator(op.clone())),
            (None, Some(f)) => Ok(Selector::Family {
                name: f.clone(),
                dim: file.dim,
            }),
            (None, None) => {
                Err("no operator or family selected: pass `--operator` or `--family`/`--dim`".into())
            }
        }
    }
}

/// Family-only selection (Hasse–Witt, Frobenius structure, derivation).
#[derive(Args, Clone, Default)]
struct FamilyArgs {
    /// Family: simplicial or hyperoctahedral (with --dim), "kind:N", or a
    /// custom-family JSON file.
    #[arg(long, value_name = "NAME|PATH")]
    family: Option<String>,
    /// Dimension n for builtin families.
    #[arg(long, value_name = "N")]
    dim: Option<usize>,
}

impl FamilyArgs {
    fn merged(&self, file: &FileConfig) -> Result<dworkmill::geometry::FamilyData, String> {
        let (name, dim) = if self.family.is_some() || self.dim.is_some() {
            (
                self.family
                    .clone()
                    .ok_or_else(|| "`--dim` needs `--family`".to_string())?,
                self.dim,
            )
        } else {
            (
                config::require(file.family.clone(), "family")?,
                file.dim,
            )
        };
        commands::resolve_family(&name, dim)
    }
}

#[derive(Args)]
struct BasisArgs {
    #[command(flatten)]
    sel: SelectorArgs,
    /// Truncation order M (number of series coefficients).
    #[arg(long, value_name = "M")]
    terms: Option<usize>,
}

#[derive(Args)]
struct MirrorCmdArgs {
    #[command(flatten)]
    sel: SelectorArgs,
    /// Truncation order M.
    #[arg(long, value_name = "M")]
    terms: Option<usize>,
    /// Normalization exponent s (2 or 3).
    #[arg(long, value_name = "S")]
    power: Option<u32>,
    /// Normalization constant kappa (integer or a/b).
    #[arg(long, value_name = "K")]
    kappa: Option<String>,
}

#[derive(Args)]
struct InstantonArgs {
    #[command(flatten)]
    sel: SelectorArgs,
    /// Number of instanton coefficients R.
    #[arg(long, value_name = "R")]
    terms: Option<usize>,
    /// Normalization exponent s (2 or 3).
    #[arg(long, value_name = "S")]
    power: Option<u32>,
    /// Normalization constant kappa (integer or a/b).
    #[arg(long, value_name = "K")]
    kappa: Option<String>,
    /// Odd primes for per-coefficient integrality verdicts.
    #[arg(long, value_name = "P,P,...", value_delimiter = ',')]
    check_primes: Option<Vec<u64>>,
    /// Primes below this report "outside-hypotheses" instead of pass/fail.
    #[arg(long, value_name = "P")]
    min_prime: Option<u64>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    sel: SelectorArgs,
    /// Check coefficients up to t^M inclusive.
    #[arg(long, value_name = "M")]
    terms: Option<usize>,
    /// Odd primes to check.
    #[arg(long, value_name = "P,P,...", value_delimiter = ',')]
    primes: Option<Vec<u64>>,
}

#[derive(Args)]
struct HasseWittArgs {
    #[command(flatten)]
    fam: FamilyArgs,
    /// Pole-order level k (default: every k = 1..=n).
    #[arg(long, value_name = "K")]
    k: Option<u64>,
    /// Odd prime p.
    #[arg(long, value_name = "P")]
    prime: Option<u64>,
    /// t-truncation of the matrix entries.
    #[arg(long, value_name = "M")]
    terms: Option<usize>,
}

#[derive(Args)]
struct StructureArgs {
    #[command(flatten)]
    fam: FamilyArgs,
    /// Odd prime p.
    #[arg(long, value_name = "P")]
    prime: Option<u64>,
    /// p-adic working precision N.
    #[arg(long, value_name = "N")]
    precision: Option<u32>,
    /// t-truncation M.
    #[arg(long, value_name = "M")]
    terms: Option<usize>,
    /// Opt in to the long-running n = 4 tier (progress goes to stderr).
    #[arg(long)]
    extended: bool,
}

#[derive(Args)]
struct DeriveArgs {
    #[command(flatten)]
    fam: FamilyArgs,
    /// Derivation window (default 2n + 16).
    #[arg(long, value_name = "W")]
    window: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: quintic, diagonal, or smoke.
    #[arg(long, value_name = "NAME")]
    suite: Option<String>,
    /// Include the long-running n = 4 tier (quintic suite).
    #[arg(long)]
    extended: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the normalized solution basis F_0..F_{n-1} of a MUM operator.
    FrobeniusBasis(BasisArgs),
    /// Print the canonical coordinate q(t), its inverse, and the coupling K(q).
    Mirror(MirrorCmdArgs),
    /// Instanton numbers a_r = kappa A_r / r^s with per-prime integrality verdicts.
    Instantons(InstantonArgs),
    /// Mirror-map integrality: direct p-integrality of exp(F_1/F_0) against the
    /// multiplicative-splitting criterion, coefficient for coefficient.
    Check(CheckArgs),
    /// Hasse-Witt matrix report with the block factorization at t = 0.
    HasseWitt(HasseWittArgs),
    /// p-adic Frobenius structure: alpha constants, lambda valuations, and the
    /// functional equation.
    FrobeniusStructure(StructureArgs),
    /// Derive the Picard-Fuchs operator of a family from its periods.
    DerivePf(DeriveArgs),
    /// Run a bundled verification suite.
    Verify(VerifyArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::FrobeniusBasis(_) => "frobenius-basis",
            Cmd::Mirror(_) => "mirror",
            Cmd::Instantons(_) => "instantons",
            Cmd::Check(_) => "check",
            Cmd::HasseWitt(_) => "hasse-witt",
            Cmd::FrobeniusStructure(_) => "frobenius-structure",
            Cmd::DerivePf(_) => "derive-pf",
            Cmd::Verify(_) => "verify",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Cmd::HasseWitt(_) | Cmd::FrobeniusStructure(_) | Cmd::DerivePf(_) => Format::Json,
            _ => Format::Tsv,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version print to stdout and exit 0; usage errors exit 2.
            let code = u8::try_from(e.exit_code()).unwrap_or(2);
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let file = match &cli.config {
        Some(path) => config::load(path)?,
        None => FileConfig::default(),
    };
    if let Some(c) = &file.command {
        if c != cli.command.name() {
            return Err(format!(
                "config file requests command {:?} but {:?} was invoked",
                c,
                cli.command.name()
            ));
        }
    }
    let fmt = match cli.format {
        Some(f) => f,
        None => file.format()?.unwrap_or(cli.command.default_format()),
    };
    let output = cli
        .output
        .clone()
        .or_else(|| file.output.clone().map(PathBuf::from));

    let report = dispatch(&cli.command, &file, fmt)?;
    emit(&report, output.as_deref())?;
    Ok(report.status.code())
}

fn dispatch(cmd: &Cmd, file: &FileConfig, fmt: Format) -> Result<Report, String> {
    match cmd {
        Cmd::FrobeniusBasis(a) => {
            let sel = a.sel.merged(file)?;
            let (label, op) = commands::resolve_operator(&sel)?;
            let terms =
                config::ensure_ge1_usize(config::require(a.terms.or(file.terms), "terms")?, "terms")?;
            commands::frobenius_basis_cmd(&label, &op, terms, fmt)
        }
        Cmd::Mirror(a) => {
            let sel = a.sel.merged(file)?;
            let (label, op) = commands::resolve_operator(&sel)?;
            let terms =
                config::ensure_ge1_usize(config::require(a.terms.or(file.terms), "terms")?, "terms")?;
            let power = config::ensure_power(config::require(a.power.or(file.power), "power")?)?;
            let kappa = config::kappa_from(a.kappa.as_deref(), file)?;
            commands::mirror_cmd(&label, &op, terms, power, &kappa, fmt)
        }
        Cmd::Instantons(a) => {
            let sel = a.sel.merged(file)?;
            let (label, op) = commands::resolve_operator(&sel)?;
            let count =
                config::ensure_ge1_usize(config::require(a.terms.or(file.terms), "terms")?, "terms")?;
            let power = config::ensure_power(config::require(a.power.or(file.power), "power")?)?;
            let kappa = config::kappa_from(a.kappa.as_deref(), file)?;
            let primes = a
                .check_primes
                .clone()
                .or_else(|| file.check_primes.clone())
                .unwrap_or_default();
            config::ensure_odd_primes(&primes, "check-primes")?;
            let min_prime = a.min_prime.or(file.min_prime).unwrap_or(7);
            commands::instantons_cmd(&label, &op, count, power, &kappa, &primes, min_prime, fmt)
        }
        Cmd::Check(a) => {
            let sel = a.sel.merged(file)?;
            let (label, op) = commands::resolve_operator(&sel)?;
            let terms =
                config::ensure_ge1_usize(config::require(a.terms.or(file.terms), "terms")?, "terms")?;
            let primes = config::require(
                a.primes.clone().or_else(|| file.primes.clone()),
                "primes",
            )?;
            config::ensure_odd_primes(&primes, "primes")?;
            commands::check_cmd(&label, &op, terms, &primes, fmt)
        }
        Cmd::HasseWitt(a) => {
            let family = a.fam.merged(file)?;
            let n = family.g.dimension() as u64;
            let p = config::require(a.prime.or(file.prime), "prime")?;
            config::ensure_odd_primes(&[p], "prime")?;
            let terms = config::ensure_ge1_usize(a.terms.or(file.terms).unwrap_or(10), "terms")?;
            let ks: Vec<u64> = match a.k.or(file.k) {
                Some(k) => {
                    if k < 1 || k > n {
                        return Err(format!("`k` must be between 1 and n = {}, got {}", n, k));
                    }
                    vec![k]
                }
                None => (1..=n).collect(),
            };
            commands::hasse_witt_cmd(&family, &ks, p, terms, fmt)
        }
        Cmd::FrobeniusStructure(a) => {
            let family = a.fam.merged(file)?;
            let p = config::require(a.prime.or(file.prime), "prime")?;
            config::ensure_odd_primes(&[p], "prime")?;
            let precision = config::ensure_ge1_u32(
                a.precision.or(file.precision).unwrap_or(3),
                "precision",
            )?;
            let terms = config::ensure_ge1_usize(a.terms.or(file.terms).unwrap_or(10), "terms")?;
            let extended = a.extended || file.extended.unwrap_or(false);
            commands::frobenius_structure_cmd(&family, p, precision, terms, extended, fmt)
        }
        Cmd::DerivePf(a) => {
            let family = a.fam.merged(file)?;
            let n = family.g.dimension();
            let window = config::ensure_ge1_usize(
                commands::derive_window(n, a.window.or(file.window)),
                "window",
            )?;
            commands::derive_pf_cmd(&family, window, fmt)
        }
        Cmd::Verify(a) => {
            let suite = config::require(a.suite.clone().or_else(|| file.suite.clone()), "suite")?;
            let extended = a.extended || file.extended.unwrap_or(false);
            verify::verify_cmd(&suite, extended, fmt)
        }
    }
}

fn emit(report: &Report, output: Option<&std::path::Path>) -> Result<(), String> {
    match output {
        Some(path) => std::fs::write(path, &report.data)
            .map_err(|e| format!("cannot write report to {}: {}", path.display(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(report.data.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| format!("cannot write report: {}", e))
        }
    }
}
