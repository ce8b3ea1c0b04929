//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{self, Ctx};
use crate::config::Config;
use crate::report::{Report, REPORT_DIR_ENV};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "eisencong", version, about = "Exact checks of Hilbert-Eisenstein congruences and local constants")]
pub struct Cli {
    /// TOML configuration; the built-in presets are used without one.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Node budget for principality searches (overrides the config).
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eisenstein q-expansions.
    #[command(subcommand)]
    Eis(EisCmd),
    /// The diagonal-restriction congruence.
    #[command(subcommand)]
    Congruence(CongruenceCmd),
    /// Gauss sums and local constants.
    #[command(subcommand)]
    Epsilon(EpsilonCmd),
    /// The Euler-factor inner-sum identity.
    #[command(subcommand)]
    Euler(EulerCmd),
    /// Class groups.
    #[command(subcommand)]
    Classgrp(ClassgrpCmd),
    /// The class-group and different hypotheses of a preset.
    #[command(subcommand)]
    Assumptions(AssumptionsCmd),
    /// Quick versions of all checks for every configured preset.
    #[command(subcommand)]
    Selftest(SelftestCmd),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Base,
    Top,
}

#[derive(Debug, Subcommand)]
pub enum EisCmd {
    /// Compute a q-expansion and write it in the text format.
    Expand(ExpandArgs),
    /// Restrict an expansion over the top field to the base.
    Restrict(RestrictArgs),
    /// Apply q -> q^p to an expansion.
    Frobenius(FrobeniusArgs),
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub preset: String,
    #[arg(long, value_enum, default_value = "top")]
    pub side: Side,
    /// `battery:N`, `control` or `constant` (the latter skips the
    /// unit-support requirement).
    #[arg(long, default_value = "battery:0")]
    pub phi: String,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 30)]
    pub bound: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RestrictArgs {
    #[arg(long)]
    pub preset: String,
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the completeness bound of the input.
    #[arg(long)]
    pub bound: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FrobeniusArgs {
    #[arg(long)]
    pub preset: String,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CongruenceCmd {
    /// Compare the restriction with the Frobenius twist mod p.
    Check(CheckArgs),
    /// Galois-orbit decomposition of the restricted coefficients.
    Orbits(OrbitsArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub preset: String,
    /// `battery`, `battery:N` or `control`.
    #[arg(long, default_value = "battery")]
    pub phi: String,
    #[arg(long, default_value_t = 30)]
    pub bound: u64,
    /// Must agree with the preset when given.
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2])]
    pub k: Vec<u32>,
    /// Run functions that are not Galois-invariant.
    #[arg(long)]
    pub forced: bool,
    /// Also list differences mod p^2.
    #[arg(long)]
    pub mod_p2: bool,
}

#[derive(Debug, Args)]
pub struct OrbitsArgs {
    #[arg(long)]
    pub preset: String,
    #[arg(long, default_value = "battery:0")]
    pub phi: String,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 12)]
    pub bound: u64,
}

#[derive(Debug, Subcommand)]
pub enum EpsilonCmd {
    /// Gauss sums of primitive characters.
    Gauss(GaussArgs),
    /// Katz's local factor against the Deligne constant.
    KatzDeligne(KatzDeligneArgs),
    /// Conductor-discriminant, degree-zero inductivity and epsilon
    /// inductivity for a tower.
    Inductivity(InductivityArgs),
}

#[derive(Debug, Args)]
pub struct GaussArgs {
    #[arg(long)]
    pub modulus: u64,
    /// `quadratic`, `all`, `index:N` or a character named in the config.
    #[arg(long, default_value = "all")]
    pub char: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Normalization {
    Pairing,
    Literal,
}

#[derive(Debug, Args)]
pub struct KatzDeligneArgs {
    #[arg(long, default_value_t = 25)]
    pub max_modulus: u64,
    #[arg(long, value_enum, default_value = "pairing")]
    pub normalization: Normalization,
    /// A rational `delta`, a unit at the primes involved.
    #[arg(long, default_value = "1")]
    pub delta: String,
}

#[derive(Debug, Args)]
pub struct InductivityArgs {
    #[arg(long)]
    pub preset: String,
    /// Moduli of the characters `phi` to test.
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 3, 4, 7, 9])]
    pub moduli: Vec<u64>,
}

#[derive(Debug, Subcommand)]
pub enum EulerCmd {
    /// Check the inner-sum identity for e = 0..=max-e.
    Identity(EulerArgs),
}

#[derive(Debug, Args)]
pub struct EulerArgs {
    #[arg(long, default_value_t = 5)]
    pub max_e: u32,
    #[arg(long, default_value_t = 30)]
    pub truncation: i64,
}

#[derive(Debug, Subcommand)]
pub enum ClassgrpCmd {
    Compute(ClassgrpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Base,
    Top,
    K0,
    Cm,
    CmTop,
}

#[derive(Debug, Args)]
pub struct ClassgrpArgs {
    #[arg(long, conflicts_with = "disc")]
    pub preset: Option<String>,
    #[arg(long, value_enum, default_value = "base")]
    pub which: Which,
    /// Narrow class group (totally real fields).
    #[arg(long)]
    pub narrow: bool,
    /// Minus part of the ray class group modulo `j O_K` (CM fields).
    #[arg(long)]
    pub ray: Option<u64>,
    /// An imaginary quadratic field by its fundamental discriminant.
    #[arg(long, allow_hyphen_values = true)]
    pub disc: Option<i64>,
}

#[derive(Debug, Subcommand)]
pub enum AssumptionsCmd {
    Check(AssumptionsArgs),
}

#[derive(Debug, Args)]
pub struct AssumptionsArgs {
    #[arg(long)]
    pub preset: String,
}

#[derive(Debug, Subcommand)]
pub enum SelftestCmd {
    All(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Trace bound for presets without a configured battery.
    #[arg(long, default_value_t = 12)]
    pub bound: u64,
}

/// Runs a parsed command line and returns its report.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::builtin(),
    };
    if let Some(c) = cli.cap {
        config.settings.cap = Some(c);
    }
    let ctx = Ctx::new(config);
    match &cli.command {
        Command::Eis(EisCmd::Expand(a)) => commands::expand(&ctx, a),
        Command::Eis(EisCmd::Restrict(a)) => commands::restrict(&ctx, a),
        Command::Eis(EisCmd::Frobenius(a)) => commands::frobenius(&ctx, a),
        Command::Congruence(CongruenceCmd::Check(a)) => commands::congruence_check(&ctx, a),
        Command::Congruence(CongruenceCmd::Orbits(a)) => commands::congruence_orbits(&ctx, a),
        Command::Epsilon(EpsilonCmd::Gauss(a)) => commands::gauss(&ctx, a),
        Command::Epsilon(EpsilonCmd::KatzDeligne(a)) => commands::katz_deligne(&ctx, a),
        Command::Epsilon(EpsilonCmd::Inductivity(a)) => commands::inductivity(&ctx, a),
        Command::Euler(EulerCmd::Identity(a)) => commands::euler(&ctx, a),
        Command::Classgrp(ClassgrpCmd::Compute(a)) => commands::classgrp(&ctx, a),
        Command::Assumptions(AssumptionsCmd::Check(a)) => commands::assumptions(&ctx, a),
        Command::Selftest(SelftestCmd::All(a)) => commands::selftest(&ctx, a),
    }
}

fn report_dir(cli: &Cli) -> Option<PathBuf> {
    if let Some(d) = std::env::var_os(REPORT_DIR_ENV).filter(|d| !d.is_empty()) {
        return Some(PathBuf::from(d));
    }
    let c = cli.config.as_ref().and_then(|p| Config::load(p).ok())?;
    c.settings.report_dir
}

/// Executes, prints the human report and writes JSON files. Returns the
/// process exit code.
pub fn run(cli: &Cli) -> i32 {
    let report = match execute(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    print!("{}", report.human());
    let mut targets = Vec::new();
    if let Some(p) = &cli.json {
        targets.push(report.write_to(p).map(|_| p.clone()));
    }
    if let Some(d) = report_dir(cli) {
        targets.push(report.write_in(&d));
    }
    for t in targets {
        if let Err(e) = t {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    report.status.exit_code()
}
