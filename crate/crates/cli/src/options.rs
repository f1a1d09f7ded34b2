use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sicnum::mic::UpdatePolicy;

/// Default seed for every randomized check.
pub const DEFAULT_SEED: u64 = 0x51C5_EED5;

#[derive(Parser, Debug)]
#[command(
    name = "sicnum",
    version,
    about = "Checks for the sporadic SICs in dimensions 2, 3 and 8"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Verify a catalogued SIC (--ensemble) or one loaded from JSON (--input)
    Verify,
    /// Write a catalogued SIC as JSON (or CSV matrices)
    Dump,
    /// Triple products, cocycle identity and phase histogram
    Triples,
    /// Triple-transitivity obstruction over a range of dimensions (--dims)
    Obstruction,
    /// Orthocross MIC and its parallel-update Born-matrix distance
    Orthocross,
    /// Qubit Clifford group, orbits and tetrahedron mappings
    #[command(alias = "group")]
    Clifford,
    /// Qutrit Fourier and Zauner unitaries acting on the Hesse SIC
    Qutrit,
    /// Cubic (QBic) constraint on SIC probabilities of random pure states
    Qbic,
    /// Three-qubit construction of a Hoggar-type fiducial
    Wootters,
    /// POVM with elements of rank (d+1)/2 and its relation to the Hesse SIC
    RankHalf,
    /// 3-tangle, Fano coefficients, marginals and the pseudo-SIC
    Hoggar,
    /// Born-matrix distance under an update policy (Monte Carlo for random ones)
    Born,
    /// Geometry and never-orthogonal audit of unbiased qubit MICs
    Bloch,
    /// Run every check
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Dump => "dump",
            Command::Triples => "triples",
            Command::Obstruction => "obstruction",
            Command::Orthocross => "orthocross",
            Command::Clifford => "clifford",
            Command::Qutrit => "qutrit",
            Command::Qbic => "qbic",
            Command::Wootters => "wootters",
            Command::RankHalf => "rank-half",
            Command::Hoggar => "hoggar",
            Command::Born => "born",
            Command::Bloch => "bloch",
            Command::All => "all",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnsembleName {
    #[value(name = "qubit+")]
    #[serde(rename = "qubit+")]
    QubitPlus,
    #[value(name = "qubit-")]
    #[serde(rename = "qubit-")]
    QubitMinus,
    #[value(name = "hesse")]
    #[serde(rename = "hesse")]
    Hesse,
    #[value(name = "hoggar+")]
    #[serde(rename = "hoggar+")]
    HoggarPlus,
    #[value(name = "hoggar-")]
    #[serde(rename = "hoggar-")]
    HoggarMinus,
}

impl EnsembleName {
    pub const ALL: [EnsembleName; 5] = [
        EnsembleName::QubitPlus,
        EnsembleName::QubitMinus,
        EnsembleName::Hesse,
        EnsembleName::HoggarPlus,
        EnsembleName::HoggarMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EnsembleName::QubitPlus => "qubit+",
            EnsembleName::QubitMinus => "qubit-",
            EnsembleName::Hesse => "hesse",
            EnsembleName::HoggarPlus => "hoggar+",
            EnsembleName::HoggarMinus => "hoggar-",
        }
    }

    /// The `+` ensemble of dimension `d`, if catalogued.
    pub fn for_dim(d: usize) -> Option<Self> {
        match d {
            2 => Some(EnsembleName::QubitPlus),
            3 => Some(EnsembleName::Hesse),
            8 => Some(EnsembleName::HoggarPlus),
            _ => None,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

/// Inclusive dimension range written `lo..hi` or `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for DimRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| format!("expected a range like 2..16, got '{s}'"))?;
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: usize = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
        let hi: usize = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
        if lo < 2 || hi < lo {
            return Err(format!("range must satisfy 2 <= lo <= hi, got {lo}..{hi}"));
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    r.map_err(|e| format!("invalid seed '{s}': {e}"))
}

fn parse_policy(s: &str) -> Result<UpdatePolicy, String> {
    s.parse().map_err(|e: sicnum::Error| e.to_string())
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a positive number, got {s}"))
    }
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Hilbert-space dimension
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Catalogued SIC
    #[arg(long, global = true, value_enum)]
    pub ensemble: Option<EnsembleName>,
    /// Post-measurement update policy: parallel, antipodal,
    /// random-unitary-of-self, random-unitary-of-antipodal
    #[arg(long, global = true, value_parser = parse_policy)]
    pub policy: Option<UpdatePolicy>,
    /// Number of random samples
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,
    /// Root seed (decimal or 0x-prefixed hex)
    #[arg(long, global = true, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    pub seed: u64,
    /// Absolute tolerance for equality checks
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = parse_positive)]
    pub tol: f64,
    /// Relative eigenvalue cutoff for rank decisions
    #[arg(long = "rank-tol", global = true, default_value_t = 1e-9, value_parser = parse_positive)]
    pub rank_tol: f64,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Omit the timestamp so identical runs give identical bytes
    #[arg(long = "no-timestamp", global = true)]
    pub no_timestamp: bool,
    /// Ensemble JSON file for `verify`
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Dimension range for `obstruction`, e.g. 2..16 (inclusive)
    #[arg(long, global = true)]
    pub dims: Option<DimRange>,
    /// Include per-sample distances in `born` reports
    #[arg(long, global = true)]
    pub distances: bool,
}

/// Configuration echoed into every report. Output location and timestamp
/// handling are left out since they do not affect results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub dim: Option<usize>,
    pub ensemble: Option<EnsembleName>,
    pub policy: Option<UpdatePolicy>,
    pub samples: Option<u64>,
    pub seed: u64,
    pub tol: f64,
    pub rank_tol: f64,
    pub format: Format,
    pub input: Option<PathBuf>,
    pub dims: Option<DimRange>,
    pub distances: bool,
}

impl RunConfig {
    pub fn new(command: Command, o: &Options) -> Self {
        Self {
            command: command.name().into(),
            dim: o.dim,
            ensemble: o.ensemble,
            policy: o.policy,
            samples: o.samples,
            seed: o.seed,
            tol: o.tol,
            rank_tol: o.rank_tol,
            format: o.format,
            input: o.input.clone(),
            dims: o.dims,
            distances: o.distances,
        }
    }
}
