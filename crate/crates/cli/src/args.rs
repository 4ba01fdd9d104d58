use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "haarforge", version, about = "Pseudorandom quantum state generation and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a state and write it to a file.
    Generate(GenerateArgs),
    /// Run verification batteries; exit 1 if any check fails.
    Verify(VerifyArgs),
    /// Estimate how well a fixed test battery separates two state sources.
    Distinguish(DistinguishArgs),
    /// Write the reference vector files.
    Golden(GoldenArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Random,
    Prf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Bin,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    Direct,
    Circuit,
}

#[derive(Args, Debug, Clone)]
pub struct Secrets {
    /// Master seed (hex) for the random backend and for test batteries.
    #[arg(long, env = "HAARFORGE_SEED", value_name = "HEX")]
    pub seed: Option<String>,
    /// PRF key material (hex) for the prf backend.
    #[arg(long, env = "HAARFORGE_KEY", value_name = "HEX")]
    pub key: Option<String>,
    /// Draw missing seeds and keys from OS entropy. The output is NOT
    /// reproducible; the values used are printed.
    #[arg(long)]
    pub fresh_entropy: bool,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    #[arg(long)]
    pub lambda: u32,
    #[arg(long, value_enum, default_value_t = Backend::Random)]
    pub backend: Backend,
    /// Input `x` of a function-like generator (`m > 0`).
    #[arg(long, default_value_t = 0)]
    pub x: u64,
    /// Compute the state directly or by simulating the circuit.
    #[arg(long, value_enum, default_value_t = PathKind::Direct)]
    pub path: PathKind,
    #[command(flatten)]
    pub secrets: Secrets,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Amplitudes shown in the summary.
    #[arg(long, default_value_t = 4)]
    pub show: usize,
    /// Print the summary as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// One of sampler-distance, lemma-bounds, haar-moments, isometry,
    /// path-equivalence, golden, or all.
    #[arg(long, default_value = "all")]
    pub battery: String,
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 16)]
    pub lambda: u32,
    /// Backend of the generated ensembles.
    #[arg(long, value_enum, default_value_t = Backend::Random)]
    pub backend: Backend,
    /// States per ensemble for the moment checks.
    #[arg(long, default_value_t = 2000)]
    pub ensemble: usize,
    /// States for the marginal-law check.
    #[arg(long, default_value_t = 10_000)]
    pub marginal: usize,
    /// Trials of the state perturbation bound.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Draws per configuration of the sampler-distance battery.
    #[arg(long, default_value_t = 1_000_000)]
    pub draws: usize,
    /// Directory of reference vector files; defaults to the built-in copies.
    #[arg(long, value_name = "DIR")]
    pub golden_dir: Option<PathBuf>,
    /// Seed for the batteries (hex); a fixed default is used when absent.
    #[arg(long, env = "HAARFORGE_SEED", value_name = "HEX")]
    pub seed: Option<String>,
    /// Write the JSON report here.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write raw marginals and overlaps of the moment battery as CSV here.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Print the JSON report to stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Haar,
    Random,
    Prf,
    BrokenPhase,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// Exit 1 unless the result is consistent with zero advantage.
    Indistinguishable,
    /// Exit 1 unless the battery separates the sources.
    Distinguishable,
}

#[derive(Args, Debug)]
pub struct DistinguishArgs {
    #[arg(long, value_enum)]
    pub backend_a: Source,
    #[arg(long, value_enum)]
    pub backend_b: Source,
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 16)]
    pub lambda: u32,
    /// Queries `l` used for the reported bound.
    #[arg(long, default_value_t = 1)]
    pub queries: u32,
    /// States drawn from each source.
    #[arg(long, default_value_t = 2000)]
    pub ensemble: usize,
    #[arg(long, env = "HAARFORGE_SEED", value_name = "HEX")]
    pub seed: Option<String>,
    #[arg(long, value_enum)]
    pub expect: Option<Expectation>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct GoldenArgs {
    /// Directory to write the reference vector files into.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}
