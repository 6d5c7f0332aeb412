//! `solidcode`: construct, verify, and simulate variable-length solid codes.
//!
//! Exit codes: 0 when the checked property holds (or a construction
//! succeeds), 1 when a property fails and a witness is printed, 2 on usage
//! or validation errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod inputs;
mod output;

#[derive(Parser)]
#[command(
    name = "solidcode",
    version,
    about = "Solid codes from signature partitions: construction, verification, simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Framing {
    /// Whitespace-separated letter tokens.
    #[default]
    Tokens,
    /// Raw bytes, one letter per byte (for two-digit-hex byte alphabets).
    Bytes,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum BitflipPolicy {
    /// Renormalize each row over its in-alphabet outcomes.
    #[default]
    Renormalize,
    /// Refuse alphabets that are not closed under single flips.
    Reject,
}

#[derive(Subcommand)]
enum Command {
    /// Build the canonical solid code from a partition and run lengths.
    Construct(ConstructArgs),
    /// Check a code for solidness and unique decipherability.
    Check(CheckArgs),
    /// Verify error detection exhaustively, or by seeded Monte Carlo above
    /// the enumeration cap.
    Simulate(SimulateArgs),
    /// List codeword occurrences inside a (possibly corrupted) stream.
    Scan(ScanArgs),
    /// Certify the byte-level solid-code structure of UTF-8.
    Utf8(Utf8Args),
}

#[derive(clap::Args)]
struct ConstructArgs {
    /// Partition file: { "letters": [...], "classes": [[...], ...] }.
    #[arg(long, conflicts_with = "alphabet")]
    partition: Option<PathBuf>,
    /// Bitstring alphabet file (array of 0/1 strings): builds the parity
    /// partition with all odd blocks in one class.
    #[arg(long)]
    alphabet: Option<PathBuf>,
    /// Run-length file: { "L": { "1": k1, ... }, "strict": bool }.
    #[arg(long)]
    lengths: PathBuf,
    /// Allow zero-length runs regardless of the file's strict flag.
    #[arg(long)]
    extended_lengths: bool,
    /// Enumeration cap; larger codes are described lazily.
    #[arg(long, default_value_t = solidcode::DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    /// Write the constructed code (or its lazy description) to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Code file: { "alphabet": { "letters": [...] }, "words": [[...], ...] }.
    #[arg(long)]
    code: PathBuf,
    /// Cap on the dangling-suffix set of the decipherability check.
    #[arg(long, default_value_t = solidcode::DEFAULT_SUFFIX_BUDGET)]
    budget: usize,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long, conflicts_with = "alphabet")]
    partition: Option<PathBuf>,
    /// Bitstring alphabet file; parity partition with one odd class.
    #[arg(long)]
    alphabet: Option<PathBuf>,
    #[arg(long)]
    lengths: PathBuf,
    #[arg(long)]
    extended_lengths: bool,
    /// Channel file: { "alphabet": ..., "rows": { letter: { letter: p } } }.
    #[arg(long, conflicts_with = "bitflip")]
    channel: Option<PathBuf>,
    /// Build a single-bitflip channel with this hold (no-flip) probability;
    /// requires bitstring letters.
    #[arg(long)]
    bitflip: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    bitflip_policy: BitflipPolicy,
    /// Seed for Monte Carlo runs; drawn from entropy and echoed if omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials when the exhaustive census is over the cap.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Messages of up to this many codewords.
    #[arg(long, default_value_t = 3)]
    max_words: usize,
    /// Cap on total enumerated channel outcomes before downgrading to
    /// Monte Carlo.
    #[arg(long, default_value_t = solidcode::DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(clap::Args)]
struct ScanArgs {
    #[arg(long)]
    code: PathBuf,
    /// Stream file to scan.
    #[arg(long)]
    stream: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    framing: Framing,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(clap::Args)]
struct Utf8Args {
    /// Number of random codeword pairs for the direct pairwise check.
    #[arg(long, default_value_t = 100_000)]
    pairs: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Construct(args) => commands::construct(args),
        Command::Check(args) => commands::check(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Scan(args) => commands::scan(args),
        Command::Utf8(args) => commands::utf8(args),
    }
}
