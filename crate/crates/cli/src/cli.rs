use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use glab_core::Ratio;

#[derive(Debug, Parser)]
#[command(
    name = "glab",
    version,
    about = "Exact experiments on generic and coarse computability"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the trace here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Largest number of relevant oracle bits a measure may enumerate.
    #[arg(long, global = true, env = "GLAB_BIT_CAP", default_value_t = glab_core::measure::DEFAULT_BIT_CAP)]
    pub bit_cap: usize,

    #[arg(long, global = true, default_value = "9/10")]
    pub threshold_halt: Ratio,

    #[arg(long, global = true, default_value = "4/5")]
    pub threshold_agree: Ratio,

    #[arg(long, global = true, default_value = "3/5")]
    pub threshold_disagree: Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gap census and gap-lemma bounds for a prefix.
    Density(DensityArgs),
    /// Image of a source prefix under a coding map.
    Encode(EncodeArgs),
    /// Recover source bits from an image.
    Decode(DecodeArgs),
    /// Simulate the marker construction.
    MarkerRun(MarkerArgs),
    /// Build (and optionally prune) a wiggle tree.
    WiggleTree(WiggleArgs),
    /// Codes of strings that are not initial segments of a prefix.
    BadStrings(BadStringsArgs),
    /// Exact halting, output and multivalued measures.
    Measure(MeasureArgs),
    /// Greedy 90% or 60% towers, with the 80% classification.
    Tower(TowerArgs),
    /// The majority vote.
    Vote(VoteArgs),
    /// Conditions, the F construction and the ψ search.
    Forcing(ForcingArgs),
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// File holding the prefix as 0/1 characters, or as hex with --hex-len.
    pub input: PathBuf,
    /// Read the file as hex packing of this many bits.
    #[arg(long)]
    pub hex_len: Option<usize>,
    /// Gap exponent; all exponents up to the last complete block when omitted.
    #[arg(long)]
    pub e: Option<u32>,
    /// Last block allowed to carry a gap in the zero-count bound. Defaults to
    /// the last gapped block (at least e - 1).
    #[arg(long)]
    pub j: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodingMap {
    R,
    Rtilde,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long, value_enum)]
    pub map: CodingMap,
    /// Source prefix as 0/1 characters.
    pub source: String,
    #[arg(long)]
    pub out_len: usize,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long, value_enum)]
    pub map: CodingMap,
    /// Image as 0/1 characters, `?` for positions that never converge.
    pub image: String,
    /// Number of source bits to read.
    #[arg(long)]
    pub bits: u32,
    /// Witnesses scanned per bit for R.
    #[arg(long, default_value_t = 1024)]
    pub witness_cap: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeBoundArg {
    Stage,
    Strategy,
}

#[derive(Debug, Args)]
pub struct MarkerArgs {
    #[arg(long)]
    pub stages: u32,
    #[arg(long)]
    pub depth: Option<u32>,
    /// JSON array (one entry per strategy) of [{stage, values}] schedules.
    #[arg(long)]
    pub schedules: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TreeBoundArg::Stage)]
    pub tree_bound: TreeBoundArg,
}

#[derive(Debug, Args)]
pub struct WiggleArgs {
    #[arg(long)]
    pub blocks: u32,
    /// Diagonal cut `n_i,v,s_i`.
    #[arg(long, value_parser = parse_triple)]
    pub prune: Option<(usize, u64, usize)>,
}

#[derive(Debug, Args)]
pub struct BadStringsArgs {
    /// The prefix `a` as 0/1 characters.
    pub a: String,
    #[arg(long)]
    pub max_len: usize,
}

#[derive(Debug, Args)]
pub struct OpSource {
    /// Operator as a JSON axiom table.
    #[arg(long, conflicts_with = "catalog")]
    pub op: Option<PathBuf>,
    /// A catalog operator: empty, constant:V[:STAGE], single-bit:M,
    /// bit-copy:M, every-bit:A..B[:V], parity:A..B, xor:B, tiled-xor:START:TILES,
    /// all-ones-floors:START:WIDTH:FLOORS[:V]. Built for input --n.
    #[arg(long)]
    pub catalog: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    Halting,
    Output0,
    Output1,
    Multivalued,
    UChain,
    Monotonicity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exhaustive,
    InclusionExclusion,
    Both,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub source: OpSource,
    #[arg(long, default_value_t = 0)]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = MeasureKind::Halting)]
    pub kind: MeasureKind,
    /// Window start `k`.
    #[arg(long, default_value_t = 0)]
    pub low: u64,
    /// Window end `l`; unbounded when omitted. For monotonicity, the `l` range end.
    #[arg(long)]
    pub high: Option<u64>,
    /// Stage cap; unbounded when omitted.
    #[arg(long)]
    pub stages: Option<u64>,
    /// Chain depth for u-chain.
    #[arg(long, default_value_t = 5)]
    pub depth: u32,
    #[arg(long, value_enum, default_value_t = MethodArg::Exhaustive)]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TowerKindArg {
    #[value(name = "90")]
    Halting90,
    #[value(name = "60")]
    Disagreement60,
}

#[derive(Debug, Args)]
pub struct TowerArgs {
    #[command(flatten)]
    pub source: OpSource,
    #[arg(long, value_enum, default_value_t = TowerKindArg::Halting90)]
    pub kind: TowerKindArg,
    #[arg(long, default_value_t = 0)]
    pub n: u64,
    /// Inputs checked for multivaluedness (60% towers); defaults to --n.
    #[arg(long, value_delimiter = ',')]
    pub inputs: Vec<u64>,
    /// First floor boundary.
    #[arg(long, default_value_t = 0)]
    pub k: u64,
    #[arg(long, default_value_t = 4)]
    pub floors: usize,
    /// Largest boundary searched.
    #[arg(long, default_value_t = 64)]
    pub cap: u64,
    /// Candidate widths for 60% floors: `doubling` or `step:W`.
    #[arg(long, default_value = "doubling", value_parser = parse_width)]
    pub width: glab_core::measure::WidthRule,
    #[arg(long)]
    pub stages: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VoteArgs {
    #[command(flatten)]
    pub source: OpSource,
    #[arg(long, default_value_t = 0)]
    pub n: u64,
    /// Bits below this are hidden.
    #[arg(long, default_value_t = 0)]
    pub l: u64,
    #[arg(long, default_value_t = 64)]
    pub stage_cap: u64,
}

#[derive(Debug, Args)]
pub struct ForcingArgs {
    #[command(subcommand)]
    pub action: ForcingAction,
}

#[derive(Debug, Subcommand)]
pub enum ForcingAction {
    /// Whether Q is a condition and extends P.
    Check {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    /// Build F from a row oracle.
    BuildF {
        /// Row oracle as 0/1/? characters; empty when omitted.
        #[arg(long, default_value = "")]
        x: String,
        /// Starting condition file; the empty oracle when omitted.
        #[arg(long)]
        sigma: Option<PathBuf>,
        #[arg(long)]
        epsilon: Ratio,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        i: u64,
        /// Values for the filled positions, as 0/1 characters; sets the length.
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = 4)]
        horizon_factor: u64,
    },
    /// Search below a condition for a sub-oracle of F that halts.
    Psi {
        #[command(flatten)]
        source: OpSource,
        #[arg(long)]
        condition: PathBuf,
        /// F as 0/1/? characters.
        #[arg(long)]
        f: String,
        /// Values used to pad the hit, as 0/1 characters.
        #[arg(long)]
        values: Option<String>,
        #[arg(long, default_value_t = 0)]
        n: u64,
        #[arg(long, default_value_t = 32)]
        length_cap: u64,
        #[arg(long, default_value_t = 8)]
        stage_cap: u64,
    },
}

fn parse_triple(s: &str) -> Result<(usize, u64, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b, c] = parts[..] else {
        return Err(format!("expected n_i,v,s_i, got {s:?}"));
    };
    let num = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((num(a)? as usize, num(b)?, num(c)? as usize))
}

fn parse_width(s: &str) -> Result<glab_core::measure::WidthRule, String> {
    use glab_core::measure::WidthRule;
    match s.split_once(':') {
        None if s == "doubling" => Ok(WidthRule::Doubling),
        Some(("step", w)) => w.parse().map(WidthRule::Step).map_err(|e| format!("{w:?}: {e}")),
        _ => Err(format!("expected doubling or step:W, got {s:?}")),
    }
}
