use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "pgic",
    version,
    about = "Sum capacity, separability and bounds for two-sided parallel Gaussian interference channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Io {
    /// Channel specification file (JSON).
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct Optimizer {
    /// Grid spacing of the common-power fractions, in (0, 0.5].
    #[arg(long, default_value_t = 0.01)]
    pub grid: f64,
    /// Refinement stops once a round gains less than this many bits.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Minimum inner-minus-outer gap, in bits, to certify inseparability.
    #[arg(long, default_value_t = 1e-3)]
    pub margin: f64,
    /// Optimize one split per user and sub-channel.
    #[arg(long)]
    pub per_subchannel_beta: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-sub-channel rate quantities A..J.
    Rates(Io),
    /// Interference class of every sub-channel and of the channel.
    Classify(Io),
    /// Joint and independent sum capacities (strong or mixed channels).
    Sumcap(Io),
    /// Capacity region polygon and its bounds (strong channels).
    Region(Io),
    /// Separability verdict.
    Separable(Io),
    /// Independent-coding outer bound against the superposition inner bound.
    Bounds {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        opt: Optimizer,
    },
    /// Random search for weak channels certified inseparable.
    Search {
        #[command(flatten)]
        out: Output,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of random channels to evaluate.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 2)]
        subchannels: usize,
        #[arg(long, default_value_t = 0.05)]
        grid: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 1e-3)]
        margin: f64,
        /// Accepted for symmetry with `bounds`; the search splits per
        /// sub-channel unless `--scalar-beta` is given.
        #[arg(long, conflicts_with = "scalar_beta")]
        per_subchannel_beta: bool,
        /// Use one split per user.
        #[arg(long)]
        scalar_beta: bool,
    },
    /// Classify a grid of cross-gain ratios (input is a sweep spec).
    Sweep(Io),
    /// Joint/independent ratio as all powers shrink.
    Asympt {
        #[command(flatten)]
        io: Io,
        /// Power scale factors, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1e-1,1e-2,1e-3,1e-4,1e-5"
        )]
        scales: Vec<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Rates(_) => "rates",
            Command::Classify(_) => "classify",
            Command::Sumcap(_) => "sumcap",
            Command::Region(_) => "region",
            Command::Separable(_) => "separable",
            Command::Bounds { .. } => "bounds",
            Command::Search { .. } => "search",
            Command::Sweep(_) => "sweep",
            Command::Asympt { .. } => "asympt",
        }
    }

    pub fn output(&self) -> &Output {
        match self {
            Command::Rates(io)
            | Command::Classify(io)
            | Command::Sumcap(io)
            | Command::Region(io)
            | Command::Separable(io)
            | Command::Sweep(io)
            | Command::Bounds { io, .. }
            | Command::Asympt { io, .. } => &io.out,
            Command::Search { out, .. } => out,
        }
    }
}
