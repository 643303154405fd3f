use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sunimodal", version, about = "Chain-recurrent towers, level partitions and special alpha-limits of S-unimodal maps")]
pub struct Cli {
    /// TOML file overriding numerical settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Args, Clone)]
pub struct MapArgs {
    #[arg(long, default_value = "logistic")]
    pub family: String,
    #[arg(long)]
    pub mu: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Node tower as JSON.
    Tower {
        #[command(flatten)]
        map: MapArgs,
        /// Override the recursion depth.
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Level partition U_-1 .. U_p as JSON.
    Partition {
        #[command(flatten)]
        map: MapArgs,
        /// Print a one-line text diagram instead of JSON.
        #[arg(long)]
        diagram: bool,
    },
    /// Level and special alpha-limit of a point.
    Salpha {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        x: f64,
    },
    /// Bifurcation-diagram point cloud as CSV (mu,x,class).
    Bifurcation(SweepArgs),
    /// Parameter window of a periodic trapping region.
    Window {
        #[arg(long, default_value = "logistic")]
        family: String,
        #[arg(long)]
        period: usize,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
    },
    /// Brute-force validators.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Symbolic dynamics of Cantor nodes.
    #[command(subcommand)]
    Symbolic(SymbolicCmd),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "logistic")]
    pub family: String,
    #[arg(long)]
    pub lo: f64,
    #[arg(long)]
    pub hi: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Emit attractor points.
    #[arg(long)]
    pub attractor_cloud: bool,
    /// Emit repelling node points from the tower.
    #[arg(long)]
    pub tower: bool,
    /// Emit c_1 .. c_k.
    #[arg(long, default_value_t = 0)]
    pub critical_lines: usize,
    /// Attractor points per parameter.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// Chain classes of the grid digraph.
    Classes {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 8192)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Grid cells as CSV (cell,lo,hi,class); class -1 marks transient cells.
    Grid {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 8192)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Monte-Carlo backward trails and their limit clusters.
    Backward {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 500)]
        depth: usize,
        #[arg(long, default_value_t = 200)]
        trails: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.2)]
        tail_frac: f64,
        /// Enumerate the preimage tree instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Dump the trails as CSV (trail,step,x) instead of the report.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum SymbolicCmd {
    /// Itinerary of a point w.r.t. a Cantor node.
    Itinerary {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 12)]
        len: usize,
        /// Tower index of the node; defaults to the first Cantor node.
        #[arg(long)]
        node: Option<usize>,
    },
    /// Shift of finite type realised by a Cantor node.
    Sft {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 4)]
        word_len: usize,
        #[arg(long)]
        node: Option<usize>,
    },
    /// Interval of points with a given itinerary.
    Invert {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        word: String,
        #[arg(long)]
        node: Option<usize>,
    },
    /// Backward-dense tail for an explicit shift of finite type.
    Tail {
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        /// Forbidden words, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "")]
        forbidden: Vec<String>,
        #[arg(long)]
        head: String,
        #[arg(long, default_value_t = 3)]
        depth_words: usize,
    },
    /// Backward-dense orbit of a point of a Cantor node.
    Bitrajectory {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 200)]
        depth: usize,
        #[arg(long)]
        node: Option<usize>,
    },
}
