use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use embedlab_core::{Metric, StoreFormat};

/// Inspect word embeddings: arithmetic, neighbors, bias axes, transforms
/// and charts over vector text files.
#[derive(Debug, Parser)]
#[command(name = "embedlab", version)]
pub struct Cli {
    /// Vector file to load, optionally labelled as LABEL=PATH. Repeatable.
    #[arg(long = "vectors", value_name = "[LABEL=]PATH", global = true)]
    pub vectors: Vec<String>,

    /// Layout of the vector files.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto, global = true)]
    pub format: FormatArg,

    #[arg(long, value_enum, default_value_t = MetricArg::Cosine, global = true)]
    pub metric: MetricArg,

    /// Store to query when several are loaded (defaults to the first).
    #[arg(long, value_name = "LABEL", global = true)]
    pub store: Option<String>,

    /// Write results here instead of stdout.
    #[arg(long, value_name = "PATH", global = true)]
    pub output: Option<PathBuf>,

    /// Emit canonical JSON.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Auto,
    Word2vec,
    Glove,
}

impl From<FormatArg> for StoreFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Auto => StoreFormat::Auto,
            FormatArg::Word2vec => StoreFormat::Word2vecText,
            FormatArg::Glove => StoreFormat::GloveText,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Cosine,
    Euclidean,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Cosine => Metric::Cosine,
            MetricArg::Euclidean => Metric::Euclidean,
        }
    }
}

/// Items given inline, comma separated, or one per line in a file.
#[derive(Clone, Debug, Args)]
pub struct Words {
    #[arg(long, value_delimiter = ',', value_name = "EXPR,...")]
    pub words: Vec<String>,

    #[arg(long, value_name = "PATH")]
    pub words_file: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct ChartSize {
    /// Emit SVG instead of JSON.
    #[arg(long)]
    pub svg: bool,

    #[arg(long, default_value_t = 640)]
    pub width: u32,

    #[arg(long, default_value_t = 480)]
    pub height: u32,
}

#[derive(Clone, Debug, Args)]
pub struct Axes {
    #[arg(long, value_name = "EXPR")]
    pub x_axis: String,

    #[arg(long, value_name = "EXPR")]
    pub y_axis: String,

    /// Also plot the axis embeddings themselves.
    #[arg(long)]
    pub show_axis_point: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nearest neighbors of an expression.
    Similar {
        #[arg(long, value_name = "EXPR")]
        expr: String,
        #[arg(short, default_value_t = 10)]
        n: usize,
        /// Drop the expression's own tokens from the results.
        #[arg(long)]
        exclude_inputs: bool,
    },
    /// Rank the store against sum(pos) - sum(neg).
    Analogy {
        #[arg(long, value_delimiter = ',', required = true)]
        pos: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        neg: Vec<String>,
        #[arg(short, default_value_t = 10)]
        n: usize,
        /// Keep the input tokens among the candidates.
        #[arg(long)]
        include_inputs: bool,
    },
    /// Evaluate an expression.
    Eval {
        #[arg(long, value_name = "EXPR")]
        expr: String,
    },
    /// Pairwise distance matrix of words or of pair differences.
    Distance {
        #[command(flatten)]
        words: Words,
        /// Two-column CSV of token pairs; their differences are compared.
        #[arg(long, value_name = "CSV", conflicts_with_all = ["words", "words_file"])]
        pairs_file: Option<PathBuf>,
        #[command(flatten)]
        size: ChartSize,
    },
    /// Scatter or arrow charts.
    Plot {
        #[command(subcommand)]
        kind: PlotCommand,
    },
    /// Principal component coordinates.
    Pca {
        #[command(flatten)]
        words: Words,
        #[arg(short, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        size: ChartSize,
    },
    /// Classical multidimensional scaling on the chosen metric.
    Mds {
        #[command(flatten)]
        words: Words,
        #[arg(short, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        size: ChartSize,
    },
    /// Remove a bias direction built from token pairs.
    Debias {
        #[command(flatten)]
        words: Words,
        #[arg(long, value_name = "CSV")]
        pairs_file: PathBuf,
        /// Compare this token's neighborhood before and after.
        #[arg(long, value_name = "TOKEN")]
        report_token: Option<String>,
        #[arg(short, default_value_t = 10)]
        n: usize,
    },
    /// Phrase embeddings of each line of a file, as CSV.
    Featurize {
        #[arg(long, value_name = "PATH")]
        texts_file: PathBuf,
        #[arg(long, value_name = "CSV")]
        out: PathBuf,
    },
    /// Rewrite a store in another text format.
    Convert {
        #[arg(long, value_enum)]
        to: ConvertFormat,
    },
    /// The same chart for every loaded store, on a shared scale.
    Compare {
        #[command(flatten)]
        words: Words,
        #[arg(long, value_name = "EXPR", required_unless_present = "distance")]
        x_axis: Option<String>,
        #[arg(long, value_name = "EXPR", required_unless_present = "distance")]
        y_axis: Option<String>,
        #[arg(long)]
        show_axis_point: bool,
        /// Compare distance heatmaps instead of scatters.
        #[arg(long)]
        distance: bool,
        #[command(flatten)]
        size: ChartSize,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8000)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of static files served under /.
        #[arg(long, value_name = "DIR")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PlotCommand {
    /// Members projected on two axis expressions.
    Scatter {
        #[command(flatten)]
        words: Words,
        #[command(flatten)]
        axes: Axes,
        #[command(flatten)]
        size: ChartSize,
    },
    /// Arrows from the origin to each 2-d member.
    Arrows {
        #[command(flatten)]
        words: Words,
        #[command(flatten)]
        size: ChartSize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConvertFormat {
    Word2vec,
    Glove,
}

impl From<ConvertFormat> for StoreFormat {
    fn from(f: ConvertFormat) -> Self {
        match f {
            ConvertFormat::Word2vec => StoreFormat::Word2vecText,
            ConvertFormat::Glove => StoreFormat::GloveText,
        }
    }
}
