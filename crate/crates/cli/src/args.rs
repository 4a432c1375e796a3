use std::net::IpAddr;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bwtx",
    version,
    about = "Explore Burrows-Wheeler transforms under different alphabet orderings"
)]
pub struct Cli {
    /// Chapin-Tate ordering table: a comma list or the raw bytes in order.
    #[arg(long, global = true, value_name = "FILE")]
    pub chapin_tate: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the transform of a text with its run statistics.
    Transform {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        ordering: SingleOrdering,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        save: Save,
    },
    /// Compare run statistics across orderings.
    Stats {
        #[command(flatten)]
        input: Input,
        /// Comma list of characters, least first. Repeatable.
        #[arg(long, value_name = "SPEC")]
        ordering: Vec<String>,
        /// Named ordering. Repeatable. With no orderings given, every
        /// available preset is evaluated.
        #[arg(long, value_name = "NAME")]
        preset: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Orderings evaluated at once; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        save: Save,
    },
    /// Print part of the sorted rotation matrix next to the last column.
    Window {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        ordering: SingleOrdering,
        /// Window as ROWSxCOLS@ROW,COL, or ROWSxCOLS from the top-left corner.
        #[arg(long, default_value = "16x16@0,0")]
        window: WindowArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run an ordering heuristic and print its findings as JSON.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        ordering: SingleOrdering,
        #[arg(long, value_enum)]
        kind: AnalysisKind,
        /// Largest gap bridged when chaining runs.
        #[arg(long)]
        max_gap: Option<usize>,
        /// Section index for `pairs`; every section when omitted.
        #[arg(long)]
        section: Option<usize>,
    },
    /// Run the HTTP API.
    Serve {
        /// Port to listen on; 0 picks a free one.
        #[arg(long, env = "BWTX_PORT", default_value_t = bwtx_server::DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
    },
}

/// Text to work on: a literal argument, a file, or standard input.
#[derive(Debug, Args)]
pub struct Input {
    /// Literal text.
    #[arg(conflicts_with = "input")]
    pub text: Option<String>,
    /// Read the text from a file; `-` reads standard input.
    #[arg(short, long, value_name = "PATH")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SingleOrdering {
    /// Comma list of characters, least first.
    #[arg(long, value_name = "SPEC", conflicts_with = "preset")]
    pub ordering: Option<String>,
    /// Named ordering (default ascii).
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
pub struct Save {
    /// Also write the transforms to a session file.
    #[arg(long, value_name = "PATH")]
    pub session: Option<PathBuf>,
    /// Store each last column in the session file so loading skips sorting.
    #[arg(long, requires = "session")]
    pub cache: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalysisKind {
    #[value(alias = "run_breakers")]
    RunBreakers,
    #[value(alias = "potential_runs")]
    PotentialRuns,
    Sections,
    Pairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowArg {
    pub rows: usize,
    pub cols: usize,
    pub top: usize,
    pub left: usize,
}

impl FromStr for WindowArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected ROWSxCOLS@ROW,COL, got {s:?}");
        let (size, origin) = s.split_once('@').unwrap_or((s, "0,0"));
        let (rows, cols) = size.split_once(['x', 'X']).ok_or_else(bad)?;
        let (top, left) = origin.split_once(',').ok_or_else(bad)?;
        let num = |v: &str| v.trim().parse::<usize>().map_err(|_| bad());
        Ok(WindowArg {
            rows: num(rows)?,
            cols: num(cols)?,
            top: num(top)?,
            left: num(left)?,
        })
    }
}
