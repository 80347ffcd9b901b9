//! Command-line front end for `paperfold`: argument parsing and one function per command.
//!
//! Every command builds a [`Report`] through library calls only, so the same report can be
//! produced in-process and compared with the binary's output.

pub mod commands;
pub mod render;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{execute, Outcome};
pub use report::{Report, Table};

#[derive(Parser, Debug, Clone)]
#[command(name = "paperfold", version, about = "Scar trees and conformal-extension certificates for paper-folding schemes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check polygons, pairings, fullness and generator consistency.
    Validate(Source),
    /// Summarize the scar and classify boundary points.
    Classify(Source),
    /// Window bounds for the divergence integral under a decay hypothesis.
    Criterion(Source),
    /// Nested annulus system around the singular set.
    Mcmullen(Source),
    /// Modulus-of-continuity constants and table.
    Modulus(Source),
    /// SVG rendering of a scheme, its scar, collar, a disk or an annulus system.
    Render(Source),
    /// Print a built-in scheme as PFS text, or list the built-ins.
    Example { name: Option<String> },
}

/// Where the scheme comes from: a PFS file or a built-in.
#[derive(Args, Debug, Clone, Default)]
pub struct Source {
    /// Path to a PFS v1 file.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Machine,
    Svg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scene {
    #[default]
    Scheme,
    Scar,
    Collar,
    Disk,
    Mcmullen,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Truncation tolerance on the total unexpanded length.
    #[arg(long, global = true, default_value = "1/64")]
    pub eps: String,
    /// Number of windows for `criterion`.
    #[arg(long = "K", global = true, default_value_t = 8)]
    pub k: usize,
    /// First level for `mcmullen` and `render --scene mcmullen`.
    #[arg(long = "K0", global = true, default_value_t = 1)]
    pub k0: usize,
    /// Last level for `mcmullen` and `render --scene mcmullen`.
    #[arg(long = "K1", global = true, default_value_t = 5)]
    pub k1: usize,
    #[arg(long, global = true, default_value = "harmonic")]
    pub hypothesis: String,
    #[arg(long, global = true)]
    pub rbar: Option<String>,
    #[arg(long, global = true)]
    pub hbar: Option<String>,
    /// Radius of the target disk; without it moduli are reported in units of 8R.
    #[arg(long = "R", global = true)]
    pub big_r: Option<String>,
    /// Boundary parameters `t` or `poly:t` to classify or to centre a disk on.
    #[arg(long, global = true)]
    pub at: Vec<String>,
    /// Ball radius for `classify` and `render --scene disk`.
    #[arg(long, global = true)]
    pub radius: Option<String>,
    /// Number of times `(δ/2)·2^-m` in the modulus table.
    #[arg(long, global = true, default_value_t = 6)]
    pub times: usize,
    #[arg(long, global = true, value_enum, default_value_t = Scene::Scheme)]
    pub scene: Scene,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        let cli = Cli::parse_from(["paperfold", "example"]);
        cli.opts
    }
}
