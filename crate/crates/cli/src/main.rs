//! `staircase`: class lookup, triple trees, blocked intervals, ATF traces and
//! obstruction envelopes for one-point blowups of the projective plane.

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{AtfArgs, CliError, EnvelopeArgs};

#[derive(Parser)]
#[command(name = "staircase", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Print the class with the given center, e.g. "[7;4]" or "29/4".
    Class { center: String },
    /// Enumerate and verify the mutation tree of a family.
    Tree {
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Accumulation point, volume and blocked interval of a triple.
    Limits {
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Trace of repeated y-mutations of the quadrilateral of a triple.
    Atf {
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long = "k-max", default_value_t = 10)]
        k_max: usize,
        /// Output directory for trace.json and the SVG files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also draw one SVG per step.
        #[arg(long)]
        svg: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Specialize at this rational b instead of the accumulation point.
        #[arg(long)]
        b: Option<String>,
    },
    /// Volume curve and the largest family obstruction at sampled z.
    Envelope {
        #[arg(long)]
        b: String,
        #[arg(long = "z-min")]
        z_min: String,
        #[arg(long = "z-max")]
        z_max: String,
        #[arg(long, default_value_t = 11)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        /// Leave the obstruction columns empty.
        #[arg(long)]
        no_classes: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn require(format: Format, allowed: &[Format], command: &str) -> Result<(), CliError> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(CliError::Domain(format!("{command} does not support --format {format:?}").to_lowercase()))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Class { center } => commands::class(&center),
        Command::Tree { n, depth, out, format } => {
            require(format, &[Format::Json], "tree")?;
            commands::tree(n, depth, out.as_deref())
        }
        Command::Limits { n, word, out, format } => {
            require(format, &[Format::Json], "limits")?;
            commands::limits(n, &word, out.as_deref())
        }
        Command::Atf { n, word, k_max, out, svg, format, b } => {
            require(format, &[Format::Json, Format::Svg], "atf")?;
            commands::atf(AtfArgs {
                n,
                word: &word,
                k_max,
                out: &out,
                svg: svg || format == Format::Svg,
                b: b.as_deref(),
            })
        }
        Command::Envelope { b, z_min, z_max, samples, n, depth, no_classes, out, format } => {
            require(format, &[Format::Csv], "envelope")?;
            commands::envelope(EnvelopeArgs {
                b: &b,
                z_min: &z_min,
                z_max: &z_max,
                samples,
                n,
                depth,
                no_classes,
                out: out.as_deref(),
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("staircase: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
