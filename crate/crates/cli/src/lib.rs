//! Command-line front end: argument parsing, dispatch and report rendering.
//!
//! Exit codes: 0 when every check is certified, 1 for a certified violation,
//! 2 when something stayed inconclusive or a premise could not be
//! certified, 64 for parse and configuration errors.

mod args;
mod commands;
mod render;

use clap::{Parser, Subcommand, ValueEnum};

pub use render::{Exit, Outcome};

#[derive(Debug, Parser)]
#[command(
    name = "limitless",
    version,
    about = "Certify or refute limit-free calculus claims with exact arithmetic"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct GlobalOpts {
    /// Working precision of interval enclosures, in bits.
    #[arg(
        long,
        global = true,
        default_value_t = 64,
        env = "LIMITLESS_PRECISION_BITS",
        value_parser = clap::value_parser!(u32).range(8..=4096)
    )]
    pub precision_bits: u32,
    /// Interior grid points tried as bracket candidates.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub grid_n: u64,
    /// Subintervals examined by searches.
    #[arg(long, global = true, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    /// Finite window `lo,hi` that unbounded domains are cut to.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    CsvPlot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that f controls F on every sampled subinterval of the domain.
    VerifyControl {
        #[arg(long = "F", allow_hyphen_values = true)]
        big_f: String,
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        /// `lo,hi`; `-inf` and `inf` need `--window`.
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
    },
    /// Enclose the integral of f over [u, v].
    Integrate {
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        /// Equal subdivisions (per piece when breakpoints are given).
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Comma-separated interior points where f jumps or turns.
        #[arg(long, allow_hyphen_values = true)]
        breakpoints: Option<String>,
    },
    /// First-order approximation of F(target) from base with a certified error.
    Approx {
        #[arg(long = "F", allow_hyphen_values = true)]
        big_f: String,
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
    /// Certified Lipschitz constant of f on the domain.
    Lipschitz {
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
    },
    /// Sample both forms of |D(u, v) - g(s)| ≤ M (v - u) and the 2M bound on g.
    Linqun {
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        #[arg(long = "g", allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
        #[arg(long = "M")]
        m: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Compare F(v) - F(u) with an enclosure of the integral of f.
    NlCheck {
        #[arg(long = "F", allow_hyphen_values = true)]
        big_f: String,
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        breakpoints: Option<String>,
    },
    /// Infer the shape of F from a certified property of its control f.
    Shape {
        #[arg(long = "F", allow_hyphen_values = true)]
        big_f: String,
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
        #[arg(long, value_enum)]
        premise: PremiseArg,
    },
    /// Glue claims on two overlapping intervals and verify the union.
    Glue {
        #[arg(long = "F", allow_hyphen_values = true)]
        big_f: String,
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        #[arg(long, allow_hyphen_values = true)]
        right: String,
    },
    /// Print an expression in canonical form.
    Fmt {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PremiseArg {
    Zero,
    Const,
    Positive,
    Negative,
    Increasing,
    Decreasing,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyControl { .. } => "verify-control",
            Command::Integrate { .. } => "integrate",
            Command::Approx { .. } => "approx",
            Command::Lipschitz { .. } => "lipschitz",
            Command::Linqun { .. } => "linqun",
            Command::NlCheck { .. } => "nl-check",
            Command::Shape { .. } => "shape",
            Command::Glue { .. } => "glue",
            Command::Fmt { .. } => "fmt",
        }
    }
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let name = cli.command.name();
    match commands::dispatch(cli) {
        Ok(outcome) => outcome.finish(name, &cli.opts),
        Err(err) => Outcome::usage_error(err.to_string()).finish(name, &cli.opts),
    }
}

/// Parses `args` (program name first) and runs them; clap's help and
/// version requests exit 0, other argument errors 64.
pub fn run_args<I, T>(args: I) -> (Exit, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => {
            let outcome = run(&cli);
            let rendered = outcome.render(cli.opts.output);
            (outcome.exit, rendered, outcome.stderr)
        }
        Err(err) => {
            let exit = if err.use_stderr() {
                Exit::Usage
            } else {
                Exit::Success
            };
            let text = err.render().to_string();
            if err.use_stderr() {
                (exit, String::new(), text)
            } else {
                (exit, text, String::new())
            }
        }
    }
}
