//! Argument parsing for the `siphons` binary.
//!
//! Exit codes: 0 on success (timeouts included), 1 on usage errors, 2 when
//! an input file cannot be parsed.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::{
    cmd_analyze, cmd_gen, cmd_stats, cmd_sweep_with, AnalyzeOptions, GenFamily, OutputFormat, SweepOptions, Target,
    DEFAULT_TIMEOUT_MS,
};
use crate::analysis::Engine;
use crate::bb::Strategy;
use crate::error::{Error, Result};
use crate::ingest::Format;

#[derive(Debug, Parser)]
#[command(name = "siphons", version, about = "Minimal siphon and trap enumeration for Petri nets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate the minimal siphons and/or traps of a model.
    Analyze(AnalyzeArgs),
    /// Write a generated net as PNML.
    Gen(GenArgs),
    /// Time enumeration on 3-SAT reduction nets across clause densities.
    Sweep(SweepArgs),
    /// Summarize every model in a directory.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Reaction file (.rxn) or PNML (.pnml, .xml).
    pub input: PathBuf,
    /// Input format; guessed from the extension by default.
    #[arg(long, value_parser = parse_with::<Format>)]
    pub format: Option<Format>,
    /// siphons, traps or both.
    #[arg(long, default_value = "siphons", value_parser = parse_with::<Target>)]
    pub target: Target,
    /// sat, bb or oracle.
    #[arg(long, default_value = "sat")]
    pub engine: String,
    /// Keep only sets containing these places (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub contains: Vec<String>,
    /// Also report, per minimal siphon, its largest trap and whether it is marked.
    #[arg(long)]
    pub marking_report: bool,
    /// Time limit per enumeration in milliseconds.
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_MS)]
    pub timeout: u64,
    /// Seed for the random branch-and-bound strategy.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Branch-and-bound variable order: fixed, random or frequency.
    #[arg(long, default_value = "fixed")]
    pub strategy: String,
    /// text, json or csv.
    #[arg(long, default_value = "text", value_parser = parse_with::<OutputFormat>)]
    pub output: OutputFormat,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub family: GenCommand,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// The cyclic chain with 2^n minimal siphons.
    Chain {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reduction net of a random 3-SAT formula (the formula goes to <out>.cnf).
    SatReduction {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random net with bounded pre- and post-set sizes.
    RandomNet {
        #[arg(long)]
        places: usize,
        #[arg(long)]
        transitions: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 50)]
    pub vars: usize,
    /// Clause densities (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,4.2,4.4,4.6,5,6,8,10")]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_MS)]
    pub timeout: u64,
    #[arg(long, default_value = "sat")]
    pub engine: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// csv, text or json.
    #[arg(long, default_value = "csv", value_parser = parse_with::<OutputFormat>)]
    pub output: OutputFormat,
    /// One CSV row per generated instance instead of per density.
    #[arg(long)]
    pub per_trial: bool,
    /// Print a line to stderr after every trial.
    #[arg(long)]
    pub progress: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub dir: PathBuf,
    #[arg(long, default_value = "sat")]
    pub engine: String,
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_MS)]
    pub timeout: u64,
    #[arg(long, default_value = "text", value_parser = parse_with::<OutputFormat>)]
    pub output: OutputFormat,
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn engine(name: &str, strategy: &str, seed: u64) -> Result<Engine> {
    let e: Engine = name.parse()?;
    let s: Strategy = strategy.parse()?;
    Ok(match (e, s) {
        (Engine::Bb(_), Strategy::Random(0)) if !strategy.contains(':') => Engine::Bb(Strategy::Random(seed)),
        (Engine::Bb(_), s) => Engine::Bb(s),
        (e, _) => e,
    })
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let text = match cli.command {
        Command::Analyze(a) => {
            let opts = AnalyzeOptions {
                input: a.input,
                format: a.format,
                target: a.target,
                engine: engine(&a.engine, &a.strategy, a.seed)?,
                contains: a.contains,
                marking_report: a.marking_report,
                timeout_ms: a.timeout,
            };
            cmd_analyze(&opts)?.render(a.output)?
        }
        Command::Gen(g) => {
            let (family, path) = match g.family {
                GenCommand::Chain { n, out } => (GenFamily::Chain { n }, out),
                GenCommand::SatReduction { vars, clauses, seed, out } => {
                    (GenFamily::SatReduction { vars, clauses, seed }, out)
                }
                GenCommand::RandomNet { places, transitions, degree, seed, out } => {
                    (GenFamily::RandomNet { places, transitions, degree, seed }, out)
                }
            };
            let files = cmd_gen(family, &path)?;
            files.iter().map(|f| format!("wrote {}\n", f.display())).collect()
        }
        Command::Sweep(s) => {
            let opts = SweepOptions {
                vars: s.vars,
                alphas: s.alphas,
                trials: s.trials,
                timeout_ms: s.timeout,
                engine: engine(&s.engine, "fixed", 0)?,
                seed: s.seed,
            };
            let report = cmd_sweep_with(&opts, |t| {
                if s.progress {
                    let _ = writeln!(
                        err,
                        "alpha {:.2} trial {}: {:.1} ms{}",
                        t.alpha,
                        t.trial,
                        t.time_ms,
                        if t.timed_out { " (timeout)" } else { "" }
                    );
                }
            })?;
            report.render(s.output, s.per_trial)?
        }
        Command::Stats(s) => cmd_stats(&s.dir, engine(&s.engine, "fixed", 0)?, s.timeout)?.render(s.output)?,
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_parse_error() {
                2
            } else {
                1
            }
        }
    }
}
