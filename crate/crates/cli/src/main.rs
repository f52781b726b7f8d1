//! `gr`: generate, check, decompose and search edge-colorings of complete
//! graphs. Machine output is JSON on stdout; diagnostics go to stderr.

use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gallai_core::constructions::{
    gallai_lower_bound, odd_cycle_two_color_extremal, random_gallai, OddCycleParam, SamplerProfile,
};
use gallai_core::gallai::{find_gallai_partition, validate_partition};
use gallai_core::search::{self, SearchConfig, SearchStatus};
use gallai_core::{find_rainbow_triangle, is_bad_with, ColoredCompleteGraph, DetectConfig, VerdictKind};
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 2;
const EXIT_EXPECT_FAILED: u8 = 3;

/// Overrides the per-query node budget of cycle detection.
const NODE_BUDGET_ENV: &str = "GR_NODE_BUDGET";

#[derive(Parser)]
#[command(
    name = "gr",
    version,
    about = "Gallai colorings, monochromatic cycles and small Ramsey searches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated coloring in gcol format.
    #[command(subcommand)]
    Gen(Gen),
    /// Decide whether a coloring avoids rainbow triangles and monochromatic C_L.
    Check {
        file: PathBuf,
        #[arg(long)]
        cycle: usize,
        /// Exit with status 3 when the verdict differs.
        #[arg(long)]
        expect: Option<Expect>,
    },
    /// Extract and validate a Gallai partition.
    Partition { file: PathBuf },
    /// Exact search for a bad coloring of K_n.
    Search {
        #[arg(long)]
        mode: Mode,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long)]
        cycle: usize,
        #[command(flatten)]
        limits: Limits,
        /// Write the witness coloring here when one is found.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Search n = FROM..=TO and report the least n without a bad coloring.
    Scan {
        #[arg(long)]
        mode: Mode,
        #[arg(long)]
        cycle: usize,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Subcommand)]
enum Gen {
    /// Iterated doubling on m * 2^k vertices with no monochromatic C_{2m+1}.
    Construct {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        colors: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Two cliques on 2m vertices joined in a second color.
    TwoColor {
        #[arg(long)]
        m: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Random coloring without rainbow triangles.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        colors: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Limits {
    /// Seconds before the search gives up with status "timeout".
    #[arg(long, default_value_t = 1800)]
    time_limit: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
}

impl Limits {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            time_limit: Some(Duration::from_secs(self.time_limit)),
            workers: self.workers as usize,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Bad,
    NotBad,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    TwoColor,
    Gallai,
}

impl From<Mode> for search::SearchMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::TwoColor => Self::TwoColor,
            Mode::Gallai => Self::Gallai,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gr: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Writes to stdout; a reader that closed the pipe early is not an error.
fn write_stdout(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(v: &Value) -> Result<()> {
    write_stdout(&(serde_json::to_string_pretty(v)? + "\n"))
}

fn detect_config() -> Result<DetectConfig> {
    let mut cfg = DetectConfig::default();
    if let Ok(raw) = std::env::var(NODE_BUDGET_ENV) {
        cfg.node_budget = raw
            .trim()
            .parse()
            .with_context(|| format!("{NODE_BUDGET_ENV} must be a nonnegative integer, got {raw:?}"))?;
    }
    Ok(cfg)
}

fn load(path: &Path) -> Result<ColoredCompleteGraph> {
    Ok(ColoredCompleteGraph::load(path)?)
}

/// Saves to `output` and reports the file, or embeds the gcol text in the report.
fn emit(g: &ColoredCompleteGraph, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            g.save(path)?;
            eprintln!("gr: wrote {} ({} vertices, {} colors)", path.display(), g.n(), g.k());
            print_json(&json!({ "path": path, "vertices": g.n(), "colors": g.k() }))
        }
        None => print_json(&json!({ "vertices": g.n(), "colors": g.k(), "gcol": g.to_gcol() })),
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Gen(gen) => {
            let (g, output) = match gen {
                Gen::Construct { m, colors, output } => (gallai_lower_bound(OddCycleParam::new(m)?, colors)?, output),
                Gen::TwoColor { m, output } => (odd_cycle_two_color_extremal(OddCycleParam::new(m)?), output),
                Gen::Random {
                    n,
                    colors,
                    seed,
                    output,
                } => (random_gallai(n, colors, seed, &SamplerProfile::default())?, output),
            };
            emit(&g, output.as_deref())?;
        }
        Command::Check { file, cycle, expect } => {
            let g = load(&file)?;
            let verdict = is_bad_with(&g, cycle, &detect_config()?)?;
            print_json(&serde_json::to_value(&verdict)?)?;
            let wanted = match expect {
                Some(Expect::Bad) => VerdictKind::Bad,
                Some(Expect::NotBad) => VerdictKind::NotBad,
                None => return Ok(ExitCode::SUCCESS),
            };
            if verdict.verdict != wanted {
                eprintln!("gr: expected {}, got {}", json!(wanted), json!(verdict.verdict));
                return Ok(ExitCode::from(EXIT_EXPECT_FAILED));
            }
        }
        Command::Partition { file } => {
            let g = load(&file)?;
            if let Some(w) = find_rainbow_triangle(&g) {
                bail!("coloring contains a rainbow triangle: {}", serde_json::to_string(&w)?);
            }
            let partition = find_gallai_partition(&g)?;
            let report = validate_partition(&g, &partition)?;
            let mut out = serde_json::to_value(&partition)?;
            out["report"] = serde_json::to_value(&report)?;
            print_json(&out)?;
        }
        Command::Search {
            mode,
            n,
            colors,
            cycle,
            limits,
            output,
        } => {
            let cfg = limits.config();
            let outcome = match mode {
                Mode::TwoColor => {
                    if colors != 2 {
                        bail!("two-color search uses exactly 2 colors, got --colors {colors}");
                    }
                    search::search_bad_two_coloring_with(n, cycle, &cfg)?
                }
                Mode::Gallai => search::search_bad_gallai_with(n, colors, cycle, &cfg)?,
            };
            if let (Some(path), Some(g)) = (output.as_deref(), outcome.witness.as_ref()) {
                g.save(path)?;
                eprintln!("gr: wrote witness to {}", path.display());
            }
            if outcome.status == SearchStatus::Timeout {
                eprintln!("gr: time limit of {} s reached", limits.time_limit);
            }
            let mut out = serde_json::to_value(&outcome)?;
            out["mode"] = json!(search::SearchMode::from(mode));
            out["n"] = json!(n);
            out["colors"] = json!(colors);
            out["cycle"] = json!(cycle);
            print_json(&out)?;
        }
        Command::Scan {
            mode,
            cycle,
            from,
            to,
            colors,
            limits,
        } => {
            let report = search::threshold_scan(colors, cycle, from, to, mode.into(), &limits.config())?;
            print_json(&serde_json::to_value(&report)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
