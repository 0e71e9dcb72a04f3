use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relaynet::format::{InstanceFile, SolutionFile};
use relaynet::{naive_solve, solve_with, sweep, Instance, OracleConfig, SolveOptions};

mod check;
mod svg;

#[derive(Parser)]
#[command(name = "relaynet", version, about = "Bottleneck 2-connected relay networks in L_p planes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and write a solution file.
    Solve(SolveArgs),
    /// Solve by brute force (small instances only).
    Oracle(OracleArgs),
    /// Validate a solution file.
    Check(CheckArgs),
    /// Draw a solution file as SVG.
    Render(RenderArgs),
    /// Per-level bottleneck table over every distance level.
    Sweep(IoArgs),
}

#[derive(Args)]
struct IoArgs {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Explore every level instead of binary searching.
    #[arg(long)]
    sweep: bool,
    /// Re-solve on a shuffled terminal order and compare.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Steiner budget ceiling; at most 3.
    #[arg(long, default_value_t = 2)]
    max_k: usize,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    /// Report destination; defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to stdout.
    #[arg(long, alias = "output")]
    svg: Option<PathBuf>,
}

enum Fail {
    Input(String),
    Bounds(String),
    Check(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Input(_) => 1,
            Fail::Bounds(_) => 2,
            Fail::Check(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Input(m) | Fail::Bounds(m) | Fail::Check(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Fail::Input(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Fail::Input(e.to_string())),
    }
}

fn load_instance(path: &Path) -> Result<Instance, Fail> {
    InstanceFile::parse(&read(path)?)
        .and_then(|f| f.to_instance())
        .map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn load_solution(path: &Path) -> Result<SolutionFile, Fail> {
    SolutionFile::parse(&read(path)?).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn write_svg(path: Option<&Path>, file: &SolutionFile) -> Result<(), Fail> {
    let text = svg::render(file).map_err(|e| Fail::Input(e.to_string()))?;
    emit(path, &text)
}

fn run_solve(a: &SolveArgs) -> Result<(), Fail> {
    let inst = load_instance(&a.io.input)?;
    let opts = SolveOptions { sweep: a.sweep };
    let start = Instant::now();
    let s = solve_with(&inst, opts).map_err(|e| Fail::Input(e.to_string()))?;
    let file = SolutionFile::new(&inst, &s, start.elapsed().as_secs_f64() * 1e3);
    emit(a.io.output.as_deref(), &(file.to_json() + "\n"))?;
    if let Some(p) = &a.svg {
        write_svg(Some(p), &file)?;
    }
    if let Some(seed) = a.seed {
        let mut shuffled = inst.clone();
        shuffled.terminals.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let t = solve_with(&shuffled, opts).map_err(|e| Fail::Input(e.to_string()))?;
        let gap = (t.bottleneck - s.bottleneck).abs();
        if gap > a.tolerance * s.bottleneck.max(1.0) {
            return Err(Fail::Check(format!(
                "tie audit failed: {} on the shuffled order vs {}",
                t.bottleneck, s.bottleneck
            )));
        }
        eprintln!("tie audit (seed {seed}): ok, gap {gap:e}");
    }
    Ok(())
}

fn run_oracle(a: &OracleArgs) -> Result<(), Fail> {
    let inst = load_instance(&a.io.input)?;
    let cfg = OracleConfig {
        max_k: a.max_k,
        ..OracleConfig::default()
    };
    let start = Instant::now();
    let s = naive_solve(&inst, &cfg).map_err(|e| match e {
        relaynet::oracle::OracleError::Instance(e) => Fail::Input(e.to_string()),
        relaynet::oracle::OracleError::Lp => Fail::Input(e.to_string()),
        e => Fail::Bounds(e.to_string()),
    })?;
    let file = SolutionFile::new(&inst, &s, start.elapsed().as_secs_f64() * 1e3);
    emit(a.io.output.as_deref(), &(file.to_json() + "\n"))?;
    if let Some(p) = &a.svg {
        write_svg(Some(p), &file)?;
    }
    Ok(())
}

fn run_check(a: &CheckArgs) -> Result<(), Fail> {
    let file = load_solution(&a.input)?;
    let report = check::check(&file, a.tolerance).map_err(|e| Fail::Input(e.to_string()))?;
    emit(a.output.as_deref(), &report.text())?;
    if report.passed() {
        Ok(())
    } else {
        Err(Fail::Check("check failed".into()))
    }
}

fn run_sweep(a: &IoArgs) -> Result<(), Fail> {
    let inst = load_instance(&a.input)?;
    let rows = sweep(&inst).map_err(|e| Fail::Input(e.to_string()))?;
    let mut text = String::from("level\tlength\tbottleneck\tcandidate_types\n");
    for r in rows {
        let b = r.bottleneck().map_or("-".to_string(), |b| format!("{b:.12}"));
        text += &format!("{}\t{:.12}\t{}\t{}\n", r.index, r.length, b, r.candidate_types);
    }
    emit(a.output.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Check(a) => run_check(a),
        Command::Render(a) => load_solution(&a.input).and_then(|f| write_svg(a.svg.as_deref(), &f)),
        Command::Sweep(a) => run_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
