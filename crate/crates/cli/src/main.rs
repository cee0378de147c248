use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use approxsmt::smtlib::print_model;
use approxsmt::{parse_script, print_script, solve, solve_direct, Formula, Limits, SolveOutcome, Verdict};
use approxsmt_cli::record::{write_csv, RunRecord};
use approxsmt_cli::{parse_precision, registry, uniform_map, ApproxKind};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "approxsmt", version, about = "Floating-point SMT solving by approximation and refinement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one SMT-LIB file and print the verdict (and model, if sat).
    Solve {
        file: PathBuf,
        #[command(flatten)]
        run: RunOptions,
        /// Print iteration statistics to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Solve every .smt2 file under a directory and write per-file statistics as CSV.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        run: RunOptions,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Print the approximate formula at a given precision.
    Encode {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "rpfp")]
        approx: ApproxKind,
        /// `n` for rpfp, `i,f` for bv, `bot` or `top` for ra.
        #[arg(long)]
        precision: Option<String>,
    },
}

#[derive(Args, Clone)]
struct RunOptions {
    #[arg(long, value_enum, default_value = "rpfp")]
    approx: ApproxKind,
    /// Solver for the approximate formulas.
    #[arg(long, default_value = "enum")]
    backend: String,
    /// Solver for the original formula once refinement is exhausted.
    #[arg(long, default_value = "enum")]
    fallback: String,
    /// Time limit in seconds, for the whole run and for each solver call.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long = "max-iters", default_value_t = Limits::default().max_iterations)]
    max_iters: usize,
}

impl RunOptions {
    fn limits(&self) -> Result<Limits> {
        let time = match self.timeout {
            Some(s) => Some(Duration::try_from_secs_f64(s).context("timeout must be a non-negative number of seconds")?),
            None => None,
        };
        Ok(Limits { max_iterations: self.max_iters, time, backend_timeout: time })
    }

    fn run(&self, formula: &Formula) -> Result<SolveOutcome> {
        let limits = self.limits()?;
        let mut fallback = registry::backend(&self.fallback)?;
        Ok(match self.approx.approximation() {
            Some(approx) => {
                let mut backend = registry::backend(&self.backend)?;
                solve(formula, approx, backend.as_mut(), fallback.as_mut(), &limits)
            }
            None => solve_direct(formula, fallback.as_mut(), &limits),
        })
    }
}

fn load(path: &Path) -> Result<Formula> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(parse_script(&text).with_context(|| format!("cannot parse {}", path.display()))?.formula)
}

fn smt2_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in std::fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            smt2_files(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "smt2") {
            out.push(path);
        }
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Solve { file, run, stats } => {
            let formula = load(&file)?;
            let outcome = run.run(&formula)?;
            println!("{}", outcome.verdict.name());
            match &outcome.verdict {
                Verdict::Sat(model) => println!("{}", print_model(&formula, model)),
                Verdict::Unknown(reason) => eprintln!("reason: {reason}"),
                Verdict::Unsat => {}
            }
            if stats {
                let s = &outcome.stats;
                eprintln!("iterations: {}", s.iterations);
                for (i, p) in s.precision_history.iter().enumerate() {
                    eprintln!("  {}: {p}", i + 1);
                }
                eprintln!("fallback used: {}", s.fallback_used);
                eprintln!("total: {:.3} ms", s.total.as_secs_f64() * 1000.0);
            }
        }
        Command::Bench { dir, run, csv } => {
            run.limits()?;
            let mut files = Vec::new();
            smt2_files(&dir, &mut files)?;
            let records: Vec<RunRecord> = files
                .into_par_iter()
                .map(|file| match load(&file).and_then(|f| run.run(&f)) {
                    Ok(outcome) => RunRecord::from_outcome(file, &outcome),
                    Err(e) => {
                        eprintln!("{e:#}");
                        RunRecord::error(file)
                    }
                })
                .collect();
            let out = std::fs::File::create(&csv).with_context(|| format!("cannot create {}", csv.display()))?;
            write_csv(&records, out).with_context(|| format!("cannot write {}", csv.display()))?;
        }
        Command::Encode { file, approx, precision } => {
            let formula = load(&file)?;
            let Some(a) = approx.approximation() else {
                print!("{}", print_script(&formula, approxsmt::solver::INPUT_LOGIC));
                return Ok(());
            };
            let order = a.order();
            let map = match precision {
                Some(spec) => uniform_map(a, &formula, parse_precision(&spec, order)?),
                None => a.initial_precision(&formula),
            };
            if map.is_all_top(order) {
                print!("{}", print_script(&formula, approxsmt::solver::INPUT_LOGIC));
            } else {
                let encoded = a.encode(&formula, &map).with_context(|| format!("cannot encode at {map}"))?;
                print!("{}", print_script(&encoded, a.output_logic()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
