use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bigengine::frontend::print_bigraph;
use bigengine::export::{label_map, write_dot, write_labels, write_tra, write_trace};
use bigengine::{explore, matches_predicate, parse_model, simulate, BrsSpec, EngineOptions};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "bigengine", version, about = "Simulate and explore bigraphical reactive systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and check a model without executing it.
    Validate { model: PathBuf },
    /// Simulate one random run and print the trace.
    Sim(SimArgs),
    /// Build the whole transition system.
    Full(FullArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Write the predicate labels to this file.
    #[arg(short = 'l', long = "labels")]
    labels: Option<PathBuf>,
    /// Check that instantaneous rules are confluent.
    #[arg(long)]
    check_confluence: bool,
    /// Bound on instantaneous reductions per state.
    #[arg(long, default_value_t = 1_000_000)]
    instantaneous_bound: usize,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Maximum number of simulation steps.
    #[arg(short = 'S', long = "steps", default_value_t = 1000)]
    steps: usize,
    #[arg(short = 's', long, env = "BIGENGINE_SEED", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
    model: PathBuf,
}

#[derive(Args, Debug)]
struct FullArgs {
    /// Maximum number of stored states.
    #[arg(short = 'M', long = "max-states", default_value_t = 10_000)]
    max_states: usize,
    /// Write the transition matrix (PRISM explicit format) to this file.
    #[arg(short = 'p', long = "tra")]
    tra: Option<PathBuf>,
    /// Write a Graphviz description of the transition system to this file.
    #[arg(short = 'd', long = "dot")]
    dot: Option<PathBuf>,
    /// Write every state, one printed bigraph per line, to this file.
    #[arg(long)]
    states: Option<PathBuf>,
    /// Export even when the state bound was reached.
    #[arg(long)]
    allow_partial: bool,
    #[command(flatten)]
    common: Common,
    model: PathBuf,
}

type Failure = Box<dyn std::error::Error>;

fn load(path: &Path) -> Result<BrsSpec, Failure> {
    let src = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(parse_model(&src)?)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn options(c: &Common) -> EngineOptions {
    EngineOptions {
        instantaneous_bound: c.instantaneous_bound,
        check_confluence: c.check_confluence,
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { model } => {
            let spec = load(&model)?;
            println!(
                "{}: {} model, {} rules in {} classes, {} predicates",
                model.display(),
                spec.semantics,
                spec.rule_count(),
                spec.classes.len(),
                spec.preds.len()
            );
        }
        Command::Sim(a) => {
            let spec = load(&a.model)?;
            let trace = simulate(&spec, a.steps, a.seed, &options(&a.common))?;
            print!("{}", write_trace(&trace));
            if let Some(path) = &a.common.labels {
                let states: Vec<_> = trace.states().collect();
                let mut holds = Vec::new();
                for (_, p) in &spec.preds {
                    let mut set = BTreeSet::new();
                    for (i, s) in states.iter().enumerate() {
                        if matches_predicate(s, p)? {
                            set.insert(i);
                        }
                    }
                    holds.push(set);
                }
                let names: Vec<&str> = spec.preds.iter().map(|(n, _)| n.as_str()).collect();
                write(path, &label_map(&names, &holds, states.len()))?;
            }
        }
        Command::Full(a) => {
            let spec = load(&a.model)?;
            let ts = explore::<f64>(&spec, a.max_states, &options(&a.common))?;
            if ts.partial {
                eprintln!("warning: state bound {} reached", a.max_states);
            }
            if let Some(path) = &a.tra {
                write(path, &write_tra(&ts, a.allow_partial)?)?;
            }
            if let Some(path) = &a.common.labels {
                write(path, &write_labels(&ts))?;
            }
            if let Some(path) = &a.dot {
                write(path, &write_dot(&ts))?;
            }
            if let Some(path) = &a.states {
                let mut text = String::new();
                for (i, s) in ts.states.iter().enumerate() {
                    text.push_str(&format!("{i}: {}\n", print_bigraph(s)));
                }
                write(path, &text)?;
            }
            println!("states: {}", ts.state_count());
            println!("transitions: {}", ts.transition_count());
            for (name, set) in &ts.labelling {
                println!("{name}: {} states", set.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
