use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gr1_repair::fixtures::{self, Fixture};
use gr1_repair::monitor::compile_monitor;
use gr1_repair::parse::{parse_spec, parse_triplet, print_skill, print_spec};
use gr1_repair::relaxation::relax;
use gr1_repair::repair::{add_skills, repair, AdjacencyModel, RepairConfig, RepairError};
use gr1_repair::sim::{
    format_events, format_json_events, format_trace, run_execution_loop, ExecConfig, ExecError, Scenario, Terminal,
    Workspace,
};
use gr1_repair::spec::GR1Spec;
use gr1_repair::synthesis::{synthesize, DEFAULT_STATE_CAP};

#[derive(Parser)]
#[command(name = "gr1-repair", version, about = "GR(1) synthesis with runtime assumption relaxation and skill repair")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a specification.
    Check { spec: PathBuf },
    /// Decide realizability and optionally dump the strategy.
    Synth {
        spec: PathBuf,
        /// Write the strategy here (`-` for stdout).
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
    },
    /// Check triplets read from stdin, one per line, against the assumptions.
    Monitor {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        goal: usize,
    },
    /// Relax the assumptions a triplet violates and print the new spec.
    Relax {
        spec: PathBuf,
        /// `{inputs} | {outputs} | {next inputs}`
        #[arg(long)]
        triplet: String,
        #[arg(long, default_value_t = 0)]
        goal: usize,
    },
    /// Search for skills that make an unrealizable spec realizable.
    Repair {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        adjacency: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        max_iterations: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
        /// Write the repaired spec here.
        #[arg(long)]
        emit_spec: Option<PathBuf>,
    },
    /// Execute a strategy in the simulated world.
    Run(RunArgs),
    /// List bundled fixtures, or write one out as files.
    Demo {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Use a bundled fixture instead of files.
    #[arg(long, conflicts_with_all = ["spec", "workspace", "scenario"])]
    demo: Option<String>,
    #[arg(long, required_unless_present = "demo")]
    spec: Option<PathBuf>,
    #[arg(long, required_unless_present = "demo")]
    workspace: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    adjacency: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to the scenario's `max_steps`, else 30.
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    /// Write the trace here instead of stdout.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the event log here instead of stdout.
    #[arg(long)]
    events: Option<PathBuf>,
    #[arg(long)]
    final_spec: Option<PathBuf>,
    /// One JSON record per violation instead of the text log.
    #[arg(long)]
    json_events: bool,
}

/// Outcomes that are answers rather than input errors.
enum Verdict {
    Ok,
    Unrealizable,
    Unrecoverable,
    NoRepair,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_spec(path: &Path) -> Result<GR1Spec> {
    parse_spec(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        _ => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_adjacency(path: Option<&Path>, spec: &GR1Spec) -> Result<AdjacencyModel> {
    match path {
        Some(p) => AdjacencyModel::parse(&read(p)?, &spec.props).with_context(|| format!("in {}", p.display())),
        None => Ok(AdjacencyModel::unconstrained()),
    }
}

fn fixture(name: &str) -> Result<Fixture> {
    match fixtures::by_name(name) {
        Some(f) => Ok(f),
        None => {
            let names: Vec<&str> = fixtures::ALL.iter().map(|f| f.name).collect();
            bail!("no fixture `{name}` (available: {})", names.join(", "))
        }
    }
}

fn cmd_synth(spec: &Path, strategy: Option<&Path>, state_cap: usize) -> Result<Verdict> {
    let spec = load_spec(spec)?;
    let syn = synthesize(&spec, state_cap)?;
    match syn.strategy {
        Some(s) => {
            println!("REALIZABLE ({} game states, {} strategy nodes)", syn.game.len(), s.len());
            if let Some(path) = strategy {
                write_out(Some(path), &s.dump(&spec.props))?;
            }
            Ok(Verdict::Ok)
        }
        None => {
            println!("UNREALIZABLE ({} game states)", syn.game.len());
            Ok(Verdict::Unrealizable)
        }
    }
}

fn cmd_monitor(spec: &Path, goal: usize) -> Result<Verdict> {
    let spec = load_spec(spec)?;
    let monitor = compile_monitor(&spec);
    let mut out = io::stdout().lock();
    for (i, line) in io::stdin().lock().lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let t = parse_triplet(&spec.props, &line).with_context(|| format!("stdin line {}", i + 1))?;
        let report = monitor.check_assumptions(&t, goal);
        for &c in &report.violated {
            writeln!(out, "{}", monitor.clauses()[c].body.display(&spec.props))?;
        }
        writeln!(out)?;
    }
    Ok(Verdict::Ok)
}

fn cmd_relax(spec: &Path, triplet: &str, goal: usize) -> Result<Verdict> {
    let spec = load_spec(spec)?;
    let t = parse_triplet(&spec.props, triplet).context("in --triplet")?;
    let report = compile_monitor(&spec).check_assumptions(&t, goal);
    if report.violated.is_empty() {
        eprintln!("note: the triplet violates no assumption");
    }
    let (relaxed, _) = relax(&spec, &report)?;
    print!("{}", print_spec(&relaxed));
    Ok(Verdict::Ok)
}

fn cmd_repair(
    spec_path: &Path,
    cfg: RepairConfig,
    adjacency: Option<&Path>,
    emit_spec: Option<&Path>,
) -> Result<Verdict> {
    let spec = load_spec(spec_path)?;
    let adj = load_adjacency(adjacency, &spec)?;
    let outcome = match repair(&spec, &cfg, &adj) {
        Err(RepairError::AlreadyRealizable) => bail!("the specification is already realizable"),
        other => other?,
    };
    println!(
        "# {} iterations, {} candidates, {} rejected by adjacency",
        outcome.iterations,
        outcome.candidates,
        outcome.constraints.len()
    );
    if outcome.suggestions.is_empty() {
        return Ok(Verdict::NoRepair);
    }
    for s in &outcome.suggestions {
        print!("{}", print_skill(&spec.props, &s.skill));
    }
    if let Some(p) = emit_spec {
        let repaired = add_skills(&spec, &outcome.suggestions)?;
        write_out(Some(p), &print_spec(&repaired))?;
    }
    Ok(Verdict::Ok)
}

fn cmd_run(a: &RunArgs) -> Result<Verdict> {
    let (spec_text, ws_text, sc_text, adj_text) = match &a.demo {
        Some(name) => {
            let f = fixture(name)?;
            (
                f.spec.to_string(),
                f.workspace.to_string(),
                f.scenario.to_string(),
                Some(f.adjacency.to_string()),
            )
        }
        None => (
            read(a.spec.as_deref().expect("required by clap"))?,
            read(a.workspace.as_deref().expect("required by clap"))?,
            a.scenario.as_deref().map(read).transpose()?.unwrap_or_default(),
            None,
        ),
    };
    let spec = parse_spec(&spec_text).context("in spec")?;
    let ws = Workspace::parse(&ws_text)?;
    let scenario = Scenario::parse(&sc_text, &spec.props)?;
    let adjacency = match (&a.adjacency, adj_text) {
        (Some(p), _) => load_adjacency(Some(p), &spec)?,
        (None, Some(text)) => AdjacencyModel::parse(&text, &spec.props)?,
        (None, None) => AdjacencyModel::unconstrained(),
    };
    let cfg = ExecConfig {
        max_steps: a.max_steps.or(scenario.max_steps).unwrap_or(30),
        state_cap: a.state_cap,
        repair: RepairConfig {
            rng_seed: a.seed,
            state_cap: a.state_cap,
            ..RepairConfig::default()
        },
        adjacency,
    };
    let report = match run_execution_loop(&spec, &ws, &scenario, &cfg) {
        Err(ExecError::Unrealizable) => {
            eprintln!("unrealizable: the initial specification has no strategy");
            return Ok(Verdict::Unrealizable);
        }
        other => other?,
    };
    write_out(a.trace.as_deref(), &format_trace(&report, &report.final_spec.props))?;
    let events = if a.json_events {
        format_json_events(&report)
    } else {
        format_events(&report)
    };
    write_out(a.events.as_deref(), &events)?;
    if let Some(p) = &a.final_spec {
        write_out(Some(p), &print_spec(&report.final_spec))?;
    }
    Ok(match report.terminal {
        Terminal::Running => Verdict::Ok,
        Terminal::Unrecoverable => Verdict::Unrecoverable,
    })
}

fn cmd_demo(name: Option<&str>, out: Option<&Path>) -> Result<Verdict> {
    let Some(name) = name else {
        for f in fixtures::ALL {
            println!("{}", f.name);
        }
        return Ok(Verdict::Ok);
    };
    let f = fixture(name)?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(name));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for (file, text) in [
        ("spec.txt", f.spec),
        ("workspace.txt", f.workspace),
        ("scenario.txt", f.scenario),
        ("adjacency.txt", f.adjacency),
    ] {
        fs::write(dir.join(file), text)?;
    }
    println!("wrote {} to {}", f.name, dir.display());
    Ok(Verdict::Ok)
}

fn dispatch(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::Check { spec } => {
            let s = load_spec(&spec)?;
            println!(
                "OK: {} inputs, {} outputs, {} skills, {} env safety clauses",
                s.props.inputs().len(),
                s.props.outputs().len(),
                s.skills.len(),
                s.env_safety_len()
            );
            Ok(Verdict::Ok)
        }
        Command::Synth {
            spec,
            strategy,
            state_cap,
        } => cmd_synth(&spec, strategy.as_deref(), state_cap),
        Command::Monitor { spec, goal } => cmd_monitor(&spec, goal),
        Command::Relax { spec, triplet, goal } => cmd_relax(&spec, &triplet, goal),
        Command::Repair {
            spec,
            seed,
            adjacency,
            max_iterations,
            state_cap,
            emit_spec,
        } => cmd_repair(
            &spec,
            RepairConfig {
                rng_seed: seed,
                max_iterations,
                state_cap,
                ..RepairConfig::default()
            },
            adjacency.as_deref(),
            emit_spec.as_deref(),
        ),
        Command::Run(args) => cmd_run(&args),
        Command::Demo { name, out } => cmd_demo(name.as_deref(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Unrealizable) => {
            eprintln!("result: unrealizable");
            ExitCode::from(1)
        }
        Ok(Verdict::Unrecoverable) => {
            eprintln!("result: unrecoverable (no repair found after a violation)");
            ExitCode::from(1)
        }
        Ok(Verdict::NoRepair) => {
            eprintln!("result: unrealizable (repair found no skills)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
