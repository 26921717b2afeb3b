//! Command-line front end: graph generation, single episodes, sweeps,
//! reports and DOT visualization.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use topocoord::engine::{write_transcript, EngineConfig, DEFAULT_MAX_ROUNDS};
use topocoord::policies::{PolicyKind, PolicySpec};
use topocoord::runner::{
    aggregate, export_dot, load_config, read_records, render, run_cell, sweep, Cell, CellOutcome,
    RunnerError, SweepSpec,
};
use topocoord::tasks::TaskKind;
use topocoord::topology::{
    generate, rewrite, write_edge_list, Family, GraphSpec, TopologyError, TopologyVariant,
};

#[derive(Debug, Parser)]
#[command(name = "topocoord", version, about = "Multi-agent coordination benchmark on graph topologies")]
struct Cli {
    /// Seed for graph generation and initial values.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML file with [sweep] and [policy] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a graph as an edge list.
    Gen(GraphArgs),
    /// Run one episode and print its record.
    Run(EpisodeArgs),
    /// Run every cell of the configured sweep.
    Sweep {
        /// Overrides the configured worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Aggregate a results file into per-task tables.
    Report { results: PathBuf },
    /// Run one episode and emit the scored graph as DOT.
    Viz(EpisodeArgs),
}

#[derive(Debug, Args)]
struct GraphArgs {
    #[arg(long, default_value = "smallworld")]
    family: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "base")]
    variant: String,
    /// Small-world ring degree.
    #[arg(long)]
    k: Option<usize>,
    /// Small-world rewiring probability.
    #[arg(long)]
    p: Option<f64>,
    /// Scale-free attachment count.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Debug, Args)]
struct EpisodeArgs {
    #[arg(long)]
    task: String,
    #[command(flatten)]
    graph: GraphArgs,
    /// `scripted` or `llm`; the llm endpoint comes from --config.
    #[arg(long, default_value = "scripted")]
    policy: String,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    max_rounds: usize,
    #[arg(long, default_value_t = 0)]
    retries: usize,
    /// Also write the message transcript here.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

/// Errors caused by the invocation rather than the run; exit status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn family_of(args: &GraphArgs) -> Result<Family> {
    let family = Family::from_name(&args.family)
        .ok_or_else(|| usage(format!("unknown family `{}`", args.family)))?;
    Ok(match family {
        Family::SmallWorld { k, p } => Family::SmallWorld {
            k: args.k.unwrap_or(k),
            p: args.p.unwrap_or(p),
        },
        Family::ScaleFree { m } => Family::ScaleFree { m: args.m.unwrap_or(m) },
        Family::Delaunay => Family::Delaunay,
    })
}

fn variant_of(args: &GraphArgs) -> Result<TopologyVariant> {
    TopologyVariant::from_name(&args.variant)
        .ok_or_else(|| usage(format!("unknown variant `{}`", args.variant)))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn config_error(e: RunnerError) -> anyhow::Error {
    match e {
        RunnerError::Config(msg) => usage(msg),
        other => other.into(),
    }
}

fn policy_spec(cli: &Cli, name: &str) -> Result<PolicySpec> {
    let from_config = match &cli.config {
        Some(path) => Some(load_config(path).map_err(config_error)?.policy),
        None => None,
    };
    match name {
        "scripted" => Ok(PolicySpec::scripted()),
        "llm" => match from_config {
            Some(spec) if spec.kind == PolicyKind::Llm => Ok(spec),
            _ => Ok(PolicySpec::llm(Default::default())),
        },
        other => Err(usage(format!("unknown policy `{other}`"))),
    }
}

fn episode(cli: &Cli, args: &EpisodeArgs) -> Result<CellOutcome> {
    let task = TaskKind::from_name(&args.task).ok_or_else(|| usage(format!("unknown task `{}`", args.task)))?;
    let family = family_of(&args.graph)?;
    let n = args.graph.n;
    GraphSpec::new(family.fitted(n), n, 0)
        .validate()
        .map_err(|e| usage(e.to_string()))?;
    let cell = Cell {
        task,
        family,
        variant: variant_of(&args.graph)?,
        n,
        seed: cli.seed.unwrap_or(0),
    };
    let spec = policy_spec(cli, &args.policy)?;
    let policy = spec.build(task).map_err(|e| usage(e.to_string()))?;
    let config = EngineConfig {
        max_rounds: args.max_rounds,
        policy_retries: args.retries,
        parallelism: spec.parallelism(),
        ..EngineConfig::default()
    };
    let outcome = run_cell(&cell, policy.as_ref(), &config)?;
    if let (Some(path), Some(ep)) = (&args.transcript, &outcome.episode) {
        std::fs::write(path, write_transcript(&ep.transcript))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(outcome)
}

fn execute(cli: &Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Gen(args) => {
            let family = family_of(args)?;
            let spec = GraphSpec::new(family, args.n, cli.seed.unwrap_or(0));
            let base = generate(&spec).map_err(|e| match e {
                TopologyError::ConnectivityFailure { .. } => anyhow!(e),
                other => usage(other.to_string()),
            })?;
            emit(out, &write_edge_list(&rewrite(&base, variant_of(args)?)))
        }
        Command::Run(args) => {
            let outcome = episode(cli, args)?;
            emit(out, &format!("{}\n", outcome.record.to_json_line()))
        }
        Command::Viz(args) => {
            let outcome = episode(cli, args)?;
            let score = outcome
                .score
                .ok_or_else(|| anyhow!("episode did not run: status {:?}", outcome.record.status))?;
            emit(out, &export_dot(&outcome.graph, &score))
        }
        Command::Sweep { workers } => {
            let path = cli.config.as_ref().ok_or_else(|| usage("sweep needs --config"))?;
            let mut spec: SweepSpec = load_config(path).map_err(config_error)?;
            if let Some(w) = workers {
                spec.workers = *w;
            }
            if let Some(o) = out {
                spec.output = o.to_path_buf();
            }
            if let Some(seed) = cli.seed {
                spec.base_seed = seed;
            }
            let written = sweep(&spec).map_err(config_error)?;
            eprintln!("{} new records in {}", written.len(), spec.output.display());
            Ok(())
        }
        Command::Report { results } => {
            let file = File::open(results).map_err(|e| usage(format!("{}: {e}", results.display())))?;
            let records = read_records(BufReader::new(file))?;
            let report = aggregate(&records).map_err(|_| anyhow!("{} holds no records", results.display()))?;
            emit(out, &render(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
