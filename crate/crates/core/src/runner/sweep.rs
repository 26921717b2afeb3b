use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use super::config::SweepSpec;
use super::record::{read_records, CellKey, RunRecord, RunStatus};
use super::RunnerError;
use crate::engine::{run_episode, EngineConfig, EngineError, EpisodeResult};
use crate::policies::Policy;
use crate::tasks::{score, TaskKind, TaskScore};
use crate::topology::{generate, rewrite, round_budget, Family, Graph, GraphSpec, RoundBudget, TopologyVariant};

/// One sweep cell instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub task: TaskKind,
    pub family: Family,
    pub variant: TopologyVariant,
    pub n: usize,
    pub seed: u64,
}

impl Cell {
    pub fn key(&self, policy: &str) -> CellKey {
        CellKey {
            task: self.task,
            family: self.family.name().to_string(),
            variant: self.variant,
            n: self.n,
            seed: self.seed,
            policy: policy.to_string(),
        }
    }
}

/// Everything produced by running one cell.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub graph: Graph,
    pub budget: RoundBudget,
    pub episode: Option<EpisodeResult>,
    pub score: Option<TaskScore>,
    pub record: RunRecord,
}

/// Cells of `spec` in task, family, variant, size, seed order.
pub fn enumerate_cells(spec: &SweepSpec) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &task in &spec.tasks {
        for &family in &spec.families {
            for &variant in &spec.variants {
                for &n in &spec.sizes {
                    for seed in spec.base_seed..spec.base_seed + spec.seeds_per_cell {
                        cells.push(Cell {
                            task,
                            family,
                            variant,
                            n,
                            seed,
                        });
                    }
                }
            }
        }
    }
    cells
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Builds the cell's graph, derives its budget and runs the episode.
///
/// Budgets above `config.max_rounds` and policy failures become records with
/// the matching status; only topology errors are returned as errors.
pub fn run_cell(
    cell: &Cell,
    policy: &dyn Policy,
    config: &EngineConfig,
) -> Result<CellOutcome, RunnerError> {
    let started = Instant::now();
    let spec = GraphSpec::new(cell.family.fitted(cell.n), cell.n, cell.seed);
    let base = generate(&spec)?;
    let graph = rewrite(&base, cell.variant);
    let budget = round_budget(&graph, cell.task, cell.n)?;

    let mut record = RunRecord {
        task: cell.task,
        family: cell.family.name().to_string(),
        variant: cell.variant,
        n: cell.n,
        seed: cell.seed,
        policy: policy.descriptor(),
        status: RunStatus::Ok,
        success: false,
        graded: 0.0,
        budget_t: budget.total_rounds,
        early_stabilization: 0,
        tokens_prompt: 0,
        tokens_completion: 0,
        tokens_total: 0,
        tokens_estimated: false,
        wall_time: 0.0,
        timestamp: unix_now(),
    };

    let (episode, task_score) = match run_episode(&graph, cell.task, policy, budget, cell.seed, config) {
        Ok(ep) => {
            let s = score(cell.task, &graph, &ep.answers());
            let tokens = ep.total_tokens();
            record.success = s.success;
            record.graded = s.graded;
            record.early_stabilization = ep.early_stabilization;
            record.tokens_prompt = tokens.prompt_tokens;
            record.tokens_completion = tokens.completion_tokens;
            record.tokens_total = tokens.total();
            record.tokens_estimated = tokens.estimated;
            (Some(ep), Some(s))
        }
        Err(EngineError::BudgetExceeded { .. }) => {
            record.status = RunStatus::BudgetExceeded;
            (None, None)
        }
        Err(EngineError::PolicyFailure { .. }) => {
            record.status = RunStatus::PolicyError;
            (None, None)
        }
    };
    record.wall_time = started.elapsed().as_secs_f64();

    Ok(CellOutcome {
        graph,
        budget,
        episode,
        score: task_score,
        record,
    })
}

/// Runs every cell of `spec` not already present in the output file and
/// appends one record per cell. Returns the newly written records.
///
/// Workers run cells concurrently; records are written by a single writer
/// in cell order, so the file layout does not depend on the worker count.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<RunRecord>, RunnerError> {
    spec.validate()?;
    let existing: HashSet<CellKey> = if spec.output.exists() {
        read_records(BufReader::new(File::open(&spec.output)?))?
            .iter()
            .map(RunRecord::key)
            .collect()
    } else {
        HashSet::new()
    };

    let mut policies: BTreeMap<TaskKind, Box<dyn Policy>> = BTreeMap::new();
    for &task in &spec.tasks {
        policies.insert(task, spec.policy.build(task)?);
    }
    let pending: Vec<Cell> = enumerate_cells(spec)
        .into_iter()
        .filter(|c| !existing.contains(&c.key(&policies[&c.task].descriptor())))
        .collect();

    let engine = EngineConfig {
        max_rounds: spec.max_rounds_cap,
        policy_retries: spec.policy_retries,
        parallelism: spec.policy.parallelism(),
        ..EngineConfig::default()
    };

    let mut out = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&spec.output)?;
    let mut written = Vec::with_capacity(pending.len());
    if pending.is_empty() {
        return Ok(written);
    }

    let next = AtomicUsize::new(0);
    let workers = spec.workers.clamp(1, pending.len());
    std::thread::scope(|scope| -> Result<(), RunnerError> {
        let (tx, rx) = mpsc::channel::<(usize, Result<RunRecord, RunnerError>)>();
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, pending, policies, engine) = (&next, &pending, &policies, &engine);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = pending.get(i) else { break };
                let result = run_cell(cell, policies[&cell.task].as_ref(), engine).map(|o| o.record);
                if tx.send((i, result)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut buffered: BTreeMap<usize, RunRecord> = BTreeMap::new();
        let mut expected = 0;
        for (i, result) in rx {
            let record = match result {
                Ok(r) => r,
                Err(e) => {
                    // Stop handing out cells; in-flight ones finish and are dropped.
                    next.store(pending.len(), Ordering::Relaxed);
                    return Err(e);
                }
            };
            buffered.insert(i, record);
            while let Some(record) = buffered.remove(&expected) {
                writeln!(out, "{}", record.to_json_line())?;
                out.flush()?;
                written.push(record);
                expected += 1;
            }
        }
        Ok(())
    })?;
    Ok(written)
}
