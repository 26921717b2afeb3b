//! Synchronous round-based message passing.
//!
//! In round `r` every agent sees exactly the messages addressed to it in
//! round `r - 1`, produces an [`AgentAction`], and all actions take effect
//! together once every agent has acted. Effects are applied in ascending
//! agent order, which fixes the transcript order regardless of how the
//! actions were computed.

mod transcript;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::policies::{Agent, Policy, PolicyError, TokenUsage};
use crate::tasks::{parse_answer, Answer, TaskContext, TaskKind};
use crate::topology::{AgentId, Graph, RoundBudget};

pub use transcript::{escape_field, parse_transcript, unescape_field, write_transcript};

pub const DEFAULT_MAX_ROUNDS: usize = 40;
pub const DEFAULT_MESSAGE_CAP: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub round: usize,
    pub src: AgentId,
    pub dst: AgentId,
    pub content: String,
}

/// What one agent observes at the start of a round.
#[derive(Debug, Clone, Copy)]
pub struct AgentView<'a> {
    pub self_id: AgentId,
    pub neighbors: &'a [AgentId],
    /// Messages sent to this agent in the previous round, by ascending sender.
    pub inbox: &'a [Message],
    pub round: usize,
    pub total_rounds: usize,
    pub task_context: &'a TaskContext,
}

impl AgentView<'_> {
    pub fn remaining_rounds(&self) -> usize {
        self.total_rounds.saturating_sub(self.round)
    }
}

/// The current answer an agent reports.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerSlot {
    /// No answer yet.
    #[default]
    Pending,
    Value(Answer),
    /// Free text awaiting [`parse_answer`].
    Raw(String),
}

impl AnswerSlot {
    /// Resolves raw text against the task's answer domain.
    pub fn resolve(self, ctx: &TaskContext) -> AnswerSlot {
        match self {
            AnswerSlot::Raw(text) => AnswerSlot::Value(parse_answer(ctx.task, &text, ctx)),
            other => other,
        }
    }

    /// Answer used for scoring; a missing answer scores as invalid.
    pub fn to_answer(&self) -> Answer {
        match self {
            AnswerSlot::Value(a) => a.clone(),
            AnswerSlot::Pending | AnswerSlot::Raw(_) => Answer::Invalid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AgentAction {
    /// Message per neighbor; absent neighbors get nothing.
    pub outbox: BTreeMap<AgentId, String>,
    pub answer: AnswerSlot,
}

impl AgentAction {
    /// No messages and no answer.
    pub fn idle() -> Self {
        Self {
            outbox: BTreeMap::new(),
            answer: AnswerSlot::Pending,
        }
    }

    /// Same content to every listed neighbor.
    pub fn broadcast(neighbors: &[AgentId], content: &str, answer: AnswerSlot) -> Self {
        Self {
            outbox: neighbors.iter().map(|&v| (v, content.to_string())).collect(),
            answer,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Episodes whose budget exceeds this are refused.
    pub max_rounds: usize,
    /// Characters kept per message; longer content is truncated.
    pub message_cap: usize,
    /// Extra attempts when an agent fails or addresses a non-neighbor.
    pub policy_retries: usize,
    /// Agents acting concurrently within a round. 1 runs sequentially.
    pub parallelism: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_rounds: DEFAULT_MAX_ROUNDS,
            message_cap: DEFAULT_MESSAGE_CAP,
            policy_retries: 0,
            parallelism: 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("round budget {rounds} exceeds the cap of {cap}")]
    BudgetExceeded { rounds: usize, cap: usize },
    #[error("agent {agent} failed in round {round}: {source}")]
    PolicyFailure {
        agent: AgentId,
        round: usize,
        #[source]
        source: PolicyError,
    },
}

#[derive(Debug, Clone)]
pub struct EpisodeResult {
    /// One entry per agent; raw text has been resolved.
    pub final_answers: Vec<AnswerSlot>,
    pub early_stabilization: usize,
    pub transcript: Vec<Message>,
    pub per_agent_tokens: Vec<TokenUsage>,
    /// Resolved answers after each round.
    pub snapshots: Vec<Vec<AnswerSlot>>,
    pub contexts: Vec<TaskContext>,
}

impl EpisodeResult {
    pub fn answers(&self) -> Vec<Answer> {
        self.final_answers.iter().map(AnswerSlot::to_answer).collect()
    }

    pub fn total_tokens(&self) -> TokenUsage {
        self.per_agent_tokens
            .iter()
            .fold(TokenUsage::default(), |acc, u| acc.combined(u))
    }
}

/// Seeded initial bits for Consensus, `None` for other tasks.
pub fn initial_bits(task: TaskKind, n: usize, seed: u64) -> Vec<Option<u8>> {
    if task != TaskKind::Consensus {
        return vec![None; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Some(rng.gen_range(0..=1u8))).collect()
}

/// Smallest round `r` such that every later snapshot equals snapshot `r`.
pub fn check_stabilization<T: PartialEq>(snapshots: &[T]) -> usize {
    let Some(last) = snapshots.last() else {
        return 0;
    };
    snapshots
        .iter()
        .rposition(|s| s != last)
        .map_or(0, |i| i + 1)
}

fn truncate_chars(s: &str, cap: usize) -> String {
    match s.char_indices().nth(cap) {
        Some((idx, _)) => s[..idx].to_string(),
        None => s.to_string(),
    }
}

fn act_checked(
    agent: &mut dyn Agent,
    view: &AgentView<'_>,
    retries: usize,
) -> Result<AgentAction, PolicyError> {
    let mut attempt = 0;
    loop {
        let result = agent.act(view).and_then(|action| {
            match action
                .outbox
                .keys()
                .find(|dst| view.neighbors.binary_search(dst).is_err())
            {
                Some(&dst) => Err(PolicyError::Malformed(format!(
                    "agent {} addressed non-neighbor {dst}",
                    view.self_id
                ))),
                None => Ok(action),
            }
        });
        match result {
            Ok(action) => return Ok(action),
            Err(e) if attempt >= retries => return Err(e),
            Err(_) => attempt += 1,
        }
    }
}

/// Runs one episode of `task` on `g` for exactly `budget.total_rounds` rounds.
pub fn run_episode(
    g: &Graph,
    task: TaskKind,
    policy: &dyn Policy,
    budget: RoundBudget,
    seed: u64,
    config: &EngineConfig,
) -> Result<EpisodeResult, EngineError> {
    let total_rounds = budget.total_rounds;
    if total_rounds > config.max_rounds {
        return Err(EngineError::BudgetExceeded {
            rounds: total_rounds,
            cap: config.max_rounds,
        });
    }
    let n = g.node_count();
    let contexts: Vec<TaskContext> = initial_bits(task, n, seed)
        .into_iter()
        .map(|bit| TaskContext::new(task, g, bit))
        .collect();
    let mut agents: Vec<Box<dyn Agent>> = (0..n).map(|u| policy.spawn(u, &contexts[u])).collect();

    let pool = (config.parallelism > 1)
        .then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.parallelism)
                .build()
                .ok()
        })
        .flatten();

    let mut inboxes: Vec<Vec<Message>> = vec![Vec::new(); n];
    let mut current: Vec<AnswerSlot> = vec![AnswerSlot::Pending; n];
    let mut transcript = Vec::new();
    let mut snapshots = Vec::with_capacity(total_rounds);

    for round in 0..total_rounds {
        let views: Vec<AgentView<'_>> = (0..n)
            .map(|u| AgentView {
                self_id: u,
                neighbors: g.neighbors(u),
                inbox: &inboxes[u],
                round,
                total_rounds,
                task_context: &contexts[u],
            })
            .collect();
        let retries = config.policy_retries;
        let step = |(agent, view): (&mut Box<dyn Agent>, &AgentView<'_>)| {
            act_checked(agent.as_mut(), view, retries)
        };
        let actions: Vec<Result<AgentAction, PolicyError>> = match &pool {
            Some(pool) => pool.install(|| agents.par_iter_mut().zip(views.par_iter()).map(step).collect()),
            None => agents.iter_mut().zip(views.iter()).map(step).collect(),
        };
        drop(views);

        let mut next: Vec<Vec<Message>> = vec![Vec::new(); n];
        for (src, action) in actions.into_iter().enumerate() {
            let action = action.map_err(|source| EngineError::PolicyFailure {
                agent: src,
                round,
                source,
            })?;
            for (dst, content) in action.outbox {
                let msg = Message {
                    round,
                    src,
                    dst,
                    content: truncate_chars(&content, config.message_cap),
                };
                next[dst].push(msg.clone());
                transcript.push(msg);
            }
            current[src] = action.answer.resolve(&contexts[src]);
        }
        inboxes = next;
        snapshots.push(current.clone());
    }

    Ok(EpisodeResult {
        early_stabilization: check_stabilization(&snapshots),
        final_answers: current,
        transcript,
        per_agent_tokens: agents.iter().map(|a| a.usage()).collect(),
        snapshots,
        contexts,
    })
}
