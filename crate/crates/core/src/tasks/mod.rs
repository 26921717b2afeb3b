//! The five coordination tasks: answer domains, scoring rules and the
//! per-node / per-edge classes used when rendering outcomes.

mod answer;
mod scoring;

use serde::{Deserialize, Serialize};

use crate::topology::Graph;

pub use answer::{parse_answer, Answer, FINAL_MARKER};
pub use scoring::{
    score, score_coloring, score_consensus, score_leader_election, score_matching,
    score_vertex_cover, EdgeClass, NodeClass, TaskScore,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Coloring,
    Matching,
    VertexCover,
    LeaderElection,
    Consensus,
}

/// Local tasks are checkable on neighborhoods; global tasks need system-wide
/// agreement. The class selects the round-budget rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskClass {
    Local,
    Global,
}

impl TaskKind {
    pub const ALL: [TaskKind; 5] = [
        TaskKind::Coloring,
        TaskKind::Matching,
        TaskKind::VertexCover,
        TaskKind::LeaderElection,
        TaskKind::Consensus,
    ];

    pub fn class(self) -> TaskClass {
        match self {
            TaskKind::Coloring | TaskKind::Matching | TaskKind::VertexCover => TaskClass::Local,
            TaskKind::LeaderElection | TaskKind::Consensus => TaskClass::Global,
        }
    }

    /// Only Matching has a graded score; the rest are pass/fail.
    pub fn is_graded(self) -> bool {
        self == TaskKind::Matching
    }

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Coloring => "coloring",
            TaskKind::Matching => "matching",
            TaskKind::VertexCover => "vertex_cover",
            TaskKind::LeaderElection => "leader_election",
            TaskKind::Consensus => "consensus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let key = name.trim().to_ascii_lowercase().replace(['-', '_', ' '], "");
        Self::ALL
            .into_iter()
            .find(|t| t.name().replace('_', "") == key)
    }

    fn instructions(self) -> &'static str {
        match self {
            TaskKind::Coloring => {
                "Choose a color so that no neighbor ends with the same color as you. \
                 Coordinate with neighbors to resolve collisions."
            }
            TaskKind::Matching => {
                "Pair up with at most one neighbor. A pair is valid only if both of you \
                 name each other. Avoid staying unpaired when an unpaired neighbor could pair with you."
            }
            TaskKind::VertexCover => {
                "Decide whether you join the cover set. Every edge must have at least one \
                 endpoint in the set; try to keep the set small."
            }
            TaskKind::LeaderElection => {
                "Elect exactly one leader among all agents. Answer yes only if you are the leader."
            }
            TaskKind::Consensus => {
                "All agents must end with the same binary value. You start with your own initial value."
            }
        }
    }
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Task information handed to one agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskContext {
    pub task: TaskKind,
    pub agent_count: usize,
    /// Δ + 1 for Coloring, 0 otherwise.
    pub palette_size: usize,
    /// Consensus starting value of this agent.
    pub initial_bit: Option<u8>,
    pub instructions: String,
    pub answer_domain: String,
}

impl TaskContext {
    pub fn new(task: TaskKind, g: &Graph, initial_bit: Option<u8>) -> Self {
        let palette_size = if task == TaskKind::Coloring {
            g.max_degree() + 1
        } else {
            0
        };
        let answer_domain = match task {
            TaskKind::Coloring => format!(
                "an integer color between 0 and {} inclusive",
                palette_size.saturating_sub(1)
            ),
            TaskKind::Matching => "the ID of the neighbor you pair with, or `none`".to_string(),
            TaskKind::VertexCover => "`yes` if you are in the cover, otherwise `no`".to_string(),
            TaskKind::LeaderElection => "`yes` if you are the leader, otherwise `no`".to_string(),
            TaskKind::Consensus => "`0` or `1`".to_string(),
        };
        let mut instructions = task.instructions().to_string();
        if let Some(bit) = initial_bit {
            instructions.push_str(&format!(" Your initial value is {bit}."));
        }
        Self {
            task,
            agent_count: g.node_count(),
            palette_size,
            initial_bit,
            instructions,
            answer_domain,
        }
    }
}
