use std::fmt;

use serde::{Deserialize, Serialize};

use super::{TaskContext, TaskKind};
use crate::topology::AgentId;

/// Marker that precedes an agent's answer in free-text responses.
pub const FINAL_MARKER: &str = "FINAL:";

/// One agent's answer for a task.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    /// Coloring: palette index.
    Color(usize),
    /// Matching: chosen partner, or none.
    Partner(Option<AgentId>),
    /// VertexCover / LeaderElection: yes or no.
    Decision(bool),
    /// Consensus: 0 or 1.
    Bit(u8),
    /// Unparseable or out-of-domain response.
    Invalid,
}

impl Answer {
    pub fn is_invalid(&self) -> bool {
        matches!(self, Answer::Invalid)
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Answer::Decision(true))
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Color(c) => write!(f, "{c}"),
            Answer::Partner(Some(p)) => write!(f, "{p}"),
            Answer::Partner(None) => f.write_str("none"),
            Answer::Decision(true) => f.write_str("yes"),
            Answer::Decision(false) => f.write_str("no"),
            Answer::Bit(b) => write!(f, "{b}"),
            Answer::Invalid => f.write_str("invalid"),
        }
    }
}

/// Extracts the answer following the last `FINAL:` marker (any case) in
/// `raw` and checks it against the task's answer domain. Anything that does
/// not fit yields [`Answer::Invalid`].
pub fn parse_answer(task: TaskKind, raw: &str, ctx: &TaskContext) -> Answer {
    let lowered = raw.to_ascii_lowercase();
    let marker = FINAL_MARKER.to_ascii_lowercase();
    let Some(pos) = lowered.rfind(&marker) else {
        return Answer::Invalid;
    };
    let rest = &lowered[pos + marker.len()..];
    let token = rest
        .lines()
        .next()
        .unwrap_or("")
        .split_whitespace()
        .next()
        .unwrap_or("")
        .trim_matches(|c: char| !c.is_ascii_alphanumeric());

    let parsed = match task {
        TaskKind::Coloring => token
            .parse::<usize>()
            .ok()
            .filter(|&c| c < ctx.palette_size)
            .map(Answer::Color),
        TaskKind::Matching => match token {
            "none" | "null" | "nobody" => Some(Answer::Partner(None)),
            _ => token.parse::<AgentId>().ok().map(|p| Answer::Partner(Some(p))),
        },
        TaskKind::VertexCover | TaskKind::LeaderElection => match token {
            "yes" | "true" => Some(Answer::Decision(true)),
            "no" | "false" => Some(Answer::Decision(false)),
            _ => None,
        },
        TaskKind::Consensus => match token {
            "0" => Some(Answer::Bit(0)),
            "1" => Some(Answer::Bit(1)),
            _ => None,
        },
    };
    parsed.unwrap_or(Answer::Invalid)
}
