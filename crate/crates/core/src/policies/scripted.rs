//! Deterministic reference policies, one per task. They solve their task by
//! plain message passing and serve as oracles for the engine and scorers.

use std::collections::{BTreeMap, BTreeSet};

use super::wire::{decode, encode, field};
use super::{Agent, Policy, PolicyError};
use crate::engine::{AgentAction, AgentView, AnswerSlot, Message};
use crate::tasks::{Answer, TaskContext, TaskKind};
use crate::topology::AgentId;

/// Task-matched reference policy.
#[derive(Debug, Clone, Copy)]
pub struct ScriptedPolicy {
    task: TaskKind,
}

impl ScriptedPolicy {
    pub fn new(task: TaskKind) -> Self {
        Self { task }
    }
}

impl Policy for ScriptedPolicy {
    fn spawn(&self, agent: AgentId, ctx: &TaskContext) -> Box<dyn Agent> {
        match self.task {
            TaskKind::Consensus => Box::new(ConsensusAgent {
                min: ctx.initial_bit.unwrap_or(0),
            }),
            TaskKind::LeaderElection => Box::new(LeaderAgent { id: agent, max: agent }),
            TaskKind::Coloring => Box::new(ColoringAgent {
                id: agent,
                color: 0,
                locked: false,
                palette: ctx.palette_size.max(1),
            }),
            TaskKind::Matching => Box::new(MatchingAgent {
                partner: None,
                proposed_to: None,
                matched_neighbors: BTreeSet::new(),
            }),
            TaskKind::VertexCover => Box::new(VertexCoverAgent {
                id: agent,
                in_cover: false,
                announced_degree: 0,
            }),
        }
    }

    fn descriptor(&self) -> String {
        "scripted".to_string()
    }
}

fn by_sender(inbox: &[Message]) -> BTreeMap<AgentId, &str> {
    inbox.iter().map(|m| (m.src, m.content.as_str())).collect()
}

/// Min-flooding: keep the smallest bit seen, announce it, answer it.
#[derive(Debug)]
pub struct ConsensusAgent {
    min: u8,
}

impl Agent for ConsensusAgent {
    fn act(&mut self, view: &AgentView<'_>) -> Result<AgentAction, PolicyError> {
        for m in view.inbox {
            if let Some(b) = field::<u8>(&m.content, "min") {
                self.min = self.min.min(b);
            }
        }
        Ok(AgentAction::broadcast(
            view.neighbors,
            &encode([("min", self.min.to_string())]),
            AnswerSlot::Value(Answer::Bit(self.min)),
        ))
    }
}

/// Max-ID flooding: the agent holding the largest ID it has heard of is leader.
#[derive(Debug)]
pub struct LeaderAgent {
    id: AgentId,
    max: AgentId,
}

impl Agent for LeaderAgent {
    fn act(&mut self, view: &AgentView<'_>) -> Result<AgentAction, PolicyError> {
        for m in view.inbox {
            if let Some(k) = field::<AgentId>(&m.content, "max") {
                self.max = self.max.max(k);
            }
        }
        Ok(AgentAction::broadcast(
            view.neighbors,
            &encode([("max", self.max.to_string())]),
            AnswerSlot::Value(Answer::Decision(self.max == self.id)),
        ))
    }
}

/// ID-priority greedy coloring.
///
/// Every agent starts on color 0. An unlocked agent locks its color once no
/// higher-ID neighbor announced the same color; otherwise it moves to the
/// smallest color none of its neighbors announced. Locked colors are never
/// chosen by neighbors afterwards, and the highest-ID unlocked agent always
/// locks, so the coloring settles.
#[derive(Debug)]
pub struct ColoringAgent {
    id: AgentId,
    color: usize,
    locked: bool,
    palette: usize,
}

impl Agent for ColoringAgent {
    fn act(&mut self, view: &AgentView<'_>) -> Result<AgentAction, PolicyError> {
        let heard = by_sender(view.inbox);
        // Before the first exchange everyone is known to sit on color 0.
        let neighbor_color = |v: AgentId| -> usize {
            heard
                .get(&v)
                .and_then(|c| field::<usize>(c, "c"))
                .unwrap_or(0)
        };
        if !self.locked {
            let contested = view
                .neighbors
                .iter()
                .any(|&v| v > self.id && neighbor_color(v) == self.color);
            if contested {
                let taken: BTreeSet<usize> =
                    view.neighbors.iter().map(|&v| neighbor_color(v)).collect();
                self.color = (0..self.palette)
                    .find(|c| !taken.contains(c))
                    .ok_or_else(|| PolicyError::Malformed("palette exhausted".into()))?;
            } else {
                self.locked = true;
            }
        }
        Ok(AgentAction::broadcast(
            view.neighbors,
            &encode([
                ("c", self.color.to_string()),
                ("l", u8::from(self.locked).to_string()),
            ]),
            AnswerSlot::Value(Answer::Color(self.color)),
        ))
    }
}

/// Propose-accept matching.
///
/// Each unmatched agent proposes to its lowest-ID neighbor not known to be
/// matched. Two agents that proposed to each other in the same round are
/// matched from the next round on and announce it to all neighbors. The
/// lowest-ID unmatched agent with an unmatched neighbor always gets a mutual
/// proposal, so the matching grows until it is maximal.
#[derive(Debug)]
pub struct MatchingAgent {
    partner: Option<AgentId>,
    proposed_to: Option<AgentId>,
    matched_neighbors: BTreeSet<AgentId>,
}

impl Agent for MatchingAgent {
    fn act(&mut self, view: &AgentView<'_>) -> Result<AgentAction, PolicyError> {
        let mut proposers = BTreeSet::new();
        for m in view.inbox {
            let fields = decode(&m.content);
            match fields.get("s") {
                Some(&"m") => {
                    self.matched_neighbors.insert(m.src);
                }
                Some(&"f") if fields.get("p") == Some(&"1") => {
                    proposers.insert(m.src);
                }
                _ => {}
            }
        }
        if self.partner.is_none() {
            if let Some(target) = self.proposed_to {
                if proposers.contains(&target) {
                    self.partner = Some(target);
                }
            }
        }

        let mut action = AgentAction::default();
        if let Some(p) = self.partner {
            let msg = encode([("s", "m".to_string()), ("w", p.to_string())]);
            for &v in view.neighbors {
                action.outbox.insert(v, msg.clone());
            }
            action.answer = AnswerSlot::Value(Answer::Partner(Some(p)));
            return Ok(action);
        }

        self.proposed_to = view
            .neighbors
            .iter()
            .copied()
            .find(|v| !self.matched_neighbors.contains(v));
        for &v in view.neighbors {
            let flag = u8::from(Some(v) == self.proposed_to);
            action
                .outbox
                .insert(v, encode([("s", "f".to_string()), ("p", flag.to_string())]));
        }
        action.answer = AnswerSlot::Value(Answer::Partner(None));
        Ok(action)
    }
}

/// Local-max cover: on every edge both endpoints saw uncovered in the
/// previous round, the endpoint with the larger (uncovered degree, ID) joins.
#[derive(Debug)]
pub struct VertexCoverAgent {
    id: AgentId,
    in_cover: bool,
    announced_degree: usize,
}

impl Agent for VertexCoverAgent {
    fn act(&mut self, view: &AgentView<'_>) -> Result<AgentAction, PolicyError> {
        let heard = by_sender(view.inbox);
        let mut covered_neighbors = BTreeSet::new();
        if view.round > 0 && !self.in_cover {
            let mine = (self.announced_degree, self.id);
            for (&v, content) in &heard {
                let in_cover = field::<u8>(content, "c") == Some(1);
                let degree = field::<usize>(content, "d").unwrap_or(0);
                if !in_cover && mine > (degree, v) {
                    self.in_cover = true;
                }
            }
        }
        for (&v, content) in &heard {
            if field::<u8>(content, "c") == Some(1) {
                covered_neighbors.insert(v);
            }
        }
        let uncovered = if self.in_cover {
            0
        } else if view.round == 0 {
            view.neighbors.len()
        } else {
            view.neighbors
                .iter()
                .filter(|v| !covered_neighbors.contains(v))
                .count()
        };
        self.announced_degree = uncovered;
        Ok(AgentAction::broadcast(
            view.neighbors,
            &encode([
                ("c", u8::from(self.in_cover).to_string()),
                ("d", uncovered.to_string()),
            ]),
            AnswerSlot::Value(Answer::Decision(self.in_cover)),
        ))
    }
}
