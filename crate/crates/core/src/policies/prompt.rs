use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::PolicyError;
use crate::engine::AgentView;
use crate::tasks::FINAL_MARKER;

pub const DEFAULT_TEMPLATE_ID: &str = "default";

const DEFAULT_SYSTEM: &str = "You are agent {self_id} in a network of {agent_count} agents. \
You can only talk to your direct neighbors, and only through messages that arrive one round later.";

const DEFAULT_USER: &str = "Task: {task}
{instructions}

Your neighbors: {neighbors}
Round {round_display} of {total_rounds} ({remaining} rounds remaining, including this one).

Messages received last round:
{inbox}

Reply with any messages first, one per line, as `TO <neighbor id>: <text>` or `ALL: <text>` for every neighbor.
Then give your current answer on its own line as `{marker} <answer>`, where <answer> is {answer_domain}.";

/// Prompt text with `{placeholder}` slots filled per agent and round.
///
/// Placeholders: `self_id`, `agent_count`, `neighbors`, `inbox`, `round`
/// (0-based), `round_display` (1-based), `total_rounds`, `remaining`,
/// `task`, `instructions`, `answer_domain`, `marker`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct PromptTemplate {
    #[serde(default)]
    pub id: String,
    pub system: String,
    pub user: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self {
            id: DEFAULT_TEMPLATE_ID.to_string(),
            system: DEFAULT_SYSTEM.to_string(),
            user: DEFAULT_USER.to_string(),
        }
    }
}

impl PromptTemplate {
    /// Loads `<dir>/<id>.toml` (keys `system` and `user`). The built-in
    /// template answers to `default` when no such file exists.
    pub fn load(dir: Option<&Path>, id: &str) -> Result<Self, PolicyError> {
        if let Some(dir) = dir {
            let path = dir.join(format!("{id}.toml"));
            if path.exists() {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| PolicyError::Template(format!("{}: {e}", path.display())))?;
                let mut t: PromptTemplate = toml::from_str(&text)
                    .map_err(|e| PolicyError::Template(format!("{}: {e}", path.display())))?;
                t.id = id.to_string();
                return Ok(t);
            }
        }
        if id == DEFAULT_TEMPLATE_ID {
            Ok(Self::default())
        } else {
            Err(PolicyError::Template(format!("unknown prompt template `{id}`")))
        }
    }

    /// Renders `(system, user)`. If the template omits the remaining-round
    /// count or the answer marker, a footer stating them is appended.
    pub fn render(&self, view: &AgentView<'_>) -> (String, String) {
        let ctx = view.task_context;
        let neighbors = view
            .neighbors
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        let inbox = if view.inbox.is_empty() {
            "(none)".to_string()
        } else {
            let mut s = String::new();
            for m in view.inbox {
                let _ = writeln!(s, "from {}: {}", m.src, m.content);
            }
            s.trim_end().to_string()
        };
        let values = [
            ("self_id", view.self_id.to_string()),
            ("agent_count", ctx.agent_count.to_string()),
            ("neighbors", neighbors),
            ("inbox", inbox),
            ("round", view.round.to_string()),
            ("round_display", (view.round + 1).to_string()),
            ("total_rounds", view.total_rounds.to_string()),
            ("remaining", view.remaining_rounds().to_string()),
            ("task", ctx.task.name().to_string()),
            ("instructions", ctx.instructions.clone()),
            ("answer_domain", ctx.answer_domain.clone()),
            ("marker", FINAL_MARKER.to_string()),
        ];
        let fill = |text: &str| {
            values
                .iter()
                .fold(text.to_string(), |acc, (k, v)| acc.replace(&format!("{{{k}}}"), v))
        };
        let system = fill(&self.system);
        let mut user = fill(&self.user);
        let states_remaining = self.system.contains("{remaining}") || self.user.contains("{remaining}");
        let states_marker = [&self.system, &self.user]
            .iter()
            .any(|t| t.contains("{marker}") || t.contains(FINAL_MARKER));
        if !states_remaining || !states_marker {
            let _ = write!(
                user,
                "\n\n{} rounds remain. End your reply with `{FINAL_MARKER} <answer>`.",
                view.remaining_rounds()
            );
        }
        (system, user)
    }
}
