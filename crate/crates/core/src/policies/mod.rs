//! Agent behavior: the policy interface, scripted reference policies and the
//! chat-completion policy.

mod llm;
mod prompt;
mod scripted;
pub mod wire;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{AgentAction, AgentView};
use crate::tasks::{TaskContext, TaskKind};
use crate::topology::AgentId;

pub use llm::{
    estimate_tokens, parse_chat_response, parse_outbox, ChatMessage, LlmAgent, LlmClient,
    LlmPolicy, LlmReply, Usage, CHARS_PER_TOKEN,
};
pub use prompt::{PromptTemplate, DEFAULT_TEMPLATE_ID};
pub use scripted::{
    ColoringAgent, ConsensusAgent, LeaderAgent, MatchingAgent, ScriptedPolicy, VertexCoverAgent,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("endpoint returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed output: {0}")]
    Malformed(String),
    #[error("prompt template: {0}")]
    Template(String),
    #[error("policy configuration: {0}")]
    Config(String),
}

/// Prompt and completion token counts. `estimated` is set when any part of
/// the count came from the character heuristic rather than the endpoint.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub estimated: bool,
}

impl TokenUsage {
    pub fn reported(prompt_tokens: u64, completion_tokens: u64) -> Self {
        Self {
            prompt_tokens,
            completion_tokens,
            estimated: false,
        }
    }

    pub fn estimated(prompt_tokens: u64, completion_tokens: u64) -> Self {
        Self {
            prompt_tokens,
            completion_tokens,
            estimated: true,
        }
    }

    pub fn total(&self) -> u64 {
        self.prompt_tokens + self.completion_tokens
    }

    pub fn combined(&self, other: &TokenUsage) -> TokenUsage {
        TokenUsage {
            prompt_tokens: self.prompt_tokens + other.prompt_tokens,
            completion_tokens: self.completion_tokens + other.completion_tokens,
            estimated: self.estimated || other.estimated,
        }
    }
}

/// One agent's behavior inside an episode. The engine owns one instance per
/// agent, so any per-agent state lives here.
pub trait Agent: Send {
    fn act(&mut self, view: &AgentView<'_>) -> Result<AgentAction, PolicyError>;

    fn usage(&self) -> TokenUsage {
        TokenUsage::default()
    }
}

/// Factory for per-agent behavior.
pub trait Policy: Send + Sync {
    fn spawn(&self, agent: AgentId, ctx: &TaskContext) -> Box<dyn Agent>;

    /// Short description recorded with every run.
    fn descriptor(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Scripted,
    Llm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub timeout_secs: f64,
    pub retries: usize,
    pub template: String,
    pub template_dir: Option<PathBuf>,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: Option<String>,
    /// Concurrent in-flight calls per episode.
    pub parallelism: usize,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1/chat/completions".to_string(),
            model: "gpt-4o-mini".to_string(),
            temperature: 0.0,
            timeout_secs: 60.0,
            retries: 2,
            template: DEFAULT_TEMPLATE_ID.to_string(),
            template_dir: None,
            api_key_env: Some("OPENAI_API_KEY".to_string()),
            parallelism: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    #[serde(default)]
    pub llm: Option<LlmConfig>,
    #[serde(default)]
    pub rng_seed: u64,
}

impl PolicySpec {
    pub fn scripted() -> Self {
        Self {
            kind: PolicyKind::Scripted,
            llm: None,
            rng_seed: 0,
        }
    }

    pub fn llm(config: LlmConfig) -> Self {
        Self {
            kind: PolicyKind::Llm,
            llm: Some(config),
            rng_seed: 0,
        }
    }

    /// Agents that may act concurrently within a round.
    pub fn parallelism(&self) -> usize {
        match (&self.kind, &self.llm) {
            (PolicyKind::Llm, Some(c)) => c.parallelism.max(1),
            _ => 1,
        }
    }

    pub fn build(&self, task: TaskKind) -> Result<Box<dyn Policy>, PolicyError> {
        match self.kind {
            PolicyKind::Scripted => Ok(Box::new(ScriptedPolicy::new(task))),
            PolicyKind::Llm => {
                let config = self
                    .llm
                    .clone()
                    .ok_or_else(|| PolicyError::Config("llm policy needs an [llm] section".into()))?;
                let template =
                    PromptTemplate::load(config.template_dir.as_deref(), &config.template)?;
                Ok(Box::new(LlmPolicy::new(LlmClient::new(config)?, template)))
            }
        }
    }
}
