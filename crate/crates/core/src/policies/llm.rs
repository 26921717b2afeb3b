//! Chat-completion backed policy.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::prompt::PromptTemplate;
use super::{Agent, LlmConfig, Policy, PolicyError, TokenUsage};
use crate::engine::{AgentAction, AgentView, AnswerSlot};
use crate::tasks::TaskContext;
use crate::topology::AgentId;

/// Characters per token used when the endpoint reports no usage.
pub const CHARS_PER_TOKEN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: &str, content: impl Into<String>) -> Self {
        Self {
            role: role.to_string(),
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlmReply {
    pub text: String,
    pub usage: TokenUsage,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    temperature: f64,
    messages: &'a [ChatMessage],
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

/// Pulls `choices[0].message.content` and the optional `usage` block out of
/// a response body.
pub fn parse_chat_response(body: &str) -> Result<(String, Option<Usage>), PolicyError> {
    let resp: ChatResponse = serde_json::from_str(body)
        .map_err(|e| PolicyError::Malformed(format!("response body: {e}")))?;
    let text = resp
        .choices
        .into_iter()
        .next()
        .and_then(|c| c.message.content)
        .ok_or_else(|| PolicyError::Malformed("response has no choices[0].message.content".into()))?;
    Ok((text, resp.usage))
}

pub fn estimate_tokens(chars: usize) -> u64 {
    chars.div_ceil(CHARS_PER_TOKEN) as u64
}

/// Blocking chat-completion client with per-call timeout and retries.
#[derive(Debug, Clone)]
pub struct LlmClient {
    config: LlmConfig,
    http: reqwest::blocking::Client,
    api_key: Option<String>,
}

impl LlmClient {
    pub fn new(config: LlmConfig) -> Result<Self, PolicyError> {
        if config.temperature < 0.0 {
            return Err(PolicyError::Config(format!(
                "temperature {} must be non-negative",
                config.temperature
            )));
        }
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_secs))
            .build()
            .map_err(|e| PolicyError::Transport(e.to_string()))?;
        let api_key = config
            .api_key_env
            .as_deref()
            .and_then(|name| std::env::var(name).ok())
            .filter(|k| !k.is_empty());
        Ok(Self {
            config,
            http,
            api_key,
        })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    fn attempt(&self, messages: &[ChatMessage]) -> Result<String, PolicyError> {
        let mut req = self.http.post(&self.config.endpoint).json(&ChatRequest {
            model: &self.config.model,
            temperature: self.config.temperature,
            messages,
        });
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| {
            if e.is_timeout() {
                PolicyError::Timeout(e.to_string())
            } else {
                PolicyError::Transport(e.to_string())
            }
        })?;
        let status = resp.status();
        let body = resp
            .text()
            .map_err(|e| PolicyError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(PolicyError::Status {
                status: status.as_u16(),
                body: body.chars().take(200).collect(),
            });
        }
        Ok(body)
    }

    /// Sends one chat request, retrying failures up to `retries` extra times.
    /// Token counts come from the endpoint's `usage` block when present and
    /// are otherwise estimated from character counts and flagged.
    pub fn call_llm(&self, messages: &[ChatMessage]) -> Result<LlmReply, PolicyError> {
        let mut last_err = None;
        for _ in 0..=self.config.retries {
            let outcome = self.attempt(messages).and_then(|b| parse_chat_response(&b));
            match outcome {
                Ok((text, usage)) => {
                    let usage = match usage {
                        Some(u) => TokenUsage::reported(u.prompt_tokens, u.completion_tokens),
                        None => {
                            let prompt_chars: usize =
                                messages.iter().map(|m| m.content.chars().count()).sum();
                            TokenUsage::estimated(
                                estimate_tokens(prompt_chars),
                                estimate_tokens(text.chars().count()),
                            )
                        }
                    };
                    return Ok(LlmReply { text, usage });
                }
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.expect("at least one attempt"))
    }
}

/// Splits a reply into per-neighbor messages. Lines of the form
/// `TO <id>: text` address one agent, `ALL: text` every neighbor. Lines
/// addressed to non-neighbors are dropped.
pub fn parse_outbox(text: &str, neighbors: &[AgentId]) -> BTreeMap<AgentId, String> {
    let mut outbox: BTreeMap<AgentId, String> = BTreeMap::new();
    let mut push = |v: AgentId, body: &str| {
        let entry = outbox.entry(v).or_default();
        if !entry.is_empty() {
            entry.push('\n');
        }
        entry.push_str(body);
    };
    for line in text.lines() {
        let line = line.trim();
        let Some((head, body)) = line.split_once(':') else {
            continue;
        };
        let body = body.trim();
        let head = head.trim();
        if head.eq_ignore_ascii_case("all") || head.eq_ignore_ascii_case("broadcast") {
            for &v in neighbors {
                push(v, body);
            }
        } else if let Some(id) = head
            .get(..3)
            .filter(|p| p.eq_ignore_ascii_case("to "))
            .and_then(|_| head[3..].trim().parse::<AgentId>().ok())
        {
            if neighbors.binary_search(&id).is_ok() {
                push(id, body);
            }
        }
    }
    outbox
}

/// Policy that asks a chat model for every agent action.
#[derive(Debug, Clone)]
pub struct LlmPolicy {
    client: Arc<LlmClient>,
    template: Arc<PromptTemplate>,
}

impl LlmPolicy {
    pub fn new(client: LlmClient, template: PromptTemplate) -> Self {
        Self {
            client: Arc::new(client),
            template: Arc::new(template),
        }
    }
}

impl Policy for LlmPolicy {
    fn spawn(&self, _agent: AgentId, _ctx: &TaskContext) -> Box<dyn Agent> {
        Box::new(LlmAgent {
            client: Arc::clone(&self.client),
            template: Arc::clone(&self.template),
            usage: TokenUsage::default(),
        })
    }

    fn descriptor(&self) -> String {
        let c = self.client.config();
        format!("llm:{}:t={}:{}", c.model, c.temperature, self.template.id)
    }
}

#[derive(Debug)]
pub struct LlmAgent {
    client: Arc<LlmClient>,
    template: Arc<PromptTemplate>,
    usage: TokenUsage,
}

impl Agent for LlmAgent {
    fn act(&mut self, view: &AgentView<'_>) -> Result<AgentAction, PolicyError> {
        let (system, user) = self.template.render(view);
        let messages = [ChatMessage::new("system", system), ChatMessage::new("user", user)];
        let reply = self.client.call_llm(&messages)?;
        self.usage = self.usage.combined(&reply.usage);
        Ok(AgentAction {
            outbox: parse_outbox(&reply.text, view.neighbors),
            answer: AnswerSlot::Raw(reply.text),
        })
    }

    fn usage(&self) -> TokenUsage {
        self.usage
    }
}
