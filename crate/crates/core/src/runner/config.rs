//! TOML sweep configuration.
//!
//! ```toml
//! [sweep]
//! tasks = ["consensus", "coloring"]
//! variants = ["base", "star"]
//! sizes = [4, 8, 16]
//! seeds_per_cell = 5
//! output = "results.jsonl"
//! families = [{ family = "smallworld", k = 4, p = 0.1 }, { family = "delaunay" }]
//!
//! [policy]
//! kind = "llm"
//! [policy.llm]
//! endpoint = "http://localhost:8000/v1/chat/completions"
//! model = "gpt-4o-mini"
//! api_key_env = "OPENAI_API_KEY"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunnerError;
use crate::engine::DEFAULT_MAX_ROUNDS;
use crate::policies::PolicySpec;
use crate::tasks::TaskKind;
use crate::topology::{Family, GraphSpec, TopologyVariant};

pub const DEFAULT_SIZES: [usize; 5] = [4, 8, 16, 50, 100];
pub const DEFAULT_SEEDS_PER_CELL: u64 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "all_tasks")]
    pub tasks: Vec<TaskKind>,
    #[serde(default = "all_families")]
    pub families: Vec<Family>,
    #[serde(default = "all_variants")]
    pub variants: Vec<TopologyVariant>,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds_per_cell: u64,
    /// First seed; cell instances use `base_seed..base_seed + seeds_per_cell`.
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_cap")]
    pub max_rounds_cap: usize,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub policy_retries: usize,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(skip, default = "PolicySpec::scripted")]
    pub policy: PolicySpec,
}

fn all_tasks() -> Vec<TaskKind> {
    TaskKind::ALL.to_vec()
}
fn all_families() -> Vec<Family> {
    vec![Family::small_world(), Family::scale_free(), Family::Delaunay]
}
fn all_variants() -> Vec<TopologyVariant> {
    TopologyVariant::ALL.to_vec()
}
fn default_sizes() -> Vec<usize> {
    DEFAULT_SIZES.to_vec()
}
fn default_seeds() -> u64 {
    DEFAULT_SEEDS_PER_CELL
}
fn default_cap() -> usize {
    DEFAULT_MAX_ROUNDS
}
fn default_workers() -> usize {
    1
}
fn default_output() -> PathBuf {
    PathBuf::from("results.jsonl")
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            tasks: all_tasks(),
            families: all_families(),
            variants: all_variants(),
            sizes: default_sizes(),
            seeds_per_cell: default_seeds(),
            base_seed: 0,
            max_rounds_cap: default_cap(),
            workers: default_workers(),
            policy_retries: 0,
            output: default_output(),
            policy: PolicySpec::scripted(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), RunnerError> {
        let bad = |m: &str| Err(RunnerError::Config(m.to_string()));
        if self.sizes.is_empty() {
            return bad("sizes must be non-empty");
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sizes must be strictly increasing");
        }
        if self.sizes[0] < 2 {
            return bad("sizes must be at least 2");
        }
        if self.seeds_per_cell == 0 {
            return bad("seeds_per_cell must be at least 1");
        }
        if self.max_rounds_cap == 0 {
            return bad("max_rounds_cap must be positive");
        }
        if self.tasks.is_empty() || self.families.is_empty() || self.variants.is_empty() {
            return bad("tasks, families and variants must be non-empty");
        }
        for family in &self.families {
            for &n in &self.sizes {
                GraphSpec::new(family.fitted(n), n, 0)
                    .validate()
                    .map_err(|e| RunnerError::Config(format!("{} at n={n}: {e}", family.name())))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    sweep: Option<SweepSpec>,
    #[serde(default)]
    policy: Option<PolicySpec>,
}

/// Parses configuration text into a validated sweep.
pub fn parse_config(text: &str) -> Result<SweepSpec, RunnerError> {
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| RunnerError::Config(e.message().to_string()))?;
    let mut spec = file.sweep.unwrap_or_default();
    spec.policy = file.policy.unwrap_or_else(PolicySpec::scripted);
    spec.validate()?;
    Ok(spec)
}

pub fn load_config(path: &Path) -> Result<SweepSpec, RunnerError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunnerError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}
