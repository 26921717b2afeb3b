use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::RunnerError;
use crate::tasks::TaskKind;
use crate::topology::TopologyVariant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    PolicyError,
    BudgetExceeded,
}

/// One episode's metrics; a line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub task: TaskKind,
    pub family: String,
    pub variant: TopologyVariant,
    pub n: usize,
    pub seed: u64,
    pub policy: String,
    pub status: RunStatus,
    pub success: bool,
    pub graded: f64,
    pub budget_t: usize,
    pub early_stabilization: usize,
    pub tokens_prompt: u64,
    pub tokens_completion: u64,
    pub tokens_total: u64,
    pub tokens_estimated: bool,
    pub wall_time: f64,
    pub timestamp: u64,
}

/// Identifies a sweep cell instance; used for resuming and de-duplication.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub task: TaskKind,
    pub family: String,
    pub variant: TopologyVariant,
    pub n: usize,
    pub seed: u64,
    pub policy: String,
}

impl RunRecord {
    pub fn key(&self) -> CellKey {
        CellKey {
            task: self.task,
            family: self.family.clone(),
            variant: self.variant,
            n: self.n,
            seed: self.seed,
            policy: self.policy.clone(),
        }
    }

    /// Checks the record's internal consistency.
    pub fn validate(&self) -> Result<(), String> {
        if self.tokens_total != self.tokens_prompt + self.tokens_completion {
            return Err("tokens_total != tokens_prompt + tokens_completion".into());
        }
        if self.status != RunStatus::Ok && self.success {
            return Err("non-ok record marked successful".into());
        }
        if !(0.0..=1.0).contains(&self.graded) {
            return Err(format!("graded {} outside [0, 1]", self.graded));
        }
        Ok(())
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self, String> {
        let rec: RunRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
        rec.validate()?;
        Ok(rec)
    }
}

/// Reads a JSON-lines results stream, skipping blank lines.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<RunRecord>, RunnerError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            RunRecord::from_json_line(&line).map_err(|message| RunnerError::Record {
                line: i + 1,
                message,
            })?,
        );
    }
    Ok(out)
}
