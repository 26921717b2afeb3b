use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use super::record::{CellKey, RunRecord, RunStatus};
use super::RunnerError;
use crate::tasks::TaskKind;

pub const EXCLUDED: &str = "excluded";
pub const MISSING: &str = "-";

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    /// Mean success, or mean graded score for graded tasks.
    pub success_rate: f64,
    pub rounds: usize,
    pub mean_early_stabilization: f64,
    /// Mean total tokens in thousands, rounded.
    pub tokens_k: u64,
    pub tokens_estimated: bool,
    pub runtime_mean: f64,
    pub runtime_total: f64,
    pub instances: usize,
    pub policy_errors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReportCell {
    Stats(CellStats),
    /// Every record in the cell exceeded the round cap.
    Excluded,
}

/// Aggregated results keyed by task, `family/variant` column group and size.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub tasks: BTreeSet<TaskKind>,
    pub groups: BTreeSet<String>,
    pub sizes: BTreeSet<usize>,
    pub cells: BTreeMap<(TaskKind, String, usize), ReportCell>,
}

impl Report {
    pub fn cell(&self, task: TaskKind, group: &str, n: usize) -> Option<&ReportCell> {
        self.cells.get(&(task, group.to_string(), n))
    }
}

pub fn group_name(record: &RunRecord) -> String {
    format!("{}/{}", record.family, record.variant.name())
}

/// Aggregates records into per-cell statistics. Records sharing a cell key
/// count once; the first occurrence wins.
pub fn aggregate(records: &[RunRecord]) -> Result<Report, RunnerError> {
    if records.is_empty() {
        return Err(RunnerError::EmptySample);
    }
    let mut seen: BTreeSet<CellKey> = BTreeSet::new();
    let mut groups: BTreeMap<(TaskKind, String, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        if seen.insert(r.key()) {
            groups.entry((r.task, group_name(r), r.n)).or_default().push(r);
        }
    }

    let mut report = Report::default();
    for ((task, group, n), recs) in groups {
        report.tasks.insert(task);
        report.groups.insert(group.clone());
        report.sizes.insert(n);
        let ran: Vec<&RunRecord> = recs
            .iter()
            .copied()
            .filter(|r| r.status != RunStatus::BudgetExceeded)
            .collect();
        let cell = if ran.is_empty() {
            ReportCell::Excluded
        } else {
            let count = ran.len() as f64;
            let mean = |f: &dyn Fn(&RunRecord) -> f64| ran.iter().map(|r| f(r)).sum::<f64>() / count;
            let success_rate = if task.is_graded() {
                mean(&|r| r.graded)
            } else {
                mean(&|r| if r.success { 1.0 } else { 0.0 })
            };
            let runtime_total: f64 = ran.iter().map(|r| r.wall_time).sum();
            ReportCell::Stats(CellStats {
                success_rate,
                rounds: ran[0].budget_t,
                mean_early_stabilization: mean(&|r| r.early_stabilization as f64),
                tokens_k: (mean(&|r| r.tokens_total as f64) / 1000.0).round() as u64,
                tokens_estimated: ran.iter().any(|r| r.tokens_estimated),
                runtime_mean: runtime_total / count,
                runtime_total,
                instances: ran.len(),
                policy_errors: ran.iter().filter(|r| r.status == RunStatus::PolicyError).count(),
            })
        };
        report.cells.insert((task, group, n), cell);
    }
    Ok(report)
}

impl fmt::Display for ReportCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportCell::Excluded => f.write_str(EXCLUDED),
            ReportCell::Stats(s) => write!(
                f,
                "{:.2} T={} {}k{} {:.2}s",
                s.success_rate,
                s.rounds,
                s.tokens_k,
                if s.tokens_estimated { "~" } else { "" },
                s.runtime_mean
            ),
        }
    }
}

/// Renders the report as one table per `family/variant` group, one row per
/// task and one column per size. Each cell reads
/// `success T=rounds tokens(x1000) runtime`; `~` marks estimated tokens.
pub fn render(report: &Report) -> String {
    let mut out = String::new();
    for group in &report.groups {
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut header = vec![group.clone()];
        header.extend(report.sizes.iter().map(|n| format!("n={n}")));
        rows.push(header);
        for &task in &report.tasks {
            let mut row = vec![task.name().to_string()];
            for &n in &report.sizes {
                row.push(
                    report
                        .cell(task, group, n)
                        .map_or_else(|| MISSING.to_string(), ToString::to_string),
                );
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join(" | ").trim_end());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::record::tests::sample;

    fn stats(cell: Option<&ReportCell>) -> &CellStats {
        match cell {
            Some(ReportCell::Stats(s)) => s,
            other => panic!("expected stats, got {other:?}"),
        }
    }

    #[test]
    fn success_rate_is_a_mean() {
        let recs: Vec<_> = [true, true, true, false, true]
            .iter()
            .enumerate()
            .map(|(i, &ok)| sample(TaskKind::Consensus, 4, i as u64, ok))
            .collect();
        let report = aggregate(&recs).unwrap();
        let s = stats(report.cell(TaskKind::Consensus, "smallworld/base", 4));
        assert!((s.success_rate - 0.8).abs() < 1e-12);
        assert_eq!(s.instances, 5);
    }

    #[test]
    fn tokens_in_thousands() {
        let mut a = sample(TaskKind::Coloring, 4, 0, true);
        let mut b = sample(TaskKind::Coloring, 4, 1, true);
        (a.tokens_prompt, a.tokens_total) = (1000, 1000);
        (b.tokens_prompt, b.tokens_total) = (3000, 3000);
        let report = aggregate(&[a, b]).unwrap();
        assert_eq!(stats(report.cell(TaskKind::Coloring, "smallworld/base", 4)).tokens_k, 2);
    }

    #[test]
    fn matching_uses_graded_score() {
        let mut a = sample(TaskKind::Matching, 4, 0, false);
        a.graded = 0.5;
        let b = sample(TaskKind::Matching, 4, 1, true);
        let report = aggregate(&[a, b]).unwrap();
        let s = stats(report.cell(TaskKind::Matching, "smallworld/base", 4));
        assert!((s.success_rate - 0.75).abs() < 1e-12);
    }

    #[test]
    fn excluded_and_missing_cells() {
        let mut a = sample(TaskKind::Consensus, 50, 0, false);
        a.status = RunStatus::BudgetExceeded;
        let b = sample(TaskKind::Consensus, 4, 0, true);
        let c = sample(TaskKind::Coloring, 4, 0, true);
        let report = aggregate(&[a, b, c]).unwrap();
        assert_eq!(report.cell(TaskKind::Consensus, "smallworld/base", 50), Some(&ReportCell::Excluded));
        let text = render(&report);
        assert!(text.contains(EXCLUDED));
        let coloring = text.lines().find(|l| l.starts_with("coloring")).unwrap();
        assert!(coloring.trim_end().ends_with(MISSING));
    }

    #[test]
    fn duplicates_do_not_change_the_report() {
        let recs: Vec<_> = (0..4)
            .map(|s| sample(TaskKind::LeaderElection, 8, s, s % 2 == 0))
            .collect();
        let doubled: Vec<_> = recs.iter().chain(&recs).cloned().collect();
        assert_eq!(aggregate(&recs).unwrap(), aggregate(&doubled).unwrap());
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(aggregate(&[]).is_err());
    }
}
