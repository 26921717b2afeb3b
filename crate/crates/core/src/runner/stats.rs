use serde::{Deserialize, Serialize};

use super::RunnerError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputSizeStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub total: usize,
}

/// Latency percentiles, throughput and output-size summary over a batch of
/// timed requests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub p50: f64,
    pub p95: f64,
    /// Requests per second over the whole batch.
    pub throughput: f64,
    pub count: usize,
    pub output_size: Option<OutputSizeStats>,
}

/// Nearest-rank percentile of an ascending slice: the element at 1-indexed
/// rank `ceil(q * len)`.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let len = sorted.len();
    let rank = ((q * len as f64).ceil() as usize).clamp(1, len);
    sorted[rank - 1]
}

pub fn latency_stats(
    samples: &[f64],
    total_elapsed: f64,
    outputs: &[usize],
) -> Result<LatencyStats, RunnerError> {
    if samples.is_empty() {
        return Err(RunnerError::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let output_size = (!outputs.is_empty()).then(|| {
        let total: usize = outputs.iter().sum();
        OutputSizeStats {
            min: *outputs.iter().min().expect("non-empty"),
            max: *outputs.iter().max().expect("non-empty"),
            mean: total as f64 / outputs.len() as f64,
            total,
        }
    });
    Ok(LatencyStats {
        p50: nearest_rank(&sorted, 0.50),
        p95: nearest_rank(&sorted, 0.95),
        throughput: samples.len() as f64 / total_elapsed,
        count: samples.len(),
        output_size,
    })
}
