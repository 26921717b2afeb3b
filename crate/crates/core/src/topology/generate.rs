use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::delaunay;
use super::graph::{AgentId, Graph};
use super::TopologyError;

/// Re-draws allowed before a family/parameter combination is declared degenerate.
pub const MAX_CONNECTIVITY_RETRIES: u64 = 64;

pub const DEFAULT_RING_DEGREE: usize = 4;
pub const DEFAULT_REWIRE_PROBABILITY: f64 = 0.1;
pub const DEFAULT_ATTACHMENT: usize = 2;

/// Base graph family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// Watts-Strogatz ring lattice of degree `k`, rewired with probability `p`.
    #[serde(rename = "smallworld")]
    SmallWorld {
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default = "default_p")]
        p: f64,
    },
    /// Barabasi-Albert preferential attachment with `m` edges per new node.
    #[serde(rename = "scalefree")]
    ScaleFree {
        #[serde(default = "default_m")]
        m: usize,
    },
    /// Delaunay triangulation of uniform points in the unit square.
    #[serde(rename = "delaunay")]
    Delaunay,
}

fn default_k() -> usize {
    DEFAULT_RING_DEGREE
}
fn default_p() -> f64 {
    DEFAULT_REWIRE_PROBABILITY
}
fn default_m() -> usize {
    DEFAULT_ATTACHMENT
}

impl Family {
    pub fn small_world() -> Self {
        Family::SmallWorld {
            k: DEFAULT_RING_DEGREE,
            p: DEFAULT_REWIRE_PROBABILITY,
        }
    }

    pub fn scale_free() -> Self {
        Family::ScaleFree {
            m: DEFAULT_ATTACHMENT,
        }
    }

    /// Short lowercase label used in records and reports.
    pub fn name(&self) -> &'static str {
        match self {
            Family::SmallWorld { .. } => "smallworld",
            Family::ScaleFree { .. } => "scalefree",
            Family::Delaunay => "delaunay",
        }
    }

    /// Clamps parameters so they are valid for `n` nodes: the ring degree
    /// drops to the largest even value below `n`, the attachment count to
    /// `n - 1`.
    pub fn fitted(self, n: usize) -> Self {
        match self {
            Family::SmallWorld { k, p } => {
                let cap = n.saturating_sub(1) & !1;
                Family::SmallWorld {
                    k: k.min(cap).max(2),
                    p,
                }
            }
            Family::ScaleFree { m } => Family::ScaleFree {
                m: m.min(n.saturating_sub(1)).max(1),
            },
            Family::Delaunay => Family::Delaunay,
        }
    }

    /// Parses a family name, filling in default parameters.
    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "smallworld" | "wattsstrogatz" => Some(Self::small_world()),
            "scalefree" | "barabasialbert" => Some(Self::scale_free()),
            "delaunay" => Some(Family::Delaunay),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

impl GraphSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        Self { family, n, seed }
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        let n = self.n;
        if n < 2 {
            return Err(TopologyError::TooFewNodes(n));
        }
        match self.family {
            Family::SmallWorld { k, p } => {
                if k % 2 != 0 || k < 2 || k >= n {
                    return Err(TopologyError::InvalidParameter(format!(
                        "small-world ring degree k={k} must be even with 2 <= k < n={n}"
                    )));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(TopologyError::InvalidParameter(format!(
                        "rewiring probability p={p} outside [0, 1]"
                    )));
                }
            }
            Family::ScaleFree { m } => {
                if m < 1 || m >= n {
                    return Err(TopologyError::InvalidParameter(format!(
                        "attachment count m={m} must satisfy 1 <= m < n={n}"
                    )));
                }
            }
            Family::Delaunay => {}
        }
        Ok(())
    }
}

/// SplitMix64 finalizer; derives the per-attempt RNG seed.
fn sub_seed(seed: u64, attempt: u64) -> u64 {
    let mut z = seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates a simple connected graph for `spec`.
///
/// Disconnected draws are discarded and re-drawn from a derived sub-seed, up to
/// [`MAX_CONNECTIVITY_RETRIES`] attempts. The result depends only on `spec`.
pub fn generate(spec: &GraphSpec) -> Result<Graph, TopologyError> {
    spec.validate()?;
    draw_connected(spec.n, spec.seed, |rng| match spec.family {
        Family::SmallWorld { k, p } => watts_strogatz(spec.n, k, p, rng),
        Family::ScaleFree { m } => barabasi_albert(spec.n, m, rng),
        Family::Delaunay => delaunay::random_delaunay_edges(spec.n, rng),
    })
}

fn draw_connected<F>(n: usize, seed: u64, mut draw: F) -> Result<Graph, TopologyError>
where
    F: FnMut(&mut ChaCha8Rng) -> BTreeSet<(AgentId, AgentId)>,
{
    for attempt in 0..MAX_CONNECTIVITY_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, attempt));
        let graph = Graph::from_edge_set(n, draw(&mut rng));
        if graph.is_connected() {
            return Ok(graph);
        }
    }
    Err(TopologyError::ConnectivityFailure {
        attempts: MAX_CONNECTIVITY_RETRIES,
    })
}

fn ordered(u: AgentId, v: AgentId) -> (AgentId, AgentId) {
    (u.min(v), u.max(v))
}

fn watts_strogatz<R: Rng>(n: usize, k: usize, p: f64, rng: &mut R) -> BTreeSet<(AgentId, AgentId)> {
    let mut adj: Vec<BTreeSet<AgentId>> = vec![BTreeSet::new(); n];
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !adj[u].contains(&v) || rng.gen::<f64>() >= p {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    adj.iter()
        .enumerate()
        .flat_map(|(u, nbrs)| nbrs.iter().map(move |&v| ordered(u, v)))
        .collect()
}

/// Preferential attachment seeded with the complete graph on the first `m`
/// nodes, so the edge count is `C(m, 2) + m * (n - m)`.
fn barabasi_albert<R: Rng>(n: usize, m: usize, rng: &mut R) -> BTreeSet<(AgentId, AgentId)> {
    let mut edges = BTreeSet::new();
    // Every endpoint occurrence, so a uniform pick is degree-proportional.
    let mut endpoints: Vec<AgentId> = Vec::new();
    for u in 0..m {
        for v in u + 1..m {
            edges.insert((u, v));
            endpoints.extend([u, v]);
        }
    }
    for new in m..n {
        let targets: BTreeSet<AgentId> = if endpoints.is_empty() {
            (0..m).collect()
        } else {
            let mut chosen = BTreeSet::new();
            while chosen.len() < m {
                chosen.insert(*endpoints.choose(rng).expect("non-empty"));
            }
            chosen
        };
        for t in targets {
            edges.insert(ordered(t, new));
            endpoints.extend([t, new]);
        }
    }
    edges
}
