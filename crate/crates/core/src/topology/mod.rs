//! Communication topologies: base graph families, topology rewriting,
//! diameters and round budgets.

mod delaunay;
mod edgelist;
mod generate;
mod graph;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tasks::{TaskClass, TaskKind};

pub use delaunay::{circumcircle, sample_points, triangulate, triangulation_edges, Point};
pub use edgelist::{parse_edge_list, write_edge_list};
pub use generate::{
    generate, Family, GraphSpec, DEFAULT_ATTACHMENT, DEFAULT_REWIRE_PROBABILITY,
    DEFAULT_RING_DEGREE, MAX_CONNECTIVITY_RETRIES,
};
pub use graph::{AgentId, Graph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("graph needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("node {node} out of range for n={n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(AgentId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(AgentId, AgentId),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("no connected draw after {attempts} attempts; parameters are degenerate")]
    ConnectivityFailure { attempts: u64 },
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Interaction structure derived from a base graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyVariant {
    Base,
    Sequential,
    Hierarchical,
    /// Realized as the complete graph.
    Star,
}

impl TopologyVariant {
    pub const ALL: [TopologyVariant; 4] = [
        TopologyVariant::Base,
        TopologyVariant::Sequential,
        TopologyVariant::Hierarchical,
        TopologyVariant::Star,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TopologyVariant::Base => "base",
            TopologyVariant::Sequential => "sequential",
            TopologyVariant::Hierarchical => "hierarchical",
            TopologyVariant::Star => "star",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(name.trim()))
    }
}

/// Derives the interaction structure for `variant` from `base`. The node set
/// is always preserved.
///
/// * `Sequential`: path through the nodes in BFS-discovery order from node 0.
/// * `Hierarchical`: BFS spanning tree rooted at the maximum-degree node
///   (lowest ID on ties).
/// * `Star`: the complete graph.
pub fn rewrite(base: &Graph, variant: TopologyVariant) -> Graph {
    let n = base.node_count();
    let built = match variant {
        TopologyVariant::Base => return base.clone(),
        TopologyVariant::Sequential => {
            let order = base.bfs_order(0);
            Graph::from_edges(n, order.windows(2).map(|w| (w[0], w[1])))
        }
        TopologyVariant::Hierarchical => {
            let root = base
                .nodes()
                .max_by_key(|&u| (base.degree(u), std::cmp::Reverse(u)))
                .unwrap_or(0);
            let (_, parent) = base.bfs_tree(root);
            Graph::from_edges(
                n,
                parent
                    .iter()
                    .enumerate()
                    .filter_map(|(v, p)| p.map(|p| (p, v))),
            )
        }
        TopologyVariant::Star => Graph::complete(n),
    };
    built.expect("rewriting a connected graph yields a connected graph")
}

/// Exact diameter via BFS from every node.
pub fn diameter(g: &Graph) -> Result<usize, TopologyError> {
    let mut best = 0;
    for s in g.nodes() {
        for d in g.bfs_distances(s) {
            best = best.max(d.ok_or(TopologyError::Disconnected)?);
        }
    }
    Ok(best)
}

/// Minimum interaction budget for local tasks.
pub const MIN_LOCAL_ROUNDS: usize = 8;
/// Local tasks on at most this many agents use the fixed minimum budget.
pub const SMALL_NETWORK_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetRule {
    GlobalTask,
    LocalTaskSmallN,
    LocalTaskLargeN,
}

/// Number of synchronous rounds an episode runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundBudget {
    pub total_rounds: usize,
    pub diameter: usize,
    pub rule: BudgetRule,
}

impl RoundBudget {
    /// Same derivation, but with at least `rounds` rounds. Used to give the
    /// scripted reference policies room on adversarial graphs.
    pub fn at_least(self, rounds: usize) -> Self {
        Self {
            total_rounds: self.total_rounds.max(rounds),
            ..self
        }
    }
}

/// Global tasks run `2D + 1` rounds. Local tasks run 8 rounds up to 16
/// agents and `max(8, 2D + 1)` beyond.
pub fn round_budget(g: &Graph, task: TaskKind, n: usize) -> Result<RoundBudget, TopologyError> {
    let d = diameter(g)?;
    let propagation = 2 * d + 1;
    let (total_rounds, rule) = match task.class() {
        TaskClass::Global => (propagation, BudgetRule::GlobalTask),
        TaskClass::Local if n <= SMALL_NETWORK_LIMIT => (MIN_LOCAL_ROUNDS, BudgetRule::LocalTaskSmallN),
        TaskClass::Local => (propagation.max(MIN_LOCAL_ROUNDS), BudgetRule::LocalTaskLargeN),
    };
    Ok(RoundBudget {
        total_rounds,
        diameter: d,
        rule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_variant_is_complete() {
        let base = Graph::path(4).unwrap();
        let star = rewrite(&base, TopologyVariant::Star);
        assert_eq!(star.edge_count(), 6);
        assert_eq!(diameter(&star).unwrap(), 1);
    }

    #[test]
    fn sequential_is_a_path_in_bfs_order() {
        let base = Graph::star(16).unwrap();
        let seq = rewrite(&base, TopologyVariant::Sequential);
        assert_eq!(seq.edge_count(), 15);
        assert_eq!(seq.max_degree(), 2);
        assert_eq!(diameter(&seq).unwrap(), 15);
        // BFS from the star center visits leaves in ID order.
        assert!((1..16).all(|v| seq.has_edge(v - 1, v)));
    }

    #[test]
    fn hierarchical_roots_at_max_degree_node() {
        let base = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let tree = rewrite(&base, TopologyVariant::Hierarchical);
        assert_eq!(tree.edges(), &[(0, 2), (1, 2), (2, 3)]);
        assert_eq!(diameter(&tree).unwrap(), 2);
    }

    #[test]
    fn base_variant_is_identity() {
        let base = Graph::cycle(5).unwrap();
        assert_eq!(rewrite(&base, TopologyVariant::Base), base);
    }

    #[test]
    fn diameters_of_known_graphs() {
        for n in 2..10 {
            assert_eq!(diameter(&Graph::complete(n).unwrap()).unwrap(), 1);
        }
        assert_eq!(diameter(&Graph::path(16).unwrap()).unwrap(), 15);
        assert_eq!(diameter(&Graph::cycle(4).unwrap()).unwrap(), 2);
    }

    #[test]
    fn budgets_follow_task_class() {
        let p16 = Graph::path(16).unwrap();
        assert_eq!(round_budget(&p16, TaskKind::Consensus, 16).unwrap().total_rounds, 31);
        let p8 = Graph::path(8).unwrap();
        assert_eq!(round_budget(&p8, TaskKind::LeaderElection, 8).unwrap().total_rounds, 15);
        for n in [4, 8, 16, 50, 100] {
            let k = Graph::complete(n).unwrap();
            assert_eq!(round_budget(&k, TaskKind::Consensus, n).unwrap().total_rounds, 3);
        }
        let b = round_budget(&p16, TaskKind::Coloring, 16).unwrap();
        assert_eq!((b.total_rounds, b.rule), (8, BudgetRule::LocalTaskSmallN));
        let p20 = Graph::path(20).unwrap();
        let b = round_budget(&p20, TaskKind::Matching, 20).unwrap();
        assert_eq!((b.total_rounds, b.rule), (39, BudgetRule::LocalTaskLargeN));
        let k20 = Graph::complete(20).unwrap();
        assert_eq!(round_budget(&k20, TaskKind::VertexCover, 20).unwrap().total_rounds, 8);
    }

    #[test]
    fn variant_names_parse() {
        for v in TopologyVariant::ALL {
            assert_eq!(TopologyVariant::from_name(v.name()), Some(v));
        }
    }
}
