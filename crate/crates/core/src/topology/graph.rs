use std::collections::{BTreeSet, VecDeque};

use super::TopologyError;

/// Agent identifier. Agents are numbered `0..n`.
pub type AgentId = usize;

/// Undirected, simple, connected communication graph.
///
/// Edges are stored as sorted `(low, high)` pairs and the adjacency lists are
/// kept sorted, so iteration order is stable everywhere downstream.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(AgentId, AgentId)>,
    adjacency: Vec<Vec<AgentId>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges, out-of-range
    /// endpoints, and disconnected edge sets.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, TopologyError>
    where
        I: IntoIterator<Item = (AgentId, AgentId)>,
    {
        if n < 2 {
            return Err(TopologyError::TooFewNodes(n));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(TopologyError::NodeOutOfRange { node: u.max(v), n });
            }
            if u == v {
                return Err(TopologyError::SelfLoop(u));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(TopologyError::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        let graph = Self::from_edge_set(n, set);
        if !graph.is_connected() {
            return Err(TopologyError::Disconnected);
        }
        Ok(graph)
    }

    /// Builds from an already-deduplicated edge set without the connectivity
    /// check. Generators use this before deciding whether to re-draw.
    pub(crate) fn from_edge_set(n: usize, set: BTreeSet<(AgentId, AgentId)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &set {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            n,
            edges: set.into_iter().collect(),
            adjacency,
        }
    }

    pub fn complete(n: usize) -> Result<Self, TopologyError> {
        Self::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn path(n: usize) -> Result<Self, TopologyError> {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn cycle(n: usize) -> Result<Self, TopologyError> {
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    /// Star with node 0 at the center.
    pub fn star(n: usize) -> Result<Self, TopologyError> {
        Self::from_edges(n, (1..n).map(|v| (0, v)))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted `(low, high)` edge list.
    pub fn edges(&self) -> &[(AgentId, AgentId)] {
        &self.edges
    }

    /// Sorted neighbor list of `node`.
    pub fn neighbors(&self, node: AgentId) -> &[AgentId] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: AgentId) -> usize {
        self.adjacency[node].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: AgentId, v: AgentId) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> std::ops::Range<AgentId> {
        0..self.n
    }

    /// Nodes in breadth-first discovery order from `root`, visiting
    /// neighbors in ascending ID order.
    pub fn bfs_order(&self, root: AgentId) -> Vec<AgentId> {
        self.bfs_tree(root).0
    }

    /// BFS discovery order plus the parent of every discovered node.
    pub(crate) fn bfs_tree(&self, root: AgentId) -> (Vec<AgentId>, Vec<Option<AgentId>>) {
        let mut parent = vec![None; self.n];
        let mut seen = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        (order, parent)
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: AgentId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.bfs_order(0).len() == self.n
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n && self.is_connected()
    }

    pub fn is_path(&self) -> bool {
        self.is_tree() && self.max_degree() <= 2
    }

    /// Returns a copy with one extra edge.
    pub fn with_edge(&self, u: AgentId, v: AgentId) -> Result<Self, TopologyError> {
        Self::from_edges(self.n, self.edges.iter().copied().chain([(u, v)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_simple_input() {
        assert!(matches!(
            Graph::from_edges(3, [(0, 0), (0, 1), (1, 2)]),
            Err(TopologyError::SelfLoop(0))
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1), (1, 0), (1, 2)]),
            Err(TopologyError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1)]),
            Err(TopologyError::Disconnected)
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1), (1, 5)]),
            Err(TopologyError::NodeOutOfRange { node: 5, n: 3 })
        ));
    }

    #[test]
    fn adjacency_matches_edges() {
        let g = Graph::from_edges(4, [(2, 3), (0, 2), (1, 2), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2), (2, 3)]);
        assert_eq!(g.neighbors(2), &[0, 1, 3]);
        assert_eq!(g.max_degree(), 3);
        for &(u, v) in g.edges() {
            assert!(g.has_edge(u, v) && g.has_edge(v, u));
        }
    }

    #[test]
    fn shape_predicates() {
        assert!(Graph::path(5).unwrap().is_path());
        assert!(!Graph::cycle(5).unwrap().is_tree());
        assert!(Graph::star(5).unwrap().is_tree());
        assert_eq!(Graph::complete(5).unwrap().edge_count(), 10);
    }
}
