use serde::{Deserialize, Serialize};

use super::{Answer, TaskKind};
use crate::topology::{AgentId, Graph};

/// Visual class of a node in a decorated outcome graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Green,
    Blue,
    Orange,
    Red,
    Gray,
}

/// Visual class of an edge in a decorated outcome graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    Green,
    Red,
    Gray,
}

impl NodeClass {
    pub fn name(self) -> &'static str {
        match self {
            NodeClass::Green => "green",
            NodeClass::Blue => "blue",
            NodeClass::Orange => "orange",
            NodeClass::Red => "red",
            NodeClass::Gray => "gray",
        }
    }
}

impl EdgeClass {
    pub fn name(self) -> &'static str {
        match self {
            EdgeClass::Green => "green",
            EdgeClass::Red => "red",
            EdgeClass::Gray => "gray",
        }
    }
}

/// Outcome of scoring one episode.
///
/// `edge_classes` is parallel to [`Graph::edges`]; `node_classes` is indexed
/// by agent ID.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub success: bool,
    /// In `[0, 1]`. Equal to `success` as 0/1 for every task except Matching.
    pub graded: f64,
    pub node_classes: Vec<NodeClass>,
    pub edge_classes: Vec<EdgeClass>,
}

impl TaskScore {
    fn binary(success: bool, node_classes: Vec<NodeClass>, edge_classes: Vec<EdgeClass>) -> Self {
        Self {
            success,
            graded: if success { 1.0 } else { 0.0 },
            node_classes,
            edge_classes,
        }
    }

    pub fn count_edges(&self, class: EdgeClass) -> usize {
        self.edge_classes.iter().filter(|&&c| c == class).count()
    }

    pub fn count_nodes(&self, class: NodeClass) -> usize {
        self.node_classes.iter().filter(|&&c| c == class).count()
    }
}

/// Dispatches to the task's scorer.
pub fn score(task: TaskKind, g: &Graph, answers: &[Answer]) -> TaskScore {
    match task {
        TaskKind::Coloring => score_coloring(g, answers),
        TaskKind::Matching => score_matching(g, answers),
        TaskKind::VertexCover => score_vertex_cover(g, answers),
        TaskKind::LeaderElection => score_leader_election(g, answers),
        TaskKind::Consensus => score_consensus(g, answers),
    }
}

fn check_len(g: &Graph, answers: &[Answer]) {
    assert_eq!(
        answers.len(),
        g.node_count(),
        "one answer per agent is required"
    );
}

fn color(a: &Answer, palette: usize) -> Option<usize> {
    match *a {
        Answer::Color(c) if c < palette => Some(c),
        _ => None,
    }
}

/// Proper (Δ+1)-coloring check. Invalid or out-of-palette answers count as
/// collisions on every incident edge.
pub fn score_coloring(g: &Graph, answers: &[Answer]) -> TaskScore {
    check_len(g, answers);
    let palette = g.max_degree() + 1;
    let colors: Vec<Option<usize>> = answers.iter().map(|a| color(a, palette)).collect();
    let mut nodes = vec![NodeClass::Green; g.node_count()];
    for (u, c) in colors.iter().enumerate() {
        if c.is_none() {
            nodes[u] = NodeClass::Orange;
        }
    }
    let edges: Vec<EdgeClass> = g
        .edges()
        .iter()
        .map(|&(u, v)| match (colors[u], colors[v]) {
            (Some(a), Some(b)) if a != b => EdgeClass::Green,
            _ => EdgeClass::Red,
        })
        .collect();
    for (&(u, v), class) in g.edges().iter().zip(&edges) {
        if *class == EdgeClass::Red {
            for w in [u, v] {
                if nodes[w] == NodeClass::Green {
                    nodes[w] = NodeClass::Red;
                }
            }
        }
    }
    let success = colors.iter().all(Option::is_some) && !edges.contains(&EdgeClass::Red);
    TaskScore::binary(success, nodes, edges)
}

fn partner(a: &Answer) -> Option<Option<AgentId>> {
    match *a {
        Answer::Partner(p) => Some(p),
        _ => None,
    }
}

/// Matching score `1 - I/|V|`, where an agent is inconsistent if it picked a
/// non-neighbor, picked a neighbor that did not pick it back, picked none
/// while some neighbor also picked none, or gave an invalid answer.
pub fn score_matching(g: &Graph, answers: &[Answer]) -> TaskScore {
    check_len(g, answers);
    let n = g.node_count();
    let choice: Vec<Option<Option<AgentId>>> = answers.iter().map(partner).collect();
    let mut nodes = vec![NodeClass::Gray; n];
    let mut inconsistent = 0usize;
    for u in 0..n {
        let class = match choice[u] {
            None => NodeClass::Red,
            Some(Some(v)) if !g.has_edge(u, v) => NodeClass::Red,
            Some(Some(v)) if choice[v] == Some(Some(u)) => NodeClass::Green,
            Some(Some(_)) => NodeClass::Orange,
            Some(None) => {
                if g.neighbors(u).iter().any(|&w| choice[w] == Some(None)) {
                    NodeClass::Red
                } else {
                    NodeClass::Gray
                }
            }
        };
        if matches!(class, NodeClass::Red | NodeClass::Orange) {
            inconsistent += 1;
        }
        nodes[u] = class;
    }
    let edges = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            if choice[u] == Some(Some(v)) && choice[v] == Some(Some(u)) {
                EdgeClass::Green
            } else {
                EdgeClass::Gray
            }
        })
        .collect();
    TaskScore {
        success: inconsistent == 0,
        graded: 1.0 - inconsistent as f64 / n as f64,
        node_classes: nodes,
        edge_classes: edges,
    }
}

fn covers(g: &Graph, in_cover: &[bool]) -> bool {
    g.edges().iter().all(|&(u, v)| in_cover[u] || in_cover[v])
}

/// Vertex cover check over the agents answering yes.
///
/// Members are `Blue` when the cover minus that member still covers every
/// edge and `Green` otherwise; invalid answers are `Orange` and uncovered
/// edges `Red`.
pub fn score_vertex_cover(g: &Graph, answers: &[Answer]) -> TaskScore {
    check_len(g, answers);
    let valid = |a: &Answer| matches!(a, Answer::Decision(_));
    let mut in_cover: Vec<bool> = answers.iter().map(Answer::is_yes).collect();
    let edges: Vec<EdgeClass> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            if in_cover[u] || in_cover[v] {
                EdgeClass::Green
            } else {
                EdgeClass::Red
            }
        })
        .collect();
    let mut nodes = vec![NodeClass::Gray; g.node_count()];
    for u in g.nodes() {
        if !valid(&answers[u]) {
            nodes[u] = NodeClass::Orange;
        } else if in_cover[u] {
            in_cover[u] = false;
            nodes[u] = if covers(g, &in_cover) {
                NodeClass::Blue
            } else {
                NodeClass::Green
            };
            in_cover[u] = true;
        }
    }
    let success = answers.iter().all(valid) && !edges.contains(&EdgeClass::Red);
    TaskScore::binary(success, nodes, edges)
}

/// Exactly one agent answers yes, and no answer is invalid.
pub fn score_leader_election(g: &Graph, answers: &[Answer]) -> TaskScore {
    check_len(g, answers);
    let leaders = answers.iter().filter(|a| a.is_yes()).count();
    let all_valid = answers.iter().all(|a| matches!(a, Answer::Decision(_)));
    let nodes = answers
        .iter()
        .map(|a| match a {
            Answer::Decision(true) if leaders == 1 => NodeClass::Green,
            Answer::Decision(true) => NodeClass::Red,
            Answer::Decision(false) => NodeClass::Gray,
            _ => NodeClass::Orange,
        })
        .collect();
    TaskScore::binary(
        leaders == 1 && all_valid,
        nodes,
        vec![EdgeClass::Gray; g.edge_count()],
    )
}

fn bit(a: &Answer) -> Option<u8> {
    match *a {
        Answer::Bit(b @ (0 | 1)) => Some(b),
        _ => None,
    }
}

/// All agents output the same bit.
pub fn score_consensus(g: &Graph, answers: &[Answer]) -> TaskScore {
    check_len(g, answers);
    let bits: Vec<Option<u8>> = answers.iter().map(bit).collect();
    let success = bits[0].is_some() && bits.iter().all(|&b| b == bits[0]);
    let nodes = bits
        .iter()
        .map(|b| if b.is_some() { NodeClass::Gray } else { NodeClass::Orange })
        .collect();
    let edges = g
        .edges()
        .iter()
        .map(|&(u, v)| match (bits[u], bits[v]) {
            (Some(a), Some(b)) if a == b => EdgeClass::Green,
            _ => EdgeClass::Red,
        })
        .collect();
    TaskScore::binary(success, nodes, edges)
}
