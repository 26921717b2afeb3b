use std::fmt::Write as _;

use crate::tasks::TaskScore;
use crate::topology::Graph;

/// Renders `g` as an undirected DOT graph with node fills and edge colors
/// taken from `score`. Nodes and edges are emitted in ID / sorted-pair order.
pub fn export_dot(g: &Graph, score: &TaskScore) -> String {
    let mut out = String::from("graph outcome {\n");
    out.push_str("  node [shape=circle, style=filled];\n");
    for u in g.nodes() {
        let fill = score.node_classes.get(u).map_or("gray", |c| c.name());
        let _ = writeln!(out, "  {u} [fillcolor={fill}];");
    }
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let color = score.edge_classes.get(i).map_or("gray", |c| c.name());
        let _ = writeln!(out, "  {u} -- {v} [color={color}];");
    }
    out.push_str("}\n");
    out
}
