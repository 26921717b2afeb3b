//! Plain-text edge-list exchange format:
//!
//! ```text
//! n 4
//! 0 1
//! 0 2
//! 1 3
//! ```
//!
//! Pairs are written sorted so files diff cleanly. Blank lines and lines
//! starting with `#` are ignored on input.

use std::fmt::Write as _;

use super::graph::Graph;
use super::TopologyError;

/// Largest node count accepted from a file.
pub const MAX_FILE_NODES: usize = 1 << 20;

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.node_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph, TopologyError> {
    let err = |line: usize, message: String| TopologyError::Parse { line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["n", count] => count
            .parse::<usize>()
            .map_err(|e| err(hline, format!("bad node count: {e}")))?,
        _ => return Err(err(hline, format!("expected `n <count>`, got `{header}`"))),
    };
    if n > MAX_FILE_NODES {
        return Err(err(hline, format!("node count {n} exceeds {MAX_FILE_NODES}")));
    }

    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let mut parts = line.split_whitespace();
        let (Some(u), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(lineno, format!("expected `u v`, got `{line}`")));
        };
        let u = u.parse().map_err(|e| err(lineno, format!("bad node `{u}`: {e}")))?;
        let v = v.parse().map_err(|e| err(lineno, format!("bad node `{v}`: {e}")))?;
        edges.push((u, v));
    }
    Graph::from_edges(n, edges)
}
