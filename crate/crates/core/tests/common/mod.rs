//! Brute-force oracles and fixtures shared by the integration tests. Each
//! oracle works from first principles (adjacency matrices, bitmasks) and does
//! not call back into the library code it checks.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use topocoord::tasks::Answer;
use topocoord::topology::{Graph, Point};

pub fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

/// All-pairs shortest paths; `None` when some pair is unreachable.
pub fn floyd_warshall_diameter(g: &Graph) -> Option<usize> {
    let n = g.node_count();
    let inf = usize::MAX / 4;
    let adj = adjacency_matrix(g);
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                d[i][j] = 0;
            } else if adj[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let max = d.iter().flatten().copied().max().unwrap_or(0);
    (max < inf).then_some(max)
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn mask_connected(n: usize, pairs: &[(usize, usize)], mask: u32) -> bool {
    let mut reach = 1u32;
    loop {
        let mut next = reach;
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 && (reach >> u & 1 == 1 || reach >> v & 1 == 1) {
                next |= 1 << u | 1 << v;
            }
        }
        if next == reach {
            return reach == (1 << n) - 1;
        }
        reach = next;
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class of connected simple graphs on
/// `n` nodes, found by canonicalizing every labeled edge mask.
pub fn connected_graph_classes(n: usize) -> Vec<Graph> {
    let pairs = pairs(n);
    let index = |u: usize, v: usize| pairs.iter().position(|&p| p == (u.min(v), u.max(v))).unwrap();
    let relabel: Vec<Vec<usize>> = permutations(n)
        .iter()
        .map(|perm| pairs.iter().map(|&(u, v)| index(perm[u], perm[v])).collect())
        .collect();
    let mut classes = BTreeSet::new();
    for mask in 0u32..1 << pairs.len() {
        if !mask_connected(n, &pairs, mask) {
            continue;
        }
        let canonical = relabel
            .iter()
            .map(|map| {
                map.iter()
                    .enumerate()
                    .filter(|&(i, _)| mask >> i & 1 == 1)
                    .fold(0u32, |acc, (_, &j)| acc | 1 << j)
            })
            .min()
            .unwrap();
        classes.insert(canonical);
    }
    classes
        .into_iter()
        .map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e);
            Graph::from_edges(n, edges).unwrap()
        })
        .collect()
}

/// Matching inconsistency flags per agent, applying each rule separately.
/// Returns (rule-b-only flags, any-rule flags).
pub fn matching_oracle(g: &Graph, answers: &[Answer]) -> (Vec<bool>, Vec<bool>) {
    let n = g.node_count();
    let adj = adjacency_matrix(g);
    let pick = |u: usize| match &answers[u] {
        Answer::Partner(p) => Some(*p),
        _ => None,
    };
    let mut one_sided = vec![false; n];
    let mut bad = vec![false; n];
    for u in 0..n {
        let rule_a = matches!(pick(u), Some(Some(v)) if v >= n || !adj[u][v]);
        let rule_b = matches!(pick(u), Some(Some(v)) if v < n && adj[u][v] && pick(v) != Some(Some(u)));
        let rule_c = pick(u) == Some(None) && (0..n).any(|w| adj[u][w] && pick(w) == Some(None));
        let rule_d = pick(u).is_none();
        one_sided[u] = rule_b;
        bad[u] = rule_a || rule_b || rule_c || rule_d;
    }
    (one_sided, bad)
}

/// For each node in the cover bitmask, whether removing it keeps every edge
/// covered, by rechecking the whole edge list.
pub fn redundant_members(g: &Graph, cover: u32) -> Vec<bool> {
    let covers = |mask: u32| g.edges().iter().all(|&(u, v)| (mask >> u | mask >> v) & 1 == 1);
    (0..g.node_count())
        .map(|u| cover >> u & 1 == 1 && covers(cover & !(1 << u)))
        .collect()
}

/// Exact in-circle predicate: positive when `d` lies strictly inside the
/// circumcircle of the counter-clockwise triangle `a b c`.
pub fn in_circle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let orient = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let (a, b) = if orient < 0.0 { (b, a) } else { (a, b) };
    let row = |p: Point| {
        let (dx, dy) = (p.x - d.x, p.y - d.y);
        (dx, dy, dx * dx + dy * dy)
    };
    let (ax, ay, aw) = row(a);
    let (bx, by, bw) = row(b);
    let (cx, cy, cw) = row(c);
    ax * (by * cw - bw * cy) - ay * (bx * cw - bw * cx) + aw * (bx * cy - by * cx)
}

/// Canned reply for the mock chat endpoint.
#[derive(Debug, Clone)]
pub struct MockReply {
    pub content: String,
    pub usage: Option<(u64, u64)>,
    pub status: u16,
}

impl MockReply {
    pub fn ok(content: &str, usage: Option<(u64, u64)>) -> Self {
        Self {
            content: content.to_string(),
            usage,
            status: 200,
        }
    }
}

/// Minimal HTTP/1.1 server answering every POST with an OpenAI-style chat
/// completion body. Returns the endpoint URL and a request counter.
pub fn spawn_mock_chat(reply: MockReply) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = Arc::clone(&hits);
    let mut body = serde_json::json!({
        "id": "mock",
        "object": "chat.completion",
        "choices": [{"index": 0, "message": {"role": "assistant", "content": reply.content}}],
    });
    if let Some((p, c)) = reply.usage {
        body["usage"] = serde_json::json!({
            "prompt_tokens": p, "completion_tokens": c, "total_tokens": p + c
        });
    }
    let body = body.to_string();
    let status = reply.status;
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let body = body.clone();
            let counter = Arc::clone(&counter);
            thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut length = 0usize;
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap_or(0) == 0 {
                        return;
                    }
                    let line = line.trim_end();
                    if line.is_empty() {
                        break;
                    }
                    if let Some((k, v)) = line.split_once(':') {
                        if k.eq_ignore_ascii_case("content-length") {
                            length = v.trim().parse().unwrap_or(0);
                        }
                    }
                }
                let mut request = vec![0u8; length];
                if reader.read_exact(&mut request).is_err() {
                    return;
                }
                counter.fetch_add(1, Ordering::SeqCst);
                let response = format!(
                    "HTTP/1.1 {status} MOCK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                    body.len(),
                    body
                );
                let _ = stream.write_all(response.as_bytes());
            });
        }
    });
    (url, hits)
}
