//! Text formats for degree sequences, configuration-graphs and edge lists.

use std::fmt::Write as _;

use degproc::{ConfigGraph, DegreeSequence, MultiGraph, Point};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> LabError {
    LabError::Parse { line, msg: msg.into() }
}

fn parse_degree_tokens(s: &str, line: usize) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        if let Some((j, c)) = tok.split_once(':') {
            let j: u32 = j.parse().map_err(|_| parse_err(line, format!("bad degree `{j}`")))?;
            let c: usize = c.parse().map_err(|_| parse_err(line, format!("bad count `{c}`")))?;
            out.extend(std::iter::repeat_n(j, c));
        } else {
            out.push(tok.parse().map_err(|_| parse_err(line, format!("bad degree `{tok}`")))?);
        }
    }
    Ok(out)
}

/// Whitespace-separated degrees, or `j:count` blocks, or a mix of both.
pub fn parse_degrees(s: &str) -> Result<DegreeSequence> {
    Ok(DegreeSequence::new(parse_degree_tokens(s, 1)?)?)
}

/// Same as [`parse_degrees`] but admits zero degrees.
pub fn parse_degrees_lenient(s: &str) -> Result<DegreeSequence> {
    Ok(DegreeSequence::new_lenient(parse_degree_tokens(s, 1)?)?)
}

/// `j:count` blocks in increasing `j`.
pub fn format_degrees_compact(d: &DegreeSequence) -> String {
    let mut s = String::new();
    for (j, c) in d.degree_counts() {
        if !s.is_empty() {
            s.push(' ');
        }
        let _ = write!(s, "{j}:{c}");
    }
    s
}

/// `i.p` with 1-based vertex and copy.
pub fn parse_point(tok: &str, line: usize) -> Result<Point> {
    let (v, c) = tok.split_once('.').ok_or_else(|| parse_err(line, format!("bad point `{tok}`")))?;
    let v: u32 = v.trim().parse().map_err(|_| parse_err(line, format!("bad vertex in `{tok}`")))?;
    let c: u32 = c.trim().parse().map_err(|_| parse_err(line, format!("bad copy in `{tok}`")))?;
    if v == 0 || c == 0 {
        return Err(parse_err(line, format!("points are 1-based: `{tok}`")));
    }
    Ok(Point::new(v - 1, c - 1))
}

fn content_lines(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// A `degrees:` header followed by one `i.p-j.q` edge per line; `#` starts a comment.
pub fn parse_config_graph(s: &str) -> Result<ConfigGraph> {
    let mut lines = content_lines(s);
    let (l0, head) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let degs = head.strip_prefix("degrees:").ok_or_else(|| parse_err(l0, "expected `degrees:` header"))?;
    let d = DegreeSequence::new(parse_degree_tokens(degs, l0)?)?;
    let mut g = ConfigGraph::empty(d);
    for (ln, l) in lines {
        let (p, q) = l.split_once('-').ok_or_else(|| parse_err(ln, format!("bad edge `{l}`")))?;
        let (p, q) = (parse_point(p.trim(), ln)?, parse_point(q.trim(), ln)?);
        g.add_edge(p, q).map_err(|e| parse_err(ln, e.to_string()))?;
    }
    Ok(g)
}

pub fn write_config_graph(g: &ConfigGraph) -> String {
    let mut s = format!("degrees: {}\n", g.degree_sequence());
    for e in g.edges() {
        let _ = writeln!(s, "{e}");
    }
    s
}

/// `n <count>` header then one `u v` pair (1-based) per line.
pub fn parse_edge_list(s: &str) -> Result<MultiGraph> {
    let mut lines = content_lines(s);
    let (l0, head) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let n: usize = head
        .strip_prefix('n')
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| parse_err(l0, "expected `n <count>` header"))?;
    let mut g = MultiGraph::new(n);
    for (ln, l) in lines {
        let mut it = l.split_whitespace().map(|t| t.parse::<u32>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) if u >= 1 && v >= 1 => {
                g.add_edge(u - 1, v - 1).map_err(|e| parse_err(ln, e.to_string()))?
            }
            _ => return Err(parse_err(ln, format!("bad edge `{l}`"))),
        }
    }
    Ok(g)
}

pub fn write_edge_list(g: &MultiGraph) -> String {
    let mut s = format!("n {}\n", g.n());
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "{} {}", u + 1, v + 1);
    }
    s
}

/// One graph sample per JSON line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub n: usize,
    /// 1-based vertex pairs.
    pub edges: Vec<(u32, u32)>,
}

impl GraphRecord {
    pub fn new(label: Option<&str>, g: &MultiGraph) -> Self {
        GraphRecord { label: label.map(str::to_owned), n: g.n(), edges: g.edges().iter().map(|&(u, v)| (u + 1, v + 1)).collect() }
    }

    pub fn to_graph(&self) -> Result<MultiGraph> {
        if self.edges.iter().any(|&(u, v)| u == 0 || v == 0) {
            return Err(LabError::InvalidArgument("graph records use 1-based vertices".into()));
        }
        Ok(MultiGraph::from_edges(self.n, self.edges.iter().map(|&(u, v)| (u - 1, v - 1)))?)
    }
}

pub fn read_graph_records(s: &str) -> Result<Vec<GraphRecord>> {
    s.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| parse_err(i + 1, e.to_string())))
        .collect()
}
