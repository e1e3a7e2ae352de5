//! Configuration-graphs (point-level matchings) and their multigraph projection.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::degseq::DegreeSequence;
use crate::{Error, Result};

const UNMATCHED: u32 = u32::MAX;

/// Point `copy` of vertex `vertex`, both 0-based. Displayed 1-based as `i.p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub vertex: u32,
    pub copy: u32,
}

impl Point {
    pub const fn new(vertex: u32, copy: u32) -> Self {
        Point { vertex, copy }
    }
}

impl core::fmt::Display for Point {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}.{}", self.vertex + 1, self.copy + 1)
    }
}

/// An unordered point pair, stored with the smaller point first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(Point, Point);

impl Edge {
    pub fn new(p: Point, q: Point) -> Self {
        if p <= q {
            Edge(p, q)
        } else {
            Edge(q, p)
        }
    }

    pub fn first(&self) -> Point {
        self.0
    }

    pub fn second(&self) -> Point {
        self.1
    }

    pub fn points(&self) -> [Point; 2] {
        [self.0, self.1]
    }

    pub fn contains(&self, p: Point) -> bool {
        self.0 == p || self.1 == p
    }

    pub fn touches_vertex(&self, v: u32) -> bool {
        self.0.vertex == v || self.1.vertex == v
    }

    /// The endpoint other than `p`, if `p` is an endpoint.
    pub fn other(&self, p: Point) -> Option<Point> {
        if self.0 == p {
            Some(self.1)
        } else if self.1 == p {
            Some(self.0)
        } else {
            None
        }
    }

    /// Endpoint vertices, smaller first.
    pub fn vertices(&self) -> (u32, u32) {
        let (u, v) = (self.0.vertex, self.1.vertex);
        if u <= v {
            (u, v)
        } else {
            (v, u)
        }
    }
}

impl core::fmt::Display for Edge {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// Small / large / mixed, relative to a cut degree `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    Small,
    Large,
    Mixed,
}

pub fn classify_degrees(du: u32, dv: u32, k: u32) -> EdgeClass {
    match (du <= k, dv <= k) {
        (true, true) => EdgeClass::Small,
        (false, false) => EdgeClass::Large,
        _ => EdgeClass::Mixed,
    }
}

/// A partial or perfect matching of points with no intra-vertex pairs.
///
/// Points are addressed either as [`Point`] or by a global index in
/// `0..Σd_i` (vertex-major). Equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConfigGraph {
    degrees: DegreeSequence,
    offsets: Vec<u32>,
    mate: Vec<u32>,
}

impl ConfigGraph {
    /// The empty matching on the points of `d`.
    pub fn empty(d: DegreeSequence) -> Self {
        let mut offsets = Vec::with_capacity(d.n() + 1);
        let mut acc = 0u32;
        offsets.push(0);
        for &x in d.degrees() {
            acc += x;
            offsets.push(acc);
        }
        ConfigGraph { degrees: d, offsets, mate: vec![UNMATCHED; acc as usize] }
    }

    /// Builds a graph from point pairs, validating each.
    pub fn from_edges<I: IntoIterator<Item = (Point, Point)>>(d: DegreeSequence, edges: I) -> Result<Self> {
        let mut g = Self::empty(d);
        for (p, q) in edges {
            g.add_edge(p, q)?;
        }
        Ok(g)
    }

    /// Builds a graph from a raw mate array (global indices, `u32::MAX` = unmatched).
    pub fn from_mates(d: DegreeSequence, mates: Vec<u32>) -> Result<Self> {
        let mut g = Self::empty(d);
        if mates.len() != g.mate.len() {
            return Err(Error::InvalidEdge("mate array has the wrong length".into()));
        }
        for (i, &j) in mates.iter().enumerate() {
            if j == UNMATCHED {
                continue;
            }
            let ju = j as usize;
            if ju >= mates.len() || mates[ju] != i as u32 {
                return Err(Error::InvalidEdge(format!("mate array not symmetric at {i}")));
            }
            if g.vertex_of(i) == g.vertex_of(ju) {
                return Err(Error::InvalidEdge(format!("intra-vertex pair at {i}")));
            }
        }
        g.mate = mates;
        Ok(g)
    }

    pub fn degree_sequence(&self) -> &DegreeSequence {
        &self.degrees
    }

    pub fn point_count(&self) -> usize {
        self.mate.len()
    }

    /// Raw mate array (global indices).
    pub fn mates(&self) -> &[u32] {
        &self.mate
    }

    /// Global index of the first point of vertex `v`.
    pub fn offset(&self, v: usize) -> usize {
        self.offsets[v] as usize
    }

    pub fn index_of(&self, p: Point) -> Result<usize> {
        let v = p.vertex as usize;
        if v >= self.degrees.n() || p.copy >= self.degrees.degree(v) {
            return Err(Error::NoSuchPoint(p.to_string()));
        }
        Ok(self.offsets[v] as usize + p.copy as usize)
    }

    /// Vertex owning the global index `i`.
    pub fn vertex_of(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o as usize <= i) - 1
    }

    pub fn point_at(&self, i: usize) -> Point {
        let v = self.vertex_of(i);
        Point::new(v as u32, (i - self.offsets[v] as usize) as u32)
    }

    pub fn mate(&self, p: Point) -> Option<Point> {
        let i = self.index_of(p).ok()?;
        match self.mate[i] {
            UNMATCHED => None,
            j => Some(self.point_at(j as usize)),
        }
    }

    pub fn is_matched(&self, p: Point) -> bool {
        self.mate(p).is_some()
    }

    pub fn add_edge(&mut self, p: Point, q: Point) -> Result<()> {
        let i = self.index_of(p)?;
        let j = self.index_of(q)?;
        if p.vertex == q.vertex {
            return Err(Error::InvalidEdge(format!("{p}-{q} joins a vertex to itself")));
        }
        if self.mate[i] != UNMATCHED || self.mate[j] != UNMATCHED {
            return Err(Error::InvalidEdge(format!("{p}-{q} reuses a matched point")));
        }
        self.mate[i] = j as u32;
        self.mate[j] = i as u32;
        Ok(())
    }

    pub fn remove_edge(&mut self, e: Edge) -> Result<()> {
        if !self.contains_edge(e) {
            return Err(Error::EdgeAbsent(e.to_string()));
        }
        let i = self.index_of(e.first())?;
        let j = self.index_of(e.second())?;
        self.mate[i] = UNMATCHED;
        self.mate[j] = UNMATCHED;
        Ok(())
    }

    pub(crate) fn add_pair_unchecked(&mut self, i: usize, j: usize) {
        self.mate[i] = j as u32;
        self.mate[j] = i as u32;
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.mate(e.first()) == Some(e.second())
    }

    /// All matched pairs, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.mate.len() / 2);
        for (i, &j) in self.mate.iter().enumerate() {
            if j != UNMATCHED && (i as u32) < j {
                out.push(Edge::new(self.point_at(i), self.point_at(j as usize)));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.mate.iter().filter(|&&j| j != UNMATCHED).count() / 2
    }

    pub fn is_complete(&self) -> bool {
        self.mate.iter().all(|&j| j != UNMATCHED)
    }

    /// Number of matched points of vertex `v`.
    pub fn matched_degree(&self, v: usize) -> u32 {
        let (lo, hi) = (self.offsets[v] as usize, self.offsets[v + 1] as usize);
        self.mate[lo..hi].iter().filter(|&&j| j != UNMATCHED).count() as u32
    }

    /// Unmatched points of vertex `v`.
    pub fn free_points(&self, v: usize) -> Vec<Point> {
        let lo = self.offsets[v] as usize;
        let hi = self.offsets[v + 1] as usize;
        (lo..hi).filter(|&i| self.mate[i] == UNMATCHED).map(|i| self.point_at(i)).collect()
    }

    /// Contracts each vertex's points into a single vertex.
    pub fn project(&self) -> MultiGraph {
        let mut g = MultiGraph::new(self.degrees.n());
        for e in self.edges() {
            let (u, v) = e.vertices();
            g.edges.push((u, v));
        }
        g.edges.sort_unstable();
        g
    }

    /// Edges whose endpoint vertices both have (target) degree at most `k`.
    pub fn small_edge_count(&self, k: u32) -> usize {
        self.edges()
            .iter()
            .filter(|e| {
                self.degrees.degree(e.first().vertex as usize) <= k
                    && self.degrees.degree(e.second().vertex as usize) <= k
            })
            .count()
    }

    pub fn classify_edge(&self, e: Edge, k: u32) -> Result<EdgeClass> {
        if !self.contains_edge(e) {
            return Err(Error::EdgeAbsent(e.to_string()));
        }
        let du = self.degrees.degree(e.first().vertex as usize);
        let dv = self.degrees.degree(e.second().vertex as usize);
        Ok(classify_degrees(du, dv, k))
    }

    /// Matched partners lying outside `s` of the points in `s` (point level).
    pub fn neighbors(&self, s: &[Point]) -> BTreeSet<Point> {
        let set: BTreeSet<Point> = s.iter().copied().collect();
        let mut out = BTreeSet::new();
        for &p in s {
            if let Some(q) = self.mate(p) {
                if !set.contains(&q) {
                    out.insert(q);
                }
            }
        }
        out
    }

    /// All points of the given vertices.
    pub fn points_of(&self, vertices: &[u32]) -> Vec<Point> {
        let mut out = Vec::new();
        for &v in vertices {
            for c in 0..self.degrees.degree(v as usize) {
                out.push(Point::new(v, c));
            }
        }
        out
    }
}

impl core::fmt::Display for ConfigGraph {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (i, e) in self.edges().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A loopless multigraph on vertices `0..n`; edges stored sorted as `(u, v)`, `u < v`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph { n, edges: Vec::new() }
    }

    pub fn from_edges<I: IntoIterator<Item = (u32, u32)>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        g.edges.sort_unstable();
        Ok(g)
    }

    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<()> {
        if u == v {
            return Err(Error::InvalidEdge(format!("loop at vertex {}", u + 1)));
        }
        if u as usize >= self.n || v as usize >= self.n {
            return Err(Error::InvalidEdge(format!("vertex out of range in {}-{}", u + 1, v + 1)));
        }
        let e = if u < v { (u, v) } else { (v, u) };
        let pos = self.edges.partition_point(|x| *x < e);
        self.edges.insert(pos, e);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.n];
        for &(u, v) in &self.edges {
            d[u as usize] += 1;
            d[v as usize] += 1;
        }
        d
    }

    pub fn multiplicity(&self, u: u32, v: u32) -> usize {
        let e = if u < v { (u, v) } else { (v, u) };
        let lo = self.edges.partition_point(|x| *x < e);
        let hi = self.edges.partition_point(|x| *x <= e);
        hi - lo
    }

    pub fn is_simple(&self) -> bool {
        self.edges.windows(2).all(|w| w[0] != w[1])
    }

    /// Edges whose endpoints both have degree at most `k` in this graph.
    pub fn small_edge_count(&self, k: u32) -> usize {
        let d = self.degrees();
        self.edges.iter().filter(|&&(u, v)| d[u as usize] <= k && d[v as usize] <= k).count()
    }

    /// Image under the vertex map `v -> perm[v]`.
    pub fn relabel(&self, perm: &[u32]) -> MultiGraph {
        let mut edges: Vec<(u32, u32)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u as usize], perm[v as usize]);
                if a < b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        edges.sort_unstable();
        MultiGraph { n: self.n, edges }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn empty_projection() {
        let d = DegreeSequence::new(vec![1, 1]).unwrap();
        let g = ConfigGraph::empty(d);
        assert_eq!(g.project().edge_count(), 0);
        assert_eq!(g.small_edge_count(1), 0);
        assert!(g.neighbors(&[Point::new(0, 0)]).is_empty());
    }

    #[test]
    fn pair_projection_and_counts() {
        let f = fixtures::counterexample_pair();
        let p = f.g_plus.project();
        assert!(p.is_simple());
        assert_eq!(p.edge_count(), 10);
        let mut deg = p.degrees();
        deg.sort_unstable();
        assert_eq!(deg, vec![2, 2, 2, 2, 2, 3, 3, 4]);
        assert_eq!(f.g_plus.small_edge_count(2), 2);
        assert_eq!(f.g_minus.small_edge_count(2), 1);
        assert_eq!(p.small_edge_count(2), 2);
    }

    #[test]
    fn pair_classification() {
        let f = fixtures::counterexample_pair();
        let xy = Edge::new(f.x, f.y);
        assert_eq!(f.g_plus.classify_edge(xy, 2).unwrap(), EdgeClass::Large);
        let b2 = Point::new(fixtures::PAIR_B, 1);
        let bv2 = Edge::new(b2, f.g_plus.mate(b2).unwrap());
        assert_eq!(f.g_plus.classify_edge(bv2, 2).unwrap(), EdgeClass::Mixed);
        for e in f.g_plus.edges() {
            assert_eq!(f.g_plus.classify_edge(e, 4).unwrap(), EdgeClass::Small);
        }
        let ax = Edge::new(f.a, f.x);
        assert!(f.g_plus.classify_edge(ax, 2).is_err());
    }

    #[test]
    fn pair_neighbors() {
        let f = fixtures::counterexample_pair();
        let s = f.g_plus.points_of(&[fixtures::PAIR_A, fixtures::PAIR_B, fixtures::PAIR_X, fixtures::PAIR_Y]);
        let n = f.g_plus.neighbors(&s);
        assert_eq!(n.len(), 6);
        assert!(n.iter().all(|p| ![fixtures::PAIR_A, fixtures::PAIR_B, fixtures::PAIR_X, fixtures::PAIR_Y].contains(&p.vertex)));
        let all: Vec<Point> = (0..f.g_plus.point_count()).map(|i| f.g_plus.point_at(i)).collect();
        assert!(f.g_plus.neighbors(&all).is_empty());
    }

    #[test]
    fn parallel_edges_survive_projection() {
        let d = DegreeSequence::new(vec![2, 2]).unwrap();
        let g = ConfigGraph::from_edges(
            d,
            [(Point::new(0, 0), Point::new(1, 0)), (Point::new(0, 1), Point::new(1, 1))],
        )
        .unwrap();
        let p = g.project();
        assert_eq!(p.multiplicity(0, 1), 2);
        assert!(!p.is_simple());
    }

    #[test]
    fn rejects_bad_pairs() {
        let d = DegreeSequence::new(vec![2, 2]).unwrap();
        let mut g = ConfigGraph::empty(d);
        assert!(g.add_edge(Point::new(0, 0), Point::new(0, 1)).is_err());
        assert!(g.add_edge(Point::new(0, 2), Point::new(1, 1)).is_err());
        g.add_edge(Point::new(0, 0), Point::new(1, 0)).unwrap();
        assert!(g.add_edge(Point::new(0, 0), Point::new(1, 1)).is_err());
    }
}
