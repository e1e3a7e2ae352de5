//! Random generators: the standard and relaxed processes, the configuration
//! model and uniform simple graphs by rejection.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::confgraph::{ConfigGraph, Edge, MultiGraph, Point};
use crate::degseq::DegreeSequence;
use crate::exact::{EdgeSequence, Variant};
use crate::{Error, Result};

/// Default retry budget for conditioned runs.
pub const DEFAULT_MAX_RETRIES: u64 = 1000;

/// Rejection attempts before the standard process lists `Q` explicitly.
const PAIR_REJECTIONS: usize = 32;

/// Outcome of one process run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub graph: ConfigGraph,
    pub trajectory: EdgeSequence,
    pub completed: bool,
    pub steps: usize,
}

impl RunResult {
    /// `X_k` of the (possibly partial) output.
    pub fn small_edge_count(&self, k: u32) -> usize {
        let d = self.graph.degree_sequence();
        self.trajectory
            .edges()
            .iter()
            .filter(|e| d.degree(e.first().vertex as usize) <= k && d.degree(e.second().vertex as usize) <= k)
            .count()
    }
}

/// Swap-remove set of vertex indices.
struct IndexSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

impl IndexSet {
    fn new(n: usize, members: impl Iterator<Item = u32>) -> Self {
        let mut s = IndexSet { items: Vec::new(), pos: vec![u32::MAX; n] };
        for v in members {
            s.pos[v as usize] = s.items.len() as u32;
            s.items.push(v);
        }
        s
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn remove(&mut self, v: u32) {
        let i = self.pos[v as usize] as usize;
        let last = *self.items.last().expect("non-empty");
        self.items.swap_remove(i);
        if last != v {
            self.pos[last as usize] = i as u32;
        }
        self.pos[v as usize] = u32::MAX;
    }

    /// Uniform ordered pair of distinct members.
    fn distinct_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, u32) {
        let l = self.items.len();
        let i = rng.gen_range(0..l);
        let mut j = rng.gen_range(0..l - 1);
        if j >= i {
            j += 1;
        }
        (self.items[i], self.items[j])
    }
}

/// Relaxed process: uniform pair of distinct unsaturated vertices, then a
/// uniform free point in each. Multi-edges allowed, loops impossible.
pub fn run_relaxed<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> RunResult {
    let n = d.n();
    let mut graph = ConfigGraph::empty(d.clone());
    let mut residual: Vec<u32> = d.degrees().to_vec();
    // free copies of v live in free[off[v] .. off[v] + residual[v]]
    let mut free: Vec<u32> = Vec::with_capacity(graph.point_count());
    for &x in d.degrees() {
        free.extend(0..x);
    }
    let mut unsat = IndexSet::new(n, (0..n as u32).filter(|&v| d.degree(v as usize) > 0));
    let mut trajectory = EdgeSequence::new(Vec::with_capacity(d.m() as usize));
    while unsat.len() >= 2 {
        let (u, v) = unsat.distinct_pair(rng);
        let mut take = |w: u32, rng: &mut R| -> Point {
            let off = graph.offset(w as usize);
            let r = residual[w as usize] as usize;
            let i = rng.gen_range(0..r);
            free.swap(off + i, off + r - 1);
            residual[w as usize] -= 1;
            Point::new(w, free[off + r - 1])
        };
        let pu = take(u, rng);
        let pv = take(v, rng);
        let (iu, iv) = (graph.offset(u as usize) + pu.copy as usize, graph.offset(v as usize) + pv.copy as usize);
        graph.add_pair_unchecked(iu, iv);
        trajectory.push(Edge::new(pu, pv));
        for w in [u, v] {
            if residual[w as usize] == 0 {
                unsat.remove(w);
            }
        }
    }
    let steps = trajectory.len();
    RunResult { completed: unsat.len() == 0, graph, trajectory, steps }
}

/// Standard process: uniform over `Q_i`, the non-adjacent pairs of
/// unsaturated vertices. Copies are assigned in order of use.
pub fn run_standard<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> RunResult {
    let n = d.n();
    let mut graph = ConfigGraph::empty(d.clone());
    let mut used = vec![0u32; n];
    let mut adj: Vec<Vec<u32>> = d.degrees().iter().map(|&x| Vec::with_capacity(x as usize)).collect();
    let mut unsat = IndexSet::new(n, (0..n as u32).filter(|&v| d.degree(v as usize) > 0));
    let mut trajectory = EdgeSequence::new(Vec::with_capacity(d.m() as usize));
    loop {
        if unsat.len() < 2 {
            break;
        }
        let mut chosen = None;
        for _ in 0..PAIR_REJECTIONS {
            let (u, v) = unsat.distinct_pair(rng);
            if !adj[u as usize].contains(&v) {
                chosen = Some((u, v));
                break;
            }
        }
        if chosen.is_none() {
            let items = &unsat.items;
            let mut q = Vec::new();
            for i in 0..items.len() {
                for j in (i + 1)..items.len() {
                    if !adj[items[i] as usize].contains(&items[j]) {
                        q.push((items[i], items[j]));
                    }
                }
            }
            if q.is_empty() {
                break;
            }
            chosen = Some(q[rng.gen_range(0..q.len())]);
        }
        let (u, v) = chosen.expect("pair chosen");
        let pu = Point::new(u, used[u as usize]);
        let pv = Point::new(v, used[v as usize]);
        graph.add_pair_unchecked(
            graph.offset(u as usize) + pu.copy as usize,
            graph.offset(v as usize) + pv.copy as usize,
        );
        trajectory.push(Edge::new(pu, pv));
        adj[u as usize].push(v);
        adj[v as usize].push(u);
        for w in [u, v] {
            used[w as usize] += 1;
            if used[w as usize] == d.degree(w as usize) {
                unsat.remove(w);
            }
        }
    }
    let steps = trajectory.len();
    RunResult { completed: unsat.len() == 0, graph, trajectory, steps }
}

pub fn run<R: Rng + ?Sized>(d: &DegreeSequence, variant: Variant, rng: &mut R) -> RunResult {
    match variant {
        Variant::Standard => run_standard(d, rng),
        Variant::Relaxed => run_relaxed(d, rng),
    }
}

/// A completed run and the number of attempts it took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionedRun {
    pub result: RunResult,
    pub attempts: u64,
}

/// Re-runs the process until it completes.
pub fn run_conditioned<R: Rng + ?Sized>(
    d: &DegreeSequence,
    variant: Variant,
    max_retries: u64,
    rng: &mut R,
) -> Result<ConditionedRun> {
    if d.degree_sum() % 2 == 1 {
        return Err(Error::InvalidDegrees("odd degree sum".into()));
    }
    for attempt in 1..=max_retries {
        let r = run(d, variant, rng);
        if r.completed {
            return Ok(ConditionedRun { result: r, attempts: attempt });
        }
    }
    Err(Error::RetriesExhausted(max_retries))
}

/// A uniform pairing of all points; loops and multi-edges are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    degrees: DegreeSequence,
    pairs: Vec<(u32, u32)>,
}

impl Pairing {
    /// Vertex pairs `(u, v)` with `u <= v`; `u == v` is a loop.
    pub fn vertex_pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn degrees(&self) -> &DegreeSequence {
        &self.degrees
    }

    pub fn loop_count(&self) -> usize {
        self.pairs.iter().filter(|(u, v)| u == v).count()
    }

    pub fn small_edge_count(&self, k: u32) -> usize {
        self.pairs
            .iter()
            .filter(|&&(u, v)| self.degrees.degree(u as usize) <= k && self.degrees.degree(v as usize) <= k)
            .count()
    }

    /// The projected multigraph, if loop-free.
    pub fn to_multigraph(&self) -> Option<MultiGraph> {
        MultiGraph::from_edges(self.degrees.n(), self.pairs.iter().copied()).ok()
    }
}

/// Uniform perfect matching of all `2m` points.
pub fn sample_config_model<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Result<Pairing> {
    if d.degree_sum() % 2 == 1 {
        return Err(Error::InvalidDegrees("odd degree sum".into()));
    }
    let mut owner: Vec<u32> = Vec::with_capacity(d.degree_sum() as usize);
    for (v, &x) in d.degrees().iter().enumerate() {
        owner.extend(std::iter::repeat_n(v as u32, x as usize));
    }
    let len = owner.len();
    for i in (1..len).rev() {
        let j = rng.gen_range(0..=i);
        owner.swap(i, j);
    }
    let pairs = owner
        .chunks_exact(2)
        .map(|c| if c[0] <= c[1] { (c[0], c[1]) } else { (c[1], c[0]) })
        .collect();
    Ok(Pairing { degrees: d.clone(), pairs })
}

/// A simple graph drawn uniformly, with the number of pairings tried.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformSample {
    pub graph: MultiGraph,
    pub attempts: u64,
}

/// Reusable state for rejection sampling of uniform simple graphs.
///
/// Each attempt builds a uniform pairing point by point and aborts at the
/// first loop or repeated edge. Points are taken in a fixed order
/// (highest-degree vertices first) and each is paired with a uniform
/// remaining point, so completed attempts are uniform pairings; accepting the
/// simple ones gives the uniform simple graph.
pub struct UniformSampler {
    degrees: DegreeSequence,
    owner: Vec<u32>,
    order: Vec<u32>,
    pool: Vec<u32>,
    pos: Vec<u32>,
    stamp: Vec<u32>,
    generation: u32,
    adj: Vec<Vec<u32>>,
    touched: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl UniformSampler {
    pub fn new(d: &DegreeSequence) -> Result<Self> {
        if !d.is_graphic() {
            return Err(Error::InvalidDegrees("sequence is not graphic".into()));
        }
        let mut owner = Vec::with_capacity(d.degree_sum() as usize);
        for (v, &x) in d.degrees().iter().enumerate() {
            owner.extend(std::iter::repeat_n(v as u32, x as usize));
        }
        let len = owner.len();
        let mut order: Vec<u32> = (0..len as u32).collect();
        order.sort_by_key(|&p| (core::cmp::Reverse(d.degree(owner[p as usize] as usize)), p));
        Ok(UniformSampler {
            degrees: d.clone(),
            owner,
            order,
            pool: (0..len as u32).collect(),
            pos: (0..len as u32).collect(),
            stamp: vec![0; len],
            generation: 0,
            adj: vec![Vec::new(); d.n()],
            touched: Vec::new(),
            edges: Vec::new(),
        })
    }

    fn take(&mut self, p: u32, live: &mut usize) {
        let i = self.pos[p as usize] as usize;
        let last = self.pool[*live - 1];
        self.pool.swap(i, *live - 1);
        self.pos[last as usize] = i as u32;
        self.pos[p as usize] = (*live - 1) as u32;
        *live -= 1;
        self.stamp[p as usize] = self.generation;
    }

    fn attempt<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = u32::MAX);
            self.generation = 1;
        }
        for &v in &self.touched {
            self.adj[v as usize].clear();
        }
        self.touched.clear();
        self.edges.clear();
        let mut live = self.pool.len();
        let mut cursor = 0usize;
        while live > 0 {
            while self.stamp[self.order[cursor] as usize] == self.generation {
                cursor += 1;
            }
            let p = self.order[cursor];
            self.take(p, &mut live);
            let q = self.pool[rng.gen_range(0..live)];
            self.take(q, &mut live);
            let (u, v) = (self.owner[p as usize], self.owner[q as usize]);
            if u == v || self.adj[u as usize].contains(&v) {
                return false;
            }
            for (a, b) in [(u, v), (v, u)] {
                if self.adj[a as usize].is_empty() {
                    self.touched.push(a);
                }
                self.adj[a as usize].push(b);
            }
            self.edges.push(if u < v { (u, v) } else { (v, u) });
        }
        true
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, max_retries: u64, rng: &mut R) -> Result<UniformSample> {
        for attempt in 1..=max_retries {
            if self.attempt(rng) {
                let graph = MultiGraph::from_edges(self.degrees.n(), self.edges.iter().copied())?;
                return Ok(UniformSample { graph, attempts: attempt });
            }
        }
        Err(Error::RetriesExhausted(max_retries))
    }
}

/// One uniform simple graph with degree sequence `d`.
pub fn sample_uniform_simple<R: Rng + ?Sized>(d: &DegreeSequence, max_retries: u64, rng: &mut R) -> Result<UniformSample> {
    UniformSampler::new(d)?.sample(max_retries, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    fn ds(v: &[u32]) -> DegreeSequence {
        DegreeSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_edge_is_forced() {
        let d = ds(&[1, 1]);
        for s in 0..20 {
            let mut r = trial_rng(s, 0);
            let a = run_relaxed(&d, &mut r);
            assert!(a.completed);
            assert_eq!(a.steps, 1);
            let b = run_standard(&d, &mut r);
            assert!(b.completed);
            let u = sample_uniform_simple(&d, 10, &mut r).unwrap();
            assert_eq!(u.graph.edges(), &[(0, 1)]);
            let c = sample_config_model(&d, &mut r).unwrap();
            assert_eq!(c.vertex_pairs(), &[(0, 1)]);
        }
    }

    #[test]
    fn perfect_matchings_always_complete() {
        let d = ds(&[1, 1, 1, 1]);
        for s in 0..200 {
            assert!(run_standard(&d, &mut trial_rng(s, 1)).completed);
        }
    }

    #[test]
    fn standard_can_get_stuck() {
        let d = ds(&[2, 2, 2, 2]);
        let stuck = (0..500).filter(|&s| !run_standard(&d, &mut trial_rng(s, 2)).completed).count();
        assert!(stuck > 0);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let d = ds(&[3, 3, 2, 2, 2, 1, 1]);
        let a = run_relaxed(&d, &mut trial_rng(5, 9));
        let b = run_relaxed(&d, &mut trial_rng(5, 9));
        assert_eq!(a, b);
        let c = run_standard(&d, &mut trial_rng(5, 9));
        let e = run_standard(&d, &mut trial_rng(5, 9));
        assert_eq!(c, e);
    }

    #[test]
    fn conditioned_four_cycles() {
        let d = ds(&[2, 2, 2, 2]);
        let mut seen = alloc::collections::BTreeSet::new();
        for s in 0..300 {
            let r = run_conditioned(&d, Variant::Standard, 100, &mut trial_rng(s, 3)).unwrap();
            assert!(r.result.completed);
            let g = r.result.graph.project();
            assert!(g.is_simple());
            seen.insert(g);
        }
        assert_eq!(seen.len(), 3);
    }
}
