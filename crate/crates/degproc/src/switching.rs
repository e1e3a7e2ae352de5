//! Switchings, clusters, counterparts and twins, with brute-force verifiers.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::confgraph::{ConfigGraph, Edge, Point};
use crate::degseq::DegreeSequence;
use crate::exact::{self, saturation_time, EdgeSequence, SaturationTimes, ZEngine};
use crate::rational::{binom, int};
use crate::{Error, Result};

/// Anchor points `a, b, x, y` of a switching, in distinct vertices `A, B, X, Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SwitchAnchor {
    pub a: Point,
    pub b: Point,
    pub x: Point,
    pub y: Point,
}

impl SwitchAnchor {
    /// Validates distinct vertices and `deg(A), deg(B) ≤ k < deg(X), deg(Y)`.
    pub fn new(d: &DegreeSequence, k: u32, a: Point, b: Point, x: Point, y: Point) -> Result<Self> {
        let s = Self::for_degrees(d, a, b, x, y)?;
        let deg = |p: Point| d.degree(p.vertex as usize);
        if deg(a).max(deg(b)) > k || deg(x).min(deg(y)) <= k {
            return Err(Error::InvalidAnchor(format!("degrees do not straddle k={k}")));
        }
        Ok(s)
    }

    /// Validates distinct vertices and `max(deg A, deg B) < min(deg X, deg Y)`,
    /// i.e. that some cut degree makes the anchor valid.
    pub fn for_degrees(d: &DegreeSequence, a: Point, b: Point, x: Point, y: Point) -> Result<Self> {
        for p in [a, b, x, y] {
            if p.vertex as usize >= d.n() || p.copy >= d.degree(p.vertex as usize) {
                return Err(Error::NoSuchPoint(p.to_string()));
            }
        }
        let vs = [a.vertex, b.vertex, x.vertex, y.vertex];
        for i in 0..4 {
            for j in (i + 1)..4 {
                if vs[i] == vs[j] {
                    return Err(Error::InvalidAnchor("A, B, X, Y must be distinct".into()));
                }
            }
        }
        let deg = |p: Point| d.degree(p.vertex as usize);
        if deg(a).max(deg(b)) >= deg(x).min(deg(y)) {
            return Err(Error::InvalidAnchor("need max(deg A, deg B) < min(deg X, deg Y)".into()));
        }
        Ok(SwitchAnchor { a, b, x, y })
    }

    pub fn vertices(&self) -> [u32; 4] {
        [self.a.vertex, self.b.vertex, self.x.vertex, self.y.vertex]
    }

    pub fn ab(&self) -> Edge {
        Edge::new(self.a, self.b)
    }
    pub fn xy(&self) -> Edge {
        Edge::new(self.x, self.y)
    }
    pub fn ax(&self) -> Edge {
        Edge::new(self.a, self.x)
    }
    pub fn by(&self) -> Edge {
        Edge::new(self.b, self.y)
    }

    /// The two anchor edges of a family.
    pub fn edges_of(&self, f: Family) -> [Edge; 2] {
        match f {
            Family::Upper => [self.ab(), self.xy()],
            Family::Lower => [self.ax(), self.by()],
        }
    }

    /// The smallest valid cut degree.
    pub fn min_cut(&self, d: &DegreeSequence) -> u32 {
        d.degree(self.a.vertex as usize).max(d.degree(self.b.vertex as usize))
    }

    pub fn saturation_times(&self, sigma: &EdgeSequence) -> Result<SaturationTimes> {
        exact::saturation_times(sigma, self.a, self.b, self.x, self.y)
    }
}

/// Upper (`ab, xy`) or lower (`ax, by`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Upper,
    Lower,
}

impl Family {
    pub fn flip(self) -> Family {
        match self {
            Family::Upper => Family::Lower,
            Family::Lower => Family::Upper,
        }
    }
}

pub fn family_of_graph(g: &ConfigGraph, anchor: &SwitchAnchor) -> Option<Family> {
    [Family::Upper, Family::Lower]
        .into_iter()
        .find(|&f| anchor.edges_of(f).iter().all(|&e| g.contains_edge(e)))
}

pub fn family_of_sequence(sigma: &EdgeSequence, anchor: &SwitchAnchor) -> Option<Family> {
    [Family::Upper, Family::Lower]
        .into_iter()
        .find(|&f| anchor.edges_of(f).iter().all(|&e| sigma.position_of_edge(e).is_some()))
}

fn replace_anchor_edges(g: &ConfigGraph, anchor: &SwitchAnchor, from: Family) -> Result<ConfigGraph> {
    let [e1, e2] = anchor.edges_of(from);
    let [f1, f2] = anchor.edges_of(from.flip());
    let mut h = g.clone();
    h.remove_edge(e1)?;
    h.remove_edge(e2)?;
    h.add_edge(f1.first(), f1.second())?;
    h.add_edge(f2.first(), f2.second())?;
    Ok(h)
}

/// Replaces `ab, xy` by `ax, by`.
pub fn switch_graph(g: &ConfigGraph, anchor: &SwitchAnchor) -> Result<ConfigGraph> {
    replace_anchor_edges(g, anchor, Family::Upper)
}

/// Replaces `ax, by` by `ab, xy`.
pub fn unswitch_graph(g: &ConfigGraph, anchor: &SwitchAnchor) -> Result<ConfigGraph> {
    replace_anchor_edges(g, anchor, Family::Lower)
}

/// An equivalence class of configuration-graphs around an anchor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub kind: Family,
    pub anchor: SwitchAnchor,
    pub members: BTreeSet<ConfigGraph>,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: &ConfigGraph) -> bool {
        self.members.contains(g)
    }
}

/// Mates of points outside `A ∪ B ∪ X ∪ Y`, with partners inside replaced by a
/// sentinel. Two graphs of one family share a cluster iff their keys agree.
pub fn cluster_key(g: &ConfigGraph, anchor: &SwitchAnchor) -> Vec<u32> {
    let vs = anchor.vertices();
    let inside = |i: usize| vs.contains(&(g.vertex_of(i) as u32));
    g.mates()
        .iter()
        .enumerate()
        .filter(|&(i, _)| !inside(i))
        .map(|(_, &j)| if j != u32::MAX && inside(j as usize) { u32::MAX - 1 } else { j })
        .collect()
}

/// All members of the cluster of `g`.
pub fn enumerate_cluster(g: &ConfigGraph, anchor: &SwitchAnchor, kind: Family) -> Result<Cluster> {
    if !g.is_complete() {
        return Err(Error::Incomplete);
    }
    SwitchAnchor::for_degrees(g.degree_sequence(), anchor.a, anchor.b, anchor.x, anchor.y)?;
    if family_of_graph(g, anchor) != Some(kind) {
        return Err(Error::InvalidAnchor("graph lacks the anchor edges of this family".into()));
    }
    let vs = anchor.vertices();
    let s_points = g.points_of(&vs);
    let nbrs: Vec<usize> = g.neighbors(&s_points).iter().map(|&p| g.index_of(p)).collect::<Result<_>>()?;
    let fixed: BTreeSet<usize> =
        anchor.edges_of(kind).iter().flat_map(|e| e.points()).map(|p| g.index_of(p)).collect::<Result<_>>()?;
    let free: Vec<usize> =
        s_points.iter().map(|&p| g.index_of(p)).collect::<Result<Vec<_>>>()?.into_iter().filter(|i| !fixed.contains(i)).collect();
    let mut base: Vec<u32> = g.mates().to_vec();
    for &i in nbrs.iter().chain(free.iter()) {
        base[i] = u32::MAX;
    }
    let mut members = BTreeSet::new();
    let mut err = None;
    assign_neighbors(g, &nbrs, &free, &mut base, &mut |mates| {
        match ConfigGraph::from_mates(g.degree_sequence().clone(), mates.to_vec()) {
            Ok(h) => {
                members.insert(h);
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(Cluster { kind, anchor: *anchor, members })
}

fn assign_neighbors(g: &ConfigGraph, nbrs: &[usize], free: &[usize], mates: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if let Some((&p, rest)) = nbrs.split_first() {
        for &q in free {
            if mates[q] == u32::MAX {
                mates[p] = q as u32;
                mates[q] = p as u32;
                assign_neighbors(g, rest, free, mates, f);
                mates[p] = u32::MAX;
                mates[q] = u32::MAX;
            }
        }
    } else {
        let left: Vec<usize> = free.iter().copied().filter(|&q| mates[q] == u32::MAX).collect();
        match_leftover(g, &left, mates, f);
    }
}

fn match_leftover(g: &ConfigGraph, left: &[usize], mates: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    let first = left.iter().copied().find(|&q| mates[q] == u32::MAX);
    let Some(p) = first else {
        f(mates);
        return;
    };
    let vp = g.vertex_of(p);
    for &q in left {
        if q != p && mates[q] == u32::MAX && g.vertex_of(q) != vp {
            mates[p] = q as u32;
            mates[q] = p as u32;
            match_leftover(g, left, mates, f);
            mates[p] = u32::MAX;
            mates[q] = u32::MAX;
        }
    }
}

/// Member-wise replacement of the anchor edges.
pub fn switching_partner(c: &Cluster) -> Result<Cluster> {
    let members = c
        .members
        .iter()
        .map(|g| replace_anchor_edges(g, &c.anchor, c.kind))
        .collect::<Result<BTreeSet<_>>>()?;
    Ok(Cluster { kind: c.kind.flip(), anchor: c.anchor, members })
}

fn require_complete(g: &ConfigGraph) -> Result<()> {
    if g.is_complete() {
        Ok(())
    } else {
        Err(Error::Incomplete)
    }
}

/// `U_G = 4ℓ(ℓ + m − Σ_{j≤k} j n_j)`.
pub fn count_upper(g: &ConfigGraph, k: u32) -> Result<u64> {
    require_complete(g)?;
    let d = g.degree_sequence();
    let l = g.small_edge_count(k) as u64;
    let large = l + d.m() - d.small_point_count(k);
    Ok(4 * l * large)
}

/// Ordered anchors `(a, b, x, y)` with `ab` small and `xy` large, counted one by one.
pub fn count_upper_bruteforce(g: &ConfigGraph, k: u32) -> Result<u64> {
    require_complete(g)?;
    let d = g.degree_sequence();
    let deg = |p: Point| d.degree(p.vertex as usize);
    let edges = g.edges();
    let mut count = 0;
    for e in &edges {
        for f in &edges {
            for (a, b) in [(e.first(), e.second()), (e.second(), e.first())] {
                for (x, y) in [(f.first(), f.second()), (f.second(), f.first())] {
                    if deg(a) <= k && deg(b) <= k && deg(x) > k && deg(y) > k {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

fn mixed_edges(g: &ConfigGraph, k: u32) -> Vec<(u32, u32)> {
    let d = g.degree_sequence();
    g.edges()
        .iter()
        .filter_map(|e| {
            let (p, q) = (e.first(), e.second());
            let (dp, dq) = (d.degree(p.vertex as usize), d.degree(q.vertex as usize));
            match (dp <= k, dq <= k) {
                (true, false) => Some((p.vertex, q.vertex)),
                (false, true) => Some((q.vertex, p.vertex)),
                _ => None,
            }
        })
        .collect()
}

/// `L_G`: ordered pairs of vertex-disjoint mixed edges.
pub fn count_lower(g: &ConfigGraph, k: u32) -> Result<u64> {
    require_complete(g)?;
    let mixed = mixed_edges(g, k);
    let total = mixed.len() as u64;
    let mut per_small: BTreeMap<u32, u64> = BTreeMap::new();
    let mut per_large: BTreeMap<u32, u64> = BTreeMap::new();
    let mut per_pair: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for &(s, l) in &mixed {
        *per_small.entry(s).or_insert(0) += 1;
        *per_large.entry(l).or_insert(0) += 1;
        *per_pair.entry((s, l)).or_insert(0) += 1;
    }
    // ordered pairs (e, f) sharing the small or the large endpoint, e = f included
    let share_small: u64 = per_small.values().map(|c| c * c).sum();
    let share_large: u64 = per_large.values().map(|c| c * c).sum();
    let share_both: u64 = per_pair.values().map(|c| c * c).sum();
    Ok(total * total + share_both - share_small - share_large)
}

/// `L_G` by a double loop.
pub fn count_lower_bruteforce(g: &ConfigGraph, k: u32) -> Result<u64> {
    require_complete(g)?;
    let mixed = mixed_edges(g, k);
    let mut c = 0;
    for (i, e) in mixed.iter().enumerate() {
        for (j, f) in mixed.iter().enumerate() {
            if i != j && e.0 != f.0 && e.1 != f.1 {
                c += 1;
            }
        }
    }
    Ok(c)
}

/// The bounds `C(M,2) − 2ΔM ≤ L_G/2 ≤ C(M,2)` with `M` mixed edges.
pub fn lower_count_bounds(g: &ConfigGraph, k: u32) -> (i128, i128) {
    let d = g.degree_sequence();
    let big_m = d.small_point_count(k) as i128 - 2 * g.small_edge_count(k) as i128;
    let c2 = big_m * (big_m - 1) / 2;
    (c2 - big_m * 2 * d.delta() as i128, c2)
}

/// `ζ = ξ² / (16 Δ³)`.
pub fn zeta(xi: &BigRational, delta: u32) -> BigRational {
    xi * xi / int(16 * (delta as u64).pow(3))
}

/// `⌊(1−ζ)m⌋`.
pub fn good_threshold(m: usize, zeta: &BigRational) -> usize {
    let v = (BigRational::one() - zeta) * int(m as u64);
    let f = v.floor().to_integer();
    usize::try_from(f.max(BigInt::zero())).unwrap_or(0)
}

fn touches_any(e: &Edge, vs: &[u32]) -> bool {
    vs.iter().any(|&v| e.touches_vertex(v))
}

/// Condition (i): no edge joins `{A, B}` to `{X, Y}`.
pub fn anchor_separated<'a, I: IntoIterator<Item = &'a Edge>>(edges: I, anchor: &SwitchAnchor) -> bool {
    let ab = [anchor.a.vertex, anchor.b.vertex];
    let xy = [anchor.x.vertex, anchor.y.vertex];
    !edges.into_iter().any(|e| touches_any(e, &ab) && touches_any(e, &xy))
}

/// Good edge-sequence: anchor separation and `A, B` saturated by `⌊(1−ζ)m⌋`.
pub fn is_good_sequence(sigma: &EdgeSequence, anchor: &SwitchAnchor, zeta: &BigRational) -> Result<bool> {
    if family_of_sequence(sigma, anchor) != Some(Family::Upper) {
        return Err(Error::InvalidAnchor("sequence lacks ab or xy".into()));
    }
    if !anchor_separated(sigma.edges(), anchor) {
        return Ok(false);
    }
    let s = good_threshold(sigma.len(), zeta);
    let ab = [anchor.a.vertex, anchor.b.vertex];
    Ok(sigma.edges().iter().enumerate().all(|(i, e)| !touches_any(e, &ab) || i < s))
}

/// Good-sequence mass of a cluster against its total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodClusterReport {
    pub good_mass: BigRational,
    pub total: BigRational,
    pub good: bool,
}

/// `Σ Z(σ)` over good `σ` of one graph, via a restricted subset DP.
pub fn good_mass(g: &ConfigGraph, anchor: &SwitchAnchor, zeta: &BigRational) -> Result<BigRational> {
    let edges = g.edges();
    if !anchor_separated(edges.iter(), anchor) {
        return Ok(BigRational::zero());
    }
    let ab = [anchor.a.vertex, anchor.b.vertex];
    let s = good_threshold(edges.len(), zeta);
    let need: usize = edges.iter().enumerate().filter(|(_, e)| touches_any(e, &ab)).map(|(i, _)| 1 << i).sum();
    exact::z_graph_restricted(g, |mask| (mask.count_ones() as usize) < s || mask & need == need)
}

pub fn is_good_cluster(c: &Cluster, zeta: &BigRational) -> Result<GoodClusterReport> {
    if c.kind != Family::Upper {
        return Err(Error::InvalidAnchor("goodness is defined for upper clusters".into()));
    }
    let mut good_mass_sum = BigRational::zero();
    let mut total = BigRational::zero();
    for g in &c.members {
        total += exact::z_graph(g)?;
        good_mass_sum += good_mass(g, &c.anchor, zeta)?;
    }
    let good = &good_mass_sum * int(4) >= total;
    Ok(GoodClusterReport { good_mass: good_mass_sum, total, good })
}

/// Exact `Z(C+)`, `Z(C−)` and their ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterSwitchReport {
    pub z_plus: BigRational,
    pub z_minus: BigRational,
    pub ratio: BigRational,
    pub members: usize,
    pub holds: bool,
}

pub fn verify_cluster_switch(c_plus: &Cluster) -> Result<ClusterSwitchReport> {
    if c_plus.kind != Family::Upper {
        return Err(Error::InvalidAnchor("expected an upper cluster".into()));
    }
    let c_minus = switching_partner(c_plus)?;
    let sum = |c: &Cluster| -> Result<BigRational> {
        c.members.iter().try_fold(BigRational::zero(), |acc, g| Ok(acc + exact::z_graph(g)?))
    };
    let z_plus = sum(c_plus)?;
    let z_minus = sum(&c_minus)?;
    let ratio = &z_plus / &z_minus;
    let holds = z_plus >= z_minus;
    Ok(ClusterSwitchReport { z_plus, z_minus, ratio, members: c_plus.len(), holds })
}

// ---------------------------------------------------------------------------
// Θ words

/// A letter of a Θ word: `Low` is the lower-degree vertex (B or A), `High`
/// the higher one (X or Y). Lexicographic order has `Low < High`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Low,
    High,
}

fn check_theta(t: usize, d_low: usize, d_high: usize) -> Result<()> {
    if 0 < d_low && d_low < d_high && d_high <= t && t < d_high + d_low {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!(
            "need 0 < d_b < d_x <= t < d_x + d_b, got t={t}, d_b={d_low}, d_x={d_high}"
        )))
    }
}

fn counts(w: &[Letter]) -> (usize, usize) {
    let lows = w.iter().filter(|&&c| c == Letter::Low).count();
    (lows, w.len() - lows)
}

pub fn in_theta1(w: &[Letter], t: usize, d_low: usize, d_high: usize) -> bool {
    counts(w) == (d_low, d_high)
        && t >= 1
        && t <= w.len()
        && w.last() == Some(&Letter::Low)
        && w[t - 1] == Letter::High
        && w[t..].iter().all(|&c| c == Letter::Low)
}

pub fn in_theta2(w: &[Letter], t: usize, d_low: usize, d_high: usize) -> bool {
    counts(w) == (d_low, d_high)
        && t >= 1
        && t <= w.len()
        && w.last() == Some(&Letter::High)
        && w[t - 1] == Letter::Low
        && w[t..].iter().all(|&c| c == Letter::High)
}

/// `|Θ1| = C(t−1, d_x−1)`.
pub fn theta1_size(t: usize, d_low: usize, d_high: usize) -> Result<u128> {
    check_theta(t, d_low, d_high)?;
    binom(t as u64 - 1, d_high as u64 - 1).ok_or_else(|| Error::Budget("binomial overflow".into()))
}

/// `|Θ2| = C(t−1, d_b−1)`.
pub fn theta2_size(t: usize, d_low: usize, d_high: usize) -> Result<u128> {
    check_theta(t, d_low, d_high)?;
    binom(t as u64 - 1, d_low as u64 - 1).ok_or_else(|| Error::Budget("binomial overflow".into()))
}

/// Lex rank of a binary word among words with the same letter counts.
fn rank(w: &[Letter]) -> u128 {
    let (mut lows, _) = counts(w);
    let mut r = 0u128;
    for (i, &c) in w.iter().enumerate() {
        let rem = (w.len() - i) as u64;
        match c {
            Letter::High => {
                if lows > 0 {
                    r += binom(rem - 1, lows as u64 - 1).unwrap_or(0);
                }
            }
            Letter::Low => lows -= 1,
        }
    }
    r
}

fn unrank(mut r: u128, len: usize, mut lows: usize) -> Vec<Letter> {
    let mut w = Vec::with_capacity(len);
    for i in 0..len {
        let rem = (len - i) as u64;
        let with_low = if lows > 0 { binom(rem - 1, lows as u64 - 1).unwrap_or(0) } else { 0 };
        if lows > 0 && r < with_low {
            w.push(Letter::Low);
            lows -= 1;
        } else {
            r -= with_low;
            w.push(Letter::High);
        }
    }
    w
}

/// The canonical injection `Θ1 → Θ2`: map by lexicographic rank.
pub fn theta_injection(t: usize, d_low: usize, d_high: usize, w: &[Letter]) -> Result<Vec<Letter>> {
    check_theta(t, d_low, d_high)?;
    if !in_theta1(w, t, d_low, d_high) {
        return Err(Error::InvalidParameters("word is not in Θ1".into()));
    }
    // prefixes of length t−1: Θ1 has d_x−1 highs, Θ2 has d_b−1 lows
    let r = rank(&w[..t - 1]);
    let mut out = unrank(r, t - 1, d_low - 1);
    out.push(Letter::Low);
    out.extend(std::iter::repeat_n(Letter::High, d_low + d_high - t));
    Ok(out)
}

/// Preimage under the canonical injection, if any.
pub fn theta_injection_inverse(t: usize, d_low: usize, d_high: usize, w: &[Letter]) -> Result<Option<Vec<Letter>>> {
    check_theta(t, d_low, d_high)?;
    if !in_theta2(w, t, d_low, d_high) {
        return Err(Error::InvalidParameters("word is not in Θ2".into()));
    }
    let r = rank(&w[..t - 1]);
    if r >= theta1_size(t, d_low, d_high)? {
        return Ok(None);
    }
    let lows_in_prefix = t - d_high;
    let mut out = unrank(r, t - 1, lows_in_prefix);
    out.push(Letter::High);
    out.extend(std::iter::repeat_n(Letter::Low, d_low + d_high - t));
    Ok(Some(out))
}

fn all_words(len: usize, lows: usize) -> Vec<Vec<Letter>> {
    let total = binom(len as u64, lows as u64).unwrap_or(0);
    (0..total).map(|r| unrank(r, len, lows)).collect()
}

/// Θ1 in lexicographic order.
pub fn enumerate_theta1(t: usize, d_low: usize, d_high: usize) -> Result<Vec<Vec<Letter>>> {
    check_theta(t, d_low, d_high)?;
    Ok(all_words(d_low + d_high, d_low).into_iter().filter(|w| in_theta1(w, t, d_low, d_high)).collect())
}

/// Θ2 in lexicographic order.
pub fn enumerate_theta2(t: usize, d_low: usize, d_high: usize) -> Result<Vec<Vec<Letter>>> {
    check_theta(t, d_low, d_high)?;
    Ok(all_words(d_low + d_high, d_low).into_iter().filter(|w| in_theta2(w, t, d_low, d_high)).collect())
}

// ---------------------------------------------------------------------------
// counterparts, bar-swaps and twins

fn anchor_positions(sigma: &EdgeSequence, anchor: &SwitchAnchor, f: Family) -> Result<[usize; 2]> {
    let [e1, e2] = anchor.edges_of(f);
    match (sigma.position_of_edge(e1), sigma.position_of_edge(e2)) {
        (Some(i), Some(j)) => Ok([i, j]),
        _ => Err(Error::EdgeAbsent("anchor edges".into())),
    }
}

fn sequence_family(sigma: &EdgeSequence, anchor: &SwitchAnchor) -> Result<Family> {
    family_of_sequence(sigma, anchor).ok_or_else(|| Error::EdgeAbsent("anchor edges".into()))
}

/// `ab → ax`, `xy → by` in place (or the reverse for a lower sequence).
pub fn counterpart(sigma: &EdgeSequence, anchor: &SwitchAnchor) -> Result<EdgeSequence> {
    let f = sequence_family(sigma, anchor)?;
    let [i, j] = anchor_positions(sigma, anchor, f)?;
    let [g1, g2] = anchor.edges_of(f.flip());
    let mut out = sigma.clone();
    out.set(i, g1);
    out.set(j, g2);
    Ok(out)
}

/// Exchanges the positions of the two anchor edges.
pub fn bar(sigma: &EdgeSequence, anchor: &SwitchAnchor) -> Result<EdgeSequence> {
    let f = sequence_family(sigma, anchor)?;
    let [i, j] = anchor_positions(sigma, anchor, f)?;
    let mut out = sigma.clone();
    out.swap_positions(i, j);
    Ok(out)
}

/// Which pair of vertices a twin exchanges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwinKind {
    Bx,
    Ay,
}

fn roles(anchor: &SwitchAnchor, kind: TwinKind) -> (Point, Point) {
    match kind {
        TwinKind::Bx => (anchor.b, anchor.x),
        TwinKind::Ay => (anchor.a, anchor.y),
    }
}

/// The Θ word of a sequence: one letter per edge touching exactly one of the
/// two exchanged vertices, anchor edges excluded, in sequence order.
pub fn twin_word(sigma: &EdgeSequence, anchor: &SwitchAnchor, kind: TwinKind) -> Result<(Vec<Letter>, Vec<usize>)> {
    let f = sequence_family(sigma, anchor)?;
    let pos = anchor_positions(sigma, anchor, f)?;
    let (low, high) = roles(anchor, kind);
    let mut letters = Vec::new();
    let mut at = Vec::new();
    for (i, e) in sigma.edges().iter().enumerate() {
        if pos.contains(&(i + 1)) {
            continue;
        }
        let tl = e.touches_vertex(low.vertex);
        let th = e.touches_vertex(high.vertex);
        if tl != th {
            letters.push(if tl { Letter::Low } else { Letter::High });
            at.push(i);
        }
    }
    Ok((letters, at))
}

#[derive(Clone, Copy)]
enum Slot {
    Fixed(Point),
    Low,
    High,
}

/// Builds the twin-style resequencing of `sigma` whose Θ word becomes `target`.
///
/// Swaps the two exchanged anchor points inside the anchor edges, moves the
/// endpoint of every edge whose letter changes to the other vertex, then
/// relabels the non-anchor points of both vertices in order of appearance.
pub fn twin_transform(sigma: &EdgeSequence, anchor: &SwitchAnchor, kind: TwinKind, target: &[Letter]) -> Result<EdgeSequence> {
    let f = sequence_family(sigma, anchor)?;
    let pos = anchor_positions(sigma, anchor, f)?;
    let (low, high) = roles(anchor, kind);
    let (word, at) = twin_word(sigma, anchor, kind)?;
    if target.len() != word.len() || counts(target) != counts(&word) {
        return Err(Error::InvalidParameters("target word has the wrong letter counts".into()));
    }
    let mut low_labels = Vec::new();
    let mut high_labels = Vec::new();
    for e in sigma.edges() {
        for p in e.points() {
            if p.vertex == low.vertex && p != low {
                low_labels.push(p);
            } else if p.vertex == high.vertex && p != high {
                high_labels.push(p);
            }
        }
    }
    let mut flip = vec![false; sigma.len()];
    for (k, &i) in at.iter().enumerate() {
        flip[i] = word[k] != target[k];
    }
    let swap_anchor = |p: Point| {
        if p == low {
            high
        } else if p == high {
            low
        } else {
            p
        }
    };
    let mut slots: Vec<[Slot; 2]> = Vec::with_capacity(sigma.len());
    for (i, e) in sigma.edges().iter().enumerate() {
        let s = if pos.contains(&(i + 1)) {
            e.points().map(|p| Slot::Fixed(swap_anchor(p)))
        } else {
            e.points().map(|p| {
                let s = if p.vertex == low.vertex {
                    Slot::Low
                } else if p.vertex == high.vertex {
                    Slot::High
                } else {
                    Slot::Fixed(p)
                };
                match (s, flip[i]) {
                    (Slot::Low, true) => Slot::High,
                    (Slot::High, true) => Slot::Low,
                    (s, _) => s,
                }
            })
        };
        slots.push(s);
    }
    let (mut li, mut hi) = (0, 0);
    let mut out = Vec::with_capacity(sigma.len());
    for s in slots {
        let pts = s.map(|slot| match slot {
            Slot::Fixed(p) => p,
            Slot::Low => {
                li += 1;
                low_labels[li - 1]
            }
            Slot::High => {
                hi += 1;
                high_labels[hi - 1]
            }
        });
        out.push(Edge::new(pts[0], pts[1]));
    }
    Ok(EdgeSequence::new(out))
}

fn twin_forward(sigma: &EdgeSequence, anchor: &SwitchAnchor, kind: TwinKind) -> Result<Option<EdgeSequence>> {
    let (low, high) = roles(anchor, kind);
    if saturation_time(sigma, high) >= saturation_time(sigma, low) {
        return Ok(None);
    }
    let (word, _) = twin_word(sigma, anchor, kind)?;
    let (d_low, d_high) = counts(&word);
    let t = word.iter().rposition(|&c| c == Letter::High).map(|i| i + 1).unwrap_or(0);
    let target = theta_injection(t, d_low, d_high, &word)?;
    twin_transform(sigma, anchor, kind, &target).map(Some)
}

/// BX-twin, constructed when `t_x < t_b`.
pub fn bx_twin(sigma: &EdgeSequence, anchor: &SwitchAnchor) -> Result<Option<EdgeSequence>> {
    twin_forward(sigma, anchor, TwinKind::Bx)
}

/// AY-twin, constructed when `t_y < t_a`.
pub fn ay_twin(sigma: &EdgeSequence, anchor: &SwitchAnchor) -> Result<Option<EdgeSequence>> {
    twin_forward(sigma, anchor, TwinKind::Ay)
}

/// The twin of `sigma` of the given kind in either direction: the forward
/// construction when the high vertex saturates first, otherwise the unique
/// sequence whose forward twin is `sigma`, if one exists.
pub fn twin_partner(sigma: &EdgeSequence, anchor: &SwitchAnchor, kind: TwinKind) -> Result<Option<EdgeSequence>> {
    let (low, high) = roles(anchor, kind);
    let (tl, th) = (saturation_time(sigma, low), saturation_time(sigma, high));
    if th < tl {
        return twin_forward(sigma, anchor, kind);
    }
    if tl == th {
        return Ok(None);
    }
    let (word, _) = twin_word(sigma, anchor, kind)?;
    let (d_low, d_high) = counts(&word);
    let Some(t) = word.iter().rposition(|&c| c == Letter::Low).map(|i| i + 1) else {
        return Ok(None);
    };
    if check_theta(t, d_low, d_high).is_err() || !in_theta2(&word, t, d_low, d_high) {
        return Ok(None);
    }
    match theta_injection_inverse(t, d_low, d_high, &word)? {
        None => Ok(None),
        Some(pre) => twin_transform(sigma, anchor, kind, &pre).map(Some),
    }
}

/// Membership in `T`: a BX- or AY-twin exists in either direction.
pub fn has_twin(sigma: &EdgeSequence, anchor: &SwitchAnchor) -> Result<bool> {
    Ok(twin_partner(sigma, anchor, TwinKind::Bx)?.is_some() || twin_partner(sigma, anchor, TwinKind::Ay)?.is_some())
}

/// Complete-switch comparison for one pair of counterparts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompleteSwitchReport {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
    pub gap: i64,
    pub gap_condition: bool,
    pub strict: bool,
}

/// `Z(σ)+Z(σ̄) ≥ Z(σ′)+Z(σ̄′)` for `σ ∈ P+` with `t_a ≤ t_y`, `t_b ≤ t_x`;
/// strictness is recorded when the gap reaches `ζm/3`.
pub fn verify_completeswitch(
    d: &DegreeSequence,
    sigma: &EdgeSequence,
    anchor: &SwitchAnchor,
    zeta: &BigRational,
) -> Result<CompleteSwitchReport> {
    if sequence_family(sigma, anchor)? != Family::Upper {
        return Err(Error::InvalidAnchor("expected a sequence containing ab and xy".into()));
    }
    let t = anchor.saturation_times(sigma)?;
    if !(t.t_a <= t.t_y && t.t_b <= t.t_x) {
        return Err(Error::InvalidParameters("precondition t_a <= t_y and t_b <= t_x fails".into()));
    }
    let s_bar = bar(sigma, anchor)?;
    let s_p = counterpart(sigma, anchor)?;
    let s_pbar = bar(&s_p, anchor)?;
    let lhs = exact::z_sigma(d, sigma)? + exact::z_sigma(d, &s_bar)?;
    let rhs = exact::z_sigma(d, &s_p)? + exact::z_sigma(d, &s_pbar)?;
    let pos_ab = sigma.position_of_edge(anchor.ab()).unwrap_or(0);
    let pos_xy = sigma.position_of_edge(anchor.xy()).unwrap_or(0);
    let gap = pos_xy.min(t.t_x).min(t.t_y) as i64 - pos_ab.max(t.t_a).max(t.t_b) as i64;
    let gap_condition = int(3) * BigRational::from_integer(BigInt::from(gap)) >= zeta * int(sigma.len() as u64);
    Ok(CompleteSwitchReport { holds: lhs >= rhs, strict: lhs > rhs, lhs, rhs, gap, gap_condition })
}

// ---------------------------------------------------------------------------
// sweeps

/// All anchors of `d` with anchor points at copy 0, up to the symmetry
/// `(A, B, X, Y) ~ (B, A, Y, X)`.
pub fn canonical_anchors(d: &DegreeSequence) -> Vec<SwitchAnchor> {
    let n = d.n() as u32;
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for x in 0..n {
                for y in 0..n {
                    let p = |v: u32| Point::new(v, 0);
                    if let Ok(s) = SwitchAnchor::for_degrees(d, p(a), p(b), p(x), p(y)) {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

/// Calls `f` on the mate array of every complete graph containing the upper
/// anchor edges.
pub fn for_each_upper_graph(d: &DegreeSequence, anchor: &SwitchAnchor, f: &mut dyn FnMut(&[u32])) -> Result<()> {
    let g0 = ConfigGraph::from_edges(d.clone(), [(anchor.a, anchor.b), (anchor.x, anchor.y)])?;
    let mut mates = g0.mates().to_vec();
    let left: Vec<usize> = (0..mates.len()).filter(|&i| mates[i] == u32::MAX).collect();
    match_leftover(&g0, &left, &mut mates, f);
    Ok(())
}

/// One violated inequality found by a sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub degrees: DegreeSequence,
    pub anchor: SwitchAnchor,
    pub detail: alloc::string::String,
}

/// Totals of an exhaustive switching sweep over one degree sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SwitchSweep {
    pub anchors: usize,
    pub graphs: usize,
    pub clusters: usize,
    pub min_ratio: Option<BigRational>,
    pub z_order_violations: Vec<Violation>,
    pub spread_violations: Vec<Violation>,
    pub small_shift_violations: Vec<Violation>,
}

impl SwitchSweep {
    pub fn merge(&mut self, o: SwitchSweep) {
        self.anchors += o.anchors;
        self.graphs += o.graphs;
        self.clusters += o.clusters;
        self.min_ratio = match (self.min_ratio.take(), o.min_ratio) {
            (Some(a), Some(b)) => Some(if a < b { a } else { b }),
            (a, b) => a.or(b),
        };
        self.z_order_violations.extend(o.z_order_violations);
        self.spread_violations.extend(o.spread_violations);
        self.small_shift_violations.extend(o.small_shift_violations);
    }

    pub fn passed(&self) -> bool {
        self.z_order_violations.is_empty() && self.spread_violations.is_empty() && self.small_shift_violations.is_empty()
    }
}

struct ClusterAcc {
    z_plus: u128,
    z_minus: u128,
    min_small: usize,
    max_small: usize,
}

fn small_count(ends: &[(u8, u8)], d: &DegreeSequence, k: u32) -> usize {
    ends.iter().filter(|&&(u, v)| d.degree(u as usize) <= k && d.degree(v as usize) <= k).count()
}

/// Exhaustive check over every complete configuration-graph of `d` and every
/// canonical anchor: `Z(C+) ≥ Z(C−)` per cluster, member-wise `X_k` spread at
/// most `4Δ`, and `X_k(G+) = X_k(G−) + 1`.
pub fn switch_sweep(d: &DegreeSequence) -> Result<SwitchSweep> {
    let engine = ZEngine::new(d.n()).ok_or_else(|| Error::Budget("Z scale overflows u128".into()))?;
    let degrees = d.degrees().to_vec();
    let mut memo: BTreeMap<Vec<(u8, u8)>, u128> = BTreeMap::new();
    let mut out = SwitchSweep::default();
    let empty = ConfigGraph::empty(d.clone());
    let owner: Vec<u8> = (0..empty.point_count()).map(|i| empty.vertex_of(i) as u8).collect();
    for anchor in canonical_anchors(d) {
        out.anchors += 1;
        let k = anchor.min_cut(d);
        let (ia, ib, ix, iy) = (
            empty.index_of(anchor.a)?,
            empty.index_of(anchor.b)?,
            empty.index_of(anchor.x)?,
            empty.index_of(anchor.y)?,
        );
        let vs = anchor.vertices();
        let mut clusters: BTreeMap<Vec<u32>, ClusterAcc> = BTreeMap::new();
        let mut failure: Option<Error> = None;
        let mut shift_bad = 0usize;
        let z_of = |mates: &[u32], memo: &mut BTreeMap<Vec<(u8, u8)>, u128>| -> Option<(u128, Vec<(u8, u8)>)> {
            let mut ends: Vec<(u8, u8)> = mates
                .iter()
                .enumerate()
                .filter(|&(i, &j)| (i as u32) < j)
                .map(|(i, &j)| {
                    let (u, v) = (owner[i], owner[j as usize]);
                    if u < v {
                        (u, v)
                    } else {
                        (v, u)
                    }
                })
                .collect();
            ends.sort_unstable();
            if let Some(&z) = memo.get(&ends) {
                return Some((z, ends));
            }
            let e2: Vec<(usize, usize)> = ends.iter().map(|&(u, v)| (u as usize, v as usize)).collect();
            let z = engine.z_graph_restricted(&e2, &degrees, |_| true)?;
            memo.insert(ends.clone(), z);
            Some((z, ends))
        };
        for_each_upper_graph(d, &anchor, &mut |mates| {
            if failure.is_some() {
                return;
            }
            out.graphs += 1;
            let mut minus = mates.to_vec();
            minus[ia] = ix as u32;
            minus[ix] = ia as u32;
            minus[ib] = iy as u32;
            minus[iy] = ib as u32;
            let (Some((zp, ep)), Some((zm, em))) = (z_of(mates, &mut memo), z_of(&minus, &mut memo)) else {
                failure = Some(Error::Budget("Z overflow in u128".into()));
                return;
            };
            let (sp, sm) = (small_count(&ep, d, k), small_count(&em, d, k));
            if sp != sm + 1 {
                shift_bad += 1;
            }
            let key: Vec<u32> = mates
                .iter()
                .enumerate()
                .filter(|&(i, _)| !vs.contains(&(owner[i] as u32)))
                .map(|(_, &j)| if vs.contains(&(owner[j as usize] as u32)) { u32::MAX - 1 } else { j })
                .collect();
            let acc = clusters.entry(key).or_insert(ClusterAcc { z_plus: 0, z_minus: 0, min_small: usize::MAX, max_small: 0 });
            match (acc.z_plus.checked_add(zp), acc.z_minus.checked_add(zm)) {
                (Some(a), Some(b)) => {
                    acc.z_plus = a;
                    acc.z_minus = b;
                }
                _ => failure = Some(Error::Budget("cluster Z sum overflows u128".into())),
            }
            acc.min_small = acc.min_small.min(sp).min(sm);
            acc.max_small = acc.max_small.max(sp).max(sm);
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        if shift_bad > 0 {
            out.small_shift_violations.push(Violation {
                degrees: d.clone(),
                anchor,
                detail: format!("{shift_bad} graphs break X_k(G+) = X_k(G-) + 1"),
            });
        }
        for acc in clusters.values() {
            out.clusters += 1;
            let ratio = BigRational::new(BigInt::from(acc.z_plus), BigInt::from(acc.z_minus));
            if acc.z_plus < acc.z_minus {
                out.z_order_violations.push(Violation {
                    degrees: d.clone(),
                    anchor,
                    detail: format!("Z(C+)/Z(C-) = {ratio}"),
                });
            }
            if acc.max_small - acc.min_small > 4 * d.delta() as usize {
                out.spread_violations.push(Violation {
                    degrees: d.clone(),
                    anchor,
                    detail: format!("X_k spread {}", acc.max_small - acc.min_small),
                });
            }
            out.min_ratio = match out.min_ratio.take() {
                Some(r) if r <= ratio => Some(r),
                _ => Some(ratio),
            };
        }
    }
    Ok(out)
}

/// Results of enumerating `P+ ∪ P−` for one cluster pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwinPartitionReport {
    pub sequences: usize,
    pub twins_plus: usize,
    pub twins_minus: usize,
    pub z_twins_plus: BigRational,
    pub z_twins_minus: BigRational,
    /// Twins whose Γ-profile differs, that leave the partner cluster, or whose
    /// own twin is not the original sequence.
    pub twin_failures: usize,
    pub quadruplets: usize,
    pub quadruplet_failures: usize,
    /// `T`-membership differing between σ, σ̄, σ′, σ̄′.
    pub closure_failures: usize,
    /// Non-twins with `t_a > t_y` or `t_b > t_x`.
    pub nontwin_failures: usize,
    /// Sequences with X,Y edges after all A,B edges that still lie in `T`.
    pub ordering_failures: usize,
    /// Counterpart pairs breaking `Z(σ)+Z(σ̄) ≥ Z(σ′)+Z(σ̄′)`.
    pub completeswitch_checked: usize,
    pub completeswitch_failures: usize,
    pub gap_pairs: usize,
    pub gap_strict_failures: usize,
}

impl TwinPartitionReport {
    pub fn passed(&self) -> bool {
        self.z_twins_plus == self.z_twins_minus
            && self.twin_failures == 0
            && self.quadruplet_failures == 0
            && self.closure_failures == 0
            && self.nontwin_failures == 0
            && self.ordering_failures == 0
            && self.completeswitch_failures == 0
            && self.gap_strict_failures == 0
    }

    pub fn merge(&mut self, o: &TwinPartitionReport) {
        self.sequences += o.sequences;
        self.twins_plus += o.twins_plus;
        self.twins_minus += o.twins_minus;
        self.z_twins_plus += &o.z_twins_plus;
        self.z_twins_minus += &o.z_twins_minus;
        self.twin_failures += o.twin_failures;
        self.quadruplets += o.quadruplets;
        self.quadruplet_failures += o.quadruplet_failures;
        self.closure_failures += o.closure_failures;
        self.nontwin_failures += o.nontwin_failures;
        self.ordering_failures += o.ordering_failures;
        self.completeswitch_checked += o.completeswitch_checked;
        self.completeswitch_failures += o.completeswitch_failures;
        self.gap_pairs += o.gap_pairs;
        self.gap_strict_failures += o.gap_strict_failures;
    }
}

/// Whether a sequence with Θ word `word` has a twin partner, given which of
/// the two exchanged vertices is touched last (1 low, 2 high, 3 both, 0 none).
fn partner_exists(word: &[Letter], last: u8) -> Result<bool> {
    let (d_low, d_high) = counts(word);
    match last {
        1 => {
            let t = word.iter().rposition(|&c| c == Letter::High).map(|i| i + 1).unwrap_or(0);
            theta_injection(t, d_low, d_high, word).map(|_| true)
        }
        2 => {
            let Some(t) = word.iter().rposition(|&c| c == Letter::Low).map(|i| i + 1) else {
                return Ok(false);
            };
            if check_theta(t, d_low, d_high).is_err() || !in_theta2(word, t, d_low, d_high) {
                return Ok(false);
            }
            Ok(theta_injection_inverse(t, d_low, d_high, word)?.is_some())
        }
        _ => Ok(false),
    }
}

// word bits (1 = High), length, last touch
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct WordState(u16, u8, u8);

impl WordState {
    fn step(self, code: u8) -> WordState {
        let WordState(bits, len, last) = self;
        match code {
            1 => WordState(bits, len + 1, 1),
            2 => WordState(bits | (1 << len), len + 1, 2),
            3 => WordState(bits, len, 3),
            _ => WordState(bits, len, last),
        }
    }

    fn letters(self) -> Vec<Letter> {
        (0..self.1).map(|i| if self.0 & (1 << i) != 0 { Letter::High } else { Letter::Low }).collect()
    }
}

/// Vertex-level edge with its anchor flag.
type FlaggedEnd = (u8, u8, bool);

fn touch_code(e: FlaggedEnd, low: u8, high: u8) -> u8 {
    if e.2 {
        return 0;
    }
    let tl = e.0 == low || e.1 == low;
    let th = e.0 == high || e.1 == high;
    match (tl, th) {
        (true, false) => 1,
        (false, true) => 2,
        (true, true) => 3,
        _ => 0,
    }
}

/// Scaled `Z`-mass of the orderings of one graph that lie in `T`, by a subset
/// DP whose state also carries both Θ words.
fn twin_mass_scaled(
    engine: &ZEngine,
    ends: &[FlaggedEnd],
    degrees: &[u32],
    anchor: &SwitchAnchor,
    verdicts: &mut BTreeMap<(WordState, WordState), bool>,
) -> Result<u128> {
    let m = ends.len();
    if m > 16 {
        return Err(Error::Budget("twin DP supports at most 16 edges".into()));
    }
    let overflow = || Error::Budget("twin mass overflows u128".into());
    let v = |p: Point| p.vertex as u8;
    let bx: Vec<u8> = ends.iter().map(|&e| touch_code(e, v(anchor.b), v(anchor.x))).collect();
    let ay: Vec<u8> = ends.iter().map(|&e| touch_code(e, v(anchor.a), v(anchor.y))).collect();
    let full = (1u32 << m) - 1;
    let start = WordState(0, 0, 0);
    let mut layer: BTreeMap<(u16, WordState, WordState), u128> = BTreeMap::new();
    layer.insert((0, start, start), 1);
    let mut used = vec![0u32; degrees.len()];
    for _ in 0..m {
        let mut next: BTreeMap<(u16, WordState, WordState), u128> = BTreeMap::new();
        for (&(mask, wb, wa), &w) in &layer {
            used.iter_mut().for_each(|x| *x = 0);
            for (e, &(a, b, _)) in ends.iter().enumerate() {
                if mask & (1 << e) != 0 {
                    used[a as usize] += 1;
                    used[b as usize] += 1;
                }
            }
            let gamma = degrees.iter().zip(&used).filter(|(d, u)| u < d).count();
            let f = engine.factor(gamma);
            if f == 0 {
                continue;
            }
            let add = w.checked_mul(f).ok_or_else(overflow)?;
            for e in 0..m {
                if mask & (1 << e) == 0 {
                    let key = (mask | (1 << e), wb.step(bx[e]), wa.step(ay[e]));
                    let slot = next.entry(key).or_insert(0);
                    *slot = slot.checked_add(add).ok_or_else(overflow)?;
                }
            }
        }
        layer = next;
    }
    let mut total: u128 = 0;
    for (&(mask, wb, wa), &w) in &layer {
        debug_assert_eq!(mask as u32, full);
        let inside = match verdicts.get(&(wb, wa)) {
            Some(&x) => x,
            None => {
                let x = partner_exists(&wb.letters(), wb.2)? || partner_exists(&wa.letters(), wa.2)?;
                verdicts.insert((wb, wa), x);
                x
            }
        };
        if inside {
            total = total.checked_add(w).ok_or_else(overflow)?;
        }
    }
    Ok(total)
}

fn flagged_ends(g: &ConfigGraph, anchor: &SwitchAnchor) -> Vec<FlaggedEnd> {
    let anchors = [anchor.ab(), anchor.xy(), anchor.ax(), anchor.by()];
    let mut ends: Vec<FlaggedEnd> = g
        .edges()
        .iter()
        .map(|e| {
            let (u, v) = e.vertices();
            (u.min(v) as u8, u.max(v) as u8, anchors.contains(e))
        })
        .collect();
    ends.sort_unstable();
    ends
}

/// `Σ_{σ ∈ T ∩ P+} Z(σ)` and `Σ_{σ ∈ T ∩ P−} Z(σ)` for an upper cluster and
/// its switching partner, without enumerating orderings.
pub fn twin_z_sums(c_plus: &Cluster) -> Result<(BigRational, BigRational)> {
    if c_plus.kind != Family::Upper {
        return Err(Error::InvalidAnchor("expected an upper cluster".into()));
    }
    let Some(g0) = c_plus.members.iter().next() else {
        return Ok((BigRational::zero(), BigRational::zero()));
    };
    let d = g0.degree_sequence();
    let m = d.m() as usize;
    let engine = ZEngine::new(d.n()).ok_or_else(|| Error::Budget("Z scale overflows u128".into()))?;
    let mut verdicts = BTreeMap::new();
    let mut sums = [BigRational::zero(), BigRational::zero()];
    for (slot, c) in [c_plus.clone(), switching_partner(c_plus)?].iter().enumerate() {
        for g in &c.members {
            let w = twin_mass_scaled(&engine, &flagged_ends(g, &c.anchor), d.degrees(), &c.anchor, &mut verdicts)?;
            sums[slot] += engine.to_rational(w, m);
        }
    }
    let [p, q] = sums;
    Ok((p, q))
}

/// Totals of the exhaustive `T`-mass comparison over one degree sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwinSumSweep {
    pub anchors: usize,
    pub graphs: usize,
    pub clusters: usize,
    /// Clusters with a nonempty `T`.
    pub clusters_with_twins: usize,
    pub violations: Vec<Violation>,
}

impl TwinSumSweep {
    pub fn merge(&mut self, o: TwinSumSweep) {
        self.anchors += o.anchors;
        self.graphs += o.graphs;
        self.clusters += o.clusters;
        self.clusters_with_twins += o.clusters_with_twins;
        self.violations.extend(o.violations);
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every complete configuration-graph of `d` and every canonical anchor,
/// checks `Σ_{T∩P+} Z = Σ_{T∩P−} Z` per cluster pair.
pub fn twin_sum_sweep(d: &DegreeSequence) -> Result<TwinSumSweep> {
    let engine = ZEngine::new(d.n()).ok_or_else(|| Error::Budget("Z scale overflows u128".into()))?;
    let empty = ConfigGraph::empty(d.clone());
    let owner: Vec<u8> = (0..empty.point_count()).map(|i| empty.vertex_of(i) as u8).collect();
    let mut verdicts = BTreeMap::new();
    let mut out = TwinSumSweep::default();
    for anchor in canonical_anchors(d) {
        out.anchors += 1;
        let (ia, ib, ix, iy) = (
            empty.index_of(anchor.a)?,
            empty.index_of(anchor.b)?,
            empty.index_of(anchor.x)?,
            empty.index_of(anchor.y)?,
        );
        let vs = anchor.vertices();
        let mut memo: BTreeMap<Vec<FlaggedEnd>, u128> = BTreeMap::new();
        let mut clusters: BTreeMap<Vec<u32>, (u128, u128)> = BTreeMap::new();
        let mut failure: Option<Error> = None;
        let ends_of = |mates: &[u32], special: [(usize, usize); 2]| -> Vec<FlaggedEnd> {
            let mut ends: Vec<FlaggedEnd> = mates
                .iter()
                .enumerate()
                .filter(|&(i, &j)| (i as u32) < j)
                .map(|(i, &j)| {
                    let (u, v) = (owner[i], owner[j as usize]);
                    let flag = special.iter().any(|&(p, q)| (p, q) == (i, j as usize) || (q, p) == (i, j as usize));
                    (u.min(v), u.max(v), flag)
                })
                .collect();
            ends.sort_unstable();
            ends
        };
        for_each_upper_graph(d, &anchor, &mut |mates| {
            if failure.is_some() {
                return;
            }
            out.graphs += 1;
            let mut minus = mates.to_vec();
            minus[ia] = ix as u32;
            minus[ix] = ia as u32;
            minus[ib] = iy as u32;
            minus[iy] = ib as u32;
            let mut mass = |ends: Vec<FlaggedEnd>| -> Result<u128> {
                if let Some(&w) = memo.get(&ends) {
                    return Ok(w);
                }
                let w = twin_mass_scaled(&engine, &ends, d.degrees(), &anchor, &mut verdicts)?;
                memo.insert(ends, w);
                Ok(w)
            };
            let r = mass(ends_of(mates, [(ia, ib), (ix, iy)]))
                .and_then(|p| mass(ends_of(&minus, [(ia, ix), (ib, iy)])).map(|q| (p, q)));
            let (zp, zm) = match r {
                Ok(x) => x,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            };
            let key: Vec<u32> = mates
                .iter()
                .enumerate()
                .filter(|&(i, _)| !vs.contains(&(owner[i] as u32)))
                .map(|(_, &j)| if vs.contains(&(owner[j as usize] as u32)) { u32::MAX - 1 } else { j })
                .collect();
            let acc = clusters.entry(key).or_insert((0, 0));
            match (acc.0.checked_add(zp), acc.1.checked_add(zm)) {
                (Some(a), Some(b)) => *acc = (a, b),
                _ => failure = Some(Error::Budget("cluster twin mass overflows u128".into())),
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        for &(p, q) in clusters.values() {
            out.clusters += 1;
            if p > 0 || q > 0 {
                out.clusters_with_twins += 1;
            }
            if p != q {
                out.violations.push(Violation {
                    degrees: d.clone(),
                    anchor,
                    detail: format!("T-mass {} in C+ against {} in C-", p, q),
                });
            }
        }
    }
    Ok(out)
}

fn sequences_of(g: &ConfigGraph, f: &mut dyn FnMut(EdgeSequence)) {
    let edges = g.edges();
    exact::for_each_permutation(edges.len(), |perm| {
        f(EdgeSequence::new(perm.iter().map(|&i| edges[i]).collect()));
    });
}

/// Exhaustive twin checks over every ordering of every member of `c_plus`
/// and of its switching partner.
pub fn verify_twin_partition(c_plus: &Cluster, zeta: &BigRational) -> Result<TwinPartitionReport> {
    if c_plus.kind != Family::Upper {
        return Err(Error::InvalidAnchor("expected an upper cluster".into()));
    }
    let anchor = c_plus.anchor;
    let c_minus = switching_partner(c_plus)?;
    let d = match c_plus.members.iter().next() {
        Some(g) => g.degree_sequence().clone(),
        None => return Ok(TwinPartitionReport::default()),
    };
    let z = |s: &EdgeSequence| exact::z_sigma(&d, s);
    let mut rep = TwinPartitionReport {
        z_twins_plus: BigRational::zero(),
        z_twins_minus: BigRational::zero(),
        ..Default::default()
    };
    let ab = [anchor.a.vertex, anchor.b.vertex];
    let xy = [anchor.x.vertex, anchor.y.vertex];
    let mut err: Option<Error> = None;
    for (cluster, other) in [(c_plus, &c_minus), (&c_minus, c_plus)] {
        for g in &cluster.members {
            sequences_of(g, &mut |sigma| {
                if err.is_some() {
                    return;
                }
                let r = (|| -> Result<()> {
                    rep.sequences += 1;
                    let gamma = sigma.gamma_profile(&d)?;
                    let mut in_t = false;
                    let mut partners = [None, None];
                    for (slot, kind) in [TwinKind::Bx, TwinKind::Ay].into_iter().enumerate() {
                        if let Some(tw) = twin_partner(&sigma, &anchor, kind)? {
                            in_t = true;
                            let ok = tw.gamma_profile(&d)? == gamma
                                && other.contains(&tw.to_graph(&d)?)
                                && twin_partner(&tw, &anchor, kind)?.as_ref() == Some(&sigma);
                            if !ok {
                                rep.twin_failures += 1;
                            }
                            partners[slot] = Some(tw);
                        }
                    }
                    let t = anchor.saturation_times(&sigma)?;
                    if t.t_x < t.t_b && t.t_y < t.t_a {
                        rep.quadruplets += 1;
                        let via_bx = match &partners[0] {
                            Some(s2) => twin_partner(s2, &anchor, TwinKind::Ay)?,
                            None => None,
                        };
                        let via_ay = match &partners[1] {
                            Some(s3) => twin_partner(s3, &anchor, TwinKind::Bx)?,
                            None => None,
                        };
                        if via_bx.is_none() || via_bx != via_ay {
                            rep.quadruplet_failures += 1;
                        }
                    }
                    if in_t {
                        let zs = z(&sigma)?;
                        match cluster.kind {
                            Family::Upper => {
                                rep.twins_plus += 1;
                                rep.z_twins_plus += zs;
                            }
                            Family::Lower => {
                                rep.twins_minus += 1;
                                rep.z_twins_minus += zs;
                            }
                        }
                    } else if !(t.t_a <= t.t_y && t.t_b <= t.t_x) {
                        rep.nontwin_failures += 1;
                    }
                    let sb = bar(&sigma, &anchor)?;
                    let sp = counterpart(&sigma, &anchor)?;
                    let spb = bar(&sp, &anchor)?;
                    if [&sb, &sp, &spb].iter().any(|s| has_twin(s, &anchor).map(|v| v != in_t).unwrap_or(true)) {
                        rep.closure_failures += 1;
                    }
                    let last_ab = sigma.edges().iter().rposition(|e| touches_any(e, &ab));
                    let first_xy = sigma.edges().iter().position(|e| touches_any(e, &xy));
                    if let (Some(l), Some(f)) = (last_ab, first_xy) {
                        if l < f && in_t {
                            rep.ordering_failures += 1;
                        }
                    }
                    if cluster.kind == Family::Upper && t.t_a <= t.t_y && t.t_b <= t.t_x {
                        let cs = verify_completeswitch(&d, &sigma, &anchor, zeta)?;
                        rep.completeswitch_checked += 1;
                        if !cs.holds {
                            rep.completeswitch_failures += 1;
                        }
                        if cs.gap_condition {
                            rep.gap_pairs += 1;
                            if !cs.strict {
                                rep.gap_strict_failures += 1;
                            }
                        }
                    }
                    Ok(())
                })();
                if let Err(e) = r {
                    err = Some(e);
                }
            });
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    fn p(v: u32, c: u32) -> Point {
        Point::new(v, c)
    }

    #[test]
    fn pair_switch_round_trip() {
        let f = fixtures::counterexample_pair();
        let anchor = SwitchAnchor::new(&f.degrees, 2, f.a, f.b, f.x, f.y).unwrap();
        let minus = switch_graph(&f.g_plus, &anchor).unwrap();
        assert_eq!(minus, f.g_minus);
        assert_eq!(unswitch_graph(&minus, &anchor).unwrap(), f.g_plus);
        assert_eq!(f.g_plus.small_edge_count(2), minus.small_edge_count(2) + 1);
        assert!(switch_graph(&f.g_minus, &anchor).is_err());
    }

    #[test]
    fn anchor_validation() {
        let f = fixtures::counterexample_pair();
        assert!(SwitchAnchor::new(&f.degrees, 2, f.a, f.a, f.x, f.y).is_err());
        assert!(SwitchAnchor::new(&f.degrees, 3, f.a, f.b, f.x, f.y).is_err());
        assert!(SwitchAnchor::new(&f.degrees, 2, f.a, f.b, f.x, p(7, 5)).is_err());
    }

    #[test]
    fn pair_upper_count() {
        let f = fixtures::counterexample_pair();
        assert_eq!(count_upper(&f.g_plus, 2).unwrap(), 16);
        assert_eq!(count_upper_bruteforce(&f.g_plus, 2).unwrap(), 16);
        assert_eq!(count_lower(&f.g_plus, 2).unwrap(), count_lower_bruteforce(&f.g_plus, 2).unwrap());
        let (lo, hi) = lower_count_bounds(&f.g_plus, 2);
        let half = (count_lower(&f.g_plus, 2).unwrap() / 2) as i128;
        assert!(lo <= half && half <= hi);
    }

    #[test]
    fn no_small_edges_no_upper_clusters() {
        // a star pair: every edge is mixed
        let d = DegreeSequence::new(vec![3, 1, 1, 1, 3, 1, 1, 1]).unwrap();
        let g = ConfigGraph::from_edges(
            d,
            [
                (p(0, 0), p(1, 0)),
                (p(0, 1), p(2, 0)),
                (p(0, 2), p(3, 0)),
                (p(4, 0), p(5, 0)),
                (p(4, 1), p(6, 0)),
                (p(4, 2), p(7, 0)),
            ],
        )
        .unwrap();
        assert_eq!(count_upper(&g, 1).unwrap(), 0);
        assert_eq!(count_lower(&g, 1).unwrap(), 18);
        assert_eq!(count_lower_bruteforce(&g, 1).unwrap(), 18);
    }

    #[test]
    fn zeta_example() {
        assert_eq!(zeta(&ratio(1, 2), 2), ratio(1, 512));
        assert_eq!(good_threshold(10, &ratio(1, 512)), 9);
        assert_eq!(good_threshold(10, &ratio(0, 1)), 10);
    }

    #[test]
    fn derived_cluster_has_two_members() {
        // A, B of degree 1; X, Y of degree 2; P, Q of degree 1 hanging off X, Y.
        let d = DegreeSequence::new(vec![1, 1, 2, 2, 1, 1]).unwrap();
        let g = ConfigGraph::from_edges(
            d.clone(),
            [(p(0, 0), p(1, 0)), (p(2, 0), p(3, 0)), (p(4, 0), p(2, 1)), (p(5, 0), p(3, 1))],
        )
        .unwrap();
        let anchor = SwitchAnchor::new(&d, 1, p(0, 0), p(1, 0), p(2, 0), p(3, 0)).unwrap();
        let c = enumerate_cluster(&g, &anchor, Family::Upper).unwrap();
        assert_eq!(c.len(), 2);
        for h in &c.members {
            assert_eq!(enumerate_cluster(h, &anchor, Family::Upper).unwrap(), c);
        }
        let partner = switching_partner(&c).unwrap();
        assert_eq!(partner.len(), 2);
        assert_eq!(switching_partner(&partner).unwrap(), c);
        let rep = verify_cluster_switch(&c).unwrap();
        assert!(rep.holds);
    }

    #[test]
    fn singleton_cluster() {
        let d = DegreeSequence::new(vec![1, 1, 2, 2]).unwrap();
        let g = ConfigGraph::from_edges(d.clone(), [(p(0, 0), p(1, 0)), (p(2, 0), p(3, 0)), (p(2, 1), p(3, 1))]).unwrap();
        let anchor = SwitchAnchor::new(&d, 1, p(0, 0), p(1, 0), p(2, 0), p(3, 0)).unwrap();
        let c = enumerate_cluster(&g, &anchor, Family::Upper).unwrap();
        assert_eq!(c.len(), 1);
        let good = is_good_cluster(&c, &ratio(0, 1)).unwrap();
        assert!(good.good);
        assert_eq!(good.good_mass, good.total);
    }

    #[test]
    fn pair_cluster_average_beats_pair() {
        let f = fixtures::counterexample_pair();
        let anchor = SwitchAnchor::new(&f.degrees, 2, f.a, f.b, f.x, f.y).unwrap();
        let pair = exact::z_graph(&f.g_plus).unwrap() / exact::z_graph(&f.g_minus).unwrap();
        assert!(pair < ratio(1, 1));
        let c = enumerate_cluster(&f.g_plus, &anchor, Family::Upper).unwrap();
        let rep = verify_cluster_switch(&c).unwrap();
        assert!(rep.holds, "cluster ratio {}", rep.ratio);
    }

    #[test]
    fn theta_sizes_and_listed_words() {
        use Letter::{High as X, Low as B};
        assert_eq!(theta1_size(6, 3, 5).unwrap(), 5);
        assert_eq!(theta2_size(6, 3, 5).unwrap(), 10);
        let s1 = [X, B, X, X, X, X, B, B];
        assert!(in_theta1(&s1, 6, 3, 5));
        let img = theta_injection(6, 3, 5, &s1).unwrap();
        assert!(in_theta2(&img, 6, 3, 5));
        assert_eq!(theta_injection_inverse(6, 3, 5, &img).unwrap().as_deref(), Some(&s1[..]));
        assert!(in_theta2(&[X, B, X, B, X, B, X, X], 6, 3, 5));
        assert!(theta_injection(5, 3, 5, &s1).is_err());
        assert!(theta_injection(6, 5, 3, &s1).is_err());
    }

    #[test]
    fn theta_injection_exhaustive() {
        for total in 3..=12usize {
            for d_low in 1..total {
                let d_high = total - d_low;
                if d_low >= d_high {
                    continue;
                }
                for t in d_high..total {
                    let t1 = enumerate_theta1(t, d_low, d_high).unwrap();
                    let t2 = enumerate_theta2(t, d_low, d_high).unwrap();
                    assert_eq!(t1.len() as u128, theta1_size(t, d_low, d_high).unwrap());
                    assert_eq!(t2.len() as u128, theta2_size(t, d_low, d_high).unwrap());
                    let mut images = BTreeSet::new();
                    for w in &t1 {
                        let im = theta_injection(t, d_low, d_high, w).unwrap();
                        assert!(in_theta2(&im, t, d_low, d_high));
                        images.insert(im);
                    }
                    assert_eq!(images.len(), t1.len());
                }
            }
        }
    }

    /// The worked example: deg(B) = 4, deg(X) = 6, non-adjacent.
    /// Vertices: A(1) B(4) X(6) Y(5) then q r s t u v w z (deg 1) and four
    /// degree-1 vertices hanging off Y.
    fn worked_example() -> (DegreeSequence, SwitchAnchor, EdgeSequence, [u32; 8]) {
        let mut degs = vec![1, 4, 6, 5];
        degs.extend([1u32; 12]);
        let d = DegreeSequence::new(degs).unwrap();
        let (va, vb, vx, vy) = (0, 1, 2, 3);
        let names = [4u32, 5, 6, 7, 8, 9, 10, 11]; // q r s t u v w z
        let [q, r, s, t, u, v, w, z] = names;
        let e = |a: Point, b: Point| Edge::new(a, b);
        let one = |x: u32| p(x, 0);
        let seq = vec![
            e(one(q), p(vx, 1)),
            e(one(r), p(vb, 1)),
            e(p(va, 0), p(vb, 0)),
            e(one(s), p(vx, 2)),
            e(one(t), p(vx, 3)),
            e(one(u), p(vx, 4)),
            e(one(v), p(vx, 5)),
            e(p(vx, 0), p(vy, 0)),
            e(one(w), p(vb, 2)),
            e(one(z), p(vb, 3)),
            e(p(vy, 1), one(12)),
            e(p(vy, 2), one(13)),
            e(p(vy, 3), one(14)),
            e(p(vy, 4), one(15)),
        ];
        let anchor = SwitchAnchor::new(&d, 4, p(va, 0), p(vb, 0), p(vx, 0), p(vy, 0)).unwrap();
        (d, anchor, EdgeSequence::new(seq), names)
    }

    #[test]
    fn worked_example_times_and_printed_twin() {
        use Letter::{High as X, Low as B};
        let (d, anchor, sigma, names) = worked_example();
        let [q, r, s, t, u, v, w, z] = names;
        let times = anchor.saturation_times(&sigma).unwrap();
        assert_eq!(times.t_x, 7); // v x5
        assert_eq!(times.t_b, 10); // z b3
        let (word, _) = twin_word(&sigma, &anchor, TwinKind::Bx).unwrap();
        assert_eq!(word, vec![X, B, X, X, X, X, B, B]);
        let printed = twin_transform(&sigma, &anchor, TwinKind::Bx, &[X, B, X, B, X, B, X, X]).unwrap();
        let e = |a: Point, b: Point| Edge::new(a, b);
        let one = |x: u32| p(x, 0);
        let (va, vb, vx, vy) = (0, 1, 2, 3);
        let expect = vec![
            e(one(q), p(vx, 1)),
            e(one(r), p(vb, 1)),
            e(p(va, 0), p(vx, 0)),
            e(one(s), p(vx, 2)),
            e(one(t), p(vb, 2)),
            e(one(u), p(vx, 3)),
            e(one(v), p(vb, 3)),
            e(p(vb, 0), p(vy, 0)),
            e(one(w), p(vx, 4)),
            e(one(z), p(vx, 5)),
        ];
        assert_eq!(&printed.edges()[..10], &expect[..]);
        assert_eq!(printed.gamma_profile(&d).unwrap(), sigma.gamma_profile(&d).unwrap());
        let canon = bx_twin(&sigma, &anchor).unwrap().unwrap();
        assert_eq!(canon.gamma_profile(&d).unwrap(), sigma.gamma_profile(&d).unwrap());
        assert_eq!(exact::z_sigma(&d, &canon).unwrap(), exact::z_sigma(&d, &sigma).unwrap());
        let t2 = anchor.saturation_times(&canon).unwrap();
        assert_eq!((t2.t_b, t2.t_x, t2.t_a, t2.t_y), (times.t_x, times.t_b, times.t_a, times.t_y));
        assert_eq!(family_of_sequence(&canon, &anchor), Some(Family::Lower));
        assert_eq!(twin_partner(&canon, &anchor, TwinKind::Bx).unwrap(), Some(sigma));
    }

    #[test]
    fn counterpart_and_bar_properties() {
        let (_, anchor, sigma, _) = worked_example();
        let sb = bar(&sigma, &anchor).unwrap();
        assert_eq!(bar(&sb, &anchor).unwrap(), sigma);
        let sp = counterpart(&sigma, &anchor).unwrap();
        assert_eq!(anchor.saturation_times(&sp).unwrap(), anchor.saturation_times(&sigma).unwrap());
        assert_eq!(anchor.saturation_times(&sb).unwrap(), anchor.saturation_times(&sigma).unwrap());
        assert_eq!(bar(&sp, &anchor).unwrap(), counterpart(&sb, &anchor).unwrap());
        assert_eq!(counterpart(&sp, &anchor).unwrap(), sigma);
    }

    #[test]
    fn k1_anchors_have_no_twins() {
        let d = DegreeSequence::new(vec![1, 1, 2, 2, 1, 1]).unwrap();
        let g = ConfigGraph::from_edges(
            d.clone(),
            [(p(0, 0), p(1, 0)), (p(2, 0), p(3, 0)), (p(4, 0), p(2, 1)), (p(5, 0), p(3, 1))],
        )
        .unwrap();
        let anchor = SwitchAnchor::new(&d, 1, p(0, 0), p(1, 0), p(2, 0), p(3, 0)).unwrap();
        let c = enumerate_cluster(&g, &anchor, Family::Upper).unwrap();
        let rep = verify_twin_partition(&c, &ratio(0, 1)).unwrap();
        assert_eq!(rep.twins_plus + rep.twins_minus, 0);
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.completeswitch_checked > 0);
    }

    #[test]
    fn good_sequence_examples() {
        let f = fixtures::counterexample_pair();
        let anchor = SwitchAnchor::new(&f.degrees, 2, f.a, f.b, f.x, f.y).unwrap();
        // the B-V2 and Y-V2 edges make V2 shared, but no A,B-X,Y edge exists
        let edges = f.g_plus.edges();
        let mut ordered: Vec<Edge> = edges.iter().copied().filter(|e| e.touches_vertex(fixtures::PAIR_A) || e.touches_vertex(fixtures::PAIR_B)).collect();
        ordered.extend(edges.iter().copied().filter(|e| !(e.touches_vertex(fixtures::PAIR_A) || e.touches_vertex(fixtures::PAIR_B))));
        let sigma = EdgeSequence::new(ordered);
        assert!(is_good_sequence(&sigma, &anchor, &ratio(1, 512)).unwrap());
        let mut late: Vec<Edge> = sigma.edges().to_vec();
        late.rotate_left(1);
        let late = EdgeSequence::new(late);
        assert!(!is_good_sequence(&late, &anchor, &ratio(1, 5)).unwrap());
        // an A-X edge rules out goodness
        let bad = counterpart(&sigma, &anchor).unwrap();
        assert!(is_good_sequence(&bad, &anchor, &ratio(0, 1)).is_err());
    }

    #[test]
    fn twin_mass_dp_matches_enumeration() {
        let mut nonzero = 0;
        for d in crate::degseq::enumerate_sorted(10, 4, 5) {
            for a in canonical_anchors(&d) {
                let mut seen = BTreeSet::new();
                let mut reps = Vec::new();
                for_each_upper_graph(&d, &a, &mut |m| {
                    let g = ConfigGraph::from_mates(d.clone(), m.to_vec()).unwrap();
                    if seen.insert(cluster_key(&g, &a)) {
                        reps.push(g);
                    }
                })
                .unwrap();
                for g in reps {
                    let c = enumerate_cluster(&g, &a, Family::Upper).unwrap();
                    let (p, q) = twin_z_sums(&c).unwrap();
                    let r = verify_twin_partition(&c, &ratio(1, 1000)).unwrap();
                    assert_eq!((&p, &q), (&r.z_twins_plus, &r.z_twins_minus));
                    if !p.is_zero() {
                        nonzero += 1;
                    }
                }
            }
        }
        assert!(nonzero > 0);
    }
}
