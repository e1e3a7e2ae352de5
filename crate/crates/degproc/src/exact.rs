//! Exact probabilities on small instances, in arbitrary-precision rationals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::confgraph::{ConfigGraph, Edge, MultiGraph, Point};
use crate::degseq::DegreeSequence;
use crate::rational::{from_biguint_ratio, int, lcm_of, lcm_upto};
use crate::{Error, Result};

/// Largest edge count accepted by the subset DP.
pub const MAX_SUBSET_DP_EDGES: usize = 24;
/// Largest edge count accepted by the permutation cross-check.
pub const MAX_PERMUTATION_EDGES: usize = 10;

/// An ordering `σ = (e_1, …, e_m)` of point-pair edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeSequence {
    edges: Vec<Edge>,
}

impl EdgeSequence {
    pub fn new(edges: Vec<Edge>) -> Self {
        EdgeSequence { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn push(&mut self, e: Edge) {
        self.edges.push(e);
    }

    /// 1-based position of the edge containing `p`.
    pub fn position_of_point(&self, p: Point) -> Option<usize> {
        self.edges.iter().position(|e| e.contains(p)).map(|i| i + 1)
    }

    /// 1-based position of `e`.
    pub fn position_of_edge(&self, e: Edge) -> Option<usize> {
        self.edges.iter().position(|&f| f == e).map(|i| i + 1)
    }

    /// Replaces the edge at 1-based position `pos`.
    pub fn set(&mut self, pos: usize, e: Edge) {
        self.edges[pos - 1] = e;
    }

    /// Exchanges two 1-based positions.
    pub fn swap_positions(&mut self, i: usize, j: usize) {
        self.edges.swap(i - 1, j - 1);
    }

    /// Replays the sequence as a configuration-graph, checking every prefix.
    pub fn to_graph(&self, d: &DegreeSequence) -> Result<ConfigGraph> {
        let mut g = ConfigGraph::empty(d.clone());
        for e in &self.edges {
            g.add_edge(e.first(), e.second())
                .map_err(|err| Error::MalformedSequence(err.to_string()))?;
        }
        Ok(g)
    }

    /// `Γ_0, …, Γ_len`: unsaturated vertices after each prefix.
    pub fn gamma_profile(&self, d: &DegreeSequence) -> Result<GammaProfile> {
        let mut residual: Vec<u32> = d.degrees().to_vec();
        let mut gamma = residual.iter().filter(|&&r| r > 0).count() as u32;
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        out.push(gamma);
        for e in &self.edges {
            let (u, v) = e.vertices();
            if u == v {
                return Err(Error::MalformedSequence(format!("loop {e}")));
            }
            for w in [u, v] {
                let r = residual
                    .get_mut(w as usize)
                    .ok_or_else(|| Error::MalformedSequence(format!("vertex of {e} out of range")))?;
                if *r == 0 {
                    return Err(Error::MalformedSequence(format!("{e} exceeds a degree bound")));
                }
                *r -= 1;
                if *r == 0 {
                    gamma -= 1;
                }
            }
            out.push(gamma);
        }
        Ok(GammaProfile(out))
    }
}

impl core::fmt::Display for EdgeSequence {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// `Γ_0, …, Γ_m` for a sequence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GammaProfile(pub Vec<u32>);

impl GammaProfile {
    pub fn values(&self) -> &[u32] {
        &self.0
    }

    /// `∏_{i<m} 2/(Γ_i(Γ_i−1))`.
    pub fn z(&self) -> Result<BigRational> {
        let m = self.0.len().saturating_sub(1);
        let mut den = BigUint::one();
        for &g in &self.0[..m] {
            if g < 2 {
                return Err(Error::MalformedSequence("fewer than two unsaturated vertices".into()));
            }
            den *= (g as u64) * (g as u64 - 1) / 2;
        }
        Ok(from_biguint_ratio(BigUint::one(), den))
    }
}

/// `t_a, t_b, t_x, t_y` for an anchored sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SaturationTimes {
    pub t_a: usize,
    pub t_b: usize,
    pub t_x: usize,
    pub t_y: usize,
}

/// Last position at which a point of `p`'s vertex other than `p` is used; 0 if none.
pub fn saturation_time(sigma: &EdgeSequence, p: Point) -> usize {
    let mut t = 0;
    for (i, e) in sigma.edges().iter().enumerate() {
        for q in e.points() {
            if q.vertex == p.vertex && q != p {
                t = i + 1;
            }
        }
    }
    t
}

/// The step at which vertex `v` becomes saturated (last edge touching it).
pub fn saturation_step(sigma: &EdgeSequence, v: u32) -> usize {
    sigma
        .edges()
        .iter()
        .rposition(|e| e.touches_vertex(v))
        .map(|i| i + 1)
        .unwrap_or(0)
}

pub fn saturation_times(sigma: &EdgeSequence, a: Point, b: Point, x: Point, y: Point) -> Result<SaturationTimes> {
    for p in [a, b, x, y] {
        if sigma.position_of_point(p).is_none() {
            return Err(Error::NoSuchPoint(p.to_string()));
        }
    }
    Ok(SaturationTimes {
        t_a: saturation_time(sigma, a),
        t_b: saturation_time(sigma, b),
        t_x: saturation_time(sigma, x),
        t_y: saturation_time(sigma, y),
    })
}

/// `Z(σ)` for a complete sequence.
pub fn z_sigma(d: &DegreeSequence, sigma: &EdgeSequence) -> Result<BigRational> {
    if sigma.len() as u64 != d.m() || d.degree_sum() % 2 == 1 {
        return Err(Error::MalformedSequence("sequence does not saturate every vertex".into()));
    }
    sigma.gamma_profile(d)?.z()
}

/// `∏_j 1/d_j!`.
pub fn point_label_factor(d: &DegreeSequence) -> BigRational {
    let mut den = BigUint::one();
    for &x in d.degrees() {
        for i in 2..=x as u64 {
            den *= i;
        }
    }
    from_biguint_ratio(BigUint::one(), den)
}

struct EdgeTable {
    n: usize,
    ends: Vec<(usize, usize)>,
    degrees: Vec<u32>,
}

impl EdgeTable {
    fn of_config(g: &ConfigGraph) -> Self {
        let ends = g
            .edges()
            .iter()
            .map(|e| {
                let (u, v) = e.vertices();
                (u as usize, v as usize)
            })
            .collect();
        EdgeTable { n: g.degree_sequence().n(), ends, degrees: g.degree_sequence().degrees().to_vec() }
    }

    fn of_multigraph(g: &MultiGraph, d: &DegreeSequence) -> Self {
        let ends = g.edges().iter().map(|&(u, v)| (u as usize, v as usize)).collect();
        EdgeTable { n: g.n(), ends, degrees: d.degrees().to_vec() }
    }

    fn m(&self) -> usize {
        self.ends.len()
    }

    fn used(&self, mask: usize, buf: &mut [u32]) {
        buf.iter_mut().for_each(|x| *x = 0);
        let mut rest = mask;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let (u, v) = self.ends[e];
            buf[u] += 1;
            buf[v] += 1;
        }
    }

    fn gamma(&self, mask: usize, buf: &mut [u32]) -> u64 {
        self.used(mask, buf);
        (0..self.n).filter(|&v| buf[v] < self.degrees[v]).count() as u64
    }

    /// `|Q(S)|`: non-adjacent pairs of unsaturated vertices (simple prefixes).
    fn q_size(&self, mask: usize, buf: &mut [u32]) -> u64 {
        let gamma = self.gamma(mask, buf);
        let mut inside = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let (u, v) = self.ends[e];
            if buf[u] < self.degrees[u] && buf[v] < self.degrees[v] {
                inside += 1;
            }
        }
        gamma * gamma.saturating_sub(1) / 2 - inside
    }
}

/// Forward subset DP: `W(S ∪ e) += W(S) · scale / den(S)`; returns `W(full)`.
fn subset_dp_big(m: usize, scale: &BigUint, mut den: impl FnMut(usize) -> u64, allowed: impl Fn(usize) -> bool) -> Result<BigUint> {
    if m > MAX_SUBSET_DP_EDGES {
        return Err(Error::Budget(format!("subset DP refuses m = {m} > {MAX_SUBSET_DP_EDGES}")));
    }
    let full = (1usize << m) - 1;
    let mut w: Vec<BigUint> = vec![BigUint::zero(); full + 1];
    w[0] = BigUint::one();
    for mask in 0..full {
        if w[mask].is_zero() || !allowed(mask) {
            continue;
        }
        let dd = den(mask);
        if dd == 0 {
            continue;
        }
        let f = scale / dd;
        let add = &w[mask] * &f;
        for e in 0..m {
            if mask & (1 << e) == 0 {
                w[mask | (1 << e)] += &add;
            }
        }
    }
    if !allowed(full) {
        return Ok(BigUint::zero());
    }
    Ok(core::mem::take(&mut w[full]))
}

fn gamma_scale(n: usize) -> BigUint {
    lcm_of((2..=n as u64).map(|g| g * (g - 1) / 2))
}

/// `Z(G) = Σ_σ Z(σ)` via the subset DP over prefix edge sets.
pub fn z_graph(g: &ConfigGraph) -> Result<BigRational> {
    z_graph_restricted(g, |_| true)
}

/// Subset DP keeping only prefixes accepted by `allowed` (masks index `g.edges()`).
pub fn z_graph_restricted(g: &ConfigGraph, allowed: impl Fn(usize) -> bool) -> Result<BigRational> {
    if !g.is_complete() {
        return Err(Error::Incomplete);
    }
    let t = EdgeTable::of_config(g);
    let m = t.m();
    let scale = gamma_scale(t.n);
    let mut buf = vec![0u32; t.n];
    let w = subset_dp_big(
        m,
        &scale,
        |mask| {
            let gm = t.gamma(mask, &mut buf);
            gm * gm.saturating_sub(1) / 2
        },
        allowed,
    )?;
    Ok(from_biguint_ratio(w, num_traits::pow(scale, m)))
}

/// Calls `f` on every permutation of `0..m` (Heap's algorithm).
pub fn for_each_permutation(m: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..m).collect();
    let mut c = vec![0usize; m];
    f(&a);
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Σ over orderings of `∏ 1/den_i`, grouping orderings by their denominator profile.
fn permutation_sum(t: &EdgeTable, den_of: impl Fn(&EdgeTable, usize, &mut [u32]) -> u64) -> Result<BigRational> {
    let m = t.m();
    if m > MAX_PERMUTATION_EDGES {
        return Err(Error::Budget(format!("permutation sum refuses m = {m} > {MAX_PERMUTATION_EDGES}")));
    }
    let mut profiles: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut buf = vec![0u32; t.n];
    let mut prof = Vec::with_capacity(m);
    for_each_permutation(m, |perm| {
        prof.clear();
        let mut mask = 0usize;
        for &e in perm {
            prof.push(den_of(t, mask, &mut buf));
            mask |= 1 << e;
        }
        *profiles.entry(prof.clone()).or_insert(0) += 1;
    });
    let mut total = BigRational::zero();
    for (p, count) in profiles {
        let mut den = BigUint::one();
        for d in p {
            if d == 0 {
                den = BigUint::zero();
                break;
            }
            den *= d;
        }
        if !den.is_zero() {
            total += from_biguint_ratio(BigUint::from(count), den);
        }
    }
    Ok(total)
}

/// `Z(G)` by summing over all `m!` orderings (`m ≤ 10`).
pub fn z_graph_bruteforce(g: &ConfigGraph) -> Result<BigRational> {
    if !g.is_complete() {
        return Err(Error::Incomplete);
    }
    let t = EdgeTable::of_config(g);
    permutation_sum(&t, |t, mask, buf| {
        let gm = t.gamma(mask, buf);
        gm * gm.saturating_sub(1) / 2
    })
}

/// Probability that the relaxed process outputs exactly `g` (point level).
pub fn relaxed_graph_probability(g: &ConfigGraph) -> Result<BigRational> {
    Ok(z_graph(g)? * point_label_factor(g.degree_sequence()))
}

fn check_simple_with_degrees(g: &MultiGraph, d: &DegreeSequence) -> Result<()> {
    if !g.is_simple() {
        return Err(Error::InvalidEdge("graph is not simple".into()));
    }
    if g.n() != d.n() || g.degrees() != d.degrees() {
        return Err(Error::InvalidDegrees("graph degrees differ from the sequence".into()));
    }
    Ok(())
}

/// Probability that the standard process builds exactly `g` and completes.
pub fn prob_standard(g: &MultiGraph, d: &DegreeSequence) -> Result<BigRational> {
    check_simple_with_degrees(g, d)?;
    let t = EdgeTable::of_multigraph(g, d);
    let m = t.m();
    let pairs = (t.n as u64) * (t.n as u64).saturating_sub(1) / 2;
    let scale = lcm_upto(pairs.max(1));
    let mut buf = vec![0u32; t.n];
    let w = subset_dp_big(m, &scale, |mask| t.q_size(mask, &mut buf), |_| true)?;
    Ok(from_biguint_ratio(w, num_traits::pow(scale, m)))
}

/// `prob_standard` by summing over all orderings (`m ≤ 10`).
pub fn prob_standard_bruteforce(g: &MultiGraph, d: &DegreeSequence) -> Result<BigRational> {
    check_simple_with_degrees(g, d)?;
    let t = EdgeTable::of_multigraph(g, d);
    permutation_sum(&t, |t, mask, buf| t.q_size(mask, buf))
}

/// Fixed-point `Z` arithmetic in `u128` for sweeps.
///
/// Values are `Z · L^m` with `L = lcm{C(g,2) : 2 ≤ g ≤ n}`; all arithmetic is
/// checked and returns `None` on overflow.
#[derive(Clone, Debug)]
pub struct ZEngine {
    n: usize,
    scale: u128,
    factor: Vec<u128>,
}

impl ZEngine {
    pub fn new(n: usize) -> Option<Self> {
        let mut scale: u128 = 1;
        for g in 2..=n as u128 {
            let c = g * (g - 1) / 2;
            scale = scale.checked_mul(c / gcd_u128(scale, c))?;
        }
        let mut factor = vec![0u128; n + 1];
        for (g, f) in factor.iter_mut().enumerate().skip(2) {
            *f = scale / ((g * (g - 1) / 2) as u128);
        }
        Some(ZEngine { n, scale, factor })
    }

    pub fn scale(&self) -> u128 {
        self.scale
    }

    /// `L / C(γ, 2)`, or 0 when `γ < 2`.
    pub fn factor(&self, gamma: usize) -> u128 {
        self.factor.get(gamma).copied().unwrap_or(0)
    }

    /// Scaled `Z(σ)` from a Γ-profile.
    pub fn z_profile(&self, gamma: &[u32]) -> Option<u128> {
        let mut acc: u128 = 1;
        for &g in &gamma[..gamma.len().saturating_sub(1)] {
            let f = *self.factor.get(g as usize)?;
            if f == 0 {
                return None;
            }
            acc = acc.checked_mul(f)?;
        }
        Some(acc)
    }

    /// Scaled `Z(G)` via the subset DP, optionally restricted.
    pub fn z_graph_restricted(&self, ends: &[(usize, usize)], degrees: &[u32], allowed: impl Fn(usize) -> bool) -> Option<u128> {
        let m = ends.len();
        if m > MAX_SUBSET_DP_EDGES || degrees.len() > self.n {
            return None;
        }
        let full = (1usize << m) - 1;
        let mut w = vec![0u128; full + 1];
        let mut buf = vec![0u32; degrees.len()];
        w[0] = 1;
        for mask in 0..full {
            if w[mask] == 0 || !allowed(mask) {
                continue;
            }
            buf.iter_mut().for_each(|x| *x = 0);
            for (e, &(u, v)) in ends.iter().enumerate() {
                if mask & (1 << e) != 0 {
                    buf[u] += 1;
                    buf[v] += 1;
                }
            }
            let gamma = degrees.iter().zip(&buf).filter(|(d, u)| u < d).count();
            let f = self.factor[gamma];
            if f == 0 {
                continue;
            }
            let add = w[mask].checked_mul(f)?;
            for e in 0..m {
                if mask & (1 << e) == 0 {
                    let t = &mut w[mask | (1 << e)];
                    *t = t.checked_add(add)?;
                }
            }
        }
        if !allowed(full) {
            return Some(0);
        }
        Some(w[full])
    }

    pub fn z_graph(&self, g: &ConfigGraph) -> Option<u128> {
        let t = EdgeTable::of_config(g);
        self.z_graph_restricted(&t.ends, &t.degrees, |_| true)
    }

    /// Converts a scaled value for an `m`-edge instance back to a rational.
    pub fn to_rational(&self, v: u128, m: usize) -> BigRational {
        from_biguint_ratio(BigUint::from(v), num_traits::pow(BigUint::from(self.scale), m))
    }
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

/// Which process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Standard,
    Relaxed,
}

/// Exact probability that the unconditioned process saturates every vertex.
pub fn completion_prob_exact(d: &DegreeSequence, variant: Variant, max_states: usize) -> Result<BigRational> {
    match variant {
        Variant::Relaxed => relaxed_completion(d, max_states),
        Variant::Standard => Ok(standard_outcome_law(d, max_states)?.complete),
    }
}

fn relaxed_completion(d: &DegreeSequence, max_states: usize) -> Result<BigRational> {
    let mut memo: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    let mut start: Vec<u32> = d.degrees().iter().copied().filter(|&x| x > 0).collect();
    start.sort_unstable();
    relaxed_completion_rec(start, &mut memo, max_states)
}

fn relaxed_completion_rec(
    r: Vec<u32>,
    memo: &mut BTreeMap<Vec<u32>, BigRational>,
    max_states: usize,
) -> Result<BigRational> {
    if r.is_empty() {
        return Ok(BigRational::one());
    }
    if r.len() == 1 {
        return Ok(BigRational::zero());
    }
    if let Some(v) = memo.get(&r) {
        return Ok(v.clone());
    }
    if memo.len() >= max_states {
        return Err(Error::Budget(format!("more than {max_states} residual states")));
    }
    let l = r.len();
    let mut total = BigRational::zero();
    for i in 0..l {
        for j in (i + 1)..l {
            let mut next: Vec<u32> = Vec::with_capacity(l);
            for (k, &x) in r.iter().enumerate() {
                let y = if k == i || k == j { x - 1 } else { x };
                if y > 0 {
                    next.push(y);
                }
            }
            next.sort_unstable();
            total += relaxed_completion_rec(next, memo, max_states)?;
        }
    }
    total /= int((l * (l - 1) / 2) as u64);
    memo.insert(r, total.clone());
    Ok(total)
}

/// Law of the standard process: each complete outcome with its probability,
/// plus the total stuck probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardLaw {
    pub outcomes: Vec<(MultiGraph, BigRational)>,
    pub stuck: BigRational,
    pub complete: BigRational,
}

/// Forward enumeration over reachable simple edge sets (`n ≤ 11`).
pub fn standard_outcome_law(d: &DegreeSequence, max_states: usize) -> Result<StandardLaw> {
    let n = d.n();
    if n > 11 {
        return Err(Error::Budget(format!("standard law needs n <= 11, got {n}")));
    }
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            pairs.push((u, v));
        }
    }
    let scale = lcm_upto((pairs.len() as u64).max(1));
    let deg = d.degrees();
    let mut layer: BTreeMap<u64, BigUint> = BTreeMap::new();
    layer.insert(0, BigUint::one());
    let mut denom = BigUint::one();
    let mut stuck = BigRational::zero();
    let mut outcomes = Vec::new();
    let mut seen = 0usize;
    let mut used = vec![0u32; n];
    while !layer.is_empty() {
        let mut next: BTreeMap<u64, BigUint> = BTreeMap::new();
        for (mask, w) in &layer {
            used.iter_mut().for_each(|x| *x = 0);
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    used[u] += 1;
                    used[v] += 1;
                }
            }
            let q: Vec<usize> = pairs
                .iter()
                .enumerate()
                .filter(|&(i, &(u, v))| mask & (1 << i) == 0 && used[u] < deg[u] && used[v] < deg[v])
                .map(|(i, _)| i)
                .collect();
            if q.is_empty() {
                let p = from_biguint_ratio(w.clone(), denom.clone());
                if (0..n).all(|v| used[v] == deg[v]) {
                    let g = MultiGraph::from_edges(
                        n,
                        pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &(u, v))| (u as u32, v as u32)),
                    )?;
                    outcomes.push((g, p));
                } else {
                    stuck += p;
                }
                continue;
            }
            let add = w * (&scale / BigUint::from(q.len()));
            for i in q {
                *next.entry(mask | (1 << i)).or_insert_with(BigUint::zero) += &add;
            }
        }
        seen += next.len();
        if seen > max_states {
            return Err(Error::Budget(format!("more than {max_states} reachable edge sets")));
        }
        denom *= &scale;
        layer = next;
    }
    outcomes.sort_by(|a, b| a.0.cmp(&b.0));
    let complete = outcomes.iter().fold(BigRational::zero(), |acc, (_, p)| acc + p);
    Ok(StandardLaw { outcomes, stuck, complete })
}

/// Law of the relaxed process at point level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxedLaw {
    pub outcomes: BTreeMap<ConfigGraph, BigRational>,
    pub stuck: BigRational,
}

/// Forward enumeration of the relaxed process with exact transition probabilities.
pub fn relaxed_outcome_law(d: &DegreeSequence, max_states: usize) -> Result<RelaxedLaw> {
    let start = ConfigGraph::empty(d.clone());
    let mut layer: BTreeMap<ConfigGraph, BigRational> = BTreeMap::new();
    layer.insert(start, BigRational::one());
    let mut outcomes = BTreeMap::new();
    let mut stuck = BigRational::zero();
    let mut seen = 0usize;
    let n = d.n();
    while !layer.is_empty() {
        let mut next: BTreeMap<ConfigGraph, BigRational> = BTreeMap::new();
        for (g, p) in layer {
            let free: Vec<Vec<Point>> = (0..n).map(|v| g.free_points(v)).collect();
            let unsat: Vec<usize> = (0..n).filter(|&v| !free[v].is_empty()).collect();
            let l = unsat.len();
            if l == 0 {
                outcomes.insert(g, p);
                continue;
            }
            if l == 1 {
                stuck += p;
                continue;
            }
            let pair_p = p / int((l * (l - 1) / 2) as u64);
            for i in 0..l {
                for j in (i + 1)..l {
                    let (u, v) = (unsat[i], unsat[j]);
                    let pp = &pair_p / int((free[u].len() * free[v].len()) as u64);
                    for &pu in &free[u] {
                        for &pv in &free[v] {
                            let mut h = g.clone();
                            h.add_edge(pu, pv)?;
                            *next.entry(h).or_insert_with(BigRational::zero) += &pp;
                        }
                    }
                }
            }
        }
        seen += next.len();
        if seen > max_states {
            return Err(Error::Budget(format!("more than {max_states} reachable partial matchings")));
        }
        layer = next;
    }
    Ok(RelaxedLaw { outcomes, stuck })
}

/// All simple graphs with degree sequence `d`, each labeled graph once.
pub fn simple_graphs_with_degrees(d: &DegreeSequence, max_graphs: usize) -> Result<Vec<MultiGraph>> {
    let n = d.n();
    let mut residual: Vec<u32> = d.degrees().to_vec();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut out = Vec::new();
    fn rec(
        n: usize,
        residual: &mut Vec<u32>,
        edges: &mut Vec<(u32, u32)>,
        out: &mut Vec<MultiGraph>,
        max_graphs: usize,
    ) -> Result<()> {
        let v = match (0..n).find(|&v| residual[v] > 0) {
            None => {
                if out.len() >= max_graphs {
                    return Err(Error::Budget(format!("more than {max_graphs} graphs")));
                }
                out.push(MultiGraph::from_edges(n, edges.iter().copied())?);
                return Ok(());
            }
            Some(v) => v,
        };
        let need = residual[v] as usize;
        let cands: Vec<usize> = ((v + 1)..n).filter(|&w| residual[w] > 0).collect();
        if cands.len() < need {
            return Ok(());
        }
        let mut pick: Vec<usize> = (0..need).collect();
        loop {
            residual[v] = 0;
            for &i in &pick {
                residual[cands[i]] -= 1;
                edges.push((v as u32, cands[i] as u32));
            }
            rec(n, residual, edges, out, max_graphs)?;
            for &i in &pick {
                residual[cands[i]] += 1;
                edges.pop();
            }
            residual[v] = need as u32;
            // next combination
            let mut i = need;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                if pick[i] < cands.len() - need + i {
                    pick[i] += 1;
                    for j in (i + 1)..need {
                        pick[j] = pick[j - 1] + 1;
                    }
                    break;
                }
            }
            if need == 0 {
                return Ok(());
            }
        }
    }
    rec(n, &mut residual, &mut edges, &mut out, max_graphs)?;
    Ok(out)
}

/// Exact TVD between the conditioned standard process and the uniform law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TvReport {
    pub tvd: BigRational,
    pub graphs: usize,
    pub completion: BigRational,
}

pub fn tv_distance_exact(d: &DegreeSequence, max_graphs: usize) -> Result<TvReport> {
    if !d.is_graphic() {
        return Err(Error::InvalidDegrees(format!("({d}) is not graphic")));
    }
    let graphs = simple_graphs_with_degrees(d, max_graphs)?;
    let probs: Vec<BigRational> = graphs.iter().map(|g| prob_standard(g, d)).collect::<Result<_>>()?;
    let completion = probs.iter().fold(BigRational::zero(), |a, p| a + p);
    let uniform = BigRational::new(BigInt::one(), BigInt::from(graphs.len()));
    let mut tvd = BigRational::zero();
    for p in &probs {
        let diff = p / &completion - &uniform;
        tvd += if diff < BigRational::zero() { -diff } else { diff };
    }
    tvd /= int(2);
    Ok(TvReport { tvd, graphs: graphs.len(), completion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{ratio, to_decimal};

    fn ds(v: &[u32]) -> DegreeSequence {
        DegreeSequence::new(v.to_vec()).unwrap()
    }

    fn p(v: u32, c: u32) -> Point {
        Point::new(v, c)
    }

    #[test]
    fn z_sigma_examples() {
        let d = ds(&[1, 1, 1, 1]);
        let s = EdgeSequence::new(vec![Edge::new(p(0, 0), p(1, 0)), Edge::new(p(2, 0), p(3, 0))]);
        assert_eq!(z_sigma(&d, &s).unwrap(), ratio(1, 6));
        let d2 = ds(&[1, 1]);
        let s2 = EdgeSequence::new(vec![Edge::new(p(0, 0), p(1, 0))]);
        assert_eq!(z_sigma(&d2, &s2).unwrap(), ratio(1, 1));
        assert!(z_sigma(&d, &EdgeSequence::new(vec![Edge::new(p(0, 0), p(1, 0))])).is_err());
    }

    #[test]
    fn z_graph_examples() {
        let d = ds(&[1, 1, 1, 1]);
        let g = ConfigGraph::from_edges(d, [(p(0, 0), p(1, 0)), (p(2, 0), p(3, 0))]).unwrap();
        assert_eq!(z_graph(&g).unwrap(), ratio(1, 3));
        let g1 = ConfigGraph::from_edges(ds(&[1, 1]), [(p(0, 0), p(1, 0))]).unwrap();
        assert_eq!(z_graph(&g1).unwrap(), ratio(1, 1));
        assert!(matches!(z_graph(&ConfigGraph::empty(ds(&[1, 1]))), Err(Error::Incomplete)));
    }

    #[test]
    fn pair_ratios() {
        let f = fixtures::counterexample_pair();
        let relaxed = z_graph(&f.g_plus).unwrap() / z_graph(&f.g_minus).unwrap();
        assert_eq!(relaxed, BigRational::new(37227410899u64.into(), 38919690771u64.into()));
        assert_eq!(to_decimal(&relaxed, 5), "0.95652");
        let (mp, mm) = (f.g_plus.project(), f.g_minus.project());
        let standard = prob_standard(&mp, &f.degrees).unwrap() / prob_standard(&mm, &f.degrees).unwrap();
        assert_eq!(
            standard,
            BigRational::new(348373648088651u64.into(), 423997785172640u64.into())
        );
        assert_eq!(to_decimal(&standard, 5), "0.82164");
    }

    #[test]
    fn engine_agrees_with_rationals() {
        let f = fixtures::counterexample_pair();
        let e = ZEngine::new(8).unwrap();
        for g in [&f.g_plus, &f.g_minus] {
            let v = e.z_graph(g).unwrap();
            assert_eq!(e.to_rational(v, 10), z_graph(g).unwrap());
        }
    }

    #[test]
    fn prob_standard_trivial() {
        let d = ds(&[1, 1]);
        let g = MultiGraph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(prob_standard(&g, &d).unwrap(), ratio(1, 1));
    }

    #[test]
    fn four_cycle_law_sums_to_one() {
        let d = ds(&[2, 2, 2, 2]);
        let law = standard_outcome_law(&d, 1 << 20).unwrap();
        assert_eq!(law.outcomes.len(), 3);
        let mut total = law.stuck.clone();
        for (g, pr) in &law.outcomes {
            assert_eq!(&prob_standard(g, &d).unwrap(), pr);
            total += prob_standard(g, &d).unwrap();
        }
        assert_eq!(total, ratio(1, 1));
        assert!(law.stuck > BigRational::zero());
    }

    #[test]
    fn completion_examples() {
        let d = ds(&[1, 1]);
        assert_eq!(completion_prob_exact(&d, Variant::Standard, 1000).unwrap(), ratio(1, 1));
        assert_eq!(completion_prob_exact(&d, Variant::Relaxed, 1000).unwrap(), ratio(1, 1));
        let d4 = ds(&[1, 1, 1, 1]);
        assert_eq!(completion_prob_exact(&d4, Variant::Standard, 1000).unwrap(), ratio(1, 1));
        let c = ds(&[2, 2, 2, 2]);
        let s = completion_prob_exact(&c, Variant::Standard, 1000).unwrap();
        let r = completion_prob_exact(&c, Variant::Relaxed, 1000).unwrap();
        assert!(s > BigRational::zero() && s < ratio(1, 1));
        assert!(r > BigRational::zero() && r < ratio(1, 1));
    }

    #[test]
    fn saturation_examples() {
        // deg(A) = 1 gives t_a = 0
        let d = ds(&[1, 1, 2, 2]);
        let s = EdgeSequence::new(vec![
            Edge::new(p(0, 0), p(2, 0)),
            Edge::new(p(2, 1), p(3, 0)),
            Edge::new(p(1, 0), p(3, 1)),
        ]);
        assert!(s.to_graph(&d).unwrap().is_complete());
        let t = saturation_times(&s, p(0, 0), p(1, 0), p(2, 0), p(3, 1)).unwrap();
        assert_eq!(t.t_a, 0);
        assert_eq!(t.t_b, 0);
        assert_eq!(t.t_x, 2);
        assert_eq!(t.t_y, 2);
        assert!(saturation_times(&s, p(0, 0), p(1, 0), p(2, 0), p(9, 0)).is_err());
    }

    #[test]
    fn tvd_examples() {
        assert_eq!(tv_distance_exact(&ds(&[1, 1]), 100).unwrap().tvd, BigRational::zero());
        let r = tv_distance_exact(&ds(&[2, 2, 2, 2]), 100).unwrap();
        assert_eq!(r.graphs, 3);
        assert_eq!(r.tvd, BigRational::zero());
    }

    #[test]
    fn simple_graph_listing() {
        assert_eq!(simple_graphs_with_degrees(&ds(&[1, 1, 1, 1]), 100).unwrap().len(), 3);
        assert_eq!(simple_graphs_with_degrees(&ds(&[2, 2, 2, 2]), 100).unwrap().len(), 3);
        assert_eq!(simple_graphs_with_degrees(&ds(&[3, 3, 1, 1]), 100).unwrap().len(), 0);
        assert_eq!(simple_graphs_with_degrees(&ds(&[2, 2, 2]), 100).unwrap().len(), 1);
    }

    #[test]
    fn permutations_count() {
        let mut c = 0;
        for_each_permutation(5, |_| c += 1);
        assert_eq!(c, 120);
    }
}
