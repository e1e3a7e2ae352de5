//! Verification suites over exhaustive and sampled instances.

use std::collections::{BTreeMap, BTreeSet};

use degproc::degseq::enumerate_sorted;
use degproc::exact::{self, EdgeSequence};
use degproc::process::UniformSampler;
use degproc::rational::{exact_string, ratio, to_f64};
use degproc::rng::{trial_rng, TrialRng};
use degproc::switching::{
    self, bar, canonical_anchors, cluster_key, counterpart, enumerate_cluster, family_of_sequence, for_each_upper_graph,
    switching_partner, twin_partner, Cluster, Family, SwitchAnchor, TwinKind, TwinPartitionReport,
};
use degproc::{BigRational, ConfigGraph, DegreeSequence, MultiGraph, Point};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};

pub const SUITES: &[&str] = &[
    "cluster-z-order",
    "clusters",
    "counting",
    "normalization",
    "good-cluster",
    "bar-counterpart",
    "theta-injection",
    "twin-z-equality",
    "twin-partition",
    "count-ratio",
    "good-fraction",
];

/// One JSON line of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub instance: String,
    pub check: String,
    pub witness: Option<String>,
    pub ratio: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub instances: usize,
    pub checks: usize,
    pub failures: usize,
    pub notes: Vec<String>,
    /// Named totals, e.g. how many twins a sampled suite exercised.
    pub counts: BTreeMap<String, u64>,
    pub findings: Vec<Finding>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64) -> Self {
        SuiteReport { suite: suite.into(), seed, ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }

    fn check(&mut self, ok: bool, instance: impl FnOnce() -> String, check: &str, witness: Option<String>) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.findings.len() < 50 {
                self.findings.push(Finding { instance: instance(), check: check.into(), witness, ratio: None, pass: false });
            }
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn count(&mut self, key: &str, v: u64) {
        *self.counts.entry(key.into()).or_insert(0) += v;
    }

    pub fn get(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    pub workers: usize,
    /// Exhaustive bound on edges.
    pub max_m: u64,
    pub max_delta: u32,
    /// Sampled instances (or clusters) for randomized suites.
    pub instances: usize,
    /// Largest `m` for sampled instances.
    pub sample_max_m: u64,
    /// Exhaustive bound for the sequence-by-sequence twin checks.
    pub partition_max_m: u64,
    /// Extra sampled clusters above `partition_max_m`.
    pub partition_samples: usize,
    pub zeta: Option<BigRational>,
    pub xi: BigRational,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 1,
            workers: crate::harness::default_workers(),
            max_m: 7,
            max_delta: 4,
            instances: 1000,
            sample_max_m: 10,
            partition_max_m: 5,
            partition_samples: 200,
            zeta: None,
            xi: ratio(1, 4),
        }
    }
}

impl VerifyOptions {
    fn zeta_for(&self, delta: u32) -> BigRational {
        self.zeta.clone().unwrap_or_else(|| switching::zeta(&self.xi, delta))
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| LabError::InvalidArgument(e.to_string()))
    }
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    match name {
        "cluster-z-order" => cluster_z_order(opts),
        "clusters" => clusters(opts),
        "counting" => counting(opts),
        "normalization" => normalization(opts),
        "good-cluster" => good_cluster(opts),
        "bar-counterpart" => bar_counterpart(opts),
        "theta-injection" => theta_injection_suite(opts),
        "twin-z-equality" => twin_z_equality(opts),
        "twin-partition" => twin_partition(opts),
        "count-ratio" => count_ratio(opts),
        "good-fraction" => good_fraction(opts),
        _ => Err(LabError::UnknownSuite(name.into())),
    }
}

/// A graph containing the upper anchor edges of `anchor`.
#[derive(Clone, Debug)]
pub struct AnchoredInstance {
    pub degrees: DegreeSequence,
    pub anchor: SwitchAnchor,
    pub graph: ConfigGraph,
}

fn random_degrees<R: Rng>(rng: &mut R, min_m: u64, max_m: u64, max_delta: u32) -> DegreeSequence {
    loop {
        let n = rng.gen_range(4..=(2 * max_m as usize).max(4));
        let degs: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=max_delta)).collect();
        let sum: u32 = degs.iter().sum();
        if sum.is_multiple_of(2) && (2 * min_m..=2 * max_m).contains(&(sum as u64)) {
            if let Ok(d) = DegreeSequence::new(degs) {
                return d;
            }
        }
    }
}

/// Uniformly random completion of a partial configuration-graph, by rejection.
fn complete_randomly<R: Rng>(g: &ConfigGraph, rng: &mut R) -> Option<ConfigGraph> {
    let free: Vec<usize> = (0..g.point_count()).filter(|&i| g.mates()[i] == u32::MAX).collect();
    for _ in 0..200 {
        let mut pts = free.clone();
        pts.shuffle(rng);
        if pts.chunks(2).any(|c| g.vertex_of(c[0]) == g.vertex_of(c[1])) {
            continue;
        }
        let mut mates = g.mates().to_vec();
        for c in pts.chunks(2) {
            mates[c[0]] = c[1] as u32;
            mates[c[1]] = c[0] as u32;
        }
        return ConfigGraph::from_mates(g.degree_sequence().clone(), mates).ok();
    }
    None
}

/// A random complete configuration-graph with `min_m ≤ m ≤ max_m`.
pub fn random_config_graph<R: Rng>(rng: &mut R, min_m: u64, max_m: u64, max_delta: u32) -> ConfigGraph {
    loop {
        let d = random_degrees(rng, min_m, max_m, max_delta);
        if let Some(g) = complete_randomly(&ConfigGraph::empty(d), rng) {
            return g;
        }
    }
}

/// A random anchored upper graph with `min_m ≤ m ≤ max_m`.
pub fn random_instance<R: Rng>(rng: &mut R, min_m: u64, max_m: u64, max_delta: u32) -> AnchoredInstance {
    loop {
        let d = random_degrees(rng, min_m, max_m, max_delta);
        let n = d.n() as u32;
        let mut vs: Vec<u32> = (0..n).collect();
        let mut anchor = None;
        for _ in 0..20 {
            vs.shuffle(rng);
            let pick = |v: u32, rng: &mut R| Point::new(v, rng.gen_range(0..d.degree(v as usize)));
            let (a, b, x, y) = (pick(vs[0], rng), pick(vs[1], rng), pick(vs[2], rng), pick(vs[3], rng));
            if let Ok(s) = SwitchAnchor::for_degrees(&d, a, b, x, y) {
                anchor = Some(s);
                break;
            }
        }
        let Some(anchor) = anchor else { continue };
        let Ok(g0) = ConfigGraph::from_edges(d.clone(), [(anchor.a, anchor.b), (anchor.x, anchor.y)]) else { continue };
        if let Some(graph) = complete_randomly(&g0, rng) {
            return AnchoredInstance { degrees: d, anchor, graph };
        }
    }
}

fn random_sequence<R: Rng>(g: &ConfigGraph, rng: &mut R) -> EdgeSequence {
    let mut e = g.edges();
    e.shuffle(rng);
    EdgeSequence::new(e)
}

fn describe(d: &DegreeSequence, anchor: &SwitchAnchor) -> String {
    format!("d=[{d}] a={} b={} x={} y={}", anchor.a, anchor.b, anchor.x, anchor.y)
}

fn cluster_z_order(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("cluster-z-order", opts.seed);
    let seqs: Vec<DegreeSequence> = enumerate_sorted(2 * opts.max_m as usize, opts.max_delta, opts.max_m)
        .into_iter()
        .filter(|d| !canonical_anchors(d).is_empty())
        .collect();
    let results: Vec<degproc::Result<switching::SwitchSweep>> =
        opts.pool()?.install(|| seqs.par_iter().map(switching::switch_sweep).collect());
    let mut total = switching::SwitchSweep::default();
    for r in results {
        total.merge(r?);
    }
    rep.instances = seqs.len();
    rep.checks = total.clusters * 2 + total.anchors;
    for (check, vs) in [
        ("cluster-z-order", &total.z_order_violations),
        ("cluster-spread", &total.spread_violations),
        ("small-edge-shift", &total.small_shift_violations),
    ] {
        rep.failures += vs.len();
        for v in vs.iter().take(20) {
            rep.findings.push(Finding {
                instance: describe(&v.degrees, &v.anchor),
                check: check.into(),
                witness: Some(v.detail.clone()),
                ratio: None,
                pass: false,
            });
        }
    }
    rep.count("graphs", total.graphs as u64);
    rep.count("clusters", total.clusters as u64);
    rep.note(format!(
        "{} sequences, {} anchors, {} graphs, {} clusters",
        seqs.len(),
        total.anchors,
        total.graphs,
        total.clusters
    ));
    if let Some(r) = &total.min_ratio {
        rep.findings.push(Finding {
            instance: "all".into(),
            check: "cluster-z-order".into(),
            witness: Some("minimum Z(C+)/Z(C-)".into()),
            ratio: Some(exact_string(r)),
            pass: total.z_order_violations.is_empty(),
        });
    }
    Ok(rep)
}

fn clusters(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("clusters", opts.seed);
    let mut rng = trial_rng(opts.seed, 31);
    for _ in 0..opts.instances {
        let inst = random_instance(&mut rng, 2, opts.sample_max_m.min(8), opts.max_delta);
        let (d, a) = (&inst.degrees, &inst.anchor);
        let name = || describe(d, a);
        let c = enumerate_cluster(&inst.graph, a, Family::Upper)?;
        let partner = switching_partner(&c)?;
        let k = a.min_cut(d);
        let key = cluster_key(&inst.graph, a);
        rep.instances += 1;
        rep.check(c.contains(&inst.graph), name, "cluster contains its seed", None);
        rep.check(partner.len() == c.len(), name, "partner size", None);
        rep.check(switching_partner(&partner)? == c, name, "partner involution", None);
        for h in &c.members {
            rep.check(cluster_key(h, a) == key, name, "shared external structure", None);
            rep.check(enumerate_cluster(h, a, Family::Upper)?.members == c.members, name, "equivalence class", None);
            let hm = switching::switch_graph(h, a)?;
            rep.check(h.small_edge_count(k) == hm.small_edge_count(k) + 1, name, "small-edge-shift", None);
            rep.check(partner.contains(&hm), name, "member-wise partner", None);
        }
    }
    Ok(rep)
}

fn counting(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("counting", opts.seed);
    let mut rng = trial_rng(opts.seed, 41);
    for _ in 0..opts.instances {
        let g = random_config_graph(&mut rng, 1, opts.sample_max_m, opts.max_delta);
        let d = g.degree_sequence();
        rep.instances += 1;
        for k in 1..d.delta().max(2) {
            let name = || format!("{} k={k}", crate::formats::write_config_graph(&g).replace('\n', "; "));
            let (u, ub) = (switching::count_upper(&g, k)?, switching::count_upper_bruteforce(&g, k)?);
            rep.check(u == ub, name, "upper count", Some(format!("{u} vs {ub}")));
            let (l, lb) = (switching::count_lower(&g, k)?, switching::count_lower_bruteforce(&g, k)?);
            rep.check(l == lb, name, "lower count", Some(format!("{l} vs {lb}")));
            let (lo, hi) = switching::lower_count_bounds(&g, k);
            let half = (l / 2) as i128;
            rep.check(l % 2 == 0 && lo <= half && half <= hi, name, "lower bounds", Some(format!("{lo} <= {half} <= {hi}")));
        }
    }
    Ok(rep)
}

fn normalization(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("normalization", opts.seed);
    let max_m = opts.max_m.min(5);
    let max_delta = opts.max_delta.min(3);
    for d in enumerate_sorted(2 * max_m as usize, max_delta, max_m) {
        if d.n() < 2 {
            continue;
        }
        rep.instances += 1;
        let name = || format!("[{d}]");
        let law = exact::relaxed_outcome_law(&d, 1 << 22)?;
        let total: BigRational = law.outcomes.values().sum::<BigRational>() + &law.stuck;
        rep.check(total == ratio(1, 1), name, "relaxed law sums to 1", Some(exact_string(&total)));
        let f = exact::point_label_factor(&d);
        for (g, p) in &law.outcomes {
            rep.check(*p == exact::z_graph(g)? * &f, name, "relaxed law proportional to Z", None);
        }
        let complete: BigRational = law.outcomes.values().sum();
        let exact_completion = exact::completion_prob_exact(&d, exact::Variant::Relaxed, 1 << 20)?;
        rep.check(complete == exact_completion, name, "relaxed completion", None);
        if d.n() <= 11 {
            let s = exact::standard_outcome_law(&d, 1 << 22)?;
            let total: BigRational = s.outcomes.iter().map(|(_, p)| p.clone()).sum::<BigRational>() + &s.stuck;
            rep.check(total == ratio(1, 1), name, "standard law sums to 1", Some(exact_string(&total)));
            for (g, p) in &s.outcomes {
                rep.check(*p == exact::prob_standard(g, &d)?, name, "standard law matches subset DP", None);
            }
        }
    }
    Ok(rep)
}

/// Good-sequence mass of a cluster by summing over every ordering.
fn good_mass_bruteforce(c: &Cluster, zeta: &BigRational) -> Result<(BigRational, BigRational)> {
    let mut good = BigRational::from_integer(0.into());
    let mut total = good.clone();
    for g in &c.members {
        let d = g.degree_sequence();
        let edges = g.edges();
        let mut err = None;
        exact::for_each_permutation(edges.len(), |perm| {
            let s = EdgeSequence::new(perm.iter().map(|&i| edges[i]).collect());
            match (exact::z_sigma(d, &s), switching::is_good_sequence(&s, &c.anchor, zeta)) {
                (Ok(z), Ok(ok)) => {
                    if ok {
                        good += &z;
                    }
                    total += z;
                }
                (Err(e), _) | (_, Err(e)) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e.into());
        }
    }
    Ok((good, total))
}

fn good_cluster(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("good-cluster", opts.seed);
    let mut rng = trial_rng(opts.seed, 51);
    let (mut goods, mut bads) = (0, 0);
    for _ in 0..opts.instances {
        let inst = random_instance(&mut rng, 2, opts.sample_max_m.min(8), opts.max_delta);
        let (d, a) = (&inst.degrees, &inst.anchor);
        let c = enumerate_cluster(&inst.graph, a, Family::Upper)?;
        if c.len() > 3 && d.m() == 8 {
            continue;
        }
        // a coarse ζ so that both verdicts occur at this size
        let zeta = opts.zeta.clone().unwrap_or_else(|| ratio(1, 4));
        rep.instances += 1;
        let fast = switching::is_good_cluster(&c, &zeta)?;
        let (good, total) = good_mass_bruteforce(&c, &zeta)?;
        let oracle = &good * BigRational::from_integer(4.into()) >= total;
        if oracle {
            goods += 1;
        } else {
            bads += 1;
        }
        rep.check(
            fast.good == oracle && fast.good_mass == good && fast.total == total,
            || describe(d, a),
            "good cluster decision",
            Some(format!("{} of {}", exact_string(&good), exact_string(&total))),
        );
    }
    rep.note(format!("{goods} good and {bads} not good clusters"));
    Ok(rep)
}

fn bar_counterpart(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("bar-counterpart", opts.seed);
    let mut rng = trial_rng(opts.seed, 61);
    for _ in 0..opts.instances {
        let inst = random_instance(&mut rng, 2, opts.sample_max_m, opts.max_delta);
        let (d, a) = (&inst.degrees, &inst.anchor);
        let s = random_sequence(&inst.graph, &mut rng);
        let name = || format!("{} sigma={s}", describe(d, a));
        rep.instances += 1;
        let (sb, sp) = (bar(&s, a)?, counterpart(&s, a)?);
        rep.check(bar(&sp, a)? == counterpart(&sb, a)?, name, "bar-counterpart commute", None);
        let t = a.saturation_times(&s)?;
        let same = [&sb, &sp, &bar(&sp, a)?].iter().all(|x| a.saturation_times(x).map(|u| u == t).unwrap_or(false));
        rep.check(same, name, "saturation times preserved", None);
        rep.check(bar(&sb, a)? == s && family_of_sequence(&sb, a) == Some(Family::Upper), name, "bar involution", None);
        rep.check(family_of_sequence(&sp, a) == Some(Family::Lower), name, "counterpart family", None);
    }
    Ok(rep)
}

fn theta_injection_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("theta-injection", opts.seed);
    for total in 3..=12usize {
        for d_low in 1..total {
            let d_high = total - d_low;
            if d_low >= d_high {
                continue;
            }
            for t in d_high..total {
                rep.instances += 1;
                let name = || format!("t={t} d_b={d_low} d_x={d_high}");
                let t1 = switching::enumerate_theta1(t, d_low, d_high)?;
                let t2 = switching::enumerate_theta2(t, d_low, d_high)?;
                rep.check(t1.len() as u128 == switching::theta1_size(t, d_low, d_high)?, name, "theta1 size", None);
                rep.check(t2.len() as u128 == switching::theta2_size(t, d_low, d_high)?, name, "theta2 size", None);
                rep.check(t1.len() <= t2.len(), name, "|theta1| <= |theta2|", None);
                let mut seen = BTreeSet::new();
                for w in &t1 {
                    let im = switching::theta_injection(t, d_low, d_high, w)?;
                    rep.check(switching::in_theta2(&im, t, d_low, d_high), name, "image in theta2", None);
                    let back = switching::theta_injection_inverse(t, d_low, d_high, &im)?;
                    rep.check(back.as_ref() == Some(w), name, "inverse", None);
                    seen.insert(im);
                }
                rep.check(seen.len() == t1.len(), name, "injective", None);
            }
        }
    }
    Ok(rep)
}

fn twin_z_equality(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("twin-z-equality", opts.seed);
    let results: Vec<Result<(SuiteReport, usize, usize)>> = opts.pool()?.install(|| {
        (0..opts.instances)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(opts.seed, 1000 + i as u64);
                let mut r = SuiteReport::new("twin-z-equality", opts.seed);
                let (twins, quads) = twin_instance(&mut rng, opts, &mut r)?;
                Ok((r, twins, quads))
            })
            .collect()
    });
    let (mut twins, mut quads) = (0, 0);
    for r in results {
        let (r, t, q) = r?;
        rep.instances += 1;
        rep.checks += r.checks;
        rep.failures += r.failures;
        rep.findings.extend(r.findings.into_iter().take(50usize.saturating_sub(rep.findings.len())));
        twins += t;
        quads += q;
    }
    rep.note(format!("{twins} twins constructed, {quads} quadruplets"));
    rep.count("twins", twins as u64);
    rep.count("quadruplets", quads as u64);
    if twins == 0 {
        rep.failures += 1;
        rep.note("no twins were exercised");
    }
    Ok(rep)
}

fn twin_instance(rng: &mut TrialRng, opts: &VerifyOptions, rep: &mut SuiteReport) -> Result<(usize, usize)> {
    let inst = random_instance(rng, 2, opts.sample_max_m, opts.max_delta);
    let (d, a) = (&inst.degrees, &inst.anchor);
    let graph = if rng.gen_bool(0.5) { inst.graph.clone() } else { switching::switch_graph(&inst.graph, a)? };
    let s = random_sequence(&graph, rng);
    let fam = family_of_sequence(&s, a);
    let gamma = s.gamma_profile(d)?;
    let z = exact::z_sigma(d, &s)?;
    let name = || format!("{} sigma={s}", describe(d, a));
    let (mut twins, mut quads) = (0, 0);
    let mut partners = [None, None];
    for (slot, kind) in [TwinKind::Bx, TwinKind::Ay].into_iter().enumerate() {
        if let Some(tw) = twin_partner(&s, a, kind)? {
            twins += 1;
            rep.check(tw.gamma_profile(d)? == gamma, name, "twin gamma profile", Some(tw.to_string()));
            rep.check(exact::z_sigma(d, &tw)? == z, name, "twin Z equality", Some(tw.to_string()));
            rep.check(family_of_sequence(&tw, a) == fam.map(Family::flip), name, "twin family", Some(tw.to_string()));
            let g2 = tw.to_graph(d)?;
            let back = match fam {
                Some(Family::Upper) => switching::unswitch_graph(&g2, a)?,
                _ => switching::switch_graph(&g2, a)?,
            };
            rep.check(cluster_key(&back, a) == cluster_key(&graph, a), name, "twin in partner cluster", None);
            rep.check(twin_partner(&tw, a, kind)?.as_ref() == Some(&s), name, "twin involution", None);
            partners[slot] = Some(tw);
        }
    }
    let t = a.saturation_times(&s)?;
    if t.t_x < t.t_b && t.t_y < t.t_a {
        quads += 1;
        let via_bx = match &partners[0] {
            Some(p) => twin_partner(p, a, TwinKind::Ay)?,
            None => None,
        };
        let via_ay = match &partners[1] {
            Some(p) => twin_partner(p, a, TwinKind::Bx)?,
            None => None,
        };
        rep.check(via_bx.is_some() && via_bx == via_ay, name, "quadruplet commutation", None);
    }
    Ok((twins, quads))
}

/// All upper clusters of sorted sequences with exactly `m` edges, one
/// representative each, up to the copy-0 anchor symmetry.
pub fn all_upper_clusters(m: u64, max_delta: u32) -> Result<Vec<Cluster>> {
    let mut out = Vec::new();
    for d in enumerate_sorted(2 * m as usize, max_delta, m) {
        if d.m() != m {
            continue;
        }
        for a in canonical_anchors(&d) {
            let mut seen = BTreeSet::new();
            let mut reps = Vec::new();
            let empty = ConfigGraph::empty(d.clone());
            let vs = a.vertices();
            for_each_upper_graph(&d, &a, &mut |mates| {
                let key: Vec<u32> = mates
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| !vs.contains(&(empty.vertex_of(i) as u32)))
                    .map(|(_, &j)| if vs.contains(&(empty.vertex_of(j as usize) as u32)) { u32::MAX - 1 } else { j })
                    .collect();
                if seen.insert(key) {
                    reps.push(mates.to_vec());
                }
            })?;
            for mates in reps {
                let g = ConfigGraph::from_mates(d.clone(), mates)?;
                out.push(enumerate_cluster(&g, &a, Family::Upper)?);
            }
        }
    }
    Ok(out)
}

fn partition_findings(rep: &mut SuiteReport, name: String, r: &TwinPartitionReport) {
    let checks: [(&str, usize); 7] = [
        ("twin properties", r.twin_failures),
        ("quadruplets", r.quadruplet_failures),
        ("twin closure", r.closure_failures),
        ("non-twin pairing", r.nontwin_failures),
        ("twin ordering", r.ordering_failures),
        ("complete switch", r.completeswitch_failures),
        ("complete switch strict under gap", r.gap_strict_failures),
    ];
    let z_ok = r.z_twins_plus == r.z_twins_minus;
    rep.check(z_ok, || name.clone(), "Z-sum equality", None);
    for (check, fails) in checks {
        rep.check(fails == 0, || name.clone(), check, Some(format!("{fails} failures")));
    }
}

/// Largest sampled cluster pair, in orderings, for the sequence-level checks.
pub const PARTITION_SAMPLE_ORDERINGS: u128 = 100_000;

fn twin_partition(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("twin-partition", opts.seed);
    // (i) by the twin-mass DP over every cluster with m <= max_m
    let seqs: Vec<DegreeSequence> = enumerate_sorted(2 * opts.max_m as usize, opts.max_delta, opts.max_m)
        .into_iter()
        .filter(|d| !canonical_anchors(d).is_empty())
        .collect();
    let sums: Vec<degproc::Result<switching::TwinSumSweep>> =
        opts.pool()?.install(|| seqs.par_iter().map(switching::twin_sum_sweep).collect());
    let mut sweep = switching::TwinSumSweep::default();
    for r in sums {
        sweep.merge(r?);
    }
    rep.instances += sweep.clusters;
    rep.checks += sweep.clusters;
    rep.failures += sweep.violations.len();
    for v in sweep.violations.iter().take(20) {
        rep.findings.push(Finding {
            instance: describe(&v.degrees, &v.anchor),
            check: "Z-sum equality".into(),
            witness: Some(v.detail.clone()),
            ratio: None,
            pass: false,
        });
    }
    rep.count("z_sum_clusters", sweep.clusters as u64);
    rep.count("z_sum_clusters_with_twins", sweep.clusters_with_twins as u64);
    rep.note(format!(
        "Z-sum equality: {} clusters (m <= {}), {} with nonempty T",
        sweep.clusters, opts.max_m, sweep.clusters_with_twins
    ));

    // (ii)-(iv), twins, quadruplets and counterpart pairs, sequence by sequence
    let mut work: Vec<Cluster> = Vec::new();
    for m in 2..=opts.partition_max_m {
        work.extend(all_upper_clusters(m, opts.max_delta)?);
    }
    let exhaustive = work.len();
    let mut rng = trial_rng(opts.seed, 71);
    let sample_hi = opts.max_m.max(opts.partition_max_m);
    let mut sampled = 0;
    if sample_hi > opts.partition_max_m {
        while sampled < opts.partition_samples {
            let inst = random_instance(&mut rng, opts.partition_max_m + 1, sample_hi, opts.max_delta);
            let c = enumerate_cluster(&inst.graph, &inst.anchor, Family::Upper)?;
            // both sides of the pair, every ordering of every member
            let orderings = 2 * c.len() as u128 * (1..=inst.degrees.m() as u128).product::<u128>();
            if orderings <= PARTITION_SAMPLE_ORDERINGS {
                work.push(c);
                sampled += 1;
            }
        }
    }
    let results: Vec<Result<(String, TwinPartitionReport)>> = opts.pool()?.install(|| {
        work.par_iter()
            .map(|c| {
                let d = c.members.iter().next().map(|g| g.degree_sequence().clone()).ok_or_else(|| {
                    LabError::InvalidArgument("empty cluster".into())
                })?;
                let r = switching::verify_twin_partition(c, &opts.zeta_for(d.delta()))?;
                Ok((describe(&d, &c.anchor), r))
            })
            .collect()
    });
    let mut total = TwinPartitionReport::default();
    for r in results {
        let (name, r) = r?;
        rep.instances += 1;
        partition_findings(&mut rep, name, &r);
        total.merge(&r);
    }
    rep.count("partition_sequences", total.sequences as u64);
    rep.count("partition_quadruplets", total.quadruplets as u64);
    rep.count("partition_sampled_clusters", sampled as u64);
    rep.note(format!(
        "partition checks: {exhaustive} exhaustive clusters (m <= {}), {sampled} sampled clusters (m <= {sample_hi}); \
         {} sequences, {} in T, {} quadruplets, {} counterpart pairs, {} gap pairs",
        opts.partition_max_m,
        total.sequences,
        total.twins_plus + total.twins_minus,
        total.quadruplets,
        total.completeswitch_checked,
        total.gap_pairs
    ));
    Ok(rep)
}

/// Copies assigned in edge order.
pub fn to_config(g: &MultiGraph) -> Result<ConfigGraph> {
    let d = DegreeSequence::new(g.degrees())?;
    let mut next = vec![0u32; g.n()];
    let mut c = ConfigGraph::empty(d);
    for &(u, v) in g.edges() {
        let p = Point::new(u, next[u as usize]);
        let q = Point::new(v, next[v as usize]);
        next[u as usize] += 1;
        next[v as usize] += 1;
        c.add_edge(p, q)?;
    }
    Ok(c)
}

/// A random sequence in the window: a fraction in `[ξ, 1−ξ]` of vertices of
/// degree at most `k`, the rest above.
fn window_degrees<R: Rng>(rng: &mut R, n: usize, k: u32, delta: u32) -> DegreeSequence {
    loop {
        let frac = rng.gen_range(0.3..0.7);
        let mut degs: Vec<u32> =
            (0..n).map(|_| if rng.gen_bool(frac) { rng.gen_range(1..=k) } else { rng.gen_range(k + 1..=delta) }).collect();
        if degs.iter().sum::<u32>() % 2 == 1 {
            degs[0] = if degs[0] == 1 { 2.min(k) } else { degs[0] - 1 };
        }
        if let Ok(d) = DegreeSequence::new(degs) {
            if d.degree_sum() % 2 == 0 && d.is_graphic() && d.window_check(k, &ratio(1, 4)) {
                return d;
            }
        }
    }
}

/// Uniform graphs with `|X_k − μ| ≤ γμ`.
fn near_mu_graphs<R: Rng>(d: &DegreeSequence, k: u32, gamma: f64, count: usize, rng: &mut R) -> Result<Vec<MultiGraph>> {
    let mu = to_f64(&d.mu(k)?);
    let mut sampler = UniformSampler::new(d)?;
    let mut out = Vec::new();
    for _ in 0..count * 50 {
        let g = sampler.sample(1 << 20, rng)?.graph;
        if (g.small_edge_count(k) as f64 - mu).abs() <= gamma * mu {
            out.push(g);
            if out.len() == count {
                break;
            }
        }
    }
    Ok(out)
}

/// Bound asserted on `max |L_G/U_H − 1| / γ`.
pub const COUNT_RATIO_D: f64 = 8.0;

fn count_ratio(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("count-ratio", opts.seed);
    let mut rng = trial_rng(opts.seed, 81);
    let (k, delta) = (2, opts.max_delta.max(3));
    for n in [200usize, 500, 1000] {
        let mut worst: f64 = 0.0;
        for gamma in [0.05, 0.1] {
            let d = window_degrees(&mut rng, n, k, delta);
            let gs = near_mu_graphs(&d, k, gamma, 6, &mut rng)?;
            let counts: Vec<(u64, u64)> = gs
                .iter()
                .map(|g| {
                    let c = to_config(g)?;
                    Ok((switching::count_lower(&c, k)?, switching::count_upper(&c, k)?))
                })
                .collect::<Result<_>>()?;
            rep.instances += 1;
            for (l, _) in &counts {
                for (_, u) in &counts {
                    let dev = (*l as f64 / *u as f64 - 1.0).abs() / gamma;
                    worst = worst.max(dev);
                    rep.check(dev <= COUNT_RATIO_D, || format!("n={n} gamma={gamma} d={}", crate::formats::format_degrees_compact(&d)), "count-ratio", Some(format!("|L/U-1|/gamma = {dev:.3}")));
                }
            }
        }
        rep.note(format!("n={n}: max |L_G/U_H - 1|/gamma = {worst:.3}"));
    }
    Ok(rep)
}

/// Good ordered `(ab, xy)` choices over all `(small, large)` choices for `σ`.
pub fn good_choice_fraction(g: &MultiGraph, sigma: &[(u32, u32)], k: u32, zeta: &BigRational) -> (u64, u64) {
    let deg = g.degrees();
    let m = sigma.len();
    let s = switching::good_threshold(m, zeta);
    let mut last = vec![0usize; g.n()];
    let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); g.n()];
    for (i, &(u, v)) in sigma.iter().enumerate() {
        last[u as usize] = last[u as usize].max(i + 1);
        last[v as usize] = last[v as usize].max(i + 1);
        adj[u as usize].insert(v);
        adj[v as usize].insert(u);
    }
    let small: Vec<(u32, u32)> = sigma.iter().copied().filter(|&(u, v)| deg[u as usize] <= k && deg[v as usize] <= k).collect();
    let large: Vec<(u32, u32)> = sigma.iter().copied().filter(|&(u, v)| deg[u as usize] > k && deg[v as usize] > k).collect();
    let mut good = 0u64;
    for &(a, b) in &small {
        if last[a as usize] > s || last[b as usize] > s {
            continue;
        }
        for &(x, y) in &large {
            let touch = |v: u32| adj[v as usize].contains(&x) || adj[v as usize].contains(&y);
            if !touch(a) && !touch(b) {
                good += 1;
            }
        }
    }
    (4 * good, 4 * (small.len() * large.len()) as u64)
}

fn good_fraction(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("good-fraction", opts.seed);
    let mut rng = trial_rng(opts.seed, 91);
    let (k, delta) = (2, opts.max_delta.max(3));
    let zeta = opts.zeta_for(delta);
    let mut worst: f64 = 1.0;
    for n in [200usize, 500] {
        let d = window_degrees(&mut rng, n, k, delta);
        for g in near_mu_graphs(&d, k, 0.1, 3, &mut rng)? {
            rep.instances += 1;
            for _ in 0..5 {
                let mut sigma = g.edges().to_vec();
                sigma.shuffle(&mut rng);
                let (good, all) = good_choice_fraction(&g, &sigma, k, &zeta);
                let f = good as f64 / all.max(1) as f64;
                worst = worst.min(f);
                rep.check(2 * good >= all, || format!("n={n}"), "good-fraction", Some(format!("{good}/{all}")));
            }
        }
    }
    rep.note(format!("smallest good fraction {worst:.4}"));
    Ok(rep)
}

