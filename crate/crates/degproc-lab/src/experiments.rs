//! Experiment drivers behind the CLI subcommands.

use std::io::Write;
use std::str::FromStr;

use degproc::exact::{self, Variant};
use degproc::fixtures::{self, CounterexamplePair};
use degproc::odemethod::{self, LimitProfile, OdeTrajectory};
use degproc::process::{self, UniformSampler};
use degproc::rational::{exact_string, to_decimal, to_f64};
use degproc::{BigRational, DegreeSequence, MultiGraph};
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::formats::GraphRecord;
use crate::harness::{self, Summary};

/// Published five-decimal values of the two counterexample ratios.
pub const PUBLISHED_RELAXED: f64 = 0.95652;
pub const PUBLISHED_STANDARD: f64 = 0.82164;
pub const PUBLISHED_TOLERANCE: f64 = 5e-5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub relaxed_ratio: String,
    pub relaxed_decimal: String,
    pub standard_ratio: String,
    pub standard_decimal: String,
    pub small_edges_plus: usize,
    pub small_edges_minus: usize,
    /// Whether the permutation sum reproduced the subset DP exactly.
    pub permutation_check: Option<bool>,
}

impl CounterexampleReport {
    pub fn relaxed(&self) -> f64 {
        self.relaxed_decimal.parse().unwrap_or(f64::NAN)
    }

    pub fn standard(&self) -> f64 {
        self.standard_decimal.parse().unwrap_or(f64::NAN)
    }
}

/// Exact `Z(G+)/Z(G−)` and `P(G+)/P(G−)` for the pair, cross-checked
/// against the published values.
pub fn counterexample(fixture: &CounterexamplePair, permutation_check: bool) -> Result<CounterexampleReport> {
    let (gp, gm) = (&fixture.g_plus, &fixture.g_minus);
    let relaxed = exact::z_graph(gp)? / exact::z_graph(gm)?;
    let d = &fixture.degrees;
    let standard = exact::prob_standard(&gp.project(), d)? / exact::prob_standard(&gm.project(), d)?;
    let perm = if permutation_check {
        let r2 = exact::z_graph_bruteforce(gp)? / exact::z_graph_bruteforce(gm)?;
        Some(r2 == relaxed)
    } else {
        None
    };
    let k = fixture.degrees.degree(fixture.a.vertex as usize).max(fixture.degrees.degree(fixture.b.vertex as usize));
    let rep = CounterexampleReport {
        relaxed_decimal: to_decimal(&relaxed, 5),
        standard_decimal: to_decimal(&standard, 5),
        relaxed_ratio: exact_string(&relaxed),
        standard_ratio: exact_string(&standard),
        small_edges_plus: gp.small_edge_count(k),
        small_edges_minus: gm.small_edge_count(k),
        permutation_check: perm,
    };
    let off = |x: &BigRational, target: f64| (to_f64(x) - target).abs() > PUBLISHED_TOLERANCE;
    if off(&relaxed, PUBLISHED_RELAXED) || off(&standard, PUBLISHED_STANDARD) {
        return Err(LabError::FixtureSuspect(format!(
            "ratios {} and {} do not match {PUBLISHED_RELAXED} and {PUBLISHED_STANDARD}",
            rep.relaxed_decimal, rep.standard_decimal
        )));
    }
    if perm == Some(false) {
        return Err(LabError::FixtureSuspect("permutation sum disagrees with subset DP".into()));
    }
    Ok(rep)
}

/// Loads a pair from two configuration-graph files sharing the built-in anchor.
pub fn load_fixture(plus: &str, minus: &str) -> Result<CounterexamplePair> {
    let builtin = fixtures::counterexample_pair();
    let g_plus = crate::formats::parse_config_graph(plus)?;
    let g_minus = crate::formats::parse_config_graph(minus)?;
    if g_plus.degree_sequence() != g_minus.degree_sequence() {
        return Err(LabError::DegreeMismatch("the two graphs have different degrees".into()));
    }
    Ok(CounterexamplePair { degrees: g_plus.degree_sequence().clone(), g_plus, g_minus, ..builtin })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimVariant {
    Standard,
    Relaxed,
    Uniform,
}

/// Pairings tried per uniform sample; degree-7 profiles need tens of thousands.
pub const UNIFORM_MAX_RETRIES: u64 = 1_000_000;

impl SimVariant {
    pub fn default_retries(self) -> u64 {
        match self {
            SimVariant::Uniform => UNIFORM_MAX_RETRIES,
            _ => process::DEFAULT_MAX_RETRIES,
        }
    }
}

impl FromStr for SimVariant {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(SimVariant::Standard),
            "relaxed" => Ok(SimVariant::Relaxed),
            "uniform" => Ok(SimVariant::Uniform),
            _ => Err(LabError::InvalidArgument(format!("unknown variant `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimulationSpec {
    pub degrees: DegreeSequence,
    pub k: u32,
    pub variant: SimVariant,
    pub trials: u64,
    pub seed: u64,
    /// Re-run incomplete processes until they complete.
    pub conditioned: bool,
    pub max_retries: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub x_k: u64,
    pub completed: bool,
    pub steps: usize,
    pub attempts: u64,
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub row: TrialRow,
    pub graph: Option<MultiGraph>,
}

pub fn simulate(spec: &SimulationSpec, workers: usize) -> Result<Vec<TrialOutcome>> {
    let d = &spec.degrees;
    if spec.k == 0 || spec.k >= d.delta() {
        return Err(degproc::Error::CutOutOfRange { k: spec.k, delta: d.delta() }.into());
    }
    let out = harness::run_trials(spec.trials, workers, spec.seed, |trial, rng| -> Result<TrialOutcome> {
        match spec.variant {
            SimVariant::Uniform => {
                let mut sampler = UniformSampler::new(d)?;
                let s = sampler.sample(spec.max_retries, rng)?;
                let row = TrialRow {
                    trial,
                    x_k: s.graph.small_edge_count(spec.k) as u64,
                    completed: true,
                    steps: s.graph.edge_count(),
                    attempts: s.attempts,
                };
                Ok(TrialOutcome { row, graph: Some(s.graph) })
            }
            SimVariant::Standard | SimVariant::Relaxed => {
                let v = if spec.variant == SimVariant::Standard { Variant::Standard } else { Variant::Relaxed };
                let (r, attempts) = if spec.conditioned {
                    let c = process::run_conditioned(d, v, spec.max_retries, rng)?;
                    (c.result, c.attempts)
                } else {
                    (process::run(d, v, rng), 1)
                };
                let row = TrialRow { trial, x_k: r.small_edge_count(spec.k) as u64, completed: r.completed, steps: r.steps, attempts };
                let graph = r.completed.then(|| r.graph.project());
                Ok(TrialOutcome { row, graph })
            }
        }
    })?;
    out.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimSummary {
    pub variant: SimVariant,
    pub seed: u64,
    pub n: usize,
    pub k: u32,
    pub mu: f64,
    pub trials: usize,
    pub completed: usize,
    pub mean: f64,
    pub variance: f64,
    pub eps: f64,
    pub within_eps: f64,
    /// `mean/μ − 1`.
    pub alpha: f64,
}

pub fn summarize(spec: &SimulationSpec, rows: &[TrialRow], eps: f64) -> Result<SimSummary> {
    let mu = to_f64(&spec.degrees.mu(spec.k)?);
    let xs: Vec<f64> = rows.iter().filter(|r| r.completed).map(|r| r.x_k as f64).collect();
    let s = Summary::of(&xs);
    Ok(SimSummary {
        variant: spec.variant,
        seed: spec.seed,
        n: spec.degrees.n(),
        k: spec.k,
        mu,
        trials: rows.len(),
        completed: xs.len(),
        mean: s.mean,
        variance: s.variance,
        eps,
        within_eps: harness::fraction_within(&xs, mu, eps * mu),
        alpha: s.mean / mu - 1.0,
    })
}

pub fn write_rows_csv<W: Write>(rows: &[TrialRow], summary: &SimSummary, w: W) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["trial", "x_k", "completed", "steps", "attempts", "seed"])?;
    for r in rows {
        c.write_record([
            r.trial.to_string(),
            r.x_k.to_string(),
            r.completed.to_string(),
            r.steps.to_string(),
            r.attempts.to_string(),
            summary.seed.to_string(),
        ])?;
    }
    c.write_record([
        "summary".to_string(),
        format!("mean={} var={}", summary.mean, summary.variance),
        format!("within_eps={}", summary.within_eps),
        format!("mu={}", summary.mu),
        format!("alpha={}", summary.alpha),
        summary.seed.to_string(),
    ])?;
    c.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Process,
    Uniform,
}

impl FromStr for Label {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "process" => Ok(Label::Process),
            "uniform" => Ok(Label::Uniform),
            _ => Err(LabError::InvalidArgument(format!("unknown label `{s}`"))),
        }
    }
}

/// Labels a graph `uniform` iff `|X_k − μ| ≤ βμ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distinguisher {
    pub k: u32,
    pub mu: f64,
    pub beta: f64,
}

impl Distinguisher {
    pub fn new(d: &DegreeSequence, k: u32, beta: f64) -> Result<Self> {
        Ok(Distinguisher { k, mu: to_f64(&d.mu(k)?), beta })
    }

    pub fn classify_count(&self, x_k: usize) -> Label {
        if (x_k as f64 - self.mu).abs() <= self.beta * self.mu {
            Label::Uniform
        } else {
            Label::Process
        }
    }

    pub fn classify(&self, g: &MultiGraph) -> Label {
        self.classify_count(g.small_edge_count(self.k))
    }
}

/// Midpoint of the mean relative deviations `|X_k − μ|/μ` of the two groups.
pub fn calibrate_beta(uniform: &[usize], process: &[usize], mu: f64) -> f64 {
    let dev = |xs: &[usize]| xs.iter().map(|&x| (x as f64 - mu).abs() / mu).sum::<f64>() / xs.len().max(1) as f64;
    (dev(uniform) + dev(process)) / 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub index: usize,
    pub x_k: usize,
    pub label: Label,
    pub truth: Option<Label>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistinguishReport {
    pub beta: f64,
    pub mu: f64,
    pub calibration_size: usize,
    pub evaluated: usize,
    pub correct: usize,
    pub accuracy: Option<f64>,
    pub decisions: Vec<Decision>,
}

/// Fraction of labeled graphs used to calibrate `β` when none is fixed.
pub const CALIBRATION_FRACTION: f64 = 0.2;

/// Classifies every record. Without `beta`, a seeded 20% split of the labeled
/// records calibrates `β` and only the rest is evaluated.
pub fn distinguish(records: &[GraphRecord], d: &DegreeSequence, k: u32, beta: Option<f64>, seed: u64) -> Result<DistinguishReport> {
    let mut graphs = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let g = r.to_graph()?;
        if g.degrees() != d.degrees() {
            return Err(LabError::DegreeMismatch(format!("record {i} does not have the given degrees")));
        }
        let truth = r.label.as_deref().map(Label::from_str).transpose()?;
        graphs.push((i, g.small_edge_count(k), truth));
    }
    let mu = to_f64(&d.mu(k)?);
    let mut order: Vec<usize> = (0..graphs.len()).collect();
    let (beta, calib) = match beta {
        Some(b) => (b, Vec::new()),
        None => {
            order.shuffle(&mut degproc::rng::trial_rng(seed, 0));
            let mut calib = Vec::new();
            for want in [Label::Uniform, Label::Process] {
                let of_label: Vec<usize> = order.iter().copied().filter(|&i| graphs[i].2 == Some(want)).collect();
                let take = ((of_label.len() as f64) * CALIBRATION_FRACTION).ceil() as usize;
                calib.extend_from_slice(&of_label[..take]);
            }
            let pick = |l: Label| -> Vec<usize> { calib.iter().filter(|&&i| graphs[i].2 == Some(l)).map(|&i| graphs[i].1).collect() };
            let (u, p) = (pick(Label::Uniform), pick(Label::Process));
            if u.is_empty() || p.is_empty() {
                return Err(LabError::InvalidArgument("calibration needs labeled graphs of both kinds".into()));
            }
            (calibrate_beta(&u, &p, mu), calib)
        }
    };
    let dist = Distinguisher { k, mu, beta };
    let mut decisions = Vec::new();
    let (mut correct, mut labeled) = (0, 0);
    for &(i, x, truth) in &graphs {
        if calib.contains(&i) {
            continue;
        }
        let label = dist.classify_count(x);
        if let Some(t) = truth {
            labeled += 1;
            correct += usize::from(t == label);
        }
        decisions.push(Decision { index: i, x_k: x, label, truth });
    }
    Ok(DistinguishReport {
        beta,
        mu,
        calibration_size: calib.len(),
        evaluated: decisions.len(),
        correct,
        accuracy: (labeled > 0).then(|| correct as f64 / labeled as f64),
        decisions,
    })
}

/// `j:r_j` blocks with rational `r_j`, e.g. `1:1/2 7:1/2`.
pub fn parse_profile(s: &str, k: u32) -> Result<LimitProfile> {
    let mut pairs = Vec::new();
    for tok in s.split_whitespace() {
        let (j, r) = tok.split_once(':').ok_or_else(|| LabError::InvalidArgument(format!("bad profile entry `{tok}`")))?;
        let j: u32 = j.parse().map_err(|_| LabError::InvalidArgument(format!("bad degree `{j}`")))?;
        let r: BigRational = r.parse().map_err(|_| LabError::InvalidArgument(format!("bad fraction `{r}`")))?;
        pairs.push((j, r));
    }
    let p = LimitProfile::from_pairs(&pairs, k)?;
    if k >= p.delta() {
        return Err(degproc::Error::CutOutOfRange { k, delta: p.delta() }.into());
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdeSummary {
    pub profile: Vec<String>,
    pub k: u32,
    pub big_t: String,
    pub step: f64,
    pub guard: f64,
    pub rho_k: f64,
    pub rho_k_lambda: f64,
    pub tail_error: f64,
    pub mu_hat: String,
    pub mu_hat_decimal: f64,
    pub rho_exceeds_mu_hat: bool,
    pub condition: bool,
    pub condition_margin: f64,
    pub closed_form_gap: f64,
    pub invariants_hold: bool,
}

pub fn ode(profile: &LimitProfile, step: f64) -> Result<(OdeSummary, OdeTrajectory)> {
    let k = profile.k();
    let tr = odemethod::integrate(profile, step)?;
    let rho = odemethod::rho_k(&tr, profile, k)?;
    let mu_hat = odemethod::mu_hat(profile, k)?;
    let cond = odemethod::sufficient_condition(profile, k);
    let summary = OdeSummary {
        profile: profile.fractions().iter().map(exact_string).collect(),
        k,
        big_t: exact_string(&profile.big_t()),
        step: tr.t.get(1).copied().unwrap_or(0.0),
        guard: tr.big_t - tr.t_end(),
        rho_k: rho.rho,
        rho_k_lambda: odemethod::rho_k_lambda(profile, k)?,
        tail_error: rho.tail_error,
        mu_hat: exact_string(&mu_hat),
        mu_hat_decimal: to_f64(&mu_hat),
        rho_exceeds_mu_hat: rho.rho > to_f64(&mu_hat),
        condition: cond.holds,
        condition_margin: cond.margin,
        closed_form_gap: tr.closed_form_gap(),
        invariants_hold: odemethod::check_invariants(&tr, profile).holds(1e-9),
    };
    Ok((summary, tr))
}

/// Columns `t, u, u_1..u_Δ, λ, x_{a,b}` with every `stride`-th grid row.
pub fn write_trajectory_csv<W: Write>(tr: &OdeTrajectory, stride: usize, w: W) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    let mut head = vec!["t".to_string(), "u".to_string()];
    head.extend((1..=tr.delta).map(|j| format!("u_{j}")));
    head.push("lambda".into());
    head.extend(tr.pairs.iter().map(|(a, b)| format!("x_{a}_{b}")));
    c.write_record(&head)?;
    let last = tr.len().saturating_sub(1);
    for i in (0..tr.len()).filter(|&i| i % stride.max(1) == 0 || i == last) {
        let mut row = vec![tr.t[i].to_string(), tr.u[i].to_string()];
        row.extend(tr.u_j[i].iter().map(|v| v.to_string()));
        row.push(tr.lambda[i].to_string());
        row.extend(tr.x[i].iter().map(|v| v.to_string()));
        c.write_record(&row)?;
    }
    c.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvdRow {
    pub degrees: String,
    pub tvd: String,
    pub tvd_decimal: f64,
    pub simple_graphs: usize,
    pub completion: String,
}

pub fn tvd(d: &DegreeSequence, max_graphs: usize) -> Result<TvdRow> {
    let r = exact::tv_distance_exact(d, max_graphs)?;
    Ok(TvdRow {
        degrees: d.to_string(),
        tvd_decimal: to_f64(&r.tvd),
        tvd: exact_string(&r.tvd),
        simple_graphs: r.graphs,
        completion: exact_string(&r.completion),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvdSweep {
    pub rows: Vec<TvdRow>,
    /// Sequences skipped because a budget was exceeded.
    pub skipped: Vec<String>,
}

impl TvdSweep {
    pub fn positive(&self) -> impl Iterator<Item = &TvdRow> {
        self.rows.iter().filter(|r| r.tvd != "0")
    }
}

/// Exact TVD for every graphic sorted sequence with `n ≤ max_n`, entries at
/// most `max_delta` and at most `max_m` edges.
pub fn tvd_sweep(max_n: usize, max_delta: u32, max_m: u64, max_graphs: usize) -> Result<TvdSweep> {
    let mut out = TvdSweep { rows: Vec::new(), skipped: Vec::new() };
    for d in degproc::degseq::enumerate_sorted(max_n, max_delta, max_m) {
        if !d.is_graphic() {
            continue;
        }
        match tvd(&d, max_graphs) {
            Ok(r) => out.rows.push(r),
            Err(LabError::Core(degproc::Error::Budget(_))) => out.skipped.push(d.to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Graph of a simulated outcome as a labeled record.
pub fn record_of(label: Label, g: &MultiGraph) -> GraphRecord {
    let l = match label {
        Label::Process => "process",
        Label::Uniform => "uniform",
    };
    GraphRecord::new(Some(l), g)
}

/// Convenience for tests and the CLI: the built-in pair as a config-graph text.
pub fn fixture_texts() -> (String, String) {
    let f = fixtures::counterexample_pair();
    (crate::formats::write_config_graph(&f.g_plus), crate::formats::write_config_graph(&f.g_minus))
}
