//! Acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line to the raw stderr handle so it shows up uncaptured.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use degproc::exact::{self, Variant};
use degproc::odemethod::{self, LimitProfile};
use degproc::process::{self, UniformSampler};
use degproc::rational::{ratio, to_f64};
use degproc::{switching, DegreeSequence, MultiGraph};
use degproc_lab::experiments::{self, Label, SimVariant, SimulationSpec};
use degproc_lab::harness::{self, Summary};
use degproc_lab::verify::{self, VerifyOptions};

const SEED: u64 = 20_261_018;
const N: usize = 2000;
const K: u32 = 1;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let line = format!("{} criterion {id:>2} {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {id} failed: {detail}");
}

fn window() -> DegreeSequence {
    DegreeSequence::from_counts(&[(1, N / 2), (7, N / 2)]).unwrap()
}

fn mu() -> f64 {
    to_f64(&window().mu(K).unwrap())
}

fn opts() -> VerifyOptions {
    VerifyOptions { seed: SEED, ..Default::default() }
}

struct Pool {
    graphs: Vec<MultiGraph>,
    elapsed: Duration,
}

fn uniform_pool() -> &'static Pool {
    static POOL: OnceLock<Pool> = OnceLock::new();
    POOL.get_or_init(|| {
        let d = window();
        let start = Instant::now();
        let graphs = harness::run_trials(500, harness::default_workers(), SEED, |_, rng| {
            UniformSampler::new(&d).unwrap().sample(experiments::UNIFORM_MAX_RETRIES, rng).unwrap().graph
        })
        .unwrap();
        Pool { graphs, elapsed: start.elapsed() }
    })
}

fn process_pool() -> &'static Pool {
    static POOL: OnceLock<Pool> = OnceLock::new();
    POOL.get_or_init(|| {
        let spec = SimulationSpec {
            degrees: window(),
            k: K,
            variant: SimVariant::Standard,
            trials: 200,
            seed: SEED + 1,
            conditioned: true,
            max_retries: process::DEFAULT_MAX_RETRIES,
        };
        let start = Instant::now();
        let graphs = experiments::simulate(&spec, harness::default_workers())
            .unwrap()
            .into_iter()
            .map(|o| o.graph.expect("conditioned runs complete"))
            .collect();
        Pool { graphs, elapsed: start.elapsed() }
    })
}

fn counts(graphs: &[MultiGraph]) -> Vec<f64> {
    graphs.iter().map(|g| g.small_edge_count(K) as f64).collect()
}

#[test]
fn criterion_01_counterexample() {
    let fixture = experiments::load_fixture(
        include_str!("../fixtures/pair_plus.txt"),
        include_str!("../fixtures/pair_minus.txt"),
    )
    .unwrap();
    let start = Instant::now();
    let rep = experiments::counterexample(&fixture, false).unwrap();
    let dp_time = start.elapsed();
    let start = Instant::now();
    let perm = experiments::counterexample(&fixture, true).unwrap();
    let perm_time = start.elapsed();
    let tol = experiments::PUBLISHED_TOLERANCE;
    let pass = (rep.relaxed() - 0.95652).abs() <= tol
        && (rep.standard() - 0.82164).abs() <= tol
        && perm.permutation_check == Some(true)
        && dp_time < Duration::from_secs(10)
        && perm_time < Duration::from_secs(60);
    report(
        1,
        "counterexample ratios",
        pass,
        format!(
            "relaxed {} ({}), standard {} ({}), tolerance {tol:e}; permutation sum agrees: {:?}; DP {:.2?}, permutations {:.2?}",
            rep.relaxed_decimal, rep.relaxed_ratio, rep.standard_decimal, rep.standard_ratio, perm.permutation_check, dp_time, perm_time
        ),
    );
}

#[test]
fn criterion_02_normalization() {
    let start = Instant::now();
    let rep = verify::run_suite("normalization", &VerifyOptions { max_m: 5, max_delta: 3, ..opts() }).unwrap();
    let elapsed = start.elapsed();
    let pass = rep.passed() && elapsed < Duration::from_secs(60);
    report(
        2,
        "probability normalization",
        pass,
        format!("{} sequences (m <= 5, delta <= 3), {} exact checks, {} failures, {elapsed:.2?}", rep.instances, rep.checks, rep.failures),
    );
}

#[test]
fn criterion_03_cluster_z_order() {
    let start = Instant::now();
    let rep = verify::run_suite("cluster-z-order", &VerifyOptions { max_m: 7, max_delta: 4, ..opts() }).unwrap();
    let elapsed = start.elapsed();
    let ratio = rep.findings.iter().find_map(|f| f.ratio.clone()).unwrap_or_default();
    let pass = rep.passed() && rep.get("clusters") > 0 && elapsed < Duration::from_secs(30 * 60);
    report(
        3,
        "Z(C+) >= Z(C-) exhaustively",
        pass,
        format!(
            "{} graphs, {} clusters (m <= 7, delta <= 4), {} violations, min ratio {ratio}, {elapsed:.2?}",
            rep.get("graphs"),
            rep.get("clusters"),
            rep.failures
        ),
    );
}

#[test]
fn criterion_04_twins() {
    let start = Instant::now();
    let twins = verify::run_suite("twin-z-equality", &VerifyOptions { instances: 10_000, sample_max_m: 10, ..opts() }).unwrap();
    let sums = verify::run_suite("twin-partition", &VerifyOptions { max_m: 7, partition_samples: 100, ..opts() }).unwrap();
    let elapsed = start.elapsed();
    let pass = twins.passed()
        && twins.get("twins") > 0
        && twins.get("quadruplets") > 0
        && sums.passed()
        && sums.get("z_sum_clusters_with_twins") > 0;
    report(
        4,
        "twin identities",
        pass,
        format!(
            "10^4 instances (m <= 10): {} twins, {} quadruplets, {} failures; Z-sum equality over {} clusters (m <= 7, {} with twins); \
             sequence-level checks on {} sequences, {} failures; {elapsed:.2?}",
            twins.get("twins"),
            twins.get("quadruplets"),
            twins.failures,
            sums.get("z_sum_clusters"),
            sums.get("z_sum_clusters_with_twins"),
            sums.get("partition_sequences"),
            sums.failures
        ),
    );
}

#[test]
fn criterion_05_counting() {
    let rep = verify::run_suite("counting", &VerifyOptions { instances: 1000, ..opts() }).unwrap();
    let f = degproc::fixtures::counterexample_pair();
    let u = switching::count_upper(&f.g_plus, 2).unwrap();
    let ub = switching::count_upper_bruteforce(&f.g_plus, 2).unwrap();
    let pass = rep.passed() && rep.instances == 1000 && u == 16 && ub == 16;
    report(
        5,
        "counting formulas",
        pass,
        format!("{} instances, {} checks, {} failures; U_G on the pair: formula {u}, brute force {ub}", rep.instances, rep.checks, rep.failures),
    );
}

#[test]
fn criterion_06_uniform_concentration() {
    let pool = uniform_pool();
    let xs = counts(&pool.graphs);
    let (mu, eps) = (mu(), 0.1);
    let frac = harness::fraction_within(&xs, mu, eps * mu);
    let trials = xs.len() as f64;
    let floor = 0.99 - 3.0 * (0.99 * 0.01 / trials).sqrt();
    let s = Summary::of(&xs);
    let pass = frac >= floor && pool.elapsed < Duration::from_secs(5 * 60);
    report(
        6,
        "uniform X_1 within eps*mu",
        pass,
        format!(
            "{:.3} of {} within +-{:.2} of mu={mu:.2} (need >= {floor:.4}); mean {:.2}, sd {:.2}; {:.1?}",
            frac,
            xs.len(),
            eps * mu,
            s.mean,
            s.sd(),
            pool.elapsed
        ),
    );
}

#[test]
fn criterion_07_process_excess() {
    let pool = process_pool();
    let xs = counts(&pool.graphs);
    let mu = mu();
    let s = Summary::of(&xs);
    let lower = s.mean - 3.0 * s.stderr();
    let alpha = s.mean / mu - 1.0;
    report(
        7,
        "conditioned process X_1 above mu",
        lower > mu,
        format!("mean {:.2} over {} runs, one-sided 3 sigma bound {lower:.2} > mu={mu:.2}; empirical alpha {alpha:.3}", s.mean, xs.len()),
    );
}

#[test]
fn criterion_08_ode() {
    let profile = LimitProfile::from_pairs(&[(1, ratio(1, 2)), (7, ratio(1, 2))], K).unwrap();
    let traj = odemethod::integrate(&profile, 1e-4).unwrap();
    let gap = traj.closed_form_gap();
    let full = profile.with_k(7).unwrap();
    let mass = odemethod::rho_k(&traj, &full, 7).unwrap().rho;
    let big_t = to_f64(&profile.big_t());
    let rho = odemethod::rho_k(&traj, &profile, K).unwrap().rho;
    let mu_hat = to_f64(&odemethod::mu_hat(&profile, K).unwrap());
    let cond = odemethod::sufficient_condition(&profile, K);
    let mc = Summary::of(&counts(&process_pool().graphs)).mean / N as f64;
    let rel = (mc - rho).abs() / rho;
    let pass = gap <= 1e-6 && (mass - big_t).abs() <= 1e-4 && rho > mu_hat && cond.holds && rel <= 0.02;
    report(
        8,
        "ODE pipeline",
        pass,
        format!(
            "sup |u_j - closed form| {gap:.1e}; sum x(T) {mass:.6} vs T={big_t}; rho_1 {rho:.6} > {mu_hat}; \
             condition {} (margin {:.4}); MC X_1/n {mc:.5} vs rho_1, relative {rel:.4}",
            cond.holds, cond.margin
        ),
    );
}

#[test]
fn criterion_09_completion() {
    let d = DegreeSequence::new(vec![2, 2, 2, 2]).unwrap();
    let trials = 1_000_000u64;
    let mut lines = Vec::new();
    let mut pass = true;
    for (i, v) in [Variant::Standard, Variant::Relaxed].into_iter().enumerate() {
        let p = to_f64(&exact::completion_prob_exact(&d, v, 1 << 20).unwrap());
        let done = harness::run_trials(trials, harness::default_workers(), SEED + 10 + i as u64, |_, rng| process::run(&d, v, rng).completed)
            .unwrap();
        let freq = done.iter().filter(|&&c| c).count() as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        let z = (freq - p) / se;
        pass &= z.abs() <= 3.0;
        lines.push(format!("{v:?}: exact {p:.6}, MC {freq:.6}, z {z:.2}"));
    }
    report(9, "completion probability of (2,2,2,2)", pass, format!("{} at 10^6 trials each", lines.join("; ")));
}

#[test]
fn criterion_10_distinguisher() {
    let d = window();
    let mut records: Vec<_> = uniform_pool().graphs[..200].iter().map(|g| experiments::record_of(Label::Uniform, g)).collect();
    records.extend(process_pool().graphs.iter().map(|g| experiments::record_of(Label::Process, g)));
    let rep = experiments::distinguish(&records, &d, K, None, SEED).unwrap();
    let acc = rep.accuracy.unwrap_or(0.0);
    report(
        10,
        "distinguisher accuracy",
        acc >= 0.99,
        format!(
            "{}/{} correct ({acc:.4}) after calibrating beta={:.3} on {} held-out graphs",
            rep.correct, rep.evaluated, rep.beta, rep.calibration_size
        ),
    );
}

#[test]
fn criterion_11_tvd_search() {
    let start = Instant::now();
    let sweep = experiments::tvd_sweep(8, 3, 12, 200_000).unwrap();
    let best = sweep.positive().max_by(|a, b| a.tvd_decimal.total_cmp(&b.tvd_decimal));
    let detail = match best {
        Some(r) => format!(
            "{} of {} sequences (n <= 8, delta <= 3) have TVD > 0, {} skipped; largest {} = {:.5} for [{}]; {:.1?}",
            sweep.positive().count(),
            sweep.rows.len(),
            sweep.skipped.len(),
            r.tvd,
            r.tvd_decimal,
            r.degrees,
            start.elapsed()
        ),
        None => format!("no positive TVD among {} sequences", sweep.rows.len()),
    };
    report(11, "positive TVD found", best.is_some(), detail);
}
