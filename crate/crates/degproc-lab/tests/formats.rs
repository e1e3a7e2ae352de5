use degproc::fixtures::counterexample_pair;
use degproc::rng::trial_rng;
use degproc::{DegreeSequence, MultiGraph};
use degproc_lab::formats::{self, GraphRecord};
use degproc_lab::harness;
use proptest::prelude::*;
use rand::Rng;

fn multigraph() -> impl Strategy<Value = MultiGraph> {
    (2usize..12).prop_flat_map(|n| {
        prop::collection::vec((0..n as u32, 0..n as u32), 0..30).prop_map(move |pairs| {
            MultiGraph::from_edges(n, pairs.into_iter().filter(|(u, v)| u != v)).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn edge_list_round_trip(g in multigraph()) {
        let back = formats::parse_edge_list(&formats::write_edge_list(&g)).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn graph_record_round_trip(g in multigraph(), label in prop::option::of("[a-z]{1,8}")) {
        let rec = GraphRecord::new(label.as_deref(), &g);
        let line = serde_json::to_string(&rec).unwrap();
        let back = formats::read_graph_records(&format!("{line}\n\n{line}\n")).unwrap();
        prop_assert_eq!(back.len(), 2);
        prop_assert_eq!(&back[0], &rec);
        prop_assert_eq!(back[0].to_graph().unwrap(), g);
    }

    #[test]
    fn compact_degrees_round_trip(v in prop::collection::vec(1u32..9, 1..40)) {
        let d = DegreeSequence::new(v).unwrap();
        let back = formats::parse_degrees(&formats::format_degrees_compact(&d)).unwrap();
        prop_assert_eq!(back.degree_counts(), d.degree_counts());
    }

    #[test]
    fn config_graph_round_trip(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let d = DegreeSequence::new((0..rng.gen_range(2..8)).map(|_| rng.gen_range(1..4)).collect()).unwrap();
        prop_assume!(d.degree_sum().is_multiple_of(2));
        let pairing = degproc::process::sample_config_model(&d, &mut rng).unwrap();
        prop_assume!(pairing.loop_count() == 0);
        let mut g = degproc::ConfigGraph::empty(d.clone());
        for &(u, v) in pairing.vertex_pairs() {
            let p = g.free_points(u as usize)[0];
            let q = g.free_points(v as usize)[0];
            g.add_edge(p, q).unwrap();
        }
        let back = formats::parse_config_graph(&formats::write_config_graph(&g)).unwrap();
        prop_assert_eq!(back, g);
    }
}

#[test]
fn fixture_files_match_builtin_pair() {
    let f = counterexample_pair();
    let plus = formats::parse_config_graph(include_str!("../fixtures/pair_plus.txt")).unwrap();
    let minus = formats::parse_config_graph(include_str!("../fixtures/pair_minus.txt")).unwrap();
    assert_eq!(plus, f.g_plus);
    assert_eq!(minus, f.g_minus);
}

#[test]
fn degree_parsing() {
    let d = formats::parse_degrees("1:2 3 3:1 2").unwrap();
    assert_eq!(d.degrees(), &[1, 1, 3, 3, 2]);
    assert!(formats::parse_degrees("1:x").is_err());
    assert!(formats::parse_degrees("0 1 1").is_err());
    assert_eq!(formats::parse_degrees_lenient("0 1 1").unwrap().n(), 3);
}

#[test]
fn malformed_inputs_report_lines() {
    let err = formats::parse_config_graph("degrees: 1 1\n# comment\n1.1 2.1\n").unwrap_err();
    assert!(err.to_string().contains('3'), "{err}");
    assert!(formats::parse_edge_list("n 3\n1 0\n").is_err());
    assert!(formats::parse_edge_list("3\n1 2\n").is_err());
    assert!(formats::parse_config_graph("degrees: 1 1\n1.1-1.1\n").is_err());
    assert!(GraphRecord { label: None, n: 2, edges: vec![(0, 1)] }.to_graph().is_err());
}

#[test]
fn trials_do_not_depend_on_worker_count() {
    let f = |t: u64, rng: &mut degproc::rng::TrialRng| (t, rng.gen::<u64>());
    let one = harness::run_trials(200, 1, 9, f).unwrap();
    let many = harness::run_trials(200, 4, 9, f).unwrap();
    assert_eq!(one, many);
    assert_ne!(one, harness::run_trials(200, 4, 10, f).unwrap());
    assert!(harness::run_trials(0, 1, 9, f).is_err());
}

#[test]
fn summary_statistics() {
    let s = harness::Summary::of(&[1.0, 2.0, 3.0, 4.0]);
    assert!((s.sd() - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert_eq!(harness::fraction_within(&[1.0, 2.0, 3.0, 4.0], 2.5, 1.0), 0.5);
}
