use std::sync::OnceLock;

use degproc::degseq::enumerate_sorted;
use degproc::exact::{self, EdgeSequence, Variant};
use degproc::process::{self, UniformSampler};
use degproc::rng::trial_rng;
use degproc::switching::{self, Family, SwitchAnchor, TwinKind};
use degproc::{ConfigGraph, DegreeSequence};
use proptest::prelude::*;
use rand::seq::SliceRandom;

/// Upper graphs for every canonical anchor of every small sequence.
fn instances() -> &'static [(SwitchAnchor, Vec<ConfigGraph>)] {
    static CELL: OnceLock<Vec<(SwitchAnchor, Vec<ConfigGraph>)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        for d in enumerate_sorted(7, 4, 6) {
            for anchor in switching::canonical_anchors(&d) {
                let mut graphs = Vec::new();
                switching::for_each_upper_graph(&d, &anchor, &mut |m| {
                    if graphs.len() < 64 {
                        graphs.push(ConfigGraph::from_mates(d.clone(), m.to_vec()).unwrap());
                    }
                })
                .unwrap();
                if !graphs.is_empty() {
                    out.push((anchor, graphs));
                }
            }
        }
        out
    })
}

fn pick(i: usize, j: usize, seed: u64) -> (&'static SwitchAnchor, &'static ConfigGraph, EdgeSequence) {
    let all = instances();
    let (anchor, graphs) = &all[i % all.len()];
    let g = &graphs[j % graphs.len()];
    let mut edges = g.edges();
    edges.shuffle(&mut trial_rng(seed, 0));
    (anchor, g, EdgeSequence::new(edges))
}

fn small_graphic() -> impl Strategy<Value = DegreeSequence> {
    prop::collection::vec(0u32..=4, 2..9)
        .prop_filter_map("not graphic", |v| DegreeSequence::new(v).ok().filter(|d| d.is_graphic() && d.m() > 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn switch_round_trip(i in any::<usize>(), j in any::<usize>()) {
        let (anchor, g, _) = pick(i, j, 0);
        prop_assert_eq!(switching::family_of_graph(g, anchor), Some(Family::Upper));
        let lower = switching::switch_graph(g, anchor).unwrap();
        prop_assert_eq!(switching::family_of_graph(&lower, anchor), Some(Family::Lower));
        prop_assert_eq!(&switching::unswitch_graph(&lower, anchor).unwrap(), g);
    }

    #[test]
    fn bar_and_counterpart_are_involutions(i in any::<usize>(), j in any::<usize>(), seed in any::<u64>()) {
        let (anchor, _, s) = pick(i, j, seed);
        prop_assert_eq!(switching::bar(&switching::bar(&s, anchor).unwrap(), anchor).unwrap(), s.clone());
        let c = switching::counterpart(&s, anchor).unwrap();
        prop_assert_eq!(switching::family_of_sequence(&c, anchor), Some(Family::Lower));
        prop_assert_eq!(switching::counterpart(&c, anchor).unwrap(), s);
    }

    #[test]
    fn twins_pair_up(i in any::<usize>(), j in any::<usize>(), seed in any::<u64>()) {
        let (anchor, g, s) = pick(i, j, seed);
        let d = g.degree_sequence();
        for kind in [TwinKind::Bx, TwinKind::Ay] {
            if let Some(t) = switching::twin_partner(&s, anchor, kind).unwrap() {
                prop_assert_ne!(&t, &s);
                prop_assert_eq!(switching::family_of_sequence(&t, anchor), Some(Family::Lower));
                let tg = t.to_graph(d).unwrap();
                prop_assert_eq!(tg.degree_sequence(), d);
                prop_assert_eq!(switching::twin_partner(&t, anchor, kind).unwrap(), Some(s.clone()));
            }
        }
    }

    #[test]
    fn theta_injection_inverts(d_low in 1usize..6, extra in 1usize..5, off in 0usize..6) {
        let d_high = d_low + extra;
        let t = d_high + off % d_low;
        let words = switching::enumerate_theta1(t, d_low, d_high).unwrap();
        prop_assert_eq!(words.len() as u128, switching::theta1_size(t, d_low, d_high).unwrap());
        let mut images = std::collections::BTreeSet::new();
        for w in &words {
            let img = switching::theta_injection(t, d_low, d_high, w).unwrap();
            prop_assert!(switching::in_theta2(&img, t, d_low, d_high));
            let back = switching::theta_injection_inverse(t, d_low, d_high, &img).unwrap();
            prop_assert_eq!(back.as_ref(), Some(w));
            images.insert(img);
        }
        prop_assert_eq!(images.len(), words.len());
        let unused = switching::enumerate_theta2(t, d_low, d_high).unwrap().into_iter().filter(|w| !images.contains(w));
        for w in unused {
            prop_assert_eq!(switching::theta_injection_inverse(t, d_low, d_high, &w).unwrap(), None);
        }
    }

    #[test]
    fn process_output_respects_degrees(d in small_graphic(), seed in any::<u64>(), relaxed in any::<bool>()) {
        let variant = if relaxed { Variant::Relaxed } else { Variant::Standard };
        let r = process::run(&d, variant, &mut trial_rng(seed, 1));
        prop_assert_eq!(r.steps, r.trajectory.len());
        for v in 0..d.n() {
            prop_assert!(r.graph.matched_degree(v) <= d.degree(v));
        }
        prop_assert_eq!(r.completed, r.graph.is_complete());
        for e in r.trajectory.edges() {
            let (u, v) = e.vertices();
            prop_assert_ne!(u, v);
        }
        if variant == Variant::Standard {
            prop_assert!(r.graph.project().is_simple());
        }
        let again = process::run(&d, variant, &mut trial_rng(seed, 1));
        prop_assert_eq!(again, r);
    }

    #[test]
    fn uniform_sampler_gives_simple_graphs(d in small_graphic(), seed in any::<u64>()) {
        let mut s = UniformSampler::new(&d).unwrap();
        let out = s.sample(1_000_000, &mut trial_rng(seed, 2)).unwrap();
        prop_assert!(out.graph.is_simple());
        prop_assert_eq!(out.graph.degrees(), d.degrees().to_vec());
        let again = UniformSampler::new(&d).unwrap().sample(1_000_000, &mut trial_rng(seed, 2)).unwrap();
        prop_assert_eq!(again, out);
    }

    #[test]
    fn z_graph_sums_over_orderings(i in any::<usize>(), j in any::<usize>()) {
        let (_, g, _) = pick(i, j, 0);
        prop_assume!(g.edge_count() <= 5);
        let d = g.degree_sequence();
        let edges = g.edges();
        let mut total = degproc::BigRational::from_integer(0.into());
        exact::for_each_permutation(edges.len(), |p| {
            let s = EdgeSequence::new(p.iter().map(|&k| edges[k]).collect());
            total += exact::z_sigma(d, &s).unwrap();
        });
        prop_assert_eq!(exact::z_graph(g).unwrap(), total);
    }
}
