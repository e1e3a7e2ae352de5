//! Built-in instances.
//!
//! The counterexample pair: vertices in order A, B, V1, V2, V3, V4, X, Y with
//! degrees 2, 2, 2, 4, 2, 2, 3, 3. Point labels inside a vertex are a fixed
//! choice; relabeling inside a vertex is a symmetry and changes no ratio.
//!
//! Upper graph (1-based copies): A.1–B.1, A.2–V1.1, B.2–V2.1, V3.1–V2.2,
//! V3.2–X.2, X.1–V1.2, X.3–Y.1, Y.3–V2.3, Y.2–V4.2, V2.4–V4.1. The lower graph
//! replaces A.1–B.1 and X.3–Y.1 by A.1–X.3 and B.1–Y.1.

use alloc::vec;

use crate::confgraph::{ConfigGraph, Point};
use crate::degseq::DegreeSequence;

pub const PAIR_A: u32 = 0;
pub const PAIR_B: u32 = 1;
pub const PAIR_V1: u32 = 2;
pub const PAIR_V2: u32 = 3;
pub const PAIR_V3: u32 = 4;
pub const PAIR_V4: u32 = 5;
pub const PAIR_X: u32 = 6;
pub const PAIR_Y: u32 = 7;

/// The counterexample pair and its anchor points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexamplePair {
    pub degrees: DegreeSequence,
    pub g_plus: ConfigGraph,
    pub g_minus: ConfigGraph,
    pub a: Point,
    pub b: Point,
    pub x: Point,
    pub y: Point,
}

fn p(v: u32, copy1: u32) -> Point {
    Point::new(v, copy1 - 1)
}

pub fn counterexample_pair() -> CounterexamplePair {
    let degrees = DegreeSequence::new(vec![2, 2, 2, 4, 2, 2, 3, 3]).expect("static degrees");
    let (a, b, x, y) = (p(PAIR_A, 1), p(PAIR_B, 1), p(PAIR_X, 3), p(PAIR_Y, 1));
    let shared = [
        (p(PAIR_A, 2), p(PAIR_V1, 1)),
        (p(PAIR_B, 2), p(PAIR_V2, 1)),
        (p(PAIR_V3, 1), p(PAIR_V2, 2)),
        (p(PAIR_V3, 2), p(PAIR_X, 2)),
        (p(PAIR_X, 1), p(PAIR_V1, 2)),
        (p(PAIR_Y, 3), p(PAIR_V2, 3)),
        (p(PAIR_Y, 2), p(PAIR_V4, 2)),
        (p(PAIR_V2, 4), p(PAIR_V4, 1)),
    ];
    let plus = shared.iter().copied().chain([(a, b), (x, y)]);
    let minus = shared.iter().copied().chain([(a, x), (b, y)]);
    let g_plus = ConfigGraph::from_edges(degrees.clone(), plus).expect("static fixture");
    let g_minus = ConfigGraph::from_edges(degrees.clone(), minus).expect("static fixture");
    CounterexamplePair { degrees, g_plus, g_minus, a, b, x, y }
}
