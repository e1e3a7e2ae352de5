//! Degree-restricted random graph processes.
//!
//! Samplers for the standard and relaxed processes, the configuration model
//! and uniform simple graphs; an exact rational probability engine for small
//! instances; the switching, cluster and twin constructions with brute-force
//! verifiers; and the limiting ODE pipeline.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is off.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod confgraph;
pub mod degseq;
mod error;
pub mod exact;
pub mod fixtures;
pub mod odemethod;
pub mod process;
pub mod rational;
pub mod rng;
pub mod switching;

pub use confgraph::{ConfigGraph, Edge, EdgeClass, MultiGraph, Point};
pub use degseq::DegreeSequence;
pub use error::Error;
pub use exact::{EdgeSequence, GammaProfile, SaturationTimes};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
