//! Exact and simulated analysis of the Glauber and Kempe dynamics on graph
//! list-colourings.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! computation over small instances: chordal graph machinery, exhaustive
//! colouring spaces, exact transition matrices, symmetric eigensolvers,
//! canonical-path congestion, a PEO-indexed coupling of the Kempe dynamics,
//! and exact-arithmetic checks of colouring-count inequalities.
//!
//! IO, the command line and file formats live in the `colorlab` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod chordal;
pub mod cliques;
pub mod coloring;
pub mod comparison;
pub mod coupling;
pub mod decomposition;
pub mod dynamics;
pub mod error;
pub mod generate;
pub mod graph;
pub mod linalg;
pub mod matrix;
pub mod projection;
pub mod rng;
pub mod spectral;

pub use chordal::{maximum_cardinality_search, verify_peo, EliminationOrdering};
pub use coloring::{Color, Coloring, ColoringSpace, ListAssignment};
pub use error::{Error, Result};
pub use graph::Graph;
pub use matrix::TransitionMatrix;
pub use rng::RngStream;
