//! Exact combinatorial analysis of abelian gauged linear sigma models.
//!
//! Given a torus weight matrix, an R-charge, a superpotential and a
//! polarization, the crate computes phase chambers, semistable and unstable
//! loci, strong regularity, the extended group and its compatibility checks,
//! good lifts, critical-locus components and their compactness, twisted
//! sectors with ages, central charge, virtual dimensions, and numerical
//! LG-quasimap stability on dual graphs. All arithmetic is exact.

pub mod analyzer;
pub mod error;
pub mod gamma;
pub mod git;
pub mod linalg;
pub mod poly;
pub mod qmap;
pub mod rational;

pub use error::{Error, ParseError, Result};
pub use linalg::IntMatrix;
pub use rational::{PhaseVector, Rat, RatVector};
