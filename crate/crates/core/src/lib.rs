//! Minimal projective presentations of poset towers over GF(2).
//!
//! A poset tower is a diagram of simplicial complexes indexed by a finite
//! poset, given compactly by simplex generators and vertex collapse events.
//! This crate computes, for every degree, a minimal presentation of the chain
//! module together with a lift of the boundary map and a second resolution
//! term, assembles a projective implicit representation (PiRep) of the
//! persistent homology, and derives a presentation of the homology itself.
//! The [`oracle`] module recomputes everything by brute force for checking.

pub mod examples;
pub mod generate;
pub mod gf2;
pub mod graph_solver;
pub mod homology_presentation;
pub mod io;
pub mod oracle;
pub mod pirep;
pub mod poset;
pub mod presentation;
pub mod tower;
pub mod union_find;
