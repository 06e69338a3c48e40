//! Exact counting and enumeration of contours (minimal edge cut sets) on
//! rooted locally finite trees.
//!
//! A *contour* of a graph is a finite edge set whose removal leaves exactly
//! one finite connected component, minimal with that property. On leafless
//! trees, contours around the root are in bijection with external boundaries
//! of finite root-containing subtrees, which makes them countable by
//! generating functions. This crate provides:
//!
//! - [`tree_core`]: explicit (truncated) trees, finite grammars presenting
//!   infinite trees, and the binarization / independent-path-contraction
//!   minor constructions;
//! - [`series_engine`]: truncated integer formal power series, fixed-point
//!   solving of the counting equations, and the Lagrange-inversion closed
//!   form;
//! - [`counters`]: closed-form and recurrence counts for d-ary, regular and
//!   grammar trees, plus lower/upper bounds;
//! - [`enumerator`]: an independent brute-force oracle that enumerates
//!   contours on explicit trees two different ways;
//! - [`structure_analyzer`]: finiteness decision procedures (infinite
//!   independent paths, infinite contour multiplicity);
//! - [`peierls`]: rigorous evaluation of contour-weighted sums and growth
//!   diagnostics.

pub mod counters;
pub mod enumerator;
pub mod error;
pub mod peierls;
pub mod series_engine;
pub mod structure_analyzer;
pub mod tree_core;

pub use error::{Error, Result};
