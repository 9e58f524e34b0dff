//! Computations with labelled graphs of groups whose vertex and edge groups
//! are infinite cyclic (generalized Baumslag-Solitar graphs).
//!
//! The crate provides:
//!
//! - [`graph`]: the [`GbsGraph`](graph::GbsGraph) data model and text format;
//! - [`iso`]: isomorphism of labelled graphs up to sign gauge;
//! - [`word`]: decorated closed paths ([`word::GogWord`]), their normal
//!   forms, ellipticity, and translation length on the Bass-Serre tree;
//! - [`moves`]: collapse / expand / subdivide / unsubdivide moves, graph
//!   reduction, move logs, and transport of words along moves;
//! - [`ball`]: finite balls of the Bass-Serre tree, vertex addresses,
//!   valences, and fold classification.
//!
//! The `gbs` binary exposes everything as a line-oriented command line tool.

pub mod ball;
pub mod bound;
pub mod chains;
pub mod error;
pub mod graph;
pub mod iso;
pub mod moves;
pub mod word;

pub use error::{GbsError, Result};
pub use graph::{GbsGraph, GeomEdge, Label, OrientedEdge, VertexId};
pub use word::GogWord;
