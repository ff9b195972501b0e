//! Computable geometry of graph products of groups.
//!
//! * [`graph`]: simplicial graphs and exact predicates (squares, cliques,
//!   colourings, joins).
//! * [`groups`]: concrete vertex groups.
//! * [`words`]: normal forms and the word problem.
//! * [`cayley`]: balls in the quasi-median Cayley graph, hyperplanes, gates,
//!   quasi-medians, weighted metrics and flat squares.
//! * [`qmcheck`]: verification toolkit for finite quasi-median graphs.
//! * [`walls`]: spaces with partitions, quasi-cubulation, sector-walls and the
//!   product-of-trees embedding.
//! * [`classify`]: hyperbolicity and relative hyperbolicity of graph products.
//! * [`specfile`] and [`export`]: text formats.

pub mod cayley;
pub mod classify;
pub mod error;
pub mod export;
pub mod graph;
pub mod groups;
pub mod iso;
pub mod par;
pub mod qmcheck;
pub mod specfile;
pub mod walls;
pub mod words;

pub use error::{Error, ParseError, Result};
pub use graph::{SimplicialGraph, VertexId, VertexSet};
pub use groups::{CayleyTable, Element, GroupDescriptor};
pub use words::{GraphProductSpec, NormalWord, Syllable};
