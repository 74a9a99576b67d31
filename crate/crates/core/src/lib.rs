//! Exact, certificate-producing search for Hamiltonian cycles and paths in
//! the square of 2-connected graphs, with the structural machinery around
//! it: block decompositions and blockchains, gluing and splicing
//! constructions, EPS-graphs and W-sound cycles, and a campaign harness that
//! sweeps enumerated graph corpora.

pub mod connectivity;
pub mod constructions;
pub mod eps;
pub mod error;
pub mod graph;
pub mod graph6;
pub mod harness;
pub mod matching;
pub mod oracle;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, VertexMap};
