//! Coherent configurations, Weisfeiler-Leman closures of dimension 2, 3 and
//! 4, depth-1 stabilization, and projective-plane schemes.

pub mod algiso;
pub mod caps;
pub mod cc;
pub mod coloring;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod oracles;
pub mod planes;
pub mod wlm;
pub(crate) mod partition;
pub mod refine;
pub mod stab;

pub use cc::{CoherentConfiguration, IntersectionTensor};
pub use coloring::{GroundSet, PairColoring};
pub use error::{Error, Result};
pub use graph::Graph;
