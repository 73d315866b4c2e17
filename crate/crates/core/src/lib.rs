//! Realizability, rigidity and flattenability of linkages under l_p norms.

pub mod error;
pub mod graph;
pub mod lp;
pub mod metrics;
pub mod minor;
pub mod realize;
pub mod cone;
pub mod rigidity;
pub mod cayley;
pub mod flatten;
pub mod format;

pub use error::{Error, Result};
pub use graph::{Edge, Graph};
pub use metrics::{DistanceVector, Framework, Linkage, NormParam};
