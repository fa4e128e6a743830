//! Interacting monomer-dimer model on the square lattice.
//!
//! Dimers occupy edges of Z² under the hard-core rule. Each vacant vertex
//! costs `(λ+a)/2` and each broken link (an empty edge next to exactly one
//! colinear dimer) costs `a/2`, so at low temperature the model prefers
//! long columns of aligned dimers. The crate provides exact enumeration on
//! small windows, the one-dimensional transfer matrix, a Metropolis sampler
//! on tori, and the geometric analyses (sticks, configuration graphs,
//! disagreement sets) used to study orientational order.

pub mod confgraph;
pub mod disagree;
pub mod enumerate;
pub mod lattice;
pub mod model;
pub mod order;
pub mod sampler;
pub mod stats;
pub mod transfer1d;

pub use lattice::{EdgeId, Orientation, Rect, VertexId};
pub use model::{BoundaryCondition, DimerConfig, ModelParams, PeriodicPattern};
