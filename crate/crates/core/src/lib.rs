//! Centred subgraph statistics of dense random graphs generated from a
//! graphon: sampling, exact covariances, the orthogonal decomposition of
//! injective densities, a Stein-coupling verifier and goodness-of-fit
//! statistics.

pub mod decomposition;
pub mod error;
pub mod gof;
pub mod graphon;
pub mod harness;
pub mod par;
pub mod pattern;
pub mod rng;
pub mod sampler;
pub mod statistics;
pub mod stein;
pub mod summation;
pub mod tuples;
pub mod weights;

pub use error::{Error, Result};
pub use graphon::Graphon;
pub use pattern::{PatternGraph, VertexSubset};
pub use sampler::{EdgeModel, GraphSample, LabelScheme};
pub use statistics::{CovarianceMatrix, StatisticSpec};
pub use weights::{StepFunction, WeightFunction};
