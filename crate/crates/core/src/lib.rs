//! Random intersection graphs with noisy features, a threshold message-passing
//! denoiser, and assignment-based alignment of correlated graph pairs.

pub mod alignment;
pub mod bits;
pub mod dense;
pub mod error;
pub mod gnn;
pub mod graph;
pub mod graphgen;
pub mod io;
pub mod lap;
pub mod model;
pub mod perm;
pub mod rng;
pub mod theory;

pub use alignment::{align_features, align_linear, alignment_error, AlignmentResult};
pub use bits::BitMatrix;
pub use dense::RealMatrix;
pub use error::{Error, Result};
pub use gnn::{denoise, message_pass, DenoisedFeatures, MessageMatrix};
pub use graph::Graph;
pub use graphgen::{sample_correlated_pair, CorrelatedInstance, ObservedGraph, PermMode};
pub use lap::{lap_solve, CostMatrix};
pub use model::{ModelParams, NoiseParams};
pub use perm::Permutation;
