//! Iterative filtering on graphs.
//!
//! Signals live on the vertices of a weighted [`Graph`]. Each IMF is
//! extracted by the sifting iteration `s ← s - W s` with an averaging
//! operator `W` rebuilt from the current residual:
//!
//! - [`decomposers::gft_if`]: `W = U diag(ŵ) Uᵀ` from a Hann kernel on the
//!   Laplacian spectrum.
//! - [`decomposers::db_if`]: `W = B·B` with `B` a normalized Hann window over
//!   vertex distances.
//! - [`decomposers::fif_1d`]: the equispaced one-dimensional method, sifting
//!   on the DFT.

pub mod decomposers;
pub mod distances;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod sifting;
pub mod spectral;

pub use error::{Error, ErrorClass, Result};
pub use graph::{Edge, Embedding, Graph, Signal};
pub use sifting::{AveragingOperator, DecomposeOptions, DecompositionResult, StoppingRule};
pub use spectral::{SpectralBasis, SpectralKernel};
