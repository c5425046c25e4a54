//! Concrete iterative-filtering algorithms.

mod dbif;
mod fif;
mod gftif;
mod window;

pub use dbif::{db_if, domain_extent, DbIfOptions, PlanarWindowRule};
pub use fif::{fif_1d, fif_kernel, fif_window_length, FifKernel, FifOptions};
pub use gftif::{auto_gft_cutoff, gft_if, gft_if_with_kernels, CutoffChoice, GftIfOptions, GftIfResult};
pub use window::{
    build_window_operator, build_window_operator_with, db_window_length, Storage, WindowMode, WindowOperator,
    SINKHORN_MAX_SWEEPS, SINKHORN_TOL, SPARSE_FILL_RATIO,
};

/// Window-length tuning parameter used unless overridden.
pub const DEFAULT_NU: f64 = 1.6;
