//! Brute-force validators independent of the tower construction.

mod grid;
mod sampling;

pub use grid::{chain_recurrent_cells, node_classes, upstream, GridSystem, NodeClass};
pub use sampling::{
    alpha_limit_estimate, alpha_limit_estimate_tol, sample_backward, sample_exhaustive, AlphaEstimate,
    BackwardSample, Strategy, EXHAUSTIVE_MAX_DEPTH, TOL_CLUSTER,
};
