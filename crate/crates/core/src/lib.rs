//! Dynamics of S-unimodal interval maps: the tower of chain-recurrent nodes,
//! trapping regions, the level partition and special alpha-limit sets,
//! plus symbolic models of Cantor nodes and brute-force oracles.

pub mod config;
pub mod error;
pub mod interval_set;
pub mod map;
pub mod oracle;
pub mod orbit;
pub mod partition;
pub mod roots;
pub mod symbolic;
pub mod tower;

pub use config::Settings;
pub use error::{Error, Result};
pub use interval_set::{Interval, IntervalSet, Piece};
pub use map::{Branch, CriticalOrbit, Family, MapSpec, Registry, UnimodalMap};
pub use orbit::{Cycle, Stability};
pub use oracle::{
    alpha_limit_estimate, chain_recurrent_cells, node_classes, sample_backward, AlphaEstimate, BackwardSample,
    GridSystem, NodeClass,
};
pub use partition::{compute_partition, compute_v, LevelSet, Partition};
pub use symbolic::{backward_dense_tail, BiSequence, SftDescriptor};
pub use tower::{
    build_tower, build_tower_depth, find_attractor, locate_window, AttractorType, CantorSupport, Node, NodeKind,
    Support, Tower, TrappingRegion, SCHEMA_VERSION,
};
