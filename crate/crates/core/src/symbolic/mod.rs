//! Symbolic dynamics of repelling Cantor nodes.

pub mod itinerary;
pub mod sft;

pub use crate::tower::ItineraryPartition;
pub use itinerary::{backward_dense_bitrajectory, invert_itinerary, itinerary, sft_from_node};
pub use sft::{backward_dense_tail, BiSequence, SftDescriptor};
