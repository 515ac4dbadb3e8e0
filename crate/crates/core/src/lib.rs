//! Surface-code decoding with spanning-tree, greedy and exact matching.

pub mod error;
pub mod graph;
pub mod lattice;
pub mod matching;
pub mod mwpm;
pub mod noise;
pub mod pauli;
pub mod rfire;
pub mod sim;
pub mod stm;

pub use error::{Error, Result};
