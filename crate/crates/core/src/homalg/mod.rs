//! Exact integer homological algebra.

pub mod chain;
pub mod double;
pub mod kunneth;
pub mod lattice;
pub mod matrix;
pub mod rational;
pub mod ring;
pub mod snf;
pub mod sseq;
