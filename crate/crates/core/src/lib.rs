pub mod cartan_leray;
pub mod cycle_complex;
pub mod error;
pub mod homalg;
pub mod json;
pub mod multicurve;
pub mod report;
pub mod symplectic;
pub mod torelli_classes;

pub use error::{Error, Result};
