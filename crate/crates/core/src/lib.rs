//! Continuous aggregation rules on spheres, numerical degrees of their slot
//! restrictions, and verified witnesses of the Twin and No Show paradoxes.

pub mod audit;
pub mod cli;
pub mod conditions;
pub mod degree;
pub mod error;
pub mod rules;
pub mod sphere;

pub use error::{Error, Result};
