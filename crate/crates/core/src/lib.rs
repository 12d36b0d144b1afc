//! Exact-arithmetic search and verification for monochromatic sum/product
//! patterns over the positive rationals.

pub mod error;
pub mod coloring;
pub mod family;
pub mod identities;
pub mod par;
pub mod perturbation;
pub mod pipeline;
pub mod rational;
pub mod report;
pub mod search;
pub mod shift;
pub mod stabilizer;

pub use error::{Error, Result};
