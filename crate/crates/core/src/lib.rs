#[cfg(feature = "cli")]
pub mod cli;
pub mod czindex;
pub mod doubling;
pub mod error;
pub mod halfint;
pub mod maslov;
pub mod novikov;
pub mod random;
pub mod suite;
pub mod symlin;

pub use error::{Error, Result};
pub use halfint::HalfInt;
