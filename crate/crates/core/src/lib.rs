//! Exact jet-differential and Wronskian computations.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod exec;
pub mod family;
pub mod grassmann;
pub mod jet;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod random;
pub mod rational;
pub mod reparam;
pub mod series;
pub mod verify;
pub mod wronskian;

pub use error::{Error, Result};
