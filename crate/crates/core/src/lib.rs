//! Shadowing for the boundary action of hyperbolic groups, made concrete on
//! Cayley balls and exact on free groups.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod group;
pub mod shadowing;

pub use error::{Error, Result};
