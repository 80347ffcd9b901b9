//! Paper-folding schemes, their scar trees, and certified conformal-extension bounds.
//!
//! A paper-folding scheme glues the boundary of a polygon to itself by length-preserving,
//! orientation-reversing segment pairings. The image of the boundary in the quotient is the
//! scar, a metric tree for plain schemes. This crate builds finite truncations of such schemes,
//! realizes their scars with two-sided error bounds, evaluates the divergence criterion for the
//! extension of the conformal structure across the singular set, and tabulates the explicit
//! moduli of continuity of the uniformizing map.

pub mod collar;
pub mod criterion;
pub mod error;
pub mod modulus;
pub mod rational;
pub mod scar;
pub mod scheme;

pub use error::{Error, Result};
pub use rational::Rat;
