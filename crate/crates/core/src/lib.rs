//! Ordinal ranks of Baire class one functions on Cantor space and the Wadge-style degrees they induce.

pub mod checks;
pub mod corpus;
pub mod degrees;
pub mod derivation;
pub mod error;
pub mod funcalc;
pub mod ordinal;
pub mod rational;
pub mod reduction;

pub use error::{Error, ParseError, Result};
pub use funcalc::{FuncExpr, Point, Sidedness, StackSeq};
pub use ordinal::Ordinal;
pub use rational::Rational;
