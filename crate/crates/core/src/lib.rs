//! Birkhoff normal forms near elliptic fixed points, with the Hilbert-brick
//! perturbation model and the stability experiments built on them.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod arith;
pub mod bnf;
pub mod brick;
pub mod builtins;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod genericity;
pub mod polyalg;
pub mod stats;

pub use error::{Error, Result};
