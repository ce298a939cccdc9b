//! Convex roofs and concave hulls of functions on finite-dimensional quantum
//! states, Choquet ordering of finite ensembles, and entanglement of
//! formation together with its truncated, continuous variants.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod choquet;
pub mod cli;
pub mod error;
pub mod functionals;
pub mod io;
pub mod linalg;
pub mod oracles;
pub mod roof;
pub mod states;

pub use error::{Error, Result};
