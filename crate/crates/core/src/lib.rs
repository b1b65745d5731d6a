//! Counting forms, Gaussian heat-flow kernels, spherical measures, dyadic
//! martingales and multiscale decompositions for anisotropic point
//! configurations, computed on periodic grids.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod grid;
pub mod kernels;
pub mod cli;
pub mod counting;
pub mod martingale;
pub mod multiscale;
pub mod sets;
pub mod spherical;

pub use error::{Checked, Error, Result, Warning};
