//! Multi-agent ergodic coverage driven by edge-preserving diffusion.
//!
//! A team of constant-speed agents must spread its time over a domain in
//! proportion to a target density. Each control step the simulator
//! tallies where the agents have been, forms the coverage deficit
//! `e = mu - c`, smooths it into a potential, and steers every agent up
//! the potential's gradient. The smoothing operator is what
//! distinguishes the methods:
//!
//! * [`diffusion`]'s nonlinear solver damps flat regions while leaving
//!   sharp features of the deficit intact, so agents still see crisp
//!   targets after smoothing;
//! * the HEDAC baseline applies a plain heat kernel;
//! * the SMC baseline weights cosine-basis coefficients of the deficit.
//!
//! [`sim`] orchestrates runs and method comparisons; the `ergodiff`
//! binary exposes them on the command line. See the `book/` guide for a
//! walk-through with runnable examples.

// Validation guards are written `!(x > 0.0)` rather than `x <= 0.0` so
// that NaN fails them too; the negated form is the check, not a slip.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
#[cfg(doctest)]
mod book;
pub mod cli;
pub mod config;
pub mod coverage;
pub mod density;
pub mod diffusion;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod oracles;
pub mod sim;
pub mod spectral;
pub mod vec2;

pub use error::{Error, Result};
