//! Bridge that compiles the guide's examples against the crate.
//!
//! Each chapter under `book/src/` is attached as module documentation,
//! so `cargo test --doc` extracts and runs every Rust block the guide
//! shows. Prose that drifts from the real API fails the build instead of
//! misleading readers. The modules are empty on purpose; only their
//! attached documentation matters.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/grids-and-spectra.md")]
mod grids_and_spectra {}

#[doc = include_str!("../../../book/src/coverage-error.md")]
mod coverage_error {}

#[doc = include_str!("../../../book/src/anisotropic-smoothing.md")]
mod anisotropic_smoothing {}

#[doc = include_str!("../../../book/src/steering.md")]
mod steering {}

#[doc = include_str!("../../../book/src/scenarios.md")]
mod scenarios {}

#[doc = include_str!("../../../book/src/experiments.md")]
mod experiments {}

#[doc = include_str!("../../../book/src/formats.md")]
mod formats {}
