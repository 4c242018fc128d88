//! Numerical laboratory for invariant hyperbolic distances, pointwise
//! quasiconformality, and quasi-isometry envelopes on smooth bounded convex
//! domains in complex Euclidean space.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`], [`sampling`]: complex/real linear-algebra adapters and
//!   deterministic low-discrepancy / seeded random sampling.
//! - [`disk`]: closed-form invariant distances on the model domains (unit
//!   disk, unit ball, left half-plane) and the quasiconformal covering
//!   threshold.
//! - [`domain`]: defining functions, boundary geometry, and strong-convexity
//!   verification for the supported domain classes.
//! - [`maps`]: the built-in smooth map families and their derivative data.
//! - [`wirtinger`]: complex-derivative blocks, pointwise dilatation, and the
//!   generalized quasiconformality constant field.
//! - [`pushforward`]: the pushforward almost-complex-structure blocks carried
//!   by a diffeomorphism and their deviation from the standard structure.
//! - [`optimize`]: the quasi-Newton minimizer driving the disc solver.
//! - [`kobayashi`]: certified two-sided brackets for the invariant distance on
//!   general convex domains.
//! - [`qi`]: quasi-isometry envelope estimation, covering diagnostics, and the
//!   radial divergence construction.
//! - [`report`]: deterministic text/CSV reporting with payload hashing.
//! - [`cli`]: the `hyperlab` command-line interface.

pub mod cli;
pub mod disk;
pub mod domain;
pub mod error;
pub mod kobayashi;
pub mod linalg;
pub mod maps;
pub mod optimize;
pub mod pushforward;
pub mod qi;
pub mod report;
pub mod sampling;
pub mod wirtinger;

pub use error::{Error, Result};
