//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]; the CLI maps variants onto its
//! exit-status contract (1 = validation, 2 = numerical failure, 3 = failed
//! reproduction assertion).

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// A point that must lie in the open unit disk had modulus ≥ 1.
    #[error("point with modulus {modulus} lies outside the open unit disk")]
    OutsideDisk { modulus: f64 },

    /// A point that must lie in the open unit ball had norm ≥ 1.
    #[error("point with norm {norm} lies outside the open unit ball")]
    OutsideBall { norm: f64 },

    /// A dilatation bound must lie in [0, 1).
    #[error("dilatation constant {value} is outside [0, 1)")]
    InvalidDilatation { value: f64 },

    /// The defining-function gradient is numerically zero at a boundary point.
    #[error("degenerate gradient (norm {norm:.3e}) at boundary point {point}")]
    DegenerateGradient { point: String, norm: f64 },

    /// `supporting_functional_at` was queried away from the boundary.
    #[error("point {point} is not on the boundary (rho = {rho:.3e})")]
    NotOnBoundary { point: String, rho: f64 },

    /// A ray from an interior point never crossed the boundary inside the
    /// bounding radius; the domain description is malformed.
    #[error("ray from {from} along {direction} exits the bounding radius without crossing the boundary")]
    NoCrossing { from: String, direction: String },

    /// Map evaluation produced NaN or infinity at a derivative stencil point.
    #[error("non-finite map value at {point}")]
    NonFinite { point: String },

    /// Derivatives were requested at a point where the map is not C¹.
    #[error("derivative undefined at {point}")]
    UndefinedDerivative { point: String },

    /// Newton inversion failed to converge within the iteration cap.
    #[error("Newton inversion diverged at {point} (residual {residual:.3e} after {iterations} iterations)")]
    NewtonDivergence {
        point: String,
        residual: f64,
        iterations: usize,
    },

    /// Spot sampling found two points with numerically identical images.
    #[error("map does not look injective: points {first} and {second} share an image")]
    InjectivitySuspect { first: String, second: String },

    /// The supplied inverse fails the round-trip bound near the query point.
    #[error("inverse map round-trip error {residual:.3e} at {point} exceeds {bound:.3e}")]
    InverseInconsistent {
        point: String,
        residual: f64,
        bound: f64,
    },

    /// No containment-feasible analytic disc exists even at the initializer;
    /// signals a defective domain description, not a solver limit.
    #[error("no feasible analytic disc through the requested points (initializer violates containment)")]
    NoFeasibleDisc,

    /// A Kobayashi bracket came out inverted beyond tolerance: a solver bug.
    #[error("distance bracket inverted: lower {lower} exceeds upper {upper}")]
    BracketInverted { lower: f64, upper: f64 },

    /// Envelope fitting needs at least two retained samples.
    #[error("envelope fit needs >= 2 samples with positive source distance, got {got}")]
    InsufficientSamples { got: usize },

    /// The claimed dilatation bound is smaller than the measured supremum.
    #[error("claimed dilatation bound {claimed} is below the sampled supremum {measured}")]
    DilatationExceedsK { claimed: f64, measured: f64 },

    /// A supposed self-map sent a sample point outside the disk.
    #[error("map is not a self-map: image of {point} has modulus {modulus}")]
    NotSelfMap { point: String, modulus: f64 },

    /// A pipeline domain failed its strong-convexity certification.
    #[error("strong convexity check failed: minimal normal curvature {min_curvature:.3e} at tolerance {tolerance:.3e}")]
    StrongConvexityFailed { min_curvature: f64, tolerance: f64 },

    /// Invalid operation input (dimension mismatch, empty input, bad range).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Spec-file parse or validation failure, with the offending field named.
    #[error("spec file error in {path}: {message}")]
    SpecFile { path: String, message: String },

    /// Report or file I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit status the CLI assigns to this error (validation vs numerical).
    pub fn exit_status(&self) -> i32 {
        match self {
            Error::OutsideDisk { .. }
            | Error::OutsideBall { .. }
            | Error::InvalidDilatation { .. }
            | Error::InvalidInput(_)
            | Error::SpecFile { .. }
            | Error::InsufficientSamples { .. }
            | Error::Io(_) => 1,
            _ => 2,
        }
    }
}
