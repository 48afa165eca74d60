use core::fmt;

/// Failures raised by the model and the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration field violated its domain; the message names it.
    InvalidParameter(&'static str),
    /// Water height reached zero or below at `x`.
    NonPositiveHeight {
        x: f64,
        h: f64,
    },
    /// Fourier coefficient index outside `1..=order`.
    IndexOutOfRange {
        index: usize,
        order: usize,
    },
    NegativeLight(f64),
    /// Evaluation point above the free surface.
    AboveSurface {
        z: f64,
        eta: f64,
    },
    /// Trajectory left the water column during integration.
    StepBlowup {
        t: f64,
        z: f64,
    },
    /// Horizontal velocity is not positive, the particle cannot reach `L`.
    NonProgress {
        t: f64,
        x: f64,
    },
    /// Inhibited fraction left `[0, 1]` by more than rounding slack.
    InhibitionOutOfRange {
        t: f64,
        c: f64,
    },
    /// Layer traces were produced on different time grids.
    GridMismatch,
    /// The shape violates `min h > h_c`.
    SubcriticalViolation {
        min_h: f64,
        critical: f64,
    },
    InvalidInitialGuess {
        min_h: f64,
        critical: f64,
    },
    /// A layer setup is empty or its relative depths are not strictly inside `(0, 1)`.
    InvalidLayers,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "{msg}"),
            Error::NonPositiveHeight { x, h } => {
                write!(f, "non-positive water height h = {h} at x = {x}")
            }
            Error::IndexOutOfRange { index, order } => {
                write!(f, "coefficient index {index} outside 1..={order}")
            }
            Error::NegativeLight(i) => write!(f, "negative light intensity {i}"),
            Error::AboveSurface { z, eta } => {
                write!(f, "point z = {z} lies above the free surface eta = {eta}")
            }
            Error::StepBlowup { t, z } => {
                write!(f, "trajectory left the water column at t = {t} (z = {z})")
            }
            Error::NonProgress { t, x } => {
                write!(
                    f,
                    "horizontal velocity is not positive at t = {t} (x = {x})"
                )
            }
            Error::InhibitionOutOfRange { t, c } => {
                write!(f, "inhibited fraction C = {c} left [0, 1] at t = {t}")
            }
            Error::GridMismatch => write!(f, "layer traces use different time grids"),
            Error::SubcriticalViolation { min_h, critical } => write!(
                f,
                "shape is not subcritical: min h = {min_h} <= h_c = {critical}"
            ),
            Error::InvalidInitialGuess { min_h, critical } => write!(
                f,
                "initial guess is not subcritical: min h = {min_h} <= h_c = {critical}"
            ),
            Error::InvalidLayers => {
                write!(
                    f,
                    "relative depths must be non-empty and strictly increasing in (0, 1)"
                )
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
