//! Raceway pond hydrodynamics, photosystem kinetics and adjoint-based
//! topography optimization.
//!
//! The crate is `no_std` and only needs `alloc`. IO, configuration and the
//! command line live in the `raceway` crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod adjoint;
pub mod error;
pub mod hydro;
pub mod lagrange;
pub mod optimizer;
pub mod photosys;

pub use adjoint::{
    assemble_gradient, discrete_adjoint, evaluate, evaluate_with, finite_difference_gradient,
    integrate_adjoint, AdjointScheme, AdjointTrace, FdComparison, GradientReport,
};
pub use error::{Error, Result};
pub use hydro::{
    EnvironmentConfig, FlowState, FourierShape, HeightCheck, ShapeSensitivity, VerticalVelocity,
};
pub use lagrange::{
    average_growth, integrate_forward, integrate_forward_from, objective, simulate,
    InitialInhibition, LayerSetup, LayerTrace, TraceSample,
};
pub use optimizer::{
    nz_sweep, optimize, order_sweep, OptimizeReport, OptimizeSettings, OrderSweepRow, Termination,
};
pub use photosys::{HanParameters, HanRates, Light};
