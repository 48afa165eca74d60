//! Fixed-step gradient ascent on the Fourier coefficients with a subcritical
//! safeguard, and the two experiment drivers built on it.

use alloc::vec::Vec;

use crate::adjoint;
use crate::error::{Error, Result};
use crate::hydro::{EnvironmentConfig, FourierShape};
use crate::lagrange::{self, LayerSetup};
use crate::photosys::HanParameters;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeSettings {
    /// Stop once the gradient norm is at most this.
    pub tol: f64,
    /// Initial ascent step; halved on rejected candidates.
    pub rho: f64,
    pub max_iter: usize,
    /// Halvings allowed within one iteration before giving up.
    pub max_backtracks: usize,
    pub dt: f64,
    pub layers: usize,
    /// Fourier order `N`.
    pub order: usize,
    /// Seed for randomized initial guesses.
    pub seed: u64,
}

impl Default for OptimizeSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            rho: 1e4,
            max_iter: 500,
            max_backtracks: 40,
            dt: 0.1,
            layers: 40,
            order: 5,
            seed: 0,
        }
    }
}

impl OptimizeSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive"));
        }
        if !(self.rho > 0.0) {
            return Err(Error::InvalidParameter("rho must be positive"));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidParameter("max_iter must be at least 1"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter("dt must be positive"));
        }
        if self.layers < 1 {
            return Err(Error::InvalidParameter("layers must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    /// Every candidate step left the subcritical region.
    SubcriticalStop,
    MaxIter,
    /// Backtracking found no step that increases the objective.
    Stalled,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::SubcriticalStop => "subcritical-stop",
            Termination::MaxIter => "max-iter",
            Termination::Stalled => "stalled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport {
    pub a_star: FourierShape,
    /// Objective at every visited iterate, the start included.
    pub mu_history: Vec<f64>,
    pub grad_norm_history: Vec<f64>,
    /// Accepted steps.
    pub iterations: usize,
    pub termination: Termination,
    /// Step actually taken at each accepted iteration.
    pub step_history: Vec<f64>,
}

impl OptimizeReport {
    pub fn mu(&self) -> f64 {
        self.mu_history.last().copied().unwrap_or(f64::NAN)
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad_norm_history.last().copied().unwrap_or(f64::NAN)
    }
}

/// Gradient ascent from `initial`.
///
/// Each iteration tries `a + rho * grad` and halves the step until the candidate
/// is subcritical and does not lower the objective.
pub fn optimize(
    initial: FourierShape,
    settings: &OptimizeSettings,
    env: &EnvironmentConfig,
    han: &HanParameters,
) -> Result<OptimizeReport> {
    settings.validate()?;
    let check = initial.refined_min_height(env);
    if !check.subcritical {
        return Err(Error::InvalidInitialGuess {
            min_h: check.min_h,
            critical: env.critical_height(),
        });
    }
    let setup = LayerSetup::uniform(settings.layers);
    let mut a = initial;
    let mut mu_history = Vec::new();
    let mut grad_norm_history = Vec::new();
    let mut step_history = Vec::new();
    let mut iterations = 0;

    let termination = loop {
        let (mu, report) = adjoint::evaluate(&a, env, han, &setup, settings.dt)?;
        mu_history.push(mu);
        grad_norm_history.push(report.norm);
        if report.norm <= settings.tol {
            break Termination::Converged;
        }
        if iterations >= settings.max_iter {
            break Termination::MaxIter;
        }

        let mut step = settings.rho;
        let mut accepted = None;
        let mut last_failure = Termination::Stalled;
        for _ in 0..=settings.max_backtracks {
            let mut candidate = a.clone();
            for (c, g) in candidate.coeffs_mut().iter_mut().zip(&report.grad) {
                *c += step * g;
            }
            if !candidate.is_subcritical(env) {
                last_failure = Termination::SubcriticalStop;
            } else if lagrange::objective(&candidate, env, han, &setup, settings.dt)? >= mu {
                accepted = Some(candidate);
                break;
            } else {
                last_failure = Termination::Stalled;
            }
            step *= 0.5;
        }
        match accepted {
            Some(next) => {
                a = next;
                iterations += 1;
                step_history.push(step);
            }
            None => break last_failure,
        }
    };

    Ok(OptimizeReport {
        a_star: a,
        mu_history,
        grad_norm_history,
        iterations,
        termination,
        step_history,
    })
}

/// Mean objective over `shapes` for each layer count.
pub fn nz_sweep(
    shapes: &[FourierShape],
    env: &EnvironmentConfig,
    han: &HanParameters,
    layer_counts: &[usize],
    dt: f64,
) -> Result<Vec<(usize, f64)>> {
    layer_counts
        .iter()
        .map(|&nz| {
            let setup = LayerSetup::uniform(nz);
            let total = shapes
                .iter()
                .map(|s| lagrange::objective(s, env, han, &setup, dt))
                .sum::<Result<f64>>()?;
            Ok((nz, total / shapes.len() as f64))
        })
        .collect()
}

/// One row of the Fourier-order study.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSweepRow {
    pub order: usize,
    pub iterations: usize,
    pub mu: f64,
    /// `log10 |grad|`; absent for the coefficient-free profile.
    pub log10_grad_norm: Option<f64>,
    pub termination: Termination,
    pub a_star: FourierShape,
}

/// Runs the optimizer from the flat start for each order.
pub fn order_sweep(
    env: &EnvironmentConfig,
    han: &HanParameters,
    orders: &[usize],
    settings: &OptimizeSettings,
) -> Result<Vec<OrderSweepRow>> {
    orders
        .iter()
        .map(|&order| {
            let s = OptimizeSettings { order, ..*settings };
            let report = optimize(FourierShape::flat(order), &s, env, han)?;
            Ok(OrderSweepRow {
                order,
                iterations: report.iterations,
                mu: report.mu(),
                log10_grad_norm: (order > 0).then(|| libm::log10(report.grad_norm())),
                termination: report.termination,
                a_star: report.a_star,
            })
        })
        .collect()
}
