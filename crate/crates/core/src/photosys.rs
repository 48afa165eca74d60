//! Reduced Han photosystem kinetics and Beer-Lambert light.
//!
//! With `A + B + C = 1` the three-state model collapses to
//! `C' = -alpha(I) C + beta(I)` for the inhibited fraction, and the net specific
//! growth rate is `mu = -gamma(I) C + zeta(I)`.

use crate::error::{Error, Result};
use crate::hydro::{EnvironmentConfig, FlowState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HanParameters {
    /// Repair rate (1/s).
    pub kr: f64,
    /// Damage rate.
    pub kd: f64,
    /// Turnover time (s).
    pub tau: f64,
    /// Specific photon absorption (m^2/umol).
    pub sigma: f64,
    /// Energy-to-growth factor.
    pub k: f64,
    /// Respiration rate (1/s).
    pub respiration: f64,
}

impl Default for HanParameters {
    fn default() -> Self {
        Self {
            kr: 6.8e-3,
            kd: 2.99e-4,
            tau: 0.25,
            sigma: 0.047,
            k: 8.7e-6,
            respiration: 1.389e-7,
        }
    }
}

impl HanParameters {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            (self.kr, "kr must be positive"),
            (self.kd, "kd must be positive"),
            (self.tau, "tau must be positive"),
            (self.sigma, "sigma must be positive"),
            (self.k, "k must be positive"),
            (self.respiration, "R must be positive"),
        ];
        for (value, msg) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(msg));
            }
        }
        Ok(())
    }

    pub fn rates(&self, light: f64) -> Result<HanRates> {
        if !(light >= 0.0) {
            return Err(Error::NegativeLight(light));
        }
        Ok(self.rates_unchecked(light))
    }

    pub(crate) fn rates_unchecked(&self, light: f64) -> HanRates {
        let s = self.sigma * light;
        let denom = self.tau * s + 1.0;
        let inhibition = self.kd * self.tau * s * s / denom;
        let alpha = inhibition + self.kr;
        let gamma = self.k * s / denom;
        let dalpha = self.kd * self.tau * self.sigma * s * (self.tau * s + 2.0) / (denom * denom);
        let dgamma = self.k * self.sigma / (denom * denom);
        HanRates {
            alpha,
            beta: inhibition,
            gamma,
            zeta: gamma - self.respiration,
            dalpha,
            dbeta: dalpha,
            dgamma,
            dzeta: dgamma,
        }
    }
}

/// Rate coefficients of the reduced model and their derivatives in `I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HanRates {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub zeta: f64,
    pub dalpha: f64,
    pub dbeta: f64,
    pub dgamma: f64,
    pub dzeta: f64,
}

impl HanRates {
    /// Net specific growth rate for inhibited fraction `c`.
    pub fn growth_rate(&self, c: f64) -> f64 {
        -self.gamma * c + self.zeta
    }

    /// `dC/dt`.
    pub fn inhibition_rate(&self, c: f64) -> f64 {
        -self.alpha * c + self.beta
    }

    /// Equilibrium `beta / alpha` of the inhibition dynamics.
    pub fn steady_state(&self) -> f64 {
        self.beta / self.alpha
    }
}

/// Light intensity and its derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Light {
    pub intensity: f64,
    pub d_dx: f64,
    pub d_dz: f64,
    extinction: f64,
}

/// Slack allowed above the free surface before a point counts as out of the water.
pub const SURFACE_SLACK: f64 = 1e-9;

impl Light {
    /// Beer-Lambert intensity at height `z` under a surface at `eta` with slope `eta_x`.
    pub fn new(env: &EnvironmentConfig, eta: f64, eta_x: f64, z: f64) -> Result<Self> {
        if z > eta + SURFACE_SLACK {
            return Err(Error::AboveSurface { z, eta });
        }
        Ok(Self::unchecked(env, eta, eta_x, z))
    }

    pub fn at(env: &EnvironmentConfig, flow: &FlowState, z: f64) -> Result<Self> {
        Self::new(env, flow.eta, flow.deta, z)
    }

    pub(crate) fn unchecked(env: &EnvironmentConfig, eta: f64, eta_x: f64, z: f64) -> Self {
        let eps = env.extinction;
        let intensity = env.surface_light * libm::exp(-eps * (eta - z));
        Self {
            intensity,
            d_dx: -eps * eta_x * intensity,
            d_dz: eps * intensity,
            extinction: eps,
        }
    }

    /// `dI/da_n` given the surface sensitivity `d eta / d a_n`.
    pub fn shape_derivative(&self, deta_da: f64) -> f64 {
        -self.extinction * deta_da * self.intensity
    }
}
