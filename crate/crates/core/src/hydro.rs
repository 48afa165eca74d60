//! Steady subcritical shallow-water state for a prescribed water-height profile.
//!
//! The height `h(x) = a0 + sum_n a_n sin(2 n pi x / L)` is the primal unknown.
//! Discharge conservation gives `u = Q0 / h`, the Bernoulli relation fixes the
//! topography `zb`, and incompressibility with a non-penetrating bottom gives the
//! vertical velocity `w`. Every derivative below is analytic.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Flow and light constants of the raceway.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentConfig {
    /// Discharge per unit width (m^2/s).
    pub q0: f64,
    /// Mean water height (m); fixes the volume `a0 * L`.
    pub a0: f64,
    /// Raceway length (m).
    pub length: f64,
    pub gravity: f64,
    /// Topography at `x = 0` (m).
    pub zb0: f64,
    /// Light at the free surface (umol m^-2 s^-1).
    pub surface_light: f64,
    /// Light extinction coefficient (1/m).
    pub extinction: f64,
}

/// Fraction of the surface light that reaches the bottom of the flat pond.
pub const DEFAULT_BOTTOM_LIGHT_FRACTION: f64 = 0.1;

/// Extinction coefficient such that `bottom_fraction` of the surface light
/// reaches depth `a0`.
pub fn extinction_from_bottom_fraction(a0: f64, bottom_fraction: f64) -> f64 {
    libm::log(1.0 / bottom_fraction) / a0
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        let a0 = 0.4;
        Self {
            q0: 0.04,
            a0,
            length: 10.0,
            gravity: 9.81,
            zb0: -0.4,
            surface_light: 2050.0,
            extinction: extinction_from_bottom_fraction(a0, DEFAULT_BOTTOM_LIGHT_FRACTION),
        }
    }
}

impl EnvironmentConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.q0, "Q0 must be positive"),
            (self.a0, "a0 must be positive"),
            (self.length, "L must be positive"),
            (self.gravity, "g must be positive"),
            (self.surface_light, "Is must be positive"),
            (self.extinction, "eps must be positive"),
        ];
        for (value, msg) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(msg));
            }
        }
        if !self.zb0.is_finite() {
            return Err(Error::InvalidParameter("zb0 must be finite"));
        }
        if self.a0 <= self.critical_height() {
            return Err(Error::InvalidParameter(
                "a0 must exceed the critical height (Q0^2/g)^(1/3)",
            ));
        }
        Ok(())
    }

    /// Height at which the Froude number equals one.
    pub fn critical_height(&self) -> f64 {
        libm::cbrt(self.q0 * self.q0 / self.gravity)
    }

    /// `M0 = Q0^2 / (2 h(0)^2) + g (h(0) + zb(0))` with `h(0) = a0`, since the
    /// sine series vanishes at the inlet.
    pub fn bernoulli_constant(&self) -> f64 {
        let h0 = self.a0;
        self.q0 * self.q0 / (2.0 * h0 * h0) + self.gravity * (h0 + self.zb0)
    }

    /// Transit time of one lap, `V / Q0`; independent of the shape.
    pub fn lap_time(&self) -> f64 {
        self.a0 * self.length / self.q0
    }
}

/// Sine coefficients `a_1..a_N` of the water-height profile around the fixed mean `a0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FourierShape {
    coeffs: Vec<f64>,
}

/// `h`, `h'` and `h''` at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightProfile {
    pub h: f64,
    pub dh: f64,
    pub d2h: f64,
}

impl FourierShape {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// All-zero coefficients of order `order`, i.e. the flat bottom.
    pub fn flat(order: usize) -> Self {
        Self {
            coeffs: alloc::vec![0.0; order],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Same profile embedded in a higher order (extra coefficients zero).
    pub fn padded(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order.max(self.order()), 0.0);
        Self { coeffs }
    }

    pub fn height(&self, env: &EnvironmentConfig, x: f64) -> HeightProfile {
        let basis = Basis::new(self.order(), env.length, x);
        self.height_with(env, &basis)
    }

    fn height_with(&self, env: &EnvironmentConfig, basis: &Basis) -> HeightProfile {
        let mut h = env.a0;
        let mut dh = 0.0;
        let mut d2h = 0.0;
        for (n, a) in self.coeffs.iter().enumerate() {
            let k = basis.wavenumber(n + 1);
            h += a * basis.sin[n];
            dh += a * k * basis.cos[n];
            d2h -= a * k * k * basis.sin[n];
        }
        HeightProfile { h, dh, d2h }
    }

    /// Minimum of `h` over `n_samples` uniform points on `[0, L]`.
    pub fn min_height_check(&self, env: &EnvironmentConfig, n_samples: usize) -> HeightCheck {
        let n_samples = n_samples.max(2);
        let step = env.length / (n_samples - 1) as f64;
        let (argmin, min_h) = (0..n_samples)
            .map(|i| (i, self.height(env, i as f64 * step).h))
            .fold(
                (0, f64::INFINITY),
                |acc, s| if s.1 < acc.1 { s } else { acc },
            );
        HeightCheck {
            min_h,
            argmin: argmin as f64 * step,
            subcritical: min_h > env.critical_height(),
        }
    }

    /// Grid rule `10 * max(N, 1) + 1`.
    pub fn default_samples(&self) -> usize {
        10 * self.order().max(1) + 1
    }

    /// Grid minimum refined by golden-section search around the best sample.
    ///
    /// Never larger than the grid minimum, so it is the safer quantity to compare
    /// against `h_c`.
    pub fn refined_min_height(&self, env: &EnvironmentConfig) -> HeightCheck {
        let n_samples = self.default_samples();
        let grid = self.min_height_check(env, n_samples);
        let step = env.length / (n_samples - 1) as f64;
        let mut lo = (grid.argmin - step).max(0.0);
        let mut hi = (grid.argmin + step).min(env.length);
        let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
        let f = |x: f64| self.height(env, x).h;
        let mut c = hi - ratio * (hi - lo);
        let mut d = lo + ratio * (hi - lo);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..60 {
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - ratio * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + ratio * (hi - lo);
                fd = f(d);
            }
        }
        let (x_ref, h_ref) = if fc < fd { (c, fc) } else { (d, fd) };
        let (argmin, min_h) = if h_ref < grid.min_h {
            (x_ref, h_ref)
        } else {
            (grid.argmin, grid.min_h)
        };
        HeightCheck {
            min_h,
            argmin,
            subcritical: min_h > env.critical_height(),
        }
    }

    pub fn is_subcritical(&self, env: &EnvironmentConfig) -> bool {
        self.refined_min_height(env).subcritical
    }
}

/// Outcome of a sampled minimum-height test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightCheck {
    pub min_h: f64,
    /// Position of the minimum.
    pub argmin: f64,
    /// `min_h > h_c`.
    pub subcritical: bool,
}

/// `sin(k_n x)` and `cos(k_n x)` for `n = 1..=N`, `k_n = 2 n pi / L`.
#[derive(Debug, Clone)]
pub struct Basis {
    base_wavenumber: f64,
    sin: Vec<f64>,
    cos: Vec<f64>,
}

impl Basis {
    pub fn new(order: usize, length: f64, x: f64) -> Self {
        let base_wavenumber = 2.0 * PI / length;
        let mut sin = Vec::with_capacity(order);
        let mut cos = Vec::with_capacity(order);
        for n in 1..=order {
            let (s, c) = libm::sincos(base_wavenumber * n as f64 * x);
            sin.push(s);
            cos.push(c);
        }
        Self {
            base_wavenumber,
            sin,
            cos,
        }
    }

    pub fn order(&self) -> usize {
        self.sin.len()
    }

    /// `k_n` for a one-based index.
    pub fn wavenumber(&self, n: usize) -> f64 {
        self.base_wavenumber * n as f64
    }

    pub fn sin(&self) -> &[f64] {
        &self.sin
    }

    pub fn cos(&self) -> &[f64] {
        &self.cos
    }
}

/// Complete hydrodynamic state at one abscissa.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub x: f64,
    pub h: f64,
    pub dh: f64,
    pub d2h: f64,
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub zb: f64,
    pub eta: f64,
    pub deta: f64,
    pub m0: f64,
    q0: f64,
    gravity: f64,
    basis: Basis,
}

/// `w`, `dw/dx`, `dw/dz` at one point of the water column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalVelocity {
    pub w: f64,
    pub dw_dx: f64,
    pub dw_dz: f64,
}

/// Derivatives of the flow quantities with respect to one coefficient `a_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSensitivity {
    pub dh: f64,
    /// Of `h'`.
    pub ddh: f64,
    pub du: f64,
    /// Of `u'`.
    pub ddu: f64,
    pub deta: f64,
    pub dw: f64,
}

impl FlowState {
    pub fn new(shape: &FourierShape, env: &EnvironmentConfig, x: f64) -> Result<Self> {
        let basis = Basis::new(shape.order(), env.length, x);
        let HeightProfile { h, dh, d2h } = shape.height_with(env, &basis);
        if !(h > 0.0) {
            return Err(Error::NonPositiveHeight { x, h });
        }
        let q0 = env.q0;
        let g = env.gravity;
        let m0 = env.bernoulli_constant();
        let u = q0 / h;
        let du = -q0 * dh / (h * h);
        let d2u = q0 * (2.0 * dh * dh / (h * h * h) - d2h / (h * h));
        let zb = m0 / g - q0 * q0 / (2.0 * g * h * h) - h;
        let eta = m0 / g - u * u / (2.0 * g);
        let deta = -u * du / g;
        Ok(Self {
            x,
            h,
            dh,
            d2h,
            u,
            du,
            d2u,
            zb,
            eta,
            deta,
            m0,
            q0,
            gravity: g,
            basis,
        })
    }

    /// Height of the mid-column reference level `M0/g - 3u^2/(2g)` that `w` vanishes at.
    fn w_level(&self) -> f64 {
        self.m0 / self.gravity - 1.5 * self.u * self.u / self.gravity
    }

    pub fn vertical_velocity(&self, z: f64) -> VerticalVelocity {
        let lever = self.w_level() - z;
        VerticalVelocity {
            w: lever * self.du,
            dw_dx: lever * self.d2u - 3.0 * self.u * self.du * self.du / self.gravity,
            dw_dz: -self.du,
        }
    }

    /// Bottom slope `zb'`, equal to `eta' - h'`.
    pub fn dzb(&self) -> f64 {
        self.deta - self.dh
    }

    /// Sensitivities for the one-based coefficient `n` at height `z`.
    pub fn sensitivity(&self, n: usize, z: f64) -> Result<ShapeSensitivity> {
        let order = self.basis.order();
        if n == 0 || n > order {
            return Err(Error::IndexOutOfRange { index: n, order });
        }
        Ok(self.sensitivity_unchecked(n - 1, z))
    }

    /// Zero-based variant used in the inner loops.
    pub(crate) fn sensitivity_unchecked(&self, idx: usize, z: f64) -> ShapeSensitivity {
        let (h, hp) = (self.h, self.dh);
        let g = self.gravity;
        let dh = self.basis.sin[idx];
        let ddh = self.basis.wavenumber(idx + 1) * self.basis.cos[idx];
        let du = -self.q0 * dh / (h * h);
        let ddu = -self.q0 * (ddh / (h * h) - 2.0 * hp * dh / (h * h * h));
        let deta = self.u * self.u * dh / (g * h);
        let dw = -3.0 * self.u * du / g * self.du + (self.w_level() - z) * ddu;
        ShapeSensitivity {
            dh,
            ddh,
            du,
            ddu,
            deta,
            dw,
        }
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }
}
