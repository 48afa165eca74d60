//! Forward solve: algae advected along streamlines while their photosystems
//! respond to the light they see.
//!
//! Each layer integrates `x' = u(x)`, `z' = w(x, z)`,
//! `C' = -alpha(I) C + beta(I)` with Heun's scheme until `x` reaches `L`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hydro::{EnvironmentConfig, FlowState, FourierShape};
use crate::photosys::{HanParameters, Light};

/// Tolerance on leaving the water column before a step counts as blown up.
pub const COLUMN_SLACK: f64 = 1e-6;
/// Rounding slack tolerated on `C` before clamping turns into an error.
/// Relative distance to the outlet below which the current step is stretched to finish the lap.
pub const ENDPOINT_SLACK: f64 = 1e-9;

pub const INHIBITION_SLACK: f64 = 1e-12;

/// Vertical placement of the tracked layers, as relative depths
/// `(eta - z) / h` at the inlet.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSetup {
    relative_depths: Vec<f64>,
    initial_inhibition: InitialInhibition,
}

/// How `C(0)` is chosen for each layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialInhibition {
    /// Steady state at the layer's own inlet light.
    #[default]
    LayerSteadyState,
    /// Steady state at the mean inlet light over all layers, shared by every layer.
    MeanLightSteadyState,
}

impl LayerSetup {
    /// Mid-cell placement `(i - 1/2) / Nz`, ordered from the surface down.
    pub fn uniform(layers: usize) -> Self {
        let n = layers as f64;
        Self {
            relative_depths: (0..layers).map(|i| (i as f64 + 0.5) / n).collect(),
            initial_inhibition: InitialInhibition::default(),
        }
    }

    pub fn with_initial_inhibition(mut self, policy: InitialInhibition) -> Self {
        self.initial_inhibition = policy;
        self
    }

    pub fn initial_inhibition(&self) -> InitialInhibition {
        self.initial_inhibition
    }

    pub fn new(relative_depths: Vec<f64>) -> Result<Self> {
        let inside = relative_depths.iter().all(|&s| s > 0.0 && s < 1.0);
        let increasing = relative_depths.windows(2).all(|w| w[0] < w[1]);
        if relative_depths.is_empty() || !inside || !increasing {
            return Err(Error::InvalidLayers);
        }
        Ok(Self {
            relative_depths,
            initial_inhibition: InitialInhibition::default(),
        })
    }

    pub fn layers(&self) -> usize {
        self.relative_depths.len()
    }

    pub fn relative_depths(&self) -> &[f64] {
        &self.relative_depths
    }

    /// Starting heights `z_i(0) = eta(0) - sigma_i h(0)`.
    pub fn initial_positions(
        &self,
        shape: &FourierShape,
        env: &EnvironmentConfig,
    ) -> Result<Vec<f64>> {
        let inlet = FlowState::new(shape, env, 0.0)?;
        Ok(self
            .relative_depths
            .iter()
            .map(|s| inlet.eta - s * inlet.h)
            .collect())
    }
}

/// One node of a forward trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub x: f64,
    pub z: f64,
    pub light: f64,
    pub c: f64,
    pub mu: f64,
}

/// Time series of one layer over a lap.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrace {
    pub dt: f64,
    pub samples: Vec<TraceSample>,
}

impl LayerTrace {
    /// Number of Heun steps `N_T`.
    pub fn n_steps(&self) -> usize {
        self.samples.len().saturating_sub(1)
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// `(1/T) int mu dt` by the trapezoid rule on the trace grid.
    pub fn mean_growth(&self) -> f64 {
        let integral: f64 = self
            .samples
            .windows(2)
            .map(|w| 0.5 * (w[1].t - w[0].t) * (w[0].mu + w[1].mu))
            .sum();
        integral / self.final_time()
    }

    /// Same time grid as `other`, bit for bit.
    pub fn same_grid(&self, other: &LayerTrace) -> bool {
        self.samples.len() == other.samples.len()
            && self
                .samples
                .iter()
                .zip(&other.samples)
                .all(|(a, b)| a.t == b.t && a.x == b.x)
    }
}

#[derive(Debug, Clone, Copy)]
struct Rhs {
    u: f64,
    w: f64,
    dc: f64,
    light: f64,
    mu: f64,
    zb: f64,
    eta: f64,
}

struct Dynamics<'a> {
    shape: &'a FourierShape,
    env: &'a EnvironmentConfig,
    han: &'a HanParameters,
}

impl Dynamics<'_> {
    fn eval(&self, x: f64, z: f64, c: f64) -> Result<Rhs> {
        let flow = FlowState::new(self.shape, self.env, x)?;
        let light = Light::unchecked(self.env, flow.eta, flow.deta, z).intensity;
        let rates = self.han.rates(light)?;
        Ok(Rhs {
            u: flow.u,
            w: flow.vertical_velocity(z).w,
            dc: rates.inhibition_rate(c),
            light,
            mu: rates.growth_rate(c),
            zb: flow.zb,
            eta: flow.eta,
        })
    }
}

fn clamp_inhibition(c: f64, t: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&c) {
        Ok(c)
    } else if c < 0.0 && c > -INHIBITION_SLACK {
        Ok(0.0)
    } else if c > 1.0 && c < 1.0 + INHIBITION_SLACK {
        Ok(1.0)
    } else {
        Err(Error::InhibitionOutOfRange { t, c })
    }
}

/// Heun integration of one layer starting at height `z0` with `C(0)` at its
/// steady state. The last step is shortened so the trace ends on `x = L`.
pub fn integrate_forward(
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
    z0: f64,
    dt: f64,
) -> Result<LayerTrace> {
    let inlet = FlowState::new(shape, env, 0.0)?;
    if !(z0 >= inlet.zb && z0 <= inlet.eta) {
        return Err(Error::StepBlowup { t: 0.0, z: z0 });
    }
    let light0 = Light::at(env, &inlet, z0)?.intensity;
    let c0 = han.rates(light0)?.steady_state();
    integrate_forward_from(shape, env, han, z0, c0, dt)
}

/// Heun integration of one layer from `(z0, c0)` at the inlet.
pub fn integrate_forward_from(
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
    z0: f64,
    c0: f64,
    dt: f64,
) -> Result<LayerTrace> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter("dt must be positive"));
    }
    let dynamics = Dynamics { shape, env, han };
    let inlet = FlowState::new(shape, env, 0.0)?;
    if !(z0 >= inlet.zb && z0 <= inlet.eta) {
        return Err(Error::StepBlowup { t: 0.0, z: z0 });
    }
    let c0 = clamp_inhibition(c0, 0.0)?;

    let length = env.length;
    // generous cap: the lap takes V/Q0 whatever the shape
    let max_steps = (100.0 * env.lap_time() / dt) as usize + 10;

    let (mut t, mut x, mut z, mut c) = (0.0, 0.0, z0, c0);
    let mut rhs = dynamics.eval(x, z, c)?;
    let mut samples = Vec::with_capacity((env.lap_time() / dt) as usize + 2);
    samples.push(TraceSample {
        t,
        x,
        z,
        light: rhs.light,
        c,
        mu: rhs.mu,
    });

    loop {
        if !(rhs.u > 0.0) {
            return Err(Error::NonProgress { t, x });
        }
        let mut step = dt;
        let mut pred = dynamics.eval(x + step * rhs.u, z + step * rhs.w, c + step * rhs.dc)?;
        let mut x_next = x + 0.5 * step * (rhs.u + pred.u);
        let last = x_next >= length - ENDPOINT_SLACK * length;
        if last {
            step *= (length - x) / (x_next - x);
            pred = dynamics.eval(x + step * rhs.u, z + step * rhs.w, c + step * rhs.dc)?;
            x_next = length;
        }
        let z_next = z + 0.5 * step * (rhs.w + pred.w);
        let t_next = t + step;
        let c_next = clamp_inhibition(c + 0.5 * step * (rhs.dc + pred.dc), t_next)?;

        let next = dynamics.eval(x_next, z_next, c_next)?;
        if z_next < next.zb - COLUMN_SLACK
            || z_next > next.eta + COLUMN_SLACK
            || !z_next.is_finite()
        {
            return Err(Error::StepBlowup {
                t: t_next,
                z: z_next,
            });
        }
        (t, x, z, c, rhs) = (t_next, x_next, z_next, c_next, next);
        samples.push(TraceSample {
            t,
            x,
            z,
            light: rhs.light,
            c,
            mu: rhs.mu,
        });
        if last {
            break;
        }
        if samples.len() > max_steps {
            return Err(Error::NonProgress { t, x });
        }
    }
    Ok(LayerTrace { dt, samples })
}

/// Forward traces for every layer of `setup`.
pub fn simulate(
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
    setup: &LayerSetup,
    dt: f64,
) -> Result<Vec<LayerTrace>> {
    let inlet = FlowState::new(shape, env, 0.0)?;
    let starts = setup.initial_positions(shape, env)?;
    let lights = starts
        .iter()
        .map(|&z| Light::at(env, &inlet, z).map(|l| l.intensity))
        .collect::<Result<Vec<_>>>()?;
    let shared = match setup.initial_inhibition {
        InitialInhibition::LayerSteadyState => None,
        InitialInhibition::MeanLightSteadyState => {
            let mean = lights.iter().sum::<f64>() / lights.len() as f64;
            Some(han.rates(mean)?.steady_state())
        }
    };
    starts
        .iter()
        .zip(&lights)
        .map(|(&z0, &light)| {
            let c0 = match shared {
                Some(c) => c,
                None => han.rates(light)?.steady_state(),
            };
            integrate_forward_from(shape, env, han, z0, c0, dt)
        })
        .collect()
}

/// Layer-averaged mean net specific growth rate over the traces.
pub fn average_growth(traces: &[LayerTrace]) -> f64 {
    if traces.is_empty() {
        return 0.0;
    }
    traces.iter().map(LayerTrace::mean_growth).sum::<f64>() / traces.len() as f64
}

/// Objective value for one shape: simulate then average.
pub fn objective(
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
    setup: &LayerSetup,
    dt: f64,
) -> Result<f64> {
    Ok(average_growth(&simulate(shape, env, han, setup, dt)?))
}
