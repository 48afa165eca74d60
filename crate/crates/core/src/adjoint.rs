//! Backward adjoint sweep and gradient of the layer-averaged growth rate with
//! respect to the Fourier coefficients.
//!
//! With `J = 1/(Nz T) sum_i int mu(C_i, I(x, z_i)) dt` and the source
//! `S_i = 1/(Nz T) (-gamma' C_i + zeta') + p1_i (-alpha' C_i + beta')`, the multipliers obey
//!
//! ```text
//! p1_i' = gamma(I_i) / (Nz T) + alpha(I_i) p1_i
//! p2_i' = -S_i dI_i/dz - p2_i dw/dz
//! p3'   = -sum_i (S_i dI_i/dx + p2_i dw/dx(x, z_i)) - p3 du/dx
//! ```
//!
//! with zero terminal values, and
//! `dJ/da_n = int sum_i (S_i dI_i/da_n + p2_i dw/da_n) + p3 du/da_n dt`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hydro::{EnvironmentConfig, FlowState, FourierShape};
use crate::lagrange::{self, LayerSetup, LayerTrace};
use crate::photosys::{HanParameters, HanRates, Light};

/// Multipliers on the forward time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointTrace {
    /// `p1[i][k]`: multiplier of `C` for layer `i` at node `k`.
    pub p1: Vec<Vec<f64>>,
    /// `p2[i][k]`: multiplier of `z`.
    pub p2: Vec<Vec<f64>>,
    /// Multiplier of the shared `x`.
    pub p3: Vec<f64>,
}

/// Component-wise comparison against a finite-difference oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdComparison {
    pub analytic: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientReport {
    pub grad: Vec<f64>,
    pub norm: f64,
    pub fd_check: Option<Vec<FdComparison>>,
}

impl GradientReport {
    fn new(grad: Vec<f64>) -> Self {
        let norm = libm::sqrt(grad.iter().map(|g| g * g).sum());
        Self {
            grad,
            norm,
            fd_check: None,
        }
    }

    /// Attach a comparison against `fd`; relative errors are taken against `|fd|`.
    pub fn with_fd(mut self, fd: &[f64]) -> Self {
        let rows = self
            .grad
            .iter()
            .zip(fd)
            .map(|(&analytic, &finite_difference)| FdComparison {
                analytic,
                finite_difference,
                relative_error: relative_error(analytic, finite_difference),
            })
            .collect();
        self.fd_check = Some(rows);
        self
    }

    pub fn max_relative_error(&self) -> Option<f64> {
        self.fd_check
            .as_ref()
            .map(|rows| rows.iter().map(|r| r.relative_error).fold(0.0, f64::max))
    }
}

/// `|a - b| / |b|`, or `|a - b|` when `b` is zero.
pub fn relative_error(a: f64, b: f64) -> f64 {
    let diff = (a - b).abs();
    if b == 0.0 {
        diff
    } else {
        diff / b.abs()
    }
}

/// Forward quantities re-evaluated at one node for one layer.
struct LayerNode {
    rates: HanRates,
    light: Light,
    c: f64,
    z: f64,
    dw_dx: f64,
    dw_dz: f64,
}

/// Node data shared by the backward sweep and the gradient quadrature.
struct Node {
    flow: FlowState,
    layers: Vec<LayerNode>,
}

impl Node {
    /// Adjoint source `S_i` and `d source / d p1` share the bracket below.
    fn source(&self, i: usize, p1: f64, weight: f64) -> f64 {
        let l = &self.layers[i];
        weight * (-l.rates.dgamma * l.c + l.rates.dzeta)
            + p1 * (-l.rates.dalpha * l.c + l.rates.dbeta)
    }
}

struct Sweep<'a> {
    nodes: Vec<Node>,
    times: Vec<f64>,
    traces: &'a [LayerTrace],
    weight: f64,
}

impl<'a> Sweep<'a> {
    fn new(
        traces: &'a [LayerTrace],
        shape: &FourierShape,
        env: &EnvironmentConfig,
        han: &HanParameters,
    ) -> Result<Self> {
        let first = traces.first().ok_or(Error::GridMismatch)?;
        if traces.iter().any(|tr| !tr.same_grid(first)) {
            return Err(Error::GridMismatch);
        }
        let times: Vec<f64> = first.samples.iter().map(|s| s.t).collect();
        let nodes = (0..times.len())
            .map(|k| {
                let flow = FlowState::new(shape, env, first.samples[k].x)?;
                let layers = traces
                    .iter()
                    .map(|tr| {
                        let s = tr.samples[k];
                        let light = Light::unchecked(env, flow.eta, flow.deta, s.z);
                        let vv = flow.vertical_velocity(s.z);
                        Ok(LayerNode {
                            rates: han.rates(light.intensity)?,
                            light,
                            c: s.c,
                            z: s.z,
                            dw_dx: vv.dw_dx,
                            dw_dz: vv.dw_dz,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Node { flow, layers })
            })
            .collect::<Result<Vec<_>>>()?;
        let weight = 1.0 / (traces.len() as f64 * first.final_time());
        Ok(Self {
            nodes,
            times,
            traces,
            weight,
        })
    }

    /// Right-hand side of the adjoint system at node `k` for state `(p1, p2, p3)`.
    fn rhs(
        &self,
        k: usize,
        p1: &[f64],
        p2: &[f64],
        p3: f64,
        out1: &mut [f64],
        out2: &mut [f64],
    ) -> f64 {
        let node = &self.nodes[k];
        let mut d3 = -p3 * node.flow.du;
        for (i, l) in node.layers.iter().enumerate() {
            let s = node.source(i, p1[i], self.weight);
            out1[i] = self.weight * l.rates.gamma + l.rates.alpha * p1[i];
            out2[i] = -s * l.light.d_dz - p2[i] * l.dw_dz;
            d3 -= s * l.light.d_dx + p2[i] * l.dw_dx;
        }
        d3
    }

    fn integrate(&self) -> AdjointTrace {
        let nz = self.traces.len();
        let nt = self.times.len();
        let mut p1 = vec![vec![0.0; nt]; nz];
        let mut p2 = vec![vec![0.0; nt]; nz];
        let mut p3 = vec![0.0; nt];

        let mut cur1 = vec![0.0; nz];
        let mut cur2 = vec![0.0; nz];
        let mut cur3 = 0.0;
        let (mut f1, mut f2) = (vec![0.0; nz], vec![0.0; nz]);
        let (mut g1, mut g2) = (vec![0.0; nz], vec![0.0; nz]);
        let (mut q1, mut q2) = (vec![0.0; nz], vec![0.0; nz]);

        for k in (0..nt.saturating_sub(1)).rev() {
            let h = self.times[k + 1] - self.times[k];
            let f3 = self.rhs(k + 1, &cur1, &cur2, cur3, &mut f1, &mut f2);
            for i in 0..nz {
                q1[i] = cur1[i] - h * f1[i];
                q2[i] = cur2[i] - h * f2[i];
            }
            let q3 = cur3 - h * f3;
            let g3 = self.rhs(k, &q1, &q2, q3, &mut g1, &mut g2);
            for i in 0..nz {
                cur1[i] -= 0.5 * h * (f1[i] + g1[i]);
                cur2[i] -= 0.5 * h * (f2[i] + g2[i]);
                p1[i][k] = cur1[i];
                p2[i][k] = cur2[i];
            }
            cur3 -= 0.5 * h * (f3 + g3);
            p3[k] = cur3;
        }
        AdjointTrace { p1, p2, p3 }
    }

    fn gradient(&self, adjoint: &AdjointTrace, order: usize) -> Vec<f64> {
        let nt = self.times.len();
        let mut grad = vec![0.0; order];
        let mut integrand = vec![0.0; order];
        for k in 0..nt {
            let node = &self.nodes[k];
            integrand.iter_mut().for_each(|v| *v = 0.0);
            for (i, l) in node.layers.iter().enumerate() {
                let s = node.source(i, adjoint.p1[i][k], self.weight);
                let p2 = adjoint.p2[i][k];
                for (n, acc) in integrand.iter_mut().enumerate() {
                    let sens = node.flow.sensitivity_unchecked(n, l.z);
                    *acc += s * l.light.shape_derivative(sens.deta) + p2 * sens.dw;
                }
            }
            for (n, acc) in integrand.iter_mut().enumerate() {
                *acc += adjoint.p3[k] * node.flow.sensitivity_unchecked(n, 0.0).du;
            }
            let left = if k > 0 {
                self.times[k] - self.times[k - 1]
            } else {
                0.0
            };
            let right = if k + 1 < nt {
                self.times[k + 1] - self.times[k]
            } else {
                0.0
            };
            let w = 0.5 * (left + right);
            for (g, v) in grad.iter_mut().zip(&integrand) {
                *g += w * v;
            }
        }
        grad
    }
}

/// Which adjoint produces the gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdjointScheme {
    /// Reverse sweep of the Heun scheme itself: the exact gradient of the discrete objective.
    #[default]
    Discrete,
    /// Continuous adjoint equations integrated by backward Heun, trapezoid quadrature.
    Continuous,
}

/// Per-layer derivative data at one evaluation point of the joint system.
struct LocalLayer {
    rates: HanRates,
    light: Light,
    c: f64,
    z: f64,
    w: f64,
    dw_dx: f64,
    dw_dz: f64,
}

impl LocalLayer {
    /// `d(C')/dI`.
    fn dc_dlight(&self) -> f64 {
        -self.rates.dalpha * self.c + self.rates.dbeta
    }

    /// `d(mu)/dI`.
    fn dmu_dlight(&self) -> f64 {
        -self.rates.dgamma * self.c + self.rates.dzeta
    }
}

struct Local {
    flow: FlowState,
    layers: Vec<LocalLayer>,
}

impl Local {
    fn new(
        shape: &FourierShape,
        env: &EnvironmentConfig,
        han: &HanParameters,
        x: f64,
        zs: &[f64],
        cs: &[f64],
    ) -> Result<Self> {
        let flow = FlowState::new(shape, env, x)?;
        let layers = zs
            .iter()
            .zip(cs)
            .map(|(&z, &c)| {
                let light = Light::unchecked(env, flow.eta, flow.deta, z);
                let vv = flow.vertical_velocity(z);
                Ok(LocalLayer {
                    rates: han.rates(light.intensity)?,
                    light,
                    c,
                    z,
                    w: vv.w,
                    dw_dx: vv.dw_dx,
                    dw_dz: vv.dw_dz,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { flow, layers })
    }

    /// Right-hand side `(x', z_i', C_i')`.
    fn rhs(&self, fz: &mut [f64], fc: &mut [f64]) -> f64 {
        for (i, l) in self.layers.iter().enumerate() {
            fz[i] = l.w;
            fc[i] = l.rates.inhibition_rate(l.c);
        }
        self.flow.u
    }

    /// Accumulates `J^T b` into `(out_x, out_z, out_c)` and `(df/da)^T b` into `grad`.
    #[allow(clippy::too_many_arguments)]
    fn pullback(
        &self,
        bx: f64,
        bz: &[f64],
        bc: &[f64],
        out_x: &mut f64,
        out_z: &mut [f64],
        out_c: &mut [f64],
        grad: &mut [f64],
    ) {
        *out_x += bx * self.flow.du;
        for (i, l) in self.layers.iter().enumerate() {
            let s = bc[i] * l.dc_dlight();
            *out_x += bz[i] * l.dw_dx + s * l.light.d_dx;
            out_z[i] += bz[i] * l.dw_dz + s * l.light.d_dz;
            out_c[i] -= bc[i] * l.rates.alpha;
        }
        for (n, g) in grad.iter_mut().enumerate() {
            let mut acc = bx * self.flow.sensitivity_unchecked(n, 0.0).du;
            for (i, l) in self.layers.iter().enumerate() {
                let sens = self.flow.sensitivity_unchecked(n, l.z);
                acc +=
                    bz[i] * sens.dw + bc[i] * l.dc_dlight() * l.light.shape_derivative(sens.deta);
            }
            *g += acc;
        }
    }

    /// Adds `weight * grad mu_i` for every layer (the `x` part is summed).
    fn objective_pullback(
        &self,
        weight: f64,
        out_x: &mut f64,
        out_z: &mut [f64],
        out_c: &mut [f64],
        grad: &mut [f64],
        with_x: bool,
    ) {
        for (i, l) in self.layers.iter().enumerate() {
            let s = weight * l.dmu_dlight();
            if with_x {
                *out_x += s * l.light.d_dx;
            }
            out_z[i] += s * l.light.d_dz;
            out_c[i] -= weight * l.rates.gamma;
        }
        for (n, g) in grad.iter_mut().enumerate() {
            let mut acc = 0.0;
            for l in &self.layers {
                let sens = self.flow.sensitivity_unchecked(n, l.z);
                acc += weight * l.dmu_dlight() * l.light.shape_derivative(sens.deta);
            }
            *g += acc;
        }
    }
}

/// Reverse-mode sweep through the forward Heun steps.
///
/// The multipliers returned are the sensitivities of the discrete objective to
/// the state at each node, excluding that node's own quadrature term, so they
/// vanish at the final node like their continuous counterparts.
pub fn discrete_adjoint(
    traces: &[LayerTrace],
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
) -> Result<(AdjointTrace, GradientReport)> {
    let first = traces.first().ok_or(Error::GridMismatch)?;
    if traces.iter().any(|tr| !tr.same_grid(first)) {
        return Err(Error::GridMismatch);
    }
    let nz = traces.len();
    let nt = first.samples.len();
    let order = shape.order();
    let dt = first.dt;
    let t_end = first.final_time();
    let scale = 1.0 / (nz as f64 * t_end);

    let mut p1 = vec![vec![0.0; nt]; nz];
    let mut p2 = vec![vec![0.0; nt]; nz];
    let mut p3 = vec![0.0; nt];
    let mut grad = vec![0.0; order];
    if nt < 2 {
        return Ok((AdjointTrace { p1, p2, p3 }, GradientReport::new(grad)));
    }

    let node_state = |k: usize| -> (f64, Vec<f64>, Vec<f64>) {
        let zs = traces.iter().map(|tr| tr.samples[k].z).collect();
        let cs = traces.iter().map(|tr| tr.samples[k].c).collect();
        (first.samples[k].x, zs, cs)
    };
    let steps: Vec<f64> = (0..nt - 1)
        .map(|k| {
            if k + 2 < nt {
                dt
            } else {
                first.samples[k + 1].t - first.samples[k].t
            }
        })
        .collect();
    let weight = |k: usize| -> f64 {
        let left = if k > 0 { steps[k - 1] } else { 0.0 };
        let right = if k + 1 < nt { steps[k] } else { 0.0 };
        0.5 * (left + right) * scale
    };

    // adjoint of the state at node k+1
    let mut bx = 0.0;
    let mut bz = vec![0.0; nz];
    let mut bc = vec![0.0; nz];
    let (mut fz1, mut fc1) = (vec![0.0; nz], vec![0.0; nz]);
    let (mut fz2, mut fc2) = (vec![0.0; nz], vec![0.0; nz]);

    // objective term of the final node; x(T) = L is pinned, so no x part
    let (x_last, z_last, c_last) = node_state(nt - 1);
    Local::new(shape, env, han, x_last, &z_last, &c_last)?.objective_pullback(
        weight(nt - 1),
        &mut bx,
        &mut bz,
        &mut bc,
        &mut grad,
        false,
    );

    for k in (0..nt - 1).rev() {
        let h = steps[k];
        let last = k + 2 == nt;
        let (x, zs, cs) = node_state(k);
        let here = Local::new(shape, env, han, x, &zs, &cs)?;
        let fx1 = here.rhs(&mut fz1, &mut fc1);
        let pz: Vec<f64> = zs.iter().zip(&fz1).map(|(z, f)| z + h * f).collect();
        let pc: Vec<f64> = cs.iter().zip(&fc1).map(|(c, f)| c + h * f).collect();
        let stage = Local::new(shape, env, han, x + h * fx1, &pz, &pc)?;
        stage.rhs(&mut fz2, &mut fc2);

        if last {
            bx = 0.0;
            // d(state_N)/dh through the step length
            let mut bh = 0.0;
            for (i, l) in stage.layers.iter().enumerate() {
                let jz = l.dw_dx * fx1 + l.dw_dz * fz1[i];
                let jc = l.dc_dlight() * (l.light.d_dx * fx1 + l.light.d_dz * fz1[i])
                    - l.rates.alpha * fc1[i];
                bh += bz[i] * (0.5 * (fz1[i] + fz2[i]) + 0.5 * h * jz);
                bh += bc[i] * (0.5 * (fc1[i] + fc2[i]) + 0.5 * h * jc);
            }
            // explicit dependence of the quadrature and of 1/T on h
            for tr in traces {
                let integral = tr.mean_growth() * t_end;
                let end_mu = tr.samples[k].mu + tr.samples[k + 1].mu;
                bh += (0.5 * end_mu / t_end - integral / (t_end * t_end)) / nz as f64;
            }
            // h = 2 (L - x) / (u(x) + u(x + dt u(x)))
            let far = FlowState::new(shape, env, x + dt * here.flow.u)?;
            let usum = here.flow.u + far.u;
            let gap = env.length - x;
            let dh_dx = (-2.0 * usum
                - 2.0 * gap * (here.flow.du + far.du * (1.0 + dt * here.flow.du)))
                / (usum * usum);
            for (n, g) in grad.iter_mut().enumerate() {
                let du_near = here.flow.sensitivity_unchecked(n, 0.0).du;
                let du_far = far.sensitivity_unchecked(n, 0.0).du;
                let dh_da = -2.0 * gap * (du_near + du_far + far.du * dt * du_near) / (usum * usum);
                *g += bh * dh_da;
            }
            bx += bh * dh_dx;
        }

        // y_{k+1} = y_k + h/2 (k1 + k2), k2 = f(y_k + h k1)
        let kx = 0.5 * h * bx;
        let kz: Vec<f64> = bz.iter().map(|b| 0.5 * h * b).collect();
        let kc: Vec<f64> = bc.iter().map(|b| 0.5 * h * b).collect();
        let (mut sx, mut sz, mut sc) = (0.0, vec![0.0; nz], vec![0.0; nz]);
        stage.pullback(kx, &kz, &kc, &mut sx, &mut sz, &mut sc, &mut grad);
        let k1x = kx + h * sx;
        let k1z: Vec<f64> = kz.iter().zip(&sz).map(|(a, b)| a + h * b).collect();
        let k1c: Vec<f64> = kc.iter().zip(&sc).map(|(a, b)| a + h * b).collect();
        bx += sx;
        for i in 0..nz {
            bz[i] += sz[i];
            bc[i] += sc[i];
        }
        here.pullback(k1x, &k1z, &k1c, &mut bx, &mut bz, &mut bc, &mut grad);

        p3[k] = bx;
        for i in 0..nz {
            p1[i][k] = bc[i];
            p2[i][k] = bz[i];
        }
        here.objective_pullback(weight(k), &mut bx, &mut bz, &mut bc, &mut grad, true);
    }
    Ok((AdjointTrace { p1, p2, p3 }, GradientReport::new(grad)))
}

/// Backward Heun sweep of the adjoint system on the forward grid.
pub fn integrate_adjoint(
    traces: &[LayerTrace],
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
) -> Result<AdjointTrace> {
    Ok(Sweep::new(traces, shape, env, han)?.integrate())
}

/// Trapezoid quadrature of the gradient integrand.
pub fn assemble_gradient(
    traces: &[LayerTrace],
    adjoint: &AdjointTrace,
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
) -> Result<GradientReport> {
    let sweep = Sweep::new(traces, shape, env, han)?;
    Ok(GradientReport::new(sweep.gradient(adjoint, shape.order())))
}

/// Objective value plus gradient in one forward and one backward sweep.
pub fn evaluate(
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
    setup: &LayerSetup,
    dt: f64,
) -> Result<(f64, GradientReport)> {
    evaluate_with(shape, env, han, setup, dt, AdjointScheme::Discrete)
}

pub fn evaluate_with(
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
    setup: &LayerSetup,
    dt: f64,
    scheme: AdjointScheme,
) -> Result<(f64, GradientReport)> {
    let traces = lagrange::simulate(shape, env, han, setup, dt)?;
    let mu = lagrange::average_growth(&traces);
    let report = match scheme {
        AdjointScheme::Discrete => discrete_adjoint(&traces, shape, env, han)?.1,
        AdjointScheme::Continuous => {
            let sweep = Sweep::new(&traces, shape, env, han)?;
            let adjoint = sweep.integrate();
            GradientReport::new(sweep.gradient(&adjoint, shape.order()))
        }
    };
    Ok((mu, report))
}

/// Central differences of the objective, one full forward solve per side.
pub fn finite_difference_gradient(
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
    setup: &LayerSetup,
    dt: f64,
    step: f64,
) -> Result<Vec<f64>> {
    (0..shape.order())
        .map(|n| {
            let mut plus = shape.clone();
            plus.coeffs_mut()[n] += step;
            let mut minus = shape.clone();
            minus.coeffs_mut()[n] -= step;
            for candidate in [&plus, &minus] {
                let check = candidate.refined_min_height(env);
                if !check.subcritical {
                    return Err(Error::SubcriticalViolation {
                        min_h: check.min_h,
                        critical: env.critical_height(),
                    });
                }
            }
            let up = lagrange::objective(&plus, env, han, setup, dt)?;
            let down = lagrange::objective(&minus, env, han, setup, dt)?;
            Ok((up - down) / (2.0 * step))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_traces(layers: usize) -> (Vec<LayerTrace>, FourierShape) {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let shape = FourierShape::flat(3);
        let traces =
            lagrange::simulate(&shape, &env, &han, &LayerSetup::uniform(layers), 0.1).unwrap();
        (traces, shape)
    }

    #[test]
    fn terminal_values_are_zero() {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let shape = FourierShape::new(vec![0.03, -0.02]);
        let traces = lagrange::simulate(&shape, &env, &han, &LayerSetup::uniform(3), 0.1).unwrap();
        let adj = integrate_adjoint(&traces, &shape, &env, &han).unwrap();
        for i in 0..3 {
            assert_eq!(*adj.p1[i].last().unwrap(), 0.0);
            assert_eq!(*adj.p2[i].last().unwrap(), 0.0);
        }
        assert_eq!(*adj.p3.last().unwrap(), 0.0);
        assert!(adj.p3.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn flat_p1_matches_linear_ode_solution() {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let layers = 4;
        let (traces, shape) = flat_traces(layers);
        let adj = integrate_adjoint(&traces, &shape, &env, &han).unwrap();
        let t_end = traces[0].final_time();
        for (i, tr) in traces.iter().enumerate() {
            let r = han.rates(tr.samples[0].light).unwrap();
            let b = r.gamma / (layers as f64 * t_end);
            for (k, s) in tr.samples.iter().enumerate().step_by(97) {
                let exact = b / r.alpha * (libm::exp(r.alpha * (s.t - t_end)) - 1.0);
                let got = adj.p1[i][k];
                if exact != 0.0 {
                    assert!(relative_error(got, exact) < 1e-4, "layer {i} t {}", s.t);
                }
            }
        }
    }

    #[test]
    fn mismatched_grids_rejected() {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let shape = FourierShape::flat(1);
        let a = lagrange::integrate_forward(&shape, &env, &han, -0.1, 0.1).unwrap();
        let b = lagrange::integrate_forward(&shape, &env, &han, -0.1, 0.2).unwrap();
        assert_eq!(
            integrate_adjoint(&[a, b], &shape, &env, &han),
            Err(Error::GridMismatch)
        );
        assert_eq!(
            integrate_adjoint(&[], &shape, &env, &han),
            Err(Error::GridMismatch)
        );
    }

    #[test]
    fn zero_growth_objective_has_zero_fd_gradient() {
        let env = EnvironmentConfig::default();
        let han = HanParameters {
            k: 0.0,
            respiration: 0.0,
            ..HanParameters::default()
        };
        let shape = FourierShape::new(vec![0.02, 0.01]);
        let fd = finite_difference_gradient(&shape, &env, &han, &LayerSetup::uniform(2), 0.1, 1e-6)
            .unwrap();
        assert!(fd.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn fd_rejects_supercritical_perturbation() {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let shape = FourierShape::new(vec![0.345]);
        let err =
            finite_difference_gradient(&shape, &env, &han, &LayerSetup::uniform(1), 0.1, 0.01)
                .unwrap_err();
        assert!(matches!(err, Error::SubcriticalViolation { .. }));
    }
}
