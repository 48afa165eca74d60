//! Parallel drivers for the experiments. Each cell is computed independently and
//! reduced in a fixed order, so the results equal the sequential drivers bitwise.

use raceway_core::optimizer::{self, OrderSweepRow};
use raceway_core::{
    adjoint, EnvironmentConfig, FourierShape, GradientReport, HanParameters, LayerSetup,
    OptimizeSettings,
};
use rayon::prelude::*;

use crate::error::Result;

/// Mean objective over `shapes` for each layer count.
pub fn nz_sweep(
    shapes: &[FourierShape],
    env: &EnvironmentConfig,
    han: &HanParameters,
    layer_counts: &[usize],
    dt: f64,
) -> Result<Vec<(usize, f64)>> {
    let cells: Vec<(usize, usize)> = (0..layer_counts.len())
        .flat_map(|j| (0..shapes.len()).map(move |i| (j, i)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(j, i)| {
            let setup = LayerSetup::uniform(layer_counts[j]);
            raceway_core::objective(&shapes[i], env, han, &setup, dt)
        })
        .collect::<raceway_core::Result<Vec<f64>>>()?;
    Ok(layer_counts
        .iter()
        .zip(values.chunks(shapes.len().max(1)))
        .map(|(&nz, chunk)| (nz, chunk.iter().sum::<f64>() / shapes.len() as f64))
        .collect())
}

/// Optimizes from the flat start for every order, one order per task.
pub fn order_sweep(
    env: &EnvironmentConfig,
    han: &HanParameters,
    orders: &[usize],
    settings: &OptimizeSettings,
) -> Result<Vec<OrderSweepRow>> {
    let rows = orders
        .par_iter()
        .map(|&order| optimizer::order_sweep(env, han, &[order], settings))
        .collect::<raceway_core::Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Adjoint gradient with an attached central-difference comparison.
pub fn grad_check(
    shape: &FourierShape,
    env: &EnvironmentConfig,
    han: &HanParameters,
    setup: &LayerSetup,
    dt: f64,
    step: f64,
) -> Result<(f64, GradientReport)> {
    let (evaluated, fd) = rayon::join(
        || adjoint::evaluate(shape, env, han, setup, dt),
        || adjoint::finite_difference_gradient(shape, env, han, setup, dt, step),
    );
    let (mu, report) = evaluated?;
    Ok((mu, report.with_fd(&fd?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::ShapeSampler;

    #[test]
    fn parallel_nz_sweep_matches_sequential() {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let shapes = ShapeSampler::new(env, 3, 1).take(3);
        let counts = [1, 2, 3];
        let par = nz_sweep(&shapes, &env, &han, &counts, 0.2).unwrap();
        let seq = optimizer::nz_sweep(&shapes, &env, &han, &counts, 0.2).unwrap();
        assert_eq!(par.len(), 3);
        for (p, s) in par.iter().zip(&seq) {
            assert_eq!(p.0, s.0);
            assert_eq!(p.1.to_bits(), s.1.to_bits());
        }
    }

    #[test]
    fn parallel_order_sweep_matches_sequential() {
        let env = EnvironmentConfig::default();
        let han = HanParameters::default();
        let settings = OptimizeSettings {
            layers: 2,
            max_iter: 2,
            dt: 0.2,
            ..Default::default()
        };
        let par = order_sweep(&env, &han, &[0, 1, 2], &settings).unwrap();
        let seq = optimizer::order_sweep(&env, &han, &[0, 1, 2], &settings).unwrap();
        assert_eq!(par, seq);
    }
}
