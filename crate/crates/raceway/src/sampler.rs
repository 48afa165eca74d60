//! Seeded random subcritical shapes.

use raceway_core::{EnvironmentConfig, FourierShape};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Draws `a_n` uniformly from `[-a0/(2N), a0/(2N)]` and keeps the draw only if
/// it is subcritical.
#[derive(Debug, Clone)]
pub struct ShapeSampler {
    rng: ChaCha8Rng,
    order: usize,
    env: EnvironmentConfig,
}

impl ShapeSampler {
    pub fn new(env: EnvironmentConfig, order: usize, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            order,
            env,
        }
    }

    pub fn bound(&self) -> f64 {
        self.env.a0 / (2.0 * self.order.max(1) as f64)
    }

    pub fn sample(&mut self) -> FourierShape {
        let bound = self.bound();
        loop {
            let coeffs = (0..self.order)
                .map(|_| self.rng.random_range(-bound..=bound))
                .collect();
            let shape = FourierShape::new(coeffs);
            if shape.is_subcritical(&self.env) {
                return shape;
            }
        }
    }

    pub fn take(&mut self, count: usize) -> Vec<FourierShape> {
        (0..count).map(|_| self.sample()).collect()
    }
}
