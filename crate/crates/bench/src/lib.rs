//! Shared data generators for the criterion benchmarks.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use strobo_core::analysis::PointCloud;
use strobo_core::{ChebSegment, Trajectory};

/// Random point cloud in the unit cube.
pub fn random_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    PointCloud::from_rows(rows, "bench").unwrap()
}

/// Smooth random history on [-3/2, 0] with small coefficients.
pub fn random_history(q: usize, seed: u64, amplitude: f64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..q)
        .map(|j| rng.gen_range(-amplitude..amplitude) / (1.0 + j as f64))
        .collect();
    let master = ChebSegment::new(-1.5, 0.0, coeffs).unwrap();
    Trajectory::from_segments(
        (0..3)
            .map(|i| {
                let lo = -1.5 + 0.5 * i as f64;
                ChebSegment::interpolate(|t| master.eval(t).unwrap(), q, lo, lo + 0.5).unwrap()
            })
            .collect(),
    )
    .unwrap()
}
