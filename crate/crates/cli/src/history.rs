//! Seeded random initial histories on [-3/2, 0].
//!
//! One master interpolating polynomial is drawn for the whole window: its q
//! node values are uniform in `center ± amplitude`, and each half-unit
//! segment is the exact re-expansion of that polynomial (interpolation
//! reproduces polynomials of degree <= q-1), so the knots join exactly.
//! Truncating the segment coefficients afterwards yields the coarse
//! histories of the sweep protocol.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use strobo_core::chebyshev::cheb_nodes;
use strobo_core::{ChebSegment, Result, Trajectory};

pub fn random_history(q: usize, seed: u64, amplitude: f64, center: f64) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let node_values: Vec<f64> = (0..q)
        .map(|_| center + rng.gen_range(-1.0..1.0) * amplitude)
        .collect();
    let nodes = cheb_nodes(q)?;
    // Lagrange evaluation of the drawn node values (barycentric form for
    // first-kind nodes), then per-segment Chebyshev re-expansion.
    let weights: Vec<f64> = (0..q)
        .map(|k| {
            // w_k = (-1)^k sin((2k+1)pi/(2q))
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * ((2 * k + 1) as f64 * std::f64::consts::PI / (2.0 * q as f64)).sin()
        })
        .collect();
    let master = |t: f64| -> f64 {
        let u = (2.0 * t + 1.5) / 1.5; // [-3/2, 0] -> [-1, 1]
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..q {
            let d = u - nodes[k];
            if d == 0.0 {
                return node_values[k];
            }
            let w = weights[k] / d;
            num += w * node_values[k];
            den += w;
        }
        num / den
    };
    let segments = (0..3)
        .map(|i| {
            let lo = -1.5 + 0.5 * i as f64;
            ChebSegment::interpolate(master, q, lo, lo + 0.5)
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::from_segments(segments)
}
