//! Exact p-Wasserstein distance between persistence diagrams: the augmented
//! assignment problem (off-diagonal points may match each other or their
//! diagonal projections), solved by the Hungarian shortest-augmenting-path
//! algorithm.

use crate::tda::PersistenceDiagram;
use crate::{Error, Result};

/// Ground norm for the per-pair matching cost. The formula in use reads
/// most plainly as the Euclidean planar distance; the sup-norm variant is
/// kept as a switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroundNorm {
    #[default]
    Euclidean,
    SupNorm,
}

impl GroundNorm {
    fn point_distance(self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let (dx, dy) = (a.0 - b.0, a.1 - b.1);
        match self {
            GroundNorm::Euclidean => (dx * dx + dy * dy).sqrt(),
            GroundNorm::SupNorm => dx.abs().max(dy.abs()),
        }
    }

    /// Distance from a pair to its nearest diagonal point.
    fn diagonal_distance(self, a: (f64, f64)) -> f64 {
        let gap = a.1 - a.0;
        match self {
            GroundNorm::Euclidean => gap / std::f64::consts::SQRT_2,
            GroundNorm::SupNorm => gap / 2.0,
        }
    }
}

/// `W_p` with the Euclidean ground norm.
pub fn wasserstein(d1: &PersistenceDiagram, d2: &PersistenceDiagram, p: f64) -> Result<f64> {
    wasserstein_with_norm(d1, d2, p, GroundNorm::Euclidean)
}

pub fn wasserstein_with_norm(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    p: f64,
    norm: GroundNorm,
) -> Result<f64> {
    if d1.k != d2.k {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: H{} vs H{}",
            d1.k, d2.k
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must be >= 1")));
    }
    let (n1, n2) = (d1.pairs.len(), d2.pairs.len());
    let n = n1 + n2;
    if n == 0 {
        return Ok(0.0);
    }
    // Augmented square cost: rows = d1 points then d2-proxies, columns =
    // d2 points then d1-proxies. A point matched to any proxy column pays
    // its own diagonal projection; proxy-to-proxy is free.
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let c = match (i < n1, j < n2) {
                (true, true) => norm.point_distance(d1.pairs[i], d2.pairs[j]),
                (true, false) => norm.diagonal_distance(d1.pairs[i]),
                (false, true) => norm.diagonal_distance(d2.pairs[j]),
                (false, false) => 0.0,
            };
            cost[i * n + j] = c.powf(p);
        }
    }
    let total = assignment_min_cost(&cost, n);
    Ok(total.powf(1.0 / p))
}

/// Minimal-cost perfect assignment on an `n x n` matrix
/// (shortest augmenting paths with dual potentials, O(n^3)).
fn assignment_min_cost(cost: &[f64], n: usize) -> f64 {
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut assigned_row = vec![0usize; n + 1]; // column -> row (1-based, 0 = free)
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        assigned_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = assigned_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[assigned_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if assigned_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            assigned_row[j0] = assigned_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut total = 0.0;
    for j in 1..=n {
        total += cost[(assigned_row[j] - 1) * n + (j - 1)];
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn dgm(k: usize, pairs: Vec<(f64, f64)>) -> PersistenceDiagram {
        PersistenceDiagram::new(k, pairs)
    }

    fn random_diagram(k: usize, n: usize, rng: &mut ChaCha8Rng) -> PersistenceDiagram {
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let b: f64 = rng.gen_range(0.0..2.0);
                let d: f64 = b + rng.gen_range(0.001..1.5);
                (b, d)
            })
            .collect();
        dgm(k, pairs)
    }

    #[test]
    fn identical_diagrams_are_at_zero() {
        let d = dgm(1, vec![(0.1, 0.5), (0.2, 1.7)]);
        assert_eq!(wasserstein(&d, &d, 1.0).unwrap(), 0.0);
        assert_eq!(wasserstein(&d, &d, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn single_pair_to_empty_projects_on_diagonal() {
        let d = dgm(0, vec![(0.0, 2.0)]);
        let e = dgm(0, vec![]);
        assert_abs_diff_eq!(
            wasserstein(&d, &e, 1.0).unwrap(),
            2.0f64.sqrt(),
            epsilon = 1e-15
        );
        // sup-norm variant: (d - b)/2
        assert_abs_diff_eq!(
            wasserstein_with_norm(&d, &e, 1.0, GroundNorm::SupNorm).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let d = dgm(0, vec![(0.0, 1.0)]);
        let e = dgm(1, vec![(0.0, 1.0)]);
        assert!(wasserstein(&d, &e, 1.0).is_err());
        assert!(wasserstein(&d, &d, 0.5).is_err());
    }

    #[test]
    fn metric_properties_on_random_diagrams() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..15 {
            let a = random_diagram(1, rng.gen_range(0..=5), &mut rng);
            let b = random_diagram(1, rng.gen_range(0..=5), &mut rng);
            let c = random_diagram(1, rng.gen_range(0..=5), &mut rng);
            let dab = wasserstein(&a, &b, 1.0).unwrap();
            let dba = wasserstein(&b, &a, 1.0).unwrap();
            let dac = wasserstein(&a, &c, 1.0).unwrap();
            let dbc = wasserstein(&b, &c, 1.0).unwrap();
            assert!(dab >= 0.0);
            assert_abs_diff_eq!(dab, dba, epsilon = 1e-12);
            assert!(dac <= dab + dbc + 1e-9, "triangle violated");
        }
        // identity of indiscernibles on a distinct pair
        let a = dgm(1, vec![(0.0, 1.0)]);
        let b = dgm(1, vec![(0.0, 1.1)]);
        assert!(wasserstein(&a, &b, 1.0).unwrap() > 0.0);
    }
}
