//! Exhaustive enumeration of diagram matchings (every point may pair with
//! an unused point of the other diagram or drop to its diagonal
//! projection), for small diagrams only.

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn diag(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / std::f64::consts::SQRT_2
}

fn recurse(a: &[(f64, f64)], b: &[(f64, f64)], used: &mut [bool], i: usize, p: f64) -> f64 {
    if i == a.len() {
        // leftovers of b drop to the diagonal
        return b
            .iter()
            .zip(used.iter())
            .filter(|(_, &u)| !u)
            .map(|(pt, _)| diag(*pt).powf(p))
            .sum();
    }
    let mut best = diag(a[i]).powf(p) + recurse(a, b, used, i + 1, p);
    for j in 0..b.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        let cost = dist(a[i], b[j]).powf(p) + recurse(a, b, used, i + 1, p);
        used[j] = false;
        if cost < best {
            best = cost;
        }
    }
    best
}

/// Exact `W_p` (Euclidean ground norm) by full enumeration; cost grows
/// factorially, keep the diagrams at or below ~7 points.
pub fn wasserstein_exhaustive(a: &[(f64, f64)], b: &[(f64, f64)], p: f64) -> f64 {
    let mut used = vec![false; b.len()];
    recurse(a, b, &mut used, 0, p).powf(1.0 / p)
}
