//! Time-series methodology for comparing attractors: normalization, delay
//! embedding, false nearest neighbors, correlation dimension, and
//! peak-to-peak maps.

use crate::trajectory::TimeSeries;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Radii protocol for the correlation-dimension fit: 25 logarithmically
/// spaced radii in `[1e-3, 1e-2]`.
pub const CD_RADII_COUNT: usize = 25;
pub const CD_RADIUS_MIN: f64 = 1e-3;
pub const CD_RADIUS_MAX: f64 = 1e-2;
/// Minimum number of nonzero correlation fractions for a usable fit.
pub const CD_MIN_USABLE: usize = 5;

/// Delay-embedded points, row-major `N x d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    data: Vec<f64>,
    dim: usize,
    /// Run identifier carried through the pipeline.
    pub provenance: String,
}

/// Log-log least-squares fit of correlation fractions against radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationFit {
    pub radii: Vec<f64>,
    pub fractions: Vec<f64>,
    /// The correlation-dimension estimate.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Radii excluded from the regression because their fraction was zero.
    pub dropped_radii: Vec<f64>,
}

impl PointCloud {
    pub fn from_rows(rows: Vec<Vec<f64>>, provenance: &str) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("empty point cloud".into()));
        }
        let dim = rows[0].len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("ragged point cloud rows".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite coordinate in point cloud".into()));
        }
        Ok(PointCloud {
            data,
            dim,
            provenance: provenance.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Concatenates clouds of equal dimension (the grouped-sampling step of
    /// the correlation-dimension protocol).
    pub fn concat(clouds: &[&PointCloud], provenance: &str) -> Result<PointCloud> {
        if clouds.is_empty() {
            return Err(Error::InvalidArgument("no clouds to concatenate".into()));
        }
        let dim = clouds[0].dim;
        if clouds.iter().any(|c| c.dim != dim) {
            return Err(Error::InvalidArgument("dimension mismatch in concat".into()));
        }
        let data = clouds.iter().flat_map(|c| c.data.iter().copied()).collect();
        Ok(PointCloud {
            data,
            dim,
            provenance: provenance.to_string(),
        })
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Population standard deviation.
fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Divides by the population standard deviation (the mean is untouched).
pub fn normalize(series: &TimeSeries) -> Result<TimeSeries> {
    if series.len() < 2 {
        return Err(Error::DegenerateInput("need >= 2 samples to normalize".into()));
    }
    let std = population_std(&series.values);
    if std == 0.0 {
        return Err(Error::DegenerateInput("series has zero variance".into()));
    }
    Ok(TimeSeries {
        t0: series.t0,
        dt: series.dt,
        values: series.values.iter().map(|v| v / std).collect(),
    })
}

/// Sliding windows `[y_i, ..., y_{i+d-1}]` at one-sample lag.
pub fn delay_embed(series: &TimeSeries, d: usize) -> Result<PointCloud> {
    if d == 0 {
        return Err(Error::InvalidArgument("embedding dimension must be >= 1".into()));
    }
    if series.len() < d {
        return Err(Error::InvalidArgument(format!(
            "series of length {} cannot embed in dimension {d}",
            series.len()
        )));
    }
    let n = series.len() - d + 1;
    let mut data = Vec::with_capacity(n * d);
    for i in 0..n {
        data.extend_from_slice(&series.values[i..i + d]);
    }
    Ok(PointCloud {
        data,
        dim: d,
        provenance: String::new(),
    })
}

/// Fraction of false nearest neighbors at embedding dimension `d`
/// (distance-ratio threshold `r_tol`, attractor-size threshold `a_tol`
/// scaled by the series standard deviation).
pub fn fnn_fraction(series: &TimeSeries, d: usize, r_tol: f64, a_tol: f64) -> Result<f64> {
    if series.len() < d + 2 {
        return Err(Error::InvalidArgument(format!(
            "series of length {} too short for FNN at d = {d}",
            series.len()
        )));
    }
    let cloud = delay_embed(series, d)?;
    // points whose (d+1)-th coordinate exists
    let usable = series.len() - d;
    let attractor_size = population_std(&series.values);
    if attractor_size == 0.0 {
        return Err(Error::DegenerateInput("series has zero variance".into()));
    }
    let flagged: usize = (0..usable)
        .into_par_iter()
        .map(|i| {
            let pi = cloud.point(i);
            let mut best = f64::INFINITY;
            let mut best_j = usize::MAX;
            for j in 0..usable {
                if j == i {
                    continue;
                }
                let d2 = dist2(pi, cloud.point(j));
                if d2 < best {
                    best = d2;
                    best_j = j;
                }
            }
            let rd = best.sqrt();
            let jump = (series.values[i + d] - series.values[best_j + d]).abs();
            // multiplicative form keeps the zero-distance case sane
            let criterion1 = jump > r_tol * rd;
            let criterion2 = (rd * rd + jump * jump).sqrt() > a_tol * attractor_size;
            usize::from(criterion1 || criterion2)
        })
        .sum();
    Ok(flagged as f64 / usable as f64)
}

/// Fraction of ordered distinct pairs closer than each radius:
/// `C_i = 2 #{m < n : |y_m - y_n| < r_i} / (N (N-1))`.
///
/// Counting is exact; pairs are pruned through a sort on the first
/// coordinate so only pairs within the largest radius on that axis are
/// tested.
pub fn correlation_fractions(cloud: &PointCloud, radii: &[f64]) -> Result<Vec<f64>> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidArgument("radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("radii must be strictly ascending".into()));
    }
    let n = cloud.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need >= 2 points".into()));
    }
    let r_max = *radii.last().unwrap();
    let r2: Vec<f64> = radii.iter().map(|r| r * r).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        cloud.point(a)[0]
            .partial_cmp(&cloud.point(b)[0])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let bins = (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; radii.len() + 1],
            |mut bins, a| {
                let pa = cloud.point(order[a]);
                for b in (a + 1)..n {
                    let pb = cloud.point(order[b]);
                    if pb[0] - pa[0] >= r_max {
                        break;
                    }
                    let d2 = dist2(pa, pb);
                    // first radius strictly greater than the distance
                    let idx = r2.partition_point(|&rr| rr <= d2);
                    bins[idx] += 1;
                }
                bins
            },
        )
        .reduce(
            || vec![0u64; radii.len() + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x += y;
                }
                a
            },
        );

    // prefix sums: C_i counts pairs with distance < r_i
    let total_pairs = (n as f64) * (n as f64 - 1.0) / 2.0;
    let mut acc = 0u64;
    let mut fractions = Vec::with_capacity(radii.len());
    for &b in bins.iter().take(radii.len()) {
        acc += b;
        fractions.push(acc as f64 / total_pairs);
    }
    Ok(fractions)
}

/// The 25 log-spaced protocol radii.
pub fn cd_radii() -> Vec<f64> {
    let lo = CD_RADIUS_MIN.ln();
    let hi = CD_RADIUS_MAX.ln();
    (0..CD_RADII_COUNT)
        .map(|i| (lo + (hi - lo) * i as f64 / (CD_RADII_COUNT - 1) as f64).exp())
        .collect()
}

/// Correlation-dimension estimate: least-squares slope of `log C` against
/// `log r` over the protocol radii, dropping radii with zero counts.
pub fn correlation_dimension(cloud: &PointCloud) -> Result<CorrelationFit> {
    let radii = cd_radii();
    let fractions = correlation_fractions(cloud, &radii)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = Vec::new();
    for (&r, &c) in radii.iter().zip(fractions.iter()) {
        if c > 0.0 {
            xs.push(r.ln());
            ys.push(c.ln());
        } else {
            dropped.push(r);
        }
    }
    if xs.len() < CD_MIN_USABLE {
        return Err(Error::InsufficientData(format!(
            "only {} of {} radii have nonzero counts; cloud too sparse for the radii band",
            xs.len(),
            radii.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys.iter()).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(CorrelationFit {
        radii,
        fractions,
        slope,
        intercept,
        residual,
        dropped_radii: dropped,
    })
}

/// Local maxima `v_{k-1} < v_k >= v_{k+1}`, refined by the vertex of the
/// parabola through the three samples; plateaus report the leftmost sample
/// unrefined. Returns chronological `(time, value)` pairs.
pub fn find_peaks(series: &TimeSeries) -> Vec<(f64, f64)> {
    let v = &series.values;
    let mut peaks = Vec::new();
    if v.len() < 3 {
        return peaks;
    }
    for k in 1..v.len() - 1 {
        if v[k - 1] < v[k] && v[k] >= v[k + 1] {
            let t_k = series.time_at(k);
            if v[k] == v[k + 1] {
                // plateau: leftmost sample, no refinement
                peaks.push((t_k, v[k]));
                continue;
            }
            let denom = v[k - 1] - 2.0 * v[k] + v[k + 1];
            if denom == 0.0 {
                peaks.push((t_k, v[k]));
                continue;
            }
            let delta = 0.5 * (v[k - 1] - v[k + 1]) / denom;
            let t = t_k + delta * series.dt;
            let value = v[k] - 0.25 * (v[k - 1] - v[k + 1]) * delta;
            peaks.push((t, value));
        }
    }
    peaks
}

/// Consecutive peak-value pairs `(p_k, p_{k+1})`.
pub fn peak_to_peak(peaks: &[(f64, f64)]) -> Vec<(f64, f64)> {
    peaks
        .windows(2)
        .map(|w| (w[0].1, w[1].1))
        .collect()
}
