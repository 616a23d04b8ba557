//! Piecewise-Chebyshev trajectories: the history function fed to the solver
//! and the growing orbit it produces, plus uniform sampling into time series.

use crate::chebyshev::ChebSegment;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Knot continuity slack per unit of orbit scale: solver-appended segments
/// must match the running endpoint within `1e-9 * (1 + scale)`.
pub const CONTINUITY_TOL: f64 = 1e-9;

/// Contiguous sequence of [`ChebSegment`]s covering `[t_min, t_max]`.
///
/// Histories assembled from truncated coefficients may carry jumps at their
/// interior knots (that is the point of the truncation experiments), so
/// [`Trajectory::from_segments`] checks contiguity of the knots but not value
/// continuity; [`Trajectory::append_segment`] checks both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    segments: Vec<ChebSegment>,
}

/// Uniformly sampled scalar series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl Trajectory {
    /// Builds a trajectory from contiguous segments (exactly shared knots).
    pub fn from_segments(segments: Vec<ChebSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("trajectory needs >= 1 segment".into()));
        }
        for w in segments.windows(2) {
            if w[0].t_hi != w[1].t_lo {
                return Err(Error::Consistency {
                    at: w[0].t_hi,
                    what: format!("knot gap: segment ends at {} but next starts at {}", w[0].t_hi, w[1].t_lo),
                    measured: (w[1].t_lo - w[0].t_hi).abs(),
                });
            }
        }
        Ok(Trajectory { segments })
    }

    /// A single constant segment on `[t_lo, t_hi]`.
    pub fn constant(t_lo: f64, t_hi: f64, value: f64) -> Result<Self> {
        Ok(Trajectory {
            segments: vec![ChebSegment::constant(t_lo, t_hi, value)?],
        })
    }

    pub fn t_min(&self) -> f64 {
        self.segments[0].t_lo
    }

    pub fn t_max(&self) -> f64 {
        self.segments.last().unwrap().t_hi
    }

    pub fn segments(&self) -> &[ChebSegment] {
        &self.segments
    }

    /// Index of the segment covering `t`; at an interior knot the right
    /// segment wins.
    pub fn segment_index_for(&self, t: f64) -> usize {
        self.segments
            .partition_point(|seg| seg.t_hi <= t)
            .min(self.segments.len() - 1)
    }

    /// Evaluates the trajectory at `t` (clamp tolerance as in segment
    /// evaluation).
    pub fn eval(&self, t: f64) -> Result<f64> {
        let idx = self.segment_index_for(t);
        self.segments[idx].eval(t).map_err(|_| Error::Domain {
            t,
            t_min: self.t_min(),
            t_max: self.t_max(),
        })
    }

    /// Value at the right endpoint, the anchor of the next half-step.
    pub fn end_value(&self) -> f64 {
        let seg = self.segments.last().unwrap();
        seg.eval(seg.t_hi).unwrap()
    }

    /// Returns an extended copy; `seg` must start exactly at `t_max` and
    /// match the endpoint value within `CONTINUITY_TOL * (1 + scale)`.
    pub fn append_segment(&self, seg: ChebSegment, scale: f64) -> Result<Trajectory> {
        let mut out = self.clone();
        out.push_segment(seg, scale)?;
        Ok(out)
    }

    /// In-place extension used by the solver loop; same checks as
    /// [`Trajectory::append_segment`].
    pub(crate) fn push_segment(&mut self, seg: ChebSegment, scale: f64) -> Result<()> {
        let t_max = self.t_max();
        if seg.t_lo != t_max {
            return Err(Error::Consistency {
                at: t_max,
                what: format!("appended segment starts at {} instead of {}", seg.t_lo, t_max),
                measured: (seg.t_lo - t_max).abs(),
            });
        }
        let jump = (self.end_value() - seg.eval(seg.t_lo)?).abs();
        if jump > CONTINUITY_TOL * (1.0 + scale.abs()) {
            return Err(Error::Consistency {
                at: t_max,
                what: "value jump at knot".into(),
                measured: jump,
            });
        }
        self.segments.push(seg);
        Ok(())
    }

    /// Truncates every segment to its leading `q_new` coefficients (the
    /// coarse-history construction of the sweep protocol). Knot continuity
    /// is generally lost; the result is still a valid history.
    pub fn truncate_coeffs(&self, q_new: usize) -> Result<Trajectory> {
        let segments = self
            .segments
            .iter()
            .map(|s| s.truncate(q_new))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { segments })
    }

    /// Samples `[t0, t1]` at `rate` points per unit time.
    pub fn sample(&self, t0: f64, t1: f64, rate: f64) -> Result<TimeSeries> {
        if !(rate > 0.0) {
            return Err(Error::InvalidArgument(format!("rate {rate} must be > 0")));
        }
        if t0 < self.t_min() - 1e-9 || t1 > self.t_max() + 1e-9 || t1 < t0 {
            return Err(Error::Domain {
                t: if t0 < self.t_min() { t0 } else { t1 },
                t_min: self.t_min(),
                t_max: self.t_max(),
            });
        }
        let n = ((t1 - t0) * rate + 1e-9).floor() as usize;
        let mut values = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let t = (t0 + k as f64 / rate).min(self.t_max());
            values.push(self.eval(t)?);
        }
        Ok(TimeSeries {
            t0,
            dt: 1.0 / rate,
            values,
        })
    }

    /// Largest knot jump across interior knots (diagnostic).
    pub fn max_knot_jump(&self) -> f64 {
        self.segments
            .windows(2)
            .map(|w| {
                let left = w[0].eval(w[0].t_hi).unwrap();
                let right = w[1].eval(w[1].t_lo).unwrap();
                (left - right).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// On-disk trajectory format: run metadata plus the segment array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub system: String,
    pub tau: f64,
    pub a: f64,
    pub eps: f64,
    pub q: usize,
    pub seed: u64,
    pub segments: Vec<ChebSegment>,
}

impl TrajectoryFile {
    pub fn new(
        system: &str,
        tau: f64,
        a: f64,
        eps: f64,
        q: usize,
        seed: u64,
        trajectory: &Trajectory,
    ) -> Self {
        TrajectoryFile {
            system: system.to_string(),
            tau,
            a,
            eps,
            q,
            seed,
            segments: trajectory.segments().to_vec(),
        }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }

    pub fn trajectory(&self) -> Result<Trajectory> {
        Trajectory::from_segments(self.segments.clone())
    }
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.dt
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn identity_two_segments() -> Trajectory {
        // x(t) = t on [-3/2, -1/2] as two half-unit pieces
        let s1 = ChebSegment::interpolate(|t| t, 4, -1.5, -1.0).unwrap();
        let s2 = ChebSegment::interpolate(|t| t, 4, -1.0, -0.5).unwrap();
        Trajectory::from_segments(vec![s1, s2]).unwrap()
    }

    #[test]
    fn eval_single_and_two_segment() {
        let c = Trajectory::constant(-1.5, 0.0, 2.5).unwrap();
        assert_eq!(c.eval(-1.0).unwrap(), 2.5);
        let ident = identity_two_segments();
        assert_abs_diff_eq!(ident.eval(-1.0).unwrap(), -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ident.eval(-1.5).unwrap(), -1.5, epsilon = 1e-13);
        assert_abs_diff_eq!(ident.eval(-0.5).unwrap(), -0.5, epsilon = 1e-13);
        assert!(matches!(ident.eval(0.25), Err(Error::Domain { .. })));
    }

    #[test]
    fn knot_ties_break_rightward() {
        let s1 = ChebSegment::constant(0.0, 0.5, 1.0).unwrap();
        let s2 = ChebSegment::constant(0.5, 1.0, 1.0).unwrap();
        let traj = Trajectory::from_segments(vec![s1, s2]).unwrap();
        assert_eq!(traj.segment_index_for(0.5), 1);
        assert_eq!(traj.segment_index_for(0.4999), 0);
        assert_eq!(traj.segment_index_for(1.0), 1);
    }

    #[test]
    fn eval_matches_per_segment_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut segs = Vec::new();
        let mut t = -1.5;
        for _ in 0..10 {
            let coeffs: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            segs.push(ChebSegment::new(t, t + 0.5, coeffs).unwrap());
            t += 0.5;
        }
        let traj = Trajectory::from_segments(segs.clone()).unwrap();
        for _ in 0..200 {
            let t = rng.gen_range(-1.5..3.5);
            // oracle: linear scan for the covering segment, right-closed ties
            let idx = segs
                .iter()
                .rposition(|s| s.t_lo <= t)
                .unwrap();
            assert_eq!(traj.segment_index_for(t), idx, "t={t}");
            assert_eq!(traj.eval(t).unwrap(), segs[idx].eval(t).unwrap());
        }
    }

    #[test]
    fn append_checks_contiguity_and_continuity() {
        let hist = Trajectory::constant(-1.5, 0.0, 1.0).unwrap();
        let good = ChebSegment::constant(0.0, 0.5, 1.0).unwrap();
        let extended = hist.append_segment(good, 2.0).unwrap();
        assert_eq!(extended.t_max(), 0.5);
        assert_eq!(hist.t_max(), 0.0); // input unchanged

        let gap = ChebSegment::constant(0.25, 0.75, 1.0).unwrap();
        assert!(matches!(
            hist.append_segment(gap, 2.0),
            Err(Error::Consistency { .. })
        ));
        let jumpy = ChebSegment::constant(0.0, 0.5, 1.1).unwrap();
        assert!(matches!(
            hist.append_segment(jumpy, 2.0),
            Err(Error::Consistency { .. })
        ));
    }

    #[test]
    fn append_one_by_one_equals_bulk() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut segs = vec![ChebSegment::constant(-1.5, 0.0, 0.3).unwrap()];
        let mut t = 0.0;
        for _ in 0..8 {
            // wiggly but anchored at the previous endpoint
            let prev_end = segs.last().unwrap().eval(t).unwrap();
            let a = rng.gen_range(-0.5..0.5);
            let seg =
                ChebSegment::interpolate(|s| prev_end + a * (s - t), 5, t, t + 0.5).unwrap();
            segs.push(seg);
            t += 0.5;
        }
        let bulk = Trajectory::from_segments(segs.clone()).unwrap();
        let mut grown = Trajectory::from_segments(vec![segs[0].clone()]).unwrap();
        for seg in &segs[1..] {
            grown = grown.append_segment(seg.clone(), 1.0).unwrap();
        }
        assert_eq!(grown, bulk);
    }

    #[test]
    fn sample_basic() {
        let c = Trajectory::constant(0.0, 2.0, 3.25).unwrap();
        let s = c.sample(0.5, 1.5, 10.0).unwrap();
        assert_eq!(s.len(), 11);
        assert!(s.values.iter().all(|&v| v == 3.25));

        let ident = Trajectory::from_segments(vec![
            ChebSegment::interpolate(|t| t, 3, 0.0, 0.5).unwrap(),
            ChebSegment::interpolate(|t| t, 3, 0.5, 1.0).unwrap(),
        ])
        .unwrap();
        let s = ident.sample(0.0, 1.0, 4.0).unwrap();
        assert_eq!(s.len(), 5);
        for (k, v) in s.values.iter().enumerate() {
            assert_abs_diff_eq!(*v, 0.25 * k as f64, epsilon = 1e-13);
        }
        assert!(ident.sample(0.0, 1.5, 4.0).is_err());
    }

    #[test]
    fn sample_decimation_consistency() {
        let traj = Trajectory::from_segments(vec![
            ChebSegment::interpolate(|t| (2.0 * t).sin(), 9, 0.0, 0.5).unwrap(),
            ChebSegment::interpolate(|t| (2.0 * t).sin(), 9, 0.5, 1.0).unwrap(),
        ])
        .unwrap();
        let fine = traj.sample(0.0, 1.0, 200.0).unwrap();
        let coarse = traj.sample(0.0, 1.0, 100.0).unwrap();
        for (k, v) in coarse.values.iter().enumerate() {
            assert_eq!(*v, fine.values[2 * k]);
        }
    }

    #[test]
    fn truncate_coeffs_keeps_knots() {
        let traj = identity_two_segments();
        let t2 = traj.truncate_coeffs(2).unwrap();
        assert_eq!(t2.segments()[0].coeffs.len(), 2);
        assert_eq!(t2.t_min(), traj.t_min());
        assert_eq!(t2.t_max(), traj.t_max());
    }
}
