//! Chebyshev nodes, Lagrange-Chebyshev interpolation on an interval, and the
//! series calculus (evaluation, differentiation, antidifferentiation) used by
//! the half-step operator.
//!
//! Coefficients are stored densely in the T-basis of the affinely rescaled
//! variable `u in [-1, 1]`; for a segment on `[0, 1/2]` the rescaling is
//! `u = 4t - 1`. Node counts stay small (q <= 32 in practice) so all
//! transforms are plain O(q^2) sums.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative slack, scaled by the interval magnitude, within which evaluation
/// slightly outside `[t_lo, t_hi]` is clamped to the endpoint. Half-step
/// knots are recomputed many times; this absorbs the resulting drift.
const CLAMP_TOL: f64 = 1e-12;

/// One polynomial piece of a solution, in the Chebyshev-T basis on
/// `[t_lo, t_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebSegment {
    pub t_lo: f64,
    pub t_hi: f64,
    /// Coefficients `c_0..c_{q-1}` of `sum_j c_j T_j(u(t))`, with `c_0`
    /// carrying its full weight (no halving convention).
    pub coeffs: Vec<f64>,
}

/// Chebyshev nodes of the first kind, `u_k = cos((2k+1)pi/(2q))`,
/// strictly decreasing in `(-1, 1)`.
pub fn cheb_nodes(q: usize) -> Result<Vec<f64>> {
    if q == 0 {
        return Err(Error::InvalidArgument("node count q must be >= 1".into()));
    }
    Ok((0..q)
        .map(|k| ((2 * k + 1) as f64 * PI / (2.0 * q as f64)).cos())
        .collect())
}

/// Lebesgue constant of q-node first-kind interpolation,
/// `mu_q = (1/q) * sum_j cot((j+1/2)pi/(2q))`, which grows like
/// `(2/pi) log q + 0.9625`.
pub fn lebesgue_mu(q: usize) -> f64 {
    assert!(q >= 1, "q must be >= 1");
    (0..q)
        .map(|j| {
            let theta = (j as f64 + 0.5) * PI / (2.0 * q as f64);
            1.0 / theta.tan()
        })
        .sum::<f64>()
        / q as f64
}

/// Uniform bound from the interpolation lemma: `sup |L_q(g) - g|` over
/// `[t_lo, t_hi]` is at most `interp_error_bound(q, len) * sup |g'|`.
///
/// On a half-unit interval this is `(1 + mu_q) / (4q)`.
pub fn interp_error_bound(q: usize, interval_len: f64) -> f64 {
    // Modulus of continuity at 1/q for the rescaled function is
    // |g'| * len / (2q); the half-unit case reduces to (1+mu_q)/(4q).
    (1.0 + lebesgue_mu(q)) * interval_len / (2.0 * q as f64)
}

impl ChebSegment {
    /// Builds a segment directly from coefficients.
    pub fn new(t_lo: f64, t_hi: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(t_lo < t_hi) {
            return Err(Error::InvalidArgument(format!(
                "segment interval [{t_lo}, {t_hi}] is empty or inverted"
            )));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("segment needs >= 1 coefficient".into()));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Numeric(format!("non-finite coefficient {c}")));
        }
        Ok(ChebSegment { t_lo, t_hi, coeffs })
    }

    /// A constant segment.
    pub fn constant(t_lo: f64, t_hi: f64, value: f64) -> Result<Self> {
        ChebSegment::new(t_lo, t_hi, vec![value])
    }

    /// Interpolates `h` at the q first-kind nodes mapped onto
    /// `[t_lo, t_hi]`, returning the discrete Chebyshev transform of the
    /// samples. Exact (a projection) for polynomials of degree <= q-1.
    pub fn interpolate<F: FnMut(f64) -> f64>(
        mut h: F,
        q: usize,
        t_lo: f64,
        t_hi: f64,
    ) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("node count q must be >= 1".into()));
        }
        let nodes = cheb_nodes(q)?;
        let half = 0.5 * (t_hi - t_lo);
        let mid = 0.5 * (t_hi + t_lo);
        let mut samples = Vec::with_capacity(q);
        for &u in &nodes {
            let t = mid + half * u;
            let v = h(t);
            if !v.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite sample {v} at node t = {t}"
                )));
            }
            samples.push(v);
        }
        let qf = q as f64;
        let mut coeffs = vec![0.0; q];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &s) in samples.iter().enumerate() {
                // T_j(u_k) = cos(j (2k+1) pi / (2q))
                acc += s * ((j * (2 * k + 1)) as f64 * PI / (2.0 * qf)).cos();
            }
            *c = acc * if j == 0 { 1.0 / qf } else { 2.0 / qf };
        }
        ChebSegment::new(t_lo, t_hi, coeffs)
    }

    pub fn q(&self) -> usize {
        self.coeffs.len()
    }

    pub fn len(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    fn clamp_tol(&self) -> f64 {
        CLAMP_TOL * (1.0 + self.t_lo.abs().max(self.t_hi.abs()))
    }

    /// Maps `t` into `[-1, 1]`, clamping within the knot-drift tolerance.
    fn rescale(&self, t: f64) -> Result<f64> {
        let tol = self.clamp_tol();
        if t < self.t_lo - tol || t > self.t_hi + tol {
            return Err(Error::Domain {
                t,
                t_min: self.t_lo,
                t_max: self.t_hi,
            });
        }
        let u = (2.0 * t - self.t_lo - self.t_hi) / (self.t_hi - self.t_lo);
        Ok(u.clamp(-1.0, 1.0))
    }

    /// Evaluates the series at `t` by the backward Clenshaw recurrence.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let u = self.rescale(t)?;
        Ok(self.eval_u(u))
    }

    fn eval_u(&self, u: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let next = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = next;
        }
        u * b1 - b2 + self.coeffs[0]
    }

    /// Derivative with respect to `t` (chain-rule factor applied); the
    /// result has `max(q-1, 1)` coefficients.
    pub fn differentiate(&self) -> ChebSegment {
        let q = self.coeffs.len();
        if q == 1 {
            return ChebSegment {
                t_lo: self.t_lo,
                t_hi: self.t_hi,
                coeffs: vec![0.0],
            };
        }
        let n = q - 1; // degree
        let mut d = vec![0.0; q - 1];
        // d_{j-1} = d_{j+1} + 2 j c_j, running j from the top down.
        let mut d_jp1 = 0.0; // d_{n}
        let mut d_jp2 = 0.0; // d_{n+1}
        for j in (1..=n).rev() {
            let dj = if j + 1 <= n - 1 { d_jp2 } else { 0.0 };
            let val = dj + 2.0 * j as f64 * self.coeffs[j];
            d[j - 1] = val;
            d_jp2 = d_jp1;
            d_jp1 = val;
        }
        d[0] *= 0.5;
        let scale = 2.0 / (self.t_hi - self.t_lo);
        for v in &mut d {
            *v *= scale;
        }
        ChebSegment {
            t_lo: self.t_lo,
            t_hi: self.t_hi,
            coeffs: d,
        }
    }

    /// Antiderivative `A` with `A(t_lo) = 0` and `A' = self`; the result has
    /// `q + 1` coefficients.
    pub fn antiderivative(&self) -> ChebSegment {
        let q = self.coeffs.len();
        let mut a = vec![0.0; q + 1];
        // In u: int T_0 = T_1, int T_1 = T_2/4,
        // int T_n = T_{n+1}/(2(n+1)) - T_{n-1}/(2(n-1)) for n >= 2.
        a[1] += self.coeffs[0];
        if q > 1 {
            a[2] += self.coeffs[1] / 4.0;
        }
        for n in 2..q {
            let c = self.coeffs[n];
            a[n + 1] += c / (2.0 * (n as f64 + 1.0));
            a[n - 1] -= c / (2.0 * (n as f64 - 1.0));
        }
        let scale = 0.5 * (self.t_hi - self.t_lo);
        for v in a.iter_mut().skip(1) {
            *v *= scale;
        }
        // Pin A(t_lo) = 0: value at u = -1 is the alternating coefficient sum.
        let at_lo: f64 = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| if j % 2 == 0 { c } else { -c })
            .sum();
        a[0] = -at_lo;
        ChebSegment {
            t_lo: self.t_lo,
            t_hi: self.t_hi,
            coeffs: a,
        }
    }

    /// Keeps only the leading `q_new` coefficients.
    pub fn truncate(&self, q_new: usize) -> Result<ChebSegment> {
        if q_new == 0 || q_new > self.coeffs.len() {
            return Err(Error::InvalidArgument(format!(
                "truncation length {q_new} outside 1..={}",
                self.coeffs.len()
            )));
        }
        Ok(ChebSegment {
            t_lo: self.t_lo,
            t_hi: self.t_hi,
            coeffs: self.coeffs[..q_new].to_vec(),
        })
    }

    /// Largest absolute value over a dense evaluation grid (used for bound
    /// checks; `points` >= 2 covers both endpoints).
    pub fn max_abs_on_grid(&self, points: usize) -> f64 {
        let n = points.max(2);
        let mut m: f64 = 0.0;
        for k in 0..n {
            let u = -1.0 + 2.0 * k as f64 / (n - 1) as f64;
            m = m.max(self.eval_u(u).abs());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_segment(q: usize, seed: u64, t_lo: f64, t_hi: f64) -> ChebSegment {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<f64> = (0..q).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ChebSegment::new(t_lo, t_hi, coeffs).unwrap()
    }

    /// Direct summation sum c_j cos(j arccos u), the evaluation oracle.
    fn eval_direct(seg: &ChebSegment, t: f64) -> f64 {
        let u = (2.0 * t - seg.t_lo - seg.t_hi) / (seg.t_hi - seg.t_lo);
        let theta = u.clamp(-1.0, 1.0).acos();
        seg.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * (j as f64 * theta).cos())
            .sum()
    }

    #[test]
    fn nodes_match_closed_form() {
        assert_abs_diff_eq!(cheb_nodes(1).unwrap()[0], 0.0, epsilon = 1e-15);
        let n2 = cheb_nodes(2).unwrap();
        assert_abs_diff_eq!(n2[0], 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(n2[1], -(0.5f64.sqrt()), epsilon = 1e-15);
        let n3 = cheb_nodes(3).unwrap();
        assert_abs_diff_eq!(n3[0], 0.75f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(n3[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n3[2], -(0.75f64.sqrt()), epsilon = 1e-15);
        assert!(cheb_nodes(0).is_err());
        // strictly decreasing, roots of T_q
        for q in 1..=32 {
            let nodes = cheb_nodes(q).unwrap();
            for w in nodes.windows(2) {
                assert!(w[0] > w[1]);
            }
            for &u in &nodes {
                let tq = (q as f64 * u.acos()).cos();
                assert!(tq.abs() <= 1e-12, "T_{q}({u}) = {tq}");
            }
        }
    }

    #[test]
    fn interpolate_constant_and_identity() {
        let seg = ChebSegment::interpolate(|_| 3.5, 4, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(seg.coeffs[0], 3.5, epsilon = 1e-14);
        for &c in &seg.coeffs[1..] {
            assert_abs_diff_eq!(c, 0.0, epsilon = 1e-14);
        }
        let seg = ChebSegment::interpolate(|t| t, 2, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(seg.coeffs[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(seg.coeffs[1], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn interpolate_exponential_dense_grid() {
        let seg = ChebSegment::interpolate(|t: f64| t.exp(), 8, 0.0, 0.5).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..10_000 {
            let t = 0.5 * k as f64 / 9_999.0;
            worst = worst.max((seg.eval(t).unwrap() - t.exp()).abs());
        }
        assert!(worst <= 1e-8, "sup error {worst}");
    }

    #[test]
    fn interpolate_rejects_non_finite_samples() {
        let err = ChebSegment::interpolate(|t| if t > 0.2 { f64::NAN } else { 1.0 }, 4, 0.0, 0.5);
        match err {
            Err(Error::Numeric(msg)) => assert!(msg.contains("node")),
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn projection_reproduces_polynomials() {
        // interpolation is a projection on P_{q-1}
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in 1..=12usize {
            let coeffs: Vec<f64> = (0..q).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let p = ChebSegment::new(-0.3, 0.9, coeffs).unwrap();
            let sup_p = p.max_abs_on_grid(1000);
            let re = ChebSegment::interpolate(|t| p.eval(t).unwrap(), q, -0.3, 0.9).unwrap();
            for k in 0..1000 {
                let t = -0.3 + 1.2 * k as f64 / 999.0;
                let d = (p.eval(t).unwrap() - re.eval(t).unwrap()).abs();
                assert!(d <= 1e-12 * (1.0 + sup_p), "q={q} t={t} diff={d}");
            }
        }
    }

    #[test]
    fn eval_matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let seg = random_segment(10, 3, 0.0, 0.5);
        for _ in 0..100 {
            let t = rng.gen_range(0.0..0.5);
            let clenshaw = seg.eval(t).unwrap();
            let direct = eval_direct(&seg, t);
            assert!(
                (clenshaw - direct).abs() <= 1e-13 * (1.0 + direct.abs()),
                "t={t}"
            );
        }
        let one = ChebSegment::constant(0.0, 0.5, 1.0).unwrap();
        assert_eq!(one.eval(0.3).unwrap(), 1.0);
        let ident = ChebSegment::new(0.0, 0.5, vec![0.25, 0.25]).unwrap();
        assert_abs_diff_eq!(ident.eval(0.25).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn eval_clamps_and_rejects() {
        let seg = random_segment(5, 9, 0.0, 0.5);
        let inside = seg.eval(0.5).unwrap();
        let clamped = seg.eval(0.5 + 5e-13).unwrap();
        assert_eq!(inside, clamped);
        assert!(matches!(seg.eval(0.6), Err(Error::Domain { .. })));
        assert!(matches!(seg.eval(-0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn differentiate_basic() {
        let c = ChebSegment::constant(0.0, 0.5, 4.2).unwrap().differentiate();
        assert_eq!(c.coeffs, vec![0.0]);
        let ident = ChebSegment::new(0.0, 0.5, vec![0.25, 0.25]).unwrap();
        let d = ident.differentiate();
        assert_eq!(d.coeffs.len(), 1);
        assert_abs_diff_eq!(d.eval(0.3).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn differentiate_matches_finite_differences() {
        let seg = random_segment(9, 21, 0.0, 0.5);
        let d = seg.differentiate();
        let h = 1e-6;
        for k in 1..=50 {
            let t = 0.5 * k as f64 / 52.0 + 0.004;
            let fd = (seg.eval(t + h).unwrap() - seg.eval(t - h).unwrap()) / (2.0 * h);
            assert!((d.eval(t).unwrap() - fd).abs() <= 1e-6, "t={t}");
        }
    }

    #[test]
    fn antiderivative_basic() {
        let one = ChebSegment::constant(0.0, 0.5, 1.0).unwrap();
        let a = one.antiderivative();
        assert_eq!(a.coeffs.len(), 2);
        for k in 0..=20 {
            let t = 0.5 * k as f64 / 20.0;
            assert_abs_diff_eq!(a.eval(t).unwrap(), t, epsilon = 1e-15);
        }
        let ident = ChebSegment::new(0.0, 0.5, vec![0.25, 0.25]).unwrap();
        assert_abs_diff_eq!(
            ident.antiderivative().eval(0.5).unwrap(),
            0.125,
            epsilon = 1e-15
        );
    }

    #[test]
    fn calculus_round_trip() {
        // antiderivative of the derivative returns the original up to the
        // value at t_lo.
        let seg = random_segment(12, 55, 0.25, 1.25);
        let rt = seg.differentiate().antiderivative();
        let offset = seg.eval(seg.t_lo).unwrap();
        for k in 0..=200 {
            let t = 0.25 + k as f64 / 200.0;
            let got = rt.eval(t).unwrap() + offset;
            assert!((got - seg.eval(t).unwrap()).abs() <= 1e-11);
        }
    }

    #[test]
    fn lebesgue_mu_values() {
        // one-node interpolation has unit operator norm
        assert_abs_diff_eq!(lebesgue_mu(1), 1.0, epsilon = 1e-15);
        let asymptotic = |q: f64| 2.0 / PI * q.ln() + 0.9625;
        assert!((lebesgue_mu(16) - asymptotic(16.0)).abs() <= 0.07);
        assert!((lebesgue_mu(64) - asymptotic(64.0)).abs() <= 0.02);
    }

    #[test]
    fn interp_error_bound_lemma() {
        // Bound check for differentiable functions with known |g'|.
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64)> = vec![
            (Box::new(|t: f64| (3.0 * t).sin()), 3.0),
            (Box::new(|t: f64| (11.0 * t).sin()), 11.0),
            // smoothed ramp: sqrt((t-1/4)^2 + 1e-4), slope < 1
            (Box::new(|t: f64| ((t - 0.25).powi(2) + 1e-4).sqrt()), 1.0),
        ];
        for q in 2..=32usize {
            for (g, lip) in &cases {
                let seg = ChebSegment::interpolate(|t| g(t), q, 0.0, 0.5).unwrap();
                let bound = interp_error_bound(q, 0.5) * lip;
                for k in 0..=2000 {
                    let t = 0.5 * k as f64 / 2000.0;
                    let err = (seg.eval(t).unwrap() - g(t)).abs();
                    assert!(err <= bound, "q={q} t={t} err={err} bound={bound}");
                }
            }
        }
    }

    #[test]
    fn truncate_drops_tail() {
        let seg = ChebSegment::new(0.0, 0.5, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(seg.truncate(3).unwrap(), seg);
        assert_eq!(seg.truncate(1).unwrap().coeffs, vec![1.0]);
        assert!(seg.truncate(0).is_err());
        assert!(seg.truncate(4).is_err());
        // idempotent
        assert_eq!(
            seg.truncate(2).unwrap().truncate(2).unwrap(),
            seg.truncate(2).unwrap()
        );
        // sup-norm gap equals the dropped tail, on a dense grid
        let full = random_segment(17, 77, 0.0, 0.5);
        let trunc = full.truncate(4).unwrap();
        let tail = ChebSegment {
            t_lo: full.t_lo,
            t_hi: full.t_hi,
            coeffs: {
                let mut c = full.coeffs.clone();
                for v in c.iter_mut().take(4) {
                    *v = 0.0;
                }
                c
            },
        };
        for k in 0..=1000 {
            let t = 0.5 * k as f64 / 1000.0;
            let gap = (full.eval(t).unwrap() - trunc.eval(t).unwrap()).abs();
            assert_abs_diff_eq!(gap, tail.eval(t).unwrap().abs(), epsilon = 1e-12);
        }
    }

    #[test]
    fn segment_serialization_schema() {
        let seg = ChebSegment::new(0.0, 0.5, vec![1.0, -0.5]).unwrap();
        let json = serde_json::to_string(&seg).unwrap();
        assert_eq!(json, r#"{"t_lo":0.0,"t_hi":0.5,"coeffs":[1.0,-0.5]}"#);
        let back: ChebSegment = serde_json::from_str(&json).unwrap();
        assert_eq!(back, seg);
    }
}
