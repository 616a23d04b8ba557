//! Constant-delay (eps = 0) reference solution by the classical method of
//! steps: unit interval by unit interval, each step an explicit integral of
//! the previous one, evaluated by adaptive quadrature on a dense grid with
//! local Lagrange interpolation in between. Completely independent of the
//! Chebyshev-Picard path.

use crate::quadrature::adaptive_simpson;
use strobo_core::{SystemSpec, Trajectory};

/// Dense-grid solution of `x' = -a tau x + tau F(x(t - 1))` extending the
/// given history.
pub struct MethodOfStepsOracle {
    t_start: f64,
    h: f64,
    grid_per_unit: usize,
    /// Values at `t_start + j*h`, j = 0..=units*grid_per_unit.
    values: Vec<f64>,
    history: Trajectory,
}

impl MethodOfStepsOracle {
    /// Integrates `units` whole time units past the history end.
    /// `grid_per_unit` must be even (substeps never straddle the half-unit
    /// smoothness knots the history introduces).
    pub fn integrate(
        history: &Trajectory,
        sys: &SystemSpec,
        units: usize,
        grid_per_unit: usize,
    ) -> Result<Self, String> {
        if sys.eps != 0.0 {
            return Err("oracle only covers the constant-delay case".into());
        }
        if grid_per_unit % 2 != 0 {
            return Err("grid_per_unit must be even".into());
        }
        let t_start = history.t_max();
        let h = 1.0 / grid_per_unit as f64;
        let alpha = sys.a * sys.tau;
        let mut oracle = MethodOfStepsOracle {
            t_start,
            h,
            grid_per_unit,
            values: Vec::with_capacity(units * grid_per_unit + 1),
            history: history.clone(),
        };
        oracle.values.push(history.eval(t_start).map_err(|e| e.to_string())?);
        let total = units * grid_per_unit;
        for j in 0..total {
            let a = t_start + j as f64 * h;
            let b = t_start + (j + 1) as f64 * h;
            let prev = oracle.values[j];
            // x(b) = x(a) e^{-alpha h} + tau * int_a^b e^{alpha (s-b)} F(x(s-1)) ds
            let integral = adaptive_simpson(
                |s| (alpha * (s - b)).exp() * sys.f(oracle.eval(s - 1.0)),
                a,
                b,
                1e-15,
            );
            let next = prev * (-alpha * h).exp() + sys.tau * integral;
            if !next.is_finite() {
                return Err(format!("oracle diverged at t = {b}"));
            }
            oracle.values.push(next);
        }
        Ok(oracle)
    }

    /// Evaluates the reference solution (history for `t <= t_start`,
    /// 6-point Lagrange on the dense grid beyond, with stencils confined to
    /// half-unit smoothness blocks).
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.t_start {
            return self.history.eval(t).unwrap();
        }
        let x = (t - self.t_start) / self.h;
        let last = self.values.len() - 1;
        let half = self.grid_per_unit / 2;
        // half-unit block containing t
        let block = ((x / half as f64).floor() as usize).min(last / half - 1);
        let (block_lo, block_hi) = (block * half, (block + 1) * half);
        let mut k0 = (x.floor() as usize).saturating_sub(2);
        k0 = k0.clamp(block_lo, block_hi.saturating_sub(5));
        // 6-point Lagrange
        let mut acc = 0.0;
        for i in 0..6 {
            let xi = (k0 + i) as f64;
            let mut l = 1.0;
            for m in 0..6 {
                if m != i {
                    let xm = (k0 + m) as f64;
                    l *= (x - xm) / (xi - xm);
                }
            }
            acc += self.values[k0 + i] * l;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_for_zero_rhs() {
        let sys = SystemSpec::custom("zero", |_| 0.0, |_| 0.0, 0.0, 1.5, 0.0, 2.0).unwrap();
        let hist = Trajectory::constant(-1.5, 0.0, 0.8).unwrap();
        let oracle = MethodOfStepsOracle::integrate(&hist, &sys, 3, 64).unwrap();
        for k in 0..=30 {
            let t = 3.0 * k as f64 / 30.0;
            assert!((oracle.eval(t) - 0.8).abs() <= 1e-13);
        }
    }

    #[test]
    fn pure_friction_decays_exponentially() {
        let sys = SystemSpec::custom("zero", |_| 0.0, |_| 0.0, 1.0, 2.0, 0.0, 2.0).unwrap();
        let hist = Trajectory::constant(-1.5, 0.0, 1.0).unwrap();
        let oracle = MethodOfStepsOracle::integrate(&hist, &sys, 2, 256).unwrap();
        for k in 0..=40 {
            let t = 2.0 * k as f64 / 40.0;
            assert!((oracle.eval(t) - (-2.0 * t).exp()).abs() <= 1e-12, "t={t}");
        }
    }

    #[test]
    fn linear_rhs_matches_closed_form() {
        // x' = tau * x(t-1) with x = c on the history: on [0,1],
        // x(t) = c (1 + tau t).
        let sys = SystemSpec::custom("lin", |u| u, |_| 1.0, 0.0, 0.7, 0.0, 10.0).unwrap();
        let hist = Trajectory::constant(-1.5, 0.0, 0.5).unwrap();
        let oracle = MethodOfStepsOracle::integrate(&hist, &sys, 1, 128).unwrap();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            let expect = 0.5 * (1.0 + 0.7 * t);
            assert!((oracle.eval(t) - expect).abs() <= 1e-12, "t={t}");
        }
    }
}
