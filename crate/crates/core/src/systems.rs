//! Right-hand sides `F`, their derivatives, and the a-priori constants
//! (`K0`, `K1`, `K2`, the Lipschitz budget and the proven contraction
//! radius) derived from them.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A delay system `x' = -a*tau*x + tau*F(x(t - 1 + eps*x(t)))` in rescaled
/// time, together with the a-priori orbit bound `M`.
#[derive(Clone)]
pub struct SystemSpec {
    pub name: String,
    f: ScalarFn,
    f_prime: ScalarFn,
    /// Friction coefficient `a >= 0` (pre-rescaling units 1/time).
    pub a: f64,
    /// Delay scale `tau > 0`.
    pub tau: f64,
    /// State-dependence strength.
    pub eps: f64,
    /// A-priori orbit bound, `|x| <= M`, with `M > 1`.
    pub m_bound: f64,
    /// Interval on which `F` is defined; constants are scanned on the
    /// intersection with `[-M, M]`. Mackey-Glass with fractional exponent
    /// is real only for non-negative states.
    pub domain: (f64, f64),
}

/// Constants of the step operator on `[-M, M]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConstants {
    /// `sup |F|`.
    pub k0: f64,
    /// `sup |F'|`.
    pub k1: f64,
    /// Iterate bound `M + tau*K0` (reduced-operator variant).
    pub k2: f64,
    /// Lipschitz budget `max(2 tau K0, tau K0 + a tau M)`.
    pub ell: f64,
    /// Proven contraction radius `min(1/(2 K2), 1/(tau ell K1))`.
    pub eps0: f64,
}

impl fmt::Debug for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemSpec")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("tau", &self.tau)
            .field("eps", &self.eps)
            .field("m_bound", &self.m_bound)
            .finish()
    }
}

impl SystemSpec {
    /// Builds a system from explicit `F` and `F'`.
    pub fn custom<F, G>(
        name: &str,
        f: F,
        f_prime: G,
        a: f64,
        tau: f64,
        eps: f64,
        m_bound: f64,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(tau > 0.0) {
            return Err(Error::InvalidArgument(format!("tau = {tau} must be > 0")));
        }
        if !(m_bound > 1.0) {
            return Err(Error::InvalidArgument(format!("M = {m_bound} must be > 1")));
        }
        if a < 0.0 {
            return Err(Error::InvalidArgument(format!("a = {a} must be >= 0")));
        }
        Ok(SystemSpec {
            name: name.to_string(),
            f: Arc::new(f),
            f_prime: Arc::new(f_prime),
            a,
            tau,
            eps,
            m_bound,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        })
    }

    /// Cubic Ikeda family, `F(u) = u - u^3`, friction free.
    pub fn cubic_ikeda(tau: f64, eps: f64, m_bound: f64) -> Result<Self> {
        SystemSpec::custom(
            "cubic_ikeda",
            |u| u - u * u * u,
            |u| 1.0 - 3.0 * u * u,
            0.0,
            tau,
            eps,
            m_bound,
        )
    }

    /// Mackey-Glass family, `F(u) = beta*u/(1 + u^n)` with friction `a`.
    ///
    /// For non-integer `n` the power is real only on `u >= 0`; evaluation at
    /// negative states yields NaN, which the solver reports as a numeric
    /// error instead of picking a branch.
    pub fn mackey_glass(
        beta: f64,
        n: f64,
        a: f64,
        tau: f64,
        eps: f64,
        m_bound: f64,
    ) -> Result<Self> {
        if !(beta > 0.0) || !(n > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "beta = {beta} and n = {n} must be > 0"
            )));
        }
        let fractional = n.fract() != 0.0;
        let f = move |u: f64| beta * u / (1.0 + u.powf(n));
        let f_prime = move |u: f64| {
            let p = u.powf(n);
            let denom = 1.0 + p;
            beta * (1.0 + (1.0 - n) * p) / (denom * denom)
        };
        let mut spec = SystemSpec::custom("mackey_glass", f, f_prime, a, tau, eps, m_bound)?;
        if fractional {
            spec.domain = (0.0, f64::INFINITY);
        }
        Ok(spec)
    }

    pub fn f(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn f_prime(&self, u: f64) -> f64 {
        (self.f_prime)(u)
    }

    /// Scan interval for the constants: `[-M, M]` clipped to the domain
    /// of `F`.
    fn scan_interval(&self) -> (f64, f64) {
        let lo = (-self.m_bound).max(self.domain.0);
        let hi = self.m_bound.min(self.domain.1);
        (lo, hi)
    }

    /// Computes `K0`, `K1`, the Lipschitz budget and the contraction radius
    /// by a 4096-point scan with one parabolic refinement per local extremum.
    pub fn compute_constants(&self) -> Result<SolverConstants> {
        let (lo, hi) = self.scan_interval();
        let k0 = sup_abs_on_grid(&*self.f, lo, hi)?;
        let k1 = sup_abs_on_grid(&*self.f_prime, lo, hi)?;
        let k2 = self.m_bound + self.tau * k0;
        let ell = (2.0 * self.tau * k0).max(self.tau * k0 + self.a * self.tau * self.m_bound);
        let eps0 = (1.0 / (2.0 * k2)).min(1.0 / (self.tau * ell * k1));
        Ok(SolverConstants {
            k0,
            k1,
            k2,
            ell,
            eps0,
        })
    }
}

const SCAN_POINTS: usize = 4096;

fn sup_abs_on_grid(f: &(dyn Fn(f64) -> f64 + Send + Sync), lo: f64, hi: f64) -> Result<f64> {
    let n = SCAN_POINTS;
    let h = (hi - lo) / n as f64;
    let mut vals = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let u = lo + k as f64 * h;
        let v = f(u).abs();
        if !v.is_finite() {
            return Err(Error::Numeric(format!("F scan hit non-finite value at u = {u}")));
        }
        vals.push(v);
    }
    let mut best = vals[0].max(vals[n]);
    for k in 1..n {
        if vals[k] >= vals[k - 1] && vals[k] >= vals[k + 1] {
            best = best.max(vals[k]);
            // one parabolic (Newton-on-quadratic-model) refinement
            let denom = vals[k - 1] - 2.0 * vals[k] + vals[k + 1];
            if denom < 0.0 {
                let delta = 0.5 * (vals[k - 1] - vals[k + 1]) / denom;
                let u = lo + (k as f64 + delta.clamp(-1.0, 1.0)) * h;
                let v = f(u).abs();
                if v.is_finite() {
                    best = best.max(v);
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cubic_ikeda_values() {
        let sys = SystemSpec::cubic_ikeda(1.62, 0.0, 2.0).unwrap();
        assert_eq!(sys.f(0.0), 0.0);
        assert_eq!(sys.f(1.0), 0.0);
        assert_eq!(sys.f(2.0), -6.0);
        assert_eq!(sys.f_prime(2.0), -11.0);
        assert_eq!(sys.a, 0.0);
    }

    #[test]
    fn mackey_glass_values() {
        let sys = SystemSpec::mackey_glass(2.0, 9.65, 1.0, 2.0, 0.0, 2.0).unwrap();
        assert_eq!(sys.f(0.0), 0.0);
        assert_abs_diff_eq!(sys.f(1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sys.f_prime(1.0), -3.825, epsilon = 1e-12);
        // symbolic derivative against finite differences
        let h = 1e-6;
        for &u in &[0.2, 0.7, 1.0, 1.3, 1.9] {
            let fd = (sys.f(u + h) - sys.f(u - h)) / (2.0 * h);
            assert_abs_diff_eq!(sys.f_prime(u), fd, epsilon = 1e-6);
        }
        // fractional exponent: negative states are not real
        assert!(sys.f(-0.5).is_nan());
        assert!(SystemSpec::mackey_glass(0.0, 9.65, 1.0, 2.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn constants_cubic_ikeda() {
        let sys = SystemSpec::cubic_ikeda(1.62, 0.0, 2.0).unwrap();
        let c = sys.compute_constants().unwrap();
        assert_abs_diff_eq!(c.k0, 6.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.k1, 11.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.k2, 2.0 + 1.62 * 6.0, epsilon = 1e-8);
        assert_abs_diff_eq!(c.ell, 2.0 * 1.62 * 6.0, epsilon = 1e-8);
        let expected_eps0 = (1.0 / (2.0 * 11.72f64)).min(1.0 / (1.62 * 19.44 * 11.0));
        assert_abs_diff_eq!(c.eps0, expected_eps0, epsilon = 1e-10);
        assert_abs_diff_eq!(c.eps0, 2.887e-3, epsilon = 2e-6);
    }

    #[test]
    fn constants_monotone_in_m() {
        let mut prev: Option<SolverConstants> = None;
        for &m in &[1.5, 2.0, 2.5, 3.0, 4.0] {
            let sys = SystemSpec::cubic_ikeda(1.62, 0.0, m).unwrap();
            let c = sys.compute_constants().unwrap();
            if let Some(p) = prev {
                assert!(c.k0 >= p.k0);
                assert!(c.k1 >= p.k1);
                assert!(c.k2 >= p.k2);
                assert!(c.eps0 <= p.eps0);
            }
            prev = Some(c);
        }
    }

    #[test]
    fn mackey_glass_constants_scan_positive_domain() {
        let sys = SystemSpec::mackey_glass(2.0, 9.65, 1.0, 2.0, 0.0, 2.0).unwrap();
        let c = sys.compute_constants().unwrap();
        assert!(c.k0.is_finite() && c.k0 > 0.0);
        assert!(c.k1.is_finite() && c.k1 > 0.0);
        assert!(c.k2 >= sys.m_bound);
    }

    #[test]
    fn derivative_matches_fd_over_scan_range() {
        let sys = SystemSpec::cubic_ikeda(1.62, 0.0, 2.0).unwrap();
        let h = 1e-6;
        for k in 0..1000 {
            let u = -2.0 + 4.0 * k as f64 / 999.0;
            let fd = (sys.f(u + h) - sys.f(u - h)) / (2.0 * h);
            let exact = sys.f_prime(u);
            assert!((exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()), "u={u}");
        }
    }
}
