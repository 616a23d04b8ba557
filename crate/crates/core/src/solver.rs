//! The half-stroboscopic map: each half-unit step of the orbit is computed
//! as the fixed point of the reduced Picard operator
//!
//! ```text
//!     (O f)(t) = z(0) + tau * int_0^t L_{q-1}( F(z(s - 1 + eps f(s))) ) ds
//! ```
//!
//! (friction-free), or of its integrating-factor variant when the system
//! carries a linear friction term. Convergence is measured in the metric
//! `d(f, g) = sup |f' - g'|`.

use crate::chebyshev::ChebSegment;
use crate::systems::SystemSpec;
use crate::trajectory::Trajectory;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cell::Cell;

/// Iteration cap in residual mode; hitting it means the operator is not
/// contracting at this `eps`.
const MAX_RESIDUAL_ITERS: usize = 1000;

/// Consecutive near-unity ratios tolerated before reporting
/// `NonContracting`.
const STALL_WINDOW: usize = 5;
const STALL_RATIO: f64 = 0.99;

/// Stopping rule for the Picard iteration: a fixed iteration count or the
/// residual tolerance `d(O(f), f) <= nu/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Stopping {
    FixedIterations(usize),
    Residual(f64),
}

/// Per-run solver configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Interpolation node count per half-unit segment (>= 2).
    pub q: usize,
    pub stopping: Stopping,
    /// Number of half-unit steps to append.
    pub n_steps: usize,
    /// Track Picard ratios at runtime and fail on sustained non-contraction.
    pub monitor_contraction: bool,
}

impl SolverConfig {
    pub fn new(q: usize, n_steps: usize) -> Self {
        SolverConfig {
            q,
            stopping: Stopping::FixedIterations(30),
            n_steps,
            monitor_contraction: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::InvalidArgument(format!("q = {} must be >= 2", self.q)));
        }
        match self.stopping {
            Stopping::FixedIterations(m) if m == 0 => {
                Err(Error::InvalidArgument("picard_iters must be >= 1".into()))
            }
            Stopping::Residual(nu) if !(nu > 0.0) => {
                Err(Error::InvalidArgument(format!("nu = {nu} must be > 0")))
            }
            _ => Ok(()),
        }
    }
}

/// Observability record for one half-step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    /// Operator applications performed.
    pub iterations: usize,
    /// Final Picard residual `d(f_n, f_{n-1})`.
    pub residual: f64,
    /// Last measured ratio `d_n / d_{n-1}` (0 when the iteration collapsed
    /// exactly, as it does for eps = 0).
    pub contraction_ratio: f64,
    /// Largest `|x|` on the accepted segment.
    pub max_abs: f64,
}

/// Sup of `|f' - g'|` over a Chebyshev-dense grid of `8 * max(q)` points
/// (extrema family, endpoints included).
pub fn metric_d(f: &ChebSegment, g: &ChebSegment) -> f64 {
    let df = f.differentiate();
    let dg = g.differentiate();
    let n = 8 * f.q().max(g.q()).max(2);
    let mid = 0.5 * (f.t_lo + f.t_hi);
    let half = 0.5 * (f.t_hi - f.t_lo);
    let mut sup: f64 = 0.0;
    for j in 0..n {
        let u = (j as f64 * std::f64::consts::PI / (n - 1) as f64).cos();
        let t = mid + half * u;
        let d = (df.eval(t).unwrap() - dg.eval(t).unwrap()).abs();
        sup = sup.max(d);
    }
    sup
}

/// Samples `F(z(t - 1 + eps*w(t)))` and interpolates it at `nodes` points on
/// the step interval. Distinguishes history-range violations (the eps*K2
/// budget) from non-finite right-hand sides.
fn interpolate_integrand(
    w: &ChebSegment,
    z: &Trajectory,
    sys: &SystemSpec,
    nodes: usize,
) -> Result<ChebSegment> {
    let eval_error: Cell<Option<Error>> = Cell::new(None);
    let g = |t: f64| -> f64 {
        let wt = match w.eval(t) {
            Ok(v) => v,
            Err(e) => {
                eval_error.set(Some(e));
                return f64::NAN;
            }
        };
        let arg = t - 1.0 + sys.eps * wt;
        match z.eval(arg) {
            Ok(v) => sys.f(v),
            Err(e) => {
                eval_error.set(Some(e));
                f64::NAN
            }
        }
    };
    let result = ChebSegment::interpolate(g, nodes, w.t_lo, w.t_hi);
    if let Some(e) = eval_error.take() {
        return Err(e);
    }
    result
}

/// One application of the reduced step operator to the candidate segment
/// `w` on `[t_max, t_max + 1/2]`, against the history `z`.
///
/// Friction-free systems get `z(end) + tau * antiderivative(L_{q-1}(G_w))`
/// exactly; systems with friction get the q-node interpolant of
/// `z(end) e^{-a tau t} + tau int_0^t e^{a tau (s-t)} L_{q-1}(G_w)(s) ds`,
/// with the polynomial-times-exponential integral done in closed form by the
/// integration-by-parts recurrence and the interpolant re-anchored at the
/// step origin.
pub fn apply_operator(
    w: &ChebSegment,
    z: &Trajectory,
    sys: &SystemSpec,
    cfg: &SolverConfig,
) -> Result<ChebSegment> {
    cfg.validate()?;
    let z0 = z.end_value();
    let p = interpolate_integrand(w, z, sys, cfg.q - 1)?;
    if sys.a == 0.0 {
        let mut a = p.antiderivative();
        for c in &mut a.coeffs {
            *c *= sys.tau;
        }
        a.coeffs[0] += z0;
        return Ok(a);
    }

    // Integrating factor, in step-local time sigma = t - t0 (the Chebyshev
    // coefficients are interval-relative, so the transplant is exact).
    // With alpha = a*tau and A the antiderivative of e^{alpha sigma} P,
    // the step map is e^{-alpha sigma} (z0 + tau A(sigma)): the exponential
    // kernel is carried in closed form and only re-expanded, together with
    // P, at well past q nodes, which is exact to rounding for this entire
    // product.
    let alpha = sys.a * sys.tau;
    let half = 0.5 * (w.t_hi - w.t_lo);
    let p_local = ChebSegment::new(0.0, 2.0 * half, p.coeffs.clone())?;
    let kernel_nodes = cfg.q + 24;
    let weighted = ChebSegment::interpolate(
        |s| (alpha * s).exp() * p_local.eval(s).unwrap(),
        kernel_nodes,
        0.0,
        2.0 * half,
    )?;
    let a_local = weighted.antiderivative();
    let map = |s: f64| (-alpha * s).exp() * (z0 + sys.tau * a_local.eval(s).unwrap());
    let mut out = ChebSegment::interpolate(map, cfg.q, 0.0, 2.0 * half)?;
    // The interpolant does not hit the anchor exactly; the admissible set
    // requires f(0) = z(0), so shift by the (interpolation-scale) defect.
    let defect = z0 - out.eval(0.0)?;
    out.coeffs[0] += defect;
    ChebSegment::new(w.t_lo, w.t_hi, out.coeffs)
}

/// Iterates the operator from the constant initial guess `f_0 = z(end)`
/// until the stopping rule fires, then bound-checks the candidate segment.
pub fn picard_step(
    z: &Trajectory,
    sys: &SystemSpec,
    cfg: &SolverConfig,
) -> Result<(ChebSegment, StepReport)> {
    cfg.validate()?;
    let t0 = z.t_max();
    if z.t_min() > t0 - 1.5 + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "history covers [{}, {}], needs at least 3/2",
            z.t_min(),
            t0
        )));
    }
    let z0 = z.end_value();
    let mut current = ChebSegment::constant(t0, t0 + 0.5, z0)?;
    let mut residual = f64::INFINITY;
    let mut prev_residual: Option<f64> = None;
    let mut ratio = 0.0;
    let mut stalled = 0usize;
    let mut iterations = 0usize;

    let (max_iters, tol) = match cfg.stopping {
        Stopping::FixedIterations(m) => (m, None),
        Stopping::Residual(nu) => (MAX_RESIDUAL_ITERS, Some(nu / 4.0)),
    };

    for _ in 0..max_iters {
        let next = apply_operator(&current, z, sys, cfg)?;
        iterations += 1;
        let exact_fixed = next.coeffs == current.coeffs;
        residual = metric_d(&next, &current);
        if let Some(prev) = prev_residual {
            if prev > 0.0 {
                ratio = residual / prev;
                if cfg.monitor_contraction {
                    if ratio > STALL_RATIO {
                        stalled += 1;
                        if stalled >= STALL_WINDOW {
                            return Err(Error::NonContracting {
                                ratio,
                                window: stalled,
                            });
                        }
                    } else {
                        stalled = 0;
                    }
                }
            } else {
                ratio = 0.0;
            }
        }
        prev_residual = Some(residual);
        current = next;
        if exact_fixed {
            // Bit-identical iterate: the operator has collapsed (always the
            // case for eps = 0 after the second application).
            break;
        }
        if let Some(t) = tol {
            if residual <= t {
                break;
            }
        }
    }
    if let Some(t) = tol {
        if residual > t {
            return Err(Error::NoConvergence {
                residual,
                iterations,
            });
        }
    }

    let max_abs = current.max_abs_on_grid(8 * cfg.q.max(8) + 1);
    if !max_abs.is_finite() {
        return Err(Error::Numeric("non-finite values on accepted segment".into()));
    }
    if max_abs > sys.m_bound {
        return Err(Error::BoundExceeded {
            max_abs,
            bound: sys.m_bound,
        });
    }
    Ok((
        current,
        StepReport {
            step: 0,
            iterations,
            residual,
            contraction_ratio: ratio,
            max_abs,
        },
    ))
}

/// Grows the trajectory by `cfg.n_steps` half-unit segments.
pub fn run(
    history: &Trajectory,
    sys: &SystemSpec,
    cfg: &SolverConfig,
) -> Result<(Trajectory, Vec<StepReport>)> {
    cfg.validate()?;
    if history.t_max() - history.t_min() < 1.5 - 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "history window {} shorter than 3/2",
            history.t_max() - history.t_min()
        )));
    }
    // The scheme assumes |z| <= M on the window it reads.
    let hist_max = history_max_abs(history);
    if hist_max > sys.m_bound {
        return Err(Error::BoundExceeded {
            max_abs: hist_max,
            bound: sys.m_bound,
        });
    }
    let mut traj = history.clone();
    let mut reports = Vec::with_capacity(cfg.n_steps);
    for step in 0..cfg.n_steps {
        let (seg, mut report) = picard_step(&traj, sys, cfg).map_err(|e| e.at_step(step))?;
        report.step = step;
        traj.push_segment(seg, sys.m_bound)
            .map_err(|e| e.at_step(step))?;
        reports.push(report);
    }
    Ok((traj, reports))
}

fn history_max_abs(history: &Trajectory) -> f64 {
    history
        .segments()
        .iter()
        .map(|s| s.max_abs_on_grid(8 * s.q().max(8) + 1))
        .fold(0.0, f64::max)
}

/// Measured contraction of one operator application on the pair
/// `(w1, w2)`: `d(O w1, O w2) / d(w1, w2)`.
pub fn contraction_ratio(
    z: &Trajectory,
    sys: &SystemSpec,
    cfg: &SolverConfig,
    w1: &ChebSegment,
    w2: &ChebSegment,
) -> Result<f64> {
    let d12 = metric_d(w1, w2);
    if d12 == 0.0 {
        return Err(Error::InvalidArgument(
            "contraction ratio undefined for d(w1, w2) = 0".into(),
        ));
    }
    let o1 = apply_operator(w1, z, sys, cfg)?;
    let o2 = apply_operator(w2, z, sys, cfg)?;
    Ok(metric_d(&o1, &o2) / d12)
}
