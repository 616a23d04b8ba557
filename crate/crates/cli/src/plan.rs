//! Declarative experiment plans: one JSON document per plan, defaults
//! matching the full-scale protocol, plus a desk-scale preset for fast
//! verification runs.

use serde::{Deserialize, Serialize};
use strobo_core::{Error, Result, SystemSpec};

/// System selector and parameters, exactly the config surface: named
/// families plus `custom` referring to a registered right-hand side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// "cubic_ikeda" | "mackey_glass" | "custom"
    pub system: String,
    pub tau: f64,
    pub eps: f64,
    #[serde(rename = "M")]
    pub m_bound: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_n")]
    pub n: f64,
    #[serde(default)]
    pub a: f64,
    /// Name of the registered custom right-hand side (system = "custom").
    #[serde(default)]
    pub custom_name: Option<String>,
}

fn default_beta() -> f64 {
    2.0
}

fn default_n() -> f64 {
    9.65
}

impl SystemConfig {
    pub fn cubic_ikeda(tau: f64, eps: f64) -> Self {
        SystemConfig {
            system: "cubic_ikeda".into(),
            tau,
            eps,
            m_bound: 2.0,
            beta: default_beta(),
            n: default_n(),
            a: 0.0,
            custom_name: None,
        }
    }

    /// Classical chaotic-regime defaults beta = 2, a = 1, n = 9.65 (the
    /// paper states only tau and eps for this family).
    pub fn mackey_glass(tau: f64, eps: f64) -> Self {
        SystemConfig {
            system: "mackey_glass".into(),
            tau,
            eps,
            m_bound: 2.0,
            beta: default_beta(),
            n: default_n(),
            a: 1.0,
            custom_name: None,
        }
    }

    pub fn build(&self) -> Result<SystemSpec> {
        match self.system.as_str() {
            "cubic_ikeda" => SystemSpec::cubic_ikeda(self.tau, self.eps, self.m_bound),
            "mackey_glass" => SystemSpec::mackey_glass(
                self.beta,
                self.n,
                self.a,
                self.tau,
                self.eps,
                self.m_bound,
            ),
            "custom" => match self.custom_name.as_deref() {
                Some("zero") => SystemSpec::custom(
                    "zero",
                    |_| 0.0,
                    |_| 0.0,
                    self.a,
                    self.tau,
                    self.eps,
                    self.m_bound,
                ),
                Some("identity") => SystemSpec::custom(
                    "identity",
                    |u| u,
                    |_| 1.0,
                    self.a,
                    self.tau,
                    self.eps,
                    self.m_bound,
                ),
                Some(other) => Err(Error::InvalidArgument(format!(
                    "unknown custom right-hand side '{other}' (registered: zero, identity)"
                ))),
                None => Err(Error::InvalidArgument(
                    "system = custom requires custom_name".into(),
                )),
            },
            other => Err(Error::InvalidArgument(format!(
                "unknown system '{other}' (expected cubic_ikeda | mackey_glass | custom)"
            ))),
        }
    }
}

/// Full experiment plan (ground truth + truncation sweep + analysis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    #[serde(flatten)]
    pub system: SystemConfig,
    #[serde(default = "d_q_truth")]
    pub q_truth: usize,
    #[serde(default = "d_q_sweep")]
    pub q_sweep: Vec<usize>,
    #[serde(default = "d_n_sims")]
    pub n_sims: usize,
    #[serde(default = "d_total_steps")]
    pub total_steps: usize,
    #[serde(default = "d_retain_steps")]
    pub retain_steps: usize,
    #[serde(default = "d_picard_iters")]
    pub picard_iters: usize,
    #[serde(default)]
    pub seed: u64,
    /// Node-value amplitude of the random initial history; when absent a
    /// system-dependent default applies (0.9 for the cubic, 0.5 for
    /// Mackey-Glass).
    #[serde(default)]
    pub history_amplitude: Option<f64>,
    /// Center offset of the random initial history; defaults to 0, or to
    /// the positive equilibrium 1 for Mackey-Glass (fractional n is not
    /// real for negative states).
    #[serde(default)]
    pub history_center: Option<f64>,
    /// Delay-embedding dimension; defaults to 3, or 4 for Mackey-Glass
    /// with tau >= 4.
    #[serde(default)]
    pub embed_dim: Option<usize>,
    /// Simulations concatenated per correlation-dimension estimate.
    #[serde(default = "d_cd_group")]
    pub cd_group_size: usize,
    /// Point count of each persistence subsample.
    #[serde(default = "d_tda_subsample")]
    pub tda_subsample: usize,
    /// Leading simulations used for persistence diagrams.
    #[serde(default = "d_tda_clouds")]
    pub tda_n_clouds: usize,
    /// Time window for peak extraction, from the start of the retained
    /// interval (clamped to its length).
    #[serde(default = "d_p2p_window")]
    pub p2p_window: f64,
    #[serde(default = "d_lissajou_window")]
    pub lissajou_window: f64,
    /// Write full trajectory files for every run (large).
    #[serde(default)]
    pub save_trajectories: bool,
}

fn d_q_truth() -> usize {
    17
}
fn d_q_sweep() -> Vec<usize> {
    (2..=10).collect()
}
fn d_n_sims() -> usize {
    50
}
fn d_total_steps() -> usize {
    21_000
}
fn d_retain_steps() -> usize {
    20_000
}
fn d_picard_iters() -> usize {
    30
}
fn d_cd_group() -> usize {
    5
}
fn d_tda_subsample() -> usize {
    1000
}
fn d_tda_clouds() -> usize {
    10
}
fn d_p2p_window() -> f64 {
    2500.0
}
fn d_lissajou_window() -> f64 {
    250.0
}

impl ExperimentPlan {
    /// Full-scale protocol for a system.
    pub fn paper(system: SystemConfig) -> Self {
        let plan = ExperimentPlan {
            system,
            q_truth: d_q_truth(),
            q_sweep: d_q_sweep(),
            n_sims: d_n_sims(),
            total_steps: d_total_steps(),
            retain_steps: d_retain_steps(),
            picard_iters: d_picard_iters(),
            seed: 0,
            history_amplitude: None,
            history_center: None,
            embed_dim: None,
            cd_group_size: d_cd_group(),
            tda_subsample: d_tda_subsample(),
            tda_n_clouds: d_tda_clouds(),
            p2p_window: d_p2p_window(),
            lissajou_window: d_lissajou_window(),
            save_trajectories: false,
        };
        plan
    }

    /// Desk-scale preset: 10 simulations, 4200 half-steps (2100 time
    /// units), 400-point persistence subsamples, groups of 2 for the
    /// correlation dimension.
    pub fn desk(system: SystemConfig) -> Self {
        let mut plan = ExperimentPlan::paper(system);
        plan.n_sims = 10;
        plan.total_steps = 4200;
        plan.retain_steps = 4000;
        plan.cd_group_size = 2;
        plan.tda_subsample = 400;
        plan.tda_n_clouds = 10;
        plan
    }

    fn is_mackey_glass(&self) -> bool {
        self.system.system == "mackey_glass"
    }

    pub fn amplitude(&self) -> f64 {
        self.history_amplitude
            .unwrap_or(if self.is_mackey_glass() { 0.5 } else { 0.9 })
    }

    pub fn center(&self) -> f64 {
        self.history_center
            .unwrap_or(if self.is_mackey_glass() { 1.0 } else { 0.0 })
    }

    pub fn embedding_dim(&self) -> usize {
        self.embed_dim.unwrap_or(if self.is_mackey_glass() && self.system.tau >= 4.0 {
            4
        } else {
            3
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&maxq) = self.q_sweep.iter().max() {
            if self.q_truth <= maxq {
                return Err(Error::InvalidArgument(format!(
                    "q_truth = {} must exceed the sweep maximum {maxq}",
                    self.q_truth
                )));
            }
        }
        if self.retain_steps > self.total_steps {
            return Err(Error::InvalidArgument(format!(
                "retain_steps = {} > total_steps = {}",
                self.retain_steps, self.total_steps
            )));
        }
        if self.q_truth < 2 || self.q_sweep.iter().any(|&q| q < 2) {
            return Err(Error::InvalidArgument("all node counts must be >= 2".into()));
        }
        if self.n_sims == 0 || self.picard_iters == 0 {
            return Err(Error::InvalidArgument(
                "n_sims and picard_iters must be >= 1".into(),
            ));
        }
        if self.cd_group_size == 0 || self.cd_group_size > self.n_sims {
            return Err(Error::InvalidArgument(format!(
                "cd_group_size = {} outside 1..={}",
                self.cd_group_size, self.n_sims
            )));
        }
        if self.tda_n_clouds > self.n_sims {
            return Err(Error::InvalidArgument(format!(
                "tda_n_clouds = {} > n_sims = {}",
                self.tda_n_clouds, self.n_sims
            )));
        }
        self.system.build().map(|_| ())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let plan: ExperimentPlan = serde_json::from_str(&text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Retained window length in time units.
    pub fn retained_time(&self) -> f64 {
        self.retain_steps as f64 / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        ExperimentPlan::paper(SystemConfig::cubic_ikeda(1.62, 0.0))
            .validate()
            .unwrap();
        let desk = ExperimentPlan::desk(SystemConfig::mackey_glass(2.0, 0.05));
        desk.validate().unwrap();
        assert_eq!(desk.n_sims, 10);
        assert_eq!(desk.total_steps, 4200);
        assert_eq!(desk.center(), 1.0);
        assert_eq!(desk.amplitude(), 0.5);
        let mg4 = ExperimentPlan::desk(SystemConfig::mackey_glass(4.0, 0.0));
        assert_eq!(mg4.embedding_dim(), 4);
        let ik = ExperimentPlan::desk(SystemConfig::cubic_ikeda(1.62, 0.0));
        assert_eq!(ik.embedding_dim(), 3);
        assert_eq!(ik.amplitude(), 0.9);
        assert_eq!(ik.center(), 0.0);
    }

    #[test]
    fn plan_rejects_bad_shapes() {
        let mut plan = ExperimentPlan::desk(SystemConfig::cubic_ikeda(1.62, 0.0));
        plan.q_truth = 5;
        assert!(plan.validate().is_err());
        let mut plan = ExperimentPlan::desk(SystemConfig::cubic_ikeda(1.62, 0.0));
        plan.retain_steps = plan.total_steps + 1;
        assert!(plan.validate().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let plan = ExperimentPlan::desk(SystemConfig::cubic_ikeda(1.62, 0.05));
        let json = serde_json::to_string(&plan).unwrap();
        let back: ExperimentPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, plan);
        // sparse config picks up defaults
        let sparse: ExperimentPlan = serde_json::from_str(
            r#"{"system":"cubic_ikeda","tau":1.62,"eps":0.0,"M":2.0}"#,
        )
        .unwrap();
        assert_eq!(sparse.q_truth, 17);
        assert_eq!(sparse.q_sweep, (2..=10).collect::<Vec<_>>());
        assert_eq!(sparse.n_sims, 50);
        assert_eq!(sparse.total_steps, 21_000);
        assert_eq!(sparse.picard_iters, 30);
    }

    #[test]
    fn custom_registry() {
        let mut cfg = SystemConfig::cubic_ikeda(1.0, 0.0);
        cfg.system = "custom".into();
        cfg.custom_name = Some("zero".into());
        assert_eq!(cfg.build().unwrap().f(3.0), 0.0);
        cfg.custom_name = Some("nope".into());
        assert!(cfg.build().is_err());
        cfg.system = "unknown".into();
        assert!(cfg.build().is_err());
    }
}
