//! Runs a full experiment plan: per seed, a ground-truth simulation at
//! q_truth plus re-runs from the coefficient-truncated history at each
//! sweep q, then the analysis pipeline (series, peaks, correlation
//! dimension, false nearest neighbors, persistence diagrams, Wasserstein
//! distances) into an experiment directory. Failed runs are recorded as
//! missing cells without aborting the sweep.

use crate::history::random_history;
use crate::io::{
    fmt_f64, write_diagrams_csv, write_pairs_csv, write_series_csv, write_step_reports_csv,
};
use crate::plan::ExperimentPlan;
use crate::report::{report, Summary};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use strobo_core::analysis::{
    correlation_dimension, delay_embed, find_peaks, fnn_fraction, normalize, peak_to_peak,
    PointCloud,
};
use strobo_core::solver::{run, SolverConfig, Stopping};
use strobo_core::tda::{diagram_distance_matrix, rips_persistence, subsample};
use strobo_core::trajectory::TrajectoryFile;
use strobo_core::{PersistenceDiagram, Result, TimeSeries};

/// Kennel thresholds of the embedding-dimension check.
pub const FNN_R_TOL: f64 = 10.0;
pub const FNN_A_TOL: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct RunFailure {
    pub sim: usize,
    pub q: usize,
    pub message: String,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub out_dir: PathBuf,
    pub failures: Vec<RunFailure>,
    pub summary: Summary,
}

/// Splitmix-style seed derivation, deterministic and well separated.
fn mix_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut x = base
        .wrapping_add(a.wrapping_mul(0x9E3779B97F4A7C15))
        .wrapping_add(b.wrapping_mul(0xBF58476D1CE4E5B9));
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

pub fn run_dir(out_dir: &Path, sim: usize, q: usize) -> PathBuf {
    out_dir.join(format!("runs/sim{sim:03}/q{q:02}"))
}

/// One simulation: solve, retain, sample, peaks, Lissajou data.
fn execute_run(
    plan: &ExperimentPlan,
    out_dir: &Path,
    sim: usize,
    q: usize,
) -> Result<TimeSeries> {
    let sys = plan.system.build()?;
    let consts = sys.compute_constants()?;
    let history_full = random_history(plan.q_truth, plan.seed.wrapping_add(sim as u64), plan.amplitude(), plan.center())?;
    let history = if q == plan.q_truth {
        history_full
    } else {
        history_full.truncate_coeffs(q)?
    };
    let cfg = SolverConfig {
        q,
        stopping: Stopping::FixedIterations(plan.picard_iters),
        n_steps: plan.total_steps,
        monitor_contraction: sys.eps.abs() > consts.eps0,
    };
    let (traj, reports) = run(&history, &sys, &cfg)?;

    let dir = run_dir(out_dir, sim, q);
    fs::create_dir_all(&dir)?;
    let t_end = traj.t_max();
    let w_start = t_end - plan.retained_time();
    let series = traj.sample(w_start, t_end, 1.0)?;
    write_series_csv(&dir.join("series.csv"), &series)?;

    let p2p_len = plan.p2p_window.min(plan.retained_time());
    let peaks_series = traj.sample(w_start, w_start + p2p_len, 100.0)?;
    let peaks = find_peaks(&peaks_series);
    write_pairs_csv(&dir.join("p2p.csv"), "p_k,p_k1", &peak_to_peak(&peaks))?;

    let liss_len = plan.lissajou_window.min(plan.retained_time());
    let liss = traj.sample(w_start, w_start + liss_len, 100.0)?;
    let mut rows = Vec::new();
    for k in 100..liss.values.len() {
        rows.push((liss.values[k], liss.values[k - 100]));
    }
    write_pairs_csv(&dir.join("lissajou.csv"), "x_t,x_tm1", &rows)?;

    if plan.save_trajectories {
        TrajectoryFile::new(
            &sys.name,
            sys.tau,
            sys.a,
            sys.eps,
            q,
            plan.seed.wrapping_add(sim as u64),
            &traj,
        )
        .save(&dir.join("trajectory.json"))?;
        write_step_reports_csv(&dir.join("steps.csv"), &reports)?;
    }
    Ok(series)
}

fn embed(plan: &ExperimentPlan, series: &TimeSeries, provenance: &str) -> Result<PointCloud> {
    let normalized = normalize(series)?;
    let mut cloud = delay_embed(&normalized, plan.embedding_dim())?;
    cloud.provenance = provenance.to_string();
    Ok(cloud)
}

pub fn run_experiment(plan: &ExperimentPlan, out_dir: &Path) -> Result<ExperimentOutcome> {
    plan.validate()?;
    fs::create_dir_all(out_dir.join("runs"))?;
    fs::create_dir_all(out_dir.join("analysis"))?;
    fs::create_dir_all(out_dir.join("tda"))?;
    plan.save(&out_dir.join("plan.json"))?;

    let q_levels: Vec<usize> = std::iter::once(plan.q_truth)
        .chain(plan.q_sweep.iter().copied())
        .collect();

    // all (sim, q) simulations, embarrassingly parallel
    let tasks: Vec<(usize, usize)> = (0..plan.n_sims)
        .flat_map(|sim| q_levels.iter().map(move |&q| (sim, q)))
        .collect();
    let results: Vec<std::result::Result<TimeSeries, String>> = tasks
        .par_iter()
        .map(|&(sim, q)| execute_run(plan, out_dir, sim, q).map_err(|e| e.to_string()))
        .collect();

    let mut failures = Vec::new();
    let mut series_of = vec![vec![None; q_levels.len()]; plan.n_sims];
    for (&(sim, q), result) in tasks.iter().zip(results.into_iter()) {
        let qi = q_levels.iter().position(|&x| x == q).unwrap();
        match result {
            Ok(series) => series_of[sim][qi] = Some(series),
            Err(message) => failures.push(RunFailure { sim, q, message }),
        }
    }

    // embedded clouds
    let mut clouds: Vec<Vec<Option<PointCloud>>> = vec![vec![None; q_levels.len()]; plan.n_sims];
    for sim in 0..plan.n_sims {
        for (qi, &q) in q_levels.iter().enumerate() {
            if let Some(series) = &series_of[sim][qi] {
                match embed(plan, series, &format!("sim{sim:03}_q{q:02}")) {
                    Ok(cloud) => clouds[sim][qi] = Some(cloud),
                    Err(e) => failures.push(RunFailure {
                        sim,
                        q,
                        message: format!("embedding: {e}"),
                    }),
                }
            }
        }
    }

    // correlation dimension over groups of concatenated clouds
    let n_groups = plan.n_sims / plan.cd_group_size;
    let mut cd_rows = String::from("q,group,slope,intercept,residual,n_dropped\n");
    let cd_tasks: Vec<(usize, usize)> = (0..q_levels.len())
        .flat_map(|qi| (0..n_groups).map(move |g| (qi, g)))
        .collect();
    let cd_results: Vec<Option<(usize, usize, strobo_core::analysis::CorrelationFit)>> = cd_tasks
        .par_iter()
        .map(|&(qi, g)| {
            let members: Vec<&PointCloud> = (0..plan.cd_group_size)
                .filter_map(|m| clouds[g * plan.cd_group_size + m][qi].as_ref())
                .collect();
            if members.len() < plan.cd_group_size {
                return None; // a failed run leaves the whole group missing
            }
            let cloud = PointCloud::concat(&members, &format!("group{g}")).ok()?;
            correlation_dimension(&cloud).ok().map(|fit| (qi, g, fit))
        })
        .collect();
    for item in cd_results.into_iter().flatten() {
        let (qi, g, fit) = item;
        let _ = writeln!(
            cd_rows,
            "{},{},{},{},{},{}",
            q_levels[qi],
            g,
            fmt_f64(fit.slope),
            fmt_f64(fit.intercept),
            fmt_f64(fit.residual),
            fit.dropped_radii.len()
        );
    }
    fs::write(out_dir.join("analysis/cd.csv"), cd_rows)?;

    // false nearest neighbors of the ground-truth series
    let mut fnn_rows = String::from("sim,d,fraction\n");
    for sim in 0..plan.n_sims {
        if let Some(series) = &series_of[sim][0] {
            if let Ok(normalized) = normalize(series) {
                if let Ok(f) =
                    fnn_fraction(&normalized, plan.embedding_dim(), FNN_R_TOL, FNN_A_TOL)
                {
                    let _ = writeln!(fnn_rows, "{},{},{}", sim, plan.embedding_dim(), fmt_f64(f));
                }
            }
        }
    }
    fs::write(out_dir.join("analysis/fnn.csv"), fnn_rows)?;

    // persistence diagrams on seeded subsamples
    let tda_tasks: Vec<(usize, usize)> = (0..plan.tda_n_clouds.min(plan.n_sims))
        .flat_map(|sim| (0..q_levels.len()).map(move |qi| (sim, qi)))
        .collect();
    let dgm_results: Vec<Option<(usize, usize, Vec<PersistenceDiagram>)>> = tda_tasks
        .par_iter()
        .map(|&(sim, qi)| {
            let cloud = clouds[sim][qi].as_ref()?;
            if cloud.len() < plan.tda_subsample {
                return None;
            }
            let sub = subsample(
                cloud,
                plan.tda_subsample,
                mix_seed(plan.seed, sim as u64, q_levels[qi] as u64),
            )
            .ok()?;
            let dgms = rips_persistence(&sub, 2, None).ok()?;
            Some((sim, qi, dgms))
        })
        .collect();
    let mut diagrams: Vec<Vec<Option<Vec<PersistenceDiagram>>>> =
        vec![vec![None; q_levels.len()]; plan.n_sims];
    for item in dgm_results.into_iter().flatten() {
        let (sim, qi, dgms) = item;
        let dir = run_dir(out_dir, sim, q_levels[qi]);
        write_diagrams_csv(&dir.join("dgm.csv"), &dgms)?;
        diagrams[sim][qi] = Some(dgms);
    }

    // Wasserstein distances against the same-seed ground truth
    let w1_tasks: Vec<(usize, usize)> = (0..plan.tda_n_clouds.min(plan.n_sims))
        .flat_map(|sim| (1..q_levels.len()).map(move |qi| (sim, qi)))
        .collect();
    let w1_results: Vec<Option<(usize, usize, [f64; 3])>> = w1_tasks
        .par_iter()
        .map(|&(sim, qi)| {
            let truth = diagrams[sim][0].as_ref()?;
            let approx = diagrams[sim][qi].as_ref()?;
            let mut dists = [0.0; 3];
            for k in 0..3 {
                let m = diagram_distance_matrix(
                    std::slice::from_ref(&approx[k]),
                    std::slice::from_ref(&truth[k]),
                    1.0,
                )
                .ok()?;
                dists[k] = m[0][0];
            }
            Some((sim, qi, dists))
        })
        .collect();
    let mut w1_rows = String::from("q,sim,h0,h1,h2\n");
    for item in w1_results.into_iter().flatten() {
        let (sim, qi, d) = item;
        let _ = writeln!(
            w1_rows,
            "{},{},{},{},{}",
            q_levels[qi],
            sim,
            fmt_f64(d[0]),
            fmt_f64(d[1]),
            fmt_f64(d[2])
        );
    }
    fs::write(out_dir.join("tda/w1.csv"), w1_rows)?;

    // baseline: distances between successive ground-truth samplings
    let truth_sims: Vec<usize> = (0..plan.tda_n_clouds.min(plan.n_sims))
        .filter(|&sim| diagrams[sim][0].is_some())
        .collect();
    let baseline_pairs: Vec<(usize, usize)> = if truth_sims.len() >= 2 {
        (0..truth_sims.len())
            .map(|i| (truth_sims[i], truth_sims[(i + 1) % truth_sims.len()]))
            .collect()
    } else {
        Vec::new()
    };
    let baseline_results: Vec<Option<(usize, usize, [f64; 3])>> = baseline_pairs
        .par_iter()
        .map(|&(sa, sb)| {
            let da = diagrams[sa][0].as_ref()?;
            let db = diagrams[sb][0].as_ref()?;
            let mut dists = [0.0; 3];
            for k in 0..3 {
                let m = diagram_distance_matrix(
                    std::slice::from_ref(&da[k]),
                    std::slice::from_ref(&db[k]),
                    1.0,
                )
                .ok()?;
                dists[k] = m[0][0];
            }
            Some((sa, sb, dists))
        })
        .collect();
    let mut baseline_rows = String::from("sim_a,sim_b,h0,h1,h2\n");
    for item in baseline_results.into_iter().flatten() {
        let (sa, sb, d) = item;
        let _ = writeln!(
            baseline_rows,
            "{},{},{},{},{}",
            sa,
            sb,
            fmt_f64(d[0]),
            fmt_f64(d[1]),
            fmt_f64(d[2])
        );
    }
    fs::write(out_dir.join("tda/baseline.csv"), baseline_rows)?;

    // failures, sorted for deterministic output
    failures.sort_by(|a, b| (a.sim, a.q).cmp(&(b.sim, b.q)));
    let mut failure_rows = String::from("sim,q,error\n");
    for f in &failures {
        let _ = writeln!(
            failure_rows,
            "{},{},\"{}\"",
            f.sim,
            f.q,
            f.message.replace('"', "'")
        );
    }
    fs::write(out_dir.join("failures.csv"), failure_rows)?;

    let summary = report(out_dir)?;
    Ok(ExperimentOutcome {
        out_dir: out_dir.to_path_buf(),
        failures,
        summary,
    })
}
