use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::path::PathBuf;
use strobo_cli::experiment::{run_experiment, FNN_A_TOL, FNN_R_TOL};
use strobo_cli::history::random_history;
use strobo_cli::io::{
    fmt_f64, read_diagrams_csv, read_points_csv, read_series_csv, write_diagrams_csv,
    write_pairs_csv, write_series_csv, write_step_reports_csv,
};
use strobo_cli::plan::{ExperimentPlan, SystemConfig};
use strobo_cli::report::report;
use strobo_core::analysis::{
    cd_radii, correlation_dimension, correlation_fractions, delay_embed, find_peaks,
    fnn_fraction, normalize, peak_to_peak,
};
use strobo_core::solver::{run, SolverConfig, Stopping};
use strobo_core::tda::{rips_persistence, subsample, wasserstein};
use strobo_core::trajectory::TrajectoryFile;

/// Solver and attractor-analysis experiments for state-dependent delay
/// equations.
#[derive(Parser)]
#[command(name = "strobo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct PlanArgs {
    /// Plan JSON (field names match the config schema).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Build a desk-scale preset instead of reading a config.
    #[arg(long, conflicts_with = "config")]
    desk: bool,
    /// System for the preset: cubic_ikeda | mackey_glass.
    #[arg(long, default_value = "cubic_ikeda")]
    system: String,
    #[arg(long, default_value_t = 1.62)]
    tau: f64,
    /// Override the state-dependence strength.
    #[arg(long)]
    eps: Option<f64>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl PlanArgs {
    fn build(&self) -> anyhow::Result<ExperimentPlan> {
        let mut plan = match &self.config {
            Some(path) => ExperimentPlan::load(path)
                .with_context(|| format!("loading plan {}", path.display()))?,
            None => {
                let cfg = match self.system.as_str() {
                    "cubic_ikeda" => SystemConfig::cubic_ikeda(self.tau, 0.0),
                    "mackey_glass" => SystemConfig::mackey_glass(self.tau, 0.0),
                    other => bail!("preset system must be cubic_ikeda or mackey_glass, got {other}"),
                };
                if self.desk {
                    ExperimentPlan::desk(cfg)
                } else {
                    ExperimentPlan::paper(cfg)
                }
            }
        };
        if let Some(eps) = self.eps {
            plan.system.eps = eps;
        }
        if let Some(seed) = self.seed {
            plan.seed = seed;
        }
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Subcommand)]
enum Command {
    /// One simulation: trajectory file, step reports, sampled series.
    Simulate {
        #[command(flatten)]
        plan: PlanArgs,
        /// Node count for this run (default: the plan's q_truth).
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value = "out/simulate")]
        out: PathBuf,
    },
    /// Full plan: ground truth, truncation sweep, analysis, tables.
    Sweep {
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, default_value = "out/sweep")]
        out: PathBuf,
    },
    /// Series-level analysis: correlation dimension, peaks, FNN.
    Analyze {
        /// Input series CSV (t,x).
        #[arg(long)]
        series: PathBuf,
        #[arg(long, default_value = "out/analyze")]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        embed_dim: usize,
        /// Largest embedding dimension for the FNN table.
        #[arg(long, default_value_t = 6)]
        fnn_max_dim: usize,
    },
    /// Persistence diagrams of a point cloud, or distances between two
    /// diagram files.
    Ph {
        /// Point cloud CSV (one point per row).
        #[arg(long, required_unless_present = "compare", num_args = 1)]
        points: Option<PathBuf>,
        #[arg(long, default_value = "out/dgm.csv")]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Filtration cap (default: enclosing radius).
        #[arg(long)]
        threshold: Option<f64>,
        /// Subsample size before the filtration.
        #[arg(long)]
        subsample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Two diagram CSVs to compare instead of computing diagrams.
        #[arg(long, num_args = 2)]
        compare: Option<Vec<PathBuf>>,
        /// Wasserstein order.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Re-aggregate an experiment directory into tables and figure data.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .ok();
    }
    match dispatch(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Simulate { plan, q, out } => {
            let plan_cfg = plan.build()?;
            let q = q.unwrap_or(plan_cfg.q_truth);
            let sys = plan_cfg.system.build()?;
            let consts = sys.compute_constants()?;
            let history_full = random_history(
                plan_cfg.q_truth,
                plan_cfg.seed,
                plan_cfg.amplitude(),
                plan_cfg.center(),
            )?;
            let history = if q == plan_cfg.q_truth {
                history_full
            } else {
                history_full.truncate_coeffs(q)?
            };
            let cfg = SolverConfig {
                q,
                stopping: Stopping::FixedIterations(plan_cfg.picard_iters),
                n_steps: plan_cfg.total_steps,
                monitor_contraction: sys.eps.abs() > consts.eps0,
            };
            let (traj, reports) = run(&history, &sys, &cfg)?;
            std::fs::create_dir_all(&out)?;
            TrajectoryFile::new(&sys.name, sys.tau, sys.a, sys.eps, q, plan_cfg.seed, &traj)
                .save(&out.join("trajectory.json"))?;
            write_step_reports_csv(&out.join("steps.csv"), &reports)?;
            let t_end = traj.t_max();
            let w_start = t_end - plan_cfg.retained_time();
            write_series_csv(&out.join("series.csv"), &traj.sample(w_start, t_end, 1.0)?)?;
            println!(
                "simulated {} steps at q = {q}; wrote {}",
                plan_cfg.total_steps,
                out.display()
            );
            Ok(0)
        }
        Command::Sweep { plan, out } => {
            let plan_cfg = plan.build()?;
            let outcome = run_experiment(&plan_cfg, &out)?;
            println!(
                "sweep complete: {} failures; tables at {}",
                outcome.failures.len(),
                out.join("tables.csv").display()
            );
            Ok(if outcome.failures.is_empty() { 0 } else { 2 })
        }
        Command::Analyze {
            series,
            out,
            embed_dim,
            fnn_max_dim,
        } => {
            let raw = read_series_csv(&series)?;
            std::fs::create_dir_all(&out)?;
            let normalized = normalize(&raw)?;
            let cloud = delay_embed(&normalized, embed_dim)?;
            let radii = cd_radii();
            let fractions = correlation_fractions(&cloud, &radii)?;
            write_pairs_csv(
                &out.join("corrfit.csv"),
                "r,C",
                &radii
                    .iter()
                    .zip(fractions.iter())
                    .map(|(&r, &c)| (r, c))
                    .collect::<Vec<_>>(),
            )?;
            match correlation_dimension(&cloud) {
                Ok(fit) => std::fs::write(
                    out.join("cdim.json"),
                    serde_json::to_string_pretty(&fit)?,
                )?,
                Err(e) => eprintln!("correlation dimension unavailable: {e}"),
            }
            let peaks = find_peaks(&raw);
            write_pairs_csv(&out.join("p2p.csv"), "p_k,p_k1", &peak_to_peak(&peaks))?;
            let offset = (1.0 / raw.dt).round();
            if (offset * raw.dt - 1.0).abs() <= 1e-9 && offset >= 1.0 {
                let offset = offset as usize;
                let rows: Vec<(f64, f64)> = (offset..raw.values.len())
                    .map(|k| (raw.values[k], raw.values[k - offset]))
                    .collect();
                write_pairs_csv(&out.join("lissajou.csv"), "x_t,x_tm1", &rows)?;
            }
            let mut fnn = String::from("d,fraction\n");
            for d in 1..=fnn_max_dim {
                let f = fnn_fraction(&normalized, d, FNN_R_TOL, FNN_A_TOL)?;
                let _ = writeln!(fnn, "{d},{}", fmt_f64(f));
            }
            std::fs::write(out.join("fnn.csv"), fnn)?;
            println!("analysis written to {}", out.display());
            Ok(0)
        }
        Command::Ph {
            points,
            out,
            max_dim,
            threshold,
            subsample: sub_n,
            seed,
            compare,
            p,
        } => {
            if let Some(files) = compare {
                let a = read_diagrams_csv(&files[0], max_dim)?;
                let b = read_diagrams_csv(&files[1], max_dim)?;
                for k in 0..=max_dim {
                    let d = wasserstein(&a[k], &b[k], p)?;
                    println!("H{k}: {}", fmt_f64(d));
                }
                return Ok(0);
            }
            let path = points.expect("clap enforces points without --compare");
            let mut cloud = read_points_csv(&path)?;
            if let Some(n) = sub_n {
                cloud = subsample(&cloud, n, seed)?;
            }
            let dgms = rips_persistence(&cloud, max_dim, threshold)?;
            write_diagrams_csv(&out, &dgms)?;
            for dgm in &dgms {
                println!("H{}: {} pairs", dgm.k, dgm.len());
            }
            Ok(0)
        }
        Command::Report { dir } => {
            report(&dir)?;
            println!("report written to {}", dir.join("tables.csv").display());
            Ok(0)
        }
    }
}
