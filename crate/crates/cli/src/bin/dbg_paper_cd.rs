use rayon::prelude::*;
use strobo_cli::history::random_history;
use strobo_core::analysis::{correlation_dimension, delay_embed, normalize, PointCloud};
use strobo_core::solver::{run, SolverConfig};
use strobo_core::SystemSpec;

fn main() {
    let sys = SystemSpec::cubic_ikeda(1.62, 0.0, 2.0).unwrap();
    let clouds: Vec<Option<PointCloud>> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let hist = random_history(17, 1 + seed, 0.9, 0.0).unwrap();
            let cfg = SolverConfig::new(17, 21000);
            match run(&hist, &sys, &cfg) {
                Ok((traj, _)) => {
                    let t_end = traj.t_max();
                    let series = traj.sample(t_end - 10_000.0, t_end, 1.0).unwrap();
                    Some(delay_embed(&normalize(&series).unwrap(), 3).unwrap())
                }
                Err(e) => {
                    eprintln!("seed {} failed: {e}", 1 + seed);
                    None
                }
            }
        })
        .collect();
    eprintln!("sims done: {} ok", clouds.iter().flatten().count());
    let ok: Vec<&PointCloud> = clouds.iter().flatten().collect();
    let groups = ok.len() / 5;
    let mut slopes: Vec<f64> = (0..groups)
        .into_par_iter()
        .filter_map(|g| {
            let refs: Vec<&PointCloud> = ok[5 * g..5 * g + 5].to_vec();
            let cat = PointCloud::concat(&refs, "g").ok()?;
            correlation_dimension(&cat).ok().map(|f| f.slope)
        })
        .collect();
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("paper-scale slopes: {slopes:?}");
    if !slopes.is_empty() {
        println!("median = {:.4}", slopes[slopes.len() / 2]);
    }
}
