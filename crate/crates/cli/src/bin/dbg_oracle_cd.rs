// CD of the attractor measured through the quadrature oracle only
use rayon::prelude::*;
use strobo_cli::history::random_history;
use strobo_core::analysis::{correlation_dimension, delay_embed, normalize, PointCloud};
use strobo_core::{SystemSpec, TimeSeries};
use strobo_testkit::method_of_steps::MethodOfStepsOracle;

fn main() {
    let sys = SystemSpec::cubic_ikeda(1.62, 0.0, 2.0).unwrap();
    let clouds: Vec<PointCloud> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let hist = random_history(17, 1 + seed, 0.9, 0.0).unwrap();
            let units = 2100;
            let oracle = MethodOfStepsOracle::integrate(&hist, &sys, units, 512).unwrap();
            let values: Vec<f64> = (100..=units).map(|k| oracle.eval(k as f64)).collect();
            let series = TimeSeries { t0: 100.0, dt: 1.0, values };
            delay_embed(&normalize(&series).unwrap(), 3).unwrap()
        })
        .collect();
    let refs: Vec<&PointCloud> = clouds.iter().collect();
    let cat = PointCloud::concat(&refs, "oracle").unwrap();
    match correlation_dimension(&cat) {
        Ok(fit) => println!("oracle attractor N={} slope={:.4}", cat.len(), fit.slope),
        Err(e) => println!("err {e}"),
    }
}
