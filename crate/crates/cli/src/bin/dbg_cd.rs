use strobo_cli::io::read_series_csv;
use strobo_core::analysis::{correlation_dimension, delay_embed, normalize, PointCloud};
use strobo_core::TimeSeries;

fn main() {
    let base = std::path::PathBuf::from("/tmp/desk_ikeda/runs");
    // keep only the last half of each series (extra transient discard)
    let mut clouds = Vec::new();
    for sim in 0..10 {
        let s = read_series_csv(&base.join(format!("sim{sim:03}/q17/series.csv"))).unwrap();
        let half = s.values.len() / 2;
        let tail = TimeSeries {
            t0: s.t0 + half as f64 * s.dt,
            dt: s.dt,
            values: s.values[half..].to_vec(),
        };
        clouds.push(delay_embed(&normalize(&tail).unwrap(), 3).unwrap());
    }
    let refs: Vec<&PointCloud> = clouds.iter().collect();
    let cat = PointCloud::concat(&refs, "tails").unwrap();
    let fit = correlation_dimension(&cat).unwrap();
    println!("last-half concat N={} slope={:.3}", cat.len(), fit.slope);
    // pair groups of 2 as the desk protocol does, tails only
    let mut slopes = Vec::new();
    for g in 0..5 {
        let refs: Vec<&PointCloud> = clouds[2 * g..2 * g + 2].iter().collect();
        let cat = PointCloud::concat(&refs, "g").unwrap();
        if let Ok(fit) = correlation_dimension(&cat) {
            slopes.push(fit.slope);
        }
    }
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("tail groups: {slopes:?}");
}
