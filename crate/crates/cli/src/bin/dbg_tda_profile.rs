use std::time::Instant;
use strobo_cli::io::read_series_csv;
use strobo_core::analysis::{delay_embed, normalize};
use strobo_core::tda::{rips_persistence, subsample, wasserstein};

fn main() {
    let s = read_series_csv(std::path::Path::new(
        "/tmp/desk_ikeda/runs/sim000/q17/series.csv",
    ))
    .unwrap();
    let cloud = delay_embed(&normalize(&s).unwrap(), 3).unwrap();
    let sub = subsample(&cloud, 400, 1).unwrap();

    let t = Instant::now();
    let dgms = rips_persistence(&sub, 2, None).unwrap();
    println!("rips 400pts: {:?}", t.elapsed());
    println!(
        "diagram sizes: H0={} H1={} H2={}",
        dgms[0].len(),
        dgms[1].len(),
        dgms[2].len()
    );

    let sub2 = subsample(&cloud, 400, 2).unwrap();
    let t = Instant::now();
    let dgms2 = rips_persistence(&sub2, 2, None).unwrap();
    println!("rips 400pts (2nd): {:?}", t.elapsed());

    for k in 0..3 {
        let t = Instant::now();
        let d = wasserstein(&dgms[k], &dgms2[k], 1.0).unwrap();
        println!("w1 H{k} ({}x{} pairs): {:?} -> {d:.3}", dgms[k].len(), dgms2[k].len(), t.elapsed());
    }
}
