//! Persistent homology of Vietoris-Rips filtrations over the two-element
//! field, persistence diagrams, and p-Wasserstein distances between them.

mod rips;
mod wasserstein;

pub use rips::{rips_persistence, rips_persistence_opts, RipsOptions};
pub use wasserstein::{wasserstein, wasserstein_with_norm, GroundNorm};

use crate::analysis::PointCloud;
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Finite multiset of (birth, death) pairs in one homological dimension.
/// Unbounded classes (including the essential H0 class) are omitted, as are
/// zero-persistence pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    /// Homological dimension.
    pub k: usize,
    pub pairs: Vec<(f64, f64)>,
}

impl PersistenceDiagram {
    pub fn new(k: usize, mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        PersistenceDiagram { k, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Total persistence, `sum (d - b)`.
    pub fn total_persistence(&self) -> f64 {
        self.pairs.iter().map(|(b, d)| d - b).sum()
    }
}

/// Pairwise Wasserstein distances over the cross product of two diagram
/// lists (symmetric when the lists coincide).
pub fn diagram_distance_matrix(
    diagrams_a: &[PersistenceDiagram],
    diagrams_b: &[PersistenceDiagram],
    p: f64,
) -> Result<Vec<Vec<f64>>> {
    let cells: Vec<(usize, usize)> = (0..diagrams_a.len())
        .flat_map(|i| (0..diagrams_b.len()).map(move |j| (i, j)))
        .collect();
    let flat: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(i, j)| wasserstein(&diagrams_a[i], &diagrams_b[j], p))
        .collect();
    let mut out = vec![vec![0.0; diagrams_b.len()]; diagrams_a.len()];
    for ((i, j), value) in cells.into_iter().zip(flat.into_iter()) {
        out[i][j] = value?;
    }
    Ok(out)
}

/// Uniform subsample without replacement, deterministic in `seed`
/// (partial Fisher-Yates).
pub fn subsample(cloud: &PointCloud, n: usize, seed: u64) -> Result<PointCloud> {
    let total = cloud.len();
    if n > total {
        return Err(Error::InvalidArgument(format!(
            "cannot subsample {n} of {total} points"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..total).collect();
    for i in 0..n {
        let j = i + (rand::Rng::gen_range(&mut rng, 0..(total - i) as u64)) as usize;
        indices.swap(i, j);
    }
    let rows: Vec<Vec<f64>> = indices[..n]
        .iter()
        .map(|&i| cloud.point(i).to_vec())
        .collect();
    PointCloud::from_rows(rows, &cloud.provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::PointCloud;
    use rand::prelude::*;

    fn random_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        PointCloud::from_rows(rows, "test").unwrap()
    }

    #[test]
    fn subsample_full_is_permutation() {
        let cloud = random_cloud(40, 3, 1);
        let sub = subsample(&cloud, 40, 99).unwrap();
        let mut a: Vec<Vec<u64>> = cloud
            .iter_points()
            .map(|p| p.iter().map(|v| v.to_bits()).collect())
            .collect();
        let mut b: Vec<Vec<u64>> = sub
            .iter_points()
            .map(|p| p.iter().map(|v| v.to_bits()).collect())
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn subsample_deterministic_in_seed() {
        let cloud = random_cloud(100, 3, 2);
        let s1 = subsample(&cloud, 30, 7).unwrap();
        let s2 = subsample(&cloud, 30, 7).unwrap();
        assert_eq!(s1, s2);
        let s3 = subsample(&cloud, 30, 8).unwrap();
        assert_ne!(s1, s3);
        assert!(subsample(&cloud, 101, 7).is_err());
    }

    #[test]
    fn distance_matrix_shape_and_symmetry() {
        let d1 = PersistenceDiagram::new(1, vec![(0.1, 0.9), (0.2, 0.4)]);
        let d2 = PersistenceDiagram::new(1, vec![(0.15, 0.8)]);
        let m = diagram_distance_matrix(&[d1.clone()], &[d2.clone()], 1.0).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].len(), 1);
        assert_eq!(m[0][0], wasserstein(&d1, &d2, 1.0).unwrap());

        let list = vec![d1, d2];
        let m = diagram_distance_matrix(&list, &list, 1.0).unwrap();
        assert_eq!(m[0][0], 0.0);
        assert_eq!(m[1][1], 0.0);
        assert_eq!(m[0][1], m[1][0]);
    }
}
