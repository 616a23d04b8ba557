//! Vietoris-Rips persistence over the two-element field.
//!
//! H0 comes from the single-linkage union-find. H1 and H2 come from column
//! reduction in coboundary order: k-simplex columns are processed in reverse
//! filtration order, each column holds the (k+1)-cofacets of its simplex,
//! and the pivot is the cofacet earliest in the filtration. A column whose
//! simplex was claimed as a pivot of the previous dimension is cleared
//! (skipped). Cofacets are enumerated through neighborhood bitsets rather
//! than materialized, so only the k-simplices themselves are stored.

use crate::analysis::PointCloud;
use crate::tda::PersistenceDiagram;
use crate::{Error, Result};
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone)]
pub struct RipsOptions {
    /// Filtration cap; defaults to the enclosing radius (beyond which the
    /// complex is a cone and homology is trivial).
    pub threshold: Option<f64>,
    /// Guard on the number of simplices materialized in any one dimension.
    pub simplex_cap: usize,
}

impl Default for RipsOptions {
    fn default() -> Self {
        RipsOptions {
            threshold: None,
            simplex_cap: 20_000_000,
        }
    }
}

/// Persistence diagrams `H_0 .. H_{max_dim}` of the Rips filtration with
/// Euclidean metric (default threshold: enclosing radius).
pub fn rips_persistence(
    cloud: &PointCloud,
    max_dim: usize,
    threshold: Option<f64>,
) -> Result<Vec<PersistenceDiagram>> {
    rips_persistence_opts(
        cloud,
        max_dim,
        RipsOptions {
            threshold,
            ..RipsOptions::default()
        },
    )
}

pub fn rips_persistence_opts(
    cloud: &PointCloud,
    max_dim: usize,
    opts: RipsOptions,
) -> Result<Vec<PersistenceDiagram>> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need >= 2 points".into()));
    }
    if max_dim > 2 {
        return Err(Error::InvalidArgument("max_dim must be <= 2".into()));
    }
    if n >= 1 << 16 {
        return Err(Error::InvalidArgument("point clouds are limited to 65535 points".into()));
    }
    let dist = DistMatrix::from_cloud(cloud);
    let threshold = opts.threshold.unwrap_or_else(|| dist.enclosing_radius());
    if !threshold.is_finite() || threshold < 0.0 {
        return Err(Error::InvalidArgument(format!("bad threshold {threshold}")));
    }

    // 1-skeleton, ascending filtration order.
    let mut edges: Vec<(f64, u64)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist.get(i, j);
            if d <= threshold {
                edges.push((d, pack2(i, j)));
            }
        }
    }
    if edges.len() > opts.simplex_cap {
        return Err(Error::ResourceLimit(format!(
            "{} edges exceed the cap of {}; lower the threshold or subsample",
            edges.len(),
            opts.simplex_cap
        )));
    }
    edges.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    // H0: union-find over ascending edges; merging edges are the H0 deaths
    // and are cleared from the H1 columns.
    let mut uf = UnionFind::new(n);
    let mut h0_pairs = Vec::new();
    let mut is_merge = vec![false; edges.len()];
    for (idx, &(d, packed)) in edges.iter().enumerate() {
        let (i, j) = unpack2(packed);
        if uf.union(i, j) {
            is_merge[idx] = true;
            if d > 0.0 {
                h0_pairs.push((0.0, d));
            }
        }
    }
    let mut diagrams = vec![PersistenceDiagram::new(0, h0_pairs)];
    if max_dim == 0 {
        return Ok(diagrams);
    }

    let adj = Adjacency::build(&dist, threshold);

    // H1: columns are the non-merge edges in reverse filtration order.
    let mut h1_columns: Vec<(f64, u64)> = edges
        .iter()
        .zip(is_merge.iter())
        .filter(|(_, &m)| !m)
        .map(|(&e, _)| e)
        .collect();
    h1_columns.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let edge_oracle = EdgeCofacets { dist: &dist, adj: &adj };
    let (h1_pairs, h1_pivots) = reduce_dimension(&h1_columns, |_| false, &edge_oracle);
    diagrams.push(PersistenceDiagram::new(1, h1_pairs));
    if max_dim == 1 {
        return Ok(diagrams);
    }

    // H2: columns are all triangles not claimed as H1 pivots.
    let mut triangle_count = 0usize;
    for &(_, packed) in &edges {
        let (a, b) = unpack2(packed);
        triangle_count += adj.count_common_neighbors_above(&[a, b], b);
        if triangle_count > opts.simplex_cap {
            return Err(Error::ResourceLimit(format!(
                "triangle count exceeds the cap of {}; lower the threshold or subsample",
                opts.simplex_cap
            )));
        }
    }
    let mut h2_columns: Vec<(f64, u64)> = Vec::with_capacity(triangle_count);
    for &(d, packed) in &edges {
        let (a, b) = unpack2(packed);
        adj.for_common_neighbors_above(&[a, b], b, |c| {
            let diam = d.max(dist.get(a, c)).max(dist.get(b, c));
            h2_columns.push((diam, pack3(a, b, c)));
        });
    }
    h2_columns.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let triangle_oracle = TriangleCofacets { dist: &dist, adj: &adj };
    let (h2_pairs, _) = reduce_dimension(
        &h2_columns,
        |packed| h1_pivots.contains(&packed),
        &triangle_oracle,
    );
    diagrams.push(PersistenceDiagram::new(2, h2_pairs));
    Ok(diagrams)
}

/// Lazy coboundary access for one dimension: the cheap pivot scan breaks at
/// the first cofacet whose diameter equals the simplex diameter (ascending
/// vertex order is ascending key order, so that cofacet is the minimum);
/// the full sorted column is built only when a reduction actually needs it.
trait CofacetOracle {
    /// Minimal cofacet in filtration order, or None when the coboundary is
    /// empty under the threshold.
    fn min_cofacet(&self, packed: u64, diam: f64) -> Option<ColEntry>;
    /// All cofacets, sorted ascending.
    fn full_column(&self, packed: u64, diam: f64) -> Vec<ColEntry>;
}

struct EdgeCofacets<'a> {
    dist: &'a DistMatrix,
    adj: &'a Adjacency,
}

impl CofacetOracle for EdgeCofacets<'_> {
    fn min_cofacet(&self, packed: u64, diam: f64) -> Option<ColEntry> {
        let (i, j) = unpack2(packed);
        let mut best: Option<ColEntry> = None;
        self.adj.scan_common_neighbors(&[i, j], |v| {
            let d = diam.max(self.dist.get(v, i)).max(self.dist.get(v, j));
            let entry = ColEntry {
                diam: d,
                packed: pack3_sorted(i, j, v),
            };
            if best.is_none() || cmp_entry(&entry, best.as_ref().unwrap()).is_lt() {
                best = Some(entry);
            }
            d > diam // keep scanning only until an equal-diameter cofacet
        });
        best
    }

    fn full_column(&self, packed: u64, diam: f64) -> Vec<ColEntry> {
        let (i, j) = unpack2(packed);
        let mut out = Vec::new();
        self.adj.scan_common_neighbors(&[i, j], |v| {
            let d = diam.max(self.dist.get(v, i)).max(self.dist.get(v, j));
            out.push(ColEntry {
                diam: d,
                packed: pack3_sorted(i, j, v),
            });
            true
        });
        out.sort_unstable_by(cmp_entry);
        out
    }
}

struct TriangleCofacets<'a> {
    dist: &'a DistMatrix,
    adj: &'a Adjacency,
}

impl CofacetOracle for TriangleCofacets<'_> {
    fn min_cofacet(&self, packed: u64, diam: f64) -> Option<ColEntry> {
        let (a, b, c) = unpack3(packed);
        let mut best: Option<ColEntry> = None;
        self.adj.scan_common_neighbors(&[a, b, c], |v| {
            let d = diam
                .max(self.dist.get(v, a))
                .max(self.dist.get(v, b))
                .max(self.dist.get(v, c));
            let entry = ColEntry {
                diam: d,
                packed: pack4_sorted(a, b, c, v),
            };
            if best.is_none() || cmp_entry(&entry, best.as_ref().unwrap()).is_lt() {
                best = Some(entry);
            }
            d > diam
        });
        best
    }

    fn full_column(&self, packed: u64, diam: f64) -> Vec<ColEntry> {
        let (a, b, c) = unpack3(packed);
        let mut out = Vec::new();
        self.adj.scan_common_neighbors(&[a, b, c], |v| {
            let d = diam
                .max(self.dist.get(v, a))
                .max(self.dist.get(v, b))
                .max(self.dist.get(v, c));
            out.push(ColEntry {
                diam: d,
                packed: pack4_sorted(a, b, c, v),
            });
            true
        });
        out.sort_unstable_by(cmp_entry);
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct ColEntry {
    diam: f64,
    packed: u64,
}

fn cmp_entry(a: &ColEntry, b: &ColEntry) -> std::cmp::Ordering {
    a.diam
        .partial_cmp(&b.diam)
        .unwrap()
        .then(a.packed.cmp(&b.packed))
}

/// Registry value: most columns are registered unreduced and are re-derived
/// from their simplex on demand; only columns that went through additions
/// are stored explicitly.
enum StoredColumn {
    Implicit(u64, f64),
    Materialized(Vec<ColEntry>),
}

/// Core reduction for one dimension. `columns` must be sorted in reverse
/// filtration order; `cleared` marks simplices claimed as pivots of the
/// previous dimension.
///
/// Returns the finite positive-persistence pairs and the set of claimed
/// pivot simplices (the deaths, which clear the next dimension).
fn reduce_dimension(
    columns: &[(f64, u64)],
    cleared: impl Fn(u64) -> bool,
    oracle: &dyn CofacetOracle,
) -> (Vec<(f64, f64)>, HashSet<u64>) {
    let mut registry: HashMap<u64, StoredColumn> = HashMap::new();
    let mut pairs = Vec::new();
    for &(diam, packed) in columns {
        if cleared(packed) {
            continue;
        }
        // fast path: the pivot alone decides unclaimed columns
        let Some(pivot) = oracle.min_cofacet(packed, diam) else {
            continue; // empty coboundary: essential class, omitted
        };
        if !registry.contains_key(&pivot.packed) {
            if pivot.diam > diam {
                pairs.push((diam, pivot.diam));
            }
            registry.insert(pivot.packed, StoredColumn::Implicit(packed, diam));
            continue;
        }
        // contested pivot: materialize and reduce
        let mut col = oracle.full_column(packed, diam);
        loop {
            let Some(&pivot) = col.first() else {
                break; // reduced to zero: essential class, omitted
            };
            match registry.get(&pivot.packed) {
                Some(stored) => {
                    let other = match stored {
                        StoredColumn::Implicit(p, d) => oracle.full_column(*p, *d),
                        StoredColumn::Materialized(v) => v.clone(),
                    };
                    col = xor_merge(&col, &other);
                }
                None => {
                    if pivot.diam > diam {
                        pairs.push((diam, pivot.diam));
                    }
                    registry.insert(pivot.packed, StoredColumn::Materialized(col));
                    break;
                }
            }
        }
    }
    (pairs, registry.into_keys().collect())
}

/// Symmetric difference of two sorted columns (addition over the
/// two-element field).
fn xor_merge(a: &[ColEntry], b: &[ColEntry]) -> Vec<ColEntry> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match cmp_entry(&a[i], &b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn pack2(i: usize, j: usize) -> u64 {
    ((i as u64) << 16) | j as u64
}

fn unpack2(p: u64) -> (usize, usize) {
    (((p >> 16) & 0xFFFF) as usize, (p & 0xFFFF) as usize)
}

fn pack3(a: usize, b: usize, c: usize) -> u64 {
    ((a as u64) << 32) | ((b as u64) << 16) | c as u64
}

fn pack3_sorted(mut a: usize, mut b: usize, c: usize) -> u64 {
    // a < b holds on entry; insert c
    if c < a {
        std::mem::swap(&mut a, &mut b);
        return pack3(c, b, a);
    }
    if c < b {
        return pack3(a, c, b);
    }
    pack3(a, b, c)
}

fn unpack3(p: u64) -> (usize, usize, usize) {
    (
        ((p >> 32) & 0xFFFF) as usize,
        ((p >> 16) & 0xFFFF) as usize,
        (p & 0xFFFF) as usize,
    )
}

fn pack4_sorted(a: usize, b: usize, c: usize, v: usize) -> u64 {
    // a < b < c holds on entry; insert v
    let (p, q, r, s) = if v < a {
        (v, a, b, c)
    } else if v < b {
        (a, v, b, c)
    } else if v < c {
        (a, b, v, c)
    } else {
        (a, b, c, v)
    };
    ((p as u64) << 48) | ((q as u64) << 32) | ((r as u64) << 16) | s as u64
}

struct DistMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistMatrix {
    fn from_cloud(cloud: &PointCloud) -> Self {
        let n = cloud.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            let pi = cloud.point(i);
            for j in (i + 1)..n {
                let dij = pi
                    .iter()
                    .zip(cloud.point(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d[i * n + j] = dij;
                d[j * n + i] = dij;
            }
        }
        DistMatrix { n, d }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    fn enclosing_radius(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j))
                    .fold(0.0f64, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Threshold 1-skeleton as per-vertex bitsets, for O(n/64) common-neighbor
/// scans during cofacet enumeration.
struct Adjacency {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Adjacency {
    fn build(dist: &DistMatrix, threshold: f64) -> Self {
        let n = dist.n;
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        for i in 0..n {
            for j in 0..n {
                if i != j && dist.get(i, j) <= threshold {
                    bits[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        Adjacency { n, words, bits }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    /// Calls `f` for every vertex adjacent to all of `verts`, in ascending
    /// order, until `f` returns false.
    fn scan_common_neighbors(&self, verts: &[usize], mut f: impl FnMut(usize) -> bool) {
        for w in 0..self.words {
            let mut word = self.row(verts[0])[w];
            for &v in &verts[1..] {
                word &= self.row(v)[w];
            }
            while word != 0 {
                let bit = word.trailing_zeros() as usize;
                let v = w * 64 + bit;
                if v < self.n && !f(v) {
                    return;
                }
                word &= word - 1;
            }
        }
    }

    /// As above but restricted to vertices strictly greater than `above`.
    fn for_common_neighbors_above(
        &self,
        verts: &[usize],
        above: usize,
        mut f: impl FnMut(usize),
    ) {
        self.scan_common_neighbors(verts, |v| {
            if v > above {
                f(v);
            }
            true
        });
    }

    fn count_common_neighbors_above(&self, verts: &[usize], above: usize) -> usize {
        let mut count = 0;
        self.for_common_neighbors_above(verts, above, |_| count += 1);
        count
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the edge merged two components.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::PointCloud;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn cloud(rows: Vec<Vec<f64>>) -> PointCloud {
        PointCloud::from_rows(rows, "test").unwrap()
    }

    #[test]
    fn equilateral_triangle() {
        let c = cloud(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 0.75f64.sqrt()],
        ]);
        let dgms = rips_persistence(&c, 2, None).unwrap();
        assert_eq!(dgms[0].pairs.len(), 2);
        for &(b, d) in &dgms[0].pairs {
            assert_eq!(b, 0.0);
            assert!((d - 1.0).abs() <= 1e-12);
        }
        assert!(dgms[1].is_empty());
        assert!(dgms[2].is_empty());
    }

    #[test]
    fn unit_square() {
        let c = cloud(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ]);
        let dgms = rips_persistence(&c, 2, None).unwrap();
        assert_eq!(dgms[1].pairs.len(), 1);
        let (b, d) = dgms[1].pairs[0];
        assert_eq!(b, 1.0);
        assert!((d - 2.0f64.sqrt()).abs() <= 1e-15);
        assert!(dgms[2].is_empty());
    }

    #[test]
    fn circle_has_one_prominent_loop() {
        let n = 40;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / n as f64;
                vec![th.cos(), th.sin()]
            })
            .collect();
        let dgms = rips_persistence(&cloud(rows), 2, None).unwrap();
        let prominent: Vec<_> = dgms[1]
            .pairs
            .iter()
            .filter(|(b, d)| d - b > 0.5)
            .collect();
        assert_eq!(prominent.len(), 1, "H1 = {:?}", dgms[1].pairs);
    }

    #[test]
    fn h0_dendrogram_property() {
        // distinct distances: exactly N-1 finite H0 pairs, all born at 0
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> = (0..25)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let dgms = rips_persistence(&cloud(rows), 0, None).unwrap();
        assert_eq!(dgms[0].pairs.len(), 24);
        assert!(dgms[0].pairs.iter().all(|&(b, _)| b == 0.0));
    }

    #[test]
    fn births_deaths_ordered_and_capped() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let c = cloud(rows);
        let thr = 1.1;
        let dgms = rips_persistence(&c, 2, Some(thr)).unwrap();
        for dgm in &dgms {
            for &(b, d) in &dgm.pairs {
                assert!(b < d);
                assert!(d <= thr);
            }
        }
    }

    #[test]
    fn permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut rows: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let base = rips_persistence(&cloud(rows.clone()), 2, None).unwrap();
        rows.shuffle(&mut rng);
        let perm = rips_persistence(&cloud(rows), 2, None).unwrap();
        for (a, b) in base.iter().zip(perm.iter()) {
            let mut pa = a.pairs.clone();
            let mut pb = b.pairs.clone();
            pa.sort_by(|x, y| x.partial_cmp(y).unwrap());
            pb.sort_by(|x, y| x.partial_cmp(y).unwrap());
            assert_eq!(pa.len(), pb.len());
            for (x, y) in pa.iter().zip(pb.iter()) {
                assert!((x.0 - y.0).abs() <= 1e-12 && (x.1 - y.1).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn cap_guard_fires() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let opts = RipsOptions {
            threshold: None,
            simplex_cap: 100,
        };
        match rips_persistence_opts(&cloud(rows), 2, opts) {
            Err(Error::ResourceLimit(msg)) => assert!(msg.contains("cap")),
            other => panic!("expected resource limit, got {other:?}"),
        }
    }

    #[test]
    fn rejects_tiny_inputs() {
        let c = cloud(vec![vec![0.0]]);
        assert!(rips_persistence(&c, 1, None).is_err());
    }
}
