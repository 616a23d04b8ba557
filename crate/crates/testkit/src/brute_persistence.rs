//! Brute-force Vietoris-Rips persistence: materialize every simplex up to
//! dimension max_dim + 1, build the full boundary matrix, and reduce it
//! column by column with the textbook algorithm. No clearing, no implicit
//! coboundaries; this is the oracle the optimized reduction is checked
//! against.

use std::collections::HashMap;
use strobo_core::analysis::PointCloud;
use strobo_core::PersistenceDiagram;

struct Simplex {
    vertices: Vec<u16>,
    diam: f64,
}

/// Diagrams `H_0 .. H_{max_dim}` (zero-persistence pairs dropped, essential
/// classes omitted), default threshold = enclosing radius.
pub fn rips_brute_force(
    cloud: &PointCloud,
    max_dim: usize,
    threshold: Option<f64>,
) -> Vec<PersistenceDiagram> {
    let n = cloud.len();
    let dist = |i: usize, j: usize| -> f64 {
        cloud
            .point(i)
            .iter()
            .zip(cloud.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let threshold = threshold.unwrap_or_else(|| {
        (0..n)
            .map(|i| (0..n).map(|j| dist(i, j)).fold(0.0f64, f64::max))
            .fold(f64::INFINITY, f64::min)
    });

    // enumerate all simplices of dimension 0..=max_dim+1 under the threshold
    let mut simplices: Vec<Simplex> = Vec::new();
    for v in 0..n {
        simplices.push(Simplex {
            vertices: vec![v as u16],
            diam: 0.0,
        });
    }
    let mut frontier: Vec<(Vec<u16>, f64)> = (0..n).map(|v| (vec![v as u16], 0.0)).collect();
    for _dim in 1..=(max_dim + 1) {
        let mut next = Vec::new();
        for (verts, diam) in &frontier {
            let last = *verts.last().unwrap() as usize;
            for v in (last + 1)..n {
                let mut d = *diam;
                let mut ok = true;
                for &u in verts {
                    let duv = dist(u as usize, v);
                    if duv > threshold {
                        ok = false;
                        break;
                    }
                    d = d.max(duv);
                }
                if ok {
                    let mut vs = verts.clone();
                    vs.push(v as u16);
                    next.push((vs, d));
                }
            }
        }
        for (vs, d) in &next {
            simplices.push(Simplex {
                vertices: vs.clone(),
                diam: *d,
            });
        }
        frontier = next;
    }

    // filtration order: (diameter, dimension, vertex lex)
    let mut order: Vec<usize> = (0..simplices.len()).collect();
    order.sort_by(|&a, &b| {
        let sa = &simplices[a];
        let sb = &simplices[b];
        sa.diam
            .partial_cmp(&sb.diam)
            .unwrap()
            .then(sa.vertices.len().cmp(&sb.vertices.len()))
            .then(sa.vertices.cmp(&sb.vertices))
    });
    let mut position: HashMap<Vec<u16>, usize> = HashMap::new();
    for (pos, &idx) in order.iter().enumerate() {
        position.insert(simplices[idx].vertices.clone(), pos);
    }

    // boundary columns in filtration positions
    let total = order.len();
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(total);
    for &idx in &order {
        let verts = &simplices[idx].vertices;
        let mut col: Vec<usize> = if verts.len() == 1 {
            Vec::new()
        } else {
            (0..verts.len())
                .map(|drop| {
                    let facet: Vec<u16> = verts
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != drop)
                        .map(|(_, &v)| v)
                        .collect();
                    position[&facet]
                })
                .collect()
        };
        col.sort_unstable();
        columns.push(col);
    }

    // textbook left-to-right reduction
    let mut low_owner: Vec<Option<usize>> = vec![None; total];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..total {
        let mut col = columns[j].clone();
        while let Some(&low) = col.last() {
            match low_owner[low] {
                Some(owner) => {
                    col = xor_sorted(&col, &columns[owner]);
                }
                None => {
                    low_owner[low] = Some(j);
                    pairs.push((low, j));
                    break;
                }
            }
        }
        columns[j] = col;
    }

    let mut diagrams: Vec<Vec<(f64, f64)>> = vec![Vec::new(); max_dim + 1];
    for (birth_pos, death_pos) in pairs {
        let birth = &simplices[order[birth_pos]];
        let death = &simplices[order[death_pos]];
        let k = birth.vertices.len() - 1;
        if k <= max_dim && death.diam > birth.diam {
            diagrams[k].push((birth.diam, death.diam));
        }
    }
    diagrams
        .into_iter()
        .enumerate()
        .map(|(k, pairs)| PersistenceDiagram::new(k, pairs))
        .collect()
}

fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_loop() {
        let cloud = PointCloud::from_rows(
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ],
            "sq",
        )
        .unwrap();
        let dgms = rips_brute_force(&cloud, 2, None);
        assert_eq!(dgms[0].pairs.len(), 3);
        assert_eq!(dgms[1].pairs.len(), 1);
        assert_eq!(dgms[1].pairs[0].0, 1.0);
        assert!((dgms[1].pairs[0].1 - 2.0f64.sqrt()).abs() <= 1e-15);
        assert!(dgms[2].pairs.is_empty());
    }
}
