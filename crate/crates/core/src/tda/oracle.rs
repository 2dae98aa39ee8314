//! Brute-force persistence for small clouds.
//!
//! Shares nothing with the fast path beyond the diagram type: neighbour ranks
//! come from a full sort, triangles from enumerating all triples, and the
//! boundary matrix is reduced densely with the textbook column algorithm.

use super::diagram::{Interval, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

pub const ORACLE_MAX_POINTS: usize = 16;

pub fn persistence_oracle(cloud: &PointCloud, k_max: usize) -> Result<PersistenceDiagram> {
    let n = cloud.len();
    if n > ORACLE_MAX_POINTS {
        return Err(Error::OutOfRange {
            what: "oracle cloud size",
            got: n,
            min: 2,
            max: ORACLE_MAX_POINTS,
        });
    }
    if n < 2 || k_max < 1 || k_max >= n {
        return Err(Error::OutOfRange {
            what: "k_max",
            got: k_max,
            min: 1,
            max: n.saturating_sub(1),
        });
    }
    let pts = cloud.points();

    // rank[i][j] = position (1-based) of j in i's sorted neighbour list
    let mut rank = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&u, &v| {
            let du = (pts[u].x - pts[i].x).powi(2) + (pts[u].y - pts[i].y).powi(2);
            let dv = (pts[v].x - pts[i].x).powi(2) + (pts[v].y - pts[i].y).powi(2);
            du.partial_cmp(&dv).unwrap().then(u.cmp(&v))
        });
        for (r, &j) in others.iter().enumerate() {
            rank[i][j] = r + 1;
        }
    }
    let edge_birth = |i: usize, j: usize| -> Option<usize> {
        let b = rank[i][j].min(rank[j][i]);
        (b <= k_max).then_some(b)
    };

    // (birth, dimension, vertices)
    let mut simplices: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for v in 0..n {
        simplices.push((0, 0, vec![v]));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(b) = edge_birth(i, j) {
                simplices.push((b, 1, vec![i, j]));
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for l in (j + 1)..n {
                if let (Some(x), Some(y), Some(z)) =
                    (edge_birth(i, j), edge_birth(i, l), edge_birth(j, l))
                {
                    simplices.push((x.max(y).max(z), 2, vec![i, j, l]));
                }
            }
        }
    }
    simplices.sort();

    let m = simplices.len();
    let position = |verts: &[usize]| {
        simplices
            .iter()
            .position(|(_, _, v)| v.as_slice() == verts)
            .expect("face present")
    };
    let mut columns: Vec<Vec<bool>> = vec![vec![false; m]; m];
    for (col, (_, _, verts)) in simplices.iter().enumerate() {
        if verts.len() > 1 {
            for skip in 0..verts.len() {
                let face: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|&(idx, _)| idx != skip)
                    .map(|(_, &v)| v)
                    .collect();
                columns[col][position(&face)] = true;
            }
        }
    }

    let low = |c: &Vec<bool>| c.iter().rposition(|&x| x);
    for j in 0..m {
        while let Some(l) = low(&columns[j]) {
            let Some(i) = (0..j).find(|&i| low(&columns[i]) == Some(l)) else {
                break;
            };
            let source = columns[i].clone();
            for (t, s) in columns[j].iter_mut().zip(source) {
                *t ^= s;
            }
        }
    }

    let mut paired = vec![false; m];
    let mut intervals = Vec::new();
    for j in 0..m {
        if let Some(l) = low(&columns[j]) {
            paired[l] = true;
            paired[j] = true;
            let (birth, dim, _) = simplices[l];
            let death = simplices[j].0;
            if death > birth {
                intervals.push(Interval {
                    dim: dim as u8,
                    birth: birth as u32,
                    death: Some(death as u32),
                });
            }
        }
    }
    for j in 0..m {
        let (birth, dim, _) = simplices[j];
        if !paired[j] && dim <= 1 {
            intervals.push(Interval {
                dim: dim as u8,
                birth: birth as u32,
                death: None,
            });
        }
    }
    Ok(PersistenceDiagram::new(k_max, intervals))
}
