//! Persistence of a [`KnnFiltration`] over the two-element field.
//!
//! Dimension 0 comes from a union-find sweep over the edges. Dimension 1
//! comes from reducing triangle boundary columns, with rows of negative edges
//! (those that merged two components) removed: a cycle is determined by its
//! non-forest edges and its lowest entry is always one of them, so pivots are
//! unchanged while columns stay short.

use std::collections::HashMap;

use super::diagram::{Interval, PersistenceDiagram};
use super::filtration::KnnFiltration;
use crate::error::{Error, Result};

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Merges the classes of `a` and `b`, keeping the smaller root (the elder
    /// vertex in filtration order). Returns false if already joined.
    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (elder, younger) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[younger as usize] = elder;
        true
    }
}

/// Symmetric difference of two strictly decreasing index lists.
fn add_columns(target: &mut Vec<u32>, other: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            std::cmp::Ordering::Greater => {
                scratch.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Less => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&target[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(target, scratch);
}

pub fn persistence(filtration: &KnnFiltration) -> PersistenceDiagram {
    let n = filtration.cloud_size();
    let edges = filtration.edges();
    let mut intervals = Vec::new();

    let mut uf = UnionFind::new(n);
    // Filtration position of each positive edge, keyed by endpoints.
    let mut positive: HashMap<(u32, u32), u32> = HashMap::new();
    for (pos, e) in edges.iter().enumerate() {
        if uf.union(e.a, e.b) {
            intervals.push(Interval {
                dim: 0,
                birth: 0,
                death: Some(e.birth),
            });
        } else {
            positive.insert((e.a, e.b), pos as u32);
        }
    }
    let components = (0..n as u32).filter(|&v| uf.find(v) == v).count();
    intervals.extend((0..components).map(|_| Interval {
        dim: 0,
        birth: 0,
        death: None,
    }));

    // pivot edge position -> reduced column owning it
    let mut owner: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut column = Vec::with_capacity(8);
    let mut scratch = Vec::with_capacity(8);
    for tri in filtration.triangles() {
        let [a, b, c] = tri.vertices;
        column.clear();
        for key in [(a, b), (a, c), (b, c)] {
            if let Some(&pos) = positive.get(&key) {
                column.push(pos);
            }
        }
        column.sort_unstable_by(|x, y| y.cmp(x));
        while let Some(&pivot) = column.first() {
            match owner.get(&pivot) {
                Some(reduced) => add_columns(&mut column, reduced, &mut scratch),
                None => break,
            }
        }
        if let Some(&pivot) = column.first() {
            let birth = edges[pivot as usize].birth;
            if tri.birth > birth {
                intervals.push(Interval {
                    dim: 1,
                    birth,
                    death: Some(tri.birth),
                });
            }
            owner.insert(pivot, column.clone());
        }
    }
    for &pos in positive.values() {
        if !owner.contains_key(&pos) {
            intervals.push(Interval {
                dim: 1,
                birth: edges[pos as usize].birth,
                death: None,
            });
        }
    }
    PersistenceDiagram::new(filtration.k_max(), intervals)
}

/// Betti numbers `(b0, b1)` of the scale-`k` complex.
pub fn betti_numbers(filtration: &KnnFiltration, k: usize) -> Result<(usize, usize)> {
    if k > filtration.k_max() {
        return Err(Error::OutOfRange {
            what: "k",
            got: k,
            min: 0,
            max: filtration.k_max(),
        });
    }
    Ok(persistence(filtration).betti_at(k))
}
