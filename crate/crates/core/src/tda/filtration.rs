use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{KnnIndex, PointCloud};

/// Sorted vertex list of a vertex, edge or triangle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<u32>);

impl Simplex {
    pub fn new(mut vertices: Vec<u32>) -> Result<Self> {
        vertices.sort_unstable();
        let len = vertices.len();
        vertices.dedup();
        if vertices.len() != len || !(1..=3).contains(&len) {
            return Err(Error::domain("a simplex has 1 to 3 distinct vertices"));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub birth: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [u32; 3],
    pub birth: u32,
}

/// Union-rule kNN flag complex truncated at triangles, indexed by integer k.
///
/// Vertices appear at k = 0. Edge `{i, j}` appears at the smallest k for
/// which either endpoint is among the other's k nearest neighbours. A
/// triangle appears with its last edge. Edges and triangles are stored in
/// filtration order: birth, then lexicographic vertices.
#[derive(Debug, Clone)]
pub struct KnnFiltration {
    cloud_size: usize,
    k_max: usize,
    edges: Vec<Edge>,
    triangles: Vec<Triangle>,
}

impl KnnFiltration {
    pub fn build(cloud: &PointCloud, k_max: usize) -> Result<Self> {
        let n = cloud.len();
        if n < 2 || k_max < 1 || k_max > n - 1 {
            return Err(Error::OutOfRange {
                what: "k_max",
                got: k_max,
                min: 1,
                max: n.saturating_sub(1),
            });
        }
        let index = KnnIndex::new(cloud);
        let neighbours: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|i| index.query(i, k_max).expect("k_max checked"))
            .collect();

        let mut births: HashMap<(u32, u32), u32> = HashMap::with_capacity(n * k_max);
        for (i, nb) in neighbours.iter().enumerate() {
            for (rank, &j) in nb.iter().enumerate() {
                let key = if i < j {
                    (i as u32, j as u32)
                } else {
                    (j as u32, i as u32)
                };
                let birth = rank as u32 + 1;
                births
                    .entry(key)
                    .and_modify(|b| *b = (*b).min(birth))
                    .or_insert(birth);
            }
        }
        let mut edges: Vec<Edge> = births
            .into_iter()
            .map(|((a, b), birth)| Edge { a, b, birth })
            .collect();
        edges.sort_unstable_by_key(|e| (e.birth, e.a, e.b));

        // Upper adjacency: for each vertex, (higher neighbour, edge birth).
        let mut upper: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for e in &edges {
            upper[e.a as usize].push((e.b, e.birth));
        }
        for list in &mut upper {
            list.sort_unstable();
        }
        let mut triangles = Vec::new();
        for a in 0..n {
            let ua = &upper[a];
            for (pos, &(b, ab)) in ua.iter().enumerate() {
                let ub = &upper[b as usize];
                // Intersect the higher neighbours of a (beyond b) with those of b.
                let (mut x, mut y) = (pos + 1, 0);
                while x < ua.len() && y < ub.len() {
                    match ua[x].0.cmp(&ub[y].0) {
                        std::cmp::Ordering::Less => x += 1,
                        std::cmp::Ordering::Greater => y += 1,
                        std::cmp::Ordering::Equal => {
                            let birth = ab.max(ua[x].1).max(ub[y].1);
                            triangles.push(Triangle {
                                vertices: [a as u32, b, ua[x].0],
                                birth,
                            });
                            x += 1;
                            y += 1;
                        }
                    }
                }
            }
        }
        triangles.sort_unstable_by_key(|t| (t.birth, t.vertices));
        Ok(KnnFiltration {
            cloud_size: n,
            k_max,
            edges,
            triangles,
        })
    }

    pub fn cloud_size(&self) -> usize {
        self.cloud_size
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    /// Birth scale of `simplex`, or `None` if it is not in the complex.
    pub fn appearance(&self, simplex: &Simplex) -> Option<u32> {
        match *simplex.vertices() {
            [v] => ((v as usize) < self.cloud_size).then_some(0),
            [a, b] => self
                .edges
                .iter()
                .find(|e| e.a == a && e.b == b)
                .map(|e| e.birth),
            [a, b, c] => self
                .triangles
                .iter()
                .find(|t| t.vertices == [a, b, c])
                .map(|t| t.birth),
            _ => None,
        }
    }

    /// Every simplex with its birth, in filtration order
    /// (birth, dimension, lexicographic vertices).
    pub fn simplices(&self) -> Vec<(Simplex, u32)> {
        let mut all: Vec<(u32, usize, Simplex)> = (0..self.cloud_size as u32)
            .map(|v| (0, 0, Simplex(vec![v])))
            .chain(
                self.edges
                    .iter()
                    .map(|e| (e.birth, 1, Simplex(vec![e.a, e.b]))),
            )
            .chain(
                self.triangles
                    .iter()
                    .map(|t| (t.birth, 2, Simplex(t.vertices.to_vec()))),
            )
            .collect();
        all.sort();
        all.into_iter().map(|(b, _, s)| (s, b)).collect()
    }

    /// Edge set of the scale-k graph.
    pub fn edges_at(&self, k: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.birth as usize <= k)
    }
}
