//! Planar point clouds, Euclidean distances and exact k-nearest-neighbour
//! queries.
//!
//! Neighbour order is by squared distance, ties broken by ascending point
//! index, so every query is deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    /// Checked constructor; rejects NaN and infinite coordinates.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let p = Point2D { x, y };
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NonFinite { index: 0 })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn distance_squared(&self, other: &Point2D) -> f64 {
        let dx = other.x - self.x;
        let dy = other.y - self.y;
        dx * dx + dy * dy
    }
}

#[inline]
pub fn euclidean_distance(p: &Point2D, q: &Point2D) -> f64 {
    p.distance_squared(q).sqrt()
}

/// Ordered points with optional per-point labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Point2D>,
    labels: Option<Vec<String>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point2D>) -> Result<Self> {
        Self::build(points, None)
    }

    pub fn with_labels(points: Vec<Point2D>, labels: Vec<String>) -> Result<Self> {
        Self::build(points, Some(labels))
    }

    fn build(points: Vec<Point2D>, labels: Option<Vec<String>>) -> Result<Self> {
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(Error::domain(format!(
                    "{} labels for {} points",
                    l.len(),
                    points.len()
                )));
            }
        }
        Ok(PointCloud { points, labels })
    }

    pub fn points(&self) -> &[Point2D] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Point2D> {
        self.points.get(i)
    }

    /// Sub-cloud made of the given indices, in the order given.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// Arithmetic mean of the points; `None` for an empty cloud.
    pub fn mean(&self) -> Option<Point2D> {
        if self.points.is_empty() {
            return None;
        }
        let n = self.points.len() as f64;
        let (sx, sy) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Some(Point2D {
            x: sx / n,
            y: sy / n,
        })
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> Option<(Point2D, Point2D)> {
        let first = *self.points.first()?;
        Some(self.points.iter().fold((first, first), |(lo, hi), p| {
            (
                Point2D {
                    x: lo.x.min(p.x),
                    y: lo.y.min(p.y),
                },
                Point2D {
                    x: hi.x.max(p.x),
                    y: hi.y.max(p.y),
                },
            )
        }))
    }

    /// Applies `f` to every point, keeping labels.
    pub fn map_points(&self, f: impl Fn(&Point2D) -> Point2D) -> Result<PointCloud> {
        PointCloud::build(self.points.iter().map(f).collect(), self.labels.clone())
    }
}

/// Total order on candidate neighbours: squared distance, then index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    dist2: f64,
    index: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if n < 2 || k < 1 || k > n - 1 {
        return Err(Error::OutOfRange {
            what: "k",
            got: k,
            min: 1,
            max: n.saturating_sub(1),
        });
    }
    Ok(())
}

/// The `k` nearest neighbours of point `i` (excluding `i`), nearest first.
///
/// Linear scan; use [`KnnIndex`] for many queries on one cloud.
pub fn knn_indices(cloud: &PointCloud, i: usize, k: usize) -> Result<Vec<usize>> {
    let n = cloud.len();
    check_k(n, k)?;
    if i >= n {
        return Err(Error::OutOfRange {
            what: "point index",
            got: i,
            min: 0,
            max: n - 1,
        });
    }
    let origin = cloud.points[i];
    let mut cands: Vec<Candidate> = cloud
        .points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, p)| Candidate {
            dist2: origin.distance_squared(p),
            index: j as u32,
        })
        .collect();
    if k < cands.len() {
        cands.select_nth_unstable(k - 1);
        cands.truncate(k);
    }
    cands.sort_unstable();
    Ok(cands.into_iter().map(|c| c.index as usize).collect())
}

pub fn distance_matrix(cloud: &PointCloud) -> Vec<Vec<f64>> {
    let pts = cloud.points();
    let n = pts.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean_distance(&pts[i], &pts[j]);
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    m
}

const LEAF_SIZE: usize = 8;

/// Static 2-d tree answering exact kNN queries with the same tie-break rule
/// as [`knn_indices`].
///
/// The tree is implicit: `order` is permuted so that every subrange is split
/// at its median along the axis of its depth.
pub struct KnnIndex<'a> {
    points: &'a [Point2D],
    order: Vec<u32>,
}

impl<'a> KnnIndex<'a> {
    pub fn new(cloud: &'a PointCloud) -> Self {
        let points = cloud.points();
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        build_subtree(points, &mut order, 0);
        KnnIndex { points, order }
    }

    /// Neighbours of point `i`, nearest first.
    pub fn query(&self, i: usize, k: usize) -> Result<Vec<usize>> {
        let n = self.points.len();
        check_k(n, k)?;
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.search(0, n, 0, i as u32, k, &mut heap);
        let mut found = heap.into_vec();
        found.sort_unstable();
        Ok(found.into_iter().map(|c| c.index as usize).collect())
    }

    fn search(
        &self,
        lo: usize,
        hi: usize,
        depth: usize,
        query: u32,
        k: usize,
        heap: &mut BinaryHeap<Candidate>,
    ) {
        let q = self.points[query as usize];
        if hi - lo <= LEAF_SIZE {
            for &j in &self.order[lo..hi] {
                self.offer(q, query, j, k, heap);
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let pivot_idx = self.order[mid];
        let pivot = self.points[pivot_idx as usize];
        let diff = if depth.is_multiple_of(2) {
            q.x - pivot.x
        } else {
            q.y - pivot.y
        };
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, depth + 1, query, k, heap);
        self.offer(q, query, pivot_idx, k, heap);
        // Equal distances must still be visited: a tie may carry a lower index.
        let full = heap.len() == k;
        if !full || diff * diff <= heap.peek().map_or(f64::INFINITY, |c| c.dist2) {
            self.search(far.0, far.1, depth + 1, query, k, heap);
        }
    }

    #[inline]
    fn offer(&self, q: Point2D, query: u32, j: u32, k: usize, heap: &mut BinaryHeap<Candidate>) {
        if j == query {
            return;
        }
        let cand = Candidate {
            dist2: q.distance_squared(&self.points[j as usize]),
            index: j,
        };
        if heap.len() < k {
            heap.push(cand);
        } else if let Some(worst) = heap.peek() {
            if cand < *worst {
                heap.pop();
                heap.push(cand);
            }
        }
    }
}

fn build_subtree(points: &[Point2D], order: &mut [u32], depth: usize) {
    if order.len() <= LEAF_SIZE {
        return;
    }
    let mid = order.len() / 2;
    let key = |i: &u32| {
        let p = points[*i as usize];
        if depth.is_multiple_of(2) {
            p.x
        } else {
            p.y
        }
    };
    order.select_nth_unstable_by(mid, |a, b| key(a).total_cmp(&key(b)));
    let (left, right) = order.split_at_mut(mid);
    build_subtree(points, left, depth + 1);
    build_subtree(points, &mut right[1..], depth + 1);
}
