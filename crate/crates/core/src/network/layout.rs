//! Fruchterman-Reingold style spring-electrical layout.
//!
//! Nodes start uniformly in the unit square. Every pair repels with
//! `L^2 / d`; every undirected edge attracts with `w * d^2 / L`, where `L` is
//! the ideal edge length and `w` the summed weight of both directions. Each
//! node moves by a damped step of its net force, capped by a temperature that
//! cools linearly to zero.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::RetweetGraph;
use crate::error::{Error, Result};
use crate::geometry::{Point2D, PointCloud};

pub const DEFAULT_ITERATIONS: usize = 50;

/// Ideal edge length is this fraction of `sqrt(area / n)`.
const LENGTH_SCALE: f64 = 0.1;
/// Fraction of the net force applied per step; below 1/6 a connected pair
/// settles without oscillating.
const STEP_GAIN: f64 = 0.1;
const INITIAL_TEMPERATURE: f64 = 0.1;
const MIN_DISTANCE: f64 = 1e-9;

pub struct ForceLayout {
    labels: Vec<String>,
    positions: Vec<Point2D>,
    /// Undirected edges `(i, j, weight)` with `i < j`.
    edges: Vec<(usize, usize, f64)>,
    ideal_length: f64,
    iterations: usize,
    step: usize,
}

impl ForceLayout {
    pub fn new(graph: &RetweetGraph, seed: u64, iterations: usize) -> Result<Self> {
        if graph.is_empty() {
            return Err(Error::domain("cannot lay out an empty graph"));
        }
        let labels: Vec<String> = graph.nodes().iter().cloned().collect();
        let index: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut undirected: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for ((s, t), &w) in graph.edges() {
            let (a, b) = (index[s.as_str()], index[t.as_str()]);
            let key = if a < b { (a, b) } else { (b, a) };
            *undirected.entry(key).or_insert(0.0) += w as f64;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = (0..labels.len())
            .map(|_| Point2D {
                x: rng.random::<f64>(),
                y: rng.random::<f64>(),
            })
            .collect();
        let n = labels.len() as f64;
        Ok(ForceLayout {
            labels,
            positions,
            edges: undirected
                .into_iter()
                .map(|((a, b), w)| (a, b, w))
                .collect(),
            ideal_length: LENGTH_SCALE * (1.0 / n).sqrt(),
            iterations,
            step: 0,
        })
    }

    pub fn positions(&self) -> &[Point2D] {
        &self.positions
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.iterations
    }

    fn temperature(&self) -> f64 {
        INITIAL_TEMPERATURE * (1.0 - self.step as f64 / self.iterations as f64)
    }

    /// Advances one iteration; returns false once the schedule is exhausted.
    pub fn step(&mut self) -> bool {
        if self.is_done() {
            return false;
        }
        let l2 = self.ideal_length * self.ideal_length;
        let pos = &self.positions;
        let mut disp: Vec<(f64, f64)> = pos
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let (mut fx, mut fy) = (0.0, 0.0);
                for (j, q) in pos.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let (dx, dy) = (p.x - q.x, p.y - q.y);
                    let d2 = dx * dx + dy * dy;
                    if d2 < MIN_DISTANCE * MIN_DISTANCE {
                        continue;
                    }
                    // (l^2 / d) along the unit vector = l^2 * delta / d^2
                    let f = l2 / d2;
                    fx += dx * f;
                    fy += dy * f;
                }
                (fx, fy)
            })
            .collect();
        for &(a, b, w) in &self.edges {
            let (dx, dy) = (pos[a].x - pos[b].x, pos[a].y - pos[b].y);
            let d = (dx * dx + dy * dy).sqrt();
            // (w d^2 / l) along the unit vector = w d delta / l
            let f = w * d / self.ideal_length;
            disp[a].0 -= dx * f;
            disp[a].1 -= dy * f;
            disp[b].0 += dx * f;
            disp[b].1 += dy * f;
        }
        let t = self.temperature();
        for (p, (fx, fy)) in self.positions.iter_mut().zip(disp) {
            let mag = (fx * fx + fy * fy).sqrt();
            if mag > 0.0 {
                let len = (STEP_GAIN * mag).min(t);
                p.x += fx / mag * len;
                p.y += fy / mag * len;
            }
        }
        self.step += 1;
        true
    }

    pub fn into_cloud(self) -> Result<PointCloud> {
        PointCloud::with_labels(self.positions, self.labels)
    }
}

/// Runs the full schedule; one labelled point per node, in handle order.
pub fn layout(graph: &RetweetGraph, seed: u64, iterations: usize) -> Result<PointCloud> {
    let mut fl = ForceLayout::new(graph, seed, iterations)?;
    while fl.step() {}
    fl.into_cloud()
}
