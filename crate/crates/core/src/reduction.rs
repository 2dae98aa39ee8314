//! Euclidean-based reduction by greedy farthest-point (maxmin) sampling.
//!
//! Selection starts at the input point nearest the cloud mean and repeatedly
//! adds the point whose distance to the selected set is largest (lowest index
//! on ties). Extremes are picked early, so the footprint of the cloud is kept
//! while dense cores are thinned.

use serde::{Deserialize, Serialize};

use crate::geometry::PointCloud;

pub const DEFAULT_TARGET_SIZE: usize = 3400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub input_size: usize,
    pub output_size: usize,
    /// Distance from the last selected point to the previously selected set
    /// (0 when fewer than two points were selected or nothing was removed).
    pub maxmin_radius: f64,
    /// Reduced bounding-box area over the original one.
    pub bbox_retention: f64,
    /// True when the target was at least the input size.
    pub no_op: bool,
}

/// Selection order of farthest-point sampling together with the maxmin radius
/// at which each point after the first was taken.
#[derive(Debug, Clone, PartialEq)]
pub struct FarthestPointOrder {
    pub selected: Vec<usize>,
    pub radii: Vec<f64>,
}

pub fn farthest_point_order(cloud: &PointCloud, target: usize) -> FarthestPointOrder {
    let pts = cloud.points();
    let n = pts.len();
    let target = target.min(n);
    if target == 0 {
        return FarthestPointOrder {
            selected: Vec::new(),
            radii: Vec::new(),
        };
    }
    let mean = cloud.mean().expect("nonempty");
    let start = nearest_index(cloud, &mean);

    let mut selected = Vec::with_capacity(target);
    let mut radii = Vec::with_capacity(target.saturating_sub(1));
    // Squared distance of every point to the selected set.
    let mut min_d2 = vec![f64::INFINITY; n];
    let mut current = start;
    selected.push(current);
    // Selected points carry a negative sentinel so duplicates never re-enter.
    min_d2[current] = -1.0;
    while selected.len() < target {
        let c = pts[current];
        let mut best = usize::MAX;
        let mut best_d2 = f64::NEG_INFINITY;
        for (j, (d2, q)) in min_d2.iter_mut().zip(pts).enumerate() {
            let d = c.distance_squared(q);
            if d < *d2 {
                *d2 = d;
            }
            if *d2 > best_d2 {
                best_d2 = *d2;
                best = j;
            }
        }
        current = best;
        selected.push(current);
        radii.push(best_d2.sqrt());
        min_d2[current] = -1.0;
    }
    FarthestPointOrder { selected, radii }
}

fn nearest_index(cloud: &PointCloud, target: &crate::geometry::Point2D) -> usize {
    let mut best = 0;
    let mut best_d2 = f64::INFINITY;
    for (i, p) in cloud.points().iter().enumerate() {
        let d2 = p.distance_squared(target);
        if d2 < best_d2 {
            best_d2 = d2;
            best = i;
        }
    }
    best
}

fn bbox_area(cloud: &PointCloud) -> f64 {
    cloud
        .bounding_box()
        .map_or(0.0, |(lo, hi)| (hi.x - lo.x) * (hi.y - lo.y))
}

/// Reduces `cloud` to `target` points; a target of at least the input size
/// returns the cloud unchanged. Output keeps input order and labels.
pub fn reduce_euclidean(cloud: &PointCloud, target: usize) -> (PointCloud, ReductionReport) {
    let target = target.max(1);
    let n = cloud.len();
    if target >= n {
        let report = ReductionReport {
            input_size: n,
            output_size: n,
            maxmin_radius: 0.0,
            bbox_retention: 1.0,
            no_op: true,
        };
        return (cloud.clone(), report);
    }
    let order = farthest_point_order(cloud, target);
    let mut indices = order.selected.clone();
    indices.sort_unstable();
    let reduced = cloud.select(&indices);
    let original_area = bbox_area(cloud);
    let bbox_retention = if original_area > 0.0 {
        (bbox_area(&reduced) / original_area).min(1.0)
    } else {
        1.0
    };
    let report = ReductionReport {
        input_size: n,
        output_size: reduced.len(),
        maxmin_radius: order.radii.last().copied().unwrap_or(0.0),
        bbox_retention,
        no_op: false,
    };
    (reduced, report)
}
