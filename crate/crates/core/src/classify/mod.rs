//! Constellation classification: mixture fits, BIC model selection and the
//! Nuclear / Bipolar / Multipolar decision rule.
//!
//! Rule, applied to the BIC-selected component count `n`:
//!
//! * `n = 1`: Nuclear.
//! * `n = 2`: Bipolar when `D > 2 max(sigma_1, sigma_2)`, else Nuclear.
//! * `n >= 3`: Multipolar when at least two component pairs have
//!   `D_ij / (sigma_i + sigma_j) > 1`; otherwise the two-component fit is
//!   judged by the `n = 2` rule.

mod em;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2D, PointCloud};
use crate::models::{effective_radius, pairwise_center_distances};
use crate::network::RetweetGraph;
use crate::tda::{Interval, PersistenceDiagram};

pub use em::{
    best_count, best_restart, bic, fit_dual_centroid, fit_mixture, fit_mixture_restarts,
    parameter_count, select_components, DualCentroidFit, MixtureComponent, MixtureFit,
    MAX_ITERATIONS, POINTS_PER_COMPONENT, RESTARTS, SIGMA_FLOOR,
};

pub const DEFAULT_N_MAX: usize = 5;
pub const MIN_CLASSIFY_POINTS: usize = 20;
/// Minimum length (in k steps) of a dimension-1 bar counted as a hole.
pub const HOLE_MIN_LENGTH: u32 = 2;
/// Bipolar requires `D > BIPOLAR_SEPARATION * max(sigma_1, sigma_2)`.
pub const BIPOLAR_SEPARATION: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    Nuclear,
    Bipolar,
    Multipolar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationReport {
    pub category: Category,
    /// Component count chosen by BIC before the category rule.
    pub selected_components: usize,
    pub bic_by_components: Vec<f64>,
    pub fit: MixtureFit,
    /// Centre distance matrix (`D` / `D_ij`); empty for Nuclear.
    pub distances: Vec<Vec<f64>>,
    /// `D_ij / (sigma_i + sigma_j)`; empty for Nuclear.
    pub separation_ratios: Vec<Vec<f64>>,
    pub holed: bool,
    pub hole_intervals: Vec<Interval>,
    /// Mean distance to the fitted centre (Nuclear only).
    pub effective_radius: Option<f64>,
}

impl ConstellationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn separation_ratios(fit: &MixtureFit, distances: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let c = &fit.components;
    distances
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, d)| {
                    if i == j {
                        0.0
                    } else {
                        d / (c[i].sigma + c[j].sigma)
                    }
                })
                .collect()
        })
        .collect()
}

fn centers(fit: &MixtureFit) -> Vec<Point2D> {
    fit.components.iter().map(|c| c.center).collect()
}

fn is_bipolar(fit: &MixtureFit) -> bool {
    let [a, b] = fit.components.as_slice() else {
        return false;
    };
    if fit.degenerate {
        return false;
    }
    let d = crate::geometry::euclidean_distance(&a.center, &b.center);
    d > BIPOLAR_SEPARATION * a.sigma.max(b.sigma)
}

fn separated_pairs(fit: &MixtureFit) -> usize {
    let d = pairwise_center_distances(&centers(fit));
    let r = separation_ratios(fit, &d);
    let k = r.len();
    (0..k)
        .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
        .filter(|&(i, j)| r[i][j] > 1.0)
        .count()
}

/// Classifies with the default component bound.
pub fn classify_constellation(
    cloud: &PointCloud,
    diagram: &PersistenceDiagram,
    seed: u64,
) -> Result<ConstellationReport> {
    classify_with(cloud, diagram, seed, DEFAULT_N_MAX)
}

pub fn classify_with(
    cloud: &PointCloud,
    diagram: &PersistenceDiagram,
    seed: u64,
    n_max: usize,
) -> Result<ConstellationReport> {
    if cloud.len() < MIN_CLASSIFY_POINTS {
        return Err(Error::domain(format!(
            "classification needs at least {MIN_CLASSIFY_POINTS} points, cloud has {}",
            cloud.len()
        )));
    }
    let n_max = n_max.min(cloud.len() / POINTS_PER_COMPONENT).max(1);
    let (_, fits) = select_components(cloud, n_max, seed)?;
    classify_fits(cloud, diagram, fits)
}

/// Classification from precomputed mixtures, `fits[i]` having `i + 1`
/// components (as returned by [`select_components`]).
pub fn classify_fits(
    cloud: &PointCloud,
    diagram: &PersistenceDiagram,
    mut fits: Vec<MixtureFit>,
) -> Result<ConstellationReport> {
    if cloud.len() < MIN_CLASSIFY_POINTS {
        return Err(Error::domain(format!(
            "classification needs at least {MIN_CLASSIFY_POINTS} points, cloud has {}",
            cloud.len()
        )));
    }
    if fits.is_empty() {
        return Err(Error::domain("at least one mixture fit is required"));
    }
    let best_n = best_count(&fits);
    let bic_by_components = fits.iter().map(|f| f.bic).collect();

    let two_component_rule = |fits: &mut Vec<MixtureFit>| {
        if is_bipolar(&fits[1]) {
            (Category::Bipolar, fits.swap_remove(1))
        } else {
            (Category::Nuclear, fits.swap_remove(0))
        }
    };
    let (category, fit) = match best_n {
        1 => (Category::Nuclear, fits.swap_remove(0)),
        2 => two_component_rule(&mut fits),
        n if separated_pairs(&fits[n - 1]) >= 2 => (Category::Multipolar, fits.swap_remove(n - 1)),
        _ => two_component_rule(&mut fits),
    };

    let (distances, separation, radius) = if category == Category::Nuclear {
        let r = effective_radius(cloud, &fit.components[0].center)?;
        (Vec::new(), Vec::new(), Some(r))
    } else {
        let d = pairwise_center_distances(&centers(&fit));
        let s = separation_ratios(&fit, &d);
        (d, s, None)
    };
    let hole_intervals = diagram.long_lived(1, HOLE_MIN_LENGTH);
    Ok(ConstellationReport {
        category,
        selected_components: best_n,
        bic_by_components,
        fit,
        distances,
        separation_ratios: separation,
        holed: !hole_intervals.is_empty(),
        hole_intervals,
        effective_radius: radius,
    })
}

/// Hard component assignment of each labelled point.
pub fn assign_labels(fit: &MixtureFit, cloud: &PointCloud) -> Result<HashMap<String, usize>> {
    let labels = cloud
        .labels()
        .ok_or_else(|| Error::domain("cloud has no labels to assign"))?;
    Ok(labels
        .iter()
        .zip(cloud.points())
        .map(|(l, p)| (l.clone(), fit.assign(p)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    pub separation_ratio: f64,
    /// Share of total edge weight running between components `i` and `j`.
    pub cross_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationSummary {
    pub category: Category,
    /// The single centroid distance `D` of a Bipolar report.
    pub distance: Option<f64>,
    pub pairs: Vec<PairSummary>,
    /// Share of total edge weight between different components.
    pub cross_fraction: Option<f64>,
}

pub fn polarization_summary(
    report: &ConstellationReport,
    graph: Option<&RetweetGraph>,
    assignment: &HashMap<String, usize>,
) -> Result<PolarizationSummary> {
    let k = report.fit.n_components();
    if let Some((label, &c)) = assignment.iter().find(|(_, &c)| c >= k) {
        return Err(Error::domain(format!(
            "label `{label}` assigned to component {c}, report has {k}"
        )));
    }
    let mut pair_weight: HashMap<(usize, usize), u64> = HashMap::new();
    let mut cross_total = 0u64;
    let mut total = 0u64;
    if let Some(g) = graph {
        let labels: HashSet<&String> = assignment.keys().collect();
        if let Some(missing) = g.nodes().iter().find(|v| !labels.contains(v)) {
            return Err(Error::domain(format!(
                "graph node `{missing}` has no point in the cloud"
            )));
        }
        for ((u, v), &w) in g.edges() {
            total += w;
            let (cu, cv) = (assignment[u], assignment[v]);
            if cu != cv {
                cross_total += w;
                *pair_weight.entry((cu.min(cv), cu.max(cv))).or_insert(0) += w;
            }
        }
    }
    let fraction = |w: u64| {
        graph.map(|_| {
            if total == 0 {
                0.0
            } else {
                w as f64 / total as f64
            }
        })
    };

    let centers = centers(&report.fit);
    let distances = pairwise_center_distances(&centers);
    let ratios = separation_ratios(&report.fit, &distances);
    let pairs: Vec<PairSummary> = (0..k)
        .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
        .map(|(i, j)| PairSummary {
            i,
            j,
            distance: distances[i][j],
            separation_ratio: ratios[i][j],
            cross_fraction: fraction(pair_weight.get(&(i, j)).copied().unwrap_or(0)),
        })
        .collect();
    Ok(PolarizationSummary {
        category: report.category,
        distance: (report.category == Category::Bipolar).then(|| distances[0][1]),
        pairs,
        cross_fraction: fraction(cross_total),
    })
}
