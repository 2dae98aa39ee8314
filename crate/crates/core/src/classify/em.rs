//! Expectation-maximisation for mixtures of isotropic bivariate Gaussians.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2D, PointCloud};

/// Smallest component sigma, in units of the cloud's RMS radius about its mean.
pub const SIGMA_FLOOR: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 500;
pub const RELATIVE_TOLERANCE: f64 = 1e-6;
pub const RESTARTS: usize = 5;
/// Minimum points per component, both in the data and in a fitted
/// component's effective count (`weight * n`).
pub const POINTS_PER_COMPONENT: usize = 5;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub center: Point2D,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureFit {
    pub components: Vec<MixtureComponent>,
    pub log_likelihood: f64,
    pub bic: f64,
    pub n_points: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Some component carries fewer than [`POINTS_PER_COMPONENT`] points'
    /// worth of weight. Such fits chase the unbounded likelihood of a
    /// component shrinking onto a few points and are never selected.
    #[serde(default)]
    pub degenerate: bool,
    /// Log-likelihood after the initial M-step and after every iteration.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

impl MixtureFit {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Index of the component with the largest responsibility for `p`.
    pub fn assign(&self, p: &Point2D) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (k, c) in self.components.iter().enumerate() {
            let s = log_component(c, p);
            if s > best_score {
                best_score = s;
                best = k;
            }
        }
        best
    }
}

/// Free parameters of a `k`-component isotropic mixture in the plane.
pub fn parameter_count(k: usize) -> usize {
    4 * k - 1
}

pub fn bic(log_likelihood: f64, k: usize, n: usize) -> f64 {
    -2.0 * log_likelihood + parameter_count(k) as f64 * (n as f64).ln()
}

#[inline]
fn log_component(c: &MixtureComponent, p: &Point2D) -> f64 {
    let var = c.sigma * c.sigma;
    c.weight.ln() - LN_2PI - var.ln() - c.center.distance_squared(p) / (2.0 * var)
}

/// Fills `resp` (row-major, n x k) with responsibilities; returns the
/// log-likelihood.
fn e_step(points: &[Point2D], comps: &[MixtureComponent], resp: &mut [f64]) -> f64 {
    let k = comps.len();
    let mut ll = 0.0;
    for (p, row) in points.iter().zip(resp.chunks_exact_mut(k)) {
        let mut max = f64::NEG_INFINITY;
        for (r, c) in row.iter_mut().zip(comps) {
            *r = log_component(c, p);
            max = max.max(*r);
        }
        let mut sum = 0.0;
        for r in row.iter_mut() {
            *r = (*r - max).exp();
            sum += *r;
        }
        for r in row.iter_mut() {
            *r /= sum;
        }
        ll += max + sum.ln();
    }
    ll
}

fn m_step(points: &[Point2D], resp: &[f64], comps: &mut [MixtureComponent]) {
    let k = comps.len();
    let n = points.len() as f64;
    for (j, comp) in comps.iter_mut().enumerate() {
        let (mut nk, mut sx, mut sy) = (0.0, 0.0, 0.0);
        for (p, row) in points.iter().zip(resp.chunks_exact(k)) {
            let r = row[j];
            nk += r;
            sx += r * p.x;
            sy += r * p.y;
        }
        if nk <= f64::MIN_POSITIVE {
            // Starved component: keep its shape, give it negligible mass.
            comp.weight = f64::MIN_POSITIVE;
            continue;
        }
        let center = Point2D {
            x: sx / nk,
            y: sy / nk,
        };
        let mut ss = 0.0;
        for (p, row) in points.iter().zip(resp.chunks_exact(k)) {
            ss += row[j] * center.distance_squared(p);
        }
        comp.weight = nk / n;
        comp.center = center;
        comp.sigma = (ss / (2.0 * nk)).sqrt().max(SIGMA_FLOOR);
    }
    let total: f64 = comps.iter().map(|c| c.weight).sum();
    for c in comps.iter_mut() {
        c.weight /= total;
    }
}

/// Greedy spread seeding: the point nearest the mean, then points drawn with
/// probability proportional to squared distance from the chosen set.
fn spread_seeds(points: &[Point2D], k: usize, rng: &mut ChaCha8Rng) -> Vec<Point2D> {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + p.x, b + p.y));
    let mean = Point2D {
        x: sx / n,
        y: sy / n,
    };
    let first = points
        .iter()
        .min_by(|a, b| {
            a.distance_squared(&mean)
                .total_cmp(&b.distance_squared(&mean))
        })
        .copied()
        .expect("nonempty");
    let mut seeds = vec![first];
    let mut d2: Vec<f64> = points.iter().map(|p| p.distance_squared(&first)).collect();
    while seeds.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            points[chosen]
        } else {
            points[rng.random_range(0..points.len())]
        };
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(p.distance_squared(&next));
        }
        seeds.push(next);
    }
    seeds
}

fn run_em(points: &[Point2D], k: usize, rng: &mut ChaCha8Rng) -> MixtureFit {
    let n = points.len();
    let seeds = spread_seeds(points, k, rng);
    // Hard assignment to the nearest seed serves as the initial E-step.
    let mut resp = vec![0.0; n * k];
    for (p, row) in points.iter().zip(resp.chunks_exact_mut(k)) {
        let nearest = (0..k)
            .min_by(|&a, &b| {
                p.distance_squared(&seeds[a])
                    .total_cmp(&p.distance_squared(&seeds[b]))
            })
            .expect("k >= 1");
        row[nearest] = 1.0;
    }
    let mut comps: Vec<MixtureComponent> = seeds
        .iter()
        .map(|&center| MixtureComponent {
            weight: 1.0 / k as f64,
            center,
            sigma: 1.0,
        })
        .collect();
    m_step(points, &resp, &mut comps);
    let mut ll = e_step(points, &comps, &mut resp);
    let mut trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let mut next = comps.clone();
        m_step(points, &resp, &mut next);
        let mut next_resp = vec![0.0; n * k];
        let next_ll = e_step(points, &next, &mut next_resp);
        iterations += 1;
        if next_ll < ll {
            // Exact EM cannot lower the likelihood; a drop here is rounding
            // at the fixed point, so keep the previous parameters.
            converged = true;
            break;
        }
        trace.push(next_ll);
        comps = next;
        resp = next_resp;
        let change = (next_ll - ll).abs();
        ll = next_ll;
        if change < RELATIVE_TOLERANCE * ll.abs() {
            converged = true;
            break;
        }
    }
    let degenerate = comps
        .iter()
        .any(|c| c.weight * (n as f64) < POINTS_PER_COMPONENT as f64);
    MixtureFit {
        degenerate,
        components: comps,
        log_likelihood: ll,
        bic: bic(ll, k, n),
        n_points: n,
        converged,
        iterations,
        trace,
    }
}

/// Every restart of a fit, in restart order.
pub fn fit_mixture_restarts(
    cloud: &PointCloud,
    n_components: usize,
    seed: u64,
) -> Result<Vec<MixtureFit>> {
    let k = n_components;
    if k == 0 {
        return Err(Error::domain("a mixture needs at least one component"));
    }
    let needed = POINTS_PER_COMPONENT * k;
    if cloud.len() < needed {
        return Err(Error::domain(format!(
            "{k} components need at least {needed} points, cloud has {}",
            cloud.len()
        )));
    }
    // EM runs on the cloud centred at its mean and scaled to unit RMS
    // radius. The relative stopping rule then sees the same likelihood values
    // whatever the cloud's position, orientation and scale, so fits commute
    // with similarity transforms.
    let frame = Frame::of(cloud);
    let standard: Vec<Point2D> = cloud
        .points()
        .iter()
        .map(|p| frame.to_standard(p))
        .collect();
    // One component is seeded deterministically, so restarts would coincide.
    let restarts = if k == 1 { 1 } else { RESTARTS };
    Ok((0..restarts)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    ^ (r as u64).wrapping_mul(0xD1B5_4A32_D192_ED03),
            );
            frame.restore(run_em(&standard, k, &mut rng))
        })
        .collect())
}

struct Frame {
    origin: Point2D,
    scale: f64,
}

impl Frame {
    fn of(cloud: &PointCloud) -> Frame {
        let origin = cloud.mean().unwrap_or_default();
        let ms = cloud
            .points()
            .iter()
            .map(|p| p.distance_squared(&origin))
            .sum::<f64>()
            / cloud.len().max(1) as f64;
        let scale = if ms > 0.0 { ms.sqrt() } else { 1.0 };
        Frame { origin, scale }
    }

    fn to_standard(&self, p: &Point2D) -> Point2D {
        Point2D {
            x: (p.x - self.origin.x) / self.scale,
            y: (p.y - self.origin.y) / self.scale,
        }
    }

    fn restore(&self, mut fit: MixtureFit) -> MixtureFit {
        for c in &mut fit.components {
            c.center = Point2D {
                x: self.origin.x + self.scale * c.center.x,
                y: self.origin.y + self.scale * c.center.y,
            };
            c.sigma *= self.scale;
        }
        // Densities pick up a 1 / scale^2 Jacobian per point.
        let shift = -2.0 * fit.n_points as f64 * self.scale.ln();
        fit.log_likelihood += shift;
        for ll in &mut fit.trace {
            *ll += shift;
        }
        fit.bic = bic(fit.log_likelihood, fit.components.len(), fit.n_points);
        fit
    }
}

/// Best of several EM restarts by log-likelihood, non-degenerate restarts
/// first.
pub fn fit_mixture(cloud: &PointCloud, n_components: usize, seed: u64) -> Result<MixtureFit> {
    Ok(best_restart(fit_mixture_restarts(
        cloud,
        n_components,
        seed,
    )?))
}

/// Highest log-likelihood restart, preferring non-degenerate fits.
///
/// # Panics
/// If `restarts` is empty.
pub fn best_restart(restarts: Vec<MixtureFit>) -> MixtureFit {
    restarts
        .into_iter()
        .reduce(|best, f| {
            let better = match (f.degenerate, best.degenerate) {
                (false, true) => true,
                (true, false) => false,
                _ => f.log_likelihood > best.log_likelihood,
            };
            if better {
                f
            } else {
                best
            }
        })
        .expect("at least one restart")
}

/// Component count (1-based) minimising BIC over the non-degenerate entries
/// of `fits`, where `fits[i]` has `i + 1` components. Ties go to fewer
/// components.
pub fn best_count(fits: &[MixtureFit]) -> usize {
    // A single component spans all points, so fits[0] is never degenerate.
    let mut best = 0;
    for (i, f) in fits.iter().enumerate() {
        if !f.degenerate && f.bic < fits[best].bic {
            best = i;
        }
    }
    best + 1
}

/// Fits 1..=n_max components; the best count minimises BIC over the
/// non-degenerate fits, ties going to fewer components.
pub fn select_components(
    cloud: &PointCloud,
    n_max: usize,
    seed: u64,
) -> Result<(usize, Vec<MixtureFit>)> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let fits = (1..=n_max)
        .map(|k| fit_mixture(cloud, k, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok((best_count(&fits), fits))
}

/// Maximum-likelihood midpoint model: one axis-aligned Gaussian with its own
/// spreads and the normalising amplitude `1 / (2 pi sigma_x sigma_y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCentroidFit {
    pub midpoint: Point2D,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub amplitude: f64,
    pub log_likelihood: f64,
}

pub fn fit_dual_centroid(cloud: &PointCloud) -> Result<DualCentroidFit> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::domain("dual-centroid fit needs at least two points"));
    }
    let mu = cloud.mean().expect("nonempty");
    let (vx, vy) = cloud.points().iter().fold((0.0, 0.0), |(a, b), p| {
        (a + (p.x - mu.x).powi(2), b + (p.y - mu.y).powi(2))
    });
    let sigma_x = (vx / n as f64).sqrt().max(SIGMA_FLOOR);
    let sigma_y = (vy / n as f64).sqrt().max(SIGMA_FLOOR);
    let amplitude = 1.0 / (std::f64::consts::TAU * sigma_x * sigma_y);
    let log_likelihood = cloud
        .points()
        .iter()
        .map(|p| {
            amplitude.ln()
                - (p.x - mu.x).powi(2) / (2.0 * sigma_x * sigma_x)
                - (p.y - mu.y).powi(2) / (2.0 * sigma_y * sigma_y)
        })
        .sum();
    Ok(DualCentroidFit {
        midpoint: mu,
        sigma_x,
        sigma_y,
        amplitude,
        log_likelihood,
    })
}
