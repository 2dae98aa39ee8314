//! Gaussian constellation models.
//!
//! A [`ConstellationSpec`] is one of four variants built from isotropic
//! Gaussian components: Nuclear (one component), Bipolar (two), Multipolar
//! (three or more) and DualCentroid, a single anisotropic Gaussian centred on
//! the midpoint of two centroids.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{euclidean_distance, Point2D, PointCloud};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Nuclear,
    Bipolar,
    Multipolar,
    #[serde(alias = "dual_centroid", alias = "dual-centroid")]
    DualCentroid,
}

fn unit_amplitude() -> f64 {
    1.0
}

/// Isotropic Gaussian bump `A * exp(-r^2 / (2 sigma^2))` around `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianComponent {
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
    #[serde(default = "unit_amplitude")]
    pub amplitude: f64,
}

impl GaussianComponent {
    pub fn new(x: f64, y: f64, sigma: f64) -> Self {
        GaussianComponent {
            x,
            y,
            sigma,
            amplitude: 1.0,
        }
    }

    pub fn center(&self) -> Point2D {
        Point2D {
            x: self.x,
            y: self.y,
        }
    }

    fn validate(&self, idx: usize) -> Result<()> {
        if !(self.x.is_finite() && self.y.is_finite()) {
            return Err(Error::domain(format!(
                "component {idx}: center must be finite"
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain(format!("component {idx}: sigma must be > 0")));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::domain(format!(
                "component {idx}: amplitude must be > 0"
            )));
        }
        Ok(())
    }
}

pub fn component_density(comp: &GaussianComponent, p: &Point2D) -> f64 {
    let r2 = comp.center().distance_squared(p);
    comp.amplitude * (-r2 / (2.0 * comp.sigma * comp.sigma)).exp()
}

/// Resolved constellation description. Construct through [`ConstellationSpec::new`]
/// or [`ConstellationSpec::from_json`] so the variant invariants hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationSpec {
    pub variant: Variant,
    pub components: Vec<GaussianComponent>,
    /// Declared radius R; metadata only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub weights: Vec<f64>,
    /// Per-axis spread of the DualCentroid midpoint Gaussian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_y: Option<f64>,
}

/// On-disk shape: weights, amplitudes, radius and DualCentroid spreads may be omitted.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    variant: Variant,
    components: Vec<GaussianComponent>,
    #[serde(default)]
    radius: Option<f64>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
    #[serde(default)]
    sigma_x: Option<f64>,
    #[serde(default)]
    sigma_y: Option<f64>,
}

impl ConstellationSpec {
    /// Builds a spec with equal weights.
    pub fn new(variant: Variant, components: Vec<GaussianComponent>) -> Result<Self> {
        let n = components.len();
        Self::resolve(SpecFile {
            variant,
            components,
            radius: None,
            weights: Some(vec![1.0 / n.max(1) as f64; n]),
            sigma_x: None,
            sigma_y: None,
        })
    }

    pub fn nuclear(x: f64, y: f64, sigma: f64) -> Result<Self> {
        Self::new(Variant::Nuclear, vec![GaussianComponent::new(x, y, sigma)])
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        self.weights = weights;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dual_sigmas(mut self, sigma_x: f64, sigma_y: f64) -> Result<Self> {
        self.sigma_x = Some(sigma_x);
        self.sigma_y = Some(sigma_y);
        self.validate()?;
        Ok(self)
    }

    /// Parses the JSON spec file format and fills in defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text)?;
        Self::resolve(file)
    }

    fn resolve(file: SpecFile) -> Result<Self> {
        let n = file.components.len();
        let weights = file
            .weights
            .unwrap_or_else(|| vec![1.0 / n.max(1) as f64; n]);
        let mut spec = ConstellationSpec {
            variant: file.variant,
            components: file.components,
            radius: file.radius,
            weights,
            sigma_x: file.sigma_x,
            sigma_y: file.sigma_y,
        };
        if spec.variant == Variant::DualCentroid && n == 2 {
            // Unset spreads fall back to the mean component sigma.
            let mean_sigma = 0.5 * (spec.components[0].sigma + spec.components[1].sigma);
            spec.sigma_x.get_or_insert(mean_sigma);
            spec.sigma_y.get_or_insert(mean_sigma);
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.components.len();
        let ok = match self.variant {
            Variant::Nuclear => n == 1,
            Variant::Bipolar | Variant::DualCentroid => n == 2,
            Variant::Multipolar => n >= 3,
        };
        if !ok {
            return Err(Error::domain(format!(
                "{:?} constellation cannot have {n} components",
                self.variant
            )));
        }
        for (i, c) in self.components.iter().enumerate() {
            c.validate(i)?;
        }
        if self.weights.len() != n {
            return Err(Error::domain(format!(
                "{} weights for {n} components",
                self.weights.len()
            )));
        }
        if self.weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::domain("weights must be positive"));
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::domain(format!("weights sum to {sum}, expected 1")));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::domain("radius must be > 0"));
            }
        }
        for s in [self.sigma_x, self.sigma_y].into_iter().flatten() {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::domain("sigma_x and sigma_y must be > 0"));
            }
        }
        Ok(())
    }

    /// Midpoint of the first two centres.
    pub fn midpoint(&self) -> Option<Point2D> {
        match self.components.as_slice() {
            [a, b, ..] => Some(Point2D {
                x: 0.5 * (a.x + b.x),
                y: 0.5 * (a.y + b.y),
            }),
            _ => None,
        }
    }
}

/// Single Gaussian on the midpoint of the two DualCentroid centres, with
/// per-axis spreads; the amplitude comes from the first component.
pub fn dual_centroid_density(
    spec: &ConstellationSpec,
    sigma_x: f64,
    sigma_y: f64,
    p: &Point2D,
) -> Result<f64> {
    if spec.variant != Variant::DualCentroid {
        return Err(Error::domain(format!(
            "dual-centroid density needs a DualCentroid spec, got {:?}",
            spec.variant
        )));
    }
    if !(sigma_x > 0.0 && sigma_y > 0.0) {
        return Err(Error::domain("sigma_x and sigma_y must be > 0"));
    }
    let mu = spec
        .midpoint()
        .ok_or_else(|| Error::domain("DualCentroid spec needs two components"))?;
    let dx = p.x - mu.x;
    let dy = p.y - mu.y;
    let amplitude = spec.components[0].amplitude;
    Ok(amplitude
        * (-(dx * dx / (2.0 * sigma_x * sigma_x) + dy * dy / (2.0 * sigma_y * sigma_y))).exp())
}

/// Draws `n` points from the spec's probability mixture. Amplitudes do not
/// affect sampling.
pub fn sample(spec: &ConstellationSpec, n: usize, seed: u64) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    if spec.variant == Variant::DualCentroid {
        let mu = spec.midpoint().expect("validated");
        let sx = spec.sigma_x.unwrap_or(spec.components[0].sigma);
        let sy = spec.sigma_y.unwrap_or(spec.components[1].sigma);
        for _ in 0..n {
            let zx: f64 = StandardNormal.sample(&mut rng);
            let zy: f64 = StandardNormal.sample(&mut rng);
            points.push(Point2D {
                x: mu.x + sx * zx,
                y: mu.y + sy * zy,
            });
        }
    } else {
        let chooser = WeightedIndex::new(&spec.weights)
            .map_err(|e| Error::domain(format!("invalid weights: {e}")))?;
        for _ in 0..n {
            let c = &spec.components[chooser.sample(&mut rng)];
            let zx: f64 = StandardNormal.sample(&mut rng);
            let zy: f64 = StandardNormal.sample(&mut rng);
            points.push(Point2D {
                x: c.x + c.sigma * zx,
                y: c.y + c.sigma * zy,
            });
        }
    }
    PointCloud::new(points)
}

/// Pairwise centre distances (`D` for two components, `D_ij` beyond).
pub fn centroid_distances(spec: &ConstellationSpec) -> Result<Vec<Vec<f64>>> {
    let n = spec.components.len();
    if n < 2 {
        return Err(Error::domain(
            "centroid distances need at least two components",
        ));
    }
    let centers: Vec<Point2D> = spec.components.iter().map(|c| c.center()).collect();
    Ok(pairwise_center_distances(&centers))
}

pub(crate) fn pairwise_center_distances(centers: &[Point2D]) -> Vec<Vec<f64>> {
    centers
        .iter()
        .map(|a| centers.iter().map(|b| euclidean_distance(a, b)).collect())
        .collect()
}

/// Mean distance from `center` to the points of the cloud.
pub fn effective_radius(cloud: &PointCloud, center: &Point2D) -> Result<f64> {
    if cloud.is_empty() {
        return Err(Error::domain("effective radius of an empty cloud"));
    }
    let total: f64 = cloud
        .points()
        .iter()
        .map(|p| euclidean_distance(center, p))
        .sum();
    Ok(total / cloud.len() as f64)
}
