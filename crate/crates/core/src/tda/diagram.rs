use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One bar: `death == None` means the class survives to the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub dim: u8,
    pub birth: u32,
    pub death: Option<u32>,
}

impl Interval {
    pub fn is_infinite(&self) -> bool {
        self.death.is_none()
    }

    /// Length in k units; infinite bars are measured up to `k_max`.
    pub fn length(&self, k_max: usize) -> u32 {
        self.death
            .unwrap_or(k_max as u32)
            .saturating_sub(self.birth)
    }

    pub fn alive_at(&self, k: usize) -> bool {
        let k = k as u32;
        self.birth <= k && self.death.is_none_or(|d| k < d)
    }
}

/// Birth/death intervals in dimensions 0 and 1, kept in canonical order
/// (dimension, birth, finite deaths before infinite).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub k_max: usize,
    pub intervals: Vec<Interval>,
}

impl PersistenceDiagram {
    pub fn new(k_max: usize, mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by_key(|iv| (iv.dim, iv.birth, iv.death.unwrap_or(u32::MAX)));
        PersistenceDiagram { k_max, intervals }
    }

    pub fn dimension(&self, dim: u8) -> impl Iterator<Item = &Interval> {
        self.intervals.iter().filter(move |iv| iv.dim == dim)
    }

    /// `(b0, b1)` at scale `k`.
    pub fn betti_at(&self, k: usize) -> (usize, usize) {
        let count = |d| self.dimension(d).filter(|iv| iv.alive_at(k)).count();
        (count(0), count(1))
    }

    /// Intervals of dimension `dim` lasting at least `min_length` k steps.
    pub fn long_lived(&self, dim: u8, min_length: u32) -> Vec<Interval> {
        self.dimension(dim)
            .filter(|iv| iv.length(self.k_max) >= min_length)
            .copied()
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: PersistenceDiagram = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        for iv in &self.intervals {
            if iv.dim > 1 {
                return Err(Error::domain(format!("unsupported dimension {}", iv.dim)));
            }
            if let Some(d) = iv.death {
                if d <= iv.birth {
                    return Err(Error::domain(format!(
                        "interval born at {} dies at {d}",
                        iv.birth
                    )));
                }
            }
        }
        if !self
            .intervals
            .iter()
            .any(|iv| iv.dim == 0 && iv.is_infinite())
        {
            return Err(Error::domain("diagram has no essential dimension-0 class"));
        }
        Ok(())
    }
}
