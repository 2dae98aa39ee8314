//! kNN-filtration persistent homology in dimensions 0 and 1.

mod diagram;
mod filtration;
mod oracle;
mod persistence;

pub use diagram::{Interval, PersistenceDiagram};
pub use filtration::{Edge, KnnFiltration, Simplex, Triangle};
pub use oracle::{persistence_oracle, ORACLE_MAX_POINTS};
pub use persistence::{betti_numbers, persistence};

pub const DEFAULT_K_MAX: usize = 8;

/// Builds the filtration and computes its diagram.
pub fn knn_persistence(
    cloud: &crate::geometry::PointCloud,
    k_max: usize,
) -> crate::Result<PersistenceDiagram> {
    Ok(persistence(&KnnFiltration::build(cloud, k_max)?))
}
