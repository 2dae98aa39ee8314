//! Constellation analysis of retweet point clouds.
//!
//! The crate turns retweet corpora (or parametric Gaussian models) into 2D
//! point clouds, thins them with farthest-point sampling, computes persistent
//! homology of the k-nearest-neighbour filtration and sorts clouds into the
//! Nuclear, Bipolar and Multipolar constellation categories.
//!
//! Module map:
//!
//! * [`geometry`]: points, clouds, distances, exact kNN queries.
//! * [`models`]: Gaussian constellation models, density and sampling.
//! * [`reduction`]: farthest-point ("Euclidean-based") reduction.
//! * [`tda`]: kNN filtrations, persistence, brute-force oracle.
//! * [`network`]: retweet parsing, graphs, force layout, gatekeepers.
//! * [`classify`]: isotropic mixture EM, BIC selection, categorisation.
//! * [`io`] and [`plot`]: file formats and SVG output.
//! * [`cli`]: the `constellations` command line.

pub mod classify;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod models;
pub mod network;
pub mod plot;
pub mod reduction;
pub mod tda;

pub use error::{Error, Result};
pub use geometry::{Point2D, PointCloud};
