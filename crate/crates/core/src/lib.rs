//! Hierarchical multigroup shape analysis.
//!
//! This crate fits a two-level generative model to groups of planar point
//! sets: every observed boundary pointset is explained by a hidden shape on
//! the Kendall pre-shape sphere, hidden shapes within a group are Gaussian
//! around a hidden group mean, and group means are Gaussian around a single
//! population mean. Fitting runs Monte-Carlo expectation maximization where
//! the E step samples all hidden shapes with projected-gradient Hamiltonian
//! Monte Carlo and the M step updates the covariances and the population
//! mean in closed form.
//!
//! On top of the fitted model the crate provides two-group comparison by
//! permutation testing of Hotelling's T² and classification of unseen
//! pointsets by Monte-Carlo marginal likelihood.
//!
//! All numerical code is generic over the scalar type via [`Scalar`]
//! (`f32` or `f64`); the `*64` aliases at the crate root pick `f64`, which
//! is what the CLI uses.

pub mod analysis;
pub mod geometry;
pub mod inference;
pub mod io;
pub mod model;
pub mod sampler;
mod scalar;
pub mod simdata;

pub use scalar::{convert, Scalar};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A pointset collapsed to (numerically) zero size, or an alignment had
    /// no usable cross-covariance.
    #[error("degenerate shape: {0}")]
    DegenerateShape(String),
    /// A ridged covariance could not be factorized.
    #[error("singular covariance: {0}")]
    SingularCovariance(String),
    /// A sampling target returned NaN or an infinity.
    #[error("non-finite energy in sampler target")]
    NonFiniteEnergy,
    /// Not enough observations for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// Inconsistent dimensions or otherwise invalid arguments.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A data file did not parse.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    /// An underlying filesystem operation failed.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Concrete `f64` aliases for the main domain types.
pub type PointSet64 = geometry::PointSet<f64>;
pub type PreShape64 = geometry::PreShape<f64>;
pub type TangentVector64 = geometry::TangentVector<f64>;
pub type GroupModel64 = model::GroupModel<f64>;
pub type PopulationParams64 = model::PopulationParams<f64>;
pub type HiddenState64 = sampler::HiddenState<f64>;
pub type SampleSet64 = sampler::SampleSet<f64>;
pub type GroupedDataset64 = inference::GroupedDataset<f64>;
pub type FitResult64 = inference::FitResult<f64>;
