//! Histograms, kernel density estimates, CDF distances, the QPE-distortion model and GridDist.

mod cdf;
mod distribution;
mod model;
mod resample;

pub use cdf::{d_sup, StepCdf};
pub use distribution::{
    gaussian, histogram_on_grid, integrate, kde, smeared_density, DistributionEstimate, KdeParams, Provenance,
    ResampleParams,
};
pub use model::{
    dominant_sites, exact_distribution, gibbs_level_weights, grid_dist, qpe_distortion_model, LevelWeighting,
    QpeDistortion,
};
pub use resample::{resample_error, scalar_observable_error, Blocks, ResampleScheme};
