use alloc::vec;
use alloc::vec::Vec;

use super::resample::{resample_error, Blocks, ResampleScheme};
use crate::circuits::QpeGrid;
use crate::math::{exp, sqrt, PI};
use crate::statevector::RngStream;
use crate::{Error, Result};

/// Where a distribution came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Sampled,
    Exact,
    QpeDistorted,
}

/// Probability masses (or densities, for a KDE) on a set of support points.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionEstimate {
    pub support: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub provenance: Provenance,
}

impl DistributionEstimate {
    /// Point masses without error bars.
    pub fn masses(support: Vec<f64>, values: Vec<f64>, provenance: Provenance) -> Self {
        let errors = vec![0.0; values.len()];
        Self {
            support,
            values,
            errors,
            provenance,
        }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().zip(&self.values).map(|(x, p)| x * p).sum::<f64>() / self.total()
    }
}

/// Blocking and resampling settings shared by the histogram and the KDE.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResampleParams {
    pub block_size: usize,
    pub resamples: usize,
    pub scheme: ResampleScheme,
}

impl Default for ResampleParams {
    fn default() -> Self {
        Self {
            block_size: 1,
            resamples: 100,
            scheme: ResampleScheme::Bootstrap,
        }
    }
}

fn site_indices(energies: &[f64], grid: &QpeGrid) -> Result<Vec<usize>> {
    if energies.is_empty() {
        return Err(Error::EmptyData);
    }
    energies.iter().map(|&e| grid.index_of(e)).collect()
}

fn site_blocks(sites: &[usize], width: usize, params: &ResampleParams) -> Result<Blocks> {
    Blocks::new(sites.len(), width, params.block_size, |i, out| out[sites[i]] = 1.0)
}

/// Relative frequency of each grid site with blocked resampling errors.
pub fn histogram_on_grid(
    energies: &[f64],
    grid: &QpeGrid,
    params: &ResampleParams,
    rng: &RngStream,
) -> Result<DistributionEstimate> {
    let sites = site_indices(energies, grid)?;
    let mut values = vec![0.0; grid.size()];
    for &j in &sites {
        values[j] += 1.0;
    }
    values.iter_mut().for_each(|v| *v /= sites.len() as f64);
    let blocks = site_blocks(&sites, grid.size(), params)?;
    let resampled = blocks.resample_means(params.scheme, params.resamples, rng);
    let errors = resample_error(params.scheme, &blocks.mean(), &resampled);
    Ok(DistributionEstimate {
        support: grid.energies(),
        values,
        errors,
        provenance: Provenance::Sampled,
    })
}

/// Gaussian kernel density settings.
#[derive(Clone, Debug, PartialEq)]
pub struct KdeParams {
    pub bandwidth: f64,
    pub points: Vec<f64>,
    pub resample: ResampleParams,
}

impl KdeParams {
    pub const DEFAULT_POINTS: usize = 512;

    /// Bandwidth `(E_max - E_min) / (2^q - 1)` on 512 points spanning the grid plus three
    /// bandwidths on each side.
    pub fn for_grid(grid: &QpeGrid) -> Self {
        let bandwidth = (grid.e_max() - grid.e_min()) / (grid.size() - 1) as f64;
        Self::with_bandwidth(grid, bandwidth)
    }

    pub fn with_bandwidth(grid: &QpeGrid, bandwidth: f64) -> Self {
        let lo = grid.e_min() - 3.0 * bandwidth;
        let hi = grid.e_max() + 3.0 * bandwidth;
        let n = Self::DEFAULT_POINTS;
        let points = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        Self {
            bandwidth,
            points,
            resample: ResampleParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0) {
            return Err(Error::invalid("bandwidth", "must be positive"));
        }
        if self.resample.block_size == 0 {
            return Err(Error::invalid("block_size", "must be at least 1"));
        }
        Ok(())
    }
}

/// Normalized Gaussian of width `sigma`.
pub fn gaussian(y: f64, x: f64, sigma: f64) -> f64 {
    let z = (y - x) / sigma;
    exp(-0.5 * z * z) / (sqrt(2.0 * PI) * sigma)
}

/// Density `sum_i w_i G_sigma(y, x_i)` at each point.
pub fn smeared_density(centers: &[f64], weights: &[f64], sigma: f64, points: &[f64]) -> Vec<f64> {
    points
        .iter()
        .map(|&y| centers.iter().zip(weights).map(|(&x, w)| w * gaussian(y, x, sigma)).sum())
        .collect()
}

/// Kernel density estimate `(1/N) sum_i G_sigma(y, x_i)` with blocked resampling errors.
///
/// Samples are grouped by exact value first, so the cost scales with the number of distinct
/// values rather than the sample count.
pub fn kde(samples: &[f64], params: &KdeParams, rng: &RngStream) -> Result<DistributionEstimate> {
    params.validate()?;
    if samples.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut distinct: Vec<f64> = samples.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let index: Vec<usize> = samples
        .iter()
        .map(|x| distinct.binary_search_by(|d| d.total_cmp(x)).expect("value present"))
        .collect();
    let mut freq = vec![0.0; distinct.len()];
    for &i in &index {
        freq[i] += 1.0 / samples.len() as f64;
    }
    let sigma = params.bandwidth;
    let values = smeared_density(&distinct, &freq, sigma, &params.points);
    let errors = match Blocks::new(samples.len(), distinct.len(), params.resample.block_size, |i, out| {
        out[index[i]] = 1.0
    }) {
        Ok(blocks) => {
            let center = smeared_density(&distinct, &blocks.mean(), sigma, &params.points);
            let resampled: Vec<Vec<f64>> = blocks
                .resample_means(params.resample.scheme, params.resample.resamples, rng)
                .iter()
                .map(|f| smeared_density(&distinct, f, sigma, &params.points))
                .collect();
            resample_error(params.resample.scheme, &center, &resampled)
        }
        Err(Error::TooFewBlocks(_)) => vec![0.0; params.points.len()],
        Err(e) => return Err(e),
    };
    Ok(DistributionEstimate {
        support: params.points.clone(),
        values,
        errors,
        provenance: Provenance::Sampled,
    })
}

/// Trapezoid integral of a density over its support.
pub fn integrate(d: &DistributionEstimate) -> f64 {
    d.support
        .windows(2)
        .zip(d.values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}
