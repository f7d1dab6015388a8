use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::statevector::RngStream;
use crate::{Error, Result};

/// How blocked data are resampled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ResampleScheme {
    /// `K` draws of the blocks with replacement.
    #[default]
    Bootstrap,
    /// Leave-one-block-out; `K` is the number of blocks.
    Jackknife,
}

/// Per-block sums of a vector-valued per-sample quantity.
///
/// Only complete blocks are kept; the trailing partial block is dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Blocks {
    sums: Vec<Vec<f64>>,
    size: usize,
}

impl Blocks {
    /// `value(i)` is the vector contributed by sample `i`.
    pub fn new(n: usize, width: usize, size: usize, value: impl Fn(usize, &mut [f64])) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyData);
        }
        if size == 0 {
            return Err(Error::invalid("block_size", "must be at least 1"));
        }
        let count = n / size;
        if count < 2 {
            return Err(Error::TooFewBlocks(count));
        }
        let mut sums = vec![vec![0.0; width]; count];
        let mut buf = vec![0.0; width];
        for (b, sum) in sums.iter_mut().enumerate() {
            for i in b * size..(b + 1) * size {
                buf.iter_mut().for_each(|x| *x = 0.0);
                value(i, &mut buf);
                sum.iter_mut().zip(&buf).for_each(|(s, v)| *s += v);
            }
        }
        Ok(Self { sums, size })
    }

    pub fn count(&self) -> usize {
        self.sums.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Mean over all kept samples.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.sums[0].len()];
        for s in &self.sums {
            m.iter_mut().zip(s).for_each(|(a, b)| *a += b);
        }
        let n = (self.count() * self.size) as f64;
        m.iter_mut().for_each(|a| *a /= n);
        m
    }

    /// Means of each resampled dataset. Bootstrap resample `s` draws from `rng.fork(s)`.
    pub fn resample_means(&self, scheme: ResampleScheme, k: usize, rng: &RngStream) -> Vec<Vec<f64>> {
        let width = self.sums[0].len();
        let nb = self.count();
        match scheme {
            ResampleScheme::Bootstrap => (0..k as u64)
                .map(|s| {
                    let mut r = rng.fork(s);
                    let mut m = vec![0.0; width];
                    for _ in 0..nb {
                        let b = &self.sums[r.below(nb)];
                        m.iter_mut().zip(b).for_each(|(a, x)| *a += x);
                    }
                    let n = (nb * self.size) as f64;
                    m.iter_mut().for_each(|a| *a /= n);
                    m
                })
                .collect(),
            ResampleScheme::Jackknife => {
                let total = self.mean();
                let n = (nb * self.size) as f64;
                let n_left = n - self.size as f64;
                self.sums
                    .iter()
                    .map(|b| {
                        total
                            .iter()
                            .zip(b)
                            .map(|(t, x)| (t * n - x) / n_left)
                            .collect()
                    })
                    .collect()
            }
        }
    }
}

/// Spread of resampled estimates around the full-data estimate:
/// `sqrt(c * sum_s (x_s - x)^2)` with `c = 1/K` (bootstrap) or `(K-1)/K` (jackknife).
pub fn resample_error(scheme: ResampleScheme, center: &[f64], resamples: &[Vec<f64>]) -> Vec<f64> {
    let k = resamples.len() as f64;
    let c = match scheme {
        ResampleScheme::Bootstrap => 1.0 / k,
        ResampleScheme::Jackknife => (k - 1.0) / k,
    };
    center
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let ss: f64 = resamples.iter().map(|r| (r[i] - x) * (r[i] - x)).sum();
            sqrt(c * ss)
        })
        .collect()
}

/// Mean and blocked resampling error of a scalar series.
pub fn scalar_observable_error(
    samples: &[f64],
    block: usize,
    k: usize,
    scheme: ResampleScheme,
    rng: &RngStream,
) -> Result<(f64, f64)> {
    let blocks = Blocks::new(samples.len(), 1, block, |i, out| out[0] = samples[i])?;
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let center = blocks.mean();
    let err = resample_error(scheme, &center, &blocks.resample_means(scheme, k, rng))[0];
    Ok((mean, err))
}
