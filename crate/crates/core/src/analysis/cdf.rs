use alloc::vec::Vec;

use crate::{Error, Result};

/// Right-continuous step CDF of a discrete distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct StepCdf {
    /// Sorted, distinct jump points.
    points: Vec<f64>,
    /// `cumulative[i] = P(X <= points[i])`, normalized to end at 1.
    cumulative: Vec<f64>,
}

impl StepCdf {
    /// From point masses; equal support points are merged and the total is normalized to 1.
    pub fn from_masses(support: &[f64], masses: &[f64]) -> Result<Self> {
        if support.len() != masses.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                found: masses.len(),
            });
        }
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(Error::EmptyData);
        }
        let mut pairs: Vec<(f64, f64)> = support.iter().copied().zip(masses.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<f64> = Vec::new();
        let mut cumulative: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for (x, m) in pairs {
            acc += m / total;
            if points.last() == Some(&x) {
                *cumulative.last_mut().expect("same length") = acc;
            } else {
                points.push(x);
                cumulative.push(acc);
            }
        }
        Ok(Self { points, cumulative })
    }

    /// Empirical CDF of a sample.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let ones: Vec<f64> = samples.iter().map(|_| 1.0).collect();
        Self::from_masses(samples, &ones)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.cumulative
    }

    /// `P(X <= x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match self.points.partition_point(|p| *p <= x) {
            0 => 0.0,
            i => self.cumulative[i - 1],
        }
    }
}

/// `sup_E |P1(E) - P2(E)|`, evaluated at every jump point of either curve.
pub fn d_sup(a: &StepCdf, b: &StepCdf) -> f64 {
    a.points
        .iter()
        .chain(&b.points)
        .map(|&x| (a.eval(x) - b.eval(x)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_inputs() {
        let a = StepCdf::from_masses(&[1.0, 2.0, 3.0], &[0.2, 0.5, 0.3]).unwrap();
        assert_eq!(d_sup(&a, &a), 0.0);
        assert_eq!(a.eval(0.5), 0.0);
        assert_eq!(a.eval(2.0), 0.7);
        assert!((a.eval(3.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn point_masses() {
        let a = StepCdf::from_masses(&[1.0], &[1.0]).unwrap();
        let b = StepCdf::from_masses(&[2.0], &[1.0]).unwrap();
        assert_eq!(d_sup(&a, &b), 1.0);
    }

    #[test]
    fn shifted_uniform() {
        let s = 0.5;
        let a = StepCdf::from_masses(&[0.0, s, 2.0 * s, 3.0 * s], &[0.25; 4]).unwrap();
        let b = StepCdf::from_masses(&[s, 2.0 * s, 3.0 * s, 4.0 * s], &[0.25; 4]).unwrap();
        assert!((d_sup(&a, &b) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn duplicates_merge_and_normalize() {
        let a = StepCdf::from_samples(&[3.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(a.points(), &[1.0, 2.0, 3.0]);
        assert_eq!(a.values(), &[0.25, 0.5, 1.0]);
        assert!(StepCdf::from_samples(&[]).is_err());
    }

    fn cdf_strategy() -> impl Strategy<Value = StepCdf> {
        prop::collection::vec((0u8..12, 0.01f64..1.0), 1..8).prop_map(|v| {
            let (x, m): (Vec<f64>, Vec<f64>) = v.into_iter().map(|(x, m)| (x as f64 * 0.5, m)).unzip();
            StepCdf::from_masses(&x, &m).unwrap()
        })
    }

    proptest! {
        #[test]
        fn d_sup_is_a_metric(a in cdf_strategy(), b in cdf_strategy(), c in cdf_strategy()) {
            let ab = d_sup(&a, &b);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
            prop_assert!((ab - d_sup(&b, &a)).abs() < 1e-15);
            prop_assert!(ab <= d_sup(&a, &c) + d_sup(&c, &b) + 1e-12);
            prop_assert_eq!(d_sup(&a, &a), 0.0);
        }
    }
}
