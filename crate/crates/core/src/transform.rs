//! The dimensionless transformed sample attached to a query point.
//!
//! For a query `x` every observation contributes `Z^x_i = Y_i·1(X_i ≤ x)`.
//! The `Z^x_i` are i.i.d. univariate with right endpoint equal to the
//! frontier value at `x`; the sample maximum is the FDH estimate and the
//! conditional empirical quantile at level `1 - k/N_x` equals the order
//! statistic `Z^x_(n-k)`. All extreme-value estimators in this crate read
//! only upper order statistics of this sample.

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TransformedSample {
    query: Vec<f64>,
    z_sorted: Vec<f64>,
    n_x: usize,
}

impl Dataset {
    /// Transformed sample at `x`: the ascending multiset of the values
    /// `Y_i·1(X_i ≤ x)` and the count `N_x` of dominated observations.
    /// Independent of the observation order; `N_x` may be 0.
    pub fn transform(&self, x: &[f64]) -> Result<TransformedSample> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        let mut n_x = 0usize;
        let mut z: Vec<f64> = self
            .observations()
            .iter()
            .map(|obs| {
                if obs.inputs().iter().zip(x).all(|(c, q)| c <= q) {
                    n_x += 1;
                    obs.output()
                } else {
                    0.0
                }
            })
            .collect();
        z.sort_unstable_by(f64::total_cmp);
        Ok(TransformedSample {
            query: x.to_vec(),
            z_sorted: z,
            n_x,
        })
    }
}

impl TransformedSample {
    /// Builds a transformed sample from already sorted values. Used to
    /// drive the tail and frontier estimators with synthetic order
    /// statistics. The first `n - n_x` entries must be zero.
    pub fn from_sorted_values(query: Vec<f64>, z_sorted: Vec<f64>, n_x: usize) -> Result<Self> {
        if z_sorted.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if n_x > z_sorted.len() {
            return Err(Error::param(
                "n_x",
                format!("{} exceeds sample size {}", n_x, z_sorted.len()),
            ));
        }
        if z_sorted.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::param(
                "z_sorted",
                "values must be finite and nonnegative",
            ));
        }
        if z_sorted.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("z_sorted", "values must be non-decreasing"));
        }
        let zeros = z_sorted.len() - n_x;
        if z_sorted[..zeros].iter().any(|&v| v != 0.0) {
            return Err(Error::param(
                "z_sorted",
                "the n - n_x entries below the dominated block must be zero",
            ));
        }
        Ok(Self {
            query,
            z_sorted,
            n_x,
        })
    }

    pub fn query(&self) -> &[f64] {
        &self.query
    }

    pub fn z_sorted(&self) -> &[f64] {
        &self.z_sorted
    }

    /// Full sample size `n`.
    pub fn n(&self) -> usize {
        self.z_sorted.len()
    }

    /// Number of observations dominated by the query point.
    pub fn n_x(&self) -> usize {
        self.n_x
    }

    /// The FDH value `max_i Z^x_i`; requires `N_x ≥ 1`.
    pub fn fdh(&self) -> Result<f64> {
        if self.n_x == 0 {
            return Err(Error::EmptyConditioningSet);
        }
        Ok(*self.z_sorted.last().expect("sample is non-empty"))
    }

    /// `Z^x_(n-k)`, the conditional empirical quantile at level
    /// `1 - k/N_x`. `k = 0` gives the FDH value; admissible range is
    /// `0 ≤ k ≤ N_x - 1`.
    pub fn order_stat_quantile(&self, k: usize) -> Result<f64> {
        if self.n_x == 0 {
            return Err(Error::EmptyConditioningSet);
        }
        if k > self.n_x - 1 {
            return Err(Error::KOutOfRange {
                k,
                min: 0,
                max: self.n_x - 1,
            });
        }
        Ok(self.z_sorted[self.n() - k - 1])
    }

    /// `k`-th largest transformed value `Z^x_(n-k+1)`, `1 ≤ k ≤ n`.
    pub fn upper_order_stat(&self, k: usize) -> Result<f64> {
        if k < 1 || k > self.n() {
            return Err(Error::KOutOfRange {
                k,
                min: 1,
                max: self.n(),
            });
        }
        Ok(self.z_sorted[self.n() - k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_splits_dominated_and_not() {
        let ds = Dataset::from_xy(&[(1.0, 3.0), (5.0, 9.0)]).unwrap();
        let ts = ds.transform(&[2.0]).unwrap();
        assert_eq!(ts.z_sorted(), &[0.0, 3.0]);
        assert_eq!(ts.n_x(), 1);
    }

    #[test]
    fn transform_all_dominated_sorts_outputs() {
        let ds = Dataset::from_xy(&[(1.0, 3.0), (2.0, 1.0), (0.5, 2.0)]).unwrap();
        let ts = ds.transform(&[10.0]).unwrap();
        assert_eq!(ts.z_sorted(), &[1.0, 2.0, 3.0]);
        assert_eq!(ts.n_x(), 3);
        assert_eq!(ts.fdh().unwrap(), 3.0);
    }

    #[test]
    fn transform_none_dominated_is_all_zeros() {
        let ds = Dataset::from_xy(&[(1.0, 3.0), (2.0, 1.0)]).unwrap();
        let ts = ds.transform(&[0.1]).unwrap();
        assert_eq!(ts.z_sorted(), &[0.0, 0.0]);
        assert_eq!(ts.n_x(), 0);
        assert_eq!(ts.fdh().unwrap_err(), Error::EmptyConditioningSet);
    }

    #[test]
    fn transform_is_order_independent() {
        let a = Dataset::from_xy(&[(1.0, 2.0), (3.0, 1.0), (2.0, 5.0)]).unwrap();
        let b = Dataset::from_xy(&[(2.0, 5.0), (1.0, 2.0), (3.0, 1.0)]).unwrap();
        let x = [2.5];
        assert_eq!(a.transform(&x).unwrap(), b.transform(&x).unwrap());
    }

    #[test]
    fn order_stat_quantile_indpositions() {
        let ds = Dataset::from_xy(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).unwrap();
        let ts = ds.transform(&[1.0]).unwrap();
        assert_eq!(ts.order_stat_quantile(0).unwrap(), 3.0); // FDH
        assert_eq!(ts.order_stat_quantile(1).unwrap(), 2.0);
        assert_eq!(ts.order_stat_quantile(2).unwrap(), 1.0);
        assert!(matches!(
            ts.order_stat_quantile(3),
            Err(Error::KOutOfRange { .. })
        ));
    }

    #[test]
    fn order_stat_matches_conditional_quantile() {
        let ds = Dataset::from_xy(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).unwrap();
        let ts = ds.transform(&[1.0]).unwrap();
        // k = 1 at level 2/3 must agree exactly
        assert_eq!(
            ts.order_stat_quantile(1).unwrap(),
            ds.conditional_quantile(2.0 / 3.0, &[1.0]).unwrap()
        );
    }

    #[test]
    fn upper_order_stat_is_one_based_from_top() {
        let ts =
            TransformedSample::from_sorted_values(vec![1.0], vec![0.0, 1.0, 2.0, 5.0], 3).unwrap();
        assert_eq!(ts.upper_order_stat(1).unwrap(), 5.0);
        assert_eq!(ts.upper_order_stat(4).unwrap(), 0.0);
        assert!(ts.upper_order_stat(0).is_err());
        assert!(ts.upper_order_stat(5).is_err());
    }

    #[test]
    fn from_sorted_values_validation() {
        assert!(TransformedSample::from_sorted_values(vec![1.0], vec![], 0).is_err());
        assert!(TransformedSample::from_sorted_values(vec![1.0], vec![1.0, 0.5], 2).is_err());
        assert!(TransformedSample::from_sorted_values(vec![1.0], vec![0.5, 1.0], 1).is_err());
        assert!(TransformedSample::from_sorted_values(vec![1.0], vec![0.0, 1.0], 1).is_ok());
    }
}
