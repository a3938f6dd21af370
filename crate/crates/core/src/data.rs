//! Input/output samples and the conditional empirical distribution of the
//! output given dominated inputs.
//!
//! The conditioning event is componentwise dominance `X ≤ x`. Estimation
//! starts from `F̂(y|x) = #{i: X_i ≤ x, Y_i ≤ y} / #{i: X_i ≤ x}` and its
//! quantiles `φ̂_α(x) = inf{y ≥ 0 : F̂(y|x) ≥ α}`.

use crate::error::{Error, Result};

/// A single production unit: `p` nonnegative input quantities and one
/// nonnegative output quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    inputs: Vec<f64>,
    output: f64,
}

impl Observation {
    /// Validates that every coordinate is finite and nonnegative.
    pub fn new(inputs: Vec<f64>, output: f64) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidObservation(
                "at least one input component is required".into(),
            ));
        }
        if inputs.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidObservation(format!(
                "input components must be finite and nonnegative, got {inputs:?}"
            )));
        }
        if !output.is_finite() || output < 0.0 {
            return Err(Error::InvalidObservation(format!(
                "output must be finite and nonnegative, got {output}"
            )));
        }
        Ok(Self { inputs, output })
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn output(&self) -> f64 {
        self.output
    }
}

/// True iff `candidate ≤ x` componentwise, i.e. the query point dominates
/// the candidate input vector. Comparisons are exact: inputs are data, not
/// computed quantities, so no tolerance is applied. Equal components count
/// as dominated.
pub fn dominates(x: &[f64], candidate: &[f64]) -> Result<bool> {
    if x.len() != candidate.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: candidate.len(),
        });
    }
    Ok(candidate.iter().zip(x).all(|(c, q)| c <= q))
}

/// An immutable sample of `n ≥ 1` observations sharing one input dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    observations: Vec<Observation>,
    input_dim: usize,
}

impl Dataset {
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        let Some(first) = observations.first() else {
            return Err(Error::EmptyDataset);
        };
        let input_dim = first.inputs().len();
        for obs in &observations {
            if obs.inputs().len() != input_dim {
                return Err(Error::DimensionMismatch {
                    expected: input_dim,
                    got: obs.inputs().len(),
                });
            }
        }
        Ok(Self {
            observations,
            input_dim,
        })
    }

    /// Convenience constructor for a univariate-input sample.
    pub fn from_xy(pairs: &[(f64, f64)]) -> Result<Self> {
        let obs = pairs
            .iter()
            .map(|&(x, y)| Observation::new(vec![x], y))
            .collect::<Result<Vec<_>>>()?;
        Self::new(obs)
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    /// Always false: a dataset holds at least one observation.
    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    fn check_query(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn dominated_outputs(&self, x: &[f64]) -> Vec<f64> {
        self.observations
            .iter()
            .filter(|obs| obs.inputs().iter().zip(x).all(|(c, q)| c <= q))
            .map(Observation::output)
            .collect()
    }

    /// `F̂_X(x)`: the fraction of observations dominated by `x`. May be 0.
    pub fn empirical_fx(&self, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        let count = self
            .observations
            .iter()
            .filter(|obs| obs.inputs().iter().zip(x).all(|(c, q)| c <= q))
            .count();
        Ok(count as f64 / self.len() as f64)
    }

    /// `F̂(y|x)`: the fraction of dominated observations with output at
    /// most `y`. Requires at least one dominated observation.
    pub fn conditional_cdf(&self, y: f64, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        let dominated = self.dominated_outputs(x);
        if dominated.is_empty() {
            return Err(Error::EmptyConditioningSet);
        }
        let below = dominated.iter().filter(|&&v| v <= y).count();
        Ok(below as f64 / dominated.len() as f64)
    }

    /// The empirical conditional quantile `φ̂_α(x)`: the smallest observed
    /// output with conditional cdf at least `alpha`, realized as the
    /// `⌈alpha·N_x⌉`-th smallest output among dominated observations.
    /// No interpolation is ever applied. `alpha` must lie in (0, 1].
    pub fn conditional_quantile(&self, alpha: f64, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param(
                "alpha",
                format!("must be in (0, 1], got {alpha}"),
            ));
        }
        let mut dominated = self.dominated_outputs(x);
        if dominated.is_empty() {
            return Err(Error::EmptyConditioningSet);
        }
        dominated.sort_unstable_by(f64::total_cmp);
        let idx = quantile_index(alpha, dominated.len());
        Ok(dominated[idx - 1])
    }

    /// Empirical quantile of the observed inputs (univariate inputs
    /// only): the `⌈q·n⌉`-th smallest input value, `q` in (0, 1].
    pub fn input_quantile(&self, q: f64) -> Result<f64> {
        if self.input_dim != 1 {
            return Err(Error::param(
                "q",
                "input quantiles are defined for univariate inputs only",
            ));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::param("q", format!("must be in (0, 1], got {q}")));
        }
        let mut xs: Vec<f64> = self.observations.iter().map(|o| o.inputs()[0]).collect();
        xs.sort_unstable_by(f64::total_cmp);
        Ok(xs[quantile_index(q, xs.len()) - 1])
    }

    /// The FDH frontier value at `x`: the largest output among dominated
    /// observations. Monotone non-decreasing in `x`.
    pub fn fdh(&self, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        self.observations
            .iter()
            .filter(|obs| obs.inputs().iter().zip(x).all(|(c, q)| c <= q))
            .map(Observation::output)
            .max_by(f64::total_cmp)
            .ok_or(Error::EmptyConditioningSet)
    }
}

/// Maps a quantile level to a 1-based order-statistic index in a sample of
/// size `n_x`. Products `alpha·n_x` within rounding error of an integer are
/// snapped to it so that levels of the form `1 - k/n_x` resolve to index
/// `n_x - k` exactly, matching the order-statistic representation.
pub(crate) fn quantile_index(alpha: f64, n_x: usize) -> usize {
    let t = alpha * n_x as f64;
    let nearest = t.round();
    let tol = 16.0 * f64::EPSILON * n_x as f64;
    let idx = if nearest >= 1.0 && (t - nearest).abs() <= tol {
        nearest as usize
    } else {
        t.ceil() as usize
    };
    idx.clamp(1, n_x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_point_ds() -> Dataset {
        Dataset::from_xy(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).unwrap()
    }

    #[test]
    fn dominates_componentwise() {
        assert!(dominates(&[2.0, 2.0], &[1.0, 2.0]).unwrap());
        assert!(!dominates(&[2.0, 2.0], &[3.0, 1.0]).unwrap());
        assert!(dominates(&[2.0, 2.0], &[2.0, 2.0]).unwrap());
    }

    #[test]
    fn dominates_rejects_dimension_mismatch() {
        assert_eq!(
            dominates(&[1.0], &[1.0, 2.0]).unwrap_err(),
            Error::DimensionMismatch {
                expected: 1,
                got: 2
            }
        );
    }

    #[test]
    fn empirical_fx_counts() {
        let ds = Dataset::from_xy(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap();
        assert_eq!(ds.empirical_fx(&[2.0]).unwrap(), 2.0 / 3.0);
        assert_eq!(ds.empirical_fx(&[0.5]).unwrap(), 0.0);
        assert_eq!(ds.empirical_fx(&[10.0]).unwrap(), 1.0);
    }

    #[test]
    fn conditional_cdf_counts() {
        let ds = three_point_ds();
        assert_eq!(ds.conditional_cdf(2.0, &[1.0]).unwrap(), 2.0 / 3.0);
        assert_eq!(ds.conditional_cdf(0.5, &[1.0]).unwrap(), 0.0);
        assert_eq!(ds.conditional_cdf(3.0, &[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn conditional_cdf_requires_mass() {
        let ds = three_point_ds();
        assert_eq!(
            ds.conditional_cdf(1.0, &[0.5]).unwrap_err(),
            Error::EmptyConditioningSet
        );
    }

    #[test]
    fn conditional_quantile_step_function() {
        let ds = three_point_ds();
        assert_eq!(ds.conditional_quantile(0.5, &[1.0]).unwrap(), 2.0);
        assert_eq!(ds.conditional_quantile(1.0, &[1.0]).unwrap(), 3.0);
        assert_eq!(ds.conditional_quantile(1.0 / 3.0, &[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn conditional_quantile_rejects_bad_alpha() {
        let ds = three_point_ds();
        assert!(ds.conditional_quantile(0.0, &[1.0]).is_err());
        assert!(ds.conditional_quantile(1.5, &[1.0]).is_err());
    }

    #[test]
    fn fdh_is_max_over_dominated() {
        let ds = Dataset::from_xy(&[(1.0, 5.0)]).unwrap();
        assert_eq!(ds.fdh(&[1.0]).unwrap(), 5.0);

        let ds = Dataset::from_xy(&[(1.0, 1.0), (2.0, 4.0), (3.0, 2.0)]).unwrap();
        // brute-force max over the dominated subset
        assert_eq!(ds.fdh(&[2.5]).unwrap(), 4.0);
        assert_eq!(ds.fdh(&[0.5]).unwrap_err(), Error::EmptyConditioningSet);
    }

    #[test]
    fn fdh_envelops_sample() {
        let ds = Dataset::from_xy(&[(0.3, 0.2), (0.5, 0.1), (0.9, 0.75), (0.9, 0.4)]).unwrap();
        for obs in ds.observations() {
            assert!(ds.fdh(obs.inputs()).unwrap() >= obs.output());
        }
    }

    #[test]
    fn quantile_index_snaps_grid_levels() {
        // alpha = 1 - k/n computed in floating point must resolve to n - k
        for n in [2usize, 3, 7, 97, 200] {
            for k in 1..n {
                let alpha = 1.0 - k as f64 / n as f64;
                assert_eq!(quantile_index(alpha, n), n - k, "n={n} k={k}");
            }
            assert_eq!(quantile_index(1.0, n), n);
        }
        assert_eq!(quantile_index(1e-12, 5), 1);
    }

    #[test]
    fn observation_validation() {
        assert!(Observation::new(vec![1.0], -0.5).is_err());
        assert!(Observation::new(vec![f64::NAN], 1.0).is_err());
        assert!(Observation::new(vec![], 1.0).is_err());
        assert!(Observation::new(vec![0.0, 2.0], 0.0).is_ok());
    }

    #[test]
    fn dataset_requires_consistent_dims() {
        let obs = vec![
            Observation::new(vec![1.0], 1.0).unwrap(),
            Observation::new(vec![1.0, 2.0], 1.0).unwrap(),
        ];
        assert!(Dataset::new(obs).is_err());
        assert_eq!(Dataset::new(vec![]).unwrap_err(), Error::EmptyDataset);
    }
}
