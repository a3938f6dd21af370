//! Conditional tail index estimation from upper order statistics of the
//! transformed sample.
//!
//! Two estimators of the exponent `ρ_x > 0` of regular variation of the
//! conditional distribution near its right endpoint:
//!
//! - the Pickands-type estimator, built from the three order statistics
//!   `Z_(n-k+1)`, `Z_(n-2k+1)`, `Z_(n-4k+1)`,
//! - the moment-type estimator, built from the first two empirical moments
//!   of the top-`k` log-spacings.
//!
//! Both are asymptotically normal after `√k` scaling; the closed-form
//! asymptotic variances live here as well. Ties among the top order
//! statistics (or nonpositive finite-sample estimates) are reported
//! in-band as [`EstimateFailure`] rather than as errors, so that threshold
//! sweeps can skip them.

use crate::error::{Error, Result};
use crate::math::two_sided_z;
use crate::transform::TransformedSample;

/// Degenerate outcomes of a tail or frontier estimation at a given `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateFailure {
    /// Ties among the order statistics used: a spacing or log-moment is
    /// zero and the estimator is undefined.
    DegenerateSpacings,
    /// The closed form evaluated to a value outside (0, ∞); the raw value
    /// is attached as a diagnostic.
    NonpositiveEstimate(f64),
}

impl std::fmt::Display for EstimateFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimateFailure::DegenerateSpacings => write!(f, "degenerate spacings"),
            EstimateFailure::NonpositiveEstimate(raw) => {
                write!(f, "nonpositive estimate ({raw})")
            }
        }
    }
}

/// Two-sided confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ci {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

impl Ci {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailEstimatorKind {
    Pickands,
    Moment,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TailOutcome {
    Estimate {
        rho: f64,
        /// Asymptotic variance of `√k(ρ̂ - ρ)`, evaluated at the estimate.
        variance: f64,
        ci: Option<Ci>,
    },
    Failed(EstimateFailure),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailIndexEstimate {
    pub kind: TailEstimatorKind,
    /// Threshold used: number of top spacings (moment) or spacing scale
    /// (Pickands).
    pub k: usize,
    pub outcome: TailOutcome,
}

impl TailIndexEstimate {
    pub fn rho(&self) -> Option<f64> {
        match &self.outcome {
            TailOutcome::Estimate { rho, .. } => Some(*rho),
            TailOutcome::Failed(_) => None,
        }
    }

    pub fn variance(&self) -> Option<f64> {
        match &self.outcome {
            TailOutcome::Estimate { variance, .. } => Some(*variance),
            TailOutcome::Failed(_) => None,
        }
    }

    pub fn ci(&self) -> Option<Ci> {
        match &self.outcome {
            TailOutcome::Estimate { ci, .. } => *ci,
            TailOutcome::Failed(_) => None,
        }
    }

    pub fn failure(&self) -> Option<EstimateFailure> {
        match &self.outcome {
            TailOutcome::Estimate { .. } => None,
            TailOutcome::Failed(f) => Some(*f),
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.outcome, TailOutcome::Failed(_))
    }

    /// Copy of this estimate with a plug-in confidence interval attached:
    /// `ρ̂ ± z_(1+level)/2 · √(variance(ρ̂)/k)`. A failed estimate is
    /// returned unchanged.
    pub fn with_ci(&self, level: f64) -> Result<TailIndexEstimate> {
        let mut out = self.clone();
        if let TailOutcome::Estimate { rho, variance, ci } = &mut out.outcome {
            let z = two_sided_z(level)?;
            let half = z * (*variance / self.k as f64).sqrt();
            *ci = Some(Ci {
                lo: *rho - half,
                hi: *rho + half,
                level,
            });
        } else {
            // validate the level even when propagating a failure
            two_sided_z(level)?;
        }
        Ok(out)
    }
}

/// Largest admissible Pickands `k` for a transformed sample: all three
/// order statistics `Z_(n-k+1)`, `Z_(n-2k+1)`, `Z_(n-4k+1)` must exist in
/// the dominated block, i.e. `4k - 1 ≤ N_x` and `4k ≤ n`.
pub(crate) fn pickands_max_k(n: usize, n_x: usize) -> usize {
    ((n_x + 1) / 4).min(n / 4)
}

/// Pickands-type estimate of the conditional tail index at threshold `k`:
///
/// `ρ̂ = log 2 / log{(Q_2k - Q_4k)/(Q_k - Q_2k)}`, `Q_j = Z_(n-j+1)`.
///
/// Zero spacings or a unit spacing ratio yield an in-band
/// `DegenerateSpacings`; a finite nonpositive value is reported as
/// `NonpositiveEstimate` with the raw value attached.
pub fn pickands_rho(ts: &TransformedSample, k: usize) -> Result<TailIndexEstimate> {
    if ts.n_x() == 0 {
        return Err(Error::EmptyConditioningSet);
    }
    let max_k = pickands_max_k(ts.n(), ts.n_x());
    if k < 1 || k > max_k {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: max_k,
        });
    }
    let q_k = ts.upper_order_stat(k)?;
    let q_2k = ts.upper_order_stat(2 * k)?;
    let q_4k = ts.upper_order_stat(4 * k)?;

    let num = q_k - q_2k;
    let den = q_2k - q_4k;
    let outcome = if num <= 0.0 || den <= 0.0 {
        TailOutcome::Failed(EstimateFailure::DegenerateSpacings)
    } else {
        let ratio = den / num;
        if ratio == 1.0 {
            TailOutcome::Failed(EstimateFailure::DegenerateSpacings)
        } else {
            let rho = std::f64::consts::LN_2 / ratio.ln();
            if !rho.is_finite() || rho <= 0.0 {
                TailOutcome::Failed(EstimateFailure::NonpositiveEstimate(rho))
            } else {
                TailOutcome::Estimate {
                    rho,
                    variance: pickands_variance(rho)?,
                    ci: None,
                }
            }
        }
    };
    Ok(TailIndexEstimate {
        kind: TailEstimatorKind::Pickands,
        k,
        outcome,
    })
}

/// Asymptotic variance of `√k(ρ̂ - ρ)` for the Pickands-type estimator:
/// `ρ²(2^(1-2/ρ) + 1) / {(2^(-1/ρ) - 1)·log 4}²`.
pub fn pickands_variance(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let num = rho * rho * (2f64.powf(1.0 - 2.0 / rho) + 1.0);
    let den = (2f64.powf(-1.0 / rho) - 1.0) * 4f64.ln();
    Ok(num / (den * den))
}

/// First two empirical moments of the top-`k` log-spacings relative to
/// `Z_(n-k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSums {
    pub m1: f64,
    pub m2: f64,
    pub k: usize,
}

/// `M^(j) = (1/k) Σ_{i=0}^{k-1} (log Z_(n-i) - log Z_(n-k))^j`, `j = 1, 2`.
/// Requires `1 ≤ k ≤ N_x - 1` and a strictly positive threshold value
/// `Z_(n-k)`.
pub fn moment_sums(ts: &TransformedSample, k: usize) -> Result<MomentSums> {
    if ts.n_x() == 0 {
        return Err(Error::EmptyConditioningSet);
    }
    if k < 1 || k > ts.n_x() - 1 {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: ts.n_x().saturating_sub(1),
        });
    }
    let threshold = ts.order_stat_quantile(k)?;
    if threshold <= 0.0 {
        return Err(Error::NonpositiveThresholdValue {
            k,
            value: threshold,
        });
    }
    let log_thr = threshold.ln();
    let z = ts.z_sorted();
    let n = z.len();
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for i in 0..k {
        let d = z[n - 1 - i].ln() - log_thr;
        m1 += d;
        m2 += d * d;
    }
    Ok(MomentSums {
        m1: m1 / k as f64,
        m2: m2 / k as f64,
        k,
    })
}

/// Moment-type estimate of the conditional tail index at threshold `k`:
///
/// `ρ̃ = -{M1 + 1 - (1/2)·[1 - M1²/M2]^(-1)}^(-1)`.
///
/// `M2 = 0`, `M1²/M2 = 1` and a zero outer brace are degenerate; finite
/// nonpositive values of `ρ̃` are reported as `NonpositiveEstimate`.
pub fn moment_rho(ts: &TransformedSample, k: usize) -> Result<TailIndexEstimate> {
    let sums = moment_sums(ts, k)?;
    let outcome = moment_rho_from_sums(&sums);
    Ok(TailIndexEstimate {
        kind: TailEstimatorKind::Moment,
        k,
        outcome,
    })
}

fn moment_rho_from_sums(sums: &MomentSums) -> TailOutcome {
    if sums.m2 == 0.0 {
        return TailOutcome::Failed(EstimateFailure::DegenerateSpacings);
    }
    let ratio = sums.m1 * sums.m1 / sums.m2;
    if ratio == 1.0 {
        return TailOutcome::Failed(EstimateFailure::DegenerateSpacings);
    }
    let brace = sums.m1 + 1.0 - 0.5 / (1.0 - ratio);
    if brace == 0.0 {
        return TailOutcome::Failed(EstimateFailure::DegenerateSpacings);
    }
    let rho = -1.0 / brace;
    if !rho.is_finite() || rho <= 0.0 {
        return TailOutcome::Failed(EstimateFailure::NonpositiveEstimate(rho));
    }
    match moment_variance(rho) {
        Ok(variance) => TailOutcome::Estimate {
            rho,
            variance,
            ci: None,
        },
        Err(_) => TailOutcome::Failed(EstimateFailure::NonpositiveEstimate(rho)),
    }
}

/// Asymptotic variance of `√k(ρ̃ - ρ)` for the moment-type estimator:
/// `ρ(2+ρ)(1+ρ)²·{4 - 8(2+ρ)/(3+ρ) + (11+5ρ)(2+ρ)/((3+ρ)(4+ρ))}`.
pub fn moment_variance(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(rho * (2.0 + rho) * (1.0 + rho) * (1.0 + rho) * moment_brace(rho))
}

pub(crate) fn moment_brace(rho: f64) -> f64 {
    4.0 - 8.0 * (2.0 + rho) / (3.0 + rho)
        + (11.0 + 5.0 * rho) * (2.0 + rho) / ((3.0 + rho) * (4.0 + rho))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::param("rho", format!("must be positive, got {rho}")));
    }
    Ok(())
}

/// Plug-in confidence interval for the tail index:
/// `ρ̂ ± z_(1+level)/2 · √(variance(ρ̂)/k)`, variance evaluated at the
/// estimated value. Returns `None` when the estimate is flagged.
pub fn rho_confidence_interval(est: &TailIndexEstimate, level: f64) -> Result<Option<Ci>> {
    Ok(est.with_ci(level)?.ci())
}

/// One point of the Pickands stability plot.
#[derive(Debug, Clone, PartialEq)]
pub struct PickandsPlotPoint {
    pub k: usize,
    pub outcome: std::result::Result<f64, EstimateFailure>,
}

/// Pickands estimates for every `k` with `1 ≤ k < N_x/4`, in increasing
/// `k` order. Per-`k` degeneracies are in-band; requires `N_x ≥ 5` so at
/// least one `k` is admissible.
pub fn pickands_plot(ts: &TransformedSample) -> Result<Vec<PickandsPlotPoint>> {
    if ts.n_x() < 5 {
        return Err(Error::InsufficientSample {
            needed: 5,
            got: ts.n_x(),
        });
    }
    let k_max = (ts.n_x() - 1) / 4; // largest k with 4k < N_x
    let mut points = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let est = pickands_rho(ts, k)?;
        let outcome = match est.outcome {
            TailOutcome::Estimate { rho, .. } => Ok(rho),
            TailOutcome::Failed(f) => Err(f),
        };
        points.push(PickandsPlotPoint { k, outcome });
    }
    Ok(points)
}
