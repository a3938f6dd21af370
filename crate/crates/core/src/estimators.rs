//! Frontier estimators built from upper order statistics of the
//! transformed sample, with asymptotically normal confidence intervals.
//!
//! Writing `Q_j = Z_(n-j+1)` for the `j`-th largest transformed value:
//!
//! - order-statistic frontier: `Q_(k+1) = Z_(n-k)`, a robust alternative
//!   to the FDH value `Z_(n)` (no normal interval; its limit law is not
//!   Gaussian),
//! - Pickands-corrected endpoint: `Q_k + (Q_k - Q_2k)/(2^(1/ρ̂) - 1)` with
//!   `ρ̂` the Pickands tail-index estimate at the same `k`,
//! - the same correction with a known (or plug-in) tail index `ρ`,
//! - moment-corrected endpoint `Z_(n-k)·(1 + M1·(1 + ρ̃))`,
//! - the known-(ℓ, ρ) corrected endpoint `Q_k + (k/(n·ℓ))^(1/ρ)` with an
//!   exact standard normal pivot,
//! - confidence intervals for high conditional quantiles driven by either
//!   tail estimator.
//!
//! The interval half-widths use the closed-form variances `V1..V5`, always
//! evaluated at the plug-in tail index. Degenerate spacings propagate
//! in-band so threshold sweeps can skip them.

use crate::error::{Error, Result};
use crate::math::two_sided_z;
use crate::tail::{
    moment_rho, moment_sums, pickands_rho, Ci, EstimateFailure, TailEstimatorKind, TailOutcome,
};
use crate::transform::TransformedSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontierKind {
    Fdh,
    OrderStat,
    PickandsStar,
    KnownRhoStar,
    MomentEndpoint,
    ExtremeQuantile,
}

impl std::fmt::Display for FrontierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FrontierKind::Fdh => "fdh",
            FrontierKind::OrderStat => "orderstat",
            FrontierKind::PickandsStar => "pickands-star",
            FrontierKind::KnownRhoStar => "knownrho-star",
            FrontierKind::MomentEndpoint => "moment-endpoint",
            FrontierKind::ExtremeQuantile => "extreme-quantile",
        };
        f.write_str(s)
    }
}

/// Which closed-form variance sits behind a confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceFormulaId {
    V1,
    V2,
    V3,
    V4,
    V5,
    /// Exact standard normal pivot of the known-(ℓ, ρ) estimator.
    KnownEll,
}

impl std::fmt::Display for VarianceFormulaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            VarianceFormulaId::V1 => "V1",
            VarianceFormulaId::V2 => "V2",
            VarianceFormulaId::V3 => "V3",
            VarianceFormulaId::V4 => "V4",
            VarianceFormulaId::V5 => "V5",
            VarianceFormulaId::KnownEll => "known-ell",
        };
        f.write_str(s)
    }
}

/// Confidence interval together with the variance formula that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierCi {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub formula: VarianceFormulaId,
}

impl FrontierCi {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn as_ci(&self) -> Ci {
        Ci {
            lo: self.lo,
            hi: self.hi,
            level: self.level,
        }
    }
}

/// Result of a frontier estimation at a query point.
///
/// A flagged degeneracy leaves `failure` set; `value` may still carry the
/// uncorrected point estimate when one is meaningful (known-ρ estimator
/// with zero spacing). Hard errors are reserved for precondition
/// violations such as `k` out of range or an empty conditioning set.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierEstimate {
    pub kind: FrontierKind,
    pub x: Vec<f64>,
    pub k: usize,
    pub rho_used: Option<f64>,
    pub value: Option<f64>,
    pub ci: Option<FrontierCi>,
    pub failure: Option<EstimateFailure>,
}

impl FrontierEstimate {
    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }

    fn failed(kind: FrontierKind, ts: &TransformedSample, k: usize, f: EstimateFailure) -> Self {
        FrontierEstimate {
            kind,
            x: ts.query().to_vec(),
            k,
            rho_used: None,
            value: None,
            ci: None,
            failure: Some(f),
        }
    }
}

/// The FDH value as a frontier estimate (no confidence interval).
pub fn fdh_frontier(ts: &TransformedSample) -> Result<FrontierEstimate> {
    Ok(FrontierEstimate {
        kind: FrontierKind::Fdh,
        x: ts.query().to_vec(),
        k: 0,
        rho_used: None,
        value: Some(ts.fdh()?),
        ci: None,
        failure: None,
    })
}

/// Order-statistic frontier `Z_(n-k)`: leaves the top `k` points outside,
/// trading envelopment for robustness. `k = 0` recovers the FDH value.
pub fn robust_frontier(ts: &TransformedSample, k: usize) -> Result<FrontierEstimate> {
    Ok(FrontierEstimate {
        kind: FrontierKind::OrderStat,
        x: ts.query().to_vec(),
        k,
        rho_used: None,
        value: Some(ts.order_stat_quantile(k)?),
        ci: None,
        failure: None,
    })
}

/// Endpoint estimate with simultaneous Pickands tail-index estimation:
/// `Q_k + (Q_k - Q_2k)/(2^(1/ρ̂) - 1)`, interval half-width
/// `z·√V2(ρ̂)·(Q_k - Q_2k)/√(2k)`.
pub fn pickands_star(ts: &TransformedSample, k: usize, level: f64) -> Result<FrontierEstimate> {
    let z = two_sided_z(level)?;
    let rho_est = pickands_rho(ts, k)?;
    let rho = match rho_est.outcome {
        TailOutcome::Estimate { rho, .. } => rho,
        TailOutcome::Failed(f) => {
            return Ok(FrontierEstimate::failed(
                FrontierKind::PickandsStar,
                ts,
                k,
                f,
            ))
        }
    };
    let q_k = ts.upper_order_stat(k)?;
    let q_2k = ts.upper_order_stat(2 * k)?;
    let spacing = q_k - q_2k;
    let value = q_k + spacing / (2f64.powf(1.0 / rho) - 1.0);
    let half = z * v2(rho)?.sqrt() * spacing / (2.0 * k as f64).sqrt();
    Ok(FrontierEstimate {
        kind: FrontierKind::PickandsStar,
        x: ts.query().to_vec(),
        k,
        rho_used: Some(rho),
        value: Some(value),
        ci: Some(FrontierCi {
            lo: value - half,
            hi: value + half,
            level,
            formula: VarianceFormulaId::V2,
        }),
        failure: None,
    })
}

/// Endpoint estimate with a known (or plug-in) tail index:
/// `Q_k + (Q_k - Q_2k)/(2^(1/ρ) - 1)`, interval half-width
/// `z·√V3(ρ)·(Q_k - Q_2k)/√(2k)`.
///
/// A zero spacing still returns the point estimate `Q_k` but flags the
/// result; a zero-width interval would be spurious.
pub fn known_rho_star(
    ts: &TransformedSample,
    k: usize,
    rho: f64,
    level: f64,
) -> Result<FrontierEstimate> {
    let z = two_sided_z(level)?;
    check_positive("rho", rho)?;
    if ts.n_x() == 0 {
        return Err(Error::EmptyConditioningSet);
    }
    let max_k = ts.n_x().div_ceil(2).min(ts.n() / 2);
    if k < 1 || k > max_k {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: max_k,
        });
    }
    let q_k = ts.upper_order_stat(k)?;
    let q_2k = ts.upper_order_stat(2 * k)?;
    let spacing = q_k - q_2k;
    if spacing <= 0.0 {
        return Ok(FrontierEstimate {
            kind: FrontierKind::KnownRhoStar,
            x: ts.query().to_vec(),
            k,
            rho_used: Some(rho),
            value: Some(q_k),
            ci: None,
            failure: Some(EstimateFailure::DegenerateSpacings),
        });
    }
    let value = q_k + spacing / (2f64.powf(1.0 / rho) - 1.0);
    let half = z * v3(rho)?.sqrt() * spacing / (2.0 * k as f64).sqrt();
    Ok(FrontierEstimate {
        kind: FrontierKind::KnownRhoStar,
        x: ts.query().to_vec(),
        k,
        rho_used: Some(rho),
        value: Some(value),
        ci: Some(FrontierCi {
            lo: value - half,
            hi: value + half,
            level,
            formula: VarianceFormulaId::V3,
        }),
        failure: None,
    })
}

/// Moment endpoint estimate `Z_(n-k)·(1 + M1·(1 + ρ̃))`, interval
/// half-width `z·√V5(ρ̃)·M1·(1 + 1/ρ̃)·Z_(n-k)/√k`. Tail-index failures
/// propagate in-band.
pub fn moment_endpoint(ts: &TransformedSample, k: usize, level: f64) -> Result<FrontierEstimate> {
    let z = two_sided_z(level)?;
    let rho_est = moment_rho(ts, k)?;
    let rho = match rho_est.outcome {
        TailOutcome::Estimate { rho, .. } => rho,
        TailOutcome::Failed(f) => {
            return Ok(FrontierEstimate::failed(
                FrontierKind::MomentEndpoint,
                ts,
                k,
                f,
            ))
        }
    };
    let sums = moment_sums(ts, k)?;
    let threshold = ts.order_stat_quantile(k)?;
    let value = threshold * (1.0 + sums.m1 * (1.0 + rho));
    let half = z * v5(rho)?.sqrt() * sums.m1 * (1.0 + 1.0 / rho) * threshold / (k as f64).sqrt();
    Ok(FrontierEstimate {
        kind: FrontierKind::MomentEndpoint,
        x: ts.query().to_vec(),
        k,
        rho_used: Some(rho),
        value: Some(value),
        ci: Some(FrontierCi {
            lo: value - half,
            hi: value + half,
            level,
            formula: VarianceFormulaId::V5,
        }),
        failure: None,
    })
}

/// Endpoint estimate and exact-pivot interval when both the tail index and
/// the tail constant `ℓ` are known: `Q_k + (k/(n·ℓ))^(1/ρ)` with interval
/// half-width `z·(k/(n·ℓ))^(1/ρ)/(ρ·√k)`.
///
/// `n` here is the full sample size, not the dominated count: the pivot's
/// normalization absorbs the conditioning mass through `ℓ`.
pub fn known_ell_ci(
    ts: &TransformedSample,
    k: usize,
    rho: f64,
    ell: f64,
    level: f64,
) -> Result<FrontierEstimate> {
    let z = two_sided_z(level)?;
    check_positive("rho", rho)?;
    check_positive("ell", ell)?;
    if ts.n_x() == 0 {
        return Err(Error::EmptyConditioningSet);
    }
    if k < 1 || k > ts.n_x() {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: ts.n_x(),
        });
    }
    let q_k = ts.upper_order_stat(k)?;
    let correction = (k as f64 / (ts.n() as f64 * ell)).powf(1.0 / rho);
    let value = q_k + correction;
    let half = z * correction / (rho * (k as f64).sqrt());
    Ok(FrontierEstimate {
        kind: FrontierKind::KnownRhoStar,
        x: ts.query().to_vec(),
        k,
        rho_used: Some(rho),
        value: Some(value),
        ci: Some(FrontierCi {
            lo: value - half,
            hi: value + half,
            level,
            formula: VarianceFormulaId::KnownEll,
        }),
        failure: None,
    })
}

/// Confidence interval for the high conditional quantile at tail
/// probability `p_n`, centered at `Q_k` with `k = ⌊n·p_n⌋` and half-width
/// `z·√V1(ρ̂)·(Q_k - Q_2k)/√(2k)`; `ρ̂` is the Pickands estimate at the
/// same `k`.
pub fn extreme_quantile_ci_pickands(
    ts: &TransformedSample,
    p_n: f64,
    level: f64,
) -> Result<FrontierEstimate> {
    let z = two_sided_z(level)?;
    let k = quantile_threshold(ts, p_n)?;
    let rho_est = pickands_rho(ts, k)?;
    let rho = match rho_est.outcome {
        TailOutcome::Estimate { rho, .. } => rho,
        TailOutcome::Failed(f) => {
            return Ok(FrontierEstimate::failed(
                FrontierKind::ExtremeQuantile,
                ts,
                k,
                f,
            ))
        }
    };
    let q_k = ts.upper_order_stat(k)?;
    let q_2k = ts.upper_order_stat(2 * k)?;
    let half = z * v1(rho)?.sqrt() * (q_k - q_2k) / (2.0 * k as f64).sqrt();
    Ok(FrontierEstimate {
        kind: FrontierKind::ExtremeQuantile,
        x: ts.query().to_vec(),
        k,
        rho_used: Some(rho),
        value: Some(q_k),
        ci: Some(FrontierCi {
            lo: q_k - half,
            hi: q_k + half,
            level,
            formula: VarianceFormulaId::V1,
        }),
        failure: None,
    })
}

/// Confidence interval for the high conditional quantile at tail
/// probability `p_n`, centered at `Z_(n-k)` with `k = ⌊n·p_n⌋` and
/// half-width `z·√V4(ρ̃)·M1·Z_(n-k)/√k`; `ρ̃` is the moment estimate at
/// the same `k`. All top-order ties make `M1 = 0`; the would-be zero-width
/// interval is flagged through the tail-index failure.
pub fn extreme_quantile_ci_moment(
    ts: &TransformedSample,
    p_n: f64,
    level: f64,
) -> Result<FrontierEstimate> {
    let z = two_sided_z(level)?;
    let k = quantile_threshold(ts, p_n)?;
    let rho_est = moment_rho(ts, k)?;
    let rho = match rho_est.outcome {
        TailOutcome::Estimate { rho, .. } => rho,
        TailOutcome::Failed(f) => {
            return Ok(FrontierEstimate::failed(
                FrontierKind::ExtremeQuantile,
                ts,
                k,
                f,
            ))
        }
    };
    let sums = moment_sums(ts, k)?;
    let center = ts.order_stat_quantile(k)?;
    let half = z * v4(rho)?.sqrt() * sums.m1 * center / (k as f64).sqrt();
    Ok(FrontierEstimate {
        kind: FrontierKind::ExtremeQuantile,
        x: ts.query().to_vec(),
        k,
        rho_used: Some(rho),
        value: Some(center),
        ci: Some(FrontierCi {
            lo: center - half,
            hi: center + half,
            level,
            formula: VarianceFormulaId::V4,
        }),
        failure: None,
    })
}

fn quantile_threshold(ts: &TransformedSample, p_n: f64) -> Result<usize> {
    if !(p_n > 0.0 && p_n < 1.0) || !p_n.is_finite() {
        return Err(Error::param("p_n", format!("must be in (0, 1), got {p_n}")));
    }
    let k = (ts.n() as f64 * p_n).floor() as usize;
    if k < 1 {
        return Err(Error::param(
            "p_n",
            format!(
                "floor(n*p_n) = 0 at n = {}: tail probability too small",
                ts.n()
            ),
        ));
    }
    Ok(k)
}

/// Two-step estimator: first estimate the tail index at `k_rho` with the
/// chosen estimator, then evaluate the known-ρ endpoint at `k_front` as if
/// that value were the true index (its interval uses `V3` at the plug-in
/// value). First-stage failures propagate in-band.
pub fn two_step_known_rho(
    ts: &TransformedSample,
    k_rho: usize,
    k_front: usize,
    rho_source: TailEstimatorKind,
    level: f64,
) -> Result<FrontierEstimate> {
    let rho_est = match rho_source {
        TailEstimatorKind::Pickands => pickands_rho(ts, k_rho)?,
        TailEstimatorKind::Moment => moment_rho(ts, k_rho)?,
    };
    match rho_est.outcome {
        TailOutcome::Estimate { rho, .. } => known_rho_star(ts, k_front, rho, level),
        TailOutcome::Failed(f) => Ok(FrontierEstimate::failed(
            FrontierKind::KnownRhoStar,
            ts,
            k_front,
            f,
        )),
    }
}

/// `V1(ρ) = ρ^(-2)·2^(1-2/ρ)/(2^(-1/ρ) - 1)²`: high-quantile interval with
/// Pickands spacings.
pub fn v1(rho: f64) -> Result<f64> {
    check_positive("rho", rho)?;
    let d = 2f64.powf(-1.0 / rho) - 1.0;
    Ok(2f64.powf(1.0 - 2.0 / rho) / (rho * rho * d * d))
}

/// `V2(ρ) = 3ρ^(-2)·2^(-1-2/ρ)/(2^(-1/ρ) - 1)^6`: endpoint interval with
/// estimated tail index.
pub fn v2(rho: f64) -> Result<f64> {
    check_positive("rho", rho)?;
    let d = 2f64.powf(-1.0 / rho) - 1.0;
    Ok(3.0 * 2f64.powf(-1.0 - 2.0 / rho) / (rho * rho * d.powi(6)))
}

/// `V3(ρ) = ρ^(-2)·2^(-2/ρ)/(2^(-1/ρ) - 1)^4`: endpoint interval with
/// known tail index.
pub fn v3(rho: f64) -> Result<f64> {
    check_positive("rho", rho)?;
    let d = 2f64.powf(-1.0 / rho) - 1.0;
    Ok(2f64.powf(-2.0 / rho) / (rho * rho * d.powi(4)))
}

/// `V4(ρ) = (1 + 1/ρ)²`: high-quantile interval with moment spacings.
pub fn v4(rho: f64) -> Result<f64> {
    check_positive("rho", rho)?;
    let t = 1.0 + 1.0 / rho;
    Ok(t * t)
}

/// `V5(ρ) = ρ²·[ρ/(2+ρ) + ρ(2+ρ)·{…} - 4ρ/(3+ρ)]` with the same brace as
/// the moment tail-index variance: moment endpoint interval.
pub fn v5(rho: f64) -> Result<f64> {
    check_positive("rho", rho)?;
    let brace = crate::tail::moment_brace(rho);
    Ok(rho * rho * (rho / (2.0 + rho) + rho * (2.0 + rho) * brace - 4.0 * rho / (3.0 + rho)))
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::param(name, format!("must be positive, got {v}")));
    }
    Ok(())
}
