//! Monte Carlo harness: replicate a scenario, evaluate estimators over
//! query points and threshold policies, and aggregate bias, MSE, average
//! confidence-interval length and empirical coverage against the
//! scenario's exact ground truth.
//!
//! Replications run on independent seed-derived streams and may execute
//! in parallel; aggregation is an index-ordered reduction, so reports are
//! bit-for-bit reproducible for a given configuration regardless of the
//! degree of parallelism. Replications where an estimator fails
//! (degenerate spacings, nonpositive estimates, insufficient stable
//! range) are excluded from the four statistics and surfaced through
//! `failure_rate`.

use crate::error::{Error, Result};
use crate::estimators::{
    extreme_quantile_ci_moment, extreme_quantile_ci_pickands, fdh_frontier, known_ell_ci,
    known_rho_star, moment_endpoint, pickands_star, robust_frontier, two_step_known_rho,
};
use crate::math::gamma;
use crate::select::{select_k_frontier, select_k_moment_rho, select_k_pickands_rho};
use crate::simgen::{derive_seed, GroundTruth, Scenario, ScenarioKind};
use crate::tail::{moment_rho, pickands_rho, TailEstimatorKind};
use crate::transform::TransformedSample;
use rayon::prelude::*;

/// How the threshold is chosen per replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KPolicy {
    /// The same `k` in every replication.
    Fixed(usize),
    /// Position `j ≥ 1` on the estimator family's grid, realized per
    /// replication from the observed dominated count: Pickands-family
    /// estimators use `k = ⌊N_x/4⌋ - j + 1`, moment-family estimators use
    /// `k = N_x - j`, and order-statistic or known-(ℓ, ρ) estimators use
    /// `k = j` directly.
    GridIndex(usize),
    /// Data-driven stability selection per replication.
    Auto,
}

impl std::fmt::Display for KPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KPolicy::Fixed(k) => write!(f, "{k}"),
            KPolicy::GridIndex(j) => write!(f, "grid:{j}"),
            KPolicy::Auto => write!(f, "auto"),
        }
    }
}

impl KPolicy {
    pub fn parse(s: &str) -> Result<KPolicy> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(KPolicy::Auto);
        }
        if let Some(j) = s.strip_prefix("grid:") {
            let j: usize = j
                .parse()
                .map_err(|_| Error::param("k", format!("bad grid index in {s:?}")))?;
            if j == 0 {
                return Err(Error::param("k", "grid index must be at least 1"));
            }
            return Ok(KPolicy::GridIndex(j));
        }
        let k: usize = s.parse().map_err(|_| {
            Error::param(
                "k",
                format!("expected auto, grid:<j> or an integer, got {s:?}"),
            )
        })?;
        Ok(KPolicy::Fixed(k))
    }
}

/// An estimator to run in the experiment, with its threshold policy.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSpec {
    Fdh,
    OrderStat {
        k: KPolicy,
    },
    PickandsStar {
        k: KPolicy,
    },
    KnownRhoStar {
        rho: f64,
        k: KPolicy,
    },
    MomentEndpoint {
        k: KPolicy,
    },
    PickandsRho {
        k: KPolicy,
    },
    MomentRho {
        k: KPolicy,
    },
    KnownEll {
        rho: f64,
        ell: f64,
        k: KPolicy,
    },
    ExtremeQuantilePickands {
        p_n: f64,
    },
    ExtremeQuantileMoment {
        p_n: f64,
    },
    TwoStepKnownRho {
        source: TailEstimatorKind,
        k_rho: KPolicy,
        k_front: KPolicy,
    },
}

impl EstimatorSpec {
    /// Parses an estimator token as used by the command line:
    /// `fdh`, `robust`, `pickands`, `knownrho:<rho>`, `moment`,
    /// `rho-pickands`, `rho-moment`, `knownell:<rho>,<ell>`,
    /// `quantile-pickands:<p>`, `quantile-moment:<p>`,
    /// `twostep-pickands`, `twostep-moment`. `default_k` supplies the
    /// threshold policy for tokens that take one.
    pub fn parse(token: &str, default_k: KPolicy) -> Result<EstimatorSpec> {
        let token = token.trim();
        let (head, arg) = match token.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (token, None),
        };
        let bad = |reason: String| Error::param("estimators", reason);
        let parse_f64 = |what: &str, s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("bad {what} in estimator token {token:?}")))
        };
        match head {
            "fdh" => Ok(EstimatorSpec::Fdh),
            "robust" => Ok(EstimatorSpec::OrderStat { k: default_k }),
            "pickands" => Ok(EstimatorSpec::PickandsStar { k: default_k }),
            "moment" => Ok(EstimatorSpec::MomentEndpoint { k: default_k }),
            "rho-pickands" => Ok(EstimatorSpec::PickandsRho { k: default_k }),
            "rho-moment" => Ok(EstimatorSpec::MomentRho { k: default_k }),
            "knownrho" => {
                let arg = arg
                    .ok_or_else(|| bad(format!("{token:?} needs a tail index, e.g. knownrho:2")))?;
                let rho = parse_f64("tail index", arg)?;
                Ok(EstimatorSpec::KnownRhoStar { rho, k: default_k })
            }
            "knownell" => {
                let arg =
                    arg.ok_or_else(|| bad(format!("{token:?} needs knownell:<rho>;<ell>")))?;
                let (r, e) = arg
                    .split_once(';')
                    .ok_or_else(|| bad(format!("{token:?} needs knownell:<rho>;<ell>")))?;
                Ok(EstimatorSpec::KnownEll {
                    rho: parse_f64("tail index", r)?,
                    ell: parse_f64("tail constant", e)?,
                    k: default_k,
                })
            }
            "quantile-pickands" => {
                let arg = arg.ok_or_else(|| bad(format!("{token:?} needs a tail probability")))?;
                Ok(EstimatorSpec::ExtremeQuantilePickands {
                    p_n: parse_f64("tail probability", arg)?,
                })
            }
            "quantile-moment" => {
                let arg = arg.ok_or_else(|| bad(format!("{token:?} needs a tail probability")))?;
                Ok(EstimatorSpec::ExtremeQuantileMoment {
                    p_n: parse_f64("tail probability", arg)?,
                })
            }
            "twostep-pickands" => Ok(EstimatorSpec::TwoStepKnownRho {
                source: TailEstimatorKind::Pickands,
                k_rho: KPolicy::Auto,
                k_front: default_k,
            }),
            "twostep-moment" => Ok(EstimatorSpec::TwoStepKnownRho {
                source: TailEstimatorKind::Moment,
                k_rho: KPolicy::Auto,
                k_front: default_k,
            }),
            other => Err(bad(format!("unknown estimator {other:?}"))),
        }
    }

    /// Stable label used in reports and output files.
    pub fn label(&self) -> String {
        match self {
            EstimatorSpec::Fdh => "fdh".into(),
            EstimatorSpec::OrderStat { k } => format!("robust[k={k}]"),
            EstimatorSpec::PickandsStar { k } => format!("pickands[k={k}]"),
            EstimatorSpec::KnownRhoStar { rho, k } => format!("knownrho:{rho}[k={k}]"),
            EstimatorSpec::MomentEndpoint { k } => format!("moment[k={k}]"),
            EstimatorSpec::PickandsRho { k } => format!("rho-pickands[k={k}]"),
            EstimatorSpec::MomentRho { k } => format!("rho-moment[k={k}]"),
            EstimatorSpec::KnownEll { rho, ell, k } => format!("knownell:{rho};{ell}[k={k}]"),
            EstimatorSpec::ExtremeQuantilePickands { p_n } => format!("quantile-pickands:{p_n}"),
            EstimatorSpec::ExtremeQuantileMoment { p_n } => format!("quantile-moment:{p_n}"),
            EstimatorSpec::TwoStepKnownRho {
                source,
                k_rho,
                k_front,
            } => {
                let src = match source {
                    TailEstimatorKind::Pickands => "pickands",
                    TailEstimatorKind::Moment => "moment",
                };
                format!("twostep-{src}[k_rho={k_rho};k={k_front}]")
            }
        }
    }

    /// Whether the target of this estimator is the tail index rather than
    /// a frontier or quantile value.
    fn targets_rho(&self) -> bool {
        matches!(
            self,
            EstimatorSpec::PickandsRho { .. } | EstimatorSpec::MomentRho { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioKind,
    pub sample_size: usize,
    pub replications: usize,
    pub query_points: Vec<f64>,
    pub estimators: Vec<EstimatorSpec>,
    pub ci_level: f64,
    pub base_seed: u64,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.sample_size < 1 {
            return Err(Error::param("n", "sample size must be at least 1"));
        }
        if self.replications < 1 {
            return Err(Error::param("reps", "need at least one replication"));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::param(
                "level",
                format!("must be in (0, 1), got {}", self.ci_level),
            ));
        }
        if self.query_points.is_empty() {
            return Err(Error::param("x", "need at least one query point"));
        }
        if self.estimators.is_empty() {
            return Err(Error::param("estimators", "need at least one estimator"));
        }
        let gt = GroundTruth::new(self.scenario);
        for &x in &self.query_points {
            if !gt.in_support(x) || gt.fx(x) <= 0.0 {
                return Err(Error::param(
                    "x",
                    format!("query point {x} has no conditioning mass in this scenario"),
                ));
            }
            for spec in &self.estimators {
                if let EstimatorSpec::ExtremeQuantilePickands { p_n }
                | EstimatorSpec::ExtremeQuantileMoment { p_n } = spec
                {
                    if !(*p_n > 0.0 && *p_n < gt.fx(x)) {
                        return Err(Error::param(
                            "estimators",
                            format!(
                                "tail probability {p_n} must lie in (0, F_X({x})) = (0, {})",
                                gt.fx(x)
                            ),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Aggregates over the successful replications of one (x, estimator)
/// cell. `coverage` and `avg_ci_length` are NaN for estimators without
/// confidence intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub x: f64,
    pub estimator: String,
    pub k_mean: f64,
    pub bias: f64,
    pub mse: f64,
    pub avg_ci_length: f64,
    pub coverage: f64,
    pub failure_rate: f64,
    /// Successful replications behind the four statistics.
    pub successes: usize,
    /// Average dominated count over replications.
    pub mean_n_x: f64,
    /// Unbiased sample variance of the successful estimates.
    pub sample_variance: f64,
    /// Exact target of this cell in the scenario.
    pub truth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub cells: Vec<CellReport>,
    pub replications: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct CellOutcome {
    k: Option<usize>,
    value: Option<f64>,
    ci: Option<(f64, f64)>,
    n_x: usize,
}

/// Run the experiment described by the configuration and aggregate the
/// per-cell statistics. Deterministic for a given configuration,
/// including under parallel execution.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let gt = GroundTruth::new(cfg.scenario);

    let per_rep: Vec<Vec<CellOutcome>> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| {
            let scenario = Scenario {
                kind: cfg.scenario,
                n: cfg.sample_size,
                seed: derive_seed(cfg.base_seed, r as u64),
            };
            let ds = scenario.generate();
            let mut outcomes = Vec::with_capacity(cfg.query_points.len() * cfg.estimators.len());
            for &x in &cfg.query_points {
                let ts = ds.transform(&[x]).expect("query dimension is 1");
                for spec in &cfg.estimators {
                    outcomes.push(evaluate_cell(spec, &ts, cfg.ci_level));
                }
            }
            outcomes
        })
        .collect();

    let mut cells = Vec::new();
    let mut cell_idx = 0;
    for &x in &cfg.query_points {
        for spec in &cfg.estimators {
            let truth = cell_truth(spec, &gt, x)?;
            cells.push(aggregate_cell(
                x,
                spec,
                truth,
                per_rep.iter().map(|rep| &rep[cell_idx]),
                cfg.replications,
            ));
            cell_idx += 1;
        }
    }
    Ok(ExperimentReport {
        cells,
        replications: cfg.replications,
    })
}

fn cell_truth(spec: &EstimatorSpec, gt: &GroundTruth, x: f64) -> Result<f64> {
    if spec.targets_rho() {
        return Ok(gt.rho(x));
    }
    match spec {
        EstimatorSpec::ExtremeQuantilePickands { p_n }
        | EstimatorSpec::ExtremeQuantileMoment { p_n } => {
            gt.conditional_quantile(1.0 - p_n / gt.fx(x), x)
        }
        _ => Ok(gt.frontier(x)),
    }
}

/// Terminal state of one estimator evaluation on one sample.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecStatus {
    Ok,
    /// In-band degeneracy (ties, nonpositive estimate); a point estimate
    /// may still be present but no interval is.
    Degenerate(crate::tail::EstimateFailure),
    /// Precondition violation or failed threshold selection.
    Failed(Error),
}

impl SpecStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, SpecStatus::Ok)
    }
}

/// Result of evaluating one estimator spec at one query point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecOutcome {
    pub k: Option<usize>,
    pub value: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub rho_used: Option<f64>,
    pub status: SpecStatus,
}

impl SpecOutcome {
    fn failed(err: Error) -> Self {
        SpecOutcome {
            k: None,
            value: None,
            ci: None,
            rho_used: None,
            status: SpecStatus::Failed(err),
        }
    }
}

#[derive(Clone, Copy)]
enum GridFamily {
    Pickands,
    Moment,
    Direct,
}

/// Realized threshold for the policy on this sample.
fn realize_k(policy: KPolicy, family: GridFamily, ts: &TransformedSample) -> Result<usize> {
    match policy {
        KPolicy::Fixed(k) => Ok(k),
        KPolicy::GridIndex(j) => {
            let n_x = ts.n_x();
            let k = match family {
                GridFamily::Pickands => (n_x / 4).checked_sub(j).map(|v| v + 1),
                GridFamily::Moment => n_x.checked_sub(j),
                GridFamily::Direct => Some(j),
            };
            match k {
                Some(k) if k >= 1 => Ok(k),
                _ => Err(Error::param(
                    "k",
                    format!("grid index {j} is not realizable at N_x = {n_x}"),
                )),
            }
        }
        KPolicy::Auto => match family {
            GridFamily::Pickands => select_k_pickands_rho(ts).map(|s| s.chosen_k),
            GridFamily::Moment => select_k_moment_rho(ts).map(|s| s.chosen_k),
            GridFamily::Direct => {
                select_k_frontier(ts, |k| robust_frontier(ts, k).ok().and_then(|e| e.value))
                    .map(|s| s.chosen_k)
            }
        },
    }
}

/// Evaluate one estimator spec on a transformed sample: resolve the
/// threshold policy, run the estimator and classify the outcome. Hard
/// errors and failed threshold selections are returned in-band.
pub fn evaluate_spec(spec: &EstimatorSpec, ts: &TransformedSample, level: f64) -> SpecOutcome {
    match spec {
        EstimatorSpec::Fdh => match fdh_frontier(ts) {
            Ok(est) => SpecOutcome {
                k: Some(0),
                value: est.value,
                ci: None,
                rho_used: None,
                status: SpecStatus::Ok,
            },
            Err(e) => SpecOutcome::failed(e),
        },
        EstimatorSpec::OrderStat { k } => {
            let k = match realize_k(*k, GridFamily::Direct, ts) {
                Ok(k) => k,
                Err(e) => return SpecOutcome::failed(e),
            };
            match robust_frontier(ts, k) {
                Ok(est) => SpecOutcome {
                    k: Some(k),
                    value: est.value,
                    ci: None,
                    rho_used: None,
                    status: SpecStatus::Ok,
                },
                Err(e) => SpecOutcome::failed(e),
            }
        }
        EstimatorSpec::PickandsStar { k } => {
            let resolved = match k {
                KPolicy::Auto => {
                    crate::select::select_k_pickands_star(ts, level).map(|s| s.chosen_k)
                }
                other => realize_k(*other, GridFamily::Pickands, ts),
            };
            match resolved {
                Ok(k) => frontier_outcome(pickands_star(ts, k, level), k),
                Err(e) => SpecOutcome::failed(e),
            }
        }
        EstimatorSpec::KnownRhoStar { rho, k } => {
            let resolved = match k {
                KPolicy::Auto => {
                    crate::select::select_k_known_rho_star(ts, *rho, level).map(|s| s.chosen_k)
                }
                other => realize_k(*other, GridFamily::Pickands, ts),
            };
            match resolved {
                Ok(k) => frontier_outcome(known_rho_star(ts, k, *rho, level), k),
                Err(e) => SpecOutcome::failed(e),
            }
        }
        EstimatorSpec::MomentEndpoint { k } => {
            let resolved = match k {
                KPolicy::Auto => {
                    crate::select::select_k_moment_endpoint(ts, level).map(|s| s.chosen_k)
                }
                other => realize_k(*other, GridFamily::Moment, ts),
            };
            match resolved {
                Ok(k) => frontier_outcome(moment_endpoint(ts, k, level), k),
                Err(e) => SpecOutcome::failed(e),
            }
        }
        EstimatorSpec::PickandsRho { k } => {
            let k = match realize_k(*k, GridFamily::Pickands, ts) {
                Ok(k) => k,
                Err(e) => return SpecOutcome::failed(e),
            };
            tail_outcome(pickands_rho(ts, k).and_then(|e| e.with_ci(level)), k)
        }
        EstimatorSpec::MomentRho { k } => {
            let k = match realize_k(*k, GridFamily::Moment, ts) {
                Ok(k) => k,
                Err(e) => return SpecOutcome::failed(e),
            };
            tail_outcome(moment_rho(ts, k).and_then(|e| e.with_ci(level)), k)
        }
        EstimatorSpec::KnownEll { rho, ell, k } => {
            let k = match realize_k(*k, GridFamily::Direct, ts) {
                Ok(k) => k,
                Err(e) => return SpecOutcome::failed(e),
            };
            frontier_outcome(known_ell_ci(ts, k, *rho, *ell, level), k)
        }
        EstimatorSpec::ExtremeQuantilePickands { p_n } => {
            let k = (ts.n() as f64 * p_n).floor() as usize;
            frontier_outcome(extreme_quantile_ci_pickands(ts, *p_n, level), k)
        }
        EstimatorSpec::ExtremeQuantileMoment { p_n } => {
            let k = (ts.n() as f64 * p_n).floor() as usize;
            frontier_outcome(extreme_quantile_ci_moment(ts, *p_n, level), k)
        }
        EstimatorSpec::TwoStepKnownRho {
            source,
            k_rho,
            k_front,
        } => {
            let rho_family = match source {
                TailEstimatorKind::Pickands => GridFamily::Pickands,
                TailEstimatorKind::Moment => GridFamily::Moment,
            };
            let k1 = match realize_k(*k_rho, rho_family, ts) {
                Ok(k) => k,
                Err(e) => return SpecOutcome::failed(e),
            };
            let rho_est = match source {
                TailEstimatorKind::Pickands => pickands_rho(ts, k1),
                TailEstimatorKind::Moment => moment_rho(ts, k1),
            };
            let rho = match rho_est {
                Ok(est) => match est.rho() {
                    Some(rho) => rho,
                    None => {
                        let failure = est.failure().expect("no rho implies a failure");
                        return SpecOutcome {
                            k: Some(k1),
                            value: None,
                            ci: None,
                            rho_used: None,
                            status: SpecStatus::Degenerate(failure),
                        };
                    }
                },
                Err(e) => return SpecOutcome::failed(e),
            };
            let resolved = match k_front {
                KPolicy::Auto => {
                    crate::select::select_k_known_rho_star(ts, rho, level).map(|s| s.chosen_k)
                }
                other => realize_k(*other, GridFamily::Pickands, ts),
            };
            match resolved {
                Ok(k2) => frontier_outcome(two_step_known_rho(ts, k1, k2, *source, level), k2),
                Err(e) => SpecOutcome::failed(e),
            }
        }
    }
}

fn frontier_outcome(result: Result<crate::estimators::FrontierEstimate>, k: usize) -> SpecOutcome {
    match result {
        Ok(est) => {
            let status = match est.failure {
                None => SpecStatus::Ok,
                Some(f) => SpecStatus::Degenerate(f),
            };
            SpecOutcome {
                k: Some(k),
                value: est.value,
                ci: est.ci.map(|ci| (ci.lo, ci.hi)),
                rho_used: est.rho_used,
                status,
            }
        }
        Err(e) => SpecOutcome::failed(e),
    }
}

fn tail_outcome(result: Result<crate::tail::TailIndexEstimate>, k: usize) -> SpecOutcome {
    match result {
        Ok(est) => match est.failure() {
            None => SpecOutcome {
                k: Some(k),
                value: est.rho(),
                ci: est.ci().map(|ci| (ci.lo, ci.hi)),
                rho_used: est.rho(),
                status: SpecStatus::Ok,
            },
            Some(f) => SpecOutcome {
                k: Some(k),
                value: None,
                ci: None,
                rho_used: None,
                status: SpecStatus::Degenerate(f),
            },
        },
        Err(e) => SpecOutcome::failed(e),
    }
}

fn evaluate_cell(spec: &EstimatorSpec, ts: &TransformedSample, level: f64) -> CellOutcome {
    let out = evaluate_spec(spec, ts, level);
    let n_x = ts.n_x();
    if out.status.is_ok() {
        CellOutcome {
            k: out.k,
            value: out.value,
            ci: out.ci,
            n_x,
        }
    } else {
        // keep the realized threshold for the k_mean column when one was
        // reached before the failure
        CellOutcome {
            k: out.k,
            value: None,
            ci: None,
            n_x,
        }
    }
}

fn aggregate_cell<'a>(
    x: f64,
    spec: &EstimatorSpec,
    truth: f64,
    outcomes: impl Iterator<Item = &'a CellOutcome>,
    replications: usize,
) -> CellReport {
    let mut k_sum = 0.0;
    let mut k_count = 0usize;
    let mut n_x_sum = 0.0;
    let mut values = Vec::new();
    let mut ci_len_sum = 0.0;
    let mut covered = 0usize;
    let mut ci_count = 0usize;

    for out in outcomes {
        n_x_sum += out.n_x as f64;
        if let Some(k) = out.k {
            k_sum += k as f64;
            k_count += 1;
        }
        if let Some(v) = out.value {
            values.push(v);
            if let Some((lo, hi)) = out.ci {
                ci_len_sum += hi - lo;
                if lo <= truth && truth <= hi {
                    covered += 1;
                }
                ci_count += 1;
            }
        }
    }

    let m = values.len();
    let (bias, mse, sample_variance) = if m > 0 {
        let mf = m as f64;
        let bias = values.iter().map(|v| v - truth).sum::<f64>() / mf;
        let mse = values
            .iter()
            .map(|v| (v - truth) * (v - truth))
            .sum::<f64>()
            / mf;
        let mean = values.iter().sum::<f64>() / mf;
        let var = if m > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (mf - 1.0)
        } else {
            0.0
        };
        (bias, mse, var)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };

    CellReport {
        x,
        estimator: spec.label(),
        k_mean: if k_count > 0 {
            k_sum / k_count as f64
        } else {
            f64::NAN
        },
        bias,
        mse,
        avg_ci_length: if ci_count > 0 {
            ci_len_sum / ci_count as f64
        } else {
            f64::NAN
        },
        coverage: if ci_count > 0 {
            covered as f64 / ci_count as f64
        } else {
            f64::NAN
        },
        failure_rate: 1.0 - m as f64 / replications as f64,
        successes: m,
        mean_n_x: n_x_sum / replications as f64,
        sample_variance,
        truth,
    }
}

/// Leading term of the `k`-th moment of the scaled FDH deviation
/// `φ(x) - φ̂(x)` when the tail has a constant term:
/// `(k/ρ)·(n·ℓ)^(-k/ρ)·Γ(k/ρ)`. With `k = 1` this is the expected
/// downward bias of the FDH value; with `k = 2` its leading MSE.
pub fn fdh_moment_oracle(k: u32, n: usize, rho: f64, ell: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::param("k", "moment order must be at least 1"));
    }
    if n < 1 {
        return Err(Error::param("n", "sample size must be at least 1"));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::param("rho", format!("must be positive, got {rho}")));
    }
    if !(ell.is_finite() && ell > 0.0) {
        return Err(Error::param("ell", format!("must be positive, got {ell}")));
    }
    let kf = f64::from(k);
    Ok(kf / rho * (n as f64 * ell).powf(-kf / rho) * gamma(kf / rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    AlignedText,
    Csv,
}

/// Formats a value with 6 significant digits, printf %g style.
pub fn fmt_sig6(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v == 0.0 {
        return "0.00000".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if (-5..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

/// Renders the report. The CSV form has columns
/// `x,estimator,k_mean,bias,mse,avg_ci_length,coverage,failure_rate`
/// with 6 significant digits; parsing it back reproduces the report to
/// that precision.
pub fn emit_report_table(report: &ExperimentReport, format: ReportFormat) -> String {
    const COLS: [&str; 8] = [
        "x",
        "estimator",
        "k_mean",
        "bias",
        "mse",
        "avg_ci_length",
        "coverage",
        "failure_rate",
    ];
    match format {
        ReportFormat::Csv => {
            let mut out = String::new();
            out.push_str(&COLS.join(","));
            out.push('\n');
            for c in &report.cells {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    fmt_sig6(c.x),
                    c.estimator,
                    fmt_sig6(c.k_mean),
                    fmt_sig6(c.bias),
                    fmt_sig6(c.mse),
                    fmt_sig6(c.avg_ci_length),
                    fmt_sig6(c.coverage),
                    fmt_sig6(c.failure_rate),
                ));
            }
            out
        }
        ReportFormat::AlignedText => {
            let rows: Vec<[String; 8]> = report
                .cells
                .iter()
                .map(|c| {
                    [
                        fmt_sig6(c.x),
                        c.estimator.clone(),
                        fmt_sig6(c.k_mean),
                        fmt_sig6(c.bias),
                        fmt_sig6(c.mse),
                        fmt_sig6(c.avg_ci_length),
                        fmt_sig6(c.coverage),
                        fmt_sig6(c.failure_rate),
                    ]
                })
                .collect();
            let mut widths: Vec<usize> = COLS.iter().map(|c| c.len()).collect();
            for row in &rows {
                for (w, cell) in widths.iter_mut().zip(row.iter()) {
                    *w = (*w).max(cell.len());
                }
            }
            let mut out = String::new();
            for (i, col) in COLS.iter().enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                out.push_str(&format!("{:>width$}", col, width = widths[i]));
            }
            out.push('\n');
            for row in &rows {
                for (i, cell) in row.iter().enumerate() {
                    if i > 0 {
                        out.push_str("  ");
                    }
                    out.push_str(&format!("{:>width$}", cell, width = widths[i]));
                }
                out.push('\n');
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            scenario: ScenarioKind::UniformTriangle,
            sample_size: 400,
            replications: 8,
            query_points: vec![0.5, 1.0],
            estimators: vec![
                EstimatorSpec::Fdh,
                EstimatorSpec::KnownRhoStar {
                    rho: 2.0,
                    k: KPolicy::GridIndex(1),
                },
            ],
            ci_level: 0.95,
            base_seed: 42,
        }
    }

    #[test]
    fn oracle_values() {
        // k = 1: sqrt(pi) / (2 sqrt(5000))
        let want = std::f64::consts::PI.sqrt() / (2.0 * 5000f64.sqrt());
        let got = fdh_moment_oracle(1, 5000, 2.0, 1.0).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!((got - 0.012533141373155).abs() < 1e-12);

        // k = 2: 2*(1/2)*(1/5000)*Gamma(1) = 2e-4
        let got = fdh_moment_oracle(2, 5000, 2.0, 1.0).unwrap();
        assert!((got - 2.0e-4).abs() < 1e-12);

        // quadrupling n halves the k = 1 value
        let a = fdh_moment_oracle(1, 1000, 2.0, 1.0).unwrap();
        let b = fdh_moment_oracle(1, 4000, 2.0, 1.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);

        assert!(fdh_moment_oracle(0, 10, 2.0, 1.0).is_err());
        assert!(fdh_moment_oracle(1, 10, -1.0, 1.0).is_err());
    }

    #[test]
    fn experiment_is_reproducible() {
        let cfg = small_config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        // NaN-valued cells (no CI) defeat PartialEq; compare the rendering
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert_eq!(
            emit_report_table(&a, ReportFormat::Csv),
            emit_report_table(&b, ReportFormat::Csv)
        );
    }

    #[test]
    fn single_replication_degenerates() {
        let mut cfg = small_config();
        cfg.replications = 1;
        let rep = run_experiment(&cfg).unwrap();
        for cell in &rep.cells {
            if cell.successes == 1 {
                assert!((cell.mse - cell.bias * cell.bias).abs() < 1e-15);
                if cell.coverage.is_finite() {
                    assert!(cell.coverage == 0.0 || cell.coverage == 1.0);
                }
            }
        }
    }

    #[test]
    fn mse_decomposes_into_bias_and_variance() {
        let rep = run_experiment(&small_config()).unwrap();
        for cell in &rep.cells {
            let m = cell.successes as f64;
            if cell.successes > 1 {
                let decomposed = cell.bias * cell.bias + cell.sample_variance * (m - 1.0) / m;
                assert!(
                    (cell.mse - decomposed).abs() <= 1e-12 * cell.mse.max(1.0),
                    "{}: {} vs {}",
                    cell.estimator,
                    cell.mse,
                    decomposed
                );
            }
        }
    }

    #[test]
    fn rejects_query_without_mass() {
        let mut cfg = small_config();
        cfg.query_points = vec![0.0];
        assert!(run_experiment(&cfg).is_err());
        cfg.query_points = vec![1.5];
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn report_roundtrips_through_csv() {
        let rep = run_experiment(&small_config()).unwrap();
        let csv = emit_report_table(&rep, ReportFormat::Csv);
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert_eq!(
            header,
            "x,estimator,k_mean,bias,mse,avg_ci_length,coverage,failure_rate"
        );
        let mut parsed = 0;
        for (line, cell) in lines.zip(&rep.cells) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 8);
            assert_eq!(fields[1], cell.estimator);
            for (s, v) in [
                (fields[2], cell.k_mean),
                (fields[3], cell.bias),
                (fields[4], cell.mse),
                (fields[7], cell.failure_rate),
            ] {
                let back: f64 = s.parse().unwrap();
                if v.is_nan() {
                    assert!(back.is_nan());
                } else {
                    let scale = v.abs().max(1e-300);
                    assert!((back - v).abs() / scale < 1e-5 + 1e-12, "{s} vs {v}");
                }
            }
            parsed += 1;
        }
        assert_eq!(parsed, rep.cells.len());
    }

    #[test]
    fn empty_report_is_header_only() {
        let rep = ExperimentReport {
            cells: vec![],
            replications: 0,
        };
        let csv = emit_report_table(&rep, ReportFormat::Csv);
        assert_eq!(csv.lines().count(), 1);
        let txt = emit_report_table(&rep, ReportFormat::AlignedText);
        assert_eq!(txt.lines().count(), 1);
    }

    #[test]
    fn estimator_tokens_roundtrip() {
        let specs = [
            "fdh",
            "robust",
            "pickands",
            "knownrho:2",
            "moment",
            "rho-pickands",
            "rho-moment",
            "knownell:2;1",
            "quantile-pickands:0.01",
            "quantile-moment:0.02",
            "twostep-moment",
        ];
        for token in specs {
            let spec = EstimatorSpec::parse(token, KPolicy::Auto).unwrap();
            assert!(!spec.label().is_empty(), "{token}");
        }
        assert!(EstimatorSpec::parse("nope", KPolicy::Auto).is_err());
        assert!(EstimatorSpec::parse("knownrho", KPolicy::Auto).is_err());
        assert!(EstimatorSpec::parse("knownell:2", KPolicy::Auto).is_err());
    }

    #[test]
    fn k_policy_parsing() {
        assert_eq!(KPolicy::parse("auto").unwrap(), KPolicy::Auto);
        assert_eq!(KPolicy::parse("25").unwrap(), KPolicy::Fixed(25));
        assert_eq!(KPolicy::parse("grid:3").unwrap(), KPolicy::GridIndex(3));
        assert!(KPolicy::parse("grid:0").is_err());
        assert!(KPolicy::parse("whatever").is_err());
    }

    #[test]
    fn fmt_sig6_shapes() {
        assert_eq!(fmt_sig6(0.0), "0.00000");
        assert_eq!(fmt_sig6(1.0), "1.00000");
        assert_eq!(fmt_sig6(-0.0125331), "-0.0125331");
        assert_eq!(fmt_sig6(f64::NAN), "NaN");
        assert_eq!(fmt_sig6(1234560.0), "1.23456e6");
        let parsed: f64 = fmt_sig6(2.99969e-7).parse().unwrap();
        assert!((parsed - 2.99969e-7).abs() < 1e-12);
    }

    #[test]
    fn grid_index_realization() {
        let ds = gen_triangle_ts(4000, 1);
        // x = 1 dominates everything
        let k = realize_k(KPolicy::GridIndex(1), GridFamily::Pickands, &ds).unwrap();
        assert_eq!(k, 1000); // floor(4000/4) - 1 + 1
        let k = realize_k(KPolicy::GridIndex(3), GridFamily::Moment, &ds).unwrap();
        assert_eq!(k, 3997);
        let k = realize_k(KPolicy::GridIndex(5), GridFamily::Direct, &ds).unwrap();
        assert_eq!(k, 5);
    }

    fn gen_triangle_ts(n: usize, seed: u64) -> TransformedSample {
        crate::simgen::gen_uniform_triangle(n, seed)
            .transform(&[1.0])
            .unwrap()
    }
}
