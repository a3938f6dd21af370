//! Data-driven threshold selection.
//!
//! For each estimator family a grid of candidate thresholds is swept, the
//! estimate is computed at every grid point, and the sample standard
//! deviation is taken over sliding windows of `2m` successive grid
//! entries. The chosen threshold is the one at the centre of the window
//! where the estimates are most stable (smallest rolling standard
//! deviation). Windows containing any failed estimate are disqualified
//! rather than imputed.

use crate::error::{Error, Result};
use crate::estimators::{moment_endpoint, pickands_star};
use crate::tail::{moment_rho, pickands_rho};
use crate::transform::TransformedSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionTarget {
    PickandsRho,
    MomentRho,
    Frontier,
}

impl std::fmt::Display for SelectionTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SelectionTarget::PickandsRho => "rho-pickands",
            SelectionTarget::MomentRho => "rho-moment",
            SelectionTarget::Frontier => "frontier",
        };
        f.write_str(s)
    }
}

/// One grid entry of a threshold sweep: the threshold value and the
/// estimate at it, `None` when the estimator failed there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub k: usize,
    pub estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSelection {
    pub target: SelectionTarget,
    /// Full sweep in grid order.
    pub grid: Vec<GridPoint>,
    /// Threshold at the centre of the most stable window: the smaller of
    /// the two centre entries' threshold values.
    pub chosen_k: usize,
    /// Half the window length `m`; windows span `2m` successive entries.
    pub window_halfwidth: usize,
    /// Rolling standard deviation, one entry per window position in grid
    /// order; `NaN` where the window contains a failed estimate.
    pub rolling_sd: Vec<f64>,
}

/// Threshold selection for the Pickands tail-index estimator. The grid is
/// `k_n = ⌊N_x/4⌋ - j + 1` for `j = 1..⌊N_x/4⌋` and the window length is
/// `2·⌊√(N_x/4)⌋`. Requires `N_x ≥ 16`.
pub fn select_k_pickands_rho(ts: &TransformedSample) -> Result<KSelection> {
    let n_x = ts.n_x();
    if n_x < 16 {
        return Err(Error::InsufficientStableRange(format!(
            "need N_x >= 16 for the Pickands threshold sweep, have {n_x}"
        )));
    }
    let top = n_x / 4;
    let grid: Vec<GridPoint> = (1..=top)
        .map(|j| {
            let k = top - j + 1;
            let estimate = pickands_rho(ts, k).ok().and_then(|e| e.rho());
            GridPoint { k, estimate }
        })
        .collect();
    stability_select(SelectionTarget::PickandsRho, grid, (n_x / 4).isqrt())
}

/// Threshold selection for the moment tail-index estimator. The grid is
/// `k_n = N_x - j` for `j = 1..N_x` and the window length is `2·⌊√N_x⌋`.
/// Requires `N_x ≥ 9`.
pub fn select_k_moment_rho(ts: &TransformedSample) -> Result<KSelection> {
    let n_x = ts.n_x();
    if n_x < 9 {
        return Err(Error::InsufficientStableRange(format!(
            "need N_x >= 9 for the moment threshold sweep, have {n_x}"
        )));
    }
    let grid: Vec<GridPoint> = (1..=n_x)
        .map(|j| {
            let k = n_x - j;
            let estimate = if k == 0 {
                None
            } else {
                moment_rho(ts, k).ok().and_then(|e| e.rho())
            };
            GridPoint { k, estimate }
        })
        .collect();
    stability_select(SelectionTarget::MomentRho, grid, n_x.isqrt())
}

/// Threshold selection for a frontier estimator, supplied as a closure
/// over the threshold (`None` marks a failure at that threshold). The grid
/// is `k = 1..⌊√N_x⌋` and the window length is `2·max(3, ⌊√N_x⌋/20)`,
/// large enough to cover about 10% of the grid. Requires `N_x ≥ 36`.
pub fn select_k_frontier<F>(ts: &TransformedSample, estimator: F) -> Result<KSelection>
where
    F: Fn(usize) -> Option<f64>,
{
    let n_x = ts.n_x();
    if n_x < 36 {
        return Err(Error::InsufficientStableRange(format!(
            "need N_x >= 36 for the frontier threshold sweep, have {n_x}"
        )));
    }
    let grid: Vec<GridPoint> = (1..=n_x.isqrt())
        .map(|k| GridPoint {
            k,
            estimate: estimator(k),
        })
        .collect();
    let m = 3.max(n_x.isqrt() / 20);
    stability_select(SelectionTarget::Frontier, grid, m)
}

/// Frontier sweep closure for the Pickands endpoint estimator.
pub fn select_k_pickands_star(ts: &TransformedSample, level: f64) -> Result<KSelection> {
    select_k_frontier(ts, |k| {
        pickands_star(ts, k, level)
            .ok()
            .and_then(|e| if e.is_failed() { None } else { e.value })
    })
}

/// Frontier sweep closure for the known-ρ endpoint estimator.
pub fn select_k_known_rho_star(ts: &TransformedSample, rho: f64, level: f64) -> Result<KSelection> {
    select_k_frontier(ts, |k| {
        crate::estimators::known_rho_star(ts, k, rho, level)
            .ok()
            .and_then(|e| if e.is_failed() { None } else { e.value })
    })
}

/// Frontier sweep closure for the moment endpoint estimator.
pub fn select_k_moment_endpoint(ts: &TransformedSample, level: f64) -> Result<KSelection> {
    select_k_frontier(ts, |k| {
        moment_endpoint(ts, k, level)
            .ok()
            .and_then(|e| if e.is_failed() { None } else { e.value })
    })
}

/// Sliding-window reduction shared by the three rules. Windows hold `2m`
/// successive grid entries; the first window attaining the minimal
/// rolling standard deviation wins and its chosen threshold is the
/// smaller of the two centre entries' values.
fn stability_select(target: SelectionTarget, grid: Vec<GridPoint>, m: usize) -> Result<KSelection> {
    let w = 2 * m;
    if m == 0 || grid.len() < w {
        return Err(Error::InsufficientStableRange(format!(
            "window of {w} entries does not fit a grid of {}",
            grid.len()
        )));
    }
    let positions = grid.len() - w + 1;
    let mut rolling_sd = Vec::with_capacity(positions);
    let mut best: Option<(f64, usize)> = None; // (sd, chosen_k)
    for s in 0..positions {
        let window = &grid[s..s + w];
        let sd = if window.iter().any(|g| g.estimate.is_none()) {
            f64::NAN
        } else {
            sample_sd(window.iter().map(|g| g.estimate.unwrap()))
        };
        rolling_sd.push(sd);
        if sd.is_finite() {
            let chosen = grid[s + m - 1].k.min(grid[s + m].k);
            match best {
                Some((best_sd, _)) if best_sd <= sd => {}
                _ => best = Some((sd, chosen)),
            }
        }
    }
    let Some((_, chosen_k)) = best else {
        return Err(Error::InsufficientStableRange(
            "every window contains a failed estimate".into(),
        ));
    };
    Ok(KSelection {
        target,
        grid,
        chosen_k,
        window_halfwidth: m,
        rolling_sd,
    })
}

fn sample_sd(values: impl Iterator<Item = f64>) -> f64 {
    let vals: Vec<f64> = values.collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let ss: f64 = vals.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}
