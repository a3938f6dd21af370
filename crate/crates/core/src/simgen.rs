//! Seeded synthetic data generators with exact ground truth, for testing
//! and Monte Carlo work.
//!
//! Two univariate-input benchmark models, both with conditional tail index
//! `ρ_x = 2`:
//!
//! - `UniformTriangle`: (X, Y) uniform on the triangle
//!   `{0 ≤ x ≤ 1, 0 ≤ y ≤ x}`; frontier `φ(x) = x`, marginal
//!   `F_X(x) = x²`, conditional cdf `F(y|x) = 1 - (x-y)²/x²` and tail
//!   constant `ℓ_x = 1`.
//! - `CobbDouglas`: `Y = √X·exp(-U)` with `X` uniform on [0, 1] and `U`
//!   exponential with rate 3; frontier `φ(x) = √x`, `F_X(x) = x`,
//!   `F(y|x) = 3y²/x - 2y³/x^(3/2)` and no constant tail term.
//!
//! Randomness comes from the ChaCha8 stream cipher generator
//! (counter-based, portable, identical across platforms for a given
//! seed). Uniform deviates use the top 53 bits of each 64-bit word;
//! exponential deviates use inverse-cdf sampling. Per-replication seeds
//! are derived with SplitMix64 so replications can run in parallel on
//! independent streams.

use crate::data::{Dataset, Observation};
use crate::error::{Error, Result};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    UniformTriangle,
    CobbDouglas,
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioKind::UniformTriangle => f.write_str("triangle"),
            ScenarioKind::CobbDouglas => f.write_str("cobb-douglas"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub n: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, n: usize, seed: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::param("n", "sample size must be at least 1"));
        }
        Ok(Self { kind, n, seed })
    }

    pub fn generate(&self) -> Dataset {
        match self.kind {
            ScenarioKind::UniformTriangle => gen_uniform_triangle(self.n, self.seed),
            ScenarioKind::CobbDouglas => gen_cobb_douglas(self.n, self.seed),
        }
    }

    pub fn ground_truth(&self) -> GroundTruth {
        GroundTruth { kind: self.kind }
    }
}

/// Uniform deviate in [0, 1) from the top 53 bits of one 64-bit word.
fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sample of size `n` uniform on the triangle `0 ≤ y ≤ x ≤ 1`. The
/// marginal density of X is `2x`, sampled as `max(U1, U2)`; given
/// `X = x`, Y is uniform on [0, x].
pub fn gen_uniform_triangle(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let obs = (0..n)
        .map(|_| {
            let x = uniform01(&mut rng).max(uniform01(&mut rng));
            let y = x * uniform01(&mut rng);
            Observation::new(vec![x], y).expect("triangle draws are finite and nonnegative")
        })
        .collect();
    Dataset::new(obs).expect("n >= 1")
}

/// Sample of size `n` from `Y = √X·exp(-U)`, X uniform on [0, 1] and U
/// exponential with rate 3 (inverse cdf: `U = -log(1-V)/3`).
pub fn gen_cobb_douglas(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let obs = (0..n)
        .map(|_| {
            let x = uniform01(&mut rng);
            let u = -(-uniform01(&mut rng)).ln_1p() / 3.0;
            let y = x.sqrt() * (-u).exp();
            Observation::new(vec![x], y).expect("draws are finite and nonnegative")
        })
        .collect();
    Dataset::new(obs).expect("n >= 1")
}

/// Copy of the dataset with one extra observation appended.
pub fn inject_outlier(ds: &Dataset, x0: &[f64], y0: f64) -> Result<Dataset> {
    if x0.len() != ds.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: ds.input_dim(),
            got: x0.len(),
        });
    }
    let mut obs = ds.observations().to_vec();
    obs.push(Observation::new(x0.to_vec(), y0)?);
    Dataset::new(obs)
}

/// SplitMix64-derived seed for replication `index` of a base seed.
/// Deterministic, and distinct indices give independent-looking streams.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Exact distributional quantities of a scenario, used as the truth in
/// Monte Carlo reports and tests. Query points must satisfy
/// `0 < x ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundTruth {
    kind: ScenarioKind,
}

impl GroundTruth {
    pub fn new(kind: ScenarioKind) -> Self {
        Self { kind }
    }

    pub fn kind(&self) -> ScenarioKind {
        self.kind
    }

    pub fn in_support(&self, x: f64) -> bool {
        x > 0.0 && x <= 1.0
    }

    /// Frontier function `φ(x)`.
    pub fn frontier(&self, x: f64) -> f64 {
        match self.kind {
            ScenarioKind::UniformTriangle => x,
            ScenarioKind::CobbDouglas => x.sqrt(),
        }
    }

    /// Conditional tail index; equal to 2 everywhere for both models.
    pub fn rho(&self, _x: f64) -> f64 {
        2.0
    }

    /// Constant tail term `ℓ_x`, when the model has one.
    pub fn ell(&self, _x: f64) -> Option<f64> {
        match self.kind {
            ScenarioKind::UniformTriangle => Some(1.0),
            ScenarioKind::CobbDouglas => None,
        }
    }

    /// Marginal cdf of the input, `F_X(x)`.
    pub fn fx(&self, x: f64) -> f64 {
        match self.kind {
            ScenarioKind::UniformTriangle => (x.clamp(0.0, 1.0)).powi(2),
            ScenarioKind::CobbDouglas => x.clamp(0.0, 1.0),
        }
    }

    /// Conditional cdf `F(y|x) = P(Y ≤ y | X ≤ x)` for `0 < x ≤ 1`.
    pub fn conditional_cdf(&self, y: f64, x: f64) -> f64 {
        let phi = self.frontier(x);
        if y <= 0.0 {
            return 0.0;
        }
        if y >= phi {
            return 1.0;
        }
        match self.kind {
            ScenarioKind::UniformTriangle => {
                let d = x - y;
                1.0 - d * d / (x * x)
            }
            ScenarioKind::CobbDouglas => 3.0 * y * y / x - 2.0 * y * y * y / x.powf(1.5),
        }
    }

    /// Conditional quantile `inf{y : F(y|x) ≥ alpha}` for `alpha` in
    /// (0, 1]. Closed form for the triangle, bisection for the
    /// Cobb-Douglas model.
    pub fn conditional_quantile(&self, alpha: f64, x: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param(
                "alpha",
                format!("must be in (0, 1], got {alpha}"),
            ));
        }
        let phi = self.frontier(x);
        if alpha == 1.0 {
            return Ok(phi);
        }
        match self.kind {
            ScenarioKind::UniformTriangle => Ok(x * (1.0 - (1.0 - alpha).sqrt())),
            ScenarioKind::CobbDouglas => {
                let (mut lo, mut hi) = (0.0, phi);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.conditional_cdf(mid, x) >= alpha {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Ok(hi)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_support_membership() {
        let ds = gen_uniform_triangle(2000, 7);
        for obs in ds.observations() {
            let x = obs.inputs()[0];
            let y = obs.output();
            assert!((0.0..=1.0).contains(&x));
            assert!(y >= 0.0 && y <= x);
        }
    }

    #[test]
    fn cobb_douglas_support_membership() {
        let ds = gen_cobb_douglas(2000, 7);
        for obs in ds.observations() {
            let x = obs.inputs()[0];
            let y = obs.output();
            assert!((0.0..=1.0).contains(&x));
            assert!(y > 0.0 && y <= x.sqrt());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_uniform_triangle(500, 42);
        let b = gen_uniform_triangle(500, 42);
        assert_eq!(a, b);
        let c = gen_uniform_triangle(500, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn triangle_marginal_matches_truth() {
        let n = 100_000;
        let ds = gen_uniform_triangle(n, 11);
        let fx = ds.empirical_fx(&[0.5]).unwrap();
        assert!((fx - 0.25).abs() < 0.01, "F_X(0.5) = {fx}");
    }

    #[test]
    fn triangle_conditional_tail_probability() {
        // P(Y > y | X <= x) = (x-y)^2 / x^2 at (x, y) = (1, 0.5): 0.25
        let n = 100_000;
        let ds = gen_uniform_triangle(n, 13);
        let cdf = ds.conditional_cdf(0.5, &[1.0]).unwrap();
        let eps = (2.0f64 / 0.01).ln() / (2.0 * n as f64); // DKW 99%
        assert!((1.0 - cdf - 0.25).abs() < eps.sqrt() + 1e-3);
    }

    #[test]
    fn cobb_douglas_conditional_cdf_value() {
        // truth at (y, x) = (0.5, 1): 3/4 - 2/8 = 0.5
        let gt = GroundTruth::new(ScenarioKind::CobbDouglas);
        assert!((gt.conditional_cdf(0.5, 1.0) - 0.5).abs() < 1e-15);
        let n = 100_000;
        let ds = gen_cobb_douglas(n, 17);
        let cdf = ds.conditional_cdf(0.5, &[1.0]).unwrap();
        assert!((cdf - 0.5).abs() < 0.01, "F(0.5|1) = {cdf}");
    }

    #[test]
    fn ground_truth_quantiles_invert_the_cdf() {
        for kind in [ScenarioKind::UniformTriangle, ScenarioKind::CobbDouglas] {
            let gt = GroundTruth::new(kind);
            for x in [0.3, 0.7, 1.0] {
                for alpha in [0.1, 0.5, 0.9, 0.999] {
                    let q = gt.conditional_quantile(alpha, x).unwrap();
                    let back = gt.conditional_cdf(q, x);
                    assert!((back - alpha).abs() < 1e-9, "{kind} x={x} alpha={alpha}");
                }
                assert_eq!(gt.conditional_quantile(1.0, x).unwrap(), gt.frontier(x));
            }
        }
    }

    #[test]
    fn triangle_extreme_quantile_closed_form() {
        // level 1 - p/F_X(x) corresponds to y = x - sqrt(p)
        let gt = GroundTruth::new(ScenarioKind::UniformTriangle);
        for (x, p) in [(1.0, 0.01), (0.5, 0.04), (0.8, 0.02)] {
            let alpha = 1.0 - p / gt.fx(x);
            let q = gt.conditional_quantile(alpha, x).unwrap();
            assert!((q - (x - p.sqrt())).abs() < 1e-12, "x={x} p={p}");
        }
    }

    #[test]
    fn outlier_injection_appends() {
        let ds = gen_uniform_triangle(100, 3);
        let spiked = inject_outlier(&ds, &[0.5], 10.0).unwrap();
        assert_eq!(spiked.len(), 101);
        assert_eq!(spiked.fdh(&[1.0]).unwrap(), 10.0);
        assert!(inject_outlier(&ds, &[0.5, 0.5], 1.0).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..100).map(|i| derive_seed(42, i)).collect();
        let mut uniq = s.clone();
        uniq.sort_unstable();
        uniq.dedup();
        assert_eq!(uniq.len(), s.len());
        assert_eq!(derive_seed(42, 7), derive_seed(42, 7));
    }

    #[test]
    fn cobb_douglas_frontier_bounds_fdh() {
        let ds = gen_cobb_douglas(5000, 23);
        let gt = GroundTruth::new(ScenarioKind::CobbDouglas);
        for x in [0.2, 0.5, 0.9] {
            let fdh = ds.fdh(&[x]).unwrap();
            assert!(fdh <= gt.frontier(x) + 1e-12);
        }
    }
}
