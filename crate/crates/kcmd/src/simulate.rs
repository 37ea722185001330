//! Seeded scenario generators and a deterministic Monte Carlo driver.
//!
//! Scenarios pin every random choice to a master seed: replicate i draws its
//! own seed from a counter-based split of the master, so the entire report is
//! a pure function of its inputs no matter how replicates are scheduled
//! across threads.
//!
//! Generators keep E(Y) away from zero on purpose. The H₀ variance of the
//! weighted estimator is proportional to Var⟨Y⊗K(X,·), ν⟩ with ν = E(Y)⊗m_X;
//! a centered response would make ν = 0 and the studentized statistic
//! degenerate, so the normal limit would never show at any sample size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::diagnostics::{empirical_uv, sigma_gamma_plugin};
use crate::error::{Error, Result};
use crate::estimators::kcmd_ustat;
use crate::hilbert::{Grid, HilbertPoint, Sample};
use crate::inference::{normal_cdf, test_from_gram};
use crate::kernels::{GramPair, KernelChoice};
use crate::numeric::{compensated_sum, derive_seed};
use crate::weights::WeightFamily;

/// Constant added to every response coordinate (see module docs).
const MEAN_LEVEL: f64 = 2.0;
/// Norm of the response direction carrying the H₁ signal.
const SIGNAL_SCALE: f64 = 4.0;
/// Terms kept in the curve series expansion.
const CURVE_TERMS: usize = 12;

/// What to generate; `n` and `seed` complete the description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScenarioKind {
    /// X ~ N(0, I_dx) and Y ~ N(level·1, I_dy), independent.
    H0IndepVectors { dx: usize, dy: usize },
    /// Independent random curves: partial sine series with coefficients
    /// decaying like k^(−roughness), on uniform grids of the given lengths.
    H0IndepCurves {
        x_grid_len: usize,
        y_grid_len: usize,
        roughness: f64,
    },
    /// Y = level·1 + signal·scale·⟨X,w₀⟩·v₀ + ε in R³.
    H1LinearMean { signal: f64 },
    /// Y = level·1 + signal·scale·(⟨X,w₀⟩² − 1)·v₀ + ε in R³.
    H1NonlinearMean { signal: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub kind: ScenarioKind,
    pub n: usize,
    pub seed: u64,
}

/// Draws one sample. Deterministic: the same scenario produces bitwise
/// identical data. Per observation the draw order is fixed (X coordinates,
/// then Y noise), so adding observations never perturbs earlier ones drawn
/// with the same seed.
pub fn generate(scenario: &Scenario) -> Result<Sample> {
    let n = scenario.n;
    if n < 4 {
        return Err(Error::SampleTooSmall { n, min: 4 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);

    match scenario.kind {
        ScenarioKind::H0IndepVectors { dx, dy } => {
            if dx == 0 || dy == 0 {
                return Err(Error::BadScenario(format!(
                    "vector dimensions must be positive, got dx={dx}, dy={dy}"
                )));
            }
            let mut xs = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                xs.push(normal_vector(&mut rng, dx, 0.0));
                ys.push(normal_vector(&mut rng, dy, MEAN_LEVEL));
            }
            Sample::new(xs, ys)
        }
        ScenarioKind::H0IndepCurves {
            x_grid_len,
            y_grid_len,
            roughness,
        } => {
            if x_grid_len < 2 || y_grid_len < 2 {
                return Err(Error::BadScenario(format!(
                    "grid lengths must be at least 2, got {x_grid_len} and {y_grid_len}"
                )));
            }
            if !roughness.is_finite() || roughness <= 0.0 {
                return Err(Error::BadScenario(format!(
                    "roughness must be positive and finite, got {roughness}"
                )));
            }
            let x_grid = Arc::new(Grid::uniform(x_grid_len)?);
            let y_grid = Arc::new(Grid::uniform(y_grid_len)?);
            let mut xs = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                xs.push(random_curve(&mut rng, &x_grid, roughness, 0.0)?);
                ys.push(random_curve(&mut rng, &y_grid, roughness, MEAN_LEVEL)?);
            }
            Sample::new(xs, ys)
        }
        ScenarioKind::H1LinearMean { signal } => {
            signal_sample(&mut rng, n, signal, |z| z)
        }
        ScenarioKind::H1NonlinearMean { signal } => {
            signal_sample(&mut rng, n, signal, |z| z * z - 1.0)
        }
    }
}

fn normal_vector(rng: &mut ChaCha8Rng, dim: usize, level: f64) -> HilbertPoint {
    let coords: Vec<f64> = (0..dim)
        .map(|_| level + rng.sample::<f64, _>(StandardNormal))
        .collect();
    HilbertPoint::Vector(coords)
}

/// ξ₀ + Σ_k k^(−roughness)·√2·sin(kπt)·ξ_k with iid standard normal ξ.
fn random_curve(
    rng: &mut ChaCha8Rng,
    grid: &Arc<Grid>,
    roughness: f64,
    level: f64,
) -> Result<HilbertPoint> {
    let xi: Vec<f64> = (0..=CURVE_TERMS)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let values: Vec<f64> = grid
        .points()
        .iter()
        .map(|&t| {
            let mut v = level + xi[0];
            for k in 1..=CURVE_TERMS {
                let kf = k as f64;
                v += kf.powf(-roughness)
                    * std::f64::consts::SQRT_2
                    * (kf * std::f64::consts::PI * t).sin()
                    * xi[k];
            }
            v
        })
        .collect();
    HilbertPoint::curve(values, Arc::clone(grid))
}

/// Shared H₁ generator in R³: the transform of ⟨X,w₀⟩ moves the conditional
/// mean along a fixed direction of norm `SIGNAL_SCALE`.
fn signal_sample(
    rng: &mut ChaCha8Rng,
    n: usize,
    signal: f64,
    transform: impl Fn(f64) -> f64,
) -> Result<Sample> {
    if !signal.is_finite() {
        return Err(Error::BadScenario(format!(
            "signal strength must be finite, got {signal}"
        )));
    }
    let inv_sqrt3 = 1.0 / 3.0f64.sqrt();
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let z = inv_sqrt3 * (x[0] + x[1] + x[2]);
        let shift = signal * SIGNAL_SCALE * transform(z) * inv_sqrt3;
        let y: Vec<f64> = (0..3)
            .map(|_| MEAN_LEVEL + shift + rng.sample::<f64, _>(StandardNormal))
            .collect();
        xs.push(HilbertPoint::Vector(x));
        ys.push(HilbertPoint::Vector(y));
    }
    Sample::new(xs, ys)
}

// =============================================================================
// Monte Carlo driver
// =============================================================================

/// Outcome of one replicate. `statistic` is `None` when the variance estimate
/// was degenerate; `ustat` and `sigma_plugin` are `None` only if the
/// replicate's sample defeated bandwidth selection entirely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub statistic: Option<f64>,
    pub reject: bool,
    pub ustat: Option<f64>,
    pub sigma_plugin: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Aggregated Monte Carlo results; see [`monte_carlo`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub scenario: Scenario,
    pub replicates: usize,
    pub alpha: f64,
    pub kernel: KernelChoice,
    pub family: String,
    pub gamma: Option<f64>,
    /// (#reject)/replicates; degenerate replicates count as non-rejections.
    pub rejection_rate: f64,
    /// Standardized statistics in replicate order, degenerates excluded.
    pub statistics: Vec<f64>,
    pub ks_distance_to_std_normal: f64,
    pub mean_ustat: f64,
    /// Standard error of `mean_ustat` (sample SD over √replicates).
    pub ustat_se: f64,
    pub sigma_plugin: SummaryStats,
    pub degenerate_replicates: usize,
    pub per_replicate: Vec<ReplicateRecord>,
}

/// Runs the test on `replicates` fresh samples of the scenario, with seeds
/// split deterministically from the scenario's master seed.
///
/// A `GaussianMedian` kernel re-selects its bandwidth on every replicate.
/// Replicates whose variance estimate degenerates are counted, excluded from
/// the distributional summaries, and never rejected; more than 1% of them
/// fails the whole run.
pub fn monte_carlo(
    scenario: &Scenario,
    replicates: usize,
    kernel: &KernelChoice,
    family: &WeightFamily,
    alpha: f64,
) -> Result<MonteCarloReport> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be at least 1".into()));
    }
    let cert = family.certificate()?;

    let records: Vec<ReplicateRecord> = (0..replicates)
        .into_par_iter()
        .map(|i| -> Result<ReplicateRecord> {
            let replicate_scenario = Scenario {
                kind: scenario.kind,
                n: scenario.n,
                seed: derive_seed(scenario.seed, i as u64),
            };
            let sample = generate(&replicate_scenario)?;
            let spec = match kernel.resolve(&sample) {
                Ok(spec) => spec,
                Err(Error::DegenerateSample) => {
                    return Ok(ReplicateRecord {
                        replicate: i,
                        statistic: None,
                        reject: false,
                        ustat: None,
                        sigma_plugin: None,
                    });
                }
                Err(e) => return Err(e),
            };
            let gram = GramPair::new(&spec, &sample)?;
            let ustat = kcmd_ustat(&gram)?;
            let uv = empirical_uv(&gram)?;
            let plugin = sigma_gamma_plugin(&uv, &cert)?;
            match test_from_gram(&gram, &spec, family, alpha) {
                Ok(test) => Ok(ReplicateRecord {
                    replicate: i,
                    statistic: Some(test.statistic),
                    reject: test.reject,
                    ustat: Some(ustat),
                    sigma_plugin: Some(plugin),
                }),
                Err(Error::DegenerateVariance { .. }) => Ok(ReplicateRecord {
                    replicate: i,
                    statistic: None,
                    reject: false,
                    ustat: Some(ustat),
                    sigma_plugin: Some(plugin),
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let degenerate = records.iter().filter(|r| r.statistic.is_none()).count();
    if 100 * degenerate > replicates {
        return Err(Error::TooManyDegenerate {
            degenerate,
            replicates,
        });
    }

    let statistics: Vec<f64> = records.iter().filter_map(|r| r.statistic).collect();
    let rejects = records.iter().filter(|r| r.reject).count();
    let ustats: Vec<f64> = records.iter().filter_map(|r| r.ustat).collect();
    let plugins: Vec<f64> = records.iter().filter_map(|r| r.sigma_plugin).collect();

    let m = ustats.len() as f64;
    let mean_ustat = compensated_sum(ustats.iter().copied()) / m;
    let ustat_se = if ustats.len() > 1 {
        let var = compensated_sum(ustats.iter().map(|&u| {
            let d = u - mean_ustat;
            d * d
        })) / (m - 1.0);
        (var / m).sqrt()
    } else {
        0.0
    };

    Ok(MonteCarloReport {
        scenario: *scenario,
        replicates,
        alpha,
        kernel: *kernel,
        family: family.label().to_string(),
        gamma: family.gamma(),
        rejection_rate: rejects as f64 / replicates as f64,
        ks_distance_to_std_normal: ks_distance(statistics.clone()),
        statistics,
        mean_ustat,
        ustat_se,
        sigma_plugin: SummaryStats {
            mean: compensated_sum(plugins.iter().copied()) / plugins.len() as f64,
            min: plugins.iter().copied().fold(f64::INFINITY, f64::min),
            max: plugins.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        },
        degenerate_replicates: degenerate,
        per_replicate: records,
    })
}

/// One-sample Kolmogorov-Smirnov distance to the standard normal.
fn ks_distance(mut values: Vec<f64>) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let m = values.len() as f64;
    let mut d = 0.0f64;
    for (i, &z) in values.iter().enumerate() {
        let phi = normal_cdf(z);
        d = d.max(phi - i as f64 / m).max((i + 1) as f64 / m - phi);
    }
    d
}
