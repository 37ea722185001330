//! Triangular weight arrays {w_{i,n}(γ)} and their regularity certificates.
//!
//! The weighted estimator owes its nondegenerate normal limit to weights
//! whose mean stays within τ/n of 1, which stay uniformly bounded, and whose
//! mean square converges to a limit w²(γ) strictly above 1. Each family ships
//! those constants as a [`WeightCertificate`]; [`WeightFamily::verify_conditions`]
//! re-checks them numerically for every n up to a cap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// A family of weight sequences indexed by sample size.
///
/// `ConstantOne` exists so tests can assert that unit weights collapse the
/// weighted estimator onto the naive one; its mean square is 1, not above 1,
/// so it carries no certificate and the inference path rejects it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightFamily {
    /// w_{i,n}(γ) = 1 + (−1)ⁱ γ, the simplest certified family.
    Alternating { gamma: f64 },
    /// w_{i,n}(γ) = 1 + sin(iπγ).
    Sinusoidal { gamma: f64 },
    /// w_{i,n} = 1; testing only.
    ConstantOne,
}

/// Constants certifying the weight conditions for a family:
/// n|mean(w) − 1| ≤ `tau` for all n, max wᵢ ≤ `c_bound`, and
/// (1/n)Σwᵢ² → `w_squared` > 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightCertificate {
    pub tau: f64,
    pub c_bound: f64,
    pub w_squared: f64,
}

impl WeightFamily {
    pub fn alternating(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self::Alternating { gamma })
    }

    pub fn sinusoidal(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self::Sinusoidal { gamma })
    }

    pub fn gamma(&self) -> Option<f64> {
        match self {
            Self::Alternating { gamma } | Self::Sinusoidal { gamma } => Some(*gamma),
            Self::ConstantOne => None,
        }
    }

    /// Short tag used in reports and serialized results.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Alternating { .. } => "alternating",
            Self::Sinusoidal { .. } => "sinusoidal",
            Self::ConstantOne => "constant_one",
        }
    }

    /// The weight array for sample size `n`; formulas use 1-based index i.
    pub fn generate(&self, n: usize) -> Vec<f64> {
        (1..=n)
            .map(|i| match self {
                Self::Alternating { gamma } => {
                    if i % 2 == 0 {
                        1.0 + gamma
                    } else {
                        1.0 - gamma
                    }
                }
                Self::Sinusoidal { gamma } => 1.0 + (i as f64 * std::f64::consts::PI * gamma).sin(),
                Self::ConstantOne => 1.0,
            })
            .collect()
    }

    /// The family's certified constants.
    ///
    /// Alternating: τ = 1 (the partial sums of (−1)ⁱγ never exceed γ < 1),
    /// C = 2, w²(γ) = 1 + γ². Sinusoidal: τ = 1/|sin(πγ/2)| (geometric-sum
    /// bound on Σ sin(iπγ)), C = 2, w²(γ) = 3/2.
    pub fn certificate(&self) -> Result<WeightCertificate> {
        match self {
            Self::Alternating { gamma } => Ok(WeightCertificate {
                tau: 1.0,
                c_bound: 2.0,
                w_squared: 1.0 + gamma * gamma,
            }),
            Self::Sinusoidal { gamma } => Ok(WeightCertificate {
                tau: 1.0 / (std::f64::consts::FRAC_PI_2 * gamma).sin().abs(),
                c_bound: 2.0,
                w_squared: 1.5,
            }),
            Self::ConstantOne => Err(Error::UnsupportedFamily("constant_one".into())),
        }
    }

    /// Checks the certified conditions numerically for every n ≤ `n_max`.
    ///
    /// `ConstantOne` is checked against (τ=1, C=2, w²=1) so the report can
    /// show its mean-square failure.
    pub fn verify_conditions(&self, n_max: usize) -> ConditionReport {
        let cert = self.certificate().unwrap_or(WeightCertificate {
            tau: 1.0,
            c_bound: 2.0,
            w_squared: 1.0,
        });
        let weights = self.generate(n_max.max(1));

        let mut sum_w = CompensatedSum::new();
        let mut sum_sq = CompensatedSum::new();
        let mut max_weight = f64::NEG_INFINITY;
        let mut min_weight = f64::INFINITY;
        let mut worst_dev = 0.0f64;
        let mut worst_dev_n = 0usize;
        for (idx, &w) in weights.iter().enumerate() {
            let n = idx + 1;
            sum_w.add(w);
            sum_sq.add(w * w);
            max_weight = max_weight.max(w);
            min_weight = min_weight.min(w);
            // n|mean − 1| computed as |Σw − n|, the better-conditioned form.
            let dev = (sum_w.value() - n as f64).abs();
            if dev > worst_dev {
                worst_dev = dev;
                worst_dev_n = n;
            }
        }
        let n = n_max.max(1) as f64;
        let mean_square_gap = (sum_sq.value() / n - cert.w_squared).abs();

        // The sinusoidal family attains its bound C = 2 exactly at resonant
        // indices; uniform boundedness is a closed inequality here.
        let mean_deviation_holds = worst_dev <= cert.tau;
        let bounded_holds = max_weight <= cert.c_bound;
        let mean_square_exceeds_one = cert.w_squared > 1.0;

        ConditionReport {
            family: self.label().to_string(),
            gamma: self.gamma(),
            n_max: n_max.max(1),
            tau: cert.tau,
            c_bound: cert.c_bound,
            w_squared: cert.w_squared,
            mean_deviation_holds,
            worst_mean_deviation: worst_dev,
            worst_mean_deviation_n: worst_dev_n,
            bounded_holds,
            max_weight,
            min_weight,
            mean_square_exceeds_one,
            mean_square_gap,
            all_hold: mean_deviation_holds && bounded_holds && mean_square_exceeds_one,
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma <= 0.0 || gamma >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie strictly in (0, 1), got {gamma}"
        )));
    }
    Ok(())
}

/// Outcome of checking the weight conditions numerically up to `n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub family: String,
    pub gamma: Option<f64>,
    pub n_max: usize,
    pub tau: f64,
    pub c_bound: f64,
    pub w_squared: f64,
    /// n|mean(w) − 1| ≤ τ held for every n ≤ n_max.
    pub mean_deviation_holds: bool,
    pub worst_mean_deviation: f64,
    pub worst_mean_deviation_n: usize,
    /// max wᵢ ≤ C over all i ≤ n_max.
    pub bounded_holds: bool,
    pub max_weight: f64,
    pub min_weight: f64,
    /// The certified limit w²(γ) exceeds 1.
    pub mean_square_exceeds_one: bool,
    /// |(1/n)Σwᵢ² − w²(γ)| at n = n_max.
    pub mean_square_gap: f64,
    pub all_hold: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_domain_is_open() {
        assert!(WeightFamily::alternating(0.0).is_err());
        assert!(WeightFamily::alternating(1.0).is_err());
        assert!(WeightFamily::sinusoidal(-0.1).is_err());
        assert!(WeightFamily::sinusoidal(f64::NAN).is_err());
        assert!(WeightFamily::alternating(0.5).is_ok());
    }

    #[test]
    fn alternating_half_gamma_weights() {
        let f = WeightFamily::alternating(0.5).unwrap();
        assert_eq!(f.generate(4), vec![0.5, 1.5, 0.5, 1.5]);
    }

    #[test]
    fn sinusoidal_half_gamma_weights() {
        // 1 + sin(iπ/2) for i = 1..4; the peak touches the bound C = 2.
        let f = WeightFamily::sinusoidal(0.5).unwrap();
        let w = f.generate(4);
        assert_relative_eq!(w[0], 2.0, max_relative = 1e-15);
        assert_relative_eq!(w[1], 1.0, max_relative = 1e-15);
        assert!(w[2].abs() < 1e-15);
        assert_relative_eq!(w[3], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn constant_one_weights() {
        let f = WeightFamily::ConstantOne;
        assert_eq!(f.generate(3), vec![1.0, 1.0, 1.0]);
        assert!(matches!(f.certificate(), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn alternating_certificate() {
        let cert = WeightFamily::alternating(0.5).unwrap().certificate().unwrap();
        assert_eq!(cert.tau, 1.0);
        assert_eq!(cert.c_bound, 2.0);
        assert_eq!(cert.w_squared, 1.25);
    }

    #[test]
    fn sinusoidal_certificate() {
        let cert = WeightFamily::sinusoidal(0.5).unwrap().certificate().unwrap();
        assert_relative_eq!(cert.tau, std::f64::consts::SQRT_2, max_relative = 1e-15);
        assert_eq!(cert.c_bound, 2.0);
        assert_eq!(cert.w_squared, 1.5);
    }

    #[test]
    fn alternating_mean_is_one_at_even_n() {
        for gamma in [0.1, 0.3, 0.5, 0.9] {
            let f = WeightFamily::alternating(gamma).unwrap();
            let w = f.generate(1000);
            let sum = crate::numeric::compensated_sum(w.iter().copied());
            assert_eq!(sum, 1000.0);
        }
    }

    #[test]
    fn alternating_mean_square_exact_at_representable_gamma() {
        // gamma = 0.5 keeps every intermediate exactly representable.
        let f = WeightFamily::alternating(0.5).unwrap();
        let w = f.generate(4);
        let mean_sq: f64 = w.iter().map(|w| w * w).sum::<f64>() / 4.0;
        assert_eq!(mean_sq, 1.25);
    }

    #[test]
    fn verify_conditions_certified_families() {
        let rep = WeightFamily::alternating(0.5).unwrap().verify_conditions(10_000);
        assert!(rep.all_hold);
        assert!(rep.worst_mean_deviation <= 1.0);
        assert!(rep.max_weight <= 2.0);
        assert!(rep.min_weight >= 0.0);
        assert!(rep.mean_square_gap <= 0.25 / 10_000.0 + 1e-12);

        let rep = WeightFamily::sinusoidal(0.5).unwrap().verify_conditions(10_000);
        assert!(rep.all_hold);
        assert_eq!(rep.max_weight, 2.0); // attained at resonant indices
    }

    #[test]
    fn verify_conditions_constant_one_fails_mean_square() {
        let rep = WeightFamily::ConstantOne.verify_conditions(100);
        assert!(rep.mean_deviation_holds);
        assert!(rep.bounded_holds);
        assert!(!rep.mean_square_exceeds_one);
        assert!(!rep.all_hold);
    }
}
