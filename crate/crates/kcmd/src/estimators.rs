//! KCMD estimators and the H₀ variance estimator, all O(n²) on a Gram pair.
//!
//! Writing G = gy, K = kx, rowGᵢ = Σ_q Gᵢ_q and rowKᵢ = Σ_j Kᵢⱼ, the naive
//! plug-in estimator factorizes as
//!
//!   (1/n²)Σᵢⱼ GᵢⱼKᵢⱼ + (1/n⁴)(ΣG)(ΣK) − (2/n³)Σᵢ rowGᵢ·rowKᵢ,
//!
//! which equals the direct triple/quadruple sums over index tuples. The
//! weighted variant multiplies the i-th cross term by wᵢ; the unbiased
//! U-statistic double-centers the off-diagonal Gram entries instead.
//!
//! Summation order is fixed (row-major, compensated), so results are
//! bitwise reproducible regardless of thread count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::GramPair;
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::weights::{WeightCertificate, WeightFamily};

/// Row sums of a Gram matrix, each accumulated left to right.
fn row_sums(m: &ndarray::Array2<f64>) -> Vec<f64> {
    m.rows()
        .into_iter()
        .map(|row| compensated_sum(row.iter().copied()))
        .collect()
}

/// Plug-in estimator: the squared Hilbert-Schmidt norm of the empirical
/// cross-covariance-style operator, hence ≥ 0 up to roundoff.
pub fn kcmd_naive(g: &GramPair) -> f64 {
    let n = g.n() as f64;
    let term1 = gram_product_sum(g) / (n * n);
    let row_g = row_sums(g.gy());
    let row_k = row_sums(g.kx());
    let sum_g = compensated_sum(row_g.iter().copied());
    let sum_k = compensated_sum(row_k.iter().copied());
    let term2 = (sum_g / (n * n)) * (sum_k / (n * n));
    let cross = compensated_sum(row_g.iter().zip(&row_k).map(|(&g_i, &k_i)| g_i * k_i));
    term1 + term2 - 2.0 * cross / (n * n * n)
}

/// Weighted estimator K̂ₙ,γ: the cross term carries per-observation weights,
/// −(2/n³)Σᵢ wᵢ·rowGᵢ·rowKᵢ. May be negative at finite n.
pub fn kcmd_weighted(g: &GramPair, weights: &[f64]) -> Result<f64> {
    let n = g.n();
    if weights.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    let nf = n as f64;
    let term1 = gram_product_sum(g) / (nf * nf);
    let row_g = row_sums(g.gy());
    let row_k = row_sums(g.kx());
    let sum_g = compensated_sum(row_g.iter().copied());
    let sum_k = compensated_sum(row_k.iter().copied());
    let term2 = (sum_g / (nf * nf)) * (sum_k / (nf * nf));
    let cross = compensated_sum(
        weights
            .iter()
            .zip(row_g.iter().zip(&row_k))
            .map(|(&w, (&g_i, &k_i))| w * g_i * k_i),
    );
    Ok(term1 + term2 - 2.0 * cross / (nf * nf * nf))
}

/// Unbiased U-statistic estimator KCMDₙ = (1/(n(n−3))) Σ_{i≠j} CᵢⱼDᵢⱼ.
///
/// Cᵢⱼ (and likewise Dᵢⱼ) is the U-centered version of the off-diagonal
/// kernel matrix cᵢⱼ = Kᵢⱼ·1[i≠j]: row means scaled by 1/(n−2), the grand
/// mean by 1/((n−1)(n−2)), and a zero diagonal. Requires n ≥ 4 so that every
/// normalizer is positive.
pub fn kcmd_ustat(g: &GramPair) -> Result<f64> {
    let n = g.n();
    if n < 4 {
        return Err(Error::SampleTooSmall { n, min: 4 });
    }
    let nf = n as f64;

    // Off-diagonal row sums and grand totals of c and d.
    let row_c: Vec<f64> = off_diagonal_row_sums(g.kx());
    let row_d: Vec<f64> = off_diagonal_row_sums(g.gy());
    let tot_c = compensated_sum(row_c.iter().copied());
    let tot_d = compensated_sum(row_d.iter().copied());

    let grand_c = tot_c / ((nf - 1.0) * (nf - 2.0));
    let grand_d = tot_d / ((nf - 1.0) * (nf - 2.0));

    let mut acc = CompensatedSum::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            // Symmetric matrices: column means equal row means.
            let c = g.kx()[(i, j)] - row_c[i] / (nf - 2.0) - row_c[j] / (nf - 2.0) + grand_c;
            let d = g.gy()[(i, j)] - row_d[i] / (nf - 2.0) - row_d[j] / (nf - 2.0) + grand_d;
            acc.add(c * d);
        }
    }
    Ok(acc.value() / (nf * (nf - 3.0)))
}

/// α̂²: the population-style variance (divisor n) of the per-observation row
/// statistics aᵢ = (1/n)Σⱼ GᵢⱼKᵢⱼ. Estimates the variance of
/// ⟨Yᵢ⊗K(Xᵢ,·), η⟩ that drives the H₀ limit.
pub fn alpha_hat_sq(g: &GramPair) -> f64 {
    let a = row_statistics(g);
    let n = g.n() as f64;
    let mean = compensated_sum(a.iter().copied()) / n;
    compensated_sum(a.iter().map(|&ai| {
        let d = ai - mean;
        d * d
    })) / n
}

/// σ̂²γ = 4(w²(γ) − 1)·α̂², the H₀ variance of √n·K̂ₙ,γ.
pub fn sigma_hat_sq(alpha_sq: f64, cert: &WeightCertificate) -> Result<f64> {
    if !(cert.w_squared > 1.0) {
        return Err(Error::InvalidCertificate {
            w_squared: cert.w_squared,
        });
    }
    if !(alpha_sq >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha_sq must be nonnegative, got {alpha_sq}"
        )));
    }
    Ok(4.0 * (cert.w_squared - 1.0) * alpha_sq)
}

/// Per-observation row statistics aᵢ = (1/n)Σⱼ GᵢⱼKᵢⱼ.
pub(crate) fn row_statistics(g: &GramPair) -> Vec<f64> {
    let n = g.n() as f64;
    (0..g.n())
        .map(|i| {
            compensated_sum(
                g.gy()
                    .row(i)
                    .iter()
                    .zip(g.kx().row(i))
                    .map(|(&gy, &kx)| gy * kx),
            ) / n
        })
        .collect()
}

/// Σᵢⱼ GᵢⱼKᵢⱼ in row-major order.
fn gram_product_sum(g: &GramPair) -> f64 {
    compensated_sum(g.gy().iter().zip(g.kx()).map(|(&gy, &kx)| gy * kx))
}

/// Row sums with the diagonal excluded.
fn off_diagonal_row_sums(m: &ndarray::Array2<f64>) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| {
            compensated_sum(
                m.row(i)
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &v)| v),
            )
        })
        .collect()
}

/// Every estimator the CLI reports for one dataset, plus the weight context
/// that produced the weighted value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateBundle {
    pub naive: f64,
    pub weighted: f64,
    pub ustat: f64,
    pub alpha_sq: f64,
    pub sigma_sq: f64,
    pub n: usize,
    pub family: String,
    pub gamma: Option<f64>,
}

/// Computes all estimators on one Gram pair. Requires n ≥ 4 (the U-statistic
/// does) and a certified weight family.
pub fn estimate_bundle(g: &GramPair, family: &WeightFamily) -> Result<EstimateBundle> {
    let n = g.n();
    if n < 4 {
        return Err(Error::SampleTooSmall { n, min: 4 });
    }
    let cert = family.certificate()?;
    let weights = family.generate(n);
    let alpha_sq = alpha_hat_sq(g);
    Ok(EstimateBundle {
        naive: kcmd_naive(g),
        weighted: kcmd_weighted(g, &weights)?,
        ustat: kcmd_ustat(g)?,
        alpha_sq,
        sigma_sq: sigma_hat_sq(alpha_sq, &cert)?,
        n,
        family: family.label().to_string(),
        gamma: family.gamma(),
    })
}
