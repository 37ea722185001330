//! Plug-in versions of the two influence functions behind the CLT for the
//! weighted estimator, and the limiting-variance formula built from them.
//!
//! With η̂ = (1/n)Σⱼ Yⱼ⊗K(Xⱼ,·), μ̂ = Ȳ, m̂_X = K̄ and ν̂ = Ȳ⊗K̄, the
//! functions are
//!
//!   𝒰̂(x,y) = ⟨y⊗K(x,·) − η̂, η̂⟩ + ⟨y⊗m̂_X + μ̂⊗K(x,·) − 2ν̂, ν̂ − η̂⟩
//!   𝒱̂(x,y) = ⟨y⊗K(x,·) − η̂, ν̂⟩
//!
//! evaluated at the sample points. No operator is ever materialized: every
//! Hilbert-Schmidt inner product reduces through ⟨y⊗f, y′⊗f′⟩ = ⟨y,y′⟩⟨f,f′⟩
//! and the reproducing identity to Gram entries and their row/grand sums,
//! keeping everything dimension-free and O(n²).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::row_statistics;
use crate::kernels::GramPair;
use crate::numeric::compensated_sum;
use crate::weights::WeightCertificate;

/// The empirical influence functions at each sample point, plus the inner
/// products between η̂ and ν̂ that tests use to detect the η̂ = ν̂ regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalUV {
    /// 𝒰̂(Xᵢ,Yᵢ) for i = 1..n.
    pub u: Vec<f64>,
    /// 𝒱̂(Xᵢ,Yᵢ) for i = 1..n.
    pub v: Vec<f64>,
    /// ‖η̂‖²_HS.
    pub eta_norm_sq: f64,
    /// ‖ν̂‖²_HS.
    pub nu_norm_sq: f64,
    /// ⟨η̂, ν̂⟩_HS.
    pub eta_nu: f64,
    /// ‖η̂ − ν̂‖²_HS; zero exactly when the two embeddings coincide.
    pub eta_nu_gap_sq: f64,
}

/// Evaluates 𝒰̂ and 𝒱̂ at every sample point. Requires n ≥ 2.
pub fn empirical_uv(g: &GramPair) -> Result<EmpiricalUV> {
    let n = g.n();
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    let nf = n as f64;
    let gy = g.gy();
    let kx = g.kx();

    let row_g: Vec<f64> = (0..n)
        .map(|i| compensated_sum(gy.row(i).iter().copied()))
        .collect();
    let row_k: Vec<f64> = (0..n)
        .map(|i| compensated_sum(kx.row(i).iter().copied()))
        .collect();
    let sum_g = compensated_sum(row_g.iter().copied());
    let sum_k = compensated_sum(row_k.iter().copied());

    // aᵢ = ⟨Yᵢ⊗K(Xᵢ,·), η̂⟩ and bᵢ = ⟨Yᵢ⊗K(Xᵢ,·), ν̂⟩.
    let a = row_statistics(g);
    let b: Vec<f64> = (0..n).map(|i| (row_g[i] / nf) * (row_k[i] / nf)).collect();

    let eta_norm_sq = compensated_sum(a.iter().copied()) / nf;
    let eta_nu = compensated_sum(b.iter().copied()) / nf;
    let nu_norm_sq = (sum_g / (nf * nf)) * (sum_k / (nf * nf));
    let eta_nu_gap_sq = eta_norm_sq - 2.0 * eta_nu + nu_norm_sq;

    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        // pᵢ = ⟨Yᵢ⊗m̂_X, η̂⟩, rᵢ = ⟨μ̂⊗K(Xᵢ,·), η̂⟩; their ν̂ analogues
        // factor through the grand sums.
        let p_i = compensated_sum(gy.row(i).iter().zip(&row_k).map(|(&g_ij, &rk)| g_ij * rk))
            / (nf * nf);
        let r_i = compensated_sum(kx.row(i).iter().zip(&row_g).map(|(&k_ij, &rg)| k_ij * rg))
            / (nf * nf);
        let q_i = (row_g[i] / nf) * (sum_k / (nf * nf));
        let t_i = (sum_g / (nf * nf)) * (row_k[i] / nf);

        let first = a[i] - eta_norm_sq;
        let second = (q_i + t_i - 2.0 * nu_norm_sq) - (p_i + r_i - 2.0 * eta_nu);
        u.push(first + second);
        v.push(b[i] - eta_nu);
    }

    Ok(EmpiricalUV {
        u,
        v,
        eta_norm_sq,
        nu_norm_sq,
        eta_nu,
        eta_nu_gap_sq,
    })
}

/// Plug-in limiting variance
/// σ̂²γ = 4·Var(𝒰̂) + 4·w²(γ)·Var(𝒱̂) − 8·Cov(𝒰̂,𝒱̂),
/// with divisor-n moments. Nonnegative up to roundoff whenever w²(γ) ≥ 1,
/// since it equals 4·Var(𝒰̂−𝒱̂) + 4(w²(γ)−1)·Var(𝒱̂).
pub fn sigma_gamma_plugin(uv: &EmpiricalUV, cert: &WeightCertificate) -> Result<f64> {
    let n = uv.u.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    let nf = n as f64;
    let mean_u = compensated_sum(uv.u.iter().copied()) / nf;
    let mean_v = compensated_sum(uv.v.iter().copied()) / nf;
    let var_u = compensated_sum(uv.u.iter().map(|&x| {
        let d = x - mean_u;
        d * d
    })) / nf;
    let var_v = compensated_sum(uv.v.iter().map(|&x| {
        let d = x - mean_v;
        d * d
    })) / nf;
    let cov = compensated_sum(
        uv.u
            .iter()
            .zip(&uv.v)
            .map(|(&x, &y)| (x - mean_u) * (y - mean_v)),
    ) / nf;
    Ok(4.0 * var_u + 4.0 * cert.w_squared * var_v - 8.0 * cov)
}
