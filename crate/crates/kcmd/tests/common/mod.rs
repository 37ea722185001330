//! Brute-force oracles and input generators shared by the integration tests.
//!
//! Every oracle recomputes its quantity from the printed definition with
//! plain nested loops and no shared intermediates, so agreement with the
//! factorized O(n²) implementations is meaningful evidence. Costs up to
//! O(n⁴) per call (O(n⁵) for the u/v oracle) are fine at the n ≤ 16 sizes
//! used here.

#![allow(dead_code)]

use kcmd::hilbert::{HilbertPoint, Sample};
use kcmd::kernels::{GramPair, KernelSpec};
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

// =============================================================================
// Estimator oracles
// =============================================================================

/// Plug-in estimator as the literal three-sum expansion of the squared HS
/// norm: double, quadruple, and triple index sums.
pub fn naive_oracle(g: &GramPair) -> f64 {
    weighted_oracle(g, &vec![1.0; g.n()])
}

/// Weighted estimator with w_i inside the cross-product sum.
pub fn weighted_oracle(g: &GramPair, w: &[f64]) -> f64 {
    let n = g.n();
    let nf = n as f64;
    let (kx, gy) = (g.kx(), g.gy());

    let mut term1 = 0.0;
    for i in 0..n {
        for j in 0..n {
            term1 += gy[[i, j]] * kx[[i, j]];
        }
    }
    term1 /= nf.powi(2);

    let mut term2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for q in 0..n {
                for r in 0..n {
                    term2 += gy[[q, r]] * kx[[i, j]];
                }
            }
        }
    }
    term2 /= nf.powi(4);

    let mut term3 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for q in 0..n {
                term3 += w[i] * gy[[i, q]] * kx[[i, j]];
            }
        }
    }
    term3 *= 2.0 / nf.powi(3);

    term1 + term2 - term3
}

/// Unbiased estimator from the U-centered matrices, with row means, column
/// means, and grand means each computed by their own loop.
pub fn ustat_oracle(g: &GramPair) -> f64 {
    let n = g.n();
    assert!(n >= 4, "oracle needs n >= 4");
    let nf = n as f64;

    let centered = |m: &Array2<f64>| -> Array2<f64> {
        let mut raw = m.clone();
        for i in 0..n {
            raw[[i, i]] = 0.0;
        }
        let mut row = vec![0.0; n];
        let mut col = vec![0.0; n];
        let mut grand = 0.0;
        for i in 0..n {
            for j in 0..n {
                row[i] += raw[[i, j]];
                col[j] += raw[[i, j]];
                grand += raw[[i, j]];
            }
        }
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out[[i, j]] = raw[[i, j]] - row[i] / (nf - 2.0) - col[j] / (nf - 2.0)
                        + grand / ((nf - 1.0) * (nf - 2.0));
                }
            }
        }
        out
    };

    let c = centered(g.kx());
    let d = centered(g.gy());
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += c[[i, j]] * d[[i, j]];
            }
        }
    }
    acc / (nf * (nf - 3.0))
}

/// Variance of the per-observation statistic a_i = (1/n)Σ_j G_ij K_ij around
/// the grand mean, divisor n.
pub fn alpha_sq_oracle(g: &GramPair) -> f64 {
    let n = g.n();
    let nf = n as f64;
    let (kx, gy) = (g.kx(), g.gy());

    let mut grand = 0.0;
    for m in 0..n {
        for p in 0..n {
            grand += gy[[m, p]] * kx[[m, p]];
        }
    }
    grand /= nf.powi(2);

    let mut acc = 0.0;
    for i in 0..n {
        let mut a_i = 0.0;
        for j in 0..n {
            a_i += gy[[i, j]] * kx[[i, j]];
        }
        a_i /= nf;
        acc += (a_i - grand).powi(2);
    }
    acc / nf
}

// =============================================================================
// Empirical u/v oracle via materialized coefficient matrices
// =============================================================================

/// Every operator in sight is a combination of the rank-one atoms
/// Y_j ⊗ K(X_l,·), so it can be materialized as an n×n coefficient matrix
/// over that basis; HS inner products then expand into quadruple sums
/// against the two Gram matrices.
fn hs_product(g: &GramPair, m: &Array2<f64>, p: &Array2<f64>) -> f64 {
    let n = g.n();
    let (kx, gy) = (g.kx(), g.gy());
    let mut acc = 0.0;
    for j in 0..n {
        for l in 0..n {
            if m[[j, l]] == 0.0 {
                continue;
            }
            for q in 0..n {
                for r in 0..n {
                    acc += m[[j, l]] * p[[q, r]] * gy[[j, q]] * kx[[l, r]];
                }
            }
        }
    }
    acc
}

/// Direct evaluation of the empirical u_i, v_i from their operator
/// definitions:
///   u(x,y) = ⟨y⊗K(x,·) − η, η⟩ + ⟨y⊗m + μ⊗K(x,·) − 2ν, ν − η⟩,
///   v(x,y) = ⟨y⊗K(x,·) − η, ν⟩,
/// with η, ν, μ, m replaced by their sample versions.
pub fn uv_oracle(g: &GramPair) -> (Vec<f64>, Vec<f64>) {
    let n = g.n();
    let nf = n as f64;

    let mut eta = Array2::zeros((n, n));
    for j in 0..n {
        eta[[j, j]] = 1.0 / nf;
    }
    let nu = Array2::from_elem((n, n), 1.0 / (nf * nf));

    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let mut atom = Array2::zeros((n, n));
        atom[[i, i]] = 1.0;
        // y_i ⊗ m̂: row i filled with 1/n. μ̂ ⊗ K(x_i,·): column i with 1/n.
        let mut y_m = Array2::zeros((n, n));
        let mut mu_k = Array2::zeros((n, n));
        for l in 0..n {
            y_m[[i, l]] = 1.0 / nf;
            mu_k[[l, i]] = 1.0 / nf;
        }

        let u_i = hs_product(g, &(&atom - &eta), &eta)
            + hs_product(g, &(&y_m + &mu_k - &(&nu * 2.0)), &(&nu - &eta));
        let v_i = hs_product(g, &(&atom - &eta), &nu);
        u.push(u_i);
        v.push(v_i);
    }
    (u, v)
}

/// 4Var(u) + 4w²Var(v) − 8Cov(u,v) with divisor-n moments, double loops.
pub fn plugin_oracle(u: &[f64], v: &[f64], w_squared: f64) -> f64 {
    let n = u.len() as f64;
    let mean_u: f64 = u.iter().sum::<f64>() / n;
    let mean_v: f64 = v.iter().sum::<f64>() / n;
    let var_u: f64 = u.iter().map(|x| (x - mean_u).powi(2)).sum::<f64>() / n;
    let var_v: f64 = v.iter().map(|x| (x - mean_v).powi(2)).sum::<f64>() / n;
    let cov: f64 = u
        .iter()
        .zip(v)
        .map(|(a, b)| (a - mean_u) * (b - mean_v))
        .sum::<f64>()
        / n;
    4.0 * var_u + 4.0 * w_squared * var_v - 8.0 * cov
}

// =============================================================================
// Input generators
// =============================================================================

/// Random symmetric Gram-like matrices. The estimators' algebra never uses
/// positive definiteness, so arbitrary symmetric inputs exercise more of the
/// space than kernel-generated ones.
pub fn random_gram(rng: &mut impl Rng, n: usize) -> GramPair {
    let sym = |rng: &mut dyn FnMut() -> f64| {
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..=i {
                let value = rng();
                m[[i, j]] = value;
                m[[j, i]] = value;
            }
        }
        m
    };
    let kx = sym(&mut || rng.random_range(-2.0..2.0));
    let gy = sym(&mut || rng.random_range(-2.0..2.0));
    GramPair::from_matrices(kx, gy).expect("random symmetric matrices are valid")
}

pub fn random_vector_sample(rng: &mut impl Rng, n: usize, dx: usize, dy: usize) -> Sample {
    let point = |rng: &mut dyn FnMut() -> f64, d: usize| {
        HilbertPoint::vector((0..d).map(|_| rng()).collect()).unwrap()
    };
    let xs = (0..n)
        .map(|_| point(&mut || rng.sample(StandardNormal), dx))
        .collect();
    let ys = (0..n)
        .map(|_| point(&mut || rng.sample(StandardNormal), dy))
        .collect();
    Sample::new(xs, ys).unwrap()
}

pub fn gram_from_sample(sample: &Sample, omega: f64) -> GramPair {
    GramPair::new(&KernelSpec::gaussian(omega).unwrap(), sample).unwrap()
}
