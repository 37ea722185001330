//! Factorized implementations against brute-force oracles on small inputs.

mod common;

use common::*;
use kcmd::diagnostics::{empirical_uv, sigma_gamma_plugin};
use kcmd::estimators::{alpha_hat_sq, kcmd_naive, kcmd_ustat, kcmd_weighted};
use kcmd::weights::WeightFamily;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn naive_matches_quadruple_sum_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for n in 1..=8 {
        for _ in 0..20 {
            let g = random_gram(&mut rng, n);
            let fast = kcmd_naive(&g);
            let slow = naive_oracle(&g);
            assert!(
                (fast - slow).abs() <= 1e-10,
                "n={n}: fast {fast} vs oracle {slow}"
            );
        }
    }
}

#[test]
fn weighted_matches_triple_sum_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let families = [
        WeightFamily::alternating(0.3).unwrap(),
        WeightFamily::sinusoidal(0.7).unwrap(),
    ];
    for n in 1..=8 {
        for family in &families {
            for _ in 0..10 {
                let g = random_gram(&mut rng, n);
                let w = family.generate(n);
                let fast = kcmd_weighted(&g, &w).unwrap();
                let slow = weighted_oracle(&g, &w);
                assert!(
                    (fast - slow).abs() <= 1e-10,
                    "n={n}: fast {fast} vs oracle {slow}"
                );
            }
        }
    }
}

#[test]
fn ustat_matches_u_centering_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for n in 4..=8 {
        for _ in 0..20 {
            let g = random_gram(&mut rng, n);
            let fast = kcmd_ustat(&g).unwrap();
            let slow = ustat_oracle(&g);
            assert!(
                (fast - slow).abs() <= 1e-10,
                "n={n}: fast {fast} vs oracle {slow}"
            );
        }
    }
}

#[test]
fn ustat_oracle_agrees_on_kernel_grams_too() {
    // Kernel-built Grams have unit diagonals and positive entries; make sure
    // nothing depends on the signed random inputs above.
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for n in [4, 6, 8] {
        let sample = random_vector_sample(&mut rng, n, 2, 3);
        let g = gram_from_sample(&sample, 0.8);
        assert!((kcmd_ustat(&g).unwrap() - ustat_oracle(&g)).abs() <= 1e-10);
        assert!((kcmd_naive(&g) - naive_oracle(&g)).abs() <= 1e-10);
    }
}

#[test]
fn alpha_matches_direct_variance_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for n in 1..=8 {
        for _ in 0..10 {
            let g = random_gram(&mut rng, n);
            let fast = alpha_hat_sq(&g);
            let slow = alpha_sq_oracle(&g);
            assert!(
                (fast - slow).abs() <= 1e-10,
                "n={n}: fast {fast} vs oracle {slow}"
            );
        }
    }
}

#[test]
fn empirical_uv_matches_coefficient_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for n in 2..=8 {
        let sample = random_vector_sample(&mut rng, n, 2, 2);
        let g = gram_from_sample(&sample, 1.0);
        let uv = empirical_uv(&g).unwrap();
        let (u_slow, v_slow) = uv_oracle(&g);
        for i in 0..n {
            assert!(
                (uv.u[i] - u_slow[i]).abs() <= 1e-10,
                "n={n}, u[{i}]: fast {} vs oracle {}",
                uv.u[i],
                u_slow[i]
            );
            assert!(
                (uv.v[i] - v_slow[i]).abs() <= 1e-10,
                "n={n}, v[{i}]: fast {} vs oracle {}",
                uv.v[i],
                v_slow[i]
            );
        }
    }
}

#[test]
fn plugin_matches_moment_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let family = WeightFamily::sinusoidal(0.4).unwrap();
    let cert = family.certificate().unwrap();
    for _ in 0..20 {
        let sample = random_vector_sample(&mut rng, 6, 3, 2);
        let g = gram_from_sample(&sample, 0.6);
        let uv = empirical_uv(&g).unwrap();
        let fast = sigma_gamma_plugin(&uv, &cert).unwrap();
        let slow = plugin_oracle(&uv.u, &uv.v, cert.w_squared);
        assert!(
            (fast - slow).abs() <= 1e-12 * (1.0 + slow.abs()),
            "fast {fast} vs oracle {slow}"
        );
    }
}
