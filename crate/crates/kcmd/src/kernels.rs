//! Kernel evaluation, bandwidth selection, and Gram-matrix construction.
//!
//! A [`GramPair`] holds the two n×n matrices every estimator consumes:
//! `kx[i][j] = K(Xᵢ,Xⱼ)` and `gy[i][j] = ⟨Yᵢ,Yⱼ⟩`. Past this module the
//! vector/curve distinction is gone.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{HilbertPoint, Sample};

// =============================================================================
// Kernel specification
// =============================================================================

/// A concrete, fully resolved kernel.
///
/// The Gaussian kernel `exp(−ω²‖a−b‖²)` is bounded and characteristic, which
/// the test's validity requires; it is the default everywhere. The linear
/// kernel `⟨a,b⟩` is unbounded and exists only for analytic cross-checks; the
/// configuration layer demands an explicit override before using it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    Gaussian { omega: f64 },
    Linear,
}

impl KernelSpec {
    pub fn gaussian(omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gaussian bandwidth omega must be positive and finite, got {omega}"
            )));
        }
        Ok(Self::Gaussian { omega })
    }

    /// Whether `sup K(x,y)` is finite.
    pub fn is_bounded(&self) -> bool {
        matches!(self, Self::Gaussian { .. })
    }

    pub fn eval(&self, a: &HilbertPoint, b: &HilbertPoint) -> Result<f64> {
        match self {
            Self::Gaussian { omega } => {
                let d2 = a.squared_distance(b)?;
                Ok((-omega * omega * d2).exp())
            }
            Self::Linear => a.inner_product(b),
        }
    }
}

/// A kernel that may still need the data to fix its bandwidth.
///
/// `GaussianMedian` resolves to a Gaussian with the median-heuristic ω of the
/// sample at hand; the Monte Carlo driver re-resolves it per replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelChoice {
    GaussianMedian,
    Gaussian { omega: f64 },
    Linear,
}

impl KernelChoice {
    pub fn resolve(&self, sample: &Sample) -> Result<KernelSpec> {
        match self {
            Self::GaussianMedian => KernelSpec::gaussian(median_heuristic(sample)?),
            Self::Gaussian { omega } => KernelSpec::gaussian(*omega),
            Self::Linear => Ok(KernelSpec::Linear),
        }
    }
}

/// Median-heuristic bandwidth: ω² = 1 / median{‖Xᵢ−Xⱼ‖² : i<j, distance > 0},
/// with the midpoint rule for even counts. Zero distances are excluded; a
/// sample where all points coincide has no usable scale.
pub fn median_heuristic(sample: &Sample) -> Result<f64> {
    let n = sample.n();
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    let xs = sample.xs();
    let mut distances = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d2 = xs[i].squared_distance(&xs[j])?;
            if d2 > 0.0 {
                distances.push(d2);
            }
        }
    }
    if distances.is_empty() {
        return Err(Error::DegenerateSample);
    }
    distances.sort_unstable_by(f64::total_cmp);
    let m = distances.len();
    let median = if m % 2 == 1 {
        distances[m / 2]
    } else {
        0.5 * (distances[m / 2 - 1] + distances[m / 2])
    };
    Ok(1.0 / median.sqrt())
}

// =============================================================================
// Gram pair
// =============================================================================

/// The matrices `kx[i][j] = K(Xᵢ,Xⱼ)` and `gy[i][j] = ⟨Yᵢ,Yⱼ⟩`, exactly
/// symmetric because each upper-triangle entry is computed once and mirrored.
#[derive(Debug, Clone, PartialEq)]
pub struct GramPair {
    kx: Array2<f64>,
    gy: Array2<f64>,
}

impl GramPair {
    /// Builds both matrices from a sample.
    pub fn new(spec: &KernelSpec, sample: &Sample) -> Result<Self> {
        let kx = symmetric_matrix(sample.xs(), |a, b| spec.eval(a, b))?;
        let gy = symmetric_matrix(sample.ys(), |a, b| a.inner_product(b))?;
        Ok(Self { kx, gy })
    }

    /// Wraps precomputed matrices; used by tests that work with synthetic
    /// Gram pairs. Both must be square, of equal size, finite, and exactly
    /// symmetric.
    pub fn from_matrices(kx: Array2<f64>, gy: Array2<f64>) -> Result<Self> {
        for (name, m) in [("kx", &kx), ("gy", &gy)] {
            if m.nrows() != m.ncols() {
                return Err(Error::ShapeMismatch(format!(
                    "{name} is {}x{}, expected square",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("{name} entry")));
            }
            for i in 0..m.nrows() {
                for j in i + 1..m.ncols() {
                    if m[(i, j)] != m[(j, i)] {
                        return Err(Error::ShapeMismatch(format!(
                            "{name} is not symmetric at ({i},{j})"
                        )));
                    }
                }
            }
        }
        if kx.nrows() != gy.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "kx has n={}, gy has n={}",
                kx.nrows(),
                gy.nrows()
            )));
        }
        if kx.nrows() == 0 {
            return Err(Error::SampleTooSmall { n: 0, min: 1 });
        }
        Ok(Self { kx, gy })
    }

    pub fn n(&self) -> usize {
        self.kx.nrows()
    }

    pub fn kx(&self) -> &Array2<f64> {
        &self.kx
    }

    pub fn gy(&self) -> &Array2<f64> {
        &self.gy
    }
}

fn symmetric_matrix(
    points: &[HilbertPoint],
    f: impl Fn(&HilbertPoint, &HilbertPoint) -> Result<f64>,
) -> Result<Array2<f64>> {
    let n = points.len();
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = f(&points[i], &points[j])?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}
