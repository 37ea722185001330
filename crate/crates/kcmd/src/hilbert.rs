//! Observations in separable Hilbert spaces: finite-dimensional vectors or
//! curves discretized on a shared quadrature grid over [0, 1].
//!
//! Curve inner products use the trapezoidal rule, the only quadrature rule
//! offered; results are therefore directly comparable between
//! implementations. The two sides of a paired sample may use different grids,
//! but every curve on one side shares that side's grid.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

// =============================================================================
// Grid
// =============================================================================

/// Quadrature abscissae on [0, 1]: strictly increasing, endpoints exactly
/// 0 and 1, at least two points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::GridViolation(format!(
                "grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::GridViolation("grid contains a non-finite point".into()));
        }
        if points[0] != 0.0 {
            return Err(Error::GridViolation(format!(
                "grid must start at 0, got {}",
                points[0]
            )));
        }
        if *points.last().expect("len >= 2") != 1.0 {
            return Err(Error::GridViolation(format!(
                "grid must end at 1, got {}",
                points.last().expect("len >= 2")
            )));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::GridViolation("grid points must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// Uniform grid with `len` points; endpoints are exact.
    pub fn uniform(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::GridViolation(format!(
                "grid needs at least 2 points, got {len}"
            )));
        }
        let step = (len - 1) as f64;
        let mut points: Vec<f64> = (0..len).map(|i| i as f64 / step).collect();
        points[len - 1] = 1.0;
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires len >= 2
    }
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = Error;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        Grid::new(points)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(grid: Grid) -> Self {
        grid.points
    }
}

// =============================================================================
// HilbertPoint
// =============================================================================

/// A single observation: either a vector in R^d or a curve sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum HilbertPoint {
    Vector(Vec<f64>),
    Curve { values: Vec<f64>, grid: Arc<Grid> },
}

impl HilbertPoint {
    /// Vector observation; rejects empty and non-finite coordinates.
    pub fn vector(coordinates: Vec<f64>) -> Result<Self> {
        if coordinates.is_empty() {
            return Err(Error::InvalidParameter("vector must have dimension >= 1".into()));
        }
        if coordinates.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("vector coordinate".into()));
        }
        Ok(Self::Vector(coordinates))
    }

    /// Curve observation; values align with the grid points in order.
    pub fn curve(values: Vec<f64>, grid: Arc<Grid>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "curve has {} values but grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("curve value".into()));
        }
        Ok(Self::Curve { values, grid })
    }

    /// Dimension for vectors, number of grid points for curves.
    pub fn len(&self) -> usize {
        match self {
            Self::Vector(c) => c.len(),
            Self::Curve { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one coordinate
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        match (self, other) {
            (Self::Vector(a), Self::Vector(b)) => {
                if a.len() != b.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "vector dimensions differ: {} vs {}",
                        a.len(),
                        b.len()
                    )));
                }
                Ok(())
            }
            (Self::Curve { grid: ga, .. }, Self::Curve { grid: gb, .. }) => {
                if !Arc::ptr_eq(ga, gb) && ga != gb {
                    return Err(Error::ShapeMismatch("curves use different grids".into()));
                }
                Ok(())
            }
            _ => Err(Error::ShapeMismatch("cannot mix vector and curve observations".into())),
        }
    }

    /// Inner product of two observations of the same shape.
    ///
    /// Vectors use the Euclidean dot product. Curves use the trapezoidal
    /// approximation of the L²([0,1]) inner product:
    /// Σ_m ((s_{m+1}−s_m)/2)·(a(s_m)b(s_m) + a(s_{m+1})b(s_{m+1})).
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        match (self, other) {
            (Self::Vector(a), Self::Vector(b)) => {
                let mut acc = CompensatedSum::new();
                for (x, y) in a.iter().zip(b) {
                    acc.add(x * y);
                }
                Ok(acc.value())
            }
            (Self::Curve { values: a, grid, .. }, Self::Curve { values: b, .. }) => {
                Ok(trapezoid(grid.points(), |m| a[m] * b[m]))
            }
            _ => unreachable!("check_compatible rejects mixed variants"),
        }
    }

    /// Squared distance ‖a−b‖²; for curves, the trapezoidal approximation of
    /// ∫(a(t)−b(t))² dt. Nonnegative by construction (sum of nonnegative
    /// panel terms).
    pub fn squared_distance(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        match (self, other) {
            (Self::Vector(a), Self::Vector(b)) => {
                let mut acc = CompensatedSum::new();
                for (x, y) in a.iter().zip(b) {
                    let d = x - y;
                    acc.add(d * d);
                }
                Ok(acc.value())
            }
            (Self::Curve { values: a, grid, .. }, Self::Curve { values: b, .. }) => {
                Ok(trapezoid(grid.points(), |m| {
                    let d = a[m] - b[m];
                    d * d
                }))
            }
            _ => unreachable!("check_compatible rejects mixed variants"),
        }
    }
}

/// Trapezoidal sum of `f` over consecutive grid panels.
fn trapezoid(points: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let mut acc = CompensatedSum::new();
    let mut left = f(0);
    for m in 0..points.len() - 1 {
        let right = f(m + 1);
        acc.add(0.5 * (points[m + 1] - points[m]) * (left + right));
        left = right;
    }
    acc.value()
}

// =============================================================================
// Sample
// =============================================================================

/// Paired observations {(Xᵢ, Yᵢ)}: shapes are homogeneous within each side,
/// and the two sides have equal length n ≥ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    xs: Vec<HilbertPoint>,
    ys: Vec<HilbertPoint>,
}

impl Sample {
    pub fn new(xs: Vec<HilbertPoint>, ys: Vec<HilbertPoint>) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::SampleTooSmall { n: 0, min: 1 });
        }
        if xs.len() != ys.len() {
            return Err(Error::RowCountMismatch {
                x_rows: xs.len(),
                y_rows: ys.len(),
            });
        }
        for side in [&xs, &ys] {
            for p in &side[1..] {
                side[0].check_compatible(p)?;
            }
        }
        Ok(Self { xs, ys })
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn xs(&self) -> &[HilbertPoint] {
        &self.xs
    }

    pub fn ys(&self) -> &[HilbertPoint] {
        &self.ys
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(points: &[f64]) -> Arc<Grid> {
        Arc::new(Grid::new(points.to_vec()).unwrap())
    }

    #[test]
    fn grid_rejects_bad_endpoints_and_ordering() {
        assert!(Grid::new(vec![0.0]).is_err());
        assert!(Grid::new(vec![0.1, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.9]).is_err());
        assert!(Grid::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.5, 1.0]).is_ok());
    }

    #[test]
    fn uniform_grid_has_exact_endpoints() {
        let g = Grid::uniform(51).unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(g.points()[50], 1.0);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn vector_dot_product() {
        let a = HilbertPoint::vector(vec![1.0, 2.0]).unwrap();
        let b = HilbertPoint::vector(vec![3.0, -1.0]).unwrap();
        assert_eq!(a.inner_product(&b).unwrap(), 1.0);
    }

    #[test]
    fn constant_curves_integrate_exactly() {
        // Trapezoid is exact on constants over [0, 1].
        for pts in [vec![0.0, 1.0], vec![0.0, 0.3, 0.7, 1.0]] {
            let g = grid(&pts);
            let a = HilbertPoint::curve(vec![2.0; g.len()], Arc::clone(&g)).unwrap();
            let b = HilbertPoint::curve(vec![3.0; g.len()], Arc::clone(&g)).unwrap();
            assert_relative_eq!(a.inner_product(&b).unwrap(), 6.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn linear_curves_on_three_point_grid() {
        // Hand trapezoid of s² on {0, 0.5, 1}: 0.25·(0 + 0.25) + 0.25·(0.25 + 1).
        let g = grid(&[0.0, 0.5, 1.0]);
        let s = HilbertPoint::curve(vec![0.0, 0.5, 1.0], Arc::clone(&g)).unwrap();
        assert_relative_eq!(s.inner_product(&s).unwrap(), 0.375, max_relative = 1e-15);

        let zero = HilbertPoint::curve(vec![0.0; 3], Arc::clone(&g)).unwrap();
        assert_relative_eq!(s.squared_distance(&zero).unwrap(), 0.375, max_relative = 1e-15);
    }

    #[test]
    fn squared_distance_basics() {
        let a = HilbertPoint::vector(vec![1.0, 0.0]).unwrap();
        let b = HilbertPoint::vector(vec![0.0, 1.0]).unwrap();
        assert_eq!(a.squared_distance(&b).unwrap(), 2.0);
        assert_eq!(a.squared_distance(&a).unwrap(), 0.0);
    }

    #[test]
    fn mixed_shapes_are_rejected() {
        let v = HilbertPoint::vector(vec![1.0]).unwrap();
        let g = grid(&[0.0, 1.0]);
        let c = HilbertPoint::curve(vec![1.0, 1.0], Arc::clone(&g)).unwrap();
        assert!(matches!(v.inner_product(&c), Err(Error::ShapeMismatch(_))));

        let v2 = HilbertPoint::vector(vec![1.0, 2.0]).unwrap();
        assert!(v.inner_product(&v2).is_err());

        let other = grid(&[0.0, 0.5, 1.0]);
        let c2 = HilbertPoint::curve(vec![1.0, 1.0, 1.0], other).unwrap();
        assert!(c.inner_product(&c2).is_err());
    }

    #[test]
    fn non_finite_values_rejected_at_ingestion() {
        assert!(HilbertPoint::vector(vec![f64::NAN]).is_err());
        assert!(HilbertPoint::vector(vec![f64::INFINITY, 0.0]).is_err());
        let g = grid(&[0.0, 1.0]);
        assert!(HilbertPoint::curve(vec![1.0, f64::NEG_INFINITY], g).is_err());
    }

    #[test]
    fn sample_enforces_pairing_and_homogeneity() {
        let xs = vec![
            HilbertPoint::vector(vec![1.0, 2.0]).unwrap(),
            HilbertPoint::vector(vec![3.0, 4.0]).unwrap(),
        ];
        let ys = vec![
            HilbertPoint::vector(vec![0.0]).unwrap(),
            HilbertPoint::vector(vec![1.0]).unwrap(),
        ];
        assert!(Sample::new(xs.clone(), ys.clone()).is_ok());
        assert!(Sample::new(xs.clone(), ys[..1].to_vec()).is_err());

        let ragged = vec![
            HilbertPoint::vector(vec![1.0, 2.0]).unwrap(),
            HilbertPoint::vector(vec![3.0]).unwrap(),
        ];
        assert!(Sample::new(ragged, ys).is_err());
        assert!(Sample::new(vec![], vec![]).is_err());
    }
}
