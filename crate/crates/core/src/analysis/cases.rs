use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Point2, Vector2};

/// An exact solution of `-Δu = f` with its gradient and source; the boundary
/// data is `u` itself.
#[derive(Clone, Copy)]
pub struct ManufacturedCase {
    pub name: CaseName,
    pub u: fn(Point2<f64>) -> f64,
    pub grad: fn(Point2<f64>) -> Vector2<f64>,
    pub source: fn(Point2<f64>) -> f64,
    /// Polynomial degree of `u`, if it is a polynomial.
    pub polynomial_degree: Option<usize>,
}

impl fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedCase").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseName {
    /// `u = sin(pi x) sin(pi y)`
    Sin2d,
    /// `u = 2x + 3y - 1`
    PatchLinear,
    /// `u = x^2 - y^2`
    PatchQuadratic,
}

impl CaseName {
    pub const ALL: [CaseName; 3] = [CaseName::Sin2d, CaseName::PatchLinear, CaseName::PatchQuadratic];

    pub fn label(self) -> &'static str {
        match self {
            CaseName::Sin2d => "sin2d",
            CaseName::PatchLinear => "patch-linear",
            CaseName::PatchQuadratic => "patch-quadratic",
        }
    }

    pub fn case(self) -> ManufacturedCase {
        match self {
            CaseName::Sin2d => ManufacturedCase {
                name: self,
                u: |p| (PI * p.x).sin() * (PI * p.y).sin(),
                grad: |p| {
                    Vector2::new(
                        PI * (PI * p.x).cos() * (PI * p.y).sin(),
                        PI * (PI * p.x).sin() * (PI * p.y).cos(),
                    )
                },
                source: |p| 2.0 * PI * PI * (PI * p.x).sin() * (PI * p.y).sin(),
                polynomial_degree: None,
            },
            CaseName::PatchLinear => ManufacturedCase {
                name: self,
                u: |p| 2.0 * p.x + 3.0 * p.y - 1.0,
                grad: |_| Vector2::new(2.0, 3.0),
                source: |_| 0.0,
                polynomial_degree: Some(1),
            },
            CaseName::PatchQuadratic => ManufacturedCase {
                name: self,
                u: |p| p.x * p.x - p.y * p.y,
                grad: |p| Vector2::new(2.0 * p.x, -2.0 * p.y),
                source: |_| 0.0,
                polynomial_degree: Some(2),
            },
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CaseName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseName::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| format!("unknown case '{s}' (sin2d|patch-linear|patch-quadratic)"))
    }
}

impl ManufacturedCase {
    /// The discrete solution reproduces `Q_h u` exactly when `u` is a
    /// polynomial of degree `<= k + 1`.
    pub fn is_reproduced_by(&self, k: usize) -> bool {
        self.polynomial_degree.is_some_and(|d| d <= k + 1)
    }
}
