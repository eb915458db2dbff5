//! Gauss rules on the unit segment and collapsed (Duffy) Gauss rules on the
//! reference triangle, plus helpers that integrate over mapped edges and
//! sub-triangulated cells.

use std::iter::Sum;
use std::ops::Mul;
use std::sync::OnceLock;

use nalgebra::Point2;
use thiserror::Error;

use crate::polymesh::{PolyMesh, SubTriangulation};

/// Highest polynomial degree for which a segment rule is provided.
pub const MAX_SEGMENT_DEGREE: usize = 40;
/// Highest polynomial degree for which a triangle rule is provided.
pub const MAX_TRIANGLE_DEGREE: usize = 25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("unsupported {domain} quadrature degree {degree} (maximum {max})")]
    UnsupportedDegree {
        domain: &'static str,
        degree: usize,
        max: usize,
    },
}

/// A quadrature rule on a reference domain of dimension `D`.
///
/// Segment rules live on `[0, 1]`, triangle rules on the reference triangle
/// with vertices `(0,0), (1,0), (0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl<const D: usize> QuadRule<D> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; D], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton iteration
/// on the three-term recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = theta.cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn build_segment_rule(degree: usize) -> QuadRule<1> {
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    QuadRule {
        points: x.iter().map(|&t| [0.5 * (t + 1.0)]).collect(),
        weights: w.iter().map(|&wi| 0.5 * wi).collect(),
        exact_degree: degree,
    }
}

fn build_triangle_rule(degree: usize) -> QuadRule<2> {
    // Collapsed tensor rule: x = u, y = v (1 - u), dA = (1 - u) du dv.
    // The u-direction carries the extra (1 - u) factor, hence one degree more.
    let u_rule = build_segment_rule(degree + 1);
    let v_rule = build_segment_rule(degree);
    let mut points = Vec::with_capacity(u_rule.len() * v_rule.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for (&[u], wu) in u_rule.iter() {
        for (&[v], wv) in v_rule.iter() {
            points.push([u, v * (1.0 - u)]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    QuadRule {
        points,
        weights,
        exact_degree: degree,
    }
}

fn segment_table() -> &'static [QuadRule<1>] {
    static TABLE: OnceLock<Vec<QuadRule<1>>> = OnceLock::new();
    TABLE.get_or_init(|| (0..=MAX_SEGMENT_DEGREE).map(build_segment_rule).collect())
}

fn triangle_table() -> &'static [QuadRule<2>] {
    static TABLE: OnceLock<Vec<QuadRule<2>>> = OnceLock::new();
    TABLE.get_or_init(|| (0..=MAX_TRIANGLE_DEGREE).map(build_triangle_rule).collect())
}

/// Gauss rule on `[0, 1]` with `degree / 2 + 1` points, exact for `P_degree`.
pub fn segment_rule(degree: usize) -> Result<&'static QuadRule<1>, QuadratureError> {
    segment_table()
        .get(degree)
        .ok_or(QuadratureError::UnsupportedDegree {
            domain: "segment",
            degree,
            max: MAX_SEGMENT_DEGREE,
        })
}

/// Rule on the reference triangle exact for `P_degree`.
pub fn triangle_rule(degree: usize) -> Result<&'static QuadRule<2>, QuadratureError> {
    triangle_table()
        .get(degree)
        .ok_or(QuadratureError::UnsupportedDegree {
            domain: "triangle",
            degree,
            max: MAX_TRIANGLE_DEGREE,
        })
}

/// Integrates `f` over the straight segment `a -> b` with arc-length weight.
pub fn integrate_segment<T, F>(
    a: Point2<f64>,
    b: Point2<f64>,
    f: F,
    degree: usize,
) -> Result<T, QuadratureError>
where
    T: Sum<T> + Mul<f64, Output = T>,
    F: Fn(Point2<f64>) -> T,
{
    let rule = segment_rule(degree)?;
    let length = (b - a).norm();
    Ok(rule
        .iter()
        .map(|(&[t], w)| f(a + (b - a) * t) * (w * length))
        .sum())
}

/// Integrates `f` over the triangle `tri` through the affine map from the
/// reference triangle.
pub fn integrate_triangle<T, F>(
    tri: [Point2<f64>; 3],
    f: F,
    degree: usize,
) -> Result<T, QuadratureError>
where
    T: Sum<T> + Mul<f64, Output = T>,
    F: Fn(Point2<f64>) -> T,
{
    let rule = triangle_rule(degree)?;
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let jac = (e1.x * e2.y - e1.y * e2.x).abs();
    Ok(rule
        .iter()
        .map(|(&[s, t], w)| f(tri[0] + e1 * s + e2 * t) * (w * jac))
        .sum())
}

/// Physical quadrature points and weights on a triangle.
pub fn triangle_points(
    tri: [Point2<f64>; 3],
    degree: usize,
) -> Result<Vec<(Point2<f64>, f64)>, QuadratureError> {
    let rule = triangle_rule(degree)?;
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let jac = (e1.x * e2.y - e1.y * e2.x).abs();
    Ok(rule
        .iter()
        .map(|(&[s, t], w)| (tri[0] + e1 * s + e2 * t, w * jac))
        .collect())
}

/// Physical quadrature points and arc-length weights on a segment.
pub fn segment_points(
    a: Point2<f64>,
    b: Point2<f64>,
    degree: usize,
) -> Result<Vec<(Point2<f64>, f64)>, QuadratureError> {
    let rule = segment_rule(degree)?;
    let length = (b - a).norm();
    Ok(rule
        .iter()
        .map(|(&[t], w)| (a + (b - a) * t, w * length))
        .collect())
}

/// Integrates `f` over a polygonal cell by summing over its sub-triangles.
/// Exact for piecewise polynomials of total degree `<= degree`.
pub fn integrate_cell<T, F>(
    mesh: &PolyMesh,
    subtri: &SubTriangulation,
    f: F,
    degree: usize,
) -> Result<T, QuadratureError>
where
    T: Sum<T> + Mul<f64, Output = T>,
    F: Fn(Point2<f64>) -> T,
{
    let parts = subtri
        .triangles
        .iter()
        .map(|t| integrate_triangle(mesh.triangle_points(*t), &f, degree))
        .collect::<Result<Vec<T>, _>>()?;
    Ok(parts.into_iter().sum())
}

/// Integrates `f` over mesh edge `edge`, parametrized along its stored
/// orientation.
pub fn integrate_edge<T, F>(
    mesh: &PolyMesh,
    edge: usize,
    f: F,
    degree: usize,
) -> Result<T, QuadratureError>
where
    T: Sum<T> + Mul<f64, Output = T>,
    F: Fn(Point2<f64>) -> T,
{
    let [a, b] = mesh.edge_points(edge);
    integrate_segment(a, b, f, degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    #[test]
    fn midpoint_rule() {
        let r = segment_rule(1).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.points[0][0] - 0.5).abs() < 1e-16);
        assert!((r.weights[0] - 1.0).abs() < 1e-16);
    }

    #[test]
    fn segment_monomials() {
        let r2 = segment_rule(2).unwrap();
        let v: f64 = r2.iter().map(|(p, w)| w * p[0].powi(2)).sum();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let r9 = segment_rule(9).unwrap();
        let v: f64 = r9.iter().map(|(p, w)| w * p[0].powi(9)).sum();
        assert!((v - 0.1).abs() < 1e-14);
    }

    #[test]
    fn segment_exactness_sweep() {
        for deg in 0..=MAX_SEGMENT_DEGREE {
            let r = segment_rule(deg).unwrap();
            assert_eq!(r.len(), (deg + 1).div_ceil(2));
            for a in 0..=deg {
                let v: f64 = r.iter().map(|(p, w)| w * p[0].powi(a as i32)).sum();
                let exact = 1.0 / (a as f64 + 1.0);
                assert!(
                    ((v - exact) / exact).abs() < 1e-13,
                    "degree {deg}, monomial {a}: {v} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn triangle_basics() {
        let r = triangle_rule(0).unwrap();
        let area: f64 = r.weights.iter().sum();
        assert!((area - 0.5).abs() < 1e-15);
        let r2 = triangle_rule(2).unwrap();
        let xy: f64 = r2.iter().map(|(p, w)| w * p[0] * p[1]).sum();
        assert!((xy - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_exactness_sweep() {
        for deg in 0..=MAX_TRIANGLE_DEGREE {
            let r = triangle_rule(deg).unwrap();
            for a in 0..=deg {
                for b in 0..=(deg - a) {
                    let v: f64 = r
                        .iter()
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    assert!(
                        ((v - exact) / exact).abs() < 1e-13,
                        "degree {deg}, x^{a} y^{b}: {v} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn unsupported_degrees() {
        assert!(segment_rule(MAX_SEGMENT_DEGREE + 1).is_err());
        assert!(triangle_rule(MAX_TRIANGLE_DEGREE + 1).is_err());
    }

    #[test]
    fn segment_integrals_with_arclength() {
        let a = Point2::new(1.0, 1.0);
        let b = Point2::new(4.0, 5.0);
        let len: f64 = integrate_segment(a, b, |_| 1.0, 0).unwrap();
        assert!((len - 5.0).abs() < 1e-14);
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(1.0, 0.0);
        let t: f64 = integrate_segment(a, b, |p| p.x, 1).unwrap();
        assert!((t - 0.5).abs() < 1e-15);
        let t3: f64 = integrate_segment(a, b, |p| p.x.powi(3), 3).unwrap();
        assert!((t3 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn affine_map_matches_pullback() {
        // p(x, y) = x^2 y + 3 y^3 - x on a skewed triangle, integrated directly and
        // through the explicit pullback to the reference triangle.
        let tri = [
            Point2::new(0.3, -0.2),
            Point2::new(1.7, 0.4),
            Point2::new(0.1, 1.3),
        ];
        let p = |q: Point2<f64>| q.x * q.x * q.y + 3.0 * q.y.powi(3) - q.x;
        let direct: f64 = integrate_triangle(tri, p, 3).unwrap();
        let e1 = tri[1] - tri[0];
        let e2 = tri[2] - tri[0];
        let det = (e1.x * e2.y - e1.y * e2.x).abs();
        let r = triangle_rule(3).unwrap();
        let pulled: f64 = r
            .iter()
            .map(|(s, w)| w * det * p(tri[0] + e1 * s[0] + e2 * s[1]))
            .sum();
        assert!(((direct - pulled) / pulled).abs() < 1e-13);
    }
}
