use nalgebra::{Point2, Vector2};

use crate::polymesh::PolyMesh;

/// Exponents `(a, b)` of the 2D monomials of total degree `<= k`, ordered by
/// total degree and then by decreasing `a`.
pub fn monomial_exponents(k: usize) -> Vec<(usize, usize)> {
    (0..=k)
        .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
        .collect()
}

/// `dim P_k` in two variables.
pub fn scalar_dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Index of `x^a y^b` in [`monomial_exponents`] order.
pub fn monomial_index(a: usize, b: usize) -> usize {
    let d = a + b;
    scalar_dim(d) - (d + 1) + b
}

pub(crate) fn powers(x: f64, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    let mut v = 1.0;
    for _ in 0..=n {
        p.push(v);
        v *= x;
    }
    p
}

/// Centroid-centred, diameter-scaled monomials
/// `((x - x_T) / h_T)^a ((y - y_T) / h_T)^b` spanning `P_k(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellScalarBasis {
    pub cell: usize,
    pub k: usize,
    pub centroid: Point2<f64>,
    pub diameter: f64,
    pub exponents: Vec<(usize, usize)>,
}

impl CellScalarBasis {
    pub fn new(mesh: &PolyMesh, cell: usize, k: usize) -> Self {
        let g = mesh.geometry(cell);
        Self {
            cell,
            k,
            centroid: g.centroid,
            diameter: g.diameter,
            exponents: monomial_exponents(k),
        }
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn scaled(&self, p: Point2<f64>) -> (f64, f64) {
        (
            (p.x - self.centroid.x) / self.diameter,
            (p.y - self.centroid.y) / self.diameter,
        )
    }

    pub fn eval(&self, p: Point2<f64>) -> Vec<f64> {
        let (s, t) = self.scaled(p);
        let ps = powers(s, self.k);
        let pt = powers(t, self.k);
        self.exponents.iter().map(|&(a, b)| ps[a] * pt[b]).collect()
    }

    /// Physical gradients of the basis functions.
    pub fn grad(&self, p: Point2<f64>) -> Vec<Vector2<f64>> {
        let (s, t) = self.scaled(p);
        let ps = powers(s, self.k);
        let pt = powers(t, self.k);
        let inv_h = 1.0 / self.diameter;
        self.exponents
            .iter()
            .map(|&(a, b)| {
                let dx = if a > 0 { a as f64 * ps[a - 1] * pt[b] } else { 0.0 };
                let dy = if b > 0 { b as f64 * ps[a] * pt[b - 1] } else { 0.0 };
                Vector2::new(dx, dy) * inv_h
            })
            .collect()
    }

    pub fn eval_combination(&self, coeffs: &[f64], p: Point2<f64>) -> f64 {
        self.eval(p).iter().zip(coeffs).map(|(b, c)| b * c).sum()
    }
}

/// Monomials `t^j`, `j <= k`, in the scaled arc-length parameter
/// `t in [-1/2, 1/2]` of an edge, measured from its midpoint along the
/// stored edge orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeScalarBasis {
    pub edge: usize,
    pub k: usize,
    pub start: Point2<f64>,
    pub end: Point2<f64>,
}

impl EdgeScalarBasis {
    pub fn new(mesh: &PolyMesh, edge: usize, k: usize) -> Self {
        let [start, end] = mesh.edge_points(edge);
        Self { edge, k, start, end }
    }

    pub fn dim(&self) -> usize {
        self.k + 1
    }

    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    pub fn parameter(&self, p: Point2<f64>) -> f64 {
        let d = self.end - self.start;
        (p - self.start).dot(&d) / d.norm_squared() - 0.5
    }

    pub fn eval(&self, p: Point2<f64>) -> Vec<f64> {
        powers(self.parameter(p), self.k)
    }

    pub fn eval_combination(&self, coeffs: &[f64], p: Point2<f64>) -> f64 {
        self.eval(p).iter().zip(coeffs).map(|(b, c)| b * c).sum()
    }
}
