//! Raviart-Thomas spaces `RT_k = [P_k]^2 + x P~_k` on the sub-triangles of a
//! cell. All pieces share the cell's scaled coordinates, so the same shape
//! functions serve every sub-triangle and divergences land directly in the
//! cell's scaled monomial basis of `P_k(T)`.

use nalgebra::{DMatrix, Point2, Vector2};

use super::scalar::{monomial_exponents, monomial_index, powers, scalar_dim, CellScalarBasis};
use super::LocalSpaceError;
use crate::polymesh::{signed_area, PolyMesh, SubTriangulation};
use crate::quadrature::triangle_points;

/// One RT_k shape function in scaled coordinates `(s, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtShape {
    /// `(s^a t^b, 0)`
    X(usize, usize),
    /// `(0, s^a t^b)`
    Y(usize, usize),
    /// `(s^(a+1) t^b, s^a t^(b+1))` with `a + b = k`
    Radial(usize, usize),
}

pub fn rt_dim(k: usize) -> usize {
    (k + 1) * (k + 3)
}

/// RT_k shape functions of one sub-triangle, in the scaling of the parent
/// cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RtBasis {
    pub k: usize,
    pub shapes: Vec<RtShape>,
    pub centroid: Point2<f64>,
    pub diameter: f64,
    /// Divergence of each shape as coefficients over the scaled monomials of
    /// `P_k(T)` (rows: monomials, columns: shapes), physical units.
    pub divergence: DMatrix<f64>,
}

impl RtBasis {
    pub fn new(k: usize, centroid: Point2<f64>, diameter: f64) -> Self {
        let mono = monomial_exponents(k);
        let mut shapes: Vec<RtShape> = mono.iter().map(|&(a, b)| RtShape::X(a, b)).collect();
        shapes.extend(mono.iter().map(|&(a, b)| RtShape::Y(a, b)));
        shapes.extend((0..=k).map(|b| RtShape::Radial(k - b, b)));

        let inv_h = 1.0 / diameter;
        let mut divergence = DMatrix::zeros(scalar_dim(k), shapes.len());
        for (j, shape) in shapes.iter().enumerate() {
            match *shape {
                RtShape::X(a, b) if a > 0 => {
                    divergence[(monomial_index(a - 1, b), j)] = a as f64 * inv_h;
                }
                RtShape::Y(a, b) if b > 0 => {
                    divergence[(monomial_index(a, b - 1), j)] = b as f64 * inv_h;
                }
                RtShape::Radial(a, b) => {
                    divergence[(monomial_index(a, b), j)] = (k + 2) as f64 * inv_h;
                }
                _ => {}
            }
        }
        Self {
            k,
            shapes,
            centroid,
            diameter,
            divergence,
        }
    }

    pub fn dim(&self) -> usize {
        self.shapes.len()
    }

    pub fn eval(&self, p: Point2<f64>) -> Vec<Vector2<f64>> {
        let s = (p.x - self.centroid.x) / self.diameter;
        let t = (p.y - self.centroid.y) / self.diameter;
        let ps = powers(s, self.k + 1);
        let pt = powers(t, self.k + 1);
        self.shapes
            .iter()
            .map(|shape| match *shape {
                RtShape::X(a, b) => Vector2::new(ps[a] * pt[b], 0.0),
                RtShape::Y(a, b) => Vector2::new(0.0, ps[a] * pt[b]),
                RtShape::Radial(a, b) => Vector2::new(ps[a + 1] * pt[b], ps[a] * pt[b + 1]),
            })
            .collect()
    }

    /// Pointwise divergence of each shape.
    pub fn eval_divergence(&self, scalar: &CellScalarBasis, p: Point2<f64>) -> Vec<f64> {
        let m = scalar.eval(p);
        (0..self.dim())
            .map(|j| self.divergence.column(j).iter().zip(&m).map(|(d, v)| d * v).sum())
            .collect()
    }
}

/// RT_k on every fan sub-triangle of a cell, with degrees of freedom stacked
/// triangle by triangle: stacked index `t * dim + l`.
#[derive(Debug, Clone)]
pub struct PiecewiseRtBasis {
    pub subtri: SubTriangulation,
    pub local: RtBasis,
    /// Per-triangle `(psi_l, psi_m)_{T_t}` mass blocks.
    pub mass_blocks: Vec<DMatrix<f64>>,
}

impl PiecewiseRtBasis {
    pub fn num_triangles(&self) -> usize {
        self.subtri.num_triangles()
    }

    /// `N_RT = (n_v - 2) (k + 1) (k + 3)`.
    pub fn stacked_dim(&self) -> usize {
        self.num_triangles() * self.local.dim()
    }

    /// Block-diagonal stacked mass matrix.
    pub fn mass(&self) -> DMatrix<f64> {
        let d = self.local.dim();
        let n = self.stacked_dim();
        let mut m = DMatrix::zeros(n, n);
        for (t, block) in self.mass_blocks.iter().enumerate() {
            m.view_mut((t * d, t * d), (d, d)).copy_from(block);
        }
        m
    }

    /// Evaluates the piecewise field with stacked coefficients `coeffs` at a
    /// point of sub-triangle `t`.
    pub fn eval_field(&self, coeffs: &[f64], t: usize, p: Point2<f64>) -> Vector2<f64> {
        let d = self.local.dim();
        self.local
            .eval(p)
            .iter()
            .zip(&coeffs[t * d..(t + 1) * d])
            .map(|(v, c)| v * *c)
            .sum()
    }
}

/// Builds RT_k on sub-triangle `t` of `subtri`, scaled to the parent cell.
pub fn build_rt_basis(
    mesh: &PolyMesh,
    subtri: &SubTriangulation,
    t: usize,
    k: usize,
) -> Result<RtBasis, LocalSpaceError> {
    let area = signed_area(&mesh.triangle_points(subtri.triangles[t]));
    if area < 1e-14 {
        return Err(LocalSpaceError::DegenerateTriangle {
            cell: subtri.parent_cell,
            triangle: t,
            area,
        });
    }
    let g = mesh.geometry(subtri.parent_cell);
    Ok(RtBasis::new(k, g.centroid, g.diameter))
}

/// Builds the stacked RT_k basis over all sub-triangles with mass blocks
/// integrated at `degree`.
pub fn build_piecewise_rt(
    mesh: &PolyMesh,
    subtri: &SubTriangulation,
    k: usize,
    degree: usize,
) -> Result<PiecewiseRtBasis, LocalSpaceError> {
    let mut local = None;
    let mut mass_blocks = Vec::with_capacity(subtri.num_triangles());
    for t in 0..subtri.num_triangles() {
        let basis = build_rt_basis(mesh, subtri, t, k)?;
        let d = basis.dim();
        let mut m = DMatrix::zeros(d, d);
        for (p, w) in triangle_points(mesh.triangle_points(subtri.triangles[t]), degree)? {
            let v = basis.eval(p);
            for i in 0..d {
                for j in i..d {
                    m[(i, j)] += w * v[i].dot(&v[j]);
                }
            }
        }
        m.fill_lower_triangle_with_upper_triangle();
        mass_blocks.push(m);
        local.get_or_insert(basis);
    }
    Ok(PiecewiseRtBasis {
        subtri: subtri.clone(),
        local: local.expect("a fan triangulation has at least one triangle"),
        mass_blocks,
    })
}
