//! Per-cell polynomial machinery: scaled scalar bases on cells and edges,
//! piecewise RT_k on the fan sub-triangulation, the constrained space
//! `Lambda_k(T)`, the weak gradient, and the L2 projections onto `P_k(T)`,
//! `P_k(e)` and `Lambda_k(T)`.

mod lambda;
mod projection;
mod rt;
mod scalar;
mod weak_gradient;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, Point2, Vector2};
use rayon::prelude::*;
use thiserror::Error;

use crate::polymesh::{triangulate_cell, MeshError, PolyMesh};
use crate::quadrature::{triangle_points, QuadratureError};

pub use lambda::{
    build_lambda_basis, lambda_constraints, lambda_dimension, vector_monomial_coefficients,
    LambdaBasis, NULLSPACE_TOL,
};
pub use projection::{project_lambda, project_q0, project_qb, project_qh};
pub use rt::{build_piecewise_rt, build_rt_basis, rt_dim, PiecewiseRtBasis, RtBasis, RtShape};
pub use scalar::{
    monomial_exponents, monomial_index, scalar_dim, CellScalarBasis, EdgeScalarBasis,
};
pub use weak_gradient::{compute_weak_gradient, WeakGradientOperator, ILL_CONDITIONED};

/// Highest supported polynomial degree.
pub const MAX_DEGREE: usize = 4;

/// Quadrature degree for integrals of basis-function products.
pub fn assembly_degree(k: usize) -> usize {
    2 * k + 4
}

/// Quadrature degree for integrals involving analytic data.
pub fn data_degree(k: usize) -> usize {
    2 * k + 8
}

#[derive(Debug, Error)]
pub enum LocalSpaceError {
    #[error("polynomial degree {0} exceeds the supported maximum {MAX_DEGREE}")]
    DegreeTooHigh(usize),
    #[error("cell {cell}: sub-triangle {triangle} is degenerate (area {area:e})")]
    DegenerateTriangle {
        cell: usize,
        triangle: usize,
        area: f64,
    },
    #[error(
        "cell {cell}: Lambda_k nullspace has dimension {found}, expected {expected}; \
         constraint singular values {singular_values:?}"
    )]
    RankMismatch {
        cell: usize,
        expected: usize,
        found: usize,
        singular_values: Vec<f64>,
    },
    #[error("cell {cell}: {what} matrix is not positive definite")]
    NotPositiveDefinite { cell: usize, what: &'static str },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Everything needed to work with the weak Galerkin space on one cell.
///
/// Local degrees of freedom are the `P_k(T)` coefficients of `v_0` followed
/// by the `P_k(e)` coefficients of `v_b` on each local edge in cycle order.
#[derive(Debug, Clone)]
pub struct CellSpace {
    pub cell: usize,
    pub k: usize,
    pub scalar: CellScalarBasis,
    /// Edge bases aligned with the cell's local edges.
    pub edges: Vec<EdgeScalarBasis>,
    pub rt: PiecewiseRtBasis,
    pub lambda: LambdaBasis,
    pub scalar_mass: Cholesky<f64, Dyn>,
    pub weak_gradient: WeakGradientOperator,
}

impl CellSpace {
    pub fn new(mesh: &PolyMesh, cell: usize, k: usize) -> Result<Self, LocalSpaceError> {
        if k > MAX_DEGREE {
            return Err(LocalSpaceError::DegreeTooHigh(k));
        }
        let degree = assembly_degree(k);
        let subtri = triangulate_cell(mesh, cell)?;
        let scalar = CellScalarBasis::new(mesh, cell, k);
        let edges: Vec<EdgeScalarBasis> = mesh
            .cell_edges(cell)
            .iter()
            .map(|&e| EdgeScalarBasis::new(mesh, e, k))
            .collect();
        let rt = build_piecewise_rt(mesh, &subtri, k, degree)?;
        let lambda = build_lambda_basis(mesh, &rt, degree)?;

        let np = scalar.dim();
        let mut m0 = DMatrix::zeros(np, np);
        for tri in &subtri.triangles {
            for (p, w) in triangle_points(mesh.triangle_points(*tri), degree)? {
                let v = scalar.eval(p);
                m0 += DMatrix::from_fn(np, np, |i, j| w * v[i] * v[j]);
            }
        }
        let scalar_mass = Cholesky::new(m0).ok_or(LocalSpaceError::NotPositiveDefinite {
            cell,
            what: "P_k(T) mass",
        })?;

        let weak_gradient = compute_weak_gradient(mesh, cell, &scalar, &edges, &rt, &lambda)?;
        Ok(Self {
            cell,
            k,
            scalar,
            edges,
            rt,
            lambda,
            scalar_mass,
            weak_gradient,
        })
    }

    pub fn scalar_dim(&self) -> usize {
        self.scalar.dim()
    }

    pub fn edge_dim(&self) -> usize {
        self.k + 1
    }

    pub fn local_dim(&self) -> usize {
        self.scalar_dim() + self.edges.len() * self.edge_dim()
    }

    pub fn lambda_dim(&self) -> usize {
        self.lambda.dim()
    }

    /// Offset of local edge `j` in the local degree-of-freedom vector.
    pub fn edge_offset(&self, j: usize) -> usize {
        self.scalar_dim() + j * self.edge_dim()
    }

    /// `P_k(T)` mass matrix `(m_a, m_b)_T`.
    pub fn scalar_mass_matrix(&self) -> DMatrix<f64> {
        let l = self.scalar_mass.l();
        &l * l.transpose()
    }

    /// Stacked RT coefficients of the `Lambda_k` field with coefficients
    /// `coeffs`.
    pub fn stacked(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.lambda.coefficients * coeffs
    }

    /// Evaluates a `Lambda_k` field at point `p` of sub-triangle `t`.
    pub fn eval_lambda(&self, coeffs: &DVector<f64>, t: usize, p: Point2<f64>) -> Vector2<f64> {
        self.rt.eval_field(self.stacked(coeffs).as_slice(), t, p)
    }

    /// Weak gradient coefficients of a local function.
    pub fn apply_weak_gradient(&self, local: &DVector<f64>) -> DVector<f64> {
        &self.weak_gradient.matrix * local
    }

    /// `(a, b)_T` for two `Lambda_k` fields given by coefficients.
    pub fn lambda_inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.weak_gradient.mass * b))
    }
}

/// Builds the local spaces of every cell. Cells are independent and are
/// processed in parallel; the result is ordered by cell index.
pub fn build_local_spaces(mesh: &PolyMesh, k: usize) -> Result<Vec<CellSpace>, LocalSpaceError> {
    if k > MAX_DEGREE {
        return Err(LocalSpaceError::DegreeTooHigh(k));
    }
    (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| CellSpace::new(mesh, c, k))
        .collect()
}
