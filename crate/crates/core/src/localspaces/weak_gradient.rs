use log::warn;
use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};

use super::lambda::LambdaBasis;
use super::rt::PiecewiseRtBasis;
use super::scalar::{CellScalarBasis, EdgeScalarBasis};
use super::{assembly_degree, LocalSpaceError};
use crate::polymesh::PolyMesh;
use crate::quadrature::{segment_points, triangle_points};

/// Condition number of the `Lambda_k` mass matrix above which a warning is
/// logged.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Discrete weak gradient on one cell.
///
/// For a local function `v = {v_0, v_b}` with coefficient vector `x`, the
/// `Lambda_k(T)` coefficients of its weak gradient are `matrix * x`, where
/// `mass * matrix = moments` and
/// `moments[j, i] = -(phi_0, div q_j)_T + <phi_b, q_j . n>_{dT}`.
#[derive(Debug, Clone)]
pub struct WeakGradientOperator {
    pub cell: usize,
    /// `G`, `N_Lambda x N_local`.
    pub matrix: DMatrix<f64>,
    /// `M_Lambda`, the `Lambda_k(T)` mass matrix.
    pub mass: DMatrix<f64>,
    pub mass_factor: Cholesky<f64, Dyn>,
    /// `B`, right-hand side moments.
    pub moments: DMatrix<f64>,
    /// `G^T M_Lambda G`, symmetrised.
    pub stiffness: DMatrix<f64>,
    pub mass_condition: f64,
}

/// Builds the weak gradient operator of `cell` from its local bases.
pub fn compute_weak_gradient(
    mesh: &PolyMesh,
    cell: usize,
    scalar: &CellScalarBasis,
    edges: &[EdgeScalarBasis],
    rt: &PiecewiseRtBasis,
    lambda: &LambdaBasis,
) -> Result<WeakGradientOperator, LocalSpaceError> {
    let k = scalar.k;
    let degree = assembly_degree(k);
    let d = rt.local.dim();
    let np = scalar.dim();
    let n_local = np + edges.len() * (k + 1);
    let sub = &rt.subtri;

    let mut moments_rt = DMatrix::zeros(rt.stacked_dim(), n_local);
    for (t, tri) in sub.triangles.iter().enumerate() {
        for (p, w) in triangle_points(mesh.triangle_points(*tri), degree)? {
            let m = scalar.eval(p);
            let div = rt.local.eval_divergence(scalar, p);
            for (l, dl) in div.iter().enumerate() {
                for (a, ma) in m.iter().enumerate() {
                    moments_rt[(t * d + l, a)] -= w * ma * dl;
                }
            }
        }
    }
    for (j, edge_basis) in edges.iter().enumerate() {
        let t = sub.boundary_edge_map[j];
        let e = mesh.cell_edges(cell)[j];
        let normal = mesh.outward_normal(cell, e);
        let [a, b] = mesh.edge_points(e);
        let offset = np + j * (k + 1);
        for (p, w) in segment_points(a, b, degree)? {
            let pb = edge_basis.eval(p);
            let fluxes: Vec<f64> = rt.local.eval(p).iter().map(|v| v.dot(&normal)).collect();
            for (l, f) in fluxes.iter().enumerate() {
                for (i, pi) in pb.iter().enumerate() {
                    moments_rt[(t * d + l, offset + i)] += w * pi * f;
                }
            }
        }
    }

    let z = &lambda.coefficients;
    let moments = z.transpose() * moments_rt;
    let mut mass = z.transpose() * rt.mass() * z;
    mass = (&mass + mass.transpose()) * 0.5;

    let eig = SymmetricEigen::new(mass.clone()).eigenvalues;
    let mass_condition = eig.max() / eig.min();
    if !(mass_condition.is_finite() && mass_condition > 0.0) || mass_condition > ILL_CONDITIONED {
        warn!("cell {cell}: Lambda_k mass matrix condition number {mass_condition:e}");
    }
    let mass_factor = Cholesky::new(mass.clone()).ok_or(LocalSpaceError::NotPositiveDefinite {
        cell,
        what: "Lambda_k mass",
    })?;
    let matrix = mass_factor.solve(&moments);
    let k_raw = moments.transpose() * &matrix;
    let stiffness = (&k_raw + k_raw.transpose()) * 0.5;

    Ok(WeakGradientOperator {
        cell,
        matrix,
        mass,
        mass_factor,
        moments,
        stiffness,
        mass_condition,
    })
}
