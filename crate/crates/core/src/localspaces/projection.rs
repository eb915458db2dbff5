use nalgebra::{DMatrix, DVector, Point2, Vector2};

use super::{data_degree, CellSpace, EdgeScalarBasis, LocalSpaceError};
use crate::polymesh::PolyMesh;
use crate::quadrature::{segment_points, triangle_points};

/// `Q_0 phi`: L2 projection onto `P_k(T)`, as scaled-monomial coefficients.
pub fn project_q0<F>(mesh: &PolyMesh, space: &CellSpace, phi: F) -> Result<DVector<f64>, LocalSpaceError>
where
    F: Fn(Point2<f64>) -> f64,
{
    let mut rhs = DVector::zeros(space.scalar_dim());
    for tri in &space.rt.subtri.triangles {
        for (p, w) in triangle_points(mesh.triangle_points(*tri), data_degree(space.k))? {
            let f = phi(p);
            for (r, m) in rhs.iter_mut().zip(space.scalar.eval(p)) {
                *r += w * f * m;
            }
        }
    }
    Ok(space.scalar_mass.solve(&rhs))
}

/// `Q_b phi`: L2 projection onto `P_k(e)` in the edge's own basis.
pub fn project_qb<F>(mesh: &PolyMesh, edge: usize, k: usize, phi: F) -> Result<DVector<f64>, LocalSpaceError>
where
    F: Fn(Point2<f64>) -> f64,
{
    let basis = EdgeScalarBasis::new(mesh, edge, k);
    let n = k + 1;
    let mut mass = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (p, w) in segment_points(basis.start, basis.end, data_degree(k))? {
        let v = basis.eval(p);
        let f = phi(p);
        for i in 0..n {
            rhs[i] += w * f * v[i];
            for j in 0..n {
                mass[(i, j)] += w * v[i] * v[j];
            }
        }
    }
    let chol = mass
        .cholesky()
        .ok_or(LocalSpaceError::NotPositiveDefinite {
            cell: mesh.edge(edge).left,
            what: "P_k(e) mass",
        })?;
    Ok(chol.solve(&rhs))
}

/// `Q_h phi = {Q_0 phi, Q_b phi}` as a local degree-of-freedom vector.
pub fn project_qh<F>(mesh: &PolyMesh, space: &CellSpace, phi: F) -> Result<DVector<f64>, LocalSpaceError>
where
    F: Fn(Point2<f64>) -> f64,
{
    let mut local = DVector::zeros(space.local_dim());
    local
        .rows_mut(0, space.scalar_dim())
        .copy_from(&project_q0(mesh, space, &phi)?);
    for (j, &e) in mesh.cell_edges(space.cell).iter().enumerate() {
        let qb = project_qb(mesh, e, space.k, &phi)?;
        local.rows_mut(space.edge_offset(j), space.edge_dim()).copy_from(&qb);
    }
    Ok(local)
}

/// L2 projection of a vector field onto `Lambda_k(T)`.
pub fn project_lambda<F>(mesh: &PolyMesh, space: &CellSpace, field: F) -> Result<DVector<f64>, LocalSpaceError>
where
    F: Fn(Point2<f64>) -> Vector2<f64>,
{
    let d = space.rt.local.dim();
    let mut rhs_rt = DVector::zeros(space.rt.stacked_dim());
    for (t, tri) in space.rt.subtri.triangles.iter().enumerate() {
        for (p, w) in triangle_points(mesh.triangle_points(*tri), data_degree(space.k))? {
            let f = field(p);
            for (l, v) in space.rt.local.eval(p).iter().enumerate() {
                rhs_rt[t * d + l] += w * f.dot(v);
            }
        }
    }
    let rhs = space.lambda.coefficients.transpose() * rhs_rt;
    Ok(space.weak_gradient.mass_factor.solve(&rhs))
}
