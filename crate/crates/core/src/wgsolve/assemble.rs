use nalgebra::{DVector, Point2};
use rayon::prelude::*;

use super::dofs::DofMap;
use super::sparse::CsrMatrix;
use super::SolveError;
use crate::localspaces::{data_degree, project_qb, CellSpace};
use crate::polymesh::PolyMesh;
use crate::quadrature::triangle_points;

/// The reduced linear system `A x = b` over the free unknowns, together with
/// the full (pre-elimination) matrix and the prescribed boundary values.
#[derive(Debug, Clone)]
pub struct SparseSymSystem {
    pub dofs: DofMap,
    /// Free-by-free block.
    pub matrix: CsrMatrix,
    pub rhs: DVector<f64>,
    /// Global matrix before boundary elimination.
    pub full_matrix: CsrMatrix,
    /// Global load vector `(f, phi_0)` before elimination.
    pub full_load: DVector<f64>,
    /// Global vector holding `Q_b g` on constrained unknowns, zero elsewhere.
    pub boundary_values: DVector<f64>,
}

fn cell_load<F>(mesh: &PolyMesh, space: &CellSpace, f: &F) -> Result<DVector<f64>, SolveError>
where
    F: Fn(Point2<f64>) -> f64,
{
    let mut load = DVector::zeros(space.scalar_dim());
    for tri in &space.rt.subtri.triangles {
        for (p, w) in triangle_points(mesh.triangle_points(*tri), data_degree(space.k))? {
            let v = f(p);
            if !v.is_finite() {
                return Err(SolveError::NonFiniteSource { x: p.x, y: p.y });
            }
            for (l, m) in load.iter_mut().zip(space.scalar.eval(p)) {
                *l += w * v * m;
            }
        }
    }
    Ok(load)
}

/// Assembles `(grad_w u, grad_w v) = (f, v_0)` with `u_b = Q_b g` on the
/// boundary, eliminating the boundary unknowns symmetrically.
pub fn assemble<F, G>(
    mesh: &PolyMesh,
    spaces: &[CellSpace],
    f: F,
    g: G,
) -> Result<SparseSymSystem, SolveError>
where
    F: Fn(Point2<f64>) -> f64 + Sync,
    G: Fn(Point2<f64>) -> f64 + Sync,
{
    if spaces.len() != mesh.num_cells() {
        return Err(SolveError::MissingLocalOperator {
            expected: mesh.num_cells(),
            found: spaces.len(),
        });
    }
    let k = spaces.first().map_or(0, |s| s.k);
    let dofs = DofMap::new(mesh, k);
    let n = dofs.total();

    let loads = spaces
        .par_iter()
        .map(|s| cell_load(mesh, s, &f))
        .collect::<Result<Vec<_>, _>>()?;

    let mut triplets = Vec::new();
    let mut full_load = DVector::zeros(n);
    for (c, (space, load)) in spaces.iter().zip(&loads).enumerate() {
        let map = dofs.local_to_global(mesh, c);
        let kt = &space.weak_gradient.stiffness;
        for (i, &gi) in map.iter().enumerate() {
            for (j, &gj) in map.iter().enumerate() {
                triplets.push((gi, gj, kt[(i, j)]));
            }
        }
        for (i, gi) in dofs.cell_range(c).enumerate() {
            full_load[gi] += load[i];
        }
    }
    let full_matrix = CsrMatrix::from_triplets(n, n, &triplets);

    let mut boundary_values = DVector::zeros(n);
    let boundary: Vec<usize> = (0..mesh.num_edges()).filter(|&e| dofs.boundary_edges[e]).collect();
    let projected = boundary
        .par_iter()
        .map(|&e| project_qb(mesh, e, k, &g))
        .collect::<Result<Vec<_>, _>>()?;
    for (&e, qb) in boundary.iter().zip(projected) {
        for (i, gi) in dofs.edge_range(e).enumerate() {
            boundary_values[gi] = qb[i];
        }
    }

    let matrix = full_matrix.submatrix(&dofs.free_index, dofs.num_free());
    let lifted = full_matrix.mul_vec(&boundary_values);
    let rhs = DVector::from_iterator(
        dofs.num_free(),
        dofs.free_dofs.iter().map(|&gi| full_load[gi] - lifted[gi]),
    );

    Ok(SparseSymSystem {
        dofs,
        matrix,
        rhs,
        full_matrix,
        full_load,
        boundary_values,
    })
}
