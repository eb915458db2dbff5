use nalgebra::DVector;

use super::dofs::DofMap;
use crate::localspaces::{assembly_degree, CellSpace};
use crate::polymesh::PolyMesh;
use crate::quadrature::{segment_points, triangle_points};

fn local(mesh: &PolyMesh, dofs: &DofMap, v: &DVector<f64>, c: usize) -> DVector<f64> {
    let map = dofs.local_to_global(mesh, c);
    DVector::from_iterator(map.len(), map.iter().map(|&g| v[g]))
}

/// `|||v||| = (sum_T ||grad_w v||_T^2)^(1/2)` for a global vector `v`.
pub fn energy_norm(mesh: &PolyMesh, spaces: &[CellSpace], dofs: &DofMap, v: &DVector<f64>) -> f64 {
    spaces
        .iter()
        .map(|s| {
            let x = local(mesh, dofs, v, s.cell);
            x.dot(&(&s.weak_gradient.stiffness * &x))
        })
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// `||v||_{1,h} = (sum_T ||grad v_0||_T^2 + h_T^{-1} ||v_0 - v_b||_{dT}^2)^(1/2)`.
/// `grad v_0` is taken analytically from the monomial basis.
pub fn discrete_h1_norm(mesh: &PolyMesh, spaces: &[CellSpace], dofs: &DofMap, v: &DVector<f64>) -> f64 {
    let mut total = 0.0;
    for s in spaces {
        let x = local(mesh, dofs, v, s.cell);
        let np = s.scalar_dim();
        let v0 = &x.as_slice()[..np];
        let degree = assembly_degree(s.k);
        for tri in &s.rt.subtri.triangles {
            for (p, w) in triangle_points(mesh.triangle_points(*tri), degree).expect("supported degree") {
                let grad = s
                    .scalar
                    .grad(p)
                    .iter()
                    .zip(v0)
                    .map(|(g, c)| g * *c)
                    .sum::<nalgebra::Vector2<f64>>();
                total += w * grad.norm_squared();
            }
        }
        let inv_h = 1.0 / mesh.cell_diameter(s.cell);
        for (j, eb) in s.edges.iter().enumerate() {
            let vb = &x.as_slice()[s.edge_offset(j)..s.edge_offset(j) + s.edge_dim()];
            for (p, w) in segment_points(eb.start, eb.end, degree).expect("supported degree") {
                let jump = s.scalar.eval_combination(v0, p) - eb.eval_combination(vb, p);
                total += inv_h * w * jump * jump;
            }
        }
    }
    total.sqrt()
}
