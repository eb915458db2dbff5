use nalgebra::{Point2, Vector2};
use rayon::prelude::*;

use crate::localspaces::{project_lambda, project_q0, project_qh, CellSpace, LocalSpaceError};
use crate::polymesh::PolyMesh;
use crate::wgsolve::WGSolution;

/// `||Q_0 u - u_0||`, summed over cells with the `P_k(T)` mass matrix.
pub fn l2_projection_error<F>(
    mesh: &PolyMesh,
    spaces: &[CellSpace],
    u: F,
    solution: &WGSolution,
) -> Result<f64, LocalSpaceError>
where
    F: Fn(Point2<f64>) -> f64 + Sync,
{
    let parts = spaces
        .par_iter()
        .map(|s| {
            let q0 = project_q0(mesh, s, &u)?;
            let d = q0 - nalgebra::DVector::from_column_slice(solution.u0(s.cell));
            Ok(d.dot(&(s.scalar_mass_matrix() * &d)))
        })
        .collect::<Result<Vec<f64>, LocalSpaceError>>()?;
    Ok(parts.iter().sum::<f64>().max(0.0).sqrt())
}

/// `(sum_T ||Q_h grad u - grad_w u_h||_T^2)^(1/2)` with `Q_h` the `L2`
/// projection onto `Lambda_k(T)`.
pub fn energy_error<G>(
    mesh: &PolyMesh,
    spaces: &[CellSpace],
    grad: G,
    solution: &WGSolution,
) -> Result<f64, LocalSpaceError>
where
    G: Fn(Point2<f64>) -> Vector2<f64> + Sync,
{
    let parts = spaces
        .par_iter()
        .map(|s| {
            let proj = project_lambda(mesh, s, &grad)?;
            let d = proj - s.apply_weak_gradient(&solution.local(mesh, s.cell));
            Ok(s.lambda_inner(&d, &d))
        })
        .collect::<Result<Vec<f64>, LocalSpaceError>>()?;
    Ok(parts.iter().sum::<f64>().max(0.0).sqrt())
}

/// `|||Q_h u - u_h|||`, computed through the weak gradient of `Q_h u`
/// instead of the projected exact gradient.
pub fn energy_error_via_weak_gradient<F>(
    mesh: &PolyMesh,
    spaces: &[CellSpace],
    u: F,
    solution: &WGSolution,
) -> Result<f64, LocalSpaceError>
where
    F: Fn(Point2<f64>) -> f64 + Sync,
{
    let parts = spaces
        .par_iter()
        .map(|s| {
            let d = project_qh(mesh, s, &u)? - solution.local(mesh, s.cell);
            Ok(d.dot(&(&s.weak_gradient.stiffness * &d)))
        })
        .collect::<Result<Vec<f64>, LocalSpaceError>>()?;
    Ok(parts.iter().sum::<f64>().max(0.0).sqrt())
}
