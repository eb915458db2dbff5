//! The constrained gradient space `Lambda_k(T)`: piecewise RT_k fields on the
//! fan sub-triangulation whose normal component is continuous across every
//! internal sub-edge and whose divergence is one polynomial on the whole
//! cell. In 2D the boundary normal traces are single-piece automatically
//! because the fan never splits a polygon edge.

use nalgebra::{DMatrix, DVector};

use super::rt::{rt_dim, PiecewiseRtBasis};
use super::scalar::{powers, scalar_dim};
use super::LocalSpaceError;
use crate::polymesh::PolyMesh;
use crate::quadrature::segment_points;

/// Relative singular-value threshold separating the nullspace.
pub const NULLSPACE_TOL: f64 = 1e-10;

/// Basis of `Lambda_k(T)` as columns of stacked RT coefficients, orthonormal
/// in `L2(T)`.
#[derive(Debug, Clone)]
pub struct LambdaBasis {
    /// `N_RT x N_Lambda`; `Z^T M_RT Z = I`.
    pub coefficients: DMatrix<f64>,
    /// Row-normalised constraint matrix (normal jumps, then divergence
    /// mismatches).
    pub constraints: DMatrix<f64>,
    /// Singular values of the constraint matrix, descending.
    pub singular_values: Vec<f64>,
    /// `max |C Z| / max |Z|`.
    pub constraint_residual: f64,
}

impl LambdaBasis {
    pub fn dim(&self) -> usize {
        self.coefficients.ncols()
    }
}

/// Closed-form `dim Lambda_k(T)` for a fan-triangulated `n_v`-gon:
/// `(n_v - 2)(k + 1)(k + 3) - (n_v - 3)[(k + 1) + (k + 1)(k + 2) / 2]`.
pub fn lambda_dimension(n_v: usize, k: usize) -> usize {
    (n_v - 2) * rt_dim(k) - (n_v - 3) * ((k + 1) + scalar_dim(k))
}

/// Assembles the constraint rows over the stacked RT degrees of freedom.
pub fn lambda_constraints(
    mesh: &PolyMesh,
    rt: &PiecewiseRtBasis,
    degree: usize,
) -> Result<DMatrix<f64>, LocalSpaceError> {
    let k = rt.local.k;
    let d = rt.local.dim();
    let sub = &rt.subtri;
    let n_internal = sub.internal_edges.len();
    let n_rows = n_internal * (k + 1) + (sub.num_triangles() - 1) * scalar_dim(k);
    let mut c = DMatrix::zeros(n_rows, rt.stacked_dim());

    // normal jumps tested against P_k(e)
    for (e, (verts, [left, right])) in sub
        .internal_edges
        .iter()
        .zip(&sub.internal_edge_triangles)
        .enumerate()
    {
        let a = mesh.vertices()[verts[0]];
        let b = mesh.vertices()[verts[1]];
        let tangent = (b - a).normalize();
        let normal = nalgebra::Vector2::new(tangent.y, -tangent.x);
        let len2 = (b - a).norm_squared();
        for (p, w) in segment_points(a, b, degree)? {
            let tp = powers((p - a).dot(&(b - a)) / len2 - 0.5, k);
            let fluxes: Vec<f64> = rt.local.eval(p).iter().map(|v| v.dot(&normal)).collect();
            for (j, tj) in tp.iter().enumerate() {
                let row = e * (k + 1) + j;
                for (l, f) in fluxes.iter().enumerate() {
                    c[(row, left * d + l)] += w * f * tj;
                    c[(row, right * d + l)] -= w * f * tj;
                }
            }
        }
    }

    // divergence of piece t matches piece 0, coefficient by coefficient
    let np = scalar_dim(k);
    let base = n_internal * (k + 1);
    for t in 1..sub.num_triangles() {
        for g in 0..np {
            let row = base + (t - 1) * np + g;
            for l in 0..d {
                let v = rt.local.divergence[(g, l)];
                c[(row, t * d + l)] += v;
                c[(row, l)] -= v;
            }
        }
    }

    for mut row in c.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 {
            row /= n;
        }
    }
    Ok(c)
}

/// Builds an `L2`-orthonormal basis of `Lambda_k(T)`: each RT piece is first
/// whitened by the Cholesky factor of its mass block, and the nullspace of
/// the constraints is taken in those coordinates. The dimension is checked
/// against the closed form.
pub fn build_lambda_basis(
    mesh: &PolyMesh,
    rt: &PiecewiseRtBasis,
    degree: usize,
) -> Result<LambdaBasis, LocalSpaceError> {
    let cell = rt.subtri.parent_cell;
    let n = rt.stacked_dim();
    let n_v = mesh.cell(cell).len();
    let expected = lambda_dimension(n_v, rt.local.k);
    let constraints = lambda_constraints(mesh, rt, degree)?;

    // W = blockdiag(L_t^{-T}) maps whitened coordinates to RT coefficients
    let d = rt.local.dim();
    let mut whiten = DMatrix::zeros(n, n);
    for (t, block) in rt.mass_blocks.iter().enumerate() {
        let l = block
            .clone()
            .cholesky()
            .ok_or(LocalSpaceError::NotPositiveDefinite { cell, what: "RT_k mass" })?
            .unpack();
        let l_inv_t = l
            .solve_lower_triangular(&DMatrix::identity(d, d))
            .expect("nonsingular Cholesky factor")
            .transpose();
        whiten.view_mut((t * d, t * d), (d, d)).copy_from(&l_inv_t);
    }

    if constraints.nrows() == 0 {
        return Ok(LambdaBasis {
            coefficients: whiten,
            constraints,
            singular_values: Vec::new(),
            constraint_residual: 0.0,
        });
    }

    let mut whitened = &constraints * &whiten;
    for mut row in whitened.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    // pad to square so the SVD returns a full set of right singular vectors
    let mut padded = DMatrix::zeros(n, n);
    padded
        .view_mut((0, 0), (constraints.nrows(), n))
        .copy_from(&whitened);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma = svd.singular_values;
    let sigma_max = sigma.max();
    let null: Vec<usize> = (0..n)
        .filter(|&i| sigma[i] <= NULLSPACE_TOL * sigma_max)
        .collect();
    let mut singular_values: Vec<f64> = sigma.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));

    if null.len() != expected {
        return Err(LocalSpaceError::RankMismatch {
            cell,
            expected,
            found: null.len(),
            singular_values,
        });
    }

    let mut null_basis = DMatrix::zeros(n, expected);
    for (col, &i) in null.iter().enumerate() {
        null_basis.set_column(col, &v_t.row(i).transpose());
    }
    let coefficients = whiten * null_basis;
    let constraint_residual = (&constraints * &coefficients).amax() / coefficients.amax();
    Ok(LambdaBasis {
        coefficients,
        constraints,
        singular_values,
        constraint_residual,
    })
}

/// Stacked RT coefficients of a field that is the same `[P_k]^2` vector
/// monomial on every piece.
pub fn vector_monomial_coefficients(rt: &PiecewiseRtBasis, component: usize, index: usize) -> DVector<f64> {
    let d = rt.local.dim();
    let np = scalar_dim(rt.local.k);
    let mut v = DVector::zeros(rt.stacked_dim());
    for t in 0..rt.num_triangles() {
        v[t * d + component * np + index] = 1.0;
    }
    v
}
