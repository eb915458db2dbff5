//! Global unknown numbering, sparse assembly of `(grad_w u, grad_w v)`,
//! Dirichlet elimination and the SPD solve.

mod assemble;
mod dofs;
mod norms;
mod solver;
mod sparse;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::localspaces::LocalSpaceError;
use crate::polymesh::PolyMesh;
use crate::quadrature::QuadratureError;

pub use assemble::{assemble, SparseSymSystem};
pub use dofs::DofMap;
pub use norms::{discrete_h1_norm, energy_norm};
pub use solver::{iteration_cap, pcg, residual_floor, solve, CgOutcome, SolveMethod, DEFAULT_TOL, DIRECT_LIMIT};
pub use sparse::CsrMatrix;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("local operators for {found} cells, mesh has {expected}")]
    MissingLocalOperator { expected: usize, found: usize },
    #[error("source term is not finite at quadrature point ({x}, {y})")]
    NonFiniteSource { x: f64, y: f64 },
    #[error("conjugate gradients stopped after {iterations} iterations at relative residual {residual:e}")]
    ConvergenceFailure {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("system matrix is not positive definite (detected at iteration {iteration}); assembly is inconsistent")]
    Indefinite { iteration: usize },
    #[error(transparent)]
    Local(#[from] LocalSpaceError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Discrete solution `u_h = {u_0, u_b}` in global numbering.
#[derive(Debug, Clone)]
pub struct WGSolution {
    pub dofs: DofMap,
    pub global: DVector<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub method: SolveMethod,
}

/// `{"k":int,"u0":[[...]],"ub":[[...]],"residual":float}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub k: usize,
    pub u0: Vec<Vec<f64>>,
    pub ub: Vec<Vec<f64>>,
    pub residual: f64,
}

impl WGSolution {
    pub fn k(&self) -> usize {
        self.dofs.k
    }

    pub fn u0(&self, c: usize) -> &[f64] {
        &self.global.as_slice()[self.dofs.cell_range(c)]
    }

    pub fn ub(&self, e: usize) -> &[f64] {
        &self.global.as_slice()[self.dofs.edge_range(e)]
    }

    /// Local unknowns of cell `c` in [`crate::localspaces::CellSpace`] order.
    pub fn local(&self, mesh: &PolyMesh, c: usize) -> DVector<f64> {
        let map = self.dofs.local_to_global(mesh, c);
        DVector::from_iterator(map.len(), map.iter().map(|&g| self.global[g]))
    }

    pub fn to_file(&self) -> SolutionFile {
        SolutionFile {
            k: self.k(),
            u0: (0..self.dofs.num_cells).map(|c| self.u0(c).to_vec()).collect(),
            ub: (0..self.dofs.num_edges).map(|e| self.ub(e).to_vec()).collect(),
            residual: self.residual,
        }
    }
}
