use nalgebra::{Cholesky, DMatrix, DVector};

use super::assemble::SparseSymSystem;
use super::sparse::CsrMatrix;
use super::{SolveError, WGSolution};

/// Systems up to this size are factorized densely.
pub const DIRECT_LIMIT: usize = 1000;

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Direct,
    ConjugateGradient,
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: DVector<f64>,
    pub iterations: usize,
    /// True relative residual `||b - A x|| / ||b||`.
    pub residual: f64,
    pub history: Vec<f64>,
}

/// Block-Jacobi preconditioner with dense Cholesky factors per block.
struct BlockJacobi {
    blocks: Vec<(Vec<usize>, Cholesky<f64, nalgebra::Dyn>)>,
}

impl BlockJacobi {
    fn new(a: &CsrMatrix, blocks: &[Vec<usize>]) -> Result<Self, SolveError> {
        let blocks = blocks
            .iter()
            .map(|idx| {
                let m = DMatrix::from_fn(idx.len(), idx.len(), |i, j| a.get(idx[i], idx[j]));
                Cholesky::new(m)
                    .map(|c| (idx.clone(), c))
                    .ok_or(SolveError::Indefinite { iteration: 0 })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { blocks })
    }

    fn apply(&self, r: &DVector<f64>) -> DVector<f64> {
        let mut z = DVector::zeros(r.len());
        for (idx, chol) in &self.blocks {
            let rb = DVector::from_iterator(idx.len(), idx.iter().map(|&i| r[i]));
            let zb = chol.solve(&rb);
            for (k, &i) in idx.iter().enumerate() {
                z[i] = zb[k];
            }
        }
        z
    }
}

/// Relative residual that rounding alone produces when evaluating
/// `b - A x` in double precision: `8 eps || |A| |x| || / ||b||`.
pub fn residual_floor(a: &CsrMatrix, b: &DVector<f64>, x: &DVector<f64>) -> f64 {
    let bn = b.norm();
    if bn == 0.0 {
        return 0.0;
    }
    let abs_ax: f64 = (0..a.nrows)
        .map(|i| {
            let s: f64 = a.row(i).map(|(j, v)| (v * x[j]).abs()).sum();
            s * s
        })
        .sum::<f64>()
        .sqrt();
    8.0 * f64::EPSILON * abs_ax / bn
}

fn relative_residual(a: &CsrMatrix, b: &DVector<f64>, x: &DVector<f64>) -> f64 {
    let bn = b.norm();
    if bn == 0.0 {
        return (a.mul_vec(x)).norm();
    }
    (b - a.mul_vec(x)).norm() / bn
}

/// Preconditioned conjugate gradients. `blocks` partition the unknowns for
/// the block-Jacobi preconditioner; singleton blocks give plain Jacobi.
pub fn pcg(
    a: &CsrMatrix,
    b: &DVector<f64>,
    blocks: &[Vec<usize>],
    tol: f64,
    max_iter: usize,
) -> Result<CgOutcome, SolveError> {
    let n = b.len();
    let mut x = DVector::zeros(n);
    let bn = b.norm();
    if bn == 0.0 {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            residual: 0.0,
            history: Vec::new(),
        });
    }
    let pre = BlockJacobi::new(a, blocks)?;
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut ap = DVector::zeros(n);

    // restarts refresh the recursively updated residual
    for _restart in 0..4 {
        let mut r = b - a.mul_vec(&x);
        let mut rel = r.norm() / bn;
        let target = tol.max(residual_floor(a, b, &x));
        if rel <= target {
            break;
        }
        let mut z = pre.apply(&r);
        let mut p = z.clone();
        let mut rz = r.dot(&z);
        while iterations < max_iter {
            a.mul_vec_into(&p, &mut ap);
            let pap = p.dot(&ap);
            if pap <= 0.0 || !pap.is_finite() {
                return Err(SolveError::Indefinite {
                    iteration: iterations,
                });
            }
            let alpha = rz / pap;
            x.axpy(alpha, &p, 1.0);
            r.axpy(-alpha, &ap, 1.0);
            iterations += 1;
            rel = r.norm() / bn;
            history.push(rel);
            if rel <= 0.5 * target {
                break;
            }
            z = pre.apply(&r);
            let rz_new = r.dot(&z);
            p.axpy(1.0, &z, rz_new / rz);
            rz = rz_new;
        }
        if iterations >= max_iter {
            break;
        }
    }

    let residual = relative_residual(a, b, &x);
    check_residual(a, b, &x, residual, tol, false).map_err(|_| SolveError::ConvergenceFailure {
        iterations,
        residual,
        history: history.clone(),
    })?;
    Ok(CgOutcome {
        x,
        iterations,
        residual,
        history,
    })
}

/// Accepts `residual <= tol`, or a residual at the rounding floor when
/// `tol` lies below it.
fn check_residual(
    a: &CsrMatrix,
    b: &DVector<f64>,
    x: &DVector<f64>,
    residual: f64,
    tol: f64,
    warn: bool,
) -> Result<(), ()> {
    if residual <= tol {
        return Ok(());
    }
    let floor = residual_floor(a, b, x);
    if residual <= floor {
        if warn {
            log::warn!("relative residual {residual:.3e} above tolerance {tol:.1e} but at the rounding floor {floor:.3e}");
        }
        return Ok(());
    }
    Err(())
}

/// Iteration cap `20 sqrt(N)`.
pub fn iteration_cap(n: usize) -> usize {
    ((20.0 * (n as f64).sqrt()).ceil() as usize).max(20)
}

fn solve_direct(a: &CsrMatrix, b: &DVector<f64>) -> Result<DVector<f64>, SolveError> {
    let chol = Cholesky::new(a.to_dense()).ok_or(SolveError::Indefinite { iteration: 0 })?;
    Ok(chol.solve(b))
}

/// Solves the reduced system and scatters the result, together with the
/// prescribed boundary values, into a global solution.
pub fn solve(system: &SparseSymSystem, tol: f64) -> Result<WGSolution, SolveError> {
    let n = system.rhs.len();
    let (x, iterations, method, history) = if n <= DIRECT_LIMIT {
        let x = if system.rhs.norm() == 0.0 {
            DVector::zeros(n)
        } else {
            solve_direct(&system.matrix, &system.rhs)?
        };
        (x, 0, SolveMethod::Direct, Vec::new())
    } else {
        let out = pcg(
            &system.matrix,
            &system.rhs,
            &system.dofs.free_blocks(),
            tol,
            iteration_cap(n),
        )?;
        (out.x, out.iterations, SolveMethod::ConjugateGradient, out.history)
    };
    let residual = if system.rhs.norm() == 0.0 && x.norm() == 0.0 {
        0.0
    } else {
        relative_residual(&system.matrix, &system.rhs, &x)
    };
    if check_residual(&system.matrix, &system.rhs, &x, residual, tol, true).is_err() {
        return Err(SolveError::ConvergenceFailure {
            iterations,
            residual,
            history,
        });
    }

    let mut global = system.boundary_values.clone();
    for (i, &g) in system.dofs.free_dofs.iter().enumerate() {
        global[g] = x[i];
    }
    Ok(WGSolution {
        dofs: system.dofs.clone(),
        global,
        iterations,
        residual,
        method,
    })
}
