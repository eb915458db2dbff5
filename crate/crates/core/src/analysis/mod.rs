//! Manufactured solutions, discrete error norms and convergence studies.

mod cases;
mod errors;
mod table;

use std::ops::RangeInclusive;
use std::time::Instant;

use thiserror::Error;

use crate::localspaces::{build_local_spaces, CellSpace, LocalSpaceError, MAX_DEGREE};
use crate::polymesh::{generate, MeshError, MeshFamily, PolyMesh};
use crate::wgsolve::{assemble, solve, SolveError, WGSolution};

pub use cases::{CaseName, ManufacturedCase};
pub use errors::{energy_error, energy_error_via_weak_gradient, l2_projection_error};
pub use table::{format_sci, ConvergenceRow, ConvergenceTable, TableFormat};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("degree {0} exceeds the supported maximum {MAX_DEGREE}")]
    DegreeTooHigh(usize),
    #[error("level {level} is outside 1..={max} for the {family} family")]
    LevelOutOfRange { family: MeshFamily, level: usize, max: usize },
    #[error("a convergence study needs at least two levels, got {start}:{end}")]
    TooFewLevels { start: usize, end: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Local(#[from] LocalSpaceError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Finest level accepted for each mesh family.
pub fn max_level(family: MeshFamily) -> usize {
    match family {
        MeshFamily::Square | MeshFamily::Quad => 8,
        MeshFamily::Hex => 7,
    }
}

pub fn check_level(family: MeshFamily, level: usize) -> Result<(), AnalysisError> {
    let max = max_level(family);
    if level == 0 || level > max {
        return Err(AnalysisError::LevelOutOfRange { family, level, max });
    }
    Ok(())
}

/// Convergence rate `log2(e_prev / e_curr)`; `None` when either error is
/// not positive.
pub fn rate(e_prev: f64, e_curr: f64) -> Option<f64> {
    if e_prev > 0.0 && e_curr > 0.0 && e_prev.is_finite() && e_curr.is_finite() {
        Some((e_prev / e_curr).log2())
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub cells: usize,
    pub free_dofs: usize,
    pub l2_err: f64,
    pub energy_err: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Everything produced by one solve of a manufactured problem.
#[derive(Debug)]
pub struct CaseRun {
    pub spaces: Vec<CellSpace>,
    pub solution: WGSolution,
    pub report: ErrorReport,
}

/// Builds the local spaces, solves `-Δu = f`, `u = g` on the boundary, and
/// measures both discrete errors against the exact solution.
pub fn solve_case(
    mesh: &PolyMesh,
    k: usize,
    case: &ManufacturedCase,
    tol: f64,
) -> Result<CaseRun, AnalysisError> {
    if k > MAX_DEGREE {
        return Err(AnalysisError::DegreeTooHigh(k));
    }
    let start = Instant::now();
    let spaces = build_local_spaces(mesh, k)?;
    let system = assemble(mesh, &spaces, case.source, case.u)?;
    let solution = solve(&system, tol)?;
    let l2_err = l2_projection_error(mesh, &spaces, case.u, &solution)?;
    let energy_err = energy_error(mesh, &spaces, case.grad, &solution)?;
    log::info!(
        "k={k} cells={} free={} {:?} iterations={} residual={:.2e} in {:.2?}",
        mesh.num_cells(),
        system.rhs.len(),
        solution.method,
        solution.iterations,
        solution.residual,
        start.elapsed()
    );
    let report = ErrorReport {
        h: mesh.mesh_size(),
        cells: mesh.num_cells(),
        free_dofs: system.rhs.len(),
        l2_err,
        energy_err,
        iterations: solution.iterations,
        residual: solution.residual,
    };
    Ok(CaseRun {
        spaces,
        solution,
        report,
    })
}

/// Runs `case` on every level of `levels`. Input errors are returned
/// directly; a failure at some level stops the study and is recorded in
/// [`ConvergenceTable::failure`] alongside the rows completed so far.
pub fn run_convergence(
    family: MeshFamily,
    k: usize,
    levels: RangeInclusive<usize>,
    case: CaseName,
    tol: f64,
) -> Result<ConvergenceTable, AnalysisError> {
    if k > MAX_DEGREE {
        return Err(AnalysisError::DegreeTooHigh(k));
    }
    let (start, end) = (*levels.start(), *levels.end());
    if end <= start {
        return Err(AnalysisError::TooFewLevels { start, end });
    }
    check_level(family, start)?;
    check_level(family, end)?;

    let mc = case.case();
    let undefined_rates = mc.is_reproduced_by(k);
    let mut table = ConvergenceTable {
        family,
        k,
        case,
        rows: Vec::new(),
        failure: None,
    };
    for level in levels {
        let run = generate(family, level)
            .map_err(AnalysisError::from)
            .and_then(|mesh| solve_case(&mesh, k, &mc, tol));
        let report = match run {
            Ok(r) => r.report,
            Err(e) => {
                table.failure = Some(format!("level {level}: {e}"));
                break;
            }
        };
        let prev = table.rows.last();
        let (l2_rate, energy_rate) = match prev {
            Some(p) if !undefined_rates => (rate(p.l2_err, report.l2_err), rate(p.energy_err, report.energy_err)),
            _ => (None, None),
        };
        table.rows.push(ConvergenceRow {
            level,
            h: report.h,
            cells: report.cells,
            free_dofs: report.free_dofs,
            l2_err: report.l2_err,
            l2_rate,
            energy_err: report.energy_err,
            energy_rate,
        });
    }
    Ok(table)
}
