//! Command-line front end: `mesh`, `solve` and `convergence`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    check_level, format_sci, run_convergence, solve_case, AnalysisError, CaseName, ConvergenceTable, TableFormat,
};
use crate::localspaces::MAX_DEGREE;
use crate::polymesh::{generate, read_mesh, write_mesh, MeshFamily, PolyMesh};
use crate::wgsolve::DEFAULT_TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "wg-sfem", version, about = "Stabilizer-free weak Galerkin solver for -Δu = f on polygonal meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a mesh of the unit square and write it as JSON.
    Mesh {
        #[arg(long)]
        family: MeshFamily,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one manufactured problem and report its errors.
    Solve(SolveArgs),
    /// Run a manufactured problem over a range of levels.
    Convergence {
        #[arg(long)]
        family: MeshFamily,
        #[arg(long)]
        degree: usize,
        /// Inclusive range `A:B`.
        #[arg(long, value_parser = parse_levels)]
        levels: (usize, usize),
        #[arg(long, default_value = "md", value_parser = clap::builder::ValueParser::new(|s: &str| s.parse::<TableFormat>()))]
        format: TableFormat,
        #[arg(long, default_value = "sin2d")]
        case: CaseName,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, conflicts_with_all = ["family", "level"])]
    mesh: Option<PathBuf>,
    #[arg(long, requires = "level")]
    family: Option<MeshFamily>,
    #[arg(long, requires = "family")]
    level: Option<usize>,
    #[arg(long)]
    degree: usize,
    #[arg(long)]
    case: CaseName,
    /// Write the solution as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

fn parse_levels(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected A:B, got '{s}'"))?;
    let a = a.trim().parse().map_err(|_| format!("bad level '{a}'"))?;
    let b = b.trim().parse().map_err(|_| format!("bad level '{b}'"))?;
    Ok((a, b))
}

fn usage(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn check_degree(k: usize) -> Result<(), i32> {
    if k > MAX_DEGREE {
        return Err(usage(format!("degree {k} exceeds the supported maximum {MAX_DEGREE}")));
    }
    Ok(())
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), i32> {
    fs::write(path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn run_mesh(family: MeshFamily, level: usize, out: &PathBuf) -> i32 {
    if let Err(e) = check_level(family, level) {
        return usage(e);
    }
    let mesh = match generate(family, level) {
        Ok(m) => m,
        Err(e) => return usage(e),
    };
    if let Err(e) = write_mesh(&mesh, out) {
        return usage(e);
    }
    println!(
        "{family} level {level}: {} vertices, {} cells, {} edges, h = {}",
        mesh.num_vertices(),
        mesh.num_cells(),
        mesh.num_edges(),
        format_sci(mesh.mesh_size())
    );
    EXIT_OK
}

fn load_mesh(args: &SolveArgs) -> Result<PolyMesh, i32> {
    match (&args.mesh, args.family, args.level) {
        (Some(path), _, _) => read_mesh(path).map_err(usage),
        (None, Some(family), Some(level)) => {
            check_level(family, level).map_err(usage)?;
            generate(family, level).map_err(usage)
        }
        _ => Err(usage("either --mesh or both --family and --level are required")),
    }
}

fn run_solve(args: &SolveArgs) -> i32 {
    if let Err(code) = check_degree(args.degree) {
        return code;
    }
    let mesh = match load_mesh(args) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let case = args.case.case();
    let run = match solve_case(&mesh, args.degree, &case, args.tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SOLVER;
        }
    };
    let r = run.report;
    println!(
        "k = {} case = {} cells = {} dofs = {} h = {} l2_err = {} energy_err = {} iterations = {} residual = {}",
        args.degree,
        args.case,
        r.cells,
        r.free_dofs,
        format_sci(r.h),
        format_sci(r.l2_err),
        format_sci(r.energy_err),
        r.iterations,
        format_sci(r.residual)
    );
    if let Some(out) = &args.out {
        let json = serde_json::to_string(&run.solution.to_file()).expect("solution serializes");
        if let Err(code) = write_file(out, &json) {
            return code;
        }
    }
    EXIT_OK
}

#[allow(clippy::too_many_arguments)]
fn run_study(
    family: MeshFamily,
    degree: usize,
    levels: (usize, usize),
    format: TableFormat,
    case: CaseName,
    out: Option<&PathBuf>,
    tol: f64,
) -> i32 {
    if let Err(code) = check_degree(degree) {
        return code;
    }
    let table = match run_convergence(family, degree, levels.0..=levels.1, case, tol) {
        Ok(t) => t,
        Err(e @ (AnalysisError::DegreeTooHigh(_)
        | AnalysisError::LevelOutOfRange { .. }
        | AnalysisError::TooFewLevels { .. })) => return usage(e),
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SOLVER;
        }
    };
    let mut stdout = std::io::stdout().lock();
    let _ = write!(stdout, "{}", table.render_short(format));
    if let Some(path) = out {
        if let Err(code) = write_file(path, &table.render(format)) {
            return code;
        }
    }
    if let Some(f) = &table.failure {
        eprintln!("error: study incomplete, {f}");
    }
    study_exit_code(&table)
}

/// 0 for a complete study, 4 when some levels finished before a failure,
/// 3 when none did.
pub fn study_exit_code(table: &ConvergenceTable) -> i32 {
    match (&table.failure, table.rows.is_empty()) {
        (None, _) => EXIT_OK,
        (Some(_), false) => EXIT_PARTIAL,
        (Some(_), true) => EXIT_SOLVER,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match &cli.command {
        Command::Mesh { family, level, out } => run_mesh(*family, *level, out),
        Command::Solve(args) => run_solve(args),
        Command::Convergence {
            family,
            degree,
            levels,
            format,
            case,
            out,
            tol,
        } => run_study(*family, *degree, *levels, *format, *case, out.as_ref(), *tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ConvergenceRow;

    fn table(rows: usize, failure: Option<&str>) -> ConvergenceTable {
        let row = ConvergenceRow {
            level: 1,
            h: 1.0,
            cells: 1,
            free_dofs: 1,
            l2_err: 1.0,
            l2_rate: None,
            energy_err: 1.0,
            energy_rate: None,
        };
        ConvergenceTable {
            family: MeshFamily::Square,
            k: 0,
            case: CaseName::Sin2d,
            rows: vec![row; rows],
            failure: failure.map(str::to_string),
        }
    }

    #[test]
    fn study_exit_codes() {
        assert_eq!(study_exit_code(&table(3, None)), EXIT_OK);
        assert_eq!(study_exit_code(&table(2, Some("level 3: diverged"))), EXIT_PARTIAL);
        assert_eq!(study_exit_code(&table(0, Some("level 1: diverged"))), EXIT_SOLVER);
    }

    #[test]
    fn level_ranges_parse() {
        assert_eq!(parse_levels("3:5"), Ok((3, 5)));
        assert!(parse_levels("3").is_err());
        assert!(parse_levels("a:5").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
