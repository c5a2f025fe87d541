//! Command-line driver: runs one benchmark and writes CSV (and optionally VTK).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use jumpfem::adapt::{csv_string, emit_csv, emit_vtk, run_adaptive, ProblemSpec, RefineMode, RunParams};
use jumpfem::coeff::CoefficientField;
use jumpfem::mesh::Mesh;
use jumpfem::{FemError, Method};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Cr,
    Dg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RefineArg {
    Uniform,
    Adaptive,
}

/// Adaptive CR / interior-penalty DG solver for diffusion problems with coefficient jumps.
#[derive(Debug, Parser)]
#[command(name = "jumpfem", version)]
struct Args {
    /// Problem name: flat, interface_manufactured, checkerboard or kellogg.
    #[arg(long)]
    problem: String,

    /// Coefficient ratio k for interface_manufactured and checkerboard.
    #[arg(long)]
    jump_ratio: Option<f64>,

    #[arg(long, value_enum, default_value = "cr")]
    method: MethodArg,

    /// Polynomial degree (1 for CR; 1 or 2 for DG).
    #[arg(long, default_value_t = 1)]
    degree: usize,

    /// DG penalty parameter [default: 10 (k+1)^2].
    #[arg(long)]
    gamma: Option<f64>,

    /// Dörfler marking parameter in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    theta: f64,

    #[arg(long, value_enum, default_value = "adaptive")]
    refine: RefineArg,

    /// Stop before solving a mesh with more unknowns than this.
    #[arg(long, default_value_t = 100_000)]
    max_dofs: usize,

    /// Quadrature exactness degree for load and estimator integrals [default: 2k+2].
    #[arg(long)]
    quad_degree: Option<usize>,

    /// Relative residual tolerance of the CG solver.
    #[arg(long, default_value_t = 1e-10)]
    solver_tol: f64,

    /// Write the per-level CSV here instead of standard output.
    #[arg(long)]
    out_csv: Option<PathBuf>,

    /// Write the final mesh and solution as a legacy VTK file.
    #[arg(long)]
    out_vtk: Option<PathBuf>,

    /// Initial mesh in the text format (vertices / triangles sections).
    #[arg(long)]
    mesh: Option<PathBuf>,

    /// Override coefficients as id:value pairs, e.g. "0:1,1:1e4". Only for problems without exact solution.
    #[arg(long)]
    alpha: Option<String>,

    /// Subdivisions per side of the default initial mesh.
    #[arg(long, default_value_t = 4)]
    initial_n: usize,

    /// Maximum number of levels.
    #[arg(long, default_value_t = 500)]
    max_levels: usize,

    /// For problems without exact solution, measure errors against a twice uniformly refined solve.
    #[arg(long)]
    reference_error: bool,
}

fn run(args: Args) -> Result<(), FemError> {
    let mut problem = ProblemSpec::by_name(&args.problem, args.jump_ratio)?;
    if let Some(spec) = &args.alpha {
        if problem.has_exact_solution() {
            return Err(FemError::InvalidArgument(format!(
                "--alpha would invalidate the exact solution of '{}'",
                problem.name
            )));
        }
        for (id, value) in CoefficientField::parse(spec)?.iter() {
            problem.alpha.set(id, value)?;
        }
    }
    let mesh = match &args.mesh {
        Some(path) => Mesh::read(path)?,
        None => problem.initial_mesh(args.initial_n)?,
    };
    let params = RunParams {
        method: match args.method {
            MethodArg::Cr => Method::Cr,
            MethodArg::Dg => Method::Dg,
        },
        degree: args.degree,
        gamma: args.gamma,
        theta: args.theta,
        refine: match args.refine {
            RefineArg::Uniform => RefineMode::Uniform,
            RefineArg::Adaptive => RefineMode::Adaptive,
        },
        max_dofs: args.max_dofs,
        quad_degree: args.quad_degree,
        solver_tol: args.solver_tol,
        max_levels: args.max_levels,
        reference_error: args.reference_error,
        ..RunParams::default()
    };

    let run = run_adaptive(&problem, mesh, &params)?;
    match &args.out_csv {
        Some(path) => emit_csv(&run.record, path)?,
        None => print!("{}", csv_string(&run.record)),
    }
    if let Some(path) = &args.out_vtk {
        let last = &run.last;
        emit_vtk(&last.mesh, &last.solution, &last.report, &last.coeff, path)?;
    }
    let last = &run.last.record;
    eprintln!(
        "{} {} levels, final ndof {}, eta {:.4e}{}",
        problem.name,
        run.record.levels.len(),
        last.ndof,
        last.eta,
        last.effectivity.map_or_else(String::new, |e| format!(", effectivity {e:.3}"))
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
