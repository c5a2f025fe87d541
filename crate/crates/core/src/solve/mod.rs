//! Assembly of the CR and interior-penalty DG systems and a sparse SPD solver.

mod assemble;
mod cg;
mod csr;

pub use assemble::{assemble_cr, assemble_dg, default_gamma, solve_cr, solve_dg, ProblemData, SparseSpdSystem};
pub use cg::{pcg, SolveStats, SolverOptions};
pub use csr::CsrMatrix;

use crate::Result;

/// Solves the reduced system and returns the full coefficient vector.
pub fn solve_spd(system: &SparseSpdSystem, opts: &SolverOptions) -> Result<(Vec<f64>, SolveStats)> {
    let (x, stats) = pcg(&system.matrix, &system.rhs, None, opts)?;
    Ok((system.expand(&x), stats))
}
