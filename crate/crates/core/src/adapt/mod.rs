//! Marking, benchmark problems, the adaptive driver and output writers.

pub mod catalog;
mod driver;
mod marking;
mod output;

pub use catalog::{catalog, KelloggParams, ProblemKind, ProblemSpec};
pub use driver::{
    num_dofs, prolongate, reference_error, run_adaptive, run_adaptive_with, solve_level, AdaptiveRun,
    AdaptiveRunRecord, LevelRecord, LevelState, RefineMode, RunParams,
};
pub use marking::dorfler_mark;
pub use output::{csv_string, emit_csv, emit_vtk, vtk_string, CSV_HEADER};
