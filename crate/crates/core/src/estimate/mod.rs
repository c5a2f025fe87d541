//! A posteriori indicators, oscillation, exact error norms and the error
//! representations behind the reliability bounds.
//!
//! Indicators for a discrete solution `u_h` with coefficient `α`:
//!
//! * `η_{r,K} = h_K α_K^{-1/2} ‖r_K‖_{0,K}` with `r_K = f_0` (CR) or
//!   `f_{k−1} + α_K Δu_h` (DG),
//! * `η_{j,n,F} = (h_F/α_A)^{1/2} ‖[α∇u_h·n]‖_{0,F}` on interior faces,
//! * `η_{j,u,F} = (α_H/h_F)^{1/2} ‖[u_h]‖_{0,F}` on all faces,
//! * `η_{j,t,F} = (α_H h_F)^{1/2} ‖[∇u_h·t]‖_{0,F}` (diagnostic).
//!
//! On boundary faces the solution jump is `u_h − g`.

mod indicators;
mod integrate;
mod norms;
mod representation;

pub use indicators::{
    compute_indicators, element_residual_indicator, flux_jump_indicator, local_indicator, oscillation,
    projection_degree, solution_jump, solution_jump_indicator, tangential_jump_indicator, IndicatorReport,
};
pub use norms::{
    dg_error_norm, element_energy_errors, energy_error, error_report, jump_seminorm, local_efficiency_ratios,
    EfficiencyRatios, ErrorReport, ExactSolution,
};
pub use representation::{representation_check_cr, representation_check_dg, RepresentationCheck};
