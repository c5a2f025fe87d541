use crate::coeff::BoundCoefficients;
use crate::mesh::Mesh;
use crate::solve::ProblemData;
use crate::spaces::{DiscreteField, QuadratureRule, SegmentRule};
use crate::Point;

use super::integrate::element_integral;
use super::{solution_jump_indicator, IndicatorReport};

/// A closed-form solution given per subdomain.
pub trait ExactSolution {
    fn value(&self, subdomain: usize, x: Point) -> f64;

    fn gradient(&self, subdomain: usize, x: Point) -> [f64; 2];

    /// A point where the gradient is unbounded, if any. Error integrals
    /// subdivide elements that have it as a vertex.
    fn singular_point(&self) -> Option<Point> {
        None
    }
}

/// Exact error measures of one discrete solution.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorReport {
    /// `‖α^{1/2} ∇_h (u − u_h)‖_0`
    pub energy: f64,
    /// `(Σ_F ‖u_h‖²_{J,F})^{1/2}`
    pub jump: f64,
}

impl ErrorReport {
    /// `|||u − u_h|||_dg`
    pub fn dg(&self) -> f64 {
        dg_error_norm(self.energy, self.jump)
    }

    /// `η` divided by the error norm that matches the method.
    pub fn effectivity(&self, eta: f64, dg: bool) -> f64 {
        eta / if dg { self.dg() } else { self.energy }
    }
}

/// `α_K ∫_K |∇u − ∇u_h|²` for every element.
pub fn element_energy_errors(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    exact: &dyn ExactSolution,
    u_h: &DiscreteField,
    rule: &QuadratureRule,
) -> Vec<f64> {
    let singular = exact.singular_point();
    (0..mesh.num_elements())
        .map(|e| {
            let sub = mesh.element(e).subdomain;
            coeff.element(e)
                * element_integral(mesh, e, rule, singular, |b| {
                    let gu = exact.gradient(sub, mesh.to_physical(e, b));
                    let gh = u_h.gradient(mesh, e, b);
                    (gu[0] - gh[0]).powi(2) + (gu[1] - gh[1]).powi(2)
                })
        })
        .collect()
}

/// `‖α^{1/2} ∇_h (u − u_h)‖_0`
pub fn energy_error(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    exact: &dyn ExactSolution,
    u_h: &DiscreteField,
    rule: &QuadratureRule,
) -> f64 {
    element_energy_errors(mesh, coeff, exact, u_h, rule).iter().sum::<f64>().sqrt()
}

/// `(Σ_F ‖u_h‖²_{J,F})^{1/2}` with the boundary jump taken against the data.
pub fn jump_seminorm(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    u_h: &DiscreteField,
    data: &ProblemData,
    rule: &SegmentRule,
) -> f64 {
    (0..mesh.num_faces())
        .map(|f| solution_jump_indicator(mesh, coeff, f, u_h, data, rule).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `|||v|||_dg` from its energy and jump parts.
pub fn dg_error_norm(energy: f64, jump: f64) -> f64 {
    energy.hypot(jump)
}

/// Energy error and jump seminorm of `u_h`.
pub fn error_report(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    exact: &dyn ExactSolution,
    u_h: &DiscreteField,
    data: &ProblemData,
    rule: &QuadratureRule,
) -> ErrorReport {
    ErrorReport {
        energy: energy_error(mesh, coeff, exact, u_h, rule),
        jump: jump_seminorm(mesh, coeff, u_h, data, &SegmentRule::with_degree(rule.degree())),
    }
}

/// Local efficiency ratios `η_K / (|||u − u_h|||_{Δ_K} + osc_α(f, Δ_K))`.
#[derive(Clone, Debug, PartialEq)]
pub struct EfficiencyRatios {
    pub ratios: Vec<f64>,
}

impl EfficiencyRatios {
    pub fn max(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    /// The `q`-quantile (`0 ≤ q ≤ 1`, nearest rank).
    pub fn quantile(&self, q: f64) -> f64 {
        if self.ratios.is_empty() {
            return 0.0;
        }
        let mut sorted = self.ratios.clone();
        sorted.sort_by(f64::total_cmp);
        let i = ((q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64).round()) as usize;
        sorted[i]
    }
}

/// Per-element efficiency ratios.
///
/// The patch `Δ_K` is `K` together with its face neighbours. The patch error
/// sums `α ‖∇(u − u_h)‖²` over the patch elements and `‖u_h‖²_{J,F}` over all
/// their faces; the oscillation is summed over the patch. A zero indicator
/// gives ratio 0.
pub fn local_efficiency_ratios(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    report: &IndicatorReport,
    exact: &dyn ExactSolution,
    u_h: &DiscreteField,
    rule: &QuadratureRule,
) -> EfficiencyRatios {
    let energy = element_energy_errors(mesh, coeff, exact, u_h, rule);
    let mut patch_faces = Vec::with_capacity(12);
    let ratios = (0..mesh.num_elements())
        .map(|e| {
            let eta = report.eta_local[e];
            if eta == 0.0 {
                return 0.0;
            }
            let patch: Vec<usize> = std::iter::once(e).chain(mesh.neighbors(e)).collect();
            patch_faces.clear();
            patch_faces.extend(patch.iter().flat_map(|&k| mesh.element_faces(k)));
            patch_faces.sort_unstable();
            patch_faces.dedup();
            let err2 = patch.iter().map(|&k| energy[k]).sum::<f64>()
                + patch_faces.iter().map(|&f| report.eta_ju[f].powi(2)).sum::<f64>();
            let osc = patch.iter().map(|&k| report.osc[k].powi(2)).sum::<f64>().sqrt();
            eta / (err2.sqrt() + osc)
        })
        .collect();
    EfficiencyRatios { ratios }
}
