use crate::coeff::BoundCoefficients;
use crate::mesh::Mesh;
use crate::solve::ProblemData;
use crate::spaces::{cell_average, cr_interpolate, DiscreteField, QuadratureRule, SegmentRule};
use crate::Point;

use super::norms::{energy_error, ExactSolution};
use super::solution_jump;

/// Both sides of an error representation, with the right side split into terms.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationCheck {
    /// `‖α^{1/2} ∇_h e‖²`
    pub lhs: f64,
    /// Named right-hand-side terms, summed in this order into `rhs`.
    pub terms: Vec<(&'static str, f64)>,
    pub rhs: f64,
}

impl RepresentationCheck {
    fn new(lhs: f64, terms: Vec<(&'static str, f64)>) -> Self {
        let rhs = terms.iter().map(|(_, v)| v).sum();
        Self { lhs, terms, rhs }
    }

    /// `|lhs − rhs| / max(|lhs|, |rhs|)`, zero when both sides vanish.
    pub fn gap(&self) -> f64 {
        relative_gap(self.lhs, self.rhs)
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

pub(crate) fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-28 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

struct Context<'a> {
    mesh: &'a Mesh,
    coeff: &'a BoundCoefficients,
    exact: &'a dyn ExactSolution,
    data: &'a ProblemData<'a>,
    rule: &'a QuadratureRule,
    face_rule: SegmentRule,
}

impl Context<'_> {
    fn sub(&self, e: usize) -> usize {
        self.mesh.element(e).subdomain
    }

    fn dot_n(&self, f: usize, g: [f64; 2]) -> f64 {
        let n = self.mesh.face(f).normal;
        g[0] * n[0] + g[1] * n[1]
    }

    /// `α ∇(u − u_h)·n` from element `e` at `x` on face `f`.
    fn error_flux(&self, u_h: &DiscreteField, f: usize, e: usize, x: Point) -> f64 {
        let gu = self.exact.gradient(self.sub(e), x);
        let gh = u_h.eval_at(self.mesh, e, x).1;
        self.coeff.element(e) * self.dot_n(f, [gu[0] - gh[0], gu[1] - gh[1]])
    }

    /// `α ∇u_h·n` from element `e` at `x` on face `f`.
    fn discrete_flux(&self, u_h: &DiscreteField, f: usize, e: usize, x: Point) -> f64 {
        self.coeff.element(e) * self.dot_n(f, u_h.eval_at(self.mesh, e, x).1)
    }

    /// `Σ_F ∫_F g(f, t, x)` over the given faces.
    fn face_sum(&self, faces: impl Iterator<Item = usize>, g: impl Fn(usize, f64, Point) -> f64) -> f64 {
        faces
            .map(|f| {
                let len = self.mesh.face(f).length;
                len * self.face_rule.iter().map(|(t, w)| w * g(f, t, self.mesh.face_point(f, t))).sum::<f64>()
            })
            .sum()
    }

    /// `−Σ_{F∈E} ∫_F {α∇e·n}_w [u_h]`, boundary jump against the data.
    fn flux_average_term(&self, u_h: &DiscreteField) -> f64 {
        -self.face_sum(0..self.mesh.num_faces(), |f, t, x| {
            let face = self.mesh.face(f);
            let fc = self.coeff.face(f);
            let avg = match face.plus {
                None => self.error_flux(u_h, f, face.minus, x),
                Some(p) => fc.w_minus * self.error_flux(u_h, f, face.minus, x) + fc.w_plus * self.error_flux(u_h, f, p, x),
            };
            avg * solution_jump(self.mesh, f, u_h, self.data, t)
        })
    }

    /// `−Σ_{F∈E_I} ∫_F [α∇u_h·n] {v}^w` with `v(e, x)` element-wise.
    fn flux_jump_term(&self, u_h: &DiscreteField, v: impl Fn(usize, Point) -> f64) -> f64 {
        -self.face_sum(self.mesh.interior_faces().iter().copied(), |f, _, x| {
            let face = self.mesh.face(f);
            let fc = self.coeff.face(f);
            let p = face.plus.expect("interior face");
            let jn = self.discrete_flux(u_h, f, face.minus, x) - self.discrete_flux(u_h, f, p, x);
            jn * (fc.w_plus * v(face.minus, x) + fc.w_minus * v(p, x))
        })
    }
}

/// Checks the CR error representation
///
/// `‖α^{1/2}∇_h e‖² = Σ_K (f, u − I u)_K − Σ_{F∈E_I} ∫ [α∇u_h·n] {u − I u}^w − Σ_{F∈E} ∫ {α∇e·n}_w [u_h]`
///
/// with `e = u − u_h` and `I` the CR interpolant. Terms are named
/// `residual`, `flux_jump` and `flux_average`.
pub fn representation_check_cr(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    exact: &dyn ExactSolution,
    u_cr: &DiscreteField,
    data: &ProblemData,
    rule: &QuadratureRule,
) -> RepresentationCheck {
    let ctx = Context { mesh, coeff, exact, data, rule, face_rule: SegmentRule::with_degree(rule.degree()) };
    let interp = cr_interpolate(mesh, |e, x| exact.value(ctx.sub(e), x), &ctx.face_rule);
    // e − I e = u − I u since u_h is its own interpolant
    let defect = |e: usize, x: Point| exact.value(ctx.sub(e), x) - interp.eval_at(mesh, e, x).0;

    let lhs = energy_error(mesh, coeff, exact, u_cr, rule).powi(2);
    let residual: f64 = (0..mesh.num_elements())
        .map(|e| {
            mesh.area(e)
                * ctx
                    .rule
                    .iter()
                    .map(|(b, w)| {
                        let x = mesh.to_physical(e, b);
                        w * data.source_at(mesh, e, x) * defect(e, x)
                    })
                    .sum::<f64>()
        })
        .sum();
    let flux_jump = ctx.flux_jump_term(u_cr, defect);
    let flux_average = ctx.flux_average_term(u_cr);
    RepresentationCheck::new(lhs, vec![("residual", residual), ("flux_jump", flux_jump), ("flux_average", flux_average)])
}

/// Checks the DG error representation
///
/// `‖α^{1/2}∇_h e‖² = Σ_K (f + ∇·(α∇u_h), e − ē)_K − Σ_{F∈E} ∫ {α∇e·n}_w [u_h]
///   − Σ_{F∈E_I} ∫ [α∇u_h·n] {e − ē}^w + Σ_{F∈E} ∫ γ α_H/h_F [u_h][ē]`
///
/// with `ē` the element means of `e = u − u_h`. The last term comes from
/// `a_dg(e, ē) = 0` and enters with a plus sign. Terms are named `residual`,
/// `flux_average`, `flux_jump` and `penalty`.
pub fn representation_check_dg(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    exact: &dyn ExactSolution,
    u_dg: &DiscreteField,
    data: &ProblemData,
    gamma: f64,
    rule: &QuadratureRule,
) -> RepresentationCheck {
    let ctx = Context { mesh, coeff, exact, data, rule, face_rule: SegmentRule::with_degree(rule.degree()) };
    let err = |e: usize, x: Point| exact.value(ctx.sub(e), x) - u_dg.eval_at(mesh, e, x).0;
    let mean = cell_average(mesh, err, rule);
    let mean = mean.coefficients();
    let defect = |e: usize, x: Point| err(e, x) - mean[e];

    let lhs = energy_error(mesh, coeff, exact, u_dg, rule).powi(2);
    let residual: f64 = (0..mesh.num_elements())
        .map(|e| {
            let lap = coeff.element(e) * u_dg.laplacian(mesh, e);
            mesh.area(e)
                * rule
                    .iter()
                    .map(|(b, w)| {
                        let x = mesh.to_physical(e, b);
                        w * (data.source_at(mesh, e, x) + lap) * defect(e, x)
                    })
                    .sum::<f64>()
        })
        .sum();
    let flux_average = ctx.flux_average_term(u_dg);
    let flux_jump = ctx.flux_jump_term(u_dg, defect);
    let penalty = ctx.face_sum(0..mesh.num_faces(), |f, t, _| {
        let face = mesh.face(f);
        let mean_jump = mean[face.minus] - face.plus.map_or(0.0, |p| mean[p]);
        gamma * coeff.face(f).harmonic / face.length * solution_jump(mesh, f, u_dg, data, t) * mean_jump
    });
    RepresentationCheck::new(
        lhs,
        vec![("residual", residual), ("flux_average", flux_average), ("flux_jump", flux_jump), ("penalty", penalty)],
    )
}
