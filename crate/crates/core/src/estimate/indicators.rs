use crate::coeff::BoundCoefficients;
use crate::mesh::Mesh;
use crate::solve::ProblemData;
use crate::spaces::{l2_project, DiscreteField, QuadratureRule, SegmentRule, Side, SpaceKind};
use crate::{Point, Result};

/// Element and face indicators of one discrete solution.
///
/// Per-face vectors are indexed by face; `eta_jn` is zero on boundary faces.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorReport {
    pub kind: SpaceKind,
    /// `η_{r,K}`
    pub eta_r: Vec<f64>,
    /// `η_K`
    pub eta_local: Vec<f64>,
    /// `osc_α(f, K)`
    pub osc: Vec<f64>,
    /// `η_{j,n,F}`
    pub eta_jn: Vec<f64>,
    /// `η_{j,u,F}`
    pub eta_ju: Vec<f64>,
    /// `η_{j,t,F}`, a diagnostic that does not enter `η_K`.
    pub eta_jt: Vec<f64>,
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl IndicatorReport {
    /// Global estimator `η`, assembled face by face (interior faces once).
    pub fn eta(&self) -> f64 {
        (self.eta_r_total().powi(2) + self.eta_jn_total().powi(2) + self.eta_ju_total().powi(2)).sqrt()
    }

    /// `(Σ_K η_K²)^{1/2}`, equal to [`Self::eta`] up to rounding.
    pub fn eta_from_local(&self) -> f64 {
        l2(&self.eta_local)
    }

    pub fn eta_r_total(&self) -> f64 {
        l2(&self.eta_r)
    }

    pub fn eta_jn_total(&self) -> f64 {
        l2(&self.eta_jn)
    }

    pub fn eta_ju_total(&self) -> f64 {
        l2(&self.eta_ju)
    }

    pub fn eta_jt_total(&self) -> f64 {
        l2(&self.eta_jt)
    }

    pub fn osc_total(&self) -> f64 {
        l2(&self.osc)
    }
}

/// Degree of the projection of `f` used by the residual of a space.
pub fn projection_degree(kind: SpaceKind) -> usize {
    match kind {
        SpaceKind::Cr | SpaceKind::Dg(0) => 0,
        SpaceKind::Dg(k) => k - 1,
    }
}

/// `η_{r,K} = h_K α_K^{-1/2} ‖f_m + α_K Δu_h‖_{0,K}`.
///
/// `f_proj` is the projection of the source (degree 0 for CR, `k − 1` for DG).
/// The Laplacian vanishes for CR and DG with `k = 1`.
pub fn element_residual_indicator(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    e: usize,
    f_proj: &DiscreteField,
    u_h: &DiscreteField,
    rule: &QuadratureRule,
) -> f64 {
    let alpha = coeff.element(e);
    let lap = alpha * u_h.laplacian(mesh, e);
    let norm2: f64 = rule
        .iter()
        .map(|(b, w)| {
            let r = f_proj.value(mesh, e, b) + lap;
            w * r * r
        })
        .sum::<f64>()
        * mesh.area(e);
    mesh.diameter(e) / alpha.sqrt() * norm2.sqrt()
}

/// `η_{j,n,F} = (h_F/α_A)^{1/2} ‖[α∇u_h·n]‖_{0,F}`; `None` on boundary faces.
pub fn flux_jump_indicator(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    f: usize,
    u_h: &DiscreteField,
    rule: &SegmentRule,
) -> Option<f64> {
    let face = mesh.face(f);
    face.plus?;
    let fc = coeff.face(f);
    let flux = |side: Side, alpha: f64, t: f64| {
        let (_, g) = u_h.trace(mesh, f, side, t).expect("interior face");
        alpha * (g[0] * face.normal[0] + g[1] * face.normal[1])
    };
    let norm2 = face.length
        * rule
            .iter()
            .map(|(t, w)| {
                let j = flux(Side::Minus, fc.minus, t) - flux(Side::Plus, fc.plus, t);
                w * j * j
            })
            .sum::<f64>();
    Some((face.length / fc.arithmetic).sqrt() * norm2.sqrt())
}

/// `[u_h]` at parameter `t`, with `u_h − g` on boundary faces.
pub fn solution_jump(mesh: &Mesh, f: usize, u_h: &DiscreteField, data: &ProblemData, t: f64) -> f64 {
    let face = mesh.face(f);
    match face.plus {
        Some(_) => u_h.jump(mesh, f, t),
        None => {
            let x = mesh.face_point(f, t);
            u_h.eval_at(mesh, face.minus, x).0 - data.boundary_value(mesh, face.minus, x)
        }
    }
}

/// `η_{j,u,F} = (α_H/h_F)^{1/2} ‖[u_h]‖_{0,F}`, which is also `‖u_h‖_{J,F}`.
pub fn solution_jump_indicator(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    f: usize,
    u_h: &DiscreteField,
    data: &ProblemData,
    rule: &SegmentRule,
) -> f64 {
    let face = mesh.face(f);
    let norm2 = face.length
        * rule
            .iter()
            .map(|(t, w)| {
                let j = solution_jump(mesh, f, u_h, data, t);
                w * j * j
            })
            .sum::<f64>();
    (coeff.face(f).harmonic / face.length).sqrt() * norm2.sqrt()
}

/// `η_{j,t,F} = (α_H h_F)^{1/2} ‖[∇u_h·t]‖_{0,F}`.
///
/// On boundary faces the tangential derivative of the data is approximated
/// by its secant slope over the face.
pub fn tangential_jump_indicator(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    f: usize,
    u_h: &DiscreteField,
    data: &ProblemData,
    rule: &SegmentRule,
) -> f64 {
    let face = mesh.face(f);
    let t_dot = |g: [f64; 2]| g[0] * face.tangent[0] + g[1] * face.tangent[1];
    let data_slope = if face.is_boundary() && data.dirichlet.is_some() {
        let e = face.minus;
        let ga = data.boundary_value(mesh, e, mesh.face_point(f, 0.0));
        let gb = data.boundary_value(mesh, e, mesh.face_point(f, 1.0));
        (gb - ga) / face.length
    } else {
        0.0
    };
    let norm2 = face.length
        * rule
            .iter()
            .map(|(t, w)| {
                let minus = t_dot(u_h.trace(mesh, f, Side::Minus, t).expect("minus side").1);
                let plus = u_h.trace(mesh, f, Side::Plus, t).map_or(data_slope, |(_, g)| t_dot(g));
                let j = minus - plus;
                w * j * j
            })
            .sum::<f64>();
    (coeff.face(f).harmonic * face.length).sqrt() * norm2.sqrt()
}

/// `η_K² = η_{r,K}² + ½ Σ_{interior} (η_{j,n,F}² + η_{j,u,F}²) + Σ_{boundary} η_{j,u,F}²`.
///
/// `interior` holds `(η_{j,n,F}, η_{j,u,F})` for the interior faces of `K` and
/// `boundary` the `η_{j,u,F}` of its boundary faces.
pub fn local_indicator(eta_r: f64, interior: &[(f64, f64)], boundary: &[f64]) -> f64 {
    let faces: f64 = interior.iter().map(|(n, u)| 0.5 * (n * n + u * u)).sum::<f64>()
        + boundary.iter().map(|u| u * u).sum::<f64>();
    (eta_r * eta_r + faces).sqrt()
}

/// `osc_α(f, K) = h_K α_K^{-1/2} ‖f − f_m‖_{0,K}` for every element.
pub fn oscillation(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    f: impl Fn(usize, Point) -> f64,
    degree: usize,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    let sub = |e: usize, x: Point| f(mesh.element(e).subdomain, x);
    let f_proj = l2_project(mesh, sub, degree, rule)?;
    Ok(oscillation_with_projection(mesh, coeff, &sub, &f_proj, rule))
}

fn oscillation_with_projection(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    f: &dyn Fn(usize, Point) -> f64,
    f_proj: &DiscreteField,
    rule: &QuadratureRule,
) -> Vec<f64> {
    (0..mesh.num_elements())
        .map(|e| {
            let norm2: f64 = rule
                .iter()
                .map(|(b, w)| {
                    let d = f(e, mesh.to_physical(e, b)) - f_proj.value(mesh, e, b);
                    w * d * d
                })
                .sum::<f64>()
                * mesh.area(e);
            mesh.diameter(e) / coeff.element(e).sqrt() * norm2.sqrt()
        })
        .collect()
}

/// Computes every indicator for `u_h` (CR or DG).
///
/// `rule` integrates the source; face integrals use Gauss rules of the same degree.
pub fn compute_indicators(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    data: &ProblemData,
    u_h: &DiscreteField,
    rule: &QuadratureRule,
) -> Result<IndicatorReport> {
    let kind = u_h.kind();
    let source = |e: usize, x: Point| data.source_at(mesh, e, x);
    let f_proj = l2_project(mesh, source, projection_degree(kind), rule)?;
    let face_rule = SegmentRule::with_degree(rule.degree().max(4));

    let eta_r: Vec<f64> =
        (0..mesh.num_elements()).map(|e| element_residual_indicator(mesh, coeff, e, &f_proj, u_h, rule)).collect();
    let osc = oscillation_with_projection(mesh, coeff, &source, &f_proj, rule);
    let eta_jn: Vec<f64> =
        (0..mesh.num_faces()).map(|f| flux_jump_indicator(mesh, coeff, f, u_h, &face_rule).unwrap_or(0.0)).collect();
    let eta_ju: Vec<f64> =
        (0..mesh.num_faces()).map(|f| solution_jump_indicator(mesh, coeff, f, u_h, data, &face_rule)).collect();
    let eta_jt: Vec<f64> =
        (0..mesh.num_faces()).map(|f| tangential_jump_indicator(mesh, coeff, f, u_h, data, &face_rule)).collect();

    let mut interior = Vec::with_capacity(3);
    let mut boundary = Vec::with_capacity(3);
    let eta_local = (0..mesh.num_elements())
        .map(|e| {
            interior.clear();
            boundary.clear();
            for f in mesh.element_faces(e) {
                if mesh.face(f).is_boundary() {
                    boundary.push(eta_ju[f]);
                } else {
                    interior.push((eta_jn[f], eta_ju[f]));
                }
            }
            local_indicator(eta_r[e], &interior, &boundary)
        })
        .collect();

    Ok(IndicatorReport { kind, eta_r, eta_local, osc, eta_jn, eta_ju, eta_jt })
}
