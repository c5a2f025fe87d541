use std::str::FromStr;
use std::time::Instant;

use crate::coeff::BoundCoefficients;
use crate::estimate::{compute_indicators, error_report, jump_seminorm, ErrorReport, IndicatorReport};
use crate::mesh::Mesh;
use crate::solve::{assemble_cr, assemble_dg, default_gamma, pcg, ProblemData, SolveStats, SolverOptions};
use crate::spaces::{dim_pk, DiscreteField, LagrangeBasis, QuadratureRule, SegmentRule, SpaceKind};
use crate::{FemError, Method, Result};

use super::{dorfler_mark, ProblemSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefineMode {
    Uniform,
    Adaptive,
}

impl FromStr for RefineMode {
    type Err = FemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(RefineMode::Uniform),
            "adaptive" => Ok(RefineMode::Adaptive),
            other => Err(FemError::InvalidArgument(format!("unknown refinement mode '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunParams {
    pub method: Method,
    /// Polynomial degree (1 for CR, 1 or 2 for DG).
    pub degree: usize,
    /// Penalty parameter; `10 (k + 1)²` when `None`.
    pub gamma: Option<f64>,
    /// Dörfler bulk parameter.
    pub theta: f64,
    pub refine: RefineMode,
    /// Stop before solving a level with more unknowns than this.
    pub max_dofs: usize,
    /// Exactness degree for load and estimator integrals; `2k + 2` when `None`.
    pub quad_degree: Option<usize>,
    /// Exactness degree for error integrals against exact solutions.
    pub error_quad_degree: usize,
    pub solver_tol: f64,
    pub max_iter: usize,
    pub max_levels: usize,
    /// For problems without exact solution, measure errors against a
    /// solution on the twice uniformly refined mesh.
    pub reference_error: bool,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            method: Method::Cr,
            degree: 1,
            gamma: None,
            theta: 0.5,
            refine: RefineMode::Adaptive,
            max_dofs: 100_000,
            quad_degree: None,
            error_quad_degree: 10,
            solver_tol: 1e-10,
            max_iter: 200_000,
            max_levels: 500,
            reference_error: false,
        }
    }
}

impl RunParams {
    pub fn validate(&self) -> Result<()> {
        match (self.method, self.degree) {
            (Method::Cr, 1) | (Method::Dg, 1..=2) => {}
            (_, k) => return Err(FemError::UnsupportedDegree(k)),
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(FemError::InvalidArgument(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(FemError::InvalidArgument(format!("gamma must be positive, got {g}")));
            }
        }
        if self.solver_tol.is_nan() || self.solver_tol <= 0.0 {
            return Err(FemError::InvalidArgument(format!("solver tolerance must be positive, got {}", self.solver_tol)));
        }
        Ok(())
    }

    pub fn space(&self) -> SpaceKind {
        match self.method {
            Method::Cr => SpaceKind::Cr,
            Method::Dg => SpaceKind::Dg(self.degree),
        }
    }

    pub fn penalty(&self) -> f64 {
        self.gamma.unwrap_or_else(|| default_gamma(self.degree))
    }

    pub fn load_rule(&self) -> QuadratureRule {
        QuadratureRule::triangle(self.quad_degree.unwrap_or(2 * self.degree + 2))
    }

    pub fn error_rule(&self) -> QuadratureRule {
        QuadratureRule::triangle(self.error_quad_degree.max(self.quad_degree.unwrap_or(0)))
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions { tol: self.solver_tol, max_iter: self.max_iter }
    }
}

/// Number of unknowns of the discrete problem on `mesh`.
pub fn num_dofs(mesh: &Mesh, method: Method, degree: usize) -> usize {
    match method {
        Method::Cr => mesh.interior_faces().len(),
        Method::Dg => mesh.num_elements() * dim_pk(degree),
    }
}

/// One row of the run record.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelRecord {
    pub level: usize,
    pub ndof: usize,
    pub num_elements: usize,
    pub h_max: f64,
    pub h_min: f64,
    pub eta: f64,
    pub eta_r: f64,
    pub eta_jn: f64,
    pub eta_ju: f64,
    pub osc: f64,
    pub energy_err: Option<f64>,
    pub dg_err: Option<f64>,
    pub effectivity: Option<f64>,
    pub seconds: f64,
    pub solver_iterations: usize,
    /// Elements marked for refinement after this level (0 on the last level).
    pub marked: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveRunRecord {
    pub problem: String,
    pub method: Method,
    pub degree: usize,
    pub levels: Vec<LevelRecord>,
}

/// Everything computed on one level.
#[derive(Clone, Debug)]
pub struct LevelState {
    pub level: usize,
    pub mesh: Mesh,
    pub coeff: BoundCoefficients,
    pub solution: DiscreteField,
    pub report: IndicatorReport,
    pub errors: Option<ErrorReport>,
    pub record: LevelRecord,
}

#[derive(Clone, Debug)]
pub struct AdaptiveRun {
    pub record: AdaptiveRunRecord,
    pub last: LevelState,
}

/// Solves, estimates and (when possible) measures the error on one mesh.
///
/// `guess` is an initial iterate for the solver, typically the previous
/// level's solution transferred with [`prolongate`].
pub fn solve_level(
    problem: &ProblemSpec,
    mesh: Mesh,
    params: &RunParams,
    level: usize,
    guess: Option<&DiscreteField>,
) -> Result<LevelState> {
    let start = Instant::now();
    let coeff = problem.alpha.bind(&mesh)?;
    let rule = params.load_rule();
    let (solution, stats) = problem.with_data(|data| solve_with_guess(&mesh, &coeff, data, params, &rule, guess))?;
    let report = problem.with_data(|data| compute_indicators(&mesh, &coeff, data, &solution, &rule))?;
    let errors = match problem.exact() {
        Some(exact) => {
            Some(problem.with_data(|data| error_report(&mesh, &coeff, exact, &solution, data, &params.error_rule())))
        }
        None if params.reference_error => Some(reference_error(problem, &mesh, &solution, params)?),
        None => None,
    };
    let eta = report.eta();
    let dg = params.method == Method::Dg;
    let record = LevelRecord {
        level,
        ndof: num_dofs(&mesh, params.method, params.degree),
        num_elements: mesh.num_elements(),
        h_max: mesh.h_max(),
        h_min: mesh.h_min(),
        eta,
        eta_r: report.eta_r_total(),
        eta_jn: report.eta_jn_total(),
        eta_ju: report.eta_ju_total(),
        osc: report.osc_total(),
        energy_err: errors.map(|e| e.energy),
        dg_err: errors.map(|e| e.dg()),
        effectivity: errors.map(|e| e.effectivity(eta, dg)),
        seconds: start.elapsed().as_secs_f64(),
        solver_iterations: stats.iterations,
        marked: 0,
    };
    Ok(LevelState { level, mesh, coeff, solution, report, errors, record })
}

fn solve_with_guess(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    data: &ProblemData,
    params: &RunParams,
    rule: &QuadratureRule,
    guess: Option<&DiscreteField>,
) -> Result<(DiscreteField, SolveStats)> {
    let system = match params.method {
        Method::Cr => assemble_cr(mesh, coeff, data, rule),
        Method::Dg => assemble_dg(mesh, coeff, data, params.degree, params.penalty(), rule)?,
    };
    let x0 = guess.map(|g| system.restrict(g.coefficients()));
    let (x, stats) = pcg(&system.matrix, &system.rhs, x0.as_deref(), &params.solver()).map_err(|e| match e {
        FemError::NotSpd { .. } if params.method == Method::Dg => FemError::Indefinite,
        other => other,
    })?;
    Ok((DiscreteField::from_coefficients(mesh, system.kind(), system.expand(&x))?, stats))
}

/// Transfers a field from `coarse` to a refinement `fine` of it.
///
/// DG fields are reproduced exactly; CR dofs become face means of the coarse
/// field, averaged over the two sides.
pub fn prolongate(coarse: &Mesh, field: &DiscreteField, fine: &Mesh) -> DiscreteField {
    let ancestor = |e: usize| fine.parent(e).expect("fine mesh records parents");
    debug_assert!((0..fine.num_elements()).all(|e| ancestor(e) < coarse.num_elements()));
    match field.kind() {
        SpaceKind::Cr => {
            let rule = SegmentRule::gauss(1);
            let coeffs = (0..fine.num_faces())
                .map(|f| {
                    let face = fine.face(f);
                    let mean = |e: usize| {
                        rule.iter().map(|(t, w)| w * field.eval_at(coarse, ancestor(e), fine.face_point(f, t)).0).sum::<f64>()
                    };
                    match face.plus {
                        None => mean(face.minus),
                        Some(p) => 0.5 * (mean(face.minus) + mean(p)),
                    }
                })
                .collect();
            DiscreteField::from_coefficients(fine, SpaceKind::Cr, coeffs).expect("sizes match")
        }
        SpaceKind::Dg(k) => {
            let n = LagrangeBasis::new(k).expect("valid degree").len();
            let mut coeffs = Vec::with_capacity(fine.num_elements() * n);
            for e in 0..fine.num_elements() {
                let p = fine.element_points(e);
                let mut nodes: Vec<_> = p.to_vec();
                if k == 2 {
                    for i in 0..3 {
                        let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
                        nodes.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
                    }
                }
                if k == 0 {
                    nodes = vec![fine.geometry(e).centroid];
                }
                coeffs.extend(nodes.iter().map(|&x| field.eval_at(coarse, ancestor(e), x).0));
            }
            DiscreteField::from_coefficients(fine, SpaceKind::Dg(k), coeffs).expect("sizes match")
        }
    }
}

/// Error of `solution` measured against the solution on the twice uniformly
/// refined mesh.
///
/// The energy part compares broken gradients on the fine mesh; the jump part
/// is the jump seminorm of `solution` itself, as for an exact solution.
pub fn reference_error(
    problem: &ProblemSpec,
    mesh: &Mesh,
    solution: &DiscreteField,
    params: &RunParams,
) -> Result<ErrorReport> {
    let middle = mesh.uniform_refine();
    let fine = middle.uniform_refine();
    let fine_coeff = problem.alpha.bind(&fine)?;
    let coarse_of = |e: usize| middle.parent(fine.parent(e).expect("parent")).expect("grandparent");
    let guess = prolongate(mesh, solution, &middle);
    let guess = prolongate(&middle, &guess, &fine);
    let rule = params.load_rule();
    let (reference, _) =
        problem.with_data(|data| solve_with_guess(&fine, &fine_coeff, data, params, &rule, Some(&guess)))?;

    let grad_rule = QuadratureRule::triangle(2 * params.degree);
    let energy2: f64 = (0..fine.num_elements())
        .map(|e| {
            let c = coarse_of(e);
            fine_coeff.element(e)
                * fine.area(e)
                * grad_rule
                    .iter()
                    .map(|(b, w)| {
                        let gr = reference.gradient(&fine, e, b);
                        let gh = solution.eval_at(mesh, c, fine.to_physical(e, b)).1;
                        w * ((gr[0] - gh[0]).powi(2) + (gr[1] - gh[1]).powi(2))
                    })
                    .sum::<f64>()
        })
        .sum();
    let coeff = problem.alpha.bind(mesh)?;
    let jump = problem.with_data(|data| {
        jump_seminorm(mesh, &coeff, solution, data, &SegmentRule::with_degree(params.error_quad_degree))
    });
    Ok(ErrorReport { energy: energy2.sqrt(), jump })
}

/// Runs the solve, estimate, mark and refine loop from `mesh`.
pub fn run_adaptive(problem: &ProblemSpec, mesh: Mesh, params: &RunParams) -> Result<AdaptiveRun> {
    run_adaptive_with(problem, mesh, params, |_| Ok(()))
}

/// As [`run_adaptive`], calling `observer` after every solved level.
///
/// Level 0 is always solved. After refinement the loop stops, without
/// solving, once the new mesh has more than `max_dofs` unknowns, when
/// nothing is marked, or after `max_levels` levels.
pub fn run_adaptive_with(
    problem: &ProblemSpec,
    mut mesh: Mesh,
    params: &RunParams,
    mut observer: impl FnMut(&LevelState) -> Result<()>,
) -> Result<AdaptiveRun> {
    params.validate()?;
    let mut levels = Vec::new();
    let mut guess: Option<DiscreteField> = None;
    let mut level = 0;
    loop {
        let mut state = solve_level(problem, mesh, params, level, guess.as_ref())
            .map_err(|e| FemError::Level { level, source: Box::new(e) })?;
        observer(&state).map_err(|e| FemError::Level { level, source: Box::new(e) })?;

        let marked: Vec<usize> = match params.refine {
            RefineMode::Uniform => (0..state.mesh.num_elements()).collect(),
            RefineMode::Adaptive => {
                let eta2: Vec<f64> = state.report.eta_local.iter().map(|x| x * x).collect();
                dorfler_mark(&eta2, params.theta)?
            }
        };
        let next = match params.refine {
            RefineMode::Uniform => state.mesh.uniform_refine(),
            RefineMode::Adaptive => state.mesh.refine(&marked),
        };
        let stop = marked.is_empty()
            || level + 1 >= params.max_levels
            || num_dofs(&next, params.method, params.degree) > params.max_dofs;
        if !stop {
            state.record.marked = marked.len();
        }
        levels.push(state.record.clone());
        if stop {
            let record = AdaptiveRunRecord {
                problem: problem.name.to_string(),
                method: params.method,
                degree: params.degree,
                levels,
            };
            return Ok(AdaptiveRun { record, last: state });
        }
        guess = Some(prolongate(&state.mesh, &state.solution, &next));
        mesh = next;
        level += 1;
    }
}
