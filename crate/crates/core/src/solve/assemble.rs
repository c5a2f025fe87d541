use crate::coeff::BoundCoefficients;
use crate::mesh::Mesh;
use crate::spaces::{DiscreteField, LagrangeBasis, QuadratureRule, SegmentRule, SpaceKind};
use crate::{FemError, Point, Result};

use super::{pcg, CsrMatrix, SolveStats, SolverOptions};

/// Right-hand side and boundary data of a diffusion problem.
///
/// Both callbacks receive the subdomain id of the element being integrated,
/// so data that is only piecewise smooth is evaluated from the correct side.
#[derive(Clone, Copy)]
pub struct ProblemData<'a> {
    /// Source term `f(subdomain, x)`.
    pub source: &'a dyn Fn(usize, Point) -> f64,
    /// Dirichlet data `g(subdomain, x)`; `None` means `g = 0`.
    pub dirichlet: Option<&'a dyn Fn(usize, Point) -> f64>,
}

impl<'a> ProblemData<'a> {
    pub fn new(source: &'a dyn Fn(usize, Point) -> f64) -> Self {
        Self { source, dirichlet: None }
    }

    pub fn with_dirichlet(mut self, g: &'a dyn Fn(usize, Point) -> f64) -> Self {
        self.dirichlet = Some(g);
        self
    }

    /// `g` at `x` on a boundary face of element `e` (zero when homogeneous).
    pub fn boundary_value(&self, mesh: &Mesh, e: usize, x: Point) -> f64 {
        self.dirichlet.map_or(0.0, |g| g(mesh.element(e).subdomain, x))
    }

    pub fn source_at(&self, mesh: &Mesh, e: usize, x: Point) -> f64 {
        (self.source)(mesh.element(e).subdomain, x)
    }
}

impl std::fmt::Debug for ProblemData<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemData").field("dirichlet", &self.dirichlet.is_some()).finish_non_exhaustive()
    }
}

/// `γ = 10 (k + 1)²`
pub fn default_gamma(degree: usize) -> f64 {
    10.0 * ((degree + 1) * (degree + 1)) as f64
}

/// A linear system over the free dofs of a space, plus what is needed to map
/// a solution back to a full coefficient vector.
#[derive(Clone, Debug)]
pub struct SparseSpdSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    kind: SpaceKind,
    free_dofs: Vec<usize>,
    /// Full-length vector holding the prescribed values of constrained dofs.
    prescribed: Vec<f64>,
}

impl SparseSpdSystem {
    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Global dof of each unknown.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }

    pub fn num_unknowns(&self) -> usize {
        self.free_dofs.len()
    }

    /// Inserts free values into the full coefficient vector.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut full = self.prescribed.clone();
        for (&d, &v) in self.free_dofs.iter().zip(x) {
            full[d] = v;
        }
        full
    }

    /// Restriction of a full coefficient vector to the unknowns.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free_dofs.iter().map(|&d| full[d]).collect()
    }

    /// `b − A x` for a full coefficient vector `x`.
    pub fn residual(&self, full: &[f64]) -> Vec<f64> {
        let x = self.restrict(full);
        let mut ax = vec![0.0; x.len()];
        self.matrix.mul_vec(&x, &mut ax);
        self.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect()
    }
}

/// Assembles the CR system `(α ∇_h u, ∇_h v) = (f, v)`.
///
/// Boundary dofs are eliminated: they carry the face means of the Dirichlet
/// data (zero when homogeneous).
pub fn assemble_cr(mesh: &Mesh, coeff: &BoundCoefficients, data: &ProblemData, rule: &QuadratureRule) -> SparseSpdSystem {
    let nf = mesh.num_faces();
    let mut prescribed = vec![0.0; nf];
    let boundary_rule = SegmentRule::with_degree(rule.degree());
    for &f in mesh.boundary_faces() {
        let face = mesh.face(f);
        prescribed[f] = boundary_rule.iter().map(|(t, w)| w * data.boundary_value(mesh, face.minus, mesh.face_point(f, t))).sum();
    }

    let mut index = vec![usize::MAX; nf];
    let free_dofs: Vec<usize> = (0..nf).filter(|&f| !mesh.face(f).is_boundary()).collect();
    for (i, &f) in free_dofs.iter().enumerate() {
        index[f] = i;
    }

    let mut triplets = Vec::with_capacity(9 * mesh.num_elements());
    let mut rhs = vec![0.0; free_dofs.len()];
    for e in 0..mesh.num_elements() {
        let geo = mesh.geometry(e);
        let dofs = mesh.element_faces(e);
        let alpha = coeff.element(e);
        let grad = geo.grad_bary.map(|g| [-2.0 * g[0], -2.0 * g[1]]);
        let mut load = [0.0; 3];
        for (b, w) in rule.iter() {
            let fx = data.source_at(mesh, e, mesh.to_physical(e, b));
            for j in 0..3 {
                load[j] += w * fx * (1.0 - 2.0 * b[j]);
            }
        }
        for i in 0..3 {
            let row = index[dofs[i]];
            if row == usize::MAX {
                continue;
            }
            rhs[row] += geo.area * load[i];
            for j in 0..3 {
                let a = alpha * geo.area * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
                match index[dofs[j]] {
                    usize::MAX => rhs[row] -= a * prescribed[dofs[j]],
                    col => triplets.push((row, col, a)),
                }
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(free_dofs.len(), triplets);
    SparseSpdSystem { matrix, rhs, kind: SpaceKind::Cr, free_dofs, prescribed }
}

/// Assembles the symmetric interior-penalty system of degree `k` with
/// penalty parameter `gamma`.
///
/// The bilinear form is
/// `(α∇u, ∇v) + Σ_F γ α_H/h_F ∫[u][v] − Σ_F ∫{α∇u·n}_w [v] − Σ_F ∫{α∇v·n}_w [u]`
/// over all faces, boundary faces taking the single-sided trace. Dirichlet
/// data enters the load through the matching boundary terms.
pub fn assemble_dg(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    data: &ProblemData,
    degree: usize,
    gamma: f64,
    rule: &QuadratureRule,
) -> Result<SparseSpdSystem> {
    if !(1..=2).contains(&degree) {
        return Err(FemError::UnsupportedDegree(degree));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(FemError::InvalidArgument(format!("penalty parameter must be positive, got {gamma}")));
    }
    let basis = LagrangeBasis::new(degree)?;
    let n = basis.len();
    let ndof = mesh.num_elements() * n;
    let mut triplets = Vec::with_capacity(n * n * (mesh.num_elements() + 4 * mesh.num_faces()));
    let mut rhs = vec![0.0; ndof];

    let (mut phi, mut dphi) = ([0.0; 6], [[0.0; 2]; 6]);
    let stiffness_rule = QuadratureRule::triangle(2 * degree - 2);
    for e in 0..mesh.num_elements() {
        let geo = mesh.geometry(e);
        let alpha = coeff.element(e);
        let mut block = [[0.0; 6]; 6];
        for (b, w) in stiffness_rule.iter() {
            basis.eval(&geo.grad_bary, b, &mut phi, &mut dphi);
            for i in 0..n {
                for j in 0..n {
                    block[i][j] += w * alpha * geo.area * (dphi[i][0] * dphi[j][0] + dphi[i][1] * dphi[j][1]);
                }
            }
        }
        for (b, w) in rule.iter() {
            basis.values(b, &mut phi);
            let fx = data.source_at(mesh, e, mesh.to_physical(e, b));
            for i in 0..n {
                rhs[e * n + i] += w * geo.area * fx * phi[i];
            }
        }
        for (i, row) in block.iter().enumerate().take(n) {
            for (j, &v) in row.iter().enumerate().take(n) {
                triplets.push((e * n + i, e * n + j, v));
            }
        }
    }

    let face_rule = SegmentRule::with_degree(2 * degree);
    let data_rule = SegmentRule::with_degree(rule.degree().max(2 * degree));
    // Per side: element, sign in the jump, weight in the flux average, α.
    let mut sides: Vec<(usize, f64, f64, f64)> = Vec::with_capacity(2);
    let mut vals = [[0.0; 6]; 2];
    let mut flux = [[0.0; 6]; 2];
    for f in 0..mesh.num_faces() {
        let face = mesh.face(f);
        let fc = coeff.face(f);
        sides.clear();
        sides.push((face.minus, 1.0, fc.w_minus, fc.minus));
        if let Some(p) = face.plus {
            sides.push((p, -1.0, fc.w_plus, fc.plus));
        }
        let penalty = gamma * fc.harmonic / face.length;
        let ns = sides.len();
        let mut block = [[0.0; 12]; 12];
        for (t, w) in face_rule.iter() {
            let x = mesh.face_point(f, t);
            side_traces(mesh, &basis, &sides, face.normal, x, &mut vals, &mut flux);
            let wl = w * face.length;
            for a in 0..ns {
                let (_, sa, oa, _) = sides[a];
                for b in 0..ns {
                    let (_, sb, ob, _) = sides[b];
                    for i in 0..n {
                        for j in 0..n {
                            // row: test function (a, i); column: trial function (b, j)
                            block[a * n + i][b * n + j] += wl
                                * (penalty * sa * vals[a][i] * sb * vals[b][j]
                                    - ob * flux[b][j] * sa * vals[a][i]
                                    - oa * flux[a][i] * sb * vals[b][j]);
                        }
                    }
                }
            }
        }
        for a in 0..ns {
            for b in 0..ns {
                for i in 0..n {
                    for j in 0..n {
                        triplets.push((sides[a].0 * n + i, sides[b].0 * n + j, block[a * n + i][b * n + j]));
                    }
                }
            }
        }
        if face.is_boundary() && data.dirichlet.is_some() {
            let e = face.minus;
            for (t, w) in data_rule.iter() {
                let x = mesh.face_point(f, t);
                side_traces(mesh, &basis, &sides, face.normal, x, &mut vals, &mut flux);
                let g = data.boundary_value(mesh, e, x);
                for i in 0..n {
                    rhs[e * n + i] += w * face.length * g * (penalty * vals[0][i] - flux[0][i]);
                }
            }
        }
    }

    let matrix = CsrMatrix::from_triplets(ndof, triplets);
    Ok(SparseSpdSystem {
        matrix,
        rhs,
        kind: SpaceKind::Dg(degree),
        free_dofs: (0..ndof).collect(),
        prescribed: vec![0.0; ndof],
    })
}

/// Basis values and normal fluxes `α ∇φ·n` of each side at physical point `x`.
fn side_traces(
    mesh: &Mesh,
    basis: &LagrangeBasis,
    sides: &[(usize, f64, f64, f64)],
    normal: [f64; 2],
    x: Point,
    vals: &mut [[f64; 6]; 2],
    flux: &mut [[f64; 6]; 2],
) {
    let mut dphi = [[0.0; 2]; 6];
    for (s, &(e, _, _, alpha)) in sides.iter().enumerate() {
        let b = mesh.to_barycentric(e, x);
        basis.eval(&mesh.geometry(e).grad_bary, b, &mut vals[s], &mut dphi);
        for i in 0..basis.len() {
            flux[s][i] = alpha * (dphi[i][0] * normal[0] + dphi[i][1] * normal[1]);
        }
    }
}

/// Assembles and solves the CR problem.
pub fn solve_cr(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    data: &ProblemData,
    rule: &QuadratureRule,
    opts: &SolverOptions,
) -> Result<(DiscreteField, SolveStats)> {
    let system = assemble_cr(mesh, coeff, data, rule);
    let (x, stats) = pcg(&system.matrix, &system.rhs, None, opts)?;
    Ok((DiscreteField::from_coefficients(mesh, SpaceKind::Cr, system.expand(&x))?, stats))
}

/// Assembles and solves the DG problem. A CG breakdown is reported as
/// [`FemError::Indefinite`], since it means the penalty is too small.
pub fn solve_dg(
    mesh: &Mesh,
    coeff: &BoundCoefficients,
    data: &ProblemData,
    degree: usize,
    gamma: f64,
    rule: &QuadratureRule,
    opts: &SolverOptions,
) -> Result<(DiscreteField, SolveStats)> {
    let system = assemble_dg(mesh, coeff, data, degree, gamma, rule)?;
    let (x, stats) = pcg(&system.matrix, &system.rhs, None, opts).map_err(|e| match e {
        FemError::NotSpd { .. } => FemError::Indefinite,
        other => other,
    })?;
    Ok((DiscreteField::from_coefficients(mesh, SpaceKind::Dg(degree), system.expand(&x))?, stats))
}
