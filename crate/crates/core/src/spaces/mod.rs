//! Finite element spaces, quadrature, interpolation and projections.

mod basis;
mod quadrature;

pub use basis::{cr_basis_eval, dg_basis_eval, dim_pk, LagrangeBasis};
pub use quadrature::{QuadratureRule, SegmentRule};

use crate::mesh::Mesh;
use crate::{FemError, Point, Result};

/// Which space a coefficient vector lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Crouzeix–Raviart P1, one dof per face.
    Cr,
    /// Discontinuous P_k, `dim P_k` dofs per element. Degree 0 is used for projected data.
    Dg(usize),
}

impl SpaceKind {
    pub fn num_dofs(&self, mesh: &Mesh) -> usize {
        match *self {
            SpaceKind::Cr => mesh.num_faces(),
            SpaceKind::Dg(k) => mesh.num_elements() * dim_pk(k),
        }
    }
}

/// The CR space on a mesh: dofs are face means, boundary dofs are constrained.
#[derive(Clone, Debug)]
pub struct CrSpace {
    constrained: Vec<bool>,
}

impl CrSpace {
    pub fn new(mesh: &Mesh) -> Self {
        Self { constrained: mesh.faces().iter().map(|f| f.is_boundary()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.constrained.len()
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn num_constrained(&self) -> usize {
        self.constrained.iter().filter(|&&c| c).count()
    }

    pub fn free_dofs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(|&d| !self.constrained[d])
    }
}

/// Discontinuous P_k on a mesh, `k ∈ {1, 2}`.
#[derive(Clone, Copy, Debug)]
pub struct DgSpace {
    degree: usize,
    num_elements: usize,
}

impl DgSpace {
    pub fn new(mesh: &Mesh, degree: usize) -> Result<Self> {
        if !(1..=2).contains(&degree) {
            return Err(FemError::UnsupportedDegree(degree));
        }
        Ok(Self { degree, num_elements: mesh.num_elements() })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn local_dim(&self) -> usize {
        dim_pk(self.degree)
    }

    pub fn dim(&self) -> usize {
        self.num_elements * self.local_dim()
    }
}

/// Side of a face: `K⁻` or `K⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// A coefficient vector in a CR or DG space.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteField {
    kind: SpaceKind,
    coeffs: Vec<f64>,
}

impl DiscreteField {
    pub fn zeros(mesh: &Mesh, kind: SpaceKind) -> Self {
        Self { kind, coeffs: vec![0.0; kind.num_dofs(mesh)] }
    }

    pub fn from_coefficients(mesh: &Mesh, kind: SpaceKind, coeffs: Vec<f64>) -> Result<Self> {
        if let SpaceKind::Dg(k) = kind {
            LagrangeBasis::new(k)?;
        }
        let n = kind.num_dofs(mesh);
        if coeffs.len() != n {
            return Err(FemError::InvalidArgument(format!("expected {n} coefficients, got {}", coeffs.len())));
        }
        Ok(Self { kind, coeffs })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coeffs
    }

    /// `c · self`
    pub fn scaled(&self, c: f64) -> Self {
        Self { kind: self.kind, coeffs: self.coeffs.iter().map(|x| c * x).collect() }
    }

    /// Value and gradient on element `e` at barycentric point `bary`.
    pub fn eval(&self, mesh: &Mesh, e: usize, bary: [f64; 3]) -> (f64, [f64; 2]) {
        let g = &mesh.geometry(e).grad_bary;
        match self.kind {
            SpaceKind::Cr => {
                let dofs = mesh.element_faces(e);
                let mut v = 0.0;
                let mut grad = [0.0; 2];
                for j in 0..3 {
                    let c = self.coeffs[dofs[j]];
                    v += c * (1.0 - 2.0 * bary[j]);
                    grad[0] -= 2.0 * c * g[j][0];
                    grad[1] -= 2.0 * c * g[j][1];
                }
                (v, grad)
            }
            SpaceKind::Dg(k) => {
                let basis = LagrangeBasis { degree: k };
                let n = basis.len();
                let (mut vals, mut grads) = ([0.0; 6], [[0.0; 2]; 6]);
                basis.eval(g, bary, &mut vals, &mut grads);
                let c = &self.coeffs[e * n..(e + 1) * n];
                let mut v = 0.0;
                let mut grad = [0.0; 2];
                for i in 0..n {
                    v += c[i] * vals[i];
                    grad[0] += c[i] * grads[i][0];
                    grad[1] += c[i] * grads[i][1];
                }
                (v, grad)
            }
        }
    }

    pub fn value(&self, mesh: &Mesh, e: usize, bary: [f64; 3]) -> f64 {
        self.eval(mesh, e, bary).0
    }

    /// Broken gradient on element `e`.
    pub fn gradient(&self, mesh: &Mesh, e: usize, bary: [f64; 3]) -> [f64; 2] {
        self.eval(mesh, e, bary).1
    }

    /// Evaluation at a physical point, using the polynomial of element `e`.
    pub fn eval_at(&self, mesh: &Mesh, e: usize, x: Point) -> (f64, [f64; 2]) {
        self.eval(mesh, e, mesh.to_barycentric(e, x))
    }

    /// Laplacian of the element polynomial (constant for degree ≤ 2).
    pub fn laplacian(&self, mesh: &Mesh, e: usize) -> f64 {
        match self.kind {
            SpaceKind::Cr | SpaceKind::Dg(0) | SpaceKind::Dg(1) => 0.0,
            SpaceKind::Dg(k) => {
                let basis = LagrangeBasis { degree: k };
                let n = basis.len();
                let mut lap = [0.0; 6];
                basis.laplacians(&mesh.geometry(e).grad_bary, &mut lap);
                self.coeffs[e * n..(e + 1) * n].iter().zip(&lap).map(|(c, l)| c * l).sum()
            }
        }
    }

    /// Trace from one side of face `f` at parameter `t ∈ [0, 1]`, as (value, gradient).
    ///
    /// Returns `None` for the plus side of a boundary face.
    pub fn trace(&self, mesh: &Mesh, f: usize, side: Side, t: f64) -> Option<(f64, [f64; 2])> {
        let face = mesh.face(f);
        let e = match side {
            Side::Minus => face.minus,
            Side::Plus => face.plus?,
        };
        Some(self.eval_at(mesh, e, mesh.face_point(f, t)))
    }

    /// `[v]` at parameter `t` on face `f`; the trace itself on boundary faces.
    pub fn jump(&self, mesh: &Mesh, f: usize, t: f64) -> f64 {
        let (vm, _) = self.trace(mesh, f, Side::Minus, t).expect("minus side exists");
        vm - self.trace(mesh, f, Side::Plus, t).map_or(0.0, |(v, _)| v)
    }
}

/// Crouzeix–Raviart interpolation: every dof is the face mean of `v`.
///
/// `v(e, x)` evaluates the element-wise function on element `e`. On interior
/// faces the two one-sided means are averaged; for functions with mean-free
/// jumps (the setting of the interpolation estimates) they coincide.
pub fn cr_interpolate(mesh: &Mesh, v: impl Fn(usize, Point) -> f64, rule: &SegmentRule) -> DiscreteField {
    let coeffs = (0..mesh.num_faces())
        .map(|f| {
            let face = mesh.face(f);
            let mean = |e: usize| rule.iter().map(|(t, w)| w * v(e, mesh.face_point(f, t))).sum::<f64>();
            match face.plus {
                None => mean(face.minus),
                Some(p) => 0.5 * (mean(face.minus) + mean(p)),
            }
        })
        .collect();
    DiscreteField { kind: SpaceKind::Cr, coeffs }
}

/// Element means `(1/|K|) ∫_K v` as a piecewise-constant field.
pub fn cell_average(mesh: &Mesh, v: impl Fn(usize, Point) -> f64, rule: &QuadratureRule) -> DiscreteField {
    let coeffs = (0..mesh.num_elements())
        .map(|e| rule.iter().map(|(b, w)| w * v(e, mesh.to_physical(e, b))).sum())
        .collect();
    DiscreteField { kind: SpaceKind::Dg(0), coeffs }
}

/// Element-wise L² projection onto P_m, `m ∈ {0, 1, 2}`.
pub fn l2_project(
    mesh: &Mesh,
    f: impl Fn(usize, Point) -> f64,
    degree: usize,
    rule: &QuadratureRule,
) -> Result<DiscreteField> {
    let basis = LagrangeBasis::new(degree)?;
    let n = basis.len();
    let mut coeffs = vec![0.0; mesh.num_elements() * n];
    let mut phi = [0.0; 6];
    for e in 0..mesh.num_elements() {
        let mut mass = [[0.0; 6]; 6];
        let mut rhs = [0.0; 6];
        for (b, w) in rule.iter() {
            basis.values(b, &mut phi);
            let fx = f(e, mesh.to_physical(e, b));
            for i in 0..n {
                rhs[i] += w * fx * phi[i];
                for j in 0..n {
                    mass[i][j] += w * phi[i] * phi[j];
                }
            }
        }
        let x = solve_small_spd(&mass, &rhs, n);
        coeffs[e * n..(e + 1) * n].copy_from_slice(&x[..n]);
    }
    Ok(DiscreteField { kind: SpaceKind::Dg(degree), coeffs })
}

/// Cholesky solve of a dense SPD system of size `n ≤ 6`.
pub(crate) fn solve_small_spd(a: &[[f64; 6]; 6], b: &[f64; 6], n: usize) -> [f64; 6] {
    let mut l = [[0.0; 6]; 6];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = [0.0; 6];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = [0.0; 6];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}
