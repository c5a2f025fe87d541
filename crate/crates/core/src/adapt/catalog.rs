//! Benchmark problems.
//!
//! * `flat`: `(0,1)²`, `α ≡ 1`, `u = sin(πx) sin(πy)`.
//! * `interface_manufactured`: `(−1,1)²` split at `x = 0`, `α = 1` on the
//!   left and `k` on the right, `u = a_i x(1−x²)(1−y²)` with `a = k` on the
//!   left and `1` on the right. Both `u` and `α ∂_x u` are continuous at
//!   `x = 0` and `f = k(6x(1−y²) + 2x(1−x²))` is a single polynomial.
//! * `checkerboard`: `(−1,1)²`, `α = k` on the first and third quadrants and
//!   `1` on the others, `f ≡ 1`, no closed-form solution.
//! * `kellogg`: the same checkerboard with the singular solution
//!   `u = r^γ μ(θ)` and `γ = 0.1`; the ratio `R` and the phase `σ` solve the
//!   interface matching conditions. Dirichlet data is `g = u` and `f = 0`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::coeff::CoefficientField;
use crate::estimate::ExactSolution;
use crate::mesh::{structured_rectangle, Mesh, SubdomainRule};
use crate::solve::ProblemData;
use crate::{FemError, Point, Result};

pub const PROBLEM_NAMES: [&str; 4] = ["flat", "interface_manufactured", "checkerboard", "kellogg"];

/// Default jump ratio for the problems that take one.
pub const DEFAULT_JUMP_RATIO: f64 = 1e3;

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemKind {
    Flat,
    InterfaceManufactured { k: f64 },
    Checkerboard { k: f64 },
    Kellogg(KelloggParams),
}

/// Parameters of `u = r^γ μ(θ)` on the checkerboard with ratio `R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KelloggParams {
    pub gamma: f64,
    pub rho: f64,
    pub sigma: f64,
    /// Coefficient on the first and third quadrants (1 on the others).
    pub ratio: f64,
}

impl KelloggParams {
    /// Solves the matching conditions for `ρ = π/4` and the given exponent.
    ///
    /// With `ρ = π/4` the conditions reduce to `tan((π/2 − σ)γ) = tan(σγ)`
    /// for `σ` in the admissible range
    /// `max(0, π − πγ) ≤ −2γσ ≤ min(π, 2π − πγ)`, after which
    /// `R = −tan(σγ) / tan(ργ)`. The root is found by bisection.
    pub fn solve(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(FemError::InvalidArgument(format!("singular exponent must lie in (0, 1), got {gamma}")));
        }
        let rho = FRAC_PI_4;
        let lo_neg = (PI - PI * gamma).max(0.0) / (2.0 * gamma);
        let hi_neg = PI.min(2.0 * PI - PI * gamma) / (2.0 * gamma);
        let residual = |s: f64| ((FRAC_PI_2 - s) * gamma).tan() - (s * gamma).tan();
        // The residual has poles at both ends of the bracket.
        let margin = 1e-9 * (hi_neg - lo_neg);
        let (mut a, mut b) = (-hi_neg + margin, -lo_neg - margin);
        let (fa, fb) = (residual(a), residual(b));
        if fa.signum() == fb.signum() {
            return Err(FemError::InvalidArgument(format!("no sign change for exponent {gamma}")));
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if residual(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        let sigma = 0.5 * (a + b);
        let ratio = -(sigma * gamma).tan() / (rho * gamma).tan();
        Ok(Self { gamma, rho, sigma, ratio })
    }

    /// Residuals of the three matching conditions.
    pub fn matching_residuals(&self) -> [f64; 3] {
        let (g, r, s, big) = (self.gamma, self.rho, self.sigma, self.ratio);
        [
            big + ((FRAC_PI_2 - s) * g).tan() / (r * g).tan(),
            1.0 / big + (r * g).tan() / (s * g).tan(),
            big + (s * g).tan() / ((FRAC_PI_2 - r) * g).tan(),
        ]
    }

    /// `μ(θ)` and `μ'(θ)` on quadrant `q` (0 to 3, counter-clockwise from `x, y > 0`).
    fn mu(&self, q: usize, theta: f64) -> (f64, f64) {
        let (g, r, s) = (self.gamma, self.rho, self.sigma);
        let (amp, phase) = match q {
            0 => (((FRAC_PI_2 - s) * g).cos(), FRAC_PI_2 - r),
            1 => ((r * g).cos(), PI - s),
            2 => ((s * g).cos(), PI + r),
            _ => (((FRAC_PI_2 - r) * g).cos(), 1.5 * PI + s),
        };
        let arg = (theta - phase) * g;
        (amp * arg.cos(), -amp * g * arg.sin())
    }

    /// Polar angle of `x` taken within the closed range of quadrant `q`.
    fn angle(q: usize, x: Point) -> f64 {
        let mut theta = x[1].atan2(x[0]);
        let center = (q as f64 + 0.5) * FRAC_PI_2;
        while theta - center > PI {
            theta -= 2.0 * PI;
        }
        while center - theta > PI {
            theta += 2.0 * PI;
        }
        theta
    }

    pub fn value(&self, q: usize, x: Point) -> f64 {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return 0.0;
        }
        r.powf(self.gamma) * self.mu(q, Self::angle(q, x)).0
    }

    pub fn gradient(&self, q: usize, x: Point) -> [f64; 2] {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let theta = Self::angle(q, x);
        let (mu, dmu) = self.mu(q, theta);
        let (c, s) = (theta.cos(), theta.sin());
        let scale = r.powf(self.gamma - 1.0);
        let (ur, ut) = (self.gamma * mu, dmu);
        [scale * (ur * c - ut * s), scale * (ur * s + ut * c)]
    }
}

/// A problem from the catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub name: &'static str,
    pub kind: ProblemKind,
    pub lower: Point,
    pub upper: Point,
    pub subdomains: SubdomainRule,
    pub alpha: CoefficientField,
}

/// A straight interface piece with the subdomains on either side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceSegment {
    pub from: Point,
    pub to: Point,
    pub left: usize,
    pub right: usize,
}

impl ProblemSpec {
    pub fn flat() -> Self {
        Self {
            name: "flat",
            kind: ProblemKind::Flat,
            lower: [0.0, 0.0],
            upper: [1.0, 1.0],
            subdomains: SubdomainRule::Single,
            alpha: CoefficientField::uniform([0], 1.0).expect("positive"),
        }
    }

    pub fn interface_manufactured(k: f64) -> Result<Self> {
        let mut alpha = CoefficientField::new();
        alpha.set(0, 1.0)?;
        alpha.set(1, k)?;
        Ok(Self {
            name: "interface_manufactured",
            kind: ProblemKind::InterfaceManufactured { k },
            lower: [-1.0, -1.0],
            upper: [1.0, 1.0],
            subdomains: SubdomainRule::HalfPlanes { x0: 0.0 },
            alpha,
        })
    }

    pub fn checkerboard(k: f64) -> Result<Self> {
        Ok(Self {
            name: "checkerboard",
            kind: ProblemKind::Checkerboard { k },
            lower: [-1.0, -1.0],
            upper: [1.0, 1.0],
            subdomains: SubdomainRule::Quadrants { center: [0.0, 0.0] },
            alpha: checker_alpha(k)?,
        })
    }

    pub fn kellogg() -> Result<Self> {
        let params = KelloggParams::solve(0.1)?;
        Ok(Self {
            name: "kellogg",
            kind: ProblemKind::Kellogg(params),
            lower: [-1.0, -1.0],
            upper: [1.0, 1.0],
            subdomains: SubdomainRule::Quadrants { center: [0.0, 0.0] },
            alpha: checker_alpha(params.ratio)?,
        })
    }

    /// Looks a problem up by name. `jump_ratio` applies to
    /// `interface_manufactured` and `checkerboard`; other problems reject it.
    pub fn by_name(name: &str, jump_ratio: Option<f64>) -> Result<Self> {
        let k = jump_ratio.unwrap_or(DEFAULT_JUMP_RATIO);
        let fixed = |p: Result<Self>| match jump_ratio {
            Some(_) => Err(FemError::InvalidArgument(format!("problem '{name}' has a fixed coefficient ratio"))),
            None => p,
        };
        match name {
            "flat" => fixed(Ok(Self::flat())),
            "interface_manufactured" => Self::interface_manufactured(k),
            "checkerboard" => Self::checkerboard(k),
            "kellogg" => fixed(Self::kellogg()),
            other => Err(FemError::UnknownProblem(other.to_string())),
        }
    }

    /// Structured `n × n` mesh of the domain, aligned with the subdomains for even `n`.
    pub fn initial_mesh(&self, n: usize) -> Result<Mesh> {
        structured_rectangle(self.lower, self.upper, n, n, &self.subdomains)
    }

    pub fn has_exact_solution(&self) -> bool {
        !matches!(self.kind, ProblemKind::Checkerboard { .. })
    }

    /// The exact solution, if the problem has one.
    pub fn exact(&self) -> Option<&dyn ExactSolution> {
        self.has_exact_solution().then_some(self as &dyn ExactSolution)
    }

    /// `f`, a single formula on the whole domain for every catalog problem.
    pub fn source(&self, _subdomain: usize, x: Point) -> f64 {
        let [x, y] = x;
        match self.kind {
            ProblemKind::Flat => 2.0 * PI * PI * (PI * x).sin() * (PI * y).sin(),
            ProblemKind::InterfaceManufactured { k } => k * (6.0 * x * (1.0 - y * y) + 2.0 * x * (1.0 - x * x)),
            ProblemKind::Checkerboard { .. } => 1.0,
            ProblemKind::Kellogg(_) => 0.0,
        }
    }

    /// Whether the boundary data is nonzero.
    pub fn has_dirichlet_data(&self) -> bool {
        matches!(self.kind, ProblemKind::Kellogg(_))
    }

    /// Calls `k` with the source and boundary data of this problem.
    pub fn with_data<T>(&self, k: impl FnOnce(&ProblemData) -> T) -> T {
        let f = |s: usize, x: Point| self.source(s, x);
        let g = |s: usize, x: Point| self.value(s, x);
        let data = ProblemData::new(&f);
        if self.has_dirichlet_data() {
            k(&data.with_dirichlet(&g))
        } else {
            k(&data)
        }
    }

    /// The interfaces between subdomains.
    pub fn interfaces(&self) -> Vec<InterfaceSegment> {
        let ([x0, y0], [x1, y1]) = (self.lower, self.upper);
        match self.subdomains {
            SubdomainRule::Single => vec![],
            SubdomainRule::HalfPlanes { x0: c } => {
                vec![InterfaceSegment { from: [c, y0], to: [c, y1], left: 0, right: 1 }]
            }
            SubdomainRule::Quadrants { center: [cx, cy] } => vec![
                InterfaceSegment { from: [cx, cy], to: [x1, cy], left: 0, right: 3 },
                InterfaceSegment { from: [cx, cy], to: [cx, y1], left: 1, right: 0 },
                InterfaceSegment { from: [cx, cy], to: [x0, cy], left: 2, right: 1 },
                InterfaceSegment { from: [cx, cy], to: [cx, y0], left: 3, right: 2 },
            ],
        }
    }

    /// Largest relative mismatch of `u` and of `α ∇u·n` across the
    /// interfaces, sampled at `samples` points per interface segment
    /// (endpoints excluded). Zero for problems without an exact solution.
    pub fn interface_defect(&self, samples: usize) -> (f64, f64) {
        if !self.has_exact_solution() {
            return (0.0, 0.0);
        }
        let (mut value, mut flux) = (0.0f64, 0.0f64);
        for seg in self.interfaces() {
            let d = [seg.to[0] - seg.from[0], seg.to[1] - seg.from[1]];
            let len = d[0].hypot(d[1]);
            let n = [d[1] / len, -d[0] / len];
            let (al, ar) = (self.alpha.get(seg.left).unwrap_or(1.0), self.alpha.get(seg.right).unwrap_or(1.0));
            for i in 1..=samples {
                let t = i as f64 / (samples + 1) as f64;
                let x = [seg.from[0] + t * d[0], seg.from[1] + t * d[1]];
                let (ul, ur) = (self.value(seg.left, x), self.value(seg.right, x));
                let (gl, gr) = (self.gradient(seg.left, x), self.gradient(seg.right, x));
                let (fl, fr) = (al * (gl[0] * n[0] + gl[1] * n[1]), ar * (gr[0] * n[0] + gr[1] * n[1]));
                value = value.max((ul - ur).abs() / ul.abs().max(ur.abs()).max(f64::MIN_POSITIVE));
                flux = flux.max((fl - fr).abs() / fl.abs().max(fr.abs()).max(f64::MIN_POSITIVE));
            }
        }
        (value, flux)
    }
}

fn checker_alpha(k: f64) -> Result<CoefficientField> {
    let mut alpha = CoefficientField::new();
    for (id, v) in [(0, k), (1, 1.0), (2, k), (3, 1.0)] {
        alpha.set(id, v)?;
    }
    Ok(alpha)
}

impl ExactSolution for ProblemSpec {
    fn value(&self, subdomain: usize, x: Point) -> f64 {
        let [x, y] = x;
        match &self.kind {
            ProblemKind::Flat => (PI * x).sin() * (PI * y).sin(),
            ProblemKind::InterfaceManufactured { k } => {
                let a = if subdomain == 0 { *k } else { 1.0 };
                a * x * (1.0 - x * x) * (1.0 - y * y)
            }
            ProblemKind::Checkerboard { .. } => f64::NAN,
            ProblemKind::Kellogg(p) => p.value(subdomain, [x, y]),
        }
    }

    fn gradient(&self, subdomain: usize, x: Point) -> [f64; 2] {
        let [x, y] = x;
        match &self.kind {
            ProblemKind::Flat => {
                [PI * (PI * x).cos() * (PI * y).sin(), PI * (PI * x).sin() * (PI * y).cos()]
            }
            ProblemKind::InterfaceManufactured { k } => {
                let a = if subdomain == 0 { *k } else { 1.0 };
                [a * (1.0 - 3.0 * x * x) * (1.0 - y * y), -2.0 * a * x * (1.0 - x * x) * y]
            }
            ProblemKind::Checkerboard { .. } => [f64::NAN; 2],
            ProblemKind::Kellogg(p) => p.gradient(subdomain, [x, y]),
        }
    }

    fn singular_point(&self) -> Option<Point> {
        matches!(self.kind, ProblemKind::Kellogg(_)).then_some([0.0, 0.0])
    }
}

/// All catalog problems, parameterized problems at the default jump ratio.
pub fn catalog() -> Result<Vec<ProblemSpec>> {
    PROBLEM_NAMES.iter().map(|n| ProblemSpec::by_name(n, None)).collect()
}
