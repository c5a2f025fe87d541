//! Adaptive finite elements for 2D diffusion problems with piecewise-constant,
//! possibly strongly discontinuous coefficients.
//!
//! Two discretizations are provided: the Crouzeix–Raviart nonconforming P1
//! element and the symmetric interior-penalty discontinuous Galerkin method
//! with harmonic face weights. Both come with residual a posteriori error
//! indicators whose weighting makes the estimators robust with respect to the
//! size of the coefficient jumps.
//!
//! Module map:
//!
//! * [`mesh`]: conforming triangulations, face topology, newest-vertex bisection.
//! * [`coeff`]: the coefficient field and the face-level coefficient algebra.
//! * [`spaces`]: quadrature, CR and DG bases, interpolation and projections.
//! * [`solve`]: CR/DG assembly and a preconditioned conjugate-gradient solver.
//! * [`estimate`]: indicators, oscillation, error norms, error representations.
//! * [`adapt`]: Dörfler marking, the benchmark catalog, the adaptive driver, CSV/VTK output.

pub mod adapt;
pub mod coeff;
pub mod error;
pub mod estimate;
pub mod mesh;
pub mod solve;
pub mod spaces;

pub use error::{FemError, Result};

/// A point in the plane.
pub type Point = [f64; 2];

/// Discretization method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Crouzeix–Raviart nonconforming P1.
    Cr,
    /// Symmetric interior-penalty DG of the given polynomial degree.
    Dg,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Cr => write!(f, "cr"),
            Method::Dg => write!(f, "dg"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = FemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cr" => Ok(Method::Cr),
            "dg" => Ok(Method::Dg),
            other => Err(FemError::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}
