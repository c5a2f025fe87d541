use crate::{FemError, Result};

use super::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Target relative residual `‖b − Ax‖ / ‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Conjugate gradients with diagonal (Jacobi) preconditioning.
///
/// Deterministic for fixed input. Breakdown (`pᵀAp ≤ 0` or a nonpositive
/// diagonal entry) is reported as [`FemError::NotSpd`].
pub fn pcg(a: &CsrMatrix, b: &[f64], x0: Option<&[f64]>, opts: &SolverOptions) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.dim();
    assert_eq!(b.len(), n, "right-hand side length");
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], SolveStats::default()));
    }

    let diag = a.diagonal();
    if diag.iter().any(|&d| d <= 0.0 || !d.is_finite()) {
        return Err(FemError::NotSpd { iteration: 0 });
    }
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();

    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = vec![0.0; n];
    a.mul_vec(&x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);

    let mut residual = norm(&r) / b_norm;
    let mut iteration = 0;
    while residual > opts.tol {
        if iteration >= opts.max_iter {
            return Err(FemError::NoConvergence { iterations: iteration, residual });
        }
        a.mul_vec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(FemError::NotSpd { iteration });
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        iteration += 1;
        residual = norm(&r) / b_norm;
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Ok((x, SolveStats { iterations: iteration, relative_residual: residual }))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
