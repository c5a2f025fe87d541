use crate::mesh::Mesh;
use crate::{FemError, Result};

/// Crouzeix–Raviart basis on element `e` at barycentric point `bary`.
///
/// Function `j` belongs to local edge `j` (opposite vertex `j`) and equals
/// `1 − 2λ_j`: its mean is one on edge `j` and zero on the other two edges.
pub fn cr_basis_eval(mesh: &Mesh, e: usize, bary: [f64; 3]) -> ([f64; 3], [[f64; 2]; 3]) {
    let g = &mesh.geometry(e).grad_bary;
    (bary.map(|l| 1.0 - 2.0 * l), [0, 1, 2].map(|j| [-2.0 * g[j][0], -2.0 * g[j][1]]))
}

/// Values and gradients of the Lagrange P_k basis on element `e`.
///
/// Degree 0 is the constant one; degree 1 the barycentric coordinates;
/// degree 2 the three vertex functions `λ_i(2λ_i − 1)` followed by the edge
/// functions `4λ_{j+1}λ_{j+2}` for local edges `j = 0, 1, 2`.
pub fn dg_basis_eval(mesh: &Mesh, e: usize, degree: usize, bary: [f64; 3]) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
    let basis = LagrangeBasis::new(degree)?;
    let mut values = vec![0.0; basis.len()];
    let mut grads = vec![[0.0; 2]; basis.len()];
    basis.eval(&mesh.geometry(e).grad_bary, bary, &mut values, &mut grads);
    Ok((values, grads))
}

/// Number of P_k functions on a triangle.
pub fn dim_pk(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LagrangeBasis {
    pub(crate) degree: usize,
}

impl LagrangeBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > 2 {
            return Err(FemError::UnsupportedDegree(degree));
        }
        Ok(Self { degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        dim_pk(self.degree)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self, bary: [f64; 3], out: &mut [f64]) {
        let l = bary;
        match self.degree {
            0 => out[0] = 1.0,
            1 => out[..3].copy_from_slice(&l),
            _ => {
                for i in 0..3 {
                    out[i] = l[i] * (2.0 * l[i] - 1.0);
                    out[3 + i] = 4.0 * l[(i + 1) % 3] * l[(i + 2) % 3];
                }
            }
        }
    }

    pub fn eval(&self, grad_bary: &[[f64; 2]; 3], bary: [f64; 3], values: &mut [f64], grads: &mut [[f64; 2]]) {
        self.values(bary, values);
        let g = grad_bary;
        let l = bary;
        match self.degree {
            0 => grads[0] = [0.0, 0.0],
            1 => grads[..3].copy_from_slice(g),
            _ => {
                for i in 0..3 {
                    let s = 4.0 * l[i] - 1.0;
                    grads[i] = [s * g[i][0], s * g[i][1]];
                    let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                    grads[3 + i] = [
                        4.0 * (l[a] * g[b][0] + l[b] * g[a][0]),
                        4.0 * (l[a] * g[b][1] + l[b] * g[a][1]),
                    ];
                }
            }
        }
    }

    /// Laplacians of the basis functions (constant on the element for k ≤ 2).
    pub fn laplacians(&self, grad_bary: &[[f64; 2]; 3], out: &mut [f64]) {
        let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
        match self.degree {
            0 => out[0] = 0.0,
            1 => out[..3].fill(0.0),
            _ => {
                for i in 0..3 {
                    out[i] = 4.0 * dot(grad_bary[i], grad_bary[i]);
                    out[3 + i] = 8.0 * dot(grad_bary[(i + 1) % 3], grad_bary[(i + 2) % 3]);
                }
            }
        }
    }
}
