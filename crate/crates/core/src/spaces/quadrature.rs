//! Gauss rules on segments and collapsed-Gauss rules on triangles.
//!
//! Weights are normalized to the measure of the reference cell, so
//! `∫_K g ≈ |K| Σ w_q g(x_q)` and `∫_F g ≈ |F| Σ w_q g(x(t_q))`.

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    degree: usize,
    /// Barycentric coordinates of the triangle points.
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Rule exact for all polynomials of total degree `degree` on triangles.
    ///
    /// Conical product: Gauss–Legendre in the collapsed direction with one
    /// extra point to absorb the Jacobian.
    pub fn triangle(degree: usize) -> Self {
        let outer = SegmentRule::gauss((degree + 3) / 2);
        let inner = SegmentRule::gauss((degree + 2) / 2);
        let mut points = Vec::with_capacity(outer.len() * inner.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for (&s, &ws) in outer.points.iter().zip(&outer.weights) {
            for (&t, &wt) in inner.points.iter().zip(&inner.weights) {
                let l1 = s;
                let l2 = t * (1.0 - s);
                points.push([1.0 - l1 - l2, l1, l2]);
                weights.push(2.0 * ws * wt * (1.0 - s));
            }
        }
        Self { degree, points, weights }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 3], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss–Legendre rule on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct SegmentRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl SegmentRule {
    /// Rule exact for polynomials of degree `degree`.
    pub fn with_degree(degree: usize) -> Self {
        Self::gauss(degree / 2 + 1)
    }

    /// `n`-point Gauss–Legendre rule, exact up to degree `2n − 1`.
    pub fn gauss(n: usize) -> Self {
        let n = n.max(1);
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Chebyshev-like initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map from [-1, 1] to [0, 1]
            points[i] = 0.5 * (1.0 - x);
            points[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { points, weights }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
