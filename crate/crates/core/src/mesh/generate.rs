use crate::{Point, Result};

use super::Mesh;

/// How subdomain ids are assigned to the cells of a structured mesh.
#[derive(Clone, Debug, PartialEq)]
pub enum SubdomainRule {
    /// Every element in subdomain 0.
    Single,
    /// Subdomain 0 for `x < x0`, 1 otherwise.
    HalfPlanes { x0: f64 },
    /// Quadrants about `center`, numbered 0..4 counterclockwise starting with `x > cx, y > cy`.
    Quadrants { center: Point },
}

impl SubdomainRule {
    fn classify(&self, c: Point) -> usize {
        match *self {
            SubdomainRule::Single => 0,
            SubdomainRule::HalfPlanes { x0 } => usize::from(c[0] > x0),
            SubdomainRule::Quadrants { center } => match (c[0] > center[0], c[1] > center[1]) {
                (true, true) => 0,
                (false, true) => 1,
                (false, false) => 2,
                (true, false) => 3,
            },
        }
    }
}

/// Uniform `nx × ny` grid on the rectangle `[lo, hi]`, each cell split along
/// its lower-left to upper-right diagonal. Subdomains are assigned by centroid.
pub fn structured_rectangle(lo: Point, hi: Point, nx: usize, ny: usize, rule: &SubdomainRule) -> Result<Mesh> {
    let mut points = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            points.push([
                lo[0] + (hi[0] - lo[0]) * i as f64 / nx as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / ny as f64,
            ]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    let mut subdomains = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            for tri in [
                [id(i, j), id(i + 1, j), id(i + 1, j + 1)],
                [id(i, j), id(i + 1, j + 1), id(i, j + 1)],
            ] {
                let c = tri.iter().fold([0.0, 0.0], |acc, &v| {
                    [acc[0] + points[v][0] / 3.0, acc[1] + points[v][1] / 3.0]
                });
                triangles.push(tri);
                subdomains.push(rule.classify(c));
            }
        }
    }
    Mesh::new(points, &triangles, &subdomains)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrant_ids() {
        let m = structured_rectangle([-1.0, -1.0], [1.0, 1.0], 2, 2, &SubdomainRule::Quadrants { center: [0.0, 0.0] })
            .unwrap();
        assert_eq!(m.num_elements(), 8);
        for e in 0..8 {
            let c = m.geometry(e).centroid;
            let expect = match (c[0] > 0.0, c[1] > 0.0) {
                (true, true) => 0,
                (false, true) => 1,
                (false, false) => 2,
                (true, false) => 3,
            };
            assert_eq!(m.element(e).subdomain, expect);
        }
        assert!((m.total_area() - 4.0).abs() < 1e-14);
    }
}
