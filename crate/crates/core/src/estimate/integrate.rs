use crate::mesh::Mesh;
use crate::spaces::QuadratureRule;
use crate::Point;

/// Number of geometric levels used around a singular vertex.
const SINGULAR_LEVELS: usize = 60;

/// `∫_K g` where `g` receives barycentric coordinates of element `e`.
///
/// When `singular` is a vertex of the element the integral is split into
/// geometrically shrinking corner triangles so that integrands like `r^{-2+ε}`
/// near that vertex are resolved.
pub(crate) fn element_integral(
    mesh: &Mesh,
    e: usize,
    rule: &QuadratureRule,
    singular: Option<Point>,
    mut g: impl FnMut([f64; 3]) -> f64,
) -> f64 {
    let area = mesh.area(e);
    let corner = singular.and_then(|s| {
        mesh.element_points(e).iter().position(|p| {
            let scale = mesh.diameter(e);
            (p[0] - s[0]).abs() <= 1e-14 * scale && (p[1] - s[1]).abs() <= 1e-14 * scale
        })
    });
    let Some(c) = corner else {
        return area * rule.iter().map(|(b, w)| w * g(b)).sum::<f64>();
    };

    let unit = |i: usize| {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        v
    };
    let mid = |a: [f64; 3], b: [f64; 3]| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])];
    let sub_integral = |tri: [[f64; 3]; 3], g: &mut dyn FnMut([f64; 3]) -> f64| -> f64 {
        rule.iter()
            .map(|(l, w)| {
                let mut b = [0.0; 3];
                for (k, bk) in b.iter_mut().enumerate() {
                    *bk = l[0] * tri[0][k] + l[1] * tri[1][k] + l[2] * tri[2][k];
                }
                w * g(b)
            })
            .sum()
    };

    let (p0, mut p1, mut p2) = (unit(c), unit((c + 1) % 3), unit((c + 2) % 3));
    let mut fraction = 1.0;
    let mut total = 0.0;
    for _ in 0..SINGULAR_LEVELS {
        let (m01, m02, m12) = (mid(p0, p1), mid(p0, p2), mid(p1, p2));
        let child = 0.25 * fraction;
        total += child * sub_integral([m01, p1, m12], &mut g);
        total += child * sub_integral([m02, m12, p2], &mut g);
        total += child * sub_integral([m01, m12, m02], &mut g);
        (p1, p2) = (m01, m02);
        fraction = child;
    }
    total += fraction * sub_integral([p0, p1, p2], &mut g);
    area * total
}
