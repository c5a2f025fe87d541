//! Piecewise-constant diffusion coefficient and face-level coefficient algebra.
//!
//! On an interior face with traces `α⁻` (from `K⁻`) and `α⁺` (from `K⁺`):
//!
//! * arithmetic average `α_A = (α⁻ + α⁺) / 2`,
//! * harmonic average `α_H = 2 α⁻ α⁺ / (α⁻ + α⁺)`,
//! * weights `ω⁻ = α⁺ / (α⁻ + α⁺)` and `ω⁺ = α⁻ / (α⁻ + α⁺)`.
//!
//! The flux average `{v}_w = ω⁻ v⁻ + ω⁺ v⁺` is applied to fluxes and the
//! conjugate average `{v}^w = ω⁺ v⁻ + ω⁻ v⁺` to the other factor, so that
//! `[uv] = {v}^w [u] + {u}_w [v]` holds exactly. Boundary faces carry a single
//! trace: all averages reduce to `α_{K⁻}` and `ω⁻ = 1`.

use std::collections::BTreeMap;

use crate::mesh::Mesh;
use crate::{FemError, Result};

pub fn arithmetic_average(a_minus: f64, a_plus: f64) -> Result<f64> {
    check_positive(a_minus)?;
    check_positive(a_plus)?;
    Ok(0.5 * (a_minus + a_plus))
}

pub fn harmonic_average(a_minus: f64, a_plus: f64) -> Result<f64> {
    check_positive(a_minus)?;
    check_positive(a_plus)?;
    Ok(2.0 * a_minus * a_plus / (a_minus + a_plus))
}

/// Harmonic weights `(ω⁻, ω⁺)`.
pub fn face_weights(a_minus: f64, a_plus: f64) -> Result<(f64, f64)> {
    check_positive(a_minus)?;
    check_positive(a_plus)?;
    let s = a_minus + a_plus;
    Ok((a_plus / s, a_minus / s))
}

/// `[v] = v⁻ − v⁺`; on a boundary face (`trace_plus = None`) the jump is the trace.
pub fn face_jump(trace_minus: f64, trace_plus: Option<f64>) -> f64 {
    trace_minus - trace_plus.unwrap_or(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AverageMode {
    /// `{v}_w = ω⁻ v⁻ + ω⁺ v⁺`
    Flux,
    /// `{v}^w = ω⁺ v⁻ + ω⁻ v⁺`
    Conjugate,
}

/// Weighted face average. With no plus trace the single trace is returned.
pub fn weighted_average(trace_minus: f64, trace_plus: Option<f64>, weights: (f64, f64), mode: AverageMode) -> f64 {
    let Some(plus) = trace_plus else { return trace_minus };
    let (w_minus, w_plus) = weights;
    match mode {
        AverageMode::Flux => w_minus * trace_minus + w_plus * plus,
        AverageMode::Conjugate => w_plus * trace_minus + w_minus * plus,
    }
}

fn check_positive(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(FemError::NonPositiveCoefficient(a))
    }
}

/// Coefficient values per subdomain id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoefficientField {
    alpha: BTreeMap<usize, f64>,
}

impl CoefficientField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn uniform(ids: impl IntoIterator<Item = usize>, value: f64) -> Result<Self> {
        let mut c = Self::new();
        for id in ids {
            c.set(id, value)?;
        }
        Ok(c)
    }

    pub fn set(&mut self, subdomain: usize, value: f64) -> Result<()> {
        check_positive(value)?;
        self.alpha.insert(subdomain, value);
        Ok(())
    }

    pub fn get(&self, subdomain: usize) -> Option<f64> {
        self.alpha.get(&subdomain).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.alpha.iter().map(|(&k, &v)| (k, v))
    }

    /// Parses `"id:value"` pairs separated by commas or whitespace.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut c = Self::new();
        for pair in spec.split(|ch: char| ch == ',' || ch.is_whitespace()).filter(|p| !p.is_empty()) {
            let (id, value) = pair
                .split_once(':')
                .ok_or_else(|| FemError::InvalidArgument(format!("expected id:value, got '{pair}'")))?;
            let id = id.trim().parse().map_err(|_| FemError::InvalidArgument(format!("bad subdomain id '{id}'")))?;
            let value =
                value.trim().parse().map_err(|_| FemError::InvalidArgument(format!("bad coefficient '{value}'")))?;
            c.set(id, value)?;
        }
        Ok(c)
    }

    /// Resolves element and face coefficients on `mesh`.
    pub fn bind(&self, mesh: &Mesh) -> Result<BoundCoefficients> {
        let element: Vec<f64> = mesh
            .elements()
            .iter()
            .map(|el| self.get(el.subdomain).ok_or(FemError::MissingSubdomain(el.subdomain)))
            .collect::<Result<_>>()?;
        let face = mesh
            .faces()
            .iter()
            .map(|f| {
                let minus = element[f.minus];
                match f.plus {
                    None => FaceCoefficients::boundary(minus),
                    Some(p) => FaceCoefficients::interior(minus, element[p]),
                }
            })
            .collect();
        Ok(BoundCoefficients { element, face })
    }
}

/// Coefficient traces and derived averages on one face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceCoefficients {
    pub minus: f64,
    /// Equal to `minus` on boundary faces.
    pub plus: f64,
    pub arithmetic: f64,
    pub harmonic: f64,
    pub w_minus: f64,
    pub w_plus: f64,
}

impl FaceCoefficients {
    fn interior(minus: f64, plus: f64) -> Self {
        let s = minus + plus;
        Self {
            minus,
            plus,
            arithmetic: 0.5 * s,
            harmonic: 2.0 * minus * plus / s,
            w_minus: plus / s,
            w_plus: minus / s,
        }
    }

    fn boundary(alpha: f64) -> Self {
        Self { minus: alpha, plus: alpha, arithmetic: alpha, harmonic: alpha, w_minus: 1.0, w_plus: 0.0 }
    }
}

/// A coefficient field resolved on a particular mesh.
#[derive(Clone, Debug)]
pub struct BoundCoefficients {
    element: Vec<f64>,
    face: Vec<FaceCoefficients>,
}

impl BoundCoefficients {
    pub fn element(&self, e: usize) -> f64 {
        self.element[e]
    }

    pub fn face(&self, f: usize) -> &FaceCoefficients {
        &self.face[f]
    }

    pub fn elements(&self) -> &[f64] {
        &self.element
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::mesh::{structured_rectangle, SubdomainRule};

    #[test]
    fn harmonic_average_values() {
        assert_eq!(harmonic_average(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(harmonic_average(1.0, 3.0).unwrap(), 1.5);
        assert_relative_eq!(harmonic_average(1.0, 1e6).unwrap(), 1.999998000002, max_relative = 1e-15);
        assert!(harmonic_average(0.0, 1.0).is_err());
        assert!(harmonic_average(1.0, -2.0).is_err());
    }

    #[test]
    fn weights_values() {
        let (wm, wp) = face_weights(1.0, 4.0).unwrap();
        assert_relative_eq!(wm, 0.8);
        assert_relative_eq!(wp, 0.2);
        assert_eq!(face_weights(2.5, 2.5).unwrap(), (0.5, 0.5));
        let (wm, wp) = face_weights(1.0, 1e6).unwrap();
        assert_relative_eq!(wm, 0.999999, max_relative = 1e-6);
        assert_relative_eq!(wp, 1e-6, max_relative = 1e-5);
        let h = harmonic_average(1.0, 1e6).unwrap();
        assert!(wp * 1e6 <= (1e6 * h).sqrt());
        assert!(face_weights(-1.0, 1.0).is_err());
    }

    #[test]
    fn jumps_and_averages() {
        assert_eq!(face_jump(1.5, Some(1.5)), 0.0);
        assert_eq!(face_jump(2.0, Some(-1.0)), 3.0);
        assert_eq!(face_jump(5.0, None), 5.0);
        for mode in [AverageMode::Flux, AverageMode::Conjugate] {
            assert_eq!(weighted_average(2.0, Some(4.0), (0.5, 0.5), mode), 3.0);
            assert_eq!(weighted_average(7.0, None, (0.3, 0.7), mode), 7.0);
        }
        assert_relative_eq!(weighted_average(1.0, Some(0.0), (0.8, 0.2), AverageMode::Flux), 0.8);
        assert_relative_eq!(weighted_average(1.0, Some(0.0), (0.8, 0.2), AverageMode::Conjugate), 0.2);
    }

    #[test]
    fn parse_pairs() {
        let c = CoefficientField::parse("0:1, 1:1e3 2:4.5").unwrap();
        assert_eq!(c.get(1), Some(1e3));
        assert_eq!(c.get(2), Some(4.5));
        assert!(CoefficientField::parse("0=1").is_err());
        assert!(CoefficientField::parse("0:-1").is_err());
    }

    #[test]
    fn bind_reports_missing_subdomain() {
        let m = structured_rectangle([0.0, 0.0], [1.0, 1.0], 2, 2, &SubdomainRule::HalfPlanes { x0: 0.5 }).unwrap();
        let c = CoefficientField::uniform([0], 1.0).unwrap();
        assert!(matches!(c.bind(&m), Err(FemError::MissingSubdomain(1))));
        let mut c = c;
        c.set(1, 9.0).unwrap();
        let b = c.bind(&m).unwrap();
        for (f, face) in m.faces().iter().enumerate() {
            let fc = b.face(f);
            assert_relative_eq!(fc.w_minus + fc.w_plus, 1.0);
            if face.is_boundary() {
                assert_eq!(fc.harmonic, b.element(face.minus));
                assert_eq!(fc.w_minus, 1.0);
            }
        }
    }

    fn log_uniform() -> impl Strategy<Value = f64> {
        (-6.0f64..6.0).prop_map(|e| 10f64.powf(e))
    }

    proptest! {
        #[test]
        fn weight_inequalities(a in log_uniform(), b in log_uniform()) {
            let slack = 1.0 + 1e-14;
            let (wm, wp) = face_weights(a, b).unwrap();
            let h = harmonic_average(a, b).unwrap();
            let avg = arithmetic_average(a, b).unwrap();
            prop_assert!((wm + wp - 1.0).abs() < 1e-15);
            prop_assert!(wm > 0.0 && wm <= 1.0 && wp > 0.0 && wp <= 1.0);
            prop_assert!(wm * a <= (a * h).sqrt() * slack);
            prop_assert!(wp * b <= (b * h).sqrt() * slack);
            prop_assert!(wp / a.sqrt() <= (1.0 / avg).sqrt() * slack);
            prop_assert!(wm / b.sqrt() <= (1.0 / avg).sqrt() * slack);
            prop_assert!(h <= avg * slack);
            prop_assert!(h <= 2.0 * a.min(b) * slack);
        }

        #[test]
        fn product_jump_identity(um in -1e3f64..1e3, up in -1e3f64..1e3,
                                 vm in -1e3f64..1e3, vp in -1e3f64..1e3,
                                 a in log_uniform(), b in log_uniform()) {
            let w = face_weights(a, b).unwrap();
            let lhs = face_jump(um * vm, Some(up * vp));
            let rhs = weighted_average(vm, Some(vp), w, AverageMode::Conjugate) * face_jump(um, Some(up))
                + weighted_average(um, Some(up), w, AverageMode::Flux) * face_jump(vm, Some(vp));
            let scale = (um * vm).abs() + (up * vp).abs() + 1.0;
            prop_assert!((lhs - rhs).abs() <= 1e-14 * scale * 4.0);
        }
    }

    #[test]
    fn equal_traces_make_averages_coincide() {
        for a in [1e-6, 1.0, 3.7, 1e6] {
            assert_relative_eq!(harmonic_average(a, a).unwrap(), arithmetic_average(a, a).unwrap(), max_relative = 1e-15);
        }
        assert!(harmonic_average(1.0, 1.0 + 1e-6).unwrap() < arithmetic_average(1.0, 1.0 + 1e-6).unwrap());
    }
}
