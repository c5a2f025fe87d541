use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::coeff::BoundCoefficients;
use crate::estimate::IndicatorReport;
use crate::mesh::Mesh;
use crate::spaces::DiscreteField;
use crate::{FemError, Result};

use super::AdaptiveRunRecord;

pub const CSV_HEADER: &str = "level,ndof,h_max,eta,eta_r,eta_jn,eta_ju,osc,energy_err,dg_err,effectivity,seconds";

/// The run as CSV text, one row per level. Error columns are empty when no
/// error was measured.
pub fn csv_string(record: &AdaptiveRunRecord) -> String {
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for l in &record.levels {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            l.level,
            l.ndof,
            l.h_max,
            l.eta,
            l.eta_r,
            l.eta_jn,
            l.eta_ju,
            l.osc,
            opt(l.energy_err),
            opt(l.dg_err),
            opt(l.effectivity),
            l.seconds
        );
    }
    out
}

pub fn emit_csv(record: &AdaptiveRunRecord, path: &Path) -> Result<()> {
    fs::write(path, csv_string(record)).map_err(|source| FemError::Io { path: path.to_path_buf(), source })
}

/// Legacy ASCII VTK unstructured grid with cell data `u_h` (value at the
/// centroid), `eta` (`η_K`), `alpha` and `subdomain`.
pub fn vtk_string(mesh: &Mesh, solution: &DiscreteField, report: &IndicatorReport, coeff: &BoundCoefficients) -> String {
    let ne = mesh.num_elements();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\njumpfem solution\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", mesh.num_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(out, "{} {} 0", p[0], p[1]);
    }
    let _ = writeln!(out, "CELLS {ne} {}", 4 * ne);
    for el in mesh.elements() {
        let [a, b, c] = el.vertices;
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    let _ = writeln!(out, "CELL_TYPES {ne}");
    for _ in 0..ne {
        out.push_str("5\n");
    }
    let _ = writeln!(out, "CELL_DATA {ne}");
    let mut scalars = |name: &str, ty: &str, values: &mut dyn Iterator<Item = String>| {
        let _ = writeln!(out, "SCALARS {name} {ty} 1\nLOOKUP_TABLE default");
        for v in values {
            out.push_str(&v);
            out.push('\n');
        }
    };
    scalars(
        "u_h",
        "double",
        &mut (0..ne).map(|e| solution.eval_at(mesh, e, mesh.geometry(e).centroid).0.to_string()),
    );
    scalars("eta", "double", &mut report.eta_local.iter().map(|v| v.to_string()));
    scalars("alpha", "double", &mut coeff.elements().iter().map(|v| v.to_string()));
    scalars("subdomain", "int", &mut mesh.elements().iter().map(|el| el.subdomain.to_string()));
    out
}

pub fn emit_vtk(
    mesh: &Mesh,
    solution: &DiscreteField,
    report: &IndicatorReport,
    coeff: &BoundCoefficients,
    path: &Path,
) -> Result<()> {
    fs::write(path, vtk_string(mesh, solution, report, coeff))
        .map_err(|source| FemError::Io { path: path.to_path_buf(), source })
}
