//! Line-oriented mesh text format.
//!
//! ```text
//! vertices N
//! x y            (N lines)
//! triangles M
//! i j k sid      (M lines, 0-based vertex indices)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::{FemError, Point, Result};

use super::Mesh;

impl Mesh {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let n = read_header(&mut lines, "vertices")?;
        let mut points: Vec<Point> = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, l) = next_line(&mut lines, "vertex")?;
            let v: Vec<f64> = parse_fields(line, l, 2)?;
            points.push([v[0], v[1]]);
        }

        let m = read_header(&mut lines, "triangles")?;
        let mut triangles = Vec::with_capacity(m);
        let mut ids = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, l) = next_line(&mut lines, "triangle")?;
            let v: Vec<usize> = parse_fields(line, l, 4)?;
            triangles.push([v[0], v[1], v[2]]);
            ids.push(v[3]);
        }
        if let Some((line, _)) = lines.next() {
            return Err(FemError::MeshParse { line, message: "trailing content".into() });
        }
        Mesh::new(points, &triangles, &ids)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| FemError::Io { path: path.to_path_buf(), source })?;
        Self::from_text(&text)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "vertices {}", self.num_vertices()).unwrap();
        for p in self.vertices() {
            writeln!(s, "{} {}", p[0], p[1]).unwrap();
        }
        writeln!(s, "triangles {}", self.num_elements()).unwrap();
        for el in self.elements() {
            let [i, j, k] = el.vertices;
            writeln!(s, "{i} {j} {k} {}", el.subdomain).unwrap();
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|source| FemError::Io { path: path.to_path_buf(), source })
    }
}

fn next_line<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, what: &str) -> Result<(usize, &'a str)> {
    lines
        .next()
        .ok_or_else(|| FemError::MeshParse { line: 0, message: format!("unexpected end of input, expected {what}") })
}

fn read_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, keyword: &str) -> Result<usize> {
    let (line, l) = next_line(lines, keyword)?;
    let mut it = l.split_whitespace();
    if it.next() != Some(keyword) {
        return Err(FemError::MeshParse { line, message: format!("expected header '{keyword} <count>'") });
    }
    let count = it
        .next()
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| FemError::MeshParse { line, message: format!("bad {keyword} count") })?;
    if it.next().is_some() {
        return Err(FemError::MeshParse { line, message: "extra tokens after count".into() });
    }
    Ok(count)
}

fn parse_fields<T: std::str::FromStr>(line: usize, l: &str, n: usize) -> Result<Vec<T>> {
    let v: Vec<T> = l
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| FemError::MeshParse { line, message: format!("cannot parse '{t}'") }))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(FemError::MeshParse { line, message: format!("expected {n} fields, found {}", v.len()) });
    }
    Ok(v)
}
