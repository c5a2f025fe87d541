//! Conforming triangulations with face topology and newest-vertex bisection.
//!
//! Element vertices are stored counterclockwise. Local edge `j` of an element
//! is the edge opposite local vertex `j`. Each element carries the local index
//! of its refinement edge, which newest-vertex bisection cuts first.
//!
//! Faces are numbered in order of first appearance while sweeping elements by
//! index, so the element on the minus side `K⁻` always has the smaller index.
//! The unit normal of a face points from `K⁻` to `K⁺` (outward on the
//! boundary), and the unit tangent is the normal rotated by +90°.

mod generate;
mod io;
mod refine;

use std::collections::{HashMap, HashSet};

pub use generate::{structured_rectangle, SubdomainRule};

use crate::{FemError, Point, Result};

/// Area below this fraction of the bounding-box area counts as degenerate.
const DEGENERATE_AREA_FRACTION: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    /// Vertex indices, counterclockwise.
    pub vertices: [usize; 3],
    pub subdomain: usize,
    /// Local index of the refinement edge (the edge opposite that vertex).
    pub refinement_edge: usize,
}

impl Element {
    /// Global vertex indices of local edge `j`, in counterclockwise order.
    pub fn edge(&self, j: usize) -> [usize; 2] {
        [self.vertices[(j + 1) % 3], self.vertices[(j + 2) % 3]]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Endpoints, ordered so that `x[1] - x[0] = length * tangent`.
    pub vertices: [usize; 2],
    /// Element `K⁻`.
    pub minus: usize,
    /// Element `K⁺`, `None` on the boundary.
    pub plus: Option<usize>,
    /// Local edge index of this face within `K⁻`.
    pub local_minus: usize,
    pub local_plus: Option<usize>,
    pub normal: [f64; 2],
    pub tangent: [f64; 2],
    pub length: f64,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.plus.is_none()
    }

    /// Elements adjacent to this face, `K⁻` first.
    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.minus).chain(self.plus)
    }
}

/// Affine geometry of one triangle.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub area: f64,
    /// Longest edge length.
    pub diameter: f64,
    /// Constant gradients of the barycentric coordinates.
    pub grad_bary: [[f64; 2]; 3],
    pub centroid: Point,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    elements: Vec<Element>,
    faces: Vec<Face>,
    element_faces: Vec<[usize; 3]>,
    geometry: Vec<ElementGeometry>,
    interior_faces: Vec<usize>,
    boundary_faces: Vec<usize>,
    parent: Vec<Option<usize>>,
    generation: Vec<u32>,
}

impl Mesh {
    /// Builds a mesh from raw points, index triples and per-triangle subdomain ids.
    ///
    /// Clockwise triangles are reoriented. The refinement edge of every
    /// triangle is its longest edge.
    pub fn new(points: Vec<Point>, triangles: &[[usize; 3]], subdomain_ids: &[usize]) -> Result<Self> {
        if triangles.len() != subdomain_ids.len() {
            return Err(FemError::InvalidMesh(format!(
                "{} triangles but {} subdomain ids",
                triangles.len(),
                subdomain_ids.len()
            )));
        }
        if triangles.is_empty() {
            return Err(FemError::InvalidMesh("no triangles".into()));
        }
        if let Some(p) = points.iter().find(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(FemError::InvalidMesh(format!("non-finite vertex {p:?}")));
        }

        let bbox_area = {
            let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for p in &points {
                for d in 0..2 {
                    lo[d] = lo[d].min(p[d]);
                    hi[d] = hi[d].max(p[d]);
                }
            }
            (hi[0] - lo[0]) * (hi[1] - lo[1])
        };

        let mut used = vec![false; points.len()];
        let mut seen = HashSet::with_capacity(triangles.len());
        let mut elements = Vec::with_capacity(triangles.len());
        for (t, (&tri, &sid)) in triangles.iter().zip(subdomain_ids).enumerate() {
            if let Some(&i) = tri.iter().find(|&&i| i >= points.len()) {
                return Err(FemError::InvalidMesh(format!("triangle {t}: vertex index {i} out of range")));
            }
            let mut key = tri;
            key.sort_unstable();
            if key[0] == key[1] || key[1] == key[2] {
                return Err(FemError::InvalidMesh(format!("triangle {t}: repeated vertex")));
            }
            if !seen.insert(key) {
                return Err(FemError::InvalidMesh(format!("triangle {t}: duplicate triangle")));
            }
            let signed = signed_area(points[tri[0]], points[tri[1]], points[tri[2]]);
            if signed.abs() <= DEGENERATE_AREA_FRACTION * bbox_area {
                return Err(FemError::InvalidMesh(format!("triangle {t}: degenerate (zero area)")));
            }
            let vertices = if signed > 0.0 { tri } else { [tri[0], tri[2], tri[1]] };
            for &v in &vertices {
                used[v] = true;
            }
            let refinement_edge = longest_edge(&points, vertices);
            elements.push(Element { vertices, subdomain: sid, refinement_edge });
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(FemError::InvalidMesh(format!("dangling vertex {v}")));
        }

        let n = elements.len();
        let mesh = Self::assemble(points, elements, vec![None; n], vec![0; n])?;
        mesh.check_conformity()?;
        Ok(mesh)
    }

    /// Builds topology and geometry for elements already known to be valid.
    fn assemble(
        vertices: Vec<Point>,
        elements: Vec<Element>,
        parent: Vec<Option<usize>>,
        generation: Vec<u32>,
    ) -> Result<Self> {
        let mut faces: Vec<Face> = Vec::with_capacity(elements.len() * 3 / 2 + 2);
        let mut element_faces = vec![[usize::MAX; 3]; elements.len()];
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(elements.len() * 2);

        for (e, el) in elements.iter().enumerate() {
            #[allow(clippy::needless_range_loop)]
            for j in 0..3 {
                let [a, b] = el.edge(j);
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    None => {
                        let (pa, pb) = (vertices[a], vertices[b]);
                        let d = [pb[0] - pa[0], pb[1] - pa[1]];
                        let length = d[0].hypot(d[1]);
                        let tangent = [d[0] / length, d[1] / length];
                        let normal = [tangent[1], -tangent[0]];
                        lookup.insert(key, faces.len());
                        element_faces[e][j] = faces.len();
                        faces.push(Face {
                            vertices: [a, b],
                            minus: e,
                            plus: None,
                            local_minus: j,
                            local_plus: None,
                            normal,
                            tangent,
                            length,
                        });
                    }
                    Some(&f) => {
                        let face = &mut faces[f];
                        if face.plus.is_some() {
                            return Err(FemError::InvalidMesh(format!(
                                "edge ({a}, {b}) shared by more than two triangles"
                            )));
                        }
                        if face.vertices != [b, a] {
                            return Err(FemError::InvalidMesh(format!(
                                "inconsistent orientation across edge ({a}, {b})"
                            )));
                        }
                        face.plus = Some(e);
                        face.local_plus = Some(j);
                        element_faces[e][j] = f;
                    }
                }
            }
        }

        let geometry = elements.iter().map(|el| element_geometry(&vertices, el.vertices)).collect();
        let (boundary_faces, interior_faces): (Vec<usize>, Vec<usize>) =
            (0..faces.len()).partition(|&f| faces[f].is_boundary());

        Ok(Self {
            vertices,
            elements,
            faces,
            element_faces,
            geometry,
            interior_faces,
            boundary_faces,
            parent,
            generation,
        })
    }

    /// Rejects hanging vertices: no vertex may lie strictly inside a boundary face.
    fn check_conformity(&self) -> Result<()> {
        let candidates: Vec<usize> = {
            let mut v: Vec<usize> = self.boundary_faces.iter().flat_map(|&f| self.faces[f].vertices).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        for &f in &self.boundary_faces {
            let face = &self.faces[f];
            let a = self.vertices[face.vertices[0]];
            let tol = 1e-12 * face.length;
            for &v in &candidates {
                if face.vertices.contains(&v) {
                    continue;
                }
                let p = self.vertices[v];
                let s = (p[0] - a[0]) * face.tangent[0] + (p[1] - a[1]) * face.tangent[1];
                let d = (p[0] - a[0]) * face.normal[0] + (p[1] - a[1]) * face.normal[1];
                if d.abs() <= tol && s > tol && s < face.length - tol {
                    return Err(FemError::NonconformingMesh(format!(
                        "vertex {v} lies inside edge ({}, {})",
                        face.vertices[0], face.vertices[1]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, e: usize) -> &Element {
        &self.elements[e]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Face indices of the three local edges of element `e`.
    pub fn element_faces(&self, e: usize) -> [usize; 3] {
        self.element_faces[e]
    }

    pub fn geometry(&self, e: usize) -> &ElementGeometry {
        &self.geometry[e]
    }

    pub fn area(&self, e: usize) -> f64 {
        self.geometry[e].area
    }

    pub fn diameter(&self, e: usize) -> f64 {
        self.geometry[e].diameter
    }

    pub fn interior_faces(&self) -> &[usize] {
        &self.interior_faces
    }

    pub fn boundary_faces(&self) -> &[usize] {
        &self.boundary_faces
    }

    /// Index of the parent element in the mesh this one was refined from.
    pub fn parent(&self, e: usize) -> Option<usize> {
        self.parent[e]
    }

    /// Number of bisections separating `e` from its level-0 ancestor.
    pub fn generation(&self, e: usize) -> u32 {
        self.generation[e]
    }

    pub fn element_points(&self, e: usize) -> [Point; 3] {
        self.elements[e].vertices.map(|v| self.vertices[v])
    }

    /// Physical point with barycentric coordinates `bary` in element `e`.
    pub fn to_physical(&self, e: usize, bary: [f64; 3]) -> Point {
        let [a, b, c] = self.element_points(e);
        [
            bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
            bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
        ]
    }

    /// Barycentric coordinates of a physical point with respect to element `e`.
    pub fn to_barycentric(&self, e: usize, x: Point) -> [f64; 3] {
        let g = &self.geometry[e];
        let d = [x[0] - g.centroid[0], x[1] - g.centroid[1]];
        let l1 = 1.0 / 3.0 + g.grad_bary[1][0] * d[0] + g.grad_bary[1][1] * d[1];
        let l2 = 1.0 / 3.0 + g.grad_bary[2][0] * d[0] + g.grad_bary[2][1] * d[1];
        [1.0 - l1 - l2, l1, l2]
    }

    /// Point at parameter `t ∈ [0, 1]` along face `f`, from `vertices[0]` to `vertices[1]`.
    pub fn face_point(&self, f: usize, t: f64) -> Point {
        let [a, b] = self.faces[f].vertices.map(|v| self.vertices[v]);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    /// Faces of `e` that are shared with another element, paired with that neighbor.
    pub fn neighbors(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        self.element_faces[e].into_iter().filter_map(move |f| {
            let face = &self.faces[f];
            match face.plus {
                Some(p) if face.minus == e => Some(p),
                Some(_) => Some(face.minus),
                None => None,
            }
        })
    }

    pub fn total_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }

    pub fn h_max(&self) -> f64 {
        self.geometry.iter().map(|g| g.diameter).fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        self.geometry.iter().map(|g| g.diameter).fold(f64::INFINITY, f64::min)
    }

    /// Smallest interior angle over all elements, in radians.
    pub fn min_angle(&self) -> f64 {
        (0..self.elements.len())
            .map(|e| {
                let p = self.element_points(e);
                (0..3)
                    .map(|i| {
                        let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
                        let u = [b[0] - a[0], b[1] - a[1]];
                        let v = [c[0] - a[0], c[1] - a[1]];
                        let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                        cos.clamp(-1.0, 1.0).acos()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Subdomain ids that occur in the mesh, sorted.
    pub fn subdomains(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.elements.iter().map(|e| e.subdomain).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn edge_length(points: &[Point], a: usize, b: usize) -> f64 {
    let (p, q) = (points[a], points[b]);
    (q[0] - p[0]).hypot(q[1] - p[1])
}

fn longest_edge(points: &[Point], v: [usize; 3]) -> usize {
    let mut best = 0;
    let mut best_len = f64::NEG_INFINITY;
    for j in 0..3 {
        let len = edge_length(points, v[(j + 1) % 3], v[(j + 2) % 3]);
        // Strict comparison with a relative margin keeps ties on the lowest index.
        if len > best_len * (1.0 + 1e-12) {
            best = j;
            best_len = len;
        }
    }
    best
}

fn element_geometry(points: &[Point], v: [usize; 3]) -> ElementGeometry {
    let p = v.map(|i| points[i]);
    let area = signed_area(p[0], p[1], p[2]);
    let mut grad_bary = [[0.0; 2]; 3];
    for j in 0..3 {
        let (a, b) = (p[(j + 1) % 3], p[(j + 2) % 3]);
        // ∇λ_j is the inward normal of the opposite edge scaled by 1/height.
        grad_bary[j] = [-(b[1] - a[1]) / (2.0 * area), (b[0] - a[0]) / (2.0 * area)];
    }
    let diameter = (0..3).map(|j| edge_length(points, v[(j + 1) % 3], v[(j + 2) % 3])).fold(0.0, f64::max);
    let centroid = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
    ElementGeometry { area, diameter, grad_bary, centroid }
}
