//! Newest-vertex bisection.
//!
//! Refinement works on marked edges: marking an element marks its refinement
//! edge, a closure sweep marks the refinement edge of every element that has
//! any marked edge, and finally each element is split recursively along its
//! marked edges. The closure makes the result conforming.

use std::collections::HashMap;

use super::{Element, Mesh};

impl Mesh {
    /// Bisects every marked element at least once and closes the result.
    ///
    /// Element indices out of range are ignored. The returned mesh records the
    /// parent of each element in `self`.
    pub fn refine(&self, marked: &[usize]) -> Mesh {
        let mut edge_marked = vec![false; self.num_faces()];
        for &e in marked.iter().filter(|&&e| e < self.num_elements()) {
            let el = self.element(e);
            edge_marked[self.element_faces(e)[el.refinement_edge]] = true;
        }
        self.bisect_marked_edges(edge_marked)
    }

    /// Bisects every element twice (all edges marked), so each element has four children.
    pub fn uniform_refine(&self) -> Mesh {
        self.bisect_marked_edges(vec![true; self.num_faces()])
    }

    fn close(&self, edge_marked: &mut [bool]) {
        let mut stack: Vec<usize> = (0..self.num_elements())
            .filter(|&e| self.element_faces(e).iter().any(|&f| edge_marked[f]))
            .collect();
        while let Some(e) = stack.pop() {
            let refinement_face = self.element_faces(e)[self.element(e).refinement_edge];
            if edge_marked[refinement_face] {
                continue;
            }
            edge_marked[refinement_face] = true;
            stack.extend(self.face(refinement_face).elements().filter(|&k| k != e));
        }
    }

    fn bisect_marked_edges(&self, mut edge_marked: Vec<bool>) -> Mesh {
        self.close(&mut edge_marked);

        let mut vertices = self.vertices().to_vec();
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, face) in self.faces().iter().enumerate() {
            if edge_marked[f] {
                let [a, b] = face.vertices;
                let (pa, pb) = (vertices[a], vertices[b]);
                midpoints.insert((a.min(b), a.max(b)), vertices.len());
                vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
            }
        }

        let mut elements = Vec::with_capacity(self.num_elements() + 2 * midpoints.len());
        let mut parent = Vec::with_capacity(elements.capacity());
        let mut generation = Vec::with_capacity(elements.capacity());
        let mut children = Vec::with_capacity(4);
        for (e, el) in self.elements().iter().enumerate() {
            children.clear();
            bisect(el.vertices, el.refinement_edge, 0, &midpoints, &mut children);
            for &(vertices, refinement_edge, depth) in &children {
                elements.push(Element { vertices, subdomain: el.subdomain, refinement_edge });
                parent.push(Some(e));
                generation.push(self.generation(e) + depth);
            }
        }

        Mesh::assemble(vertices, elements, parent, generation)
            .expect("bisection of a conforming mesh yields a valid mesh")
    }
}

fn bisect(
    tri: [usize; 3],
    refinement_edge: usize,
    depth: u32,
    midpoints: &HashMap<(usize, usize), usize>,
    out: &mut Vec<([usize; 3], usize, u32)>,
) {
    let v = tri[refinement_edge];
    let a = tri[(refinement_edge + 1) % 3];
    let b = tri[(refinement_edge + 2) % 3];
    match midpoints.get(&(a.min(b), a.max(b))) {
        None => out.push((tri, refinement_edge, depth)),
        Some(&m) => {
            // The new vertex m is the newest vertex of both children.
            bisect([v, a, m], 2, depth + 1, midpoints, out);
            bisect([v, m, b], 1, depth + 1, midpoints, out);
        }
    }
}
