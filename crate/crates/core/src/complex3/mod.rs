//! Ordered tetrahedra glued along faces, with edge wheels, vertex links and
//! the two cell decompositions of each link.

mod link;
mod path;

use serde::{Deserialize, Serialize};

use crate::flags::{completion, is_odd};

pub use link::{CellData, LinkKind, LinkSurface};
pub use path::{LinkPath, Move, MoveKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("gluing of tet {tet} face {face} does not reverse orientation")]
    NonOrientable { tet: usize, face: usize },
    #[error("gluing of tet {tet} face {face} does not preserve vertex order")]
    OrderingMismatch { tet: usize, face: usize },
    #[error("face {face} of tet {tet} is glued inconsistently")]
    UnmatchedFace { tet: usize, face: usize },
    #[error("edge class {0} meets the boundary")]
    BoundaryEdge(usize),
    #[error("link {0} is a sphere")]
    SphereLink(usize),
    #[error("link {0} has no basis of the requested type")]
    NoBasis(usize),
    #[error("invalid link path: {0}")]
    InvalidPath(String),
}

/// One face pairing as it appears in documents. Fields are in key order so
/// that serialization is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gluing {
    pub face: usize,
    pub tet: usize,
    pub to_face: usize,
    pub to_tet: usize,
    pub vertex_map: [usize; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangulationDoc {
    pub gluings: Vec<Gluing>,
    pub tetrahedra: usize,
}

/// (tet, a, b): the edge from vertex a to vertex b of a tetrahedron.
pub type OrientedEdge = (usize, usize, usize);

/// Position of (i, j), i ≠ j, among the 12 ordered pairs in lexicographic order.
pub fn edge_index(i: usize, j: usize) -> usize {
    debug_assert!(i != j);
    3 * i + if j < i { j } else { j - 1 }
}

pub fn edge_at(n: usize) -> (usize, usize) {
    let i = n / 3;
    let r = n % 3;
    (i, if r < i { r } else { r + 1 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wheel {
    pub edges: Vec<OrientedEdge>,
    /// Internal edge (cyclic wheel) or a fan between two boundary faces.
    pub closed: bool,
}

#[derive(Clone, Debug)]
pub struct TriangulationComplex {
    n: usize,
    /// glue[t][f] = (t′, f′, vertex map)
    glue: Vec<[Option<(usize, usize, [usize; 4])>; 4]>,
    wheels: Vec<Wheel>,
    /// wheel_of[12 t + edge_index(a, b)]
    wheel_of: Vec<usize>,
    vertex_classes: Vec<Vec<(usize, usize)>>,
    links: Vec<LinkSurface>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    pub require_ordered: bool,
}

fn invert(p: &[usize; 4]) -> [usize; 4] {
    let mut q = [0; 4];
    for (a, &b) in p.iter().enumerate() {
        q[b] = a;
    }
    q
}

pub fn parse_triangulation(json: &str, opts: ParseOptions) -> Result<TriangulationComplex, ComplexError> {
    let doc: TriangulationDoc = serde_json::from_str(json).map_err(|e| ComplexError::Schema(e.to_string()))?;
    TriangulationComplex::from_doc(&doc, opts)
}

impl TriangulationComplex {
    pub fn from_doc(doc: &TriangulationDoc, opts: ParseOptions) -> Result<Self, ComplexError> {
        let n = doc.tetrahedra;
        if n == 0 {
            return Err(ComplexError::Schema("no tetrahedra".into()));
        }
        let mut glue: Vec<[Option<(usize, usize, [usize; 4])>; 4]> = vec![[None; 4]; n];
        for g in &doc.gluings {
            let (t, f, t2, f2, p) = (g.tet, g.face, g.to_tet, g.to_face, g.vertex_map);
            if t >= n || t2 >= n || f > 3 || f2 > 3 {
                return Err(ComplexError::Schema(format!("index out of range in {g:?}")));
            }
            let mut seen = [false; 4];
            for &v in &p {
                if v > 3 || seen[v] {
                    return Err(ComplexError::Schema(format!("vertex_map {p:?} is not a permutation")));
                }
                seen[v] = true;
            }
            if p[f] != f2 {
                return Err(ComplexError::Schema(format!("vertex_map does not send face {f} to face {f2}")));
            }
            if (t, f) == (t2, f2) {
                return Err(ComplexError::Schema(format!("face {f} of tet {t} glued to itself")));
            }
            for (side, entry) in [((t, f), (t2, f2, p)), ((t2, f2), (t, f, invert(&p)))] {
                match glue[side.0][side.1] {
                    None => glue[side.0][side.1] = Some(entry),
                    Some(old) if old == entry => {}
                    Some(_) => return Err(ComplexError::UnmatchedFace { tet: side.0, face: side.1 }),
                }
            }
        }
        for t in 0..n {
            for f in 0..4 {
                let Some((_, _, p)) = glue[t][f] else { continue };
                if !is_odd(&p) {
                    return Err(ComplexError::NonOrientable { tet: t, face: f });
                }
                if opts.require_ordered {
                    let face: Vec<usize> = (0..4).filter(|&v| v != f).collect();
                    if !face.windows(2).all(|w| p[w[0]] < p[w[1]]) {
                        return Err(ComplexError::OrderingMismatch { tet: t, face: f });
                    }
                }
            }
        }
        let mut cx = TriangulationComplex {
            n,
            glue,
            wheels: vec![],
            wheel_of: vec![usize::MAX; 12 * n],
            vertex_classes: vec![],
            links: vec![],
        };
        cx.build_wheels();
        cx.build_vertex_classes();
        cx.links = link::build_links(&cx);
        Ok(cx)
    }

    pub fn num_tetrahedra(&self) -> usize {
        self.n
    }

    /// Face f of tet t glued to (t′, f′) by the given vertex map.
    pub fn glued(&self, t: usize, f: usize) -> Option<(usize, usize, [usize; 4])> {
        self.glue[t][f]
    }

    /// Each pairing once, from the smaller (tet, face).
    pub fn face_pairings(&self) -> Vec<Gluing> {
        let mut out = vec![];
        for t in 0..self.n {
            for f in 0..4 {
                if let Some((t2, f2, p)) = self.glue[t][f] {
                    if (t, f) < (t2, f2) {
                        out.push(Gluing { face: f, tet: t, to_face: f2, to_tet: t2, vertex_map: p });
                    }
                }
            }
        }
        out
    }

    pub fn boundary_faces(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|t| (0..4).map(move |f| (t, f))).filter(|&(t, f)| self.glue[t][f].is_none()).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_faces().is_empty()
    }

    pub fn to_doc(&self) -> TriangulationDoc {
        TriangulationDoc { gluings: self.face_pairings(), tetrahedra: self.n }
    }

    /// Canonical JSON: sorted keys, each pairing once, no floats.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("plain data serializes")
    }

    /// Next edge in the wheel: leave through the face opposite c.
    fn wheel_next(&self, (t, a, b): OrientedEdge) -> Option<OrientedEdge> {
        let (c, _) = completion(a, b);
        self.glue[t][c].map(|(t2, _, p)| (t2, p[a], p[b]))
    }

    fn wheel_prev(&self, (t, a, b): OrientedEdge) -> Option<OrientedEdge> {
        let (_, d) = completion(a, b);
        self.glue[t][d].map(|(t2, _, p)| (t2, p[a], p[b]))
    }

    fn build_wheels(&mut self) {
        for t in 0..self.n {
            for e in 0..12 {
                if self.wheel_of[12 * t + e] != usize::MAX {
                    continue;
                }
                let (a, b) = edge_at(e);
                let start = (t, a, b);
                // walk back to a boundary end, if any
                let mut first = start;
                let mut closed = true;
                while let Some(p) = self.wheel_prev(first) {
                    if p == start {
                        break;
                    }
                    first = p;
                }
                if self.wheel_prev(first).is_none() {
                    closed = false;
                }
                let first = if closed { start } else { first };
                let mut edges = vec![first];
                let mut cur = first;
                while let Some(nx) = self.wheel_next(cur) {
                    if nx == first {
                        break;
                    }
                    edges.push(nx);
                    cur = nx;
                }
                let id = self.wheels.len();
                for &(t2, a2, b2) in &edges {
                    self.wheel_of[12 * t2 + edge_index(a2, b2)] = id;
                }
                self.wheels.push(Wheel { edges, closed });
            }
        }
    }

    fn build_vertex_classes(&mut self) {
        let mut parent: Vec<usize> = (0..4 * self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for t in 0..self.n {
            for f in 0..4 {
                if let Some((t2, _, p)) = self.glue[t][f] {
                    for a in (0..4).filter(|&a| a != f) {
                        let (x, y) = (find(&mut parent, 4 * t + a), find(&mut parent, 4 * t2 + p[a]));
                        if x != y {
                            parent[x.max(y)] = x.min(y);
                        }
                    }
                }
            }
        }
        let mut classes: Vec<Vec<(usize, usize)>> = vec![];
        let mut root_ids: std::collections::BTreeMap<usize, usize> = Default::default();
        for c in 0..4 * self.n {
            let r = find(&mut parent, c);
            let id = *root_ids.entry(r).or_insert_with(|| {
                classes.push(vec![]);
                classes.len() - 1
            });
            classes[id].push((c / 4, c % 4));
        }
        self.vertex_classes = classes;
    }

    /// Oriented wheels; every oriented edge lies in exactly one.
    pub fn oriented_wheels(&self) -> &[Wheel] {
        &self.wheels
    }

    pub fn wheel_id(&self, t: usize, a: usize, b: usize) -> usize {
        self.wheel_of[12 * t + edge_index(a, b)]
    }

    /// Unoriented edge classes, each represented by the oriented wheel of its
    /// lexicographically first oriented edge.
    pub fn edge_classes(&self) -> Vec<usize> {
        let mut reps = vec![];
        let mut seen = vec![false; self.wheels.len()];
        for (w, wheel) in self.wheels.iter().enumerate() {
            if seen[w] {
                continue;
            }
            let (t, a, b) = wheel.edges[0];
            let rev = self.wheel_id(t, b, a);
            seen[w] = true;
            seen[rev] = true;
            reps.push(w);
        }
        reps
    }

    pub fn edge_wheel(&self, wheel: usize) -> Result<&Wheel, ComplexError> {
        let w = &self.wheels[wheel];
        if w.closed {
            Ok(w)
        } else {
            Err(ComplexError::BoundaryEdge(wheel))
        }
    }

    pub fn vertex_classes(&self) -> &[Vec<(usize, usize)>] {
        &self.vertex_classes
    }

    pub fn links(&self) -> &[LinkSurface] {
        &self.links
    }

    /// Vertex class containing corner (t, a).
    pub fn vertex_class_of(&self, t: usize, a: usize) -> usize {
        self.vertex_classes.iter().position(|c| c.contains(&(t, a))).expect("every corner has a class")
    }
}

/// Display label like "z12" for a 0-based oriented edge, with tetrahedra
/// lettered z, w, then t2, t3, ...
pub fn edge_label(t: usize, a: usize, b: usize) -> String {
    let name = match t {
        0 => "z".to_string(),
        1 => "w".to_string(),
        _ => format!("t{t}_"),
    };
    format!("{name}{}{}", a + 1, b + 1)
}

#[cfg(test)]
mod tests;
