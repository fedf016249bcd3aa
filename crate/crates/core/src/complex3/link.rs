use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::flags::completion;

use super::{edge_at, edge_index, TriangulationComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Sphere,
    Torus,
    Annulus,
    /// A single piece of the boundary surface, e.g. a corner of an unglued tetrahedron.
    Disc,
    Other { euler: i64, has_boundary: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkSurface {
    pub vertex_class: usize,
    /// One triangle per tetrahedron corner (t, a).
    pub corners: Vec<(usize, usize)>,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub euler: i64,
    pub has_boundary: bool,
    pub kind: LinkKind,
}

/// Side (t, a, f) of the link triangle at corner (t, a): the trace of face f.
pub type Side = (usize, usize, usize);

pub(super) fn side_rep(cx: &TriangulationComplex, (t, a, f): Side) -> Side {
    match cx.glued(t, f) {
        Some((t2, f2, p)) => (t, a, f).min((t2, p[a], f2)),
        None => (t, a, f),
    }
}

pub(super) fn build_links(cx: &TriangulationComplex) -> Vec<LinkSurface> {
    let mut out = vec![];
    for (id, corners) in cx.vertex_classes().iter().enumerate() {
        let mut verts = std::collections::BTreeSet::new();
        let mut sides = std::collections::BTreeSet::new();
        let mut has_boundary = false;
        for &(t, a) in corners {
            for v in (0..4).filter(|&v| v != a) {
                verts.insert(cx.wheel_id(t, a, v));
                sides.insert(side_rep(cx, (t, a, v)));
                has_boundary |= cx.glued(t, v).is_none();
            }
        }
        let euler = verts.len() as i64 - sides.len() as i64 + corners.len() as i64;
        let kind = match (has_boundary, euler) {
            (false, 2) => LinkKind::Sphere,
            (false, 0) => LinkKind::Torus,
            (true, 0) => LinkKind::Annulus,
            (true, 1) => LinkKind::Disc,
            _ => LinkKind::Other { euler, has_boundary },
        };
        out.push(LinkSurface {
            vertex_class: id,
            corners: corners.clone(),
            num_vertices: verts.len(),
            num_edges: sides.len(),
            euler,
            has_boundary,
            kind,
        });
    }
    out
}

/// The cell decompositions 𝒟 and 𝒟′ of all links, over the whole complex.
///
/// 1-cells of 𝒟 are c_ab for every oriented edge (t, a, b), indexed
/// 12 t + edge_index(a, b); c_ab runs from the side opposite d to the side
/// opposite c, (c, d) = completion(a, b). The dual edge c′_ab runs from the
/// centre of triangle (t, a) to the link vertex of the edge ab, with
/// ι(c_x, c′_x) = 1.
#[derive(Clone, Debug)]
pub struct CellData {
    pub sides: Vec<Side>,
    /// ∂: 1-chains → 0-chains, sides × edges.
    pub boundary: DMatrix<i64>,
    /// 2-cells as columns: corner triangles, then closed wheels.
    pub two_cells: DMatrix<i64>,
    /// Chain map 𝒟 → 𝒟′ on 1-chains (c′ coordinates × c coordinates).
    pub phi: DMatrix<i64>,
}

impl TriangulationComplex {
    pub fn cell_data(&self) -> CellData {
        let n = self.num_tetrahedra();
        let ne = 12 * n;
        let mut side_list: Vec<Side> = vec![];
        for t in 0..n {
            for a in 0..4 {
                for f in (0..4).filter(|&f| f != a) {
                    side_list.push(side_rep(self, (t, a, f)));
                }
            }
        }
        side_list.sort();
        side_list.dedup();
        let side_idx: BTreeMap<Side, usize> = side_list.iter().enumerate().map(|(i, s)| (*s, i)).collect();

        let mut boundary = DMatrix::<i64>::zeros(side_list.len(), ne);
        for x in 0..ne {
            let (t, (a, b)) = (x / 12, edge_at(x % 12));
            let (c, d) = completion(a, b);
            boundary[(side_idx[&side_rep(self, (t, a, d))], x)] -= 1;
            boundary[(side_idx[&side_rep(self, (t, a, c))], x)] += 1;
        }

        let mut cols: Vec<Vec<i64>> = vec![];
        for t in 0..n {
            for a in 0..4 {
                let mut v = vec![0; ne];
                for b in (0..4).filter(|&b| b != a) {
                    v[12 * t + edge_index(a, b)] += 1;
                }
                cols.push(v);
            }
        }
        for w in self.oriented_wheels().iter().filter(|w| w.closed) {
            let mut v = vec![0; ne];
            for &(t, a, b) in &w.edges {
                v[12 * t + edge_index(a, b)] += 1;
            }
            cols.push(v);
        }
        let two_cells = DMatrix::from_fn(ne, cols.len(), |r, c| cols[c][r]);

        let mut phi = DMatrix::<i64>::zeros(ne, ne);
        for x in 0..ne {
            let (t, (a, b)) = (x / 12, edge_at(x % 12));
            let (c, d) = completion(a, b);
            for (k, v) in self.path_from_side_image(t, a, d) {
                phi[(k, x)] += v;
            }
            for (k, v) in self.path_from_side_image(t, a, c) {
                phi[(k, x)] -= v;
            }
        }
        CellData { sides: side_list, boundary, two_cells, phi }
    }

    /// 𝒟′-path from the image of side (t, a, f), the centre of its
    /// representative triangle, to the centre of (t, a).
    fn path_from_side_image(&self, t: usize, a: usize, f: usize) -> Vec<(usize, i64)> {
        let rep = side_rep(self, (t, a, f));
        if (rep.0, rep.1) == (t, a) {
            return vec![];
        }
        let (t2, _, p) = self.glued(t, f).expect("non-trivial representative implies a gluing");
        // through the link vertex of the smallest remaining vertex of the face
        let b = (0..4).find(|&v| v != a && v != f).unwrap();
        vec![(12 * t2 + edge_index(p[a], p[b]), 1), (12 * t + edge_index(a, b), -1)]
    }
}
