use num_complex::Complex64;

use crate::arith::{rat, Scalar};

use super::Decoration;

/// A named exact solution of the figure-eight equations.
#[derive(Clone, Debug)]
pub struct StandardStructure {
    pub name: &'static str,
    pub decoration: Decoration,
}

fn sqrt7(a: i64, b: i64, d: i64) -> Scalar {
    Scalar::quad(rat(a, d), rat(b, d), -7).expect("-7 is not a square")
}

/// The unipotent structures listed for the figure-eight knot complement:
/// the hyperbolic one and three spherical CR ones.
pub fn figure_eight_standard_structures() -> Vec<StandardStructure> {
    let w = Scalar::omega();
    let wb = w.conj();
    let p = sqrt7;
    let list = [
        ("hyperbolic", [[w.clone(), w.clone(), w.clone(), w.clone()], [w.clone(), w.clone(), w.clone(), w.clone()]]),
        ("cr-omega", [[w.clone(), wb.clone(), w.clone(), wb.clone()], [w.clone(), wb.clone(), w.clone(), wb]]),
        (
            "cr-sqrt7-a",
            [[p(5, -1, 4), p(3, -1, 8), p(5, 1, 4), p(3, 1, 8)], [p(3, -1, 8), p(5, -1, 4), p(3, 1, 8), p(5, 1, 4)]],
        ),
        (
            "cr-sqrt7-b",
            [[p(-1, 1, 4), p(3, -1, 2), p(-1, -1, 4), p(3, 1, 2)], [p(3, 1, 2), p(-1, -1, 4), p(3, -1, 2), p(-1, 1, 4)]],
        ),
    ];
    list.into_iter()
        .map(|(name, s)| StandardStructure { name, decoration: Decoration::new(s.to_vec()).expect("generic shapes") })
        .collect()
}

/// Index of the standard structure within `radius` of the shapes, and whether
/// it matched the complex conjugate.
pub fn classify_figure_eight(shapes: &[[Complex64; 4]], radius: f64) -> Option<(usize, bool)> {
    let close = |d: &Decoration| {
        d.to_c64().iter().flatten().zip(shapes.iter().flatten()).all(|(a, b)| (a - b).norm() < radius)
    };
    for (i, s) in figure_eight_standard_structures().iter().enumerate() {
        if close(&s.decoration) {
            return Some((i, false));
        }
        if close(&s.decoration.conj()) {
            return Some((i, true));
        }
    }
    None
}
