//! Shared fixtures for unit tests.

use crate::arith::{rat, Scalar};

pub const FIG8_JSON: &str = include_str!("../examples/data/fig8.json");

fn sqrt7(a: (i64, i64), b: (i64, i64)) -> Scalar {
    Scalar::quad(rat(a.0, a.1), rat(b.0, b.1), -7).unwrap()
}

/// The three standard figure-eight solutions, tetrahedron z then w.
pub fn fig8_solutions() -> Vec<[[Scalar; 4]; 2]> {
    let w = Scalar::omega();
    let p = |a: i64, b: i64, d: i64| sqrt7((a, d), (b, d));
    vec![
        [[w.clone(), w.clone(), w.clone(), w.clone()], [w.clone(), w.clone(), w.clone(), w]],
        [
            [p(5, -1, 4), p(3, -1, 8), p(5, 1, 4), p(3, 1, 8)],
            [p(3, -1, 8), p(5, -1, 4), p(3, 1, 8), p(5, 1, 4)],
        ],
        [
            [p(-1, 1, 4), p(3, -1, 2), p(-1, -1, 4), p(3, 1, 2)],
            [p(3, 1, 2), p(-1, -1, 4), p(3, -1, 2), p(-1, 1, 4)],
        ],
    ]
}
