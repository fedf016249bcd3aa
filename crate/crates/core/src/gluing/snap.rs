use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::arith::Scalar;

use super::{Decoration, EquationSystem};

/// Candidate fields ℚ(√m) for exact recognition: the ω-family and the √−7 family.
pub const SNAP_FIELDS: [i64; 2] = [-3, -7];

/// Best rational approximation with denominator at most `max_den` (continued fractions).
fn rational_near(x: f64, max_den: i64) -> Option<(i64, i64)> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let (p2, q2) = (a as i64 * p1 + p0, a as i64 * q1 + q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    (q1 != 0).then_some((p1, q1))
}

/// a + b√m within `tol` of z with denominators ≤ `max_den`, if any.
pub fn snap_scalar(z: Complex64, m: i64, max_den: i64, tol: f64) -> Option<Scalar> {
    debug_assert!(m < 0);
    let r = ((-m) as f64).sqrt();
    let (an, ad) = rational_near(z.re, max_den)?;
    let (bn, bd) = rational_near(z.im / r, max_den)?;
    let approx = Complex64::new(an as f64 / ad as f64, bn as f64 / bd as f64 * r);
    if (approx - z).norm() > tol {
        return None;
    }
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    Scalar::quad(q(an, ad), q(bn, bd), m).ok()
}

/// Recognize every shape in one candidate field and keep the result only if
/// it satisfies every equation exactly.
pub fn snap_decoration(sys: &EquationSystem, shapes: &[[Complex64; 4]], tol: f64) -> Option<Decoration> {
    for m in SNAP_FIELDS {
        let exact: Option<Vec<[Scalar; 4]>> = shapes
            .iter()
            .map(|s| {
                let v: Option<Vec<Scalar>> = s.iter().map(|&z| snap_scalar(z, m, 1000, tol)).collect();
                v.map(|v| [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])
            })
            .collect();
        let Some(exact) = exact else { continue };
        let Ok(dec) = Decoration::new(exact) else { continue };
        if sys.holds_exactly(&dec) == Ok(true) {
            return Some(dec);
        }
    }
    None
}
