//! Pre-Bloch elements, the volume, the wedge invariant and the W-invariants.

mod wedge;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{bloch_wigner, Field, Scalar};
use crate::flags::{boundary_face, ACoordinates, FlagTetrahedron};

pub use wedge::Wedge;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BlochError {
    #[error("support point is not rational")]
    NonRationalSupport,
    #[error("zero argument in a wedge")]
    ZeroArgument,
    #[error("five-term relation degenerates for these arguments")]
    DegenerateFiveTerm,
    #[error("support point equal to 0 or 1")]
    InvalidPoint,
    #[error("pairing matrix is not skew-symmetric")]
    NotSkew,
    #[error("pairing has odd coefficients before halving")]
    OddPairing,
    #[error("family has fewer than 3 members")]
    FamilyTooShort,
}

/// Formal ℤ-combination of points of k \ {0, 1}.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PreBloch {
    terms: Vec<PreBlochTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct PreBlochTerm {
    point: Scalar,
    coeff: i64,
}

impl PreBloch {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn point(z: Scalar) -> Result<Self, BlochError> {
        let mut p = Self::zero();
        p.push(z, 1)?;
        Ok(p)
    }

    pub fn push(&mut self, z: Scalar, n: i64) -> Result<(), BlochError> {
        if z.is_zero() || z.is_one() {
            return Err(BlochError::InvalidPoint);
        }
        if let Some(pos) = self.terms.iter().position(|t| t.point == z) {
            self.terms[pos].coeff += n;
            if self.terms[pos].coeff == 0 {
                self.terms.remove(pos);
            }
        } else if n != 0 {
            self.terms.push(PreBlochTerm { point: z, coeff: n });
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Scalar, i64)> {
        self.terms.iter().map(|t| (&t.point, t.coeff))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PreBloch) -> PreBloch {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.point.clone(), t.coeff).expect("points already valid");
        }
        out
    }

    pub fn scale(&self, k: i64) -> PreBloch {
        let mut out = PreBloch::zero();
        for t in &self.terms {
            out.push(t.point.clone(), t.coeff * k).expect("points already valid");
        }
        out
    }
}

/// β(T) = [z₁₂] + [z₂₁] + [z₃₄] + [z₄₃].
pub fn beta(t: &FlagTetrahedron) -> PreBloch {
    beta_of_shapes(&[t.shapes()])
}

/// β summed over tetrahedra given by their four shape coordinates.
pub fn beta_of_shapes(shapes: &[[Scalar; 4]]) -> PreBloch {
    let mut out = PreBloch::zero();
    for s in shapes {
        for z in s {
            out.push(z.clone(), 1).expect("shape coordinates avoid 0 and 1");
        }
    }
    out
}

/// ¼ Σ nᵢ D(xᵢ).
pub fn volume(x: &PreBloch) -> f64 {
    x.terms().map(|(z, n)| n as f64 * bloch_wigner(z.to_c64())).sum::<f64>() / 4.0
}

/// [x] − [y] + [y/x] − [(1−x⁻¹)/(1−y⁻¹)] + [(1−x)/(1−y)].
pub fn five_term(x: &Scalar, y: &Scalar) -> Result<PreBloch, BlochError> {
    let one = Scalar::int(1);
    let bad = |z: &Scalar| z.is_zero() || z.is_one();
    if bad(x) || bad(y) || x == y {
        return Err(BlochError::DegenerateFiveTerm);
    }
    let pts = [
        (x.clone(), 1),
        (y.clone(), -1),
        (y.clone() / x.clone(), 1),
        ((one.clone() - x.inv()) / (one.clone() - y.inv()), -1),
        ((one.clone() - x.clone()) / (one - y.clone()), 1),
    ];
    if pts.iter().any(|(z, _)| bad(z)) {
        return Err(BlochError::DegenerateFiveTerm);
    }
    let mut out = PreBloch::zero();
    for (z, n) in pts {
        out.push(z, n)?;
    }
    Ok(out)
}

/// δ[z] = z ∧ (1 − z), over rational support.
pub fn delta(x: &PreBloch) -> Result<Wedge, BlochError> {
    let mut acc = Wedge::zero();
    for (z, n) in x.terms() {
        let w = Wedge::from_scalars(z, &(Scalar::int(1) - z.clone()))?;
        acc += &w.scale(n);
    }
    Ok(acc)
}

/// a_ijk ∧ (a_ki a_jk a_ij)/(a_ik a_kj a_ji) + a_ij∧a_ik + a_ki∧a_kj + a_jk∧a_ji.
pub fn w_face(a: &ACoordinates, i: usize, j: usize, k: usize) -> Result<Wedge, BlochError> {
    let e = |p: usize, q: usize| a.edge(p, q).clone();
    let ratio = (e(k, i) * e(j, k) * e(i, j)) / (e(i, k) * e(k, j) * e(j, i));
    Ok(Wedge::from_scalars(&a.face(i, j, k), &ratio)?
        + Wedge::from_scalars(&e(i, j), &e(i, k))?
        + Wedge::from_scalars(&e(k, i), &e(k, j))?
        + Wedge::from_scalars(&e(j, k), &e(j, i))?)
}

/// W(T): sum of w_face over the four boundary-oriented faces.
pub fn w_tetrahedron(a: &ACoordinates) -> Result<Wedge, BlochError> {
    let mut acc = Wedge::zero();
    for l in 0..4 {
        let (i, j, k) = boundary_face(l);
        acc += &w_face(a, i, j, k)?;
    }
    Ok(acc)
}

/// Skew integer matrix defining ½ v ∧_ε v.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingSpec {
    eps: Vec<Vec<i64>>,
}

impl PairingSpec {
    pub fn new(eps: Vec<Vec<i64>>) -> Result<Self, BlochError> {
        let n = eps.len();
        if eps.iter().any(|r| r.len() != n) {
            return Err(BlochError::NotSkew);
        }
        for a in 0..n {
            for b in 0..n {
                if eps[a][b] != -eps[b][a] {
                    return Err(BlochError::NotSkew);
                }
            }
        }
        Ok(PairingSpec { eps })
    }

    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    pub fn entry(&self, a: usize, b: usize) -> i64 {
        self.eps[a][b]
    }
}

/// ½ Σ_{α,β} ε_{αβ} v_α ∧ v_β.
pub fn pairing_wedge(values: &[Scalar], spec: &PairingSpec) -> Result<Wedge, BlochError> {
    assert_eq!(values.len(), spec.dim(), "value vector does not match pairing");
    let mut full = Wedge::zero();
    for a in 0..values.len() {
        for b in 0..values.len() {
            let c = spec.eps[a][b];
            if c != 0 {
                full += &Wedge::from_scalars(&values[a], &values[b])?.scale(c);
            }
        }
    }
    full.halve().ok_or(BlochError::OddPairing)
}

/// Im(dlog ∧ log)(f ∧ g) = Im(log|g| dlog f − log|f| dlog g).
pub fn im_dlog_log(f: Complex64, dlog_f: Complex64, g: Complex64, dlog_g: Complex64) -> f64 {
    (g.norm().ln() * dlog_f - f.norm().ln() * dlog_g).im
}

/// dD(z)[dz] = −Im(dlog ∧ log)(z ∧ (1 − z)).
pub fn d_bloch_wigner(z: Complex64, dz: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    -im_dlog_log(z, dz / z, one - z, -dz / (one - z))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariationReport {
    /// Central differences of the volume, one per interior member.
    pub dvol: Vec<f64>,
    /// The peripheral 1-form evaluated on the same steps.
    pub formula: Vec<f64>,
    pub max_abs_deviation: f64,
    pub max_rel_deviation: f64,
}

/// Compare ΔVol with (1/12) Im(dlog∧log)(2A∧B + 2A*∧B* + A*∧B + A∧B*)
/// along a family; `invariants[n] = [A, A*, B, B*]` for member n.
pub fn volume_variation_check(vols: &[f64], invariants: &[[Complex64; 4]]) -> Result<VariationReport, BlochError> {
    if vols.len() < 3 || vols.len() != invariants.len() {
        return Err(BlochError::FamilyTooShort);
    }
    let mut dvol = vec![];
    let mut formula = vec![];
    for n in 1..vols.len() - 1 {
        dvol.push((vols[n + 1] - vols[n - 1]) / 2.0);
        let [a, as_, b, bs] = invariants[n];
        let dl = |k: usize| (invariants[n + 1][k] / invariants[n - 1][k]).ln() / 2.0;
        let (da, das, db, dbs) = (dl(0), dl(1), dl(2), dl(3));
        let v = 2.0 * im_dlog_log(a, da, b, db)
            + 2.0 * im_dlog_log(as_, das, bs, dbs)
            + im_dlog_log(as_, das, b, db)
            + im_dlog_log(a, da, bs, dbs);
        formula.push(v / 12.0);
    }
    let scale = dvol.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let max_abs = dvol.iter().zip(&formula).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let max_rel = if scale > 0.0 { max_abs / scale } else { max_abs };
    Ok(VariationReport { dvol, formula, max_abs_deviation: max_abs, max_rel_deviation: max_rel })
}
