//! Coordinate-change matrices between the projective frames attached to
//! corners of faces, path holonomy, and the peripheral eigenvalues.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{Field, Scalar};
use crate::complex3::{edge_label, ComplexError, LinkKind, LinkPath, MoveKind, TriangulationComplex};
use crate::flags::{completion, ZCoords};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HolonomyError {
    #[error("triple ratio 0 has no coordinate change")]
    InvalidTripleRatio,
    #[error("edge coordinate 0 has no coordinate change")]
    InvalidShape,
    #[error("path steps back over its previous move")]
    Backtracking,
    #[error("coordinate hits 0 or infinity along the path")]
    PoleEncountered,
    #[error("decoration has {got} tetrahedra, complex has {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A 3×3 matrix standing for its class in PGL(3).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjMatrix<F> {
    pub m: [[F; 3]; 3],
}

impl<F: Field> ProjMatrix<F> {
    pub fn identity() -> Self {
        Self::diag(F::one(), F::one(), F::one())
    }

    pub fn diag(a: F, b: F, c: F) -> Self {
        let o = || F::zero();
        ProjMatrix { m: [[a, o(), o()], [o(), b, o()], [o(), o(), c]] }
    }

    pub fn det(&self) -> F {
        let m = &self.m;
        let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
            m[r1][c1].clone() * m[r2][c2].clone() - m[r1][c2].clone() * m[r2][c1].clone()
        };
        m[0][0].clone() * minor(1, 2, 1, 2) - m[0][1].clone() * minor(1, 2, 0, 2) + m[0][2].clone() * minor(1, 2, 0, 1)
    }

    /// Adjugate; an inverse up to scale.
    pub fn adjugate(&self) -> Self {
        let m = &self.m;
        let c = |r: usize, s: usize| {
            let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
            let (s1, s2) = ((s + 1) % 3, (s + 2) % 3);
            m[r1][s1].clone() * m[r2][s2].clone() - m[r1][s2].clone() * m[r2][s1].clone()
        };
        ProjMatrix { m: std::array::from_fn(|i| std::array::from_fn(|j| c(j, i))) }
    }

    pub fn diagonal(&self) -> [F; 3] {
        std::array::from_fn(|i| self.m[i][i].clone())
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.m[1][0].is_zero() && self.m[2][0].is_zero() && self.m[2][1].is_zero()
    }

    /// The scalar r with other = r · self, if the two are proportional.
    pub fn proportional(&self, other: &Self) -> Option<F> {
        let (pi, pj) = (0..9).map(|n| (n / 3, n % 3)).find(|&(i, j)| !self.m[i][j].is_zero())?;
        let r = other.m[pi][pj].clone() / self.m[pi][pj].clone();
        for i in 0..3 {
            for j in 0..3 {
                if other.m[i][j] != r.clone() * self.m[i][j].clone() {
                    return None;
                }
            }
        }
        Some(r)
    }

    pub fn to_c64(&self) -> ProjMatrix<Complex64> {
        ProjMatrix { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].to_c64())) }
    }
}

impl ProjMatrix<Complex64> {
    /// Divided by its entry of largest modulus.
    pub fn normalized(&self) -> Self {
        let mut best = Complex64::new(0.0, 0.0);
        for row in &self.m {
            for v in row {
                if v.norm() > best.norm() {
                    best = *v;
                }
            }
        }
        ProjMatrix { m: self.m.map(|row| row.map(|v| v / best)) }
    }

    /// Distance between the normalized representatives, after matching phases.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        let (a, b) = (self.normalized(), other.normalized());
        // both have an entry of modulus 1 at possibly different places; align on a's pivot
        let (pi, pj) = (0..9)
            .map(|n| (n / 3, n % 3))
            .max_by(|&(i, j), &(k, l)| a.m[i][j].norm().total_cmp(&a.m[k][l].norm()))
            .unwrap();
        if b.m[pi][pj].norm() == 0.0 {
            return f64::INFINITY;
        }
        let r = a.m[pi][pj] / b.m[pi][pj];
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((a.m[i][j] - r * b.m[i][j]).norm());
            }
        }
        d
    }

    /// Largest modulus below the diagonal relative to the largest entry.
    pub fn lower_residue(&self) -> f64 {
        let n = self.normalized();
        n.m[1][0].norm().max(n.m[2][0].norm()).max(n.m[2][1].norm())
    }
}

impl<F: Field> Mul for &ProjMatrix<F> {
    type Output = ProjMatrix<F>;
    fn mul(self, rhs: &ProjMatrix<F>) -> ProjMatrix<F> {
        ProjMatrix {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    (0..3).fold(F::zero(), |acc, k| acc + self.m[i][k].clone() * rhs.m[k][j].clone())
                })
            }),
        }
    }
}

/// Change from the frame of (1, 2, 3) to that of (2, 3, 1) for a face with triple ratio X.
pub fn t_matrix<F: Field>(x: &F) -> Result<ProjMatrix<F>, HolonomyError> {
    if x.is_zero() {
        return Err(HolonomyError::InvalidTripleRatio);
    }
    let (o, one) = (F::zero(), F::one());
    Ok(ProjMatrix {
        m: [
            [x.clone(), x.clone() + one.clone(), one],
            [-x.clone(), -x.clone(), o.clone()],
            [x.clone(), o.clone(), o],
        ],
    })
}

/// diag(1/z_ji, 1, z_ij): from the frame (i, j, k) to (i, j, l).
pub fn e_matrix<F: Field>(zij: &F, zji: &F) -> Result<ProjMatrix<F>, HolonomyError> {
    if zij.is_zero() || zji.is_zero() {
        return Err(HolonomyError::InvalidShape);
    }
    Ok(ProjMatrix::diag(zji.inv(), F::one(), zij.clone()))
}

/// One elementary coordinate change inside a tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Letter {
    /// Cyclic rotation inside the face (i, j, k), read in that orientation.
    T { tet: usize, i: usize, j: usize, k: usize },
    /// Crossing the tetrahedron around the edge (i, j).
    E { tet: usize, i: usize, j: usize },
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::T { tet, i, j, k } => {
                let e = edge_label(tet, i, j);
                write!(f, "T({e}{})", k + 1)
            }
            Letter::E { tet, i, j } => write!(f, "E({})", edge_label(tet, i, j)),
        }
    }
}

/// A path compiled to elementary letters, in path order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HolonomyWord {
    pub letters: Vec<Letter>,
}

impl fmt::Display for HolonomyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", s.join(" "))
    }
}

/// L(ij) is the single letter E(ij); R(ij), from (i, l, j) to (i, k, j), is
/// T(ilj) T(lji) E(ji) T(jik).
pub fn compile(path: &LinkPath) -> HolonomyWord {
    let mut letters = vec![];
    for m in &path.moves {
        let (t, i, j) = (m.tet, m.a, m.b);
        match m.kind {
            MoveKind::L => letters.push(Letter::E { tet: t, i, j }),
            MoveKind::R => {
                let (k, l) = completion(i, j);
                letters.push(Letter::T { tet: t, i, j: l, k: j });
                letters.push(Letter::T { tet: t, i: l, j, k: i });
                letters.push(Letter::E { tet: t, i: j, j: i });
                letters.push(Letter::T { tet: t, i: j, j: i, k });
            }
        }
    }
    HolonomyWord { letters }
}

pub fn letter_matrix<F: Field>(z: &[ZCoords<F>], letter: &Letter) -> Result<ProjMatrix<F>, HolonomyError> {
    match *letter {
        Letter::T { tet, i, j, k } => t_matrix(&z[tet].face(i, j, k)),
        Letter::E { tet, i, j } => e_matrix(z[tet].edge(i, j), z[tet].edge(j, i)),
    }
}

/// Left-multiplies the letter matrices in path order.
pub fn evaluate_word<F: Field>(z: &[ZCoords<F>], word: &HolonomyWord) -> Result<ProjMatrix<F>, HolonomyError> {
    let mut h = ProjMatrix::identity();
    for l in &word.letters {
        h = &letter_matrix(z, l)? * &h;
    }
    if h.det().is_zero() {
        return Err(HolonomyError::PoleEncountered);
    }
    Ok(h)
}

fn check_path(cx: &TriangulationComplex, z_len: usize, path: &LinkPath) -> Result<(), HolonomyError> {
    if z_len != cx.num_tetrahedra() {
        return Err(HolonomyError::SizeMismatch { got: z_len, want: cx.num_tetrahedra() });
    }
    for w in path.moves.windows(2) {
        if w[0].flipped() == w[1] {
            return Err(HolonomyError::Backtracking);
        }
    }
    path.validate(cx)?;
    Ok(())
}

pub fn path_holonomy<F: Field>(
    cx: &TriangulationComplex,
    z: &[ZCoords<F>],
    path: &LinkPath,
) -> Result<ProjMatrix<F>, HolonomyError> {
    check_path(cx, z.len(), path)?;
    evaluate_word(z, &compile(path))
}

/// (C, C*) of a path: the last diagonal entry and the reciprocal of the
/// first, in closed form.
pub fn eigenvalue_pair<F: Field>(z: &[ZCoords<F>], path: &LinkPath) -> Result<(F, F), HolonomyError> {
    let (mut c, mut cs) = (F::one(), F::one());
    for m in &path.moves {
        let zt = &z[m.tet];
        let (i, j) = (m.a, m.b);
        let (zij, zji) = (zt.edge(i, j).clone(), zt.edge(j, i).clone());
        if zij.is_zero() || zji.is_zero() {
            return Err(HolonomyError::PoleEncountered);
        }
        match m.kind {
            MoveKind::L => {
                c = c * zij;
                cs = cs * zji;
            }
            MoveKind::R => {
                let (k, l) = completion(i, j);
                c = c / zij;
                cs = cs / (zji * zt.face(i, l, j) * zt.face(i, j, k));
            }
        }
    }
    Ok((c, cs))
}

/// Peripheral data of one torus link: basis words and A = C(a), A* = C*(a),
/// B = C(b), B* = C*(b).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusInvariants {
    pub link: usize,
    pub a_path: String,
    pub b_path: String,
    pub a: Scalar,
    pub a_star: Scalar,
    pub b: Scalar,
    pub b_star: Scalar,
}

impl TorusInvariants {
    pub fn as_array(&self) -> [Scalar; 4] {
        [self.a.clone(), self.a_star.clone(), self.b.clone(), self.b_star.clone()]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PeripheralInvariants {
    pub tori: Vec<TorusInvariants>,
    /// Links other than spheres and tori are listed but carry no eigenvalues.
    pub skipped_links: Vec<usize>,
}

pub fn peripheral_invariants(
    cx: &TriangulationComplex,
    z: &[ZCoords<Scalar>],
) -> Result<PeripheralInvariants, HolonomyError> {
    if z.len() != cx.num_tetrahedra() {
        return Err(HolonomyError::SizeMismatch { got: z.len(), want: cx.num_tetrahedra() });
    }
    let mut out = PeripheralInvariants::default();
    for (id, l) in cx.links().iter().enumerate() {
        match l.kind {
            LinkKind::Sphere => {}
            LinkKind::Torus => {
                let (pa, pb) = cx.link_homology_basis(id)?;
                let (a, a_star) = eigenvalue_pair(z, &pa)?;
                let (b, b_star) = eigenvalue_pair(z, &pb)?;
                out.tori.push(TorusInvariants {
                    link: id,
                    a_path: pa.to_string(),
                    b_path: pb.to_string(),
                    a,
                    a_star,
                    b,
                    b_star,
                });
            }
            _ => out.skipped_links.push(id),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
