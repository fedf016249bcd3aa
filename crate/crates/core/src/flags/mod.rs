//! Flags in the projective plane and coordinates of tetrahedra of flags.
//!
//! Vertices are 0-based throughout; (i, j, k, l) always denotes an even
//! permutation of (0, 1, 2, 3) as produced by [`completion`].

mod zcoords;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{Field, Scalar};

pub use zcoords::{
    all_perms, boundary_face, completion, even_face, even_perms, is_odd, opposite, ZCoords, SHAPE_EDGES,
};

pub type Vec3 = [Scalar; 3];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlagError {
    #[error("configuration is not generic")]
    DegenerateConfiguration,
    #[error("shape parameter equal to 0 or 1")]
    InvalidShape,
    #[error("point is not on the null cone of the Hermitian form")]
    NotOnSphere,
    #[error("sigma undefined: a face triple ratio equals -1")]
    SigmaUndefined,
    #[error("covector does not vanish on the point")]
    NotIncident,
    #[error("zero vector or covector")]
    ZeroVector,
}

/// Relative threshold for floating genericity tests.
const GENERIC_TOL: f64 = 1e-10;
const INCIDENCE_TOL: f64 = 1e-12;

fn norm(v: &Vec3) -> f64 {
    v.iter().map(|s| s.to_c64().norm_sqr()).sum::<f64>().sqrt()
}

/// Exact zero test for exact scalars, relative one for floats.
fn negligible(v: &Scalar, scale: f64, tol: f64) -> bool {
    if v.is_exact() {
        v.is_zero()
    } else {
        v.to_c64().norm() <= tol * scale
    }
}

pub fn pair(f: &Vec3, x: &Vec3) -> Scalar {
    f[0].clone() * x[0].clone() + f[1].clone() * x[1].clone() + f[2].clone() * x[2].clone()
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    let c = |i: usize, j: usize| a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone();
    [c(1, 2), c(2, 0), c(0, 1)]
}

pub fn det3(a: &Vec3, b: &Vec3, c: &Vec3) -> Scalar {
    pair(&cross(a, b), c)
}

/// A point of P² with a line through it, stored by representatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub x: Vec3,
    pub f: Vec3,
}

impl Flag {
    pub fn new(x: Vec3, f: Vec3) -> Result<Self, FlagError> {
        let (nx, nf) = (norm(&x), norm(&f));
        if nx == 0.0 || nf == 0.0 {
            return Err(FlagError::ZeroVector);
        }
        if !negligible(&pair(&f, &x), nx * nf, INCIDENCE_TOL) {
            return Err(FlagError::NotIncident);
        }
        Ok(Flag { x, f })
    }

    /// Image under g ∈ GL(3): x ↦ gx, f ↦ f·adj(g) (proportional to f g⁻¹).
    pub fn transform(&self, g: &[Vec3; 3]) -> Flag {
        let x = std::array::from_fn(|r| pair(&g[r], &self.x));
        // adj(g) rows are cross products of columns of g
        let col = |c: usize| -> Vec3 { std::array::from_fn(|r| g[r][c].clone()) };
        let adj_cols = [cross(&col(1), &col(2)), cross(&col(2), &col(0)), cross(&col(0), &col(1))];
        // (f·adj g)_c = Σ_r f_r adj[r][c], and adj[r][c] = adj_cols[r][c]
        let f = std::array::from_fn(|c| {
            (0..3).fold(Scalar::int(0), |acc, r| acc + self.f[r].clone() * adj_cols[r][c].clone())
        });
        Flag { x, f }
    }
}

/// A vector with an annihilating covector, scales retained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFlag {
    pub x: Vec3,
    pub f: Vec3,
}

impl AffineFlag {
    pub fn new(x: Vec3, f: Vec3) -> Result<Self, FlagError> {
        let fl = Flag::new(x, f)?;
        Ok(AffineFlag { x: fl.x, f: fl.f })
    }

    pub fn flag(&self) -> Flag {
        Flag { x: self.x.clone(), f: self.f.clone() }
    }

    pub fn rescale(&self, lx: &Scalar, lf: &Scalar) -> AffineFlag {
        AffineFlag {
            x: self.x.clone().map(|v| v * lx.clone()),
            f: self.f.clone().map(|v| v * lf.clone()),
        }
    }
}

/// z = f₁(x₂)f₂(x₃)f₃(x₁) / (f₁(x₃)f₂(x₁)f₃(x₂)).
pub fn triple_ratio(a: &Flag, b: &Flag, c: &Flag) -> Result<Scalar, FlagError> {
    let p = |u: &Flag, v: &Flag| pair(&u.f, &v.x);
    let den = [p(a, c), p(b, a), p(c, b)];
    let num = [p(a, b), p(b, c), p(c, a)];
    let flags = [a, b, c];
    let scale: f64 = flags.iter().map(|u| norm(&u.f) * norm(&u.x)).fold(0.0, f64::max);
    if den.iter().chain(num.iter()).any(|v| negligible(v, scale, GENERIC_TOL)) {
        return Err(FlagError::DegenerateConfiguration);
    }
    let [n0, n1, n2] = num;
    let [d0, d1, d2] = den;
    Ok((n0 * n1 * n2) / (d0 * d1 * d2))
}

/// An ordered generic 4-tuple of flags with its z-coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagTetrahedron {
    pub flags: [Flag; 4],
    pub z: ZCoords<Scalar>,
}

impl FlagTetrahedron {
    pub fn new(flags: [Flag; 4]) -> Result<Self, FlagError> {
        check_generic(&flags)?;
        let mut edge: [[Scalar; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| Scalar::int(1)));
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    edge[i][j] = lemma_cross_ratio(&flags, i, j);
                }
            }
        }
        let mut faces = Vec::with_capacity(4);
        for l in 0..4 {
            let (i, j, k) = even_face(l);
            faces.push(triple_ratio(&flags[i], &flags[j], &flags[k])?);
        }
        let face_even: [Scalar; 4] = faces.try_into().unwrap();
        Ok(FlagTetrahedron { flags, z: ZCoords::from_parts(edge, face_even) })
    }

    pub fn edge(&self, i: usize, j: usize) -> &Scalar {
        self.z.edge(i, j)
    }

    pub fn face(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.z.face(i, j, k)
    }

    pub fn shapes(&self) -> [Scalar; 4] {
        self.z.shapes()
    }

    /// Reorder vertices: new vertex v is old vertex perm[v].
    pub fn reorder(&self, perm: [usize; 4]) -> Result<Self, FlagError> {
        Self::new(perm.map(|v| self.flags[v].clone()))
    }

    pub fn transform(&self, g: &[Vec3; 3]) -> Result<Self, FlagError> {
        Self::new(std::array::from_fn(|v| self.flags[v].transform(g)))
    }

    /// The representatives as affine flags (unit scales).
    pub fn affine(&self) -> [AffineFlag; 4] {
        std::array::from_fn(|v| AffineFlag { x: self.flags[v].x.clone(), f: self.flags[v].f.clone() })
    }
}

fn check_generic(flags: &[Flag; 4]) -> Result<(), FlagError> {
    let scale_x: f64 = flags.iter().map(|u| norm(&u.x)).fold(0.0, f64::max);
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                let s = norm(&flags[i].f) * norm(&flags[j].x);
                if negligible(&pair(&flags[i].f, &flags[j].x), s, GENERIC_TOL) {
                    return Err(FlagError::DegenerateConfiguration);
                }
            }
        }
    }
    for l in 0..4 {
        let (i, j, k) = even_face(l);
        let d = det3(&flags[i].x, &flags[j].x, &flags[k].x);
        if negligible(&d, scale_x.powi(3), GENERIC_TOL) {
            return Err(FlagError::DegenerateConfiguration);
        }
    }
    Ok(())
}

fn lemma_cross_ratio(flags: &[Flag; 4], i: usize, j: usize) -> Scalar {
    let (k, l) = completion(i, j);
    let fi = &flags[i].f;
    let x = |v: usize| &flags[v].x;
    (pair(fi, x(k)) * det3(x(i), x(j), x(l))) / (pair(fi, x(l)) * det3(x(i), x(j), x(k)))
}

/// z_ij = f_i(x_k)det(x_i,x_j,x_l) / (f_i(x_l)det(x_i,x_j,x_k)).
pub fn edge_cross_ratio(t: &FlagTetrahedron, i: usize, j: usize) -> Scalar {
    lemma_cross_ratio(&t.flags, i, j)
}

/// The tetrahedron with the prescribed (z₁₂, z₂₁, z₃₄, z₄₃).
pub fn normalize_tetrahedron(shapes: [Scalar; 4]) -> Result<FlagTetrahedron, FlagError> {
    let one = Scalar::int(1);
    if shapes.iter().any(|z| z.is_zero() || *z == one) {
        return Err(FlagError::InvalidShape);
    }
    let [z12, z21, z34, z43] = shapes;
    let z1 = one.clone() - z12.inv();
    let z2 = one.clone() - z21;
    let z3 = z34;
    let z4 = (one.clone() - z43).inv();
    let (o, m) = (Scalar::int(0), Scalar::int(-1));
    let flag = |x: [i64; 3], f: Vec3| Flag { x: x.map(Scalar::int), f };
    let flags = [
        flag([1, 0, 0], [o.clone(), z1, m.clone()]),
        flag([0, 1, 0], [z2, o.clone(), m.clone()]),
        flag([0, 0, 1], [z3, m.clone(), o.clone()]),
        flag([1, 1, 1], [z4.clone(), one - z4, m]),
    ];
    FlagTetrahedron::new(flags)
}

/// First jet of the Veronese curve [x,y] ↦ [x², xy, y²].
pub fn veronese_flag(p: [Scalar; 2]) -> Result<Flag, FlagError> {
    let [a, b] = p;
    let x = [a.clone() * a.clone(), a.clone() * b.clone(), b.clone() * b.clone()];
    // polar of xz − y² at x
    let f = [x[2].clone(), Scalar::int(-2) * x[1].clone(), x[0].clone()];
    Flag::new(x, f)
}

/// Point on the null cone of ⟨z,w⟩ = w̄₁z₃ + w̄₂z₂ + w̄₃z₁ with its complex tangent line.
pub fn cr_flag(p: Vec3) -> Result<Flag, FlagError> {
    let c: Vec3 = p.clone().map(|v| v.conj());
    let h = p[0].clone() * c[2].clone() + p[1].clone() * c[1].clone() + p[2].clone() * c[0].clone();
    let n = norm(&p);
    if n == 0.0 {
        return Err(FlagError::ZeroVector);
    }
    if !negligible(&h, n * n, INCIDENCE_TOL) {
        return Err(FlagError::NotOnSphere);
    }
    let [c0, c1, c2] = c;
    Flag::new(p, [c2, c1, c0])
}

/// a_ij = f_i(x_j) and a_ijk = det(x_i, x_j, x_k).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ACoordinates {
    edge: [[Scalar; 4]; 4],
    /// det_even[l] = det of the face opposite l listed evenly.
    det_even: [Scalar; 4],
}

impl ACoordinates {
    pub fn edge(&self, i: usize, j: usize) -> &Scalar {
        &self.edge[i][j]
    }

    pub fn face(&self, i: usize, j: usize, k: usize) -> Scalar {
        let l = opposite(i, j, k);
        if is_odd(&[i, j, k, l]) {
            -self.det_even[l].clone()
        } else {
            self.det_even[l].clone()
        }
    }

    /// z_ijk = a_ij a_jk a_ki / (a_ik a_ji a_kj).
    pub fn face_ratio(&self, i: usize, j: usize, k: usize) -> Scalar {
        let a = |p: usize, q: usize| self.edge[p][q].clone();
        (a(i, j) * a(j, k) * a(k, i)) / (a(i, k) * a(j, i) * a(k, j))
    }

    /// a_ik a_ijl / (a_il a_ijk); equals z_ij up to sign.
    pub fn edge_ratio(&self, i: usize, j: usize) -> Scalar {
        let (k, l) = completion(i, j);
        (self.edge[i][k].clone() * self.face(i, j, l)) / (self.edge[i][l].clone() * self.face(i, j, k))
    }
}

pub fn a_coordinates(t: &[AffineFlag; 4]) -> Result<ACoordinates, FlagError> {
    let flags: [Flag; 4] = std::array::from_fn(|v| t[v].flag());
    check_generic(&flags)?;
    let edge = std::array::from_fn(|i| {
        std::array::from_fn(|j| if i == j { Scalar::int(0) } else { pair(&t[i].f, &t[j].x) })
    });
    let det_even = std::array::from_fn(|l| {
        let (i, j, k) = even_face(l);
        det3(&t[i].x, &t[j].x, &t[k].x)
    });
    Ok(ACoordinates { edge, det_even })
}

/// σ(z_ijk) = 1/z_ijk, σ(z_ij) = z_ji(1+z_ijl) / (z_ijl(1+z_ikj)).
///
/// These are the coordinates of the dual configuration (f_i, x_i).
pub fn sigma_involution<F: Field>(z: &ZCoords<F>) -> Result<ZCoords<F>, FlagError> {
    let one = F::one();
    for l in 0..4 {
        if (one.clone() + z.boundary_face(l)).is_zero() {
            return Err(FlagError::SigmaUndefined);
        }
    }
    let mut edge: [[F; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| F::one()));
    for [i, j, k, l] in even_perms() {
        let a = z.face(i, j, l);
        let b = z.face(i, k, j);
        edge[i][j] = z.edge(j, i).clone() * (one.clone() + a.clone()) / (a * (one.clone() + b));
    }
    let face_even = std::array::from_fn(|l| z.boundary_face(l));
    Ok(ZCoords::from_parts(edge, face_even))
}

/// Random integer affine flags in general position; entries in [-r, r].
pub fn random_rational_affine<R: Rng>(rng: &mut R, r: i64) -> [AffineFlag; 4] {
    loop {
        let flags: [AffineFlag; 4] = std::array::from_fn(|_| {
            let x: Vec3 = std::array::from_fn(|_| Scalar::int(rng.gen_range(-r..=r)));
            let s: Vec3 = std::array::from_fn(|_| Scalar::int(rng.gen_range(-r..=r)));
            AffineFlag { f: cross(&x, &s), x }
        });
        let plain: [Flag; 4] = std::array::from_fn(|v| flags[v].flag());
        if plain.iter().all(|u| norm(&u.x) > 0.0 && norm(&u.f) > 0.0) && check_generic(&plain).is_ok() {
            return flags;
        }
    }
}

pub fn random_rational_tetrahedron<R: Rng>(rng: &mut R, r: i64) -> FlagTetrahedron {
    let a = random_rational_affine(rng, r);
    FlagTetrahedron::new(std::array::from_fn(|v| a[v].flag())).expect("generic by construction")
}

#[cfg(test)]
mod tests;
