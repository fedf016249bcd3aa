//! Edge, face and peripheral equations of a decorated complex, and a damped
//! Newton solver in log-shape coordinates.

mod newton;
mod snap;
mod standard;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{Field, Scalar};
use crate::complex3::{edge_label, ComplexError, LinkKind, LinkPath, MoveKind, TriangulationComplex};
use crate::flags::{completion, FlagError, ZCoords, SHAPE_EDGES};
use crate::holonomy::HolonomyError;

pub use newton::{
    continue_family, jacobian_rank, multistart, newton_solve, random_start, FamilyOptions, MultistartReport, NewtonOptions, NewtonResult,
    SolutionCluster, TangentSelection,
};
pub use snap::{snap_decoration, snap_scalar, SNAP_FIELDS};
pub use standard::{classify_figure_eight, figure_eight_standard_structures, StandardStructure};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GluingError {
    #[error("shape coordinate at 0, 1 or infinity in tetrahedron {0}")]
    PoleEncountered(usize),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Jacobian is singular (rank {rank})")]
    SingularJacobian { rank: usize },
    #[error("rank of the Jacobian changed from {from} to {to} along the path")]
    PathSingular { from: usize, to: usize },
    #[error("decoration has {got} tetrahedra, complex has {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("expected {want} target quadruples, got {got}")]
    TargetCount { got: usize, want: usize },
    #[error("cannot parse monomial {0:?}")]
    MonomialParse(String),
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
}

/// Shapes (z₁₂, z₂₁, z₃₄, z₄₃) per tetrahedron.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Decoration {
    pub shapes: Vec<[Scalar; 4]>,
}

impl Decoration {
    pub fn new(shapes: Vec<[Scalar; 4]>) -> Result<Self, GluingError> {
        let d = Decoration { shapes };
        d.zcoords()?;
        Ok(d)
    }

    pub fn from_c64(shapes: &[[Complex64; 4]]) -> Self {
        Decoration { shapes: shapes.iter().map(|s| s.map(Scalar::Float)).collect() }
    }

    pub fn num_tetrahedra(&self) -> usize {
        self.shapes.len()
    }

    pub fn zcoords(&self) -> Result<Vec<ZCoords<Scalar>>, GluingError> {
        Ok(self.shapes.iter().map(|s| ZCoords::from_shapes(s.clone())).collect::<Result<_, _>>()?)
    }

    pub fn to_c64(&self) -> Vec<[Complex64; 4]> {
        self.shapes.iter().map(|s| s.clone().map(|z| z.to_c64())).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.shapes.iter().flatten().all(Scalar::is_exact)
    }

    pub fn conj(&self) -> Self {
        Decoration { shapes: self.shapes.iter().map(|s| s.clone().map(|z| z.conj())).collect() }
    }
}

/// z-coordinates from complex shapes; fails on shapes at 0 or 1.
pub fn zcoords_c64(shapes: &[[Complex64; 4]]) -> Result<Vec<ZCoords<Complex64>>, GluingError> {
    shapes
        .iter()
        .enumerate()
        .map(|(t, s)| ZCoords::from_shapes(*s).map_err(|_| GluingError::PoleEncountered(t)))
        .collect()
}

/// (tet, i, j) standing for z_ij of that tetrahedron.
pub type EdgeVar = (usize, usize, usize);

/// A Laurent monomial in edge coordinates; serialized as its display string.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: BTreeMap<EdgeVar, i64>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(t: usize, i: usize, j: usize) -> Self {
        let mut m = Self::one();
        m.mul_var((t, i, j), 1);
        m
    }

    pub fn mul_var(&mut self, v: EdgeVar, e: i64) {
        let slot = self.exps.entry(v).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.exps.remove(&v);
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (&v, &e) in &other.exps {
            out.mul_var(v, e);
        }
        out
    }

    pub fn inv(&self) -> Monomial {
        Monomial { exps: self.exps.iter().map(|(&v, &e)| (v, -e)).collect() }
    }

    pub fn exponents(&self) -> impl Iterator<Item = (EdgeVar, i64)> + '_ {
        self.exps.iter().map(|(&v, &e)| (v, e))
    }

    pub fn eval<F: Field>(&self, z: &[ZCoords<F>]) -> F {
        self.exps.iter().fold(F::one(), |acc, (&(t, i, j), &e)| acc * z[t].edge(i, j).powi(e))
    }

    /// z_il z_jl z_kl: minus the triple ratio of the face opposite l, even orientation.
    fn face_product(t: usize, l: usize) -> Monomial {
        let mut m = Monomial::one();
        for v in (0..4).filter(|&v| v != l) {
            m.mul_var((t, v, l), 1);
        }
        m
    }

    /// Parse words like "z12 w12 z13", "z41 /w32" or "w41^-1".
    pub fn parse(s: &str) -> Result<Self, GluingError> {
        let bad = || GluingError::MonomialParse(s.to_string());
        let mut m = Monomial::one();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            let (inv, tok) = match tok.strip_prefix("1/").or_else(|| tok.strip_prefix('/')) {
                Some(rest) => (true, rest),
                None => (false, tok),
            };
            let (name, e) = match tok.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| bad())?),
                None => (tok, 1),
            };
            let path = LinkPath::parse(&format!("L {name}")).map_err(|_| bad())?;
            let mv = path.moves[0];
            m.mul_var((mv.tet, mv.a, mv.b), if inv { -e } else { e });
        }
        Ok(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|(&(t, i, j), &e)| {
                let l = edge_label(t, i, j);
                if e == 1 {
                    l
                } else {
                    format!("{l}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "1" {
            return Ok(Monomial::one());
        }
        Monomial::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Eigen {
    A,
    AStar,
    B,
    BStar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EquationKind {
    Edge { wheel: usize },
    Face { tet: usize, face: usize },
    Eigenvalue { link: usize, which: Eigen, path: String },
}

/// monomial = target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equation {
    pub kind: EquationKind,
    pub monomial: Monomial,
    pub target: Scalar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquationSystem {
    pub num_tetrahedra: usize,
    pub equations: Vec<Equation>,
}

/// Prescribed (A, A*, B, B*) for one torus link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenTargets {
    pub a: Scalar,
    pub a_star: Scalar,
    pub b: Scalar,
    pub b_star: Scalar,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub enum BoundaryTargets {
    /// Internal conditions only.
    #[default]
    Free,
    /// All peripheral eigenvalues 1.
    Unipotent,
    /// One quadruple per torus link, in link order.
    Explicit(Vec<EigenTargets>),
}

/// C (last eigenvalue) and C* (reciprocal of the first) of a path as monomials.
pub fn eigen_monomials(path: &LinkPath) -> (Monomial, Monomial) {
    let (mut c, mut cs) = (Monomial::one(), Monomial::one());
    for m in &path.moves {
        let (t, i, j) = (m.tet, m.a, m.b);
        match m.kind {
            MoveKind::L => {
                c.mul_var((t, i, j), 1);
                cs.mul_var((t, j, i), 1);
            }
            MoveKind::R => {
                let (k, l) = completion(i, j);
                c.mul_var((t, i, j), -1);
                cs.mul_var((t, j, i), -1);
                // z_ilj z_ijk = (−z_ik z_lk z_jk)(−z_il z_jl z_kl)
                for (a, b) in [(i, k), (l, k), (j, k), (i, l), (j, l), (k, l)] {
                    cs.mul_var((t, a, b), -1);
                }
            }
        }
    }
    (c, cs)
}

pub fn build_equations(cx: &TriangulationComplex, targets: &BoundaryTargets) -> Result<EquationSystem, GluingError> {
    let mut eqs = vec![];
    let one = Scalar::int(1);
    for (w, wheel) in cx.oriented_wheels().iter().enumerate() {
        if !wheel.closed {
            continue;
        }
        let mut m = Monomial::one();
        for &(t, a, b) in &wheel.edges {
            m.mul_var((t, a, b), 1);
        }
        eqs.push(Equation { kind: EquationKind::Edge { wheel: w }, monomial: m, target: one.clone() });
    }
    for g in cx.face_pairings() {
        // z_ijk(T) z_ikj(T′) = 1 becomes a product of six edge coordinates
        let m = Monomial::face_product(g.tet, g.face).mul(&Monomial::face_product(g.to_tet, g.to_face));
        eqs.push(Equation { kind: EquationKind::Face { tet: g.tet, face: g.face }, monomial: m, target: one.clone() });
    }
    let tori: Vec<usize> = cx.links().iter().enumerate().filter(|(_, l)| l.kind == LinkKind::Torus).map(|(i, _)| i).collect();
    let quads: Vec<EigenTargets> = match targets {
        BoundaryTargets::Free => vec![],
        BoundaryTargets::Unipotent => {
            vec![EigenTargets { a: one.clone(), a_star: one.clone(), b: one.clone(), b_star: one.clone() }; tori.len()]
        }
        BoundaryTargets::Explicit(v) => {
            if v.len() != tori.len() {
                return Err(GluingError::TargetCount { got: v.len(), want: tori.len() });
            }
            v.clone()
        }
    };
    for (&link, tq) in tori.iter().zip(&quads) {
        let (pa, pb) = cx.link_homology_basis(link)?;
        let (ca, csa) = eigen_monomials(&pa);
        let (cb, csb) = eigen_monomials(&pb);
        for (which, p, m, t) in [
            (Eigen::A, &pa, ca, &tq.a),
            (Eigen::AStar, &pa, csa, &tq.a_star),
            (Eigen::B, &pb, cb, &tq.b),
            (Eigen::BStar, &pb, csb, &tq.b_star),
        ] {
            eqs.push(Equation {
                kind: EquationKind::Eigenvalue { link, which, path: p.to_string() },
                monomial: m,
                target: t.clone(),
            });
        }
    }
    Ok(EquationSystem { num_tetrahedra: cx.num_tetrahedra(), equations: eqs })
}

/// Which shape slot drives z_ij, and how: 0 → z, 1 → 1/(1−z), 2 → 1 − 1/z.
fn edge_source(i: usize, j: usize) -> (usize, u8) {
    let (si, j0) = SHAPE_EDGES[i];
    debug_assert_eq!(si, i);
    let (k, _) = completion(i, j0);
    if j == j0 {
        (i, 0)
    } else if j == k {
        (i, 1)
    } else {
        (i, 2)
    }
}

/// Subtract the nearest multiple of 2πi; returns the winding removed.
fn unwind(r: Complex64) -> (Complex64, i64) {
    let n = (r.im / (2.0 * PI)).round();
    (Complex64::new(r.re, r.im - 2.0 * PI * n), n as i64)
}

impl EquationSystem {
    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn internal(&self) -> impl Iterator<Item = &Equation> {
        self.equations.iter().filter(|e| !matches!(e.kind, EquationKind::Eigenvalue { .. }))
    }

    pub fn num_unknowns(&self) -> usize {
        4 * self.num_tetrahedra
    }

    /// Exact (or float) check: every monomial equals its target.
    pub fn holds_exactly(&self, dec: &Decoration) -> Result<bool, GluingError> {
        let z = dec.zcoords()?;
        Ok(self.equations.iter().all(|e| e.monomial.eval(&z) == e.target))
    }

    /// Values of the monomials at a decoration.
    pub fn evaluate<F: Field>(&self, z: &[ZCoords<F>]) -> Vec<F> {
        self.equations.iter().map(|e| e.monomial.eval(z)).collect()
    }

    /// log(monomial) − log(target) with windings removed, and the windings.
    pub fn residual(&self, shapes: &[[Complex64; 4]]) -> Result<(Vec<Complex64>, Vec<i64>), GluingError> {
        if shapes.len() != self.num_tetrahedra {
            return Err(GluingError::SizeMismatch { got: shapes.len(), want: self.num_tetrahedra });
        }
        let z = zcoords_c64(shapes)?;
        let mut out = Vec::with_capacity(self.len());
        let mut wind = Vec::with_capacity(self.len());
        for e in &self.equations {
            let mut s = -e.target.to_c64().ln();
            for ((t, i, j), k) in e.monomial.exponents() {
                let v = *z[t].edge(i, j);
                if v.norm() == 0.0 || !v.is_finite() {
                    return Err(GluingError::PoleEncountered(t));
                }
                s += v.ln() * k as f64;
            }
            let (r, n) = unwind(s);
            out.push(r);
            wind.push(n);
        }
        Ok((out, wind))
    }

    /// ∂ residual / ∂ log-shape, rows = equations, columns = 4 t + slot.
    pub fn jacobian(&self, shapes: &[[Complex64; 4]]) -> nalgebra::DMatrix<Complex64> {
        let mut jac = nalgebra::DMatrix::from_element(self.len(), self.num_unknowns(), Complex64::new(0.0, 0.0));
        let one = Complex64::new(1.0, 0.0);
        for (r, e) in self.equations.iter().enumerate() {
            for ((t, i, j), k) in e.monomial.exponents() {
                let (slot, how) = edge_source(i, j);
                let z = shapes[t][slot];
                let d = match how {
                    0 => one,
                    1 => z / (one - z),
                    _ => one / (z - one),
                };
                jac[(r, 4 * t + slot)] += d * k as f64;
            }
        }
        jac
    }
}

#[cfg(test)]
mod tests;
