use serde::{Deserialize, Serialize};

use crate::arith::Field;

use super::FlagError;

/// Sign of a permutation of 0..n given as a slice: true when odd.
pub fn is_odd(p: &[usize]) -> bool {
    let mut inv = 0;
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            if p[a] > p[b] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

/// The unique (k, l) making (i, j, k, l) an even permutation of (0, 1, 2, 3).
pub fn completion(i: usize, j: usize) -> (usize, usize) {
    debug_assert!(i != j && i < 4 && j < 4);
    let mut rest = (0..4).filter(|&v| v != i && v != j);
    let (k, l) = (rest.next().unwrap(), rest.next().unwrap());
    if is_odd(&[i, j, k, l]) {
        (l, k)
    } else {
        (k, l)
    }
}

/// The vertex not in {i, j, k}.
pub fn opposite(i: usize, j: usize, k: usize) -> usize {
    6 - i - j - k
}

/// Face opposite `l` listed so that (i, j, k, l) is even.
pub fn even_face(l: usize) -> (usize, usize, usize) {
    let mut f = (0..4).filter(|&v| v != l);
    let (a, b, c) = (f.next().unwrap(), f.next().unwrap(), f.next().unwrap());
    if is_odd(&[a, b, c, l]) {
        (a, c, b)
    } else {
        (a, b, c)
    }
}

/// Face opposite `l` in its boundary orientation (the reverse of `even_face`).
pub fn boundary_face(l: usize) -> (usize, usize, usize) {
    let (a, b, c) = even_face(l);
    (a, c, b)
}

/// The four shape slots (z₁₂, z₂₁, z₃₄, z₄₃), 0-based.
pub const SHAPE_EDGES: [(usize, usize); 4] = [(0, 1), (1, 0), (2, 3), (3, 2)];

/// The 12 edge and 4 face coordinates of a tetrahedron of flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZCoords<F> {
    /// edge[i][j] = z_ij; diagonal entries are unused and hold 1.
    edge: [[F; 4]; 4],
    /// face_even[l] = z_ijk for (i, j, k, l) even.
    face_even: [F; 4],
}

impl<F: Field> ZCoords<F> {
    pub fn edge(&self, i: usize, j: usize) -> &F {
        debug_assert!(i != j);
        &self.edge[i][j]
    }

    /// Triple ratio z_ijk of the face {i, j, k} in the given orientation.
    pub fn face(&self, i: usize, j: usize, k: usize) -> F {
        let l = opposite(i, j, k);
        if is_odd(&[i, j, k, l]) {
            self.face_even[l].inv()
        } else {
            self.face_even[l].clone()
        }
    }

    /// Triple ratio of the face opposite l in its boundary orientation.
    pub fn boundary_face(&self, l: usize) -> F {
        self.face_even[l].inv()
    }

    pub fn shapes(&self) -> [F; 4] {
        SHAPE_EDGES.map(|(i, j)| self.edge[i][j].clone())
    }

    /// Rel2 and Rel1 propagation from (z₁₂, z₂₁, z₃₄, z₄₃).
    pub fn from_shapes(shapes: [F; 4]) -> Result<Self, FlagError> {
        let one = F::one();
        let mut edge: [[F; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| F::one()));
        for ((i, j), z) in SHAPE_EDGES.into_iter().zip(shapes) {
            if z.is_zero() || z == one {
                return Err(FlagError::InvalidShape);
            }
            let (k, l) = completion(i, j);
            edge[i][k] = (one.clone() - z.clone()).inv();
            edge[i][l] = one.clone() - z.inv();
            edge[i][j] = z;
        }
        Ok(Self::from_edges(edge))
    }

    /// Faces from Rel1: z_ijk = −z_il z_jl z_kl.
    pub(crate) fn from_edges(edge: [[F; 4]; 4]) -> Self {
        let face_even = std::array::from_fn(|l| {
            let (i, j, k) = even_face(l);
            -(edge[i][l].clone() * edge[j][l].clone() * edge[k][l].clone())
        });
        ZCoords { edge, face_even }
    }

    pub(crate) fn from_parts(edge: [[F; 4]; 4], face_even: [F; 4]) -> Self {
        ZCoords { edge, face_even }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> ZCoords<G> {
        ZCoords {
            edge: std::array::from_fn(|i| std::array::from_fn(|j| f(&self.edge[i][j]))),
            face_even: std::array::from_fn(|l| f(&self.face_even[l])),
        }
    }

    /// Rel1, Rel2, Rel3 as exact equalities, reporting the first failure.
    pub fn relation_defects(&self) -> Vec<String> {
        let one = F::one();
        let mut out = vec![];
        for p in even_perms() {
            let [i, j, k, l] = p;
            let z = |a: usize, b: usize| self.edge[a][b].clone();
            let rel1 = -(z(i, l) * z(j, l) * z(k, l));
            if self.face(i, j, k) != rel1 {
                out.push(format!("Rel1 at {:?}", p));
            }
            if z(i, k) != (one.clone() - z(i, j)).inv() || z(i, l) != one.clone() - z(i, j).inv() {
                out.push(format!("Rel2 at {:?}", p));
            }
            if z(i, j) * z(i, k) * z(i, l) != -one.clone() {
                out.push(format!("Rel3 at {:?}", p));
            }
        }
        out
    }

    /// Same check with a floating tolerance.
    pub fn max_relation_defect(&self) -> f64 {
        let one = F::one();
        let mut worst: f64 = 0.0;
        for [i, j, k, l] in even_perms() {
            let z = |a: usize, b: usize| self.edge[a][b].to_c64();
            let rel1 = -(z(i, l) * z(j, l) * z(k, l));
            worst = worst.max((self.face(i, j, k).to_c64() - rel1).norm());
            worst = worst.max((z(i, k) - (one.to_c64() - z(i, j)).inv()).norm());
            worst = worst.max((z(i, j) * z(i, k) * z(i, l) + one.to_c64()).norm());
        }
        worst
    }
}

/// The 12 even permutations of (0, 1, 2, 3).
pub fn even_perms() -> impl Iterator<Item = [usize; 4]> {
    all_perms().filter(|p| !is_odd(p))
}

pub fn all_perms() -> impl Iterator<Item = [usize; 4]> {
    (0..24usize).map(|n| {
        let mut pool = vec![0, 1, 2, 3];
        let mut idx = n;
        let mut out = [0; 4];
        for (slot, fact) in [6usize, 2, 1, 1].into_iter().enumerate() {
            let q = idx / fact;
            idx %= fact;
            out[slot] = pool.remove(q);
        }
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Scalar;

    #[test]
    fn completion_is_even() {
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let (k, l) = completion(i, j);
                    assert!(!is_odd(&[i, j, k, l]));
                }
            }
        }
        assert_eq!(even_perms().count(), 12);
        assert_eq!(all_perms().collect::<std::collections::BTreeSet<_>>().len(), 24);
    }

    #[test]
    fn boundary_faces_match_simplicial_boundary() {
        // ∂[0123] = [123] − [023] + [013] − [012]
        let expect = [(1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)];
        for l in 0..4 {
            let (a, b, c) = boundary_face(l);
            let rotations = [(a, b, c), (b, c, a), (c, a, b)];
            assert!(rotations.contains(&expect[l]), "face {l}");
        }
    }

    #[test]
    fn all_omega_shapes() {
        let w = Scalar::omega();
        let z = ZCoords::from_shapes([w.clone(), w.clone(), w.clone(), w.clone()]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(z.edge(i, j), &w);
                }
            }
        }
        for l in 0..4 {
            assert_eq!(z.boundary_face(l), Scalar::int(1));
        }
        assert!(z.relation_defects().is_empty());
    }

    #[test]
    fn rejects_degenerate_shapes() {
        let one = Scalar::int(1);
        let two = Scalar::int(2);
        assert!(ZCoords::from_shapes([one, two.clone(), two.clone(), two]).is_err());
    }

    #[test]
    fn opposite_orientation_inverts_face() {
        let s = [Scalar::ratio(2, 3), Scalar::int(-5), Scalar::ratio(7, 2), Scalar::ratio(-1, 4)];
        let z = ZCoords::from_shapes(s).unwrap();
        for (i, j, k) in [(0, 1, 2), (1, 3, 2), (3, 0, 2)] {
            assert_eq!(z.face(i, k, j), z.face(i, j, k).inv());
            assert_eq!(z.face(j, k, i), z.face(i, j, k));
        }
    }
}
