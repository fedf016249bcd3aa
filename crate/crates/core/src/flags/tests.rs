use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::arith::rat;

fn gauss(re: i64, im: i64, d: i64) -> Scalar {
    Scalar::quad(rat(re, d), rat(im, d), -1).unwrap()
}

fn ints(v: [i64; 3]) -> Vec3 {
    v.map(Scalar::int)
}

fn random_rational<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let q = Scalar::ratio(rng.gen_range(-30..=30), rng.gen_range(1..=12));
        if !q.is_zero() && q != Scalar::int(1) {
            return q;
        }
    }
}

#[test]
fn cr_triple_ratio_example() {
    // t = 2: (1 − 2i)/(1 + 2i)
    let f1 = Flag::new(ints([1, 0, 0]), ints([0, 0, 1])).unwrap();
    let f2 = Flag::new(ints([0, 0, 1]), ints([1, 0, 0])).unwrap();
    let f3 = Flag::new(
        [gauss(-1, 2, 2), Scalar::int(1), Scalar::int(1)],
        [Scalar::int(1), Scalar::int(1), gauss(-1, -2, 2)],
    )
    .unwrap();
    let z = triple_ratio(&f1, &f2, &f3).unwrap();
    assert_eq!(z, gauss(1, -2, 1) / gauss(1, 2, 1));
    assert_eq!(triple_ratio(&f2, &f3, &f1).unwrap(), z);
    assert_eq!(triple_ratio(&f2, &f1, &f3).unwrap(), z.inv());
}

#[test]
fn degenerate_triple_rejected() {
    let f1 = Flag::new(ints([1, 0, 0]), ints([0, 0, 1])).unwrap();
    let f2 = Flag::new(ints([0, 1, 0]), ints([1, 0, 0])).unwrap();
    assert_eq!(triple_ratio(&f1, &f2, &f1), Err(FlagError::DegenerateConfiguration));
    assert_eq!(Flag::new(ints([1, 0, 0]), ints([1, 0, 0])), Err(FlagError::NotIncident));
}

/// Solve A c = b for 3×3 A given by columns (Cramer).
fn solve_cols(cols: [&Vec3; 3], b: &Vec3) -> Vec3 {
    let d = det3(cols[0], cols[1], cols[2]);
    [
        det3(b, cols[1], cols[2]) / d.clone(),
        det3(cols[0], b, cols[2]) / d.clone(),
        det3(cols[0], cols[1], b) / d,
    ]
}

/// Triple ratio read off from the line of the third flag in the frame
/// x₁ = [1:0:0], ker f₁ ∩ ker f₂ = [0:1:0], x₂ = [0:0:1], x₃ = [1:−1:1].
fn triple_ratio_by_frame(a: &Flag, b: &Flag, c: &Flag) -> Scalar {
    let p = cross(&a.f, &b.f);
    let cols = [&a.x, &p, &b.x];
    let mut lam = solve_cols(cols, &c.x);
    lam[1] = -lam[1].clone();
    // new-coordinate covector: (f₃ · M⁻¹)_c = λ_c f₃(col_c)
    let g: Vec3 = std::array::from_fn(|i| lam[i].clone() * pair(&c.f, cols[i]));
    let z = g[0].clone() / g[2].clone();
    assert_eq!(g[1].clone() / g[2].clone(), z.clone() + Scalar::int(1));
    z
}

#[test]
fn triple_ratio_matches_frame_normalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..300 {
        let t = random_rational_affine(&mut rng, 9);
        let [a, b, c, _] = t.map(|u| u.flag());
        assert_eq!(triple_ratio(&a, &b, &c).unwrap(), triple_ratio_by_frame(&a, &b, &c));
    }
}

/// Cross-ratio of the four lines through x_i, each line given by a covector
/// vanishing at x_i; [p,q] is read off from p × q ∥ x_i.
fn pencil_cross_ratio(t: &FlagTetrahedron, i: usize, j: usize) -> Scalar {
    let (k, l) = completion(i, j);
    let x = |v: usize| &t.flags[v].x;
    let lines = [t.flags[i].f.clone(), cross(x(i), x(j)), cross(x(i), x(k)), cross(x(i), x(l))];
    let u = ints([1, 2, 5]);
    let u = if pair(&u, x(i)).is_zero() { ints([3, -1, 7]) } else { u };
    let br = |a: usize, b: usize| pair(&cross(&lines[a], &lines[b]), &u);
    (br(0, 2) * br(1, 3)) / (br(0, 3) * br(1, 2))
}

#[test]
fn lemma_matches_pencil_cross_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let t = random_rational_tetrahedron(&mut rng, 9);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(edge_cross_ratio(&t, i, j), pencil_cross_ratio(&t, i, j));
                }
            }
        }
    }
}

#[test]
fn relations_hold_on_random_rational_tetrahedra() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let t = random_rational_tetrahedron(&mut rng, 7);
        let bad = t.z.relation_defects();
        assert!(bad.is_empty(), "{bad:?}");
    }
}

fn random_matrix<R: Rng>(rng: &mut R) -> [Vec3; 3] {
    loop {
        let g: [Vec3; 3] = std::array::from_fn(|_| std::array::from_fn(|_| Scalar::int(rng.gen_range(-5..=5))));
        if !det3(&g[0], &g[1], &g[2]).is_zero() {
            return g;
        }
    }
}

#[test]
fn projective_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let t = random_rational_tetrahedron(&mut rng, 7);
        let g = random_matrix(&mut rng);
        let moved = t.transform(&g).unwrap();
        for v in 0..4 {
            assert!(pair(&moved.flags[v].f, &moved.flags[v].x).is_zero());
        }
        assert_eq!(moved.z, t.z);
    }
}

#[test]
fn reordering_inverts_opposite_faces() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let t = random_rational_tetrahedron(&mut rng, 7);
        for perm in all_perms() {
            let r = t.reorder(perm).unwrap();
            for [i, j, k, _] in all_perms() {
                if k == 3 || i == 3 || j == 3 {
                    continue;
                }
                // face (i,j,k) of r is face (perm i, perm j, perm k) of t
                assert_eq!(r.face(i, j, k), t.face(perm[i], perm[j], perm[k]));
                assert_eq!(r.face(i, k, j), t.face(perm[i], perm[j], perm[k]).inv());
            }
            let e = t.edge(perm[0], perm[1]).clone();
            let expect = if is_odd(&perm) { e.inv() } else { e };
            assert_eq!(r.edge(0, 1), &expect);
        }
    }
}

#[test]
fn normalize_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..300 {
        let s: [Scalar; 4] = std::array::from_fn(|_| random_rational(&mut rng));
        match normalize_tetrahedron(s.clone()) {
            Ok(t) => {
                assert_eq!(t.shapes(), s);
                assert_eq!(t.z, ZCoords::from_shapes(s).unwrap());
            }
            // some shape tuples put two flags in special position
            Err(e) => assert_eq!(e, FlagError::DegenerateConfiguration),
        }
        let t = random_rational_tetrahedron(&mut rng, 7);
        let n = normalize_tetrahedron(t.shapes()).unwrap();
        assert_eq!(n.z, t.z);
    }
}

#[test]
fn normalize_omega() {
    let w = Scalar::omega();
    let t = normalize_tetrahedron([w.clone(), w.clone(), w.clone(), w.clone()]).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                assert_eq!(t.edge(i, j), &w);
            }
        }
        assert_eq!(t.z.boundary_face(i), Scalar::int(1));
    }
    assert_eq!(normalize_tetrahedron([Scalar::int(0), w.clone(), w.clone(), w]).unwrap_err(), FlagError::InvalidShape);
}

fn veronese_tetrahedron(t: Scalar) -> FlagTetrahedron {
    let pts = [[0, 1], [1, 0], [1, 1]].map(|p| veronese_flag(p.map(Scalar::int)).unwrap());
    let last = veronese_flag([Scalar::int(1), t]).unwrap();
    let [a, b, c] = pts;
    FlagTetrahedron::new([a, b, c, last]).unwrap()
}

#[test]
fn veronese_flags() {
    let f = veronese_flag([Scalar::int(0), Scalar::int(1)]).unwrap();
    assert_eq!(f.x, ints([0, 0, 1]));
    assert_eq!(f.f, ints([1, 0, 0]));
    let g = veronese_flag([Scalar::int(1), Scalar::int(1)]).unwrap();
    assert_eq!(g.x, ints([1, 1, 1]));
}

#[test]
fn veronese_tetrahedron_coordinates() {
    for t in [Scalar::ratio(3, 7), Scalar::int(-2), gauss(2, 5, 3)] {
        let tet = veronese_tetrahedron(t.clone());
        assert_eq!(tet.shapes(), [t.clone(), t.clone(), t.clone(), t.clone()]);
        for [i, j, k, l] in even_perms() {
            assert_eq!(tet.edge(i, j), tet.edge(j, i));
            assert_eq!(tet.edge(i, j), tet.edge(k, l));
        }
        for l in 0..4 {
            assert_eq!(tet.z.boundary_face(l), Scalar::int(1));
        }
        // projectively equivalent to the normalized tetrahedron with the same shapes
        assert_eq!(normalize_tetrahedron(tet.shapes()).unwrap().z, tet.z);
        assert_eq!(sigma_involution(&tet.z).unwrap(), tet.z);
    }
}

fn cr_tetrahedron(z: Complex64, t: f64, s: f64) -> FlagTetrahedron {
    let c = |w: Complex64| Scalar::Float(w);
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let pts = [
        [one, 0.0 * one, 0.0 * one],
        [0.0 * one, 0.0 * one, one],
        [(-1.0 + i * t) / 2.0, one, one],
        [z.norm_sqr() * (-1.0 + i * s) / 2.0, z, one],
    ];
    let flags = pts.map(|p| cr_flag(p.map(c)).unwrap());
    FlagTetrahedron::new(flags).unwrap()
}

#[test]
fn cr_flags_and_coordinates() {
    let f = cr_flag(ints([1, 0, 0])).unwrap();
    assert_eq!(f.f, ints([0, 0, 1]));
    let f = cr_flag(ints([0, 0, 1])).unwrap();
    assert_eq!(f.f, ints([1, 0, 0]));
    assert_eq!(cr_flag(ints([1, 1, 1])).unwrap_err(), FlagError::NotOnSphere);

    let i = Complex64::i();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (t, s): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let tet = cr_tetrahedron(z, t, s);
        let e = |a: usize, b: usize| tet.edge(a, b).to_c64();
        let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-9 * (1.0 + b.norm());
        assert!(close(e(0, 1), z));
        assert!(close(e(1, 0), z.conj() * (s + i) / (t + i)));
        let d = (t + i) - z.conj() * (s + i);
        assert!(close(e(2, 3), z * d / ((z - 1.0) * (t - i))));
        assert!(close(e(3, 2), z.conj() * (z - 1.0) * (s - i) / d));
        for [a, b, c, dd] in even_perms() {
            assert!(close(e(a, b) * e(b, a), (e(c, dd) * e(dd, c)).conj()));
        }
        assert!(tet.z.max_relation_defect() < 1e-8);
        let sig = sigma_involution(&tet.z).unwrap();
        let moved = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (sig.edge(a, b).to_c64() - e(a, b)).norm())
            .fold(0.0, f64::max);
        if (t - s).abs() > 0.1 {
            assert!(moved > 1e-6);
        }
    }
}

#[test]
fn a_coordinates_of_normalized_tetrahedron() {
    let s = [Scalar::ratio(2, 3), Scalar::int(-4), Scalar::ratio(5, 2), Scalar::ratio(-1, 3)];
    let t = normalize_tetrahedron(s.clone()).unwrap();
    let a = a_coordinates(&t.affine()).unwrap();
    let z1 = Scalar::int(1) - s[0].inv();
    assert_eq!(a.edge(0, 1), &z1);
}

#[test]
fn a_coordinate_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..300 {
        let aff = random_rational_affine(&mut rng, 9);
        let t = FlagTetrahedron::new(aff.clone().map(|u| u.flag())).unwrap();
        let a = a_coordinates(&aff).unwrap();
        for [i, j, k, _] in all_perms() {
            assert_eq!(a.face_ratio(i, j, k), t.face(i, j, k));
            let r = a.edge_ratio(i, j);
            assert!(r == *t.edge(i, j) || r == -t.edge(i, j).clone());
        }
        // rescaling x_v by λ scales a_{uv} and determinants containing v, not z
        let lam = Scalar::ratio(7, 3);
        let mut scaled = aff.clone();
        scaled[2] = aff[2].rescale(&lam, &Scalar::int(1));
        let b = a_coordinates(&scaled).unwrap();
        assert_eq!(b.edge(0, 2).clone(), a.edge(0, 2).clone() * lam.clone());
        assert_eq!(b.edge(2, 0), a.edge(2, 0));
        assert_eq!(b.face(0, 1, 2), a.face(0, 1, 2) * lam.clone());
        assert_eq!(b.face(0, 1, 3), a.face(0, 1, 3));
        let t2 = FlagTetrahedron::new(scaled.map(|u| u.flag())).unwrap();
        assert_eq!(t2.z, t.z);
    }
}

#[test]
fn sigma_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    for _ in 0..1000 {
        let t = random_rational_tetrahedron(&mut rng, 7);
        let Ok(s) = sigma_involution(&t.z) else { continue };
        let bad = s.relation_defects();
        assert!(bad.is_empty(), "{bad:?}");
        assert_eq!(sigma_involution(&s).unwrap(), t.z);
        let dual = FlagTetrahedron::new(t.flags.clone().map(|u| Flag { x: u.f, f: u.x })).unwrap();
        assert_eq!(s, dual.z);
        checked += 1;
    }
    assert!(checked > 900);
}
