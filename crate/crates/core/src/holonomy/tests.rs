use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::complex3::{parse_triangulation, Move, ParseOptions};
use crate::flags::{cross, det3, even_perms, pair, random_rational_tetrahedron, Flag, FlagTetrahedron};
use crate::testdata::{fig8_solutions, FIG8_JSON};

fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn fig8() -> TriangulationComplex {
    parse_triangulation(FIG8_JSON, ParseOptions::default()).unwrap()
}

fn zs(shapes: &[[Scalar; 4]]) -> Vec<ZCoords<Scalar>> {
    shapes.iter().map(|s| ZCoords::from_shapes(s.clone()).unwrap()).collect()
}

/// Columns λ₁x_i, λ₂(ker f_i ∩ ker f_j), λ₃x_j with x_k = λ₁x_i − λ₂y + λ₃x_j.
fn frame(fl: &[Flag; 4], i: usize, j: usize, k: usize) -> ProjMatrix<Scalar> {
    let y = cross(&fl[i].f, &fl[j].f);
    let (a, b, c) = (&fl[i].x, &y, &fl[j].x);
    let x = &fl[k].x;
    let d = det3(a, b, c);
    let l1 = det3(x, b, c) / d.clone();
    let l2 = -(det3(a, x, c) / d.clone());
    let l3 = det3(a, b, x) / d;
    let cols = [a.clone().map(|v| v * l1.clone()), b.clone().map(|v| v * l2.clone()), c.clone().map(|v| v * l3.clone())];
    ProjMatrix { m: std::array::from_fn(|r| std::array::from_fn(|s| cols[s][r].clone())) }
}

fn change(fl: &[Flag; 4], from: (usize, usize, usize), to: (usize, usize, usize)) -> ProjMatrix<Scalar> {
    &frame(fl, to.0, to.1, to.2).adjugate() * &frame(fl, from.0, from.1, from.2)
}

fn assert_prop(a: &ProjMatrix<Scalar>, b: &ProjMatrix<Scalar>) {
    assert!(a.proportional(b).is_some(), "{a:?} vs {b:?}");
}

#[test]
fn t_matrix_examples() {
    let t = t_matrix(&Scalar::int(1)).unwrap();
    let expect = [[1, 2, 1], [-1, -1, 0], [1, 0, 0]].map(|r| r.map(Scalar::int));
    assert_eq!(t.m, expect);
    assert_eq!(t_matrix(&Scalar::int(0)).unwrap_err(), HolonomyError::InvalidTripleRatio);

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let x = q(rng.gen_range(-50..50), rng.gen_range(1..30));
        if x.is_zero() {
            continue;
        }
        let t = t_matrix(&x).unwrap();
        let t3 = &(&t * &t) * &t;
        assert!(ProjMatrix::identity().proportional(&t3).is_some());
    }
}

#[test]
fn lines_concurrent_at_minus_one() {
    // in the frame of (1, 2, 3) the lines are [0:0:1], [1:0:0] and the first row of T(X)
    let y = [Scalar::int(0), Scalar::int(1), Scalar::int(0)];
    for x in [q(-1, 1), q(2, 1), q(-3, 7)] {
        let t = t_matrix(&x).unwrap();
        let l1 = [Scalar::int(0), Scalar::int(0), Scalar::int(1)];
        let l2 = [Scalar::int(1), Scalar::int(0), Scalar::int(0)];
        let concurrent = det3(&l1, &l2, &t.m[0]).is_zero();
        assert_eq!(concurrent, x == q(-1, 1));
        assert_eq!(pair(&t.m[0], &y).is_zero(), concurrent);
    }
}

#[test]
fn e_matrix_examples() {
    assert_eq!(e_matrix(&Scalar::int(1), &Scalar::int(1)).unwrap(), ProjMatrix::identity());
    let w = Scalar::omega();
    let e = e_matrix(&w, &w).unwrap();
    assert_eq!(e.diagonal(), [w.conj(), Scalar::int(1), w.clone()]);
    let (a, b, c, d) = (q(2, 3), q(-5, 7), q(9, 2), q(1, 11));
    let prod = &e_matrix(&a, &b).unwrap() * &e_matrix(&c, &d).unwrap();
    assert_eq!(prod, e_matrix(&(a * c), &(b * d)).unwrap());
    assert_eq!(e_matrix(&Scalar::int(0), &w).unwrap_err(), HolonomyError::InvalidShape);
}

#[test]
fn frames_match_coordinate_changes() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..40 {
        let tet: FlagTetrahedron = random_rational_tetrahedron(&mut rng, 6);
        let fl = &tet.flags;
        let z = std::slice::from_ref(&tet.z);
        for [i, j, k, l] in even_perms() {
            // the third line has coordinates [X : X+1 : 1] in the frame of (i, j, k)
            let m = frame(fl, i, j, k);
            let line: [Scalar; 3] = std::array::from_fn(|c| (0..3).fold(Scalar::int(0), |acc, r| acc + fl[k].f[r].clone() * m.m[r][c].clone()));
            let x = tet.face(i, j, k);
            let expect = ProjMatrix::diag(x.clone(), x.clone() + Scalar::int(1), Scalar::int(1));
            assert_prop(&ProjMatrix::diag(line[0].clone(), line[1].clone(), line[2].clone()), &expect);

            assert_prop(&change(fl, (i, j, k), (j, k, i)), &t_matrix(&x).unwrap());
            assert_prop(&change(fl, (i, j, k), (i, j, l)), &e_matrix(tet.edge(i, j), tet.edge(j, i)).unwrap());

            let r = evaluate_word(z, &compile(&LinkPath::new(vec![Move::new(0, MoveKind::R, i, j)]))).unwrap();
            assert_prop(&change(fl, (i, l, j), (i, k, j)), &r);
            assert!(r.is_upper_triangular());
            let d = ProjMatrix::diag(
                tet.edge(j, i).clone() * tet.face(i, l, j) * tet.face(i, j, k),
                Scalar::int(1),
                tet.edge(i, j).inv(),
            );
            let rd = r.diagonal();
            assert_prop(&ProjMatrix::diag(rd[0].clone(), rd[1].clone(), rd[2].clone()), &d);
        }
    }
}

#[test]
fn left_then_right_is_not_the_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let tet = random_rational_tetrahedron(&mut rng, 6);
    let z = std::slice::from_ref(&tet.z);
    let w = LinkPath::new(vec![Move::new(0, MoveKind::L, 0, 1), Move::new(0, MoveKind::R, 0, 1)]);
    let h = evaluate_word(z, &compile(&w)).unwrap();
    assert!(ProjMatrix::identity().proportional(&h).is_none());
    let cx = fig8();
    let zz = zs(&fig8_solutions()[0]);
    let back = LinkPath::parse("L z43, R z43").unwrap();
    assert_eq!(path_holonomy(&cx, &zz, &back).unwrap_err(), HolonomyError::Backtracking);
}

#[test]
fn word_display() {
    let w = compile(&LinkPath::parse("L z43, R w41").unwrap());
    assert_eq!(w.to_string(), "E(z43) T(w421) T(w214) E(w14) T(w143)");
}

#[test]
fn closed_form_matches_products() {
    let cx = fig8();
    let (a, b) = cx.link_homology_basis(0).unwrap();
    let gamma = LinkPath::parse("R z13, L w14, R z23, L w24, R z31, L w32, R z41, L w42").unwrap();
    let bp = LinkPath::parse("L z43, R w41").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut decorations: Vec<Vec<[Scalar; 4]>> = fig8_solutions().into_iter().map(|s| s.to_vec()).collect();
    // closed form and products agree off the solution set too
    for _ in 0..20 {
        decorations.push(
            (0..2)
                .map(|_| std::array::from_fn(|_| q(rng.gen_range(2..40), rng.gen_range(1..40) * if rng.gen() { 1 } else { -1 })))
                .collect(),
        );
    }
    for shapes in &decorations {
        let Ok(z) = shapes.iter().map(|s| ZCoords::from_shapes(s.clone())).collect::<Result<Vec<_>, _>>() else {
            continue;
        };
        for p in [&a, &b, &gamma, &bp, &a.concat(&b)] {
            let h = path_holonomy(&cx, &z, p).unwrap();
            assert!(h.is_upper_triangular());
            let (c, cs) = eigenvalue_pair(&z, p).unwrap();
            let d = h.diagonal();
            assert_eq!((d[2].clone() / d[1].clone(), d[1].clone() / d[0].clone()), (c, cs));
        }
        // eigenvalues multiply under concatenation
        let (ca, csa) = eigenvalue_pair(&z, &a).unwrap();
        let (cb, csb) = eigenvalue_pair(&z, &b).unwrap();
        assert_eq!(eigenvalue_pair(&z, &a.concat(&b)).unwrap(), (ca * cb, csa * csb));
    }
}

#[test]
fn standard_solutions_are_unipotent() {
    let cx = fig8();
    for s in fig8_solutions() {
        let z = zs(&s);
        let inv = peripheral_invariants(&cx, &z).unwrap();
        assert_eq!(inv.tori.len(), 1);
        assert!(inv.skipped_links.is_empty());
        assert!(inv.tori[0].as_array().iter().all(|v| v.is_one()));
        let (a, b) = cx.link_homology_basis(0).unwrap();
        for p in [a, b] {
            let h = path_holonomy(&cx, &z, &p).unwrap();
            let d = h.diagonal();
            assert!(d[0] == d[1] && d[1] == d[2], "{d:?}");
        }
    }
}

#[test]
fn diagonal_is_conjugation_invariant() {
    let cx = fig8();
    let z = zs(&fig8_solutions()[1]);
    let (a, _) = cx.link_homology_basis(0).unwrap();
    let h = path_holonomy(&cx, &z, &a).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..100 {
        let mut u = ProjMatrix::<Scalar>::identity();
        for r in 0..3 {
            u.m[r][r] = q(rng.gen_range(1..9), rng.gen_range(1..9));
            for c in r + 1..3 {
                u.m[r][c] = q(rng.gen_range(-9..9), rng.gen_range(1..9));
            }
        }
        let conj = &(&u * &h) * &u.adjugate();
        assert!(conj.is_upper_triangular());
        let (d0, d1) = (h.diagonal(), conj.diagonal());
        assert_prop(
            &ProjMatrix::diag(d0[0].clone(), d0[1].clone(), d0[2].clone()),
            &ProjMatrix::diag(d1[0].clone(), d1[1].clone(), d1[2].clone()),
        );
    }
}

#[test]
fn size_mismatch_is_reported() {
    let cx = fig8();
    let z = zs(&fig8_solutions()[0][..1]);
    assert_eq!(
        peripheral_invariants(&cx, &z).unwrap_err(),
        HolonomyError::SizeMismatch { got: 1, want: 2 }
    );
}

#[test]
fn float_matrices_normalize() {
    let m = ProjMatrix::diag(Complex64::new(2.0, 0.0), Complex64::new(0.0, 4.0), Complex64::new(1.0, 0.0));
    let n = m.normalized();
    assert!((n.m[1][1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    let scaled = ProjMatrix { m: m.m.map(|r| r.map(|v| v * Complex64::new(0.3, -2.0))) };
    assert!(m.projective_distance(&scaled) < 1e-14);
    assert_eq!(m.lower_residue(), 0.0);
}
