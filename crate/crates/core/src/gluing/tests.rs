use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::complex3::{parse_triangulation, ParseOptions};
use crate::testdata::{fig8_solutions, FIG8_JSON};

fn fig8() -> TriangulationComplex {
    parse_triangulation(FIG8_JSON, ParseOptions::default()).unwrap()
}

fn decoration(s: &[[Scalar; 4]; 2]) -> Decoration {
    Decoration::new(s.to_vec()).unwrap()
}

fn omega_c() -> Complex64 {
    Scalar::omega().to_c64()
}

#[test]
fn figure_eight_equations_verbatim() {
    let sys = build_equations(&fig8(), &BoundaryTargets::Free).unwrap();
    assert_eq!(sys.len(), 8);
    let ours: BTreeSet<Monomial> = sys.equations.iter().map(|e| e.monomial.clone()).collect();
    let listed = [
        "z12 w12 z13 w43 z43 w42",
        "z21 w21 z31 w34 z34 w24",
        "z42 w32 z32 w31 z41 w41",
        "z24 w23 z23 w13 z14 w14",
        "z13 z43 z23 w14 w34 w24",
        "z14 z24 z34 w21 w41 w31",
        "z12 z42 z32 w13 w43 w23",
        "z21 z31 z41 w12 w32 w42",
    ];
    let expected: BTreeSet<Monomial> = listed.iter().map(|s| Monomial::parse(s).unwrap()).collect();
    assert_eq!(ours, expected);
    assert!(sys.equations.iter().all(|e| e.target.is_one()));
}

#[test]
fn single_tetrahedron_has_no_equations() {
    let cx = parse_triangulation(include_str!("../../examples/data/single_tet.json"), ParseOptions::default()).unwrap();
    let sys = build_equations(&cx, &BoundaryTargets::Unipotent).unwrap();
    assert!(sys.is_empty());
    let start = vec![[Complex64::new(0.3, 0.7); 4]];
    let res = newton_solve(&sys, &start, &NewtonOptions::default()).unwrap();
    assert_eq!(res.iterations, 0);
}

#[test]
fn boundary_rows_and_targets() {
    let cx = fig8();
    let sys = build_equations(&cx, &BoundaryTargets::Unipotent).unwrap();
    assert_eq!(sys.len(), 12);
    assert_eq!(sys.internal().count(), 8);
    let t = EigenTargets { a: Scalar::int(2), a_star: Scalar::int(3), b: Scalar::int(5), b_star: Scalar::int(7) };
    let sys2 = build_equations(&cx, &BoundaryTargets::Explicit(vec![t])).unwrap();
    let targets: Vec<Scalar> = sys2.equations[8..].iter().map(|e| e.target.clone()).collect();
    assert_eq!(targets, [2, 3, 5, 7].map(Scalar::int));
    assert_eq!(
        build_equations(&cx, &BoundaryTargets::Explicit(vec![])).unwrap_err(),
        GluingError::TargetCount { got: 0, want: 1 }
    );
}

#[test]
fn eigen_monomials_match_holonomy() {
    use crate::holonomy::eigenvalue_pair;
    let cx = fig8();
    let (a, b) = cx.link_homology_basis(0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let shapes: Vec<[Scalar; 4]> =
            (0..2).map(|_| std::array::from_fn(|_| Scalar::ratio(rng.gen_range(2..30), rng.gen_range(-30..-1)))).collect();
        let z = Decoration::new(shapes).unwrap().zcoords().unwrap();
        for p in [&a, &b] {
            let (c, cs) = eigen_monomials(p);
            assert_eq!((c.eval(&z), cs.eval(&z)), eigenvalue_pair(&z, p).unwrap());
        }
    }
}

#[test]
fn standard_solutions_hold_exactly() {
    let sys = build_equations(&fig8(), &BoundaryTargets::Unipotent).unwrap();
    for s in fig8_solutions() {
        let d = decoration(&s);
        assert!(sys.holds_exactly(&d).unwrap());
        assert!(sys.holds_exactly(&d.conj()).unwrap());
        let (r, _) = sys.residual(&d.to_c64()).unwrap();
        assert!(r.iter().all(|v| v.norm() < 1e-13));
        let res = newton_solve(&sys, &d.to_c64(), &NewtonOptions::default()).unwrap();
        assert_eq!(res.iterations, 0);
    }
}

#[test]
fn perturbed_solution_has_moderate_residual() {
    let sys = build_equations(&fig8(), &BoundaryTargets::Unipotent).unwrap();
    let mut shapes = decoration(&fig8_solutions()[1]).to_c64();
    shapes[0][2] += Complex64::new(1e-3, 0.0);
    let (r, _) = sys.residual(&shapes).unwrap();
    let n = r.iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(n > 1e-5 && n < 1e-1, "{n}");
}

#[test]
fn jacobian_matches_finite_differences() {
    let sys = build_equations(&fig8(), &BoundaryTargets::Unipotent).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let h = 1e-6;
    for _ in 0..100 {
        let shapes = random_start(2, rng.gen());
        let jac = sys.jacobian(&shapes);
        for col in 0..8 {
            let (t, s) = (col / 4, col % 4);
            let mut plus = shapes.clone();
            let mut minus = shapes.clone();
            plus[t][s] *= Complex64::new(h, 0.0).exp();
            minus[t][s] *= Complex64::new(-h, 0.0).exp();
            let (rp, _) = sys.residual(&plus).unwrap();
            let (rm, _) = sys.residual(&minus).unwrap();
            for row in 0..sys.len() {
                let mut d = (rp[row] - rm[row]) / (2.0 * h);
                // a winding jump between the two evaluations
                if d.im.abs() > 1.0 / h {
                    d.im -= (d.im * h / std::f64::consts::PI).round() * std::f64::consts::PI / h;
                }
                let j = jac[(row, col)];
                assert!((d - j).norm() <= 1e-6 * j.norm().max(1.0), "row {row} col {col}: {d} vs {j}");
            }
        }
    }
}

#[test]
fn newton_recovers_hyperbolic_point() {
    let sys = build_equations(&fig8(), &BoundaryTargets::Unipotent).unwrap();
    let w = omega_c();
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..20 {
        let start: Vec<[Complex64; 4]> = (0..2)
            .map(|_| std::array::from_fn(|_| w + Complex64::new(rng.gen_range(-1e-2..1e-2), rng.gen_range(-1e-2..1e-2))))
            .collect();
        let res = newton_solve(&sys, &start, &NewtonOptions::default()).unwrap();
        assert!(res.iterations <= 25);
        assert!(res.shapes.iter().flatten().all(|z| (z - w).norm() < 1e-10));
        assert_eq!(res.rank, 8);
    }
}

#[test]
fn snapping_recovers_exact_solutions() {
    let sys = build_equations(&fig8(), &BoundaryTargets::Unipotent).unwrap();
    for s in fig8_solutions() {
        let d = decoration(&s);
        let mut noisy = d.to_c64();
        noisy[1][3] += Complex64::new(1e-13, -1e-13);
        assert_eq!(snap_decoration(&sys, &noisy, 1e-10).unwrap(), d);
    }
    let mut off = decoration(&fig8_solutions()[0]).to_c64();
    off[0][0] += Complex64::new(1e-4, 0.0);
    assert!(snap_decoration(&sys, &off, 1e-10).is_none());
    assert_eq!(snap_scalar(Complex64::new(0.5, 0.75f64.sqrt()), -3, 100, 1e-12), Some(Scalar::omega()));
}

#[test]
fn continuation_moves_boundary_invariants() {
    use crate::holonomy::eigenvalue_pair;
    let cx = fig8();
    let sys = build_equations(&cx, &BoundaryTargets::Free).unwrap();
    let start = decoration(&fig8_solutions()[0]).to_c64();
    let opts = FamilyOptions { steps: 20, step: 1e-2, tangent: TangentSelection::Index(0), newton: NewtonOptions::default() };
    let fam = continue_family(&sys, &start, &opts).unwrap();
    assert_eq!(fam.len(), 21);
    assert!(fam.iter().all(|r| r.residual < 1e-12));
    let (a, _) = cx.link_homology_basis(0).unwrap();
    let last = zcoords_c64(&fam[20].shapes).unwrap();
    let (ca, _) = eigenvalue_pair(&last, &a).unwrap();
    let (_, b) = cx.link_homology_basis(0).unwrap();
    let (cb, _) = eigenvalue_pair(&last, &b).unwrap();
    assert!((ca - 1.0).norm() > 1e-4 || (cb - 1.0).norm() > 1e-4);

    let still = FamilyOptions { step: 0.0, ..opts };
    let fam0 = continue_family(&sys, &start, &still).unwrap();
    assert!(fam0.iter().all(|r| r.shapes == fam0[0].shapes));
}

#[test]
fn monomial_round_trips() {
    let m = Monomial::parse("z41 /w32 z31 1/w24 w24^3").unwrap();
    assert_eq!(m.to_string(), "z31 z41 w24^2 w32^-1");
    let s = serde_json::to_string(&m).unwrap();
    assert_eq!(serde_json::from_str::<Monomial>(&s).unwrap(), m);
    assert!(Monomial::parse("q12").is_err());
    assert_eq!(Monomial::one().to_string(), "1");
}

#[test]
fn decoration_json_is_tagged() {
    let d = decoration(&fig8_solutions()[0]);
    let s = serde_json::to_string(&d).unwrap();
    assert!(s.starts_with("[[{\"exact\":"));
    assert_eq!(serde_json::from_str::<Decoration>(&s).unwrap(), d);
}

#[test]
fn standard_table_matches_transcription() {
    let table = figure_eight_standard_structures();
    assert_eq!(table.len(), 4);
    let three = fig8_solutions();
    assert_eq!(table[0].decoration, decoration(&three[0]));
    assert_eq!(table[2].decoration, decoration(&three[1]));
    assert_eq!(table[3].decoration, decoration(&three[2]));
    let sys = build_equations(&fig8(), &BoundaryTargets::Unipotent).unwrap();
    for s in &table {
        assert!(sys.holds_exactly(&s.decoration).unwrap(), "{}", s.name);
        assert_eq!(classify_figure_eight(&s.decoration.to_c64(), 1e-9), Some((table.iter().position(|t| t.name == s.name).unwrap(), false)));
    }
    assert_eq!(classify_figure_eight(&table[1].decoration.conj().to_c64(), 1e-9), Some((1, true)));
}

#[test]
fn small_multistart_finds_only_standard_structures() {
    let sys = build_equations(&fig8(), &BoundaryTargets::Unipotent).unwrap();
    let seeds: Vec<u64> = (0..300).collect();
    let rep = multistart(&sys, &seeds, &NewtonOptions::default(), 1e-6);
    assert!(rep.converged > 10);
    for c in &rep.clusters {
        assert!(classify_figure_eight(&c.representative, 1e-6).is_some(), "{:?}", c.representative);
    }
    let again = multistart(&sys, &seeds, &NewtonOptions::default(), 1e-6);
    assert_eq!(again.converged, rep.converged);
    assert_eq!(again.clusters.iter().map(|c| c.first_seed).collect::<Vec<_>>(), rep.clusters.iter().map(|c| c.first_seed).collect::<Vec<_>>());
}
