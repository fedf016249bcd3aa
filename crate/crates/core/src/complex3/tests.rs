use super::*;

const FIG8: &str = include_str!("../../examples/data/fig8.json");
const SINGLE: &str = include_str!("../../examples/data/single_tet.json");

fn fig8() -> TriangulationComplex {
    parse_triangulation(FIG8, ParseOptions::default()).unwrap()
}

fn labels(w: &Wheel) -> String {
    w.edges.iter().map(|&(t, a, b)| edge_label(t, a, b)).collect::<Vec<_>>().join(" ")
}

#[test]
fn edge_index_round_trip() {
    for n in 0..12 {
        let (i, j) = edge_at(n);
        assert_eq!(edge_index(i, j), n);
    }
    assert_eq!(edge_at(0), (0, 1));
    assert_eq!(edge_at(11), (3, 2));
}

#[test]
fn figure_eight_wheels() {
    let cx = fig8();
    assert!(cx.is_closed());
    assert_eq!(cx.num_tetrahedra(), 2);
    let wheels = cx.oriented_wheels();
    assert_eq!(wheels.len(), 4);
    assert!(wheels.iter().all(|w| w.closed && w.edges.len() == 6));
    let got: Vec<String> = wheels.iter().map(labels).collect();
    assert_eq!(
        got,
        [
            "z12 w12 z13 w43 z43 w42",
            "z14 w14 z24 w23 z23 w13",
            "z21 w24 z34 w34 z31 w21",
            "z32 w32 z42 w41 z41 w31",
        ]
    );
    assert_eq!(cx.edge_classes().len(), 2);
    // the reverse of a wheel is a wheel, traversed backwards
    for w in wheels {
        let (t, a, b) = w.edges[0];
        let rev = &wheels[cx.wheel_id(t, b, a)];
        let mut flipped: Vec<OrientedEdge> = w.edges.iter().map(|&(t, a, b)| (t, b, a)).collect();
        flipped.reverse();
        let pos = rev.edges.iter().position(|e| *e == flipped[0]).unwrap();
        let rotated: Vec<OrientedEdge> = rev.edges[pos..].iter().chain(&rev.edges[..pos]).copied().collect();
        assert_eq!(rotated, flipped);
    }
}

#[test]
fn figure_eight_link_is_a_torus() {
    let cx = fig8();
    assert_eq!(cx.vertex_classes().len(), 1);
    let l = &cx.links()[0];
    assert_eq!(l.corners.len(), 8);
    assert_eq!((l.num_vertices, l.num_edges, l.euler), (4, 12, 0));
    assert_eq!(l.kind, LinkKind::Torus);
}

#[test]
fn single_tetrahedron_has_disc_links() {
    let cx = parse_triangulation(SINGLE, ParseOptions::default()).unwrap();
    assert_eq!(cx.boundary_faces().len(), 4);
    assert_eq!(cx.links().len(), 4);
    assert!(cx.links().iter().all(|l| l.kind == LinkKind::Disc));
    assert_eq!(cx.oriented_wheels().len(), 12);
    assert!(cx.oriented_wheels().iter().all(|w| !w.closed && w.edges.len() == 1));
    assert_eq!(cx.edge_wheel(0).unwrap_err(), ComplexError::BoundaryEdge(0));
    assert_eq!(cx.link_homology_basis(0).unwrap_err(), ComplexError::NoBasis(0));
}

#[test]
fn parse_errors() {
    let bad_json = r#"{"tetrahedra": 1}"#;
    assert!(matches!(parse_triangulation(bad_json, ParseOptions::default()), Err(ComplexError::Schema(_))));
    let extra = r#"{"tetrahedra": 1, "gluings": [], "colour": 3}"#;
    assert!(matches!(parse_triangulation(extra, ParseOptions::default()), Err(ComplexError::Schema(_))));

    let even = r#"{"tetrahedra": 2, "gluings": [
        {"face": 0, "tet": 0, "to_face": 0, "to_tet": 1, "vertex_map": [0, 1, 2, 3]}]}"#;
    assert_eq!(
        parse_triangulation(even, ParseOptions::default()).unwrap_err(),
        ComplexError::NonOrientable { tet: 0, face: 0 }
    );

    let clash = r#"{"tetrahedra": 3, "gluings": [
        {"face": 0, "tet": 0, "to_face": 1, "to_tet": 1, "vertex_map": [1, 0, 2, 3]},
        {"face": 0, "tet": 0, "to_face": 1, "to_tet": 2, "vertex_map": [1, 0, 2, 3]}]}"#;
    assert_eq!(
        parse_triangulation(clash, ParseOptions::default()).unwrap_err(),
        ComplexError::UnmatchedFace { tet: 0, face: 0 }
    );

    let not_perm = r#"{"tetrahedra": 2, "gluings": [
        {"face": 0, "tet": 0, "to_face": 0, "to_tet": 1, "vertex_map": [0, 0, 2, 3]}]}"#;
    assert!(matches!(parse_triangulation(not_perm, ParseOptions::default()), Err(ComplexError::Schema(_))));
}

#[test]
fn ordering_check_is_opt_in() {
    let strict = ParseOptions { require_ordered: true };
    // the figure-eight gluings reverse two vertices on every face
    assert!(matches!(parse_triangulation(FIG8, strict), Err(ComplexError::OrderingMismatch { .. })));
    let ordered = r#"{"tetrahedra": 2, "gluings": [
        {"face": 3, "tet": 0, "to_face": 2, "to_tet": 1, "vertex_map": [0, 1, 3, 2]}]}"#;
    assert!(parse_triangulation(ordered, strict).is_ok());
    let swapped = r#"{"tetrahedra": 2, "gluings": [
        {"face": 3, "tet": 0, "to_face": 3, "to_tet": 1, "vertex_map": [1, 0, 2, 3]}]}"#;
    assert_eq!(
        parse_triangulation(swapped, strict).unwrap_err(),
        ComplexError::OrderingMismatch { tet: 0, face: 3 }
    );
    assert!(parse_triangulation(swapped, ParseOptions::default()).is_ok());
}

#[test]
fn canonical_json_round_trip() {
    let cx = fig8();
    let s = cx.to_json();
    let back = parse_triangulation(&s, ParseOptions::default()).unwrap();
    assert_eq!(back.to_json(), s);
    assert_eq!(back.to_doc(), serde_json::from_str::<TriangulationDoc>(FIG8).unwrap());
    let k = s.find("\"gluings\"").unwrap();
    assert!(k < s.find("\"tetrahedra\"").unwrap());
}

#[test]
fn cell_boundaries_compose_to_zero() {
    for src in [FIG8, SINGLE] {
        let cx = parse_triangulation(src, ParseOptions::default()).unwrap();
        let cd = cx.cell_data();
        let dd = &cd.boundary * &cd.two_cells;
        assert!(dd.iter().all(|&v| v == 0));
    }
}

#[test]
fn phi_is_a_chain_map_up_to_boundaries() {
    // Φ sends cycles to cycles of 𝒟′; with a cycle x, ι(x, y) is unchanged
    // when y moves by a boundary.
    let cx = fig8();
    let cd = cx.cell_data();
    let (a, b) = cx.link_homology_basis(0).unwrap();
    let (ca, cb) = (a.chain(2), b.chain(2));
    for col in 0..cd.two_cells.ncols() {
        let bd: Vec<i64> = cd.two_cells.column(col).iter().copied().collect();
        let shifted: Vec<i64> = cb.iter().zip(&bd).map(|(x, y)| x + 3 * y).collect();
        assert_eq!(cx.intersection(&ca, &shifted), cx.intersection(&ca, &cb));
    }
}

#[test]
fn train_paths() {
    let cx = fig8();
    let b = LinkPath::parse("L z43, R w41").unwrap();
    assert_eq!(b.to_string(), "L z43, R w41");
    assert!(b.is_closed(&cx));
    assert!(b.reversed().is_closed(&cx));
    assert_eq!(b.reversed().reversed(), b);
    let gamma = LinkPath::parse("R z13, L w14, R z23, L w24, R z31, L w32, R z41, L w42").unwrap();
    assert!(gamma.is_closed(&cx));
    // each loop meets its reversal trivially and the pair meets once
    let (cb, cg) = (b.chain(2), gamma.chain(2));
    assert_eq!(cx.intersection(&cg, &cb).abs(), 1);
    assert_eq!(cx.intersection(&cb, &cb), 0);

    let broken = LinkPath::parse("L z43, L w41").unwrap();
    assert!(matches!(broken.validate(&cx), Err(ComplexError::InvalidPath(_))));
    assert!(!broken.is_closed(&cx));
    let back = LinkPath::parse("L z43, R z43").unwrap();
    assert!(back.validate(&cx).is_err());
    for bad in ["L z4", "Q z43", "L z44", "L x12", "L z15"] {
        assert!(LinkPath::parse(bad).is_err(), "{bad}");
    }
    assert_eq!(LinkPath::parse("L t3_12").unwrap().moves[0], Move::new(3, MoveKind::L, 0, 1));
}

#[test]
fn homology_basis_of_figure_eight() {
    let cx = fig8();
    let (a, b) = cx.link_homology_basis(0).unwrap();
    assert!(a.is_closed(&cx) && b.is_closed(&cx));
    let (ca, cb) = (a.chain(2), b.chain(2));
    assert_eq!(cx.intersection(&ca, &cb), 1);
    assert_eq!(cx.intersection(&cb, &ca), -1);
    let aa = a.concat(&a);
    assert!(aa.is_closed(&cx));
    assert_eq!(cx.intersection(&aa.chain(2), &cb), 2);
    assert_eq!(cx.link_homology_basis(0).unwrap(), (a, b));
}
