//! Fixed instances with known counts.

use esph::delaunay::TriangulationKind;
use esph::harness::{gen_polytope, verify_theorems, TrialConfig};
use esph::pointfile::parse_points;
use esph::report::analyze;
use esph::shelling::line_shelling;
use esph::GeomError;

/// Eight vertices in R^3 with five Delaunay ears, only two of them BM-ears.
#[test]
fn eight_vertices_five_ears_two_bm_ears() {
    let cfg = TrialConfig::new(3, 8, 1, 557);
    let points = gen_polytope(&cfg, 556).unwrap();
    let r = verify_theorems(&points, 3).unwrap();
    assert_eq!((r.n, r.d_ears, r.bmd_ears), (8, 5, 2));
    assert!(r.defects.is_empty());

    let a = analyze(&points, 3).unwrap();
    assert_eq!(
        a.bm_ear_simplices(TriangulationKind::Delaunay),
        vec![vec![0, 4, 5, 6], vec![2, 3, 5, 7]]
    );
    // The three other ears have no line shelling ending at them.
    let l = &a.lifted;
    for ear in a.d_ears.simplices(&l.dt) {
        let f = l
            .lifted
            .facets
            .iter()
            .position(|f| f.vertex_ids == ear)
            .unwrap();
        let bm = a.bm.bmd_facet_ids.contains(&f);
        match line_shelling(&l.lifted, &l.groups, f) {
            Ok(order) => assert!(bm && order.facet_order.last() == Some(&f)),
            Err(GeomError::NotABMEar { .. }) => assert!(!bm),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn cube_corners_are_rejected() {
    let text = "3 8\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n";
    let cube = parse_points(text).unwrap();
    assert!(verify_theorems(&cube.points, 3).is_err());
}
