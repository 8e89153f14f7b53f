use std::collections::BTreeSet;

use morphtile::builtins;
use morphtile::geometry::Point;
use morphtile::patch::{analyze, Patch};
use morphtile::protoset::{Protoset, TileName};
use morphtile::search::{surround, surround_vertices, tile_region, translation_row_check, Budget, RowForcing, SearchError, Status};

fn rect(w: i64, h: i64) -> Vec<Point> {
    vec![Point::int(0, 0), Point::int(w, 0), Point::int(w, h), Point::int(0, h)]
}

#[test]
fn square_corona() {
    let ps = builtins::unit_square();
    let r = surround(&ps, &Patch::single("square"), 1, Budget::default()).unwrap();
    assert_eq!(r.status, Status::Multiple);
    assert!(r.continuum);
    assert_eq!(r.witnesses.len(), 1);
    assert_eq!(r.witnesses[0].len(), 9);
    assert!(analyze(&ps, &r.witnesses[0]).unwrap().is_valid());
}

#[test]
fn pentagon_blocks_at_once() {
    let ps = builtins::regular_pentagon();
    let name = ps.tiles[0].name.0.clone();
    let r = surround(&ps, &Patch::single(&name), 1, Budget::default()).unwrap();
    assert_eq!(r.status, Status::Impossible);
    assert!(r.witnesses.is_empty());
    assert!(r.blocking.unwrap().contains("no corners fill"));
}

#[test]
fn budget_is_not_impossible() {
    let ps = builtins::unit_square();
    let e = surround(&ps, &Patch::single("square"), 1, Budget(2)).unwrap_err();
    assert!(matches!(e, SearchError::Budget(2)));
    let e = tile_region(&builtins::dominoes(), &rect(4, 4), Budget(5)).unwrap_err();
    assert!(matches!(e, SearchError::Budget(_)));
}

#[test]
fn bad_inputs() {
    let ps = builtins::unit_square();
    assert!(matches!(surround(&ps, &Patch::single("square"), 0, Budget::default()), Err(SearchError::Levels)));
    assert!(matches!(surround(&ps, &Patch::new(vec![]), 1, Budget::default()), Err(SearchError::BadSeed(_))));
    let cw: Vec<Point> = rect(2, 2).into_iter().rev().collect();
    assert!(matches!(tile_region(&ps, &cw, Budget::default()), Err(SearchError::BadRegion(_))));
    let bow = vec![Point::int(0, 0), Point::int(1, 1), Point::int(1, 0), Point::int(0, 1)];
    assert!(matches!(tile_region(&ps, &bow, Budget::default()), Err(SearchError::BadRegion(_))));
    assert!(matches!(translation_row_check(&ps, &TileName("square".into()), 9), Err(SearchError::NoEdge(..))));
}

#[test]
fn region_counts() {
    let d = builtins::dominoes();
    assert_eq!(tile_region(&d, &rect(2, 2), Budget::default()).unwrap().len(), 2);
    assert_eq!(tile_region(&d, &rect(3, 3), Budget::default()).unwrap().len(), 0);
    assert_eq!(tile_region(&d, &rect(2, 3), Budget::default()).unwrap().len(), 3);
    assert_eq!(tile_region(&d, &rect(2, 4), Budget::default()).unwrap().len(), 5);
    let sq = builtins::unit_square();
    let one = tile_region(&sq, &rect(2, 2), Budget::default()).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].len(), 4);
}

#[test]
fn region_tilings_are_valid_and_ordered() {
    let d = builtins::dominoes();
    let a = tile_region(&d, &rect(2, 4), Budget::default()).unwrap();
    let b = tile_region(&d, &rect(2, 4), Budget::default()).unwrap();
    assert_eq!(a, b);
    for p in &a {
        assert!(analyze(&d, p).unwrap().is_valid());
        assert_eq!(p.len(), 4);
    }
}

fn labelled(ps: &Protoset, tile: &str) -> Vec<usize> {
    let t = ps.tile(&TileName(tile.into())).unwrap();
    (0..t.len()).filter(|&k| !t.labels[k].is_plain()).collect()
}

#[test]
fn schmitt_edges_force_translates() {
    let ps = builtins::schmitt_fig4();
    for t in ["left", "right"] {
        for k in labelled(&ps, t) {
            let r = translation_row_check(&ps, &TileName(t.into()), k).unwrap();
            assert!(r.is_forced_translate(), "{t} e{k}: {r:?}");
        }
    }
}

#[test]
fn sigma3_row_edges_force_translates() {
    let ps = builtins::sigma3_fig5();
    for (t, edges) in [("purple", vec![1, 3, 4, 5, 7]), ("green", vec![3, 5]), ("burgundy", vec![3, 5, 9, 11])] {
        for k in edges {
            let r = translation_row_check(&ps, &TileName(t.into()), k).unwrap();
            assert!(r.is_forced_translate(), "{t} e{k}: {r:?}");
        }
    }
}

#[test]
fn row_changes_are_not_forced() {
    let ps = builtins::sigma3_fig5();
    // a green row may sit on purple, and purple may sit on an upturned green
    let top = translation_row_check(&ps, &TileName("green".into()), 4).unwrap();
    let RowForcing::NotForced { witnesses } = top else { panic!("{top:?}") };
    let names: BTreeSet<&str> = witnesses.iter().map(|w| w.prototile.0.as_str()).collect();
    assert!(names.contains("purple"));
    assert!(!translation_row_check(&ps, &TileName("purple".into()), 0).unwrap().is_forced_translate());
}

#[test]
fn plain_square_edges_slide() {
    let ps = builtins::unit_square();
    for k in 0..4 {
        assert!(matches!(translation_row_check(&ps, &TileName("square".into()), k).unwrap(), RowForcing::Continuum { .. }));
    }
}

#[test]
fn convex_tile5_closes_around_q_and_r() {
    let ps = morphtile::convexify::build_fig7_instance().unwrap();
    let r = surround_vertices(&ps, &Patch::single("tile5"), &[builtins::fig7_q(), builtins::fig7_r()], Budget::default()).unwrap();
    assert_eq!(r.status, Status::Unique);
    let names: BTreeSet<&str> = r.witnesses[0].tiles.iter().map(|t| t.prototile.0.as_str()).collect();
    assert_eq!(names, ["tile4", "tile5", "tile6", "tile7"].into_iter().collect());
}
