use proptest::prelude::*;

use morphtile::builtins;
use morphtile::geometry::{AngleSum, Isometry, Point, Turn};
use morphtile::polygon;
use morphtile::protoset::{edges_compatible, EdgeLabel, PlacedTile, Prototile, Protoset};
use morphtile::scalar::Scalar;

fn small() -> impl Strategy<Value = i64> {
    -40i64..=40
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (small(), 1i64..=12, small(), 1i64..=12).prop_map(|(a, b, c, d)| Scalar::quad((a, b), (c, d)))
}

fn rational() -> impl Strategy<Value = Scalar> {
    (small(), 1i64..=12).prop_map(|(a, b)| Scalar::frac(a, b))
}

fn point() -> impl Strategy<Value = Point> {
    (rational(), rational()).prop_map(|(x, y)| Point::new(x, y))
}

/// Rotations by multiples of 30 degrees about rational points, then an
/// optional mirror and a translation.
fn isometry() -> impl Strategy<Value = Isometry> {
    (0i64..12, point(), any::<bool>(), point()).prop_map(|(k, c, m, t)| {
        let g = Isometry::rotation_30(k, &c);
        let g = if m { g.compose(&Isometry::mirror_x()) } else { g };
        Isometry::translation(t).compose(&g)
    })
}

fn turn() -> impl Strategy<Value = Turn> {
    (scalar(), scalar()).prop_filter_map("zero vector", |(d, c)| Turn::new(d, c).ok())
}

/// A convex polygon from points on a circle-like fan, so congruence tests
/// see all sorts of shapes.
fn polygon() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point(), 3..7).prop_filter_map("degenerate", |pts| {
        let hull = hull(pts);
        (hull.len() >= 3).then_some(hull)
    })
}

fn hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in pts.iter().chain(pts.iter().rev().skip(1)) {
        while lower.len() >= 2 && (&lower[lower.len() - 1] - &lower[lower.len() - 2]).cross(&(p - &lower[lower.len() - 1])).signum() != std::cmp::Ordering::Greater {
            lower.pop();
        }
        lower.push(p.clone());
    }
    lower.pop();
    lower
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Scalar::one());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    /// Sign against integer arithmetic: with a, b of opposite sign the sum
    /// is positive iff a^2 > 3 b^2 (on a common denominator).
    #[test]
    fn sign_against_integers(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000, d in 1i64..1000) {
        let s = Scalar::quad((a, d), (b, d));
        let (a, b) = (a as i128, b as i128);
        let want = if a >= 0 && b >= 0 {
            (a + b).cmp(&0)
        } else if a <= 0 && b <= 0 {
            0.cmp(&-(a + b))
        } else if a > 0 {
            (a * a).cmp(&(3 * b * b))
        } else {
            (3 * b * b).cmp(&(a * a))
        };
        prop_assert_eq!(s.signum(), want);
        let (lo, hi) = s.interval();
        prop_assert!(lo <= s.to_f64() && s.to_f64() <= hi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn congruence_is_an_equivalence(p in polygon(), g in isometry(), h in isometry()) {
        prop_assert!(polygon::congruent(&p, &p, false).is_some());
        let img: Vec<Point> = polygon::transform(&p, &g);
        let img2: Vec<Point> = polygon::transform(&p, &h);
        let w = polygon::congruent(&p, &img, true);
        prop_assert!(w.is_some());
        prop_assert!(polygon::congruent(&img, &p, true).is_some());
        prop_assert!(polygon::congruent(&img, &img2, true).is_some());
        // without mirrors, only proper motions count (unless the polygon
        // is its own mirror image)
        if !g.reflected {
            prop_assert!(polygon::congruent(&p, &img, false).is_some());
        }
        let w = w.unwrap();
        let mapped: Vec<Point> = polygon::transform(&p, &w);
        prop_assert_eq!(polygon::area(&mapped), polygon::area(&img));
    }

    #[test]
    fn isometries_keep_distance(g in isometry(), a in point(), b in point()) {
        prop_assert_eq!(g.apply(&a).dist2(&g.apply(&b)), a.dist2(&b));
        let back = g.inverse().apply(&g.apply(&a));
        prop_assert_eq!(back, a);
    }

    #[test]
    fn turn_sums(a in turn(), b in turn(), c in turn()) {
        let ab = AngleSum::of(&a).add(&b);
        let ba = AngleSum::of(&b).add(&a);
        prop_assert!(ab.equals(&ba));
        let left = ab.add(&c);
        let right = AngleSum::of(&a).add_sum(&AngleSum::of(&b).add(&c));
        prop_assert!(left.equals(&right));
    }
}

fn labelled_square(name: &str, top: EdgeLabel) -> Prototile {
    Prototile::new(name, "", vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)], vec![EdgeLabel::Plain, EdgeLabel::Plain, top, EdgeLabel::Plain])
}

fn pair() -> Protoset {
    let low = labelled_square("low", EdgeLabel::bump("k"));
    let mut high = labelled_square("high", EdgeLabel::Plain);
    high.labels = vec![EdgeLabel::nick("k"), EdgeLabel::Plain, EdgeLabel::Plain, EdgeLabel::Plain];
    let twin = labelled_square("twin", EdgeLabel::bump("k"));
    Protoset::new("pair", true, vec![low, high, twin], "")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn compatibility_is_symmetric_and_invariant(g in isometry()) {
        let ps = pair();
        let low = PlacedTile::new("low", Isometry::identity());
        let high = PlacedTile::new("high", Isometry::translation(Point::int(0, 1)));
        let flipped = PlacedTile::new("twin", Isometry::translation(Point::int(1, 2)).compose(&Isometry::rotation_30(6, &Point::origin())));
        for (a, ea, b, eb, want) in [(&low, 2, &high, 0, true), (&low, 2, &flipped, 2, false)] {
            prop_assert_eq!(edges_compatible(&ps, a, ea, b, eb).unwrap(), want);
            prop_assert_eq!(edges_compatible(&ps, b, eb, a, ea).unwrap(), want);
            let ga = PlacedTile { prototile: a.prototile.clone(), pose: g.compose(&a.pose) };
            let gb = PlacedTile { prototile: b.prototile.clone(), pose: g.compose(&b.pose) };
            prop_assert_eq!(edges_compatible(&ps, &ga, ea, &gb, eb).unwrap(), want);
        }
    }
}

#[test]
fn plain_edges_of_different_length() {
    let ps = Protoset::new(
        "two",
        true,
        vec![
            Prototile::plain("a", "", vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)]),
            Prototile::plain("b", "", vec![Point::int(0, 0), Point::int(2, 0), Point::int(2, 1), Point::int(0, 1)]),
        ],
        "",
    );
    let a = PlacedTile::new("a", Isometry::identity());
    let b = PlacedTile::new("b", Isometry::translation(Point::int(0, 1)));
    assert!(!edges_compatible(&ps, &a, 2, &b, 0).unwrap());
}

#[test]
fn builtins_round_trip_and_validate() {
    for name in builtins::NAMES {
        let ps = builtins::by_name(name).unwrap();
        assert!(ps.validate().is_empty(), "{name}: {:?}", ps.validate());
        let back = Protoset::from_json(&ps.to_json()).unwrap();
        assert_eq!(back.to_json(), ps.to_json(), "{name}");
        assert_eq!(back.tiles, ps.tiles);
    }
    assert_eq!(builtins::sigma3_fig5().tiles.len(), 3);
}

#[test]
fn load_from_disk() {
    let dir = std::env::temp_dir().join(format!("morphtile-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sigma3.json");
    std::fs::write(&path, builtins::sigma3_fig5().to_json()).unwrap();
    let ps = Protoset::load(&path).unwrap();
    assert_eq!(ps.rows, builtins::sigma3_fig5().rows);
    std::fs::remove_dir_all(&dir).unwrap();
}
