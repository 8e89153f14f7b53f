//! Named protosets shipped with the engine, plus small control instances.

use std::collections::BTreeMap;

use crate::convexify::{AngleIdentity, ConvexifyDecl, PieceName, PlanSymmetry, PointRef, TilePlan, WedgeSpec};
use crate::geometry::{Isometry, Point};
use crate::protoset::{EdgeLabel, Prototile, Protoset};
use crate::rows::RowDecl;
use crate::scalar::Scalar;

pub const NAMES: [&str; 4] = ["schmitt_fig4", "sigma3_fig5", "convex_fig7", "convex_fig8"];

const RECONSTRUCTED: &str = "Coordinates are a reconstruction: vertex and chord structure and \
edge labels follow the source figure, numeric positions are free choices checked by the engine.";

fn q(n: i64, d: i64) -> Scalar {
    Scalar::frac(n, d)
}

fn pt(x: (i64, i64), y: (i64, i64)) -> Point {
    Point::frac(x, y)
}

fn plain() -> EdgeLabel {
    EdgeLabel::Plain
}

fn b(k: &str) -> EdgeLabel {
    EdgeLabel::bump(k)
}

fn n(k: &str) -> EdgeLabel {
    EdgeLabel::nick(k)
}

pub fn by_name(name: &str) -> Option<Protoset> {
    match name {
        "schmitt_fig4" => Some(schmitt_fig4()),
        "sigma3_fig5" => Some(sigma3_fig5()),
        "convex_fig7" => crate::convexify::build_fig7_instance().ok(),
        "convex_fig8" => crate::convexify::build_fig8_instance().ok().map(|r| r.protoset),
        "unit_square" => Some(unit_square()),
        "regular_pentagon" => Some(regular_pentagon()),
        "dominoes" => Some(dominoes()),
        "fig3_rows" => Some(fig3_rows()),
        "square_row" => Some(square_row()),
        _ => None,
    }
}

/// The convex decagon of the two-tile protoset, in twentieths.
pub fn decagon_vertices() -> Vec<Point> {
    [(0, 0), (13, -16), (32, -21), (57, -20), (76, -14), (94, 39), (81, 55), (62, 60), (50, 62), (31, 56)]
        .iter()
        .map(|&(x, y)| pt((x, 20), (y, 20)))
        .collect()
}

/// Unit regular hexagon centred at the origin.
pub fn hexagon_vertices() -> Vec<Point> {
    let h = Scalar::quad((0, 1), (1, 2));
    vec![
        Point::new(q(1, 1), q(0, 1)),
        Point::new(q(1, 2), h.clone()),
        Point::new(q(-1, 2), h.clone()),
        Point::new(q(-1, 1), q(0, 1)),
        Point::new(q(-1, 2), -&h),
        Point::new(q(1, 2), -&h),
    ]
}

pub fn schmitt_fig4() -> Protoset {
    let deca = Prototile::new(
        "right",
        "#d9a441",
        decagon_vertices(),
        vec![b("a"), n("b"), plain(), b("c"), plain(), n("a"), b("b"), plain(), n("c"), plain()],
    );
    let hexa = Prototile::new("left", "#c0392b", hexagon_vertices(), (0..6).map(|i| if i % 2 == 0 { b("h") } else { n("h") }).collect());
    let mut ps = Protoset::new("schmitt_fig4", true, vec![hexa, deca], RECONSTRUCTED);
    ps.convexify = Some(fig7_plan());
    ps
}

fn named(pairs: &[(&str, &str)]) -> BTreeMap<String, PointRef> {
    pairs.iter().map(|(k, v)| (k.to_string(), PointRef::Name(v.to_string()))).collect()
}

fn chords(pairs: &[(&str, &str)]) -> Vec<[String; 2]> {
    pairs.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect()
}

fn piece(name: &str, from: &str, to: &str) -> PieceName {
    PieceName { name: name.into(), edge: [from.into(), to.into()] }
}

/// Wedge spec shared by both constructions: base angle with tangent 1/2,
/// apex at three tenths of the edge.
pub fn default_wedge() -> WedgeSpec {
    WedgeSpec { alpha: [q(2, 1), q(1, 1)], apex_param: q(3, 10) }
}

pub fn fig7_q() -> Point {
    pt((13, 5), (-1, 20))
}

pub fn fig7_r() -> Point {
    pt((12, 5), (0, 1))
}

pub fn fig7_plan() -> ConvexifyDecl {
    let left = TilePlan {
        tile: "left".into(),
        points: [("C".to_string(), Point::origin())].into_iter().collect(),
        chords: chords(&[("C", "N1"), ("C", "N3"), ("C", "N5")]),
        pieces: vec![piece("tile1", "C", "N1")],
        symmetry: Some(PlanSymmetry { about: PointRef::Name("C".into()), turns_30: 4 }),
        named: BTreeMap::new(),
    };
    let right = TilePlan {
        tile: "right".into(),
        points: [("Q".to_string(), fig7_q()), ("R".to_string(), fig7_r())].into_iter().collect(),
        chords: chords(&[("Q", "v3"), ("Q", "N5"), ("Q", "R"), ("R", "v7"), ("R", "N1"), ("N8", "v1")]),
        pieces: vec![
            piece("tile4", "Q", "v3"),
            piece("tile5", "Q", "N5"),
            piece("tile6", "R", "N1"),
            piece("tile7", "R", "v7"),
            piece("tile8", "v1", "N8"),
        ],
        symmetry: None,
        named: named(&[
            ("S", "v3"),
            ("T", "N5"),
            ("U", "v7"),
            ("V", "N1"),
            ("W", "v1"),
            ("Z", "N8"),
            ("Z'", "v9"),
            ("Z''", "v8"),
            ("A", "v3"),
            ("B", "v4"),
            ("P", "B3"),
            ("Q", "Q"),
            ("R", "R"),
        ]),
    };
    ConvexifyDecl {
        wedge: default_wedge(),
        plans: vec![left, right],
        triads: vec![
            vec!["tile1@N1".into(), "tile1@N3".into(), "tile1@B2".into()],
            vec!["tile4@Q".into(), "tile5@Q".into(), "tile6@Q".into()],
            vec!["tile5@R".into(), "tile6@R".into(), "tile7@R".into()],
            vec!["tile1@C".into(), "tile1@C".into(), "tile1@C".into()],
            vec!["tile4@N5".into(), "tile5@N5".into(), "tile4@B3".into()],
            vec!["tile6@N1".into(), "tile7@N1".into(), "tile4@B3".into()],
            vec!["tile7@N8".into(), "tile8@N8".into(), "tile4@B3".into()],
        ],
        whitelist: vec![AngleIdentity { sum: vec!["tile8@v1".into(), "tile7@v1".into()], equals: "tile5@v6".into() }],
        exempt_c2: vec!["tile1".into()],
    }
}

// Purple, green and burgundy tiles of width 1. The burgundy tile is
// centrally symmetric with its labels; zigzags have amplitude 1/15 and the
// S-shaped sides bow by 1/10.
pub fn sigma3_fig5() -> Protoset {
    let purple = Prototile::new(
        "purple",
        "#7b3f9e",
        vec![pt((0, 1), (0, 1)), pt((1, 1), (0, 1)), pt((9, 10), (1, 3)), pt((11, 10), (2, 3)), pt((1, 1), (1, 1)), pt((0, 1), (1, 1)), pt((1, 10), (2, 3)), pt((-1, 10), (1, 3))],
        vec![n("a"), b("p1"), plain(), n("p2"), b("a"), b("p2"), plain(), n("p1")],
    );
    let green = Prototile::new(
        "green",
        "#3e9e4f",
        vec![pt((0, 1), (0, 1)), pt((1, 3), (1, 15)), pt((2, 3), (-1, 15)), pt((1, 1), (0, 1)), pt((1, 1), (7, 5)), pt((0, 1), (7, 5))],
        vec![plain(), plain(), plain(), b("g"), b("a"), n("g")],
    );
    let red = Prototile::new(
        "burgundy",
        "#8c1c2c",
        vec![
            pt((0, 1), (0, 1)),
            pt((1, 3), (1, 15)),
            pt((2, 3), (-1, 15)),
            pt((1, 1), (0, 1)),
            pt((9, 10), (5, 9)),
            pt((11, 10), (10, 9)),
            pt((1, 1), (5, 3)),
            pt((2, 3), (8, 5)),
            pt((1, 3), (26, 15)),
            pt((0, 1), (5, 3)),
            pt((1, 10), (10, 9)),
            pt((-1, 10), (5, 9)),
        ],
        vec![plain(), plain(), plain(), b("r"), plain(), n("r"), plain(), plain(), plain(), b("r"), plain(), n("r")],
    );
    let mut ps = Protoset::new("sigma3_fig5", true, vec![purple, green, red], RECONSTRUCTED);
    let half = Isometry::rotation_30(6, &Point::origin());
    let row = |id: &str, tile: &str, pose: Isometry, right: [usize; 2], left: [usize; 2]| RowDecl {
        id: id.into(),
        tile: tile.into(),
        pose,
        right,
        left,
    };
    ps.rows = vec![
        row("P↑", "purple", Isometry::identity(), [1, 3], [5, 7]),
        row("G↑", "green", Isometry::identity(), [3, 3], [5, 5]),
        row("R", "burgundy", Isometry::identity(), [3, 5], [9, 11]),
        row("G↓", "green", half.clone(), [5, 5], [3, 3]),
        row("P↓", "purple", half, [5, 7], [1, 3]),
    ];
    ps.convexify = Some(fig8_plan());
    ps
}

pub fn fig8_x() -> Point {
    pt((1, 2), (13, 25))
}

pub fn fig8_y() -> Point {
    pt((3, 10), (7, 20))
}

pub fn fig8_plan() -> ConvexifyDecl {
    let purple = TilePlan {
        tile: "purple".into(),
        points: [("X".to_string(), fig8_x())].into_iter().collect(),
        chords: chords(&[("X", "N0"), ("X", "v2"), ("X", "N3"), ("X", "v6"), ("X", "N7")]),
        pieces: vec![
            piece("purple.a", "X", "N0"),
            piece("purple.b", "X", "v2"),
            piece("purple.c", "X", "N3"),
            piece("purple.d", "X", "v6"),
            piece("purple.e", "X", "N7"),
        ],
        symmetry: None,
        named: BTreeMap::new(),
    };
    let green = TilePlan {
        tile: "green".into(),
        points: [("Y".to_string(), fig8_y())].into_iter().collect(),
        chords: chords(&[("Y", "v1"), ("Y", "v4"), ("Y", "N5")]),
        pieces: vec![piece("green.a", "Y", "v1"), piece("green.b", "Y", "v4"), piece("green.c", "Y", "N5")],
        symmetry: None,
        named: BTreeMap::new(),
    };
    let red = TilePlan {
        tile: "burgundy".into(),
        points: BTreeMap::new(),
        chords: chords(&[("v1", "v4"), ("v7", "v10"), ("v5", "N11"), ("N5", "v11")]),
        pieces: vec![piece("burgundy.a", "v4", "v1"), piece("burgundy.b", "N11", "v5"), piece("burgundy.c", "v1", "v4")],
        symmetry: Some(PlanSymmetry { about: PointRef::At(pt((1, 2), (5, 6))), turns_30: 6 }),
        named: BTreeMap::new(),
    };
    ConvexifyDecl { wedge: default_wedge(), plans: vec![purple, green, red], triads: Vec::new(), whitelist: Vec::new(), exempt_c2: Vec::new() }
}

pub fn unit_square() -> Protoset {
    let t = Prototile::plain("square", "#bbbbbb", vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)]);
    Protoset::new("unit_square", true, vec![t], "Control instance.")
}

/// A rational pentagon close to the regular one. Every corner lies strictly
/// between 90 and 120 degrees, which is all the angle argument uses.
pub fn regular_pentagon() -> Protoset {
    let v = [(0, 1000), (-951, 309), (-588, -809), (588, -809), (951, 309)];
    let t = Prototile::plain("pentagon", "#9999cc", v.iter().map(|&(x, y)| pt((x, 1000), (y, 1000))).collect());
    Protoset::new("regular_pentagon", true, vec![t], "Control instance: rational approximation of the regular pentagon.")
}

pub fn dominoes() -> Protoset {
    let t = Prototile::plain("domino", "#88aacc", vec![Point::int(0, 0), Point::int(2, 0), Point::int(2, 1), Point::int(0, 1)]);
    Protoset::new("dominoes", true, vec![t], "Control instance.")
}

/// Two rows with identical outlines: a unit square and a 1x2 rectangle,
/// bump on top, nick below, lateral bump/nick.
pub fn fig3_rows() -> Protoset {
    let a = Prototile::new(
        "yellow",
        "#e8c547",
        vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)],
        vec![n("f"), b("y"), b("f"), n("y")],
    );
    let bl = Prototile::new(
        "blue",
        "#4a7bd0",
        vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 2), Point::int(0, 2)],
        vec![n("f"), b("u"), b("f"), n("u")],
    );
    let mut ps = Protoset::new("fig3_rows", true, vec![a, bl], "Control instance: two rows with the same outline.");
    ps.rows = vec![
        RowDecl { id: "A".into(), tile: "yellow".into(), pose: Isometry::identity(), right: [1, 1], left: [3, 3] },
        RowDecl { id: "B".into(), tile: "blue".into(), pose: Isometry::identity(), right: [1, 1], left: [3, 3] },
    ];
    ps
}

pub fn square_row() -> Protoset {
    let mut ps = unit_square();
    ps.name = "square_row".into();
    ps.rows = vec![RowDecl { id: "S".into(), tile: "square".into(), pose: Isometry::identity(), right: [1, 1], left: [3, 3] }];
    ps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_instances_validate() {
        for ps in [schmitt_fig4(), sigma3_fig5(), unit_square(), regular_pentagon(), dominoes(), fig3_rows(), square_row()] {
            assert_eq!(ps.validate(), vec![], "{}", ps.name);
        }
    }

    #[test]
    fn pentagon_corners_between_90_and_120() {
        let ps = regular_pentagon();
        for t in crate::polygon::corner_turns(&ps.tiles[0].boundary) {
            let d = t.degrees_f64();
            assert!(d > 90.5 && d < 119.5, "{d}");
        }
    }

    #[test]
    fn burgundy_is_centrally_symmetric() {
        let ps = sigma3_fig5();
        let t = &ps.tiles[2];
        let g = Isometry::rotation_30(6, &pt((1, 2), (5, 6)));
        for i in 0..12 {
            assert_eq!(g.apply(&t.boundary[i]), t.boundary[(i + 6) % 12]);
            assert_eq!(t.labels[i], t.labels[(i + 6) % 12]);
        }
    }
}
