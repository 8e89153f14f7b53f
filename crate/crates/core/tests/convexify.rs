use std::collections::BTreeMap;

use proptest::prelude::*;

use morphtile::atlas::{forced_corner, ForcedStatus};
use morphtile::builtins;
use morphtile::convexify::*;
use morphtile::geometry::{Point, Turn};
use morphtile::polygon;
use morphtile::protoset::{EdgeLabel, Prototile, Protoset, TileName};
use morphtile::scalar::Scalar;

fn fig7() -> (ConvexInstance, ConvexifyDecl) {
    (build_fig7(&builtins::schmitt_fig4()).unwrap(), builtins::fig7_plan())
}

fn battery_input() -> BatteryInput {
    let (inst, decl) = fig7();
    BatteryInput::from_instance(&inst, &decl).unwrap()
}

fn verdicts(input: &BatteryInput) -> Vec<bool> {
    constraint_battery(input).unwrap().verdicts()
}

fn only_fails(k: usize) -> Vec<bool> {
    (0..5).map(|i| i != k).collect()
}

fn renamed(input: &BatteryInput, piece: &str) -> BatteryPiece {
    let mut p = input.pieces.iter().find(|p| p.name == piece).unwrap().clone();
    p.name = "planted".into();
    p
}

#[test]
fn unit_wedge() {
    let spec = WedgeSpec::new(Turn::new(Scalar::frac(4, 5), Scalar::frac(3, 5)).unwrap(), Scalar::frac(1, 3)).unwrap();
    let (a, b) = (Point::origin(), Point::int(1, 0));
    let apex = spec.bump_apex(&a, &b);
    // on the ray from `a` at the wedge angle below the edge, above x = 1/3
    let ray = Point::frac((4, 5), (-3, 5));
    assert!(apex.cross(&ray).is_zero() && apex.dot(&ray).is_positive());
    assert_eq!(apex.x, Scalar::frac(1, 3));
    assert_eq!(apex, Point::frac((1, 3), (-1, 4)));
    assert_eq!(apex.dist2(&a), Scalar::frac(25, 144));
    assert_eq!(apex.dist2(&b), Scalar::frac(73, 144));
    // the nick of an edge is the bump of the same edge seen from the other side
    assert_eq!(spec.nick_apex(&a, &b), spec.bump_apex(&b, &a));
}

#[test]
fn wedge_spec_limits() {
    let half = Scalar::frac(1, 2);
    assert!(WedgeSpec::new(Turn::new(Scalar::one(), Scalar::one()).unwrap(), half).is_err());
    assert!(WedgeSpec::new(Turn::new(Scalar::zero(), Scalar::one()).unwrap(), Scalar::frac(1, 3)).is_err());
    assert!(WedgeSpec::new(Turn::new(Scalar::one(), Scalar::one()).unwrap(), Scalar::one()).is_err());
}

#[test]
fn bump_and_nick_keep_area() {
    let lower = Prototile::new("lower", "", vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)], vec![EdgeLabel::Plain, EdgeLabel::Plain, EdgeLabel::bump("k"), EdgeLabel::Plain]);
    let upper = Prototile::new("upper", "", vec![Point::int(0, 1), Point::int(1, 1), Point::int(1, 2), Point::int(0, 2)], vec![EdgeLabel::nick("k"), EdgeLabel::Plain, EdgeLabel::Plain, EdgeLabel::Plain]);
    let spec = builtins::default_wedge();
    let (lw, uw) = (wedgeify(&lower, &spec).unwrap(), wedgeify(&upper, &spec).unwrap());
    assert_eq!(polygon::area(&lw.boundary) + polygon::area(&uw.boundary), Scalar::int(2));
    assert!(lw.labels.iter().all(|l| l.is_plain()));
    // the two wedges share their apex
    let apex = spec.bump_apex(&Point::int(1, 1), &Point::int(0, 1));
    assert!(lw.boundary.contains(&apex) && uw.boundary.contains(&apex));
}

fn square_plan(chords: &[(&str, &str)], points: &[(&str, Point)], pieces: &[(&str, &str, &str)]) -> TilePlan {
    TilePlan {
        tile: "sq".into(),
        points: points.iter().map(|(k, p)| (k.to_string(), p.clone())).collect(),
        chords: chords.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
        pieces: pieces.iter().map(|(n, a, b)| PieceName { name: n.to_string(), edge: [a.to_string(), b.to_string()] }).collect(),
        symmetry: None,
        named: BTreeMap::new(),
    }
}

#[test]
fn square_diagonal() {
    let sq = Prototile::plain("sq", "", vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)]);
    let plan = square_plan(&[("v0", "v2")], &[], &[("lo", "v0", "v1"), ("hi", "v2", "v3")]);
    let s = subdivide(&sq, &plan, &builtins::default_wedge()).unwrap();
    assert_eq!(s.faces.len(), 2);
    let areas: Vec<Scalar> = s.faces.iter().map(|f| polygon::area(&f.pts)).collect();
    assert_eq!(areas, vec![Scalar::frac(1, 2), Scalar::frac(1, 2)]);
    assert!(polygon::congruent(&s.faces[0].pts, &s.faces[1].pts, false).is_some());
}

#[test]
fn dangling_chord() {
    let sq = Prototile::plain("sq", "", vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)]);
    let plan = square_plan(&[("v0", "v2"), ("v1", "X")], &[("X", Point::frac((3, 4), (1, 2)))], &[("lo", "v0", "v1"), ("hi", "v2", "v3")]);
    let e = subdivide(&sq, &plan, &builtins::default_wedge()).unwrap_err();
    assert!(e.to_string().contains("inside a piece"), "{e}");
}

#[test]
fn fig7_census_and_shape() {
    let (inst, _) = fig7();
    assert_eq!(inst.protoset.tiles.len(), 6);
    assert!(inst.protoset.tiles.iter().all(|t| polygon::is_convex(&t.boundary).unwrap()));
    assert_eq!(inst.census(), [(5, 2), (6, 4)].into_iter().collect());
    assert!(inst.protoset.validate().is_empty());
    // the left tile is cut into three turned copies of one piece
    let left = inst.subdivision_of("tile1").unwrap();
    assert_eq!(left.faces.len(), 3);
    for f in &left.faces {
        assert!(polygon::congruent(&f.pts, &left.faces[0].pts, false).is_some());
    }
    for s in &inst.subdivisions {
        let whole = polygon::area(&s.wedged_points());
        let parts = s.faces.iter().fold(Scalar::zero(), |a, f| a + polygon::area(&f.pts));
        assert_eq!(whole, parts, "{}", s.tile);
    }
}

#[test]
fn battery_passes_on_fig7() {
    let r = constraint_battery(&battery_input()).unwrap();
    assert_eq!(r.verdicts(), vec![true; 5]);
    assert!(r.wz.unwrap().pass());
}

#[test]
fn planted_alpha_corner() {
    let mut input = battery_input();
    // an apex piece under a name the battery does not know as an apex
    let p = renamed(&input, "tile4");
    input.plant(p);
    assert_eq!(verdicts(&input), only_fails(0));
}

#[test]
fn planted_equal_inner_edges() {
    let mut input = battery_input();
    // the left piece has equal spokes; without its exemption C2 trips
    let p = renamed(&input, "tile1");
    input.apexes.insert("planted@B2".into());
    input.plant(p);
    let r = constraint_battery(&input).unwrap();
    assert_eq!(r.verdicts(), only_fails(1));
    assert!(r.check("C2").witnesses[0].items.iter().all(|e| e.starts_with("planted:")));
}

#[test]
fn planted_theta_sum() {
    let mut input = battery_input();
    input.whitelist.clear();
    let r = constraint_battery(&input).unwrap();
    assert_eq!(r.verdicts(), only_fails(2));
    assert_eq!(r.check("C3").witnesses[0].target, "tile5@v6");
}

#[test]
fn planted_extra_full_turn() {
    let mut input = battery_input();
    input.triads.retain(|t| !t.contains(&"tile7@N8".to_string()));
    assert_eq!(verdicts(&input), only_fails(3));
}

#[test]
fn planted_short_wz() {
    let mut input = battery_input();
    let f = input.wz.as_mut().unwrap();
    f.z = f.w.clone();
    assert_eq!(verdicts(&input), only_fails(4));
}

#[test]
fn reflex_beta_plus_gamma_breaks_c4() {
    let mut input = battery_input();
    let t4 = input.pieces.iter().find(|p| p.name == "tile4").unwrap();
    let k = t4.names.iter().position(|n| n == "B3").unwrap();
    let n = t4.pts.len();
    let (prev, apex, next) = (t4.pts[(k + n - 1) % n].clone(), t4.pts[k].clone(), t4.pts[(k + 1) % n].clone());
    // a dart whose reflex corner is the complement of the apex angle
    let mid = prev.midpoint(&next);
    let far = &apex + &(&apex - &mid).scale(&Scalar::int(3));
    let mut dart = vec![next, apex, prev, far];
    if !polygon::area2(&dart).is_positive() {
        dart.reverse();
    }
    input.plant(BatteryPiece::planted("dart", dart));
    assert!(!constraint_battery(&input).unwrap().check("C4").pass);
}

#[test]
fn wz_canonical_frame() {
    let f = WzFrame::canonical();
    assert_eq!(f.w, Point::int(0, -1));
    assert_eq!(f.z_third, Point::new(Scalar::frac(1, 2), Scalar::quad((0, 1), (-1, 2))));
    let r = wz_check(&f).unwrap();
    assert!(r.pass());
    assert_eq!(r.item("z'w_longer").unwrap().value, Some(Scalar::one()));
    assert_eq!(f.z_prime.dist2(&f.w), Scalar::int(2));
    assert_eq!(f.z_prime.dist2(&f.z_third), Scalar::one());
    assert!(r.item("angle_135").unwrap().pass);
    assert_eq!(r.item("angle_75").unwrap().value, Some(Scalar::quad((1, 2), (-1, 4))));
    assert!(r.item("w_outside").unwrap().pass);
}

#[test]
fn wz_relations_enforced() {
    let mut f = WzFrame::canonical();
    f.w = Point::int(0, -2);
    assert!(wz_check(&f).is_err());
}

#[test]
fn forcing_on_fig7() {
    let (inst, _) = fig7();
    let s = verify_forcing(&inst);
    assert!(s.all_unique());
    for site in ["tile4@Q", "tile5@Q", "tile6@Q", "tile5@R", "tile6@R", "tile7@R", "tile7@N8", "tile8@N8"] {
        assert_eq!(s.site(site).unwrap().status, ForcedStatus::Unique, "{site}");
    }
    let q = s.stars.iter().find(|x| x.point == "right:Q").unwrap();
    assert_eq!(q.len2.len(), 3);
    assert!(q.distinct);
    let (t, c) = inst.corner("tile4@Q").unwrap();
    let fc = forced_corner(&inst.protoset, &t, c);
    assert_eq!(fc.status, ForcedStatus::Unique);
    let mut names: Vec<&str> = fc.witnesses[0].fan.iter().map(|c| c.tile.0.as_str()).collect();
    names.sort();
    assert_eq!(names, ["tile4", "tile5", "tile6"]);
}

#[test]
fn beta_corners_meet_alpha_and_gamma() {
    let (inst, decl) = fig7();
    let input = BatteryInput::from_instance(&inst, &decl).unwrap();
    let alpha = decl.wedge.apex_turn();
    for triad in decl.triads.iter().filter(|t| t.iter().any(|r| input.apexes.contains(r))) {
        for r in triad.iter().filter(|r| !input.apexes.contains(*r)) {
            let (t, c) = inst.corner(r).unwrap();
            let fc = forced_corner(&inst.protoset, &t, c);
            assert_eq!(fc.status, ForcedStatus::Unique, "{r}");
            let fan = &fc.witnesses[0].fan;
            assert_eq!(fan.len(), 3);
            let has_alpha = fan.iter().any(|m| {
                let p = inst.protoset.tile(&m.tile).unwrap();
                polygon::corner_turns(&p.boundary)[m.corner].same_angle(&alpha)
            });
            assert!(has_alpha, "{r}");
        }
    }
}

#[test]
fn square_control_is_never_forced() {
    let ps = builtins::unit_square();
    for k in 0..4 {
        assert_eq!(forced_corner(&ps, &TileName("square".into()), k).status, ForcedStatus::Multiple);
    }
}

#[test]
fn search_is_deterministic() {
    let base = builtins::schmitt_fig4();
    let decl = builtins::fig7_plan();
    let space = SearchSpace::around(&decl);
    let cands = space.candidates(0);
    let a = search_parameters(&base, &decl, &cands, 64).unwrap();
    let b = search_parameters(&base, &decl, &cands, 64).unwrap();
    assert_eq!((a.index, &a.decl), (b.index, &b.decl));
    assert_eq!(a.instance.census(), [(5, 2), (6, 4)].into_iter().collect());
    assert!(a.battery.all_pass());
    let s1 = space.candidates(7);
    assert_eq!(s1, space.candidates(7));
    assert_ne!(s1, cands);
    let c = search_parameters(&base, &decl, &s1, 4096).unwrap();
    assert_eq!(c.index, search_parameters(&base, &decl, &s1, 4096).unwrap().index);
}

#[test]
fn empty_search_is_exhausted() {
    let e = search_parameters(&builtins::schmitt_fig4(), &builtins::fig7_plan(), &[], 100).unwrap_err();
    assert!(matches!(e, ConvexifyError::Exhausted(0)));
}

#[test]
fn fig8() {
    let t = std::time::Instant::now();
    let r = build_fig8_instance().unwrap();
    assert_eq!(r.census, [(4, 5), (5, 4), (6, 1), (7, 1)].into_iter().collect());
    assert_eq!(r.protoset.tiles.len(), 11);
    assert!(r.all_convex);
    assert!(r.centrally_symmetric);
    assert!(t.elapsed().as_secs() < 60);
}

#[test]
fn plan_round_trips() {
    let decl = builtins::fig7_plan();
    let text = serde_json::to_string(&decl).unwrap();
    let back: ConvexifyDecl = serde_json::from_str(&text).unwrap();
    assert_eq!(back, decl);
    let ps: Protoset = builtins::sigma3_fig5();
    assert_eq!(Protoset::from_json(&ps.to_json()).unwrap().convexify, ps.convexify);
}

fn rational() -> impl Strategy<Value = Scalar> {
    (1i64..1000).prop_map(|n| Scalar::frac(n, 1000))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// A point of the triangle, by barycentric weights; wherever the float
    /// margins clearly say admissible, the exact check agrees.
    #[test]
    fn wz_admissible_region(a in rational(), b in rational()) {
        prop_assume!(&a + &b < Scalar::one());
        let f0 = WzFrame::canonical();
        let c = Scalar::one() - &a - &b;
        let z = &(&f0.z_prime.scale(&a) + &f0.z_second.scale(&b)) + &f0.z_third.scale(&c);
        let f = WzFrame { z, ..f0 };
        let d = |p: &Point, q: &Point| p.dist2(q).to_f64();
        let wz = d(&f.w, &f.z);
        let rivals = [d(&f.z_prime, &f.z_third), d(&f.z_prime, &f.z), d(&f.z_second, &f.z)];
        let r = wz_check(&f).unwrap();
        if rivals.iter().all(|x| wz > x + 1e-9) {
            prop_assert!(r.pass());
        } else if rivals.iter().any(|x| wz < x - 1e-9) {
            prop_assert!(!r.pass());
        }
    }
}
