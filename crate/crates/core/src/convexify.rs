//! Wedge replacement, convex subdivision, the constraint battery and the
//! parameter search.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::{atlas_with, forced_corner_in, CornerTable, ForcedStatus};
use crate::geometry::{AngleSum, GeometryError, Isometry, Point, Turn};
use crate::polygon;
use crate::protoset::{EdgeLabel, Mark, PlacedTile, Prototile, Protoset, ProtosetError, TileName};
use crate::scalar::Scalar;

/// Wedge base angle as a direction pair, and apex position along the edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WedgeSpec {
    pub alpha: [Scalar; 2],
    pub apex_param: Scalar,
}

/// A point in a plan: the name of a wedged vertex (`v3`, `B3`, `N5`), a
/// declared interior point, or explicit coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRef {
    Name(String),
    At(Point),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceName {
    pub name: String,
    /// The piece is the face to the left of this directed edge.
    pub edge: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TilePlan {
    pub tile: String,
    #[serde(default)]
    pub points: BTreeMap<String, Point>,
    pub chords: Vec<[String; 2]>,
    #[serde(default)]
    pub pieces: Vec<PieceName>,
    /// Rotation about a point by `k * 30` degrees that must map the
    /// subdivision onto itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<PlanSymmetry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub named: BTreeMap<String, PointRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSymmetry {
    pub about: PointRef,
    pub turns_30: i64,
}

/// An angle identity exempted from the sum checks, by `piece@vertex` refs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleIdentity {
    pub sum: Vec<String>,
    pub equals: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexifyDecl {
    pub wedge: WedgeSpec,
    pub plans: Vec<TilePlan>,
    /// Full-turn vertex figures the construction creates on purpose.
    #[serde(default)]
    pub triads: Vec<Vec<String>>,
    #[serde(default)]
    pub whitelist: Vec<AngleIdentity>,
    #[serde(default)]
    pub exempt_c2: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ConvexifyError {
    #[error("wedge spec: {0}")]
    BadWedge(String),
    #[error("tile `{tile}`: wedge replacement is degenerate ({detail})")]
    DegenerateWedge { tile: String, detail: String },
    #[error("plan for `{tile}`: {detail}")]
    Plan { tile: String, detail: String },
    #[error("piece `{piece}` of `{tile}` is not convex")]
    NonConvex { tile: String, piece: String },
    #[error("named points: {0}")]
    Relation(String),
    #[error("search exhausted after {0} candidates")]
    Exhausted(usize),
    #[error(transparent)]
    Protoset(#[from] ProtosetError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn plan_err(tile: &str, detail: impl Into<String>) -> ConvexifyError {
    ConvexifyError::Plan { tile: tile.into(), detail: detail.into() }
}

impl WedgeSpec {
    pub fn new(alpha: Turn, apex_param: Scalar) -> Result<Self, ConvexifyError> {
        let w = WedgeSpec { alpha: [alpha.dot().clone(), alpha.cross().clone()], apex_param };
        w.check()?;
        Ok(w)
    }

    pub fn check(&self) -> Result<(), ConvexifyError> {
        if !self.alpha[0].is_positive() || !self.alpha[1].is_positive() {
            return Err(ConvexifyError::BadWedge("alpha must lie strictly between 0 and 90 degrees".into()));
        }
        let t = &self.apex_param;
        if !t.is_positive() || *t >= Scalar::one() || *t == Scalar::frac(1, 2) {
            return Err(ConvexifyError::BadWedge("apex_param must lie in (0, 1) and differ from 1/2".into()));
        }
        Ok(())
    }

    pub fn alpha(&self) -> Turn {
        Turn::new(self.alpha[0].clone(), self.alpha[1].clone()).expect("checked direction")
    }

    fn rise(&self) -> Scalar {
        let tan = self.alpha[1].checked_div(&self.alpha[0]).expect("checked direction");
        &self.apex_param * &tan
    }

    /// Apex of the bump replacing edge `a -> b` of a counter-clockwise tile.
    pub fn bump_apex(&self, a: &Point, b: &Point) -> Point {
        let d = b - a;
        &(a + &d.scale(&self.apex_param)) - &d.perp().scale(&self.rise())
    }

    /// Apex of the nick replacing edge `a -> b`; it coincides with the bump
    /// apex of the reversed edge `b -> a`.
    pub fn nick_apex(&self, a: &Point, b: &Point) -> Point {
        let d = b - a;
        &(a + &d.scale(&(Scalar::one() - &self.apex_param))) + &d.perp().scale(&self.rise())
    }

    /// Interior angle of a tile at a bump apex.
    pub fn apex_turn(&self) -> Turn {
        let (a, b) = (Point::origin(), Point::int(1, 0));
        let p = self.bump_apex(&a, &b);
        Turn::between(&(&b - &p), &(&a - &p)).expect("apex off the edge")
    }
}

/// Boundary of the wedged tile with vertex names: `v{i}` for original
/// vertices, `B{i}` / `N{i}` for the apex replacing edge `i`.
pub fn wedged_cycle(t: &Prototile, spec: &WedgeSpec) -> Result<Vec<(String, Point)>, ConvexifyError> {
    spec.check()?;
    let n = t.len();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let (a, b) = t.edge(i);
        out.push((format!("v{i}"), a.clone()));
        match &t.labels[i] {
            EdgeLabel::Plain => {}
            EdgeLabel::Bump { .. } => out.push((format!("B{i}"), spec.bump_apex(a, b))),
            EdgeLabel::Nick { .. } => out.push((format!("N{i}"), spec.nick_apex(a, b))),
        }
    }
    let pts: Vec<Point> = out.iter().map(|(_, p)| p.clone()).collect();
    if let Some(p) = polygon::problems(&pts).into_iter().next() {
        return Err(ConvexifyError::DegenerateWedge { tile: t.name.0.clone(), detail: p });
    }
    Ok(out)
}

/// Replaces every labelled edge by its wedge; the result is unlabelled.
pub fn wedgeify(t: &Prototile, spec: &WedgeSpec) -> Result<Prototile, ConvexifyError> {
    let cyc = wedged_cycle(t, spec)?;
    Ok(Prototile::plain(&t.name.0, &t.color, cyc.into_iter().map(|(_, p)| p).collect()))
}

/// One face of a subdivided tile, in the tile's own frame.
#[derive(Clone, Debug)]
pub struct Face {
    pub piece: String,
    pub names: Vec<String>,
    pub pts: Vec<Point>,
    /// Carries the piece prototile onto this face; identity for the face
    /// that defines the piece.
    pub pose: Isometry,
}

impl Face {
    pub fn is_primary(&self) -> bool {
        self.pose == Isometry::identity()
    }
}

#[derive(Clone, Debug)]
pub struct Subdivision {
    pub tile: String,
    pub wedged: Vec<(String, Point)>,
    pub faces: Vec<Face>,
}

fn same_cycle(a: &[Point], b: &[Point]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(k) = b.iter().position(|p| *p == a[0]) else { return false };
    (0..a.len()).all(|i| a[i] == b[(k + i) % b.len()])
}

impl Subdivision {
    pub fn wedged_points(&self) -> Vec<Point> {
        self.wedged.iter().map(|(_, p)| p.clone()).collect()
    }

    fn boundary_edges(&self) -> BTreeSet<(String, String)> {
        let n = self.wedged.len();
        (0..n).map(|i| (self.wedged[i].0.clone(), self.wedged[(i + 1) % n].0.clone())).collect()
    }

    pub fn primaries(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| f.is_primary())
    }

    /// Edge `j` of a face lies on the wedged outline of the original tile.
    pub fn outer_edges(&self, f: &Face) -> Vec<bool> {
        let b = self.boundary_edges();
        let n = f.names.len();
        (0..n).map(|j| b.contains(&(f.names[j].clone(), f.names[(j + 1) % n].clone()))).collect()
    }

    /// Piece prototiles, one per primary face, carrying recomposition marks.
    pub fn pieces(&self, color: &str) -> Vec<Prototile> {
        self.primaries()
            .map(|f| {
                let mut t = Prototile::plain(&f.piece, color, f.pts.clone());
                let n = f.pts.len();
                t.marks = self
                    .outer_edges(f)
                    .iter()
                    .enumerate()
                    .filter(|(_, &o)| o)
                    .map(|(j, _)| Mark(f.pts[j].clone(), f.pts[(j + 1) % n].clone()))
                    .collect();
                t.group_tag = Some(self.tile.clone());
                t
            })
            .collect()
    }

    /// All faces as placed pieces in the frame of the original tile.
    pub fn placements(&self) -> Vec<PlacedTile> {
        self.faces.iter().map(|f| PlacedTile::new(&f.piece, f.pose.clone())).collect()
    }

    pub fn corner(&self, piece: &str, vertex: &str) -> Option<(usize, Point)> {
        let f = self.primaries().find(|f| f.piece == piece)?;
        let k = f.names.iter().position(|n| n == vertex)?;
        Some((k, f.pts[k].clone()))
    }
}

fn plan_points(t: &Prototile, plan: &TilePlan, wedged: &[(String, Point)]) -> Result<BTreeMap<String, Point>, ConvexifyError> {
    let tile = &t.name.0;
    let outline: Vec<Point> = wedged.iter().map(|(_, p)| p.clone()).collect();
    let mut at: BTreeMap<String, Point> = wedged.iter().cloned().collect();
    for (k, p) in &plan.points {
        if at.contains_key(k) {
            return Err(plan_err(tile, format!("point name `{k}` clashes with a boundary vertex")));
        }
        let on_edge = (0..outline.len()).any(|i| polygon::on_segment(p, &outline[i], &outline[(i + 1) % outline.len()]));
        if on_edge || !polygon::contains_point(&outline, p) {
            return Err(plan_err(tile, format!("point `{k}` is not strictly inside the tile")));
        }
        at.insert(k.clone(), p.clone());
    }
    Ok(at)
}

fn resolve(at: &BTreeMap<String, Point>, r: &PointRef, tile: &str) -> Result<Point, ConvexifyError> {
    match r {
        PointRef::At(p) => Ok(p.clone()),
        PointRef::Name(n) => at.get(n).cloned().ok_or_else(|| plan_err(tile, format!("unknown point `{n}`"))),
    }
}

/// Cuts the wedged tile along the plan's chords. Every face must be convex
/// and either named by the plan or the image of a named face under the
/// declared symmetry.
pub fn subdivide(t: &Prototile, plan: &TilePlan, spec: &WedgeSpec) -> Result<Subdivision, ConvexifyError> {
    let tile = t.name.0.as_str();
    let wedged = wedged_cycle(t, spec)?;
    let at = plan_points(t, plan, &wedged)?;
    let mut adj: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let n = wedged.len();
    for i in 0..n {
        let (a, b) = (&wedged[i].0, &wedged[(i + 1) % n].0);
        adj.entry(a.clone()).or_default().insert(b.clone());
        adj.entry(b.clone()).or_default().insert(a.clone());
    }
    let outline: Vec<Point> = wedged.iter().map(|(_, p)| p.clone()).collect();
    let mut segs: Vec<(Point, Point)> = (0..n).map(|i| (outline[i].clone(), outline[(i + 1) % n].clone())).collect();
    for [a, b] in &plan.chords {
        let pa = at.get(a).ok_or_else(|| plan_err(tile, format!("unknown point `{a}`")))?;
        let pb = at.get(b).ok_or_else(|| plan_err(tile, format!("unknown point `{b}`")))?;
        if a == b || adj.get(a).is_some_and(|s| s.contains(b)) {
            return Err(plan_err(tile, format!("chord {a}-{b} repeats an edge")));
        }
        if at.iter().any(|(k, p)| k != a && k != b && polygon::on_segment(p, pa, pb)) {
            return Err(plan_err(tile, format!("chord {a}-{b} passes through a vertex")));
        }
        if segs.iter().any(|(p, q)| polygon::segments_cross(pa, pb, p, q)) {
            return Err(plan_err(tile, format!("chord {a}-{b} crosses another segment")));
        }
        if !polygon::contains_point(&outline, &pa.midpoint(pb)) {
            return Err(plan_err(tile, format!("chord {a}-{b} leaves the tile")));
        }
        segs.push((pa.clone(), pb.clone()));
        adj.entry(a.clone()).or_default().insert(b.clone());
        adj.entry(b.clone()).or_default().insert(a.clone());
    }
    for k in plan.points.keys() {
        match adj.get(k).map_or(0, |s| s.len()) {
            0 => return Err(plan_err(tile, format!("point `{k}` is not used by any chord"))),
            1 => return Err(plan_err(tile, format!("a chord ends at `{k}` inside a piece"))),
            _ => {}
        }
    }
    // trace faces: from u -> v continue along the edge at v that is the
    // first one clockwise from the way back to u
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut cycles: Vec<Vec<String>> = Vec::new();
    for (u, vs) in &adj {
        for v in vs {
            if seen.contains(&(u.clone(), v.clone())) {
                continue;
            }
            let mut cyc = Vec::new();
            let (mut a, mut b) = (u.clone(), v.clone());
            while seen.insert((a.clone(), b.clone())) {
                cyc.push(a.clone());
                let back = &at[&a] - &at[&b];
                let next = adj[&b]
                    .iter()
                    .filter(|w| **w != a)
                    .min_by(|w, x| {
                        let tw = Turn::between(&(&at[*w] - &at[&b]), &back).expect("distinct points");
                        let tx = Turn::between(&(&at[*x] - &at[&b]), &back).expect("distinct points");
                        tw.cmp_angle(&tx)
                    })
                    .cloned()
                    .unwrap_or_else(|| a.clone());
                a = b;
                b = next;
            }
            cycles.push(cyc);
        }
    }
    let mut faces: Vec<(Vec<String>, Vec<Point>)> = cycles
        .into_iter()
        .map(|c| {
            let pts = c.iter().map(|k| at[k].clone()).collect::<Vec<_>>();
            (c, pts)
        })
        .filter(|(_, pts)| polygon::area2(pts).is_positive())
        .collect();
    let total = faces.iter().fold(Scalar::zero(), |acc, (_, p)| acc + polygon::area(p));
    if total != polygon::area(&outline) {
        return Err(plan_err(tile, "faces do not partition the tile"));
    }
    let mut out: Vec<Face> = Vec::new();
    for pn in &plan.pieces {
        let [a, b] = &pn.edge;
        let k = faces
            .iter()
            .position(|(names, _)| (0..names.len()).any(|j| names[j] == *a && names[(j + 1) % names.len()] == *b))
            .ok_or_else(|| plan_err(tile, format!("no face lies left of {a}->{b}")))?;
        let (mut names, mut pts) = faces.remove(k);
        let j = names.iter().position(|x| x == a).expect("edge found above");
        names.rotate_left(j);
        pts.rotate_left(j);
        out.push(Face { piece: pn.name.clone(), names, pts, pose: Isometry::identity() });
    }
    if !faces.is_empty() {
        let Some(sym) = &plan.symmetry else {
            return Err(plan_err(tile, format!("{} face(s) are not named", faces.len())));
        };
        let centre = resolve(&at, &sym.about, tile)?;
        let g = Isometry::rotation_30(sym.turns_30, &centre);
        check_symmetry(t, &outline, &g)?;
        let order = 12 / num_integer::gcd(sym.turns_30.rem_euclid(12), 12).max(1);
        let named = out.clone();
        for (names, pts) in faces {
            let mut hit = None;
            'find: for f in &named {
                let mut gk = Isometry::identity();
                for _ in 1..order {
                    gk = g.compose(&gk);
                    let img: Vec<Point> = f.pts.iter().map(|p| gk.apply(p)).collect();
                    if same_cycle(&img, &pts) {
                        hit = Some((f.piece.clone(), gk.clone(), img));
                        break 'find;
                    }
                }
            }
            let (piece, pose, img) = hit.ok_or_else(|| plan_err(tile, format!("face {} is neither named nor a symmetric copy", names.join("-"))))?;
            let k = pts.iter().position(|p| *p == img[0]).expect("same cycle");
            let mut names = names;
            names.rotate_left(k);
            out.push(Face { piece, names, pts: img, pose });
        }
    }
    for f in &out {
        if !polygon::is_convex(&f.pts)? {
            return Err(ConvexifyError::NonConvex { tile: tile.into(), piece: f.piece.clone() });
        }
    }
    Ok(Subdivision { tile: tile.into(), wedged, faces: out })
}

fn check_symmetry(t: &Prototile, outline: &[Point], g: &Isometry) -> Result<(), ConvexifyError> {
    let img: Vec<Point> = outline.iter().map(|p| g.apply(p)).collect();
    let n = t.len();
    let shift = t.boundary.iter().position(|p| *p == g.apply(&t.boundary[0]));
    let labels_ok = shift.is_some_and(|s| (0..n).all(|i| t.labels[i] == t.labels[(i + s) % n]));
    if same_cycle(&img, outline) && labels_ok {
        Ok(())
    } else {
        Err(plan_err(&t.name.0, "declared symmetry does not map the tile onto itself"))
    }
}

/// A convex protoset obtained from a labelled one, with the bookkeeping
/// that ties every piece back to its original tile.
#[derive(Clone, Debug)]
pub struct ConvexInstance {
    pub protoset: Protoset,
    pub subdivisions: Vec<Subdivision>,
    pub wedge: WedgeSpec,
}

impl ConvexInstance {
    /// Corner index of `piece@vertex`.
    pub fn corner(&self, r: &str) -> Option<(TileName, usize)> {
        let (piece, v) = r.split_once('@')?;
        self.subdivisions.iter().find_map(|s| s.corner(piece, v)).map(|(k, _)| (TileName(piece.into()), k))
    }

    pub fn subdivision_of(&self, piece: &str) -> Option<&Subdivision> {
        self.subdivisions.iter().find(|s| s.primaries().any(|f| f.piece == piece))
    }

    /// Number of prototiles per vertex count.
    pub fn census(&self) -> BTreeMap<usize, usize> {
        let mut c = BTreeMap::new();
        for t in &self.protoset.tiles {
            *c.entry(t.len()).or_insert(0) += 1;
        }
        c
    }
}

pub fn build_instance(base: &Protoset, decl: &ConvexifyDecl, name: &str) -> Result<ConvexInstance, ConvexifyError> {
    decl.wedge.check()?;
    let mut tiles = Vec::new();
    let mut subs = Vec::new();
    for t in &base.tiles {
        let sub = match decl.plans.iter().find(|p| p.tile == t.name.0) {
            Some(plan) => subdivide(t, plan, &decl.wedge)?,
            None => {
                let whole = TilePlan {
                    tile: t.name.0.clone(),
                    points: BTreeMap::new(),
                    chords: Vec::new(),
                    pieces: vec![PieceName { name: t.name.0.clone(), edge: ["v0".into(), wedged_cycle(t, &decl.wedge)?[1].0.clone()] }],
                    symmetry: None,
                    named: BTreeMap::new(),
                };
                subdivide(t, &whole, &decl.wedge)?
            }
        };
        tiles.extend(sub.pieces(&t.color));
        subs.push(sub);
    }
    for p in &decl.plans {
        if base.tile_index(&TileName(p.tile.clone())).is_none() {
            return Err(ProtosetError::UnknownTile(p.tile.clone()).into());
        }
    }
    let notes = format!("Convex pieces of `{}` after wedge replacement and subdivision.", base.name);
    let ps = Protoset::new(name, base.reflections_allowed, tiles, &notes);
    Ok(ConvexInstance { protoset: ps, subdivisions: subs, wedge: decl.wedge.clone() })
}

const TOL: f64 = 1e-6;

/// A piece as the battery sees it.
#[derive(Clone, Debug)]
pub struct BatteryPiece {
    pub name: String,
    pub names: Vec<String>,
    pub pts: Vec<Point>,
    /// Edge `j` (from vertex `j`) is not on the original outline.
    pub inner: Vec<bool>,
}

impl BatteryPiece {
    /// A free-standing polygon whose edges all count as inner.
    pub fn planted(name: &str, pts: Vec<Point>) -> Self {
        let n = pts.len();
        BatteryPiece { name: name.into(), names: (0..n).map(|i| format!("p{i}")).collect(), pts, inner: vec![true; n] }
    }
}

/// Everything the constraint battery reads.
#[derive(Clone, Debug)]
pub struct BatteryInput {
    pub pieces: Vec<BatteryPiece>,
    pub alpha: Turn,
    /// `piece@vertex` corners sitting at a bump apex.
    pub apexes: BTreeSet<String>,
    pub triads: Vec<Vec<String>>,
    pub whitelist: Vec<AngleIdentity>,
    pub exempt_c2: Vec<String>,
    pub wz: Option<WzFrame>,
}

impl BatteryInput {
    pub fn from_instance(inst: &ConvexInstance, decl: &ConvexifyDecl) -> Result<Self, ConvexifyError> {
        let mut pieces = Vec::new();
        let mut apexes = BTreeSet::new();
        for s in &inst.subdivisions {
            for f in s.primaries() {
                let outer = s.outer_edges(f);
                for v in &f.names {
                    if v.starts_with('B') && s.wedged.iter().any(|(k, _)| k == v) {
                        apexes.insert(format!("{}@{}", f.piece, v));
                    }
                }
                pieces.push(BatteryPiece {
                    name: f.piece.clone(),
                    names: f.names.clone(),
                    pts: f.pts.clone(),
                    inner: outer.iter().map(|o| !o).collect(),
                });
            }
        }
        Ok(BatteryInput {
            pieces,
            alpha: decl.wedge.apex_turn(),
            apexes,
            triads: decl.triads.clone(),
            whitelist: decl.whitelist.clone(),
            exempt_c2: decl.exempt_c2.clone(),
            wz: WzFrame::from_decl(inst, decl)?,
        })
    }

    pub fn plant(&mut self, p: BatteryPiece) {
        self.pieces.push(p);
    }

    fn corners(&self) -> Vec<(String, Turn)> {
        let mut out = Vec::new();
        for p in &self.pieces {
            for (k, t) in polygon::corner_turns(&p.pts).into_iter().enumerate() {
                out.push((format!("{}@{}", p.name, p.names[k]), t));
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// Corners whose angles form the offending sum, or the offending pair.
    pub items: Vec<String>,
    /// What the sum hits, e.g. `tile5@v6`, `180-tile4@Q`, `360`.
    pub target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Scalar>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub name: String,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wz: Option<WzReport>,
}

impl BatteryReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, id: &str) -> &CheckResult {
        self.checks.iter().find(|c| c.id == id).expect("known check id")
    }

    pub fn verdicts(&self) -> Vec<bool> {
        self.checks.iter().map(|c| c.pass).collect()
    }
}

const MAX_WITNESSES: usize = 16;

struct Value {
    turn: Turn,
    deg: f64,
    label: String,
}

fn distinct_values(corners: &[(String, Turn)]) -> (Vec<Value>, BTreeMap<String, usize>) {
    let mut order: Vec<usize> = (0..corners.len()).collect();
    order.sort_by(|&a, &b| corners[a].1.cmp_angle(&corners[b].1).then_with(|| corners[a].0.cmp(&corners[b].0)));
    let mut vals: Vec<Value> = Vec::new();
    let mut of = BTreeMap::new();
    for i in order {
        let (name, t) = &corners[i];
        if !vals.last().is_some_and(|v| v.turn.same_angle(t)) {
            vals.push(Value { turn: t.clone(), deg: t.degrees_f64(), label: name.clone() });
        }
        of.insert(name.clone(), vals.len() - 1);
    }
    (vals, of)
}

/// Every multiset of `vals` (indices non-decreasing) with float total at
/// most `limit`.
fn for_each_multiset(vals: &[f64], limit: f64, visit: &mut dyn FnMut(&[usize], f64)) {
    fn rec(vals: &[f64], start: usize, chosen: &mut Vec<usize>, sum: f64, limit: f64, visit: &mut dyn FnMut(&[usize], f64)) {
        for i in start..vals.len() {
            let s = sum + vals[i];
            if s > limit + TOL {
                break;
            }
            chosen.push(i);
            visit(chosen, s);
            rec(vals, i, chosen, s, limit, visit);
            chosen.pop();
        }
    }
    rec(vals, 0, &mut Vec::new(), 0.0, limit, visit);
}

fn exact_sum(vals: &[Value], m: &[usize]) -> AngleSum {
    m.iter().fold(AngleSum::default(), |acc, &i| acc.add(&vals[i].turn))
}

fn push(ws: &mut Vec<Witness>, w: Witness) {
    if ws.len() < MAX_WITNESSES {
        ws.push(w);
    }
}

/// C1 to C5. Every sum is a multiset of distinct angle values with
/// repetition and total at most a full turn, confirmed exactly.
pub fn constraint_battery(input: &BatteryInput) -> Result<BatteryReport, ConvexifyError> {
    let corners = input.corners();
    let (vals, value_of) = distinct_values(&corners);
    let lookup = |r: &str| value_of.get(r).copied().ok_or_else(|| ConvexifyError::Relation(format!("unknown corner `{r}`")));
    let alpha = AngleSum::of(&input.alpha);
    let alpha_deg = input.alpha.degrees_f64();
    let alpha_val = vals.iter().position(|v| v.turn.same_angle(&input.alpha));

    let mut triads: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut marked: BTreeSet<usize> = BTreeSet::new();
    for t in &input.triads {
        let mut m = t.iter().map(|r| lookup(r)).collect::<Result<Vec<_>, _>>()?;
        m.sort();
        marked.extend(m.iter().copied());
        triads.insert(m);
    }
    let mut white: Vec<(Vec<usize>, usize)> = Vec::new();
    for w in &input.whitelist {
        let mut m = w.sum.iter().map(|r| lookup(r)).collect::<Result<Vec<_>, _>>()?;
        m.sort();
        white.push((m, lookup(&w.equals)?));
    }

    let mut c1 = Vec::new();
    for (name, t) in &corners {
        if !input.apexes.contains(name) && t.same_angle(&input.alpha) {
            push(&mut c1, Witness { items: vec![name.clone()], target: "alpha".into(), value: None });
        }
    }

    let mut c2 = Vec::new();
    for p in &input.pieces {
        if input.exempt_c2.contains(&p.name) {
            continue;
        }
        let n = p.pts.len();
        let lens = polygon::edge_len2(&p.pts);
        for j in 0..n {
            let i = (j + n - 1) % n;
            if p.inner[i] && p.inner[j] && lens[i] == lens[j] {
                let e = |k: usize| format!("{}:{}-{}", p.name, p.names[k], p.names[(k + 1) % n]);
                push(&mut c2, Witness { items: vec![e(i), e(j)], target: "equal length".into(), value: Some(lens[j].clone()) });
            }
        }
    }

    // (target degrees, value index, supplementary?)
    let mut targets: Vec<(f64, usize, bool)> = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        if Some(i) != alpha_val {
            targets.push((v.deg, i, false));
        }
        if v.deg < 180.0 + TOL {
            targets.push((180.0 - v.deg, i, true));
        }
    }
    targets.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut c3 = Vec::new();
    let mut c4 = Vec::new();
    let degs: Vec<f64> = vals.iter().map(|v| v.deg).collect();
    let label = |m: &[usize]| m.iter().map(|&i| vals[i].label.clone()).collect::<Vec<_>>();
    for_each_multiset(&degs, 360.0, &mut |m, s| {
        if m.len() >= 2 && (s - alpha_deg).abs() <= TOL && exact_sum(&vals, m).equals(&alpha) {
            push(&mut c1, Witness { items: label(m), target: "alpha".into(), value: None });
        }
        let lo = targets.partition_point(|t| t.0 < s - TOL);
        for &(_, vi, supp) in targets[lo..].iter().take_while(|t| t.0 <= s + TOL) {
            if !supp && m.len() < 2 {
                continue;
            }
            let goal = if supp { vals[vi].turn.supplement() } else { vals[vi].turn.clone() };
            if !exact_sum(&vals, m).equals(&AngleSum::of(&goal)) {
                continue;
            }
            if !supp && white.iter().any(|(wm, wv)| wm == m && *wv == vi) {
                continue;
            }
            let target = if supp { format!("180-{}", vals[vi].label) } else { vals[vi].label.clone() };
            push(&mut c3, Witness { items: label(m), target, value: None });
        }
        if (s - 360.0).abs() <= TOL
            && m.iter().any(|i| marked.contains(i))
            && !triads.contains(m)
            && exact_sum(&vals, m).is_full()
        {
            push(&mut c4, Witness { items: label(m), target: "360".into(), value: None });
        }
    });

    let (c5, wz) = match &input.wz {
        Some(f) => {
            let r = wz_check(f)?;
            let ws = r.items.iter().filter(|i| !i.pass).map(|i| Witness { items: vec![i.name.clone()], target: i.detail.clone(), value: i.value.clone() }).collect();
            (ws, Some(r))
        }
        None => (Vec::new(), None),
    };

    let mk = |id: &str, name: &str, ws: Vec<Witness>| CheckResult { id: id.into(), name: name.into(), pass: ws.is_empty(), witnesses: ws };
    Ok(BatteryReport {
        checks: vec![
            mk("C1", "alpha_unique", c1),
            mk("C2", "consecutive_inner_edges", c2),
            mk("C3", "no_theta_sums", c3),
            mk("C4", "abg_only_360", c4),
            mk("C5", "wz_length", c5),
        ],
        wz,
    })
}

/// Points of the length argument at the tile-7/8 meeting. `W'` and `Z'''`
/// are derived: `W` is `Z'` turned 90 degrees clockwise about `W'`, and
/// `Z'''` is `Z'` turned 60 degrees clockwise about `W'`.
#[derive(Clone, Debug, Serialize)]
pub struct WzFrame {
    pub w_prime: Point,
    pub z_prime: Point,
    pub z_second: Point,
    pub z_third: Point,
    pub w: Point,
    pub z: Point,
    /// `A`, `B`, `P` where triangle `A B C` is a translate of
    /// `Z' Z'' Z'''` and `P` the matching translate of `Z`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abp: Option<[Point; 3]>,
}

fn cw60(v: &Point) -> Point {
    let (c, s) = (Scalar::frac(1, 2), Scalar::quad((0, 1), (-1, 2)));
    Point::new(&(&c * &v.x) - &(&s * &v.y), &(&s * &v.x) + &(&c * &v.y))
}

impl WzFrame {
    /// `W' = (0,0)`, `Z' = (1,0)`, `Z''` completing the equilateral
    /// triangle on `Z' Z'''`, `Z` its centroid.
    pub fn canonical() -> Self {
        let wp = Point::origin();
        let zp = Point::int(1, 0);
        let z3 = cw60(&zp);
        let z2 = &(&zp + &z3) - &wp;
        let z = (&(&zp + &z2) + &z3).scale(&Scalar::frac(1, 3));
        WzFrame { w: Point::new(Scalar::zero(), Scalar::int(-1)), w_prime: wp, z_prime: zp, z_second: z2, z_third: z3, z, abp: None }
    }

    /// Derives `W'` and `Z'''` from `W` and `Z'`.
    pub fn from_points(z_prime: Point, z_second: Point, w: Point, z: Point, abp: Option<[Point; 3]>) -> Self {
        let d = &w - &z_prime;
        let half = Scalar::frac(1, 2);
        let off = Point::new(-&(&(&d.x + &d.y) * &half), &(&d.x - &d.y) * &half);
        let w_prime = &z_prime - &off;
        let z_third = &w_prime + &cw60(&(&z_prime - &w_prime));
        WzFrame { w_prime, z_prime, z_second, z_third, w, z, abp }
    }

    pub fn from_decl(inst: &ConvexInstance, decl: &ConvexifyDecl) -> Result<Option<Self>, ConvexifyError> {
        let Some(plan) = decl.plans.iter().find(|p| p.named.contains_key("W")) else { return Ok(None) };
        let sub = inst
            .subdivisions
            .iter()
            .find(|s| s.tile == plan.tile)
            .ok_or_else(|| plan_err(&plan.tile, "no subdivision for the named points"))?;
        let mut at: BTreeMap<String, Point> = sub.wedged.iter().cloned().collect();
        at.extend(plan.points.clone());
        let get = |k: &str| -> Result<Point, ConvexifyError> {
            let r = plan.named.get(k).ok_or_else(|| plan_err(&plan.tile, format!("named point `{k}` missing")))?;
            resolve(&at, r, &plan.tile)
        };
        let abp = if plan.named.contains_key("P") { Some([get("A")?, get("B")?, get("P")?]) } else { None };
        Ok(Some(WzFrame::from_points(get("Z'")?, get("Z''")?, get("W")?, get("Z")?, abp)))
    }

    pub fn c_point(&self) -> Option<Point> {
        self.abp.as_ref().map(|[a, _, _]| &self.z_third + &(a - &self.z_prime))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WzItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Scalar>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WzReport {
    pub items: Vec<WzItem>,
}

impl WzReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn item(&self, name: &str) -> Option<&WzItem> {
        self.items.iter().find(|i| i.name == name)
    }
}

pub fn wz_check(f: &WzFrame) -> Result<WzReport, ConvexifyError> {
    let a = &f.z_prime - &f.w_prime;
    if a.is_zero() {
        return Err(ConvexifyError::Relation("W' coincides with Z'".into()));
    }
    if &f.w - &f.w_prime != Point::new(a.y.clone(), -&a.x) {
        return Err(ConvexifyError::Relation("W is not Z' turned 90 degrees clockwise about W'".into()));
    }
    if &f.z_third - &f.w_prime != cw60(&a) {
        return Err(ConvexifyError::Relation("Z''' is not Z' turned 60 degrees clockwise about W'".into()));
    }
    let mut items = Vec::new();
    let mut item = |name: &str, pass: bool, detail: String, value: Option<Scalar>| items.push(WzItem { name: name.into(), pass, detail, value });

    let zw = f.z_prime.dist2(&f.w);
    let zz3 = f.z_prime.dist2(&f.z_third);
    item("z'w_longer", zw > zz3, format!("|Z'W|^2 = {zw}, |Z'Z'''|^2 = {zz3}"), Some(&zw - &zz3));

    let u = &f.z_prime - &f.z_third;
    let v = &f.w - &f.z_third;
    let mut t = Turn::between(&u, &v)?;
    if t.cross().is_negative() {
        t = t.negate();
    }
    let ok135 = t.cross().is_positive() && *t.cross() == -t.dot();
    item("angle_135", ok135, format!("at Z''': dot = {}, cross = {}", t.dot(), t.cross()), None);

    let t75 = Turn::between(&(&f.w_prime - &f.z_third), &v)?;
    let want = Scalar::quad((1, 2), (-1, 4));
    let c2 = t75.cos2();
    item("angle_75", t75.dot().is_positive() && c2 == want, format!("cos^2 = {c2}, expected (2-r3)/4"), Some(c2.clone()));

    let tri = ccw(&[f.z_prime.clone(), f.z_second.clone(), f.z_third.clone()]);
    item("w_outside", !polygon::contains_point(&tri, &f.w), "W against triangle Z'Z''Z'''".into(), None);

    let wz = f.w.dist2(&f.z);
    let mut rivals = vec![("Z'Z'''", zz3.clone()), ("Z'Z", f.z_prime.dist2(&f.z)), ("Z''Z", f.z_second.dist2(&f.z))];
    if let (Some([pa, pb, pp]), Some(pc)) = (&f.abp, f.c_point()) {
        rivals.push(("AP", pa.dist2(pp)));
        rivals.push(("BP", pb.dist2(pp)));
        rivals.push(("CP", pc.dist2(pp)));
    }
    for (n, r) in rivals {
        item(&format!("wz_longer_than_{n}"), wz > r, format!("|WZ|^2 = {wz}, |{n}|^2 = {r}"), Some(&wz - &r));
    }
    Ok(WzReport { items })
}

fn ccw(p: &[Point]) -> Vec<Point> {
    let mut v = p.to_vec();
    if polygon::area2(&v).is_negative() {
        v.reverse();
    }
    v
}

pub fn build_fig7(base: &Protoset) -> Result<ConvexInstance, ConvexifyError> {
    let decl = base.convexify.as_ref().ok_or_else(|| plan_err(&base.name, "protoset carries no convexify plan"))?;
    build_instance(base, decl, "convex_fig7")
}

/// The six convex prototiles built from the two-tile protoset.
pub fn build_fig7_instance() -> Result<Protoset, ConvexifyError> {
    Ok(build_fig7(&crate::builtins::schmitt_fig4())?.protoset)
}

#[derive(Clone, Debug, Serialize)]
pub struct SiteResult {
    pub site: String,
    pub status: ForcedStatus,
    pub figures: usize,
    /// Sits on the rotation centre of a symmetric plan. Equal spokes let a
    /// mirrored piece in there, so these sites are reported, not required.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub centre: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeStar {
    pub point: String,
    pub edges: Vec<String>,
    pub len2: Vec<Scalar>,
    pub distinct: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ForcingSummary {
    pub sites: Vec<SiteResult>,
    pub stars: Vec<EdgeStar>,
}

impl ForcingSummary {
    pub fn all_unique(&self) -> bool {
        self.sites.iter().all(|s| s.centre || s.status == ForcedStatus::Unique) && self.stars.iter().all(|s| s.distinct)
    }

    pub fn site(&self, name: &str) -> Option<&SiteResult> {
        self.sites.iter().find(|s| s.site == name)
    }
}

/// `forced_corner` at every corner that sits on an interior plan point or a
/// nick apex, and the distinctness of edge lengths around interior points.
pub fn verify_forcing(inst: &ConvexInstance) -> ForcingSummary {
    let table = CornerTable::new(&inst.protoset);
    let atlas = atlas_with(&table);
    let mut sites = Vec::new();
    let mut stars = Vec::new();
    for s in &inst.subdivisions {
        // the rotation centre of a symmetric plan is the point every face shares
        let centre = s.faces.iter().any(|f| !f.is_primary()).then(|| s.faces[0].names.iter().find(|n| s.faces.iter().all(|f| f.names.contains(n)))).flatten().cloned();
        let interior: BTreeSet<&String> =
            s.faces.iter().flat_map(|f| f.names.iter()).filter(|n| !s.wedged.iter().any(|(k, _)| k == *n)).collect();
        for f in s.primaries() {
            for (k, v) in f.names.iter().enumerate() {
                if interior.contains(v) || v.starts_with('N') {
                    let fc = forced_corner_in(&table, &atlas, &TileName(f.piece.clone()), k);
                    sites.push(SiteResult { site: format!("{}@{}", f.piece, v), status: fc.status, figures: fc.witnesses.len(), centre: centre.as_ref() == Some(v) });
                }
            }
        }
        for p in interior {
            let mut nb: BTreeMap<String, Scalar> = BTreeMap::new();
            for f in &s.faces {
                let n = f.names.len();
                if let Some(k) = f.names.iter().position(|x| x == p) {
                    for j in [(k + 1) % n, (k + n - 1) % n] {
                        nb.insert(f.names[j].clone(), f.pts[k].dist2(&f.pts[j]));
                    }
                }
            }
            let len2: Vec<Scalar> = nb.values().cloned().collect();
            let uniq: BTreeSet<&Scalar> = len2.iter().collect();
            // symmetric centres repeat their spokes on purpose
            let symmetric = s.faces.iter().any(|f| !f.is_primary());
            stars.push(EdgeStar {
                point: format!("{}:{}", s.tile, p),
                edges: nb.keys().map(|k| format!("{p}{k}")).collect(),
                distinct: symmetric || uniq.len() == len2.len(),
                len2,
            });
        }
    }
    ForcingSummary { sites, stars }
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig8Report {
    #[serde(skip)]
    pub protoset: Protoset,
    pub census: BTreeMap<usize, usize>,
    pub all_convex: bool,
    pub centrally_symmetric: bool,
    pub battery: BatteryReport,
    pub forcing: ForcingSummary,
}

/// Convex recomposition of the three-row protoset, checked as far as the
/// battery and forcing tools go; those results are informative.
pub fn build_fig8_instance() -> Result<Fig8Report, ConvexifyError> {
    let base = crate::builtins::sigma3_fig5();
    let decl = base.convexify.clone().ok_or_else(|| plan_err(&base.name, "no plan"))?;
    let inst = build_instance(&base, &decl, "convex_fig8")?;
    let all_convex = inst.protoset.tiles.iter().all(|t| polygon::is_convex(&t.boundary).unwrap_or(false));
    let centrally_symmetric = inst.subdivisions.iter().any(centrally_symmetric);
    let battery = constraint_battery(&BatteryInput::from_instance(&inst, &decl)?)?;
    let forcing = verify_forcing(&inst);
    Ok(Fig8Report { census: inst.census(), protoset: inst.protoset, all_convex, centrally_symmetric, battery, forcing })
}

/// The half turn about the centre of the outline maps every face onto a
/// congruent face of the same subdivision.
pub fn centrally_symmetric(s: &Subdivision) -> bool {
    let pts = s.wedged_points();
    let n = pts.len();
    if n % 2 == 1 {
        return false;
    }
    let centre = pts[0].midpoint(&pts[n / 2]);
    let g = Isometry::rotation_30(6, &centre);
    s.faces.iter().all(|f| {
        let img: Vec<Point> = f.pts.iter().map(|p| g.apply(p)).collect();
        s.faces.iter().any(|h| same_cycle(&img, &h.pts) && polygon::congruent(&f.pts, &h.pts, false).is_some())
    })
}

/// One point of the parameter space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub wedge: WedgeSpec,
    /// Overrides for declared plan points, by name.
    pub points: BTreeMap<String, Point>,
}

#[derive(Clone, Debug)]
pub struct SearchSpace {
    pub tans: Vec<Scalar>,
    pub apex_params: Vec<Scalar>,
    /// Candidate positions per plan point name.
    pub points: BTreeMap<String, Vec<Point>>,
}

impl SearchSpace {
    /// Field-representable wedge directions and a grid of offsets around
    /// each declared interior point of the template.
    pub fn around(decl: &ConvexifyDecl) -> Self {
        let tans = [(1, 2), (1, 3), (2, 5), (3, 5), (1, 4), (2, 3)].iter().map(|&(a, b)| Scalar::frac(a, b)).collect();
        let apex_params = [(3, 10), (1, 3), (2, 5), (1, 4)].iter().map(|&(a, b)| Scalar::frac(a, b)).collect();
        let steps = [0i64, 1, -1, 2, -2];
        let mut points = BTreeMap::new();
        for plan in &decl.plans {
            for (k, p) in &plan.points {
                let mut v = Vec::new();
                for &dx in &steps {
                    for &dy in &steps {
                        v.push(&Point::frac((dx, 40), (dy, 40)) + p);
                    }
                }
                points.insert(k.clone(), v);
            }
        }
        SearchSpace { tans, apex_params, points }
    }

    /// Every combination in a fixed order, then shuffled by `seed` unless
    /// the seed is zero.
    pub fn candidates(&self, seed: u64) -> Vec<Candidate> {
        let mut out = Vec::new();
        let keys: Vec<&String> = self.points.keys().collect();
        let mut combos: Vec<BTreeMap<String, Point>> = vec![BTreeMap::new()];
        for k in keys {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    self.points[k].iter().map(move |p| {
                        let mut c = c.clone();
                        c.insert(k.clone(), p.clone());
                        c
                    })
                })
                .collect();
        }
        for tan in &self.tans {
            for t in &self.apex_params {
                for c in &combos {
                    let wedge = WedgeSpec { alpha: [Scalar::one(), tan.clone()], apex_param: t.clone() };
                    out.push(Candidate { wedge, points: c.clone() });
                }
            }
        }
        if seed != 0 {
            out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub index: usize,
    pub tried: usize,
    pub decl: ConvexifyDecl,
    pub instance: ConvexInstance,
    pub battery: BatteryReport,
}

pub fn apply_candidate(template: &ConvexifyDecl, c: &Candidate) -> ConvexifyDecl {
    let mut d = template.clone();
    d.wedge = c.wedge.clone();
    for plan in &mut d.plans {
        for (k, p) in plan.points.iter_mut() {
            if let Some(q) = c.points.get(k) {
                *p = q.clone();
            }
        }
    }
    d
}

fn evaluate(base: &Protoset, template: &ConvexifyDecl, c: &Candidate) -> Option<(ConvexifyDecl, ConvexInstance, BatteryReport)> {
    let decl = apply_candidate(template, c);
    let inst = build_instance(base, &decl, "convex_fig7").ok()?;
    if !inst.protoset.validate().is_empty() {
        return None;
    }
    let battery = constraint_battery(&BatteryInput::from_instance(&inst, &decl).ok()?).ok()?;
    if battery.all_pass() && battery.wz.as_ref().is_none_or(|w| w.pass()) {
        Some((decl, inst, battery))
    } else {
        None
    }
}

/// First candidate, in list order, whose instance builds and passes the
/// battery. Candidates are evaluated in parallel blocks; the winner is
/// chosen by index, so the result does not depend on scheduling.
pub fn search_parameters(base: &Protoset, template: &ConvexifyDecl, cands: &[Candidate], budget: usize) -> Result<SearchOutcome, ConvexifyError> {
    let limit = cands.len().min(budget);
    let block = rayon::current_num_threads().max(1) * 2;
    let mut start = 0;
    while start < limit {
        let end = (start + block).min(limit);
        let hit = cands[start..end]
            .par_iter()
            .enumerate()
            .filter_map(|(i, c)| evaluate(base, template, c).map(|r| (start + i, r)))
            .min_by_key(|(i, _)| *i);
        if let Some((index, (decl, instance, battery))) = hit {
            return Ok(SearchOutcome { index, tried: index + 1, decl, instance, battery });
        }
        start = end;
    }
    Err(ConvexifyError::Exhausted(limit))
}
