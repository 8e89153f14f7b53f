//! Placement search: coronas, region tilings and forcing along an edge.
//!
//! New tiles are only ever placed with a vertex on an anchor point (an end
//! of an uncovered stretch of some edge) and one edge running along that
//! stretch. Tiles that could slide along a plain contact are reported as a
//! continuum rather than enumerated.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::CornerTable;
use crate::geometry::{orient, Isometry, Point, Turn};
use crate::patch::{contact, image_of, patches_congruent, uncovered_by, Contact, Patch, TileImage};
use crate::polygon;
use crate::protoset::{world_edges_compatible, world_of, EdgeLabel, PlacedTile, Protoset, ProtosetError, TileName, WorldTile};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search budget of {0} nodes exceeded")]
    Budget(usize),
    #[error("invalid seed patch: {0}")]
    BadSeed(String),
    #[error("invalid region: {0}")]
    BadRegion(String),
    #[error("tile `{0}` has no edge {1}")]
    NoEdge(TileName, usize),
    #[error("corona depth must be at least 1")]
    Levels,
    #[error(transparent)]
    Protoset(#[from] ProtosetError),
}

/// Upper bound on expanded search nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub usize);

impl Default for Budget {
    fn default() -> Self {
        Budget(200_000)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Unique,
    Multiple,
    Impossible,
}

/// All coronas found, up to congruence.
#[derive(Clone, Debug, Serialize)]
pub struct ForcedResult {
    pub status: Status,
    pub witnesses: Vec<Patch>,
    /// Some found corona has a family of tiles that slides along a plain
    /// line through the seed.
    pub continuum: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocking: Option<String>,
    pub nodes: usize,
}

#[derive(Clone, Debug)]
struct Tile {
    placed: PlacedTile,
    w: WorldTile,
    pieces: Vec<Vec<Point>>,
    bbox: [f64; 4],
    hole: bool,
}

impl Tile {
    fn new(placed: PlacedTile, w: WorldTile) -> Self {
        let pieces = polygon::convex_pieces(&w.pts);
        let bbox = polygon::bbox_f64(&w.pts);
        Tile { placed, w, pieces, bbox, hole: false }
    }

    fn overlaps(&self, o: &Tile) -> bool {
        !polygon::bbox_apart(&self.bbox, &o.bbox)
            && self.pieces.iter().any(|a| {
                let ba = polygon::bbox_f64(a);
                o.pieces.iter().any(|b| !polygon::bbox_apart(&ba, &polygon::bbox_f64(b)) && polygon::convex_interiors_meet(a, b))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Anchor {
    /// The new edge ends at the anchor and runs back along `+d`.
    Start,
    /// The new edge starts at the anchor and runs along `-d`.
    End,
}

/// An uncovered stretch of the directed line `from + t d`; new tiles go on
/// its right.
#[derive(Clone, Debug)]
struct Site {
    dir: Point,
    anchors: Vec<(Point, Anchor)>,
    what: String,
}

struct Engine<'a> {
    ps: &'a Protoset,
    table: CornerTable,
    /// Prototile images under the bare reflection choices.
    bases: Vec<(usize, bool, WorldTile)>,
}

fn pose_with(c: Scalar, s: Scalar, t: Point, reflected: bool) -> Isometry {
    Isometry { c, s, t, reflected }
}

impl<'a> Engine<'a> {
    fn new(ps: &'a Protoset) -> Self {
        let mut bases = Vec::new();
        for (i, t) in ps.tiles.iter().enumerate() {
            for r in [false, true] {
                if r && !ps.reflections_allowed {
                    continue;
                }
                bases.push((i, r, world_of(t, &Isometry { reflected: r, ..Isometry::identity() })));
            }
        }
        Engine { ps, table: CornerTable::new(ps), bases }
    }

    fn tile(&self, placed: PlacedTile) -> Result<Tile, ProtosetError> {
        let w = self.ps.world(&placed)?;
        Ok(Tile::new(placed, w))
    }

    /// Placements with an edge along `-dir` and a vertex on the anchor.
    /// `exact` restricts to edges of that squared length.
    fn anchored(&self, dir: &Point, anchor: &Point, kind: Anchor, exact: Option<&Scalar>) -> Vec<Tile> {
        let v = -dir;
        let v2 = v.norm2();
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for (ti, refl, base) in &self.bases {
            for k in 0..base.pts.len() {
                let (a, b) = base.edge(k);
                let u = b - a;
                let u2 = u.norm2();
                if exact.is_some_and(|l| *l != u2) {
                    continue;
                }
                // the rotation is exact only when |u||v| lies in the field
                let Some(m) = (&u2 * &v2).sqrt_exact() else { continue };
                let (Ok(c), Ok(s)) = (u.dot(&v).checked_div(&m), u.cross(&v).checked_div(&m)) else { continue };
                let rot = pose_with(c.clone(), s.clone(), Point::origin(), false);
                let t = match kind {
                    Anchor::Start => anchor - &rot.apply(b),
                    Anchor::End => anchor - &rot.apply(a),
                };
                let placed = PlacedTile { prototile: self.ps.tiles[*ti].name.clone(), pose: pose_with(c, s, t, *refl) };
                let w = world_of(&self.ps.tiles[*ti], &placed.pose);
                if seen.insert(image_of(&w)) {
                    out.push(Tile::new(placed, w));
                }
            }
        }
        out
    }

    fn gap_ok(&self, g: &Turn) -> bool {
        let straight = Turn::straight();
        if g.cross().is_zero() && g.dot().is_positive() {
            return true;
        }
        if g.same_angle(&straight) || self.table.fillable(g) {
            return true;
        }
        g.cmp_angle(&straight) == Ordering::Greater && self.table.fillable(&g.sub(&straight))
    }
}

fn uncovered(tiles: &[Tile], i: usize, e: usize) -> Vec<(Scalar, Scalar)> {
    uncovered_by(&tiles[i].w, e, tiles.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| &t.w))
}

/// Angular sectors occupied around `v`, as (start, end) directions
/// counter-clockwise.
fn sectors(tiles: &[Tile], v: &Point) -> Vec<(Point, Point)> {
    let (vx, vy) = v.to_f64();
    let mut out = Vec::new();
    for t in tiles {
        let b = &t.bbox;
        if vx < b[0] - 1e-9 || vx > b[2] + 1e-9 || vy < b[1] - 1e-9 || vy > b[3] + 1e-9 {
            continue;
        }
        let pts = &t.w.pts;
        let n = pts.len();
        if let Some(k) = pts.iter().position(|p| p == v) {
            out.push((&pts[(k + 1) % n] - v, &pts[(k + n - 1) % n] - v));
            continue;
        }
        for k in 0..n {
            let (p, q) = (&pts[k], &pts[(k + 1) % n]);
            if polygon::on_segment(v, p, q) {
                out.push((q - v, p - v));
                break;
            }
        }
    }
    out
}

/// Uncovered angles around `v`.
fn gaps(tiles: &[Tile], v: &Point) -> Vec<Turn> {
    let mut s = sectors(tiles, v);
    if s.is_empty() {
        return Vec::new();
    }
    let key = |d: &Point| Turn::of_vector(d).expect("nonzero");
    s.sort_by(|a, b| key(&a.0).cmp_angle(&key(&b.0)));
    let n = s.len();
    (0..n).map(|i| Turn::between(&s[i].1, &s[(i + 1) % n].0).expect("nonzero")).collect()
}

fn closed(g: &Turn) -> bool {
    g.cross().is_zero() && g.dot().is_positive()
}

fn surrounded(tiles: &[Tile], v: &Point) -> bool {
    let g = gaps(tiles, v);
    !g.is_empty() && g.iter().all(closed) && sectors(tiles, v).len() > 1
}

struct Search<'a, 'e> {
    eng: &'e Engine<'a>,
    limit: usize,
    nodes: usize,
    /// Tiles whose edges must be covered and vertices surrounded; `None`
    /// means every tile (region mode).
    core: Option<usize>,
    region: Option<Vec<Point>>,
    /// When set, only these points need surrounding.
    only: Option<Vec<Point>>,
    found: Vec<Vec<Tile>>,
    seen: BTreeSet<Vec<TileImage>>,
    blocking: Option<String>,
}

impl<'a, 'e> Search<'a, 'e> {
    fn new(eng: &'e Engine<'a>, limit: usize, core: Option<usize>) -> Self {
        Search { eng, limit, nodes: 0, core, region: None, only: None, found: Vec::new(), seen: BTreeSet::new(), blocking: None }
    }

    fn admissible(&self, tiles: &[Tile], n: &Tile) -> bool {
        self.fits(tiles, n) && self.closable(tiles, n)
    }

    /// Inside the region, no overlap, compatible contacts.
    fn fits(&self, tiles: &[Tile], n: &Tile) -> bool {
        if let Some(r) = &self.region {
            if polygon::area_inside(&n.w.pts, r) != polygon::area(&n.w.pts) {
                return false;
            }
        }
        for t in tiles {
            if polygon::bbox_apart(&t.bbox, &n.bbox) {
                continue;
            }
            if !t.hole && t.overlaps(n) {
                return false;
            }
            for i in 0..n.w.pts.len() {
                let (p, q) = n.w.edge(i);
                for j in 0..t.w.pts.len() {
                    let (r, s) = t.w.edge(j);
                    match contact(p, q, r, s) {
                        Contact::None => {}
                        Contact::Parallel => return false,
                        Contact::Exact => {
                            if !world_edges_compatible(&n.w, i, &t.w, j) {
                                return false;
                            }
                        }
                        Contact::Partial => {
                            if n.w.labels[i] != EdgeLabel::Plain || t.w.labels[j] != EdgeLabel::Plain {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Every angle left open around the new tile's vertices can still be
    /// filled by corners.
    fn closable(&self, tiles: &[Tile], n: &Tile) -> bool {
        let mut all: Vec<Tile> = tiles.to_vec();
        all.push(n.clone());
        let mut pts: Vec<&Point> = n.w.pts.iter().collect();
        for t in tiles {
            if polygon::bbox_apart(&t.bbox, &n.bbox) {
                continue;
            }
            pts.extend(t.w.pts.iter().filter(|p| polygon::contains_point(&n.w.pts, p)));
        }
        if let Some(only) = &self.only {
            pts.retain(|p| only.contains(p));
        }
        pts.iter().all(|v| gaps(&all, v).iter().all(|g| self.eng.gap_ok(g)))
    }

    fn is_target(&self, i: usize) -> bool {
        self.core.is_none_or(|c| i < c)
    }

    fn sites(&self, tiles: &[Tile]) -> Vec<Site> {
        let mut out = Vec::new();
        let mut open_vertices: Vec<Point> = Vec::new();
        for (i, t) in tiles.iter().enumerate() {
            if !self.is_target(i) || self.only.is_some() {
                continue;
            }
            for e in 0..t.w.pts.len() {
                let (p, q) = t.w.edge(e);
                let d = q - p;
                let l = d.norm2();
                for (a, b) in uncovered(tiles, i, e) {
                    let x = p.lerp(q, &a.checked_div(&l).expect("edge"));
                    let y = p.lerp(q, &b.checked_div(&l).expect("edge"));
                    out.push(Site { dir: d.clone(), anchors: vec![(x, Anchor::Start), (y, Anchor::End)], what: format!("edge {e} of tile {i}") });
                }
            }
            if self.core.is_some() {
                for v in &t.w.pts {
                    if !surrounded(tiles, v) && !open_vertices.contains(v) {
                        open_vertices.push(v.clone());
                    }
                }
            }
        }
        if let Some(only) = &self.only {
            open_vertices = only.iter().filter(|v| !surrounded(tiles, v)).cloned().collect();
        }
        for v in open_vertices {
            for (j, t) in tiles.iter().enumerate() {
                if self.is_target(j) && self.only.is_none() {
                    continue;
                }
                for e in 0..t.w.pts.len() {
                    let (p, q) = t.w.edge(e);
                    if !polygon::on_segment(&v, p, q) {
                        continue;
                    }
                    let d = q - p;
                    let l = d.norm2();
                    let tv = (&v - p).dot(&d);
                    for (a, b) in uncovered(tiles, j, e) {
                        let x = p.lerp(q, &a.checked_div(&l).expect("edge"));
                        let y = p.lerp(q, &b.checked_div(&l).expect("edge"));
                        let mut anchors = Vec::new();
                        if a <= tv && tv < b {
                            anchors.push((v.clone(), Anchor::Start));
                        }
                        if a < tv && tv <= b {
                            anchors.push((v.clone(), Anchor::End));
                        }
                        if anchors.is_empty() {
                            continue;
                        }
                        anchors.push((x, Anchor::Start));
                        anchors.push((y, Anchor::End));
                        out.push(Site { dir: d.clone(), anchors, what: format!("vertex {v:?}") });
                    }
                }
            }
        }
        out
    }

    fn complete(&self, tiles: &[Tile]) -> bool {
        if let Some(only) = &self.only {
            return only.iter().all(|v| surrounded(tiles, v));
        }
        tiles.iter().enumerate().filter(|(i, _)| self.is_target(*i)).all(|(i, t)| {
            (0..t.w.pts.len()).all(|e| uncovered(tiles, i, e).is_empty()) && (self.core.is_none() || t.w.pts.iter().all(|v| surrounded(tiles, v)))
        })
    }

    fn options(&self, tiles: &[Tile], site: &Site) -> Vec<Tile> {
        let mut cands: Vec<Tile> = Vec::new();
        let mut seen = BTreeSet::new();
        for (a, k) in &site.anchors {
            for t in self.eng.anchored(&site.dir, a, *k, None) {
                if seen.insert(image_of(&t.w)) {
                    cands.push(t);
                }
            }
        }
        let ok: Vec<bool> = cands.par_iter().map(|c| self.admissible(tiles, c)).collect();
        cands.into_iter().zip(ok).filter(|(_, k)| *k).map(|(c, _)| c).collect()
    }

    fn run(&mut self, tiles: &mut Vec<Tile>, depth: usize) -> Result<(), SearchError> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(SearchError::Budget(self.limit));
        }
        if self.complete(tiles) {
            let mut key: Vec<TileImage> = tiles.iter().filter(|t| !t.hole).map(|t| image_of(&t.w)).collect();
            key.sort();
            if self.seen.insert(key) {
                self.found.push(tiles.clone());
            }
            return Ok(());
        }
        let sites = self.sites(tiles);
        let mut best: Option<(Site, Vec<Tile>)> = None;
        for s in sites {
            let opts = self.options(tiles, &s);
            let n = opts.len();
            if best.as_ref().is_none_or(|(_, b)| n < b.len()) {
                best = Some((s, opts));
            }
            if n <= 1 {
                break;
            }
        }
        let Some((site, opts)) = best else { return Ok(()) };
        if opts.is_empty() && depth == 0 && self.blocking.is_none() {
            self.blocking = Some(site.what.clone());
        }
        for o in opts {
            tiles.push(o);
            let r = self.run(tiles, depth + 1);
            tiles.pop();
            r?;
        }
        Ok(())
    }
}

fn patch_of(tiles: &[Tile]) -> Patch {
    Patch::new(tiles.iter().filter(|t| !t.hole).map(|t| t.placed.clone()).collect())
}

/// Congruence classes, keeping the first member of each in input order.
fn distinct(ps: &Protoset, patches: Vec<Patch>) -> Result<Vec<Patch>, SearchError> {
    let mut out: Vec<Patch> = Vec::new();
    for p in patches {
        let mut dup = false;
        for q in &out {
            if patches_congruent(ps, &p, q)? {
                dup = true;
                break;
            }
        }
        if !dup {
            out.push(p);
        }
    }
    Ok(out)
}

fn sort_key(ps: &Protoset, p: &Patch) -> Vec<TileImage> {
    let mut k: Vec<TileImage> = p.tiles.iter().filter_map(|t| ps.world_unchecked(t)).map(|w| image_of(&w)).collect();
    k.sort();
    k
}

/// Tiles on the far side of a plain line through a seed edge can slide
/// along it.
fn slides(tiles: &[Tile], seed: usize) -> bool {
    for s in &tiles[..seed] {
        for e in 0..s.w.pts.len() {
            let (p, q) = s.w.edge(e);
            let d = q - p;
            let mut far = Vec::new();
            let mut ok = true;
            for t in tiles {
                let sides: BTreeSet<Ordering> = t.w.pts.iter().map(|x| orient(p, q, x)).filter(|o| *o != Ordering::Equal).collect();
                if sides.len() > 1 {
                    ok = false;
                    break;
                }
                for k in 0..t.w.pts.len() {
                    let (a, b) = t.w.edge(k);
                    if orient(p, q, a) == Ordering::Equal && orient(p, q, b) == Ordering::Equal && !t.w.labels[k].is_plain() {
                        ok = false;
                    }
                }
                if sides.contains(&Ordering::Less) {
                    far.push(t);
                }
            }
            if !ok || far.is_empty() {
                continue;
            }
            let mut cover: Vec<(Scalar, Scalar)> = Vec::new();
            for t in &far {
                for k in 0..t.w.pts.len() {
                    let (a, b) = t.w.edge(k);
                    if orient(p, q, a) == Ordering::Equal && orient(p, q, b) == Ordering::Equal {
                        let (ta, tb) = ((a - p).dot(&d), (b - p).dot(&d));
                        cover.push(if ta < tb { (ta, tb) } else { (tb, ta) });
                    }
                }
            }
            cover.sort();
            let mut merged: Vec<(Scalar, Scalar)> = Vec::new();
            for (a, b) in cover {
                match merged.last_mut() {
                    Some(m) if a <= m.1 => {
                        if b > m.1 {
                            m.1 = b;
                        }
                    }
                    _ => merged.push((a, b)),
                }
            }
            let inside = |x: &Point| {
                let t = (x - p).dot(&d);
                merged.iter().any(|(a, b)| *a < t && t < *b)
            };
            let on_line: Vec<&Point> = tiles[..seed].iter().flat_map(|t| t.w.pts.iter()).filter(|x| orient(p, q, x) == Ordering::Equal).collect();
            if on_line.iter().all(|x| inside(x)) {
                return true;
            }
        }
    }
    false
}

/// All `levels`-coronas of a seed patch.
pub fn surround(ps: &Protoset, seed: &Patch, levels: usize, budget: Budget) -> Result<ForcedResult, SearchError> {
    if levels == 0 {
        return Err(SearchError::Levels);
    }
    if seed.is_empty() {
        return Err(SearchError::BadSeed("empty".into()));
    }
    let a = crate::patch::analyze(ps, seed)?;
    if !a.is_valid() {
        return Err(SearchError::BadSeed(a.problems.join("; ")));
    }
    let eng = Engine::new(ps);
    let seed_tiles = seed.tiles.iter().map(|t| eng.tile(t.clone())).collect::<Result<Vec<_>, _>>()?;
    for t in &seed_tiles {
        for v in &t.w.pts {
            if let Some(g) = gaps(&seed_tiles, v).iter().find(|g| !eng.gap_ok(g)) {
                return Ok(ForcedResult {
                    status: Status::Impossible,
                    witnesses: Vec::new(),
                    continuum: false,
                    blocking: Some(format!("vertex {v:?}: no corners fill {:.6} degrees", g.degrees_f64())),
                    nodes: 0,
                });
            }
        }
    }
    let mut layer = vec![seed_tiles.clone()];
    let mut nodes = 0;
    let mut blocking = None;
    for _ in 0..levels {
        let mut next = Vec::new();
        for base in &layer {
            let mut s = Search::new(&eng, budget.0.saturating_sub(nodes), Some(base.len()));
            let mut tiles = base.clone();
            let r = s.run(&mut tiles, 0);
            nodes += s.nodes;
            r.map_err(|_| SearchError::Budget(budget.0))?;
            if blocking.is_none() {
                blocking = s.blocking.take();
            }
            next.extend(s.found);
        }
        layer = next;
    }
    let continuum = layer.iter().any(|t| slides(t, seed_tiles.len()));
    let mut patches: Vec<Patch> = layer.iter().map(|t| patch_of(t)).collect();
    patches.sort_by_cached_key(|p| sort_key(ps, p));
    let witnesses = distinct(ps, patches)?;
    let status = match (witnesses.len(), continuum) {
        (0, _) => Status::Impossible,
        (1, false) => Status::Unique,
        _ => Status::Multiple,
    };
    Ok(ForcedResult { status, blocking: if witnesses.is_empty() { blocking } else { None }, witnesses, continuum, nodes })
}

/// Every way to close up the given vertices of a seed patch, ignoring the
/// rest of its boundary.
pub fn surround_vertices(ps: &Protoset, seed: &Patch, vertices: &[Point], budget: Budget) -> Result<ForcedResult, SearchError> {
    let a = crate::patch::analyze(ps, seed)?;
    if seed.is_empty() || !a.is_valid() {
        return Err(SearchError::BadSeed(a.problems.join("; ")));
    }
    let eng = Engine::new(ps);
    let seed_tiles = seed.tiles.iter().map(|t| eng.tile(t.clone())).collect::<Result<Vec<_>, _>>()?;
    let mut s = Search::new(&eng, budget.0, Some(seed_tiles.len()));
    s.only = Some(vertices.to_vec());
    let mut tiles = seed_tiles;
    s.run(&mut tiles, 0)?;
    let mut patches: Vec<Patch> = s.found.iter().map(|t| patch_of(t)).collect();
    patches.sort_by_cached_key(|p| sort_key(ps, p));
    let witnesses = distinct(ps, patches)?;
    let status = match witnesses.len() {
        0 => Status::Impossible,
        1 => Status::Unique,
        _ => Status::Multiple,
    };
    Ok(ForcedResult { status, blocking: if witnesses.is_empty() { s.blocking } else { None }, witnesses, continuum: false, nodes: s.nodes })
}

/// Every tiling of a simple polygonal region, in canonical order.
pub fn tile_region(ps: &Protoset, region: &[Point], budget: Budget) -> Result<Vec<Patch>, SearchError> {
    if region.len() < 3 || !polygon::is_simple(region) {
        return Err(SearchError::BadRegion("not a simple polygon".into()));
    }
    if !polygon::area2(region).is_positive() {
        return Err(SearchError::BadRegion("vertices must run counter-clockwise".into()));
    }
    let eng = Engine::new(ps);
    let mut pts = region.to_vec();
    pts.reverse();
    let w = WorldTile { name: "region".into(), labels: vec![EdgeLabel::Plain; pts.len()], pts, reflected: false };
    let bbox = polygon::bbox_f64(&w.pts);
    let hole = Tile { placed: PlacedTile::new("region", Isometry::identity()), w, pieces: Vec::new(), bbox, hole: true };
    let mut s = Search::new(&eng, budget.0, None);
    s.region = Some(region.to_vec());
    let mut tiles = vec![hole];
    s.run(&mut tiles, 0)?;
    let mut out: Vec<Patch> = s.found.iter().map(|t| patch_of(t)).collect();
    out.sort_by_cached_key(|p| sort_key(ps, p));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RowForcing {
    ForcedTranslate { placement: PlacedTile },
    NotForced { witnesses: Vec<PlacedTile> },
    Continuum { witnesses: Vec<PlacedTile> },
}

impl RowForcing {
    pub fn is_forced_translate(&self) -> bool {
        matches!(self, RowForcing::ForcedTranslate { .. })
    }
}

/// What can sit across edge `edge` of `tile` (in its own frame), sharing
/// the edge end to end.
pub fn translation_row_check(ps: &Protoset, tile: &TileName, edge: usize) -> Result<RowForcing, SearchError> {
    let proto = ps.tile(tile)?;
    if edge >= proto.len() {
        return Err(SearchError::NoEdge(tile.clone(), edge));
    }
    let eng = Engine::new(ps);
    let me = eng.tile(PlacedTile { prototile: tile.clone(), pose: Isometry::identity() })?;
    let (p, q) = me.w.edge(edge);
    let d = q - p;
    let s = Search::new(&eng, 0, Some(1));
    let here = [me.clone()];
    let exact: Vec<Tile> = eng.anchored(&d, p, Anchor::Start, Some(&d.norm2())).into_iter().filter(|t| s.fits(&here, t)).collect();
    let witnesses: Vec<PlacedTile> = exact.iter().map(|t| t.placed.clone()).collect();
    if me.w.labels[edge].is_plain() {
        let eps = d.scale(&Scalar::frac(1, 1000));
        let mut tries = eng.anchored(&d, p, Anchor::Start, None);
        tries.extend(eng.anchored(&d, q, Anchor::End, None));
        for t in tries {
            if !s.fits(&here, &t) {
                continue;
            }
            for shift in [eps.clone(), -&eps] {
                let pose = Isometry::translation(shift).compose(&t.placed.pose);
                let moved = eng.tile(PlacedTile { prototile: t.placed.prototile.clone(), pose })?;
                if !moved.overlaps(&me) {
                    return Ok(RowForcing::Continuum { witnesses });
                }
            }
        }
    }
    if let [only] = exact.as_slice() {
        let imgs: BTreeSet<TileImage> = (0..proto.len())
            .map(|k| image_of(&world_of(proto, &Isometry::translation(&only.w.pts[0] - &proto.boundary[k]))))
            .collect();
        if imgs.contains(&image_of(&only.w)) {
            return Ok(RowForcing::ForcedTranslate { placement: only.placed.clone() });
        }
    }
    Ok(RowForcing::NotForced { witnesses })
}
