//! Finite patches: validity, adjacency, frontier and congruence.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::{orient, Isometry, Point};
use crate::polygon;
use crate::protoset::{world_edges_compatible, EdgeLabel, PlacedTile, Protoset, ProtosetError, TileName, WorldTile};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Patch {
    pub tiles: Vec<PlacedTile>,
}

impl Patch {
    pub fn new(tiles: Vec<PlacedTile>) -> Self {
        Patch { tiles }
    }

    pub fn single(name: &str) -> Self {
        Patch::new(vec![PlacedTile::new(name, Isometry::identity())])
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn transformed(&self, g: &Isometry) -> Patch {
        Patch::new(self.tiles.iter().map(|t| PlacedTile { prototile: t.prototile.clone(), pose: g.compose(&t.pose) }).collect())
    }
}

/// `(tile, world edge)` reference into a patch.
pub type EdgeRef = (usize, usize);

#[derive(Clone, Debug, Default)]
pub struct PatchAnalysis {
    pub adjacency: Vec<(EdgeRef, EdgeRef)>,
    pub frontier: Vec<EdgeRef>,
    pub problems: Vec<String>,
}

impl PatchAnalysis {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }
}

/// How two world edges meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Contact {
    None,
    /// Same segment, opposite direction.
    Exact,
    /// Collinear, opposite direction, overlapping in a positive length
    /// without being equal.
    Partial,
    /// Collinear overlap in the same direction (only possible when
    /// interiors overlap).
    Parallel,
}

pub fn contact(p: &Point, q: &Point, r: &Point, s: &Point) -> Contact {
    if orient(p, q, r) != Ordering::Equal || orient(p, q, s) != Ordering::Equal {
        return Contact::None;
    }
    let d = q - p;
    let l = d.norm2();
    let tr = (r - p).dot(&d);
    let ts = (s - p).dot(&d);
    let (lo, hi) = if tr < ts { (tr, ts) } else { (ts, tr) };
    let a = if lo.is_negative() { Scalar::zero() } else { lo };
    let b = if hi > l { l.clone() } else { hi };
    if a >= b {
        return Contact::None;
    }
    let opposite = (s - r).dot(&d).is_negative();
    if !opposite {
        return Contact::Parallel;
    }
    if p == s && q == r {
        Contact::Exact
    } else {
        Contact::Partial
    }
}

pub fn world_tiles(ps: &Protoset, patch: &Patch) -> Result<Vec<WorldTile>, ProtosetError> {
    patch.tiles.iter().map(|t| ps.world(t)).collect()
}

/// Full exact verification of a patch.
pub fn analyze(ps: &Protoset, patch: &Patch) -> Result<PatchAnalysis, ProtosetError> {
    let w = world_tiles(ps, patch)?;
    Ok(analyze_world(&w))
}

pub fn analyze_world(w: &[WorldTile]) -> PatchAnalysis {
    let mut out = PatchAnalysis::default();
    let boxes: Vec<_> = w.iter().map(|t| polygon::bbox_f64(&t.pts)).collect();
    let mut matched = vec![Vec::new(); w.len()];
    for (i, t) in w.iter().enumerate() {
        matched[i] = vec![false; t.pts.len()];
    }
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if polygon::bbox_apart(&boxes[i], &boxes[j]) {
                continue;
            }
            if polygon::interiors_meet(&w[i].pts, &w[j].pts) {
                out.problems.push(format!("tiles {i} and {j} overlap"));
                continue;
            }
            for ei in 0..w[i].pts.len() {
                let (p, q) = w[i].edge(ei);
                for ej in 0..w[j].pts.len() {
                    let (r, s) = w[j].edge(ej);
                    match contact(p, q, r, s) {
                        Contact::None | Contact::Parallel => {}
                        Contact::Exact => {
                            if world_edges_compatible(&w[i], ei, &w[j], ej) {
                                out.adjacency.push(((i, ei), (j, ej)));
                                matched[i][ei] = true;
                                matched[j][ej] = true;
                            } else {
                                out.problems.push(format!("edge {i}:{ei} meets {j}:{ej} with incompatible labels"));
                            }
                        }
                        Contact::Partial => {
                            if w[i].labels[ei] != EdgeLabel::Plain || w[j].labels[ej] != EdgeLabel::Plain {
                                out.problems.push(format!("labelled edge {i}:{ei} / {j}:{ej} meets partially"));
                            }
                        }
                    }
                }
            }
        }
    }
    for (i, t) in w.iter().enumerate() {
        for e in 0..t.pts.len() {
            if !matched[i][e] && !edge_covered(w, i, e) {
                out.frontier.push((i, e));
            }
        }
    }
    out
}

/// The edge is fully covered by opposite edges of other tiles.
pub fn edge_covered(w: &[WorldTile], i: usize, e: usize) -> bool {
    uncovered_parts(w, i, e).is_empty()
}

/// Uncovered sub-intervals of edge `e` of tile `i`, as parameter ranges
/// measured by `dot(x - p, q - p)` along the edge.
pub fn uncovered_parts(w: &[WorldTile], i: usize, e: usize) -> Vec<(Scalar, Scalar)> {
    uncovered_by(&w[i], e, w.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| t))
}

/// Uncovered sub-intervals of edge `e` of `me` given the other tiles.
pub fn uncovered_by<'a>(me: &WorldTile, e: usize, others: impl IntoIterator<Item = &'a WorldTile>) -> Vec<(Scalar, Scalar)> {
    let (p, q) = me.edge(e);
    let d = q - p;
    let l = d.norm2();
    let mut cover: Vec<(Scalar, Scalar)> = Vec::new();
    let eb = polygon::bbox_f64(&[p.clone(), q.clone()]);
    for t in others {
        if polygon::bbox_apart(&eb, &polygon::bbox_f64(&t.pts)) {
            continue;
        }
        for k in 0..t.pts.len() {
            let (r, s) = t.edge(k);
            if matches!(contact(p, q, r, s), Contact::Exact | Contact::Partial) {
                let a = (s - p).dot(&d);
                let b = (r - p).dot(&d);
                cover.push((a.max(Scalar::zero()), b.min(l.clone())));
            }
        }
    }
    cover.sort();
    let mut gaps = Vec::new();
    let mut at = Scalar::zero();
    for (a, b) in cover {
        if a > at {
            gaps.push((at.clone(), a.clone()));
        }
        if b > at {
            at = b;
        }
    }
    if at < l {
        gaps.push((at, l));
    }
    gaps
}

/// Canonical description of a placed tile's image: name, vertex cycle
/// starting at the least vertex, labels along that cycle, handedness.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileImage {
    pub name: TileName,
    pub pts: Vec<Point>,
    pub labels: Vec<EdgeLabel>,
    pub reflected: bool,
}

pub fn image_of(w: &WorldTile) -> TileImage {
    let n = w.pts.len();
    let k = (0..n).min_by(|&a, &b| w.pts[a].cmp(&w.pts[b])).unwrap_or(0);
    let labelled = w.labels.iter().any(|l| !l.is_plain());
    TileImage {
        name: w.name.clone(),
        pts: (0..n).map(|i| w.pts[(k + i) % n].clone()).collect(),
        labels: (0..n).map(|i| w.labels[(k + i) % n].clone()).collect(),
        reflected: labelled && w.reflected,
    }
}

pub fn image_set(ps: &Protoset, patch: &Patch) -> Result<BTreeSet<TileImage>, ProtosetError> {
    Ok(world_tiles(ps, patch)?.iter().map(image_of).collect())
}

/// Congruence of patches as sets of placed tiles, trying every isometry
/// that carries a reference edge of `a` onto an edge of `b`.
pub fn patches_congruent(ps: &Protoset, a: &Patch, b: &Patch) -> Result<bool, ProtosetError> {
    Ok(congruence_witness(ps, a, b)?.is_some())
}

pub fn congruence_witness(ps: &Protoset, a: &Patch, b: &Patch) -> Result<Option<Isometry>, ProtosetError> {
    if a.len() != b.len() {
        return Ok(None);
    }
    if a.is_empty() {
        return Ok(Some(Isometry::identity()));
    }
    let mut na: Vec<_> = a.tiles.iter().map(|t| &t.prototile).collect();
    let mut nb: Vec<_> = b.tiles.iter().map(|t| &t.prototile).collect();
    na.sort();
    nb.sort();
    if na != nb {
        return Ok(None);
    }
    let target = image_set(ps, b)?;
    let a0 = ps.world(&a.tiles[0])?;
    let (p, q) = a0.edge(0);
    let len = p.dist2(q);
    for t in &b.tiles {
        if t.prototile != a.tiles[0].prototile {
            continue;
        }
        let wt = ps.world(t)?;
        for k in 0..wt.pts.len() {
            let (r, s) = wt.edge(k);
            if r.dist2(s) != len {
                continue;
            }
            for refl in [false, true] {
                let g = if refl { Isometry::align(p, q, s, r, true) } else { Isometry::align(p, q, r, s, false) };
                let Ok(g) = g else { continue };
                let moved = a.transformed(&g);
                let imgs: Option<BTreeSet<TileImage>> =
                    moved.tiles.iter().map(|t| ps.world_unchecked(t).map(|w| image_of(&w))).collect();
                if imgs.as_ref() == Some(&target) {
                    return Ok(Some(g));
                }
            }
        }
    }
    Ok(None)
}

impl Protoset {
    /// World geometry ignoring the reflection policy (images under
    /// arbitrary isometries).
    pub fn world_unchecked(&self, p: &PlacedTile) -> Option<WorldTile> {
        self.tile(&p.prototile).ok().map(|t| crate::protoset::world_of(t, &p.pose))
    }
}
