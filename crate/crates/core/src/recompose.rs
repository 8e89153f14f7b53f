//! Recomposition: reading a patch of original tiles off the marks carried
//! by a patch of pieces.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::geometry::Point;
use crate::patch::{analyze, image_of, Patch, TileImage};
use crate::polygon;
use crate::protoset::{PlacedTile, Protoset, ProtosetError};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize)]
pub struct Recomposition {
    pub ok: bool,
    /// The original tiles the marks describe, when every group closes up.
    pub patch: Option<Patch>,
    pub problems: Vec<String>,
}

/// Marks of a group as a single closed loop, in order.
fn loop_of(segments: &[(Point, Point)]) -> Option<Vec<Point>> {
    let mut next: BTreeMap<Point, Point> = BTreeMap::new();
    for (a, b) in segments {
        if next.insert(a.clone(), b.clone()).is_some() {
            return None;
        }
    }
    let start = segments.first()?.0.clone();
    let mut out = vec![start.clone()];
    let mut at = next.get(&start)?.clone();
    while at != start {
        if out.len() > segments.len() {
            return None;
        }
        out.push(at.clone());
        at = next.get(&at)?.clone();
    }
    (out.len() == segments.len()).then_some(out)
}

/// Drops vertices where the loop runs straight on.
fn corners(pts: &[Point]) -> Vec<Point> {
    let n = pts.len();
    (0..n)
        .filter(|&i| crate::geometry::orient(&pts[(i + n - 1) % n], &pts[i], &pts[(i + 1) % n]) != std::cmp::Ordering::Equal)
        .map(|i| pts[i].clone())
        .collect()
}

/// Each piece names its original tile through `group_tag`, in the
/// original's own frame. Pieces are grouped by the original they imply;
/// a group recomposes when its marks form one closed loop through the
/// original's vertices and its pieces fill that loop. The originals must
/// then form a valid patch.
pub fn check_recomposition(patch: &Patch, derived: &Protoset, original: &Protoset) -> Result<Recomposition, ProtosetError> {
    let mut problems = Vec::new();
    let a = analyze(derived, patch)?;
    problems.extend(a.problems.iter().map(|p| format!("pieces: {p}")));
    let mut groups: BTreeMap<TileImage, (PlacedTile, Vec<usize>)> = BTreeMap::new();
    for (i, t) in patch.tiles.iter().enumerate() {
        let proto = derived.tile(&t.prototile)?;
        let Some(tag) = &proto.group_tag else {
            problems.push(format!("piece {i} (`{}`) has no group tag", t.prototile));
            continue;
        };
        let orig = PlacedTile::new(tag, t.pose.clone());
        let w = original.world(&orig)?;
        groups.entry(image_of(&w)).or_insert((orig, Vec::new())).1.push(i);
    }
    let mut originals = Vec::new();
    for (img, (orig, members)) in &groups {
        let mut segs = Vec::new();
        let mut area = Scalar::zero();
        for &i in members {
            let t = &patch.tiles[i];
            let proto = derived.tile(&t.prototile)?;
            area = area + polygon::area(&polygon::transform(&proto.boundary, &t.pose));
            // a reflection reverses the sense in which marks run
            segs.extend(proto.marks.iter().map(|m| {
                let (a, b) = (t.pose.apply(&m.0), t.pose.apply(&m.1));
                if t.pose.reflected { (b, a) } else { (a, b) }
            }));
        }
        let what = format!("original `{}` at {:?}", orig.prototile, img.pts[0]);
        let Some(lp) = loop_of(&segs) else {
            problems.push(format!("{what}: marks do not close into one loop"));
            continue;
        };
        if polygon::area(&lp) != area {
            problems.push(format!("{what}: pieces do not fill the marked outline"));
            continue;
        }
        let outline: BTreeSet<&Point> = lp.iter().collect();
        if !img.pts.iter().all(|p| outline.contains(p)) || corners(&lp).len() < img.pts.len() {
            problems.push(format!("{what}: marked outline misses a vertex of the original"));
            continue;
        }
        originals.push(orig.clone());
    }
    if !problems.is_empty() {
        return Ok(Recomposition { ok: false, patch: None, problems });
    }
    let rebuilt = Patch::new(originals);
    let check = analyze(original, &rebuilt)?;
    let ok = check.is_valid();
    problems.extend(check.problems.iter().map(|p| format!("originals: {p}")));
    Ok(Recomposition { ok, patch: Some(rebuilt), problems })
}

/// The pieces of each original tile of `patch`, using each original's
/// subdivision (`placements` in the original frame).
pub fn decompose(patch: &Patch, subdivisions: &BTreeMap<String, Vec<PlacedTile>>) -> Option<Patch> {
    let mut out = Vec::new();
    for t in &patch.tiles {
        for p in subdivisions.get(&t.prototile.0)? {
            out.push(PlacedTile { prototile: p.prototile.clone(), pose: t.pose.compose(&p.pose) });
        }
    }
    Some(Patch::new(out))
}

/// A protoset whose pieces are the tiles themselves, each marked along its
/// whole boundary.
pub fn self_marked(ps: &Protoset) -> Protoset {
    let mut out = ps.clone();
    for t in &mut out.tiles {
        let n = t.len();
        t.marks = (0..n).map(|i| crate::protoset::Mark(t.boundary[i].clone(), t.boundary[(i + 1) % n].clone())).collect();
        t.group_tag = Some(t.name.0.clone());
    }
    out
}
