//! Vertex figures: every way corners can close up around a point.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::{AngleSum, Turn};
use crate::polygon;
use crate::protoset::{EdgeLabel, Protoset, TileName};
use crate::scalar::Scalar;

const SLACK: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CornerRef {
    pub tile: TileName,
    pub corner: usize,
    pub reflected: bool,
}

impl CornerRef {
    pub fn new(tile: &str, corner: usize, reflected: bool) -> Self {
        CornerRef { tile: tile.into(), corner, reflected }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureTotal {
    Full,
    Half,
}

/// A fan of corners listed counter-clockwise. A half figure runs from one
/// side of the straight edge it sits on to the other.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexFigure {
    pub total: FigureTotal,
    pub fan: Vec<CornerRef>,
    /// Rays (ray `k` separates members `k` and `k + 1`) where plain edges of
    /// different lengths meet, leaving a half-vertex further out.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subordinate: Vec<usize>,
    #[serde(skip)]
    pub classes: Vec<usize>,
}

/// One ray edge of a corner: squared length, label, and the interior
/// angle at its far end.
#[derive(Clone, Debug)]
struct RayEdge {
    len2: Scalar,
    label: EdgeLabel,
    far: Turn,
}

impl RayEdge {
    fn same(&self, o: &RayEdge) -> bool {
        self.len2 == o.len2 && self.label == o.label && self.far.same_angle(&o.far)
    }
}

#[derive(Clone, Debug)]
pub struct CornerClass {
    pub turn: Turn,
    pub deg: f64,
    cw: RayEdge,
    ccw: RayEdge,
    /// Handedness matters only when a labelled edge touches the corner.
    chiral: Option<bool>,
    pub members: Vec<CornerRef>,
}

/// Corners of a protoset grouped into interchangeable classes.
pub struct CornerTable {
    pub classes: Vec<CornerClass>,
    angles: Vec<(Turn, f64)>,
    mirror: Vec<Option<usize>>,
}

impl CornerTable {
    pub fn new(ps: &Protoset) -> Self {
        let mut classes: Vec<CornerClass> = Vec::new();
        for t in &ps.tiles {
            let n = t.len();
            let turns = polygon::corner_turns(&t.boundary);
            let lens = polygon::edge_len2(&t.boundary);
            for i in 0..n {
                let ip = (i + n - 1) % n;
                // unreflected: the clockwise ray runs along edge i, the other along edge i-1
                let out_e = RayEdge { len2: lens[i].clone(), label: t.labels[i].clone(), far: turns[(i + 1) % n].clone() };
                let in_e = RayEdge { len2: lens[ip].clone(), label: t.labels[ip].clone(), far: turns[ip].clone() };
                for refl in [false, true] {
                    if refl && !ps.reflections_allowed {
                        continue;
                    }
                    let (cw, ccw) = if refl { (in_e.clone(), out_e.clone()) } else { (out_e.clone(), in_e.clone()) };
                    let chiral = (!cw.label.is_plain() || !ccw.label.is_plain()).then_some(refl);
                    let member = CornerRef { tile: t.name.clone(), corner: i, reflected: refl };
                    let found = classes
                        .iter_mut()
                        .find(|c| c.turn.same_angle(&turns[i]) && c.chiral == chiral && c.cw.same(&cw) && c.ccw.same(&ccw));
                    match found {
                        Some(c) => c.members.push(member),
                        None => classes.push(CornerClass {
                            turn: turns[i].clone(),
                            deg: turns[i].degrees_f64(),
                            cw,
                            ccw,
                            chiral,
                            members: vec![member],
                        }),
                    }
                }
            }
        }
        let mut angles: Vec<(Turn, f64)> = Vec::new();
        for c in &classes {
            if !angles.iter().any(|(t, _)| t.same_angle(&c.turn)) {
                angles.push((c.turn.clone(), c.deg));
            }
        }
        angles.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal));
        let mirror = classes
            .iter()
            .map(|c| {
                let m = &c.members[0];
                let flipped = CornerRef { reflected: !m.reflected, ..m.clone() };
                classes.iter().position(|d| d.members.contains(&flipped))
            })
            .collect();
        CornerTable { classes, angles, mirror }
    }

    pub fn class_of(&self, c: &CornerRef) -> Option<usize> {
        self.classes.iter().position(|k| k.members.contains(c))
    }

    /// Some multiset of interior angles sums exactly to `target`.
    pub fn fillable(&self, target: &Turn) -> bool {
        let goal = target.degrees_f64();
        if goal <= SLACK {
            return false;
        }
        let mut stack = vec![(0usize, 0.0f64, AngleSum::default())];
        while let Some((from, s, exact)) = stack.pop() {
            for k in from..self.angles.len() {
                let (t, d) = &self.angles[k];
                let ns = s + d;
                if ns > goal + SLACK {
                    break;
                }
                let ne = exact.add(t);
                if (ns - goal).abs() <= SLACK {
                    if ne.windings == 0 && ne.residual.same_angle(target) {
                        return true;
                    }
                    continue;
                }
                stack.push((k, ns, ne));
            }
        }
        false
    }

    /// How the counter-clockwise ray of class `a` can meet the clockwise
    /// ray of class `b`: `None` if it cannot, `Some(subordinate)` otherwise.
    fn ray_meet(&self, a: usize, b: usize) -> Option<bool> {
        let (x, y) = (&self.classes[a], &self.classes[b]);
        let (e, f) = (&x.ccw, &y.cw);
        if e.len2 == f.len2 {
            let ok = e.label.matches(&f.label) && (e.label.is_plain() || x.chiral == y.chiral);
            return ok.then_some(false);
        }
        if !e.label.is_plain() || !f.label.is_plain() {
            return None;
        }
        // the shorter edge ends on the interior of the longer one
        let short = if e.len2 < f.len2 { e } else { f };
        if short.far.cmp_angle(&Turn::straight()) != Ordering::Less {
            return None;
        }
        self.fillable(&short.far.supplement()).then_some(true)
    }
}

struct Search<'a> {
    table: &'a CornerTable,
    meet: Vec<Vec<Option<bool>>>,
    found: BTreeSet<(FigureTotal, Vec<usize>)>,
}

impl Search<'_> {
    fn extend(&mut self, total: FigureTotal, seq: &mut Vec<usize>, sum: f64, exact: &AngleSum) {
        let goal = if total == FigureTotal::Full { 360.0 } else { 180.0 };
        if (sum - goal).abs() <= SLACK {
            let closed = match total {
                FigureTotal::Full => exact.is_full() && self.meet[*seq.last().unwrap()][seq[0]].is_some(),
                FigureTotal::Half => {
                    exact.is_half()
                        && self.table.classes[seq[0]].cw.label.is_plain()
                        && self.table.classes[*seq.last().unwrap()].ccw.label.is_plain()
                }
            };
            if closed {
                let key = self.canonical(total, seq);
                self.found.insert((total, key));
            }
            return;
        }
        let last = *seq.last().unwrap();
        for c in 0..self.table.classes.len() {
            if total == FigureTotal::Full && c < seq[0] {
                continue;
            }
            let ns = sum + self.table.classes[c].deg;
            if ns > goal + SLACK || self.meet[last][c].is_none() {
                continue;
            }
            let ne = exact.add(&self.table.classes[c].turn);
            seq.push(c);
            self.extend(total, seq, ns, &ne);
            seq.pop();
        }
    }

    fn mirrored(&self, seq: &[usize]) -> Option<Vec<usize>> {
        seq.iter().rev().map(|&c| self.table.mirror[c]).collect()
    }

    fn canonical(&self, total: FigureTotal, seq: &[usize]) -> Vec<usize> {
        let mut variants = vec![seq.to_vec()];
        if let Some(m) = self.mirrored(seq) {
            variants.push(m);
        }
        let mut best: Option<Vec<usize>> = None;
        for v in variants {
            let rots: Vec<Vec<usize>> = match total {
                FigureTotal::Full => (0..v.len()).map(|k| [&v[k..], &v[..k]].concat()).collect(),
                FigureTotal::Half => vec![v],
            };
            for r in rots {
                if best.as_ref().is_none_or(|b| r < *b) {
                    best = Some(r);
                }
            }
        }
        best.unwrap()
    }
}

pub fn vertex_atlas(ps: &Protoset) -> Vec<VertexFigure> {
    let table = CornerTable::new(ps);
    atlas_with(&table)
}

pub fn atlas_with(table: &CornerTable) -> Vec<VertexFigure> {
    let n = table.classes.len();
    let meet = (0..n).map(|a| (0..n).map(|b| table.ray_meet(a, b)).collect()).collect();
    let mut s = Search { table, meet, found: BTreeSet::new() };
    for total in [FigureTotal::Full, FigureTotal::Half] {
        for c in 0..n {
            let mut seq = vec![c];
            s.extend(total, &mut seq, table.classes[c].deg, &AngleSum::of(&table.classes[c].turn));
        }
    }
    let found = std::mem::take(&mut s.found);
    found
        .into_iter()
        .map(|(total, seq)| {
            let m = seq.len();
            let rays = if total == FigureTotal::Full { m } else { m - 1 };
            let subordinate = (0..rays).filter(|&k| s.meet[seq[k]][seq[(k + 1) % m]] == Some(true)).collect();
            VertexFigure {
                total,
                fan: seq.iter().map(|&c| table.classes[c].members[0].clone()).collect(),
                subordinate,
                classes: seq,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForcedStatus {
    Unique,
    Multiple,
    Impossible,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForcedCorner {
    pub status: ForcedStatus,
    pub witnesses: Vec<VertexFigure>,
}

/// Every atlas figure that uses the given corner (in either handedness).
pub fn forced_corner(ps: &Protoset, tile: &TileName, corner: usize) -> ForcedCorner {
    let table = CornerTable::new(ps);
    let atlas = atlas_with(&table);
    forced_corner_in(&table, &atlas, tile, corner)
}

pub fn forced_corner_in(table: &CornerTable, atlas: &[VertexFigure], tile: &TileName, corner: usize) -> ForcedCorner {
    let mine: Vec<usize> = [false, true]
        .iter()
        .filter_map(|&r| table.class_of(&CornerRef { tile: tile.clone(), corner, reflected: r }))
        .collect();
    let witnesses: Vec<VertexFigure> = atlas.iter().filter(|f| f.classes.iter().any(|c| mine.contains(c))).cloned().collect();
    let status = match witnesses.len() {
        0 => ForcedStatus::Impossible,
        1 => ForcedStatus::Unique,
        _ => ForcedStatus::Multiple,
    };
    ForcedCorner { status, witnesses }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::protoset::Prototile;

    fn square() -> Protoset {
        let t = Prototile::plain("sq", "", vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)]);
        Protoset::new("square", true, vec![t], "")
    }

    #[test]
    fn unit_square_atlas() {
        let a = vertex_atlas(&square());
        assert_eq!(a.len(), 2);
        assert_eq!((a[0].total, a[0].fan.len()), (FigureTotal::Full, 4));
        assert_eq!((a[1].total, a[1].fan.len()), (FigureTotal::Half, 2));
        let f = forced_corner(&square(), &"sq".into(), 0);
        assert_eq!(f.status, ForcedStatus::Multiple);
    }

    #[test]
    fn regular_pentagon_atlas_is_empty() {
        let ps = crate::builtins::regular_pentagon();
        assert!(vertex_atlas(&ps).is_empty());
    }
}
