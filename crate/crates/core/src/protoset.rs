//! Marked prototiles, protosets, placements and the JSON file format.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convexify::ConvexifyDecl;
use crate::geometry::{Isometry, Point};
use crate::polygon;
use crate::rows::RowDecl;

#[derive(Debug, Error)]
pub enum ProtosetError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("duplicate prototile name `{0}`")]
    DuplicateName(String),
    #[error("unknown prototile `{0}`")]
    UnknownTile(String),
    #[error("reflected placement of `{0}` but reflections are not allowed")]
    ReflectionForbidden(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl From<serde_json::Error> for ProtosetError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        let message = match message.rfind(" at line ") {
            Some(k) => message[..k].to_string(),
            None => message,
        };
        ProtosetError::Parse { line: e.line(), column: e.column(), message }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TileName(pub String);

impl fmt::Display for TileName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TileName {
    fn from(s: &str) -> Self {
        TileName(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelKey(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EdgeLabel {
    Plain,
    Bump { key: LabelKey },
    Nick { key: LabelKey },
}

impl EdgeLabel {
    pub fn bump(k: &str) -> Self {
        EdgeLabel::Bump { key: LabelKey(k.into()) }
    }

    pub fn nick(k: &str) -> Self {
        EdgeLabel::Nick { key: LabelKey(k.into()) }
    }

    pub fn is_plain(&self) -> bool {
        matches!(self, EdgeLabel::Plain)
    }

    /// Symbolic matching: bump(k) with nick(k), plain with plain.
    pub fn matches(&self, o: &EdgeLabel) -> bool {
        match (self, o) {
            (EdgeLabel::Plain, EdgeLabel::Plain) => true,
            (EdgeLabel::Bump { key: a }, EdgeLabel::Nick { key: b }) | (EdgeLabel::Nick { key: a }, EdgeLabel::Bump { key: b }) => a == b,
            _ => false,
        }
    }
}

/// A recomposition mark: a segment in the prototile frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mark(pub Point, pub Point);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prototile {
    pub name: TileName,
    #[serde(default)]
    pub color: String,
    pub boundary: Vec<Point>,
    pub labels: Vec<EdgeLabel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub marks: Vec<Mark>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_tag: Option<String>,
}

impl Prototile {
    pub fn new(name: &str, color: &str, boundary: Vec<Point>, labels: Vec<EdgeLabel>) -> Self {
        Prototile { name: name.into(), color: color.into(), boundary, labels, marks: Vec::new(), group_tag: None }
    }

    pub fn plain(name: &str, color: &str, boundary: Vec<Point>) -> Self {
        let labels = vec![EdgeLabel::Plain; boundary.len()];
        Prototile::new(name, color, boundary, labels)
    }

    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn edge(&self, i: usize) -> (&Point, &Point) {
        (&self.boundary[i], &self.boundary[(i + 1) % self.len()])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Protoset {
    pub name: String,
    pub reflections_allowed: bool,
    pub tiles: Vec<Prototile>,
    #[serde(default)]
    pub notes: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<RowDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convexify: Option<ConvexifyDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacedTile {
    pub prototile: TileName,
    pub pose: Isometry,
}

impl PlacedTile {
    pub fn new(name: &str, pose: Isometry) -> Self {
        PlacedTile { prototile: name.into(), pose }
    }
}

/// A placed tile resolved to world coordinates, counter-clockwise, with
/// the label of each world edge.
#[derive(Clone, Debug)]
pub struct WorldTile {
    pub name: TileName,
    pub pts: Vec<Point>,
    pub labels: Vec<EdgeLabel>,
    pub reflected: bool,
}

impl WorldTile {
    pub fn edge(&self, k: usize) -> (&Point, &Point) {
        (&self.pts[k], &self.pts[(k + 1) % self.pts.len()])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub tile: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tile {
            Some(t) => write!(f, "{t}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Every violation of the prototile invariants; empty means valid.
pub fn validate_prototile(t: &Prototile) -> Vec<Violation> {
    let v = |m: String| Violation { tile: Some(t.name.0.clone()), message: m };
    let mut out: Vec<Violation> = polygon::problems(&t.boundary).into_iter().map(v).collect();
    if t.labels.len() != t.boundary.len() {
        out.push(v(format!("label count mismatch: {} labels for {} edges", t.labels.len(), t.boundary.len())));
    }
    if out.is_empty() {
        for (k, Mark(a, b)) in t.marks.iter().enumerate() {
            if !mark_inside(&t.boundary, a, b) {
                out.push(v(format!("mark {k} leaves the tile")));
            }
        }
    }
    out
}

fn mark_inside(pts: &[Point], a: &Point, b: &Point) -> bool {
    if !polygon::contains_point(pts, a) || !polygon::contains_point(pts, b) {
        return false;
    }
    let n = pts.len();
    !(0..n).any(|i| polygon::segments_cross(a, b, &pts[i], &pts[(i + 1) % n])) && polygon::contains_point(pts, &a.midpoint(b))
}

impl Protoset {
    pub fn new(name: &str, reflections_allowed: bool, tiles: Vec<Prototile>, notes: &str) -> Self {
        Protoset { name: name.into(), reflections_allowed, tiles, notes: notes.into(), rows: Vec::new(), convexify: None }
    }

    pub fn tile(&self, name: &TileName) -> Result<&Prototile, ProtosetError> {
        self.tiles.iter().find(|t| &t.name == name).ok_or_else(|| ProtosetError::UnknownTile(name.0.clone()))
    }

    pub fn tile_index(&self, name: &TileName) -> Option<usize> {
        self.tiles.iter().position(|t| &t.name == name)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for t in &self.tiles {
            if !seen.insert(&t.name) {
                out.push(Violation { tile: Some(t.name.0.clone()), message: "duplicate name".into() });
            }
            out.extend(validate_prototile(t));
        }
        if out.is_empty() {
            for (i, a) in self.tiles.iter().enumerate() {
                for b in &self.tiles[i + 1..] {
                    if polygon::congruent(&a.boundary, &b.boundary, self.reflections_allowed).is_some()
                        && same_labels_under_congruence(a, b, self.reflections_allowed)
                    {
                        out.push(Violation {
                            tile: Some(b.name.0.clone()),
                            message: format!("congruent to prototile {}", a.name),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn world(&self, p: &PlacedTile) -> Result<WorldTile, ProtosetError> {
        let t = self.tile(&p.prototile)?;
        if p.pose.reflected && !self.reflections_allowed {
            return Err(ProtosetError::ReflectionForbidden(p.prototile.0.clone()));
        }
        Ok(world_of(t, &p.pose))
    }

    /// Reads a protoset; `-` reads standard input.
    pub fn load(path: &Path) -> Result<Self, ProtosetError> {
        let text = if path.as_os_str() == "-" {
            let mut s = String::new();
            std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
                .map_err(|e| ProtosetError::Io { path: "-".into(), source: e })?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| ProtosetError::Io { path: path.display().to_string(), source: e })?
        };
        Protoset::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ProtosetError> {
        let ps: Protoset = serde_json::from_str(text)?;
        let mut seen = BTreeSet::new();
        for t in &ps.tiles {
            if !seen.insert(t.name.clone()) {
                return Err(ProtosetError::DuplicateName(t.name.0.clone()));
            }
        }
        Ok(ps)
    }

    /// Canonical JSON text (pretty, trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("protoset serializes");
        s.push('\n');
        s
    }
}

/// Two congruent boundaries carry the same labels under some witnessing
/// isometry.
fn same_labels_under_congruence(a: &Prototile, b: &Prototile, refl: bool) -> bool {
    let n = a.len();
    for j in 0..n {
        for r in [false, true] {
            if r && !refl {
                continue;
            }
            let idx = |i: usize| if r { (j + 2 * n - i) % n } else { (j + i) % n };
            let Ok(g) = Isometry::align(&a.boundary[0], &a.boundary[1], &b.boundary[idx(0)], &b.boundary[idx(1)], r) else {
                continue;
            };
            if !(0..n).all(|i| g.apply(&a.boundary[i]) == b.boundary[idx(i)]) {
                continue;
            }
            let lab_ok = (0..n).all(|i| {
                let e = if r { (idx(i) + n - 1) % n } else { idx(i) };
                a.labels.get(i) == b.labels.get(e)
            });
            if lab_ok {
                return true;
            }
        }
    }
    false
}

/// World geometry of a prototile under a pose.
pub fn world_of(t: &Prototile, g: &Isometry) -> WorldTile {
    let n = t.len();
    let pts = polygon::transform(&t.boundary, g);
    let labels = (0..n).map(|k| t.labels[world_edge_source(k, n, g.reflected)].clone()).collect();
    WorldTile { name: t.name.clone(), pts, labels, reflected: g.reflected }
}

/// Prototile edge that becomes world edge `k`.
pub fn world_edge_source(k: usize, n: usize, reflected: bool) -> usize {
    if reflected {
        (2 * n - k - 1) % n
    } else {
        k
    }
}

/// World edge produced by prototile edge `e`.
pub fn world_edge_of(e: usize, n: usize, reflected: bool) -> usize {
    world_edge_source(e, n, reflected)
}

/// Label semantics between two world edges: coincident with opposite
/// orientation and matching labels. Bump and nick are asymmetric, so a
/// labelled contact also needs equal handedness.
pub fn world_edges_compatible(a: &WorldTile, ea: usize, b: &WorldTile, eb: usize) -> bool {
    let (p, q) = a.edge(ea);
    let (r, s) = b.edge(eb);
    if p != s || q != r {
        return false;
    }
    let (la, lb) = (&a.labels[ea], &b.labels[eb]);
    la.matches(lb) && (la.is_plain() || a.reflected == b.reflected)
}

/// Edge compatibility for placements, by prototile edge index.
pub fn edges_compatible(ps: &Protoset, a: &PlacedTile, ea: usize, b: &PlacedTile, eb: usize) -> Result<bool, ProtosetError> {
    let wa = ps.world(a)?;
    let wb = ps.world(b)?;
    let ka = world_edge_of(ea, wa.pts.len(), wa.reflected);
    let kb = world_edge_of(eb, wb.pts.len(), wb.reflected);
    Ok(world_edges_compatible(&wa, ka, &wb, kb))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Prototile {
        Prototile::plain("sq", "#ccc", vec![Point::int(0, 0), Point::int(1, 0), Point::int(1, 1), Point::int(0, 1)])
    }

    #[test]
    fn square_is_valid() {
        assert!(validate_prototile(&unit_square()).is_empty());
    }

    #[test]
    fn bowtie_and_label_count() {
        let mut t = unit_square();
        t.boundary.swap(1, 2);
        assert!(validate_prototile(&t).iter().any(|v| v.message == "not simple"));
        let mut t = unit_square();
        t.labels.pop();
        assert!(validate_prototile(&t).iter().any(|v| v.message.starts_with("label count mismatch")));
    }

    #[test]
    fn reflected_world_labels_follow_edges() {
        let t = Prototile::new(
            "tri",
            "",
            vec![Point::int(0, 0), Point::int(3, 0), Point::int(0, 1)],
            vec![EdgeLabel::bump("a"), EdgeLabel::Plain, EdgeLabel::nick("b")],
        );
        let w = world_of(&t, &Isometry::mirror_x());
        for e in 0..3 {
            let k = world_edge_of(e, 3, true);
            let (p, q) = w.edge(k);
            let (a, b) = t.edge(e);
            let m = Isometry::mirror_x();
            assert_eq!((p, q), (&m.apply(b), &m.apply(a)));
            assert_eq!(w.labels[k], t.labels[e]);
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut ps = Protoset::new("d", true, vec![unit_square(), unit_square()], "");
        ps.tiles[0].name = "purple".into();
        ps.tiles[1].name = "purple".into();
        let text = ps.to_json();
        assert!(matches!(Protoset::from_json(&text), Err(ProtosetError::DuplicateName(n)) if n == "purple"));
    }

    #[test]
    fn bad_scalar_reports_location() {
        let text = r#"{"name":"x","reflections_allowed":true,"tiles":[{"name":"a","boundary":[[{"r":[1,0]},{"r":[0,1]}]],"labels":[]}]}"#;
        match Protoset::from_json(text) {
            Err(ProtosetError::Parse { line, message, .. }) => {
                assert_eq!(line, 1);
                assert!(message.contains("zero denominator"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }
}
