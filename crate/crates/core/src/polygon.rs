//! Polygon predicates over exact points.

use std::cmp::Ordering;

use crate::geometry::{orient, GeometryError, Isometry, Point, Turn};
use crate::scalar::Scalar;

/// Twice the signed area (positive for counter-clockwise order).
pub fn area2(pts: &[Point]) -> Scalar {
    let n = pts.len();
    let mut acc = Scalar::zero();
    for i in 0..n {
        acc = acc + pts[i].cross(&pts[(i + 1) % n]);
    }
    acc
}

pub fn area(pts: &[Point]) -> Scalar {
    area2(pts).half()
}

fn prev(i: usize, n: usize) -> usize {
    (i + n - 1) % n
}

/// Closed segment `ab` contains `p`.
pub fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    if orient(a, b, p) != Ordering::Equal {
        return false;
    }
    let d = b - a;
    let t = (p - a).dot(&d);
    !t.is_negative() && t <= d.norm2()
}

/// Closed segments `ab` and `cd` share at least one point.
pub fn segments_touch(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2 && o3 != o4 && o1 != Ordering::Equal && o2 != Ordering::Equal && o3 != Ordering::Equal && o4 != Ordering::Equal {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// Open segments cross at a single interior point of both.
pub fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 != Ordering::Equal && o2 != Ordering::Equal && o1 != o2 && o3 != Ordering::Equal && o4 != Ordering::Equal && o3 != o4
}

/// Every structural problem with a boundary, empty when it is a valid
/// counter-clockwise simple polygon without collinear triples.
pub fn problems(pts: &[Point]) -> Vec<String> {
    let mut out = Vec::new();
    let n = pts.len();
    if n < 3 {
        out.push(format!("fewer than 3 vertices ({n})"));
        return out;
    }
    for i in 0..n {
        for j in i + 1..n {
            if pts[i] == pts[j] {
                out.push(format!("repeated vertex {i} and {j}"));
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for i in 0..n {
        if orient(&pts[prev(i, n)], &pts[i], &pts[(i + 1) % n]) == Ordering::Equal {
            out.push(format!("collinear triple at vertex {i}"));
        }
    }
    if !is_simple(pts) {
        out.push("not simple".to_string());
    } else if !area2(pts).is_positive() {
        out.push("not counter-clockwise (non-positive area)".to_string());
    }
    out
}

/// No two non-adjacent edges touch and adjacent edges meet only at their
/// shared vertex.
pub fn is_simple(pts: &[Point]) -> bool {
    let n = pts.len();
    for i in 0..n {
        let (a, b) = (&pts[i], &pts[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (&pts[j], &pts[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // the far endpoint of one must not lie on the other
                let (fa, fb) = if j == i + 1 { (a, d) } else { (b, c) };
                if on_segment(fa, c, d) && fa != c && fa != d {
                    return false;
                }
                if on_segment(fb, a, b) && fb != a && fb != b {
                    return false;
                }
                continue;
            }
            if segments_touch(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Strict convexity of a counter-clockwise polygon. Collinear or repeated
/// vertices are input errors, not a `false` verdict.
pub fn is_convex(pts: &[Point]) -> Result<bool, GeometryError> {
    let n = pts.len();
    if n < 3 {
        return Err(GeometryError::Degenerate("fewer than 3 vertices".into()));
    }
    for i in 0..n {
        let (a, b, c) = (&pts[prev(i, n)], &pts[i], &pts[(i + 1) % n]);
        if a == b || b == c {
            return Err(GeometryError::Degenerate(format!("repeated vertex at {i}")));
        }
        if orient(a, b, c) == Ordering::Equal {
            return Err(GeometryError::Degenerate(format!("collinear triple at vertex {i}")));
        }
    }
    Ok((0..n).all(|i| orient(&pts[prev(i, n)], &pts[i], &pts[(i + 1) % n]) == Ordering::Greater))
}

/// Interior angle at each vertex of a counter-clockwise polygon.
pub fn corner_turns(pts: &[Point]) -> Vec<Turn> {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let v = &pts[i];
            Turn::between(&(&pts[(i + 1) % n] - v), &(&pts[prev(i, n)] - v)).expect("distinct vertices")
        })
        .collect()
}

pub fn edge_len2(pts: &[Point]) -> Vec<Scalar> {
    let n = pts.len();
    (0..n).map(|i| pts[i].dist2(&pts[(i + 1) % n])).collect()
}

/// An isometry carrying polygon `a` onto polygon `b` vertex-for-vertex,
/// when one exists.
pub fn congruent(a: &[Point], b: &[Point], allow_reflection: bool) -> Option<Isometry> {
    let n = a.len();
    if n != b.len() || n < 3 {
        return None;
    }
    let la = edge_len2(a);
    let lb = edge_len2(b);
    let ta = corner_turns(a);
    let tb = corner_turns(b);
    for refl in [false, true] {
        if refl && !allow_reflection {
            break;
        }
        for j in 0..n {
            // vertex i of a goes to vertex j + i (direct) or j - i (mirrored)
            let idx = |i: usize| if refl { (j + n * 2 - i) % n } else { (j + i) % n };
            let sig_ok = (0..n).all(|i| {
                let eb = if refl { lb[(idx(i) + n - 1) % n].clone() } else { lb[idx(i)].clone() };
                la[i] == eb && ta[i].same_angle(&tb[idx(i)])
            });
            if !sig_ok {
                continue;
            }
            let g = match Isometry::align(&a[0], &a[1], &b[idx(0)], &b[idx(1)], refl) {
                Ok(g) => g,
                Err(_) => continue,
            };
            if (0..n).all(|i| g.apply(&a[i]) == b[idx(i)]) {
                return Some(g);
            }
        }
    }
    None
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
pub fn triangulate(pts: &[Point]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut tris = Vec::new();
    let mut guard = 0;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (i0, i1, i2) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            if orient(&pts[i0], &pts[i1], &pts[i2]) != Ordering::Greater {
                continue;
            }
            let blocked = idx.iter().any(|&q| {
                q != i0 && q != i1 && q != i2 && in_closed_triangle(&pts[q], &pts[i0], &pts[i1], &pts[i2])
            });
            if !blocked {
                tris.push([i0, i1, i2]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        guard += 1;
        if !clipped || guard > pts.len() * pts.len() {
            break;
        }
    }
    if idx.len() == 3 {
        tris.push([idx[0], idx[1], idx[2]]);
    }
    tris
}

fn in_closed_triangle(p: &Point, a: &Point, b: &Point, c: &Point) -> bool {
    orient(a, b, p) != Ordering::Less && orient(b, c, p) != Ordering::Less && orient(c, a, p) != Ordering::Less
}

/// Convex pieces covering a polygon: itself when convex, else triangles.
pub fn convex_pieces(pts: &[Point]) -> Vec<Vec<Point>> {
    if matches!(is_convex(pts), Ok(true)) {
        return vec![pts.to_vec()];
    }
    triangulate(pts).into_iter().map(|t| t.iter().map(|&i| pts[i].clone()).collect()).collect()
}

/// Float bounding box, used only to skip exact work on far-apart shapes.
pub fn bbox_f64(pts: &[Point]) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for p in pts {
        let (x, y) = p.to_f64();
        b[0] = b[0].min(x);
        b[1] = b[1].min(y);
        b[2] = b[2].max(x);
        b[3] = b[3].max(y);
    }
    b
}

pub fn bbox_apart(a: &[f64; 4], b: &[f64; 4]) -> bool {
    const EPS: f64 = 1e-9;
    a[2] < b[0] - EPS || b[2] < a[0] - EPS || a[3] < b[1] - EPS || b[3] < a[1] - EPS
}

/// Interiors of two convex polygons intersect (separating axis test).
pub fn convex_interiors_meet(a: &[Point], b: &[Point]) -> bool {
    for poly in [a, b] {
        let n = poly.len();
        for i in 0..n {
            let axis = (&poly[(i + 1) % n] - &poly[i]).perp();
            let (amin, amax) = project(a, &axis);
            let (bmin, bmax) = project(b, &axis);
            if amax <= bmin || bmax <= amin {
                return false;
            }
        }
    }
    true
}

fn project(pts: &[Point], axis: &Point) -> (Scalar, Scalar) {
    let mut lo = pts[0].dot(axis);
    let mut hi = lo.clone();
    for p in &pts[1..] {
        let v = p.dot(axis);
        if v < lo {
            lo = v;
        } else if v > hi {
            hi = v;
        }
    }
    (lo, hi)
}

/// Interiors of two simple polygons intersect.
pub fn interiors_meet(a: &[Point], b: &[Point]) -> bool {
    if bbox_apart(&bbox_f64(a), &bbox_f64(b)) {
        return false;
    }
    let pa = convex_pieces(a);
    let pb = convex_pieces(b);
    pa.iter().any(|x| {
        let bx = bbox_f64(x);
        pb.iter().any(|y| !bbox_apart(&bx, &bbox_f64(y)) && convex_interiors_meet(x, y))
    })
}

/// Sutherland-Hodgman clip of `subject` by a convex counter-clockwise `clip`.
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut out = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if out.is_empty() {
            break;
        }
        let (c0, c1) = (&clip[i], &clip[(i + 1) % m]);
        let input = std::mem::take(&mut out);
        let k = input.len();
        for j in 0..k {
            let p = &input[j];
            let q = &input[(j + 1) % k];
            let pin = orient(c0, c1, p) != Ordering::Less;
            let qin = orient(c0, c1, q) != Ordering::Less;
            if pin {
                out.push(p.clone());
            }
            if pin != qin {
                out.push(line_cut(p, q, c0, c1));
            }
        }
    }
    out
}

fn line_cut(p: &Point, q: &Point, c0: &Point, c1: &Point) -> Point {
    let d = c1 - c0;
    let fp = d.cross(&(p - c0));
    let fq = d.cross(&(q - c0));
    let t = fp.checked_div(&(&fp - &fq)).expect("segment crosses line");
    p.lerp(q, &t)
}

/// Exact area of `a` lying inside simple polygon `region`.
pub fn area_inside(a: &[Point], region: &[Point]) -> Scalar {
    let mut acc = Scalar::zero();
    for piece in convex_pieces(region) {
        if bbox_apart(&bbox_f64(a), &bbox_f64(&piece)) {
            continue;
        }
        let c = clip_convex(a, &piece);
        if c.len() >= 3 {
            acc = acc + area(&c);
        }
    }
    acc
}

/// Closed containment of a point in a simple polygon.
pub fn contains_point(pts: &[Point], p: &Point) -> bool {
    let n = pts.len();
    if (0..n).any(|i| on_segment(p, &pts[i], &pts[(i + 1) % n])) {
        return true;
    }
    triangulate(pts).iter().any(|t| in_closed_triangle(p, &pts[t[0]], &pts[t[1]], &pts[t[2]]))
}

/// Polygon image under an isometry, kept counter-clockwise.
pub fn transform(pts: &[Point], g: &Isometry) -> Vec<Point> {
    let mut out: Vec<Point> = pts.iter().map(|p| g.apply(p)).collect();
    if g.reflected {
        out.reverse();
        out.rotate_right(1);
    }
    out
}

/// Index of vertex `i` of the source polygon inside `transform`'s output.
pub fn transformed_index(i: usize, n: usize, reflected: bool) -> usize {
    if reflected {
        (n - i) % n
    } else {
        i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::int(x, y)).collect()
    }

    #[test]
    fn convexity_examples() {
        assert!(is_convex(&poly(&[(0, 0), (1, 0), (1, 1), (0, 1)])).unwrap());
        assert!(!is_convex(&poly(&[(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])).unwrap());
        assert!(is_convex(&poly(&[(0, 0), (1, 0), (1, 0)])).is_err());
    }

    #[test]
    fn bowtie_is_not_simple() {
        let p = poly(&[(0, 0), (1, 1), (1, 0), (0, 1)]);
        assert!(problems(&p).iter().any(|s| s == "not simple"));
    }

    #[test]
    fn congruence_examples() {
        let sq = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let moved = poly(&[(5, 2), (5, 3), (4, 3), (4, 2)]);
        assert!(congruent(&sq, &moved, false).is_some());
        let rect = poly(&[(0, 0), (2, 0), (2, 1), (0, 1)]);
        assert!(congruent(&sq, &rect, true).is_none());
        let tri = poly(&[(0, 0), (4, 0), (1, 2)]);
        let mirror = transform(&tri, &Isometry::mirror_x());
        assert!(congruent(&tri, &mirror, false).is_none());
        let g = congruent(&tri, &mirror, true).unwrap();
        assert!(g.reflected);
    }

    #[test]
    fn overlap_and_clip() {
        let a = poly(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        let b = poly(&[(2, 0), (4, 0), (4, 2), (2, 2)]);
        let c = poly(&[(1, 1), (3, 1), (3, 3), (1, 3)]);
        assert!(!interiors_meet(&a, &b));
        assert!(interiors_meet(&a, &c));
        assert_eq!(area_inside(&c, &a), Scalar::int(1));
        let l = poly(&[(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]);
        assert_eq!(triangulate(&l).len(), 4);
        assert_eq!(area_inside(&a, &l), Scalar::int(3));
    }
}
