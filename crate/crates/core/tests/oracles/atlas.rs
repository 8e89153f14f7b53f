//! Naive raw-corner enumeration of vertex figures, shared by the oracle
//! test and the acceptance run. See `atlas_oracle.rs` for the rules.

#![allow(dead_code)]

use std::collections::BTreeSet;

use morphtile::atlas::{atlas_with, CornerRef, CornerTable, FigureTotal};
use morphtile::protoset::{EdgeLabel, Protoset};
use morphtile::scalar::Scalar;

const EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
struct Ray {
    len2: Scalar,
    label: EdgeLabel,
    far: f64,
}

#[derive(Clone, Debug)]
struct Corner {
    id: CornerRef,
    deg: f64,
    cw: Ray,
    ccw: Ray,
}

fn interior(pts: &[(f64, f64)], i: usize) -> f64 {
    let n = pts.len();
    let (p, c, q) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
    let a_out = (q.1 - c.1).atan2(q.0 - c.0);
    let a_in = (p.1 - c.1).atan2(p.0 - c.0);
    let mut d = (a_in - a_out).to_degrees();
    while d <= 0.0 {
        d += 360.0;
    }
    d
}

fn corners(ps: &Protoset) -> Vec<Corner> {
    let mut out = Vec::new();
    for t in &ps.tiles {
        let n = t.len();
        let pts: Vec<(f64, f64)> = t.boundary.iter().map(|p| p.to_f64()).collect();
        for i in 0..n {
            let ip = (i + n - 1) % n;
            let edge_i = Ray { len2: t.boundary[i].dist2(&t.boundary[(i + 1) % n]), label: t.labels[i].clone(), far: interior(&pts, (i + 1) % n) };
            let edge_p = Ray { len2: t.boundary[ip].dist2(&t.boundary[i]), label: t.labels[ip].clone(), far: interior(&pts, ip) };
            for refl in [false, true] {
                if refl && !ps.reflections_allowed {
                    continue;
                }
                let (cw, ccw) = if refl { (edge_p.clone(), edge_i.clone()) } else { (edge_i.clone(), edge_p.clone()) };
                out.push(Corner { id: CornerRef::new(&t.name.0, i, refl), deg: interior(&pts, i), cw, ccw });
            }
        }
    }
    out
}

fn fills(angles: &[f64], target: f64) -> bool {
    if target < EPS {
        return false;
    }
    angles.iter().any(|&a| (a - target).abs() < EPS || (a < target && fills(angles, target - a)))
}

fn meets(a: &Corner, b: &Corner, angles: &[f64]) -> bool {
    let (e, f) = (&a.ccw, &b.cw);
    if e.len2 == f.len2 {
        return e.label.matches(&f.label) && (e.label.is_plain() || a.id.reflected == b.id.reflected);
    }
    if !e.label.is_plain() || !f.label.is_plain() {
        return false;
    }
    let short = if e.len2 < f.len2 { e } else { f };
    short.far < 180.0 - EPS && fills(angles, 180.0 - short.far)
}

fn canonical(total: FigureTotal, seq: &[CornerRef], mirror: bool) -> Vec<CornerRef> {
    let mut variants = vec![seq.to_vec()];
    if mirror {
        variants.push(seq.iter().rev().map(|c| CornerRef { reflected: !c.reflected, ..c.clone() }).collect());
    }
    let mut all = Vec::new();
    for v in variants {
        match total {
            FigureTotal::Full => all.extend((0..v.len()).map(|k| [&v[k..], &v[..k]].concat())),
            FigureTotal::Half => all.push(v),
        }
    }
    all.into_iter().min().unwrap()
}

pub fn naive(ps: &Protoset) -> BTreeSet<(FigureTotal, Vec<CornerRef>)> {
    let cs = corners(ps);
    let angles: Vec<f64> = cs.iter().map(|c| c.deg).collect();
    let mut found = BTreeSet::new();
    for (total, goal) in [(FigureTotal::Full, 360.0), (FigureTotal::Half, 180.0)] {
        let mut stack: Vec<Vec<usize>> = (0..cs.len()).map(|i| vec![i]).collect();
        while let Some(seq) = stack.pop() {
            let sum: f64 = seq.iter().map(|&i| cs[i].deg).sum();
            if (sum - goal).abs() < EPS {
                let (first, last) = (&cs[seq[0]], &cs[*seq.last().unwrap()]);
                let closed = match total {
                    FigureTotal::Full => meets(last, first, &angles),
                    FigureTotal::Half => first.cw.label.is_plain() && last.ccw.label.is_plain(),
                };
                if closed {
                    let refs: Vec<CornerRef> = seq.iter().map(|&i| cs[i].id.clone()).collect();
                    found.insert((total, canonical(total, &refs, ps.reflections_allowed)));
                }
                continue;
            }
            for j in 0..cs.len() {
                if sum + cs[j].deg < goal + EPS && meets(&cs[*seq.last().unwrap()], &cs[j], &angles) {
                    let mut next = seq.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
        }
    }
    found
}

pub fn expanded(ps: &Protoset) -> BTreeSet<(FigureTotal, Vec<CornerRef>)> {
    let table = CornerTable::new(ps);
    let mut out = BTreeSet::new();
    for f in atlas_with(&table) {
        let mut seqs: Vec<Vec<CornerRef>> = vec![vec![]];
        for &c in &f.classes {
            seqs = seqs.into_iter().flat_map(|s| table.classes[c].members.iter().map(move |m| [s.clone(), vec![m.clone()]].concat())).collect();
        }
        for s in seqs {
            out.insert((f.total, canonical(f.total, &s, ps.reflections_allowed)));
        }
    }
    out
}
