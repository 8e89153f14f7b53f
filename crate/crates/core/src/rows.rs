//! Row-adjacency digraphs and the cardinality of their bi-infinite walks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Isometry, Point};
use crate::protoset::{world_of, EdgeLabel, Protoset, ProtosetError, TileName};

/// A declared row: one tile under `pose`, repeated along the translation
/// that carries its `left` lateral chain onto its `right` one. Both chains
/// are inclusive ranges of prototile edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDecl {
    pub id: String,
    pub tile: TileName,
    #[serde(default)]
    pub pose: Isometry,
    pub right: [usize; 2],
    pub left: [usize; 2],
}

#[derive(Debug, Error)]
pub enum RowError {
    #[error("row `{0}`: {1}")]
    Decl(String, String),
    #[error("rows `{0}` and `{1}` have different periods")]
    Period(String, String),
    #[error("no rows declared")]
    Empty,
    #[error("walk classes of an uncountable graph cannot be listed")]
    Uncountable,
    #[error(transparent)]
    Protoset(#[from] ProtosetError),
}

/// One edge of a row boundary, read left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub vec: Point,
    pub label: EdgeLabel,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowType {
    pub id: String,
    pub tile: TileName,
    pub period: Point,
    pub top: Vec<Step>,
    pub bottom: Vec<Step>,
    pub featureless_top: bool,
    pub featureless_bottom: bool,
    #[serde(skip)]
    top_start: Point,
    #[serde(skip)]
    bottom_start: Point,
}

fn chain(n: usize, r: [usize; 2]) -> Vec<usize> {
    let len = (r[1] + n - r[0]) % n + 1;
    (0..len).map(|k| (r[0] + k) % n).collect()
}

fn featureless(steps: &[Step]) -> bool {
    steps.iter().all(|s| s.label.is_plain())
        && steps.windows(2).all(|w| w[0].vec.cross(&w[1].vec).is_zero() && w[0].vec.dot(&w[1].vec).is_positive())
}

fn merge_straight(steps: Vec<Step>) -> Vec<Step> {
    if steps.len() > 1 && featureless(&steps) {
        let total = steps.iter().fold(Point::origin(), |a, s| &a + &s.vec);
        vec![Step { vec: total, label: EdgeLabel::Plain }]
    } else {
        steps
    }
}

impl RowType {
    pub fn from_decl(ps: &Protoset, d: &RowDecl) -> Result<Self, RowError> {
        let bad = |m: &str| RowError::Decl(d.id.clone(), m.into());
        if d.pose.reflected {
            return Err(bad("reflected row poses are not supported"));
        }
        let t = ps.tile(&d.tile)?;
        let n = t.len();
        if d.right.iter().chain(d.left.iter()).any(|&e| e >= n) {
            return Err(bad("edge index out of range"));
        }
        let w = world_of(t, &d.pose);
        let right = chain(n, d.right);
        let left = chain(n, d.left);
        if right.len() != left.len() {
            return Err(bad("lateral chains have different lengths"));
        }
        let used: BTreeSet<usize> = right.iter().chain(left.iter()).copied().collect();
        if used.len() != right.len() + left.len() {
            return Err(bad("lateral chains overlap"));
        }
        let l0 = w.pts[left[0]].clone();
        let r1 = w.pts[(right[right.len() - 1] + 1) % n].clone();
        let period = &r1 - &l0;
        if period.is_zero() {
            return Err(bad("zero period"));
        }
        let m = left.len();
        for k in 0..m {
            let le = left[k];
            let re = right[m - 1 - k];
            if &w.pts[le] + &period != w.pts[(re + 1) % n] || &w.pts[(le + 1) % n] + &period != w.pts[re] {
                return Err(bad("left chain is not a translate of the right chain"));
            }
            if !w.labels[le].matches(&w.labels[re]) {
                return Err(bad("lateral labels do not match"));
            }
        }
        let step = |e: usize| Step { vec: &w.pts[(e + 1) % n] - &w.pts[e], label: w.labels[e].clone() };
        let last_left = left[m - 1];
        let bottom_edges: Vec<usize> = if (last_left + 1) % n == right[0] { Vec::new() } else { chain(n, [(last_left + 1) % n, (right[0] + n - 1) % n]) };
        let last_right = right[m - 1];
        let top_edges: Vec<usize> = if (last_right + 1) % n == left[0] { Vec::new() } else { chain(n, [(last_right + 1) % n, (left[0] + n - 1) % n]) };
        if bottom_edges.is_empty() || top_edges.is_empty() {
            return Err(bad("row has an empty top or bottom"));
        }
        let bottom = merge_straight(bottom_edges.iter().map(|&e| step(e)).collect());
        let top = merge_straight(
            top_edges.iter().rev().map(|&e| {
                let s = step(e);
                Step { vec: -&s.vec, label: s.label }
            }).collect(),
        );
        Ok(RowType {
            id: d.id.clone(),
            tile: d.tile.clone(),
            featureless_top: featureless(&top),
            featureless_bottom: featureless(&bottom),
            top_start: l0,
            bottom_start: w.pts[(last_left + 1) % n].clone(),
            period,
            top,
            bottom,
        })
    }

    fn top_vertex(&self, k: usize) -> Point {
        self.top[..k].iter().fold(self.top_start.clone(), |a, s| &a + &s.vec)
    }
}

/// `above` sits directly on `below`. `offset` translates the tile of
/// `above` (in its declared pose) into contact with `below`'s tile.
#[derive(Clone, Debug, Serialize)]
pub struct RowEdge {
    pub above: usize,
    pub below: usize,
    pub shift: usize,
    pub offset: Point,
    pub continuum: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowGraph {
    pub nodes: Vec<RowType>,
    pub edges: Vec<RowEdge>,
}

pub fn build_row_graph(ps: &Protoset, decls: &[RowDecl]) -> Result<RowGraph, RowError> {
    if decls.is_empty() {
        return Err(RowError::Empty);
    }
    let nodes = decls.iter().map(|d| RowType::from_decl(ps, d)).collect::<Result<Vec<_>, _>>()?;
    for r in &nodes[1..] {
        if r.period != nodes[0].period {
            return Err(RowError::Period(nodes[0].id.clone(), r.id.clone()));
        }
    }
    let mut edges = Vec::new();
    for (ui, u) in nodes.iter().enumerate() {
        for (vi, v) in nodes.iter().enumerate() {
            if u.featureless_bottom && v.featureless_top {
                edges.push(RowEdge { above: ui, below: vi, shift: 0, offset: &v.top_start - &u.bottom_start, continuum: true });
                continue;
            }
            let m = u.bottom.len();
            if v.top.len() != m {
                continue;
            }
            for s in 0..m {
                let fits = (0..m).all(|k| {
                    let (a, b) = (&u.bottom[k], &v.top[(k + s) % m]);
                    a.vec == b.vec && a.label.matches(&b.label)
                });
                if fits {
                    edges.push(RowEdge { above: ui, below: vi, shift: s, offset: &v.top_vertex(s) - &u.bottom_start, continuum: false });
                }
            }
        }
    }
    Ok(RowGraph { nodes, edges })
}

/// Bare digraph with optional multi-edges; edge `i` is `edges[i]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Digraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub continuum: Vec<bool>,
}

impl Digraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let continuum = vec![false; edges.len()];
        Digraph { n, edges, continuum }
    }

    fn out(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(move |(_, e)| e.0 == v).map(|(i, _)| i)
    }
}

impl RowGraph {
    pub fn digraph(&self) -> Digraph {
        Digraph {
            n: self.nodes.len(),
            edges: self.edges.iter().map(|e| (e.above, e.below)).collect(),
            continuum: self.edges.iter().map(|e| e.continuum).collect(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.nodes.iter().map(|r| r.id.clone()).collect()
    }

    /// Turning the plane by a half turn reverses the row order. Row `u` maps
    /// to the row whose boundaries equal `u`'s read upside down, when every
    /// row has such a partner.
    pub fn involution(&self) -> Option<Vec<usize>> {
        let shifted = |a: &[Step], b: &[Step]| a.len() == b.len() && (0..a.len()).any(|s| (0..a.len()).all(|k| a[k] == b[(k + s) % a.len()]));
        self.nodes
            .iter()
            .map(|u| {
                let top: Vec<Step> = u.bottom.iter().rev().cloned().collect();
                let bottom: Vec<Step> = u.top.iter().rev().cloned().collect();
                self.nodes.iter().position(|v| v.tile == u.tile && shifted(&v.top, &top) && shifted(&v.bottom, &bottom))
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
struct Structure {
    essential: Vec<bool>,
    scc_of: Vec<usize>,
    sccs: Vec<Vec<usize>>,
    cyclic: Vec<bool>,
}

fn structure(g: &Digraph) -> Structure {
    let mut pg: DiGraph<(), ()> = DiGraph::new();
    let ids: Vec<_> = (0..g.n).map(|_| pg.add_node(())).collect();
    for &(a, b) in &g.edges {
        pg.add_edge(ids[a], ids[b], ());
    }
    let mut sccs: Vec<Vec<usize>> = tarjan_scc(&pg).into_iter().map(|c| {
        let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
        v.sort();
        v
    }).collect();
    sccs.sort();
    let mut scc_of = vec![0; g.n];
    for (i, c) in sccs.iter().enumerate() {
        for &v in c {
            scc_of[v] = i;
        }
    }
    let cyclic: Vec<bool> = sccs
        .iter()
        .enumerate()
        .map(|(i, c)| c.len() > 1 || g.edges.iter().any(|&(a, b)| a == b && scc_of[a] == i))
        .collect();
    let on_cycle: Vec<bool> = (0..g.n).map(|v| cyclic[scc_of[v]]).collect();
    let reach = |fwd: bool| {
        let mut seen = on_cycle.clone();
        let mut q: VecDeque<usize> = (0..g.n).filter(|&v| on_cycle[v]).collect();
        while let Some(v) = q.pop_front() {
            for &(a, b) in &g.edges {
                let (from, to) = if fwd { (a, b) } else { (b, a) };
                if from == v && !seen[to] {
                    seen[to] = true;
                    q.push_back(to);
                }
            }
        }
        seen
    };
    let (f, b) = (reach(true), reach(false));
    Structure { essential: (0..g.n).map(|v| f[v] && b[v]).collect(), scc_of, sccs, cyclic }
}

/// Shortest edge path from any node of `from` to any node of `to`, using
/// essential nodes only.
fn path_between(g: &Digraph, st: &Structure, from: &[usize], to: &[usize]) -> Option<Vec<usize>> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut q: VecDeque<usize> = from.iter().copied().collect();
    let mut seen: BTreeSet<usize> = from.iter().copied().collect();
    while let Some(v) = q.pop_front() {
        if to.contains(&v) && !from.contains(&v) {
            let mut path = Vec::new();
            let mut x = v;
            while let Some(&e) = prev.get(&x) {
                path.push(e);
                x = g.edges[e].0;
                if from.contains(&x) {
                    break;
                }
            }
            path.reverse();
            return Some(path);
        }
        for e in g.out(v) {
            let w = g.edges[e].1;
            if st.essential[w] && seen.insert(w) {
                prev.insert(w, e);
                q.push_back(w);
            }
        }
    }
    None
}

/// A cycle through the first edge, closed inside the SCC of its tail.
fn cycle_through(g: &Digraph, st: &Structure, first: usize) -> Vec<usize> {
    let (start, next) = g.edges[first];
    let scc = st.scc_of[start];
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut q = VecDeque::from([next]);
    let mut seen = BTreeSet::from([next]);
    while let Some(v) = q.pop_front() {
        if v == start {
            break;
        }
        for e in g.out(v) {
            let w = g.edges[e].1;
            if st.scc_of[w] == scc && seen.insert(w) {
                prev.insert(w, e);
                q.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut x = start;
    while x != next {
        let e = prev[&x];
        path.push(e);
        x = g.edges[e].0;
    }
    path.push(first);
    path.reverse();
    path
}

/// Node cycle of a simple cyclic SCC, as edge ids starting at its least node.
fn simple_cycle(g: &Digraph, st: &Structure, scc: usize) -> Vec<usize> {
    let v = st.sccs[scc][0];
    let e = g.out(v).find(|&e| st.scc_of[g.edges[e].1] == scc).expect("cyclic scc");
    cycle_through(g, st, e)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Branching {
    /// An essential edge along which rows slide.
    Continuum { edge: usize },
    /// Two different cycles (edge lists) through one node.
    TwoCycles { first: Vec<usize>, second: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Verdict {
    Finite { count: usize, walks: Vec<String> },
    /// Cycles `A`, `B`, `C` (edge lists) joined by paths `A -> B -> C`;
    /// `B` can be traversed any finite number of times.
    CountablyInfinite { cycles: [Vec<usize>; 3], paths: [Vec<usize>; 2] },
    Uncountable { witness: Branching },
}

impl Verdict {
    pub fn class(&self) -> &'static str {
        match self {
            Verdict::Finite { .. } => "finite",
            Verdict::CountablyInfinite { .. } => "countably_infinite",
            Verdict::Uncountable { .. } => "uncountable",
        }
    }
}

pub fn classify(g: &Digraph) -> Verdict {
    let st = structure(g);
    for (i, &(a, b)) in g.edges.iter().enumerate() {
        if g.continuum[i] && st.essential[a] && st.essential[b] {
            return Verdict::Uncountable { witness: Branching::Continuum { edge: i } };
        }
    }
    for (k, c) in st.sccs.iter().enumerate() {
        if !st.cyclic[k] || !st.essential[c[0]] {
            continue;
        }
        let inner: Vec<usize> = (0..g.edges.len()).filter(|&e| st.scc_of[g.edges[e].0] == k && st.scc_of[g.edges[e].1] == k).collect();
        if inner.len() > c.len() {
            let v = c.iter().copied().find(|&v| inner.iter().filter(|&&e| g.edges[e].0 == v).count() >= 2).expect("some node branches");
            let outs: Vec<usize> = inner.iter().copied().filter(|&e| g.edges[e].0 == v).take(2).collect();
            return Verdict::Uncountable {
                witness: Branching::TwoCycles { first: cycle_through(g, &st, outs[0]), second: cycle_through(g, &st, outs[1]) },
            };
        }
    }
    let cyc: Vec<usize> = (0..st.sccs.len()).filter(|&k| st.cyclic[k] && st.essential[st.sccs[k][0]]).collect();
    for &b in &cyc {
        for &a in &cyc {
            if a == b {
                continue;
            }
            let Some(p1) = path_between(g, &st, &st.sccs[a], &st.sccs[b]) else { continue };
            for &c in &cyc {
                if c == a || c == b {
                    continue;
                }
                if let Some(p2) = path_between(g, &st, &st.sccs[b], &st.sccs[c]) {
                    return Verdict::CountablyInfinite {
                        cycles: [simple_cycle(g, &st, a), simple_cycle(g, &st, b), simple_cycle(g, &st, c)],
                        paths: [p1, p2],
                    };
                }
            }
        }
    }
    let names: Vec<String> = (0..g.n).map(|v| v.to_string()).collect();
    let fams = families(g, &st, usize::MAX);
    Verdict::Finite { count: fams.len(), walks: fams.iter().map(|f| render(g, &st, f, &names, &[])).collect() }
}

/// `C0^inf . t1 . C1^n . t2 ... Ck^inf`: cyclic SCC ids and transit edge
/// paths between consecutive ones.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Family {
    cycles: Vec<usize>,
    transits: Vec<Vec<usize>>,
}

fn transits_from(g: &Digraph, st: &Structure, scc: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = Vec::new();
    for &v in &st.sccs[scc] {
        for e in g.out(v) {
            let w = g.edges[e].1;
            if st.scc_of[w] != scc && st.essential[w] {
                stack.push(vec![e]);
            }
        }
    }
    while let Some(p) = stack.pop() {
        let v = g.edges[*p.last().expect("nonempty")].1;
        if st.cyclic[st.scc_of[v]] {
            out.push(p);
            continue;
        }
        for e in g.out(v) {
            if st.essential[g.edges[e].1] {
                let mut q = p.clone();
                q.push(e);
                stack.push(q);
            }
        }
    }
    out.sort();
    out
}

fn cycle_len(st: &Structure, scc: usize) -> usize {
    st.sccs[scc].len()
}

fn families(g: &Digraph, st: &Structure, bound: usize) -> Vec<Family> {
    let cyc: Vec<usize> = (0..st.sccs.len()).filter(|&k| st.cyclic[k] && st.essential[st.sccs[k][0]]).collect();
    let mut out = Vec::new();
    let mut stack: Vec<Family> = cyc.iter().map(|&c| Family { cycles: vec![c], transits: Vec::new() }).collect();
    while let Some(f) = stack.pop() {
        let size: usize = f.cycles.iter().map(|&c| cycle_len(st, c)).sum::<usize>() + f.transits.iter().map(|t| t.len() - 1).sum::<usize>();
        if size > bound {
            continue;
        }
        let last = *f.cycles.last().expect("nonempty");
        for t in transits_from(g, st, last) {
            let next = st.scc_of[g.edges[*t.last().expect("nonempty")].1];
            let mut h = f.clone();
            h.cycles.push(next);
            h.transits.push(t);
            stack.push(h);
        }
        out.push(f);
    }
    out.sort_by(|a, b| (a.cycles.len(), &a.cycles, &a.transits).cmp(&(b.cycles.len(), &b.cycles, &b.transits)));
    out
}

/// Cycle of SCC `scc` as node ids, starting at `at`.
fn cycle_nodes(g: &Digraph, st: &Structure, scc: usize, at: usize) -> Vec<usize> {
    let mut nodes = vec![at];
    let mut v = at;
    loop {
        let e = g.out(v).find(|&e| st.scc_of[g.edges[e].1] == scc).expect("cyclic scc");
        v = g.edges[e].1;
        if v == at {
            return nodes;
        }
        nodes.push(v);
    }
}

fn word(nodes: &[usize], names: &[String]) -> String {
    let w: Vec<&str> = nodes.iter().map(|&v| names[v].as_str()).collect();
    if w.len() == 1 {
        w[0].to_string()
    } else {
        format!("({})", w.join("·"))
    }
}

/// Text of a family. `vars` names the pump exponents of middle cycles.
fn render(g: &Digraph, st: &Structure, f: &Family, names: &[String], vars: &[String]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let k = f.cycles.len();
    for (i, &c) in f.cycles.iter().enumerate() {
        let entry = if i == 0 { None } else { Some(g.edges[*f.transits[i - 1].last().expect("nonempty")].1) };
        let exit = if i + 1 == k { None } else { Some(g.edges[f.transits[i][0]].0) };
        match (entry, exit) {
            (None, None) => parts.push(format!("{}^∞", word(&cycle_nodes(g, st, c, st.sccs[c][0]), names))),
            (None, Some(x)) => {
                let mut cy = cycle_nodes(g, st, c, x);
                cy.rotate_left(1);
                parts.push(format!("{}^∞", word(&cy, names)));
            }
            (Some(e), None) => parts.push(format!("{}^∞", word(&cycle_nodes(g, st, c, e), names))),
            (Some(e), Some(x)) => {
                let cy = cycle_nodes(g, st, c, e);
                let var = vars.get(i - 1).cloned().unwrap_or_else(|| "n".into());
                let pos = cy.iter().position(|&v| v == x).expect("exit on cycle");
                if pos + 1 == cy.len() {
                    parts.push(format!("{}^{var}", word(&cy, names)));
                } else {
                    parts.push(format!("{}^{var}", word(&cy, names)));
                    parts.extend(cy[..=pos].iter().map(|&v| names[v].clone()));
                }
            }
        }
        if i + 1 < k {
            let t = &f.transits[i];
            parts.extend(t[..t.len() - 1].iter().map(|&e| names[g.edges[e].1].clone()));
        }
    }
    parts.join("·")
}

/// A walk family: its text and the ranges of its pump exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkFamily {
    pub walk: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<String>,
}

/// Walk classes up to shift, and up to the half-turn involution when one
/// is given. A family whose pumped middle cycle may be skipped absorbs the
/// skipping family, and its exponent then starts at zero.
pub fn enumerate_walk_classes(g: &Digraph, names: &[String], involution: Option<&[usize]>, bound: usize) -> Result<Vec<WalkFamily>, RowError> {
    if matches!(classify(g), Verdict::Uncountable { .. }) {
        return Err(RowError::Uncountable);
    }
    let st = structure(g);
    let fams = families(g, &st, bound);
    let vars = |f: &Family| -> Vec<String> {
        let m = f.cycles.len().saturating_sub(2);
        if m == 1 {
            vec!["n".into()]
        } else {
            (1..=m).map(|i| format!("n{i}")).collect()
        }
    };
    let texts: Vec<String> = fams.iter().map(|f| render(g, &st, f, names, &vars(f))).collect();
    let mut absorbed = vec![false; fams.len()];
    let mut params: Vec<Vec<String>> = fams.iter().map(|f| vars(f).iter().map(|v| format!("{v} >= 1")).collect()).collect();
    for (i, f) in fams.iter().enumerate() {
        for m in 1..f.cycles.len().saturating_sub(1) {
            let c = f.cycles[m];
            let entry = g.edges[*f.transits[m - 1].last().expect("nonempty")].1;
            let exit = g.edges[f.transits[m][0]].0;
            let cy = cycle_nodes(g, &st, c, entry);
            if cy.last() != Some(&exit) {
                continue;
            }
            let vs = vars(f);
            let skipped: Vec<String> = texts[i].split('·').filter(|p| *p != format!("{}^{}", word(&cy, names), vs[m - 1])).map(String::from).collect();
            let skipped = skipped.join("·");
            if let Some(j) = texts.iter().position(|t| *t == skipped) {
                absorbed[j] = true;
                params[i][m - 1] = format!("{} >= 0", vs[m - 1]);
            }
        }
    }
    let mut out: Vec<(Vec<usize>, WalkFamily)> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (i, f) in fams.iter().enumerate() {
        if absorbed[i] {
            continue;
        }
        let key = family_key(g, &st, f);
        let mut canon = texts[i].clone();
        if let Some(inv) = involution {
            if let Some(r) = reverse_family(g, &st, f, inv) {
                let alt = render(g, &st, &r, names, &vars(&r));
                if family_key(g, &st, &r) < key {
                    canon = alt;
                }
            }
        }
        if seen.insert(canon) {
            out.push((key, WalkFamily { walk: texts[i].clone(), params: params[i].clone() }));
        }
    }
    out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    Ok(out.into_iter().map(|(_, w)| w).collect())
}

fn family_key(g: &Digraph, st: &Structure, f: &Family) -> Vec<usize> {
    let mut k = Vec::new();
    for (i, &c) in f.cycles.iter().enumerate() {
        k.push(st.sccs[c][0]);
        if let Some(t) = f.transits.get(i) {
            k.extend(t.iter().map(|&e| g.edges[e].1));
        }
    }
    k
}

fn reverse_family(g: &Digraph, st: &Structure, f: &Family, inv: &[usize]) -> Option<Family> {
    let map_edge = |e: usize| -> Option<usize> {
        let (a, b) = g.edges[e];
        let rank = g.edges[..e].iter().filter(|&&x| x == (a, b)).count();
        g.edges.iter().enumerate().filter(|(_, &x)| x == (inv[b], inv[a])).nth(rank).map(|(i, _)| i)
    };
    let cycles = f.cycles.iter().rev().map(|&c| st.scc_of[inv[st.sccs[c][0]]]).collect();
    let transits = f.transits.iter().rev().map(|t| t.iter().rev().map(|&e| map_edge(e)).collect::<Option<Vec<_>>>()).collect::<Option<Vec<_>>>()?;
    Some(Family { cycles, transits })
}

fn is_path(g: &Digraph, p: &[usize]) -> bool {
    p.iter().all(|&e| e < g.edges.len()) && p.windows(2).all(|w| g.edges[w[0]].1 == g.edges[w[1]].0)
}

fn is_cycle(g: &Digraph, c: &[usize]) -> bool {
    !c.is_empty() && is_path(g, c) && g.edges[c[c.len() - 1]].1 == g.edges[c[0]].0
}

fn nodes_of(g: &Digraph, c: &[usize]) -> BTreeSet<usize> {
    c.iter().map(|&e| g.edges[e].0).collect()
}

fn reaches(g: &Digraph, from: &BTreeSet<usize>, to: &BTreeSet<usize>) -> bool {
    let mut seen = from.clone();
    let mut q: VecDeque<usize> = from.iter().copied().collect();
    while let Some(v) = q.pop_front() {
        if to.contains(&v) {
            return true;
        }
        for &(a, b) in &g.edges {
            if a == v && seen.insert(b) {
                q.push_back(b);
            }
        }
    }
    false
}

/// Replays a verdict's witness against the graph; finite counts are
/// recounted by walk enumeration.
pub fn validate_verdict(g: &Digraph, v: &Verdict) -> bool {
    let growth = walk_growth(g);
    match v {
        Verdict::Uncountable { witness: Branching::Continuum { edge } } => {
            *edge < g.edges.len() && g.continuum[*edge] && {
                let st = structure(g);
                let (a, b) = g.edges[*edge];
                st.essential[a] && st.essential[b]
            }
        }
        Verdict::Uncountable { witness: Branching::TwoCycles { first, second } } => {
            is_cycle(g, first) && is_cycle(g, second) && {
                let (na, nb) = (nodes_of(g, first), nodes_of(g, second));
                let rot = |c: &[usize], d: &[usize]| c.len() == d.len() && (0..c.len()).any(|s| (0..c.len()).all(|k| c[k] == d[(k + s) % c.len()]));
                na.intersection(&nb).next().is_some() && !rot(first, second)
            }
        }
        Verdict::CountablyInfinite { cycles, paths } => {
            if !cycles.iter().all(|c| is_cycle(g, c)) || !paths.iter().all(|p| !p.is_empty() && is_path(g, p)) {
                return false;
            }
            let ns: Vec<BTreeSet<usize>> = cycles.iter().map(|c| nodes_of(g, c)).collect();
            let starts = |p: &[usize], s: &BTreeSet<usize>| s.contains(&g.edges[p[0]].0);
            let ends = |p: &[usize], s: &BTreeSet<usize>| s.contains(&g.edges[p[p.len() - 1]].1);
            starts(&paths[0], &ns[0])
                && ends(&paths[0], &ns[1])
                && starts(&paths[1], &ns[1])
                && ends(&paths[1], &ns[2])
                && !reaches(g, &ns[1], &ns[0])
                && !reaches(g, &ns[2], &ns[1])
                && growth.class != "uncountable"
        }
        Verdict::Finite { count, .. } => growth.class == "finite" && growth.count == Some(*count),
    }
}

/// Result of counting walks directly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Growth {
    pub class: &'static str,
    pub count: Option<usize>,
}

type Mat = Vec<Vec<f64>>;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0.0 {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

fn mat_pow(a: &Mat, mut e: u32) -> Mat {
    let n = a.len();
    let mut r: Mat = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut b = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            r = mat_mul(&r, &b);
        }
        b = mat_mul(&b, &b);
        e >>= 1;
    }
    r
}

fn total(m: &Mat) -> f64 {
    m.iter().flatten().sum()
}

/// Counts walks of length `L` among nodes that carry arbitrarily long
/// walks in both directions, then reads the class off the growth of those
/// counts: linear means finitely many classes, polynomial of higher degree
/// means countably many, anything faster (or an essential continuum edge)
/// means uncountably many. Samples are taken 60 steps apart so that
/// periodic fluctuations from cycles of length at most 5 cancel.
pub fn walk_growth(g: &Digraph) -> Growth {
    let n = g.n;
    let mut a: Mat = vec![vec![0.0; n]; n];
    for &(x, y) in &g.edges {
        a[x][y] += 1.0;
    }
    let far = (2 * n * n).max(n) as u32;
    let p = mat_pow(&a, far);
    let ess: Vec<bool> = (0..n).map(|v| (0..n).any(|u| p[u][v] > 0.0) && (0..n).any(|w| p[v][w] > 0.0)).collect();
    for (i, &(x, y)) in g.edges.iter().enumerate() {
        if g.continuum[i] && ess[x] && ess[y] {
            return Growth { class: "uncountable", count: None };
        }
    }
    let mut e: Mat = vec![vec![0.0; n]; n];
    for &(x, y) in &g.edges {
        if ess[x] && ess[y] {
            e[x][y] += 1.0;
        }
    }
    const STEP: u32 = 60;
    let base = mat_pow(&e, far);
    let jump = mat_pow(&e, STEP);
    let mut samples = Vec::new();
    let mut m = base;
    for _ in 0..7 {
        samples.push(total(&m));
        m = mat_mul(&m, &jump);
    }
    let diff = |s: &[f64]| s.windows(2).map(|w| w[1] - w[0]).collect::<Vec<f64>>();
    let mut d = samples.clone();
    let mut order = Vec::new();
    for _ in 0..6 {
        d = diff(&d);
        order.push(d.clone());
    }
    if !samples.iter().all(|x| x.is_finite() && *x < 9.0e15) || order[n.clamp(1, 5)].iter().any(|&x| x != 0.0) {
        return Growth { class: "uncountable", count: None };
    }
    if order[1].iter().any(|&x| x != 0.0) {
        return Growth { class: "countably_infinite", count: None };
    }
    // slope = transit classes; periodic classes from primitive closed walks
    let slope = (order[0][0] / STEP as f64).round() as usize;
    let mut cycles = 0.0;
    for len in 1..=n.max(1) as u32 {
        let mut prim = 0.0;
        for dv in 1..=len {
            if len % dv == 0 {
                let tr: f64 = (0..n).map(|i| mat_pow(&e, dv)[i][i]).sum();
                prim += mobius(len / dv) as f64 * tr;
            }
        }
        cycles += prim / len as f64;
    }
    Growth { class: "finite", count: Some(slope + cycles.round() as usize) }
}

fn mobius(n: u32) -> i32 {
    let mut m = n;
    let mut r = 1;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if m > 1 {
        r = -r;
    }
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct RowReport {
    pub rows: Vec<String>,
    pub edges: Vec<RowEdge>,
    pub verdict: Verdict,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walks: Option<Vec<WalkFamily>>,
}

/// Build, classify and (when countable) list walk families of the rows
/// declared in the protoset.
pub fn analyze_rows(ps: &Protoset, bound: usize) -> Result<RowReport, RowError> {
    let g = build_row_graph(ps, &ps.rows)?;
    let d = g.digraph();
    let verdict = classify(&d);
    let valid = validate_verdict(&d, &verdict);
    let names = g.names();
    let walks = match verdict {
        Verdict::Uncountable { .. } => None,
        _ => Some(enumerate_walk_classes(&d, &names, g.involution().as_deref(), bound)?),
    };
    Ok(RowReport { rows: names, edges: g.edges, verdict, valid, walks })
}
