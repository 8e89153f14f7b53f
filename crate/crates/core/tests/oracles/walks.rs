//! Walk-growth oracle for `classify`. See `classify_oracle.rs`.

#![allow(dead_code)]

use morphtile::rows::{classify, validate_verdict, Digraph, Verdict};

pub type Mat = [[u128; 5]; 5];

fn mul(a: &Mat, b: &Mat, n: usize) -> Mat {
    let mut c = [[0u128; 5]; 5];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                c[i][j] = c[i][j].saturating_add(a[i][k].saturating_mul(b[k][j]));
            }
        }
    }
    c
}

fn power(a: &Mat, mut e: u32, n: usize) -> Mat {
    let mut r = [[0u128; 5]; 5];
    for (i, row) in r.iter_mut().enumerate().take(n) {
        row[i] = 1;
    }
    let mut b = *a;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(&r, &b, n);
        }
        b = mul(&b, &b, n);
        e >>= 1;
    }
    r
}

#[derive(Debug, PartialEq, Eq)]
pub enum Oracle {
    Finite(usize),
    Countable,
    Uncountable,
}

pub fn oracle(n: usize, adj: &[[bool; 5]; 5]) -> Oracle {
    let mut a = [[0u128; 5]; 5];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = adj[i][j] as u128;
        }
    }
    // on a bi-infinite walk: walks of length n both into and out of the node
    let p = power(&a, n as u32, n);
    let ess: Vec<bool> = (0..n).map(|v| (0..n).any(|u| p[u][v] > 0) && (0..n).any(|w| p[v][w] > 0)).collect();
    let mut e = [[0u128; 5]; 5];
    for i in 0..n {
        for j in 0..n {
            e[i][j] = (adj[i][j] && ess[i] && ess[j]) as u128;
        }
    }
    let total = |len: u32| -> u128 {
        let m = power(&e, len, n);
        m.iter().take(n).flat_map(|r| r.iter().take(n)).fold(0u128, |s, x| s.saturating_add(*x))
    };
    let (lo, hi) = (total(128), total(256));
    if lo == 0 {
        return Oracle::Finite(0);
    }
    if hi == u128::MAX || hi / lo > 1000 {
        return Oracle::Uncountable;
    }
    if hi > 3 * lo {
        return Oracle::Countable;
    }
    // finite: one class per cycle, plus one per path leaving a cycle and
    // entering a different one through nodes on no cycle
    let powers: Vec<Mat> = (1..=n as u32).map(|k| power(&a, k, n)).collect();
    let on_cycle: Vec<bool> = (0..n).map(|v| powers.iter().any(|m| m[v][v] > 0)).collect();
    let reaches = |u: usize, v: usize| u == v || powers.iter().any(|m| m[u][v] > 0);
    let same = |u: usize, v: usize| reaches(u, v) && reaches(v, u);
    let cycles = (0..n).filter(|&v| on_cycle[v] && (0..v).all(|u| !(on_cycle[u] && same(u, v)))).count();
    let mut transits = 0;
    fn walk(v: usize, n: usize, adj: &[[bool; 5]; 5], on_cycle: &[bool], from: usize, same: &dyn Fn(usize, usize) -> bool, count: &mut usize) {
        for w in 0..n {
            if !adj[v][w] || same(from, w) {
                continue;
            }
            if on_cycle[w] {
                *count += 1;
            } else {
                walk(w, n, adj, on_cycle, from, same, count);
            }
        }
    }
    for u in (0..n).filter(|&u| on_cycle[u]) {
        walk(u, n, adj, &on_cycle, u, &same, &mut transits);
    }
    Oracle::Finite(cycles + transits)
}

/// Node keys (loop, out-degree, in-degree) must be non-increasing: every
/// digraph has a relabelling that passes.
fn sorted(n: usize, adj: &[[bool; 5]; 5]) -> bool {
    let key = |v: usize| (adj[v][v], (0..n).filter(|&w| adj[v][w]).count(), (0..n).filter(|&u| adj[u][v]).count());
    (1..n).all(|v| key(v - 1) >= key(v))
}

pub fn check(n: usize, mask: u32) -> Option<String> {
    let mut adj = [[false; 5]; 5];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if mask >> (i * n + j) & 1 == 1 {
                adj[i][j] = true;
                edges.push((i, j));
            }
        }
    }
    if !sorted(n, &adj) {
        return None;
    }
    let g = Digraph::new(n, edges);
    let v = classify(&g);
    let want = oracle(n, &adj);
    let agree = match (&v, &want) {
        (Verdict::Finite { count, .. }, Oracle::Finite(c)) => count == c,
        (Verdict::CountablyInfinite { .. }, Oracle::Countable) => true,
        (Verdict::Uncountable { .. }, Oracle::Uncountable) => true,
        _ => false,
    };
    if !agree || !validate_verdict(&g, &v) {
        return Some(format!("n={n} edges={:?}: classify {v:?}, oracle {want:?}", g.edges));
    }
    None
}
