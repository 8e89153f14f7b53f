//! `classify` against an independent count of walks, over every digraph on
//! at most five nodes (one representative per isomorphism class at least).
//!
//! The oracle never looks at strongly connected components. It counts
//! walks of length `n` through nodes that lie on a bi-infinite walk, with
//! exact integer matrix powers, and reads the class off the growth:
//! exponential growth means uncountably many walks, growth like `n^k` with
//! `k >= 2` means a pumpable middle cycle. A finite count is recomputed by
//! listing the walks `cycle^∞ · path · cycle^∞` directly.

use rayon::prelude::*;

#[path = "oracles/walks.rs"]
mod walks;
use walks::{check, oracle, Oracle};

#[test]
fn every_small_digraph() {
    for n in 1..=5usize {
        let bad: Vec<String> = (0..1u32 << (n * n)).into_par_iter().filter_map(|m| check(n, m)).collect();
        assert!(bad.is_empty(), "{} disagreements, first: {}", bad.len(), bad[0]);
    }
}

#[test]
fn oracle_on_known_graphs() {
    let build = |n: usize, e: &[(usize, usize)]| {
        let mut adj = [[false; 5]; 5];
        for &(a, b) in e {
            adj[a][b] = true;
        }
        oracle(n, &adj)
    };
    // the three-row system: P↑, G↑, R, G↓, P↓
    let rows = [(0, 0), (0, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 4), (4, 4)];
    assert_eq!(build(5, &rows), Oracle::Countable);
    assert_eq!(build(2, &[(0, 0), (0, 1), (1, 0), (1, 1)]), Oracle::Uncountable);
    assert_eq!(build(2, &[(0, 0), (1, 1)]), Oracle::Finite(2));
    assert_eq!(build(3, &[(0, 0), (0, 1), (1, 2), (2, 2)]), Oracle::Finite(3));
    assert_eq!(build(2, &[(0, 1)]), Oracle::Finite(0));
}
