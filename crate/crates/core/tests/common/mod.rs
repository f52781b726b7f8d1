#![allow(dead_code)]

use gallai_core::{Color, ColoredCompleteGraph};
use rand::Rng;

/// Whether the color class contains a cycle on exactly `len` vertices, by
/// extending every vertex sequence along edges of the color. No anchoring,
/// no symmetry reduction, no graph-theoretic shortcuts.
pub fn brute_mono_cycle(g: &ColoredCompleteGraph, color: Color, len: usize) -> bool {
    fn extend(g: &ColoredCompleteGraph, color: Color, len: usize, seq: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let last = *seq.last().unwrap();
        if seq.len() == len {
            return g.color(last, seq[0]) == color;
        }
        for w in 0..g.n() {
            if !used[w] && g.color(last, w) == color {
                used[w] = true;
                seq.push(w);
                let hit = extend(g, color, len, seq, used);
                seq.pop();
                used[w] = false;
                if hit {
                    return true;
                }
            }
        }
        false
    }
    if len < 3 || len > g.n() {
        return false;
    }
    let mut used = vec![false; g.n()];
    for start in 0..g.n() {
        used[start] = true;
        let hit = extend(g, color, len, &mut vec![start], &mut used);
        used[start] = false;
        if hit {
            return true;
        }
    }
    false
}

pub fn brute_rainbow(g: &ColoredCompleteGraph) -> bool {
    let n = g.n();
    (0..n).any(|a| {
        (a + 1..n).any(|b| {
            (b + 1..n).any(|c| {
                let (x, y, z) = (g.color(a, b), g.color(a, c), g.color(b, c));
                x != y && x != z && y != z
            })
        })
    })
}

/// Any coloring, not necessarily rainbow-free. Color 1 gets weight
/// `dominant` out of 100 so that long monochromatic cycles appear and vanish
/// across the corpus.
pub fn random_coloring<R: Rng>(rng: &mut R, n: usize, k: usize, dominant: u32) -> ColoredCompleteGraph {
    ColoredCompleteGraph::from_fn(n, k, |_, _| {
        if k == 1 || rng.random_range(0..100) < dominant {
            1
        } else {
            rng.random_range(2..=k) as Color
        }
    })
    .unwrap()
}
