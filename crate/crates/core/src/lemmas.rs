//! Constructive versions of two structural facts about monochromatic joins.
//!
//! Both oracles return either an explicit monochromatic `C_9` built from a
//! fixed vertex pattern, or the small structure that is guaranteed when no
//! such pattern applies. Preconditions are checked, never assumed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::CycleWitness;
use crate::model::{Color, ColoredCompleteGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LemmaError {
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} occurs twice or in two roles")]
    Overlap(usize),
    #[error("color {color} out of range 1..={k}")]
    ColorOutOfRange { color: Color, k: usize },
    #[error("edge ({0}, {1}) has color {2}, expected the join color {3}")]
    NotMonochromatic(usize, usize, Color, Color),
    #[error("set {name} has {size} vertices, need at least {min}")]
    TooSmall {
        name: &'static str,
        size: usize,
        min: usize,
    },
}

fn check_roles(g: &ColoredCompleteGraph, color: Color, groups: &[&[usize]]) -> Result<(), LemmaError> {
    if color == 0 || usize::from(color) > g.k() {
        return Err(LemmaError::ColorOutOfRange { color, k: g.k() });
    }
    let mut seen = vec![false; g.n()];
    for &v in groups.iter().flat_map(|grp| grp.iter()) {
        if v >= g.n() {
            return Err(LemmaError::VertexOutOfRange { vertex: v, n: g.n() });
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(LemmaError::Overlap(v));
        }
    }
    Ok(())
}

fn check_join(g: &ColoredCompleteGraph, color: Color, left: &[usize], right: &[usize]) -> Result<(), LemmaError> {
    for &a in left {
        for &b in right {
            let c = g.color(a, b);
            if c != color {
                return Err(LemmaError::NotMonochromatic(a, b, c, color));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimOutcome {
    /// Monochromatic `C_9` through the three outside vertices.
    Cycle(CycleWitness),
    /// At most 4 vertices of `H` whose removal leaves no edge of the color.
    Cover(Vec<usize>),
}

/// Three vertices `u, v, w` outside `H`, all joined to `H` in `color`.
///
/// If the color class inside `H` has three disjoint edges `u_i v_i`, returns
/// the cycle `u, u1, v1, v, u2, v2, w, u3, v3`. Otherwise the class has
/// matching number at most 2, and the endpoints of a maximal matching (at
/// most 4 vertices) meet every edge of the color inside `H`.
pub fn three_vertex_claim(
    g: &ColoredCompleteGraph,
    h: &[usize],
    triple: [usize; 3],
    color: Color,
) -> Result<ClaimOutcome, LemmaError> {
    check_roles(g, color, &[h, &triple])?;
    check_join(g, color, &triple, h)?;

    let edges: Vec<(usize, usize)> = h
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| h[i + 1..].iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| g.color(a, b) == color)
        .collect();

    if let Some([(u1, v1), (u2, v2), (u3, v3)]) = three_disjoint_edges(&edges) {
        let [u, v, w] = triple;
        return Ok(ClaimOutcome::Cycle(CycleWitness::mono_cycle(
            color,
            vec![u, u1, v1, v, u2, v2, w, u3, v3],
        )));
    }

    let mut cover: Vec<usize> = Vec::with_capacity(4);
    for &(a, b) in &edges {
        if !cover.contains(&a) && !cover.contains(&b) {
            cover.push(a);
            cover.push(b);
        }
    }
    debug_assert!(cover.len() <= 4);
    cover.sort_unstable();
    Ok(ClaimOutcome::Cover(cover))
}

/// Exact test for a matching of size 3 by bounded-depth search.
fn three_disjoint_edges(edges: &[(usize, usize)]) -> Option<[(usize, usize); 3]> {
    let disjoint = |e: (usize, usize), f: (usize, usize)| e.0 != f.0 && e.0 != f.1 && e.1 != f.0 && e.1 != f.1;
    for (i, &e1) in edges.iter().enumerate() {
        for (j, &e2) in edges.iter().enumerate().skip(i + 1) {
            if !disjoint(e1, e2) {
                continue;
            }
            for &e3 in &edges[j + 1..] {
                if disjoint(e1, e3) && disjoint(e2, e3) {
                    return Some([e1, e2, e3]);
                }
            }
        }
    }
    None
}

/// Two disjoint sets joined completely in one color, plus an optional outside
/// vertex `x` that must also be joined to both sets in that color.
#[derive(Clone, Debug)]
pub struct JoinScenario<'g> {
    base: &'g ColoredCompleteGraph,
    y: Vec<usize>,
    z: Vec<usize>,
    color: Color,
    x: Option<usize>,
}

impl<'g> JoinScenario<'g> {
    pub fn new(
        base: &'g ColoredCompleteGraph,
        y: Vec<usize>,
        z: Vec<usize>,
        color: Color,
        x: Option<usize>,
    ) -> Result<Self, LemmaError> {
        let xs: Vec<usize> = x.into_iter().collect();
        check_roles(base, color, &[&y, &z, &xs])?;
        check_join(base, color, &y, &z)?;
        check_join(base, color, &xs, &y)?;
        check_join(base, color, &xs, &z)?;
        Ok(Self { base, y, z, color, x })
    }

    pub fn base(&self) -> &ColoredCompleteGraph {
        self.base
    }

    pub fn color(&self) -> Color {
        self.color
    }

    /// `Y ∪ Z`, plus `x` when present.
    pub fn vertices(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.y.iter().chain(&self.z).chain(self.x.iter()).copied().collect();
        all.sort_unstable();
        all
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbsenceReason {
    /// Neither side has an internal edge of the color: the class on `Y ∪ Z`
    /// is bipartite.
    BipartiteJoin,
    /// Internal edges occur only on sides of size 4. An odd cycle needs
    /// more vertices on one side than the other side can separate, so a
    /// 9-cycle would need at least 5 vertices on a side with an internal edge.
    NoInternalEdgeOnLargeSide,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JoinOutcome {
    Cycle(CycleWitness),
    /// No monochromatic `C_9` on the scenario's vertices; no outside vertex given.
    Absent(AbsenceReason),
}

/// With `|Y|, |Z| ≥ 4` joined in a color:
/// an outside vertex `x` joined to both gives `y1, x, z1, y2, z2, y3, z3, y4, z4`;
/// otherwise a side of size at least 5 with an internal edge `z1 z2` gives
/// `y1, z1, z2, y2, z3, y3, z4, y4, z5` (tried on `Z` first, then with the
/// roles of `Y` and `Z` swapped).
pub fn join_lemma(s: &JoinScenario<'_>) -> Result<JoinOutcome, LemmaError> {
    for (name, side) in [("Y", &s.y), ("Z", &s.z)] {
        if side.len() < 4 {
            return Err(LemmaError::TooSmall {
                name,
                size: side.len(),
                min: 4,
            });
        }
    }
    let (y, z) = (&s.y, &s.z);
    if let Some(x) = s.x {
        return Ok(JoinOutcome::Cycle(CycleWitness::mono_cycle(
            s.color,
            vec![y[0], x, z[0], y[1], z[1], y[2], z[2], y[3], z[3]],
        )));
    }
    let internal_edge = |side: &[usize]| {
        side.iter()
            .enumerate()
            .flat_map(|(i, &a)| side[i + 1..].iter().map(move |&b| (a, b)))
            .find(|&(a, b)| s.base.color(a, b) == s.color)
    };
    for (big, other) in [(z, y), (y, z)] {
        if big.len() < 5 {
            continue;
        }
        if let Some((a, b)) = internal_edge(big) {
            let rest: Vec<usize> = big.iter().copied().filter(|&v| v != a && v != b).collect();
            return Ok(JoinOutcome::Cycle(CycleWitness::mono_cycle(
                s.color,
                vec![other[0], a, b, other[1], rest[0], other[2], rest[1], other[3], rest[2]],
            )));
        }
    }
    let reason = if internal_edge(y).is_none() && internal_edge(z).is_none() {
        AbsenceReason::BipartiteJoin
    } else {
        AbsenceReason::NoInternalEdgeOnLargeSide
    };
    Ok(JoinOutcome::Absent(reason))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Vertices 0..3 are the outside triple; 3.. form H, joined to the triple
    /// in color 1. Inside H, color 1 exactly on `h_edges` (H-local indices).
    fn claim_graph(h_size: usize, h_edges: &[(usize, usize)]) -> ColoredCompleteGraph {
        ColoredCompleteGraph::from_fn(3 + h_size, 2, |i, j| {
            if i < 3 && j < 3 {
                2
            } else if i < 3 || j < 3 || h_edges.contains(&(i - 3, j - 3)) {
                1
            } else {
                2
            }
        })
        .unwrap()
    }

    #[test]
    fn three_disjoint_edges_give_the_pattern_cycle() {
        let g = claim_graph(7, &[(0, 1), (2, 3), (4, 5)]);
        let h: Vec<usize> = (3..10).collect();
        match three_vertex_claim(&g, &h, [0, 1, 2], 1).unwrap() {
            ClaimOutcome::Cycle(w) => {
                assert_eq!(w.vertices, vec![0, 3, 4, 1, 5, 6, 2, 7, 8]);
                w.validate(&g).unwrap();
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn no_edges_give_empty_cover() {
        let g = claim_graph(6, &[]);
        let h: Vec<usize> = (3..9).collect();
        assert_eq!(
            three_vertex_claim(&g, &h, [0, 1, 2], 1).unwrap(),
            ClaimOutcome::Cover(vec![])
        );
    }

    #[test]
    fn star_gives_two_vertex_cover() {
        let g = claim_graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        let h: Vec<usize> = (3..9).collect();
        assert_eq!(
            three_vertex_claim(&g, &h, [0, 1, 2], 1).unwrap(),
            ClaimOutcome::Cover(vec![3, 4])
        );
    }

    #[test]
    fn greedy_would_miss_but_exact_matching_finds_three() {
        // path a-b-c-d-e-f: greedy from (b,c) first would block, exact search does not
        let g = claim_graph(6, &[(1, 2), (0, 1), (2, 3), (3, 4), (4, 5)]);
        let h: Vec<usize> = (3..9).collect();
        assert!(matches!(
            three_vertex_claim(&g, &h, [0, 1, 2], 1).unwrap(),
            ClaimOutcome::Cycle(_)
        ));
    }

    #[test]
    fn claim_checks_its_join() {
        let mut g = claim_graph(5, &[]);
        g.set_color(1, 6, 2).unwrap();
        let h: Vec<usize> = (3..8).collect();
        assert_eq!(
            three_vertex_claim(&g, &h, [0, 1, 2], 1),
            Err(LemmaError::NotMonochromatic(1, 6, 2, 1))
        );
        assert_eq!(three_vertex_claim(&g, &h, [0, 1, 3], 1), Err(LemmaError::Overlap(3)));
        assert!(matches!(
            three_vertex_claim(&g, &h, [0, 1, 2], 3),
            Err(LemmaError::ColorOutOfRange { .. })
        ));
    }

    /// Y = 0..ny, Z = ny..ny+nz, optional x = last vertex. Join and x in color 1,
    /// internal edges of color 1 as listed (global indices), everything else 2.
    fn join_graph(ny: usize, nz: usize, with_x: bool, internal: &[(usize, usize)]) -> ColoredCompleteGraph {
        let n = ny + nz + usize::from(with_x);
        ColoredCompleteGraph::from_fn(n, 2, |i, j| {
            let side = |v: usize| {
                if v < ny {
                    0
                } else if v < ny + nz {
                    1
                } else {
                    2
                }
            };
            let (si, sj) = (side(i), side(j));
            if si != sj || internal.contains(&(i, j)) {
                1
            } else {
                2
            }
        })
        .unwrap()
    }

    #[test]
    fn outside_vertex_gives_first_pattern() {
        let g = join_graph(4, 4, true, &[]);
        let s = JoinScenario::new(&g, vec![0, 1, 2, 3], vec![4, 5, 6, 7], 1, Some(8)).unwrap();
        match join_lemma(&s).unwrap() {
            JoinOutcome::Cycle(w) => {
                assert_eq!(w.vertices, vec![0, 8, 4, 1, 5, 2, 6, 3, 7]);
                w.validate(&g).unwrap();
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn internal_edge_in_large_side_gives_second_pattern() {
        let g = join_graph(4, 5, false, &[(4, 5)]);
        let s = JoinScenario::new(&g, vec![0, 1, 2, 3], vec![4, 5, 6, 7, 8], 1, None).unwrap();
        match join_lemma(&s).unwrap() {
            JoinOutcome::Cycle(w) => {
                assert_eq!(w.vertices, vec![0, 4, 5, 1, 6, 2, 7, 3, 8]);
                w.validate(&g).unwrap();
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn internal_edge_in_large_y_side_is_used_too() {
        let g = join_graph(5, 4, false, &[(1, 3)]);
        let s = JoinScenario::new(&g, (0..5).collect(), (5..9).collect(), 1, None).unwrap();
        let JoinOutcome::Cycle(w) = join_lemma(&s).unwrap() else {
            panic!("expected cycle")
        };
        w.validate(&g).unwrap();
        assert_eq!(w.len(), 9);
    }

    #[test]
    fn free_sides_certify_absence() {
        let g = join_graph(4, 4, false, &[]);
        let s = JoinScenario::new(&g, vec![0, 1, 2, 3], vec![4, 5, 6, 7], 1, None).unwrap();
        assert_eq!(
            join_lemma(&s).unwrap(),
            JoinOutcome::Absent(AbsenceReason::BipartiteJoin)
        );

        let g = join_graph(4, 6, false, &[(0, 1)]);
        let s = JoinScenario::new(&g, (0..4).collect(), (4..10).collect(), 1, None).unwrap();
        assert_eq!(
            join_lemma(&s).unwrap(),
            JoinOutcome::Absent(AbsenceReason::NoInternalEdgeOnLargeSide)
        );
    }

    #[test]
    fn scenario_checks_preconditions() {
        let g = join_graph(4, 4, true, &[]);
        assert_eq!(
            JoinScenario::new(&g, vec![0, 1, 2, 3], vec![3, 4, 5, 6], 1, None).unwrap_err(),
            LemmaError::Overlap(3)
        );
        assert_eq!(
            JoinScenario::new(&g, vec![0, 1, 2, 4], vec![3, 5, 6, 7], 1, None).unwrap_err(),
            LemmaError::NotMonochromatic(0, 3, 2, 1)
        );
        let s = JoinScenario::new(&g, vec![0, 1, 2], vec![4, 5, 6, 7], 1, None).unwrap();
        assert!(matches!(join_lemma(&s), Err(LemmaError::TooSmall { name: "Y", .. })));

        let mut g2 = g.clone();
        g2.set_color(8, 5, 2).unwrap();
        assert_eq!(
            JoinScenario::new(&g2, vec![0, 1, 2, 3], vec![4, 5, 6, 7], 1, Some(8)).unwrap_err(),
            LemmaError::NotMonochromatic(8, 5, 2, 1)
        );
    }
}
