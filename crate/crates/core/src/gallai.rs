//! Gallai partitions, reduced graphs and the substitution (blow-up) engine.
//!
//! A Gallai partition splits the vertices into `p > 1` parts so that every
//! pair of parts is joined in a single color and at most two colors occur
//! between parts. Every coloring without a rainbow triangle has one.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::{find_rainbow_triangle, CycleWitness};
use crate::model::{Color, ColoredCompleteGraph, GcolError, ModelError};

/// Largest `n` for which extraction may fall back to trying every set partition.
pub const EXHAUSTIVE_FALLBACK_MAX_N: usize = 12;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("need at least 2 vertices, got {0}")]
    TooSmall(usize),
    #[error("coloring contains a rainbow triangle on vertices {:?}", .0.vertices)]
    RainbowTriangle(CycleWitness),
    #[error("no Gallai partition found for n = {n} (no candidate color pair succeeded)")]
    NotFound { n: usize },
    #[error("part {0} is empty")]
    EmptyPart(usize),
    #[error("vertex {0} appears in more than one part")]
    Overlap(usize),
    #[error("vertex {0} is not covered by any part")]
    Uncovered(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("partition is not a Gallai partition: {0:?}")]
    Invalid(Vec<PartitionViolation>),
}

/// Parts plus the coloring between them, stored as a complete graph on the
/// parts (part `i` is reduced vertex `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GallaiPartition {
    pub parts: Vec<Vec<usize>>,
    pub reduced: ColoredCompleteGraph,
}

impl GallaiPartition {
    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    /// Claimed color between parts `i` and `j`.
    pub fn reduced_color(&self, i: usize, j: usize) -> Color {
        self.reduced.color(i, j)
    }

    /// Builds the partition whose cross colors are read off `g` through the
    /// first vertex of each part. No validation.
    fn from_parts(g: &ColoredCompleteGraph, mut parts: Vec<Vec<usize>>) -> Self {
        for p in &mut parts {
            p.sort_unstable();
        }
        parts.sort_by_key(|p| p[0]);
        let reduced = ColoredCompleteGraph::from_fn(parts.len(), g.k(), |i, j| g.color(parts[i][0], parts[j][0]))
            .expect("colors read from a valid coloring");
        Self { parts, reduced }
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    parts: Vec<Vec<usize>>,
    reduced: String,
}

impl Serialize for GallaiPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PartitionJson {
            parts: self.parts.clone(),
            reduced: self.reduced.to_gcol(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GallaiPartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PartitionJson::deserialize(d)?;
        let reduced = ColoredCompleteGraph::from_gcol(&raw.reduced).map_err(serde::de::Error::custom)?;
        Ok(Self {
            parts: raw.parts,
            reduced,
        })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            let r = self.find(v);
            by_root[r].push(v);
        }
        by_root.into_iter().filter(|g| !g.is_empty()).collect()
    }
}

/// Candidate cross-color sets in probing order: singletons, then pairs,
/// each lexicographic.
fn candidate_color_sets(used: &BTreeSet<Color>) -> Vec<(Color, Color)> {
    let colors: Vec<Color> = used.iter().copied().collect();
    let mut out: Vec<(Color, Color)> = colors.iter().map(|&a| (a, a)).collect();
    for (i, &a) in colors.iter().enumerate() {
        for &b in &colors[i + 1..] {
            out.push((a, b));
        }
    }
    out
}

/// Finest partition whose cross edges all use colors in `{a, b}` and whose
/// part pairs are monochromatic: start from the components of the other
/// colors and merge parts joined in more than one color until stable.
fn probe_color_pair(g: &ColoredCompleteGraph, a: Color, b: Color) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut uf = UnionFind::new(n);
    for (i, j, c) in g.edges() {
        if c != a && c != b {
            uf.union(i, j);
        }
    }
    loop {
        let groups = uf.groups();
        let p = groups.len();
        if p < 2 {
            return groups;
        }
        let mut index = vec![0; n];
        for (gi, grp) in groups.iter().enumerate() {
            for &v in grp {
                index[v] = gi;
            }
        }
        let mut seen: Vec<Color> = vec![0; p * p];
        let mut merges = Vec::new();
        for (i, j, c) in g.edges() {
            let (pi, pj) = (index[i], index[j]);
            if pi == pj {
                continue;
            }
            let slot = &mut seen[pi.min(pj) * p + pi.max(pj)];
            if *slot == 0 {
                *slot = c;
            } else if *slot != c {
                merges.push((i, j));
            }
        }
        if merges.is_empty() {
            return groups;
        }
        for (i, j) in merges {
            uf.union(i, j);
        }
    }
}

/// Extracts a Gallai partition by probing cross-color sets in order.
///
/// Rainbow triangles are only looked for when no candidate succeeds, so a
/// coloring with a rainbow triangle may still yield a structurally valid
/// partition.
pub fn find_gallai_partition(g: &ColoredCompleteGraph) -> Result<GallaiPartition, PartitionError> {
    let n = g.n();
    if n < 2 {
        return Err(PartitionError::TooSmall(n));
    }
    let used = g.colors_used();
    if used.len() <= 2 {
        return Ok(GallaiPartition::from_parts(g, (0..n).map(|v| vec![v]).collect()));
    }
    for (a, b) in candidate_color_sets(&used) {
        let parts = probe_color_pair(g, a, b);
        if parts.len() > 1 {
            return Ok(GallaiPartition::from_parts(g, parts));
        }
    }
    if let Some(w) = find_rainbow_triangle(g) {
        return Err(PartitionError::RainbowTriangle(w));
    }
    if n <= EXHAUSTIVE_FALLBACK_MAX_N {
        if let Some(parts) = exhaustive_partition(g) {
            return Ok(GallaiPartition::from_parts(g, parts));
        }
    }
    Err(PartitionError::NotFound { n })
}

/// Tries every set partition with at least two parts (restricted growth
/// strings, pruned as soon as a cross pair or the cross palette breaks).
pub(crate) fn exhaustive_partition(g: &ColoredCompleteGraph) -> Option<Vec<Vec<usize>>> {
    let n = g.n();
    let mut label = vec![0usize; n];
    let mut pair_color = vec![0 as Color; n * n];
    let mut cross: Vec<Color> = Vec::new();

    fn rec(
        g: &ColoredCompleteGraph,
        v: usize,
        parts: usize,
        label: &mut [usize],
        pair_color: &mut [Color],
        cross: &mut Vec<Color>,
    ) -> bool {
        let n = g.n();
        if v == n {
            return parts >= 2;
        }
        for part in 0..=parts {
            if v == 0 && part > 0 {
                break;
            }
            let mut newly_set = Vec::new();
            let cross_before = cross.len();
            let mut ok = true;
            for (u, &pu) in label.iter().enumerate().take(v) {
                if pu == part {
                    continue;
                }
                let slot = pu.min(part) * n + pu.max(part);
                let c = g.color(u, v);
                if pair_color[slot] == 0 {
                    pair_color[slot] = c;
                    newly_set.push(slot);
                    if !cross.contains(&c) {
                        cross.push(c);
                        if cross.len() > 2 {
                            ok = false;
                            break;
                        }
                    }
                } else if pair_color[slot] != c {
                    ok = false;
                    break;
                }
            }
            if ok {
                label[v] = part;
                let parts_now = parts.max(part + 1);
                if rec(g, v + 1, parts_now, label, pair_color, cross) {
                    return true;
                }
            }
            for slot in newly_set {
                pair_color[slot] = 0;
            }
            cross.truncate(cross_before);
        }
        false
    }

    if !rec(g, 0, 0, &mut label, &mut pair_color, &mut cross) {
        return None;
    }
    let parts = label.iter().copied().max().unwrap() + 1;
    let mut out = vec![Vec::new(); parts];
    for (v, &l) in label.iter().enumerate() {
        out[l].push(v);
    }
    Some(out)
}

/// A concrete reason a partition is not a Gallai partition of `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PartitionViolation {
    /// Fewer than two parts.
    TooFewParts { parts: usize },
    /// The reduced graph does not have one vertex per part.
    ReducedSize { parts: usize, reduced: usize },
    /// An edge between two parts disagrees with the claimed reduced color.
    CrossColor {
        parts: (usize, usize),
        pair: (usize, usize),
        found: Color,
        claimed: Color,
    },
    /// More than two colors are used between parts.
    TooManyCrossColors { colors: Vec<Color> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub valid: bool,
    pub violations: Vec<PartitionViolation>,
}

fn check_cover(n: usize, parts: &[Vec<usize>]) -> Result<(), PartitionError> {
    let mut owner = vec![false; n];
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(PartitionError::EmptyPart(i));
        }
        for &v in part {
            if v >= n {
                return Err(PartitionError::VertexOutOfRange { vertex: v, n });
            }
            if std::mem::replace(&mut owner[v], true) {
                return Err(PartitionError::Overlap(v));
            }
        }
    }
    match owner.iter().position(|&o| !o) {
        Some(v) => Err(PartitionError::Uncovered(v)),
        None => Ok(()),
    }
}

/// Checks every Gallai-partition invariant and reports concrete violations.
/// Structural problems (overlap, gap, empty part) are errors.
pub fn validate_partition(
    g: &ColoredCompleteGraph,
    partition: &GallaiPartition,
) -> Result<PartitionReport, PartitionError> {
    let parts = &partition.parts;
    check_cover(g.n(), parts)?;
    let mut violations = Vec::new();
    let p = parts.len();
    if p < 2 {
        violations.push(PartitionViolation::TooFewParts { parts: p });
    }
    if partition.reduced.n() != p {
        violations.push(PartitionViolation::ReducedSize {
            parts: p,
            reduced: partition.reduced.n(),
        });
    } else {
        'pairs: for i in 0..p {
            for j in (i + 1)..p {
                let claimed = partition.reduced.color(i, j);
                for &u in &parts[i] {
                    for &v in &parts[j] {
                        let found = g.color(u, v);
                        if found != claimed {
                            violations.push(PartitionViolation::CrossColor {
                                parts: (i, j),
                                pair: (u, v),
                                found,
                                claimed,
                            });
                            continue 'pairs;
                        }
                    }
                }
            }
        }
        if p >= 2 {
            let used = partition.reduced.colors_used();
            if used.len() > 2 {
                violations.push(PartitionViolation::TooManyCrossColors {
                    colors: used.into_iter().collect(),
                });
            }
        }
    }
    Ok(PartitionReport {
        valid: violations.is_empty(),
        violations,
    })
}

/// The reduced graph of a valid partition: one vertex per part, palette of `g`.
pub fn reduced_graph(
    g: &ColoredCompleteGraph,
    partition: &GallaiPartition,
) -> Result<ColoredCompleteGraph, PartitionError> {
    let report = validate_partition(g, partition)?;
    if !report.valid {
        return Err(PartitionError::Invalid(report.violations));
    }
    // cross colors were just checked against `g`, so they fit its palette
    Ok(partition
        .reduced
        .with_palette(g.k())
        .expect("validated reduced colors lie in the palette of g"))
}

#[derive(Debug, Error)]
pub enum RecipeError {
    #[error("internal node uses {} reduced colors {:?}; at most 2 allowed", .0.len(), .0)]
    TooManyReducedColors(Vec<Color>),
    #[error("internal node has {children} children but its reduced graph has {vertices} vertices")]
    ChildCount { children: usize, vertices: usize },
    #[error("leaf contains a rainbow triangle on vertices {:?}", .0.vertices)]
    RainbowLeaf(CycleWitness),
    #[error("malformed recipe json: {0}")]
    Json(String),
    #[error(transparent)]
    Gcol(#[from] GcolError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A substitution tree: leaves are colorings, internal nodes blow up each
/// vertex of a (at most 2-colored) reduced coloring into a child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstructionRecipe {
    Leaf(ColoredCompleteGraph),
    Join {
        reduced: ColoredCompleteGraph,
        children: Vec<ConstructionRecipe>,
    },
}

impl ConstructionRecipe {
    /// Two children joined completely in `color`.
    pub fn join_two(color: Color, left: Self, right: Self) -> Result<Self, ModelError> {
        let k = left.palette().max(right.palette()).max(usize::from(color));
        Ok(Self::Join {
            reduced: ColoredCompleteGraph::monochromatic(2, k, color)?,
            children: vec![left, right],
        })
    }

    /// The recipe `(reduced graph, parts as leaves)` for a partition of `g`,
    /// plus the vertex order it produces: vertex `t` of `substitute` is
    /// vertex `order[t]` of `g`.
    pub fn from_partition(
        g: &ColoredCompleteGraph,
        partition: &GallaiPartition,
    ) -> Result<(Self, Vec<usize>), ModelError> {
        let children = partition
            .parts
            .iter()
            .map(|part| g.induced_subgraph(part).map(Self::Leaf))
            .collect::<Result<Vec<_>, _>>()?;
        let order = partition.parts.iter().flat_map(|p| {
            let mut p = p.clone();
            p.sort_unstable();
            p
        });
        Ok((
            Self::Join {
                reduced: partition.reduced.clone(),
                children,
            },
            order.collect(),
        ))
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Self::Leaf(g) => g.n(),
            Self::Join { children, .. } => children.iter().map(Self::vertex_count).sum(),
        }
    }

    /// Largest palette declared anywhere in the tree.
    pub fn palette(&self) -> usize {
        match self {
            Self::Leaf(g) => g.k(),
            Self::Join { reduced, children } => children.iter().map(Self::palette).fold(reduced.k(), usize::max),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Self::Leaf(g) => serde_json::json!({ "leaf": g.to_gcol() }),
            Self::Join { reduced, children } => serde_json::json!({
                "reduced": reduced.to_gcol(),
                "children": children.iter().map(Self::to_json).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, RecipeError> {
        if let Some(leaf) = value.get("leaf") {
            let text = leaf
                .as_str()
                .ok_or_else(|| RecipeError::Json("leaf must be a gcol string".into()))?;
            return Ok(Self::Leaf(ColoredCompleteGraph::from_gcol(text)?));
        }
        let reduced = value
            .get("reduced")
            .and_then(|r| r.as_str())
            .ok_or_else(|| RecipeError::Json("node needs `leaf` or `reduced`".into()))?;
        let children = value
            .get("children")
            .and_then(|c| c.as_array())
            .ok_or_else(|| RecipeError::Json("node needs a `children` array".into()))?;
        Ok(Self::Join {
            reduced: ColoredCompleteGraph::from_gcol(reduced)?,
            children: children.iter().map(Self::from_json).collect::<Result<_, _>>()?,
        })
    }
}

/// Expands a recipe into a coloring. Children are laid out consecutively in
/// order; cross-child edges take the reduced color of their deepest common
/// node. The result palette is the largest palette in the tree.
pub fn substitute(recipe: &ConstructionRecipe) -> Result<ColoredCompleteGraph, RecipeError> {
    let k = recipe.palette();
    let n = recipe.vertex_count();
    let mut matrix = vec![0 as Color; n * n];
    fill(recipe, 0, n, &mut matrix)?;
    Ok(ColoredCompleteGraph::from_fn(n, k, |i, j| matrix[i * n + j])?)
}

fn fill(recipe: &ConstructionRecipe, offset: usize, n: usize, matrix: &mut [Color]) -> Result<(), RecipeError> {
    match recipe {
        ConstructionRecipe::Leaf(g) => {
            if let Some(w) = find_rainbow_triangle(g) {
                return Err(RecipeError::RainbowLeaf(w));
            }
            for (i, j, c) in g.edges() {
                matrix[(offset + i) * n + offset + j] = c;
            }
        }
        ConstructionRecipe::Join { reduced, children } => {
            if children.len() != reduced.n() {
                return Err(RecipeError::ChildCount {
                    children: children.len(),
                    vertices: reduced.n(),
                });
            }
            let used = reduced.colors_used();
            if used.len() > 2 {
                return Err(RecipeError::TooManyReducedColors(used.into_iter().collect()));
            }
            let mut starts = Vec::with_capacity(children.len() + 1);
            let mut at = offset;
            for child in children {
                starts.push(at);
                fill(child, at, n, matrix)?;
                at += child.vertex_count();
            }
            starts.push(at);
            for a in 0..children.len() {
                for b in (a + 1)..children.len() {
                    let c = reduced.color(a, b);
                    for u in starts[a]..starts[a + 1] {
                        for v in starts[b]..starts[b + 1] {
                            matrix[u * n + v] = c;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
