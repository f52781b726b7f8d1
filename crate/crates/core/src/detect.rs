//! Rainbow-triangle and monochromatic-cycle detection.
//!
//! Cycle search is exact: a query either returns a witness, proves absence, or
//! reports [`CycleSearch::Inconclusive`] when the node budget runs out. It
//! never turns a budget overrun into "absent".

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::{BitSet, Bits};
use crate::model::{Color, ColoredCompleteGraph};

/// Default per-query cap on path extensions.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Nodes granted to each color in the first, cheap pass of [`is_bad`].
const PROBE_BUDGET: u64 = 200_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DetectError {
    #[error("color {color} out of range 1..={k}")]
    ColorOutOfRange { color: Color, k: usize },
    #[error("cycle length {0} is below 3")]
    CycleTooShort(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("vertex {0} repeated")]
    RepeatedVertex(usize),
    #[error("expected {expected} vertices, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("edge ({0}, {1}) has color {2}, expected {3}")]
    WrongColor(usize, usize, Color, Color),
    #[error("triangle colors are not pairwise distinct")]
    NotRainbow,
    #[error("mono-cycle witness carries no color")]
    MissingColor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    RainbowTriangle,
    MonoCycle,
}

/// A rainbow triangle or a monochromatic cycle, given by its vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleWitness {
    pub kind: WitnessKind,
    pub color: Option<Color>,
    pub vertices: Vec<usize>,
}

impl CycleWitness {
    pub fn rainbow(a: usize, b: usize, c: usize) -> Self {
        Self {
            kind: WitnessKind::RainbowTriangle,
            color: None,
            vertices: vec![a, b, c],
        }
    }

    pub fn mono_cycle(color: Color, vertices: Vec<usize>) -> Self {
        Self {
            kind: WitnessKind::MonoCycle,
            color: Some(color),
            vertices,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Re-reads every edge from `g` and checks the witness claim.
    pub fn validate(&self, g: &ColoredCompleteGraph) -> Result<(), WitnessError> {
        let mut seen = vec![false; g.n()];
        for &v in &self.vertices {
            if v >= g.n() {
                return Err(WitnessError::VertexOutOfRange(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(WitnessError::RepeatedVertex(v));
            }
        }
        match self.kind {
            WitnessKind::RainbowTriangle => {
                let [a, b, c] = self.vertices[..] else {
                    return Err(WitnessError::WrongLength {
                        expected: 3,
                        found: self.vertices.len(),
                    });
                };
                let (x, y, z) = (g.color(a, b), g.color(a, c), g.color(b, c));
                if x == y || x == z || y == z {
                    return Err(WitnessError::NotRainbow);
                }
            }
            WitnessKind::MonoCycle => {
                let color = self.color.ok_or(WitnessError::MissingColor)?;
                let l = self.vertices.len();
                if l < 3 {
                    return Err(WitnessError::WrongLength { expected: 3, found: l });
                }
                for i in 0..l {
                    let (u, v) = (self.vertices[i], self.vertices[(i + 1) % l]);
                    let c = g.color(u, v);
                    if c != color {
                        return Err(WitnessError::WrongColor(u, v, c, color));
                    }
                }
            }
        }
        Ok(())
    }
}

/// First rainbow triangle `(a, b, c)`, `a < b < c`, in lexicographic order.
pub fn find_rainbow_triangle(g: &ColoredCompleteGraph) -> Option<CycleWitness> {
    let n = g.n();
    for a in 0..n {
        for b in (a + 1)..n {
            let ab = g.color(a, b);
            for c in (b + 1)..n {
                let ac = g.color(a, c);
                if ac == ab {
                    continue;
                }
                let bc = g.color(b, c);
                if bc != ab && bc != ac {
                    return Some(CycleWitness::rainbow(a, b, c));
                }
            }
        }
    }
    None
}

/// Outcome of one `(color, length)` cycle query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleSearch {
    Found(CycleWitness),
    Absent,
    /// The node budget ran out before the search space was covered.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleOutcome {
    pub result: CycleSearch,
    pub nodes: u64,
}

impl CycleOutcome {
    pub fn witness(&self) -> Option<&CycleWitness> {
        match &self.result {
            CycleSearch::Found(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetectConfig {
    pub node_budget: u64,
    /// Component, block and bipartiteness reductions before backtracking.
    /// Turning them off leaves plain anchored backtracking, which is still exact.
    pub fast_paths: bool,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
            fast_paths: true,
        }
    }
}

/// [`find_mono_cycle_with`] under the default configuration.
pub fn find_mono_cycle(g: &ColoredCompleteGraph, color: Color, len: usize) -> Result<CycleOutcome, DetectError> {
    find_mono_cycle_with(g, color, len, &DetectConfig::default())
}

/// Searches the color class of `color` for a cycle on exactly `len` vertices.
pub fn find_mono_cycle_with(
    g: &ColoredCompleteGraph,
    color: Color,
    len: usize,
    config: &DetectConfig,
) -> Result<CycleOutcome, DetectError> {
    if color == 0 || usize::from(color) > g.k() {
        return Err(DetectError::ColorOutOfRange { color, k: g.k() });
    }
    if len < 3 {
        return Err(DetectError::CycleTooShort(len));
    }
    if len > g.n() {
        return Ok(CycleOutcome {
            result: CycleSearch::Absent,
            nodes: 0,
        });
    }
    let adj = class_adjacency(g, color);
    let mut searcher = CycleSearcher {
        adj: &adj,
        len,
        budget: config.node_budget,
        nodes: 0,
    };
    let found = if config.fast_paths {
        searcher.search_reduced(g.n())
    } else {
        searcher.search_plain(g.n())
    };
    let result = match found {
        Ok(Some(path)) => CycleSearch::Found(CycleWitness::mono_cycle(color, path)),
        Ok(None) => CycleSearch::Absent,
        Err(BudgetExceeded) => CycleSearch::Inconclusive,
    };
    Ok(CycleOutcome {
        result,
        nodes: searcher.nodes,
    })
}

fn class_adjacency(g: &ColoredCompleteGraph, color: Color) -> Vec<BitSet> {
    let n = g.n();
    let mut adj = vec![BitSet::new(n); n];
    for (i, j, c) in g.edges() {
        if c == color {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    adj
}

#[derive(Debug)]
struct BudgetExceeded;

struct CycleSearcher<'a> {
    adj: &'a [BitSet],
    len: usize,
    budget: u64,
    nodes: u64,
}

impl CycleSearcher<'_> {
    /// Anchored backtracking from every start vertex, no structural reductions.
    fn search_plain(&mut self, n: usize) -> Result<Option<Vec<usize>>, BudgetExceeded> {
        let mut allowed = BitSet::full(n);
        for v in 0..n {
            if let Some(path) = self.anchored(v, &allowed)? {
                return Ok(Some(path));
            }
            allowed.remove(v);
        }
        Ok(None)
    }

    /// Restricts to components and then 2-connected blocks that can host the
    /// cycle, answers complete blocks directly, and backtracks in the rest.
    fn search_reduced(&mut self, n: usize) -> Result<Option<Vec<usize>>, BudgetExceeded> {
        let odd = self.len % 2 == 1;
        let mut core = BitSet::new(n);
        for comp in components(self.adj, &BitSet::full(n)) {
            if comp.len() >= self.len {
                comp.iter().for_each(|&v| core.insert(v));
            }
        }
        if core.is_empty() || (odd && is_bipartite(self.adj, &core)) {
            return Ok(None);
        }
        let mut candidates: Vec<BitSet> = blocks(self.adj, &core)
            .into_iter()
            .filter(|b| b.count() >= self.len && !(odd && is_bipartite(self.adj, b)))
            .collect();
        candidates.sort_by_key(|b| b.iter().next());

        for block in &candidates {
            let size = block.count();
            if block.iter().all(|v| self.adj[v].intersection_count(block) == size - 1) {
                return Ok(Some(block.iter().take(self.len).collect()));
            }
        }
        for block in &candidates {
            let mut rest = block.clone();
            let order: Vec<usize> = block.iter().collect();
            for v in order {
                if rest.count() < self.len {
                    break;
                }
                for sub in blocks(self.adj, &rest) {
                    if !sub.contains(v) || sub.count() < self.len || (odd && is_bipartite(self.adj, &sub)) {
                        continue;
                    }
                    if let Some(path) = self.anchored(v, &sub)? {
                        return Ok(Some(path));
                    }
                }
                rest.remove(v);
            }
        }
        Ok(None)
    }

    /// Cycles through `start` inside `allowed` (which must contain `start`),
    /// using only vertices of `allowed`.
    fn anchored(&mut self, start: usize, allowed: &BitSet) -> Result<Option<Vec<usize>>, BudgetExceeded> {
        let dist = bfs_distances(self.adj, allowed, start);
        let reachable = dist.iter().filter(|&&d| d != u32::MAX).count();
        if reachable < self.len {
            return Ok(None);
        }
        let mut path = Vec::with_capacity(self.len);
        path.push(start);
        let mut visited = BitSet::new(allowed.words().len() * 64);
        visited.insert(start);
        if self.extend(&mut path, &mut visited, allowed, &dist)? {
            Ok(Some(path))
        } else {
            Ok(None)
        }
    }

    fn extend(
        &mut self,
        path: &mut Vec<usize>,
        visited: &mut BitSet,
        allowed: &BitSet,
        dist: &[u32],
    ) -> Result<bool, BudgetExceeded> {
        let start = path[0];
        let u = *path.last().unwrap();
        let next_len = path.len() + 1;
        // edges still needed from the new vertex back to `start`
        let remaining = (self.len - next_len + 1) as u32;
        let row = self.adj[u].words();
        for (wi, &word) in row.iter().enumerate() {
            let mask = word & allowed.words()[wi] & !visited.words()[wi];
            for b in Bits(mask) {
                let w = wi * 64 + b;
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(BudgetExceeded);
                }
                if dist[w] > remaining {
                    continue;
                }
                if next_len == self.len {
                    // each cycle is met in both directions; keep one
                    if w > path[1] && self.adj[w].contains(start) {
                        path.push(w);
                        return Ok(true);
                    }
                    continue;
                }
                path.push(w);
                visited.insert(w);
                if self.extend(path, visited, allowed, dist)? {
                    return Ok(true);
                }
                visited.remove(w);
                path.pop();
            }
        }
        Ok(false)
    }
}

fn bfs_distances(adj: &[BitSet], allowed: &BitSet, start: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for w in adj[u].iter() {
            if allowed.contains(w) && dist[w] == u32::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Connected components of the subgraph induced by `set`.
pub(crate) fn components(adj: &[BitSet], set: &BitSet) -> Vec<Vec<usize>> {
    let mut seen = BitSet::new(adj.len());
    let mut out = Vec::new();
    for root in set.iter() {
        if seen.contains(root) {
            continue;
        }
        seen.insert(root);
        let mut comp = vec![root];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for w in adj[u].iter() {
                if set.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Two-colors every component of the subgraph induced by `set` breadth-first.
pub(crate) fn is_bipartite(adj: &[BitSet], set: &BitSet) -> bool {
    let mut side: Vec<Option<bool>> = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    for root in set.iter() {
        if side[root].is_some() {
            continue;
        }
        side[root] = Some(false);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let su = side[u].unwrap();
            for w in adj[u].iter().filter(|&w| set.contains(w)) {
                match side[w] {
                    None => {
                        side[w] = Some(!su);
                        queue.push_back(w);
                    }
                    Some(sw) if sw == su => return false,
                    Some(_) => {}
                }
            }
        }
    }
    true
}

/// Biconnected blocks (including bridges) of the subgraph induced by `set`.
/// Every cycle lies inside a single block.
pub(crate) fn blocks(adj: &[BitSet], set: &BitSet) -> Vec<BitSet> {
    let n = adj.len();
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            if set.contains(v) {
                adj[v].iter().filter(|&w| set.contains(w)).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let mut disc = vec![0u32; n];
    let mut low = vec![0u32; n];
    let mut parent = vec![usize::MAX; n];
    let mut time = 0u32;
    let mut out = Vec::new();
    let mut vstack: Vec<usize> = Vec::new();
    let mut calls: Vec<(usize, usize)> = Vec::new();

    for root in set.iter() {
        if disc[root] != 0 {
            continue;
        }
        time += 1;
        disc[root] = time;
        low[root] = time;
        vstack.push(root);
        calls.push((root, 0));
        while let Some(frame) = calls.last_mut() {
            let v = frame.0;
            if frame.1 < nbrs[v].len() {
                let w = nbrs[v][frame.1];
                frame.1 += 1;
                if disc[w] == 0 {
                    parent[w] = v;
                    time += 1;
                    disc[w] = time;
                    low[w] = time;
                    vstack.push(w);
                    calls.push((w, 0));
                } else if w != parent[v] {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                calls.pop();
                if let Some(&(p, _)) = calls.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let mut block = BitSet::new(n);
                        while let Some(x) = vstack.pop() {
                            block.insert(x);
                            if x == v {
                                break;
                            }
                        }
                        block.insert(p);
                        out.push(block);
                    }
                }
            }
        }
        vstack.clear();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Bad,
    NotBad,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectStats {
    pub nodes: u64,
    pub millis: u64,
}

/// Whether a coloring avoids both rainbow triangles and monochromatic `C_len`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: VerdictKind,
    pub witnesses: Vec<CycleWitness>,
    pub stats: DetectStats,
}

impl Verdict {
    pub fn is_bad(&self) -> bool {
        self.verdict == VerdictKind::Bad
    }
}

/// [`is_bad_with`] under the default configuration.
pub fn is_bad(g: &ColoredCompleteGraph, len: usize) -> Result<Verdict, DetectError> {
    is_bad_with(g, len, &DetectConfig::default())
}

/// Rainbow scan, then a cheap probe of every color, then full-budget searches
/// for the colors the probe could not settle. Stops at the first witness.
pub fn is_bad_with(g: &ColoredCompleteGraph, len: usize, config: &DetectConfig) -> Result<Verdict, DetectError> {
    if len < 3 {
        return Err(DetectError::CycleTooShort(len));
    }
    let started = Instant::now();
    let finish = |verdict, witnesses, nodes| Verdict {
        verdict,
        witnesses,
        stats: DetectStats {
            nodes,
            millis: started.elapsed().as_millis() as u64,
        },
    };
    if let Some(w) = find_rainbow_triangle(g) {
        return Ok(finish(VerdictKind::NotBad, vec![w], 0));
    }
    let mut nodes = 0;
    let mut unsettled = Vec::new();
    let probe = DetectConfig {
        node_budget: config.node_budget.min(PROBE_BUDGET),
        ..*config
    };
    for color in 1..=g.k() as Color {
        let out = find_mono_cycle_with(g, color, len, &probe)?;
        nodes += out.nodes;
        match out.result {
            CycleSearch::Found(w) => return Ok(finish(VerdictKind::NotBad, vec![w], nodes)),
            CycleSearch::Inconclusive => unsettled.push(color),
            CycleSearch::Absent => {}
        }
    }
    let mut inconclusive = false;
    if probe.node_budget < config.node_budget {
        for color in unsettled {
            let out = find_mono_cycle_with(g, color, len, config)?;
            nodes += out.nodes;
            match out.result {
                CycleSearch::Found(w) => return Ok(finish(VerdictKind::NotBad, vec![w], nodes)),
                CycleSearch::Inconclusive => inconclusive = true,
                CycleSearch::Absent => {}
            }
        }
    } else {
        inconclusive = !unsettled.is_empty();
    }
    let verdict = if inconclusive {
        VerdictKind::Inconclusive
    } else {
        VerdictKind::Bad
    };
    Ok(finish(verdict, Vec::new(), nodes))
}
