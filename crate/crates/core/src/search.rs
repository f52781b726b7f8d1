//! Exact backtracking search for bad colorings of `K_n`: colorings with no
//! rainbow triangle and no monochromatic `C_L`.
//!
//! Two searches are provided. [`search_bad_two_coloring`] enumerates all
//! 2-colorings edge by edge. [`search_bad_gallai`] enumerates k-colorings
//! through their recursive Gallai decomposition: a block of vertices is split
//! into `p ≥ 2` contiguous parts, every pair of parts is joined in one color,
//! at most two colors appear between parts, and each part is again a block.
//! Every coloring without a rainbow triangle arises this way up to relabeling.
//!
//! Both searches reject a partial coloring as soon as it contains a
//! monochromatic `C_L`, checking only cycles through the edge just colored.
//! A witness is re-verified with [`is_bad_with`] under an unlimited node
//! budget before it is reported.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::{is_bad_with, DetectConfig, VerdictKind};
use crate::model::{Color, ColoredCompleteGraph, MAX_COLORS};

/// Vertex limit of both searches (adjacency rows are single `u64` words).
pub const MAX_SEARCH_VERTICES: usize = 64;

pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(30 * 60);

/// Prefix depth (in edges) at which the two-color search is split into
/// independent tasks for parallel workers.
const TWO_COLOR_SPLIT_DEPTH: usize = 14;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("vertex count {n} is below the minimum {min}")]
    TooFewVertices { n: usize, min: usize },
    #[error("vertex count {0} exceeds the search limit {MAX_SEARCH_VERTICES}")]
    TooManyVertices(usize),
    #[error("cycle length {0} must be at least 3")]
    CycleTooShort(usize),
    #[error("palette size {0} out of range 1..={MAX_COLORS}")]
    Colors(usize),
    #[error("two-color mode needs exactly 2 colors, got {0}")]
    TwoColorPalette(usize),
    #[error("empty range {lo}..={hi}")]
    EmptyRange { lo: usize, hi: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    /// A bad coloring was found; `K_n` is below the threshold.
    Witness,
    /// The pruned search space holds no bad coloring.
    Exhausted,
    Timeout,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub millis: u64,
    pub symmetry_rules: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    /// Serialized in gcol text form.
    #[serde(with = "gcol_opt", default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ColoredCompleteGraph>,
    pub stats: SearchStats,
}

mod gcol_opt {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::model::ColoredCompleteGraph;

    pub fn serialize<S: Serializer>(g: &Option<ColoredCompleteGraph>, s: S) -> Result<S::Ok, S::Error> {
        match g {
            Some(g) => s.serialize_some(&g.to_gcol()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<ColoredCompleteGraph>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|text| ColoredCompleteGraph::from_gcol(&text).map_err(D::Error::custom))
            .transpose()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// `None` searches without a deadline.
    pub time_limit: Option<Duration>,
    /// With one worker the search is sequential and fully deterministic.
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            time_limit: Some(DEFAULT_TIME_LIMIT),
            workers: 1,
        }
    }
}

/// Stop flag and deadline shared by all workers of one search.
struct Control {
    deadline: Option<Instant>,
    stop: AtomicBool,
    timed_out: AtomicBool,
}

impl Control {
    fn new(config: &SearchConfig) -> Self {
        Self {
            deadline: config.time_limit.map(|t| Instant::now() + t),
            stop: AtomicBool::new(false),
            timed_out: AtomicBool::new(false),
        }
    }

    /// Reads the clock every 1024 calls per caller.
    fn halted(&self, ticks: &mut u32) -> bool {
        *ticks = ticks.wrapping_add(1);
        if ticks.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out.store(true, Ordering::Relaxed);
                    self.stop.store(true, Ordering::Relaxed);
                }
            }
        }
        self.stop.load(Ordering::Relaxed)
    }

    fn stopped(&self) -> bool {
        self.stop.load(Ordering::Relaxed)
    }
}

/// Runs `run` over `tasks` in order (one worker) or from a shared queue.
/// Returns the first witness reported and the summed node counts.
fn run_tasks<T, W, F>(tasks: &[T], workers: usize, ctl: &Control, run: F) -> (Option<W>, u64)
where
    T: Sync,
    W: Send,
    F: Fn(&T) -> (Option<W>, u64) + Sync,
{
    if workers <= 1 {
        let mut nodes = 0;
        for task in tasks {
            let (found, used) = run(task);
            nodes += used;
            if found.is_some() {
                return (found, nodes);
            }
            if ctl.stopped() {
                break;
            }
        }
        return (None, nodes);
    }
    let next = AtomicUsize::new(0);
    let nodes = AtomicU64::new(0);
    let found = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(tasks.len()) {
            scope.spawn(|| {
                while !ctl.stopped() {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(task) = tasks.get(i) else { break };
                    let (w, used) = run(task);
                    nodes.fetch_add(used, Ordering::Relaxed);
                    if let Some(w) = w {
                        ctl.stop.store(true, Ordering::Relaxed);
                        found.lock().unwrap().get_or_insert(w);
                        break;
                    }
                }
            });
        }
    });
    (found.into_inner().unwrap(), nodes.into_inner())
}

fn finish(
    ctl: &Control,
    witness: Option<ColoredCompleteGraph>,
    nodes: u64,
    started: Instant,
    rules: &[&str],
) -> SearchOutcome {
    let status = match (&witness, ctl.timed_out.load(Ordering::Relaxed)) {
        (Some(_), _) => SearchStatus::Witness,
        (None, true) => SearchStatus::Timeout,
        (None, false) => SearchStatus::Exhausted,
    };
    SearchOutcome {
        status,
        witness,
        stats: SearchStats {
            nodes,
            millis: started.elapsed().as_millis() as u64,
            symmetry_rules: rules.iter().map(|r| r.to_string()).collect(),
        },
    }
}

/// Independent check of a finished candidate with no node budget.
fn verified(g: &ColoredCompleteGraph, len: usize) -> bool {
    let exact = DetectConfig {
        node_budget: u64::MAX,
        ..DetectConfig::default()
    };
    is_bad_with(g, len, &exact)
        .map(|v| v.verdict == VerdictKind::Bad)
        .unwrap_or(false)
}

/// Whether `adj` (one color class, including the edge `u v`) has a path of
/// `len - 1` edges from `u` to `v`, i.e. a `C_len` through `u v`.
fn closes_cycle(adj: &[u64], u: usize, v: usize, len: usize) -> bool {
    fn walk(adj: &[u64], cur: usize, target: usize, edges_left: usize, used: u64) -> bool {
        if edges_left == 2 {
            return adj[cur] & adj[target] & !used != 0;
        }
        let mut next = adj[cur] & !used & !(1 << target);
        while next != 0 {
            let w = next.trailing_zeros() as usize;
            next &= next - 1;
            if walk(adj, w, target, edges_left - 1, used | 1 << w) {
                return true;
            }
        }
        false
    }
    walk(adj, u, v, len - 1, 1 << u | 1 << v)
}

fn check_common(n: usize, len: usize, min_n: usize) -> Result<(), SearchError> {
    if n < min_n {
        return Err(SearchError::TooFewVertices { n, min: min_n });
    }
    if n > MAX_SEARCH_VERTICES {
        return Err(SearchError::TooManyVertices(n));
    }
    if len < 3 {
        return Err(SearchError::CycleTooShort(len));
    }
    Ok(())
}

const TWO_COLOR_RULES: &[&str] = &["first-edge-color-fixed"];

/// [`search_bad_two_coloring_with`] under the default configuration.
pub fn search_bad_two_coloring(n: usize, len: usize) -> Result<SearchOutcome, SearchError> {
    search_bad_two_coloring_with(n, len, &SearchConfig::default())
}

/// Searches all 2-colorings of `K_n` for one with no monochromatic `C_len`.
///
/// Edges are colored in colex order `(0,1), (0,2), (1,2), (0,3), ...`, so
/// every prefix is a complete coloring of `K_j` plus a star into vertex `j`.
/// Edge `(0,1)` gets color 1; because it comes first, this is exactly the
/// rule that the color sequence is minimal under swapping the two colors.
pub fn search_bad_two_coloring_with(n: usize, len: usize, config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    check_common(n, len, 3)?;
    let started = Instant::now();
    let ctl = Control::new(config);
    let order: Vec<(usize, usize)> = (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();

    let mut root = TwoColorState::new(n, len, &order, &ctl);
    let mut prefixes = Vec::new();
    let split_at = if config.workers <= 1 { 0 } else { TWO_COLOR_SPLIT_DEPTH };
    if split_at == 0 {
        prefixes.push(Vec::new());
    } else if root.dfs(split_at, &mut prefixes) {
        let g = root.graph();
        return Ok(finish(&ctl, Some(g), root.nodes, started, TWO_COLOR_RULES));
    }
    let (witness, nodes) = run_tasks(&prefixes, config.workers, &ctl, |prefix: &Vec<u8>| {
        let mut state = TwoColorState::new(n, len, &order, &ctl);
        for &c in prefix {
            state.assign(c);
        }
        let found = state.dfs(usize::MAX, &mut Vec::new());
        (found.then(|| state.graph()), state.nodes)
    });
    Ok(finish(&ctl, witness, root.nodes + nodes, started, TWO_COLOR_RULES))
}

struct TwoColorState<'a> {
    n: usize,
    len: usize,
    order: &'a [(usize, usize)],
    adj: [[u64; MAX_SEARCH_VERTICES]; 2],
    colors: Vec<u8>,
    nodes: u64,
    ticks: u32,
    ctl: &'a Control,
}

impl<'a> TwoColorState<'a> {
    fn new(n: usize, len: usize, order: &'a [(usize, usize)], ctl: &'a Control) -> Self {
        Self {
            n,
            len,
            order,
            adj: [[0; MAX_SEARCH_VERTICES]; 2],
            colors: Vec::with_capacity(order.len()),
            nodes: 0,
            ticks: 0,
            ctl,
        }
    }

    fn assign(&mut self, c: u8) {
        let (u, v) = self.order[self.colors.len()];
        self.adj[c as usize][u] |= 1 << v;
        self.adj[c as usize][v] |= 1 << u;
        self.colors.push(c);
    }

    fn unassign(&mut self) {
        let c = self.colors.pop().expect("nonempty assignment") as usize;
        let (u, v) = self.order[self.colors.len()];
        self.adj[c][u] &= !(1 << v);
        self.adj[c][v] &= !(1 << u);
    }

    fn graph(&self) -> ColoredCompleteGraph {
        let mut g = ColoredCompleteGraph::monochromatic(self.n, 2, 1).expect("valid dimensions");
        for (&(u, v), &c) in self.order.iter().zip(&self.colors) {
            g.set_color(u, v, c + 1).expect("in range");
        }
        g
    }

    /// Extends the current assignment. Stops at depth `stop_at`, recording the
    /// prefix in `out`. Returns true with the full witness left in place.
    fn dfs(&mut self, stop_at: usize, out: &mut Vec<Vec<u8>>) -> bool {
        let e = self.colors.len();
        if e == self.order.len() {
            return verified(&self.graph(), self.len);
        }
        if e == stop_at {
            out.push(self.colors.clone());
            return false;
        }
        if self.ctl.halted(&mut self.ticks) {
            return false;
        }
        let (u, v) = self.order[e];
        let choices: &[u8] = if e == 0 { &[0] } else { &[0, 1] };
        for &c in choices {
            self.nodes += 1;
            self.assign(c);
            if !closes_cycle(&self.adj[c as usize][..self.n], u, v, self.len) && self.dfs(stop_at, out) {
                return true;
            }
            self.unassign();
        }
        false
    }
}

const GALLAI_RULES: &[&str] = &[
    "nonincreasing-part-sizes",
    "fresh-color-canonical",
    "equal-part-transposition",
    "monochromatic-join-two-parts",
    "connected-reduced-classes",
    "feasibility-memo",
];

/// [`search_bad_gallai_with`] under the default configuration.
pub fn search_bad_gallai(n: usize, k: usize, len: usize) -> Result<SearchOutcome, SearchError> {
    search_bad_gallai_with(n, k, len, &SearchConfig::default())
}

/// Searches k-colorings of `K_n` without rainbow triangles for one with no
/// monochromatic `C_len`.
///
/// The enumeration fills blocks (sets of vertices that every outside vertex
/// sees in a single color) one at a time. A block of size `s` is split into
/// `p` contiguous parts of nonincreasing size, and the reduced coloring
/// between parts is chosen with these restrictions:
///
/// - at most two colors, with no restriction on which colors occur again
///   inside the parts;
/// - among colors unused anywhere so far only the smallest may be taken;
/// - a single join color only with `p = 2` (coarsen otherwise);
/// - with two colors, both color classes of the reduced graph are connected
///   (a disconnected class lets the block split into two parts instead);
/// - swapping two adjacent parts of equal size must not give a
///   lexicographically smaller reduced sequence.
///
/// Each rule keeps at least one representative of every bad coloring: the
/// lexicographically least image under permutations of unused colors and of
/// equal parts passes the last two rules, and coarsening preserves badness.
///
/// Feasibility memo: a part of size `s` is pruned when no bad coloring of
/// `K_s` exists with the colors that part may still use. The memo is keyed by
/// `(s, a)` with `a` a color count, not a color set. This is sound because
/// badness is invariant under any permutation of the palette, so whether some
/// `a`-color palette admits a bad `K_s` does not depend on which `a` colors
/// they are. For `len = 3` the part may not use any color in which an outside
/// vertex sees it (that would close a monochromatic triangle), so
/// `a = k - |incident colors|`; parts then interact only through those
/// colors and the memo answer is exact. For longer cycles `a = k`, which is
/// only a necessary condition (restriction of a bad coloring stays bad).
pub fn search_bad_gallai_with(
    n: usize,
    k: usize,
    len: usize,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    check_common(n, len, 2)?;
    if k == 0 || k > MAX_COLORS {
        return Err(SearchError::Colors(k));
    }
    let started = Instant::now();
    let ctl = Control::new(config);
    let shared = GallaiShared::new(n, len, &ctl);
    let (witness, nodes) = run_tasks(&shared.compositions[n], config.workers, &ctl, |comp: &Vec<usize>| {
        let mut state = GallaiState::new(n, k, &shared);
        let found = state.try_partition(0, comp);
        (found.then(|| state.graph()), state.nodes)
    });
    Ok(finish(&ctl, witness, nodes, started, GALLAI_RULES))
}

struct GallaiShared<'c> {
    len: usize,
    ctl: &'c Control,
    /// `compositions[s]`: nonincreasing compositions of `s` into at least two parts.
    compositions: Vec<Vec<Vec<usize>>>,
    /// `pairs[p]`: part pairs `(x, y)`, `x < y`, in colex order.
    pairs: Vec<Vec<(usize, usize)>>,
    memo: Mutex<HashMap<(usize, usize), bool>>,
}

impl<'c> GallaiShared<'c> {
    fn new(n: usize, len: usize, ctl: &'c Control) -> Self {
        let compositions = (0..=n)
            .map(|s| {
                let mut all = Vec::new();
                for p in 2..=s {
                    partitions_into(s, p, s, &mut Vec::new(), &mut all);
                }
                all
            })
            .collect();
        let pairs = (0..=n)
            .map(|p| (1..p).flat_map(|y| (0..y).map(move |x| (x, y))).collect())
            .collect();
        Self {
            len,
            ctl,
            compositions,
            pairs,
            memo: Mutex::new(HashMap::new()),
        }
    }
}

/// Nonincreasing sequences of `parts` positive integers summing to `s`, each at
/// most `cap`, in lexicographically decreasing order.
fn partitions_into(s: usize, parts: usize, cap: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 0 {
        if s == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    // the remaining parts-1 entries need at least 1 each
    let hi = cap.min(s + 1 - parts);
    let lo = s.div_ceil(parts);
    for first in (lo..=hi).rev() {
        prefix.push(first);
        partitions_into(s - first, parts - 1, first, prefix, out);
        prefix.pop();
    }
}

struct GallaiState<'s, 'c> {
    n: usize,
    k: usize,
    /// Row-major `n × n`, 0 = unassigned.
    mat: Vec<Color>,
    /// `adj[c * n + v]`: neighbors of `v` in color `c`.
    adj: Vec<u64>,
    uses: Vec<u32>,
    /// Blocks `(offset, size)` still to be split, size ≥ 2.
    pending: Vec<(usize, usize)>,
    nodes: u64,
    ticks: u32,
    shared: &'s GallaiShared<'c>,
}

impl<'s, 'c> GallaiState<'s, 'c> {
    fn new(n: usize, k: usize, shared: &'s GallaiShared<'c>) -> Self {
        Self {
            n,
            k,
            mat: vec![0; n * n],
            adj: vec![0; (k + 1) * n],
            uses: vec![0; k + 1],
            pending: Vec::new(),
            nodes: 0,
            ticks: 0,
            shared,
        }
    }

    fn graph(&self) -> ColoredCompleteGraph {
        ColoredCompleteGraph::from_fn(self.n, self.k, |i, j| self.mat[i * self.n + j]).expect("complete assignment")
    }

    fn set_edge(&mut self, u: usize, v: usize, c: Color) {
        let n = self.n;
        self.mat[u * n + v] = c;
        self.mat[v * n + u] = c;
        let base = usize::from(c) * n;
        self.adj[base + u] |= 1 << v;
        self.adj[base + v] |= 1 << u;
        self.uses[usize::from(c)] += 1;
    }

    fn clear_edge(&mut self, u: usize, v: usize) {
        let n = self.n;
        let c = std::mem::take(&mut self.mat[u * n + v]);
        self.mat[v * n + u] = 0;
        let base = usize::from(c) * n;
        self.adj[base + u] &= !(1 << v);
        self.adj[base + v] &= !(1 << u);
        self.uses[usize::from(c)] -= 1;
    }

    /// Colors every edge between the two ranges; on a monochromatic `C_len`
    /// undoes the edges set so far and returns false.
    fn set_join(&mut self, xs: (usize, usize), ys: (usize, usize), c: Color) -> bool {
        let base = usize::from(c) * self.n;
        for u in xs.0..xs.1 {
            for v in ys.0..ys.1 {
                self.set_edge(u, v, c);
                if closes_cycle(&self.adj[base..base + self.n], u, v, self.shared.len) {
                    self.clear_join_until(xs, ys, (u, v));
                    return false;
                }
            }
        }
        true
    }

    /// Clears join edges in assignment order up to and including `last`.
    fn clear_join_until(&mut self, xs: (usize, usize), ys: (usize, usize), last: (usize, usize)) {
        for u in xs.0..xs.1 {
            for v in ys.0..ys.1 {
                self.clear_edge(u, v);
                if (u, v) == last {
                    return;
                }
            }
        }
    }

    fn solve(&mut self) -> bool {
        let Some((off, size)) = self.pending.pop() else {
            return verified(&self.graph(), self.shared.len);
        };
        let shared = self.shared;
        for comp in &shared.compositions[size] {
            if self.try_partition(off, comp) {
                return true;
            }
            if shared.ctl.stopped() {
                break;
            }
        }
        self.pending.push((off, size));
        false
    }

    fn try_partition(&mut self, off: usize, comp: &[usize]) -> bool {
        let p = comp.len();
        let mut starts = Vec::with_capacity(p + 1);
        let mut at = off;
        for &s in comp {
            starts.push(at);
            at += s;
        }
        starts.push(at);
        let mut rc = vec![0 as Color; p * p];
        self.assign_reduced(comp, &starts, 0, [0; 2], &mut rc)
    }

    fn assign_reduced(
        &mut self,
        comp: &[usize],
        starts: &[usize],
        idx: usize,
        used: [Color; 2],
        rc: &mut [Color],
    ) -> bool {
        let p = comp.len();
        let shared = self.shared;
        let pairs = &shared.pairs[p];
        if idx == pairs.len() {
            return self.descend(comp, starts, used, rc);
        }
        if self.shared.ctl.halted(&mut self.ticks) {
            return false;
        }
        let (x, y) = pairs[idx];
        let fresh = (1..=self.k).find(|&c| self.uses[c] == 0);
        let candidates: Vec<Color> = if used[1] != 0 {
            used.to_vec()
        } else {
            (1..=self.k)
                .filter(|&c| self.uses[c] > 0 || Some(c) == fresh)
                .map(|c| c as Color)
                .collect()
        };
        for c in candidates {
            self.nodes += 1;
            let xs = (starts[x], starts[x + 1]);
            let ys = (starts[y], starts[y + 1]);
            if !self.set_join(xs, ys, c) {
                continue;
            }
            rc[x * p + y] = c;
            rc[y * p + x] = c;
            let next_used = match used {
                [0, _] => [c, 0],
                [a, 0] if a != c => [a.min(c), a.max(c)],
                same => same,
            };
            if self.assign_reduced(comp, starts, idx + 1, next_used, rc) {
                return true;
            }
            self.clear_join_until(xs, ys, (xs.1 - 1, ys.1 - 1));
        }
        false
    }

    /// Reduced coloring complete: apply the whole-partition rules, then recurse
    /// into the parts.
    fn descend(&mut self, comp: &[usize], starts: &[usize], used: [Color; 2], rc: &[Color]) -> bool {
        let p = comp.len();
        if used[1] == 0 && p > 2 {
            return false;
        }
        if used[1] != 0 && !(class_connected(rc, p, used[0]) && class_connected(rc, p, used[1])) {
            return false;
        }
        let shared = self.shared;
        let pairs = &shared.pairs[p];
        for i in 0..p - 1 {
            if comp[i] == comp[i + 1] && swapped_is_smaller(rc, p, pairs, i) {
                return false;
            }
        }
        for (i, &size) in comp.iter().enumerate() {
            let available = if self.shared.len == 3 {
                self.k - self.incident_colors(starts[i], size)
            } else {
                self.k
            };
            if !self.feasible(size, available) {
                return false;
            }
        }
        let depth = self.pending.len();
        for i in (0..p).rev() {
            if comp[i] >= 2 {
                self.pending.push((starts[i], comp[i]));
            }
        }
        if self.solve() {
            return true;
        }
        self.pending.truncate(depth);
        false
    }

    /// Number of distinct colors joining the block `off..off + size` to the
    /// rest; all those edges are assigned and one vertex sees them all.
    fn incident_colors(&self, off: usize, size: usize) -> usize {
        let row = &self.mat[off * self.n..(off + 1) * self.n];
        let mut seen = [0u64; 4];
        for (w, &c) in row.iter().enumerate() {
            if w < off || w >= off + size {
                seen[usize::from(c) / 64] |= 1 << (c % 64);
            }
        }
        seen.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Whether some bad coloring of `K_size` uses at most `colors` colors.
    fn feasible(&mut self, size: usize, colors: usize) -> bool {
        if size <= 1 {
            return true;
        }
        if colors == 0 {
            return false;
        }
        if size < self.shared.len {
            return true;
        }
        let key = (size, colors);
        if let Some(&known) = self.shared.memo.lock().unwrap().get(&key) {
            return known;
        }
        let mut sub = GallaiState::new(size, colors, self.shared);
        sub.pending.push((0, size));
        let found = sub.solve();
        self.nodes += sub.nodes;
        if self.shared.ctl.stopped() {
            // unknown; keep the branch
            return true;
        }
        self.shared.memo.lock().unwrap().insert(key, found);
        found
    }
}

fn class_connected(rc: &[Color], p: usize, c: Color) -> bool {
    let mut seen: u64 = 1;
    let mut frontier: u64 = 1;
    while frontier != 0 {
        let x = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        for y in 0..p {
            if y != x && rc[x * p + y] == c && seen & (1 << y) == 0 {
                seen |= 1 << y;
                frontier |= 1 << y;
            }
        }
    }
    seen.count_ones() as usize == p
}

/// Compares the reduced sequence with the one obtained by swapping parts
/// `i` and `i + 1`.
fn swapped_is_smaller(rc: &[Color], p: usize, pairs: &[(usize, usize)], i: usize) -> bool {
    let swap = |v: usize| {
        if v == i {
            i + 1
        } else if v == i + 1 {
            i
        } else {
            v
        }
    };
    for &(x, y) in pairs {
        let original = rc[x * p + y];
        let swapped = rc[swap(x) * p + swap(y)];
        if swapped != original {
            return swapped < original;
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    TwoColor,
    Gallai,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub n: usize,
    pub status: SearchStatus,
    pub nodes: u64,
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub mode: SearchMode,
    pub colors: usize,
    pub cycle: usize,
    pub from: usize,
    pub to: usize,
    /// Least exhausted `n` in range, reported only when every smaller `n`
    /// in range produced a witness.
    pub threshold: Option<usize>,
    pub entries: Vec<ScanEntry>,
}

/// Runs the search for `n = lo, lo + 1, ...` and stops at the first
/// exhausted `n`: a bad coloring on more vertices would restrict to one on
/// fewer, so every larger `n` is exhausted as well. The time limit applies
/// to each `n` separately.
pub fn threshold_scan(
    k: usize,
    len: usize,
    lo: usize,
    hi: usize,
    mode: SearchMode,
    config: &SearchConfig,
) -> Result<ThresholdReport, SearchError> {
    if lo > hi {
        return Err(SearchError::EmptyRange { lo, hi });
    }
    if mode == SearchMode::TwoColor && k != 2 {
        return Err(SearchError::TwoColorPalette(k));
    }
    let mut entries = Vec::new();
    let mut threshold = None;
    let mut clean = true;
    for n in lo..=hi {
        let out = match mode {
            SearchMode::TwoColor => search_bad_two_coloring_with(n, len, config)?,
            SearchMode::Gallai => search_bad_gallai_with(n, k, len, config)?,
        };
        entries.push(ScanEntry {
            n,
            status: out.status,
            nodes: out.stats.nodes,
            millis: out.stats.millis,
        });
        match out.status {
            SearchStatus::Witness => {}
            SearchStatus::Timeout => clean = false,
            SearchStatus::Exhausted => {
                if clean {
                    threshold = Some(n);
                }
                break;
            }
        }
    }
    Ok(ThresholdReport {
        mode,
        colors: k,
        cycle: len,
        from: lo,
        to: hi,
        threshold,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_are_nonincreasing_and_complete() {
        let mut out = Vec::new();
        partitions_into(6, 3, 6, &mut Vec::new(), &mut out);
        assert_eq!(out, vec![vec![4, 1, 1], vec![3, 2, 1], vec![2, 2, 2]]);
        let ctl = Control::new(&SearchConfig::default());
        let shared = GallaiShared::new(7, 3, &ctl);
        // partitions of 7 into at least 2 parts: p(7) - 1
        assert_eq!(shared.compositions[7].len(), 14);
        assert_eq!(shared.pairs[3], vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn closes_cycle_finds_exact_length() {
        // path 0-2-3-1 plus edge 0-1 closes a C4 but not a C3 or C5
        let mut adj = [0u64; 5];
        for (a, b) in [(0, 2), (2, 3), (3, 1), (0, 1)] {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        assert!(closes_cycle(&adj, 0, 1, 4));
        assert!(!closes_cycle(&adj, 0, 1, 3));
        assert!(!closes_cycle(&adj, 0, 1, 5));
    }

    #[test]
    fn connectivity_and_transposition_rules() {
        // p = 4, color 1 on the path 0-1-2-3, color 2 elsewhere: both connected
        let p = 4;
        let mut rc = vec![0; 16];
        for x in 0..4 {
            for y in 0..4 {
                if x != y {
                    rc[x * p + y] = if x.abs_diff(y) == 1 { 1 } else { 2 };
                }
            }
        }
        assert!(class_connected(&rc, p, 1));
        assert!(class_connected(&rc, p, 2));
        let pairs = vec![(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)];
        // swapping parts 0 and 1: sequence 1,2,1,2,2,1 → 1,1,2,2,2,1 is smaller
        assert!(swapped_is_smaller(&rc, p, &pairs, 0));
        assert!(!swapped_is_smaller(&rc, p, &pairs, 1));
    }

    #[test]
    fn tiny_two_color_cases() {
        let out = search_bad_two_coloring(5, 3).unwrap();
        assert_eq!(out.status, SearchStatus::Witness);
        let out = search_bad_two_coloring(6, 3).unwrap();
        assert_eq!(out.status, SearchStatus::Exhausted);
        assert!(out.witness.is_none());
    }

    #[test]
    fn tiny_gallai_cases() {
        assert_eq!(search_bad_gallai(5, 2, 3).unwrap().status, SearchStatus::Witness);
        assert_eq!(search_bad_gallai(6, 2, 3).unwrap().status, SearchStatus::Exhausted);
        assert_eq!(search_bad_gallai(2, 1, 3).unwrap().status, SearchStatus::Witness);
        assert_eq!(search_bad_gallai(3, 1, 3).unwrap().status, SearchStatus::Exhausted);
    }

    #[test]
    fn argument_errors() {
        assert_eq!(
            search_bad_two_coloring(2, 3),
            Err(SearchError::TooFewVertices { n: 2, min: 3 })
        );
        assert_eq!(search_bad_two_coloring(65, 3), Err(SearchError::TooManyVertices(65)));
        assert_eq!(search_bad_gallai(5, 0, 3), Err(SearchError::Colors(0)));
        assert_eq!(search_bad_gallai(5, 2, 2), Err(SearchError::CycleTooShort(2)));
        let cfg = SearchConfig::default();
        assert_eq!(
            threshold_scan(2, 4, 7, 4, SearchMode::TwoColor, &cfg),
            Err(SearchError::EmptyRange { lo: 7, hi: 4 })
        );
        assert_eq!(
            threshold_scan(3, 4, 4, 7, SearchMode::TwoColor, &cfg),
            Err(SearchError::TwoColorPalette(3))
        );
    }

    #[test]
    fn zero_time_limit_times_out() {
        let cfg = SearchConfig {
            time_limit: Some(Duration::ZERO),
            workers: 1,
        };
        let out = search_bad_two_coloring_with(9, 5, &cfg).unwrap();
        assert_eq!(out.status, SearchStatus::Timeout);
    }

    #[test]
    fn outcome_json_roundtrip() {
        let out = search_bad_two_coloring(5, 4).unwrap();
        let text = serde_json::to_string(&out).unwrap();
        assert!(text.contains("\"status\":\"witness\""));
        let back: SearchOutcome = serde_json::from_str(&text).unwrap();
        assert_eq!(back, out);
        let none = search_bad_two_coloring(6, 4).unwrap();
        let v = serde_json::to_value(&none).unwrap();
        assert!(v.get("witness").is_none());
        assert_eq!(v["stats"]["symmetry_rules"][0], "first-edge-color-fixed");
    }
}
