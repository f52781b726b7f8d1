//! Edge-colored complete graphs and the `gcol` text format.
//!
//! Vertices are `0..n`, colors are `1..=k`. The value `0` is never stored in a
//! finished graph; it only marks unassigned pairs in search states.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

/// A color index in `1..=k`.
pub type Color = u8;

/// Largest palette the `u8` color store can represent.
pub const MAX_COLORS: usize = 255;

/// Vertex-count bound applied by [`ColoredCompleteGraph::from_gcol`].
pub const DEFAULT_MAX_VERTICES: usize = 1024;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("vertex count must be at least 1")]
    NoVertices,
    #[error("palette size {0} out of range 1..={MAX_COLORS}")]
    BadPalette(usize),
    #[error("vertex count {n} exceeds the configured maximum {max}")]
    TooManyVertices { n: usize, max: usize },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("pair ({0}, {0}) is a self-pair and carries no color")]
    SelfPair(usize),
    #[error("color {color} out of range 1..={k}")]
    ColorOutOfRange { color: usize, k: usize },
    #[error("vertex subset is empty")]
    EmptySubset,
    #[error("vertex {0} listed twice in subset")]
    DuplicateVertex(usize),
}

/// Parse failure for the `gcol` format, always tied to a 1-based line number.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct GcolError {
    pub line: usize,
    pub kind: GcolErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GcolErrorKind {
    #[error("expected header `gcol 1`, found `{0}`")]
    BadMagic(String),
    #[error("malformed size line `{0}`, expected `<n> <k>`")]
    BadSize(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("row for vertex {vertex} has {found} entries, expected {expected}")]
    RowLength {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is not a color index")]
    BadToken(String),
    #[error("color {color} out of range 1..={k}")]
    ColorOutOfRange { color: u64, k: usize },
    #[error("unexpected trailing content")]
    TrailingContent,
    #[error("file ended early; {missing} row(s) missing")]
    MissingRows { missing: usize },
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {error}")]
    Io { path: String, error: std::io::Error },
    #[error("{path}: {error}")]
    Parse { path: String, error: GcolError },
}

/// Index of pair `(i, j)` with `i < j` in the packed upper triangle.
#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

/// A complete graph on `n` vertices with every edge colored from `1..=k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ColoredCompleteGraph {
    n: usize,
    k: usize,
    colors: Vec<Color>,
}

impl std::fmt::Debug for ColoredCompleteGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ColoredCompleteGraph")
            .field("n", &self.n)
            .field("k", &self.k)
            .finish_non_exhaustive()
    }
}

fn check_dims(n: usize, k: usize) -> Result<(), ModelError> {
    if n == 0 {
        return Err(ModelError::NoVertices);
    }
    if k == 0 || k > MAX_COLORS {
        return Err(ModelError::BadPalette(k));
    }
    Ok(())
}

impl ColoredCompleteGraph {
    /// Every edge of `K_n` in `color`.
    pub fn monochromatic(n: usize, k: usize, color: Color) -> Result<Self, ModelError> {
        Self::from_fn(n, k, |_, _| color)
    }

    /// Builds a coloring from `f(i, j)`, called once per pair with `i < j`.
    pub fn from_fn<F>(n: usize, k: usize, mut f: F) -> Result<Self, ModelError>
    where
        F: FnMut(usize, usize) -> Color,
    {
        check_dims(n, k)?;
        let mut colors = vec![0; n * (n - 1) / 2];
        for j in 1..n {
            for i in 0..j {
                let c = f(i, j);
                if c == 0 || usize::from(c) > k {
                    return Err(ModelError::ColorOutOfRange { color: c as usize, k });
                }
                colors[pair_index(i, j)] = c;
            }
        }
        Ok(Self { n, k, colors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Declared palette size; colors actually used may be fewer.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Color of the pair `{u, v}`. Panics on a self-pair or out-of-range vertex.
    #[inline]
    pub fn color(&self, u: usize, v: usize) -> Color {
        assert!(u != v, "self-pair ({u}, {u}) has no color");
        assert!(u < self.n && v < self.n, "vertex out of range");
        let (i, j) = if u < v { (u, v) } else { (v, u) };
        self.colors[pair_index(i, j)]
    }

    /// Checked variant of [`color`](Self::color).
    pub fn try_color(&self, u: usize, v: usize) -> Result<Color, ModelError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(ModelError::SelfPair(u));
        }
        Ok(self.color(u, v))
    }

    pub fn set_color(&mut self, u: usize, v: usize, color: Color) -> Result<(), ModelError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(ModelError::SelfPair(u));
        }
        if color == 0 || usize::from(color) > self.k {
            return Err(ModelError::ColorOutOfRange {
                color: color as usize,
                k: self.k,
            });
        }
        let (i, j) = if u < v { (u, v) } else { (v, u) };
        self.colors[pair_index(i, j)] = color;
        Ok(())
    }

    /// Returns a copy with the palette widened to `k`. Shrinking below a used
    /// color is an error.
    pub fn with_palette(&self, k: usize) -> Result<Self, ModelError> {
        check_dims(self.n, k)?;
        if let Some(&c) = self.colors.iter().max() {
            if usize::from(c) > k {
                return Err(ModelError::ColorOutOfRange { color: c as usize, k });
            }
        }
        Ok(Self {
            n: self.n,
            k,
            colors: self.colors.clone(),
        })
    }

    fn check_vertex(&self, v: usize) -> Result<(), ModelError> {
        if v >= self.n {
            Err(ModelError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Colors appearing on at least one edge.
    pub fn colors_used(&self) -> BTreeSet<Color> {
        let mut seen = [false; MAX_COLORS + 1];
        for &c in &self.colors {
            seen[usize::from(c)] = true;
        }
        (1..=self.k).filter(|&c| seen[c]).map(|c| c as Color).collect()
    }

    /// Iterates `(i, j, color)` over all pairs with `i < j`, row by row.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Color)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j, self.color(i, j))))
    }

    /// The subcoloring on `subset`, relabeled to `0..|subset|` in increasing
    /// vertex order. The palette is unchanged.
    pub fn induced_subgraph(&self, subset: &[usize]) -> Result<Self, ModelError> {
        if subset.is_empty() {
            return Err(ModelError::EmptySubset);
        }
        let mut verts = subset.to_vec();
        verts.sort_unstable();
        for w in verts.windows(2) {
            if w[0] == w[1] {
                return Err(ModelError::DuplicateVertex(w[0]));
            }
        }
        self.check_vertex(*verts.last().unwrap())?;
        Self::from_fn(verts.len(), self.k, |i, j| self.color(verts[i], verts[j]))
    }

    /// Relabels vertices: vertex `t` of the result is vertex `order[t]` of
    /// `self`. `order` must be a permutation of `0..n`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self, ModelError> {
        let mut seen = vec![false; self.n];
        for &v in order {
            self.check_vertex(v)?;
            if std::mem::replace(&mut seen[v], true) {
                return Err(ModelError::DuplicateVertex(v));
            }
        }
        if order.len() != self.n {
            let missing = seen.iter().position(|&s| !s).unwrap_or(0);
            return Err(ModelError::VertexOutOfRange {
                vertex: missing,
                n: order.len(),
            });
        }
        Self::from_fn(self.n, self.k, |i, j| self.color(order[i], order[j]))
    }

    /// The subcoloring with vertex `v` removed.
    pub fn without_vertex(&self, v: usize) -> Result<Self, ModelError> {
        self.check_vertex(v)?;
        let keep: Vec<usize> = (0..self.n).filter(|&u| u != v).collect();
        self.induced_subgraph(&keep)
    }

    pub fn color_class(&self, color: Color) -> ColorClassView<'_> {
        ColorClassView { base: self, color }
    }

    /// Serializes to the `gcol` text format.
    pub fn to_gcol(&self) -> String {
        let mut out = String::with_capacity(self.colors.len() * 2 + 16);
        out.push_str("gcol 1\n");
        let _ = writeln!(out, "{} {}", self.n, self.k);
        for v in 0..self.n.saturating_sub(1) {
            let mut first = true;
            for w in (v + 1)..self.n {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{}", self.color(v, w));
            }
            out.push('\n');
        }
        out
    }

    /// Parses `gcol` text with the default vertex bound.
    pub fn from_gcol(text: &str) -> Result<Self, GcolError> {
        Self::from_gcol_with_limit(text, DEFAULT_MAX_VERTICES)
    }

    pub fn from_gcol_with_limit(text: &str, max_vertices: usize) -> Result<Self, GcolError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end()))
            .filter(|(_, l)| !l.starts_with('#'));

        let err = |line, kind| GcolError { line, kind };

        let (line_no, header) = lines.next().unwrap_or((1, ""));
        if header.split_whitespace().collect::<Vec<_>>() != ["gcol", "1"] {
            return Err(err(line_no, GcolErrorKind::BadMagic(header.to_string())));
        }

        let (line_no, size) = lines
            .next()
            .ok_or_else(|| err(line_no + 1, GcolErrorKind::BadSize(String::new())))?;
        let dims: Vec<usize> = size
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| err(line_no, GcolErrorKind::BadSize(size.to_string())))?;
        let [n, k] = dims[..] else {
            return Err(err(line_no, GcolErrorKind::BadSize(size.to_string())));
        };
        check_dims(n, k).map_err(|e| err(line_no, e.into()))?;
        if n > max_vertices {
            return Err(err(
                line_no,
                ModelError::TooManyVertices { n, max: max_vertices }.into(),
            ));
        }

        let mut colors = vec![0; n * (n - 1) / 2];
        let mut last_line = line_no;
        for v in 0..n - 1 {
            let Some((line_no, row)) = lines.next() else {
                return Err(err(last_line + 1, GcolErrorKind::MissingRows { missing: n - 1 - v }));
            };
            last_line = line_no;
            let tokens: Vec<&str> = row.split_whitespace().collect();
            let expected = n - 1 - v;
            if tokens.len() != expected {
                return Err(err(
                    line_no,
                    GcolErrorKind::RowLength {
                        vertex: v,
                        expected,
                        found: tokens.len(),
                    },
                ));
            }
            for (offset, tok) in tokens.into_iter().enumerate() {
                let c: u64 = tok
                    .parse()
                    .map_err(|_| err(line_no, GcolErrorKind::BadToken(tok.to_string())))?;
                if c == 0 || c > k as u64 {
                    return Err(err(line_no, GcolErrorKind::ColorOutOfRange { color: c, k }));
                }
                colors[pair_index(v, v + 1 + offset)] = c as Color;
            }
        }
        for (line_no, rest) in lines {
            if !rest.trim().is_empty() {
                return Err(err(line_no, GcolErrorKind::TrailingContent));
            }
        }
        Ok(Self { n, k, colors })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|error| IoError::Io {
            path: path.display().to_string(),
            error,
        })?;
        Self::from_gcol(&text).map_err(|error| IoError::Parse {
            path: path.display().to_string(),
            error,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IoError> {
        let path = path.as_ref();
        fs::write(path, self.to_gcol()).map_err(|error| IoError::Io {
            path: path.display().to_string(),
            error,
        })
    }
}

/// One color class `E_c` viewed as a spanning subgraph on all `n` vertices.
#[derive(Clone, Copy, Debug)]
pub struct ColorClassView<'g> {
    base: &'g ColoredCompleteGraph,
    color: Color,
}

impl<'g> ColorClassView<'g> {
    pub fn color(&self) -> Color {
        self.color
    }

    pub fn vertex_count(&self) -> usize {
        self.base.n()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.base.color(u, v) == self.color
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + 'g {
        let base = self.base;
        let color = self.color;
        (0..base.n()).filter(move |&u| u != v && base.color(u, v) == color)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + 'g {
        let color = self.color;
        self.base
            .edges()
            .filter(move |&(_, _, c)| c == color)
            .map(|(i, j, _)| (i, j))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }
}
