//! Bipartite graphs on `n + n` vertices, matchings, edge weights and
//! evaluation of the Edmonds matrix.
//!
//! Left vertex `u_i` and right vertex `v_j` are indexed from 0. Edges are
//! enumerated row-major over the edge matrix; that order fixes the edge
//! numbering `e_0, …, e_{m-1}` used by the isolation witness.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_linear::{ExactInt, IntMatrix};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    n: usize,
    edges: Vec<bool>,
}

impl BipartiteGraph {
    pub fn new(n: usize, edges: Vec<bool>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if edges.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: n * n,
                found: edges.len(),
            });
        }
        Ok(Self { n, edges })
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut edges = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::ShapeMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            edges.extend(row.iter().map(|&b| b != 0));
        }
        Self::new(n, edges)
    }

    /// Graph whose edge matrix is the bit pattern of `bits`, row-major,
    /// least significant bit first.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        Self::new(n, (0..n * n).map(|b| (bits >> b) & 1 == 1).collect())
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, vec![true; n * n])
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, vec![false; n * n])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.edges[i * self.n + j]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|&&e| e).count()
    }

    /// Edges in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(move |(p, _)| (p / n, p % n))
    }

    /// Right-hand neighbours of `u_i`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.edges[i * self.n + j])
    }

    pub fn without_edge(&self, i: usize, j: usize) -> Result<Self> {
        if !self.has_edge(i, j) {
            return Err(Error::NotAnEdge { row: i, col: j });
        }
        let mut g = self.clone();
        g.edges[i * self.n + j] = false;
        Ok(g)
    }

    /// Graph with `u_i` and `v_j` deleted, remaining vertices reindexed in
    /// order. `None` when `n = 1` (nothing is left).
    pub fn without_vertices(&self, i: usize, j: usize) -> Option<Self> {
        if self.n <= 1 || i >= self.n || j >= self.n {
            return None;
        }
        let edges = (0..self.n)
            .filter(|&r| r != i)
            .flat_map(|r| (0..self.n).filter(move |&c| c != j).map(move |c| (r, c)))
            .map(|(r, c)| self.edges[r * self.n + c])
            .collect();
        Some(Self {
            n: self.n - 1,
            edges,
        })
    }

    /// Parses the text format: `n` on the first line, then `n` rows of `n`
    /// space-separated 0/1 entries.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = parse_square::<u8>(text, "0/1 entry")?;
        let n = rows.len();
        let mut edges = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            for &x in row {
                match x {
                    0 => edges.push(false),
                    1 => edges.push(true),
                    _ => {
                        return Err(Error::Parse {
                            line: r + 2,
                            message: format!("expected 0 or 1, found {x}"),
                        })
                    }
                }
            }
        }
        Self::new(n, edges)
    }
}

impl fmt::Display for BipartiteGraph {
    /// Writes the text format accepted by [`BipartiteGraph::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for row in self.edges.chunks(self.n) {
            let cells: Vec<&str> = row.iter().map(|&e| if e { "1" } else { "0" }).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .edges
            .chunks(self.n)
            .map(|r| r.iter().map(|&e| if e { '1' } else { '0' }).collect())
            .collect();
        write!(f, "BipartiteGraph[{}]", rows.join("/"))
    }
}

fn parse_square<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<Vec<T>>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing dimension line".into(),
    })?;
    let n: usize = header.trim().parse().map_err(|_| Error::Parse {
        line: 1,
        message: format!("expected a dimension, found {:?}", header.trim()),
    })?;
    if n == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "dimension must be at least 1".into(),
        });
    }
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let (idx, line) = lines.next().ok_or(Error::Parse {
            line: r + 2,
            message: format!("expected {n} rows, found {r}"),
        })?;
        let cells: Vec<&str> = line.split_whitespace().collect();
        if cells.len() != n {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected {n} entries, found {}", cells.len()),
            });
        }
        let row = cells
            .iter()
            .map(|c| {
                c.parse::<T>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("expected {what}, found {c:?}"),
                })
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    if let Some((idx, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::Parse {
            line: idx + 1,
            message: format!("unexpected content after {n} rows"),
        });
    }
    Ok(rows)
}

/// Partial injective map from left to right vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    n: usize,
    left: Vec<Option<usize>>,
    right: Vec<Option<usize>>,
}

impl Serialize for Matching {
    /// `{"n": n, "pairs": [[i, j], …]}` with pairs ordered by left vertex.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let pairs: Vec<(usize, usize)> = self.pairs().collect();
        let mut st = serializer.serialize_struct("Matching", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("pairs", &pairs)?;
        st.end()
    }
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            left: vec![None; n],
            right: vec![None; n],
        }
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut m = Self::empty(n);
        for &(i, j) in pairs {
            m.insert(i, j)?;
        }
        Ok(m)
    }

    /// Perfect matching `i ↦ perm[i]`.
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        let pairs: Vec<_> = perm.iter().copied().enumerate().collect();
        Self::from_pairs(perm.len(), &pairs)
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::IndexOutOfRange {
                row: i,
                col: j,
                n: self.n,
            });
        }
        if self.left[i].is_some() || self.right[j].is_some() {
            return Err(Error::InvalidMatching(format!(
                "({i}, {j}) conflicts with an existing pair"
            )));
        }
        self.left[i] = Some(j);
        self.right[j] = Some(i);
        Ok(())
    }

    pub fn remove_left(&mut self, i: usize) -> Option<usize> {
        let j = self.left[i].take()?;
        self.right[j] = None;
        Some(j)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mate_of_left(&self, i: usize) -> Option<usize> {
        self.left[i]
    }

    #[inline]
    pub fn mate_of_right(&self, j: usize) -> Option<usize> {
        self.right[j]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.n && self.left[i] == Some(j)
    }

    pub fn len(&self) -> usize {
        self.left.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_total(&self) -> bool {
        self.left.iter().all(Option::is_some)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (i, j)))
    }

    /// The permutation `i ↦ σ(i)` when the matching is total.
    pub fn permutation(&self) -> Option<Vec<usize>> {
        self.left.iter().copied().collect()
    }

    /// Permutation matrix of a total matching.
    pub fn permutation_matrix(&self) -> Option<IntMatrix> {
        IntMatrix::permutation(&self.permutation()?).ok()
    }
}

impl fmt::Debug for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.pairs().map(|(i, j)| format!("{i}→{j}")))
            .finish()
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().map(|(i, j)| format!("u{i}-v{j}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Nonnegative edge weights stored as an `n × n` array; entries at
/// non-edges are carried but ignored.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct WeightAssignment {
    n: usize,
    values: Vec<i64>,
}

impl WeightAssignment {
    pub fn new(n: usize, values: Vec<i64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if values.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        if let Some(p) = values.iter().position(|&v| v < 0) {
            return Err(Error::NegativeWeight {
                row: p / n,
                col: p % n,
                value: values[p],
            });
        }
        Ok(Self { n, values })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::ShapeMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(n, values)
    }

    /// Assignment with the `k`-th edge of `g` (row-major) weighted
    /// `edge_values[k]` and zero elsewhere.
    pub fn from_edge_values(g: &BipartiteGraph, edge_values: &[i64]) -> Result<Self> {
        let m = g.edge_count();
        if edge_values.len() != m {
            return Err(Error::ShapeMismatch {
                expected: m,
                found: edge_values.len(),
            });
        }
        let n = g.n();
        let mut values = vec![0; n * n];
        for ((i, j), &w) in g.edges().zip(edge_values) {
            values[i * n + j] = w;
        }
        Self::new(n, values)
    }

    /// Weights of the edges of `g` in row-major edge order.
    pub fn edge_values(&self, g: &BipartiteGraph) -> Vec<i64> {
        g.edges().map(|(i, j)| self.get(i, j)).collect()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Parses the weight text format: `n`, then `n` rows of `n`
    /// nonnegative decimal integers.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = parse_square::<i64>(text, "an integer")?;
        let n = rows.len();
        Self::new(n, rows.into_iter().flatten().collect()).map_err(|e| match e {
            Error::NegativeWeight { row, col, value } => Error::Parse {
                line: row + 2,
                message: format!("negative weight {value} in column {}", col + 1),
            },
            other => other,
        })
    }
}

impl fmt::Debug for WeightAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.values.chunks(self.n)).finish()
    }
}

impl fmt::Display for WeightAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for row in self.values.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Evaluates the Edmonds matrix of `g` at `wvals` (row-major, `n × n`):
/// `wvals(i, j)` on edges, 0 elsewhere.
pub fn edmonds_eval(g: &BipartiteGraph, wvals: &[ExactInt]) -> Result<IntMatrix> {
    let n = g.n();
    if wvals.len() != n * n {
        return Err(Error::ShapeMismatch {
            expected: n * n,
            found: wvals.len(),
        });
    }
    let entries = (0..n * n)
        .map(|p| {
            if g.has_edge(p / n, p % n) {
                wvals[p].clone()
            } else {
                ExactInt::from(0)
            }
        })
        .collect();
    IntMatrix::new(n, entries)
}

/// True iff `m` is total, injective, and uses only edges of `g`.
pub fn is_perfect_matching(g: &BipartiteGraph, m: &Matching) -> bool {
    if m.n() != g.n() || !m.is_total() {
        return false;
    }
    let mut used = vec![false; g.n()];
    for (i, j) in m.pairs() {
        if !g.has_edge(i, j) || used[j] {
            return false;
        }
        used[j] = true;
    }
    true
}

/// True iff every pair of `m` is an edge of `g`.
pub fn is_matching_of(g: &BipartiteGraph, m: &Matching) -> bool {
    m.n() == g.n() && m.pairs().all(|(i, j)| g.has_edge(i, j))
}

/// Sum of `w` over the pairs of `m`.
pub fn matching_weight(m: &Matching, w: &WeightAssignment) -> i64 {
    m.pairs().map(|(i, j)| w.get(i, j)).sum()
}

/// Independent uniform weights in `[1, k]` on every edge of `g`, zero on
/// non-edges.
///
/// The generator is ChaCha8 seeded through `seed_from_u64(seed)`; edges are
/// drawn in row-major order. The same `(g, k, seed)` gives the same
/// assignment on every platform.
pub fn random_weights(g: &BipartiteGraph, k: u64, seed: u64) -> Result<WeightAssignment> {
    if k == 0 {
        return Err(Error::EmptyRange);
    }
    let k = i64::try_from(k).map_err(|_| Error::EmptyRange)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<i64> = g.edges().map(|_| rng.gen_range(1..=k)).collect();
    WeightAssignment::from_edge_values(g, &values)
}
