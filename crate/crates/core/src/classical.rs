//! Deterministic matching machinery: alternating-path search, maximum
//! matching by repeated augmentation, Hall violators, the Hungarian method
//! for maximum-weight matching and minimum-weight perfect matching on top
//! of it.

use serde::Serialize;

use crate::bipartite::{is_matching_of, is_perfect_matching, BipartiteGraph, Matching, WeightAssignment};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Vertex {
    Left(usize),
    Right(usize),
}

/// A path `v_0, …, v_k` through the bipartite graph together with, for each
/// of its `k` edges, whether that edge lies in the matching it was built
/// against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlternatingPath {
    pub vertices: Vec<Vertex>,
    pub in_matching: Vec<bool>,
}

impl AlternatingPath {
    fn edge(a: Vertex, b: Vertex) -> Option<(usize, usize)> {
        match (a, b) {
            (Vertex::Left(i), Vertex::Right(j)) | (Vertex::Right(j), Vertex::Left(i)) => Some((i, j)),
            _ => None,
        }
    }

    /// Consecutive vertices adjacent in `g`, flags consistent with `m`, and
    /// edges alternating between `m` and the rest of `g`.
    pub fn is_alternating(&self, g: &BipartiteGraph, m: &Matching) -> bool {
        if self.vertices.len() != self.in_matching.len() + 1 {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        if !self.vertices.iter().all(|v| seen.insert(*v)) {
            return false;
        }
        for (k, pair) in self.vertices.windows(2).enumerate() {
            let Some((i, j)) = Self::edge(pair[0], pair[1]) else {
                return false;
            };
            if !g.has_edge(i, j) || m.contains(i, j) != self.in_matching[k] {
                return false;
            }
            if k > 0 && self.in_matching[k] == self.in_matching[k - 1] {
                return false;
            }
        }
        true
    }

    /// Alternating, both endpoints unsaturated, first and last edges outside
    /// the matching.
    pub fn is_augmenting(&self, g: &BipartiteGraph, m: &Matching) -> bool {
        let unsaturated = |v: &Vertex| match *v {
            Vertex::Left(i) => m.mate_of_left(i).is_none(),
            Vertex::Right(j) => m.mate_of_right(j).is_none(),
        };
        self.vertices.len() >= 2
            && self.is_alternating(g, m)
            && !self.in_matching[0]
            && !self.in_matching[self.in_matching.len() - 1]
            && unsaturated(&self.vertices[0])
            && unsaturated(&self.vertices[self.vertices.len() - 1])
    }
}

/// Breadth-first layers of the directed graph whose arcs are `x → y` for
/// non-matching edges and `y → x` for matching edges, started at a left
/// vertex.
#[derive(Debug, Clone)]
pub struct AlternatingSearch {
    pub start: usize,
    /// `layers[d]` holds the vertices first reached at distance `d`. Even
    /// layers are left vertices, odd layers right vertices.
    pub layers: Vec<Vec<Vertex>>,
    parent_of_left: Vec<Option<usize>>,
    parent_of_right: Vec<Option<usize>>,
    reached_left: Vec<bool>,
    reached_right: Vec<bool>,
}

impl AlternatingSearch {
    pub fn run(g: &BipartiteGraph, m: &Matching, start: usize) -> Self {
        let n = g.n();
        let mut search = Self {
            start,
            layers: vec![vec![Vertex::Left(start)]],
            parent_of_left: vec![None; n],
            parent_of_right: vec![None; n],
            reached_left: vec![false; n],
            reached_right: vec![false; n],
        };
        search.reached_left[start] = true;
        loop {
            let frontier = search.layers.last().expect("nonempty");
            let mut next = Vec::new();
            for &v in frontier {
                match v {
                    Vertex::Left(x) => {
                        for y in g.neighbors(x) {
                            if !m.contains(x, y) && !search.reached_right[y] {
                                search.reached_right[y] = true;
                                search.parent_of_right[y] = Some(x);
                                next.push(Vertex::Right(y));
                            }
                        }
                    }
                    Vertex::Right(y) => {
                        if let Some(x) = m.mate_of_right(y) {
                            if !search.reached_left[x] {
                                search.reached_left[x] = true;
                                search.parent_of_left[x] = Some(y);
                                next.push(Vertex::Left(x));
                            }
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_by_key(|v| match *v {
                Vertex::Left(i) | Vertex::Right(i) => i,
            });
            search.layers.push(next);
        }
        search
    }

    /// Left vertices reachable from the start, the start included.
    pub fn reached_left(&self) -> Vec<usize> {
        (0..self.reached_left.len()).filter(|&i| self.reached_left[i]).collect()
    }

    pub fn reached_right(&self) -> Vec<usize> {
        (0..self.reached_right.len()).filter(|&j| self.reached_right[j]).collect()
    }

    /// Path back to the start from the first unsaturated right vertex, by
    /// layer then index.
    pub fn augmenting_path(&self, m: &Matching) -> Option<AlternatingPath> {
        let target = self
            .layers
            .iter()
            .skip(1)
            .step_by(2)
            .flatten()
            .find_map(|v| match *v {
                Vertex::Right(y) if m.mate_of_right(y).is_none() => Some(y),
                _ => None,
            })?;
        let mut rev = vec![Vertex::Right(target)];
        let mut y = target;
        loop {
            let x = self.parent_of_right[y].expect("reached right vertex has a parent");
            rev.push(Vertex::Left(x));
            match self.parent_of_left[x] {
                Some(prev) => {
                    rev.push(Vertex::Right(prev));
                    y = prev;
                }
                None => break,
            }
        }
        rev.reverse();
        let in_matching = (0..rev.len() - 1).map(|k| k % 2 == 1).collect();
        Some(AlternatingPath {
            vertices: rev,
            in_matching,
        })
    }
}

/// An augmenting path from the unsaturated left vertex `start`, if any.
pub fn find_augmenting_path_from(g: &BipartiteGraph, m: &Matching, start: usize) -> Option<AlternatingPath> {
    if start >= g.n() || m.mate_of_left(start).is_some() {
        return None;
    }
    let path = AlternatingSearch::run(g, m, start).augmenting_path(m)?;
    assert!(path.is_augmenting(g, m), "search produced a non-augmenting path");
    Some(path)
}

/// An augmenting path for `m`, searching from unsaturated left vertices in
/// increasing index order.
pub fn find_augmenting_path(g: &BipartiteGraph, m: &Matching) -> Option<AlternatingPath> {
    (0..g.n())
        .filter(|&i| m.mate_of_left(i).is_none())
        .find_map(|s| find_augmenting_path_from(g, m, s))
}

/// Replaces `m` by the symmetric difference of `m` and the path's edges.
pub fn augment(m: &mut Matching, path: &AlternatingPath) -> Result<()> {
    let mut new_pairs = Vec::new();
    for (k, pair) in path.vertices.windows(2).enumerate() {
        if !path.in_matching[k] {
            let (i, j) = AlternatingPath::edge(pair[0], pair[1])
                .ok_or_else(|| Error::InvalidMatching("path joins two vertices on one side".into()))?;
            new_pairs.push((i, j));
        }
    }
    for &(i, _) in &new_pairs {
        m.remove_left(i);
    }
    for &(i, j) in &new_pairs {
        if let Some(old) = m.mate_of_right(j) {
            m.remove_left(old);
        }
        m.insert(i, j)?;
    }
    Ok(())
}

/// Maximum-cardinality matching, grown from `start` by augmenting paths.
pub fn maximum_matching_from(g: &BipartiteGraph, start: Matching) -> Result<Matching> {
    if !is_matching_of(g, &start) {
        return Err(Error::InvalidMatching("starting matching uses a non-edge".into()));
    }
    let mut m = start;
    while let Some(path) = find_augmenting_path(g, &m) {
        augment(&mut m, &path)?;
    }
    Ok(m)
}

/// Maximum-cardinality matching of `g`.
pub fn maximum_matching(g: &BipartiteGraph) -> Matching {
    maximum_matching_from(g, Matching::empty(g.n())).expect("empty matching is valid")
}

/// Right vertices adjacent to some left vertex in `set`, sorted.
pub fn neighborhood(g: &BipartiteGraph, set: &[usize]) -> Vec<usize> {
    let mut hit = vec![false; g.n()];
    for &i in set {
        for j in g.neighbors(i) {
            hit[j] = true;
        }
    }
    (0..g.n()).filter(|&j| hit[j]).collect()
}

/// A left vertex set `S` with `|S| > |N(S)|`, built from an alternating
/// search rooted at the least unsaturated left vertex of a maximum matching.
pub fn hall_violator(g: &BipartiteGraph) -> Result<Vec<usize>> {
    let m = maximum_matching(g);
    hall_violator_with(g, &m)
}

/// Same as [`hall_violator`] with a known maximum matching `m`.
pub(crate) fn hall_violator_with(g: &BipartiteGraph, m: &Matching) -> Result<Vec<usize>> {
    let s = (0..g.n())
        .find(|&i| m.mate_of_left(i).is_none())
        .ok_or(Error::HasPerfectMatching)?;
    let set = AlternatingSearch::run(g, m, s).reached_left();
    debug_assert!(set.len() > neighborhood(g, &set).len());
    Ok(set)
}

/// Dual variables `(u, v)` for weighted bipartite matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightCover {
    pub u: Vec<i64>,
    pub v: Vec<i64>,
}

impl WeightCover {
    pub fn zeros(n: usize) -> Self {
        Self {
            u: vec![0; n],
            v: vec![0; n],
        }
    }

    /// `Σ (u_i + v_i)`.
    pub fn cost(&self) -> i64 {
        self.u.iter().sum::<i64>() + self.v.iter().sum::<i64>()
    }

    /// `w(i, j) ≤ u_i + v_j` for every `i, j` of the row-major `n × n` array.
    pub fn is_cover(&self, w: &[i64]) -> bool {
        let n = self.u.len();
        self.v.len() == n
            && w.len() == n * n
            && (0..n).all(|i| (0..n).all(|j| w[i * n + j] <= self.u[i] + self.v[j]))
    }
}

/// Result of the Hungarian method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hungarian {
    /// Perfect matching of the final equality subgraph.
    pub matching: Matching,
    pub cover: WeightCover,
    /// Number of cover updates performed.
    pub rounds: usize,
    /// Cost of the initial cover.
    pub initial_cost: i64,
}

impl Hungarian {
    pub fn weight(&self, w: &[i64]) -> i64 {
        let n = self.matching.n();
        self.matching.pairs().map(|(i, j)| w[i * n + j]).sum()
    }
}

fn equality_subgraph(n: usize, w: &[i64], cover: &WeightCover) -> BipartiteGraph {
    let edges = (0..n * n)
        .map(|p| w[p] == cover.u[p / n] + cover.v[p % n])
        .collect();
    BipartiteGraph::new(n, edges).expect("n ≥ 1")
}

/// Maximum-weight matching on the complete graph `K_{n,n}` with nonnegative
/// row-major weights `w`, together with a minimum-cost cover certifying it.
///
/// Starts from `u_i = max_j w(i, j)`, `v = 0`. While the equality subgraph
/// has no perfect matching, a Hall violator `S` of it gives
/// `δ = min { u_i + v_j − w(i, j) : i ∈ S, j ∉ N(S) }`; `u` drops by `δ` on
/// `S` and `v` rises by `δ` on `N(S)`.
pub fn hungarian_max_weight(n: usize, w: &[i64]) -> Result<Hungarian> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if w.len() != n * n {
        return Err(Error::ShapeMismatch {
            expected: n * n,
            found: w.len(),
        });
    }
    if let Some(p) = w.iter().position(|&x| x < 0) {
        return Err(Error::NegativeWeight {
            row: p / n,
            col: p % n,
            value: w[p],
        });
    }

    let mut cover = WeightCover {
        u: w.chunks(n).map(|row| *row.iter().max().expect("n ≥ 1")).collect(),
        v: vec![0; n],
    };
    let initial_cost = cover.cost();
    let mut matching = Matching::empty(n);
    let mut rounds = 0;

    loop {
        let h = equality_subgraph(n, w, &cover);
        let carried: Vec<(usize, usize)> = matching.pairs().filter(|&(i, j)| h.has_edge(i, j)).collect();
        matching = maximum_matching_from(&h, Matching::from_pairs(n, &carried)?)?;
        if matching.is_total() {
            debug_assert!(is_perfect_matching(&h, &matching));
            return Ok(Hungarian {
                matching,
                cover,
                rounds,
                initial_cost,
            });
        }

        let s = hall_violator_with(&h, &matching)?;
        let ns = neighborhood(&h, &s);
        let mut in_ns = vec![false; n];
        for &j in &ns {
            in_ns[j] = true;
        }
        let delta = s
            .iter()
            .flat_map(|&i| (0..n).filter(|&j| !in_ns[j]).map(move |j| (i, j)))
            .map(|(i, j)| cover.u[i] + cover.v[j] - w[i * n + j])
            .min()
            .expect("|N(S)| < |S| ≤ n leaves a column outside N(S)");
        debug_assert!(delta > 0);

        let before = cover.cost();
        for &i in &s {
            cover.u[i] -= delta;
        }
        for &j in &ns {
            cover.v[j] += delta;
        }
        debug_assert_eq!(before - cover.cost(), delta * (s.len() - ns.len()) as i64);
        rounds += 1;
    }
}

/// Minimum-weight perfect matching of `g` under `w`, or `None` when `g` has
/// no perfect matching.
///
/// Runs [`hungarian_max_weight`] on `K_{n,n}` with `w'(i, j) = c − w(i, j)`
/// on edges and 0 elsewhere, where `c = n · max_E w + 1`. Any perfect
/// matching of `g` then outweighs every matching that uses a non-edge.
pub fn mwpm(g: &BipartiteGraph, w: &WeightAssignment) -> Result<Option<Matching>> {
    let n = g.n();
    if w.n() != n {
        return Err(Error::ShapeMismatch {
            expected: n * n,
            found: w.n() * w.n(),
        });
    }
    let max_w = g.edges().map(|(i, j)| w.get(i, j)).max().unwrap_or(0);
    let c = (n as i64)
        .checked_mul(max_w)
        .and_then(|x| x.checked_add(1))
        .ok_or(Error::Overflow("mwpm offset"))?;
    let transformed: Vec<i64> = (0..n * n)
        .map(|p| {
            let (i, j) = (p / n, p % n);
            if g.has_edge(i, j) {
                c - w.get(i, j)
            } else {
                0
            }
        })
        .collect();
    let result = hungarian_max_weight(n, &transformed)?;
    if result.matching.pairs().any(|(i, j)| !g.has_edge(i, j)) {
        return Ok(None);
    }
    if !is_perfect_matching(g, &result.matching) {
        return Err(Error::InvalidMatching("hungarian output is not a perfect matching".into()));
    }
    Ok(Some(result.matching))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::matching_weight;
    use crate::oracle;

    fn graph(rows: &[&[u8]]) -> BipartiteGraph {
        BipartiteGraph::from_rows(rows).unwrap()
    }

    #[test]
    fn augmenting_path_examples() {
        let k11 = BipartiteGraph::complete(1).unwrap();
        let p = find_augmenting_path(&k11, &Matching::empty(1)).unwrap();
        assert_eq!(p.vertices, vec![Vertex::Left(0), Vertex::Right(0)]);
        assert_eq!(p.in_matching, vec![false]);

        let k22 = BipartiteGraph::complete(2).unwrap();
        let pm = Matching::from_permutation(&[0, 1]).unwrap();
        assert!(find_augmenting_path(&k22, &pm).is_none());

        // u0 - v0, u1 - v0, M = {0→0}: from u1 the only move reaches v0,
        // which is saturated, and u0 has no other neighbour.
        let g = graph(&[&[1, 0], &[1, 0]]);
        let m = Matching::from_pairs(2, &[(0, 0)]).unwrap();
        assert!(find_augmenting_path_from(&g, &m, 1).is_none());
        assert!(find_augmenting_path(&g, &m).is_none());
    }

    #[test]
    fn augmenting_through_matched_edge() {
        // u0 - v0, u0 - v1, u1 - v0 with M = {0→0}: path u1 v0 u0 v1.
        let g = graph(&[&[1, 1], &[1, 0]]);
        let mut m = Matching::from_pairs(2, &[(0, 0)]).unwrap();
        let p = find_augmenting_path(&g, &m).unwrap();
        assert_eq!(
            p.vertices,
            vec![Vertex::Left(1), Vertex::Right(0), Vertex::Left(0), Vertex::Right(1)]
        );
        assert_eq!(p.in_matching, vec![false, true, false]);
        augment(&mut m, &p).unwrap();
        assert!(is_perfect_matching(&g, &m));
        assert_eq!(m.permutation().unwrap(), vec![1, 0]);
    }

    #[test]
    fn maximum_matching_examples() {
        assert!(maximum_matching(&BipartiteGraph::empty(3).unwrap()).is_empty());
        for n in 1..=6 {
            let g = BipartiteGraph::complete(n).unwrap();
            let m = maximum_matching(&g);
            assert!(is_perfect_matching(&g, &m));
        }
    }

    #[test]
    fn maximum_matching_matches_brute_force_on_all_3x3() {
        for bits in 0..512u64 {
            let g = BipartiteGraph::from_bits(3, bits).unwrap();
            let m = maximum_matching(&g);
            assert!(is_matching_of(&g, &m));
            assert_eq!(m.len(), oracle::brute_max_matching_size(&g).unwrap(), "{g:?}");
            assert!(find_augmenting_path(&g, &m).is_none());
        }
    }

    #[test]
    fn hall_violator_examples() {
        let g = graph(&[&[0, 0], &[1, 1]]);
        let s = hall_violator(&g).unwrap();
        assert_eq!(s, vec![0]);
        assert!(neighborhood(&g, &s).is_empty());

        let g = graph(&[&[1, 0], &[1, 0]]);
        let s = hall_violator(&g).unwrap();
        assert_eq!(s, vec![0, 1]);
        assert_eq!(neighborhood(&g, &s), vec![0]);

        assert_eq!(
            hall_violator(&BipartiteGraph::complete(2).unwrap()),
            Err(Error::HasPerfectMatching)
        );
    }

    #[test]
    fn hall_violator_on_every_pm_free_small_graph() {
        for n in 1..=3usize {
            for bits in 0..(1u64 << (n * n)) {
                let g = BipartiteGraph::from_bits(n, bits).unwrap();
                match hall_violator(&g) {
                    Ok(s) => assert!(s.len() > neighborhood(&g, &s).len(), "{g:?}"),
                    Err(Error::HasPerfectMatching) => {
                        assert!(!oracle::enumerate_perfect_matchings(&g).unwrap().is_empty())
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn hungarian_examples() {
        let r = hungarian_max_weight(1, &[5]).unwrap();
        assert_eq!(r.matching.permutation().unwrap(), vec![0]);
        assert_eq!(r.cover.cost(), 5);

        let w = [1, 2, 3, 1];
        let r = hungarian_max_weight(2, &w).unwrap();
        assert_eq!(r.matching.permutation().unwrap(), vec![1, 0]);
        assert_eq!(r.weight(&w), 5);
        assert_eq!(r.cover.cost(), 5);
        assert!(r.cover.is_cover(&w));

        assert!(matches!(
            hungarian_max_weight(2, &[1, -1, 0, 0]),
            Err(Error::NegativeWeight { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn cover_basics() {
        let c = WeightCover::zeros(2);
        assert_eq!(c.cost(), 0);
        assert!(c.is_cover(&[0, 0, 0, 0]));
        assert!(!c.is_cover(&[0, 1, 0, 0]));
    }

    #[test]
    fn mwpm_examples() {
        let diag = graph(&[&[1, 0], &[0, 1]]);
        let w = WeightAssignment::from_rows(&[[9i64, 0], [0, 4]]).unwrap();
        assert_eq!(mwpm(&diag, &w).unwrap().unwrap().permutation().unwrap(), vec![0, 1]);

        let no_pm = graph(&[&[1, 1], &[0, 0]]);
        assert_eq!(mwpm(&no_pm, &w).unwrap(), None);

        let k33 = BipartiteGraph::complete(3).unwrap();
        let w = WeightAssignment::from_rows(&[[1i64, 2, 3], [4, 5, 6], [7, 8, 9]]).unwrap();
        let m = mwpm(&k33, &w).unwrap().unwrap();
        assert!(is_perfect_matching(&k33, &m));
        assert_eq!(matching_weight(&m, &w), 15);

        let empty = BipartiteGraph::empty(2).unwrap();
        assert_eq!(mwpm(&empty, &w_zero(2)).unwrap(), None);
    }

    fn w_zero(n: usize) -> WeightAssignment {
        WeightAssignment::new(n, vec![0; n * n]).unwrap()
    }
}
