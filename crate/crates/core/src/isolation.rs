//! Non-isolating weight assignments for perfect matchings.
//!
//! `w ∈ [k]^m` is bad for `g` when two distinct perfect matchings share the
//! minimum weight. [`witness_phi`] maps `[m] × [k]^{m-1}` onto the bad set:
//! given an edge `e` and the other weights, the weight of `e` that makes the
//! best matching through `e` tie with the best matching avoiding `e` is
//! `w(M') - w(M₁)`, where `M'` is optimal on `g ∖ e` and `M₁` is optimal on
//! `g` with both endpoints of `e` removed. Hence `|Φ| ≤ m · k^{m-1}`.
//!
//! Edges are addressed by their position in row-major order, counting from 0.

use rayon::prelude::*;
use serde::Serialize;

use crate::bipartite::{matching_weight, BipartiteGraph, Matching, WeightAssignment};
use crate::classical::mwpm;
use crate::error::{Error, Result};
use crate::oracle::{domain_size, ensure_budget, Lexicographic};

fn check_range(g: &BipartiteGraph, w: &WeightAssignment, k: u64) -> Result<()> {
    if w.n() != g.n() {
        return Err(Error::ShapeMismatch {
            expected: g.n() * g.n(),
            found: w.n() * w.n(),
        });
    }
    for (i, j) in g.edges() {
        let v = w.get(i, j);
        if v < 1 || v as u64 > k {
            return Err(Error::WeightOutOfRange { row: i, col: j, value: v, k });
        }
    }
    Ok(())
}

/// An edge of the minimum-weight perfect matching whose removal leaves the
/// minimum weight unchanged, if there is one.
pub fn tie_edge(g: &BipartiteGraph, w: &WeightAssignment) -> Result<Option<(usize, usize)>> {
    let Some(m) = mwpm(g, w)? else {
        return Ok(None);
    };
    let best = matching_weight(&m, w);
    for (i, j) in m.pairs() {
        if let Some(other) = mwpm(&g.without_edge(i, j)?, w)? {
            if matching_weight(&other, w) == best {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// True when `g` has two distinct minimum-weight perfect matchings under `w`.
/// A graph without perfect matchings has no bad assignments.
pub fn is_bad(g: &BipartiteGraph, w: &WeightAssignment, k: u64) -> Result<bool> {
    check_range(g, w, k)?;
    Ok(tie_edge(g, w)?.is_some())
}

/// The matching obtained by optimizing `g` with row `i` and column `j`
/// removed, mapped back to original coordinates. `Some(empty)` when `n = 1`.
fn best_without_endpoints(g: &BipartiteGraph, w: &WeightAssignment, i: usize, j: usize) -> Result<Option<Matching>> {
    let n = g.n();
    let Some(sub) = g.without_vertices(i, j) else {
        return Ok(Some(Matching::empty(n)));
    };
    let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
    let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
    let sub_w = WeightAssignment::new(
        n - 1,
        rows.iter().flat_map(|&r| cols.iter().map(move |&c| (r, c))).map(|(r, c)| w.get(r, c)).collect(),
    )?;
    let Some(m) = mwpm(&sub, &sub_w)? else {
        return Ok(None);
    };
    let pairs: Vec<(usize, usize)> = m.pairs().map(|(a, b)| (rows[a], cols[b])).collect();
    Ok(Some(Matching::from_pairs(n, &pairs)?))
}

/// The surjection onto the bad set of `(g, k)`, with a fixed fallback.
#[derive(Debug, Clone)]
pub struct PhiWitness {
    g: BipartiteGraph,
    k: u64,
    edges: Vec<(usize, usize)>,
    dummy: WeightAssignment,
}

impl PhiWitness {
    /// `dummy` must itself be bad; it is returned whenever the splice fails.
    pub fn new(g: &BipartiteGraph, k: u64, dummy: WeightAssignment) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyRange);
        }
        if !is_bad(g, &dummy, k)? {
            return Err(Error::DummyNotBad);
        }
        Ok(Self {
            g: g.clone(),
            k,
            edges: g.edges().collect(),
            dummy,
        })
    }

    pub fn dummy(&self) -> &WeightAssignment {
        &self.dummy
    }

    /// `edge` indexes the edges of `g`; `w_rest` holds the weights of the
    /// other `m - 1` edges in row-major order.
    pub fn apply(&self, edge: usize, w_rest: &[i64]) -> Result<WeightAssignment> {
        let m = self.edges.len();
        if edge >= m {
            return Err(Error::InvalidEdgeIndex { index: edge, edges: m });
        }
        if w_rest.len() != m - 1 {
            return Err(Error::ShapeMismatch {
                expected: m - 1,
                found: w_rest.len(),
            });
        }
        let (ei, ej) = self.edges[edge];
        let mut values = w_rest.to_vec();
        values.insert(edge, 1);
        if let Some(p) = values.iter().position(|&v| v < 1 || v as u64 > self.k) {
            let (row, col) = self.edges[p];
            return Err(Error::WeightOutOfRange {
                row,
                col,
                value: values[p],
                k: self.k,
            });
        }
        let w = WeightAssignment::from_edge_values(&self.g, &values)?;

        let Some(m_prime) = mwpm(&self.g.without_edge(ei, ej)?, &w)? else {
            return Ok(self.dummy.clone());
        };
        let Some(m_one) = best_without_endpoints(&self.g, &w, ei, ej)? else {
            return Ok(self.dummy.clone());
        };
        let d = matching_weight(&m_prime, &w) - matching_weight(&m_one, &w);
        if d < 1 || d as u64 > self.k {
            return Ok(self.dummy.clone());
        }
        values[edge] = d;
        WeightAssignment::from_edge_values(&self.g, &values)
    }

    /// `m · k^{m-1}`.
    pub fn domain_size(&self) -> u128 {
        let m = self.edges.len();
        if m == 0 {
            return 0;
        }
        m as u128 * domain_size(self.k, m - 1)
    }

    /// The `idx`-th domain point: edge index most significant, then the
    /// remaining weights in lexicographic order.
    pub fn domain_element(&self, idx: u128) -> (usize, Vec<i64>) {
        let m = self.edges.len();
        let block = domain_size(self.k, m - 1);
        let rest = Lexicographic::nth_element(m - 1, 1, self.k, idx % block)
            .into_iter()
            .map(|v| v as i64)
            .collect();
        ((idx / block) as usize, rest)
    }

    /// A domain point mapping to the bad assignment `w`: a tie edge and the
    /// other weights.
    pub fn preimage(&self, w: &WeightAssignment) -> Result<Option<(usize, Vec<i64>)>> {
        check_range(&self.g, w, self.k)?;
        let Some(e) = tie_edge(&self.g, w)? else {
            return Ok(None);
        };
        let edge = self.edges.iter().position(|&x| x == e).expect("tie edge is an edge");
        let mut rest = w.edge_values(&self.g);
        rest.remove(edge);
        Ok(Some((edge, rest)))
    }
}

/// `φ(g, k, edge, w_rest, dummy)`.
pub fn witness_phi(
    g: &BipartiteGraph,
    k: u64,
    edge: usize,
    w_rest: &[i64],
    dummy: &WeightAssignment,
) -> Result<WeightAssignment> {
    PhiWitness::new(g, k, dummy.clone())?.apply(edge, w_rest)
}

fn assignment_at(g: &BipartiteGraph, k: u64, idx: u128) -> WeightAssignment {
    let vals: Vec<i64> = Lexicographic::nth_element(g.edge_count(), 1, k, idx)
        .into_iter()
        .map(|v| v as i64)
        .collect();
    WeightAssignment::from_edge_values(g, &vals).expect("edge count matches")
}

fn checked_space(g: &BipartiteGraph, k: u64, budget: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::EmptyRange);
    }
    let total = domain_size(k, g.edge_count());
    ensure_budget(total, budget)?;
    Ok(total as u64)
}

/// Every bad assignment in `[k]^m`, in lexicographic order of the
/// row-major edge weights.
pub fn bad_set(g: &BipartiteGraph, k: u64, budget: u64) -> Result<Vec<WeightAssignment>> {
    let total = checked_space(g, k, budget)?;
    let found: Vec<Option<WeightAssignment>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let w = assignment_at(g, k, u128::from(idx));
            Ok(tie_edge(g, &w)?.is_some().then_some(w))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// The lexicographically first bad assignment, if any.
pub fn first_bad(g: &BipartiteGraph, k: u64, budget: u64) -> Result<Option<WeightAssignment>> {
    let total = checked_space(g, k, budget)?;
    for idx in 0..total {
        let w = assignment_at(g, k, u128::from(idx));
        if tie_edge(g, &w)?.is_some() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Exact count of bad assignments out of `k^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FailureCount {
    pub bad: u64,
    pub total: u64,
}

impl FailureCount {
    pub fn fraction(&self) -> f64 {
        self.bad as f64 / self.total as f64
    }

    /// `bad / total ≤ m / k`, compared exactly.
    pub fn within_bound(&self, m: usize, k: u64) -> bool {
        u128::from(self.bad) * u128::from(k) <= m as u128 * u128::from(self.total)
    }
}

pub fn isolation_failure_fraction(g: &BipartiteGraph, k: u64, budget: u64) -> Result<FailureCount> {
    let total = checked_space(g, k, budget)?;
    let bad = (0..total)
        .into_par_iter()
        .map(|idx| Ok(u64::from(tie_edge(g, &assignment_at(g, k, u128::from(idx)))?.is_some())))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(FailureCount { bad, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_min_weight_pms, check_surjection_indexed, DEFAULT_BUDGET};

    fn k22() -> BipartiteGraph {
        BipartiteGraph::complete(2).unwrap()
    }

    fn oracle_bad(g: &BipartiteGraph, w: &WeightAssignment) -> bool {
        brute_min_weight_pms(g, w)
            .unwrap()
            .is_some_and(|r| r.argmins.len() >= 2)
    }

    #[test]
    fn unique_pm_graph_is_never_bad() {
        let diag = BipartiteGraph::from_rows(&[[1u8, 0], [1, 1]]).unwrap();
        for w in [[[1i64, 0], [1, 1]], [[3, 0], [2, 3]]] {
            assert!(!is_bad(&diag, &WeightAssignment::from_rows(&w).unwrap(), 3).unwrap());
        }
        assert_eq!(isolation_failure_fraction(&diag, 4, DEFAULT_BUDGET).unwrap().bad, 0);
        assert_eq!(first_bad(&diag, 4, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn equal_weights_tie() {
        let w = WeightAssignment::from_rows(&[[2i64, 2], [2, 2]]).unwrap();
        assert!(is_bad(&k22(), &w, 2).unwrap());
    }

    #[test]
    fn range_is_enforced() {
        let w = WeightAssignment::from_rows(&[[0i64, 1], [1, 1]]).unwrap();
        assert!(matches!(is_bad(&k22(), &w, 2), Err(Error::WeightOutOfRange { value: 0, .. })));
        let w = WeightAssignment::from_rows(&[[1i64, 3], [1, 1]]).unwrap();
        assert!(matches!(is_bad(&k22(), &w, 2), Err(Error::WeightOutOfRange { value: 3, .. })));
    }

    #[test]
    fn no_pm_means_no_bad_assignment() {
        let g = BipartiteGraph::from_rows(&[[1u8, 1], [0, 0]]).unwrap();
        let w = WeightAssignment::from_rows(&[[1i64, 1], [0, 0]]).unwrap();
        assert!(!is_bad(&g, &w, 1).unwrap());
    }

    #[test]
    fn is_bad_agrees_with_oracle_exhaustively() {
        let g = k22();
        for idx in 0..81u128 {
            let w = assignment_at(&g, 3, idx);
            assert_eq!(is_bad(&g, &w, 3).unwrap(), oracle_bad(&g, &w), "{w:?}");
        }
        let g3 = BipartiteGraph::from_rows(&[[1u8, 1, 0], [1, 1, 1], [0, 1, 1]]).unwrap();
        for idx in 0..domain_size(2, g3.edge_count()) {
            let w = assignment_at(&g3, 2, idx);
            assert_eq!(is_bad(&g3, &w, 2).unwrap(), oracle_bad(&g3, &w), "{w:?}");
        }
    }

    #[test]
    fn phi_splice_example() {
        let g = k22();
        let dummy = WeightAssignment::from_rows(&[[1i64, 1], [1, 1]]).unwrap();
        let out = witness_phi(&g, 2, 0, &[1, 1, 1], &dummy).unwrap();
        assert_eq!(out.values(), &[1, 1, 1, 1]);
        // w(M') = 1 + 2, w(M₁) = 2, splice 1.
        let out = witness_phi(&g, 2, 0, &[1, 2, 2], &dummy).unwrap();
        assert_eq!(out.values(), &[1, 1, 2, 2]);
        assert!(is_bad(&g, &out, 2).unwrap());
    }

    #[test]
    fn phi_falls_back_to_dummy() {
        let g = k22();
        let tri = BipartiteGraph::from_rows(&[[1u8, 0], [1, 1]]).unwrap();
        let dummy = WeightAssignment::from_rows(&[[1i64, 1], [1, 1]]).unwrap();
        assert_eq!(PhiWitness::new(&tri, 2, dummy.clone()).unwrap_err(), Error::DummyNotBad);
        let phi = PhiWitness::new(&g, 2, dummy.clone()).unwrap();
        // w(M') - w(M₁) = (2 + 2) - 1 = 3 > k.
        assert_eq!(phi.apply(0, &[2, 2, 1]).unwrap(), dummy);
        assert!(matches!(phi.apply(4, &[1, 1, 1]), Err(Error::InvalidEdgeIndex { index: 4, edges: 4 })));
    }

    #[test]
    fn phi_is_onto_bad_set() {
        // K_{2,2} is also the union of the diagonal and the anti-diagonal.
        let graphs = [k22(), BipartiteGraph::from_rows(&[[1u8, 1, 0], [1, 1, 1], [0, 1, 1]]).unwrap()];
        for g in &graphs {
            for k in 1..=4 {
                let target = bad_set(g, k, DEFAULT_BUDGET).unwrap();
                let dummy = target[0].clone();
                let phi = PhiWitness::new(g, k, dummy).unwrap();
                let report = check_surjection_indexed(
                    phi.domain_size(),
                    |i| phi.domain_element(i),
                    |(e, rest)| phi.apply(*e, rest),
                    target.clone(),
                    DEFAULT_BUDGET,
                )
                .unwrap();
                assert!(report.is_surjective(), "k={k}: {:?}", report.uncovered);
                assert!(report.is_closed());
                assert!(target.len() as u128 <= phi.domain_size());
                for w in &target {
                    let (e, rest) = phi.preimage(w).unwrap().unwrap();
                    assert_eq!(&phi.apply(e, &rest).unwrap(), w);
                }
            }
        }
    }

    #[test]
    fn failure_fraction_anchors() {
        let g = k22();
        // Both PMs of K_{2,2} tie iff w00 + w11 = w01 + w10.
        for k in [2u64, 3, 4, 8] {
            let mut expected = 0u64;
            for a in 1..=k {
                for b in 1..=k {
                    for c in 1..=k {
                        for d in 1..=k {
                            expected += u64::from(a + d == b + c);
                        }
                    }
                }
            }
            let count = isolation_failure_fraction(&g, k, DEFAULT_BUDGET).unwrap();
            assert_eq!(count.bad, expected);
            assert_eq!(count.total, k.pow(4));
            assert!(count.within_bound(4, k));
        }
        assert_eq!(isolation_failure_fraction(&g, 4, DEFAULT_BUDGET).unwrap().bad, 44);
        assert_eq!(isolation_failure_fraction(&g, 8, DEFAULT_BUDGET).unwrap().bad, 344);
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(bad_set(&k22(), 8, 100), Err(Error::BudgetExceeded { .. })));
    }
}
