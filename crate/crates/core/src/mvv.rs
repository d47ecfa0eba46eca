//! Matchings from determinants of power-of-two weight matrices.
//!
//! With `b(i, j) = 2^{w(i,j)}` on edges, each perfect matching `M`
//! contributes `±2^{w(M)}` to `det b`. If the minimum-weight perfect matching
//! is unique its term cannot cancel, so `numz(det b)` is its weight, and an
//! edge `(i, j)` belongs to it iff `numz(det b[i|j]) = p - w(i, j)`.
//!
//! [`mvv_find_pm`] draws weights from `[1, 2m]`, collects the edges passing
//! that test, and checks the result before returning it.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bipartite::{is_perfect_matching, matching_weight, random_weights, BipartiteGraph, Matching, WeightAssignment};
use crate::error::{Error, Result};
use crate::exact_linear::{det_berkowitz, minor, minor_det, numz, ExactInt, IntMatrix};

/// `2^{w(i,j)}` on the edges of a graph, 0 elsewhere, with its determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerWeightMatrix {
    weights: WeightAssignment,
    matrix: IntMatrix,
    det: ExactInt,
}

impl PowerWeightMatrix {
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn weights(&self) -> &WeightAssignment {
        &self.weights
    }

    pub fn det(&self) -> &ExactInt {
        &self.det
    }

    /// `numz(det b)`; `None` when the determinant vanishes.
    pub fn p(&self) -> Option<u64> {
        numz(&self.det)
    }
}

pub fn build_power_matrix(g: &BipartiteGraph, w: &WeightAssignment) -> Result<PowerWeightMatrix> {
    let n = g.n();
    if w.n() != n {
        return Err(Error::ShapeMismatch {
            expected: n * n,
            found: w.n() * w.n(),
        });
    }
    let mut entries = vec![ExactInt::zero(); n * n];
    for (i, j) in g.edges() {
        // Weights are nonnegative by construction of WeightAssignment.
        entries[i * n + j] = ExactInt::one() << w.get(i, j) as u64;
    }
    let matrix = IntMatrix::new(n, entries)?;
    let det = det_berkowitz(&matrix);
    Ok(PowerWeightMatrix {
        weights: w.clone(),
        matrix,
        det,
    })
}

fn require_p(b: &PowerWeightMatrix) -> Result<u64> {
    b.p().ok_or(Error::ZeroDeterminant)
}

/// A perfect matching of weight at most `numz(det b)`, whether or not the
/// minimum is unique. Walks the last-row cofactor expansion, each time
/// taking the nonzero term with the fewest trailing zeros (least column on
/// ties).
pub fn extract_pm_weight_bounded(g: &BipartiteGraph, b: &PowerWeightMatrix) -> Result<Matching> {
    let n = g.n();
    if b.matrix.dim() != n {
        return Err(Error::ShapeMismatch {
            expected: n * n,
            found: b.matrix.dim() * b.matrix.dim(),
        });
    }
    let p = require_p(b)?;

    let mut current = b.matrix.clone();
    let mut columns: Vec<usize> = (0..n).collect();
    let mut sigma = vec![0; n];
    // numz of the product of the entries chosen so far.
    let mut prefix = 0u64;

    for i in (1..n).rev() {
        let (j, term) = (0..=i)
            .filter_map(|j| {
                let entry = current.get(i, j);
                if entry.is_zero() {
                    return None;
                }
                let t = entry * minor_det(&current, i, j).expect("in range");
                numz(&t).map(|z| (j, z))
            })
            .min_by_key(|&(j, z)| (z, j))
            .expect("numz(T_i) ≤ p forces a nonzero term");
        debug_assert!(prefix + term <= p);
        prefix += numz(current.get(i, j)).expect("nonzero entry");
        sigma[i] = columns.remove(j);
        current = minor(&current, i, j)?;
    }
    sigma[0] = columns[0];
    debug_assert!(prefix + numz(current.get(0, 0)).expect("nonzero") <= p);

    let m = Matching::from_permutation(&sigma)?;
    if !is_perfect_matching(g, &m) {
        return Err(Error::InvalidMatching("extracted diagonal leaves the graph".into()));
    }
    Ok(m)
}

/// `numz(det b)`: the minimum perfect matching weight when that minimum is
/// attained uniquely. Uniqueness is the caller's obligation.
pub fn min_weight_via_numz(b: &PowerWeightMatrix) -> Result<u64> {
    require_p(b)
}

/// Whether `(i, j)` lies in the unique minimum-weight perfect matching,
/// decided by `numz(det b[i|j]) = numz(det b) - w(i, j)`.
pub fn edge_in_unique_min_pm(g: &BipartiteGraph, b: &PowerWeightMatrix, i: usize, j: usize) -> Result<bool> {
    let n = g.n();
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange { row: i, col: j, n });
    }
    if !g.has_edge(i, j) {
        return Err(Error::NotAnEdge { row: i, col: j });
    }
    let p = require_p(b)?;
    let Some(expected) = p.checked_sub(b.weights.get(i, j) as u64) else {
        return Ok(false);
    };
    Ok(numz(&minor_det(&b.matrix, i, j)?) == Some(expected))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MvvSuccess {
    pub matching: Matching,
    pub weights: WeightAssignment,
    pub p: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum MvvFailure {
    /// `det b = 0`: no perfect matching, or an unlucky cancellation.
    SingularDeterminant { weights: WeightAssignment },
    /// The collected edges are not a perfect matching of weight `p`.
    NotIsolated {
        weights: WeightAssignment,
        p: u64,
        edges: Vec<(usize, usize)>,
    },
}

impl MvvFailure {
    pub fn weights(&self) -> &WeightAssignment {
        match self {
            Self::SingularDeterminant { weights } | Self::NotIsolated { weights, .. } => weights,
        }
    }
}

pub type MvvOutcome = std::result::Result<MvvSuccess, MvvFailure>;

/// One randomized attempt with weights from `[1, 2m]` seeded by `seed`.
pub fn mvv_find_pm(g: &BipartiteGraph, seed: u64) -> MvvOutcome {
    mvv_find_pm_with(g, seed, false)
}

/// As [`mvv_find_pm`]; with `parallel` the per-edge tests run on the rayon
/// pool. The result is the same either way.
pub fn mvv_find_pm_with(g: &BipartiteGraph, seed: u64, parallel: bool) -> MvvOutcome {
    let n = g.n();
    let m = g.edge_count();
    let weights = if m == 0 {
        WeightAssignment::new(n, vec![0; n * n]).expect("n ≥ 1")
    } else {
        random_weights(g, 2 * m as u64, seed).expect("range is nonempty")
    };
    let b = build_power_matrix(g, &weights).expect("shapes agree");
    let Some(p) = b.p() else {
        return Err(MvvFailure::SingularDeterminant { weights });
    };

    let test = |&(i, j): &(usize, usize)| edge_in_unique_min_pm(g, &b, i, j).expect("edge of g, det ≠ 0");
    let all: Vec<(usize, usize)> = g.edges().collect();
    let edges: Vec<(usize, usize)> = if parallel {
        let keep: Vec<bool> = all.par_iter().map(test).collect();
        all.into_iter().zip(keep).filter_map(|(e, k)| k.then_some(e)).collect()
    } else {
        all.into_iter().filter(test).collect()
    };

    let verified = Matching::from_pairs(n, &edges)
        .ok()
        .filter(|mt| is_perfect_matching(g, mt) && matching_weight(mt, &weights) == p as i64);
    match verified {
        Some(matching) => Ok(MvvSuccess { matching, weights, p }),
        None => Err(MvvFailure::NotIsolated { weights, p, edges }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_min_weight_pms;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn wa(rows: &[[i64; 2]]) -> WeightAssignment {
        WeightAssignment::from_rows(rows).unwrap()
    }

    #[test]
    fn power_matrix_examples() {
        let k22 = BipartiteGraph::complete(2).unwrap();
        let b = build_power_matrix(&k22, &wa(&[[1, 2], [3, 4]])).unwrap();
        assert_eq!(b.matrix(), &IntMatrix::from_rows(&[[2i64, 4], [8, 16]]).unwrap());

        let g = BipartiteGraph::from_rows(&[[1u8, 0], [1, 1]]).unwrap();
        let b = build_power_matrix(&g, &wa(&[[0, 0], [0, 0]])).unwrap();
        assert_eq!(b.matrix(), &IntMatrix::from_rows(&[[1i64, 0], [1, 1]]).unwrap());

        let one = BipartiteGraph::complete(1).unwrap();
        let b = build_power_matrix(&one, &WeightAssignment::new(1, vec![3]).unwrap()).unwrap();
        assert_eq!(b.det(), &ExactInt::from(8));
    }

    #[test]
    fn power_matrix_minimum_example() {
        let k22 = BipartiteGraph::complete(2).unwrap();
        let b = build_power_matrix(&k22, &wa(&[[0, 1], [1, 0]])).unwrap();
        assert_eq!(b.det(), &ExactInt::from(-3));
        assert_eq!(b.p(), Some(0));
        let m = extract_pm_weight_bounded(&k22, &b).unwrap();
        assert_eq!(m.permutation().unwrap(), vec![0, 1]);
    }

    #[test]
    fn numz_and_membership_example() {
        let k22 = BipartiteGraph::complete(2).unwrap();
        let b = build_power_matrix(&k22, &wa(&[[0, 1], [1, 1]])).unwrap();
        assert_eq!(b.det(), &ExactInt::from(-2));
        assert_eq!(min_weight_via_numz(&b).unwrap(), 1);
        assert!(edge_in_unique_min_pm(&k22, &b, 0, 0).unwrap());
        assert!(!edge_in_unique_min_pm(&k22, &b, 0, 1).unwrap());
        assert!(!edge_in_unique_min_pm(&k22, &b, 1, 0).unwrap());
        assert!(edge_in_unique_min_pm(&k22, &b, 1, 1).unwrap());
    }

    #[test]
    fn singular_and_non_edge_errors() {
        let g = BipartiteGraph::from_rows(&[[1u8, 1], [0, 0]]).unwrap();
        let b = build_power_matrix(&g, &wa(&[[1, 1], [0, 0]])).unwrap();
        assert_eq!(min_weight_via_numz(&b), Err(Error::ZeroDeterminant));
        assert_eq!(extract_pm_weight_bounded(&g, &b), Err(Error::ZeroDeterminant));
        let diag = BipartiteGraph::from_rows(&[[1u8, 0], [0, 1]]).unwrap();
        let b = build_power_matrix(&diag, &wa(&[[2, 0], [0, 5]])).unwrap();
        assert_eq!(edge_in_unique_min_pm(&diag, &b, 0, 1), Err(Error::NotAnEdge { row: 0, col: 1 }));
        assert!(edge_in_unique_min_pm(&diag, &b, 0, 0).unwrap());
        assert_eq!(min_weight_via_numz(&b).unwrap(), 7);
    }

    #[test]
    fn k11_edge_test_uses_empty_minor() {
        let g = BipartiteGraph::complete(1).unwrap();
        let b = build_power_matrix(&g, &WeightAssignment::new(1, vec![4]).unwrap()).unwrap();
        assert!(edge_in_unique_min_pm(&g, &b, 0, 0).unwrap());
        for seed in 0..50 {
            let s = mvv_find_pm(&g, seed).unwrap();
            assert!((1..=2).contains(&s.p));
        }
    }

    #[test]
    fn sweep_against_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut unique_seen = 0;
        for _ in 0..300 {
            let n = rng.gen_range(1..=4);
            let g = BipartiteGraph::new(n, (0..n * n).map(|_| rng.gen_bool(0.7)).collect()).unwrap();
            let vals: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..=5)).collect();
            let w = WeightAssignment::new(n, vals).unwrap();
            let b = build_power_matrix(&g, &w).unwrap();
            let Some(p) = b.p() else { continue };
            let m = extract_pm_weight_bounded(&g, &b).unwrap();
            assert!(matching_weight(&m, &w) as u64 <= p);
            let best = brute_min_weight_pms(&g, &w).unwrap().unwrap();
            if let Some(u) = best.unique() {
                unique_seen += 1;
                assert_eq!(min_weight_via_numz(&b).unwrap(), best.weight as u64);
                for (i, j) in g.edges() {
                    assert_eq!(edge_in_unique_min_pm(&g, &b, i, j).unwrap(), u.contains(i, j));
                }
            }
        }
        assert!(unique_seen > 100);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let g = BipartiteGraph::complete(4).unwrap();
        for seed in 0..40 {
            assert_eq!(mvv_find_pm_with(&g, seed, true), mvv_find_pm(&g, seed));
        }
    }

    #[test]
    fn finder_outcomes() {
        let no_pm = BipartiteGraph::from_rows(&[[1u8, 1, 1], [0, 0, 1], [0, 0, 1]]).unwrap();
        assert!((0..100).all(|s| matches!(mvv_find_pm(&no_pm, s), Err(MvvFailure::SingularDeterminant { .. }))));
        let empty = BipartiteGraph::empty(2).unwrap();
        assert!(mvv_find_pm(&empty, 0).is_err());

        let k44 = BipartiteGraph::complete(4).unwrap();
        let mut ok = 0;
        for seed in 0..1000 {
            if let Ok(s) = mvv_find_pm(&k44, seed) {
                assert!(is_perfect_matching(&k44, &s.matching));
                assert_eq!(matching_weight(&s.matching, &s.weights), s.p as i64);
                ok += 1;
            }
        }
        assert!(ok >= 450, "{ok}");
    }
}
