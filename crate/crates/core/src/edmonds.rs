//! Perfect matchings from nonzero determinants.
//!
//! [`extract_pm`] walks the cofactor expansion along the last row: with
//! `B_n = B`, it picks the least column `j` of the last row of `B_i` with
//! `B_i(i, j) · det(B_i[i|j]) ≠ 0`, records which original column that is,
//! and recurses on the minor. The recorded columns form a nonzero diagonal,
//! hence a perfect matching.
//!
//! [`lovasz_decide`] is the one-sided randomized test: evaluate the Edmonds
//! matrix at uniform values from `[1, 2n]` and accept iff the determinant is
//! nonzero.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bipartite::{is_perfect_matching, BipartiteGraph, Matching};
use crate::error::{Error, Result};
use crate::exact_linear::{det_berkowitz, minor, minor_det, ExactInt, IntMatrix};

/// Column choices made by [`extract_pm_traced`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractionTrace {
    /// `local_columns[i]` is the column index `j_i` chosen within `B_i`
    /// (the `(i+1) × (i+1)` matrix left after removing rows `i+1..n`).
    /// Entry 0 is always 0.
    pub local_columns: Vec<usize>,
    /// `sigma[i]` is the original column matched to row `i`.
    pub sigma: Vec<usize>,
}

/// A perfect matching of `g` read off a nonzero diagonal of `b`.
pub fn extract_pm(g: &BipartiteGraph, b: &IntMatrix) -> Result<Matching> {
    extract_pm_traced(g, b).map(|(m, _)| m)
}

/// [`extract_pm`] together with the column choices it made.
pub fn extract_pm_traced(g: &BipartiteGraph, b: &IntMatrix) -> Result<(Matching, ExtractionTrace)> {
    let n = g.n();
    if b.dim() != n {
        return Err(Error::ShapeMismatch {
            expected: n * n,
            found: b.dim() * b.dim(),
        });
    }
    if let Some(p) = (0..n * n).find(|&p| !g.has_edge(p / n, p % n) && !b.entries()[p].is_zero()) {
        return Err(Error::NotAnEdge { row: p / n, col: p % n });
    }
    if det_berkowitz(b).is_zero() {
        return Err(Error::ZeroDeterminant);
    }

    let mut current = b.clone();
    let mut columns: Vec<usize> = (0..n).collect();
    let mut local_columns = vec![0; n];
    let mut sigma = vec![0; n];

    for i in (1..n).rev() {
        let j = (0..=i)
            .find(|&j| {
                !current.get(i, j).is_zero()
                    && !minor_det(&current, i, j).expect("in range").is_zero()
            })
            .expect("a nonzero determinant has a nonzero cofactor term");
        local_columns[i] = j;
        sigma[i] = columns.remove(j);
        current = minor(&current, i, j)?;
    }
    debug_assert!(!current.get(0, 0).is_zero());
    sigma[0] = columns[0];

    let matching = Matching::from_permutation(&sigma)?;
    if !is_perfect_matching(g, &matching) {
        return Err(Error::InvalidMatching("extracted diagonal leaves the graph".into()));
    }
    Ok((matching, ExtractionTrace { local_columns, sigma }))
}

/// One evaluation of the randomized determinant test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LovaszTrial {
    pub evaluation: IntMatrix,
    #[serde(serialize_with = "ser_decimal")]
    pub determinant: ExactInt,
}

fn ser_decimal<S: serde::Serializer>(x: &ExactInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl LovaszTrial {
    pub fn accepts(&self) -> bool {
        !self.determinant.is_zero()
    }
}

/// Edmonds matrix of `g` evaluated at values drawn uniformly from `[1, 2n]`,
/// one per edge in row-major order, from ChaCha8 seeded with `seed`.
pub fn lovasz_trial(g: &BipartiteGraph, seed: u64) -> LovaszTrial {
    let n = g.n();
    let hi = 2 * n as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = vec![ExactInt::from(0); n * n];
    for (i, j) in g.edges() {
        entries[i * n + j] = ExactInt::from(rng.gen_range(1..=hi));
    }
    let evaluation = IntMatrix::new(n, entries).expect("n ≥ 1");
    let determinant = det_berkowitz(&evaluation);
    LovaszTrial {
        evaluation,
        determinant,
    }
}

/// True when a random evaluation of the Edmonds matrix is nonsingular.
/// Never true for a graph without a perfect matching.
pub fn lovasz_decide(g: &BipartiteGraph, seed: u64) -> bool {
    lovasz_trial(g, seed).accepts()
}
