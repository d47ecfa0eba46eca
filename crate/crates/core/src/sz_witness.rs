//! Surjections onto the zero set of an Edmonds polynomial.
//!
//! For a bipartite graph `g` with a perfect matching `σ`, let `B_k` be the
//! `k × k` submatrix of `B` on rows `0..k` and columns `σ(0..k)` (so `B_n = B`
//! and `B_{k-1}` is the minor of `B_k` at `(k-1, σ(k-1))`). If `det B = 0`
//! there is a least `k` with `det B_j = 0` for all `j ≥ k`; then either
//! `k = 1` or `det B_{k-1} ≠ 0`. In the second case the entry at
//! `(k-1, σ(k-1))` is fixed by the others, because `det B_k` is affine in it
//! with slope `± det B_{k-1}`.
//!
//! A witness takes `(k-1, r)` with `r` the other `n² - 1` entries, solves for
//! the missing one, and returns the completed matrix when it lies in the zero
//! set. Otherwise it returns the all-zero matrix. Every element of the zero
//! set is reached, so `|Z| ≤ n · s^{n²-1}`, i.e. `Pr[det = 0] ≤ n / s`.
//!
//! [`WitnessF`] uses `σ = id` on `K_{n,n}`. [`WitnessH`] takes `σ` from
//! [`extract_pm_traced`] on a certifying evaluation of a general graph.
//! Zero-set elements are normalized to carry 0 at non-edges.

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::bipartite::{edmonds_eval, BipartiteGraph};
use crate::edmonds::extract_pm_traced;
use crate::error::{Error, Result};
use crate::exact_linear::{det_berkowitz, ExactInt, IntMatrix};
use crate::oracle::{domain_size, ensure_budget, Lexicographic};

/// An assignment `r ∈ [0, s)^{n×n}` (row-major) at which the Edmonds
/// determinant vanishes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ZeroSetElement {
    n: usize,
    values: Vec<u64>,
}

impl ZeroSetElement {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            values: vec![0; n * n],
        }
    }

    pub fn from_values(n: usize, values: Vec<u64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.values[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::new(self.n, self.values.iter().map(|&v| ExactInt::from(v)).collect())
            .expect("n ≥ 1")
    }
}

impl fmt::Debug for ZeroSetElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.values.chunks(self.n)).finish()
    }
}

/// Argument of a witness map: the step index `k - 1 ∈ [0, n)` and the
/// `n² - 1` remaining entries in row-major order, skipping the unknown.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct WitnessInput {
    pub index: usize,
    pub rest: Vec<u64>,
}

/// The shared construction, parameterized by the diagonal `σ` it follows.
#[derive(Debug, Clone)]
struct DiagonalWitness {
    g: BipartiteGraph,
    sigma: Vec<usize>,
    s: u64,
}

impl DiagonalWitness {
    fn n(&self) -> usize {
        self.g.n()
    }

    fn unknown(&self, index: usize) -> (usize, usize) {
        (index, self.sigma[index])
    }

    /// Rows `0..k`, columns `σ(0..k)` in increasing order.
    fn chain_columns(&self, k: usize) -> Vec<usize> {
        let mut cols = self.sigma[..k].to_vec();
        cols.sort_unstable();
        cols
    }

    fn chain_det(&self, b: &IntMatrix, k: usize) -> ExactInt {
        if k == 0 {
            return ExactInt::from(1);
        }
        let rows: Vec<usize> = (0..k).collect();
        det_berkowitz(&b.submatrix(&rows, &self.chain_columns(k)).expect("in range"))
    }

    fn validate(&self, input: &WitnessInput) -> Result<()> {
        let n = self.n();
        if input.index >= n {
            return Err(Error::IndexOutOfRange {
                row: input.index,
                col: input.index,
                n,
            });
        }
        if input.rest.len() != n * n - 1 {
            return Err(Error::ShapeMismatch {
                expected: n * n - 1,
                found: input.rest.len(),
            });
        }
        if let Some(&v) = input.rest.iter().find(|&&v| v >= self.s) {
            return Err(Error::ValueOutOfRange { value: v, s: self.s });
        }
        Ok(())
    }

    fn apply(&self, input: &WitnessInput) -> Result<ZeroSetElement> {
        self.validate(input)?;
        let n = self.n();
        let (ui, uj) = self.unknown(input.index);
        let unknown = ui * n + uj;

        let mut values = Vec::with_capacity(n * n);
        let mut rest = input.rest.iter();
        for p in 0..n * n {
            if p == unknown {
                values.push(0);
                continue;
            }
            let v = *rest.next().expect("length checked");
            values.push(if self.g.has_edge(p / n, p % n) { v } else { 0 });
        }

        let dummy = ZeroSetElement::zero(n);
        let mut b = ZeroSetElement { n, values: values.clone() }.to_matrix();
        let k = input.index + 1;

        let solved = if k == 1 {
            ExactInt::zero()
        } else {
            let prev = self.chain_det(&b, k - 1);
            if prev.is_zero() {
                return Ok(dummy);
            }
            // det B_k = x · (-1)^{row + col} · det B_{k-1} + det B_k|_{x=0}
            let local_col = self
                .chain_columns(k)
                .iter()
                .position(|&c| c == uj)
                .expect("σ(k-1) is a chain column");
            let slope = if (input.index + local_col).is_multiple_of(2) { prev } else { -prev };
            let constant = self.chain_det(&b, k);
            let (q, r) = (-constant).div_rem(&slope);
            if !r.is_zero() {
                return Ok(dummy);
            }
            q
        };

        let x = match u64::try_from(&solved) {
            Ok(x) if x < self.s => x,
            _ => return Ok(dummy),
        };
        b.set(ui, uj, solved);
        if !det_berkowitz(&b).is_zero() {
            return Ok(dummy);
        }
        values[unknown] = x;
        Ok(ZeroSetElement { n, values })
    }

    /// The input that the surjectivity argument assigns to `c`: the
    /// least chain index from which every determinant vanishes, and `c`
    /// with that position removed.
    fn preimage(&self, c: &ZeroSetElement) -> Result<WitnessInput> {
        let n = self.n();
        if c.n != n {
            return Err(Error::ShapeMismatch {
                expected: n * n,
                found: c.values.len(),
            });
        }
        let b = c.to_matrix();
        if !det_berkowitz(&b).is_zero() {
            return Err(Error::NotInZeroSet);
        }
        let mut k = n;
        while k > 1 && self.chain_det(&b, k - 1).is_zero() {
            k -= 1;
        }
        let index = k - 1;
        let (ui, uj) = self.unknown(index);
        let rest = (0..n * n)
            .filter(|&p| p != ui * n + uj)
            .map(|p| c.values[p])
            .collect();
        Ok(WitnessInput { index, rest })
    }

    fn compact_domain_size(&self) -> u128 {
        (self.n() as u128) * domain_size(self.s, self.g.edge_count() - 1)
    }

    /// Inputs that carry 0 at every non-edge position, enumerated as
    /// `index` (most significant) then the other `m - 1` edge values.
    fn compact_input(&self, idx: u128) -> WitnessInput {
        let n = self.n();
        let m = self.g.edge_count();
        let block = domain_size(self.s, m - 1);
        let index = (idx / block) as usize;
        let edge_vals = Lexicographic::nth_element(m - 1, 0, self.s, idx % block);
        let (ui, uj) = self.unknown(index);
        let mut vals = edge_vals.into_iter();
        let rest = (0..n * n)
            .filter(|&p| p != ui * n + uj)
            .map(|p| {
                if self.g.has_edge(p / n, p % n) {
                    vals.next().expect("m - 1 edge values")
                } else {
                    0
                }
            })
            .collect();
        WitnessInput { index, rest }
    }
}

/// The witness for the complete bipartite graph `K_{n,n}`, following the
/// main diagonal.
#[derive(Debug, Clone)]
pub struct WitnessF(DiagonalWitness);

impl WitnessF {
    pub fn new(n: usize, s: u64) -> Result<Self> {
        if s == 0 {
            return Err(Error::EmptyRange);
        }
        Ok(Self(DiagonalWitness {
            g: BipartiteGraph::complete(n)?,
            sigma: (0..n).collect(),
            s,
        }))
    }

    pub fn apply(&self, input: &WitnessInput) -> Result<ZeroSetElement> {
        self.0.apply(input)
    }

    pub fn preimage(&self, c: &ZeroSetElement) -> Result<WitnessInput> {
        self.0.preimage(c)
    }

    /// `n · s^{n²-1}`, the size of the witness domain.
    pub fn domain_size(&self) -> u128 {
        self.0.compact_domain_size()
    }

    /// The `idx`-th domain element in lexicographic order.
    pub fn domain_element(&self, idx: u128) -> WitnessInput {
        self.0.compact_input(idx)
    }

    /// Padded form `[n] × S^{n²} → S × Z`: the last coordinate passes
    /// through unchanged.
    pub fn apply_padded(&self, index: usize, values: &[u64]) -> Result<(u64, ZeroSetElement)> {
        padded(&self.0, index, values)
    }
}

/// The witness for a general bipartite graph, following the perfect
/// matching extracted from a certifying evaluation.
#[derive(Debug, Clone)]
pub struct WitnessH(DiagonalWitness);

impl WitnessH {
    /// `wcert` is a row-major `n × n` evaluation point with
    /// `det A(wcert) ≠ 0`.
    pub fn new(g: &BipartiteGraph, wcert: &[ExactInt], s: u64) -> Result<Self> {
        if s == 0 {
            return Err(Error::EmptyRange);
        }
        let b = edmonds_eval(g, wcert)?;
        let (_, trace) = extract_pm_traced(g, &b)?;
        Ok(Self(DiagonalWitness {
            g: g.clone(),
            sigma: trace.sigma,
            s,
        }))
    }

    /// The diagonal the construction follows.
    pub fn sigma(&self) -> &[usize] {
        &self.0.sigma
    }

    pub fn apply(&self, input: &WitnessInput) -> Result<ZeroSetElement> {
        self.0.apply(input)
    }

    pub fn preimage(&self, c: &ZeroSetElement) -> Result<WitnessInput> {
        self.0.preimage(c)
    }

    /// `n · s^{m-1}` for `m` edges: inputs that are 0 off the edges.
    pub fn compact_domain_size(&self) -> u128 {
        self.0.compact_domain_size()
    }

    pub fn compact_domain_element(&self, idx: u128) -> WitnessInput {
        self.0.compact_input(idx)
    }

    pub fn apply_padded(&self, index: usize, values: &[u64]) -> Result<(u64, ZeroSetElement)> {
        padded(&self.0, index, values)
    }
}

fn padded(w: &DiagonalWitness, index: usize, values: &[u64]) -> Result<(u64, ZeroSetElement)> {
    let n = w.n();
    if values.len() != n * n {
        return Err(Error::ShapeMismatch {
            expected: n * n,
            found: values.len(),
        });
    }
    let (extra, rest) = values.split_last().expect("n ≥ 1");
    if *extra >= w.s {
        return Err(Error::ValueOutOfRange { value: *extra, s: w.s });
    }
    let z = w.apply(&WitnessInput {
        index,
        rest: rest.to_vec(),
    })?;
    Ok((*extra, z))
}

/// `F(n, s, input)` on `K_{n,n}`.
pub fn witness_f(n: usize, s: u64, input: &WitnessInput) -> Result<ZeroSetElement> {
    WitnessF::new(n, s)?.apply(input)
}

/// `H(n, s, g, wcert, input)`; fails when `det A(wcert) = 0`.
pub fn witness_h(s: u64, g: &BipartiteGraph, wcert: &[ExactInt], input: &WitnessInput) -> Result<ZeroSetElement> {
    WitnessH::new(g, wcert, s)?.apply(input)
}

/// Every edge assignment in `[0, s)^m` (non-edges 0) with vanishing Edmonds
/// determinant, in lexicographic order of the row-major edge values.
pub fn zero_set(g: &BipartiteGraph, s: u64, budget: u64) -> Result<impl Iterator<Item = ZeroSetElement> + '_> {
    if s == 0 {
        return Err(Error::EmptyRange);
    }
    let m = g.edge_count();
    ensure_budget(domain_size(s, m), budget)?;
    let n = g.n();
    let positions: Vec<usize> = g.edges().map(|(i, j)| i * n + j).collect();
    Ok(Lexicographic::new(m, 0, s).filter_map(move |vals| {
        let mut values = vec![0; n * n];
        for (&p, v) in positions.iter().zip(vals) {
            values[p] = v;
        }
        let z = ZeroSetElement { n, values };
        det_berkowitz(&z.to_matrix()).is_zero().then_some(z)
    }))
}

/// True when the Edmonds determinant of `g` vanishes at `z` and `z` is 0 off
/// the edges of `g`.
pub fn in_zero_set(g: &BipartiteGraph, z: &ZeroSetElement) -> bool {
    z.n == g.n()
        && (0..z.n * z.n).all(|p| g.has_edge(p / z.n, p % z.n) || z.values[p] == 0)
        && det_berkowitz(&z.to_matrix()).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// |Z(2, s)| on K_{2,2} by counting r00·r11 = r01·r10 directly.
    fn brute_2x2_count(s: u64) -> usize {
        let mut count = 0;
        for a in 0..s {
            for b in 0..s {
                for c in 0..s {
                    for d in 0..s {
                        if a * d == b * c {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn zero_set_sizes_match_direct_count() {
        let k22 = BipartiteGraph::complete(2).unwrap();
        assert_eq!(brute_2x2_count(2), 10);
        assert_eq!(brute_2x2_count(3), 31);
        assert_eq!(brute_2x2_count(4), 64);
        for s in 2..=4 {
            assert_eq!(zero_set(&k22, s, 1_000).unwrap().count(), brute_2x2_count(s));
        }
        let k11 = BipartiteGraph::complete(1).unwrap();
        let z: Vec<_> = zero_set(&k11, 2, 10).unwrap().collect();
        assert_eq!(z, vec![ZeroSetElement::zero(1)]);
        assert!(matches!(zero_set(&k22, 4, 100), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn f_base_case() {
        let out = witness_f(1, 2, &WitnessInput { index: 0, rest: vec![] }).unwrap();
        assert_eq!(out, ZeroSetElement::zero(1));
    }

    #[test]
    fn f_solves_the_missing_entry() {
        // B = [[1, 2], [3, *]] with index 1: * = 6 makes det 0, needs s > 6.
        let input = WitnessInput {
            index: 1,
            rest: vec![1, 2, 3],
        };
        let out = witness_f(2, 7, &input).unwrap();
        assert_eq!(out.values(), &[1, 2, 3, 6]);
        // Out of range for s = 4: dummy.
        let out = witness_f(2, 4, &input).unwrap();
        assert!(out.is_zero());
        // Non-integral solution: [[2, 1], [1, *]] needs * = 1/2.
        let out = witness_f(2, 7, &WitnessInput { index: 1, rest: vec![2, 1, 1] }).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn f_rejects_bad_inputs() {
        let f = WitnessF::new(2, 3).unwrap();
        assert!(f.apply(&WitnessInput { index: 2, rest: vec![0; 3] }).is_err());
        assert!(f.apply(&WitnessInput { index: 0, rest: vec![0; 4] }).is_err());
        assert!(matches!(
            f.apply(&WitnessInput { index: 0, rest: vec![0, 3, 0] }),
            Err(Error::ValueOutOfRange { value: 3, s: 3 })
        ));
    }

    #[test]
    fn f_is_onto_z22_and_z24() {
        let k22 = BipartiteGraph::complete(2).unwrap();
        for (s, expected) in [(2u64, 10usize), (4, 64)] {
            let f = WitnessF::new(2, s).unwrap();
            let image: HashSet<_> = (0..f.domain_size()).map(|i| f.apply(&f.domain_element(i)).unwrap()).collect();
            let z: HashSet<_> = zero_set(&k22, s, 1000).unwrap().collect();
            assert_eq!(z.len(), expected);
            assert_eq!(image, z);
            assert!(z.len() as u128 <= f.domain_size());
        }
    }

    #[test]
    fn preimage_reconstructs() {
        let k33 = BipartiteGraph::complete(3).unwrap();
        let f = WitnessF::new(3, 2).unwrap();
        for c in zero_set(&k33, 2, 1000).unwrap() {
            let input = f.preimage(&c).unwrap();
            assert_eq!(f.apply(&input).unwrap(), c);
        }
    }

    #[test]
    fn h_on_complete_graph_with_identity_matches_f() {
        let n = 2;
        let g = BipartiteGraph::complete(n).unwrap();
        let id = IntMatrix::identity(n).unwrap();
        let h = WitnessH::new(&g, id.entries(), 3).unwrap();
        assert_eq!(h.sigma(), &[0, 1]);
        let f = WitnessF::new(n, 3).unwrap();
        for idx in 0..f.domain_size() {
            let input = f.domain_element(idx);
            assert_eq!(h.apply(&input).unwrap(), f.apply(&input).unwrap());
        }
    }

    #[test]
    fn h_on_diagonal_graph() {
        // Edges (0,0) and (1,1); Z = {r00 · r11 = 0} over {0,1}: 3 elements.
        let g = BipartiteGraph::from_rows(&[[1u8, 0], [0, 1]]).unwrap();
        let id = IntMatrix::identity(2).unwrap();
        let h = WitnessH::new(&g, id.entries(), 2).unwrap();
        let z: HashSet<_> = zero_set(&g, 2, 100).unwrap().collect();
        assert_eq!(z.len(), 3);
        let image: HashSet<_> = (0..h.compact_domain_size())
            .map(|i| h.apply(&h.compact_domain_element(i)).unwrap())
            .collect();
        assert_eq!(image, z);
    }

    #[test]
    fn h_on_anti_diagonal_follows_its_matching() {
        let g = BipartiteGraph::from_rows(&[[0u8, 1], [1, 1]]).unwrap();
        let w: Vec<ExactInt> = [0, 1, 1, 0].iter().map(|&x: &i64| x.into()).collect();
        let h = WitnessH::new(&g, &w, 3).unwrap();
        assert_eq!(h.sigma(), &[1, 0]);
        let z: HashSet<_> = zero_set(&g, 3, 100).unwrap().collect();
        // r01 · r10 = 0 over {0,1,2}^3: 5 · 3 = 15.
        assert_eq!(z.len(), 15);
        let image: HashSet<_> = (0..h.compact_domain_size())
            .map(|i| h.apply(&h.compact_domain_element(i)).unwrap())
            .collect();
        assert_eq!(image, z);
        for c in &z {
            assert_eq!(&h.apply(&h.preimage(c).unwrap()).unwrap(), c);
        }
    }

    #[test]
    fn h_requires_certificate() {
        let g = BipartiteGraph::complete(2).unwrap();
        let zero = vec![ExactInt::from(0); 4];
        assert_eq!(WitnessH::new(&g, &zero, 2).unwrap_err(), Error::ZeroDeterminant);
    }

    #[test]
    fn padded_lift_passes_extra_coordinate() {
        let f = WitnessF::new(2, 7).unwrap();
        let (extra, z) = f.apply_padded(1, &[1, 2, 3, 5]).unwrap();
        assert_eq!(extra, 5);
        assert_eq!(z.values(), &[1, 2, 3, 6]);
        assert!(f.apply_padded(1, &[1, 2, 3, 7]).is_err());
    }

    #[test]
    fn outputs_always_in_zero_set() {
        let g = BipartiteGraph::from_rows(&[[1u8, 1, 0], [0, 1, 1], [1, 0, 1]]).unwrap();
        let id = IntMatrix::identity(3).unwrap();
        let h = WitnessH::new(&g, id.entries(), 2).unwrap();
        for idx in 0..h.compact_domain_size() {
            assert!(in_zero_set(&g, &h.apply(&h.compact_domain_element(idx)).unwrap()));
        }
    }
}
