//! Brute-force ground truth.
//!
//! Everything here enumerates: matchings, assignments, domains of witness
//! maps. Enumeration order is deterministic and lexicographic so reports can
//! be diffed. Work is bounded by explicit budgets; exceeding one is an error,
//! never a silent truncation.

use std::collections::HashSet;
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;

use crate::bipartite::{matching_weight, BipartiteGraph, Matching, WeightAssignment};
use crate::error::{Error, Result};

/// Default cap on the number of evaluations an exhaustive check may perform.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

pub const PM_ENUM_MAX_N: usize = 8;
pub const MATCHING_ENUM_MAX_N: usize = 6;
pub const MAX_WEIGHT_BRUTE_MAX_N: usize = 5;

pub(crate) fn ensure_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > u128::from(budget) {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// `radix^len` as u128, saturating.
pub fn domain_size(radix: u64, len: usize) -> u128 {
    let mut size: u128 = 1;
    for _ in 0..len {
        size = size.saturating_mul(u128::from(radix));
    }
    size
}

/// All sequences in `[low, low + radix)^len`, lexicographic with the first
/// position most significant.
#[derive(Debug, Clone)]
pub struct Lexicographic {
    low: u64,
    radix: u64,
    current: Option<Vec<u64>>,
}

impl Lexicographic {
    pub fn new(len: usize, low: u64, radix: u64) -> Self {
        let current = if radix == 0 && len > 0 {
            None
        } else {
            Some(vec![low; len])
        };
        Self {
            low,
            radix,
            current,
        }
    }

    /// The `index`-th element of the enumeration.
    pub fn nth_element(len: usize, low: u64, radix: u64, mut index: u128) -> Vec<u64> {
        let mut out = vec![low; len];
        for slot in out.iter_mut().rev() {
            *slot = low + (index % u128::from(radix)) as u64;
            index /= u128::from(radix);
        }
        out
    }
}

impl Iterator for Lexicographic {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked above");
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            if cur[pos] + 1 < self.low + self.radix {
                cur[pos] += 1;
                break;
            }
            cur[pos] = self.low;
        }
        Some(out)
    }
}

/// All perfect matchings of `g`, in lexicographic order of `(σ(0), σ(1), …)`.
pub fn enumerate_perfect_matchings(g: &BipartiteGraph) -> Result<Vec<Matching>> {
    let n = g.n();
    if n > PM_ENUM_MAX_N {
        return Err(Error::DimensionTooLarge {
            op: "enumerate_perfect_matchings",
            n,
            max: PM_ENUM_MAX_N,
        });
    }
    let mut out = Vec::new();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    pm_dfs(g, &mut perm, &mut used, &mut out);
    Ok(out)
}

fn pm_dfs(g: &BipartiteGraph, perm: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Matching>) {
    let row = perm.len();
    if row == g.n() {
        out.push(Matching::from_permutation(perm).expect("dfs builds a permutation"));
        return;
    }
    for j in 0..g.n() {
        if !used[j] && g.has_edge(row, j) {
            used[j] = true;
            perm.push(j);
            pm_dfs(g, perm, used, out);
            perm.pop();
            used[j] = false;
        }
    }
}

/// All matchings of `g` (including the empty one and non-perfect ones).
pub fn enumerate_matchings(g: &BipartiteGraph) -> Result<Vec<Matching>> {
    let n = g.n();
    if n > MATCHING_ENUM_MAX_N {
        return Err(Error::DimensionTooLarge {
            op: "enumerate_matchings",
            n,
            max: MATCHING_ENUM_MAX_N,
        });
    }
    let mut out = Vec::new();
    let mut current = Matching::empty(n);
    matching_dfs(g, 0, &mut current, &mut out);
    Ok(out)
}

fn matching_dfs(g: &BipartiteGraph, row: usize, current: &mut Matching, out: &mut Vec<Matching>) {
    if row == g.n() {
        out.push(current.clone());
        return;
    }
    // Row left unmatched.
    matching_dfs(g, row + 1, current, out);
    for j in 0..g.n() {
        if g.has_edge(row, j) && current.mate_of_right(j).is_none() {
            current.insert(row, j).expect("free vertices");
            matching_dfs(g, row + 1, current, out);
            current.remove_left(row);
        }
    }
}

/// Largest matching size of `g`, by enumeration.
pub fn brute_max_matching_size(g: &BipartiteGraph) -> Result<usize> {
    Ok(enumerate_matchings(g)?
        .iter()
        .map(Matching::len)
        .max()
        .unwrap_or(0))
}

/// Maximum of `w(M)` over all matchings of the complete graph `K_{n,n}`.
pub fn brute_max_weight_matching(n: usize, w: &[i64]) -> Result<i64> {
    if n > MAX_WEIGHT_BRUTE_MAX_N {
        return Err(Error::DimensionTooLarge {
            op: "brute_max_weight_matching",
            n,
            max: MAX_WEIGHT_BRUTE_MAX_N,
        });
    }
    if w.len() != n * n {
        return Err(Error::ShapeMismatch {
            expected: n * n,
            found: w.len(),
        });
    }
    fn rec(n: usize, w: &[i64], row: usize, used: &mut [bool]) -> i64 {
        if row == n {
            return 0;
        }
        let mut best = rec(n, w, row + 1, used);
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                best = best.max(w[row * n + j] + rec(n, w, row + 1, used));
                used[j] = false;
            }
        }
        best
    }
    Ok(rec(n, w, 0, &mut vec![false; n]))
}

/// Minimum perfect-matching weight with every matching attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinWeightPms {
    pub weight: i64,
    pub argmins: Vec<Matching>,
}

impl MinWeightPms {
    pub fn is_unique(&self) -> bool {
        self.argmins.len() == 1
    }

    pub fn unique(&self) -> Option<&Matching> {
        if self.is_unique() {
            self.argmins.first()
        } else {
            None
        }
    }
}

/// Minimum-weight perfect matchings of `g` under `w`; `None` when `g` has no
/// perfect matching.
pub fn brute_min_weight_pms(g: &BipartiteGraph, w: &WeightAssignment) -> Result<Option<MinWeightPms>> {
    let pms = enumerate_perfect_matchings(g)?;
    let Some(weight) = pms.iter().map(|m| matching_weight(m, w)).min() else {
        return Ok(None);
    };
    let argmins = pms
        .into_iter()
        .filter(|m| matching_weight(m, w) == weight)
        .collect();
    Ok(Some(MinWeightPms { weight, argmins }))
}

/// Hall's condition `|S| ≤ |N(S)|` checked over all `2^n` subsets of the
/// left side. Returns the first violating subset (as a bitmask) if any.
pub fn brute_hall_violation(g: &BipartiteGraph) -> Option<u32> {
    let n = g.n();
    assert!(n < 32, "subset masks are 32-bit");
    (1u32..(1 << n)).find(|&mask| {
        let mut nbrs = 0u32;
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            for j in g.neighbors(i) {
                nbrs |= 1 << j;
            }
        }
        mask.count_ones() > nbrs.count_ones()
    })
}

/// Outcome of an exhaustive surjectivity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurjectivityReport<T> {
    pub domain_size: u64,
    pub target_size: u64,
    pub covered_count: u64,
    /// Target elements with no preimage, in target order.
    pub uncovered: Vec<T>,
    /// Number of distinct images that lie outside the target.
    pub stray_images: u64,
}

impl<T> SurjectivityReport<T> {
    pub fn is_surjective(&self) -> bool {
        self.uncovered.is_empty()
    }

    /// Every image landed inside the target.
    pub fn is_closed(&self) -> bool {
        self.stray_images == 0
    }
}

/// Runs `f` over every domain element and reports which target elements
/// were hit. Budget applies to the domain and target sizes separately.
pub fn check_surjection<D, T, I, J, F>(
    domain: I,
    f: F,
    target: J,
    budget: u64,
) -> Result<SurjectivityReport<T>>
where
    I: IntoIterator<Item = D>,
    J: IntoIterator<Item = T>,
    T: Eq + Hash + Clone,
    F: Fn(&D) -> Result<T>,
{
    let target: Vec<T> = target.into_iter().collect();
    ensure_budget(target.len() as u128, budget)?;
    let mut hits: HashSet<T> = HashSet::new();
    let mut domain_size = 0u64;
    for x in domain {
        domain_size += 1;
        ensure_budget(u128::from(domain_size), budget)?;
        hits.insert(f(&x)?);
    }
    Ok(assemble(domain_size, target, hits))
}

/// Parallel [`check_surjection`] over a domain given by its size and an
/// index decoder. The index range is split across the rayon pool and the
/// per-worker hit sets are merged by union.
pub fn check_surjection_indexed<D, T, Dec, F>(
    domain_size: u128,
    decode: Dec,
    f: F,
    target: Vec<T>,
    budget: u64,
) -> Result<SurjectivityReport<T>>
where
    T: Eq + Hash + Clone + Send + Sync,
    Dec: Fn(u128) -> D + Sync,
    F: Fn(&D) -> Result<T> + Sync,
{
    ensure_budget(domain_size, budget)?;
    ensure_budget(target.len() as u128, budget)?;
    let size = domain_size as u64;
    const CHUNK: u64 = 256;
    let chunks = size.div_ceil(CHUNK);
    let hits = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = HashSet::new();
            for idx in c * CHUNK..((c + 1) * CHUNK).min(size) {
                local.insert(f(&decode(u128::from(idx)))?);
            }
            Ok(local)
        })
        .try_reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            Ok(a)
        })?;
    Ok(assemble(size, target, hits))
}

fn assemble<T: Eq + Hash + Clone>(
    domain_size: u64,
    target: Vec<T>,
    mut hits: HashSet<T>,
) -> SurjectivityReport<T> {
    let target_size = target.len() as u64;
    let mut uncovered = Vec::new();
    let mut covered = 0u64;
    for t in target {
        if hits.remove(&t) {
            covered += 1;
        } else {
            uncovered.push(t);
        }
    }
    // Whatever is left was hit but is not a target element.
    let stray = hits.len() as u64;
    SurjectivityReport {
        domain_size,
        target_size,
        covered_count: covered,
        uncovered,
        stray_images: stray,
    }
}
