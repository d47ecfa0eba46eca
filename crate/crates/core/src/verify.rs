//! Exhaustive and seeded randomized verification suites.
//!
//! Each suite is a list of [`Check`]s; every check is tied to one numbered
//! acceptance criterion and records how many cases it ran, the failures it
//! saw (with the first few counterexamples verbatim) and any surjectivity
//! reports. Randomized checks draw from ChaCha8 streams keyed by the
//! configured seed and the check id, so a report is a pure function of its
//! configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bipartite::{edmonds_eval, is_perfect_matching, matching_weight, BipartiteGraph, WeightAssignment};
use crate::classical::{hall_violator, hungarian_max_weight, maximum_matching, mwpm, neighborhood};
use crate::edmonds::{extract_pm, lovasz_trial};
use crate::error::Result;
use crate::exact_linear::{det_berkowitz, det_cofactor, det_lagrange, ExactInt, IntMatrix};
use crate::isolation::{bad_set, isolation_failure_fraction, is_bad, PhiWitness};
use crate::mvv::{build_power_matrix, edge_in_unique_min_pm, extract_pm_weight_bounded, min_weight_via_numz, mvv_find_pm};
use crate::oracle::{
    brute_hall_violation, brute_max_matching_size, brute_max_weight_matching, brute_min_weight_pms,
    check_surjection_indexed, domain_size, enumerate_perfect_matchings, ensure_budget, SurjectivityReport,
    DEFAULT_BUDGET,
};
use crate::sz_witness::{zero_set, WitnessF, WitnessH};

/// Counterexamples kept per check; the failure count is always exact.
pub const MAX_COUNTEREXAMPLES: usize = 10;

pub const DEFAULT_SEED: u64 = 0x00C0_FFEE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub max_n: usize,
    pub max_s: u64,
    pub max_k: u64,
    pub budget: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            max_n: 6,
            max_s: 4,
            max_k: 8,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Det,
    Sz,
    Iso,
    Mvv,
    Classical,
    All,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Det, Suite::Sz, Suite::Iso, Suite::Mvv, Suite::Classical, Suite::All];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Det => "det",
            Suite::Sz => "sz",
            Suite::Iso => "iso",
            Suite::Mvv => "mvv",
            Suite::Classical => "classical",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected det, sz, iso, mvv, classical or all)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledSurjectivity {
    pub label: String,
    pub report: SurjectivityReport<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub criterion: u8,
    pub description: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    pub counterexamples: Vec<Value>,
    pub surjectivity: Vec<LabeledSurjectivity>,
    pub metrics: BTreeMap<String, Value>,
}

impl Check {
    fn new(id: &str, criterion: u8, description: &str) -> Self {
        Self {
            id: id.into(),
            criterion,
            description: description.into(),
            passed: true,
            cases: 0,
            failures: 0,
            counterexamples: Vec::new(),
            surjectivity: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    fn case(&mut self, ok: bool, counterexample: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok {
            self.fail(counterexample());
        }
    }

    fn fail(&mut self, counterexample: Value) {
        self.passed = false;
        self.failures += 1;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(counterexample);
        }
    }

    fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics.insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    fn surjection<T: Serialize>(&mut self, label: String, report: SurjectivityReport<T>) {
        let ok = report.is_surjective() && report.is_closed();
        let report = SurjectivityReport {
            domain_size: report.domain_size,
            target_size: report.target_size,
            covered_count: report.covered_count,
            uncovered: report
                .uncovered
                .iter()
                .map(|t| serde_json::to_value(t).expect("serializable"))
                .collect(),
            stray_images: report.stray_images,
        };
        self.case(ok, || json!({ "label": label, "uncovered": report.uncovered, "stray_images": report.stray_images }));
        self.surjectivity.push(LabeledSurjectivity { label, report });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: VerifyConfig,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, config: &VerifyConfig, checks: Vec<Check>) -> Self {
        Self {
            suite,
            config: *config,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// Whether every check belonging to `criterion` passed; `None` if the
    /// report has no such check.
    pub fn criterion_passed(&self, criterion: u8) -> Option<bool> {
        let mut it = self.checks.iter().filter(|c| c.criterion == criterion).peekable();
        it.peek()?;
        Some(it.all(|c| c.passed))
    }
}

/// Seed for trial `trial` of a run seeded with `base`.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(trial);
    rng.next_u64()
}

fn stream(cfg: &VerifyConfig, id: &str) -> ChaCha8Rng {
    // FNV-1a of the check id selects the stream.
    let key = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(key);
    rng
}

fn random_graph(rng: &mut impl Rng, n: usize) -> BipartiteGraph {
    let density = rng.gen_range(0.2..0.9);
    BipartiteGraph::new(n, (0..n * n).map(|_| rng.gen_bool(density)).collect()).expect("n ≥ 1")
}

/// A random permutation's edges plus each other edge with probability `extra`.
fn graph_with_pm(rng: &mut impl Rng, n: usize, extra: f64) -> BipartiteGraph {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let edges = (0..n * n).map(|p| perm[p / n] == p % n || rng.gen_bool(extra)).collect();
    BipartiteGraph::new(n, edges).expect("n ≥ 1")
}

fn random_weights_in(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> WeightAssignment {
    WeightAssignment::new(n, (0..n * n).map(|_| rng.gen_range(lo..=hi)).collect()).expect("nonnegative")
}

fn all_graphs(n: usize) -> impl Iterator<Item = BipartiteGraph> {
    (0..1u64 << (n * n)).map(move |bits| BipartiteGraph::from_bits(n, bits).expect("n ≥ 1"))
}

fn g_json(g: &BipartiteGraph) -> Value {
    json!(g.to_string())
}

// ---------------------------------------------------------------- det

/// The determinant suite against an arbitrary implementation under test.
pub fn det_suite_with<D>(cfg: &VerifyConfig, det: D) -> Result<SuiteReport>
where
    D: Fn(&IntMatrix) -> ExactInt + Sync,
{
    let mut agree = Check::new(
        "det.agreement",
        1,
        "determinant agrees with cofactor expansion and the permutation sum",
    );
    let compare = |m: &IntMatrix, check: &mut Check| -> Result<()> {
        let (a, b, c) = (det(m), det_cofactor(m)?, det_lagrange(m)?);
        check.case(a == b && b == c, || {
            json!({ "matrix": m, "det": a.to_string(), "cofactor": b.to_string(), "lagrange": c.to_string() })
        });
        Ok(())
    };
    if cfg.max_n >= 3 {
        for bits in 0..512u32 {
            let m = IntMatrix::new(3, (0..9).map(|p| ExactInt::from((bits >> p) & 1)).collect())?;
            compare(&m, &mut agree)?;
        }
    }
    let mut rng = stream(cfg, "det.agreement");
    for n in (4..=6).filter(|&n| n <= cfg.max_n) {
        for _ in 0..200 {
            let m = IntMatrix::new(n, (0..n * n).map(|_| ExactInt::from(rng.gen_range(-9..=9i64))).collect())?;
            compare(&m, &mut agree)?;
        }
    }

    let mut perms = Check::new("det.permutation", 2, "every permutation matrix has determinant ±1");
    for n in 1..=cfg.max_n.min(6) {
        for pm in enumerate_perfect_matchings(&BipartiteGraph::complete(n)?)? {
            let p = pm.permutation_matrix().expect("total");
            let d = det(&p);
            perms.case(d == ExactInt::from(1) || d == ExactInt::from(-1), || {
                json!({ "matrix": p, "det": d.to_string() })
            });
        }
    }
    Ok(SuiteReport::new(Suite::Det, cfg, vec![agree, perms]))
}

pub fn det_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    det_suite_with(cfg, det_berkowitz)
}

// ---------------------------------------------------------------- sz

/// `(n, s)` pairs checked for the complete-graph witness.
pub const SZ_COMPLETE_CASES: [(usize, u64); 4] = [(2, 2), (2, 3), (2, 4), (3, 2)];

/// Non-complete graphs checked for the general witness.
pub fn sz_general_graphs() -> Vec<BipartiteGraph> {
    vec![
        BipartiteGraph::from_rows(&[[1u8, 0], [0, 1]]).expect("square"),
        BipartiteGraph::from_rows(&[[1u8, 0], [1, 1]]).expect("square"),
        BipartiteGraph::from_rows(&[[1u8, 1, 0], [0, 1, 1], [1, 0, 1]]).expect("square"),
    ]
}

pub fn sz_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut f_check = Check::new("sz.complete", 4, "complete-graph witness maps onto the zero set");
    for &(n, s) in SZ_COMPLETE_CASES.iter().filter(|&&(n, s)| n <= cfg.max_n && s <= cfg.max_s) {
        let g = BipartiteGraph::complete(n)?;
        let target: Vec<_> = zero_set(&g, s, cfg.budget)?.collect();
        let f = WitnessF::new(n, s)?;
        let z = target.len() as u128;
        let bound = f.domain_size();
        let report = check_surjection_indexed(bound, |i| f.domain_element(i), |x| f.apply(x), target, cfg.budget)?;
        f_check.metric(&format!("zero_set_size(n={n},s={s})"), z as u64);
        f_check.case(z <= bound, || json!({ "n": n, "s": s, "zero_set_size": z as u64, "bound": bound as u64 }));
        f_check.surjection(format!("F n={n} s={s}"), report);
    }

    let mut h_check = Check::new("sz.general", 4, "general-graph witness maps onto the zero set");
    for g in sz_general_graphs().iter().filter(|g| g.n() <= cfg.max_n) {
        let n = g.n();
        let cert = maximum_matching(g).permutation_matrix().expect("fixed graphs have perfect matchings");
        let cert = edmonds_eval(g, cert.entries())?;
        for s in (2..=3).filter(|&s| s <= cfg.max_s) {
            let h = WitnessH::new(g, cert.entries(), s)?;
            let target: Vec<_> = zero_set(g, s, cfg.budget)?.collect();
            let z = target.len() as u128;
            let edge_bound = h.compact_domain_size();
            let full_bound = (n as u128) * domain_size(s, n * n - 1);
            let report = check_surjection_indexed(
                edge_bound,
                |i| h.compact_domain_element(i),
                |x| h.apply(x),
                target,
                cfg.budget,
            )?;
            h_check.case(z <= edge_bound && edge_bound <= full_bound, || {
                json!({ "graph": g_json(g), "s": s, "zero_set_size": z as u64, "bound": edge_bound as u64 })
            });
            h_check.surjection(format!("H graph={} s={s}", g.to_string().trim().replace('\n', "/")), report);
        }
    }
    Ok(SuiteReport::new(Suite::Sz, cfg, vec![f_check, h_check]))
}

// ---------------------------------------------------------------- iso

pub const ISO_KS: [u64; 4] = [2, 3, 4, 8];

pub fn iso_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let g = BipartiteGraph::complete(2)?;
    let m = g.edge_count();
    let mut agree = Check::new("iso.oracle", 5, "bad-assignment test agrees with two-minimum enumeration");
    let mut onto = Check::new("iso.witness", 5, "isolation witness maps onto the bad set");
    let mut bound = Check::new("iso.bound", 5, "bad set is at most m·k^(m-1) and the failure fraction at most m/k");

    for k in ISO_KS.into_iter().filter(|&k| k <= cfg.max_k) {
        let total = domain_size(k, m);
        ensure_budget(total, cfg.budget)?;
        let results: Vec<(Vec<i64>, bool, bool)> = (0..total as u64)
            .into_par_iter()
            .map(|idx| {
                let vals: Vec<i64> = crate::oracle::Lexicographic::nth_element(m, 1, k, u128::from(idx))
                    .into_iter()
                    .map(|v| v as i64)
                    .collect();
                let w = WeightAssignment::from_edge_values(&g, &vals)?;
                let fast = is_bad(&g, &w, k)?;
                let slow = brute_min_weight_pms(&g, &w)?.is_some_and(|r| r.argmins.len() >= 2);
                Ok((vals, fast, slow))
            })
            .collect::<Result<_>>()?;
        for (vals, fast, slow) in results {
            agree.case(fast == slow, || json!({ "k": k, "weights": vals, "is_bad": fast, "oracle": slow }));
        }

        let target = bad_set(&g, k, cfg.budget)?;
        let phi_size = target.len() as u128;
        let Some(dummy) = target.first().cloned() else {
            onto.fail(json!({ "k": k, "error": "bad set is empty" }));
            continue;
        };
        let phi = PhiWitness::new(&g, k, dummy)?;
        let report = check_surjection_indexed(
            phi.domain_size(),
            |i| phi.domain_element(i),
            |(e, rest)| phi.apply(*e, rest),
            target,
            cfg.budget,
        )?;
        onto.surjection(format!("phi K22 k={k}"), report);

        let count = isolation_failure_fraction(&g, k, cfg.budget)?;
        bound.metric(&format!("bad(k={k})"), count.bad);
        bound.metric(&format!("total(k={k})"), count.total);
        bound.case(phi_size <= phi.domain_size() && count.within_bound(m, k) && count.bad as u128 == phi_size, || {
            json!({ "k": k, "bad": count.bad, "total": count.total, "domain": phi.domain_size() as u64 })
        });
    }
    Ok(SuiteReport::new(Suite::Iso, cfg, vec![agree, onto, bound]))
}

// ---------------------------------------------------------------- mvv

/// Graphs on which minimum-weight identification is checked exhaustively
/// over weights `0..=3`.
pub fn mvv_exhaustive_graphs() -> Vec<BipartiteGraph> {
    let rows4 = |r: [[u8; 4]; 4]| BipartiteGraph::from_rows(&r).expect("square");
    vec![
        BipartiteGraph::complete(2).expect("n ≥ 1"),
        BipartiteGraph::from_rows(&[[1u8, 1, 0], [0, 1, 1], [1, 1, 1]]).expect("square"),
        rows4([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1], [1, 0, 0, 1]]),
        rows4([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]),
        rows4([[1, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 1]]),
    ]
}

/// Graphs with perfect matchings used for the end-to-end success rate.
pub fn mvv_success_graphs() -> Vec<BipartiteGraph> {
    let circulant = |n: usize, offsets: &[usize]| {
        BipartiteGraph::new(n, (0..n * n).map(|p| offsets.contains(&((p % n + n - p / n) % n))).collect())
            .expect("n ≥ 1")
    };
    vec![
        BipartiteGraph::complete(4).expect("n ≥ 1"),
        circulant(5, &[0, 1, 3]),
        circulant(6, &[0, 1, 2, 4]),
    ]
}

/// Graphs without perfect matchings.
pub fn mvv_failure_graphs() -> Vec<BipartiteGraph> {
    vec![
        BipartiteGraph::from_rows(&[[1u8, 1, 1], [0, 0, 1], [0, 0, 1]]).expect("square"),
        BipartiteGraph::new(5, (0..25).map(|p| p / 5 >= 3 || p % 5 < 2).collect()).expect("n ≥ 1"),
    ]
}

pub const MVV_TRIALS: u64 = 1000;
pub const MVV_MIN_SUCCESS: f64 = 0.45;

struct MinWeightCase {
    unique: bool,
    numz_ok: bool,
    members_ok: bool,
}

fn min_weight_case(g: &BipartiteGraph, w: &WeightAssignment) -> Result<MinWeightCase> {
    let Some(best) = brute_min_weight_pms(g, w)? else {
        return Ok(MinWeightCase { unique: false, numz_ok: true, members_ok: true });
    };
    let Some(u) = best.unique() else {
        return Ok(MinWeightCase { unique: false, numz_ok: true, members_ok: true });
    };
    let b = build_power_matrix(g, w)?;
    let numz_ok = min_weight_via_numz(&b).ok() == Some(best.weight as u64);
    let mut members_ok = numz_ok;
    if numz_ok {
        for (i, j) in g.edges() {
            members_ok &= edge_in_unique_min_pm(g, &b, i, j)? == u.contains(i, j);
        }
    }
    Ok(MinWeightCase { unique: true, numz_ok, members_ok })
}

pub fn mvv_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut weight = Check::new("mvv.min_weight", 8, "trailing zeros of the determinant give the unique minimum weight");
    let mut member = Check::new("mvv.membership", 9, "minor test identifies the edges of the unique minimum matching");

    let mut instances: Vec<(BipartiteGraph, WeightAssignment)> = Vec::new();
    let mut exhaustive_total = 0u128;
    for g in mvv_exhaustive_graphs().into_iter().filter(|g| g.n() <= cfg.max_n.min(4)) {
        let m = g.edge_count();
        let total = domain_size(4, m);
        exhaustive_total += total;
        ensure_budget(exhaustive_total, cfg.budget)?;
        for idx in 0..total {
            let vals: Vec<i64> = crate::oracle::Lexicographic::nth_element(m, 0, 4, idx)
                .into_iter()
                .map(|v| v as i64)
                .collect();
            instances.push((g.clone(), WeightAssignment::from_edge_values(&g, &vals)?));
        }
    }
    if cfg.max_n >= 5 {
        let mut rng = stream(cfg, "mvv.min_weight");
        for _ in 0..300 {
            let g = graph_with_pm(&mut rng, 5, 0.3);
            let w = random_weights_in(&mut rng, 5, 0, 6);
            instances.push((g, w));
        }
    }
    let results: Vec<MinWeightCase> = instances.par_iter().map(|(g, w)| min_weight_case(g, w)).collect::<Result<_>>()?;
    let mut unique = 0u64;
    for ((g, w), r) in instances.iter().zip(results) {
        if !r.unique {
            continue;
        }
        unique += 1;
        weight.case(r.numz_ok, || json!({ "graph": g_json(g), "weights": w }));
        member.case(r.members_ok, || json!({ "graph": g_json(g), "weights": w }));
    }
    weight.metric("instances", instances.len());
    weight.metric("unique_instances", unique);

    let mut bounded = Check::new("mvv.weight_bounded", 10, "extracted matching weighs at most numz(det b)");
    let mut rng = stream(cfg, "mvv.weight_bounded");
    let mut attempts = 0u64;
    while bounded.cases < 300 && attempts < 100_000 {
        attempts += 1;
        let n = rng.gen_range(1..=cfg.max_n.clamp(1, 5));
        let g = random_graph(&mut rng, n);
        let w = random_weights_in(&mut rng, n, 0, 6);
        let b = build_power_matrix(&g, &w)?;
        let Some(p) = b.p() else { continue };
        let m = extract_pm_weight_bounded(&g, &b)?;
        bounded.case(is_perfect_matching(&g, &m) && matching_weight(&m, &w) as u64 <= p, || {
            json!({ "graph": g_json(&g), "weights": w, "p": p, "matching": m })
        });
    }
    if bounded.cases < 300 {
        bounded.fail(json!({ "error": "not enough nonsingular instances", "found": bounded.cases }));
    }

    let mut rate = Check::new("mvv.success_rate", 11, "randomized finder succeeds in at least 45% of trials");
    let mut run = |g: &BipartiteGraph, label: &str| -> u64 {
        let seeds: Vec<u64> = (0..MVV_TRIALS).map(|t| trial_seed(cfg.seed, t)).collect();
        let wins: u64 = seeds.par_iter().map(|&s| u64::from(mvv_find_pm(g, s).is_ok())).sum();
        rate.metric(&format!("successes[{label}]"), wins);
        wins
    };
    let mut outcomes = Vec::new();
    for g in mvv_success_graphs().into_iter().filter(|g| g.n() <= cfg.max_n) {
        let label = format!("n={} m={}", g.n(), g.edge_count());
        outcomes.push((g.clone(), true, run(&g, &label)));
    }
    for g in mvv_failure_graphs().into_iter().filter(|g| g.n() <= cfg.max_n) {
        let label = format!("no-pm n={} m={}", g.n(), g.edge_count());
        outcomes.push((g.clone(), false, run(&g, &label)));
    }
    for (g, has_pm, wins) in outcomes {
        let ok = if has_pm {
            wins as f64 >= MVV_MIN_SUCCESS * MVV_TRIALS as f64
        } else {
            wins == 0
        };
        rate.case(ok, || json!({ "graph": g_json(&g), "successes": wins, "trials": MVV_TRIALS }));
    }

    Ok(SuiteReport::new(Suite::Mvv, cfg, vec![weight, member, bounded, rate]))
}

// ---------------------------------------------------------------- classical

fn edmonds_case(g: &BipartiteGraph, seed: u64, check: &mut Check) -> Result<()> {
    let mm = maximum_matching(g);
    let has_pm = !enumerate_perfect_matchings(g)?.is_empty();
    let trial = lovasz_trial(g, seed);
    let mut ok = mm.is_total() == has_pm;
    if let Some(p) = mm.permutation_matrix().filter(|_| mm.is_total()) {
        let a = edmonds_eval(g, p.entries())?;
        ok &= det_berkowitz(&a) != ExactInt::from(0);
        ok &= extract_pm(g, &a).is_ok_and(|x| is_perfect_matching(g, &x));
    } else {
        ok &= !trial.accepts();
    }
    if trial.accepts() {
        ok &= extract_pm(g, &trial.evaluation).is_ok_and(|x| is_perfect_matching(g, &x));
    }
    check.case(ok, || json!({ "graph": g_json(g), "found": mm, "oracle_has_pm": has_pm }));
    Ok(())
}

pub fn classical_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut edmonds = Check::new(
        "classical.edmonds",
        3,
        "a perfect matching exists iff its permutation evaluation is nonsingular, and extraction returns one",
    );
    let mut rng = stream(cfg, "classical.edmonds");
    if cfg.max_n >= 3 {
        for g in all_graphs(3) {
            edmonds_case(&g, rng.next_u64(), &mut edmonds)?;
        }
    }
    let sizes: Vec<usize> = [4, 5].into_iter().filter(|&n| n <= cfg.max_n).collect();
    if !sizes.is_empty() {
        for _ in 0..500 {
            let n = sizes[rng.gen_range(0..sizes.len())];
            let g = random_graph(&mut rng, n);
            edmonds_case(&g, rng.next_u64(), &mut edmonds)?;
        }
    }

    let mut hungarian = Check::new(
        "classical.hungarian",
        6,
        "Hungarian matching weight equals its cover cost and the brute-force maximum",
    );
    let mut rng = stream(cfg, "classical.hungarian");
    for _ in 0..500 {
        let n = rng.gen_range(1..=cfg.max_n.clamp(1, 5));
        let w: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..=10)).collect();
        let h = hungarian_max_weight(n, &w)?;
        let best = brute_max_weight_matching(n, &w)?;
        let got = h.weight(&w);
        hungarian.case(got == h.cover.cost() && h.cover.is_cover(&w) && got == best, || {
            json!({ "n": n, "weights": w, "matching": h.matching, "cover": { "u": h.cover.u, "v": h.cover.v }, "oracle": best })
        });
    }

    let mut minw = Check::new("classical.mwpm", 7, "minimum-weight perfect matching agrees with enumeration");
    let mut rng = stream(cfg, "classical.mwpm");
    for _ in 0..500 {
        let n = rng.gen_range(1..=cfg.max_n.clamp(1, 5));
        let g = random_graph(&mut rng, n);
        let w = random_weights_in(&mut rng, n, 0, 10);
        let got = mwpm(&g, &w)?;
        let oracle = brute_min_weight_pms(&g, &w)?;
        let ok = match (&got, &oracle) {
            (None, None) => true,
            (Some(m), Some(o)) => is_perfect_matching(&g, m) && matching_weight(m, &w) == o.weight,
            _ => false,
        };
        minw.case(ok, || json!({ "graph": g_json(&g), "weights": w, "found": got, "oracle": oracle.map(|o| o.weight) }));
    }

    let mut berge = Check::new("classical.max_matching", 12, "augmenting-path maximum matching has brute-force size");
    let mut hall = Check::new("classical.hall_violator", 12, "Hall violator S satisfies |S| > |N(S)|");
    let mut hall_eq = Check::new("classical.hall_equivalence", 12, "Hall's condition holds iff a perfect matching exists");
    let one = |g: &BipartiteGraph, berge: &mut Check, hall: &mut Check| -> Result<()> {
        let mm = maximum_matching(g);
        let brute = brute_max_matching_size(g)?;
        berge.case(mm.len() == brute, || json!({ "graph": g_json(g), "found": mm.len(), "oracle": brute }));
        if brute < g.n() {
            let s = hall_violator(g)?;
            let nb = neighborhood(g, &s);
            hall.case(s.len() > nb.len(), || json!({ "graph": g_json(g), "S": s, "N(S)": nb }));
        }
        Ok(())
    };
    let hall_case = |g: &BipartiteGraph, check: &mut Check| -> Result<()> {
        let holds = brute_hall_violation(g).is_none();
        let has_pm = !enumerate_perfect_matchings(g)?.is_empty();
        check.case(holds == has_pm, || json!({ "graph": g_json(g), "hall": holds, "has_pm": has_pm }));
        Ok(())
    };
    if cfg.max_n >= 3 {
        for g in all_graphs(3) {
            one(&g, &mut berge, &mut hall)?;
            hall_case(&g, &mut hall_eq)?;
        }
    }
    let mut rng = stream(cfg, "classical.max_matching");
    let sizes: Vec<usize> = [4, 5, 6].into_iter().filter(|&n| n <= cfg.max_n).collect();
    if !sizes.is_empty() {
        for _ in 0..500 {
            let n = sizes[rng.gen_range(0..sizes.len())];
            let g = random_graph(&mut rng, n);
            one(&g, &mut berge, &mut hall)?;
        }
    }
    if cfg.max_n >= 4 {
        let mut rng = stream(cfg, "classical.hall_equivalence");
        for _ in 0..200 {
            hall_case(&random_graph(&mut rng, 4), &mut hall_eq)?;
        }
    }

    Ok(SuiteReport::new(Suite::Classical, cfg, vec![edmonds, hungarian, minw, berge, hall, hall_eq]))
}

// ---------------------------------------------------------------- dispatch

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    match suite {
        Suite::Det => det_suite(cfg),
        Suite::Sz => sz_suite(cfg),
        Suite::Iso => iso_suite(cfg),
        Suite::Mvv => mvv_suite(cfg),
        Suite::Classical => classical_suite(cfg),
        Suite::All => {
            let mut checks = Vec::new();
            for s in [Suite::Det, Suite::Classical, Suite::Sz, Suite::Iso, Suite::Mvv] {
                checks.extend(run_suite(s, cfg)?.checks);
            }
            checks.sort_by_key(|c| c.criterion);
            Ok(SuiteReport::new(Suite::All, cfg, checks))
        }
    }
}

/// Human-readable summary, one line per check.
pub fn render_text(report: &SuiteReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        out.push_str(&format!(
            "[{}] #{:<2} {:<28} {} cases, {} failures  {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.criterion,
            c.id,
            c.cases,
            c.failures,
            c.description
        ));
        for s in &c.surjectivity {
            out.push_str(&format!(
                "       {}: {}/{} covered from {} inputs{}\n",
                s.label,
                s.report.covered_count,
                s.report.target_size,
                s.report.domain_size,
                if s.report.stray_images > 0 {
                    format!(", {} stray", s.report.stray_images)
                } else {
                    String::new()
                }
            ));
        }
        for ce in &c.counterexamples {
            out.push_str(&format!("       counterexample: {ce}\n"));
        }
    }
    out.push_str(&format!(
        "suite {}: {}\n",
        report.suite,
        if report.passed { "PASS" } else { "FAIL" }
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn small() -> VerifyConfig {
        VerifyConfig {
            max_n: 3,
            max_s: 2,
            max_k: 3,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn trial_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|t| trial_seed(7, t)).collect();
        let b: Vec<u64> = (0..100).map(|t| trial_seed(7, t)).collect();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 100);
    }

    #[test]
    fn det_suite_passes_and_catches_a_bug() {
        let cfg = small();
        let ok = det_suite(&cfg).unwrap();
        assert!(ok.passed);
        assert_eq!(ok.checks[0].cases, 512);

        // Wrong sign on odd-dimensional inputs with a nonzero corner.
        let buggy = |m: &IntMatrix| {
            let d = det_berkowitz(m);
            if m.dim() == 3 && m.get(0, 2) != &ExactInt::from(0) {
                -d
            } else {
                d
            }
        };
        let bad = det_suite_with(&cfg, buggy).unwrap();
        assert!(!bad.passed);
        let agree = &bad.checks[0];
        assert!(agree.failures > 0);
        assert!(!agree.counterexamples.is_empty());
        assert!(agree.counterexamples[0].get("matrix").is_some());
    }

    #[test]
    fn small_suites_pass() {
        let cfg = small();
        for s in [Suite::Sz, Suite::Iso, Suite::Classical] {
            let r = run_suite(s, &cfg).unwrap();
            assert!(r.passed, "{}", render_text(&r));
        }
    }

    #[test]
    fn budget_is_reported() {
        let cfg = VerifyConfig { budget: 10, ..small() };
        assert!(matches!(run_suite(Suite::Sz, &cfg), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = small();
        let a = serde_json::to_string(&run_suite(Suite::Classical, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(Suite::Classical, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
