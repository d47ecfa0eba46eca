//! The twelve acceptance criteria, one line each.
//!
//! Runs every verification suite at its default configuration and
//! cross-checks the recorded counts against direct enumerations written
//! here without the library.

use std::process::ExitCode;
use std::time::Instant;

use wm_core::verify::{run_suite, Check, Suite, SuiteReport, VerifyConfig};

const CRITERIA: [(u8, &str); 12] = [
    (1, "determinant oracle agreement"),
    (2, "permutation matrices have determinant +-1"),
    (3, "Edmonds equivalence and extraction"),
    (4, "zero-set witnesses are onto"),
    (5, "isolation witness and bound"),
    (6, "Hungarian optimality certificate"),
    (7, "minimum-weight perfect matching"),
    (8, "minimum weight from trailing zeros"),
    (9, "edge membership from minors"),
    (10, "weight-bounded extraction"),
    (11, "end-to-end success rate"),
    (12, "Berge and Hall"),
];

/// Assignments of a 2x2 matrix over [lo, lo + radix) satisfying `pred`.
fn count_2x2(lo: u64, radix: u64, pred: impl Fn(u64, u64, u64, u64) -> bool) -> u64 {
    let r = lo..lo + radix;
    let mut count = 0;
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    count += u64::from(pred(a, b, c, d));
                }
            }
        }
    }
    count
}

/// Singular 0/1 3x3 matrices, by the rule of Sarrus.
fn singular_3x3_binary() -> u64 {
    (0..512u32)
        .filter(|bits| {
            let x = |p: u32| i64::from((bits >> p) & 1);
            let det = x(0) * x(4) * x(8) + x(1) * x(5) * x(6) + x(2) * x(3) * x(7)
                - x(2) * x(4) * x(6)
                - x(0) * x(5) * x(7)
                - x(1) * x(3) * x(8);
            det == 0
        })
        .count() as u64
}

fn metric(check: &Check, key: &str) -> Option<u64> {
    check.metrics.get(key).and_then(|v| v.as_u64())
}

fn find<'a>(reports: &'a [SuiteReport], id: &str) -> &'a Check {
    reports
        .iter()
        .flat_map(|r| &r.checks)
        .find(|c| c.id == id)
        .unwrap_or_else(|| panic!("missing check {id}"))
}

/// Extra conditions a criterion must meet beyond its own checks passing.
fn anchors(criterion: u8, reports: &[SuiteReport]) -> Vec<String> {
    let mut problems = Vec::new();
    let mut expect = |what: &str, got: Option<u64>, want: u64| {
        if got != Some(want) {
            problems.push(format!("{what}: got {got:?}, expected {want}"));
        }
    };
    match criterion {
        1 => expect("cases", Some(find(reports, "det.agreement").cases), 512 + 3 * 200),
        2 => expect("cases", Some(find(reports, "det.permutation").cases), 1 + 2 + 6 + 24 + 120 + 720),
        3 => expect("cases", Some(find(reports, "classical.edmonds").cases), 512 + 500),
        4 => {
            let f = find(reports, "sz.complete");
            expect("|Z(2,2)|", metric(f, "zero_set_size(n=2,s=2)"), 10);
            expect("|Z(2,2)| direct", metric(f, "zero_set_size(n=2,s=2)"), count_2x2(0, 2, |a, b, c, d| a * d == b * c));
            expect("|Z(2,3)| direct", metric(f, "zero_set_size(n=2,s=3)"), count_2x2(0, 3, |a, b, c, d| a * d == b * c));
            expect("|Z(2,4)|", metric(f, "zero_set_size(n=2,s=4)"), 64);
            expect("|Z(3,2)| direct", metric(f, "zero_set_size(n=3,s=2)"), singular_3x3_binary());
            expect("F cases", Some(f.surjectivity.len() as u64), 4);
            expect("H cases", Some(find(reports, "sz.general").surjectivity.len() as u64), 6);
        }
        5 => {
            let b = find(reports, "iso.bound");
            for k in [2u64, 3, 4, 8] {
                let direct = count_2x2(1, k, |a, b, c, d| a + d == b + c);
                expect(&format!("|bad(k={k})|"), metric(b, &format!("bad(k={k})")), direct);
            }
            expect("oracle cases", Some(find(reports, "iso.oracle").cases), 16 + 81 + 256 + 4096);
        }
        6 => expect("cases", Some(find(reports, "classical.hungarian").cases), 500),
        7 => expect("cases", Some(find(reports, "classical.mwpm").cases), 500),
        8 => {
            let c = find(reports, "mvv.min_weight");
            let exhaustive = 4u64.pow(4) + 4u64.pow(7) + 3 * 4u64.pow(8);
            expect("instances", metric(c, "instances"), exhaustive + 300);
            if metric(c, "unique_instances").is_none_or(|u| u == 0) {
                problems.push("no instance with a unique minimum".into());
            }
        }
        9 => {
            let unique = metric(find(reports, "mvv.min_weight"), "unique_instances");
            expect("cases", Some(find(reports, "mvv.membership").cases), unique.unwrap_or(0));
        }
        10 => expect("cases", Some(find(reports, "mvv.weight_bounded").cases), 300),
        11 => expect("graphs", Some(find(reports, "mvv.success_rate").cases), 3 + 2),
        12 => {
            expect("max matching cases", Some(find(reports, "classical.max_matching").cases), 512 + 500);
            expect("hall equivalence cases", Some(find(reports, "classical.hall_equivalence").cases), 512 + 200);
        }
        _ => unreachable!(),
    }
    problems
}

fn main() -> ExitCode {
    let cfg = VerifyConfig::default();
    let mut reports = Vec::new();
    for suite in [Suite::Det, Suite::Classical, Suite::Sz, Suite::Iso, Suite::Mvv] {
        let start = Instant::now();
        match run_suite(suite, &cfg) {
            Ok(r) => {
                println!("suite {suite} finished in {:.1}s", start.elapsed().as_secs_f64());
                reports.push(r);
            }
            Err(e) => {
                println!("suite {suite} aborted: {e}");
                return ExitCode::FAILURE;
            }
        }
    }

    let mut all = true;
    for (n, name) in CRITERIA {
        let checks: Vec<&Check> = reports.iter().flat_map(|r| &r.checks).filter(|c| c.criterion == n).collect();
        let problems = anchors(n, &reports);
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed) && problems.is_empty();
        let cases: u64 = checks.iter().map(|c| c.cases).sum();
        println!(
            "criterion {n:>2}: {}  {name} ({cases} cases)",
            if passed { "PASS" } else { "FAIL" }
        );
        for c in &checks {
            for (k, v) in &c.metrics {
                println!("    {k} = {v}");
            }
        }
        for c in checks.iter().filter(|c| !c.passed) {
            println!("    {} failed {} of {} cases", c.id, c.failures, c.cases);
            for ce in &c.counterexamples {
                println!("      {ce}");
            }
        }
        for p in &problems {
            println!("    {p}");
        }
        all &= passed;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
