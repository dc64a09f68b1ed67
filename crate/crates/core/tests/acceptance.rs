//! Acceptance run: one line per criterion, each at its stated bound.
//!
//! Runs without the test harness so the report is always printed. The process
//! exits non-zero when a criterion fails in a way not accounted for by the
//! documented counterexamples of criterion 7.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use ordwalk::base_change::BumpCtx;
use ordwalk::fgh::{a_eval, EvalBudget, MemoContext};
use ordwalk::normal_forms::{nf_search, nf_verify, SearchConfig};
use ordwalk::ord_bachmann::f_descent;
use ordwalk::suites::{run, Bounds, Level, Suite, SuiteReport};
use ordwalk::terms_walks::{canonical_walk, descent_check, g_of};
use ordwalk::{Nat, OrdBH, OrdE0};

struct Outcome {
    passed: bool,
    detail: String,
    /// Failures fully explained by the analysis of the literal statements.
    expected_failure: bool,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
            expected_failure: false,
        }
    }
}

fn o(s: &str) -> OrdE0 {
    s.parse().unwrap()
}

fn exact_values() -> Outcome {
    let mut cases: Vec<(u32, &str, u64)> = (2..=5).map(|k| (k, "w", u64::from(k) + 1)).collect();
    cases.push((2, "w+1", 5));
    cases.push((2, "w*2", 17));
    let mut bad = Vec::new();
    for (k, x, want) in &cases {
        let got = a_eval(*k, &o(x), &mut MemoContext::new(), &EvalBudget::default())
            .value()
            .and_then(|v| v.to_u64());
        let naive = common::naive_small(*k, &o(x));
        if got != Some(*want) || naive != Some(*want) {
            bad.push(format!(
                "A_{k}({x}): memoized {got:?}, naive {naive:?}, expected {want}"
            ));
        }
    }
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} values match the naive evaluator", cases.len())
        } else {
            bad.join("; ")
        },
    )
}

fn normal_forms() -> Outcome {
    let mut bad = Vec::new();
    for m in 1..=20u64 {
        let m = Nat::from(m);
        let four = nf_search(
            2,
            &m,
            &SearchConfig::default().with_height(4),
            &mut MemoContext::new(),
        );
        let five = nf_search(
            2,
            &m,
            &SearchConfig::default().with_height(5),
            &mut MemoContext::new(),
        );
        match (four, five) {
            (Ok(a), Ok(b)) => {
                if !nf_verify(&a) {
                    bad.push(format!("{m}: certificate rejected"));
                }
                if a.sequence != b.sequence {
                    bad.push(format!("{m}: height 4 and 5 disagree"));
                }
            }
            (a, b) => bad.push(format!("{m}: {:?} / {:?}", a.err(), b.err())),
        }
    }
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            "m = 1..20 verified, stable from height 4 to 5".to_owned()
        } else {
            bad.join("; ")
        },
    )
}

fn suite_line(reports: &[SuiteReport]) -> String {
    reports
        .iter()
        .map(|r| {
            let mut s = format!("{} {}/{}", r.suite, r.checked, r.failures);
            if r.undecided > 0 {
                s.push_str(&format!(" (+{} beyond cutoff)", r.undecided));
            }
            s
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn suites_pass(reports: &[SuiteReport]) -> Outcome {
    let passed = reports.iter().all(SuiteReport::passed);
    Outcome::new(passed, format!("checked/failed: {}", suite_line(reports)))
}

fn maximality() -> Outcome {
    let mut b = Bounds::for_level(Level::Smoke);
    b.max_value = 6;
    b.max_term_size = 7;
    let max = run(Suite::Maximality, &b);
    b.max_value = 8;
    let mono = run(Suite::Monotonicity, &b);
    suites_pass(&[max, mono])
}

fn composition() -> Outcome {
    let mut b = Bounds::for_level(Level::Smoke);
    b.max_value = 6;
    suites_pass(&[run(Suite::Composition, &b)])
}

fn walks() -> Outcome {
    let mut ctx = BumpCtx::default();
    let three = canonical_walk(&Nat::from(3u32), 20, &mut ctx);
    let two = canonical_walk(&Nat::from(2u32), 20, &mut ctx);
    let nums = |t: &ordwalk::terms_walks::WalkTrace| {
        t.values()
            .iter()
            .map(|v| v.to_u64().unwrap())
            .collect::<Vec<_>>()
    };
    let chain: Vec<OrdBH> = three
        .steps
        .iter()
        .filter_map(|s| s.assigned.clone())
        .collect();
    let want_chain = vec![
        "B(W)".parse::<OrdBH>().unwrap(),
        OrdBH::nat(3),
        OrdBH::nat(2),
        OrdBH::nat(1),
        OrdBH::nat(0),
    ];
    let mut bad = Vec::new();
    if nums(&three) != [3, 3, 2, 1, 0] || !three.terminated || three.steps.len() != 5 {
        bad.push(format!("walk(3) = {:?}", nums(&three)));
    }
    if nums(&two) != [2, 1, 0] || !two.terminated {
        bad.push(format!("walk(2) = {:?}", nums(&two)));
    }
    if !descent_check(&three) || !descent_check(&two) {
        bad.push("descent check failed".to_owned());
    }
    if chain != want_chain {
        bad.push(format!("assignment chain {chain:?}"));
    }
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            "walk(3) = 3,3,2,1,0 ends at step 4; walk(2) = 2,1,0; B(W) > 3 > 2 > 1 > 0".to_owned()
        } else {
            bad.join("; ")
        },
    )
}

fn bachmann_descent() -> Outcome {
    let f: Vec<Option<u64>> = (0..=2)
        .map(|n| f_descent(n, 100).ok().and_then(|d| d.value))
        .collect();
    let mut ctx = BumpCtx::default();
    let g: Vec<Option<u64>> = (0..=1).map(|n| g_of(n, 100, &mut ctx).ok()).collect();
    let ok = f == [Some(2), Some(2), Some(3)]
        && g == [Some(2), Some(4)]
        && g.iter().zip(&f).all(|(g, f)| g >= f);
    Outcome::new(ok, format!("F(0..2) = {f:?}, G(0..1) = {g:?}"))
}

/// Suites whose literal statements have known counterexamples, with the note that
/// must report a clean restricted form.
const EXPLAINED: [(Suite, &str); 3] = [
    (Suite::OrdBch, "target ω with n ≥ mc α: "),
    (Suite::BchBigger, "2n+2 ≤ ↑n at target ω: "),
    (Suite::AOrder, "with the converse clause "),
];

fn explained(r: &SuiteReport) -> bool {
    EXPLAINED.iter().any(|(s, prefix)| {
        *s == r.suite
            && r.notes
                .iter()
                .any(|n| n.starts_with(prefix) && n.ends_with(" 0 counterexamples"))
    })
}

fn lemma_suites() -> Outcome {
    let mut reports = Vec::new();
    let e35 = Bounds::for_level(Level::Smoke).with_corpus(3, 5);
    for s in [Suite::Bachmann, Suite::FundSeq, Suite::Ceil] {
        reports.push(run(s, &e35));
    }
    let mut e34 = Bounds::for_level(Level::Full).with_corpus(3, 4);
    e34.value_cutoff = 1 << 20;
    for s in [
        Suite::BoundTwo,
        Suite::Recurs,
        Suite::Majorize,
        Suite::BetweenSlow,
        Suite::OneMore,
    ] {
        reports.push(run(s, &e34));
    }
    let e33 = Bounds::for_level(Level::Smoke).with_corpus(3, 3);
    for s in [
        Suite::OrdBch,
        Suite::BchBigger,
        Suite::SquigProp,
        Suite::UpSame,
        Suite::Reconstruct,
        Suite::ThetaStar,
    ] {
        reports.push(run(s, &e33));
    }
    let mut small = Bounds::for_level(Level::Smoke);
    small.max_value = 6;
    reports.push(run(Suite::SlowDescent, &small));
    reports.push(run(Suite::AOrder, &Bounds::for_level(Level::Full)));

    let failed: Vec<&SuiteReport> = reports.iter().filter(|r| !r.passed()).collect();
    let mut detail = format!("checked/failed: {}", suite_line(&reports));
    for r in &failed {
        detail.push_str(&format!(
            "\n      {} counterexample: {}",
            r.suite,
            r.counterexamples.first().map_or("", String::as_str)
        ));
        for n in &r.notes {
            detail.push_str(&format!("\n      {} {n}", r.suite));
        }
    }
    Outcome {
        passed: failed.is_empty(),
        detail,
        expected_failure: !failed.is_empty() && failed.iter().all(|r| explained(r)),
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("exact values", Duration::from_secs(1), exact_values),
        ("normal forms", Duration::from_secs(120), normal_forms),
        (
            "base-change maximality and monotonicity",
            Duration::from_secs(300),
            maximality,
        ),
        ("composition", Duration::from_secs(60), composition),
        ("Goodstein runs", Duration::from_secs(1), walks),
        ("Bachmann descent", Duration::from_secs(1), bachmann_descent),
        ("lemma suites", Duration::from_secs(600), lemma_suites),
    ];
    let mut unexpected = false;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let in_time = took <= *limit;
        let verdict = if out.passed && in_time {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "criterion {}: {verdict} {name} [{:.2?} of {:?}] {}",
            i + 1,
            took,
            limit,
            out.detail
        );
        if !(out.passed || out.expected_failure) || !in_time {
            unexpected = true;
        }
    }
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
