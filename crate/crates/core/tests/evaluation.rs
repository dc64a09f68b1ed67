mod common;

use num_traits::ToPrimitive;
use ordwalk::fgh::{a_eval, a_leq, clamp_coeffs, EvalBudget, EvalOutcome, MemoContext};
use ordwalk::ord_epsilon0::Corpus;
use ordwalk::{Nat, OrdE0};
use proptest::prelude::*;

fn eval(k: u32, xi: &OrdE0, budget: &EvalBudget) -> EvalOutcome {
    a_eval(k, xi, &mut MemoContext::new(), budget)
}

#[test]
fn memoized_matches_naive_on_small_corpus() {
    let mut compared = 0;
    for xi in Corpus::new(2, 3).enumerate() {
        for k in 2..=3 {
            if let Some(want) = common::naive_a(k, &xi, &mut 200_000, 1 << 16) {
                let got = eval(k, &xi, &EvalBudget::default()).value();
                assert_eq!(got, Some(Nat::from(want)), "A_{k}({xi})");
                compared += 1;
            }
        }
    }
    assert!(
        compared >= 15,
        "only {compared} values were small enough to compare"
    );
}

#[test]
fn known_values() {
    let w: OrdE0 = "w".parse().unwrap();
    for k in 2..=6 {
        assert_eq!(common::naive_small(k, &w), Some(u64::from(k) + 1));
    }
    assert_eq!(common::naive_small(2, &"w*2".parse().unwrap()), Some(17));
    assert_eq!(common::naive_small(3, &"w+1".parse().unwrap()), Some(7));
}

#[test]
fn cutoff_reports_instead_of_computing() {
    let big: OrdE0 = "w^(w)".parse().unwrap();
    let out = eval(2, &big, &EvalBudget::default().with_cutoff(100u32));
    assert_eq!(out, EvalOutcome::ExceedsCutoff);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn finite_arguments_are_successor(n in 0u64..1000, k in 2u32..6) {
        prop_assert_eq!(eval(k, &OrdE0::nat(n), &EvalBudget::default()).value(), Some(Nat::from(n + 1)));
    }

    #[test]
    fn a_leq_agrees_with_uncut_value(xi in common::small_ordinal(), k in 2u32..4, m in 1u64..400) {
        let full = common::naive_a(k, &xi, &mut 5_000, 1 << 12);
        let cut = a_leq(k, &xi, &Nat::from(m), &mut MemoContext::new(), &EvalBudget::calls(200_000));
        match (full, cut) {
            (Some(v), EvalOutcome::Value(got)) => {
                prop_assert!(v <= m);
                prop_assert_eq!(got.to_u64(), Some(v));
            }
            (Some(v), EvalOutcome::ExceedsCutoff) => prop_assert!(v > m),
            (None, EvalOutcome::Value(got)) => prop_assert!(false, "naive gave up but a_leq found {}", got),
            _ => {}
        }
    }

    #[test]
    fn clamp_stays_below(xi in common::small_ordinal(), c in 1u64..4) {
        let cl = clamp_coeffs(&xi, c);
        prop_assert!(cl <= xi);
        prop_assert!(cl.max_coeff() <= Nat::from(c));
    }

    #[test]
    fn majorization(a in common::small_ordinal(), b in common::small_ordinal()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assume!(lo.max_coeff() <= hi.max_coeff());
        let budget = EvalBudget::calls(200_000).with_cutoff(1u64 << 12);
        if let (EvalOutcome::Value(x), EvalOutcome::Value(y)) = (eval(2, &lo, &budget), eval(2, &hi, &budget)) {
            prop_assert!(x <= y, "A({lo}) = {x} > A({hi}) = {y}");
        }
    }
}
