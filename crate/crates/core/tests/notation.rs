mod common;

use std::cmp::Ordering;

use ordwalk::ord_bachmann::{collapse_fs, enumerate_bh, CollapseCtx};
use ordwalk::OrdBH;
use proptest::prelude::*;

fn corpus() -> Vec<OrdBH> {
    enumerate_bh(6)
}

#[test]
fn order_matches_semantics_below_omega_squared() {
    let mut notations: Vec<OrdBH> = corpus().into_iter().filter(OrdBH::is_countable).collect();
    for m in 0..4 {
        let mut x = OrdBH::b(OrdBH::big_omega().add(&OrdBH::nat(m)).unwrap());
        for _ in 0..4 {
            notations.push(x.clone());
            x = OrdBH::b(x);
        }
    }
    notations.extend((0..6).map(OrdBH::nat));
    let known: Vec<(OrdBH, Vec<u64>)> = notations
        .into_iter()
        .filter_map(|x| common::below_omega_sq(&x).map(|v| (x, v)))
        .collect();
    assert!(
        known.len() > 20,
        "oracle covers only {} notations",
        known.len()
    );
    for (x, vx) in &known {
        for (y, vy) in &known {
            assert_eq!(
                x.cmp(y),
                common::cmp_cnf(vx, vy),
                "{x} vs {y} ({vx:?} vs {vy:?})"
            );
        }
    }
}

#[test]
fn b_of_finite_and_countable_is_successor() {
    for n in 0..20 {
        assert_eq!(OrdBH::b(OrdBH::nat(n)), OrdBH::nat(n + 1));
    }
    for x in corpus().into_iter().filter(OrdBH::is_countable) {
        assert_eq!(OrdBH::b(x.clone()), x.succ(), "B({x})");
    }
}

#[test]
fn ordering_is_strict_and_total_on_sorted_corpus() {
    let all = corpus();
    for w in all.windows(2) {
        assert_eq!(w[0].cmp(&w[1]), Ordering::Less, "{} / {}", w[0], w[1]);
        assert_eq!(w[1].cmp(&w[0]), Ordering::Greater);
    }
}

#[test]
fn collapsing_sequence_descends() {
    let mut ctx = CollapseCtx::new();
    let mut checked = 0;
    for x in corpus()
        .into_iter()
        .filter(|x| x.in_lambda() && !x.is_zero())
    {
        for n in 1..4 {
            let y = collapse_fs(&x, n, &mut ctx).unwrap();
            assert!(y < x, "[{x}]'{n} = {y}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

proptest! {
    #[test]
    fn transitivity(i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), l in any::<prop::sample::Index>()) {
        let all = corpus();
        let (a, b, c) = (i.get(&all), j.get(&all), l.get(&all));
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        prop_assert_eq!(a.cmp(b), b.cmp(a).reverse());
    }

    #[test]
    fn print_parse_and_json_round_trip(i in any::<prop::sample::Index>()) {
        let x = i.get(&corpus()).clone();
        prop_assert_eq!(x.to_string().parse::<OrdBH>().unwrap(), x.clone());
        prop_assert_eq!(OrdBH::from_json(&x.to_json()).unwrap(), x);
    }
}
