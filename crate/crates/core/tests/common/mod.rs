//! Reference implementations used only as test oracles.

#![allow(dead_code)]

use num_traits::ToPrimitive;
use ordwalk::ord_bachmann::OrdBH;
use ordwalk::OrdE0;
use proptest::prelude::*;

/// `A_k(ξ)` straight from the definition: no memo table, no cutoff, `u64` arithmetic.
/// Returns `None` once `fuel` recursive calls have been spent, the nesting gets too
/// deep, or a value passes `cap`.
pub fn naive_a(k: u32, xi: &OrdE0, fuel: &mut u64, cap: u64) -> Option<u64> {
    naive_depth(k, xi, fuel, cap, 400)
}

fn naive_depth(k: u32, xi: &OrdE0, fuel: &mut u64, cap: u64, depth: u32) -> Option<u64> {
    if *fuel == 0 || depth == 0 {
        return None;
    }
    *fuel -= 1;
    if let Some(n) = xi.as_u64() {
        return Some(n + 1).filter(|&v| v <= cap);
    }
    let (alpha, b) = xi.split_finite();
    let mut v = if b.to_u64() == Some(0) {
        xi.max_coeff().to_u64()?
    } else {
        naive_depth(k, &xi.pred().unwrap(), fuel, cap, depth - 1)?
    };
    for _ in 0..k {
        v = naive_depth(k, &alpha.fund_seq_u(v), fuel, cap, depth - 1)?;
    }
    Some(v)
}

pub fn naive_small(k: u32, xi: &OrdE0) -> Option<u64> {
    naive_a(k, xi, &mut 5_000_000, 1 << 20)
}

/// Value of a countable notation below `ω²`, as the coefficient list of
/// `ω^{d}·c_d + … + c_0` (index = exponent), by direct use of the defining property
/// of `B`: `B(ξ)` is the least `θ > mc ξ` closed under `B(ζ)` for `ζ < ξ`, `mc ζ < θ`.
///
/// Supported shapes: finite `ρ` gives `B(ρ) = ρ+1`, countable `ρ ≥ ω` gives `ρ+1`,
/// `Ω` gives `ω` and `Ω + ρ` gives `ω·(1+ρ)` for finite `ρ`.
/// Anything else returns `None`.
pub fn below_omega_sq(x: &OrdBH) -> Option<Vec<u64>> {
    if let Some(n) = x.as_finite() {
        return Some(vec![n]);
    }
    let a = x.as_atom()?;
    let arg = a.arg();
    if arg.is_countable() {
        let mut v = below_omega_sq(arg)?;
        v[0] += 1;
        return Some(v);
    }
    let (head, tail) = arg.split_tail();
    if head == OrdBH::big_omega() {
        let rho = tail.as_finite()?;
        return Some(vec![0, 1 + rho]);
    }
    None
}

/// Comparison of `below_omega_sq` values, highest exponent first.
pub fn cmp_cnf(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    let n = a.len().max(b.len());
    for i in (0..n).rev() {
        let (x, y) = (
            a.get(i).copied().unwrap_or(0),
            b.get(i).copied().unwrap_or(0),
        );
        if x != y {
            return x.cmp(&y);
        }
    }
    std::cmp::Ordering::Equal
}

/// Ordinals of height at most 3 with coefficients below 4.
pub fn small_ordinal() -> impl Strategy<Value = OrdE0> {
    let leaf = (0u64..4).prop_map(OrdE0::nat);
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop::collection::vec((inner, 1u64..4), 1..3).prop_map(|mut monos| {
            monos.sort_by(|a, b| b.0.cmp(&a.0));
            monos.dedup_by(|a, b| a.0 == b.0);
            monos
                .into_iter()
                .fold(OrdE0::zero(), |acc, (e, c)| acc.add(&OrdE0::monomial(e, c)))
        })
    })
}
