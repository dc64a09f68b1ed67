//! Base change `↑^λ_k` on numbers and ordinals, and its variant `⤳`.
//!
//! A number is bumped through its normal form, `m ≃_k A_k(ξ)` giving `↑m = A_λ(↑ξ)`;
//! an ordinal is bumped by replacing ω with `κ = λ⁺` and bumping exponents and
//! coefficients. For finite `λ` we have `κ = ω` and values are [`OrdE0`] / [`Nat`];
//! for `λ = ω` we have `κ = Ω` and values are [`OrdBH`], with `↑m = B(↑ξ)` kept symbolic.

use std::collections::HashMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::error::OrdError;
use crate::fgh::{a_eval, a_pred, EvalOutcome, MemoContext};
use crate::normal_forms::{nf_search, NfError, SearchConfig};
use crate::ord_bachmann::{b_aux0, BAtom, BMono, OrdBH};
use crate::ord_epsilon0::{Mono, Nat, OrdE0};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BumpTarget {
    Finite(u32),
    Omega,
}

impl fmt::Display for BumpTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BumpTarget::Finite(l) => write!(f, "{l}"),
            BumpTarget::Omega => f.write_str("w"),
        }
    }
}

/// A bumped number: a natural for finite targets, a countable notation for ω.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bumped {
    Nat(Nat),
    Ord(OrdBH),
}

impl Bumped {
    pub fn to_json(&self) -> Value {
        match self {
            Bumped::Nat(n) => json!({ "value": n.to_string() }),
            Bumped::Ord(o) => json!({ "ordinal": o.to_string(), "term": o.to_json() }),
        }
    }
}

impl fmt::Display for Bumped {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bumped::Nat(n) => write!(f, "{n}"),
            Bumped::Ord(o) => write!(f, "{o}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BumpError {
    #[error(transparent)]
    NormalForm(#[from] NfError),
    #[error("evaluation budget exhausted computing A_{base}({arg})")]
    Budget { base: u32, arg: String },
    #[error(transparent)]
    Ord(#[from] OrdError),
    #[error("target base {target} must exceed source base {source_base}")]
    Bases {
        source_base: u32,
        target: BumpTarget,
    },
}

/// Search configuration plus memo tables shared by all bumps of one task.
#[derive(Debug, Default)]
pub struct BumpCtx {
    pub cfg: SearchConfig,
    pub memo: MemoContext,
    nfs: HashMap<(u32, Nat), OrdE0>,
    finite: HashMap<(u32, u32, Nat), Nat>,
    omega: HashMap<(u32, Nat), OrdBH>,
}

impl BumpCtx {
    pub fn new(cfg: SearchConfig) -> Self {
        BumpCtx {
            cfg,
            ..Default::default()
        }
    }

    /// `ξ` with `m ≃_k A_k(ξ)`; `m` must be positive.
    pub fn nf(&mut self, k: u32, m: &Nat) -> Result<OrdE0, NfError> {
        if let Some(x) = self.nfs.get(&(k, m.clone())) {
            return Ok(x.clone());
        }
        let cert = nf_search(k, m, &self.cfg, &mut self.memo)?;
        let xi = cert.nf().clone();
        self.nfs.insert((k, m.clone()), xi.clone());
        Ok(xi)
    }
}

fn check_bases(k: u32, target: BumpTarget) -> Result<(), BumpError> {
    match target {
        BumpTarget::Finite(l) if l <= k => Err(BumpError::Bases {
            source_base: k,
            target,
        }),
        _ => Ok(()),
    }
}

/// `↑^λ_k m` for either kind of target.
pub fn bump(k: u32, target: BumpTarget, m: &Nat, ctx: &mut BumpCtx) -> Result<Bumped, BumpError> {
    check_bases(k, target)?;
    match target {
        BumpTarget::Finite(l) => bump_nat(k, l, m, ctx).map(Bumped::Nat),
        BumpTarget::Omega => bump_nat_omega(k, m, ctx).map(Bumped::Ord),
    }
}

/// `↑^ℓ_k m` for finite `ℓ > k`.
pub fn bump_nat(k: u32, l: u32, m: &Nat, ctx: &mut BumpCtx) -> Result<Nat, BumpError> {
    check_bases(k, BumpTarget::Finite(l))?;
    if m.is_zero() {
        return Ok(Nat::zero());
    }
    let key = (k, l, m.clone());
    if let Some(v) = ctx.finite.get(&key) {
        return Ok(v.clone());
    }
    let xi = ctx.nf(k, m)?;
    let up = bump_ord(k, l, &xi, ctx)?;
    let budget = ctx.cfg.budget.clone();
    let v = match a_eval(l, &up, &mut ctx.memo, &budget) {
        EvalOutcome::Value(v) => v,
        _ => {
            return Err(BumpError::Budget {
                base: l,
                arg: up.to_string(),
            })
        }
    };
    ctx.finite.insert(key, v.clone());
    Ok(v)
}

/// `↑^ω_k m = B(↑ξ)`.
pub fn bump_nat_omega(k: u32, m: &Nat, ctx: &mut BumpCtx) -> Result<OrdBH, BumpError> {
    if m.is_zero() {
        return Ok(OrdBH::zero());
    }
    if let Some(v) = ctx.omega.get(&(k, m.clone())) {
        return Ok(v.clone());
    }
    let xi = ctx.nf(k, m)?;
    let v = OrdBH::b(bump_ord_omega(k, &xi, ctx)?);
    ctx.omega.insert((k, m.clone()), v.clone());
    Ok(v)
}

fn coeff_atom(k: u32, b: &Nat, ctx: &mut BumpCtx) -> Result<BAtom, BumpError> {
    let c = bump_nat_omega(k, b, ctx)?;
    Ok(c.as_atom()
        .expect("bumped coefficients are positive")
        .clone())
}

/// `↑(ω^α·b + γ) = ω^{↑α}·↑b + ↑γ` for a finite target.
pub fn bump_ord(k: u32, l: u32, xi: &OrdE0, ctx: &mut BumpCtx) -> Result<OrdE0, BumpError> {
    let mut monos = Vec::with_capacity(xi.monos().len());
    for m in xi.monos() {
        monos.push(Mono {
            exp: bump_ord(k, l, &m.exp, ctx)?,
            coeff: bump_nat(k, l, &m.coeff, ctx)?,
        });
    }
    Ok(OrdE0::from_monos(monos)?)
}

/// `↑(ω^α·b + γ) = Ω^{↑α}·↑b + ↑γ` for the target ω.
pub fn bump_ord_omega(k: u32, xi: &OrdE0, ctx: &mut BumpCtx) -> Result<OrdBH, BumpError> {
    let mut monos = Vec::with_capacity(xi.monos().len());
    for m in xi.monos() {
        monos.push(BMono {
            exp: bump_ord_omega(k, &m.exp, ctx)?,
            coeff: coeff_atom(k, &m.coeff, ctx)?,
        });
    }
    Ok(OrdBH::from_monos(monos)?)
}

/// `⤳ξ` for a finite target.
pub fn squiggle(k: u32, l: u32, xi: &OrdE0, ctx: &mut BumpCtx) -> Result<OrdE0, BumpError> {
    let Some((first, rest)) = xi.monos().split_first() else {
        return Ok(OrdE0::zero());
    };
    let (alpha, b) = (&first.exp, &first.coeff);
    if !rest.is_empty() {
        let gamma = OrdE0::from_monos(rest.to_vec())?;
        let head = OrdE0::monomial(bump_ord(k, l, alpha, ctx)?, bump_nat(k, l, b, ctx)?);
        return Ok(head.add(&squiggle(k, l, &gamma, ctx)?));
    }
    if *b > Nat::from(1u32) {
        let head = OrdE0::monomial(
            bump_ord(k, l, alpha, ctx)?,
            bump_nat(k, l, &(b - 1u32), ctx)?,
        );
        let unit = OrdE0::omega_pow(alpha.clone());
        return Ok(head.add(&squiggle(k, l, &unit, ctx)?));
    }
    match alpha.pred() {
        Some(a) => Ok(OrdE0::omega_pow(bump_ord(k, l, &a, ctx)?.succ())),
        None => Ok(OrdE0::omega_pow(squiggle(k, l, alpha, ctx)?)),
    }
}

/// `⤳ξ` for the target ω.
pub fn squiggle_omega(k: u32, xi: &OrdE0, ctx: &mut BumpCtx) -> Result<OrdBH, BumpError> {
    let Some((first, rest)) = xi.monos().split_first() else {
        return Ok(OrdBH::zero());
    };
    let (alpha, b) = (&first.exp, &first.coeff);
    if !rest.is_empty() {
        let gamma = OrdE0::from_monos(rest.to_vec())?;
        let head = OrdBH::monomial(bump_ord_omega(k, alpha, ctx)?, coeff_atom(k, b, ctx)?);
        return Ok(head.add(&squiggle_omega(k, &gamma, ctx)?)?);
    }
    if *b > Nat::from(1u32) {
        let head = OrdBH::monomial(
            bump_ord_omega(k, alpha, ctx)?,
            coeff_atom(k, &(b - 1u32), ctx)?,
        );
        let unit = OrdE0::omega_pow(alpha.clone());
        return Ok(head.add(&squiggle_omega(k, &unit, ctx)?)?);
    }
    match alpha.pred() {
        Some(a) => Ok(OrdBH::omega_pow(bump_ord_omega(k, &a, ctx)?.succ())),
        None => Ok(OrdBH::omega_pow(squiggle_omega(k, alpha, ctx)?)),
    }
}

/// `B^{{0}}(↑ξ) ≤ ↑A_k(ξ−1)` with target ω.
pub fn theta_star_check(k: u32, xi: &OrdE0, ctx: &mut BumpCtx) -> Result<bool, BumpError> {
    let lhs = b_aux0(&bump_ord_omega(k, xi, ctx)?);
    let budget = ctx.cfg.budget.clone();
    let prev = match a_pred(k, xi, &mut ctx.memo, &budget) {
        EvalOutcome::Value(v) => v,
        _ => {
            return Err(BumpError::Budget {
                base: k,
                arg: format!("{xi} - 1"),
            })
        }
    };
    let rhs = bump_nat_omega(k, &prev, ctx)?;
    Ok(lhs <= rhs)
}

/// Convenience for small arguments: `↑^ℓ_k m` as `u64`.
pub fn bump_small(k: u32, l: u32, m: u64) -> Option<u64> {
    let mut ctx = BumpCtx::default();
    bump_nat(k, l, &Nat::from(m), &mut ctx).ok()?.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> OrdE0 {
        s.parse().unwrap()
    }

    fn bh(s: &str) -> OrdBH {
        s.parse().unwrap()
    }

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    #[test]
    fn finite_targets() {
        assert_eq!(bump_small(2, 3, 0), Some(0));
        assert_eq!(bump_small(2, 3, 1), Some(1));
        assert_eq!(bump_small(2, 3, 2), Some(2));
        assert_eq!(bump_small(2, 3, 3), Some(4));
        assert_eq!(bump_small(2, 3, 4), Some(5));
    }

    #[test]
    fn omega_target() {
        let mut ctx = BumpCtx::default();
        let mut up = |m: u64| bump_nat_omega(2, &n(m), &mut ctx).unwrap();
        assert_eq!(up(3), bh("B(W)"));
        assert_eq!(up(4), bh("B(B(W))"));
        assert_eq!(up(5), bh("B(W+1)"));
        assert_eq!(up(2), OrdBH::nat(2));
    }

    #[test]
    fn ordinals() {
        let mut ctx = BumpCtx::default();
        assert_eq!(bump_ord(2, 3, &o("w"), &mut ctx).unwrap(), o("w"));
        assert_eq!(bump_ord(2, 3, &o("w*3"), &mut ctx).unwrap(), o("w*4"));
        let up = bump_ord_omega(2, &o("w^(3)*2"), &mut ctx).unwrap();
        let expected = OrdBH::monomial(bh("B(W)"), OrdBH::nat(2).as_atom().unwrap().clone());
        assert_eq!(up, expected);
    }

    #[test]
    fn squiggle_examples() {
        let mut ctx = BumpCtx::default();
        assert_eq!(squiggle(2, 3, &o("w^(2)"), &mut ctx).unwrap(), o("w^(2)"));
        assert_eq!(
            squiggle(2, 3, &o("w^(w+1)"), &mut ctx).unwrap(),
            o("w^(w+1)")
        );
        assert_eq!(squiggle(2, 3, &o("w^(4)"), &mut ctx).unwrap(), o("w^(5)"));
        assert_eq!(bump_ord(2, 3, &o("w^(4)"), &mut ctx).unwrap(), o("w^(5)"));
        assert_eq!(squiggle(2, 3, &o("w*3"), &mut ctx).unwrap(), o("w*3"));
        assert_eq!(bump_ord(2, 3, &o("w*3"), &mut ctx).unwrap(), o("w*4"));
    }

    #[test]
    fn theta_star() {
        let mut ctx = BumpCtx::default();
        for x in ["w", "5", "w+1", "w*2", "0"] {
            assert!(theta_star_check(2, &o(x), &mut ctx).unwrap(), "{x}");
        }
    }

    #[test]
    fn rejects_bad_bases() {
        let mut ctx = BumpCtx::default();
        assert!(matches!(
            bump(3, BumpTarget::Finite(3), &n(2), &mut ctx),
            Err(BumpError::Bases { .. })
        ));
    }
}
