//! Budgeted, memoized evaluation of the fast-growing functions `A_k` for finite `k ≥ 2`.
//!
//! Every value produced while evaluating `A_k(ξ)` is at most `A_k(ξ)`: the
//! iterates `A^{(i)}(ξ)` increase with `i`, `A(ξ−1) < A(ξ)`, and the starting
//! value `mc(α)` is below `A(ξ−1)`. Aborting as soon as any intermediate value
//! passes a cutoff is therefore sound, which is what makes [`a_leq`] cheap.

use std::collections::HashMap;

use num_traits::{ToPrimitive, Zero};

use crate::ord_epsilon0::{Nat, OrdE0};

pub const DEFAULT_MAX_CALLS: u64 = 1_000_000;

/// Nesting limit for one evaluation; deeper descents are reported as budget exhaustion.
pub const MAX_DEPTH: u32 = 600;

/// Limits for one evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalBudget {
    pub max_recursive_calls: u64,
    pub value_cutoff: Option<Nat>,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget {
            max_recursive_calls: DEFAULT_MAX_CALLS,
            value_cutoff: None,
        }
    }
}

impl EvalBudget {
    pub fn calls(max: u64) -> Self {
        EvalBudget {
            max_recursive_calls: max.max(1),
            value_cutoff: None,
        }
    }

    pub fn with_cutoff(mut self, m: impl Into<Nat>) -> Self {
        self.value_cutoff = Some(m.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOutcome {
    Value(Nat),
    ExceedsCutoff,
    BudgetExhausted,
}

impl EvalOutcome {
    pub fn value(self) -> Option<Nat> {
        match self {
            EvalOutcome::Value(v) => Some(v),
            _ => None,
        }
    }
}

/// Why an evaluation stopped early.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    Cutoff,
    Budget,
}

impl From<Stop> for EvalOutcome {
    fn from(s: Stop) -> Self {
        match s {
            Stop::Cutoff => EvalOutcome::ExceedsCutoff,
            Stop::Budget => EvalOutcome::BudgetExhausted,
        }
    }
}

impl From<Result<Nat, Stop>> for EvalOutcome {
    fn from(r: Result<Nat, Stop>) -> Self {
        match r {
            Ok(v) => EvalOutcome::Value(v),
            Err(s) => s.into(),
        }
    }
}

/// Memo table keyed by `(k, ξ)`, plus a running call counter.
#[derive(Default, Debug)]
pub struct MemoContext {
    values: HashMap<(u32, OrdE0), Nat>,
    /// Largest cutoff known to be exceeded by `A_k(ξ)`.
    exceeded: HashMap<(u32, OrdE0), Nat>,
    pub calls: u64,
    trace: Option<Vec<Nat>>,
}

impl MemoContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts recording every value computed (memo hits included).
    pub fn record_values(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn take_recorded(&mut self) -> Vec<Nat> {
        self.trace.take().unwrap_or_default()
    }

    pub fn cached(&self, k: u32, xi: &OrdE0) -> Option<&Nat> {
        self.values.get(&(k, xi.clone()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One top-level evaluation: fixed `k`, call ceiling and cutoff.
pub(crate) struct Eval<'a> {
    pub(crate) ctx: &'a mut MemoContext,
    k: u32,
    call_limit: u64,
    cutoff: Option<Nat>,
    depth: u32,
}

impl<'a> Eval<'a> {
    pub(crate) fn new(k: u32, ctx: &'a mut MemoContext, budget: &EvalBudget) -> Self {
        assert!(k >= 2, "A_k needs k ≥ 2");
        let call_limit = ctx.calls.saturating_add(budget.max_recursive_calls);
        Eval {
            ctx,
            k,
            call_limit,
            cutoff: budget.value_cutoff.clone(),
            depth: 0,
        }
    }

    fn tick(&mut self) -> Result<(), Stop> {
        self.ctx.calls += 1;
        if self.ctx.calls > self.call_limit {
            Err(Stop::Budget)
        } else {
            Ok(())
        }
    }

    fn check(&mut self, v: Nat) -> Result<Nat, Stop> {
        if let Some(t) = self.ctx.trace.as_mut() {
            t.push(v.clone());
        }
        match &self.cutoff {
            Some(c) if &v > c => Err(Stop::Cutoff),
            _ => Ok(v),
        }
    }

    pub(crate) fn eval(&mut self, xi: &OrdE0) -> Result<Nat, Stop> {
        if self.depth >= MAX_DEPTH {
            return Err(Stop::Budget);
        }
        self.depth += 1;
        let r = self.eval_nested(xi);
        self.depth -= 1;
        r
    }

    fn eval_nested(&mut self, xi: &OrdE0) -> Result<Nat, Stop> {
        self.tick()?;
        if let Some(n) = xi.as_nat() {
            return self.check(n + 1u32);
        }
        let key = (self.k, xi.clone());
        if let Some(v) = self.ctx.values.get(&key) {
            let v = v.clone();
            return self.check(v);
        }
        if let (Some(c), Some(e)) = (&self.cutoff, self.ctx.exceeded.get(&key)) {
            if c <= e {
                return Err(Stop::Cutoff);
            }
        }
        let r = self.clamps_fit(xi).and_then(|()| self.eval_uncached(xi));
        match (&r, &self.cutoff) {
            (Err(Stop::Cutoff), Some(c)) => {
                let slot = self.ctx.exceeded.entry(key).or_default();
                if *slot < *c {
                    *slot = c.clone();
                }
            }
            (Ok(v), _) => {
                self.ctx.values.insert(key, v.clone());
            }
            _ => {}
        }
        r
    }

    /// Under a cutoff, evaluates the clamps `ξ↓1, ξ↓2, ξ↓4, …` of an infinite `ξ` first.
    /// Each is at most `ξ` with no larger coefficients, so by majorization an exceeding
    /// clamp settles the answer. Without this, a large coefficient on a deep ordinal
    /// recurses through an enormous descent before any value appears.
    fn clamps_fit(&mut self, xi: &OrdE0) -> Result<(), Stop> {
        if self.cutoff.is_none() || xi.is_finite() {
            return Ok(());
        }
        let top = xi.max_coeff().to_u64().unwrap_or(u64::MAX);
        let mut c = 1u64;
        while c < top {
            let clamped = clamp_coeffs(xi, c);
            if clamped == *xi {
                break;
            }
            if !clamped.is_finite() {
                self.eval(&clamped)?;
            }
            c = c.saturating_mul(2).min(top);
        }
        Ok(())
    }

    /// Climbs `α, α+1, …, α+b` so the successor chain does not nest recursion.
    fn eval_uncached(&mut self, xi: &OrdE0) -> Result<Nat, Stop> {
        let (alpha, b) = xi.split_finite();
        let mut prev = self.check(alpha.max_coeff())?;
        let mut j = Nat::zero();
        loop {
            let x = alpha.add(&OrdE0::nat(j.clone()));
            let cached = if j.is_zero() {
                None
            } else {
                self.ctx.values.get(&(self.k, x.clone())).cloned()
            };
            let v = match cached {
                Some(v) => v,
                None => {
                    self.tick()?;
                    let v = self.iterate(&alpha, prev, self.k)?;
                    self.ctx.values.insert((self.k, x), v.clone());
                    v
                }
            };
            if j == b {
                return Ok(v);
            }
            prev = v;
            j += 1u32;
        }
    }

    /// `A^{(i)}` from a given `A^{(0)}`.
    pub(crate) fn iterate(&mut self, alpha: &OrdE0, start: Nat, i: u32) -> Result<Nat, Stop> {
        let mut v = start;
        for _ in 0..i {
            v = self.eval(&alpha.fund_seq(&v))?;
        }
        Ok(v)
    }

    /// `A(ξ−1)`, reading `A(α−1)` as `mc(α)` for zero or limit `α`.
    pub(crate) fn pred(&mut self, xi: &OrdE0) -> Result<Nat, Stop> {
        match xi.pred() {
            Some(p) => self.eval(&p),
            None => self.check(xi.max_coeff()),
        }
    }
}

fn outcome(r: Result<Nat, Stop>) -> EvalOutcome {
    r.into()
}

/// `A_k(ξ−1)`.
pub fn a_pred(k: u32, xi: &OrdE0, ctx: &mut MemoContext, budget: &EvalBudget) -> EvalOutcome {
    outcome(Eval::new(k, ctx, budget).pred(xi))
}

/// `A_k^{(i)}(ξ)` for infinite `ξ`.
pub fn a_iter(
    k: u32,
    i: u32,
    xi: &OrdE0,
    ctx: &mut MemoContext,
    budget: &EvalBudget,
) -> EvalOutcome {
    assert!(!xi.is_finite(), "iterates are defined for ξ ≥ ω");
    let (alpha, _) = xi.split_finite();
    let mut ev = Eval::new(k, ctx, budget);
    outcome(ev.pred(xi).and_then(|p| ev.iterate(&alpha, p, i)))
}

/// `A_k(ξ)`.
pub fn a_eval(k: u32, xi: &OrdE0, ctx: &mut MemoContext, budget: &EvalBudget) -> EvalOutcome {
    outcome(Eval::new(k, ctx, budget).eval(xi))
}

/// `⌊ξ⌋_k = α[A^{(k−1)}(ξ)]` for infinite `ξ = α + b`.
pub fn floor_k(
    k: u32,
    xi: &OrdE0,
    ctx: &mut MemoContext,
    budget: &EvalBudget,
) -> Result<OrdE0, Stop> {
    assert!(!xi.is_finite(), "⌊ξ⌋_k is defined for ξ ≥ ω");
    let (alpha, _) = xi.split_finite();
    let mut ev = Eval::new(k, ctx, budget);
    let p = ev.pred(xi)?;
    let t = ev.iterate(&alpha, p, k - 1)?;
    Ok(alpha.fund_seq(&t))
}

/// Exact `A_k(ξ)` when it is at most `m`, otherwise `ExceedsCutoff`.
pub fn a_leq(
    k: u32,
    xi: &OrdE0,
    m: &Nat,
    ctx: &mut MemoContext,
    budget: &EvalBudget,
) -> EvalOutcome {
    let b = EvalBudget {
        max_recursive_calls: budget.max_recursive_calls,
        value_cutoff: Some(match &budget.value_cutoff {
            Some(c) => c.min(m).clone(),
            None => m.clone(),
        }),
    };
    a_eval(k, xi, ctx, &b)
}

/// `ξ` with every coefficient, at every depth, lowered to at most `c`. A monomial
/// whose clamped exponent would no longer decrease ends the sum, so the result stays
/// a normal form below or equal to `ξ`.
pub fn clamp_coeffs(xi: &OrdE0, c: u64) -> OrdE0 {
    let cap = Nat::from(c);
    let mut out = OrdE0::zero();
    let mut last: Option<OrdE0> = None;
    for m in xi.monos() {
        let e = clamp_coeffs(&m.exp, c);
        if last.as_ref().is_some_and(|l| &e >= l) {
            break;
        }
        out = out.add(&OrdE0::monomial(
            e.clone(),
            m.coeff.clone().min(cap.clone()),
        ));
        last = Some(e);
    }
    out
}

/// Convenience: `A_k(ξ)` as `u64` under the default budget, if it fits.
pub fn a_small(k: u32, xi: &OrdE0) -> Option<u64> {
    let mut ctx = MemoContext::new();
    a_eval(k, xi, &mut ctx, &EvalBudget::default())
        .value()
        .and_then(|v| v.to_u64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> OrdE0 {
        s.parse().unwrap()
    }

    fn nat(v: u64) -> Nat {
        Nat::from(v)
    }

    fn val(k: u32, s: &str) -> u64 {
        a_small(k, &o(s)).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(val(2, "0"), 1);
        assert_eq!(val(2, "w"), 3);
        for k in 2..=5 {
            assert_eq!(val(k, "w"), k as u64 + 1);
        }
        assert_eq!(val(2, "w+1"), 5);
        assert_eq!(val(2, "w+2"), 7);
        assert_eq!(val(2, "w*2"), 17);
    }

    #[test]
    fn predecessor_convention() {
        let b = EvalBudget::default();
        let mut c = MemoContext::new();
        assert_eq!(a_pred(2, &o("w"), &mut c, &b).value(), Some(nat(1)));
        assert_eq!(a_pred(2, &o("5"), &mut c, &b).value(), Some(nat(5)));
        assert_eq!(a_pred(2, &o("w+1"), &mut c, &b).value(), Some(nat(3)));
    }

    #[test]
    fn iterates_and_floor() {
        let b = EvalBudget::default();
        let mut c = MemoContext::new();
        let w2 = o("w*2");
        assert_eq!(a_iter(2, 0, &w2, &mut c, &b).value(), Some(nat(2)));
        assert_eq!(a_iter(2, 1, &w2, &mut c, &b).value(), Some(nat(7)));
        assert_eq!(a_iter(2, 2, &w2, &mut c, &b).value(), Some(nat(17)));
        assert_eq!(floor_k(2, &w2, &mut c, &b).unwrap(), o("w+7"));
        assert_eq!(floor_k(2, &o("w"), &mut c, &b).unwrap(), o("2"));
        assert_eq!(floor_k(2, &o("w^(2)"), &mut c, &b).unwrap(), o("w*17"));
    }

    #[test]
    fn cutoffs() {
        let b = EvalBudget::default();
        let mut c = MemoContext::new();
        assert_eq!(
            a_leq(2, &o("w"), &nat(3), &mut c, &b),
            EvalOutcome::Value(nat(3))
        );
        assert_eq!(
            a_leq(2, &o("w+1"), &nat(3), &mut c, &b),
            EvalOutcome::ExceedsCutoff
        );
        let mut c = MemoContext::new();
        assert_eq!(
            a_leq(2, &o("w^(w)"), &nat(4), &mut c, &b),
            EvalOutcome::ExceedsCutoff
        );
        assert!(c.calls <= 100);
    }

    #[test]
    fn budget_is_reported() {
        let mut c = MemoContext::new();
        let r = a_eval(2, &o("w^(w)"), &mut c, &EvalBudget::calls(1000));
        assert_eq!(r, EvalOutcome::BudgetExhausted);
    }
}
