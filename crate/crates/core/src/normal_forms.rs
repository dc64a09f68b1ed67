//! Maximal k-normal forms of natural numbers.
//!
//! A number `m` has normal form `A_k(ξ_n)` where `ξ_0 = 0` and each `ξ_{i+1}` is the
//! largest `ζ` with `A_k(ζ) ≤ m` and `mc ζ ≥ A_k(ξ_i)`. The search space is finite:
//! height at most `height_bound` and coefficients below `m + extra_coeff_margin`.
//!
//! Candidates are visited in decreasing order. A whole subtree sharing a prefix is
//! skipped once the prefix already evaluates above `m`. Here a prefix drops trailing
//! monomials at any depth and may lower coefficients, so it is below every completion
//! and has no larger coefficients. For `k ≥ 2` majorization then makes its value a
//! lower bound for the whole subtree.

use std::cell::RefCell;
use std::ops::ControlFlow;

use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::error::OrdError;
use crate::fgh::{a_leq, EvalBudget, EvalOutcome, MemoContext};
use crate::ord_epsilon0::{Mono, Nat, OrdE0};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub height_bound: usize,
    pub extra_coeff_margin: u64,
    pub budget: EvalBudget,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            height_bound: 4,
            extra_coeff_margin: 0,
            budget: EvalBudget::default(),
        }
    }
}

impl SearchConfig {
    pub fn with_height(mut self, h: usize) -> Self {
        self.height_bound = h;
        self
    }

    fn coeff_cap(&self, m: &Nat) -> u64 {
        m.to_u64()
            .unwrap_or(u64::MAX)
            .saturating_sub(1)
            .saturating_add(self.extra_coeff_margin)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NfError {
    #[error("evaluation budget exhausted at {0}")]
    Budget(String),
    #[error("no normal form for {0} in the search space")]
    NoNormalForm(Nat),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A normal-form sequence together with the configuration that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NfCert {
    pub k: u32,
    pub m: Nat,
    pub sequence: Vec<OrdE0>,
    pub config: SearchConfig,
}

impl NfCert {
    /// The last element `ξ_n`, with `m = A_k(ξ_n)`.
    pub fn nf(&self) -> &OrdE0 {
        self.sequence.last().expect("a certificate is never empty")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "m": self.m.to_string(),
            "sequence": self.sequence.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "height_bound": self.config.height_bound,
            "extra_coeff_margin": self.config.extra_coeff_margin,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, OrdError> {
        let bad = |what: &str| OrdError::Json(format!("certificate: bad or missing `{what}`"));
        let k = v["k"]
            .as_u64()
            .and_then(|k| u32::try_from(k).ok())
            .ok_or_else(|| bad("k"))?;
        let m = v["m"]
            .as_str()
            .and_then(|s| s.parse::<Nat>().ok())
            .ok_or_else(|| bad("m"))?;
        let sequence = v["sequence"]
            .as_array()
            .ok_or_else(|| bad("sequence"))?
            .iter()
            .map(|x| {
                x.as_str()
                    .ok_or_else(|| bad("sequence"))?
                    .parse::<OrdE0>()
                    .map_err(|e| OrdError::Json(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if sequence.is_empty() {
            return Err(bad("sequence"));
        }
        let mut config = SearchConfig::default();
        if let Some(h) = v.get("height_bound") {
            config.height_bound = h.as_u64().ok_or_else(|| bad("height_bound"))? as usize;
        }
        if let Some(c) = v.get("extra_coeff_margin") {
            config.extra_coeff_margin = c.as_u64().ok_or_else(|| bad("extra_coeff_margin"))?;
        }
        Ok(NfCert {
            k,
            m,
            sequence,
            config,
        })
    }
}

/// `A_k(·) ≤ m` tests sharing one memo table.
struct Oracle<'a> {
    k: u32,
    m: &'a Nat,
    budget: &'a EvalBudget,
    ctx: RefCell<&'a mut MemoContext>,
}

impl<'a> Oracle<'a> {
    fn new(k: u32, m: &'a Nat, budget: &'a EvalBudget, ctx: &'a mut MemoContext) -> Self {
        Oracle {
            k,
            m,
            budget,
            ctx: RefCell::new(ctx),
        }
    }

    fn value(&self, x: &OrdE0) -> Result<Option<Nat>, NfError> {
        let mut ctx = self.ctx.borrow_mut();
        match a_leq(self.k, x, self.m, &mut ctx, self.budget) {
            EvalOutcome::Value(v) => Ok(Some(v)),
            EvalOutcome::ExceedsCutoff => Ok(None),
            EvalOutcome::BudgetExhausted => Err(NfError::Budget(x.to_string())),
        }
    }

    fn fits(&self, x: &OrdE0) -> Result<bool, NfError> {
        self.value(x).map(|v| v.is_some())
    }
}

type Flow = ControlFlow<OrdE0>;
type Fits<'f> = &'f dyn Fn(&OrdE0) -> Result<bool, NfError>;
type Visit<'f> = &'f mut dyn FnMut(&OrdE0) -> Result<Flow, NfError>;

macro_rules! forward {
    ($e:expr) => {
        if let ControlFlow::Break(x) = $e? {
            return Ok(ControlFlow::Break(x));
        }
    };
}

fn term(acc: &OrdE0, exp: &OrdE0, d: u64) -> OrdE0 {
    acc.add(&OrdE0::monomial(exp.clone(), d))
}

/// Largest `d ≤ cap` with `fits(acc + ω^exp·d)`, or 0. Fitting is downward closed in `d`.
fn max_fit(acc: &OrdE0, exp: &OrdE0, cap: u64, fits: Fits) -> Result<u64, NfError> {
    if cap == 0 || !fits(&term(acc, exp, 1))? {
        return Ok(0);
    }
    let (mut lo, mut hi) = (1u64, cap);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if fits(&term(acc, exp, mid))? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// Visits, in decreasing order, every `x` with height ≤ `h`, coefficients ≤ `cmax`,
/// `x < bound` and `fits(x)`. Zero comes last.
fn descend(
    h: usize,
    cmax: u64,
    bound: Option<&OrdE0>,
    fits: Fits,
    visit: Visit,
) -> Result<Flow, NfError> {
    let zero = OrdE0::zero();
    forward!(extend(
        &zero,
        h,
        cmax,
        bound.map(|b| b.monos()),
        None,
        fits,
        visit
    ));
    if bound.is_none_or(|b| !b.is_zero()) && fits(&zero)? {
        return visit(&zero);
    }
    Ok(ControlFlow::Continue(()))
}

/// Visits `acc + y` for nonzero `y` in decreasing order. With `tight` set, `y` stays
/// below the remaining bound monomials; otherwise its exponents stay below `last`.
fn extend(
    acc: &OrdE0,
    h: usize,
    cmax: u64,
    tight: Option<&[Mono]>,
    last: Option<&OrdE0>,
    fits: Fits,
    visit: Visit,
) -> Result<Flow, NfError> {
    if h == 0 {
        return Ok(ControlFlow::Continue(()));
    }
    let Some(bm) = tight else {
        return leading(acc, h, cmax, last, fits, visit);
    };
    let Some(first) = bm.first() else {
        return Ok(ControlFlow::Continue(()));
    };
    let fb = &first.exp;
    if fb.height() < h && fb.max_coeff() <= Nat::from(cmax) {
        let cap = first.coeff.to_u64().unwrap_or(u64::MAX).min(cmax);
        for d in (1..=max_fit(acc, fb, cap, fits)?).rev() {
            let p = term(acc, fb, d);
            let next = (first.coeff == Nat::from(d)).then(|| &bm[1..]);
            forward!(extend(&p, h, cmax, next, Some(fb), fits, visit));
            if next.is_none_or(|t| !t.is_empty()) {
                forward!(visit(&p));
            }
        }
    }
    leading(acc, h, cmax, Some(fb), fits, visit)
}

/// Leading monomials `ω^f·d` of the extension, `f < below`.
fn leading(
    acc: &OrdE0,
    h: usize,
    cmax: u64,
    below: Option<&OrdE0>,
    fits: Fits,
    visit: Visit,
) -> Result<Flow, NfError> {
    let fits_exp = |ep: &OrdE0| fits(&acc.add(&OrdE0::omega_pow(ep.clone())));
    let mut visit_exp = |f: &OrdE0| -> Result<Flow, NfError> {
        for d in (1..=max_fit(acc, f, cmax, fits)?).rev() {
            let p = term(acc, f, d);
            forward!(extend(&p, h, cmax, None, Some(f), fits, &mut *visit));
            forward!(visit(&p));
        }
        Ok(ControlFlow::Continue(()))
    };
    descend(h - 1, cmax, below, &fits_exp, &mut visit_exp)
}

/// First candidate (in decreasing order, at most `upper`) accepted by `accept`.
fn search_max(
    oracle: &Oracle,
    cfg: &SearchConfig,
    upper: Option<&OrdE0>,
    accept: &dyn Fn(&OrdE0) -> Result<bool, NfError>,
) -> Result<Option<OrdE0>, NfError> {
    let cmax = cfg.coeff_cap(oracle.m);
    if let Some(u) = upper {
        let in_space = u.height() <= cfg.height_bound && u.max_coeff() <= Nat::from(cmax);
        if in_space && oracle.fits(u)? && accept(u)? {
            return Ok(Some(u.clone()));
        }
    }
    let fits = |x: &OrdE0| oracle.fits(x);
    let mut visit = |x: &OrdE0| -> Result<Flow, NfError> {
        Ok(if accept(x)? {
            ControlFlow::Break(x.clone())
        } else {
            ControlFlow::Continue(())
        })
    };
    Ok(
        match descend(cfg.height_bound, cmax, upper, &fits, &mut visit)? {
            ControlFlow::Break(x) => Some(x),
            ControlFlow::Continue(()) => None,
        },
    )
}

fn check_pre(k: u32, m: &Nat) -> Result<(), NfError> {
    if k < 2 {
        return Err(NfError::Precondition(format!("base {k} is below 2")));
    }
    if m.is_zero() {
        return Err(NfError::Precondition("m must be positive".into()));
    }
    Ok(())
}

fn nu_in(
    oracle: &Oracle,
    lower_mc: &Nat,
    cfg: &SearchConfig,
    upper: Option<&OrdE0>,
) -> Result<OrdE0, NfError> {
    let accept = |x: &OrdE0| Ok(&x.max_coeff() >= lower_mc);
    Ok(search_max(oracle, cfg, upper, &accept)?.unwrap_or_default())
}

/// The largest `ζ` in the space with `A_k(ζ) ≤ m` and `mc ζ ≥ lower_mc`; zero if there is none.
pub fn nu_max(
    k: u32,
    m: &Nat,
    lower_mc: &Nat,
    cfg: &SearchConfig,
    ctx: &mut MemoContext,
) -> Result<OrdE0, NfError> {
    check_pre(k, m)?;
    let oracle = Oracle::new(k, m, &cfg.budget, ctx);
    nu_in(&oracle, lower_mc, cfg, None)
}

/// The normal-form sequence of `m` in base `k`.
pub fn nf_search(
    k: u32,
    m: &Nat,
    cfg: &SearchConfig,
    ctx: &mut MemoContext,
) -> Result<NfCert, NfError> {
    check_pre(k, m)?;
    let oracle = Oracle::new(k, m, &cfg.budget, ctx);
    let mut sequence = vec![OrdE0::zero()];
    let mut value = Nat::one();
    while &value != m {
        let upper = (sequence.len() > 1).then(|| sequence.last().unwrap().clone());
        let next = nu_in(&oracle, &value, cfg, upper.as_ref())?;
        let next_value = oracle.value(&next)?.expect("candidates fit");
        if next.is_zero() || next_value <= value {
            return Err(NfError::NoNormalForm(m.clone()));
        }
        sequence.push(next);
        value = next_value;
    }
    Ok(NfCert {
        k,
        m: m.clone(),
        sequence,
        config: cfg.clone(),
    })
}

/// The largest `ξ` in the space with `A_k(ξ) = m` exactly.
pub fn alt_nf(
    k: u32,
    m: &Nat,
    cfg: &SearchConfig,
    ctx: &mut MemoContext,
) -> Result<Option<OrdE0>, NfError> {
    check_pre(k, m)?;
    let oracle = Oracle::new(k, m, &cfg.budget, ctx);
    let accept = |x: &OrdE0| Ok(oracle.value(x)?.as_ref() == Some(m));
    search_max(&oracle, cfg, None, &accept)
}

/// Every `x` in the space with `A_k(x) ≤ m`, unordered.
///
/// Exponents are generated once per level with the context-free test `A(ω^e) ≤ m`,
/// which is implied by the test in any context.
fn feasible(h: usize, cmax: u64, fits: Fits) -> Result<Vec<OrdE0>, NfError> {
    if h == 0 {
        return Ok(vec![OrdE0::zero()]);
    }
    let lift = |y: &OrdE0| fits(&OrdE0::omega_pow(y.clone()));
    let mut exps = feasible(h - 1, cmax, &lift)?;
    exps.sort_by(|a, b| b.cmp(a));
    let mut out = vec![OrdE0::zero()];
    sums(&OrdE0::zero(), &exps, cmax, fits, &mut out)?;
    Ok(out)
}

fn sums(
    acc: &OrdE0,
    exps: &[OrdE0],
    cmax: u64,
    fits: Fits,
    out: &mut Vec<OrdE0>,
) -> Result<(), NfError> {
    for (i, e) in exps.iter().enumerate() {
        for d in 1..=cmax {
            let p = term(acc, e, d);
            if !fits(&p)? {
                break;
            }
            out.push(p.clone());
            sums(&p, &exps[i + 1..], cmax, fits, out)?;
        }
    }
    Ok(())
}

/// Rechecks a certificate against a fresh, unordered enumeration of its search space.
///
/// Budget exhaustion counts as failure.
pub fn nf_verify(cert: &NfCert) -> bool {
    verify_inner(cert).unwrap_or(false)
}

fn verify_inner(cert: &NfCert) -> Result<bool, NfError> {
    let cfg = &cert.config;
    let (k, m) = (cert.k, &cert.m);
    check_pre(k, m)?;
    let seq = &cert.sequence;
    if seq.first().is_none_or(|x| !x.is_zero()) {
        return Ok(false);
    }
    let mut ctx = MemoContext::new();
    let oracle = Oracle::new(k, m, &cfg.budget, &mut ctx);
    let cmax = cfg.coeff_cap(m);
    let fits = |x: &OrdE0| oracle.fits(x);
    let space = feasible(cfg.height_bound, cmax, &fits)?;
    let in_space = |x: &OrdE0| x.height() <= cfg.height_bound && x.max_coeff() <= Nat::from(cmax);

    let mut values = Vec::with_capacity(seq.len());
    for x in seq {
        match oracle.value(x)? {
            Some(v) => values.push(v),
            None => return Ok(false),
        }
    }
    if values.last() != Some(m) || values[..values.len() - 1].contains(m) {
        return Ok(false);
    }
    for i in 0..seq.len() - 1 {
        let (next, lower) = (&seq[i + 1], &values[i]);
        if !in_space(next) || &next.max_coeff() < lower {
            return Ok(false);
        }
        if space.iter().any(|z| z > next && &z.max_coeff() >= lower) {
            return Ok(false);
        }
    }
    Ok(true)
}
