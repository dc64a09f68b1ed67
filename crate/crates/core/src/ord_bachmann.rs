//! Notations below ε_{Ω+1}: Ω-normal forms whose countable coefficients are
//! values of the collapsing function `B = A_ω`, and the collapsing
//! fundamental sequences `[ξ]′n` used for the descent function `F`.
//!
//! `B` is injective and `B(ρ) = ρ + 1` for countable `ρ`, so every countable
//! value in the notation is either 0 or a single atom `B(x)`; finite `n` is
//! the tower `B^n(0)`. Notations are therefore unique and derived equality is
//! ordinal equality. Atoms are ordered through their arguments: for `ζ < ξ`,
//! `B(ζ) < B(ξ)` when `mc_Ω(ζ) < B(ξ)` and `B(ξ) ≤ mc_Ω(ζ)` otherwise.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{OrdError, ParseError};
use crate::ord_epsilon0::Parser;

/// An atom `B(arg)`; always a nonzero countable ordinal.
#[derive(Clone)]
pub struct BAtom(Arc<AtomInner>);

struct AtomInner {
    arg: OrdBH,
    mc: OrdBH,
    finite: Option<u64>,
}

/// One Ω-monomial `Ω^exp · coeff`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BMono {
    pub exp: OrdBH,
    pub coeff: BAtom,
}

/// An ordinal below ε_{Ω+1} in Ω-normal form; the empty list is zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct OrdBH {
    monos: Vec<BMono>,
}

impl BAtom {
    pub fn new(arg: OrdBH) -> Self {
        let mc = arg.mc_bh();
        let finite = arg.as_finite().and_then(|n| n.checked_add(1));
        BAtom(Arc::new(AtomInner { arg, mc, finite }))
    }

    pub fn arg(&self) -> &OrdBH {
        &self.0.arg
    }

    pub fn finite(&self) -> Option<u64> {
        self.0.finite
    }

    /// Whether `B(arg)` is a successor, i.e. `arg` is countable.
    pub fn is_successor(&self) -> bool {
        self.arg().is_countable()
    }
}

impl PartialEq for BAtom {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.arg == other.0.arg
    }
}

impl Eq for BAtom {}

impl Hash for BAtom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.arg.hash(state)
    }
}

impl Ord for BAtom {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.finite(), other.finite()) {
            (Some(a), Some(b)) => return a.cmp(&b),
            (Some(_), None) => return Ordering::Less,
            (None, Some(_)) => return Ordering::Greater,
            _ => {}
        }
        match self.arg().cmp(other.arg()) {
            Ordering::Equal => Ordering::Equal,
            Ordering::Less => {
                if countable_lt_atom(&self.0.mc, other) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            Ordering::Greater => {
                if countable_lt_atom(&other.0.mc, self) {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }
}

impl PartialOrd for BAtom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", OrdBH::atom(self.clone()))
    }
}

fn countable_lt_atom(c: &OrdBH, a: &BAtom) -> bool {
    match c.as_atom() {
        None => true,
        Some(x) => x < a,
    }
}

impl OrdBH {
    pub fn zero() -> Self {
        OrdBH { monos: Vec::new() }
    }

    pub fn one() -> Self {
        Self::nat(1)
    }

    /// The finite ordinal `n` as the tower `B^n(0)`.
    pub fn nat(n: u64) -> Self {
        let mut x = Self::zero();
        for _ in 0..n {
            x = Self::b(x);
        }
        x
    }

    /// Ω.
    pub fn big_omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `Ω_n`: `Ω_0 = 1`, `Ω_{i+1} = Ω^{Ω_i}`.
    pub fn omega_tower(n: u32) -> Self {
        let mut x = Self::one();
        for _ in 0..n {
            x = Self::omega_pow(x);
        }
        x
    }

    /// The countable value `B(x)`.
    pub fn b(x: OrdBH) -> Self {
        Self::atom(BAtom::new(x))
    }

    pub fn atom(a: BAtom) -> Self {
        OrdBH {
            monos: vec![BMono {
                exp: Self::zero(),
                coeff: a,
            }],
        }
    }

    pub fn omega_pow(exp: OrdBH) -> Self {
        Self::monomial(exp, BAtom::new(Self::zero()))
    }

    pub fn monomial(exp: OrdBH, coeff: BAtom) -> Self {
        OrdBH {
            monos: vec![BMono { exp, coeff }],
        }
    }

    /// `Ω^exp · c` for a countable `c`, zero when `c` is zero.
    pub fn monomial_c(exp: OrdBH, c: &OrdBH) -> Self {
        match c.as_atom() {
            None => Self::zero(),
            Some(a) => Self::monomial(exp, a.clone()),
        }
    }

    pub fn from_monos(monos: Vec<BMono>) -> Result<Self, OrdError> {
        for w in monos.windows(2) {
            if w[0].exp <= w[1].exp {
                return Err(OrdError::NotNormalForm(
                    "Ω-exponents must be strictly decreasing".into(),
                ));
            }
        }
        Ok(OrdBH { monos })
    }

    pub fn monos(&self) -> &[BMono] {
        &self.monos
    }

    pub fn is_zero(&self) -> bool {
        self.monos.is_empty()
    }

    /// Below Ω.
    pub fn is_countable(&self) -> bool {
        match self.monos.as_slice() {
            [] => true,
            [m] => m.exp.is_zero(),
            _ => false,
        }
    }

    /// The atom of a nonzero countable value.
    pub fn as_atom(&self) -> Option<&BAtom> {
        match self.monos.as_slice() {
            [m] if m.exp.is_zero() => Some(&m.coeff),
            _ => None,
        }
    }

    pub fn as_finite(&self) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        self.as_atom().and_then(BAtom::finite)
    }

    pub fn is_successor(&self) -> bool {
        self.monos
            .last()
            .is_some_and(|m| m.exp.is_zero() && m.coeff.is_successor())
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    pub fn pred(&self) -> Option<Self> {
        if !self.is_successor() {
            return None;
        }
        let mut out = self.clone();
        let last = out.monos.pop().unwrap();
        if let Some(a) = last.coeff.arg().as_atom() {
            out.monos.push(BMono {
                exp: Self::zero(),
                coeff: a.clone(),
            });
        }
        Some(out)
    }

    pub fn succ(&self) -> Self {
        let mut out = self.clone();
        match out.monos.last() {
            Some(m) if m.exp.is_zero() => {
                let c = Self::atom(out.monos.pop().unwrap().coeff);
                out.monos.push(BMono {
                    exp: Self::zero(),
                    coeff: BAtom::new(c),
                });
            }
            _ => out.monos.push(BMono {
                exp: Self::zero(),
                coeff: BAtom::new(Self::zero()),
            }),
        }
        out
    }

    /// Splits `ξ = α + β` with `α` a multiple of Ω and `β` countable.
    pub fn split_tail(&self) -> (Self, Self) {
        match self.monos.last() {
            Some(m) if m.exp.is_zero() => {
                let mut head = self.clone();
                let t = head.monos.pop().unwrap();
                (head, Self::atom(t.coeff))
            }
            _ => (self.clone(), Self::zero()),
        }
    }

    /// Concatenation when the exponents are already strictly decreasing.
    fn concat(mut self, tail: OrdBH) -> Self {
        debug_assert!(match (self.monos.last(), tail.monos.first()) {
            (Some(a), Some(b)) => a.exp > b.exp,
            _ => true,
        });
        self.monos.extend(tail.monos);
        self
    }

    /// Ordinal sum for a tail from a fundamental sequence. With `θ ≥ τ` the tail may
    /// lead with `Ω^{e[θ]}` at or above the last exponent; its coefficient is then 1,
    /// so absorption never adds two infinite countable coefficients.
    fn join(self, tail: OrdBH) -> Self {
        match (self.monos.last(), tail.monos.first()) {
            (Some(a), Some(b)) if a.exp <= b.exp => {
                self.add(&tail).expect("tail leads with coefficient 1")
            }
            _ => self.concat(tail),
        }
    }

    /// Ordinal sum. Fails only when two infinite countable coefficients must be added.
    pub fn add(&self, other: &Self) -> Result<Self, OrdError> {
        let Some(lead) = other.monos.first() else {
            return Ok(self.clone());
        };
        let mut monos: Vec<BMono> = self
            .monos
            .iter()
            .take_while(|m| m.exp >= lead.exp)
            .cloned()
            .collect();
        match monos.pop() {
            Some(last) if last.exp == lead.exp => {
                let c = countable_add(&Self::atom(last.coeff), &Self::atom(lead.coeff.clone()))?;
                monos.push(BMono {
                    exp: last.exp,
                    coeff: c.as_atom().expect("nonzero").clone(),
                });
                monos.extend(other.monos[1..].iter().cloned());
            }
            Some(last) => {
                monos.push(last);
                monos.extend(other.monos.iter().cloned());
            }
            None => monos.extend(other.monos.iter().cloned()),
        }
        Ok(OrdBH { monos })
    }

    /// `mc_Ω`: the largest countable coefficient anywhere in the Ω-normal form.
    pub fn mc_bh(&self) -> OrdBH {
        let mut best: Option<BAtom> = None;
        for m in &self.monos {
            let sub = m.exp.mc_bh();
            for cand in [Some(m.coeff.clone()), sub.as_atom().cloned()]
                .into_iter()
                .flatten()
            {
                if best.as_ref().is_none_or(|b| &cand > b) {
                    best = Some(cand);
                }
            }
        }
        best.map(Self::atom).unwrap_or_default()
    }

    /// `ξ*`: the largest atom occurring anywhere in the notation, including inside atom arguments.
    pub fn star(&self) -> OrdBH {
        let mut best: Option<BAtom> = None;
        self.visit_atoms(&mut |a| {
            if best.as_ref().is_none_or(|b| a > b) {
                best = Some(a.clone());
            }
        });
        best.map(Self::atom).unwrap_or_default()
    }

    fn visit_atoms(&self, f: &mut impl FnMut(&BAtom)) {
        for m in &self.monos {
            f(&m.coeff);
            m.coeff.arg().visit_atoms(f);
            m.exp.visit_atoms(f);
        }
    }

    /// Terminal part at κ = Ω.
    pub fn terminal_part_bh(&self) -> OrdBH {
        let Some(last) = self.monos.last() else {
            return Self::zero();
        };
        if self.is_successor() {
            return Self::one();
        }
        if !last.coeff.is_successor() {
            return Self::atom(last.coeff.clone());
        }
        if last.exp.is_successor() {
            Self::big_omega()
        } else {
            last.exp.terminal_part_bh()
        }
    }

    /// Fundamental sequence at κ = Ω with a countable index `θ`.
    pub fn fund_seq_bh(&self, theta: &OrdBH) -> OrdBH {
        debug_assert!(theta.is_countable());
        let Some((last, init)) = self.monos.split_last() else {
            return Self::zero();
        };
        let head = OrdBH {
            monos: init.to_vec(),
        };
        head.join(Self::fund_seq_mono(&last.exp, &last.coeff, theta))
    }

    fn fund_seq_mono(exp: &OrdBH, coeff: &BAtom, theta: &OrdBH) -> OrdBH {
        if !coeff.is_successor() {
            return Self::monomial_c(exp.clone(), theta);
        }
        if exp.is_zero() {
            return coeff.arg().clone();
        }
        let lower = coeff.arg();
        if !lower.is_zero() {
            let unit = BAtom::new(Self::zero());
            return Self::monomial_c(exp.clone(), lower)
                .join(Self::fund_seq_mono(exp, &unit, theta));
        }
        match exp.pred() {
            Some(d) => Self::monomial_c(d, theta),
            None => Self::omega_pow(exp.fund_seq_bh(theta)),
        }
    }

    /// Ceiling at κ = Ω.
    pub fn ceil_bh(&self) -> OrdBH {
        let Some((last, init)) = self.monos.split_last() else {
            return Self::zero();
        };
        let head = OrdBH {
            monos: init.to_vec(),
        };
        let top = if last.coeff.finite() == Some(1) {
            Self::omega_pow(last.exp.ceil_bh())
        } else {
            Self::omega_pow(last.exp.succ())
        };
        head.add(&top)
            .expect("ceiling merges only add one to a coefficient")
    }

    /// Membership in Λ: `τ(ξ) < Ω` (the bound on `mc_Ω` holds for every notation).
    pub fn in_lambda(&self) -> bool {
        self.terminal_part_bh().is_countable()
    }

    /// Node count: 1 for zero, otherwise the sum over monomials of the sizes of exponent and atom argument.
    pub fn size(&self) -> usize {
        if self.is_zero() {
            return 1;
        }
        self.monos
            .iter()
            .map(|m| m.exp.size() + m.coeff.arg().size())
            .sum()
    }

    pub fn to_json(&self) -> Value {
        let monos: Vec<Value> = self
            .monos
            .iter()
            .map(|m| json!({"exp": m.exp.to_json(), "coeff": atom_json(&m.coeff)}))
            .collect();
        json!({ "monomials": monos })
    }

    pub fn from_json(v: &Value) -> Result<Self, OrdError> {
        let bad = || OrdError::Json("expected {\"monomials\": [...]}".into());
        let arr = v
            .get("monomials")
            .and_then(Value::as_array)
            .ok_or_else(bad)?;
        let mut monos = Vec::with_capacity(arr.len());
        for m in arr {
            let exp = Self::from_json(m.get("exp").ok_or_else(bad)?)?;
            let c = m.get("coeff").ok_or_else(bad)?;
            let coeff = if let Some(s) = c.as_str() {
                let n: u64 = s.parse().map_err(|_| bad())?;
                Self::nat(n).as_atom().cloned().ok_or_else(bad)?
            } else {
                BAtom::new(Self::from_json(c.get("B").ok_or_else(bad)?)?)
            };
            monos.push(BMono { exp, coeff });
        }
        Self::from_monos(monos)
    }
}

fn atom_json(a: &BAtom) -> Value {
    match a.finite() {
        Some(n) => Value::String(n.to_string()),
        None => json!({ "B": a.arg().to_json() }),
    }
}

/// Sum of two countable values, when it can be decided.
pub fn countable_add(c: &OrdBH, d: &OrdBH) -> Result<OrdBH, OrdError> {
    debug_assert!(c.is_countable() && d.is_countable());
    if d.is_zero() {
        return Ok(c.clone());
    }
    if c.is_zero() {
        return Ok(d.clone());
    }
    let da = d.as_atom().unwrap();
    if da.is_successor() {
        return Ok(OrdBH::b(countable_add(c, da.arg())?));
    }
    if c.as_finite().is_some() {
        return Ok(d.clone());
    }
    Err(OrdError::Domain(format!(
        "sum {c} + {d} of infinite countable values is not supported"
    )))
}

impl Ord for OrdBH {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.monos.iter().zip(&other.monos) {
            let o = a.exp.cmp(&b.exp).then_with(|| a.coeff.cmp(&b.coeff));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.monos.len().cmp(&other.monos.len())
    }
}

impl PartialOrd for OrdBH {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `B^{{0}}(ξ)`.
pub fn b_aux0(xi: &OrdBH) -> OrdBH {
    if let Some(z) = xi.pred() {
        OrdBH::b(z)
    } else if is_fix(xi) {
        xi.terminal_part_bh()
    } else {
        OrdBH::zero()
    }
}

/// FIX: `τ(ξ) = B(γ)` for some `γ > ξ`, `ξ* = τ(ξ)` and `(ξ[1])* < ξ*`.
pub fn is_fix(xi: &OrdBH) -> bool {
    let tau = xi.terminal_part_bh();
    let Some(a) = tau.as_atom() else {
        return false;
    };
    if a.arg() <= xi {
        return false;
    }
    let star = xi.star();
    star == tau && xi.fund_seq_bh(&OrdBH::one()).star() < star
}

/// `ξ̌`: the multiple-of-Ω part of `ξ` when `B^{{0}}(ξ) > 0`, else `ξ`.
pub fn check_hat(xi: &OrdBH) -> OrdBH {
    if b_aux0(xi).is_zero() {
        xi.clone()
    } else {
        xi.split_tail().0
    }
}

/// `B^{{i}}(ξ)`.
pub fn b_iter(i: u64, xi: &OrdBH) -> OrdBH {
    let (alpha, _) = xi.split_tail();
    let mut v = b_aux0(xi);
    for _ in 0..i {
        v = OrdBH::b(alpha.fund_seq_bh(&v));
    }
    v
}

/// Memo table for `[ξ]′n`; one per worker.
#[derive(Default, Debug)]
pub struct CollapseCtx {
    memo: HashMap<(OrdBH, u64), OrdBH>,
}

impl CollapseCtx {
    pub fn new() -> Self {
        Self::default()
    }
}

/// The collapsing fundamental sequence `[ξ]′n` on Λ.
pub fn collapse_fs(xi: &OrdBH, n: u64, ctx: &mut CollapseCtx) -> Result<OrdBH, OrdError> {
    if !xi.in_lambda() {
        return Err(OrdError::Domain(format!("{xi} is not in Λ")));
    }
    collapse_inner(xi, n, ctx)
}

fn collapse_inner(xi: &OrdBH, n: u64, ctx: &mut CollapseCtx) -> Result<OrdBH, OrdError> {
    if xi.is_zero() {
        return Ok(OrdBH::zero());
    }
    let key = (xi.clone(), n);
    if let Some(v) = ctx.memo.get(&key) {
        return Ok(v.clone());
    }
    let v = if !xi.is_countable() {
        // A successor is its own sequence source; limits go through the ceiling.
        let tau = xi.terminal_part_bh();
        let idx = collapse_inner(&tau, n, ctx)?;
        // When the ceiling does not give back ξ at τ (e.g. Ω^ω·2), ξ's own
        // sequence is the one converging to ξ below τ.
        let ceil = xi.ceil_bh();
        if xi.is_limit() && ceil.fund_seq_bh(&tau) == *xi {
            ceil.fund_seq_bh(&idx)
        } else {
            xi.fund_seq_bh(&idx)
        }
    } else {
        let a = xi.as_atom().unwrap();
        let x = a.arg();
        if x.is_countable() {
            x.clone()
        } else {
            let hat = check_hat(x);
            let t = hat.terminal_part_bh();
            if t.is_countable() {
                let inner = collapse_inner(&hat, n, ctx)?;
                OrdBH::b(inner.add(&b_aux0(x))?)
            } else {
                b_iter(n, x)
            }
        }
    };
    ctx.memo.insert(key, v.clone());
    Ok(v)
}

/// One state of the descent `⟦α⟧_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentState {
    pub current: OrdBH,
    pub step_index: u64,
}

/// Result of [`f_descent`].
#[derive(Clone, Debug)]
pub struct FDescent {
    pub states: Vec<DescentState>,
    /// `F(n)` when zero was reached within the step limit.
    pub value: Option<u64>,
}

/// `⟦α⟧_0 = α`, `⟦α⟧_{i+1} = [⟦α⟧_i]′_{i+1}`, for at most `max_steps` steps.
pub fn descend(alpha: &OrdBH, max_steps: u64, ctx: &mut CollapseCtx) -> Result<FDescent, OrdError> {
    let mut cur = alpha.clone();
    let mut states = vec![DescentState {
        current: cur.clone(),
        step_index: 0,
    }];
    let mut i = 0;
    while !cur.is_zero() {
        if i == max_steps {
            return Ok(FDescent {
                states,
                value: None,
            });
        }
        i += 1;
        cur = collapse_fs(&cur, i, ctx)?;
        states.push(DescentState {
            current: cur.clone(),
            step_index: i,
        });
    }
    Ok(FDescent {
        states,
        value: Some(i),
    })
}

/// The descent from `B(Ω_n)`; `value` is `F(n)` when reached.
pub fn f_descent(n: u32, max_steps: u64) -> Result<FDescent, OrdError> {
    let alpha = OrdBH::b(OrdBH::omega_tower(n));
    descend(&alpha, max_steps, &mut CollapseCtx::new())
}

/// Checks `[ξ_i]′_{i+1} ≤ ξ_{i+1} ≤ ξ_i` and `ξ_i ≥ ⟦ξ_0⟧_i`; `Err` carries the failing index.
pub fn majorize_check(seq: &[OrdBH]) -> Result<(), usize> {
    let mut ctx = CollapseCtx::new();
    for (i, w) in seq.windows(2).enumerate() {
        let lo = collapse_fs(&w[0], i as u64 + 1, &mut ctx).map_err(|_| i)?;
        if !(lo <= w[1] && w[1] <= w[0]) {
            return Err(i + 1);
        }
    }
    let Some(first) = seq.first() else {
        return Ok(());
    };
    let mut cur = first.clone();
    for (i, x) in seq.iter().enumerate() {
        if i > 0 {
            cur = collapse_fs(&cur, i as u64, &mut ctx).map_err(|_| i)?;
        }
        if x < &cur {
            return Err(i);
        }
    }
    Ok(())
}

impl fmt::Display for OrdBH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, m) in self.monos.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if m.exp.is_zero() {
                write_atom(f, &m.coeff)?;
                continue;
            }
            if m.exp == OrdBH::one() {
                f.write_str("W")?;
            } else {
                write!(f, "W^({})", m.exp)?;
            }
            if m.coeff.finite() != Some(1) {
                f.write_str("*")?;
                write_atom(f, &m.coeff)?;
            }
        }
        Ok(())
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, a: &BAtom) -> fmt::Result {
    match a.finite() {
        Some(n) => write!(f, "{n}"),
        None => write!(f, "B({})", a.arg()),
    }
}

impl fmt::Debug for OrdBH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for OrdBH {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut p = Parser::new(s);
        let v = parse_bh(&mut p)?;
        p.finish()?;
        Ok(v)
    }
}

fn parse_bh(p: &mut Parser<'_>) -> Result<OrdBH, ParseError> {
    let mut monos = Vec::new();
    loop {
        let (exp, coeff) = parse_mono(p)?;
        if let Some(c) = coeff {
            monos.push(BMono { exp, coeff: c });
        } else if !(monos.is_empty() && p.peek() != Some('+')) {
            return Err(ParseError::NotNormalForm("zero summand".into()));
        }
        if !p.eat('+') {
            break;
        }
    }
    OrdBH::from_monos(monos).map_err(|e| ParseError::NotNormalForm(e.to_string()))
}

fn parse_mono(p: &mut Parser<'_>) -> Result<(OrdBH, Option<BAtom>), ParseError> {
    if p.eat('W') {
        let exp = if p.eat('^') {
            p.expect('(')?;
            let e = parse_bh(p)?;
            p.expect(')')?;
            e
        } else {
            OrdBH::one()
        };
        let coeff = if p.eat('*') {
            parse_countable(p)?
        } else {
            OrdBH::one()
        };
        match coeff.as_atom() {
            Some(a) => Ok((exp, Some(a.clone()))),
            None => Err(ParseError::NotNormalForm("zero coefficient".into())),
        }
    } else {
        let c = parse_countable(p)?;
        Ok((OrdBH::zero(), c.as_atom().cloned()))
    }
}

fn parse_countable(p: &mut Parser<'_>) -> Result<OrdBH, ParseError> {
    if p.eat('B') {
        p.expect('(')?;
        let x = parse_bh(p)?;
        p.expect(')')?;
        Ok(OrdBH::b(x))
    } else if p.eat('w') {
        Ok(OrdBH::b(OrdBH::big_omega()))
    } else {
        let n = p.nat()?;
        let n: u64 = n
            .try_into()
            .map_err(|_| p.syntax("finite coefficient too large".into()))?;
        Ok(OrdBH::nat(n))
    }
}

/// All notations up to a given [`OrdBH::size`], for exhaustive order checks.
///
/// Exponents are drawn recursively, coefficients are atoms over smaller
/// notations, and sums have at most two Ω-monomials.
pub fn enumerate_bh(max_size: usize) -> Vec<OrdBH> {
    let mut by_size: Vec<Vec<OrdBH>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1].push(OrdBH::zero());
    }
    for s in 2..=max_size {
        let mut found = Vec::new();
        for se in 1..s {
            let sa = s - se;
            for e in by_size[se].clone() {
                for a in by_size[sa].clone() {
                    found.push(OrdBH::monomial(e.clone(), BAtom::new(a)));
                }
            }
        }
        let singles: Vec<(usize, OrdBH)> = (2..s)
            .flat_map(|k| {
                by_size[k]
                    .iter()
                    .filter(|x| x.monos.len() == 1)
                    .map(move |x| (k, x.clone()))
            })
            .collect();
        for (k1, x) in &singles {
            for (k2, y) in &singles {
                if k1 + k2 == s && x.monos[0].exp > y.monos[0].exp {
                    found.push(x.clone().concat(y.clone()));
                }
            }
        }
        found.sort();
        found.dedup();
        by_size[s] = found;
    }
    let mut all: Vec<OrdBH> = by_size.into_iter().flatten().collect();
    all.sort();
    all.dedup();
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> OrdBH {
        s.parse().unwrap()
    }

    #[test]
    fn atom_order() {
        assert!(h("B(0)") < h("B(W)"));
        assert!(h("B(W)") < h("W"));
        assert!(h("B(W*2)") < h("B(W^(W))"));
        assert!(h("B(W+1)") > h("B(B(W))"));
        assert!(h("B(W+B(W^(W)))") > h("B(W^(W))"));
    }

    #[test]
    fn finite_towers() {
        for n in 0..=10 {
            assert_eq!(OrdBH::b(OrdBH::nat(n)), OrdBH::nat(n + 1));
        }
        assert_eq!(h("3").to_string(), "3");
        assert_eq!(h("B(B(0))"), OrdBH::nat(2));
    }

    #[test]
    fn max_coefficients() {
        assert_eq!(h("W").mc_bh(), OrdBH::one());
        assert_eq!(OrdBH::zero().mc_bh(), OrdBH::zero());
        assert_eq!(h("W^(W)*B(W)+1").mc_bh(), h("B(W)"));
    }

    #[test]
    fn sequences_and_ceiling() {
        let th = h("B(W^(W))");
        assert_eq!(h("W").fund_seq_bh(&th), th);
        assert_eq!(h("W^(W)").fund_seq_bh(&OrdBH::zero()), OrdBH::one());
        assert_eq!(h("W^(W)").fund_seq_bh(&OrdBH::one()).ceil_bh(), h("W"));
        assert_eq!(h("W^(W)").fund_seq_bh(&OrdBH::nat(2)).ceil_bh(), h("W^(W)"));
        assert_eq!(h("W*B(W)").terminal_part_bh(), h("B(W)"));
        assert_eq!(h("W^(W)").terminal_part_bh(), h("W"));
    }

    #[test]
    fn auxiliary_values() {
        assert_eq!(b_aux0(&h("W")), OrdBH::zero());
        assert_eq!(b_aux0(&h("1")), OrdBH::one());
        assert_eq!(b_aux0(&h("W^(W)")), OrdBH::zero());
        assert!(!is_fix(&h("W")));
        assert!(!is_fix(&h("5")));
        assert!(is_fix(&h("W*B(W^(W))")));
        assert_eq!(check_hat(&h("W")), h("W"));
        assert_eq!(check_hat(&h("W+1")), h("W"));
        assert_eq!(check_hat(&h("W^(W)+2")), h("W^(W)"));
        for n in 0..6 {
            assert_eq!(b_iter(n, &h("W")), OrdBH::nat(n));
        }
        assert_eq!(b_iter(0, &h("W+1")), h("B(W)"));
        assert_eq!(b_iter(1, &h("W^(W)")), OrdBH::nat(2));
    }

    #[test]
    fn collapsing_sequences() {
        let mut c = CollapseCtx::new();
        for n in 0..5 {
            assert_eq!(collapse_fs(&h("1"), n, &mut c).unwrap(), OrdBH::zero());
            assert_eq!(collapse_fs(&h("B(W)"), n, &mut c).unwrap(), OrdBH::nat(n));
        }
        assert_eq!(
            collapse_fs(&h("B(W^(W))"), 1, &mut c).unwrap(),
            OrdBH::nat(2)
        );
        assert!(collapse_fs(&h("W"), 1, &mut c).is_err());
    }

    #[test]
    fn descent_values() {
        let fd = |n| f_descent(n, 10).unwrap();
        let f0 = fd(0);
        assert_eq!(f0.value, Some(2));
        let seq: Vec<_> = f0.states.iter().map(|s| s.current.clone()).collect();
        assert_eq!(seq, vec![OrdBH::nat(2), OrdBH::nat(1), OrdBH::zero()]);
        let f1 = fd(1);
        assert_eq!(f1.value, Some(2));
        assert_eq!(f1.states[1].current, OrdBH::one());
        let f2 = fd(2);
        assert_eq!(f2.value, Some(3));
        let seq: Vec<_> = f2.states.iter().map(|s| s.current.clone()).collect();
        assert_eq!(seq, vec![h("B(W^(W))"), h("2"), h("1"), h("0")]);
    }

    #[test]
    fn majorization() {
        let w = h("B(W)");
        assert_eq!(majorize_check(&[w.clone(), h("1"), h("0")]), Ok(()));
        assert_eq!(majorize_check(&[w.clone(), h("2"), h("1"), h("0")]), Ok(()));
        assert_eq!(majorize_check(&[w, h("0")]), Err(1));
    }

    #[test]
    fn text_and_json() {
        for s in [
            "W^(W)*B(W)+1",
            "B(W^(W+1)*3)",
            "W^(B(W))+W*2+B(W+1)",
            "0",
            "7",
        ] {
            let x = h(s);
            assert_eq!(x.to_string(), s);
            assert_eq!(OrdBH::from_json(&x.to_json()).unwrap(), x);
        }
        assert!(matches!(
            "1+W".parse::<OrdBH>(),
            Err(ParseError::NotNormalForm(_))
        ));
        assert_eq!(h("w"), h("B(W)"));
    }

    #[test]
    fn countable_sums() {
        assert_eq!(countable_add(&h("B(W)"), &h("2")).unwrap(), h("B(B(B(W)))"));
        assert_eq!(countable_add(&h("3"), &h("B(W)")).unwrap(), h("B(W)"));
        assert!(countable_add(&h("B(W)"), &h("B(W)")).is_err());
    }

    #[test]
    fn corpus_is_sorted_and_distinct() {
        let e = enumerate_bh(6);
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert!(e.len() > 20, "{}", e.len());
    }
}
