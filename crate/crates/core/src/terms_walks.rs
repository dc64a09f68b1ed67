//! Terms over `A_k`, their base change, and fast Goodstein walks.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::base_change::{bump_nat, bump_nat_omega, BumpCtx, BumpError};
use crate::error::{OrdError, ParseError};
use crate::fgh::{a_eval, EvalBudget, EvalOutcome, MemoContext, Stop};
use crate::ord_bachmann::OrdBH;
use crate::ord_epsilon0::{Nat, OrdE0, Parser};

/// A node of a term. Number positions (the root and every coefficient) hold only
/// `Zero` or `App`; ordinal positions may hold any node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Zero,
    /// `A_k(o)`.
    App(Box<Node>),
    /// `ω^exp · coeff + tail`.
    Pow {
        exp: Box<Node>,
        coeff: Box<Node>,
        tail: Box<Node>,
    },
}

impl Node {
    pub fn size(&self) -> usize {
        match self {
            Node::Zero => 1,
            Node::App(o) => 1 + o.size(),
            Node::Pow { exp, coeff, tail } => 1 + exp.size() + coeff.size() + tail.size(),
        }
    }

    fn one() -> Node {
        Node::App(Box::new(Node::Zero))
    }

    fn is_one(&self) -> bool {
        matches!(self, Node::App(o) if **o == Node::Zero)
    }
}

/// A number term with a single subscript `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KTerm {
    pub k: u32,
    pub root: Node,
}

impl KTerm {
    pub fn zero(k: u32) -> Self {
        KTerm {
            k,
            root: Node::Zero,
        }
    }

    /// `A_k^n(0)`.
    pub fn tower(k: u32, n: u64) -> Self {
        let mut root = Node::Zero;
        for _ in 0..n {
            root = Node::App(Box::new(root));
        }
        KTerm { k, root }
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }
}

struct Shown<'a>(u32, &'a Node);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.0;
        match self.1 {
            Node::Zero => f.write_str("0"),
            Node::App(o) => write!(f, "A{k}({})", Shown(k, o)),
            Node::Pow { exp, coeff, tail } => {
                if exp.is_one() {
                    f.write_str("w")?;
                } else {
                    write!(f, "w^({})", Shown(k, exp))?;
                }
                if !coeff.is_one() {
                    write!(f, "*{}", Shown(k, coeff))?;
                }
                if **tail != Node::Zero {
                    write!(f, "+{}", Shown(k, tail))?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for KTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Shown(self.k, &self.root).fmt(f)
    }
}

struct TermParser<'a> {
    p: Parser<'a>,
    k: Option<u32>,
}

impl TermParser<'_> {
    fn number(&mut self) -> Result<Node, ParseError> {
        match self.p.peek() {
            Some('0') => {
                self.p.expect('0')?;
                Ok(Node::Zero)
            }
            Some('A') => self.app(),
            _ => Err(self.p.syntax("expected '0' or 'A'".into())),
        }
    }

    fn app(&mut self) -> Result<Node, ParseError> {
        self.p.expect('A')?;
        let k = self
            .p
            .nat()?
            .to_u32()
            .filter(|k| *k >= 2)
            .ok_or_else(|| self.p.syntax("subscript must be at least 2".into()))?;
        match self.k {
            Some(prev) if prev != k => {
                return Err(self.p.syntax(format!("mixed subscripts {prev} and {k}")));
            }
            _ => self.k = Some(k),
        }
        self.p.expect('(')?;
        let o = self.ordinal()?;
        self.p.expect(')')?;
        Ok(Node::App(Box::new(o)))
    }

    fn ordinal(&mut self) -> Result<Node, ParseError> {
        if self.p.peek() != Some('w') {
            return self.number();
        }
        self.p.expect('w')?;
        let exp = if self.p.eat('^') {
            if self.p.eat('(') {
                let e = self.ordinal()?;
                self.p.expect(')')?;
                e
            } else if self.p.eat('w') {
                self.plain_w()
            } else {
                self.number()?
            }
        } else {
            Node::one()
        };
        let coeff = if self.p.eat('*') {
            self.number()?
        } else {
            Node::one()
        };
        let tail = if self.p.eat('+') {
            self.ordinal()?
        } else {
            Node::Zero
        };
        Ok(Node::Pow {
            exp: Box::new(exp),
            coeff: Box::new(coeff),
            tail: Box::new(tail),
        })
    }

    fn plain_w(&self) -> Node {
        Node::Pow {
            exp: Box::new(Node::one()),
            coeff: Box::new(Node::one()),
            tail: Box::new(Node::Zero),
        }
    }
}

impl KTerm {
    /// Parses a term; `default_k` is used when the text has no subscript (the term `0`).
    pub fn parse(text: &str, default_k: u32) -> Result<Self, ParseError> {
        let mut tp = TermParser {
            p: Parser::new(text),
            k: None,
        };
        let root = tp.number()?;
        tp.p.finish()?;
        Ok(KTerm {
            k: tp.k.unwrap_or(default_k),
            root,
        })
    }
}

impl FromStr for KTerm {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        KTerm::parse(s, 2)
    }
}

fn ord_value(
    k: u32,
    node: &Node,
    ctx: &mut MemoContext,
    budget: &EvalBudget,
) -> Result<OrdE0, Stop> {
    match node {
        Node::Zero => Ok(OrdE0::zero()),
        Node::App(_) => num_value(k, node, ctx, budget).map(OrdE0::nat),
        Node::Pow { exp, coeff, tail } => {
            // A zero coefficient discards the exponent, which then must not trip a cutoff.
            let c = num_value(k, coeff, ctx, budget)?;
            let t = ord_value(k, tail, ctx, budget)?;
            if c.is_zero() {
                return Ok(t);
            }
            let e = ord_value(k, exp, ctx, budget)?;
            Ok(OrdE0::monomial(e, c).add(&t))
        }
    }
}

fn num_value(k: u32, node: &Node, ctx: &mut MemoContext, budget: &EvalBudget) -> Result<Nat, Stop> {
    match node {
        Node::Zero => Ok(Nat::zero()),
        Node::App(o) => {
            let x = ord_value(k, o, ctx, budget)?;
            match a_eval(k, &x, ctx, budget) {
                EvalOutcome::Value(v) => Ok(v),
                EvalOutcome::ExceedsCutoff => Err(Stop::Cutoff),
                EvalOutcome::BudgetExhausted => Err(Stop::Budget),
            }
        }
        Node::Pow { .. } => unreachable!("number positions never hold ω-powers"),
    }
}

/// `⟦t⟧`.
pub fn term_eval(t: &KTerm, ctx: &mut MemoContext, budget: &EvalBudget) -> EvalOutcome {
    num_value(t.k, &t.root, ctx, budget).into()
}

/// Replaces the subscript `k` by `l`.
pub fn term_bump(t: &KTerm, l: u32) -> KTerm {
    assert!(l > t.k, "term base change needs a larger base");
    KTerm {
        k: l,
        root: t.root.clone(),
    }
}

/// Number terms and ordinal terms of each exact size, built on demand.
struct Tables {
    nums: Vec<Vec<Node>>,
    ords: Vec<Vec<Node>>,
}

impl Tables {
    fn new() -> Self {
        Tables {
            nums: vec![Vec::new()],
            ords: vec![Vec::new()],
        }
    }

    /// Extends both tables to size `s`.
    fn grow(&mut self, s: usize) {
        while self.ords.len() <= s {
            let n = self.ords.len();
            let mut ords = Vec::new();
            let mut nums = Vec::new();
            if n == 1 {
                ords.push(Node::Zero);
                nums.push(Node::Zero);
            } else {
                for o in &self.ords[n - 1] {
                    let app = Node::App(Box::new(o.clone()));
                    nums.push(app.clone());
                    ords.push(app);
                }
                for a in 1..n - 1 {
                    for b in 1..n - 1 - a {
                        let c = n - 1 - a - b;
                        for e in &self.ords[a] {
                            for r in &self.nums[b] {
                                for t in &self.ords[c] {
                                    ords.push(Node::Pow {
                                        exp: Box::new(e.clone()),
                                        coeff: Box::new(r.clone()),
                                        tail: Box::new(t.clone()),
                                    });
                                }
                            }
                        }
                    }
                }
            }
            self.nums.push(nums);
            self.ords.push(ords);
        }
    }
}

/// All `k`-terms with at most `size_bound` nodes, by increasing size.
pub fn enum_terms(k: u32, size_bound: usize) -> impl Iterator<Item = KTerm> {
    let mut tables = Tables::new();
    (1..=size_bound).flat_map(move |s| {
        tables.grow(s);
        tables.nums[s]
            .iter()
            .map(|root| KTerm {
                k,
                root: root.clone(),
            })
            .collect::<Vec<_>>()
    })
}

/// The term read off the normal form: `A_k(ξ)` with `ξ` written out recursively.
pub fn nf_term(k: u32, m: &Nat, ctx: &mut BumpCtx) -> Result<KTerm, BumpError> {
    Ok(KTerm {
        k,
        root: nf_node(k, m, ctx)?,
    })
}

fn nf_node(k: u32, m: &Nat, ctx: &mut BumpCtx) -> Result<Node, BumpError> {
    if m.is_zero() {
        return Ok(Node::Zero);
    }
    let xi = ctx.nf(k, m)?;
    Ok(Node::App(Box::new(ord_node(k, &xi, ctx)?)))
}

fn ord_node(k: u32, xi: &OrdE0, ctx: &mut BumpCtx) -> Result<Node, BumpError> {
    if let Some(n) = xi.as_nat() {
        return nf_node(k, &n, ctx);
    }
    let mut node = Node::Zero;
    for m in xi.monos().iter().rev() {
        let exp = ord_node(k, &m.exp, ctx)?;
        let coeff = nf_node(k, &m.coeff, ctx)?;
        node = if m.exp.is_zero() {
            // A finite tail is written as a number term.
            coeff
        } else {
            Node::Pow {
                exp: Box::new(exp),
                coeff: Box::new(coeff),
                tail: Box::new(node),
            }
        };
    }
    Ok(node)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error(transparent)]
    Bump(#[from] BumpError),
    #[error("strategy chose {term} for {value} in base {base}")]
    StrategyInvalid { base: u32, value: Nat, term: String },
    #[error("evaluation budget exhausted at base {0}")]
    Budget(u32),
    #[error(transparent)]
    Ord(#[from] OrdError),
}

/// Chooses the base-`k` term used for `m`.
pub trait WalkStrategy {
    fn choose(&mut self, k: u32, m: &Nat, ctx: &mut BumpCtx) -> Result<KTerm, WalkError>;
}

/// Normal-form terms.
pub struct Canonical;

impl WalkStrategy for Canonical {
    fn choose(&mut self, k: u32, m: &Nat, ctx: &mut BumpCtx) -> Result<KTerm, WalkError> {
        Ok(nf_term(k, m, ctx)?)
    }
}

/// `m = A_k^m(0)`.
pub struct Tower;

impl WalkStrategy for Tower {
    fn choose(&mut self, k: u32, m: &Nat, _: &mut BumpCtx) -> Result<KTerm, WalkError> {
        let n = m.to_u64().ok_or(WalkError::Budget(k))?;
        Ok(KTerm::tower(k, n))
    }
}

impl<F> WalkStrategy for F
where
    F: FnMut(u32, &Nat, &mut BumpCtx) -> Result<KTerm, WalkError>,
{
    fn choose(&mut self, k: u32, m: &Nat, ctx: &mut BumpCtx) -> Result<KTerm, WalkError> {
        self(k, m, ctx)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkStep {
    pub base: u32,
    pub value: Nat,
    pub term: Option<KTerm>,
    pub assigned: Option<OrdBH>,
    pub calls: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkTrace {
    pub start: Nat,
    pub steps: Vec<WalkStep>,
    pub terminated: bool,
    /// Why an unterminated trace stopped.
    pub stopped: Option<String>,
}

impl WalkTrace {
    pub fn values(&self) -> Vec<Nat> {
        self.steps.iter().map(|s| s.value.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                json!({
                    "base": s.base,
                    "value": s.value.to_string(),
                    "term": s.term.as_ref().map(|t| t.to_string()),
                    "ordinal": s.assigned.as_ref().map(|o| o.to_string()),
                    "calls": s.calls,
                })
            })
            .collect();
        json!({
            "start": self.start.to_string(),
            "steps": steps,
            "terminated": self.terminated,
            "stopped": self.stopped,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, OrdError> {
        let bad = |what: &str| OrdError::Json(format!("trace: bad or missing `{what}`"));
        let nat = |v: &Value, what: &str| {
            v.as_str()
                .and_then(|s| s.parse::<Nat>().ok())
                .ok_or_else(|| bad(what))
        };
        let start = nat(&v["start"], "start")?;
        let mut steps = Vec::new();
        for s in v["steps"].as_array().ok_or_else(|| bad("steps"))? {
            let base = s["base"]
                .as_u64()
                .and_then(|b| u32::try_from(b).ok())
                .ok_or_else(|| bad("base"))?;
            let term = match s["term"].as_str() {
                Some(t) => Some(KTerm::parse(t, base).map_err(|e| OrdError::Json(e.to_string()))?),
                None => None,
            };
            let assigned = match s["ordinal"].as_str() {
                Some(o) => Some(
                    o.parse::<OrdBH>()
                        .map_err(|e| OrdError::Json(e.to_string()))?,
                ),
                None => None,
            };
            steps.push(WalkStep {
                base,
                value: nat(&s["value"], "value")?,
                term,
                assigned,
                calls: s["calls"].as_u64().unwrap_or(0),
            });
        }
        Ok(WalkTrace {
            start,
            steps,
            terminated: v["terminated"].as_bool().ok_or_else(|| bad("terminated"))?,
            stopped: v["stopped"].as_str().map(str::to_owned),
        })
    }
}

/// `↑^ω_k m`, the ordinal attached to `m` at base `k`.
pub fn assign_ordinal(k: u32, m: &Nat, ctx: &mut BumpCtx) -> Result<OrdBH, BumpError> {
    bump_nat_omega(k, m, ctx)
}

/// The fast Goodstein sequence: `m ↦ ↑^{k+1}_k m − 1` from base 2.
pub fn canonical_walk(m: &Nat, max_steps: usize, ctx: &mut BumpCtx) -> WalkTrace {
    run_walk(m, max_steps, ctx, &mut Canonical, |k, v, _, ctx| {
        Ok(bump_nat(k, k + 1, v, ctx)?)
    })
}

/// A walk where each step bumps the chosen term syntactically.
pub fn walk(
    m: &Nat,
    strategy: &mut dyn WalkStrategy,
    max_steps: usize,
    ctx: &mut BumpCtx,
) -> WalkTrace {
    run_walk(m, max_steps, ctx, strategy, |k, v, term, ctx| {
        let budget = ctx.cfg.budget.clone();
        match term_eval(term, &mut ctx.memo, &budget) {
            EvalOutcome::Value(x) if &x == v => {}
            EvalOutcome::Value(_) => {
                return Err(WalkError::StrategyInvalid {
                    base: k,
                    value: v.clone(),
                    term: term.to_string(),
                })
            }
            _ => return Err(WalkError::Budget(k)),
        }
        match term_eval(&term_bump(term, k + 1), &mut ctx.memo, &budget) {
            EvalOutcome::Value(x) => Ok(x),
            _ => Err(WalkError::Budget(k + 1)),
        }
    })
}

fn run_walk(
    m: &Nat,
    max_steps: usize,
    ctx: &mut BumpCtx,
    strategy: &mut dyn WalkStrategy,
    step: impl Fn(u32, &Nat, &KTerm, &mut BumpCtx) -> Result<Nat, WalkError>,
) -> WalkTrace {
    let mut trace = WalkTrace {
        start: m.clone(),
        steps: Vec::new(),
        terminated: false,
        stopped: None,
    };
    let mut value = m.clone();
    for i in 0..=max_steps {
        let k = 2 + i as u32;
        let before = ctx.memo.calls;
        let chosen = strategy.choose(k, &value, ctx);
        let assigned = assign_ordinal(k, &value, ctx).ok();
        let mut entry = WalkStep {
            base: k,
            value: value.clone(),
            term: chosen.as_ref().ok().cloned(),
            assigned,
            calls: 0,
        };
        if value.is_zero() {
            entry.calls = ctx.memo.calls - before;
            trace.steps.push(entry);
            trace.terminated = true;
            return trace;
        }
        let next = if i == max_steps {
            Err(None)
        } else {
            chosen
                .map_err(Some)
                .and_then(|t| step(k, &value, &t, ctx).map_err(Some))
        };
        entry.calls = ctx.memo.calls - before;
        trace.steps.push(entry);
        match next {
            Ok(v) => value = v - Nat::one(),
            Err(e) => {
                trace.stopped = Some(match e {
                    Some(e) => e.to_string(),
                    None => format!("step limit {max_steps} reached"),
                });
                return trace;
            }
        }
    }
    trace
}

/// Strict decrease of the attached ordinals along the trace.
pub fn descent_check(trace: &WalkTrace) -> bool {
    let mut prev: Option<&OrdBH> = None;
    for s in &trace.steps {
        let Some(cur) = &s.assigned else {
            return false;
        };
        if prev.is_some_and(|p| cur >= p) {
            return false;
        }
        prev = Some(cur);
    }
    true
}

/// `ω_0 = 1`, `ω_{n+1} = ω^{ω_n}`.
pub fn omega_tower(n: u32) -> OrdE0 {
    let mut x = OrdE0::one();
    for _ in 0..n {
        x = OrdE0::omega_pow(x);
    }
    x
}

/// Termination step of the canonical walk from `A_2(ω_n)`.
pub fn g_of(n: u32, max_steps: usize, ctx: &mut BumpCtx) -> Result<u64, WalkError> {
    let budget = ctx.cfg.budget.clone();
    let m = match a_eval(2, &omega_tower(n), &mut ctx.memo, &budget) {
        EvalOutcome::Value(v) => v,
        _ => return Err(WalkError::Budget(2)),
    };
    let trace = canonical_walk(&m, max_steps, ctx);
    if trace.terminated {
        Ok(trace.steps.len() as u64 - 1)
    } else {
        Err(WalkError::Budget(trace.steps.last().map_or(2, |s| s.base)))
    }
}
