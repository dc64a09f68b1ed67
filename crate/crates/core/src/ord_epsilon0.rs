//! Ordinals below ε₀ in Cantor normal form with arbitrary-precision coefficients.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{OrdError, ParseError};

/// Arbitrary-precision natural number.
pub type Nat = BigUint;

/// One monomial `ω^exp · coeff` of a normal form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    pub exp: OrdE0,
    pub coeff: Nat,
}

/// An ordinal below ε₀. The empty monomial list is zero.
///
/// Exponents are strictly decreasing and coefficients are at least one; every
/// constructor in this module preserves that, so derived equality is ordinal equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct OrdE0 {
    monos: Vec<Mono>,
}

impl OrdE0 {
    pub fn zero() -> Self {
        OrdE0 { monos: Vec::new() }
    }

    pub fn one() -> Self {
        Self::nat(1u32)
    }

    pub fn nat(n: impl Into<Nat>) -> Self {
        let n = n.into();
        if n.is_zero() {
            Self::zero()
        } else {
            Self::monomial(Self::zero(), n)
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `ω^exp`.
    pub fn omega_pow(exp: OrdE0) -> Self {
        Self::monomial(exp, Nat::one())
    }

    /// `ω^exp · coeff`; zero when `coeff` is zero.
    pub fn monomial(exp: OrdE0, coeff: impl Into<Nat>) -> Self {
        let coeff = coeff.into();
        if coeff.is_zero() {
            return Self::zero();
        }
        OrdE0 {
            monos: vec![Mono { exp, coeff }],
        }
    }

    /// Builds from monomials, checking the normal-form invariants.
    pub fn from_monos(monos: Vec<Mono>) -> Result<Self, OrdError> {
        for m in &monos {
            if m.coeff.is_zero() {
                return Err(OrdError::NotNormalForm("zero coefficient".into()));
            }
        }
        for w in monos.windows(2) {
            if w[0].exp <= w[1].exp {
                return Err(OrdError::NotNormalForm(
                    "exponents must be strictly decreasing".into(),
                ));
            }
        }
        Ok(OrdE0 { monos })
    }

    pub fn monos(&self) -> &[Mono] {
        &self.monos
    }

    pub fn is_zero(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.monos.iter().all(|m| m.exp.is_zero())
    }

    /// The value as a natural number, if finite.
    pub fn as_nat(&self) -> Option<Nat> {
        match self.monos.as_slice() {
            [] => Some(Nat::zero()),
            [m] if m.exp.is_zero() => Some(m.coeff.clone()),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        self.as_nat().and_then(|n| n.to_u64())
    }

    pub fn is_successor(&self) -> bool {
        self.monos.last().is_some_and(|m| m.exp.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    /// `ξ − 1` for a successor, `None` otherwise.
    pub fn pred(&self) -> Option<Self> {
        if !self.is_successor() {
            return None;
        }
        let mut out = self.clone();
        let last = out.monos.last_mut().unwrap();
        last.coeff -= 1u32;
        if last.coeff.is_zero() {
            out.monos.pop();
        }
        Some(out)
    }

    pub fn succ(&self) -> Self {
        self.add(&Self::one())
    }

    /// Splits `ξ = α + b` with `α` zero or a limit and `b` finite.
    pub fn split_finite(&self) -> (Self, Nat) {
        if self.is_successor() {
            let mut head = self.clone();
            let b = head.monos.pop().unwrap().coeff;
            (head, b)
        } else {
            (self.clone(), Nat::zero())
        }
    }

    /// Nesting height of the normal-form tree: 0 for zero, 1 for positive integers.
    pub fn height(&self) -> usize {
        self.monos
            .iter()
            .map(|m| 1 + m.exp.height())
            .max()
            .unwrap_or(0)
    }

    /// Number of nodes in the normal-form tree.
    pub fn size(&self) -> usize {
        1 + self.monos.iter().map(|m| 1 + m.exp.size()).sum::<usize>()
    }

    /// Ordinal sum; the left summand's tail is absorbed by the right's leading term.
    pub fn add(&self, other: &Self) -> Self {
        let Some(lead) = other.monos.first() else {
            return self.clone();
        };
        let mut monos: Vec<Mono> = self
            .monos
            .iter()
            .take_while(|m| m.exp >= lead.exp)
            .cloned()
            .collect();
        match monos.last_mut() {
            Some(last) if last.exp == lead.exp => {
                last.coeff += &lead.coeff;
                monos.extend(other.monos[1..].iter().cloned());
            }
            _ => monos.extend(other.monos.iter().cloned()),
        }
        OrdE0 { monos }
    }

    /// `Coeffs(0) = {0}`, `Coeffs(ω^α·θ + β) = Coeffs(α) ∪ Coeffs(β) ∪ {θ}`.
    pub fn coeffs(&self) -> BTreeSet<Nat> {
        let mut out = BTreeSet::new();
        self.collect_coeffs(&mut out);
        out
    }

    fn collect_coeffs(&self, out: &mut BTreeSet<Nat>) {
        out.insert(Nat::zero());
        for m in &self.monos {
            out.insert(m.coeff.clone());
            m.exp.collect_coeffs(out);
        }
    }

    pub fn max_coeff(&self) -> Nat {
        self.monos
            .iter()
            .map(|m| m.coeff.clone().max(m.exp.max_coeff()))
            .max()
            .unwrap_or_default()
    }

    /// The terminal part τ: 0, 1, a limit, or ω.
    pub fn terminal_part(&self) -> Self {
        let Some(last) = self.monos.last() else {
            return Self::zero();
        };
        if last.exp.is_zero() {
            Self::one()
        } else if last.exp.is_successor() {
            Self::omega()
        } else {
            last.exp.terminal_part()
        }
    }

    /// The fundamental sequence `ξ[θ]`, total in `θ`.
    pub fn fund_seq(&self, theta: &Nat) -> Self {
        let Some((last, init)) = self.monos.split_last() else {
            return Self::zero();
        };
        let head = OrdE0 {
            monos: init.to_vec(),
        };
        head.add(&Self::fund_seq_mono(&last.exp, &last.coeff, theta))
    }

    pub fn fund_seq_u(&self, theta: u64) -> Self {
        self.fund_seq(&Nat::from(theta))
    }

    fn fund_seq_mono(exp: &Self, coeff: &Nat, theta: &Nat) -> Self {
        if !coeff.is_one() {
            let lower = Self::monomial(exp.clone(), coeff - 1u32);
            return lower.add(&Self::fund_seq_mono(exp, &Nat::one(), theta));
        }
        if exp.is_zero() {
            Self::zero()
        } else if let Some(d) = exp.pred() {
            Self::monomial(d, theta.clone())
        } else {
            Self::omega_pow(exp.fund_seq(theta))
        }
    }

    /// The ceiling ⌈ξ⌉, a left inverse of the fundamental sequences at limits of terminal part ω.
    pub fn ceil(&self) -> Self {
        let Some((last, init)) = self.monos.split_last() else {
            return Self::zero();
        };
        let head = OrdE0 {
            monos: init.to_vec(),
        };
        let top = if last.coeff.is_one() {
            Self::omega_pow(last.exp.ceil())
        } else {
            Self::omega_pow(last.exp.succ())
        };
        head.add(&top)
    }

    /// Finds `(α′, q′)` with `q′ ≥ q`, `α′ = β[q′]` and `α′` a truncation of `α`.
    ///
    /// The proof's case analysis yields a candidate index; the least valid
    /// index at or below it is returned.
    pub fn truncation_witness(
        alpha: &Self,
        beta: &Self,
        q: &Nat,
    ) -> Result<TruncWitness, OrdError> {
        if !beta.is_limit() {
            return Err(OrdError::Precondition("β must be a limit".into()));
        }
        if &beta.fund_seq(q) > alpha || alpha > beta {
            return Err(OrdError::Precondition("need β[q] ≤ α ≤ β".into()));
        }
        let allowed = alpha.coeffs();
        let valid = |qq: &Nat| {
            let t = beta.fund_seq(qq);
            t <= *alpha && is_truncation_coeffs(&t, &allowed)
        };
        let upper = if alpha == beta {
            // Outside the constructive argument; only a bounded scan can help.
            let hi = q.clone().max(alpha.max_coeff()).max(Nat::one());
            let mut qq = q.clone();
            loop {
                if valid(&qq) {
                    break qq;
                }
                if qq >= hi {
                    return Err(OrdError::Precondition(
                        "no truncation on the sequence when α = β".into(),
                    ));
                }
                qq += 1u32;
            }
        } else {
            trunc_index(alpha, beta)
        };
        let mut best = upper;
        let mut qq = q.clone();
        while qq < best {
            if valid(&qq) {
                best = qq;
                break;
            }
            qq += 1u32;
        }
        Ok(TruncWitness {
            truncated: beta.fund_seq(&best),
            index: best,
        })
    }

    pub fn to_json(&self) -> Value {
        let monos: Vec<Value> = self
            .monos
            .iter()
            .map(|m| json!({"exp": m.exp.to_json(), "coeff": m.coeff.to_string()}))
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
            let coeff = m
                .get("coeff")
                .and_then(Value::as_str)
                .and_then(|s| s.parse::<Nat>().ok())
                .ok_or_else(bad)?;
            monos.push(Mono { exp, coeff });
        }
        Self::from_monos(monos)
    }
}

fn is_truncation_coeffs(t: &OrdE0, allowed: &BTreeSet<Nat>) -> bool {
    t.coeffs()
        .iter()
        .all(|c| c <= &Nat::one() || allowed.contains(c))
}

/// Index produced by the constructive case analysis; assumes `β[q] ≤ α < β`.
fn trunc_index(alpha: &OrdE0, beta: &OrdE0) -> Nat {
    let b = &beta.monos[0];
    let rest_b = OrdE0 {
        monos: beta.monos[1..].to_vec(),
    };
    let strip = |a: &OrdE0, n: usize| OrdE0 {
        monos: a.monos[n..].to_vec(),
    };
    if !rest_b.is_zero() {
        return trunc_index(&strip(alpha, 1), &rest_b);
    }
    if !b.coeff.is_one() {
        let unit = OrdE0::omega_pow(b.exp.clone());
        return trunc_index(&strip(alpha, 1), &unit);
    }
    if b.exp.is_successor() {
        alpha.monos[0].coeff.clone()
    } else {
        trunc_index(&alpha.monos[0].exp, &b.exp)
    }
}

/// Output of [`OrdE0::truncation_witness`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncWitness {
    pub truncated: OrdE0,
    pub index: Nat,
}

impl Ord for OrdE0 {
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

impl PartialOrd for OrdE0 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for OrdE0 {
    fn from(n: u64) -> Self {
        Self::nat(n)
    }
}

impl fmt::Display for OrdE0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, m) in self.monos.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if m.exp.is_zero() {
                write!(f, "{}", m.coeff)?;
                continue;
            }
            if m.exp == OrdE0::one() {
                f.write_str("w")?;
            } else {
                write!(f, "w^({})", m.exp)?;
            }
            if !m.coeff.is_one() {
                write!(f, "*{}", m.coeff)?;
            }
        }
        Ok(())
    }
}

impl FromStr for OrdE0 {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut p = Parser::new(s);
        let v = p.e0()?;
        p.finish()?;
        Ok(v)
    }
}

/// Whitespace-skipping cursor shared by the text grammars of the crate.
pub(crate) struct Parser<'a> {
    src: Vec<char>,
    pos: usize,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Parser {
            src: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            _text: text,
        }
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{c}'")))
        }
    }

    pub(crate) fn syntax(&self, msg: String) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.syntax("trailing input".into()))
        }
    }

    pub(crate) fn nat(&mut self) -> Result<Nat, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected a number".into()));
        }
        let digits: String = self.src[start..self.pos].iter().collect();
        Ok(digits.parse().expect("digits"))
    }

    fn e0(&mut self) -> Result<OrdE0, ParseError> {
        let mut monos = Vec::new();
        loop {
            monos.push(self.mono()?);
            if !self.eat('+') {
                break;
            }
        }
        if let [m] = monos.as_slice() {
            if m.coeff.is_zero() {
                return Ok(OrdE0::zero());
            }
        }
        OrdE0::from_monos(monos).map_err(|e| ParseError::NotNormalForm(e.to_string()))
    }

    fn mono(&mut self) -> Result<Mono, ParseError> {
        if self.eat('w') {
            let exp = if self.eat('^') {
                self.expect('(')?;
                let e = self.e0()?;
                self.expect(')')?;
                e
            } else {
                OrdE0::one()
            };
            let coeff = if self.eat('*') {
                self.nat()?
            } else {
                Nat::one()
            };
            Ok(Mono { exp, coeff })
        } else {
            let coeff = self.nat()?;
            Ok(Mono {
                exp: OrdE0::zero(),
                coeff,
            })
        }
    }
}

/// Bounds of the finite corpus `E(H, C)`.
///
/// `width` caps the number of monomials in the outermost sum and
/// `inner_width` the number inside exponents.
#[derive(Clone, Copy, Debug)]
pub struct Corpus {
    pub height: usize,
    pub max_coeff: u64,
    pub width: usize,
    pub inner_width: usize,
}

impl Corpus {
    pub fn new(height: usize, max_coeff: u64) -> Self {
        Corpus {
            height,
            max_coeff,
            width: 2,
            inner_width: 1,
        }
    }

    /// All ordinals within the bounds, sorted increasingly.
    pub fn enumerate(&self) -> Vec<OrdE0> {
        let mut out = enumerate_level(self.height, self.max_coeff, self.width, self.inner_width);
        out.sort();
        out
    }
}

fn enumerate_level(height: usize, c: u64, width: usize, inner: usize) -> Vec<OrdE0> {
    if height == 0 {
        return vec![OrdE0::zero()];
    }
    let mut exps = enumerate_level(height - 1, c, inner, inner);
    exps.sort();
    exps.reverse();
    let mut out = Vec::new();
    let mut acc = Vec::new();
    sums(&exps, 0, c, width, &mut acc, &mut out);
    out
}

fn sums(
    exps: &[OrdE0],
    from: usize,
    c: u64,
    width: usize,
    acc: &mut Vec<Mono>,
    out: &mut Vec<OrdE0>,
) {
    out.push(OrdE0 { monos: acc.clone() });
    if acc.len() == width {
        return;
    }
    for i in from..exps.len() {
        for coeff in 1..=c {
            acc.push(Mono {
                exp: exps[i].clone(),
                coeff: Nat::from(coeff),
            });
            sums(exps, i + 1, c, width, acc, out);
            acc.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> OrdE0 {
        s.parse().unwrap()
    }

    fn n(k: u64) -> Nat {
        Nat::from(k)
    }

    #[test]
    fn comparisons() {
        assert_eq!(o("w^(w)").cmp(&o("w*5")), Ordering::Greater);
        assert_eq!(OrdE0::zero().cmp(&OrdE0::zero()), Ordering::Equal);
        assert_eq!(o("w^(2)*3+w").cmp(&o("w^(2)*3+2")), Ordering::Greater);
    }

    #[test]
    fn sums() {
        assert_eq!(o("w").add(&o("1")), o("w+1"));
        assert_eq!(o("3").add(&o("w")), o("w"));
        assert_eq!(o("w^(2)+w").add(&o("w^(2)")), o("w^(2)*2"));
    }

    #[test]
    fn coefficients() {
        assert_eq!(OrdE0::zero().coeffs(), [n(0)].into());
        assert_eq!(o("w^(w^(2)*3)*2+w*4").coeffs(), (0..=4).map(n).collect());
        assert_eq!(o("w").coeffs(), [n(0), n(1)].into());
        assert_eq!(o("w").max_coeff(), n(1));
        assert_eq!(OrdE0::zero().max_coeff(), n(0));
        assert_eq!(o("w^(w^(2)*3)*2+w*4").max_coeff(), n(4));
    }

    #[test]
    fn terminal_parts() {
        assert_eq!(o("w^(w+1)*2").terminal_part(), OrdE0::omega());
        assert_eq!(o("w^(w)+7").terminal_part(), OrdE0::one());
        assert_eq!(o("w^(w)").terminal_part(), OrdE0::omega());
        assert_eq!(OrdE0::zero().terminal_part(), OrdE0::zero());
    }

    #[test]
    fn fundamental_sequences() {
        for k in 0..6 {
            assert_eq!(OrdE0::omega().fund_seq_u(k), OrdE0::nat(k));
        }
        assert_eq!(o("w^(w)").fund_seq_u(3), o("w^(3)"));
        assert_eq!(o("w^(2)*2").fund_seq_u(4), o("w^(2)+w*4"));
        assert_eq!(o("5").fund_seq_u(9), o("4"));
        assert_eq!(o("1").fund_seq_u(9), o("0"));
    }

    #[test]
    fn ceilings() {
        assert_eq!(o("w*3").ceil(), o("w^(2)"));
        assert_eq!(o("w^(w)").fund_seq_u(3).ceil(), o("w^(w)"));
        assert_eq!(OrdE0::zero().ceil(), OrdE0::zero());
        assert_eq!(o("1").ceil(), o("1"));
    }

    #[test]
    fn truncations() {
        let w = OrdE0::truncation_witness(&o("w*5+2"), &o("w^(2)"), &n(3)).unwrap();
        assert_eq!((w.truncated, w.index), (o("w*5"), n(5)));
        let b = o("w^(3)");
        let a = b.fund_seq_u(4);
        let w = OrdE0::truncation_witness(&a, &b, &n(4)).unwrap();
        assert_eq!((w.truncated, w.index), (a, n(4)));
        let w = OrdE0::truncation_witness(&o("w^(2)*2+w*3"), &b, &n(2)).unwrap();
        assert_eq!((w.truncated, w.index), (o("w^(2)*2"), n(2)));
        assert!(OrdE0::truncation_witness(&o("w"), &b, &n(2)).is_err());
    }

    #[test]
    fn text_round_trip() {
        assert_eq!(
            o("w^(w)*2+3"),
            OrdE0::monomial(OrdE0::omega(), 2u32).add(&OrdE0::nat(3u32))
        );
        assert_eq!(o("0"), OrdE0::zero());
        assert!(matches!(
            "w+w".parse::<OrdE0>(),
            Err(ParseError::NotNormalForm(_))
        ));
        assert!(matches!(
            "w+".parse::<OrdE0>(),
            Err(ParseError::Syntax { .. })
        ));
        for s in ["w^(w^(2)+1)*3+w+4", "w^(w)", "17", "w*2"] {
            assert_eq!(o(s).to_string(), s);
        }
        assert_eq!(o(" w ^ ( 1 ) * 1 ").to_string(), "w");
    }

    #[test]
    fn json_round_trip() {
        let a = o("w^(w+1)*12345678901234567890+3");
        assert_eq!(OrdE0::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn corpus_is_normal_and_unique() {
        let e = Corpus::new(3, 2).enumerate();
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert!(e.iter().all(|x| x.height() <= 3 && x.max_coeff() <= n(2)));
    }
}
