//! Bigraded-commutative rings presented by generators, Steenrod operations defined on
//! generators by tables and extended by the Cartan formula, ideal saturation under the
//! operations, and classifiers for the degree-two ideal dichotomies.
//!
//! Operation indices are stored doubled: `i2 = 2i`, so half-integer indices are odd.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{FieldElement, FieldRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SteenrodError {
    #[error("element is not homogeneous")]
    Inhomogeneous,
    #[error("index {i2}/2 does not match internal degree {t}")]
    IndexParity { i2: i32, t: u8 },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid ring parameters: {0}")]
    InvalidParameters(String),
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
}

pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BigradedGen {
    pub name: String,
    pub s: u32,
    pub t: u8,
}

impl BigradedGen {
    pub fn new(name: impl Into<String>, s: u32, t: u8) -> Self {
        BigradedGen { name: name.into(), s, t }
    }

    /// Squares to zero: total degree odd.
    pub fn is_exterior(&self) -> bool {
        (self.s + self.t as u32) % 2 == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    P,
    #[serde(rename = "betaP")]
    BetaP,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::P => "P",
            Op::BetaP => "betaP",
        })
    }
}

impl std::str::FromStr for Op {
    type Err = SteenrodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P" | "p" => Ok(Op::P),
            "betaP" | "bP" | "beta" => Ok(Op::BetaP),
            other => Err(SteenrodError::Parse {
                pos: 0,
                msg: format!("unknown operation `{other}`"),
            }),
        }
    }
}

/// Sign in the Cartan formula for `βP`: `βP(xy) = βP(x)P(y) + ε P(x)βP(y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CartanConvention {
    /// `ε = 1`.
    Printed,
    /// `ε = (−1)^{|x|}`.
    Koszul,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SteenrodElement {
    pub terms: BTreeMap<Monomial, FieldElement>,
}

impl SteenrodElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &[u32]) -> FieldElement {
        self.terms.get(m).copied().unwrap_or(FieldElement::ZERO)
    }

    fn add_term(&mut self, f: &FieldRef, m: Monomial, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = f.add(*o.get(), c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn leading(&self) -> Option<(&Monomial, FieldElement)> {
        self.terms.iter().next().map(|(m, &c)| (m, c))
    }
}

/// Per-generator values of `P^{i2/2}` and `βP^{i2/2}`. Entries absent from the table
/// follow the vanishing bounds and the top-power rule.
#[derive(Clone, Debug, Default, Serialize)]
pub struct OpTable {
    entries: BTreeMap<(usize, Op, i32), SteenrodElement>,
}

impl OpTable {
    pub fn set(&mut self, gen: usize, op: Op, i2: i32, value: SteenrodElement) {
        self.entries.insert((gen, op, i2), value);
    }

    pub fn get(&self, gen: usize, op: Op, i2: i32) -> Option<&SteenrodElement> {
        self.entries.get(&(gen, op, i2))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, Op, i32), &SteenrodElement)> {
        self.entries.iter()
    }
}

/// Parameters of the ring `k[x_1..x_r]⊗Λ(λ_1..λ_r)⊗k[ζ]^ε⊗k[z_1..z_s]⊗Λ(y_1..y_s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardShape {
    pub r: usize,
    pub s: usize,
    pub eps: bool,
}

type OpCache = Mutex<HashMap<(Op, i32, Monomial), SteenrodElement>>;

pub struct SteenrodRing {
    name: String,
    field: FieldRef,
    gens: Vec<BigradedGen>,
    table: OpTable,
    convention: CartanConvention,
    shape: Option<StandardShape>,
    cache: OpCache,
}

impl fmt::Debug for SteenrodRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SteenrodRing")
            .field("name", &self.name)
            .field("gens", &self.gens.iter().map(|g| &g.name).collect::<Vec<_>>())
            .field("convention", &self.convention)
            .finish()
    }
}

impl Clone for SteenrodRing {
    fn clone(&self) -> Self {
        SteenrodRing {
            name: self.name.clone(),
            field: self.field.clone(),
            gens: self.gens.clone(),
            table: self.table.clone(),
            convention: self.convention,
            shape: self.shape,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl SteenrodRing {
    pub fn new(name: impl Into<String>, field: &FieldRef, gens: Vec<BigradedGen>, table: OpTable) -> Self {
        SteenrodRing {
            name: name.into(),
            field: field.clone(),
            gens,
            table,
            convention: CartanConvention::Koszul,
            shape: None,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_convention(mut self, c: CartanConvention) -> Self {
        self.convention = c;
        self.cache = Mutex::new(HashMap::new());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn generators(&self) -> &[BigradedGen] {
        &self.gens
    }

    pub fn table(&self) -> &OpTable {
        &self.table
    }

    pub fn convention(&self) -> CartanConvention {
        self.convention
    }

    pub fn shape(&self) -> Option<StandardShape> {
        self.shape
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    // ---- arithmetic ----

    pub fn zero(&self) -> SteenrodElement {
        SteenrodElement::default()
    }

    pub fn one(&self) -> SteenrodElement {
        self.monomial(vec![0; self.gens.len()])
    }

    pub fn constant(&self, c: FieldElement) -> SteenrodElement {
        self.scale(c, &self.one())
    }

    pub fn monomial(&self, m: Monomial) -> SteenrodElement {
        let mut e = SteenrodElement::default();
        if m.iter().zip(&self.gens).all(|(&k, g)| k <= 1 || !g.is_exterior()) {
            e.terms.insert(m, self.field.one());
        }
        e
    }

    pub fn gen(&self, i: usize) -> SteenrodElement {
        let mut m = vec![0; self.gens.len()];
        m[i] = 1;
        self.monomial(m)
    }

    pub fn gen_named(&self, name: &str) -> Result<SteenrodElement, SteenrodError> {
        self.generator_index(name)
            .map(|i| self.gen(i))
            .ok_or_else(|| SteenrodError::UnknownGenerator(name.into()))
    }

    pub fn add(&self, a: &SteenrodElement, b: &SteenrodElement) -> SteenrodElement {
        let mut out = a.clone();
        for (m, &c) in &b.terms {
            out.add_term(&self.field, m.clone(), c);
        }
        out
    }

    pub fn neg(&self, a: &SteenrodElement) -> SteenrodElement {
        self.scale(self.field.neg(self.field.one()), a)
    }

    pub fn sub(&self, a: &SteenrodElement, b: &SteenrodElement) -> SteenrodElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, c: FieldElement, a: &SteenrodElement) -> SteenrodElement {
        if c.is_zero() {
            return self.zero();
        }
        SteenrodElement {
            terms: a.terms.iter().map(|(m, &x)| (m.clone(), self.field.mul(c, x))).collect(),
        }
    }

    /// Canonical product of two monomials: `(sign, monomial)` or `None` if it vanishes.
    pub fn mul_monomials(&self, a: &[u32], b: &[u32]) -> Option<(bool, Monomial)> {
        let mut sign = 0u32;
        let mut out = Vec::with_capacity(a.len());
        for (j, g) in self.gens.iter().enumerate() {
            let e = a[j] + b[j];
            if g.is_exterior() && e > 1 {
                return None;
            }
            out.push(e);
            if b[j] == 0 {
                continue;
            }
            for (i, h) in self.gens.iter().enumerate().skip(j + 1) {
                if a[i] != 0 {
                    sign += b[j] * a[i] * ((g.s * h.s + (g.t * h.t) as u32) % 2);
                }
            }
        }
        Some((sign % 2 == 1, out))
    }

    pub fn mul(&self, a: &SteenrodElement, b: &SteenrodElement) -> SteenrodElement {
        let f = &self.field;
        let mut out = SteenrodElement::default();
        for (ma, &ca) in &a.terms {
            for (mb, &cb) in &b.terms {
                if let Some((neg, m)) = self.mul_monomials(ma, mb) {
                    let c = f.mul(ca, cb);
                    out.add_term(f, m, if neg { f.neg(c) } else { c });
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &SteenrodElement, n: u32) -> SteenrodElement {
        let mut out = self.one();
        for _ in 0..n {
            out = self.mul(&out, a);
        }
        out
    }

    pub fn monomial_bidegree(&self, m: &[u32]) -> (u32, u8) {
        let s = m.iter().zip(&self.gens).map(|(&e, g)| e * g.s).sum();
        let t = m.iter().zip(&self.gens).map(|(&e, g)| e * g.t as u32).sum::<u32>() % 2;
        (s, t as u8)
    }

    /// Bidegree of a homogeneous element; `Ok(None)` for zero.
    pub fn bidegree(&self, a: &SteenrodElement) -> Result<Option<(u32, u8)>, SteenrodError> {
        let mut degs = a.terms.keys().map(|m| self.monomial_bidegree(m));
        let Some(first) = degs.next() else {
            return Ok(None);
        };
        if degs.any(|d| d != first) {
            return Err(SteenrodError::Inhomogeneous);
        }
        Ok(Some(first))
    }

    /// Split into homogeneous components.
    pub fn components(&self, a: &SteenrodElement) -> BTreeMap<(u32, u8), SteenrodElement> {
        let mut out: BTreeMap<(u32, u8), SteenrodElement> = BTreeMap::new();
        for (m, &c) in &a.terms {
            out.entry(self.monomial_bidegree(m)).or_default().terms.insert(m.clone(), c);
        }
        out
    }

    /// Every monomial of bidegree `(s, t)`.
    pub fn monomials_of(&self, s: u32, t: u8) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0; self.gens.len()];
        self.enumerate_monomials(0, s, &mut cur, &mut out);
        out.retain(|m| self.monomial_bidegree(m).1 == t);
        out.sort();
        out
    }

    fn enumerate_monomials(&self, i: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i == self.gens.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let g = &self.gens[i];
        let max = left.checked_div(g.s).unwrap_or(0);
        let max = if g.is_exterior() { max.min(1) } else { max };
        for e in 0..=max {
            cur[i] = e;
            self.enumerate_monomials(i + 1, left - e * g.s, cur, out);
        }
        cur[i] = 0;
    }

    // ---- operations ----

    fn generator_op(&self, g: usize, op: Op, i2: i32) -> SteenrodElement {
        let s = self.gens[g].s as i32;
        let out_of_range = match op {
            Op::P => i2 < 0 || i2 > s,
            Op::BetaP => i2 < 0 || i2 >= s,
        };
        if out_of_range {
            return self.zero();
        }
        if let Some(v) = self.table.get(g, op, i2) {
            return v.clone();
        }
        if op == Op::P && i2 == s {
            let p = self.field.characteristic();
            return self.pow(&self.gen(g), p);
        }
        self.zero()
    }

    fn monomial_op(&self, op: Op, i2: i32, m: &[u32]) -> SteenrodElement {
        let Some(first) = m.iter().position(|&e| e > 0) else {
            return if op == Op::P && i2 == 0 { self.one() } else { self.zero() };
        };
        if m.iter().sum::<u32>() == 1 {
            return self.generator_op(first, op, i2);
        }
        let key = (op, i2, m.to_vec());
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return v.clone();
        }
        let gx = &self.gens[first];
        let mut rest = m.to_vec();
        rest[first] -= 1;
        let (sy, _) = self.monomial_bidegree(&rest);
        let sx = gx.s as i32;
        let mut out = self.zero();
        let mut i = gx.t as i32 % 2;
        while i <= sx {
            let j = i2 - i;
            if j >= 0 && j <= sy as i32 {
                match op {
                    Op::P => {
                        let a = self.generator_op(first, Op::P, i);
                        if !a.is_zero() {
                            out = self.add(&out, &self.mul(&a, &self.monomial_op(Op::P, j, &rest)));
                        }
                    }
                    Op::BetaP => {
                        let a = self.generator_op(first, Op::BetaP, i);
                        if !a.is_zero() {
                            out = self.add(&out, &self.mul(&a, &self.monomial_op(Op::P, j, &rest)));
                        }
                        let b = self.generator_op(first, Op::P, i);
                        if !b.is_zero() {
                            let mut term = self.mul(&b, &self.monomial_op(Op::BetaP, j, &rest));
                            if self.convention == CartanConvention::Koszul && sx % 2 == 1 {
                                term = self.neg(&term);
                            }
                            out = self.add(&out, &term);
                        }
                    }
                }
            }
            i += 2;
        }
        self.cache.lock().expect("cache lock").insert(key, out.clone());
        out
    }

    /// `P^{i2/2}(u)` or `βP^{i2/2}(u)` for homogeneous `u`.
    pub fn apply_op(&self, op: Op, i2: i32, u: &SteenrodElement) -> Result<SteenrodElement, SteenrodError> {
        let Some((_, t)) = self.bidegree(u)? else {
            return Ok(self.zero());
        };
        if i2.rem_euclid(2) as u8 != t {
            return Err(SteenrodError::IndexParity { i2, t });
        }
        let f = &self.field;
        let p = f.characteristic() as u64;
        let mut out = self.zero();
        for (m, &c) in &u.terms {
            let v = self.monomial_op(op, i2, m);
            out = self.add(&out, &self.scale(f.pow(c, p), &v));
        }
        Ok(out)
    }

    /// Indices `i2` for which the operation can be nonzero on bidegree `(s, t)`.
    pub fn op_indices(&self, op: Op, s: u32, t: u8) -> Vec<i32> {
        let top = match op {
            Op::P => s as i32,
            Op::BetaP => s as i32 - 1,
        };
        (t as i32..=top).step_by(2).collect()
    }

    /// Cohomological degree of `op^{i2/2}` applied in degree `s`.
    pub fn op_degree(&self, op: Op, i2: i32, s: u32) -> u32 {
        let p = self.field.characteristic();
        s + i2 as u32 * (p - 1) + u32::from(op == Op::BetaP)
    }

    // ---- text ----

    pub fn display(&self, a: &SteenrodElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        let p = f.characteristic();
        let mut out = String::new();
        for (k, (m, &c)) in a.terms.iter().enumerate() {
            let mono: Vec<String> = m
                .iter()
                .zip(&self.gens)
                .filter(|(&e, _)| e > 0)
                .map(|(&e, g)| if e == 1 { g.name.clone() } else { format!("{}^{e}", g.name) })
                .collect();
            let mono = mono.join("*");
            let (negative, coef) = if f.is_prime_field() && c.code() > p / 2 {
                (true, p - c.code())
            } else {
                (false, 0)
            };
            let coef_str = if f.is_prime_field() {
                let v = if negative { coef } else { c.code() };
                if v == 1 && !mono.is_empty() {
                    String::new()
                } else {
                    v.to_string()
                }
            } else if c == f.one() && !mono.is_empty() {
                String::new()
            } else {
                format!("({})", f.display(c))
            };
            let body = match (coef_str.is_empty(), mono.is_empty()) {
                (true, _) => mono,
                (false, true) => coef_str,
                (false, false) => format!("{coef_str}*{mono}"),
            };
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }

    /// Parse `names`, `^`, `*`, `+`, `-`, parentheses and integer coefficients.
    /// Over a non-prime field `t` denotes the field generator.
    pub fn parse(&self, text: &str) -> Result<SteenrodElement, SteenrodError> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { ring: self, tokens, pos: 0 };
        let e = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

// ---- parser ----

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, SteenrodError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse().map_err(|_| SteenrodError::Parse {
                pos: start,
                msg: "integer too large".into(),
            })?;
            out.push((start, Tok::Int(v)));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(SteenrodError::Parse {
                pos: i,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a SteenrodRing,
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> SteenrodError {
        SteenrodError::Parse {
            pos: self.tokens.get(self.pos).map(|t| t.0).unwrap_or(usize::MAX),
            msg: msg.into(),
        }
    }

    fn peek_sym(&self, c: char) -> bool {
        matches!(self.tokens.get(self.pos), Some((_, Tok::Sym(x))) if *x == c)
    }

    fn expr(&mut self) -> Result<SteenrodElement, SteenrodError> {
        let r = self.ring;
        let mut negate = false;
        if self.peek_sym('-') {
            negate = true;
            self.pos += 1;
        } else if self.peek_sym('+') {
            self.pos += 1;
        }
        let first = self.term()?;
        let mut acc = if negate { r.neg(&first) } else { first };
        loop {
            if self.peek_sym('+') {
                self.pos += 1;
                acc = r.add(&acc, &self.term()?);
            } else if self.peek_sym('-') {
                self.pos += 1;
                acc = r.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SteenrodElement, SteenrodError> {
        let mut acc = self.factor()?;
        while self.peek_sym('*') {
            self.pos += 1;
            acc = self.ring.mul(&acc, &self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SteenrodElement, SteenrodError> {
        let base = self.atom()?;
        if self.peek_sym('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some((_, Tok::Int(n))) => {
                    let n = u32::try_from(*n).map_err(|_| self.error("exponent too large"))?;
                    self.pos += 1;
                    return Ok(self.ring.pow(&base, n));
                }
                _ => return Err(self.error("expected integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SteenrodElement, SteenrodError> {
        let r = self.ring;
        let f = r.field();
        match self.tokens.get(self.pos).cloned() {
            Some((_, Tok::Int(n))) => {
                self.pos += 1;
                Ok(r.constant(f.from_int((n % f.characteristic() as u64) as i64)))
            }
            Some((_, Tok::Ident(name))) => {
                self.pos += 1;
                if let Some(i) = r.generator_index(&name) {
                    Ok(r.gen(i))
                } else if name == "t" && !f.is_prime_field() {
                    Ok(r.constant(f.from_coefficients(&[0, 1])))
                } else {
                    Err(SteenrodError::UnknownGenerator(name))
                }
            }
            Some((_, Tok::Sym('('))) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.peek_sym(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.error("expected a name, integer or `(`")),
        }
    }
}

// ---- the presented rings ----

/// `k[x_1..x_r]⊗Λ(λ_1..λ_r)⊗k[ζ]^ε⊗k[z_1..z_s]⊗Λ(y_1..y_s)` with the standard table.
/// Generator names: `x1.., l1.., zeta, z1.., y1..`.
pub fn standard_ring(r: usize, s: usize, eps: bool, field: &FieldRef) -> SteenrodRing {
    let mut gens = Vec::new();
    gens.extend((1..=r).map(|i| BigradedGen::new(format!("x{i}"), 2, 0)));
    gens.extend((1..=r).map(|i| BigradedGen::new(format!("l{i}"), 1, 0)));
    if eps {
        gens.push(BigradedGen::new("zeta", 1, 1));
    }
    gens.extend((1..=s).map(|j| BigradedGen::new(format!("z{j}"), 2, 0)));
    gens.extend((1..=s).map(|j| BigradedGen::new(format!("y{j}"), 1, 0)));
    let name = format!("std:r={r},s={s},eps={}", u8::from(eps));
    let mut ring = SteenrodRing::new(name, field, gens, OpTable::default());
    let idx = |n: &str| ring.generator_index(n).expect("generator");
    let mut table = OpTable::default();
    let p = field.characteristic();
    for i in 1..=r {
        let x = idx(&format!("x{i}"));
        let l = idx(&format!("l{i}"));
        let (next_l, next_x) = if i < r {
            (ring.gen(idx(&format!("l{}", i + 1))), ring.gen(idx(&format!("x{}", i + 1))))
        } else {
            (ring.zero(), ring.zero())
        };
        table.set(l, Op::P, 0, next_l);
        table.set(l, Op::BetaP, 0, ring.neg(&ring.gen(x)));
        table.set(x, Op::P, 0, next_x);
        table.set(x, Op::BetaP, 0, ring.zero());
        table.set(x, Op::P, 2, ring.pow(&ring.gen(x), p));
    }
    if eps {
        let z = idx("zeta");
        table.set(z, Op::P, 1, ring.pow(&ring.gen(z), p));
        table.set(z, Op::BetaP, 1, ring.zero());
    }
    for j in 1..=s {
        let zj = idx(&format!("z{j}"));
        let yj = idx(&format!("y{j}"));
        table.set(yj, Op::P, 0, ring.gen(yj));
        table.set(yj, Op::BetaP, 0, ring.gen(zj));
        table.set(zj, Op::P, 0, ring.gen(zj));
        table.set(zj, Op::BetaP, 0, ring.zero());
        table.set(zj, Op::P, 2, ring.pow(&ring.gen(zj), p));
    }
    ring.table = table;
    ring.shape = Some(StandardShape { r, s, eps });
    ring
}

/// `k[x_1..x_n, ζ]⊗Λ(λ_1..λ_n)` with the table for `E⁻_{m,n}`.
/// Generator names: `x1.., l1.., zeta`.
pub fn emn_ring(m: usize, n: usize, field: &FieldRef) -> Result<SteenrodRing, SteenrodError> {
    if m < 2 || n < 1 {
        return Err(SteenrodError::InvalidParameters(format!("need m ≥ 2 and n ≥ 1, got m={m}, n={n}")));
    }
    let mut gens = Vec::new();
    gens.extend((1..=n).map(|i| BigradedGen::new(format!("x{i}"), 2, 0)));
    gens.extend((1..=n).map(|i| BigradedGen::new(format!("l{i}"), 1, 0)));
    gens.push(BigradedGen::new("zeta", 1, 1));
    let mut ring = SteenrodRing::new(format!("E-({m},{n})"), field, gens, OpTable::default());
    let p = field.characteristic();
    let zeta = 2 * n;
    let mut table = OpTable::default();
    for i in 0..n {
        let (x, l) = (i, n + i);
        if i + 1 < n {
            table.set(l, Op::P, 0, ring.gen(l + 1));
            table.set(l, Op::BetaP, 0, ring.neg(&ring.gen(x)));
            table.set(x, Op::P, 0, ring.gen(x + 1));
            table.set(x, Op::P, 2, ring.pow(&ring.gen(x), p));
        } else {
            table.set(l, Op::P, 0, ring.zero());
            table.set(l, Op::BetaP, 0, ring.neg(&ring.pow(&ring.gen(zeta), 2)));
            table.set(x, Op::P, 0, ring.zero());
            table.set(x, Op::P, 2, ring.zero());
        }
        table.set(x, Op::BetaP, 0, ring.zero());
    }
    table.set(zeta, Op::P, 1, ring.pow(&ring.gen(zeta), p));
    table.set(zeta, Op::BetaP, 1, ring.zero());
    ring.table = table;
    Ok(ring)
}

// ---- saturation ----

/// Row space with unique leading monomials.
#[derive(Clone, Debug, Default)]
struct SparseEchelon {
    rows: BTreeMap<Monomial, SteenrodElement>,
}

impl SparseEchelon {
    fn reduce(&self, f: &FieldRef, v: &SteenrodElement) -> SteenrodElement {
        let mut v = v.clone();
        let mut cursor: Option<Monomial> = None;
        loop {
            let next = match &cursor {
                None => v.terms.iter().find(|(m, _)| self.rows.contains_key(*m)),
                Some(c) => v
                    .terms
                    .range::<Monomial, _>((std::ops::Bound::Excluded(c), std::ops::Bound::Unbounded))
                    .find(|(m, _)| self.rows.contains_key(*m)),
            };
            let Some((m, &c)) = next else {
                return v;
            };
            let m = m.clone();
            let row = &self.rows[&m];
            for (k, &x) in &row.terms {
                v.add_term(f, k.clone(), f.neg(f.mul(c, x)));
            }
            cursor = Some(m);
        }
    }

    /// Insert; returns the reduced vector if it was new.
    fn insert(&mut self, f: &FieldRef, v: &SteenrodElement) -> Option<SteenrodElement> {
        let r = self.reduce(f, v);
        let (lead, c) = r.leading().map(|(m, c)| (m.clone(), c))?;
        let inv = f.inv(c).expect("nonzero");
        let normalized = SteenrodElement {
            terms: r.terms.iter().map(|(m, &x)| (m.clone(), f.mul(inv, x))).collect(),
        };
        self.rows.insert(lead, normalized.clone());
        Some(normalized)
    }

    fn contains(&self, f: &FieldRef, v: &SteenrodElement) -> bool {
        self.reduce(f, v).is_zero()
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Fully reduced basis in pivot order.
    fn reduced_basis(&self, f: &FieldRef) -> Vec<SteenrodElement> {
        let mut done: BTreeMap<Monomial, SteenrodElement> = BTreeMap::new();
        for (lead, row) in self.rows.iter().rev() {
            let mut r = row.clone();
            let tail: Vec<(Monomial, FieldElement)> = r
                .terms
                .iter()
                .filter(|(m, _)| *m != lead)
                .map(|(m, &c)| (m.clone(), c))
                .collect();
            for (m, _) in tail {
                let c = r.coefficient(&m);
                if c.is_zero() {
                    continue;
                }
                if let Some(other) = done.get(&m) {
                    for (k, &x) in &other.terms {
                        r.add_term(f, k.clone(), f.neg(f.mul(c, x)));
                    }
                }
            }
            done.insert(lead.clone(), r);
        }
        done.into_values().collect()
    }
}

/// The smallest homogeneous ideal containing the seeds and stable under every operation,
/// truncated at cohomological degree `bound`.
#[derive(Clone, Debug)]
pub struct SaturatedIdeal {
    field: FieldRef,
    bound: u32,
    slices: BTreeMap<(u32, u8), SparseEchelon>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceSummary {
    pub s: u32,
    pub t: u8,
    pub dim: usize,
}

impl SaturatedIdeal {
    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.slices.values().all(|e| e.dim() == 0)
    }

    pub fn dim(&self, s: u32, t: u8) -> usize {
        self.slices.get(&(s, t)).map_or(0, SparseEchelon::dim)
    }

    /// Reduced row-echelon basis of the `(s, t)` slice.
    pub fn basis(&self, s: u32, t: u8) -> Vec<SteenrodElement> {
        self.slices.get(&(s, t)).map_or_else(Vec::new, |e| e.reduced_basis(&self.field))
    }

    pub fn contains(&self, ring: &SteenrodRing, u: &SteenrodElement) -> bool {
        ring.components(u)
            .iter()
            .all(|(d, c)| self.slices.get(d).is_some_and(|e| e.contains(&self.field, c)))
    }

    pub fn summary(&self) -> Vec<SliceSummary> {
        self.slices
            .iter()
            .filter(|(_, e)| e.dim() > 0)
            .map(|(&(s, t), e)| SliceSummary { s, t, dim: e.dim() })
            .collect()
    }
}

pub fn saturate(ring: &SteenrodRing, seeds: &[SteenrodElement], bound: u32) -> Result<SaturatedIdeal, SteenrodError> {
    let f = ring.field().clone();
    let mut ideal = SaturatedIdeal {
        field: f.clone(),
        bound,
        slices: BTreeMap::new(),
    };
    let mut queue: VecDeque<SteenrodElement> = VecDeque::new();
    for seed in seeds {
        ring.bidegree(seed)?;
        queue.push_back(seed.clone());
    }
    while let Some(v) = queue.pop_front() {
        let Some((s, t)) = ring.bidegree(&v)? else {
            continue;
        };
        if s > bound {
            continue;
        }
        let Some(r) = ideal.slices.entry((s, t)).or_default().insert(&f, &v) else {
            continue;
        };
        for (g, gen) in ring.generators().iter().enumerate() {
            if s + gen.s <= bound {
                queue.push_back(ring.mul(&ring.gen(g), &r));
            }
        }
        for op in [Op::P, Op::BetaP] {
            for i2 in ring.op_indices(op, s, t) {
                if ring.op_degree(op, i2, s) <= bound {
                    queue.push_back(ring.apply_op(op, i2, &r)?);
                }
            }
        }
    }
    Ok(ideal)
}

/// Every operation and generator multiple of every basis element lands back in the ideal.
pub fn verify_stable(ring: &SteenrodRing, ideal: &SaturatedIdeal) -> Result<(), String> {
    for (&(s, t), ech) in &ideal.slices {
        for v in ech.rows.values() {
            for (g, gen) in ring.generators().iter().enumerate() {
                if s + gen.s <= ideal.bound && !ideal.contains(ring, &ring.mul(&ring.gen(g), v)) {
                    return Err(format!("{} · ({}) leaves the ideal", gen.name, ring.display(v)));
                }
            }
            for op in [Op::P, Op::BetaP] {
                for i2 in ring.op_indices(op, s, t) {
                    if ring.op_degree(op, i2, s) <= ideal.bound {
                        let w = ring.apply_op(op, i2, v).map_err(|e| e.to_string())?;
                        if !ideal.contains(ring, &w) {
                            return Err(format!("{op}^{i2}/2 ({}) leaves the ideal", ring.display(v)));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

// ---- classifiers ----

/// A product `x_r^n · βP^0(v_1)···βP^0(v_m)` found in an ideal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductWitness {
    pub n: u32,
    /// Coefficients of each `v_k` on `y_1..y_s`, normalized with leading coefficient one.
    pub factors: Vec<Vec<u32>>,
    pub element: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case")]
pub enum B36Outcome {
    #[serde(rename = "i")]
    CaseI(ProductWitness),
    #[serde(rename = "ii")]
    CaseII { gamma: u32, witness: String },
    #[serde(rename = "inconclusive")]
    Inconclusive { reason: String },
}

const CANDIDATE_GUARD: usize = 500_000;

/// Nonzero vectors of `F_p^s` with first nonzero entry one.
fn projective_points(p: u32, s: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let total = (p as usize).pow(s as u32);
    for code in 1..total {
        let mut v = Vec::with_capacity(s);
        let mut c = code;
        for _ in 0..s {
            v.push((c % p as usize) as u32);
            c /= p as usize;
        }
        v.reverse();
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(v);
        }
    }
    out
}

/// Multisets of size `m` from `0..k`, as nondecreasing index lists.
fn multisets(k: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(k: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(k, m, i, cur, out);
            cur.pop();
        }
    }
    rec(k, m, 0, &mut cur, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Search `x_r^n Π βP^0(v_k)` with `n + m = d` ascending, `m` ascending within `d`.
fn search_products(
    ring: &SteenrodRing,
    ideal: &SaturatedIdeal,
    shape: StandardShape,
    allow_x: bool,
) -> Result<Option<ProductWitness>, SteenrodError> {
    let f = ring.field();
    let p = f.characteristic();
    let points = projective_points(p, shape.s);
    let xr = (allow_x && shape.r > 0).then(|| ring.generator_index(&format!("x{}", shape.r)).expect("x_r"));
    let z: Vec<usize> = (1..=shape.s)
        .map(|j| ring.generator_index(&format!("z{j}")).expect("z_j"))
        .collect();
    let linear: Vec<SteenrodElement> = points
        .iter()
        .map(|v| {
            v.iter().zip(&z).fold(ring.zero(), |acc, (&c, &g)| {
                ring.add(&acc, &ring.scale(f.from_int(c as i64), &ring.gen(g)))
            })
        })
        .collect();
    for d in 1..=ideal.bound / 2 {
        for m in 0..=d {
            let n = d - m;
            if n > 0 && xr.is_none() {
                continue;
            }
            if m > 0 && points.is_empty() {
                continue;
            }
            if m > 0 && binomial(points.len() + m as usize - 1, m as usize) > CANDIDATE_GUARD {
                return Err(SteenrodError::GuardExceeded(format!("more than {CANDIDATE_GUARD} candidate products")));
            }
            let base = match xr {
                Some(x) => ring.pow(&ring.gen(x), n),
                None => ring.one(),
            };
            for combo in multisets(points.len(), m as usize) {
                let prod = combo.iter().fold(base.clone(), |acc, &k| ring.mul(&acc, &linear[k]));
                if !prod.is_zero() && ideal.contains(ring, &prod) {
                    return Ok(Some(ProductWitness {
                        n,
                        factors: combo.iter().map(|&k| points[k].clone()).collect(),
                        element: ring.display(&prod),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Decide which alternative of the degree-two dichotomy a saturated ideal exhibits.
pub fn classify_b36(ring: &SteenrodRing, ideal: &SaturatedIdeal) -> Result<B36Outcome, SteenrodError> {
    let shape = ring
        .shape()
        .ok_or_else(|| SteenrodError::InvalidParameters("classification needs a standard ring".into()))?;
    if ideal.dim(2, 0) == 0 {
        return Err(SteenrodError::InvalidParameters("ideal has no nonzero (2,0) element".into()));
    }
    let f = ring.field();
    if shape.eps && ideal.dim(2, 0) == 1 {
        let b = ideal.basis(2, 0).remove(0);
        let zeta = ring.generator_index("zeta").expect("zeta");
        let mut z2 = vec![0; ring.generators().len()];
        z2[zeta] = 2;
        let mut xr = vec![0; ring.generators().len()];
        if shape.r > 0 {
            xr[ring.generator_index(&format!("x{}", shape.r)).expect("x_r")] = 1;
        }
        let c = b.coefficient(&z2);
        let shaped = b.terms.keys().all(|m| *m == z2 || (shape.r > 0 && *m == xr));
        if !c.is_zero() && shaped {
            let inv = f.inv(c).expect("nonzero");
            let b = ring.scale(inv, &b);
            let gamma = if shape.r > 0 { b.coefficient(&xr) } else { FieldElement::ZERO };
            return Ok(B36Outcome::CaseII {
                gamma: gamma.code(),
                witness: ring.display(&b),
            });
        }
    }
    match search_products(ring, ideal, shape, true)? {
        Some(w) => Ok(B36Outcome::CaseI(w)),
        None => Ok(B36Outcome::Inconclusive {
            reason: format!("no witness up to degree {}", ideal.bound),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result")]
pub enum SerreOutcome {
    #[serde(rename = "witness")]
    Witness(ProductWitness),
    #[serde(rename = "inconclusive")]
    Inconclusive { reason: String },
}

pub const SERRE_MAX_RANK: usize = 3;

/// Saturate `seed` in `H^*((ℤ/p)^s)` and search for a product of Bocksteins of
/// `F_p`-rational degree-one classes in the ideal.
pub fn serre_check(
    s: usize,
    seed: &str,
    bound: u32,
    field: &FieldRef,
    convention: CartanConvention,
) -> Result<SerreOutcome, SteenrodError> {
    if s == 0 || s > SERRE_MAX_RANK {
        return Err(SteenrodError::GuardExceeded(format!("rank s must be in 1..={SERRE_MAX_RANK}, got {s}")));
    }
    let ring = standard_ring(0, s, false, field).with_convention(convention);
    let u = ring.parse(seed)?;
    let ideal = saturate(&ring, &[u], bound)?;
    let shape = ring.shape().expect("standard");
    Ok(match search_products(&ring, &ideal, shape, false)? {
        Some(w) => SerreOutcome::Witness(w),
        None => SerreOutcome::Inconclusive {
            reason: format!("no product of Bocksteins up to degree {bound}"),
        },
    })
}

/// One row of the operation table: values on a generator for `P^0, βP^0, P^{1/2},
/// βP^{1/2}, P^1, P^2, βP^1`; `None` where the index parity does not match.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub generator: String,
    pub degree: (u32, u8),
    pub cells: Vec<Option<String>>,
}

pub const TABLE_COLUMNS: [(Op, i32); 7] = [
    (Op::P, 0),
    (Op::BetaP, 0),
    (Op::P, 1),
    (Op::BetaP, 1),
    (Op::P, 2),
    (Op::P, 4),
    (Op::BetaP, 2),
];

pub fn operation_table(ring: &SteenrodRing) -> Vec<TableRow> {
    ring.generators()
        .iter()
        .enumerate()
        .map(|(g, gen)| TableRow {
            generator: gen.name.clone(),
            degree: (gen.s, gen.t),
            cells: TABLE_COLUMNS
                .iter()
                .map(|&(op, i2)| {
                    ring.apply_op(op, i2, &ring.gen(g)).ok().map(|v| ring.display(&v))
                })
                .collect(),
        })
        .collect()
}
