//! Witt structure polynomials over the integers and arithmetic in the truncated
//! Witt vectors `W_m(F_q)`.
//!
//! The sum, product and negation polynomials `S_n`, `P_n`, `N_n` are obtained by
//! solving the ghost-component equations one index at a time; each step divides
//! by `p^n`, which must be exact.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::{FieldElement, FieldRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WittError {
    #[error("Witt vectors of lengths {0} and {1} cannot be combined")]
    LengthMismatch(usize, usize),
    #[error("Witt vectors live over different fields")]
    FieldMismatch,
    #[error("Witt vectors must have length at least 1")]
    EmptyVector,
    #[error("characteristic {field} does not match the table prime {table}")]
    PrimeMismatch { field: u32, table: u32 },
}

/// Polynomial with arbitrary-precision integer coefficients in named variables.
#[derive(Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    variables: Arc<Vec<String>>,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in self.terms.iter().rev() {
            let mon = self.monomial_name(exps);
            let (sign, abs) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (mon.as_str(), abs.is_one()) {
                ("1", _) => write!(f, "{abs}")?,
                (m, true) => write!(f, "{m}")?,
                (m, false) => write!(f, "{abs}*{m}")?,
            }
        }
        Ok(())
    }
}

impl IntPolynomial {
    pub fn zero(variables: Arc<Vec<String>>) -> Self {
        IntPolynomial {
            variables,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(variables: Arc<Vec<String>>, c: BigInt) -> Self {
        let mut p = Self::zero(variables);
        if !c.is_zero() {
            let n = p.variables.len();
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn variable(variables: Arc<Vec<String>>, index: usize) -> Self {
        let mut exps = vec![0; variables.len()];
        exps[index] = 1;
        let mut p = Self::zero(variables);
        p.terms.insert(exps, BigInt::one());
        p
    }

    /// Build from explicit terms; zero coefficients are dropped.
    pub fn from_terms(variables: Arc<Vec<String>>, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut p = Self::zero(variables);
        for (e, c) in terms {
            assert_eq!(e.len(), p.variables.len(), "exponent arity");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Largest absolute coefficient, in bits.
    pub fn max_coefficient_bits(&self) -> u64 {
        self.terms.values().map(|c| c.bits()).max().unwrap_or(0)
    }

    pub fn monomial_name(&self, exps: &[u32]) -> String {
        let parts: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    self.variables[i].clone()
                } else {
                    format!("{}^{}", self.variables[i], e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    fn check_same_vars(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.variables, &other.variables) || self.variables == other.variables,
            "polynomials over different variable sets"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_vars(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        IntPolynomial {
            variables: self.variables.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.variables.clone());
        }
        IntPolynomial {
            variables: self.variables.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_vars(other);
        let mut acc: HashMap<Vec<u32>, BigInt> = HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_default() += ca * cb;
            }
        }
        IntPolynomial {
            variables: self.variables.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut result = Self::constant(self.variables.clone(), BigInt::one());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact division of every coefficient; `None` if some coefficient is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            terms.insert(e.clone(), q);
        }
        Some(IntPolynomial {
            variables: self.variables.clone(),
            terms,
        })
    }

    /// Substitute `args[i]` for variable `i`. All arguments share one variable set.
    pub fn substitute(&self, args: &[IntPolynomial]) -> IntPolynomial {
        assert_eq!(args.len(), self.variables.len(), "one argument per variable");
        let vars = args[0].variables.clone();
        let mut cache: HashMap<(usize, u32), IntPolynomial> = HashMap::new();
        let mut out = IntPolynomial::zero(vars.clone());
        for (exps, c) in &self.terms {
            let mut term = IntPolynomial::constant(vars.clone(), c.clone());
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let power = cache.entry((i, e)).or_insert_with(|| args[i].pow(e as u64)).clone();
                term = term.mul(&power);
            }
            out = out.add(&term);
        }
        out
    }

    /// Evaluate at integer points.
    pub fn eval_int(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.variables.len());
        let mut total = BigInt::zero();
        for (exps, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    t *= num_traits::pow::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    /// `{monomial: coefficient-string}` map with decimal coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (e, c) in &self.terms {
            map.insert(self.monomial_name(e), serde_json::Value::String(c.to_string()));
        }
        serde_json::Value::Object(map)
    }

    /// Coefficients reduced into the prime field of `field`, zero terms removed.
    fn reduce_mod(&self, field: &FieldRef) -> Vec<(Vec<u32>, FieldElement)> {
        let p = BigInt::from(field.characteristic());
        self.terms
            .iter()
            .filter_map(|(e, c)| {
                let r = c.mod_floor(&p).to_i64().expect("small residue");
                (r != 0).then(|| (e.clone(), field.from_int(r)))
            })
            .collect()
    }
}

fn ghost_variables(prefix: &str, n: usize) -> Arc<Vec<String>> {
    Arc::new((0..=n).map(|i| format!("{prefix}_{i}")).collect())
}

fn pair_variables(n: usize) -> Arc<Vec<String>> {
    let mut v: Vec<String> = (0..=n).map(|i| format!("X_{i}")).collect();
    v.extend((0..=n).map(|i| format!("Y_{i}")));
    Arc::new(v)
}

/// `w_n(Z) = Σ_{i ≤ n} p^i Z_i^{p^{n-i}}` over the given variables (the first `n+1` are used).
fn ghost_in(vars: &Arc<Vec<String>>, offset: usize, n: usize, p: u32) -> IntPolynomial {
    let mut terms = Vec::new();
    for i in 0..=n {
        let mut exps = vec![0u32; vars.len()];
        exps[offset + i] = (p as u64).pow((n - i) as u32) as u32;
        terms.push((exps, BigInt::from(p).pow(i as u32)));
    }
    IntPolynomial::from_terms(vars.clone(), terms)
}

/// The ghost polynomial `w_n` in variables `Z_0..Z_n`.
pub fn ghost_poly(n: usize, p: u32) -> IntPolynomial {
    ghost_in(&ghost_variables("Z", n), 0, n, p)
}

/// Witt sum, product and negation polynomials up to index `n` for the prime `p`.
pub struct WittPolynomialTable {
    p: u32,
    n: usize,
    sum: Vec<IntPolynomial>,
    product: Vec<IntPolynomial>,
    negation: Vec<IntPolynomial>,
    reduced: OnceLock<ReducedTable>,
}

struct ReducedTable {
    sum: Vec<Vec<(Vec<u32>, FieldElement)>>,
    product: Vec<Vec<(Vec<u32>, FieldElement)>>,
    negation: Vec<Vec<(Vec<u32>, FieldElement)>>,
}

impl fmt::Debug for WittPolynomialTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WittPolynomialTable").field("p", &self.p).field("n", &self.n).finish()
    }
}

/// Solve `w_k(T_0..T_k) = target_k` for `T_k`, given `T_0..T_{k-1}`.
fn back_substitute(p: u32, k: usize, target: IntPolynomial, lower: &[IntPolynomial]) -> IntPolynomial {
    let mut rest = target;
    for (i, t) in lower.iter().enumerate() {
        let power = t.pow((p as u64).pow((k - i) as u32));
        rest = rest.sub(&power.scale(&BigInt::from(p).pow(i as u32)));
    }
    rest.div_exact(&BigInt::from(p).pow(k as u32))
        .unwrap_or_else(|| panic!("Witt back-substitution not integral at index {k} for p = {p}"))
}

impl WittPolynomialTable {
    fn compute(n: usize, p: u32) -> Self {
        let xy = pair_variables(n);
        let z = ghost_variables("Z", n);
        let mut sum = Vec::with_capacity(n + 1);
        let mut product = Vec::with_capacity(n + 1);
        let mut negation = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let wx = ghost_in(&xy, 0, k, p);
            let wy = ghost_in(&xy, n + 1, k, p);
            let s = back_substitute(p, k, wx.add(&wy), &sum);
            sum.push(s);
            let pr = back_substitute(p, k, wx.mul(&wy), &product);
            product.push(pr);
            let ng = back_substitute(p, k, ghost_in(&z, 0, k, p).neg(), &negation);
            negation.push(ng);
        }
        WittPolynomialTable {
            p,
            n,
            sum,
            product,
            negation,
            reduced: OnceLock::new(),
        }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn max_index(&self) -> usize {
        self.n
    }

    /// `S_i` in variables `X_0..X_n, Y_0..Y_n`.
    pub fn sum(&self, i: usize) -> &IntPolynomial {
        &self.sum[i]
    }

    /// `P_i` in variables `X_0..X_n, Y_0..Y_n`.
    pub fn product(&self, i: usize) -> &IntPolynomial {
        &self.product[i]
    }

    /// `N_i` in variables `Z_0..Z_n`.
    pub fn negation(&self, i: usize) -> &IntPolynomial {
        &self.negation[i]
    }

    fn reduced(&self, field: &FieldRef) -> &ReducedTable {
        self.reduced.get_or_init(|| ReducedTable {
            sum: self.sum.iter().map(|s| s.reduce_mod(field)).collect(),
            product: self.product.iter().map(|s| s.reduce_mod(field)).collect(),
            negation: self.negation.iter().map(|s| s.reduce_mod(field)).collect(),
        })
    }

    /// Check the ghost identities by substituting the structure polynomials into `w_i`
    /// as polynomials. Returns the first failing `(kind, index)`.
    pub fn verify_ghost_identities(&self) -> Result<(), (&'static str, usize)> {
        let p = self.p;
        let xy = self.sum[0].variables.clone();
        let z = self.negation[0].variables.clone();
        for i in 0..=self.n {
            let w = ghost_poly(i, p);
            let wx = ghost_in(&xy, 0, i, p);
            let wy = ghost_in(&xy, self.n + 1, i, p);
            if w.substitute(&self.sum[..=i]) != wx.add(&wy) {
                return Err(("sum", i));
            }
            if w.substitute(&self.product[..=i]) != wx.mul(&wy) {
                return Err(("product", i));
            }
            if w.substitute(&self.negation[..=i]) != ghost_in(&z, 0, i, p).neg() {
                return Err(("negation", i));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "n": self.n,
            "S": self.sum.iter().map(IntPolynomial::to_json).collect::<Vec<_>>(),
            "P": self.product.iter().map(IntPolynomial::to_json).collect::<Vec<_>>(),
            "N": self.negation.iter().map(IntPolynomial::to_json).collect::<Vec<_>>(),
        })
    }
}

type TableCache = RwLock<HashMap<(usize, u32), Arc<WittPolynomialTable>>>;

fn table_cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized structure-polynomial table for `(n, p)`.
pub fn build_witt_table(n: usize, p: u32) -> Arc<WittPolynomialTable> {
    if let Some(t) = table_cache().read().expect("witt cache poisoned").get(&(n, p)) {
        return t.clone();
    }
    let mut cache = table_cache().write().expect("witt cache poisoned");
    cache
        .entry((n, p))
        .or_insert_with(|| Arc::new(WittPolynomialTable::compute(n, p)))
        .clone()
}

fn eval_reduced(field: &FieldRef, poly: &[(Vec<u32>, FieldElement)], point: &[FieldElement]) -> FieldElement {
    let mut total = FieldElement::ZERO;
    'terms: for (exps, c) in poly {
        let mut t = *c;
        for (&x, &e) in point.iter().zip(exps) {
            if e > 0 {
                if x.is_zero() {
                    continue 'terms;
                }
                t = field.mul(t, field.pow(x, e as u64));
            }
        }
        total = field.add(total, t);
    }
    total
}

/// A truncated Witt vector `(a_0, ..., a_{m-1})` over `F_q`.
#[derive(Clone, PartialEq, Eq)]
pub struct WittVector {
    field: FieldRef,
    entries: Vec<FieldElement>,
}

impl fmt::Debug for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|&x| self.field.display(x)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl WittVector {
    pub fn new(field: &FieldRef, entries: Vec<FieldElement>) -> Result<Self, WittError> {
        if entries.is_empty() {
            return Err(WittError::EmptyVector);
        }
        Ok(WittVector {
            field: field.clone(),
            entries,
        })
    }

    /// Entries given as field-element codes.
    pub fn from_codes(field: &FieldRef, codes: &[u32]) -> Result<Self, WittError> {
        let entries = codes
            .iter()
            .map(|&c| field.element(c).ok_or(WittError::FieldMismatch))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, entries)
    }

    pub fn zero(field: &FieldRef, m: usize) -> Self {
        WittVector {
            field: field.clone(),
            entries: vec![FieldElement::ZERO; m.max(1)],
        }
    }

    pub fn one(field: &FieldRef, m: usize) -> Self {
        Self::teichmuller(field, FieldElement::ONE, m)
    }

    /// The Teichmüller representative `(x, 0, ..., 0)`.
    pub fn teichmuller(field: &FieldRef, x: FieldElement, m: usize) -> Self {
        let mut v = Self::zero(field, m);
        v.entries[0] = x;
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn codes(&self) -> Vec<u32> {
        self.entries.iter().map(|x| x.code()).collect()
    }

    fn check(&self, other: &Self) -> Result<(), WittError> {
        if self.field != other.field {
            return Err(WittError::FieldMismatch);
        }
        if self.len() != other.len() {
            return Err(WittError::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    fn binary(&self, other: &Self, pick: impl Fn(&ReducedTable) -> &Vec<Vec<(Vec<u32>, FieldElement)>>) -> Result<Self, WittError> {
        self.check(other)?;
        let m = self.len();
        let table = build_witt_table(m - 1, self.field.characteristic());
        let reduced = table.reduced(&self.field);
        let point: Vec<FieldElement> = self.entries.iter().chain(&other.entries).copied().collect();
        let entries = pick(reduced).iter().map(|poly| eval_reduced(&self.field, poly, &point)).collect();
        Ok(WittVector {
            field: self.field.clone(),
            entries,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, WittError> {
        self.binary(other, |r| &r.sum)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, WittError> {
        self.binary(other, |r| &r.product)
    }

    pub fn neg(&self) -> Self {
        let table = build_witt_table(self.len() - 1, self.field.characteristic());
        let reduced = table.reduced(&self.field);
        let entries = reduced
            .negation
            .iter()
            .map(|poly| eval_reduced(&self.field, poly, &self.entries))
            .collect();
        WittVector {
            field: self.field.clone(),
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, WittError> {
        self.add(&other.neg())
    }

    /// `n`-fold sum `u + ... + u`.
    pub fn times(&self, n: u64) -> Self {
        let mut acc = WittVector::zero(&self.field, self.len());
        for _ in 0..n {
            acc = acc.add(self).expect("same shape");
        }
        acc
    }

    /// Verschiebung: shift right, dropping the last entry.
    pub fn verschiebung(&self) -> Self {
        let mut entries = vec![FieldElement::ZERO];
        entries.extend_from_slice(&self.entries[..self.len() - 1]);
        WittVector {
            field: self.field.clone(),
            entries,
        }
    }

    /// Frobenius endomorphism `F` of the Witt group scheme: raise entries to the p-th power.
    pub fn frobenius(&self) -> Self {
        self.map_entries(|f, x| f.frobenius(x, 1))
    }

    /// The ring automorphism `σ` of `W(k)` lifting the Frobenius of `k`.
    pub fn sigma(&self) -> Self {
        self.map_entries(|f, x| f.frobenius(x, 1))
    }

    pub fn sigma_inverse(&self) -> Self {
        self.map_entries(|f, x| f.frobenius(x, -1))
    }

    fn map_entries(&self, g: impl Fn(&FieldRef, FieldElement) -> FieldElement) -> Self {
        WittVector {
            field: self.field.clone(),
            entries: self.entries.iter().map(|&x| g(&self.field, x)).collect(),
        }
    }

    /// Every vector of length `m` over the field, in code order.
    pub fn all(field: &FieldRef, m: usize) -> Vec<WittVector> {
        let q = field.order() as u64;
        let total = q.pow(m as u32);
        (0..total)
            .map(|mut code| {
                let entries = (0..m)
                    .map(|_| {
                        let c = (code % q) as u32;
                        code /= q;
                        FieldElement(c)
                    })
                    .collect();
                WittVector {
                    field: field.clone(),
                    entries,
                }
            })
            .collect()
    }
}

/// Additive order of `u` in `W_m(F_q)`.
pub fn additive_order(u: &WittVector) -> u64 {
    let zero = WittVector::zero(u.field(), u.len());
    let mut acc = u.clone();
    let mut n = 1;
    while acc != zero {
        acc = acc.add(u).expect("same shape");
        n += 1;
    }
    n
}

pub fn witt_add(u: &WittVector, v: &WittVector) -> Result<WittVector, WittError> {
    u.add(v)
}

pub fn witt_mul(u: &WittVector, v: &WittVector) -> Result<WittVector, WittError> {
    u.mul(v)
}

pub fn witt_neg(u: &WittVector) -> WittVector {
    u.neg()
}

pub fn verschiebung(u: &WittVector) -> WittVector {
    u.verschiebung()
}

pub fn frobenius_f(u: &WittVector) -> WittVector {
    u.frobenius()
}

pub fn sigma(u: &WittVector) -> WittVector {
    u.sigma()
}
