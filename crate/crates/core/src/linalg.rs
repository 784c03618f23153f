//! Exact arithmetic over F_p and F_{p^e} (p odd) and the dense linear algebra the
//! rest of the crate is built on.
//!
//! Elements of F_{p^e} are encoded as integers `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! where `c_0 + c_1 t + ...` is the polynomial representative modulo a fixed
//! irreducible polynomial. The modulus for a given `(p, e)` is the monic irreducible
//! whose lower coefficients, read as such an integer, are smallest. Every downstream
//! basis choice depends on this, so it never changes.
//!
//! Row reduction always pivots on the leftmost available column and the topmost
//! available row.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order supported; keeps the log/exp tables small.
pub const MAX_FIELD_ORDER: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not an odd prime")]
    InvalidPrime(u32),
    #[error("extension degree must be at least 1")]
    InvalidDegree,
    #[error("field of order {0} exceeds the supported maximum {MAX_FIELD_ORDER}")]
    FieldTooLarge(u64),
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("F_{small} does not embed in F_{large}")]
    NoEmbedding { small: u64, large: u64 },
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The published description of a finite field: characteristic, degree and the
/// modulus as coefficients `[c_0, ..., c_{e-1}, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    pub modulus: Vec<u32>,
}

/// A field element, stored as its integer code. Arithmetic goes through [`Field`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn code(self) -> u32 {
        self.0
    }
}

pub type FieldRef = Arc<Field>;

pub struct Field {
    spec: FieldSpec,
    q: u32,
    /// `exp[i] = g^i` for a fixed primitive element `g`, doubled so sums of logs index directly.
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
    neg: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

fn field_cache() -> &'static Mutex<HashMap<(u32, u32), FieldRef>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), FieldRef>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

// Dense polynomial helpers over F_p, coefficients low to high.
fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = poly_trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = dr - dm;
        for (i, &mi) in m.iter().enumerate() {
            let sub = (c as u64 * mi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    poly_trim(out.into_iter().map(|v| v as u32).collect())
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    r as u32
}

fn digits(mut code: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(code % p);
        code /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

/// Irreducibility by trial division with every monic polynomial of degree ≤ e/2.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let e = m.len() - 1;
    for d in 1..=e / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut f = digits(code as u32, p, d as u32);
            f.push(1);
            if poly_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn default_modulus(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for code in 0..count {
        let mut m = digits(code as u32, p, e);
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// The field F_{p^e} with its canonical modulus. Instances are shared.
    pub fn get(p: u32, e: u32) -> Result<FieldRef, LinalgError> {
        if p < 3 || !is_prime(p) {
            return Err(LinalgError::InvalidPrime(p));
        }
        if e == 0 {
            return Err(LinalgError::InvalidDegree);
        }
        let q = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if q > MAX_FIELD_ORDER {
            return Err(LinalgError::FieldTooLarge(q));
        }
        let mut cache = field_cache().lock().expect("field cache poisoned");
        if let Some(f) = cache.get(&(p, e)) {
            return Ok(f.clone());
        }
        let f = Arc::new(Field::build(p, e, q as u32));
        cache.insert((p, e), f.clone());
        Ok(f)
    }

    pub fn prime(p: u32) -> Result<FieldRef, LinalgError> {
        Field::get(p, 1)
    }

    fn build(p: u32, e: u32, q: u32) -> Field {
        let modulus = default_modulus(p, e);
        let slow_mul = |a: u32, b: u32| -> u32 {
            let prod = poly_mul(&digits(a, p, e), &digits(b, p, e), p);
            let r = poly_rem(&prod, &modulus, p);
            let mut d = r;
            d.resize(e as usize, 0);
            undigits(&d, p)
        };
        let slow_pow = |a: u32, mut n: u32| -> u32 {
            let (mut r, mut b) = (1u32, a);
            while n > 0 {
                if n & 1 == 1 {
                    r = slow_mul(r, b);
                }
                b = slow_mul(b, b);
                n >>= 1;
            }
            r
        };
        let mut prime_factors = Vec::new();
        let mut rest = q - 1;
        let mut d = 2;
        while d * d <= rest {
            if rest.is_multiple_of(d) {
                prime_factors.push(d);
                while rest.is_multiple_of(d) {
                    rest /= d;
                }
            }
            d += 1;
        }
        if rest > 1 {
            prime_factors.push(rest);
        }
        // Smallest code of multiplicative order q - 1.
        let generator = (1..q)
            .find(|&g| prime_factors.iter().all(|&r| slow_pow(g, (q - 1) / r) != 1))
            .expect("finite fields have primitive elements");
        let order = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * order];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i] = x;
            exp[i + order] = x;
            log[x as usize] = i as u32;
            x = slow_mul(x, generator);
        }
        let add_digits = |a: u32, b: u32| -> u32 {
            let (da, db) = (digits(a, p, e), digits(b, p, e));
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            undigits(&s, p)
        };
        let neg: Vec<u32> = (0..q)
            .map(|a| undigits(&digits(a, p, e).iter().map(|&c| (p - c) % p).collect::<Vec<_>>(), p))
            .collect();
        let add_table = if q <= 1024 {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = add_digits(a, b);
                }
            }
            Some(t)
        } else {
            None
        };
        Field {
            spec: FieldSpec { p, e, modulus },
            q,
            exp,
            log,
            add_table,
            neg,
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn characteristic(&self) -> u32 {
        self.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.spec.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.spec.e == 1
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.spec.p as i64) as u32)
    }

    /// Element from its integer code; codes outside `0..q` are rejected.
    pub fn element(&self, code: u32) -> Option<FieldElement> {
        (code < self.q).then_some(FieldElement(code))
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> FieldElement {
        let p = self.spec.p;
        let mut d: Vec<u32> = coeffs.iter().map(|c| c % p).collect();
        let r = poly_rem(&d, &self.spec.modulus, p);
        d = r;
        d.resize(self.spec.e as usize, 0);
        FieldElement(undigits(&d, p))
    }

    /// Polynomial representative, `e` coefficients low to high.
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        digits(a.0, self.spec.p, self.spec.e)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(FieldElement)
    }

    /// The fixed primitive element used for the log tables.
    pub fn primitive_element(&self) -> FieldElement {
        FieldElement(self.exp[1 % self.exp.len().max(1)])
    }

    /// Whether the element lies in F_p.
    pub fn in_prime_field(&self, a: FieldElement) -> bool {
        a.0 < self.spec.p
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        match &self.add_table {
            Some(t) => FieldElement(t[(a.0 * self.q + b.0) as usize]),
            None => {
                let p = self.spec.p;
                let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
                while x > 0 || y > 0 {
                    out += ((x % p + y % p) % p) * place;
                    x /= p;
                    y /= p;
                    place *= p;
                }
                FieldElement(out)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        FieldElement(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, LinalgError> {
        if a.0 == 0 {
            return Err(LinalgError::DivisionByZero);
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElement(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, LinalgError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, n: u64) -> FieldElement {
        if n == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = (self.log[a.0 as usize] as u64 * (n % order)) % order;
        FieldElement(self.exp[l as usize])
    }

    /// `a^(p^k)`; negative `k` is the inverse Frobenius.
    pub fn frobenius(&self, a: FieldElement, k: i64) -> FieldElement {
        let e = self.spec.e as i64;
        let k = k.rem_euclid(e) as u32;
        self.pow(a, (self.spec.p as u64).pow(k))
    }

    /// Discrete log with respect to [`Field::primitive_element`].
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (a.0 != 0).then(|| self.log[a.0 as usize])
    }

    pub fn sum<I: IntoIterator<Item = FieldElement>>(&self, it: I) -> FieldElement {
        it.into_iter().fold(FieldElement::ZERO, |acc, x| self.add(acc, x))
    }

    /// Render as an integer (prime field) or a polynomial in `t`.
    pub fn display(&self, a: FieldElement) -> String {
        if self.is_prime_field() {
            return a.0.to_string();
        }
        let coeffs = self.coefficients(a);
        let mut parts = Vec::new();
        for (i, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let term = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            };
            parts.push(term);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }

    /// The canonical embedding `self ↪ large`: sends `t` to the smallest-code root of
    /// this field's modulus in `large`. Returns the image of every element code.
    pub fn embedding_into(&self, large: &Field) -> Result<Vec<FieldElement>, LinalgError> {
        let small_q = self.q as u64;
        let large_q = large.q as u64;
        if self.spec.p != large.spec.p || !large.spec.e.is_multiple_of(self.spec.e) {
            return Err(LinalgError::NoEmbedding {
                small: small_q,
                large: large_q,
            });
        }
        let eval_modulus = |x: FieldElement| -> FieldElement {
            let mut acc = FieldElement::ZERO;
            for &c in self.spec.modulus.iter().rev() {
                acc = large.add(large.mul(acc, x), large.from_int(c as i64));
            }
            acc
        };
        let root = large
            .elements()
            .find(|&x| eval_modulus(x).is_zero())
            .ok_or(LinalgError::NoEmbedding {
                small: small_q,
                large: large_q,
            })?;
        Ok(self
            .elements()
            .map(|a| {
                let mut acc = FieldElement::ZERO;
                for &c in self.coefficients(a).iter().rev() {
                    acc = large.add(large.mul(acc, root), large.from_int(c as i64));
                }
                acc
            })
            .collect())
    }
}

/// `dst[j] -= c * src[j]` for `j >= start`.
#[inline]
fn sub_scaled(field: &Field, dst: &mut [FieldElement], c: FieldElement, src: &[FieldElement], start: usize) {
    if c.is_zero() {
        return;
    }
    let nc = field.neg(c);
    let lc = field.log[nc.0 as usize];
    for (d, s) in dst[start..].iter_mut().zip(&src[start..]) {
        if s.0 != 0 {
            let prod = FieldElement(field.exp[(lc + field.log[s.0 as usize]) as usize]);
            *d = field.add(*d, prod);
        }
    }
}

#[inline]
fn scale(field: &Field, v: &mut [FieldElement], c: FieldElement) {
    for x in v.iter_mut() {
        *x = field.mul(*x, c);
    }
}

/// Dense row-major matrix over a finite field.
#[derive(Clone)]
pub struct FieldMatrix {
    field: FieldRef,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl PartialEq for FieldMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Eq for FieldMatrix {}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|&x| self.field.display(x)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Result of [`FieldMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub reduced: FieldMatrix,
    pub pivot_columns: Vec<usize>,
}

impl FieldMatrix {
    pub fn zeros(field: &FieldRef, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &FieldRef, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    pub fn from_rows(field: &FieldRef, rows: Vec<Vec<FieldElement>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        if rows.iter().flatten().any(|x| x.0 >= field.order()) {
            return Err(LinalgError::FieldMismatch);
        }
        Ok(FieldMatrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from small integers (reduced into the prime field).
    pub fn from_ints(field: &FieldRef, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_int(x)).collect())
            .collect();
        Self::from_rows(field, rows).expect("rectangular integer matrix")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: &FieldRef, height: usize, columns: &[Vec<FieldElement>]) -> Self {
        let mut m = Self::zeros(field, height, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), height, "column length");
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: FieldElement) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<FieldElement>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix, LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                sub_scaled(f, out_row, f.neg(a), other.row(k), 0);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols, "vector length");
        let f = &self.field;
        (0..self.rows)
            .map(|r| f.sum(self.row(r).iter().zip(v).map(|(&a, &b)| f.mul(a, b))))
            .collect()
    }

    pub fn add(&self, other: &FieldMatrix) -> Result<FieldMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch("matrix sum".into()));
        }
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(FieldMatrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scaled(&self, c: FieldElement) -> FieldMatrix {
        let f = &self.field;
        FieldMatrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn map_entries(&self, g: impl Fn(FieldElement) -> FieldElement) -> FieldMatrix {
        FieldMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| g(a)).collect(),
        }
    }

    /// Reinterpret entries in a larger field through an embedding table.
    pub fn extend_scalars(&self, large: &FieldRef, embedding: &[FieldElement]) -> FieldMatrix {
        FieldMatrix {
            field: large.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| embedding[a.0 as usize]).collect(),
        }
    }

    pub fn pow(&self, n: u64) -> FieldMatrix {
        assert_eq!(self.rows, self.cols, "square matrix");
        let mut result = Self::identity(&self.field, self.rows);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base).expect("square");
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).expect("square");
            }
        }
        result
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &FieldMatrix) -> Result<FieldMatrix, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch("vstack".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FieldMatrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn rref(&self) -> Rref {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("nonzero pivot");
            scale(f, &mut m.data[row * m.cols..(row + 1) * m.cols], inv);
            let pivot_row: Vec<FieldElement> = m.row(row).to_vec();
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let c = m.get(r, col);
                if !c.is_zero() {
                    let cols = m.cols;
                    sub_scaled(f, &mut m.data[r * cols..(r + 1) * cols], c, &pivot_row, col);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref {
            rank: pivots.len(),
            reduced: m,
            pivot_columns: pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Null-space basis as the columns of the returned `cols × (cols - rank)` matrix,
    /// one vector per free column (value 1 there, 0 at the other free columns).
    pub fn kernel_basis(&self) -> FieldMatrix {
        let rref = self.rref();
        kernel_from_rref(&self.field, self.cols, &rref)
    }

    /// Some solution of `self · x = b`, or `None` when inconsistent. Free variables are 0.
    pub fn solve(&self, b: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let f = &self.field;
        let mut aug = Self::zeros(f, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let rref = aug.rref();
        if rref.pivot_columns.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![FieldElement::ZERO; self.cols];
        for (i, &pc) in rref.pivot_columns.iter().enumerate() {
            x[pc] = rref.reduced.get(i, self.cols);
        }
        Some(x)
    }
}

fn kernel_from_rref(field: &FieldRef, cols: usize, rref: &Rref) -> FieldMatrix {
    let mut is_pivot = vec![false; cols];
    for &c in &rref.pivot_columns {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    let mut k = FieldMatrix::zeros(field, cols, free.len());
    for (j, &fc) in free.iter().enumerate() {
        k.set(fc, j, FieldElement::ONE);
        for (i, &pc) in rref.pivot_columns.iter().enumerate() {
            let v = rref.reduced.get(i, fc);
            if !v.is_zero() {
                k.set(pc, j, field.neg(v));
            }
        }
    }
    k
}

/// Incrementally built row echelon basis of a subspace of `F^width`.
///
/// Each stored row is monic at its pivot and zero at the pivots of earlier rows,
/// so reduction in insertion order is exact. Optionally tracks, for every stored
/// row, its expression in terms of the vectors that were inserted.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: FieldRef,
    width: usize,
    rows: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
    combos: Option<Vec<Vec<FieldElement>>>,
    inserted: usize,
}

impl Echelon {
    pub fn new(field: &FieldRef, width: usize) -> Self {
        Echelon {
            field: field.clone(),
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
            combos: None,
            inserted: 0,
        }
    }

    /// Echelon that remembers how each basis row combines the inserted vectors.
    pub fn with_combinations(field: &FieldRef, width: usize) -> Self {
        let mut e = Self::new(field, width);
        e.combos = Some(Vec::new());
        e
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce `v` in place against the basis; returns the coefficients used per row.
    fn reduce_tracking(&self, v: &mut [FieldElement]) -> Vec<FieldElement> {
        let mut used = vec![FieldElement::ZERO; self.rows.len()];
        for (i, (row, &pc)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let c = v[pc];
            if !c.is_zero() {
                sub_scaled(&self.field, v, c, row, pc);
                used[i] = c;
            }
        }
        used
    }

    pub fn reduce(&self, v: &mut [FieldElement]) {
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if !c.is_zero() {
                sub_scaled(&self.field, v, c, row, pc);
            }
        }
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// Insert a vector; returns the (monic) residual when it was independent.
    pub fn insert(&mut self, v: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(v.len(), self.width, "echelon vector width");
        let f = self.field.clone();
        let mut w = v.to_vec();
        let index = self.inserted;
        self.inserted += 1;
        let used = if self.combos.is_some() {
            Some(self.reduce_tracking(&mut w))
        } else {
            self.reduce(&mut w);
            None
        };
        let pc = w.iter().position(|x| !x.is_zero())?;
        let inv = f.inv(w[pc]).expect("nonzero");
        scale(&f, &mut w, inv);
        if let (Some(combos), Some(used)) = (self.combos.as_mut(), used) {
            let mut combo = vec![FieldElement::ZERO; index + 1];
            combo[index] = FieldElement::ONE;
            for (i, &c) in used.iter().enumerate() {
                if !c.is_zero() {
                    let ci = &combos[i];
                    for (k, &x) in ci.iter().enumerate() {
                        combo[k] = f.sub(combo[k], f.mul(c, x));
                    }
                }
            }
            scale(&f, &mut combo, inv);
            combos.push(combo);
        }
        self.rows.push(w.clone());
        self.pivots.push(pc);
        Some(w)
    }

    /// Coordinates of `v` in terms of the inserted vectors, if `v` lies in the span.
    /// Only available for echelons built with [`Echelon::with_combinations`].
    pub fn express(&self, v: &[FieldElement]) -> Option<Vec<FieldElement>> {
        let combos = self.combos.as_ref()?;
        let f = &self.field;
        let mut w = v.to_vec();
        let used = self.reduce_tracking(&mut w);
        if w.iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut out = vec![FieldElement::ZERO; self.inserted];
        for (i, &c) in used.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, &x) in combos[i].iter().enumerate() {
                out[k] = f.add(out[k], f.mul(c, x));
            }
        }
        Some(out)
    }

    /// Fully reduced basis, sorted by pivot column.
    pub fn reduced_basis(&self) -> Vec<Vec<FieldElement>> {
        let m = FieldMatrix::from_rows(&self.field, self.rows.clone())
            .unwrap_or_else(|_| FieldMatrix::zeros(&self.field, 0, self.width));
        if self.rows.is_empty() {
            return Vec::new();
        }
        let r = m.rref();
        (0..r.rank).map(|i| r.reduced.row(i).to_vec()).collect()
    }
}

/// Solves `M x = b` for many right-hand sides with one factorization.
pub struct LinearSolver {
    field: FieldRef,
    rows: usize,
    cols: usize,
    echelon: Echelon,
}

impl LinearSolver {
    pub fn new(m: &FieldMatrix) -> Self {
        let mut echelon = Echelon::with_combinations(m.field(), m.rows());
        for c in 0..m.cols() {
            echelon.insert(&m.column(c));
        }
        LinearSolver {
            field: m.field().clone(),
            rows: m.rows(),
            cols: m.cols(),
            echelon,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon.dim()
    }

    pub fn solve(&self, b: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let x = self.echelon.express(b)?;
        debug_assert_eq!(x.len(), self.cols);
        let _ = &self.field;
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f3() -> FieldRef {
        Field::get(3, 1).unwrap()
    }

    fn f9() -> FieldRef {
        Field::get(3, 2).unwrap()
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = f3();
        assert_eq!(f.add(f.from_int(2), f.from_int(2)), f.from_int(1));
        assert_eq!(f.div(f.from_int(1), f.from_int(2)).unwrap(), f.from_int(2));
        assert_eq!(f.div(f.one(), f.zero()), Err(LinalgError::DivisionByZero));
    }

    #[test]
    fn f9_uses_t_squared_plus_one() {
        let f = f9();
        assert_eq!(f.spec().modulus, vec![1, 0, 1]);
        let t = f.from_coefficients(&[0, 1]);
        assert_eq!(f.mul(t, t), f.from_int(-1));
        assert_eq!(f.mul(t, t), f.from_int(2));
    }

    #[test]
    fn modulus_is_deterministic_and_irreducible() {
        for (p, e) in [(3, 1), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let a = Field::get(p, e).unwrap();
            assert!(is_irreducible(&a.spec().modulus, p));
            assert_eq!(a.spec().modulus, default_modulus(p, e));
            assert_eq!(a.spec().modulus.len(), e as usize + 1);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::get(2, 1).unwrap_err(), LinalgError::InvalidPrime(2));
        assert_eq!(Field::get(9, 1).unwrap_err(), LinalgError::InvalidPrime(9));
        assert_eq!(Field::get(3, 0).unwrap_err(), LinalgError::InvalidDegree);
        assert!(matches!(Field::get(3, 20), Err(LinalgError::FieldTooLarge(_))));
    }

    #[test]
    fn frobenius_examples() {
        let f = f3();
        for a in f.elements() {
            assert_eq!(f.frobenius(a, 1), a);
            assert_eq!(f.frobenius(a, -3), a);
        }
        let g = f9();
        let t = g.from_coefficients(&[0, 1]);
        assert_eq!(g.frobenius(t, 1), g.neg(t));
        for a in g.elements() {
            assert_eq!(g.frobenius(g.frobenius(a, 1), -1), a);
            assert_eq!(g.frobenius(a, 2), a);
        }
    }

    fn field_axioms(f: &FieldRef, trials: usize, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = f.order();
        for _ in 0..trials {
            let a = FieldElement(rng.gen_range(0..q));
            let b = FieldElement(rng.gen_range(0..q));
            let c = FieldElement(rng.gen_range(0..q));
            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.add(a, b), f.add(b, a));
            assert_eq!(f.mul(a, b), f.mul(b, a));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            assert_eq!(f.sub(f.add(a, b), b), a);
            if !b.is_zero() {
                assert_eq!(f.mul(f.div(a, b).unwrap(), b), a);
            }
            assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
            assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
        }
    }

    #[test]
    fn randomized_field_axioms() {
        for (i, (p, e)) in [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (3, 7)].into_iter().enumerate() {
            field_axioms(&Field::get(p, e).unwrap(), 1000, i as u64);
        }
    }

    #[test]
    fn multiplication_matches_polynomial_reduction() {
        let f = Field::get(3, 3).unwrap();
        for a in f.elements() {
            for b in f.elements().step_by(5) {
                let prod = poly_mul(&f.coefficients(a), &f.coefficients(b), 3);
                assert_eq!(f.mul(a, b), f.from_coefficients(&prod));
            }
        }
    }

    #[test]
    fn rref_examples() {
        let f = f3();
        let id = FieldMatrix::identity(&f, 3);
        let r = id.rref();
        assert_eq!(r.rank, 3);
        assert_eq!(r.reduced, id);
        assert_eq!(FieldMatrix::zeros(&f, 2, 3).rank(), 0);
        let m = FieldMatrix::from_ints(&f, &[&[1, 2], &[2, 1]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.rref().pivot_columns, vec![0]);
    }

    #[test]
    fn kernel_examples() {
        let f = f3();
        assert_eq!(FieldMatrix::identity(&f, 3).kernel_basis().cols(), 0);
        let k = FieldMatrix::zeros(&f, 2, 2).kernel_basis();
        assert_eq!(k, FieldMatrix::identity(&f, 2));
        let m = FieldMatrix::from_ints(&f, &[&[1, 2], &[2, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), vec![f.from_int(1), f.from_int(1)]);
    }

    fn random_matrix(f: &FieldRef, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(f, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                // Sparse-ish so that rank deficiency shows up.
                if rng.gen_bool(0.4) {
                    m.set(r, c, FieldElement(rng.gen_range(0..f.order())));
                }
            }
        }
        m
    }

    #[test]
    fn rank_nullity_and_idempotence() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in [f3(), f9()] {
            for _ in 0..60 {
                let (r, c) = (rng.gen_range(0..7), rng.gen_range(0..7));
                let m = random_matrix(&f, &mut rng, r, c);
                let rr = m.rref();
                let k = m.kernel_basis();
                assert_eq!(rr.rank + k.cols(), c);
                assert!(m.mul(&k).unwrap().is_zero());
                assert_eq!(rr.reduced.rref().reduced, rr.reduced);
                assert_eq!(m.rref(), rr);
            }
        }
    }

    #[test]
    fn solvers_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = f9();
        for _ in 0..40 {
            let m = random_matrix(&f, &mut rng, 5, 6);
            let solver = LinearSolver::new(&m);
            assert_eq!(solver.rank(), m.rank());
            let x: Vec<FieldElement> = (0..6).map(|_| FieldElement(rng.gen_range(0..9))).collect();
            let b = m.mul_vec(&x);
            let y1 = m.solve(&b).unwrap();
            let y2 = solver.solve(&b).unwrap();
            assert_eq!(m.mul_vec(&y1), b);
            assert_eq!(m.mul_vec(&y2), b);
        }
        // Inconsistent system.
        let m = FieldMatrix::from_ints(&f3(), &[&[1, 0], &[1, 0]]);
        let b = vec![FieldElement(1), FieldElement(0)];
        assert!(m.solve(&b).is_none());
        assert!(LinearSolver::new(&m).solve(&b).is_none());
    }

    #[test]
    fn echelon_membership() {
        let f = f3();
        let mut e = Echelon::new(&f, 3);
        assert!(e.insert(&[f.from_int(1), f.from_int(2), f.zero()]).is_some());
        assert!(e.insert(&[f.from_int(2), f.from_int(1), f.zero()]).is_none());
        assert!(e.contains(&[f.from_int(2), f.from_int(1), f.zero()]));
        assert!(!e.contains(&[f.zero(), f.zero(), f.one()]));
        assert_eq!(e.dim(), 1);
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        let small = f9();
        let large = Field::get(3, 4).unwrap();
        let emb = small.embedding_into(&large).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(emb[small.mul(a, b).0 as usize], large.mul(emb[a.0 as usize], emb[b.0 as usize]));
                assert_eq!(emb[small.add(a, b).0 as usize], large.add(emb[a.0 as usize], emb[b.0 as usize]));
            }
        }
        let prime = f3();
        let emb = prime.embedding_into(&small).unwrap();
        assert_eq!(emb, vec![FieldElement(0), FieldElement(1), FieldElement(2)]);
        assert!(small.embedding_into(&Field::get(3, 3).unwrap()).is_err());
    }

    #[test]
    fn spec_serializes_as_published() {
        let json = serde_json::to_value(f9().spec()).unwrap();
        assert_eq!(json, serde_json::json!({"p": 3, "e": 2, "modulus": [1, 0, 1]}));
    }
}
