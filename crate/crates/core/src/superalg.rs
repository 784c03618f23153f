//! Finite-dimensional commutative monomial superalgebras with coproduct data.
//!
//! An algebra is presented by generators `g` with an exponent bound `N_g` and a power
//! rule `g^{N_g} = c·m` (or `0`). Products of basis monomials are always a scalar times a
//! basis monomial, so multiplication is a precomputed table. Tensor powers `A^{⊗k}`
//! carry the Koszul sign when factors are reordered.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{FieldElement, FieldMatrix, FieldRef, FieldSpec};
use crate::witt::{build_witt_table, IntPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("invalid catalog parameters: {0}")]
    InvalidParameters(String),
    #[error("algebras live over different fields")]
    FieldMismatch,
    #[error("power rule for {0} does not terminate")]
    NonTerminating(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("morphism rejected: {0}")]
    MorphismRejected(String),
    #[error("{0}")]
    Invalid(String),
}

/// Element of an algebra: coordinates on the monomial basis.
pub type Element = Vec<FieldElement>;

/// Element of `A^{⊗k}`: coefficients keyed by tuples of basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Tensor {
    pub terms: BTreeMap<Vec<usize>, FieldElement>,
}

impl Tensor {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, field: &FieldRef, key: Vec<usize>, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = field.add(*o.get(), c);
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, field: &FieldRef, other: &Tensor) -> Tensor {
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.add_term(field, k.clone(), c);
        }
        out
    }

    pub fn scale(&self, field: &FieldRef, c: FieldElement) -> Tensor {
        if c.is_zero() {
            return Tensor::default();
        }
        Tensor {
            terms: self.terms.iter().map(|(k, &x)| (k.clone(), field.mul(c, x))).collect(),
        }
    }

    pub fn neg(&self, field: &FieldRef) -> Tensor {
        self.scale(field, field.neg(field.one()))
    }
}

/// Image of `g^{N_g}`: a scalar times an exponent vector, or zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerImage {
    pub coefficient: FieldElement,
    pub exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub parity: u8,
    pub zdegree: Option<i64>,
    pub bound: u32,
    pub power_image: Option<PowerImage>,
}

impl Generator {
    pub fn new(name: impl Into<String>, parity: u8, bound: u32) -> Self {
        Generator {
            name: name.into(),
            parity,
            zdegree: None,
            bound,
            power_image: None,
        }
    }
}

/// Coproduct on generators, optional antipode on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopfData {
    pub coproduct: Vec<Tensor>,
    pub antipode: Option<Vec<Element>>,
}

/// Named catalog entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CatalogEntry {
    GaR(usize),
    GaMinus,
    ZpPower(usize),
    Wm1(usize),
    Wm1Minus(usize),
    EmnMinus(usize, usize),
    EmnMuMinus(usize, usize, FieldElement),
    Emn(usize, usize),
    EmnMu(usize, usize, FieldElement),
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogEntry::GaR(r) => write!(f, "Ga({r})"),
            CatalogEntry::GaMinus => write!(f, "Ga-"),
            CatalogEntry::ZpPower(s) => write!(f, "Z({s})"),
            CatalogEntry::Wm1(m) => write!(f, "W({m})"),
            CatalogEntry::Wm1Minus(m) => write!(f, "W-({m})"),
            CatalogEntry::EmnMinus(m, n) => write!(f, "E-({m},{n})"),
            CatalogEntry::EmnMuMinus(m, n, mu) => write!(f, "E-({m},{n},mu={})", mu.code()),
            CatalogEntry::Emn(m, n) => write!(f, "E({m},{n})"),
            CatalogEntry::EmnMu(m, n, mu) => write!(f, "E({m},{n},mu={})", mu.code()),
        }
    }
}

pub struct SuperAlgebra {
    name: String,
    field: FieldRef,
    generators: Vec<Generator>,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    table: Vec<Option<(FieldElement, u32)>>,
    hopf: Option<HopfData>,
    monomial_coproducts: OnceLock<Vec<Tensor>>,
}

pub type AlgebraRef = Arc<SuperAlgebra>;

impl fmt::Debug for SuperAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SuperAlgebra")
            .field("name", &self.name)
            .field("field", self.field.spec())
            .field("generators", &self.generators)
            .field("dim", &self.dim())
            .finish()
    }
}

impl Clone for SuperAlgebra {
    fn clone(&self) -> Self {
        SuperAlgebra {
            name: self.name.clone(),
            field: self.field.clone(),
            generators: self.generators.clone(),
            basis: self.basis.clone(),
            index: self.index.clone(),
            table: self.table.clone(),
            hopf: self.hopf.clone(),
            monomial_coproducts: OnceLock::new(),
        }
    }
}

const REDUCTION_LIMIT: usize = 10_000;

fn reduce_exponents(
    field: &FieldRef,
    generators: &[Generator],
    mut exps: Vec<u32>,
) -> Result<Option<(FieldElement, Vec<u32>)>, AlgebraError> {
    let mut coeff = field.one();
    for _ in 0..REDUCTION_LIMIT {
        let Some(i) = (0..generators.len()).find(|&i| exps[i] >= generators[i].bound) else {
            return Ok(Some((coeff, exps)));
        };
        match &generators[i].power_image {
            None => return Ok(None),
            Some(img) => {
                exps[i] -= generators[i].bound;
                for (e, add) in exps.iter_mut().zip(&img.exponents) {
                    *e += add;
                }
                coeff = field.mul(coeff, img.coefficient);
                if coeff.is_zero() {
                    return Ok(None);
                }
            }
        }
    }
    Err(AlgebraError::NonTerminating(generators.iter().map(|g| g.name.clone()).collect::<Vec<_>>().join(",")))
}

impl SuperAlgebra {
    /// Build from a presentation. Power images are reduced to canonical form.
    pub fn from_presentation(
        name: impl Into<String>,
        field: &FieldRef,
        mut generators: Vec<Generator>,
    ) -> Result<Self, AlgebraError> {
        let ngen = generators.len();
        let mut seen = std::collections::HashSet::new();
        for g in &generators {
            if g.bound == 0 {
                return Err(AlgebraError::Invalid(format!("generator {} has bound 0", g.name)));
            }
            if g.parity > 1 {
                return Err(AlgebraError::Invalid(format!("generator {} has parity {}", g.name, g.parity)));
            }
            if !seen.insert(g.name.clone()) {
                return Err(AlgebraError::Invalid(format!("duplicate generator name {}", g.name)));
            }
            if let Some(img) = &g.power_image {
                if img.exponents.len() != ngen {
                    return Err(AlgebraError::Invalid(format!("power image of {} has wrong arity", g.name)));
                }
            }
        }
        for i in 0..ngen {
            if let Some(img) = generators[i].power_image.clone() {
                let reduced = reduce_exponents(field, &generators, img.exponents)?;
                generators[i].power_image = reduced.and_then(|(c, e)| {
                    let c = field.mul(c, img.coefficient);
                    (!c.is_zero()).then_some(PowerImage {
                        coefficient: c,
                        exponents: e,
                    })
                });
            }
        }
        for g in &generators {
            if let Some(img) = &g.power_image {
                let parity: u32 = generators.iter().zip(&img.exponents).map(|(h, &e)| h.parity as u32 * e).sum();
                if !(parity + g.bound * g.parity as u32).is_multiple_of(2) {
                    return Err(AlgebraError::Invalid(format!("power rule for {} is not parity-homogeneous", g.name)));
                }
            }
        }
        let mut basis: Vec<Vec<u32>> = vec![Vec::new()];
        for g in &generators {
            let mut next = Vec::with_capacity(basis.len() * g.bound as usize);
            for b in &basis {
                for e in 0..g.bound {
                    let mut v = b.clone();
                    v.push(e);
                    next.push(v);
                }
            }
            basis = next;
        }
        let index: HashMap<Vec<u32>, usize> = basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let d = basis.len();
        let mut table = Vec::with_capacity(d * d);
        for a in &basis {
            for b in &basis {
                let sum: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                table.push(reduce_exponents(field, &generators, sum)?.map(|(c, e)| (c, index[&e] as u32)));
            }
        }
        Ok(SuperAlgebra {
            name: name.into(),
            field: field.clone(),
            generators,
            basis,
            index,
            table,
            hopf: None,
            monomial_coproducts: OnceLock::new(),
        })
    }

    pub fn with_hopf(mut self, hopf: HopfData) -> Result<Self, AlgebraError> {
        if hopf.coproduct.len() != self.generators.len() {
            return Err(AlgebraError::Invalid("one coproduct per generator required".into()));
        }
        if let Some(s) = &hopf.antipode {
            if s.len() != self.generators.len() {
                return Err(AlgebraError::Invalid("one antipode image per generator required".into()));
            }
        }
        self.hopf = Some(hopf);
        self.monomial_coproducts = OnceLock::new();
        Ok(self)
    }

    pub fn without_antipode(mut self) -> Self {
        if let Some(h) = self.hopf.as_mut() {
            h.antipode = None;
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn hopf(&self) -> Option<&HopfData> {
        self.hopf.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn monomial_index(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    pub fn generator_index(&self, name: &str) -> Result<usize, AlgebraError> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))
    }

    /// Parity of basis monomial `i`.
    pub fn basis_parity(&self, i: usize) -> u8 {
        (self.basis[i]
            .iter()
            .zip(&self.generators)
            .map(|(&e, g)| e * g.parity as u32)
            .sum::<u32>()
            % 2) as u8
    }

    /// Number of odd generator factors in basis monomial `i`.
    fn odd_count(&self, i: usize) -> u32 {
        self.basis[i].iter().zip(&self.generators).map(|(&e, g)| e * g.parity as u32).sum()
    }

    pub fn monomial_name(&self, i: usize) -> String {
        let parts: Vec<String> = self.basis[i]
            .iter()
            .zip(&self.generators)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, g)| if e == 1 { g.name.clone() } else { format!("{}^{}", g.name, e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Product of basis monomials `i·j`.
    #[inline]
    pub fn mul_basis(&self, i: usize, j: usize) -> Option<(FieldElement, usize)> {
        self.table[i * self.dim() + j].map(|(c, k)| (c, k as usize))
    }

    pub fn zero(&self) -> Element {
        vec![FieldElement::ZERO; self.dim()]
    }

    pub fn one(&self) -> Element {
        self.basis_element(0)
    }

    pub fn basis_element(&self, i: usize) -> Element {
        let mut v = self.zero();
        v[i] = self.field.one();
        v
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut exps = vec![0; self.generators.len()];
        exps[i] = 1;
        self.monomial(&exps)
    }

    /// Arbitrary exponent vector, reduced through the power rules.
    pub fn monomial(&self, exps: &[u32]) -> Element {
        let mut v = self.zero();
        if let Some((c, e)) = reduce_exponents(&self.field, &self.generators, exps.to_vec()).expect("validated presentation") {
            v[self.index[&e]] = c;
        }
        v
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        a.iter().zip(b).map(|(&x, &y)| self.field.add(x, y)).collect()
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        a.iter().zip(b).map(|(&x, &y)| self.field.sub(x, y)).collect()
    }

    pub fn scale(&self, c: FieldElement, a: &Element) -> Element {
        a.iter().map(|&x| self.field.mul(c, x)).collect()
    }

    pub fn is_zero(&self, a: &Element) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let f = &self.field;
        let mut out = self.zero();
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                if let Some((c, k)) = self.mul_basis(i, j) {
                    out[k] = f.add(out[k], f.mul(c, f.mul(x, y)));
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &Element, n: u64) -> Element {
        let mut result = self.one();
        let mut base = a.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(&result, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Common parity of the support, `None` for inhomogeneous elements; zero is even.
    pub fn parity_of(&self, a: &Element) -> Option<u8> {
        let mut parity = None;
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let p = self.basis_parity(i);
            match parity {
                None => parity = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(parity.unwrap_or(0))
    }

    pub fn augmentation(&self, a: &Element) -> FieldElement {
        a[0]
    }

    pub fn display(&self, a: &Element) -> String {
        let mut parts = Vec::new();
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let mon = self.monomial_name(i);
            let c = self.field.display(x);
            parts.push(match (mon.as_str(), c.as_str()) {
                ("1", _) => c,
                (_, "1") => mon,
                _ => format!("{c}*{mon}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Matrix of left multiplication by `a` on the monomial basis.
    pub fn left_mult_matrix(&self, a: &Element) -> FieldMatrix {
        let d = self.dim();
        let f = &self.field;
        let mut m = FieldMatrix::zeros(f, d, d);
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..d {
                if let Some((c, k)) = self.mul_basis(i, j) {
                    m.set(k, j, f.add(m.get(k, j), f.mul(c, x)));
                }
            }
        }
        m
    }

    // ---- tensor powers ----

    /// Product in `A^{⊗k}` with the Koszul sign for moving the second operand's
    /// factors past the first operand's later factors.
    pub fn tensor_mul(&self, x: &Tensor, y: &Tensor) -> Tensor {
        let f = &self.field;
        let mut acc: HashMap<Vec<usize>, FieldElement> = HashMap::new();
        for (ka, &ca) in &x.terms {
            let pa: Vec<u8> = ka.iter().map(|&i| self.basis_parity(i)).collect();
            'inner: for (kb, &cb) in &y.terms {
                let mut sign = 0u32;
                for j in 0..kb.len() {
                    let pb = self.basis_parity(kb[j]);
                    if pb == 1 {
                        sign += pa[j + 1..].iter().map(|&p| p as u32).sum::<u32>();
                    }
                }
                let mut key = Vec::with_capacity(ka.len());
                let mut c = f.mul(ca, cb);
                for (&i, &j) in ka.iter().zip(kb) {
                    match self.mul_basis(i, j) {
                        Some((cc, k)) => {
                            c = f.mul(c, cc);
                            key.push(k);
                        }
                        None => continue 'inner,
                    }
                }
                if sign % 2 == 1 {
                    c = f.neg(c);
                }
                let e = acc.entry(key).or_insert(FieldElement::ZERO);
                *e = f.add(*e, c);
            }
        }
        Tensor {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn tensor_one(&self, k: usize) -> Tensor {
        let mut t = Tensor::default();
        t.terms.insert(vec![0; k], self.field.one());
        t
    }

    fn tensor_is_purely_even(&self, x: &Tensor) -> bool {
        x.terms.keys().all(|k| k.iter().all(|&i| self.basis_parity(i) == 0))
    }

    /// `p`-th power of a tensor whose terms pairwise commute: raise each term.
    fn tensor_frobenius(&self, x: &Tensor) -> Tensor {
        let f = &self.field;
        let p = f.characteristic() as u64;
        let mut out = Tensor::default();
        'terms: for (k, &c) in &x.terms {
            let mut key = Vec::with_capacity(k.len());
            let mut coeff = f.pow(c, p);
            for &i in k {
                let v = self.pow(&self.basis_element(i), p);
                match v.iter().position(|x| !x.is_zero()) {
                    Some(j) => {
                        coeff = f.mul(coeff, v[j]);
                        key.push(j);
                    }
                    None => continue 'terms,
                }
            }
            out.add_term(f, key, coeff);
        }
        out
    }

    pub fn tensor_pow(&self, x: &Tensor, k: usize, mut n: u64) -> Tensor {
        let p = self.field.characteristic() as u64;
        let mut base = x.clone();
        if self.tensor_is_purely_even(x) {
            while n > 0 && n.is_multiple_of(p) {
                base = self.tensor_frobenius(&base);
                n /= p;
            }
        }
        let mut result = self.tensor_one(k);
        while n > 0 {
            if n & 1 == 1 {
                result = self.tensor_mul(&result, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.tensor_mul(&base, &base);
            }
        }
        result
    }

    pub fn pure_tensor(&self, parts: &[&Element]) -> Tensor {
        let f = &self.field;
        let mut terms: Vec<(Vec<usize>, FieldElement)> = vec![(Vec::new(), f.one())];
        for part in parts {
            let mut next = Vec::new();
            for (k, c) in &terms {
                for (i, &x) in part.iter().enumerate() {
                    if !x.is_zero() {
                        let mut key = k.clone();
                        key.push(i);
                        next.push((key, f.mul(*c, x)));
                    }
                }
            }
            terms = next;
        }
        let mut t = Tensor::default();
        for (k, c) in terms {
            t.add_term(f, k, c);
        }
        t
    }

    // ---- coproduct on the whole algebra ----

    /// Coproduct of every basis monomial, built multiplicatively from the generators.
    pub fn monomial_coproducts(&self) -> Option<&[Tensor]> {
        let hopf = self.hopf.as_ref()?;
        Some(self.monomial_coproducts.get_or_init(|| {
            let mut out = vec![Tensor::default(); self.dim()];
            out[0] = self.tensor_one(2);
            for (idx, exps) in self.basis.iter().enumerate().skip(1) {
                let g = exps.iter().rposition(|&e| e > 0).expect("non-identity");
                let mut prev = exps.clone();
                prev[g] -= 1;
                let pi = self.index[&prev];
                out[idx] = self.tensor_mul(&out[pi], &hopf.coproduct[g]);
            }
            out
        }))
    }

    pub fn coproduct(&self, a: &Element) -> Option<Tensor> {
        let dm = self.monomial_coproducts()?;
        let f = &self.field;
        let mut out = Tensor::default();
        for (i, &x) in a.iter().enumerate() {
            if !x.is_zero() {
                out = out.add(f, &dm[i].scale(f, x));
            }
        }
        Some(out)
    }

    /// Antipode on a basis monomial: `S` reverses products with the Koszul sign.
    pub fn antipode_monomial(&self, i: usize) -> Option<Element> {
        let s = self.hopf.as_ref()?.antipode.as_ref()?;
        let mut out = self.one();
        for (g, &e) in self.basis[i].iter().enumerate() {
            for _ in 0..e {
                out = self.mul(&out, &s[g]);
            }
        }
        let c = self.odd_count(i);
        if (c * c.saturating_sub(1) / 2) % 2 == 1 {
            out = self.scale(self.field.neg(self.field.one()), &out);
        }
        Some(out)
    }

    // ---- structural comparison ----

    /// First structural difference, if any: field, generators, and Hopf data.
    pub fn structural_diff(&self, other: &SuperAlgebra) -> Option<String> {
        if self.field != other.field {
            return Some("fields differ".into());
        }
        if self.generators.len() != other.generators.len() {
            return Some("generator counts differ".into());
        }
        for (a, b) in self.generators.iter().zip(&other.generators) {
            if a != b {
                return Some(format!("generator {} differs from {}", a.name, b.name));
            }
        }
        match (&self.hopf, &other.hopf) {
            (None, None) => None,
            (Some(x), Some(y)) => {
                for (i, (a, b)) in x.coproduct.iter().zip(&y.coproduct).enumerate() {
                    if a != b {
                        return Some(format!("coproduct of {} differs", self.generators[i].name));
                    }
                }
                (x.antipode != y.antipode).then(|| "antipodes differ".into())
            }
            _ => Some("only one side has coproduct data".into()),
        }
    }

    pub fn rename_generators(mut self, names: &[&str]) -> Self {
        for (g, n) in self.generators.iter_mut().zip(names) {
            g.name = n.to_string();
        }
        self
    }

    /// The same presentation over a larger field, coefficients mapped through the
    /// canonical embedding.
    pub fn extend_scalars(&self, large: &FieldRef) -> Result<SuperAlgebra, AlgebraError> {
        let emb = self
            .field
            .embedding_into(large)
            .map_err(|e| AlgebraError::Invalid(e.to_string()))?;
        let map = |c: FieldElement| emb[c.code() as usize];
        let gens = self
            .generators
            .iter()
            .map(|g| Generator {
                power_image: g.power_image.as_ref().map(|pi| PowerImage {
                    coefficient: map(pi.coefficient),
                    exponents: pi.exponents.clone(),
                }),
                ..g.clone()
            })
            .collect();
        let out = SuperAlgebra::from_presentation(self.name.clone(), large, gens)?;
        match &self.hopf {
            None => Ok(out),
            Some(h) => {
                let tmap = |t: &Tensor| Tensor {
                    terms: t.terms.iter().map(|(k, &c)| (k.clone(), map(c))).collect(),
                };
                out.with_hopf(HopfData {
                    coproduct: h.coproduct.iter().map(tmap).collect(),
                    antipode: h
                        .antipode
                        .as_ref()
                        .map(|s| s.iter().map(|e| e.iter().map(|&c| map(c)).collect()).collect()),
                })
            }
        }
    }

    /// Nilpotency index of an element: least `n` with `a^n = 0`.
    pub fn nilpotency_index(&self, a: &Element) -> Option<u64> {
        let mut power = a.clone();
        for n in 1..=self.dim() as u64 + 1 {
            if self.is_zero(&power) {
                return Some(n);
            }
            power = self.mul(&power, a);
        }
        None
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<serde_json::Value> = self
            .generators
            .iter()
            .map(|g| {
                let mut img = serde_json::Map::new();
                if let Some(pi) = &g.power_image {
                    let v = self.monomial(&pi.exponents);
                    let i = v.iter().position(|x| !x.is_zero()).unwrap_or(0);
                    img.insert(self.monomial_name(i), serde_json::json!(pi.coefficient.code()));
                }
                serde_json::json!({
                    "name": g.name,
                    "parity": g.parity,
                    "zdegree": g.zdegree,
                    "bound": g.bound,
                    "power_image": img,
                })
            })
            .collect();
        let mut out = serde_json::json!({
            "name": self.name,
            "field": self.field.spec(),
            "dim": self.dim(),
            "generators": gens,
        });
        if let Some(h) = &self.hopf {
            let mut cop = serde_json::Map::new();
            for (g, t) in self.generators.iter().zip(&h.coproduct) {
                let terms: Vec<serde_json::Value> = t
                    .terms
                    .iter()
                    .map(|(k, c)| serde_json::json!([self.monomial_name(k[0]), self.monomial_name(k[1]), c.code()]))
                    .collect();
                cop.insert(g.name.clone(), serde_json::Value::Array(terms));
            }
            out["coproduct"] = serde_json::Value::Object(cop);
            if let Some(s) = &h.antipode {
                let mut anti = serde_json::Map::new();
                for (g, e) in self.generators.iter().zip(s) {
                    anti.insert(g.name.clone(), serde_json::Value::String(self.display(e)));
                }
                out["antipode"] = serde_json::Value::Object(anti);
            }
        }
        out
    }
}

// ---- catalog ----

fn exps_with(ngen: usize, entries: &[(usize, u32)]) -> Vec<u32> {
    let mut v = vec![0; ngen];
    for &(i, e) in entries {
        v[i] += e;
    }
    v
}

/// Evaluate an integer polynomial in variables `X_0..X_k, Y_0..Y_k` on `A⊗A`, with
/// `X_j ↦ left[j] ⊗ 1` and `Y_j ↦ 1 ⊗ right[j]`. All images must be even.
fn eval_split(alg: &SuperAlgebra, poly: &IntPolynomial, left: &[Element], right: &[Element]) -> Tensor {
    let f = alg.field();
    let p = num_bigint::BigInt::from(f.characteristic());
    let k = left.len();
    let mut cache: HashMap<(bool, usize, u32), Element> = HashMap::new();
    let mut power = |side: bool, j: usize, e: u32| -> Element {
        cache
            .entry((side, j, e))
            .or_insert_with(|| alg.pow(if side { &right[j] } else { &left[j] }, e as u64))
            .clone()
    };
    let mut out = Tensor::default();
    for (exps, c) in poly.terms() {
        let r = num_integer::Integer::mod_floor(c, &p);
        let r: i64 = num_traits::ToPrimitive::to_i64(&r).expect("small");
        if r == 0 {
            continue;
        }
        let mut l = alg.one();
        let mut rr = alg.one();
        for j in 0..k {
            if exps[j] > 0 {
                l = alg.mul(&l, &power(false, j, exps[j]));
            }
            if exps[k + j] > 0 {
                rr = alg.mul(&rr, &power(true, j, exps[k + j]));
            }
        }
        if alg.is_zero(&l) || alg.is_zero(&rr) {
            continue;
        }
        let t = alg.pure_tensor(&[&l, &rr]).scale(f, f.from_int(r));
        out = out.add(f, &t);
    }
    out
}

/// Evaluate an integer polynomial in `Z_0..Z_k` inside `A`.
fn eval_in(alg: &SuperAlgebra, poly: &IntPolynomial, args: &[Element]) -> Element {
    let f = alg.field();
    let p = num_bigint::BigInt::from(f.characteristic());
    let mut out = alg.zero();
    for (exps, c) in poly.terms() {
        let r = num_integer::Integer::mod_floor(c, &p);
        let r: i64 = num_traits::ToPrimitive::to_i64(&r).expect("small");
        if r == 0 {
            continue;
        }
        let mut t = alg.scale(f.from_int(r), &alg.one());
        for (j, &e) in exps.iter().enumerate() {
            if e > 0 {
                t = alg.mul(&t, &alg.pow(&args[j], e as u64));
            }
        }
        out = alg.add(&out, &t);
    }
    out
}

fn primitive(alg: &SuperAlgebra, g: usize) -> Tensor {
    let x = alg.generator(g);
    let one = alg.one();
    alg.pure_tensor(&[&x, &one]).add(alg.field(), &alg.pure_tensor(&[&one, &x]))
}

/// Witt-type coproducts `Δ(s_i) = S_{i-1}(s_1⊗1,…,s_i⊗1, 1⊗s_1,…,1⊗s_i)` and
/// antipodes from the negation polynomials, for the generator indices `gens`.
fn witt_hopf_parts(alg: &SuperAlgebra, gens: &[usize]) -> (Vec<Tensor>, Vec<Element>) {
    let p = alg.field().characteristic();
    let mut cop = Vec::new();
    let mut anti = Vec::new();
    for i in 0..gens.len() {
        let table = build_witt_table(i, p);
        let args: Vec<Element> = gens[..=i].iter().map(|&g| alg.generator(g)).collect();
        cop.push(eval_split(alg, table.sum(i), &args, &args));
        anti.push(eval_in(alg, table.negation(i), &args));
    }
    (cop, anti)
}

fn check_mn(m: usize, n: usize) -> Result<(), AlgebraError> {
    if m == 0 || n == 0 {
        return Err(AlgebraError::InvalidParameters(format!("m, n must be positive (m = {m}, n = {n})")));
    }
    Ok(())
}

fn pow_u32(p: u32, k: usize) -> Result<u32, AlgebraError> {
    p.checked_pow(k as u32)
        .filter(|&v| v <= 1 << 16)
        .ok_or_else(|| AlgebraError::InvalidParameters(format!("{p}^{k} is too large")))
}

/// `k[s_1..s_n(, σ)]/(s_i^p, s_n^{top}(, σ² − s_n^p))`.
fn emn_presentation(field: &FieldRef, n: usize, top: u32, odd: bool) -> Vec<Generator> {
    let p = field.characteristic();
    let ngen = n + odd as usize;
    let mut gens: Vec<Generator> = (1..=n).map(|i| Generator::new(format!("s{i}"), 0, if i < n { p } else { top })).collect();
    if odd {
        let mut sigma = Generator::new("sigma", 1, 2);
        sigma.power_image = Some(PowerImage {
            coefficient: field.one(),
            exponents: exps_with(ngen, &[(n - 1, p)]),
        });
        gens.push(sigma);
    }
    gens
}

fn mu_check(field: &FieldRef, mu: FieldElement) -> Result<(), AlgebraError> {
    if mu.is_zero() || mu.code() >= field.order() {
        return Err(AlgebraError::InvalidParameters(format!("mu = {} must be a nonzero field element", mu.code())));
    }
    Ok(())
}

/// Coproducts `Δ(s_i) = S_i(μ s_n^{p^m}⊗1, s_1⊗1, …, 1⊗μ s_n^{p^m}, 1⊗s_1, …)`.
fn mu_coproducts(alg: &SuperAlgebra, m: usize, n: usize, mu: FieldElement) -> Vec<Tensor> {
    let p = alg.field().characteristic();
    let ngen = alg.generators().len();
    let s0 = alg.scale(mu, &alg.monomial(&exps_with(ngen, &[(n - 1, p.pow(m as u32))])));
    (1..=n)
        .map(|i| {
            let table = build_witt_table(i, p);
            let mut args = vec![s0.clone()];
            args.extend((0..i).map(|g| alg.generator(g)));
            eval_split(alg, table.sum(i), &args, &args)
        })
        .collect()
}

pub fn catalog(entry: &CatalogEntry, field: &FieldRef) -> Result<SuperAlgebra, AlgebraError> {
    let p = field.characteristic();
    let name = entry.to_string();
    let alg = match *entry {
        CatalogEntry::GaR(r) => {
            let gens = (1..=r).map(|i| Generator::new(format!("s{i}"), 0, p)).collect();
            let a = SuperAlgebra::from_presentation(name, field, gens)?;
            let (cop, anti) = witt_hopf_parts(&a, &(0..r).collect::<Vec<_>>());
            a.with_hopf(HopfData {
                coproduct: cop,
                antipode: Some(anti),
            })?
        }
        CatalogEntry::GaMinus => {
            let a = SuperAlgebra::from_presentation(name, field, vec![Generator::new("sigma", 1, 2)])?;
            primitive_hopf(a)?
        }
        CatalogEntry::ZpPower(s) => {
            let gens = (1..=s).map(|i| Generator::new(format!("y{i}"), 0, p)).collect();
            SuperAlgebra::from_presentation(name, field, gens)?
        }
        CatalogEntry::Wm1(m) => {
            check_mn(m, 1)?;
            let a = SuperAlgebra::from_presentation(name, field, vec![Generator::new("s", 0, pow_u32(p, m)?)])?;
            primitive_hopf(a)?
        }
        CatalogEntry::Wm1Minus(m) => {
            check_mn(m, 1)?;
            let a = SuperAlgebra::from_presentation(name, field, vec![Generator::new("sigma", 1, 2 * pow_u32(p, m)?)])?;
            primitive_hopf(a)?
        }
        CatalogEntry::EmnMinus(m, n) | CatalogEntry::Emn(m, n) => {
            check_mn(m, n)?;
            let odd = matches!(entry, CatalogEntry::EmnMinus(..));
            let a = SuperAlgebra::from_presentation(name, field, emn_presentation(field, n, pow_u32(p, m)?, odd))?;
            let (mut cop, mut anti) = witt_hopf_parts(&a, &(0..n).collect::<Vec<_>>());
            if odd {
                cop.push(primitive(&a, n));
                anti.push(a.scale(field.neg(field.one()), &a.generator(n)));
            }
            a.with_hopf(HopfData {
                coproduct: cop,
                antipode: Some(anti),
            })?
        }
        CatalogEntry::EmnMuMinus(m, n, mu) | CatalogEntry::EmnMu(m, n, mu) => {
            check_mn(m, n)?;
            mu_check(field, mu)?;
            let odd = matches!(entry, CatalogEntry::EmnMuMinus(..));
            let a = SuperAlgebra::from_presentation(name, field, emn_presentation(field, n, pow_u32(p, m + 1)?, odd))?;
            let mut cop = mu_coproducts(&a, m, n, mu);
            if odd {
                cop.push(primitive(&a, n));
            }
            a.with_hopf(HopfData {
                coproduct: cop,
                antipode: None,
            })?
        }
    };
    Ok(alg)
}

/// Every generator primitive with antipode `g ↦ −g`.
fn primitive_hopf(a: SuperAlgebra) -> Result<SuperAlgebra, AlgebraError> {
    let f = a.field().clone();
    let n = a.generators().len();
    let cop = (0..n).map(|g| primitive(&a, g)).collect();
    let anti = (0..n).map(|g| a.scale(f.neg(f.one()), &a.generator(g))).collect();
    a.with_hopf(HopfData {
        coproduct: cop,
        antipode: Some(anti),
    })
}

/// The one-dimensional algebra `k`.
pub fn ground_algebra(field: &FieldRef) -> SuperAlgebra {
    SuperAlgebra::from_presentation("k", field, Vec::new())
        .expect("empty presentation")
        .with_hopf(HopfData {
            coproduct: Vec::new(),
            antipode: Some(Vec::new()),
        })
        .expect("empty hopf data")
}

fn embed_key(a_dim_gens: usize, b_gens: usize, exps: &[u32], offset_b: bool) -> Vec<u32> {
    let mut out = vec![0; a_dim_gens + b_gens];
    if offset_b {
        out[a_dim_gens..].copy_from_slice(exps);
    } else {
        out[..a_dim_gens].copy_from_slice(exps);
    }
    out
}

/// Tensor product with concatenated generators. Generators from different factors
/// commute strictly, matching the ungraded-commutative presentations of the catalog.
pub fn tensor(a: &SuperAlgebra, b: &SuperAlgebra) -> Result<SuperAlgebra, AlgebraError> {
    if a.field() != b.field() {
        return Err(AlgebraError::FieldMismatch);
    }
    let field = a.field();
    let na = a.generators().len();
    let nb = b.generators().len();
    let mut names: std::collections::HashSet<String> = a.generators().iter().map(|g| g.name.clone()).collect();
    let mut gens: Vec<Generator> = Vec::new();
    for g in a.generators() {
        let mut g = g.clone();
        g.power_image = g.power_image.map(|pi| PowerImage {
            coefficient: pi.coefficient,
            exponents: embed_key(na, nb, &pi.exponents, false),
        });
        gens.push(g);
    }
    for g in b.generators() {
        let mut g = g.clone();
        while !names.insert(g.name.clone()) {
            g.name.push('\'');
        }
        g.power_image = g.power_image.map(|pi| PowerImage {
            coefficient: pi.coefficient,
            exponents: embed_key(na, nb, &pi.exponents, true),
        });
        gens.push(g);
    }
    let name = match (a.name(), b.name()) {
        ("k", n) | (n, "k") => n.to_string(),
        (x, y) => format!("{x}x{y}"),
    };
    let out = SuperAlgebra::from_presentation(name, field, gens)?;
    let (Some(ha), Some(hb)) = (a.hopf(), b.hopf()) else {
        return Ok(out);
    };
    let move_tensor = |src: &SuperAlgebra, t: &Tensor, second: bool| -> Tensor {
        let mut r = Tensor::default();
        for (k, &c) in &t.terms {
            let key = k
                .iter()
                .map(|&i| out.index[&embed_key(na, nb, &src.basis()[i], second)])
                .collect();
            r.add_term(field, key, c);
        }
        r
    };
    let move_elem = |src: &SuperAlgebra, e: &Element, second: bool| -> Element {
        let mut r = out.zero();
        for (i, &c) in e.iter().enumerate() {
            if !c.is_zero() {
                r[out.index[&embed_key(na, nb, &src.basis()[i], second)]] = c;
            }
        }
        r
    };
    let mut cop: Vec<Tensor> = ha.coproduct.iter().map(|t| move_tensor(a, t, false)).collect();
    cop.extend(hb.coproduct.iter().map(|t| move_tensor(b, t, true)));
    let antipode = match (&ha.antipode, &hb.antipode) {
        (Some(sa), Some(sb)) => {
            let mut s: Vec<Element> = sa.iter().map(|e| move_elem(a, e, false)).collect();
            s.extend(sb.iter().map(|e| move_elem(b, e, true)));
            Some(s)
        }
        _ => None,
    };
    out.with_hopf(HopfData {
        coproduct: cop,
        antipode,
    })
}

// ---- Hopf axioms ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HopfReport {
    pub ok: bool,
    pub failure: Option<String>,
    pub checks: Vec<String>,
}

/// Apply a linear map factorwise on one slot of a tensor.
fn apply_slot(alg: &SuperAlgebra, t: &Tensor, slot: usize, map: &dyn Fn(usize) -> Tensor) -> Tensor {
    let f = alg.field();
    let mut out = Tensor::default();
    for (k, &c) in &t.terms {
        let image = map(k[slot]);
        for (ik, &ic) in &image.terms {
            let mut key = k[..slot].to_vec();
            key.extend_from_slice(ik);
            key.extend_from_slice(&k[slot + 1..]);
            out.add_term(f, key, f.mul(c, ic));
        }
    }
    out
}

pub fn hopf_check(alg: &SuperAlgebra) -> HopfReport {
    let mut checks = Vec::new();
    let fail = |checks: Vec<String>, msg: String| HopfReport {
        ok: false,
        failure: Some(msg),
        checks,
    };
    let Some(hopf) = alg.hopf() else {
        return fail(checks, "no coproduct data".into());
    };
    let f = alg.field();
    for (g, t) in hopf.coproduct.iter().enumerate() {
        let name = &alg.generators()[g].name;
        let parity = alg.generators()[g].parity;
        for k in t.terms.keys() {
            if (alg.basis_parity(k[0]) + alg.basis_parity(k[1])) % 2 != parity {
                return fail(checks, format!("coproduct of {name} is not parity-preserving"));
            }
        }
    }
    checks.push("parity".into());

    for (g, gen) in alg.generators().iter().enumerate() {
        let lhs = alg.tensor_pow(&hopf.coproduct[g], 2, gen.bound as u64);
        let rhs = match &gen.power_image {
            None => Tensor::default(),
            Some(pi) => {
                let e = alg.monomial(&pi.exponents);
                let e = alg.scale(pi.coefficient, &e);
                alg.coproduct(&e).expect("hopf data")
            }
        };
        if lhs != rhs {
            return fail(checks, format!("relation for {} is not respected by the coproduct", gen.name));
        }
    }
    checks.push("relations".into());

    let dm = alg.monomial_coproducts().expect("hopf data");
    for (g, gen) in alg.generators().iter().enumerate() {
        let d = &hopf.coproduct[g];
        let left = apply_slot(alg, d, 0, &|i| dm[i].clone());
        let right = apply_slot(alg, d, 1, &|i| dm[i].clone());
        if left != right {
            return fail(checks, format!("coassociativity fails on {}", gen.name));
        }
    }
    checks.push("coassociativity".into());

    for (g, gen) in alg.generators().iter().enumerate() {
        let d = &hopf.coproduct[g];
        let x = alg.generator(g);
        let mut left = alg.zero();
        let mut right = alg.zero();
        for (k, &c) in &d.terms {
            if k[0] == 0 {
                left[k[1]] = f.add(left[k[1]], c);
            }
            if k[1] == 0 {
                right[k[0]] = f.add(right[k[0]], c);
            }
        }
        if left != x || right != x {
            return fail(checks, format!("counit fails on {}", gen.name));
        }
    }
    checks.push("counit".into());

    for (g, gen) in alg.generators().iter().enumerate() {
        let d = &hopf.coproduct[g];
        let mut swapped = Tensor::default();
        for (k, &c) in &d.terms {
            let sign = alg.basis_parity(k[0]) * alg.basis_parity(k[1]);
            let c = if sign == 1 { f.neg(c) } else { c };
            swapped.add_term(f, vec![k[1], k[0]], c);
        }
        if &swapped != d {
            return fail(checks, format!("cocommutativity fails on {}", gen.name));
        }
    }
    checks.push("cocommutativity".into());

    if hopf.antipode.is_some() {
        let anti: Vec<Element> = (0..alg.dim()).map(|i| alg.antipode_monomial(i).expect("antipode")).collect();
        for i in 0..alg.dim() {
            let mut left = alg.zero();
            let mut right = alg.zero();
            for (k, &c) in &dm[i].terms {
                let l = alg.mul(&anti[k[0]], &alg.basis_element(k[1]));
                left = alg.add(&left, &alg.scale(c, &l));
                let r = alg.mul(&alg.basis_element(k[0]), &anti[k[1]]);
                right = alg.add(&right, &alg.scale(c, &r));
            }
            let expected = if i == 0 { alg.one() } else { alg.zero() };
            if left != expected || right != expected {
                return fail(checks, format!("antipode axiom fails on {}", alg.monomial_name(i)));
            }
        }
        checks.push("antipode".into());
    }
    HopfReport {
        ok: true,
        failure: None,
        checks,
    }
}

// ---- morphisms ----

#[derive(Clone, Debug)]
pub struct AlgebraMorphism {
    source: AlgebraRef,
    target: AlgebraRef,
    images: Vec<Element>,
    matrix: FieldMatrix,
}

impl AlgebraMorphism {
    pub fn source(&self) -> &AlgebraRef {
        &self.source
    }

    pub fn target(&self) -> &AlgebraRef {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    /// Matrix from the source monomial basis to the target monomial basis.
    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    pub fn apply(&self, a: &Element) -> Element {
        self.matrix.mul_vec(a)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AlgebraMorphism) -> Result<AlgebraMorphism, AlgebraError> {
        if let Some(diff) = self.target.structural_diff(&other.source) {
            return Err(AlgebraError::MorphismRejected(format!("cannot compose: {diff}")));
        }
        let images = self.images.iter().map(|x| other.apply(x)).collect();
        make_morphism(&self.source, &other.target, images)
    }

    pub fn is_surjective(&self) -> bool {
        self.matrix.rank() == self.target.dim()
    }

    pub fn is_injective(&self) -> bool {
        self.matrix.rank() == self.source.dim()
    }

    /// `(φ⊗φ)Δ(g) = Δ(φ(g))` on every generator.
    pub fn preserves_coproduct(&self) -> Result<(), String> {
        let (Some(ha), Some(_)) = (self.source.hopf(), self.target.hopf()) else {
            return Err("coproduct data missing".into());
        };
        let t = &self.target;
        let f = t.field();
        for (g, d) in ha.coproduct.iter().enumerate() {
            let mut lhs = Tensor::default();
            for (k, &c) in &d.terms {
                let a = self.matrix.column(k[0]);
                let b = self.matrix.column(k[1]);
                lhs = lhs.add(f, &t.pure_tensor(&[&a, &b]).scale(f, c));
            }
            let rhs = t.coproduct(&self.images[g]).expect("hopf data");
            if lhs != rhs {
                return Err(format!("coproduct of {} is not preserved", self.source.generators()[g].name));
            }
        }
        Ok(())
    }
}

pub fn make_morphism(source: &AlgebraRef, target: &AlgebraRef, images: Vec<Element>) -> Result<AlgebraMorphism, AlgebraError> {
    if source.field() != target.field() {
        return Err(AlgebraError::FieldMismatch);
    }
    if images.len() != source.generators().len() {
        return Err(AlgebraError::MorphismRejected("one image per source generator required".into()));
    }
    for (g, img) in source.generators().iter().zip(&images) {
        if img.len() != target.dim() {
            return Err(AlgebraError::MorphismRejected(format!("image of {} has the wrong length", g.name)));
        }
        if !target.is_zero(img) && target.parity_of(img) != Some(g.parity) {
            return Err(AlgebraError::MorphismRejected(format!("image of {} does not have parity {}", g.name, g.parity)));
        }
        if !target.is_zero(img) && !img[0].is_zero() {
            return Err(AlgebraError::MorphismRejected(format!("image of {} is not in the augmentation ideal", g.name)));
        }
    }
    for (gi, g) in source.generators().iter().enumerate() {
        let lhs = target.pow(&images[gi], g.bound as u64);
        let rhs = match &g.power_image {
            None => target.zero(),
            Some(pi) => {
                let mut r = target.scale(pi.coefficient, &target.one());
                for (j, &e) in pi.exponents.iter().enumerate() {
                    r = target.mul(&r, &target.pow(&images[j], e as u64));
                }
                r
            }
        };
        if lhs != rhs {
            let rel = match &g.power_image {
                None => format!("{}^{} = 0", g.name, g.bound),
                Some(_) => format!("{}^{} = power rule", g.name, g.bound),
            };
            return Err(AlgebraError::MorphismRejected(format!("relation {rel} is violated in {}", target.name())));
        }
    }
    let cols: Vec<Element> = source
        .basis()
        .iter()
        .map(|exps| {
            let mut r = target.one();
            for (j, &e) in exps.iter().enumerate() {
                if e > 0 {
                    r = target.mul(&r, &target.pow(&images[j], e as u64));
                }
            }
            r
        })
        .collect();
    let matrix = FieldMatrix::from_columns(target.field(), target.dim(), &cols);
    Ok(AlgebraMorphism {
        source: source.clone(),
        target: target.clone(),
        images,
        matrix,
    })
}

pub fn identity_morphism(a: &AlgebraRef) -> AlgebraMorphism {
    let images = (0..a.generators().len()).map(|g| a.generator(g)).collect();
    make_morphism(a, a, images).expect("identity is a morphism")
}

/// `kE⁻_{m,n} ↠ kE⁻_{m−1,n}`, identity on generators.
pub fn quotient_emn(m: usize, n: usize, field: &FieldRef) -> Result<AlgebraMorphism, AlgebraError> {
    if m < 2 {
        return Err(AlgebraError::InvalidParameters("quotient needs m ≥ 2".into()));
    }
    let a = Arc::new(catalog(&CatalogEntry::EmnMinus(m, n), field)?);
    let b = Arc::new(catalog(&CatalogEntry::EmnMinus(m - 1, n), field)?);
    let images = (0..=n).map(|g| b.generator(g)).collect();
    make_morphism(&a, &b, images)
}

/// `kE⁻_{m+1,n+1} ↠ kE⁻_{m,n,μ}`: `s_1 ↦ μ s_n^{p^m}`, `s_{i+1} ↦ s_i`, `σ ↦ σ`.
pub fn quotient_to_mu(m: usize, n: usize, mu: FieldElement, field: &FieldRef) -> Result<AlgebraMorphism, AlgebraError> {
    let a = Arc::new(catalog(&CatalogEntry::EmnMinus(m + 1, n + 1), field)?);
    let b = Arc::new(catalog(&CatalogEntry::EmnMuMinus(m, n, mu), field)?);
    let p = field.characteristic();
    let ngen = b.generators().len();
    let mut images = vec![b.scale(mu, &b.monomial(&exps_with(ngen, &[(n - 1, p.pow(m as u32))])))];
    images.extend((0..n).map(|g| b.generator(g)));
    images.push(b.generator(n));
    make_morphism(&a, &b, images)
}

/// `kW⁻_{m−1,1} ↪ kE⁻_{m,1}`, `σ ↦ σ`.
pub fn inclusion_w_minus(m: usize, field: &FieldRef) -> Result<AlgebraMorphism, AlgebraError> {
    if m < 2 {
        return Err(AlgebraError::InvalidParameters("inclusion needs m ≥ 2".into()));
    }
    let a = Arc::new(catalog(&CatalogEntry::Wm1Minus(m - 1), field)?);
    let b = Arc::new(catalog(&CatalogEntry::EmnMinus(m, 1), field)?);
    let images = vec![b.generator(1)];
    make_morphism(&a, &b, images)
}

/// `k[σ]/(σ²) → B` along an odd element.
pub fn odd_line_inclusion(target: &AlgebraRef, image: Element) -> Result<AlgebraMorphism, AlgebraError> {
    let a = Arc::new(catalog(&CatalogEntry::GaMinus, target.field())?);
    make_morphism(&a, target, vec![image])
}

/// `k[s]/(s^{p^m}) → B`, `s ↦ image`.
pub fn w_line_inclusion(m: usize, target: &AlgebraRef, image: Element) -> Result<AlgebraMorphism, AlgebraError> {
    let a = Arc::new(catalog(&CatalogEntry::Wm1(m), target.field())?);
    make_morphism(&a, target, vec![image])
}

// ---- integer grading and folding ----

/// `kE⁻_{m,n}` with `|σ| = a p^n` and `|s_i| = 2 a p^{i−1}`.
pub fn z_lift_emn(m: usize, n: usize, a: i64, field: &FieldRef) -> Result<SuperAlgebra, AlgebraError> {
    if a % 2 == 0 {
        return Err(AlgebraError::InvalidParameters(format!("a = {a} must be odd")));
    }
    let mut alg = catalog(&CatalogEntry::EmnMinus(m, n), field)?;
    let p = field.characteristic() as i64;
    for (i, g) in alg.generators.iter_mut().enumerate() {
        g.zdegree = Some(if i < n { 2 * a * p.pow(i as u32) } else { a * p.pow(n as u32) });
    }
    alg.name = format!("E~-({m},{n};a={a})");
    Ok(alg)
}

/// Collapse the integer grading: parity becomes the degree mod 2.
pub fn fold(alg: &SuperAlgebra, name: impl Into<String>) -> Result<SuperAlgebra, AlgebraError> {
    let mut gens = alg.generators.clone();
    for g in gens.iter_mut() {
        let d = g
            .zdegree
            .ok_or_else(|| AlgebraError::Invalid(format!("generator {} has no integer degree", g.name)))?;
        g.parity = d.rem_euclid(2) as u8;
        g.zdegree = None;
    }
    let out = SuperAlgebra::from_presentation(name, alg.field(), gens)?;
    match alg.hopf() {
        Some(h) => out.with_hopf(h.clone()),
        None => Ok(out),
    }
}

/// Summary for tables and JSON.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraSummary {
    pub name: String,
    pub field: FieldSpec,
    pub dim: usize,
    pub even_dim: usize,
    pub odd_dim: usize,
}

pub fn summarize(alg: &SuperAlgebra) -> AlgebraSummary {
    let odd = (0..alg.dim()).filter(|&i| alg.basis_parity(i) == 1).count();
    AlgebraSummary {
        name: alg.name.clone(),
        field: alg.field.spec().clone(),
        dim: alg.dim(),
        even_dim: alg.dim() - odd,
        odd_dim: odd,
    }
}
