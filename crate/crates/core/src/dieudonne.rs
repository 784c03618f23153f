//! Finite Dieudonné modules killed by `p`, stored as a pair of semilinear operators.
//!
//! `F` acts on coordinates as `v ↦ F_mat · σ(v)` and `V` as `v ↦ V_mat · σ⁻¹(v)`,
//! where `σ` raises each coordinate to the `p`-th power.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Echelon, FieldElement, FieldMatrix, FieldRef};
use crate::superalg::{catalog, AlgebraError, CatalogEntry, SuperAlgebra};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DieudonneError {
    #[error("m and n must be positive (got m = {m}, n = {n})")]
    InvalidIndices { m: usize, n: usize },
    #[error("mu must be nonzero")]
    ZeroMu,
    #[error("element code {0} is not in the field")]
    FieldMismatch(u32),
    #[error("search guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("module has no marked generator")]
    NotCyclic,
    #[error("quotient of dimension {dim} with V-order {v_order} and F-order {f_order} is not classifiable")]
    Unclassifiable { dim: usize, v_order: usize, f_order: usize },
}

/// Largest dimension accepted by the exhaustive searches.
pub const GUARD_MAX_DIM: usize = 5;
/// Largest field order accepted by the exhaustive searches.
pub const GUARD_MAX_ORDER: u32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KochKind {
    Mmn,
    Mmnmu,
}

/// Isomorphism-class label from the classification of cyclic quotients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KochLabel {
    pub kind: KochKind,
    pub m: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<FieldElement>,
}

impl KochLabel {
    pub fn mmn(m: usize, n: usize) -> Self {
        KochLabel {
            kind: KochKind::Mmn,
            m,
            n,
            mu: None,
        }
    }

    pub fn mmnmu(m: usize, n: usize, mu: FieldElement) -> Self {
        KochLabel {
            kind: KochKind::Mmnmu,
            m,
            n,
            mu: Some(mu),
        }
    }

    /// Dimension of the labeled module.
    pub fn dim(&self) -> usize {
        match self.kind {
            KochKind::Mmn => self.m + self.n - 1,
            KochKind::Mmnmu => self.m + self.n,
        }
    }

    pub fn build(&self, field: &FieldRef) -> Result<SemilinearModule, DieudonneError> {
        match self.kind {
            KochKind::Mmn => build_mmn(self.m, self.n, field),
            KochKind::Mmnmu => build_mmnmu(self.m, self.n, self.mu.ok_or(DieudonneError::ZeroMu)?, field),
        }
    }
}

impl fmt::Display for KochLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mu {
            Some(mu) => write!(f, "M({},{},mu={})", self.m, self.n, mu.code()),
            None => write!(f, "M({},{})", self.m, self.n),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SemilinearModule {
    field: FieldRef,
    v_mat: FieldMatrix,
    f_mat: FieldMatrix,
    generator: Option<Vec<FieldElement>>,
}

impl fmt::Debug for SemilinearModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemilinearModule")
            .field("field", &self.field.spec())
            .field("V", &self.v_mat)
            .field("F", &self.f_mat)
            .field("generator", &self.generator)
            .finish()
    }
}

fn frobenius_vec(field: &FieldRef, v: &[FieldElement], k: i64) -> Vec<FieldElement> {
    v.iter().map(|&x| field.frobenius(x, k)).collect()
}

fn frobenius_mat(m: &FieldMatrix, k: i64) -> FieldMatrix {
    let f = m.field().clone();
    m.map_entries(|x| f.frobenius(x, k))
}

impl SemilinearModule {
    pub fn new(
        field: &FieldRef,
        v_mat: FieldMatrix,
        f_mat: FieldMatrix,
        generator: Option<Vec<FieldElement>>,
    ) -> Self {
        SemilinearModule {
            field: field.clone(),
            v_mat,
            f_mat,
            generator,
        }
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.v_mat.cols()
    }

    pub fn v_mat(&self) -> &FieldMatrix {
        &self.v_mat
    }

    pub fn f_mat(&self) -> &FieldMatrix {
        &self.f_mat
    }

    pub fn generator(&self) -> Option<&[FieldElement]> {
        self.generator.as_deref()
    }

    pub fn with_f_mat(&self, f_mat: FieldMatrix) -> Self {
        SemilinearModule {
            f_mat,
            ..self.clone()
        }
    }

    pub fn apply_f(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        self.f_mat.mul_vec(&frobenius_vec(&self.field, v, 1))
    }

    pub fn apply_v(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        self.v_mat.mul_vec(&frobenius_vec(&self.field, v, -1))
    }

    /// Joint kernel of `V` and `F`.
    pub fn socle_dim(&self) -> usize {
        let stacked = self.v_mat.vstack(&self.f_mat).expect("same width");
        self.dim() - stacked.rank()
    }

    /// Smallest `k` with `op^k(v) = 0`, if reached within `dim + 1` steps.
    fn order_of(&self, v: &[FieldElement], op: impl Fn(&[FieldElement]) -> Vec<FieldElement>) -> Option<usize> {
        let mut w = v.to_vec();
        for k in 0..=self.dim() + 1 {
            if w.iter().all(|x| x.is_zero()) {
                return Some(k);
            }
            w = op(&w);
        }
        None
    }

    /// Nilpotency order of the semilinear operator `F` on the whole module.
    pub fn f_order(&self) -> Option<usize> {
        semilinear_nilpotency(&self.f_mat, 1)
    }

    pub fn v_order(&self) -> Option<usize> {
        semilinear_nilpotency(&self.v_mat, -1)
    }
}

/// Smallest `k` with `A · σ^t(A) · … · σ^{(k-1)t}(A) = 0`.
fn semilinear_nilpotency(a: &FieldMatrix, twist: i64) -> Option<usize> {
    let d = a.cols();
    let mut power = FieldMatrix::identity(a.field(), d);
    for k in 0..=d {
        if power.is_zero() {
            return Some(k);
        }
        power = power.mul(&frobenius_mat(a, twist * k as i64)).expect("square");
    }
    power.is_zero().then_some(d + 1)
}

fn check_indices(m: usize, n: usize) -> Result<(), DieudonneError> {
    if m == 0 || n == 0 {
        return Err(DieudonneError::InvalidIndices { m, n });
    }
    Ok(())
}

fn unit(field: &FieldRef, d: usize, i: usize) -> Vec<FieldElement> {
    let mut v = vec![field.zero(); d];
    v[i] = field.one();
    v
}

/// `D_k/(V^m, F^n, p)` with basis `V^{m-1}g, …, Vg, g, Fg, …, F^{n-1}g`.
pub fn build_mmn(m: usize, n: usize, field: &FieldRef) -> Result<SemilinearModule, DieudonneError> {
    check_indices(m, n)?;
    let d = m + n - 1;
    let g = m - 1;
    let mut v_mat = FieldMatrix::zeros(field, d, d);
    let mut f_mat = FieldMatrix::zeros(field, d, d);
    for i in 1..=g {
        v_mat.set(i - 1, i, field.one());
    }
    for i in g..d - 1 {
        f_mat.set(i + 1, i, field.one());
    }
    Ok(SemilinearModule::new(field, v_mat, f_mat, Some(unit(field, d, g))))
}

/// `D_k/(F^n − μV^m, p)` with basis `V^m g, …, g, Fg, …, F^{n-1}g`.
pub fn build_mmnmu(m: usize, n: usize, mu: FieldElement, field: &FieldRef) -> Result<SemilinearModule, DieudonneError> {
    check_indices(m, n)?;
    if mu.code() >= field.order() {
        return Err(DieudonneError::FieldMismatch(mu.code()));
    }
    if mu.is_zero() {
        return Err(DieudonneError::ZeroMu);
    }
    let d = m + n;
    let g = m;
    let mut v_mat = FieldMatrix::zeros(field, d, d);
    let mut f_mat = FieldMatrix::zeros(field, d, d);
    for i in 1..=g {
        v_mat.set(i - 1, i, field.one());
    }
    for i in g..d - 1 {
        f_mat.set(i + 1, i, field.one());
    }
    f_mat.set(0, d - 1, mu);
    Ok(SemilinearModule::new(field, v_mat, f_mat, Some(unit(field, d, g))))
}

/// Outcome of [`validate_module`]; `failure` names the first violated relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub failure: Option<String>,
}

impl ValidationReport {
    fn fail(msg: impl Into<String>) -> Self {
        ValidationReport {
            ok: false,
            failure: Some(msg.into()),
        }
    }
}

/// Check shapes, the semilinearity encoding, `FV = VF = 0` and nilpotency.
/// With `bounds = Some((m, n))` the orders of `V` and `F` must not exceed `m` and `n`.
pub fn validate_module(module: &SemilinearModule, bounds: Option<(usize, usize)>) -> ValidationReport {
    let d = module.dim();
    let f = module.field();
    if module.v_mat.rows() != d || module.f_mat.rows() != d || module.f_mat.cols() != d {
        return ValidationReport::fail("operator matrices are not square of the module dimension");
    }
    if let Some(g) = &module.generator {
        if g.len() != d {
            return ValidationReport::fail("generator has the wrong length");
        }
    }
    let x = f.primitive_element();
    for i in 0..d {
        let e = unit(f, d, i);
        let xe: Vec<FieldElement> = e.iter().map(|&c| f.mul(x, c)).collect();
        let lhs = module.apply_f(&xe);
        let rhs: Vec<FieldElement> = module.apply_f(&e).iter().map(|&c| f.mul(f.frobenius(x, 1), c)).collect();
        if lhs != rhs {
            return ValidationReport::fail("F(x v) = x^p F(v)");
        }
        let lhs = module.apply_v(&xe);
        let rhs: Vec<FieldElement> = module.apply_v(&e).iter().map(|&c| f.mul(f.frobenius(x, -1), c)).collect();
        if lhs != rhs {
            return ValidationReport::fail("V(x v) = x^(1/p) V(v)");
        }
    }
    if !module.f_mat.mul(&frobenius_mat(&module.v_mat, 1)).expect("square").is_zero() {
        return ValidationReport::fail("FV = 0");
    }
    if !module.v_mat.mul(&frobenius_mat(&module.f_mat, -1)).expect("square").is_zero() {
        return ValidationReport::fail("VF = 0");
    }
    let Some(fo) = module.f_order() else {
        return ValidationReport::fail("F nilpotent");
    };
    let Some(vo) = module.v_order() else {
        return ValidationReport::fail("V nilpotent");
    };
    if let Some((m, n)) = bounds {
        if vo > m {
            return ValidationReport::fail(format!("V^{m} = 0"));
        }
        if fo > n {
            return ValidationReport::fail(format!("F^{n} = 0"));
        }
    }
    ValidationReport { ok: true, failure: None }
}

/// Isomorphism of labels: same kind and indices, and for twisted labels
/// `μ/μ'` is a `(p^{m+n} − 1)`-th power in `F_q^×`.
pub fn koch_iso_test(a: &KochLabel, b: &KochLabel, field: &FieldRef) -> Result<bool, DieudonneError> {
    for l in [a, b] {
        if let Some(mu) = l.mu {
            if mu.code() >= field.order() {
                return Err(DieudonneError::FieldMismatch(mu.code()));
            }
            if mu.is_zero() {
                return Err(DieudonneError::ZeroMu);
            }
        }
    }
    if a.kind != b.kind || a.m != b.m || a.n != b.n {
        return Ok(false);
    }
    match (a.mu, b.mu) {
        (Some(mu), Some(nu)) => {
            let q1 = (field.order() - 1) as u64;
            let p = field.characteristic() as u64;
            let mut pk = 1u64;
            for _ in 0..a.m + a.n {
                pk = pk * p % q1;
            }
            let exp = (pk + q1 - 1) % q1;
            let g = exp.gcd(&q1);
            let ratio = field.div(mu, nu).expect("nonzero");
            Ok(field.pow(ratio, q1 / g) == field.one())
        }
        _ => Ok(true),
    }
}

fn guard(dim: usize, q: u32) -> Result<(), DieudonneError> {
    if dim > GUARD_MAX_DIM || q > GUARD_MAX_ORDER {
        return Err(DieudonneError::GuardExceeded(format!(
            "dimension {dim} (max {GUARD_MAX_DIM}), field order {q} (max {GUARD_MAX_ORDER})"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Op {
    V,
    F,
}

/// Words in `V, F` whose values on the generator form a basis of a cyclic module.
fn spanning_words(module: &SemilinearModule) -> Result<Vec<Vec<Op>>, DieudonneError> {
    let g = module.generator().ok_or(DieudonneError::NotCyclic)?;
    let mut ech = Echelon::new(module.field(), module.dim());
    let mut words = Vec::new();
    let mut queue = VecDeque::from([(Vec::new(), g.to_vec())]);
    while let Some((word, v)) = queue.pop_front() {
        if ech.insert(&v).is_none() {
            continue;
        }
        for op in [Op::V, Op::F] {
            let mut w = word.clone();
            w.push(op);
            queue.push_back((w, apply(module, op, &v)));
        }
        words.push(word);
    }
    if words.len() != module.dim() {
        return Err(DieudonneError::NotCyclic);
    }
    Ok(words)
}

fn apply(module: &SemilinearModule, op: Op, v: &[FieldElement]) -> Vec<FieldElement> {
    match op {
        Op::V => module.apply_v(v),
        Op::F => module.apply_f(v),
    }
}

fn eval_word(module: &SemilinearModule, word: &[Op], v: &[FieldElement]) -> Vec<FieldElement> {
    word.iter().fold(v.to_vec(), |acc, &op| apply(module, op, &acc))
}

/// Every vector of `F_q^d` in code order.
fn all_vectors(field: &FieldRef, d: usize) -> impl Iterator<Item = Vec<FieldElement>> + '_ {
    let q = field.order() as u64;
    (0..q.pow(d as u32)).map(move |mut code| {
        (0..d)
            .map(|_| {
                let c = (code % q) as u32;
                code /= q;
                FieldElement(c)
            })
            .collect()
    })
}

/// Exhaustive isomorphism test for a cyclic `m` against `n`: the image of the
/// generator determines the map, so every candidate image is tried.
pub fn brute_force_iso(m: &SemilinearModule, n: &SemilinearModule) -> Result<bool, DieudonneError> {
    let q = m.field().order();
    guard(m.dim().max(n.dim()), q.max(n.field().order()))?;
    if m.field() != n.field() || m.dim() != n.dim() {
        return Ok(false);
    }
    let d = m.dim();
    let field = m.field();
    let words = spanning_words(m)?;
    let g = m.generator().expect("cyclic");
    let basis_cols: Vec<Vec<FieldElement>> = words.iter().map(|w| eval_word(m, w, g)).collect();
    let basis = FieldMatrix::from_columns(field, d, &basis_cols);
    let basis_inv = invert(&basis).expect("spanning words give a basis");
    let f_m = m.f_mat();
    let v_m = m.v_mat();
    for candidate in all_vectors(field, d) {
        let image_cols: Vec<Vec<FieldElement>> = words.iter().map(|w| eval_word(n, w, &candidate)).collect();
        let image = FieldMatrix::from_columns(field, d, &image_cols);
        if image.rank() < d {
            continue;
        }
        let phi = image.mul(&basis_inv).expect("square");
        let f_ok = phi.mul(f_m).expect("square") == n.f_mat().mul(&frobenius_mat(&phi, 1)).expect("square");
        let v_ok = phi.mul(v_m).expect("square") == n.v_mat().mul(&frobenius_mat(&phi, -1)).expect("square");
        if f_ok && v_ok {
            return Ok(true);
        }
    }
    Ok(false)
}

fn invert(m: &FieldMatrix) -> Option<FieldMatrix> {
    let d = m.rows();
    let cols: Option<Vec<Vec<FieldElement>>> = (0..d).map(|i| m.solve(&unit(m.field(), d, i))).collect();
    Some(FieldMatrix::from_columns(m.field(), d, &cols?))
}

fn closure(module: &SemilinearModule, seed: &Echelon) -> Echelon {
    let mut ech = seed.clone();
    let mut pending: Vec<Vec<FieldElement>> = ech.rows().to_vec();
    while let Some(v) = pending.pop() {
        for image in [module.apply_v(&v), module.apply_f(&v)] {
            if let Some(r) = ech.insert(&image) {
                pending.push(r);
            }
        }
    }
    ech
}

/// All submodules, each given by its reduced row-echelon basis.
pub fn enumerate_submodules(module: &SemilinearModule) -> Result<Vec<Vec<Vec<FieldElement>>>, DieudonneError> {
    let d = module.dim();
    let field = module.field();
    guard(d, field.order())?;
    let zero = Echelon::new(field, d);
    let mut seen: BTreeMap<Vec<Vec<u32>>, Echelon> = BTreeMap::new();
    seen.insert(Vec::new(), zero.clone());
    let mut queue = VecDeque::from([zero]);
    while let Some(sub) = queue.pop_front() {
        for v in all_vectors(field, d) {
            // One representative per line suffices.
            if v.iter().find(|x| !x.is_zero()) != Some(&FieldElement::ONE) || sub.contains(&v) {
                continue;
            }
            let mut seed = sub.clone();
            seed.insert(&v);
            let bigger = closure(module, &seed);
            let key = echelon_key(&bigger);
            if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(bigger.clone());
                queue.push_back(bigger);
            }
        }
    }
    let mut subs: Vec<Vec<Vec<FieldElement>>> = seen.values().map(Echelon::reduced_basis).collect();
    subs.sort_by_key(|s| (s.len(), s.iter().map(|r| r.iter().map(|x| x.code()).collect::<Vec<_>>()).collect::<Vec<_>>()));
    Ok(subs)
}

fn echelon_key(e: &Echelon) -> Vec<Vec<u32>> {
    e.reduced_basis().iter().map(|r| r.iter().map(|x| x.code()).collect()).collect()
}

/// The quotient `M/N` for a submodule `N` given by a basis.
pub fn quotient_module(module: &SemilinearModule, sub_basis: &[Vec<FieldElement>]) -> SemilinearModule {
    let d = module.dim();
    let field = module.field();
    let mut ech = Echelon::new(field, d);
    for r in sub_basis {
        ech.insert(r);
    }
    let free: Vec<usize> = (0..d).filter(|c| !ech.pivots().contains(c)).collect();
    let project = |v: &[FieldElement]| -> Vec<FieldElement> {
        let mut w = v.to_vec();
        ech.reduce(&mut w);
        free.iter().map(|&c| w[c]).collect()
    };
    let k = free.len();
    let v_cols: Vec<Vec<FieldElement>> = free.iter().map(|&c| project(&module.apply_v(&unit(field, d, c)))).collect();
    let f_cols: Vec<Vec<FieldElement>> = free.iter().map(|&c| project(&module.apply_f(&unit(field, d, c)))).collect();
    SemilinearModule::new(
        field,
        FieldMatrix::from_columns(field, k, &v_cols),
        FieldMatrix::from_columns(field, k, &f_cols),
        module.generator().map(project),
    )
}

/// Label a nonzero cyclic module from the orders of `V` and `F` on its generator,
/// then confirm the label by exhaustive search.
pub fn classify_cyclic(module: &SemilinearModule) -> Result<KochLabel, DieudonneError> {
    let g = module.generator().ok_or(DieudonneError::NotCyclic)?.to_vec();
    let d = module.dim();
    let a = module.order_of(&g, |v| module.apply_v(v)).unwrap_or(0);
    let b = module.order_of(&g, |v| module.apply_f(v)).unwrap_or(0);
    let unclassifiable = DieudonneError::Unclassifiable {
        dim: d,
        v_order: a,
        f_order: b,
    };
    let label = if a >= 1 && b >= 1 && d == a + b - 1 {
        KochLabel::mmn(a, b)
    } else if a >= 2 && b >= 2 && d == a + b - 2 {
        let top = (1..b).fold(g.clone(), |acc, _| module.apply_f(&acc));
        let bottom = (1..a).fold(g.clone(), |acc, _| module.apply_v(&acc));
        let i = bottom.iter().position(|x| !x.is_zero()).ok_or(unclassifiable.clone())?;
        let mu = module.field().div(top[i], bottom[i]).map_err(|_| unclassifiable.clone())?;
        let scaled: Vec<FieldElement> = bottom.iter().map(|&x| module.field().mul(mu, x)).collect();
        if mu.is_zero() || scaled != top {
            return Err(unclassifiable);
        }
        KochLabel::mmnmu(a - 1, b - 1, mu)
    } else {
        return Err(unclassifiable);
    };
    let model = label.build(module.field())?;
    if !brute_force_iso(&model, module)? {
        return Err(unclassifiable);
    }
    Ok(label)
}

/// Labels of `M_{m,n}/N` for every proper submodule `N`, ordered by submodule.
pub fn enumerate_cyclic_quotients(m: usize, n: usize, field: &FieldRef) -> Result<Vec<KochLabel>, DieudonneError> {
    check_indices(m, n)?;
    guard(m + n - 1, field.order())?;
    let module = build_mmn(m, n, field)?;
    let subs = enumerate_submodules(&module)?;
    subs.iter()
        .filter(|s| s.len() < module.dim())
        .map(|s| classify_cyclic(&quotient_module(&module, s)))
        .collect()
}

/// Group labels into isomorphism classes with multiplicities, in first-seen order.
pub fn label_multiset(labels: &[KochLabel], field: &FieldRef) -> Vec<(KochLabel, usize)> {
    let mut out: Vec<(KochLabel, usize)> = Vec::new();
    for l in labels {
        match out
            .iter_mut()
            .find(|(r, _)| koch_iso_test(r, l, field).unwrap_or(false))
        {
            Some((_, c)) => *c += 1,
            None => out.push((l.clone(), 1)),
        }
    }
    out
}

/// The even group algebra attached to a label: `kE_{m,n}` or `kE_{m,n,μ}`.
pub fn label_to_algebra(label: &KochLabel, field: &FieldRef) -> Result<SuperAlgebra, AlgebraError> {
    match (label.kind, label.mu) {
        (KochKind::Mmn, _) => catalog(&CatalogEntry::Emn(label.m, label.n), field),
        (KochKind::Mmnmu, Some(mu)) => catalog(&CatalogEntry::EmnMu(label.m, label.n, mu), field),
        (KochKind::Mmnmu, None) => Err(AlgebraError::InvalidParameters("twisted label without mu".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;

    #[test]
    fn small_constructions() {
        let f = Field::get(3, 1).unwrap();
        let k = build_mmn(1, 1, &f).unwrap();
        assert_eq!(k.dim(), 1);
        assert!(k.v_mat().is_zero() && k.f_mat().is_zero());
        let m31 = build_mmn(3, 1, &f).unwrap();
        assert_eq!(m31.dim(), 3);
        assert!(m31.f_mat().is_zero());
        assert_eq!(m31.v_mat().rank(), 2);
        assert_eq!(m31.v_order(), Some(3));
        assert_eq!(build_mmn(2, 2, &f).unwrap().dim(), 3);
        let t = build_mmnmu(1, 1, f.one(), &f).unwrap();
        let g = t.generator().unwrap().to_vec();
        assert_eq!(t.apply_f(&g), t.apply_v(&g));
        assert!(t.apply_f(&g).iter().any(|x| !x.is_zero()));
        assert_eq!(build_mmnmu(1, 1, f.zero(), &f), Err(DieudonneError::ZeroMu));
    }

    #[test]
    fn constructors_validate() {
        let f = Field::get(3, 1).unwrap();
        for m in 1..=3 {
            for n in 1..=3 {
                let a = build_mmn(m, n, &f).unwrap();
                assert!(validate_module(&a, Some((m, n))).ok);
                assert_eq!(a.dim(), m + n - 1);
                for mu in f.nonzero_elements() {
                    let b = build_mmnmu(m, n, mu, &f).unwrap();
                    assert!(validate_module(&b, None).ok, "{m} {n} {mu:?}");
                    assert_eq!(b.dim(), m + n);
                    assert_eq!(b.socle_dim(), 1);
                }
            }
        }
    }

    #[test]
    fn validation_catches_non_nilpotent_f() {
        let f = Field::get(3, 1).unwrap();
        let a = build_mmn(2, 2, &f).unwrap();
        let bad = a.with_f_mat(FieldMatrix::identity(&f, 3));
        let report = validate_module(&bad, None);
        assert!(!report.ok);
        assert!(report.failure.is_some());
    }

    #[test]
    fn koch_examples() {
        let f3 = Field::get(3, 1).unwrap();
        let a = KochLabel::mmnmu(1, 1, f3.from_int(1));
        let b = KochLabel::mmnmu(1, 1, f3.from_int(2));
        assert!(!koch_iso_test(&a, &b, &f3).unwrap());
        assert!(koch_iso_test(&a, &a, &f3).unwrap());
        let f27 = Field::get(3, 3).unwrap();
        let g = f27.primitive_element();
        let one = KochLabel::mmnmu(1, 2, f27.one());
        assert!(!koch_iso_test(&one, &KochLabel::mmnmu(1, 2, g), &f27).unwrap());
        let f9 = Field::get(3, 2).unwrap();
        let g2 = f9.pow(f9.primitive_element(), 2);
        assert!(koch_iso_test(&KochLabel::mmnmu(1, 2, f9.one()), &KochLabel::mmnmu(1, 2, g2), &f9).unwrap());
        assert!(!koch_iso_test(&KochLabel::mmn(1, 2), &KochLabel::mmn(2, 1), &f9).unwrap());
    }

    #[test]
    fn brute_force_basics() {
        let f = Field::get(3, 1).unwrap();
        let a = build_mmn(2, 2, &f).unwrap();
        assert!(brute_force_iso(&a, &a).unwrap());
        assert!(!brute_force_iso(&build_mmn(1, 1, &f).unwrap(), &build_mmn(2, 1, &f).unwrap()).unwrap());
        let big = build_mmn(3, 4, &f).unwrap();
        assert!(matches!(brute_force_iso(&big, &big), Err(DieudonneError::GuardExceeded(_))));
    }

    #[test]
    fn quotients_of_small_modules() {
        let f = Field::get(3, 1).unwrap();
        assert_eq!(enumerate_cyclic_quotients(1, 1, &f).unwrap(), vec![KochLabel::mmn(1, 1)]);
        let q = enumerate_cyclic_quotients(2, 1, &f).unwrap();
        assert_eq!(q, vec![KochLabel::mmn(2, 1), KochLabel::mmn(1, 1)]);
    }

    #[test]
    fn labels_to_algebras() {
        let f = Field::get(3, 1).unwrap();
        let a = label_to_algebra(&KochLabel::mmn(1, 1), &f).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.generators()[0].bound, 3);
        let w = label_to_algebra(&KochLabel::mmn(2, 1), &f).unwrap();
        assert_eq!(w.generators()[0].bound, 9);
        for m in 1..=2 {
            for n in 1..=2 {
                let e = label_to_algebra(&KochLabel::mmn(m, n), &f).unwrap();
                assert_eq!(e.dim(), 3usize.pow((m + n - 1) as u32));
                let t = label_to_algebra(&KochLabel::mmnmu(m, n, f.one()), &f).unwrap();
                assert_eq!(t.dim(), 3usize.pow((m + n) as u32));
            }
        }
    }
}
