//! Modules over catalog algebras, projectivity, minimal resolutions of the trivial
//! module, Ext dimensions, Yoneda products and maps induced by algebra morphisms.
//!
//! Resolutions are computed over the underlying ungraded algebra. Parity is carried
//! as a label on free generators, and every linear solve is split by parity.

use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{Echelon, FieldElement, FieldMatrix, FieldRef, LinearSolver};
use crate::superalg::{
    catalog, make_morphism, AlgebraError, AlgebraMorphism, AlgebraRef, CatalogEntry, Element, SuperAlgebra,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("resolution computed to degree {have}, degree {need} required")]
    InsufficientLength { have: usize, need: usize },
    #[error("algebra error: {0}")]
    Algebra(#[from] AlgebraError),
    #[error("morphism does not match the resolutions")]
    MorphismMismatch,
    #[error("no chain-map lift exists in degree {0}")]
    LiftFailed(usize),
    #[error("class dictionary: {0}")]
    Dictionary(String),
}

// ---- modules ----

#[derive(Clone, Debug)]
pub struct SuperModule {
    algebra: AlgebraRef,
    action: Vec<FieldMatrix>,
    parities: Vec<u8>,
}

impl SuperModule {
    /// Build and validate.
    pub fn new(algebra: &AlgebraRef, action: Vec<FieldMatrix>, parities: Vec<u8>) -> Result<Self, HomologyError> {
        let m = SuperModule {
            algebra: algebra.clone(),
            action,
            parities,
        };
        let report = validate_module(&m);
        match report.failure {
            None => Ok(m),
            Some(f) => Err(HomologyError::InvalidModule(f)),
        }
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    pub fn field(&self) -> &FieldRef {
        self.algebra.field()
    }

    pub fn dim(&self) -> usize {
        self.parities.len()
    }

    pub fn action(&self, g: usize) -> &FieldMatrix {
        &self.action[g]
    }

    pub fn actions(&self) -> &[FieldMatrix] {
        &self.action
    }

    pub fn parities(&self) -> &[u8] {
        &self.parities
    }

    /// Action matrix of a basis monomial of the algebra.
    pub fn monomial_action(&self, exps: &[u32]) -> FieldMatrix {
        let mut m = FieldMatrix::identity(self.field(), self.dim());
        for (g, &e) in exps.iter().enumerate() {
            if e > 0 {
                m = m.mul(&self.action[g].pow(e as u64)).expect("square");
            }
        }
        m
    }

    /// Action matrix of an arbitrary algebra element.
    pub fn element_action(&self, a: &Element) -> FieldMatrix {
        let f = self.field();
        let mut out = FieldMatrix::zeros(f, self.dim(), self.dim());
        for (i, &c) in a.iter().enumerate() {
            if !c.is_zero() {
                let m = self.monomial_action(&self.algebra.basis()[i]).scaled(c);
                out = out.add(&m).expect("same shape");
            }
        }
        out
    }

    /// Dimension of `M / rad·M`.
    pub fn top_dim(&self) -> usize {
        self.dim() - self.radical_rank()
    }

    fn radical_rank(&self) -> usize {
        let mut ech = Echelon::new(self.field(), self.dim());
        for a in &self.action {
            for c in a.columns() {
                ech.insert(&c);
            }
        }
        ech.dim()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let action: serde_json::Map<String, serde_json::Value> = self
            .algebra
            .generators()
            .iter()
            .zip(&self.action)
            .map(|(g, m)| {
                let rows: Vec<Vec<u32>> = (0..m.rows()).map(|r| m.row(r).iter().map(|x| x.code()).collect()).collect();
                (g.name.clone(), serde_json::json!(rows))
            })
            .collect();
        serde_json::json!({
            "algebra": self.algebra.name(),
            "field": self.field().spec(),
            "dim": self.dim(),
            "parities": self.parities,
            "action": action,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleReport {
    pub ok: bool,
    pub failure: Option<String>,
}

/// Shapes, pairwise commutation, power rules and parity homogeneity.
pub fn validate_module(m: &SuperModule) -> ModuleReport {
    let fail = |s: String| ModuleReport {
        ok: false,
        failure: Some(s),
    };
    let a = &m.algebra;
    let d = m.dim();
    if m.action.len() != a.generators().len() {
        return fail("one action matrix per generator required".into());
    }
    if m.parities.iter().any(|&p| p > 1) {
        return fail("parities must be 0 or 1".into());
    }
    for (g, mat) in a.generators().iter().zip(&m.action) {
        if mat.rows() != d || mat.cols() != d {
            return fail(format!("action of {} is not {d}x{d}", g.name));
        }
        if mat.field() != m.field() {
            return fail(format!("action of {} is over the wrong field", g.name));
        }
    }
    for i in 0..m.action.len() {
        for j in i + 1..m.action.len() {
            let ab = m.action[i].mul(&m.action[j]).expect("square");
            let ba = m.action[j].mul(&m.action[i]).expect("square");
            if ab != ba {
                let gens = a.generators();
                return fail(format!("actions of {} and {} do not commute", gens[i].name, gens[j].name));
            }
        }
    }
    for (gi, g) in a.generators().iter().enumerate() {
        let lhs = m.action[gi].pow(g.bound as u64);
        let rhs = match &g.power_image {
            None => FieldMatrix::zeros(m.field(), d, d),
            Some(pi) => m.monomial_action(&pi.exponents).scaled(pi.coefficient),
        };
        if lhs != rhs {
            return fail(format!("power rule for {} fails", g.name));
        }
        for r in 0..d {
            for c in 0..d {
                if !m.action[gi].get(r, c).is_zero() && (m.parities[c] + g.parity) % 2 != m.parities[r] {
                    return fail(format!("action of {} is not parity-homogeneous", g.name));
                }
            }
        }
    }
    ModuleReport { ok: true, failure: None }
}

pub fn regular_module(a: &AlgebraRef) -> SuperModule {
    SuperModule {
        algebra: a.clone(),
        action: (0..a.generators().len()).map(|g| a.left_mult_matrix(&a.generator(g))).collect(),
        parities: (0..a.dim()).map(|i| a.basis_parity(i)).collect(),
    }
}

pub fn trivial_module(a: &AlgebraRef) -> SuperModule {
    SuperModule {
        algebra: a.clone(),
        action: vec![FieldMatrix::zeros(a.field(), 1, 1); a.generators().len()],
        parities: vec![0],
    }
}

/// Restriction along `φ: A → B` of a `B`-module.
pub fn restrict_module(m: &SuperModule, phi: &AlgebraMorphism) -> Result<SuperModule, HomologyError> {
    if !Arc::ptr_eq(phi.target(), &m.algebra) && phi.target().structural_diff(&m.algebra).is_some() {
        return Err(HomologyError::MorphismMismatch);
    }
    let action = phi.images().iter().map(|img| m.element_action(img)).collect();
    SuperModule::new(phi.source(), action, m.parities.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectivityReport {
    pub module_dim: usize,
    pub top_dim: usize,
    pub algebra_dim: usize,
    pub projective: bool,
}

pub fn projectivity(m: &SuperModule) -> ProjectivityReport {
    let r = m.top_dim();
    ProjectivityReport {
        module_dim: m.dim(),
        top_dim: r,
        algebra_dim: m.algebra.dim(),
        projective: m.dim() == r * m.algebra.dim(),
    }
}

/// Free over the local algebra: `dim M = dim(M/rad M) · dim A`.
pub fn is_projective(m: &SuperModule) -> bool {
    projectivity(m).projective
}

/// Rebuild the algebra and module over a larger field of the same characteristic.
pub fn extend_module_scalars(m: &SuperModule, large: &FieldRef) -> Result<SuperModule, HomologyError> {
    let emb = m
        .field()
        .embedding_into(large)
        .map_err(|e| HomologyError::InvalidModule(e.to_string()))?;
    let alg = Arc::new(m.algebra.extend_scalars(large)?);
    let action = m.action.iter().map(|a| a.extend_scalars(large, &emb)).collect();
    SuperModule::new(&alg, action, m.parities.clone())
}

/// Basis of the top `M / rad M`, chosen among standard basis vectors.
fn top_generators(m: &SuperModule) -> Vec<usize> {
    let mut ech = Echelon::new(m.field(), m.dim());
    for a in &m.action {
        for c in a.columns() {
            ech.insert(&c);
        }
    }
    let f = m.field();
    (0..m.dim())
        .filter(|&i| {
            let mut e = vec![f.zero(); m.dim()];
            e[i] = f.one();
            ech.insert(&e).is_some()
        })
        .collect()
}

/// The submodule spanned by a basis of invariant, parity-homogeneous vectors.
pub fn submodule(m: &SuperModule, basis: &[Vec<FieldElement>]) -> Result<SuperModule, HomologyError> {
    let f = m.field();
    let k = basis.len();
    let bm = FieldMatrix::from_columns(f, m.dim(), basis);
    let solver = LinearSolver::new(&bm);
    let mut action = Vec::new();
    for a in &m.action {
        let cols: Option<Vec<Vec<FieldElement>>> = basis.iter().map(|v| solver.solve(&a.mul_vec(v))).collect();
        let cols = cols.ok_or_else(|| HomologyError::InvalidModule("span is not a submodule".into()))?;
        action.push(FieldMatrix::from_columns(f, k, &cols));
    }
    let mut parities = Vec::new();
    for v in basis {
        let ps: Vec<u8> = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, _)| m.parities[i])
            .collect();
        if ps.windows(2).any(|w| w[0] != w[1]) {
            return Err(HomologyError::InvalidModule("basis vector is not parity-homogeneous".into()));
        }
        parities.push(ps.first().copied().unwrap_or(0));
    }
    SuperModule::new(&m.algebra, action, parities)
}

/// The free module `A^r` with generator parities as a `SuperModule`.
pub fn free_module(a: &AlgebraRef, gen_parities: &[u8]) -> SuperModule {
    let d = a.dim();
    let r = gen_parities.len();
    let f = a.field();
    let action = (0..a.generators().len())
        .map(|g| {
            let block = a.left_mult_matrix(&a.generator(g));
            let mut m = FieldMatrix::zeros(f, r * d, r * d);
            for j in 0..r {
                for row in 0..d {
                    for col in 0..d {
                        let x = block.get(row, col);
                        if !x.is_zero() {
                            m.set(j * d + row, j * d + col, x);
                        }
                    }
                }
            }
            m
        })
        .collect();
    let parities = gen_parities
        .iter()
        .flat_map(|&p| (0..d).map(move |b| (p + a.basis_parity(b)) % 2))
        .collect();
    SuperModule {
        algebra: a.clone(),
        action,
        parities,
    }
}

/// `Ω(M)`: the kernel of a projective cover of `M`.
pub fn syzygy(m: &SuperModule) -> Result<SuperModule, HomologyError> {
    let a = &m.algebra;
    let d = a.dim();
    let f = m.field();
    let tops = top_generators(m);
    let gen_par: Vec<u8> = tops.iter().map(|&i| m.parities[i]).collect();
    let free = free_module(a, &gen_par);
    let mut cols = Vec::with_capacity(tops.len() * d);
    for &t in &tops {
        let mut e = vec![f.zero(); m.dim()];
        e[t] = f.one();
        for b in 0..d {
            cols.push(m.monomial_action(&a.basis()[b]).mul_vec(&e));
        }
    }
    let pi = FieldMatrix::from_columns(f, m.dim(), &cols);
    let mut basis = Vec::new();
    for parity in 0..2u8 {
        let idx: Vec<usize> = (0..free.dim()).filter(|&i| free.parities[i] == parity).collect();
        let sub_cols: Vec<Vec<FieldElement>> = idx.iter().map(|&i| pi.column(i)).collect();
        let sub = FieldMatrix::from_columns(f, m.dim(), &sub_cols);
        let ker = sub.kernel_basis();
        for c in 0..ker.cols() {
            let mut v = vec![f.zero(); free.dim()];
            for (k, &i) in idx.iter().enumerate() {
                v[i] = ker.get(k, c);
            }
            basis.push(v);
        }
    }
    submodule(&free, &basis)
}

// ---- resolutions ----

/// Column and row indices of one parity block of a boundary map, with its solver.
type BoundarySolver = (Vec<usize>, Vec<usize>, LinearSolver);

/// Minimal free resolution of the trivial module.
pub struct FreeResolution {
    algebra: AlgebraRef,
    /// Generator parities per homological degree.
    gens: Vec<Vec<u8>>,
    /// `boundary[s][j]`: image of generator `j` of `F_s` in `F_{s-1}`, as a flat vector.
    boundary: Vec<Vec<Vec<FieldElement>>>,
    solvers: Vec<[OnceLock<BoundarySolver>; 2]>,
}

impl std::fmt::Debug for FreeResolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FreeResolution")
            .field("algebra", &self.algebra.name())
            .field("ranks", &self.ranks())
            .finish()
    }
}

impl FreeResolution {
    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    /// Highest homological degree with known generators.
    pub fn length(&self) -> usize {
        self.gens.len() - 1
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.gens.iter().map(Vec::len).collect()
    }

    pub fn generator_parities(&self, s: usize) -> &[u8] {
        &self.gens[s]
    }

    /// Image of generator `j` of `F_s`, split into blocks of `F_{s-1}`.
    pub fn boundary_of(&self, s: usize, j: usize) -> Vec<Element> {
        let d = self.algebra.dim();
        self.boundary[s][j].chunks(d).map(|c| c.to_vec()).collect()
    }

    fn rank_dim(&self, s: usize) -> usize {
        self.gens[s].len() * self.algebra.dim()
    }

    fn parity(&self, s: usize, idx: usize) -> u8 {
        let d = self.algebra.dim();
        (self.gens[s][idx / d] + self.algebra.basis_parity(idx % d)) % 2
    }

    /// `b · d(e_j)` as a flat vector of `F_{s-1}`.
    fn boundary_column(&self, s: usize, idx: usize) -> Vec<FieldElement> {
        let d = self.algebra.dim();
        let (j, b) = (idx / d, idx % d);
        mul_basis_flat(&self.algebra, b, &self.boundary[s][j])
    }

    /// Parity-restricted matrix of `d_s`, with the column and row index lists.
    fn block_matrix(&self, s: usize, parity: u8) -> (Vec<usize>, Vec<usize>, FieldMatrix) {
        let f = self.algebra.field();
        let cols: Vec<usize> = (0..self.rank_dim(s)).filter(|&i| self.parity(s, i) == parity).collect();
        if s == 0 {
            let rows = if parity == 0 { vec![0] } else { Vec::new() };
            let mut m = FieldMatrix::zeros(f, rows.len(), cols.len());
            if parity == 0 {
                for (c, &i) in cols.iter().enumerate() {
                    if i == 0 {
                        m.set(0, c, f.one());
                    }
                }
            }
            return (cols, rows, m);
        }
        let rows: Vec<usize> = (0..self.rank_dim(s - 1)).filter(|&i| self.parity(s - 1, i) == parity).collect();
        let mut pos = vec![usize::MAX; self.rank_dim(s - 1)];
        for (r, &i) in rows.iter().enumerate() {
            pos[i] = r;
        }
        let mut m = FieldMatrix::zeros(f, rows.len(), cols.len());
        for (c, &i) in cols.iter().enumerate() {
            for (row, x) in self.boundary_column(s, i).into_iter().enumerate() {
                if !x.is_zero() {
                    debug_assert!(pos[row] != usize::MAX, "boundary is parity-preserving");
                    m.set(pos[row], c, x);
                }
            }
        }
        (cols, rows, m)
    }

    fn solver(&self, s: usize, parity: u8) -> &(Vec<usize>, Vec<usize>, LinearSolver) {
        self.solvers[s][parity as usize].get_or_init(|| {
            let (cols, rows, m) = self.block_matrix(s, parity);
            (cols, rows, LinearSolver::new(&m))
        })
    }

    /// Some `x ∈ F_s` with `d_s x = y`, for homogeneous `y ∈ F_{s-1}`.
    fn solve_boundary(&self, s: usize, parity: u8, y: &[FieldElement]) -> Option<Vec<FieldElement>> {
        let f = self.algebra.field();
        let (cols, rows, solver) = self.solver(s, parity);
        let rhs: Vec<FieldElement> = rows.iter().map(|&i| y[i]).collect();
        let restricted_norm: usize = rows.iter().filter(|&&i| !y[i].is_zero()).count();
        if restricted_norm != y.iter().filter(|x| !x.is_zero()).count() {
            return None;
        }
        let x = solver.solve(&rhs)?;
        let mut out = vec![f.zero(); self.rank_dim(s)];
        for (k, &i) in cols.iter().enumerate() {
            out[i] = x[k];
        }
        Some(out)
    }

    /// Add the next degree of the resolution.
    fn extend(&mut self) {
        let s = self.length();
        let a = self.algebra.clone();
        let f = a.field().clone();
        let width = self.rank_dim(s);
        let mut new_gens = Vec::new();
        let mut new_bounds = Vec::new();
        let mut kernels: [Vec<Vec<FieldElement>>; 2] = [Vec::new(), Vec::new()];
        for parity in 0..2u8 {
            let (cols, _, m) = self.block_matrix(s, parity);
            let ker = m.kernel_basis();
            for c in 0..ker.cols() {
                let mut v = vec![f.zero(); width];
                for (k, &i) in cols.iter().enumerate() {
                    v[i] = ker.get(k, c);
                }
                kernels[parity as usize].push(v);
            }
        }
        let mut rad = [Echelon::new(&f, width), Echelon::new(&f, width)];
        for parity in 0..2u8 {
            for v in &kernels[parity as usize] {
                for g in 0..a.generators().len() {
                    let gv = mul_element_flat(&a, &a.generator(g), v);
                    let q = (parity + a.generators()[g].parity) % 2;
                    rad[q as usize].insert(&gv);
                }
            }
        }
        for parity in 0..2u8 {
            for v in &kernels[parity as usize] {
                if rad[parity as usize].insert(v).is_some() {
                    new_gens.push(parity);
                    new_bounds.push(v.clone());
                }
            }
        }
        self.gens.push(new_gens);
        self.boundary.push(new_bounds);
        self.solvers.push([OnceLock::new(), OnceLock::new()]);
    }

    pub fn extend_to(&mut self, s_max: usize) {
        while self.length() < s_max {
            self.extend();
        }
    }

    /// `d_{s-1} ∘ d_s = 0` and every boundary coefficient lies in the radical.
    pub fn check(&self) -> Result<(), String> {
        let d = self.algebra.dim();
        for s in 1..=self.length() {
            for (j, v) in self.boundary[s].iter().enumerate() {
                for blk in v.chunks(d) {
                    if !blk[0].is_zero() {
                        return Err(format!("boundary of generator {j} in degree {s} leaves the radical"));
                    }
                }
                if s >= 2 {
                    let mut total = vec![self.algebra.field().zero(); self.rank_dim(s - 2)];
                    for (k, blk) in v.chunks(d).enumerate() {
                        let img = mul_element_flat(&self.algebra, &blk.to_vec(), &self.boundary[s - 1][k]);
                        for (t, x) in total.iter_mut().zip(img) {
                            *t = self.algebra.field().add(*t, x);
                        }
                    }
                    if total.iter().any(|x| !x.is_zero()) {
                        return Err(format!("d∘d ≠ 0 on generator {j} of degree {s}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Multiply every block of a flat free-module vector by the basis monomial `b`.
fn mul_basis_flat(a: &SuperAlgebra, b: usize, v: &[FieldElement]) -> Vec<FieldElement> {
    let f = a.field();
    let d = a.dim();
    let mut out = vec![f.zero(); v.len()];
    for (blk, chunk) in v.chunks(d).enumerate() {
        for (i, &x) in chunk.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if let Some((c, k)) = a.mul_basis(b, i) {
                let t = blk * d + k;
                out[t] = f.add(out[t], f.mul(c, x));
            }
        }
    }
    out
}

/// Multiply every block of a flat free-module vector by an algebra element.
fn mul_element_flat(a: &SuperAlgebra, e: &Element, v: &[FieldElement]) -> Vec<FieldElement> {
    let f = a.field();
    let mut out = vec![f.zero(); v.len()];
    for (b, &c) in e.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (t, x) in out.iter_mut().zip(mul_basis_flat(a, b, v)) {
            *t = f.add(*t, f.mul(c, x));
        }
    }
    out
}

pub fn minimal_resolution(a: &AlgebraRef, s_max: usize) -> FreeResolution {
    let mut res = FreeResolution {
        algebra: a.clone(),
        gens: vec![vec![0]],
        boundary: vec![Vec::new()],
        solvers: vec![[OnceLock::new(), OnceLock::new()]],
    };
    res.extend_to(s_max);
    res
}

/// `dim Ext^{s,t}` for `s ≤ s_max`: `table[s] = [even, odd]`.
pub fn ext_dims(res: &FreeResolution) -> Vec<[usize; 2]> {
    res.gens
        .iter()
        .map(|g| {
            let odd = g.iter().filter(|&&p| p == 1).count();
            [g.len() - odd, odd]
        })
        .collect()
}

// ---- Ext elements and products ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtElement {
    pub degree: usize,
    pub parity: u8,
    pub coords: Vec<FieldElement>,
}

impl ExtElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    /// The dual of generator `j` of `F_s`.
    pub fn dual(res: &FreeResolution, s: usize, j: usize) -> ExtElement {
        let f = res.algebra.field();
        let mut coords = vec![f.zero(); res.gens[s].len()];
        coords[j] = f.one();
        ExtElement {
            degree: s,
            parity: res.gens[s][j],
            coords,
        }
    }

    pub fn unit(res: &FreeResolution) -> ExtElement {
        Self::dual(res, 0, 0)
    }

    pub fn from_coords(res: &FreeResolution, s: usize, coords: Vec<FieldElement>) -> Result<ExtElement, HomologyError> {
        if s > res.length() {
            return Err(HomologyError::InsufficientLength { have: res.length(), need: s });
        }
        if coords.len() != res.gens[s].len() {
            return Err(HomologyError::InvalidModule("wrong number of Ext coordinates".into()));
        }
        let parities: Vec<u8> = coords
            .iter()
            .zip(&res.gens[s])
            .filter(|(c, _)| !c.is_zero())
            .map(|(_, &p)| p)
            .collect();
        if parities.windows(2).any(|w| w[0] != w[1]) {
            return Err(HomologyError::InvalidModule("Ext element is not homogeneous".into()));
        }
        Ok(ExtElement {
            degree: s,
            parity: parities.first().copied().unwrap_or(0),
            coords,
        })
    }

    pub fn add(&self, field: &FieldRef, other: &ExtElement) -> ExtElement {
        ExtElement {
            degree: self.degree,
            parity: if self.is_zero() { other.parity } else { self.parity },
            coords: self.coords.iter().zip(&other.coords).map(|(&a, &b)| field.add(a, b)).collect(),
        }
    }

    pub fn scale(&self, field: &FieldRef, c: FieldElement) -> ExtElement {
        ExtElement {
            degree: self.degree,
            parity: self.parity,
            coords: self.coords.iter().map(|&a| field.mul(c, a)).collect(),
        }
    }
}

/// Chain map from `source` shifted by `shift` to `target`, over `φ: A_target → A_source`'s
/// restriction. `c[i][j]` is the image of generator `j` of `source.F_{shift+i}` in `target.F_i`.
struct ChainLift {
    maps: Vec<Vec<Vec<FieldElement>>>,
}

/// Lift a chain map. Source generators map into the target complex viewed as source-algebra
/// modules through `phi` (source algebra → target algebra); `None` means the same algebra.
/// `perturb` adds a boundary to each solution to exercise independence of the choice.
fn lift_chain_map(
    source: &FreeResolution,
    target: &FreeResolution,
    phi: Option<&AlgebraMorphism>,
    shift: usize,
    initial: Vec<Vec<FieldElement>>,
    shift_parity: u8,
    up_to: usize,
    perturb: Option<usize>,
) -> Result<ChainLift, HomologyError> {
    if shift + up_to > source.length() {
        return Err(HomologyError::InsufficientLength {
            have: source.length(),
            need: shift + up_to,
        });
    }
    if up_to > target.length() {
        return Err(HomologyError::InsufficientLength {
            have: target.length(),
            need: up_to,
        });
    }
    let sa = &source.algebra;
    let ta = &target.algebra;
    let f = ta.field().clone();
    let d_s = sa.dim();
    let mut maps = vec![initial];
    for i in 1..=up_to {
        let mut level = Vec::new();
        for (j, bnd) in source.boundary[shift + i].iter().enumerate() {
            let mut rhs = vec![f.zero(); target.rank_dim(i - 1)];
            for (k, blk) in bnd.chunks(d_s).enumerate() {
                if blk.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let coeff: Element = match phi {
                    Some(m) => m.apply(&blk.to_vec()),
                    None => blk.to_vec(),
                };
                let img = mul_element_flat(ta, &coeff, &maps[i - 1][k]);
                for (t, x) in rhs.iter_mut().zip(img) {
                    *t = f.add(*t, x);
                }
            }
            let parity = (source.gens[shift + i][j] + shift_parity) % 2;
            let mut x = if rhs.iter().all(|x| x.is_zero()) {
                vec![f.zero(); target.rank_dim(i)]
            } else {
                target.solve_boundary(i, parity, &rhs).ok_or(HomologyError::LiftFailed(i))?
            };
            if let Some(seed) = perturb {
                if i < target.length() {
                    let cands: Vec<usize> = (0..target.gens[i + 1].len())
                        .filter(|&c| target.gens[i + 1][c] == parity)
                        .collect();
                    if !cands.is_empty() {
                        let c = cands[(seed + j) % cands.len()];
                        for (t, y) in x.iter_mut().zip(&target.boundary[i + 1][c]) {
                            *t = f.add(*t, *y);
                        }
                    }
                }
            }
            level.push(x);
        }
        maps.push(level);
    }
    Ok(ChainLift { maps })
}

/// Evaluate `ξ` on the image of every generator: augmentation of the blocks.
fn evaluate(target: &FreeResolution, xi: &ExtElement, images: &[Vec<FieldElement>]) -> Vec<FieldElement> {
    let f = target.algebra.field();
    let d = target.algebra.dim();
    images
        .iter()
        .map(|v| f.sum(xi.coords.iter().enumerate().map(|(k, &c)| f.mul(c, v[k * d]))))
        .collect()
}

fn check_element(res: &FreeResolution, x: &ExtElement) -> Result<(), HomologyError> {
    if x.degree > res.length() {
        return Err(HomologyError::InsufficientLength {
            have: res.length(),
            need: x.degree,
        });
    }
    if x.coords.len() != res.gens[x.degree].len() {
        return Err(HomologyError::InvalidModule("Ext element does not match the resolution".into()));
    }
    Ok(())
}

/// Yoneda product `ξ·η`: lift `η` to a chain map and evaluate `ξ` on it.
pub fn yoneda_product(res: &FreeResolution, xi: &ExtElement, eta: &ExtElement) -> Result<ExtElement, HomologyError> {
    yoneda_product_with(res, xi, eta, None)
}

pub fn yoneda_product_with(
    res: &FreeResolution,
    xi: &ExtElement,
    eta: &ExtElement,
    perturb: Option<usize>,
) -> Result<ExtElement, HomologyError> {
    check_element(res, xi)?;
    check_element(res, eta)?;
    let total = xi.degree + eta.degree;
    if total > res.length() {
        return Err(HomologyError::InsufficientLength {
            have: res.length(),
            need: total,
        });
    }
    let a = &res.algebra;
    let f = a.field();
    let initial: Vec<Vec<FieldElement>> = eta
        .coords
        .iter()
        .map(|&c| {
            let mut v = vec![f.zero(); a.dim()];
            v[0] = c;
            v
        })
        .collect();
    let lift = lift_chain_map(res, res, None, eta.degree, initial, eta.parity, xi.degree, perturb)?;
    let coords = evaluate(res, xi, &lift.maps[xi.degree]);
    Ok(ExtElement {
        degree: total,
        parity: (xi.parity + eta.parity) % 2,
        coords,
    })
}

/// Least `n ≤ n_max` with `ξ^n = 0`; `None` if no power vanished within the computed range.
pub fn nilpotence_order(res: &FreeResolution, xi: &ExtElement, n_max: usize) -> Result<Option<usize>, HomologyError> {
    if xi.is_zero() {
        return Ok(Some(1));
    }
    let mut power = xi.clone();
    for n in 2..=n_max {
        if power.degree + xi.degree > res.length() {
            return Ok(None);
        }
        power = yoneda_product(res, &power, xi)?;
        if power.is_zero() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Matrices `Ext^s_B(k,k) → Ext^s_A(k,k)` for `φ: A → B`, `s ≤ s_max`.
/// Entry `(e, j)` is the coefficient of the dual of `B`-generator `j` in the image's `e`-coordinate.
pub fn induced_ext_map(
    phi: &AlgebraMorphism,
    res_a: &FreeResolution,
    res_b: &FreeResolution,
    s_max: usize,
) -> Result<Vec<FieldMatrix>, HomologyError> {
    induced_ext_map_with(phi, res_a, res_b, s_max, None)
}

pub fn induced_ext_map_with(
    phi: &AlgebraMorphism,
    res_a: &FreeResolution,
    res_b: &FreeResolution,
    s_max: usize,
    perturb: Option<usize>,
) -> Result<Vec<FieldMatrix>, HomologyError> {
    if phi.source().structural_diff(&res_a.algebra).is_some() || phi.target().structural_diff(&res_b.algebra).is_some() {
        return Err(HomologyError::MorphismMismatch);
    }
    let b = &res_b.algebra;
    let f = b.field();
    let initial = vec![b.one()];
    let lift = lift_chain_map(res_a, res_b, Some(phi), 0, initial, 0, s_max, perturb)?;
    let d = b.dim();
    Ok((0..=s_max)
        .map(|s| {
            let rows = res_a.gens[s].len();
            let cols = res_b.gens[s].len();
            let mut m = FieldMatrix::zeros(f, rows, cols);
            for (e, v) in lift.maps[s].iter().enumerate() {
                for j in 0..cols {
                    m.set(e, j, v[j * d]);
                }
            }
            m
        })
        .collect())
}

/// Apply an induced matrix to a `B`-class.
pub fn apply_induced(m: &FieldMatrix, xi: &ExtElement) -> ExtElement {
    ExtElement {
        degree: xi.degree,
        parity: xi.parity,
        coords: m.mul_vec(&xi.coords),
    }
}

// ---- projectivity detection ----

#[derive(Debug, Clone, Serialize)]
pub struct DetectionEntry {
    pub source: String,
    pub report: ProjectivityReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionReport {
    pub field: crate::linalg::FieldSpec,
    pub entries: Vec<DetectionEntry>,
    pub all_projective: bool,
}

/// Restrict `M` along each embedding (optionally after extending scalars) and test projectivity.
pub fn detect_projectivity(
    m: &SuperModule,
    embeddings: &[AlgebraMorphism],
    extension: Option<&FieldRef>,
) -> Result<DetectionReport, HomologyError> {
    let (module, embeddings): (SuperModule, Vec<AlgebraMorphism>) = match extension {
        None => (m.clone(), embeddings.to_vec()),
        Some(large) => {
            let big = extend_module_scalars(m, large)?;
            let emb = m.field().embedding_into(large).map_err(|e| HomologyError::InvalidModule(e.to_string()))?;
            let mut out = Vec::new();
            for phi in embeddings {
                let src = Arc::new(phi.source().extend_scalars(large)?);
                let images = phi.images().iter().map(|e| e.iter().map(|c| emb[c.code() as usize]).collect()).collect();
                out.push(make_morphism(&src, big.algebra(), images)?);
            }
            (big, out)
        }
    };
    let mut entries = Vec::new();
    for phi in &embeddings {
        let r = restrict_module(&module, phi)?;
        entries.push(DetectionEntry {
            source: phi.source().name().to_string(),
            report: projectivity(&r),
        });
    }
    let all = entries.iter().all(|e| e.report.projective);
    Ok(DetectionReport {
        field: module.field().spec().clone(),
        entries,
        all_projective: all,
    })
}

// ---- named classes ----

/// Classes named after the presentation: degree-one duals of the algebra generators and
/// the degree-two polynomial classes attached to even generators.
#[derive(Debug, Clone, Serialize)]
pub struct ClassDictionary {
    pub names: Vec<(String, ExtElement)>,
}

impl ClassDictionary {
    pub fn get(&self, name: &str) -> Option<&ExtElement> {
        self.names.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }
}

fn degree_one_name(gen_name: &str, parity: u8) -> String {
    if parity == 1 {
        return "zeta".into();
    }
    match gen_name.strip_prefix('s') {
        Some("") => "lambda".into(),
        Some(idx) => format!("lambda{idx}"),
        None => gen_name.to_string(),
    }
}

fn x_name(gen_name: &str) -> String {
    match gen_name.strip_prefix('s') {
        Some("") => "x".into(),
        Some(idx) => format!("x{idx}"),
        None => format!("x_{gen_name}"),
    }
}

/// Line subalgebra generated by generator `g`: `k[t]/(t^ν)` with `ν` the nilpotency
/// index of `g`, of the same parity.
fn line_algebra(a: &AlgebraRef, g: usize) -> Result<AlgebraMorphism, HomologyError> {
    let x = a.generator(g);
    let nu = a.nilpotency_index(&x).ok_or_else(|| HomologyError::Dictionary("generator not nilpotent".into()))?;
    let gen = &a.generators()[g];
    let p = a.field().characteristic() as u64;
    let entry = if gen.parity == 1 {
        if nu == 2 {
            CatalogEntry::GaMinus
        } else {
            let half = nu / 2;
            let m = (1..).find(|&m| p.pow(m) >= half).expect("finite") as usize;
            if p.pow(m as u32) != half || nu % 2 != 0 {
                return Err(HomologyError::Dictionary(format!("odd line of length {nu} is not in the catalog")));
            }
            CatalogEntry::Wm1Minus(m)
        }
    } else {
        let m = (1..).find(|&m| p.pow(m) >= nu).expect("finite") as usize;
        if p.pow(m as u32) != nu {
            return Err(HomologyError::Dictionary(format!("even line of length {nu} is not a p-power")));
        }
        CatalogEntry::Wm1(m)
    };
    let line = Arc::new(catalog(&entry, a.field())?);
    Ok(make_morphism(&line, a, vec![x])?)
}

/// Dictionary of named classes in degrees one and two.
///
/// Degree one: the dual of the generator of `F_1` whose boundary is the algebra
/// generator. Degree two: for an even generator `g`, `x_g` is the unique `(2,0)` class
/// restricting to `x` on the line through `g` and to zero on every other line; on a line
/// `k[t]/(t^N)`, `x` takes the value `−1` on the generator with boundary `t^{N−1}e`.
pub fn class_dictionary(res: &FreeResolution) -> Result<ClassDictionary, HomologyError> {
    if res.length() < 2 {
        return Err(HomologyError::InsufficientLength { have: res.length(), need: 2 });
    }
    let a = &res.algebra;
    let f = a.field();
    let mut names = Vec::new();
    for (g, gen) in a.generators().iter().enumerate() {
        let target = a.generator(g);
        let j = res.boundary[1]
            .iter()
            .position(|v| *v == target)
            .ok_or_else(|| HomologyError::Dictionary(format!("no degree-one generator maps to {}", gen.name)))?;
        names.push((degree_one_name(&gen.name, gen.parity), ExtElement::dual(res, 1, j)));
    }
    let even2: Vec<usize> = (0..res.gens[2].len()).filter(|&j| res.gens[2][j] == 0).collect();
    let lines: Vec<AlgebraMorphism> = (0..a.generators().len())
        .map(|g| line_algebra(a, g))
        .collect::<Result<_, _>>()?;
    let mut restrictions = Vec::new();
    for phi in &lines {
        let lres = minimal_resolution(phi.source(), 2);
        let maps = induced_ext_map(phi, &lres, res, 2)?;
        restrictions.push((lres, maps.into_iter().nth(2).expect("degree two")));
    }
    for (g, gen) in a.generators().iter().enumerate() {
        if gen.parity != 0 {
            continue;
        }
        // Rows: every line's even degree-two coordinates; columns: even degree-two classes.
        let mut rows: Vec<Vec<FieldElement>> = Vec::new();
        let mut rhs: Vec<FieldElement> = Vec::new();
        for (h, (lres, m)) in restrictions.iter().enumerate() {
            for r in 0..lres.gens[2].len() {
                if lres.gens[2][r] != 0 {
                    continue;
                }
                rows.push(even2.iter().map(|&j| m.get(r, j)).collect());
                let want = if h == g {
                    let n = lres.algebra.generators()[0].bound;
                    let bnd = &lres.boundary[2][r];
                    let mut top = lres.algebra.zero();
                    top[lres.algebra.dim() - 1] = f.one();
                    let c = bnd[lres.algebra.dim() - 1];
                    if n as usize != lres.algebra.dim() || c.is_zero() {
                        return Err(HomologyError::Dictionary("unexpected line resolution".into()));
                    }
                    f.neg(f.inv(c).expect("nonzero"))
                } else {
                    f.zero()
                };
                rhs.push(want);
            }
        }
        let sys = FieldMatrix::from_rows(f, rows).map_err(|e| HomologyError::Dictionary(e.to_string()))?;
        if sys.rank() < even2.len() {
            continue;
        }
        let sol = sys
            .solve(&rhs)
            .ok_or_else(|| HomologyError::Dictionary(format!("no class restricts correctly for {}", gen.name)))?;
        let mut coords = vec![f.zero(); res.gens[2].len()];
        for (k, &j) in even2.iter().enumerate() {
            coords[j] = sol[k];
        }
        names.push((x_name(&gen.name), ExtElement::from_coords(res, 2, coords)?));
    }
    Ok(ClassDictionary { names })
}

/// Render an Ext element in terms of the duals of the resolution generators.
pub fn describe(res: &FreeResolution, x: &ExtElement) -> String {
    let f = res.algebra.field();
    let parts: Vec<String> = x
        .coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, &c)| format!("{}*g{}_{}", f.display(c), x.degree, j))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use crate::superalg::{catalog, CatalogEntry};

    fn alg(e: CatalogEntry) -> AlgebraRef {
        Arc::new(catalog(&e, &Field::get(3, 1).unwrap()).unwrap())
    }

    #[test]
    fn projectivity_basics() {
        let a = alg(CatalogEntry::GaMinus);
        assert!(is_projective(&regular_module(&a)));
        assert!(!is_projective(&trivial_module(&a)));
        let rad = syzygy(&trivial_module(&a)).unwrap();
        assert_eq!(rad.dim(), 1);
        assert!(!is_projective(&rad));
    }

    #[test]
    fn resolution_of_odd_line() {
        let a = alg(CatalogEntry::GaMinus);
        let res = minimal_resolution(&a, 6);
        res.check().unwrap();
        for (s, [even, odd]) in ext_dims(&res).into_iter().enumerate() {
            assert_eq!(even + odd, 1);
            assert_eq!(odd, s % 2);
        }
    }

    #[test]
    fn resolution_of_even_line() {
        let a = alg(CatalogEntry::Wm1(2));
        let res = minimal_resolution(&a, 5);
        assert_eq!(ext_dims(&res), vec![[1, 0]; 6]);
    }

    #[test]
    fn unit_is_neutral() {
        let a = alg(CatalogEntry::EmnMinus(2, 1));
        let res = minimal_resolution(&a, 3);
        let one = ExtElement::unit(&res);
        for j in 0..res.ranks()[2] {
            let x = ExtElement::dual(&res, 2, j);
            assert_eq!(yoneda_product(&res, &one, &x).unwrap(), x);
            assert_eq!(yoneda_product(&res, &x, &one).unwrap(), x);
        }
    }
}
