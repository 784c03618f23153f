//! Textual algebra descriptors: `E-(2,1);p=3`, `E-(1,2,mu=2);p=3;e=2`, `Ga(3)xGa-;p=5`,
//! `std:r=1,s=2,eps=1`, `std:1,0,1`.

use std::sync::Arc;

use superhopf::dieudonne::KochLabel;
use superhopf::linalg::{Field, FieldRef};
use superhopf::steenrod::{emn_ring, standard_ring, SteenrodRing};
use superhopf::superalg::{catalog, ground_algebra, tensor, AlgebraRef, CatalogEntry};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{text}`: {msg}")]
pub struct SpecError {
    pub text: String,
    pub msg: String,
}

fn err(text: &str, msg: impl Into<String>) -> SpecError {
    SpecError {
        text: text.into(),
        msg: msg.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Ground,
    GaR(usize),
    GaMinus,
    ZpPower(usize),
    Wm1(usize),
    Wm1Minus(usize),
    EmnMinus(usize, usize),
    EmnMuMinus(usize, usize, u32),
    Emn(usize, usize),
    EmnMu(usize, usize, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecBody {
    Product(Vec<Factor>),
    Standard { r: usize, s: usize, eps: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogSpec {
    pub text: String,
    pub body: SpecBody,
    pub p: u32,
    pub e: u32,
}

fn parse_usize(text: &str, s: &str) -> Result<usize, SpecError> {
    s.trim().parse().map_err(|_| err(text, format!("`{s}` is not a nonnegative integer")))
}

/// `(a,b,mu=c)` argument lists.
fn parse_args(text: &str, inner: &str) -> Result<(Vec<usize>, Option<u32>), SpecError> {
    let mut nums = Vec::new();
    let mut mu = None;
    for part in inner.split(',') {
        let part = part.trim();
        if let Some(v) = part.strip_prefix("mu=") {
            mu = Some(parse_usize(text, v)? as u32);
        } else {
            nums.push(parse_usize(text, part)?);
        }
    }
    Ok((nums, mu))
}

fn parse_factor(text: &str, f: &str) -> Result<Factor, SpecError> {
    let f = f.trim();
    if f == "k" {
        return Ok(Factor::Ground);
    }
    if f == "Ga-" {
        return Ok(Factor::GaMinus);
    }
    let open = f.find('(').ok_or_else(|| err(text, format!("unknown factor `{f}`")))?;
    if !f.ends_with(')') {
        return Err(err(text, format!("missing `)` in `{f}`")));
    }
    let head = &f[..open];
    let (nums, mu) = parse_args(text, &f[open + 1..f.len() - 1])?;
    let arity = |n: usize| {
        if nums.len() == n {
            Ok(())
        } else {
            Err(err(text, format!("`{head}` takes {n} integer argument(s)")))
        }
    };
    let no_mu = |x: Factor| if mu.is_some() { Err(err(text, format!("`{head}` takes no mu"))) } else { Ok(x) };
    match head {
        "Ga" => arity(1).and_then(|_| no_mu(Factor::GaR(nums[0]))),
        "Z" => arity(1).and_then(|_| no_mu(Factor::ZpPower(nums[0]))),
        "W" => arity(1).and_then(|_| no_mu(Factor::Wm1(nums[0]))),
        "W-" => arity(1).and_then(|_| no_mu(Factor::Wm1Minus(nums[0]))),
        "E-" => arity(2).map(|_| match mu {
            Some(c) => Factor::EmnMuMinus(nums[0], nums[1], c),
            None => Factor::EmnMinus(nums[0], nums[1]),
        }),
        "E" => arity(2).map(|_| match mu {
            Some(c) => Factor::EmnMu(nums[0], nums[1], c),
            None => Factor::Emn(nums[0], nums[1]),
        }),
        other => Err(err(text, format!("unknown algebra `{other}`"))),
    }
}

/// Split on `x` between factors (never inside parentheses).
fn split_factors(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            'x' if depth == 0 => {
                out.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&body[start..]);
    out
}

fn parse_standard(text: &str, body: &str) -> Result<SpecBody, SpecError> {
    let parts: Vec<&str> = body.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(err(text, "std takes r, s and eps"));
    }
    let mut vals = [None; 3];
    for (k, part) in parts.iter().enumerate() {
        let (slot, v) = match part.split_once('=') {
            Some(("r", v)) => (0, v),
            Some(("s", v)) => (1, v),
            Some(("eps", v)) => (2, v),
            Some((key, _)) => return Err(err(text, format!("unknown std key `{key}`"))),
            None => (k, *part),
        };
        vals[slot] = Some(parse_usize(text, v)?);
    }
    let [Some(r), Some(s), Some(eps)] = vals else {
        return Err(err(text, "std needs r, s and eps"));
    };
    if eps > 1 {
        return Err(err(text, "eps must be 0 or 1"));
    }
    Ok(SpecBody::Standard { r, s, eps: eps == 1 })
}

impl CatalogSpec {
    /// Parse with `p`, `e` defaults used when the text carries none.
    pub fn parse(text: &str, default_p: u32, default_e: u32) -> Result<Self, SpecError> {
        let mut sections = text.split(';');
        let body_text = sections.next().unwrap_or("").trim();
        let (mut p, mut e) = (default_p, default_e);
        for sec in sections {
            match sec.trim().split_once('=') {
                Some(("p", v)) => p = parse_usize(text, v)? as u32,
                Some(("e", v)) => e = parse_usize(text, v)? as u32,
                _ => return Err(err(text, format!("unknown section `{sec}`"))),
            }
        }
        let body = if let Some(rest) = body_text.strip_prefix("std:") {
            parse_standard(text, rest)?
        } else {
            if body_text.is_empty() {
                return Err(err(text, "empty algebra"));
            }
            SpecBody::Product(split_factors(body_text).into_iter().map(|f| parse_factor(text, f)).collect::<Result<_, _>>()?)
        };
        Field::get(p, e).map_err(|x| err(text, x.to_string()))?;
        Ok(CatalogSpec {
            text: text.to_string(),
            body,
            p,
            e,
        })
    }

    pub fn field(&self) -> FieldRef {
        Field::get(self.p, self.e).expect("validated at parse time")
    }

    fn factors(&self) -> Vec<Factor> {
        match &self.body {
            SpecBody::Product(f) => f.clone(),
            SpecBody::Standard { r, s, eps } => {
                let mut out = Vec::new();
                if *r > 0 {
                    out.push(Factor::GaR(*r));
                }
                if *eps {
                    out.push(Factor::GaMinus);
                }
                if *s > 0 {
                    out.push(Factor::ZpPower(*s));
                }
                if out.is_empty() {
                    out.push(Factor::Ground);
                }
                out
            }
        }
    }

    pub fn algebra(&self) -> anyhow::Result<AlgebraRef> {
        let field = self.field();
        let mu = |c: u32| field.element(c).ok_or_else(|| anyhow::anyhow!("mu = {c} is not a field element code"));
        let mut acc: Option<superhopf::superalg::SuperAlgebra> = None;
        for factor in self.factors() {
            let alg = match factor {
                Factor::Ground => ground_algebra(&field),
                Factor::GaR(r) => catalog(&CatalogEntry::GaR(r), &field)?,
                Factor::GaMinus => catalog(&CatalogEntry::GaMinus, &field)?,
                Factor::ZpPower(s) => catalog(&CatalogEntry::ZpPower(s), &field)?,
                Factor::Wm1(m) => catalog(&CatalogEntry::Wm1(m), &field)?,
                Factor::Wm1Minus(m) => catalog(&CatalogEntry::Wm1Minus(m), &field)?,
                Factor::EmnMinus(m, n) => catalog(&CatalogEntry::EmnMinus(m, n), &field)?,
                Factor::EmnMuMinus(m, n, c) => catalog(&CatalogEntry::EmnMuMinus(m, n, mu(c)?), &field)?,
                Factor::Emn(m, n) => catalog(&CatalogEntry::Emn(m, n), &field)?,
                Factor::EmnMu(m, n, c) => catalog(&CatalogEntry::EmnMu(m, n, mu(c)?), &field)?,
            };
            acc = Some(match acc {
                None => alg,
                Some(a) => tensor(&a, &alg)?,
            });
        }
        Ok(Arc::new(acc.expect("at least one factor")))
    }

    /// The presented cohomology ring: `std:` specs and single `E-(m,n)` factors.
    pub fn steenrod_ring(&self) -> anyhow::Result<SteenrodRing> {
        let field = self.field();
        match &self.body {
            SpecBody::Standard { r, s, eps } => Ok(standard_ring(*r, *s, *eps, &field)),
            SpecBody::Product(f) => match f.as_slice() {
                [Factor::EmnMinus(m, n)] => Ok(emn_ring(*m, *n, &field)?),
                _ => anyhow::bail!("`{}` has no presented Steenrod ring; use std:r,s,eps or E-(m,n)", self.text),
            },
        }
    }
}

/// `M(m,n)` or `M(m,n,mu=c)`.
pub fn parse_label(text: &str, field: &FieldRef) -> Result<KochLabel, SpecError> {
    let t = text.trim();
    let inner = t
        .strip_prefix("M(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| err(text, "expected M(m,n) or M(m,n,mu=c)"))?;
    let (nums, mu) = parse_args(text, inner)?;
    if nums.len() != 2 {
        return Err(err(text, "a label takes two integers"));
    }
    Ok(match mu {
        None => KochLabel::mmn(nums[0], nums[1]),
        Some(c) => {
            let mu = field.element(c).filter(|x| !x.is_zero()).ok_or_else(|| err(text, "mu must be a nonzero field element code"))?;
            KochLabel::mmnmu(nums[0], nums[1], mu)
        }
    })
}
