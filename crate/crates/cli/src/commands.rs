use std::collections::HashMap;
use std::path::Path;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use superhopf::dieudonne::{brute_force_iso, enumerate_cyclic_quotients, koch_iso_test, label_multiset};
use superhopf::homology::{
    class_dictionary, describe, detect_projectivity, ext_dims, extend_module_scalars, induced_ext_map, minimal_resolution,
    nilpotence_order, projectivity, regular_module, restrict_module, syzygy, trivial_module, yoneda_product, ClassDictionary,
    ExtElement, FreeResolution, SuperModule,
};
use superhopf::linalg::{Field, FieldElement, FieldMatrix, FieldRef};
use superhopf::steenrod::{
    classify_b36, operation_table, saturate, serre_check, verify_stable, CartanConvention, Op, SteenrodRing, TABLE_COLUMNS,
};
use superhopf::superalg::{
    catalog, fold, hopf_check, identity_morphism, inclusion_w_minus, make_morphism, quotient_emn, summarize, z_lift_emn,
    AlgebraMorphism, AlgebraRef, CatalogEntry,
};
use superhopf::witt::{additive_order, build_witt_table, WittVector};

use crate::args::*;
use crate::catalog::{parse_label, CatalogSpec};
use crate::manifest::Output;
use crate::render::{strings, table};
use crate::{guard, repro, usage};

pub const MAX_WITT_INDEX: usize = 3;
pub const MAX_WITT_LENGTH: usize = MAX_WITT_INDEX + 1;
pub const MAX_WITT_GROUP: u64 = 1_000_000;
pub const MAX_SMAX: usize = 12;

pub fn dispatch(cli: Cli) -> Result<Output> {
    let g = &cli.global;
    match cli.command {
        Group::Witt(c) => witt(g, c),
        Group::Dieudonne(c) => dieudonne(g, c),
        Group::Algebra(c) => algebra(g, c),
        Group::Ext(c) => ext(g, c),
        Group::Module(c) => module(g, c),
        Group::Steenrod(c) => steenrod(g, c),
        Group::Repro(ReproCmd::All { dir, write, only }) => repro::run_all(&dir, write, &only),
    }
}

fn output(command: &str, parameters: Value, field: Option<&FieldRef>, result: Value, table: String) -> Output {
    Output {
        command: command.into(),
        parameters,
        field: field.map(|f| f.spec().clone()),
        seed: None,
        result,
        table,
        exit_code: 0,
    }
}

fn field(g: &Global) -> Result<FieldRef> {
    Field::get(g.p, g.e).map_err(|e| usage(format!("invalid field: {e}")))
}

fn spec(g: &Global, text: &str) -> Result<CatalogSpec> {
    Ok(CatalogSpec::parse(text, g.p, g.e)?)
}

fn codes(f: &FieldRef, xs: &[u32]) -> Result<Vec<FieldElement>> {
    xs.iter()
        .map(|&c| f.element(c).ok_or_else(|| usage(format!("{c} is not an element code of F_{}", f.order()))))
        .collect()
}

fn code_list(xs: &[FieldElement]) -> Vec<u32> {
    xs.iter().map(|x| x.code()).collect()
}

// ---- witt ----

fn check_witt_length(m: usize) -> Result<()> {
    if m > MAX_WITT_LENGTH {
        return Err(guard("witt.length", format!("length {m} exceeds {MAX_WITT_LENGTH}")));
    }
    Ok(())
}

fn parse_witt(f: &FieldRef, text: &str) -> Result<WittVector> {
    let raw: Vec<u32> = serde_json::from_str(text).map_err(|e| usage(format!("expected a JSON array of codes: {e}")))?;
    check_witt_length(raw.len())?;
    Ok(WittVector::new(f, codes(f, &raw)?)?)
}

fn witt(g: &Global, cmd: WittCmd) -> Result<Output> {
    let f = field(g)?;
    match cmd {
        WittCmd::Poly { n } => {
            if n > MAX_WITT_INDEX {
                return Err(guard("witt.max_index", format!("n = {n} exceeds {MAX_WITT_INDEX}")));
            }
            let t = build_witt_table(n, g.p);
            let mut result = t.to_json();
            result["ghost_identities"] = json!(t.verify_ghost_identities().is_ok());
            let mut text = String::new();
            for i in 0..=n {
                text += &format!("S_{i} = {}\nP_{i} = {}\nN_{i} = {}\n", t.sum(i), t.product(i), t.negation(i));
            }
            Ok(output("witt poly", json!({"n": n, "p": g.p}), None, result, text))
        }
        WittCmd::Eval { op, u, v, k } => {
            let u = parse_witt(&f, &u)?;
            let v = v.as_deref().map(|v| parse_witt(&f, v)).transpose()?;
            let other = || v.clone().ok_or_else(|| usage("this operation needs --v"));
            let value = match op {
                WittOp::Add => json!(u.add(&other()?)?.codes()),
                WittOp::Sub => json!(u.sub(&other()?)?.codes()),
                WittOp::Mul => json!(u.mul(&other()?)?.codes()),
                WittOp::Neg => json!(u.neg().codes()),
                WittOp::V => json!(u.verschiebung().codes()),
                WittOp::F => json!(u.frobenius().codes()),
                WittOp::Sigma => json!(u.sigma().codes()),
                WittOp::Times => json!(u.times(k).codes()),
                WittOp::Order => json!(additive_order(&u)),
            };
            let text = format!("{value}\n");
            let mut params = json!({"op": format!("{op:?}").to_lowercase(), "u": u.codes()});
            if let Some(v) = &v {
                params["v"] = json!(v.codes());
            }
            if matches!(op, WittOp::Times) {
                params["k"] = json!(k);
            }
            Ok(output("witt eval", params, Some(&f), json!({ "value": value }), text))
        }
        WittCmd::Laws { m, trials, seed } => {
            let result = witt_laws(&f, m, trials, seed)?;
            let ok = result["ok"].as_bool().unwrap_or(false);
            let text = format!(
                "W_{m}(F_{}): {trials} trials, seed {seed}: {}\n",
                f.order(),
                if ok { "all laws hold" } else { "FAILURES" }
            );
            let mut out = output("witt laws", json!({"m": m, "trials": trials}), Some(&f), result, text);
            out.seed = Some(seed);
            out.exit_code = if ok { 0 } else { crate::EXIT_MISMATCH };
            Ok(out)
        }
        WittCmd::Cyclic { m } => {
            let result = witt_group(&f, m)?;
            let text = format!(
                "W_{m}(F_{}): order {}, exponent {}, cyclic {}\n",
                f.order(),
                result["order"],
                result["exponent"],
                result["cyclic"]
            );
            Ok(output("witt cyclic", json!({ "m": m }), Some(&f), result, text))
        }
    }
}

pub fn witt_laws(f: &FieldRef, m: usize, trials: usize, seed: u64) -> Result<Value> {
    if m == 0 {
        return Err(usage("length m must be positive"));
    }
    check_witt_length(m)?;
    let p = f.characteristic() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = |rng: &mut ChaCha8Rng| -> Result<WittVector> {
        let entries = (0..m).map(|_| FieldElement(rng.gen_range(0..f.order()))).collect();
        Ok(WittVector::new(f, entries)?)
    };
    let mut failures = [0usize; 4];
    for _ in 0..trials {
        let u = random(&mut rng)?;
        let x = random(&mut rng)?;
        let pu = u.times(p);
        failures[0] += usize::from(u.verschiebung().frobenius() != pu);
        failures[1] += usize::from(u.frobenius().verschiebung() != pu);
        failures[2] += usize::from(x.sigma().mul(&u)?.verschiebung() != x.mul(&u.verschiebung())?);
        failures[3] += usize::from(x.mul(&u)?.frobenius() != x.sigma().mul(&u.frobenius())?);
    }
    Ok(json!({
        "m": m,
        "trials": trials,
        "seed": seed,
        "failures": {"FV=p": failures[0], "VF=p": failures[1], "V(x^sigma u)=xV(u)": failures[2], "F(xu)=x^sigma F(u)": failures[3]},
        "ok": failures.iter().all(|&c| c == 0),
    }))
}

pub fn witt_group(f: &FieldRef, m: usize) -> Result<Value> {
    check_witt_length(m)?;
    let size = (f.order() as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if m == 0 || size > MAX_WITT_GROUP {
        return Err(guard("witt.group_size", format!("|W_{m}(F_{})| must be at most {MAX_WITT_GROUP}", f.order())));
    }
    let mut histogram = std::collections::BTreeMap::new();
    for u in WittVector::all(f, m) {
        *histogram.entry(additive_order(&u)).or_insert(0u64) += 1;
    }
    let exponent = *histogram.keys().max().expect("nonempty");
    Ok(json!({
        "m": m,
        "order": size,
        "exponent": exponent,
        "cyclic": exponent == size,
        "elements_by_order": histogram.iter().map(|(o, c)| json!({"order": o, "count": c})).collect::<Vec<_>>(),
    }))
}

// ---- dieudonne ----

fn dieudonne(g: &Global, cmd: DieudonneCmd) -> Result<Output> {
    let f = field(g)?;
    match cmd {
        DieudonneCmd::Classify { m, n } => {
            let labels = enumerate_cyclic_quotients(m, n, &f)?;
            let multiset = label_multiset(&labels, &f);
            let rows: Vec<Vec<String>> = multiset.iter().map(|(l, c)| strings([l.to_string(), c.to_string()])).collect();
            let result = json!({
                "m": m,
                "n": n,
                "quotients": labels.len(),
                "labels": multiset.iter().map(|(l, c)| json!({"label": l.to_string(), "count": c})).collect::<Vec<_>>(),
            });
            let text = table(&strings(["label", "count"]), &rows);
            Ok(output("dieudonne classify", json!({"m": m, "n": n}), Some(&f), result, text))
        }
        DieudonneCmd::Iso { a, b } => {
            let la = parse_label(&a, &f)?;
            let lb = parse_label(&b, &f)?;
            let koch = koch_iso_test(&la, &lb, &f)?;
            let brute = brute_force_iso(&la.build(&f)?, &lb.build(&f)?)?;
            let result = json!({"a": la.to_string(), "b": lb.to_string(), "normal_form": koch, "brute_force": brute, "agree": koch == brute});
            let text = format!("{la} ~ {lb}: normal form {koch}, brute force {brute}\n");
            let mut out = output("dieudonne iso", json!({"a": a, "b": b}), Some(&f), result, text);
            out.exit_code = if koch == brute { 0 } else { crate::EXIT_MISMATCH };
            Ok(out)
        }
    }
}

// ---- algebra ----

fn algebra(g: &Global, cmd: AlgebraCmd) -> Result<Output> {
    match cmd {
        AlgebraCmd::Build { algebra } => {
            let s = spec(g, &algebra)?;
            let alg = s.algebra()?;
            let sum = summarize(&alg);
            let mut text = format!("{} over F_{}: dim {} (even {}, odd {})\n", sum.name, alg.field().order(), sum.dim, sum.even_dim, sum.odd_dim);
            let rows: Vec<Vec<String>> = alg
                .generators()
                .iter()
                .map(|gen| strings([gen.name.clone(), gen.parity.to_string(), gen.bound.to_string()]))
                .collect();
            text += &table(&strings(["generator", "parity", "bound"]), &rows);
            Ok(output("algebra build", json!({ "algebra": algebra }), Some(&s.field()), alg.to_json(), text))
        }
        AlgebraCmd::HopfCheck { algebra } => {
            let s = spec(g, &algebra)?;
            let alg = s.algebra()?;
            let report = hopf_check(&alg);
            let text = match &report.failure {
                None => format!("{}: all {} checks pass\n", alg.name(), report.checks.len()),
                Some(fail) => format!("{}: FAILED: {fail}\n", alg.name()),
            };
            let mut out = output("algebra hopf-check", json!({ "algebra": algebra }), Some(&s.field()), serde_json::to_value(&report)?, text);
            out.exit_code = if report.ok { 0 } else { crate::EXIT_MISMATCH };
            Ok(out)
        }
        AlgebraCmd::Fold { m, n, a } => {
            let f = field(g)?;
            let result = fold_check(m, n, a, &f)?;
            let text = match result["diff"].as_str() {
                None => format!("fold(E({m},{n}), a={a}) is structurally identical to E-({m},{n})\n"),
                Some(d) => format!("fold(E({m},{n}), a={a}) differs from E-({m},{n}): {d}\n"),
            };
            let ok = result["identical"].as_bool().unwrap_or(false);
            let mut out = output("algebra fold", json!({"m": m, "n": n, "a": a}), Some(&f), result, text);
            out.exit_code = if ok { 0 } else { crate::EXIT_MISMATCH };
            Ok(out)
        }
    }
}

pub fn fold_check(m: usize, n: usize, a: i64, f: &FieldRef) -> Result<Value> {
    let lifted = z_lift_emn(m, n, a, f)?;
    let folded = fold(&lifted, format!("fold(E({m},{n}),a={a})"))?;
    let target = catalog(&CatalogEntry::EmnMinus(m, n), f)?;
    let diff = folded.structural_diff(&target);
    Ok(json!({"m": m, "n": n, "a": a, "identical": diff.is_none(), "diff": diff}))
}

// ---- ext ----

fn checked_smax(s: usize) -> Result<usize> {
    if s > MAX_SMAX {
        return Err(guard("ext.smax", format!("homological degree {s} exceeds {MAX_SMAX}")));
    }
    Ok(s)
}

/// Homological degree of a class name without building a resolution.
fn class_degree(name: &str) -> Result<usize> {
    if let Some((s, _)) = parse_generator_name(name)? {
        return Ok(s);
    }
    if name.starts_with("lambda") || name.starts_with("zeta") || name.starts_with('y') {
        Ok(1)
    } else if name.starts_with('x') {
        Ok(2)
    } else {
        Err(usage(format!("unknown class `{name}`; use lambda*, zeta, y*, x* or g<s>_<j>")))
    }
}

fn parse_generator_name(name: &str) -> Result<Option<(usize, usize)>> {
    let Some(rest) = name.strip_prefix('g') else { return Ok(None) };
    let Some((s, j)) = rest.split_once('_') else { return Ok(None) };
    match (s.parse(), j.parse()) {
        (Ok(s), Ok(j)) => Ok(Some((s, j))),
        _ => Err(usage(format!("malformed generator class `{name}`"))),
    }
}

fn lookup_class(res: &FreeResolution, dict: &ClassDictionary, name: &str) -> Result<ExtElement> {
    if let Some((s, j)) = parse_generator_name(name)? {
        if s > res.length() || j >= res.ranks()[s] {
            return Err(usage(format!("no generator {j} in homological degree {s}")));
        }
        return Ok(ExtElement::dual(res, s, j));
    }
    dict.get(name).cloned().ok_or_else(|| {
        let known: Vec<&str> = dict.names.iter().map(|(n, _)| n.as_str()).collect();
        usage(format!("unknown class `{name}`; this algebra names {}", known.join(", ")))
    })
}

/// Products of named classes of total degree `d`, as (label, class) pairs.
fn named_monomials(res: &FreeResolution, dict: &ClassDictionary, d: usize) -> Result<Vec<(String, ExtElement)>> {
    fn go(
        res: &FreeResolution,
        dict: &ClassDictionary,
        start: usize,
        left: usize,
        picked: &mut Vec<usize>,
        out: &mut Vec<(String, ExtElement)>,
    ) -> Result<()> {
        if left == 0 {
            let mut acc = ExtElement::unit(res);
            for &k in picked.iter() {
                acc = yoneda_product(res, &acc, &dict.names[k].1)?;
            }
            let mut parts: Vec<String> = Vec::new();
            let mut i = 0;
            while i < picked.len() {
                let j = picked[i..].iter().take_while(|&&k| k == picked[i]).count();
                let name = &dict.names[picked[i]].0;
                parts.push(if j == 1 { name.clone() } else { format!("{name}^{j}") });
                i += j;
            }
            out.push((parts.join("*"), acc));
            return Ok(());
        }
        for k in start..dict.names.len() {
            let deg = dict.names[k].1.degree;
            if deg <= left {
                picked.push(k);
                go(res, dict, k, left - deg, picked, out)?;
                picked.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(res, dict, 0, d, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Write `x` as a combination of products of named classes, when possible.
fn express(res: &FreeResolution, dict: &ClassDictionary, x: &ExtElement) -> Result<Option<String>> {
    if x.is_zero() {
        return Ok(Some("0".into()));
    }
    let f = res.algebra().field();
    let monomials = named_monomials(res, dict, x.degree)?;
    if monomials.is_empty() {
        return Ok(None);
    }
    let cols: Vec<Vec<FieldElement>> = monomials.iter().map(|(_, m)| m.coords.clone()).collect();
    let mat = FieldMatrix::from_columns(f, x.coords.len(), &cols);
    let Some(sol) = mat.solve(&x.coords) else { return Ok(None) };
    let mut text = String::new();
    for ((label, _), c) in monomials.iter().zip(sol) {
        if c.is_zero() {
            continue;
        }
        let negative = f.is_prime_field() && c.code() > f.characteristic() / 2;
        let (sign, mag) = if negative { ("-", f.neg(c)) } else { ("+", c) };
        let coef = if mag == f.one() { String::new() } else { format!("{}*", f.display(mag)) };
        if text.is_empty() {
            text = format!("{}{coef}{label}", if sign == "-" { "-" } else { "" });
        } else {
            text += &format!(" {sign} {coef}{label}");
        }
    }
    Ok(Some(text))
}

fn class_json(res: &FreeResolution, dict: &ClassDictionary, x: &ExtElement) -> Result<Value> {
    Ok(json!({
        "degree": x.degree,
        "parity": x.parity,
        "coords": code_list(&x.coords),
        "generators": describe(res, x),
        "named": express(res, dict, x)?,
    }))
}

fn ext(g: &Global, cmd: ExtCmd) -> Result<Output> {
    match cmd {
        ExtCmd::Dims { algebra } => {
            let s = spec(g, &algebra)?;
            let alg = s.algebra()?;
            let smax = checked_smax(g.smax)?;
            let res = minimal_resolution(&alg, smax);
            let dims = ext_dims(&res);
            let mut header = vec!["d".to_string()];
            header.extend((0..=smax).map(|d| d.to_string()));
            let row = |label: &str, k: &dyn Fn(&[usize; 2]) -> usize| {
                let mut r = vec![label.to_string()];
                r.extend(dims.iter().map(|x| k(x).to_string()));
                r
            };
            let rows = vec![row("dim", &|x| x[0] + x[1]), row("even", &|x| x[0]), row("odd", &|x| x[1])];
            let result = json!({
                "algebra": alg.name(),
                "smax": smax,
                "dims": dims.iter().enumerate().map(|(d, x)| json!({"d": d, "even": x[0], "odd": x[1], "total": x[0] + x[1]})).collect::<Vec<_>>(),
            });
            Ok(output("ext dims", json!({"algebra": algebra, "smax": smax}), Some(&s.field()), result, table(&header, &rows)))
        }
        ExtCmd::Classes { algebra } => {
            let s = spec(g, &algebra)?;
            let alg = s.algebra()?;
            let res = minimal_resolution(&alg, 2);
            let dict = class_dictionary(&res)?;
            let mut rows = Vec::new();
            let mut classes = Vec::new();
            for (name, x) in &dict.names {
                rows.push(strings([name.clone(), x.degree.to_string(), x.parity.to_string(), describe(&res, x)]));
                classes.push(json!({"name": name, "degree": x.degree, "parity": x.parity, "coords": code_list(&x.coords)}));
            }
            let text = table(&strings(["class", "degree", "parity", "coordinates"]), &rows);
            let result = json!({"algebra": alg.name(), "ranks": res.ranks(), "classes": classes});
            Ok(output("ext classes", json!({ "algebra": algebra }), Some(&s.field()), result, text))
        }
        ExtCmd::Product { algebra, left, right } => {
            let s = spec(g, &algebra)?;
            let alg = s.algebra()?;
            let need = checked_smax((class_degree(&left)? + class_degree(&right)?).max(2))?;
            let res = minimal_resolution(&alg, need);
            let dict = class_dictionary(&res)?;
            let a = lookup_class(&res, &dict, &left)?;
            let b = lookup_class(&res, &dict, &right)?;
            let prod = yoneda_product(&res, &a, &b)?;
            let j = class_json(&res, &dict, &prod)?;
            let shown = j["named"].as_str().map(str::to_string).unwrap_or_else(|| describe(&res, &prod));
            let text = format!("{left} * {right} = {shown}\n");
            let params = json!({"algebra": algebra, "left": left, "right": right});
            Ok(output("ext product", params, Some(&s.field()), json!({"algebra": alg.name(), "product": j}), text))
        }
        ExtCmd::Power { algebra, class, nmax } => {
            let s = spec(g, &algebra)?;
            let alg = s.algebra()?;
            let deg = class_degree(&class)?;
            let need = checked_smax((deg * nmax).max(2))?;
            let res = minimal_resolution(&alg, need);
            let dict = class_dictionary(&res)?;
            let x = lookup_class(&res, &dict, &class)?;
            let order = nilpotence_order(&res, &x, nmax)?;
            let text = match order {
                Some(n) => format!("{class}^{n} = 0 (least such power)\n"),
                None => format!("no power of {class} up to {nmax} vanishes\n"),
            };
            let params = json!({"algebra": algebra, "class": class, "nmax": nmax});
            Ok(output("ext power", params, Some(&s.field()), json!({"algebra": alg.name(), "nilpotence_order": order}), text))
        }
        ExtCmd::Inflate { m, n } => {
            if m < 2 || n < 1 {
                return Err(usage("inflation needs m >= 2 and n >= 1"));
            }
            let f = field(g)?;
            let smax = checked_smax(g.smax.max(2))?;
            let phi = quotient_emn(m, n, &f)?;
            let result = inflation(&phi, smax)?;
            let mut rows = Vec::new();
            for entry in result["degrees"].as_array().expect("array") {
                let kernel: Vec<String> = entry["kernel"]
                    .as_array()
                    .expect("array")
                    .iter()
                    .map(|k| k["named"].as_str().or(k["generators"].as_str()).unwrap_or("?").to_string())
                    .collect();
                rows.push(strings([entry["s"].to_string(), entry["rank"].to_string(), kernel.join(", ")]));
            }
            let mut text = format!("inflation {} -> {}\n", phi.source().name(), phi.target().name());
            text += &table(&strings(["s", "rank", "kernel"]), &rows);
            Ok(output("ext inflate", json!({"m": m, "n": n, "smax": smax}), Some(&f), result, text))
        }
    }
}

/// Induced maps along a quotient `φ: A ↠ B` with kernels split by parity and named in `B`'s classes.
pub fn inflation(phi: &AlgebraMorphism, smax: usize) -> Result<Value> {
    let big = minimal_resolution(phi.source(), smax);
    let small = minimal_resolution(phi.target(), smax);
    let dict = class_dictionary(&small)?;
    let maps = induced_ext_map(phi, &big, &small, smax)?;
    let f = phi.target().field().clone();
    let mut degrees = Vec::new();
    for (s, mat) in maps.iter().enumerate() {
        let mut kernel = Vec::new();
        for parity in [0u8, 1] {
            let cols: Vec<usize> = (0..small.ranks()[s]).filter(|&j| small.generator_parities(s)[j] == parity).collect();
            let sub = FieldMatrix::from_columns(&f, mat.rows(), &cols.iter().map(|&j| mat.column(j)).collect::<Vec<_>>());
            let basis = sub.kernel_basis();
            for k in 0..basis.cols() {
                let v = basis.column(k);
                let mut coords = vec![f.zero(); small.ranks()[s]];
                for (&j, &c) in cols.iter().zip(&v) {
                    coords[j] = c;
                }
                let x = ExtElement::from_coords(&small, s, coords)?;
                kernel.push(class_json(&small, &dict, &x)?);
            }
        }
        degrees.push(json!({
            "s": s,
            "rank": mat.rank(),
            "matrix": (0..mat.rows()).map(|r| code_list(mat.row(r))).collect::<Vec<_>>(),
            "kernel": kernel,
        }));
    }
    Ok(json!({
        "source": phi.source().name(),
        "target": phi.target().name(),
        "target_classes": dict.names.iter().map(|(n, x)| json!({"name": n, "degree": x.degree, "coords": code_list(&x.coords)})).collect::<Vec<_>>(),
        "degrees": degrees,
    }))
}

// ---- module ----

fn standard_module(alg: &AlgebraRef, kind: ModuleKind) -> Result<SuperModule> {
    Ok(match kind {
        ModuleKind::Regular => regular_module(alg),
        ModuleKind::Trivial => trivial_module(alg),
        ModuleKind::Syzygy => syzygy(&trivial_module(alg))?,
    })
}

fn extension_field(base: &FieldRef, e: u32) -> Result<FieldRef> {
    let large = Field::get(base.characteristic(), e).map_err(|x| usage(format!("invalid extension: {x}")))?;
    if !e.is_multiple_of(base.degree()) {
        return Err(usage(format!("F_{} does not embed in F_{}", base.order(), large.order())));
    }
    Ok(large)
}

fn module(g: &Global, cmd: ModuleCmd) -> Result<Output> {
    match cmd {
        ModuleCmd::Projective { algebra, kind, restrict_w_minus, extend } => {
            let s = spec(g, &algebra)?;
            let alg = s.algebra()?;
            let mut m = standard_module(&alg, kind)?;
            if let Some(k) = restrict_w_minus {
                let phi = inclusion_w_minus(k, &s.field())?;
                m = restrict_module(&m, &phi)?;
            }
            if let Some(e) = extend {
                m = extend_module_scalars(&m, &extension_field(&s.field(), e)?)?;
            }
            let report = projectivity(&m);
            let text = format!(
                "{:?} module over {}: dim {}, top dim {}, algebra dim {}, projective {}\n",
                kind,
                m.algebra().name(),
                report.module_dim,
                report.top_dim,
                report.algebra_dim,
                report.projective
            );
            let params = json!({"algebra": algebra, "kind": format!("{kind:?}").to_lowercase(), "restrict_w_minus": restrict_w_minus, "extend": extend});
            Ok(output("module projective", params, Some(m.field()), serde_json::to_value(&report)?, text))
        }
        ModuleCmd::Detect { module, embeddings, extend } => {
            let m = read_module(g, &module)?;
            let phis = read_embeddings(g, &embeddings, m.algebra())?;
            let large = extend.map(|e| extension_field(m.field(), e)).transpose()?;
            let report = detect_projectivity(&m, &phis, large.as_ref())?;
            let rows: Vec<Vec<String>> = report
                .entries
                .iter()
                .map(|e| strings([e.source.clone(), e.report.top_dim.to_string(), e.report.projective.to_string()]))
                .collect();
            let mut text = table(&strings(["embedding source", "top dim", "projective"]), &rows);
            text += &format!("all projective: {}\n", report.all_projective);
            let params = json!({"module": module, "embeddings": embeddings, "extend": extend});
            Ok(output("module detect", params, Some(m.field()), serde_json::to_value(&report)?, text))
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ModuleFile {
    Standard {
        algebra: String,
        kind: String,
    },
    Explicit {
        algebra: String,
        parities: Vec<u8>,
        action: HashMap<String, Vec<Vec<u32>>>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EmbeddingFile {
    Named { kind: String, m: Option<usize> },
    Explicit { source: String, images: HashMap<String, Vec<u32>> },
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_module(g: &Global, path: &Path) -> Result<SuperModule> {
    match read_json::<ModuleFile>(path)? {
        ModuleFile::Standard { algebra, kind } => {
            let alg = spec(g, &algebra)?.algebra()?;
            let kind = <ModuleKind as clap::ValueEnum>::from_str(&kind, true).map_err(|_| usage(format!("unknown module kind `{kind}`")))?;
            standard_module(&alg, kind)
        }
        ModuleFile::Explicit { algebra, parities, action } => {
            let alg = spec(g, &algebra)?.algebra()?;
            let f = alg.field().clone();
            let mut mats = Vec::new();
            for gen in alg.generators() {
                let rows = action.get(&gen.name).ok_or_else(|| usage(format!("no action given for `{}`", gen.name)))?;
                let rows = rows.iter().map(|r| codes(&f, r)).collect::<Result<Vec<_>>>()?;
                mats.push(FieldMatrix::from_rows(&f, rows).map_err(|e| usage(e.to_string()))?);
            }
            Ok(SuperModule::new(&alg, mats, parities)?)
        }
    }
}

fn read_embeddings(g: &Global, path: &Path, target: &AlgebraRef) -> Result<Vec<AlgebraMorphism>> {
    let f = target.field().clone();
    let entries: Vec<EmbeddingFile> = read_json(path)?;
    entries
        .into_iter()
        .map(|e| match e {
            EmbeddingFile::Named { kind, m } => match (kind.as_str(), m) {
                ("identity", _) => Ok(identity_morphism(target)),
                ("w_minus", Some(m)) => Ok(inclusion_w_minus(m, &f)?),
                _ => Err(usage(format!("unknown embedding `{kind}` (use identity, or w_minus with m)"))),
            },
            EmbeddingFile::Explicit { source, images } => {
                let src = spec(g, &source)?.algebra()?;
                let imgs = src
                    .generators()
                    .iter()
                    .map(|gen| {
                        let v = images.get(&gen.name).ok_or_else(|| usage(format!("no image for `{}`", gen.name)))?;
                        codes(&f, v)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(make_morphism(&src, target, imgs)?)
            }
        })
        .collect()
}

// ---- steenrod ----

fn cartan(c: Convention) -> CartanConvention {
    match c {
        Convention::Koszul => CartanConvention::Koszul,
        Convention::Printed => CartanConvention::Printed,
    }
}

fn ring(g: &Global, text: &str, c: Convention) -> Result<SteenrodRing> {
    Ok(spec(g, text)?.steenrod_ring()?.with_convention(cartan(c)))
}

/// `k` or `k/2` as twice the index.
pub fn parse_index(text: &str) -> Result<i32> {
    let t = text.trim();
    let bad = || usage(format!("index `{text}` is not an integer or a half-integer k/2"));
    match t.split_once('/') {
        Some((num, "2")) => num.trim().parse().map_err(|_| bad()),
        Some(_) => Err(bad()),
        None => t.parse::<i32>().map(|k| 2 * k).map_err(|_| bad()),
    }
}

fn index_text(i2: i32) -> String {
    if i2 % 2 == 0 {
        (i2 / 2).to_string()
    } else {
        format!("{i2}/2")
    }
}

fn default_bound(g: &Global, f: &FieldRef) -> u32 {
    let p = f.characteristic();
    g.bound.unwrap_or(2 * p * p)
}

fn steenrod(g: &Global, cmd: SteenrodCmd) -> Result<Output> {
    match cmd {
        SteenrodCmd::Apply { ring: r, op, i, expr, convention } => {
            let rg = ring(g, &r, convention)?;
            let op: Op = op.parse()?;
            let i2 = parse_index(&i)?;
            let u = rg.parse(&expr)?;
            let v = rg.apply_op(op, i2, &u)?;
            let value = rg.display(&v);
            let result = json!({
                "ring": rg.name(),
                "op": op,
                "index": index_text(i2),
                "input": rg.display(&u),
                "value": value,
                "bidegree": rg.bidegree(&v)?,
            });
            let params = json!({"ring": r, "op": op, "i": i, "expr": expr, "convention": format!("{convention:?}").to_lowercase()});
            Ok(output("steenrod apply", params, Some(rg.field()), result, format!("{value}\n")))
        }
        SteenrodCmd::Saturate { ring: r, seed, convention } => {
            let rg = ring(g, &r, convention)?;
            let bound = default_bound(g, rg.field());
            let seeds = seed.iter().map(|s| rg.parse(s)).collect::<Result<Vec<_>, _>>()?;
            let ideal = saturate(&rg, &seeds, bound)?;
            let stable = verify_stable(&rg, &ideal);
            let mut rows = Vec::new();
            let mut slices = Vec::new();
            for sl in ideal.summary() {
                let basis: Vec<String> = ideal.basis(sl.s, sl.t).iter().map(|b| rg.display(b)).collect();
                rows.push(strings([sl.s.to_string(), sl.t.to_string(), sl.dim.to_string(), basis.join(", ")]));
                slices.push(json!({"s": sl.s, "t": sl.t, "dim": sl.dim, "basis": basis}));
            }
            let mut text = table(&strings(["s", "t", "dim", "basis"]), &rows);
            text += &format!("stable under all operations: {}\n", stable.is_ok());
            let result = json!({"ring": rg.name(), "bound": bound, "stable": stable.is_ok(), "slices": slices});
            let params = json!({"ring": r, "seeds": seed, "bound": bound, "convention": format!("{convention:?}").to_lowercase()});
            Ok(output("steenrod saturate", params, Some(rg.field()), result, text))
        }
        SteenrodCmd::ClassifyB36 { ring: r, seed, convention } => {
            let rg = ring(g, &r, convention)?;
            if rg.shape().is_none() {
                return Err(usage("classify-b36 needs a standard ring std:r,s,eps"));
            }
            let bound = default_bound(g, rg.field());
            let seeds = seed.iter().map(|s| rg.parse(s)).collect::<Result<Vec<_>, _>>()?;
            let ideal = saturate(&rg, &seeds, bound)?;
            let outcome = classify_b36(&rg, &ideal)?;
            let value = serde_json::to_value(&outcome)?;
            let text = format!("{}\n", b36_text(&value));
            let result = json!({"ring": rg.name(), "bound": bound, "slice_2_0": ideal.dim(2, 0), "outcome": value});
            let params = json!({"ring": r, "seeds": seed, "bound": bound, "convention": format!("{convention:?}").to_lowercase()});
            Ok(output("steenrod classify-b36", params, Some(rg.field()), result, text))
        }
        SteenrodCmd::Serre { s, seed, convention } => {
            let f = field(g)?;
            let bound = default_bound(g, &f);
            let outcome = serre_check(s, &seed, bound, &f, cartan(convention))?;
            let value = serde_json::to_value(&outcome)?;
            let text = match value["result"].as_str() {
                Some("witness") => format!("witness: {}\n", value["element"].as_str().unwrap_or("")),
                _ => format!("inconclusive: {}\n", value["reason"].as_str().unwrap_or("")),
            };
            let params = json!({"s": s, "seed": seed, "bound": bound, "convention": format!("{convention:?}").to_lowercase()});
            Ok(output("steenrod serre", params, Some(&f), json!({"bound": bound, "outcome": value}), text))
        }
        SteenrodCmd::Table { ring: r } => {
            let rg = ring(g, &r, Convention::Koszul)?;
            let rows = operation_table(&rg);
            let mut header = strings(["generator", "(s,t)"]);
            header.extend(TABLE_COLUMNS.iter().map(|&(op, i2)| column_name(op, i2)));
            let text_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    let mut r = vec![row.generator.clone(), format!("({},{})", row.degree.0, row.degree.1)];
                    r.extend(row.cells.iter().map(|c| c.clone().unwrap_or_default()));
                    r
                })
                .collect();
            let result = json!({
                "ring": rg.name(),
                "columns": TABLE_COLUMNS.iter().map(|&(op, i2)| column_name(op, i2)).collect::<Vec<_>>(),
                "rows": rows,
            });
            Ok(output("steenrod table", json!({ "ring": r }), Some(rg.field()), result, table(&header, &text_rows)))
        }
    }
}

pub fn column_name(op: Op, i2: i32) -> String {
    format!("{op}^{}", index_text(i2))
}

fn b36_text(v: &Value) -> String {
    match v["case"].as_str() {
        Some("ii") => format!("case (ii): gamma = {}, witness {}", v["gamma"], v["witness"].as_str().unwrap_or("")),
        Some("i") => format!("case (i): witness {} (x power {}, factors {})", v["element"].as_str().unwrap_or(""), v["n"], v["factors"]),
        _ => format!("inconclusive: {}", v["reason"].as_str().unwrap_or("")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices() {
        assert_eq!(parse_index("1/2").unwrap(), 1);
        assert_eq!(parse_index("0").unwrap(), 0);
        assert_eq!(parse_index("2").unwrap(), 4);
        assert!(parse_index("1/3").is_err());
        assert!(parse_index("x").is_err());
        assert_eq!(index_text(3), "3/2");
        assert_eq!(column_name(Op::BetaP, 2), "betaP^1");
    }

    #[test]
    fn class_degrees() {
        assert_eq!(class_degree("zeta").unwrap(), 1);
        assert_eq!(class_degree("x2").unwrap(), 2);
        assert_eq!(class_degree("g3_1").unwrap(), 3);
        assert!(class_degree("w").is_err());
        assert!(class_degree("g3").is_err());
    }

    #[test]
    fn expresses_inflation_kernel() {
        let f = Field::get(3, 1).unwrap();
        let phi = quotient_emn(2, 1, &f).unwrap();
        let v = inflation(&phi, 2).unwrap();
        let k = v["degrees"][2]["kernel"].as_array().unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0]["named"], "zeta^2 - x1");
    }
}
