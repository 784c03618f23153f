//! Regeneration of the committed fixture set under `fixtures/`.

use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use superhopf::dieudonne::{brute_force_iso, enumerate_cyclic_quotients, koch_iso_test, label_multiset, KochLabel};
use superhopf::homology::{
    class_dictionary, ext_dims, extend_module_scalars, minimal_resolution, nilpotence_order, projectivity, regular_module,
    restrict_module, syzygy, trivial_module, yoneda_product, SuperModule,
};
use superhopf::linalg::{Field, FieldRef};
use superhopf::steenrod::{
    classify_b36, emn_ring, operation_table, saturate, serre_check, standard_ring, verify_stable, CartanConvention, Op,
    SteenrodRing, TABLE_COLUMNS,
};
use superhopf::superalg::{catalog, hopf_check, inclusion_w_minus, quotient_emn, AlgebraRef, CatalogEntry};
use superhopf::witt::build_witt_table;

use crate::commands::{column_name, fold_check, inflation, witt_group, witt_laws};
use crate::manifest::{canonical_json, digest, Output};
use crate::render::{strings, table};
use crate::usage;

type Builder = fn() -> Result<Value>;

pub const FIXTURES: &[(&str, Builder)] = &[
    ("witt_polynomials", witt_polynomials),
    ("witt_groups", witt_groups),
    ("koch", koch),
    ("hopf", hopf),
    ("ext_dims", ext_dimensions),
    ("ext_ring", ext_ring),
    ("projectivity", projectivity_fixture),
    ("steenrod_tables", steenrod_tables),
    ("dichotomy", dichotomy),
    ("fold", fold_fixture),
];

pub const DICHOTOMY_PRIME: u32 = 3;
pub const DICHOTOMY_BOUND: u32 = 18;

/// Ring shape `(r, s, eps)`.
type Shape = (usize, usize, bool);

/// Ring shapes and seed expressions for the dichotomy fixture.
pub const B36_SEEDS: &[(Shape, &[&str])] = &[
    ((1, 0, true), &["zeta^2+x1"]),
    ((1, 0, true), &["zeta^2+2*x1"]),
    ((2, 0, true), &["zeta^2+x2"]),
    ((2, 2, true), &["zeta^2+x2"]),
    ((1, 0, true), &["x1"]),
    ((1, 1, true), &["z1"]),
    ((2, 0, false), &["l1*l2"]),
    ((1, 1, false), &["l1*y1"]),
    ((2, 1, false), &["l2*y1"]),
    ((2, 2, false), &["l2*y1+l2*y2"]),
    ((1, 2, false), &["y1*y2"]),
];

pub const SERRE_SEEDS: &[(usize, &str)] = &[(1, "z1"), (1, "y1*z1"), (2, "z1+z2"), (2, "y1*y2"), (2, "z1*z2")];

fn f(p: u32, e: u32) -> FieldRef {
    Field::get(p, e).expect("fixture fields are valid")
}

fn alg(entry: CatalogEntry, field: &FieldRef) -> Result<AlgebraRef> {
    Ok(Arc::new(catalog(&entry, field)?))
}

fn witt_polynomials() -> Result<Value> {
    let tables: Vec<Value> = [3, 5]
        .into_iter()
        .map(|p| {
            let t = build_witt_table(3, p);
            let full = t.to_json();
            let mut v = build_witt_table(2, p).to_json();
            v["ghost_identities_through_3"] = json!(t.verify_ghost_identities().is_ok());
            v["index_3"] = json!({
                "terms": {"S": t.sum(3).num_terms(), "P": t.product(3).num_terms(), "N": t.negation(3).num_terms()},
                "max_coefficient_bits": {"S": t.sum(3).max_coefficient_bits(), "P": t.product(3).max_coefficient_bits()},
                "digest": {"S": digest(&full["S"][3]), "P": digest(&full["P"][3]), "N": digest(&full["N"][3])},
            });
            v
        })
        .collect();
    Ok(json!({ "tables": tables }))
}

fn witt_groups() -> Result<Value> {
    let groups = [(3, 1, 1), (3, 1, 2), (3, 2, 1), (3, 2, 2), (5, 1, 2)]
        .into_iter()
        .map(|(p, e, m)| {
            let mut v = witt_group(&f(p, e), m)?;
            v["field_order"] = json!(p.pow(e));
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "groups": groups,
        "laws": witt_laws(&f(3, 2), 4, 1000, 0)?,
    }))
}

fn labels_up_to(field: &FieldRef, max_sum: usize) -> Vec<KochLabel> {
    let mut out = Vec::new();
    for s in 2..=max_sum {
        for m in 1..s {
            out.push(KochLabel::mmn(m, s - m));
            out.extend(field.nonzero_elements().map(|mu| KochLabel::mmnmu(m, s - m, mu)));
        }
    }
    out
}

fn koch() -> Result<Value> {
    let f3 = f(3, 1);
    let mut quotients = Vec::new();
    for s in 2..=4 {
        for m in 1..s {
            let n = s - m;
            let labels = enumerate_cyclic_quotients(m, n, &f3)?;
            let multiset = label_multiset(&labels, &f3);
            quotients.push(json!({
                "m": m,
                "n": n,
                "labels": multiset.iter().map(|(l, c)| json!({"label": l.to_string(), "count": c})).collect::<Vec<_>>(),
            }));
        }
    }
    let mut iso = Vec::new();
    for field in [f3.clone(), f(3, 2)] {
        let labels = labels_up_to(&field, 4);
        let modules = labels.iter().map(|l| l.build(&field)).collect::<Result<Vec<_>, _>>()?;
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut disagreements = Vec::new();
        let mut pairs = 0usize;
        for (i, a) in labels.iter().enumerate() {
            for (j, b) in labels.iter().enumerate() {
                let koch = koch_iso_test(a, b, &field)?;
                let brute = brute_force_iso(&modules[i], &modules[j])?;
                pairs += 1;
                if koch != brute {
                    disagreements.push(format!("{a} vs {b}"));
                }
            }
            match classes.iter_mut().find(|c| koch_iso_test(&labels[c[0]], a, &field).unwrap_or(false)) {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        let merged: Vec<Vec<String>> =
            classes.iter().filter(|c| c.len() > 1).map(|c| c.iter().map(|&i| labels[i].to_string()).collect()).collect();
        iso.push(json!({
            "field_order": field.order(),
            "labels": labels.len(),
            "pairs": pairs,
            "disagreements": disagreements,
            "classes": classes.len(),
            "merged_classes": merged,
        }));
    }
    Ok(json!({"quotients_over_f3": quotients, "isomorphism": iso}))
}

fn hopf() -> Result<Value> {
    let mut out = Vec::new();
    for (p, e) in [(3, 1), (3, 2)] {
        let field = f(p, e);
        let mut entries = Vec::new();
        if e == 1 {
            entries.extend([CatalogEntry::GaMinus, CatalogEntry::GaR(1), CatalogEntry::GaR(2)]);
        }
        for m in 1..=2 {
            if e == 1 {
                entries.extend([CatalogEntry::Wm1(m), CatalogEntry::Wm1Minus(m)]);
            }
            for n in 1..=2 {
                if e == 1 {
                    entries.extend([CatalogEntry::EmnMinus(m, n), CatalogEntry::Emn(m, n)]);
                }
                for mu in field.nonzero_elements() {
                    entries.push(CatalogEntry::EmnMuMinus(m, n, mu));
                    entries.push(CatalogEntry::EmnMu(m, n, mu));
                }
            }
        }
        for entry in entries {
            let a = catalog(&entry, &field)?;
            let r = hopf_check(&a);
            out.push(json!({"entry": entry.to_string(), "field_order": field.order(), "ok": r.ok, "checks": r.checks.len(), "failure": r.failure}));
        }
    }
    Ok(json!({ "entries": out }))
}

pub const EXT_DIM_ENTRIES: &[(&str, usize)] = &[
    ("Ga-", 6),
    ("W(2)", 6),
    ("W-(1)", 6),
    ("W-(2)", 6),
    ("E-(1,1)", 6),
    ("E-(2,1)", 6),
    ("E-(2,2)", 6),
    ("E-(1,1,mu=1)", 6),
    ("E-(1,1,mu=2)", 6),
];

fn ext_dimensions() -> Result<Value> {
    let mut out = Vec::new();
    for &(text, smax) in EXT_DIM_ENTRIES {
        let a = crate::catalog::CatalogSpec::parse(text, 3, 1)?.algebra()?;
        let res = minimal_resolution(&a, smax);
        res.check().map_err(|e| anyhow::anyhow!("{text}: {e}"))?;
        let dims = ext_dims(&res);
        out.push(json!({
            "algebra": text,
            "p": 3,
            "even": dims.iter().map(|d| d[0]).collect::<Vec<_>>(),
            "odd": dims.iter().map(|d| d[1]).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({ "tables": out }))
}

fn ext_ring() -> Result<Value> {
    let f3 = f(3, 1);
    let mut zeta = Vec::new();
    for (entry, smax) in [(CatalogEntry::Wm1Minus(1), 4), (CatalogEntry::EmnMinus(1, 1), 6)] {
        let a = alg(entry.clone(), &f3)?;
        let res = minimal_resolution(&a, smax);
        let dict = class_dictionary(&res)?;
        let z = dict.get("zeta").context("zeta is named")?;
        zeta.push(json!({
            "algebra": entry.to_string(),
            "zeta_squared_zero": yoneda_product(&res, z, z)?.is_zero(),
            "zeta_nilpotence": nilpotence_order(&res, z, smax)?,
        }));
    }
    let mut nil = Vec::new();
    for (entry, class, nmax) in [(CatalogEntry::GaR(1), "lambda1", 3), (CatalogEntry::Wm1(2), "lambda", 3), (CatalogEntry::GaR(1), "x1", 3)] {
        let a = alg(entry.clone(), &f3)?;
        let res = minimal_resolution(&a, 6);
        let dict = class_dictionary(&res)?;
        let x = dict.get(class).with_context(|| format!("{class} is named"))?;
        nil.push(json!({"algebra": entry.to_string(), "class": class, "nmax": nmax, "order": nilpotence_order(&res, x, nmax)?}));
    }
    let inflations = [(2, 1), (3, 1)]
        .into_iter()
        .map(|(m, n)| inflation(&quotient_emn(m, n, &f3)?, 2))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({"zeta_squared": zeta, "nilpotence": nil, "inflation": inflations}))
}

fn projectivity_fixture() -> Result<Value> {
    let f3 = f(3, 1);
    let f9 = f(3, 2);
    let e21 = alg(CatalogEntry::EmnMinus(2, 1), &f3)?;
    let inc = inclusion_w_minus(2, &f3)?;
    let omega = syzygy(&trivial_module(&e21))?;
    let cases: Vec<(&str, SuperModule)> = vec![
        ("regular E-(2,1)", regular_module(&e21)),
        ("trivial E-(2,1)", trivial_module(&e21)),
        ("syzygy of k over E-(2,1)", omega.clone()),
        ("regular E-(2,1) restricted to W-(1)", restrict_module(&regular_module(&e21), &inc)?),
        ("syzygy of k over E-(2,1) restricted to W-(1)", restrict_module(&omega, &inc)?),
    ];
    let mut out = Vec::new();
    for (name, m) in cases {
        let small = projectivity(&m);
        let large = projectivity(&extend_module_scalars(&m, &f9)?);
        out.push(json!({"module": name, "over_f3": small, "over_f9": large}));
    }
    Ok(json!({ "modules": out }))
}

fn table_json(ring: &SteenrodRing) -> Value {
    json!({
        "ring": ring.name(),
        "columns": TABLE_COLUMNS.iter().map(|&(op, i2)| column_name(op, i2)).collect::<Vec<_>>(),
        "rows": operation_table(ring),
    })
}

fn steenrod_tables() -> Result<Value> {
    let mut standard = Vec::new();
    for p in [3, 5] {
        standard.push(table_json(&standard_ring(1, 1, true, &f(p, 1))));
    }
    let mut emn = Vec::new();
    for (m, n) in [(2, 1), (2, 2), (3, 2)] {
        emn.push(table_json(&emn_ring(m, n, &f(3, 1))?));
    }
    let mut zeta = Vec::new();
    for p in [3, 5] {
        let ring = standard_ring(1, 0, true, &f(p, 1));
        let z2 = ring.parse("zeta^2")?;
        zeta.push(json!({
            "p": p,
            "P^0(zeta^2)": ring.display(&ring.apply_op(Op::P, 0, &z2)?),
            "P^1(zeta^2)": ring.display(&ring.apply_op(Op::P, 2, &z2)?),
        }));
    }
    Ok(json!({"standard": standard, "emn": emn, "zeta_squared": zeta}))
}

fn dichotomy() -> Result<Value> {
    let field = f(DICHOTOMY_PRIME, 1);
    let mut b36 = Vec::new();
    for &((r, s, eps), seeds) in B36_SEEDS {
        let mut outcomes = serde_json::Map::new();
        let mut slice = None;
        for (label, conv) in [("koszul", CartanConvention::Koszul), ("printed", CartanConvention::Printed)] {
            let ring = standard_ring(r, s, eps, &field).with_convention(conv);
            let us = seeds.iter().map(|t| ring.parse(t)).collect::<Result<Vec<_>, _>>()?;
            let ideal = saturate(&ring, &us, DICHOTOMY_BOUND)?;
            verify_stable(&ring, &ideal).map_err(|e| anyhow::anyhow!("unstable saturation: {e}"))?;
            if conv == CartanConvention::Koszul {
                slice = Some(ideal.dim(2, 0));
            }
            outcomes.insert(label.into(), serde_json::to_value(classify_b36(&ring, &ideal)?)?);
        }
        b36.push(json!({
            "ring": {"r": r, "s": s, "eps": eps},
            "seeds": seeds,
            "slice_2_0": slice,
            "outcome": outcomes["koszul"],
            "printed_outcome": outcomes["printed"],
        }));
    }
    let mut serre = Vec::new();
    for &(s, seed) in SERRE_SEEDS {
        serre.push(json!({
            "s": s,
            "seed": seed,
            "outcome": serde_json::to_value(serre_check(s, seed, DICHOTOMY_BOUND, &field, CartanConvention::Koszul)?)?,
            "printed_outcome": serde_json::to_value(serre_check(s, seed, DICHOTOMY_BOUND, &field, CartanConvention::Printed)?)?,
        }));
    }
    Ok(json!({"p": DICHOTOMY_PRIME, "bound": DICHOTOMY_BOUND, "b36": b36, "serre": serre}))
}

fn fold_fixture() -> Result<Value> {
    let f3 = f(3, 1);
    let mut out = Vec::new();
    for m in 1..=2 {
        for n in 1..=2 {
            for a in [1, 3] {
                out.push(fold_check(m, n, a, &f3)?);
            }
        }
    }
    Ok(json!({ "cases": out }))
}

pub fn build(name: &str) -> Result<Value> {
    let (_, b) = FIXTURES.iter().find(|(n, _)| *n == name).ok_or_else(|| usage(format!("unknown fixture `{name}`")))?;
    b()
}

pub fn run_all(dir: &Path, write: bool, only: &[String]) -> Result<Output> {
    for name in only {
        if !FIXTURES.iter().any(|(n, _)| n == name) {
            let known: Vec<&str> = FIXTURES.iter().map(|(n, _)| *n).collect();
            return Err(usage(format!("unknown fixture `{name}`; known: {}", known.join(", "))));
        }
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut statuses = Vec::new();
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for (name, builder) in FIXTURES {
        if !only.is_empty() && !only.iter().any(|o| o == name) {
            continue;
        }
        let value = builder().with_context(|| format!("building fixture {name}"))?;
        let text = canonical_json(&value);
        let path = dir.join(format!("{name}.json"));
        let status = match std::fs::read_to_string(&path) {
            Ok(old) if !write => {
                if old == text {
                    "match"
                } else {
                    mismatches += 1;
                    "mismatch"
                }
            }
            _ => {
                std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
                "written"
            }
        };
        rows.push(strings([name.to_string(), status.to_string()]));
        statuses.push(json!({"name": name, "status": status, "digest": digest(&value)}));
    }
    let mut text = table(&strings(["fixture", "status"]), &rows);
    if mismatches > 0 {
        text += &format!("{mismatches} fixture(s) differ from the committed files\n");
    }
    Ok(Output {
        command: "repro all".into(),
        parameters: json!({"dir": dir, "write": write, "only": only}),
        field: None,
        seed: Some(0),
        result: json!({"fixtures": statuses, "mismatches": mismatches}),
        table: text,
        exit_code: if mismatches > 0 { crate::EXIT_MISMATCH } else { 0 },
    })
}
