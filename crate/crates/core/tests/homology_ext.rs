use std::sync::Arc;

use superhopf::homology::*;
use superhopf::linalg::{Field, FieldMatrix, FieldRef};
use superhopf::superalg::*;

fn f3() -> FieldRef {
    Field::get(3, 1).unwrap()
}

fn alg(e: CatalogEntry, f: &FieldRef) -> AlgebraRef {
    Arc::new(catalog(&e, f).unwrap())
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn totals(res: &FreeResolution) -> Vec<usize> {
    ext_dims(res).iter().map(|[e, o]| e + o).collect()
}

#[test]
fn ext_dimensions_of_lines() {
    let f = f3();
    for e in [CatalogEntry::GaMinus, CatalogEntry::Wm1(2), CatalogEntry::Wm1Minus(1)] {
        let res = minimal_resolution(&alg(e.clone(), &f), 6);
        res.check().unwrap();
        assert_eq!(totals(&res), vec![1; 7], "{e}");
    }
    let w = minimal_resolution(&alg(CatalogEntry::Wm1Minus(1), &f), 6);
    for (s, [_, odd]) in ext_dims(&w).into_iter().enumerate() {
        assert_eq!(odd, s % 2);
    }
}

#[test]
fn ext_dimensions_of_witt_elementary() {
    let f = f3();
    let res = minimal_resolution(&alg(CatalogEntry::EmnMinus(2, 1), &f), 6);
    res.check().unwrap();
    assert_eq!(totals(&res), (1..=7).collect::<Vec<_>>());
    assert_eq!(ext_dims(&res)[2], [2, 1]);

    let res = minimal_resolution(&alg(CatalogEntry::EmnMinus(2, 2), &f), 4);
    res.check().unwrap();
    assert_eq!(totals(&res), (0..=4).map(|d| binom(d + 2, 2)).collect::<Vec<_>>());

    for mu in 1..3 {
        let e = CatalogEntry::EmnMuMinus(1, 1, f.element(mu).unwrap());
        let res = minimal_resolution(&alg(e, &f), 5);
        assert_eq!(totals(&res), (1..=6).collect::<Vec<_>>());
    }
}

#[test]
fn zeta_squared() {
    let f = f3();
    let w = minimal_resolution(&alg(CatalogEntry::Wm1Minus(1), &f), 3);
    let zeta = class_dictionary(&w).unwrap().get("zeta").unwrap().clone();
    assert!(yoneda_product(&w, &zeta, &zeta).unwrap().is_zero());
    assert_eq!(nilpotence_order(&w, &zeta, 4).unwrap(), Some(2));

    let e = minimal_resolution(&alg(CatalogEntry::EmnMinus(1, 1), &f), 6);
    let zeta = class_dictionary(&e).unwrap().get("zeta").unwrap().clone();
    assert!(!yoneda_product(&e, &zeta, &zeta).unwrap().is_zero());
    assert_eq!(nilpotence_order(&e, &zeta, 6).unwrap(), None);
}

#[test]
fn inflation_kernel_is_zeta_squared_minus_x() {
    let f = f3();
    let phi = quotient_emn(2, 1, &f).unwrap();
    let big = minimal_resolution(phi.source(), 2);
    let small = minimal_resolution(phi.target(), 2);
    let dict = class_dictionary(&small).unwrap();
    let zeta = dict.get("zeta").unwrap();
    let x = dict.get("x1").unwrap();
    let z2 = yoneda_product(&small, zeta, zeta).unwrap();
    let u = z2.add(&f, &x.scale(&f, f.neg(f.one())));
    let maps = induced_ext_map(&phi, &big, &small, 2).unwrap();
    assert!(apply_induced(&maps[2], &u).is_zero());
    assert!(!apply_induced(&maps[2], &z2).is_zero());
    assert!(!apply_induced(&maps[2], x).is_zero());
    let even: Vec<usize> = (0..small.ranks()[2]).filter(|&j| small.generator_parities(2)[j] == 0).collect();
    let cols: Vec<_> = even.iter().map(|&j| maps[2].column(j)).collect();
    let restricted = FieldMatrix::from_columns(&f, maps[2].rows(), &cols);
    assert_eq!(even.len() - restricted.rank(), 1);
    let lambda = dict.get("lambda1").unwrap();
    assert!(!apply_induced(&maps[1], lambda).is_zero());
    assert!(!apply_induced(&maps[1], zeta).is_zero());
}

#[test]
fn projectivity_and_restriction() {
    let f = f3();
    let e21 = alg(CatalogEntry::EmnMinus(2, 1), &f);
    assert!(is_projective(&regular_module(&e21)));
    assert!(!is_projective(&trivial_module(&e21)));
    let omega = syzygy(&trivial_module(&e21)).unwrap();
    assert_eq!(omega.dim(), e21.dim() - 1);
    assert!(!is_projective(&omega));

    let inc = inclusion_w_minus(2, &f).unwrap();
    let r = restrict_module(&omega, &inc).unwrap();
    assert!(!is_projective(&r));
    let reg = restrict_module(&regular_module(&e21), &inc).unwrap();
    let rep = projectivity(&reg);
    assert!(rep.projective);
    assert_eq!(rep.top_dim, 3);

    let f9 = Field::get(3, 2).unwrap();
    for (m, expect) in [(regular_module(&e21), true), (omega.clone(), false)] {
        let small = detect_projectivity(&m, std::slice::from_ref(&inc), None).unwrap();
        let large = detect_projectivity(&m, std::slice::from_ref(&inc), Some(&f9)).unwrap();
        assert_eq!(small.all_projective, expect);
        assert_eq!(large.all_projective, expect);
        assert_eq!(small.entries[0].report.top_dim, large.entries[0].report.top_dim);
    }
}

#[test]
fn syzygy_of_free_module_vanishes() {
    let a = alg(CatalogEntry::EmnMinus(1, 1), &f3());
    assert_eq!(syzygy(&regular_module(&a)).unwrap().dim(), 0);
}

#[test]
fn invalid_module_rejected() {
    let f = f3();
    let a = alg(CatalogEntry::GaMinus, &f);
    let m = FieldMatrix::from_ints(&f, &[&[0, 0], &[1, 0]]);
    assert!(SuperModule::new(&a, vec![m.clone()], vec![0, 0]).is_err());
    assert!(SuperModule::new(&a, vec![m], vec![0, 1]).is_ok());
    let n = FieldMatrix::from_ints(&f, &[&[1, 0], &[0, 0]]);
    assert!(SuperModule::new(&a, vec![n], vec![0, 0]).is_err());
}

#[test]
fn induced_maps_are_functorial() {
    let f = f3();
    let q3 = quotient_emn(3, 1, &f).unwrap();
    let q2 = quotient_emn(2, 1, &f).unwrap();
    let both = q3.then(&q2).unwrap();
    let r3 = minimal_resolution(q3.source(), 3);
    let r2 = minimal_resolution(q2.source(), 3);
    let r1 = minimal_resolution(q2.target(), 3);
    let m32 = induced_ext_map(&q3, &r3, &r2, 3).unwrap();
    let m21 = induced_ext_map(&q2, &r2, &r1, 3).unwrap();
    let m31 = induced_ext_map(&both, &r3, &r1, 3).unwrap();
    for s in 0..=3 {
        assert_eq!(m32[s].mul(&m21[s]).unwrap(), m31[s], "degree {s}");
    }
    for seed in 0..3 {
        let perturbed = induced_ext_map_with(&both, &r3, &r1, 3, Some(seed)).unwrap();
        assert_eq!(perturbed, m31);
    }
}

#[test]
fn identity_induces_identity() {
    let f = f3();
    let a = alg(CatalogEntry::EmnMinus(2, 1), &f);
    let res = minimal_resolution(&a, 4);
    let maps = induced_ext_map(&identity_morphism(&a), &res, &res, 4).unwrap();
    for (s, m) in maps.iter().enumerate() {
        assert_eq!(*m, FieldMatrix::identity(&f, res.ranks()[s]));
    }
}

#[test]
fn graded_commutativity() {
    let f = f3();
    for e in [CatalogEntry::EmnMinus(1, 1), CatalogEntry::EmnMinus(2, 1), CatalogEntry::GaR(2)] {
        let res = minimal_resolution(&alg(e.clone(), &f), 4);
        for m in 1..=2 {
            for n in 1..=2 {
                for i in 0..res.ranks()[m] {
                    for j in 0..res.ranks()[n] {
                        let a = ExtElement::dual(&res, m, i);
                        let b = ExtElement::dual(&res, n, j);
                        let ab = yoneda_product(&res, &a, &b).unwrap();
                        let ba = yoneda_product(&res, &b, &a).unwrap();
                        let sign = (m * n + (a.parity * b.parity) as usize) % 2;
                        let expect = if sign == 1 { ba.scale(&f, f.neg(f.one())) } else { ba };
                        assert_eq!(ab.coords, expect.coords, "{e} ({m},{i})·({n},{j})");
                    }
                }
            }
        }
    }
}

#[test]
fn products_independent_of_lift() {
    let f = f3();
    let res = minimal_resolution(&alg(CatalogEntry::EmnMinus(2, 1), &f), 4);
    for i in 0..res.ranks()[2] {
        for j in 0..res.ranks()[2] {
            let a = ExtElement::dual(&res, 2, i);
            let b = ExtElement::dual(&res, 2, j);
            let base = yoneda_product(&res, &a, &b).unwrap();
            for seed in 0..3 {
                assert_eq!(yoneda_product_with(&res, &a, &b, Some(seed)).unwrap(), base);
            }
        }
    }
}

#[test]
fn nilpotence_of_degree_one_classes() {
    let f = f3();
    let res = minimal_resolution(&alg(CatalogEntry::GaR(1), &f), 6);
    let dict = class_dictionary(&res).unwrap();
    assert_eq!(nilpotence_order(&res, dict.get("lambda1").unwrap(), 4).unwrap(), Some(2));
    assert_eq!(nilpotence_order(&res, dict.get("x1").unwrap(), 3).unwrap(), None);
    let short = minimal_resolution(res.algebra(), 2);
    let err = yoneda_product(&short, &ExtElement::dual(&short, 2, 0), &ExtElement::dual(&short, 1, 0));
    assert!(matches!(err, Err(HomologyError::InsufficientLength { .. })));
}

#[test]
fn polynomial_generators_are_not_nilpotent() {
    let f = f3();
    let res = minimal_resolution(&alg(CatalogEntry::EmnMinus(1, 1), &f), 6);
    let dict = class_dictionary(&res).unwrap();
    let x = dict.get("x1").unwrap();
    let x2 = yoneda_product(&res, x, x).unwrap();
    let x3 = yoneda_product(&res, &x2, x).unwrap();
    assert!(!x3.is_zero());
}
