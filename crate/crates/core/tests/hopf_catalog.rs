use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superhopf::linalg::{Field, FieldElement, FieldMatrix, FieldRef};
use superhopf::superalg::{
    catalog, fold, ground_algebra, hopf_check, inclusion_w_minus, quotient_emn, quotient_to_mu, tensor, z_lift_emn,
    CatalogEntry, Element, SuperAlgebra,
};

fn entries(field: &FieldRef) -> Vec<CatalogEntry> {
    let mut out = vec![CatalogEntry::GaMinus, CatalogEntry::GaR(1), CatalogEntry::GaR(2)];
    for m in 1..=2 {
        out.push(CatalogEntry::Wm1(m));
        out.push(CatalogEntry::Wm1Minus(m));
        for n in 1..=2 {
            out.push(CatalogEntry::EmnMinus(m, n));
            out.push(CatalogEntry::Emn(m, n));
            for mu in field.nonzero_elements() {
                out.push(CatalogEntry::EmnMuMinus(m, n, mu));
            }
        }
    }
    out
}

#[test]
fn hopf_axioms_over_f3() {
    let f = Field::get(3, 1).unwrap();
    for e in entries(&f) {
        let a = catalog(&e, &f).unwrap();
        let r = hopf_check(&a);
        assert!(r.ok, "{e}: {:?}", r.failure);
    }
}

#[test]
fn hopf_axioms_for_twisted_entries_over_f9() {
    let f = Field::get(3, 2).unwrap();
    for mu in f.nonzero_elements() {
        for (m, n) in [(1, 1), (1, 2), (2, 1)] {
            let a = catalog(&CatalogEntry::EmnMuMinus(m, n, mu), &f).unwrap();
            let r = hopf_check(&a);
            assert!(r.ok, "E-({m},{n},{mu:?}): {:?}", r.failure);
        }
    }
}

#[test]
fn catalog_dimensions() {
    let f = Field::get(3, 1).unwrap();
    for m in 1..=2usize {
        assert_eq!(catalog(&CatalogEntry::Wm1Minus(m), &f).unwrap().dim(), 2 * 3usize.pow(m as u32));
        for n in 1..=2usize {
            let d = 3usize.pow((m + n - 1) as u32);
            assert_eq!(catalog(&CatalogEntry::EmnMinus(m, n), &f).unwrap().dim(), 2 * d);
            assert_eq!(catalog(&CatalogEntry::EmnMuMinus(m, n, f.one()), &f).unwrap().dim(), 6 * d);
        }
    }
}

#[test]
fn e1n_splits_as_a_product() {
    let f = Field::get(3, 1).unwrap();
    for n in 1..=2 {
        let e = catalog(&CatalogEntry::EmnMinus(1, n), &f).unwrap();
        let t = tensor(&catalog(&CatalogEntry::GaR(n), &f).unwrap(), &catalog(&CatalogEntry::GaMinus, &f).unwrap()).unwrap();
        assert_eq!(t.dim(), 6 * 3usize.pow(n as u32 - 1));
        assert_eq!(e.structural_diff(&t), None);
    }
}

#[test]
fn tensor_with_ground_field_is_identity() {
    let f = Field::get(3, 1).unwrap();
    let a = catalog(&CatalogEntry::EmnMinus(2, 1), &f).unwrap();
    let t = tensor(&a, &ground_algebra(&f)).unwrap();
    assert_eq!(a.structural_diff(&t), None);
    let b = catalog(&CatalogEntry::ZpPower(2), &f).unwrap();
    assert_eq!(tensor(&a, &b).unwrap().dim(), a.dim() * b.dim());
}

fn random_element(rng: &mut ChaCha8Rng, a: &SuperAlgebra) -> Element {
    (0..a.dim()).map(|_| FieldElement(rng.gen_range(0..a.field().order()))).collect()
}

#[test]
fn multiplication_is_associative_and_commutative() {
    let f = Field::get(3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for e in [CatalogEntry::EmnMinus(2, 1), CatalogEntry::EmnMuMinus(1, 1, f.primitive_element()), CatalogEntry::Wm1Minus(1)] {
        let a = catalog(&e, &f).unwrap();
        for _ in 0..20 {
            let (x, y, z) = (random_element(&mut rng, &a), random_element(&mut rng, &a), random_element(&mut rng, &a));
            assert_eq!(a.mul(&a.mul(&x, &y), &z), a.mul(&x, &a.mul(&y, &z)));
            assert_eq!(a.mul(&x, &y), a.mul(&y, &x));
        }
    }
}

#[test]
fn catalog_algebras_are_local() {
    let f = Field::get(3, 1).unwrap();
    for e in entries(&f) {
        let a = catalog(&e, &f).unwrap();
        let gens: Vec<FieldMatrix> = (0..a.generators().len()).map(|g| a.left_mult_matrix(&a.generator(g))).collect();
        // Every generator acts nilpotently, so the augmentation ideal is the radical.
        for m in &gens {
            assert!(m.pow(a.dim() as u64).is_zero(), "{e}");
        }
    }
}

#[test]
fn catalog_morphisms() {
    let f = Field::get(3, 1).unwrap();
    for mu in f.nonzero_elements() {
        let q = quotient_to_mu(1, 1, mu, &f).unwrap();
        assert!(q.is_surjective());
        assert_eq!(q.preserves_coproduct(), Ok(()));
    }
    let q = quotient_emn(2, 2, &f).unwrap();
    assert_eq!(q.preserves_coproduct(), Ok(()));
    let inc = inclusion_w_minus(2, &f).unwrap();
    assert_eq!(inc.preserves_coproduct(), Ok(()));
    assert!(inc.is_injective());
}

#[test]
fn folding_recovers_the_catalog() {
    let f = Field::get(3, 1).unwrap();
    for m in 1..=2 {
        for n in 1..=2 {
            for a in [1, 3] {
                let lifted = z_lift_emn(m, n, a, &f).unwrap();
                let folded = fold(&lifted, "folded").unwrap();
                let expected = catalog(&CatalogEntry::EmnMinus(m, n), &f).unwrap();
                assert_eq!(folded.structural_diff(&expected), None);
            }
        }
    }
    let even = catalog(&CatalogEntry::Emn(1, 1), &f).unwrap();
    assert!(fold(&even, "x").is_err());
    let _ = Arc::new(even);
}
