use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superhopf::linalg::{Field, FieldElement};
use superhopf::witt::{additive_order, build_witt_table, WittVector};

fn random_vector(rng: &mut ChaCha8Rng, field: &superhopf::linalg::FieldRef, m: usize) -> WittVector {
    let entries = (0..m).map(|_| FieldElement(rng.gen_range(0..field.order()))).collect();
    WittVector::new(field, entries).unwrap()
}

#[test]
fn ghost_identities_through_index_three() {
    for p in [3, 5] {
        let t = build_witt_table(3, p);
        assert_eq!(t.verify_ghost_identities(), Ok(()), "p = {p}");
    }
    assert!(build_witt_table(3, 5).sum(3).max_coefficient_bits() > 64);
}

#[test]
fn operator_laws_on_w4_f9() {
    let f = Field::get(3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let u = random_vector(&mut rng, &f, 4);
        let x = random_vector(&mut rng, &f, 4);
        let pu = u.times(3);
        assert_eq!(u.verschiebung().frobenius(), pu);
        assert_eq!(u.frobenius().verschiebung(), pu);
        assert_eq!(x.sigma().mul(&u).unwrap().verschiebung(), x.mul(&u.verschiebung()).unwrap());
        assert_eq!(x.mul(&u).unwrap().frobenius(), x.sigma().mul(&u.frobenius()).unwrap());
    }
}

#[test]
fn ring_axioms_on_w3_f9() {
    let f = Field::get(3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let a = random_vector(&mut rng, &f, 3);
        let b = random_vector(&mut rng, &f, 3);
        let c = random_vector(&mut rng, &f, 3);
        assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        assert_eq!(a.add(&a.neg()).unwrap(), WittVector::zero(&f, 3));
    }
}

#[test]
fn prime_field_witt_groups_are_cyclic() {
    let f = Field::get(3, 1).unwrap();
    for m in 1..=2 {
        let all = WittVector::all(&f, m);
        let order = 3u64.pow(m as u32);
        assert_eq!(all.len() as u64, order);
        assert!(all.iter().any(|u| additive_order(u) == order));
    }
}

#[test]
fn multiples_of_one_match_integers_mod_27() {
    let f = Field::get(3, 1).unwrap();
    let one = WittVector::one(&f, 3);
    let mut seen = std::collections::HashSet::new();
    for k in 0..27 {
        assert!(seen.insert(one.times(k).codes()));
    }
    assert_eq!(one.times(27), WittVector::zero(&f, 3));
}
