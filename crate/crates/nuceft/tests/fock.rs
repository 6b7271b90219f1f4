use nuceft::fock::*;
use nuceft::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn w(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn hop(n: usize, i: u32, j: u32, x: f64) -> FermionSum {
    let mut s = FermionSum::zero(n);
    s.add_product(w(x), &[Factor::create(i), Factor::annihilate(j)]);
    s.add_product(w(x), &[Factor::create(j), Factor::annihilate(i)]);
    s
}

fn close(a: &nalgebra::DMatrix<Complex64>, b: &nalgebra::DMatrix<Complex64>) -> bool {
    (a - b).iter().all(|z| z.norm() < 1e-10)
}

#[test]
fn four_factor_product_matches_dense() {
    let f = [Factor::annihilate(0), Factor::create(1), Factor::annihilate(1), Factor::create(0)];
    let s = normal_order(2, &f);
    let mut want = nalgebra::DMatrix::identity(4, 4);
    for k in f {
        let mut one = FermionSum::zero(2);
        one.add_product(w(1.0), &[k]);
        want *= one.fock_matrix(MODE_CAP).unwrap();
    }
    assert!(close(&s.fock_matrix(MODE_CAP).unwrap(), &want));
}

#[test]
fn hop_commutes_with_disjoint_hop() {
    assert!(fermion_commutator(&hop(4, 0, 1, 1.0), &hop(4, 2, 3, 1.0)).is_empty());
}

#[test]
fn hop_number_commutator() {
    let mut n0 = FermionSum::zero(2);
    n0.add_product(w(1.0), &[Factor::number(0)]);
    let c = fermion_commutator(&hop(2, 0, 1, 1.0), &n0);
    // [a0† a1 + a1† a0, n0] = a1† a0 - a0† a1
    let mut want = FermionSum::zero(2);
    want.add_product(w(1.0), &[Factor::create(1), Factor::annihilate(0)]);
    want.add_product(w(-1.0), &[Factor::create(0), Factor::annihilate(1)]);
    assert_eq!(c, want);
}

#[test]
fn seminorm_examples() {
    assert!((eta_seminorm(&hop(4, 0, 1, 1.0), 1, MODE_CAP).unwrap() - 1.0).abs() < 1e-12);
    let mut nn = FermionSum::zero(3);
    nn.add_product(w(2.0), &[Factor::number(0), Factor::number(2)]);
    assert_eq!(eta_seminorm(&nn, 0, MODE_CAP).unwrap(), 0.0);
    // three disjoint bonds, two particles
    let h = hop(6, 0, 1, 1.0).add(&hop(6, 2, 3, 1.0)).add(&hop(6, 4, 5, 1.0));
    assert!((eta_seminorm(&h, 2, MODE_CAP).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn mode_cap_enforced() {
    let h = FermionSum::zero(17);
    assert!(matches!(eta_seminorm(&h, 1, MODE_CAP), Err(Error::Size { .. })));
    assert!(matches!(h.fock_matrix(MODE_CAP), Err(Error::Size { .. })));
}

#[test]
fn single_layer_is_exact() {
    let h = hop(4, 0, 1, 3.0).add(&hop(4, 1, 2, 0.7));
    let e = exact_evolution_error(&[h], 0.8, 1, 1, 2, MODE_CAP).unwrap();
    assert!(e < 1e-10);
}

#[test]
fn refinement_reduces_error() {
    let layers = [hop(4, 0, 1, 1.0), hop(4, 1, 2, 1.0), hop(4, 2, 3, 1.0)];
    let e: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|&r| exact_evolution_error(&layers, 1.0, 1, r, 2, MODE_CAP).unwrap())
        .collect();
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
    let e2 = exact_evolution_error(&layers, 1.0, 2, 4, 2, MODE_CAP).unwrap();
    assert!(e2 < e[2]);
}

#[test]
fn non_hermitian_layer_rejected() {
    let mut a = FermionSum::zero(2);
    a.add_product(w(1.0), &[Factor::create(0), Factor::annihilate(1)]);
    let r = exact_evolution_error(&[a, hop(2, 0, 1, 1.0)], 0.1, 1, 1, 1, MODE_CAP);
    assert!(matches!(r, Err(Error::Contract(_))));
}

#[test]
fn total_number_commutes_with_hops() {
    let n = FermionSum::total_number(5);
    let h = hop(5, 0, 3, 1.0).add(&hop(5, 1, 4, -2.0));
    assert!(fermion_commutator(&n, &h).is_empty());
}

/// Random NPFO on `n` modes with distinct create/annihilate/number sets.
fn arb_npfo(n: usize) -> impl Strategy<Value = FermionSum> {
    (Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle(), 1..=n, -1.0f64..1.0, -1.0f64..1.0).prop_flat_map(
        move |(modes, k, re, im)| {
            (0..=k / 2).prop_map(move |c| {
                let mut f: Vec<Factor> = modes[..c].iter().map(|&m| Factor::create(m)).collect();
                f.extend(modes[c..2 * c].iter().map(|&m| Factor::annihilate(m)));
                f.extend(modes[2 * c..k].iter().map(|&m| Factor::number(m)));
                let mut s = FermionSum::zero(n);
                s.add_product(Complex64::new(re, im), &f);
                s
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_matches_dense(a in arb_npfo(6), b in arb_npfo(6)) {
        let (da, db) = (a.fock_matrix(MODE_CAP).unwrap(), b.fock_matrix(MODE_CAP).unwrap());
        let c = fermion_commutator(&a, &b).fock_matrix(MODE_CAP).unwrap();
        prop_assert!(close(&c, &(&da * &db - &db * &da)));
    }

    #[test]
    fn commutator_term_count(a in arb_npfo(7), b in arb_npfo(7)) {
        let ka = a.max_locality();
        let kb = b.max_locality();
        let c = fermion_commutator(&a, &b);
        prop_assert!(c.len() as f64 <= 2f64.powf(1.0 + ka.min(kb) as f64 / 2.0));
    }

    #[test]
    fn product_matches_dense(a in arb_npfo(5), b in arb_npfo(5)) {
        let d = a.fock_matrix(MODE_CAP).unwrap() * b.fock_matrix(MODE_CAP).unwrap();
        prop_assert!(close(&a.mul(&b).fock_matrix(MODE_CAP).unwrap(), &d));
    }

    #[test]
    fn adjoint_matches_dense(a in arb_npfo(5)) {
        let d = a.fock_matrix(MODE_CAP).unwrap().adjoint();
        prop_assert!(close(&a.adjoint().fock_matrix(MODE_CAP).unwrap(), &d));
    }

    #[test]
    fn seminorm_bounded_by_full_norm(a in arb_npfo(6), eta in 0usize..=6) {
        let h = a.add(&a.adjoint());
        let full = spectral_norm(&h.fock_matrix(MODE_CAP).unwrap());
        prop_assert!(eta_seminorm(&h, eta, MODE_CAP).unwrap() <= full + 1e-10);
    }

    #[test]
    fn sector_dimension_is_binomial(n in 1usize..=12, eta in 0usize..=12) {
        prop_assume!(eta <= n);
        let s = EtaSector::new(n, eta, MODE_CAP).unwrap();
        let binom = (0..eta).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        prop_assert_eq!(s.dim(), binom);
    }
}
