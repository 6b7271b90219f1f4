use std::f64::consts::PI;

use nuceft::costs::interaction_types;
use nuceft::models::constants::{F_PI, G_A, M_PI};
use nuceft::models::{convert_length, DynPiParams};
use nuceft::task::crossing_time;
use nuceft::trotter::{compose_total_error, Convention};
use nuceft::trunc::*;
use nuceft::models::ModelKind;
use nuceft::Error;
use proptest::prelude::*;

fn brute(r_sq: i64) -> u64 {
    let m = (r_sq as f64).sqrt() as i64 + 1;
    let mut n = 0;
    for i in -m..=m {
        for j in -m..=m {
            for k in -m..=m {
                if i * i + j * j + k * k == r_sq {
                    n += 1;
                }
            }
        }
    }
    n
}

#[test]
fn shells_match_enumeration() {
    for r in 0..=400 {
        assert_eq!(shell_count(r as u64), brute(r), "r^2 = {r}");
    }
    assert_eq!(shell_count(2), 12);
}

#[test]
fn cumulative_counts() {
    for k in 1..=20usize {
        let t = ShellTable::within(k);
        let direct: u64 = (0..=(k * k) as i64).map(brute).sum();
        assert_eq!(t.cumulative(), direct);
        assert!(t.cumulative() <= interaction_types(k));
        assert!(t.shells.iter().all(|s| s.1 % 2 == 0));
    }
    assert_eq!(ShellTable::within(1).shells, vec![(1, 6)]);
}

/// Second transcription of the cutoff-length error rate.
fn cutoff_reference(ell: f64, eta: f64, a: f64) -> f64 {
    let kk = (G_A / (2.0 * F_PI)).powi(2) / (12.0 * PI);
    let r = ell + a;
    let x = M_PI * r;
    let gg1 = kk * M_PI * M_PI * (-x).exp() / r;
    let gg2 = gg1 * (1.0 + 3.0 / x + 3.0 / (x * x));
    let b1 = eta * eta * (72.0 * gg1 + 648.0 * gg2);
    let b2 = 4.0 * PI * eta * r * gg1 * (720.0 * (x + 1.0) + 3888.0) / (M_PI * M_PI * a * a * a);
    b1.min(b2)
}

#[test]
fn cutoff_error_transcriptions_agree() {
    let a = convert_length(2.2);
    for k in 1..60 {
        for eta in [1.0, 2.0, 40.0, 400.0] {
            let (x, y) = (ope_cutoff_error(k as f64 * a, eta, a), cutoff_reference(k as f64 * a, eta, a));
            assert!((x - y).abs() <= 1e-12 * y.abs(), "k {k} eta {eta}");
        }
    }
    assert_eq!(ope_cutoff_error(5.0 * a, 0.0, a), 0.0);
}

#[test]
fn cutoff_error_decreases() {
    let a = convert_length(2.2);
    let v: Vec<f64> = (1..100).map(|k| ope_cutoff_error(k as f64 * a, 40.0, a)).collect();
    assert!(v.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn cutoff_search_grid() {
    let a = convert_length(2.2);
    let t = crossing_time(2.2, 10, 10.0).unwrap();
    let mut n = 0;
    for i in 0..10 {
        for eta in [2.0, 10.0, 20.0, 40.0, 80.0] {
            let eps = 10f64.powf(-1.0 - 0.5 * i as f64);
            let k = choose_ope_cutoff(eps, t, eta, a).unwrap();
            assert!(t * ope_cutoff_error(k as f64 * a, eta, a) <= eps);
            if k > 1 {
                assert!(t * ope_cutoff_error((k - 1) as f64 * a, eta, a) > eps);
            }
            assert!(choose_ope_cutoff(eps / 2.0, t, eta, a).unwrap() >= k);
            n += 1;
        }
    }
    assert_eq!(n, 50);
    assert_eq!(choose_ope_cutoff(1e300, t, 40.0, a).unwrap(), 1);
    assert!(matches!(choose_ope_cutoff(0.0, t, 40.0, a), Err(Error::Domain(_))));
}

fn crossing_inputs(conv: Convention) -> BosonCutoffInputs {
    let p = DynPiParams::standard(2.2);
    let led = compose_total_error(ModelKind::Dynpi, conv, 0.1).unwrap();
    BosonCutoffInputs {
        eta: 40.0,
        e: 140.0,
        eps_cut: led.eps_cut.unwrap(),
        a: convert_length(2.2),
        l: 10,
        c: p.c,
        c_i2: p.c_i2,
    }
}

#[test]
fn register_width_at_crossing_parameters() {
    for conv in [Convention::NearTerm, Convention::FaultTolerant] {
        let d = boson_cutoffs(&crossing_inputs(conv)).unwrap();
        assert!((31..=40).contains(&d.n_b), "{}", d.n_b);
    }
    let nt = boson_cutoffs(&crossing_inputs(Convention::NearTerm)).unwrap();
    assert!((31..=39).contains(&nt.n_b));
}

#[test]
fn register_identity_is_exact() {
    let a = convert_length(2.2);
    let d = boson_cutoffs(&crossing_inputs(Convention::NearTerm)).unwrap();
    assert!((d.register_bits(a) - d.n_b as f64).abs() < 1e-9);
    assert!(d.pi_max >= d.raw_pi_max && d.cap_pi_max >= d.raw_cap_pi_max * (1.0 - 1e-12));
    let levels = 2f64.powi(d.n_b as i32) - 1.0;
    assert!((d.delta_pi - 2.0 * d.pi_max / levels).abs() <= 1e-12 * d.delta_pi);
    assert!((d.cap_pi_max - PI / (a.powi(3) * d.delta_pi)).abs() <= 1e-9 * d.cap_pi_max);
}

#[test]
fn fewer_particles_fewer_bits() {
    let mut small = crossing_inputs(Convention::NearTerm);
    small.eta = 0.0;
    small.e = 1.0;
    let big = boson_cutoffs(&crossing_inputs(Convention::NearTerm)).unwrap();
    assert!(boson_cutoffs(&small).unwrap().n_b < big.n_b);
}

#[test]
fn cutoffs_scale_with_volume_over_error() {
    let base = crossing_inputs(Convention::NearTerm);
    let mut quarter = base;
    quarter.eps_cut *= 4.0;
    let (x, y) = (boson_cutoffs(&base).unwrap(), boson_cutoffs(&quarter).unwrap());
    let ratio = x.raw_pi_max / y.raw_pi_max;
    assert!((ratio - 2.0).abs() < 0.01, "{ratio}");
}

#[test]
fn spacing_guard() {
    let (ca, cb) = ab_coefficients(convert_length(1.4));
    assert!(ca < 0.0 && cb < 0.0);
    let (ca, cb) = ab_coefficients(convert_length(2.2));
    assert!(ca > 0.0 && cb > 0.0);
}

proptest! {
    #[test]
    fn budget_monotone(eta in 1.0f64..100.0, e in -6.0f64..0.0) {
        let a = convert_length(2.2);
        let eps = 10f64.powf(e);
        let k = choose_ope_cutoff(eps, 1.0, eta, a).unwrap();
        prop_assert!(choose_ope_cutoff(eps / 2.0, 1.0, eta, a).unwrap() >= k);
        prop_assert!(ope_cutoff_error(k as f64 * a, eta, a) <= eps);
    }

    #[test]
    fn shells_even_and_symmetric(r in 1u64..2000) {
        let q = shell_count(r);
        prop_assert_eq!(q % 2, 0);
    }
}
