//! Self-check suites run by `nuceft verify`. Each check reports a single
//! pass/fail line; all randomness is seeded.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::encodings::{
    encode_fermion_sum, encode_hopping, encode_ladder, encode_number, max_hopping_weights, vc_stabilizers,
    Encoding, LadderKind, QubitLayout,
};
use crate::error::{Error, Result};
use crate::fock::{eta_seminorm, exact_evolution_error, fermion_commutator, Factor, FermionSum, MODE_CAP};
use crate::lattice::{LatticeSpec, Species};
use crate::models::{build_ope, build_pionless, split_layers, OpeParams, PionlessParams};
use crate::pauli::{partition_commuting_layers, Pauli, PauliString, PauliSum, DENSE_CAP};
use crate::trotter::{pionless_p1_report, pionless_p2_report};

pub const SEMINORM_CASES: usize = 200;
pub const COMMUTATOR_CASES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pauli,
    Encodings,
    Seminorm,
    Trotter,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        match s {
            "pauli" => Some(Suite::Pauli),
            "encodings" => Some(Suite::Encodings),
            "seminorm" => Some(Suite::Seminorm),
            "trotter" => Some(Suite::Trotter),
            "all" => Some(Suite::All),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { suite, name: name.into(), passed, detail: detail.into() }
    }

    fn from_result(suite: &'static str, name: &str, r: Result<String>) -> Self {
        match r {
            Ok(d) => Check::new(suite, name, true, d),
            Err(e) => Check::new(suite, name, false, e.to_string()),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}::{} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.detail
        )
    }
}

pub fn run(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Pauli => pauli_suite(),
        Suite::Encodings => encodings_suite(),
        Suite::Seminorm => seminorm_suite(),
        Suite::Trotter => trotter_suite(),
        Suite::All => {
            let mut v = pauli_suite();
            v.extend(encodings_suite());
            v.extend(seminorm_suite());
            v.extend(trotter_suite());
            v
        }
    }
}

fn c1() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn fail(msg: String) -> Error {
    Error::Contract(msg)
}

fn random_string(rng: &mut ChaCha8Rng, n: usize) -> PauliString {
    let ops: Vec<(usize, Pauli)> = (0..n)
        .map(|q| (q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]))
        .collect();
    PauliString::from_ops(n, &ops)
}

// ---------------------------------------------------------------- pauli

fn pauli_suite() -> Vec<Check> {
    const S: &str = "pauli";
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 4;
    let mut product = Ok(0usize);
    let mut commute = Ok(0usize);
    for _ in 0..200 {
        let (a, b) = (random_string(&mut rng, n), random_string(&mut rng, n));
        let da = PauliSum::from_string(c1(), a.clone()).dense_matrix(DENSE_CAP).unwrap();
        let db = PauliSum::from_string(c1(), b.clone()).dense_matrix(DENSE_CAP).unwrap();
        let ab = PauliSum::from_string(c1(), a.multiply(&b).unwrap()).dense_matrix(DENSE_CAP).unwrap();
        let dense_ab = &da * &db;
        if max_diff(&ab, &dense_ab) > 1e-12 {
            product = Err(fail(format!("{a} * {b} disagrees with the dense product")));
        } else if let Ok(k) = &mut product {
            *k += 1;
        }
        let dense_comm = max_diff(&dense_ab, &(&db * &da)) < 1e-12;
        if a.commutes_with(&b) != dense_comm {
            commute = Err(fail(format!("commutation of {a} and {b} disagrees with dense")));
        } else if let Ok(k) = &mut commute {
            *k += 1;
        }
    }
    let mut out = vec![
        Check::from_result(S, "products_match_dense", product.map(|k| format!("{k} pairs"))),
        Check::from_result(S, "commutation_matches_dense", commute.map(|k| format!("{k} pairs"))),
    ];

    // layers must have pairwise disjoint support
    let terms: Vec<PauliSum> = (0..80)
        .map(|_| {
            let mut s = random_string(&mut rng, 12);
            // thin out so layers are not all singletons
            for q in 0..12 {
                if rng.gen_bool(0.7) {
                    s = s.multiply(&PauliString::single(12, q, s.get(q))).unwrap().with_phase(0);
                }
            }
            PauliSum::from_string(c1(), s)
        })
        .collect();
    let layers = partition_commuting_layers(&terms);
    let mut disjoint = true;
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            if layers[i] == layers[j] {
                let (mi, mj) = (terms[i].support_mask(), terms[j].support_mask());
                if mi.iter().zip(&mj).any(|(a, b)| a & b != 0) {
                    disjoint = false;
                }
            }
        }
    }
    let n_layers = layers.iter().max().map_or(0, |m| m + 1);
    out.push(Check::new(S, "layers_disjoint", disjoint, format!("{} terms in {n_layers} layers", terms.len())));
    out
}

// ------------------------------------------------------------ encodings

fn car_check(enc: Encoding) -> Result<String> {
    let l = LatticeSpec::new(2, 2, 1, 1.4)?;
    let lay = QubitLayout::new(enc, l);
    let n = lay.total_qubits;
    let mut ann = Vec::new();
    let mut cre = Vec::new();
    for s in l.sites() {
        for sp in Species::ALL {
            ann.push(encode_ladder(&lay, s, sp, LadderKind::Annihilate)?);
            cre.push(encode_ladder(&lay, s, sp, LadderKind::Create)?);
        }
    }
    let id = PauliSum::identity(n, 1.0);
    let zero = PauliSum::zero(n);
    let mut pairs = 0;
    for p in 0..ann.len() {
        for q in 0..ann.len() {
            let aa = ann[p].anticommutator(&ann[q])?;
            let ac = ann[p].anticommutator(&cre[q])?;
            let want = if p == q { &id } else { &zero };
            if !aa.approx_eq(&zero, 1e-12) || !ac.approx_eq(want, 1e-12) {
                return Err(fail(format!("CAR fails for modes {p}, {q}")));
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} mode pairs on {n} qubits"))
}

fn stabilizer_check() -> Result<String> {
    let l = LatticeSpec::new(2, 2, 2, 1.4)?;
    let lay = QubitLayout::new(Encoding::VerstraeteCirac, l);
    let stabs: Vec<PauliSum> = vc_stabilizers(&lay)?
        .into_iter()
        .map(|s| PauliSum::from_string(c1(), s))
        .collect();
    let mut terms = Vec::new();
    for b in l.bonds() {
        for sp in Species::ALL {
            terms.push(encode_hopping(&lay, b.a, b.b, sp)?);
        }
    }
    for s in l.sites() {
        for sp in Species::ALL {
            terms.push(encode_number(&lay, s, sp)?);
        }
    }
    let p = PionlessParams::tabulated(1.4)?;
    terms.push(encode_fermion_sum(&lay, &build_pionless(&l, &p))?);
    for t in &terms {
        for s in &stabs {
            if !t.commutes_with(s) {
                return Err(fail("encoded term fails to commute with a stabilizer".into()));
            }
        }
    }
    Ok(format!("{} stabilizers x {} terms", stabs.len(), terms.len()))
}

fn weight_check() -> Result<String> {
    let l = LatticeSpec::cubic(3, 1.4)?;
    let vc = max_hopping_weights(&QubitLayout::new(Encoding::VerstraeteCirac, l))?;
    let cp = max_hopping_weights(&QubitLayout::new(Encoding::Compact, l))?;
    if vc != [7, 10, 12] {
        return Err(fail(format!("vc weights {vc:?}")));
    }
    if cp.iter().any(|&w| w > 4) {
        return Err(fail(format!("compact weights {cp:?}")));
    }
    Ok(format!("vc {vc:?}, compact {cp:?}"))
}

fn jw_vs_fock(h: &FermionSum, l: LatticeSpec) -> Result<String> {
    let lay = QubitLayout::new(Encoding::JordanWigner, l);
    let q = encode_fermion_sum(&lay, h)?.dense_matrix(DENSE_CAP)?;
    let f = h.fock_matrix(MODE_CAP)?;
    let d = max_diff(&q, &f);
    if d > 1e-9 {
        return Err(fail(format!("max entry difference {d:.3e}")));
    }
    Ok(format!("{} terms, max diff {d:.1e}", h.len()))
}

fn encodings_suite() -> Vec<Check> {
    const S: &str = "encodings";
    let l2 = LatticeSpec::new(2, 1, 1, 1.4).unwrap();
    let pionless = PionlessParams::tabulated(1.4).map(|p| build_pionless(&l2, &p));
    let ope = build_ope(&LatticeSpec::new(2, 1, 1, 2.2).unwrap(), &OpeParams::standard(2.2, 1));
    vec![
        Check::from_result(S, "car_jw", car_check(Encoding::JordanWigner)),
        Check::from_result(S, "car_vc", car_check(Encoding::VerstraeteCirac)),
        Check::from_result(S, "vc_stabilizers_commute", stabilizer_check()),
        Check::from_result(S, "hop_weights", weight_check()),
        Check::from_result(S, "jw_dense_pionless", pionless.and_then(|h| jw_vs_fock(&h, l2))),
        Check::from_result(S, "jw_dense_ope", jw_vs_fock(&ope, l2)),
    ]
}

// ------------------------------------------------------------- seminorm

/// One canonical NPFO with the given mode sets.
fn npfo(n: usize, w: Complex64, create: &[u32], ann: &[u32], num: &[u32]) -> FermionSum {
    let mut f: Vec<Factor> = create.iter().map(|&m| Factor::create(m)).collect();
    f.extend(ann.iter().map(|&m| Factor::annihilate(m)));
    f.extend(num.iter().map(|&m| Factor::number(m)));
    let mut s = FermionSum::zero(n);
    s.add_product(w, &f);
    s
}

/// Random NPFO over `modes`: `c` creations, `c` annihilations, the rest
/// number factors.
fn random_npfo(rng: &mut ChaCha8Rng, n: usize, modes: &[u32], w: Complex64) -> FermionSum {
    let k = modes.len();
    let c = rng.gen_range(0..=k / 2);
    npfo(n, w, &modes[..c], &modes[c..2 * c], &modes[2 * c..])
}

/// Disjoint Hermitian NPFO sums against `J_max·min{⌈η/⌈k_min/2⌉⌉, |Ω|}`.
fn seminorm_bound_check(cases: usize) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let n = rng.gen_range(4..=12usize);
        let mut modes: Vec<u32> = (0..n as u32).collect();
        modes.shuffle(&mut rng);
        let mut h = FermionSum::zero(n);
        let (mut at, mut omega, mut kmin, mut jmax) = (0, 0usize, usize::MAX, 0.0f64);
        while at < n {
            let k = rng.gen_range(1..=4usize).min(n - at);
            if rng.gen_bool(0.2) && omega > 0 {
                break;
            }
            let j = rng.gen_range(0.1..1.0);
            let t = random_npfo(&mut rng, n, &modes[at..at + k], Complex64::new(j, 0.0));
            let herm = if t.is_hermitian(1e-12) { t } else { t.add(&t.adjoint()) };
            h = h.add(&herm);
            at += k;
            omega += 1;
            kmin = kmin.min(k);
            jmax = jmax.max(j);
        }
        let eta = rng.gen_range(0..=n);
        let norm = eta_seminorm(&h, eta, MODE_CAP)?;
        let groups = (eta as f64 / kmin.div_ceil(2) as f64).ceil().min(omega as f64);
        let bound = jmax * groups;
        if norm > bound + 1e-9 {
            return Err(fail(format!(
                "case {case}: |H|_eta = {norm:.6} exceeds {bound:.6} (n {n}, eta {eta}, |Omega| {omega}, k_min {kmin})"
            )));
        }
        if bound > 0.0 {
            worst = worst.max(norm / bound);
        }
    }
    Ok(format!("{cases} cases, max norm/bound {worst:.3}"))
}

/// `[A, B]` of two NPFOs has at most `2^{1+min(k_A,k_B)/2}` terms, each of
/// locality below `k_A + k_B`, and agrees with the dense commutator.
fn commutator_count_check(cases: usize) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut worst = 0usize;
    for case in 0..cases {
        let n = rng.gen_range(3..=8usize);
        let pick = |rng: &mut ChaCha8Rng| {
            let mut m: Vec<u32> = (0..n as u32).collect();
            m.shuffle(rng);
            let k = rng.gen_range(1..=n.min(6));
            let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (random_npfo(rng, n, &m[..k], w), k)
        };
        let (a, ka) = pick(&mut rng);
        let (b, kb) = pick(&mut rng);
        let c = fermion_commutator(&a, &b);
        let cap = 2f64.powf(1.0 + ka.min(kb) as f64 / 2.0);
        if c.len() as f64 > cap {
            return Err(fail(format!("case {case}: {} terms, bound {cap}", c.len())));
        }
        if !c.is_empty() && c.max_locality() > ka + kb - 1 {
            return Err(fail(format!("case {case}: locality {} from {ka} and {kb}", c.max_locality())));
        }
        let (da, db) = (a.fock_matrix(MODE_CAP)?, b.fock_matrix(MODE_CAP)?);
        let d = max_diff(&c.fock_matrix(MODE_CAP)?, &(&da * &db - &db * &da));
        if d > 1e-9 {
            return Err(fail(format!("case {case}: dense commutator differs by {d:.3e}")));
        }
        worst = worst.max(c.len());
    }
    Ok(format!("{cases} pairs, most terms {worst}"))
}

fn seminorm_suite() -> Vec<Check> {
    const S: &str = "seminorm";
    vec![
        Check::from_result(S, "disjoint_npfo_norm_bound", seminorm_bound_check(SEMINORM_CASES)),
        Check::from_result(S, "npfo_commutator_count", commutator_count_check(COMMUTATOR_CASES)),
    ]
}

// -------------------------------------------------------------- trotter

pub const TROTTER_TIMES: [f64; 3] = [0.01, 0.05, 0.1];
pub const TROTTER_ETAS: [usize; 3] = [1, 2, 3];
pub const TROTTER_STEPS: [u64; 3] = [1, 2, 4];

/// Exact product-formula error on the two-site pionless instance against
/// `r · bound(t/r)`, over the whole grid. Returns (cases, violations, worst ratio).
pub fn oracle_dominance(a_fm: f64) -> Result<(usize, Vec<String>, f64)> {
    let l = LatticeSpec::new(2, 1, 1, a_fm)?;
    let p = PionlessParams::tabulated(a_fm)?;
    let layers = split_layers(&l, &build_pionless(&l, &p));
    let mut cases = 0;
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for order in [1u32, 2] {
        for &eta in &TROTTER_ETAS {
            let report = if order == 1 {
                pionless_p1_report(eta as f64, &p)
            } else {
                pionless_p2_report(eta as f64, &p)
            };
            for &t in &TROTTER_TIMES {
                for &r in &TROTTER_STEPS {
                    let exact = exact_evolution_error(&layers, t, order, r, eta, MODE_CAP)?;
                    let bound = r as f64 * report.bound(t / r as f64);
                    cases += 1;
                    worst = worst.max(exact / bound);
                    if exact > bound {
                        bad.push(format!("p={order} eta={eta} t={t} r={r}: {exact:.4e} > {bound:.4e}"));
                    }
                }
            }
        }
    }
    Ok((cases, bad, worst))
}

fn trotter_suite() -> Vec<Check> {
    const S: &str = "trotter";
    let mut out = Vec::new();
    for a in [1.4, 2.2] {
        let r = oracle_dominance(a).and_then(|(n, bad, worst)| {
            if bad.is_empty() {
                Ok(format!("{n} cases, max exact/bound {worst:.3e}"))
            } else {
                Err(fail(format!("{} of {n} violate: {}", bad.len(), bad.join("; "))))
            }
        });
        out.push(Check::from_result(S, &format!("oracle_dominance_a{a}"), r));
    }
    let conv = (|| -> Result<String> {
        let l = LatticeSpec::new(2, 1, 1, 1.4)?;
        let layers = split_layers(&l, &build_pionless(&l, &PionlessParams::tabulated(1.4)?));
        let e: Vec<f64> = [1u64, 2, 4]
            .iter()
            .map(|&r| exact_evolution_error(&layers, 0.05, 1, r, 2, MODE_CAP))
            .collect::<Result<_>>()?;
        if e[0] > e[1] && e[1] > e[2] {
            Ok(format!("errors {:.3e} > {:.3e} > {:.3e}", e[0], e[1], e[2]))
        } else {
            Err(fail(format!("not decreasing: {e:?}")))
        }
    })();
    out.push(Check::from_result(S, "refinement_converges", conv));
    out
}
