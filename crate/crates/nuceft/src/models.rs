//! Lattice EFT Hamiltonians (pionless, one-pion exchange, dynamical pions),
//! physical constants and unit conversion.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Factor, FermionSum};
use crate::lattice::{LatticeSpec, Site, Species};
use crate::trunc::{ab_coefficients, boson_cutoffs, BosonCutoffInputs, DigitizationSpec};

pub mod constants {
    /// Nucleon mass, MeV.
    pub const M: f64 = 938.0;
    /// Pion mass, MeV.
    pub const M_PI: f64 = 135.0;
    pub const G_A: f64 = 1.26;
    /// Pion decay constant, MeV.
    pub const F_PI: f64 = 93.0;
    /// MeV·fm.
    pub const HBAR_C: f64 = 197.326_980_4;

    /// OPE contact constants in MeV⁻², quoted for a spacing of (100 MeV)⁻¹.
    pub const C_TILDE_I1: f64 = -5.021e-5;
    pub const C_TILDE_I0: f64 = -5.714e-5;
    pub const C_TILDE_SPACING: f64 = 1.0 / 100.0;
}

use constants::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Pionless,
    Ope,
    Dynpi,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Pionless => "pionless",
            ModelKind::Ope => "ope",
            ModelKind::Dynpi => "dynpi",
        })
    }
}

/// fm → MeV⁻¹.
pub fn convert_length(a_fm: f64) -> f64 {
    a_fm / HBAR_C
}

/// Hopping amplitude `1/(2 M a²)` in MeV for a spacing in fm.
pub fn hopping_h(a_fm: f64) -> f64 {
    let a = convert_length(a_fm);
    1.0 / (2.0 * M * a * a)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PionlessParams {
    pub a_fm: f64,
    pub h: f64,
    pub c: f64,
    pub d: f64,
}

impl PionlessParams {
    /// Fitted couplings at the two tabulated spacings.
    pub fn tabulated(a_fm: f64) -> Result<Self> {
        let row = |h, c, d| PionlessParams { a_fm, h, c, d };
        if (a_fm - 1.4).abs() < 1e-9 {
            Ok(row(10.58, -98.23, 127.84))
        } else if (a_fm - 2.2).abs() < 1e-9 {
            Ok(row(4.29, -40.19, 42.51))
        } else {
            Err(Error::Domain(format!(
                "no fitted pionless couplings for a = {a_fm} fm (available: 1.4, 2.2)"
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OpeParams {
    pub a_fm: f64,
    pub h: f64,
    pub c: f64,
    pub c_i2: f64,
    /// Interaction range in lattice spacings.
    pub ell: usize,
}

/// `(C, C_I²)` from the isospin-channel constants at the quoted spacing.
pub fn ope_couplings() -> (f64, f64) {
    let a3 = C_TILDE_SPACING.powi(3);
    (
        (3.0 * C_TILDE_I1 + C_TILDE_I0) / (4.0 * a3),
        (C_TILDE_I1 - C_TILDE_I0) / (4.0 * a3),
    )
}

impl OpeParams {
    /// Couplings evaluated at (100 MeV)⁻¹ regardless of `a_fm`; the hopping
    /// amplitude uses the actual spacing.
    pub fn standard(a_fm: f64, ell: usize) -> Self {
        let (c, c_i2) = ope_couplings();
        OpeParams { a_fm, h: hopping_h(a_fm), c, c_i2, ell }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DynPiParams {
    pub a_fm: f64,
    pub h: f64,
    pub c: f64,
    pub c_i2: f64,
}

impl DynPiParams {
    pub fn standard(a_fm: f64) -> Self {
        let (c, c_i2) = ope_couplings();
        DynPiParams { a_fm, h: hopping_h(a_fm), c, c_i2 }
    }
}

type Mat2 = [[Complex64; 2]; 2];

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// σ₁, σ₂, σ₃ (also used for τ).
pub fn pauli_matrices() -> [Mat2; 3] {
    let (o, l, i) = (cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 1.0));
    [[[o, l], [l, o]], [[o, -i], [i, o]], [[l, o], [o, -l]]]
}

fn mode(l: &LatticeSpec, s: Site, spin: usize, iso: usize) -> u32 {
    l.mode(s, Species::from_spin_isospin(spin, iso))
}

/// `-h Σ hop + 6h Σ N`.
pub fn build_free(l: &LatticeSpec, h: f64) -> FermionSum {
    let mut out = FermionSum::zero(l.n_modes());
    for b in l.bonds() {
        for sp in Species::ALL {
            let (p, q) = (l.mode(b.a, sp), l.mode(b.b, sp));
            out.add_product(cx(-h, 0.0), &[Factor::create(p), Factor::annihilate(q)]);
            out.add_product(cx(-h, 0.0), &[Factor::create(q), Factor::annihilate(p)]);
        }
    }
    for s in l.sites() {
        for sp in Species::ALL {
            out.add_product(cx(6.0 * h, 0.0), &[Factor::number(l.mode(s, sp))]);
        }
    }
    out
}

/// `C Σ_{σ<σ'} N N'` on every site.
fn add_pair_contact(out: &mut FermionSum, l: &LatticeSpec, c: f64) {
    for s in l.sites() {
        for i in 0..4 {
            for j in i + 1..4 {
                let (p, q) = (l.mode(s, Species::from_index(i)), l.mode(s, Species::from_index(j)));
                out.add_product(cx(c, 0.0), &[Factor::number(p), Factor::number(q)]);
            }
        }
    }
}

pub fn build_pionless(l: &LatticeSpec, p: &PionlessParams) -> FermionSum {
    let mut out = build_free(l, p.h);
    // C/2 over ordered pairs is C per unordered pair; D/6 over ordered
    // triples is D per unordered triple.
    add_pair_contact(&mut out, l, p.c);
    for s in l.sites() {
        for skip in 0..4 {
            let f: Vec<Factor> = (0..4)
                .filter(|&k| k != skip)
                .map(|k| Factor::number(l.mode(s, Species::from_index(k))))
                .collect();
            out.add_product(cx(p.d, 0.0), &f);
        }
    }
    out
}

/// Split a Hamiltonian into the six kinetic parity layers, then everything
/// diagonal, then any remaining off-diagonal terms. Empty layers are dropped.
pub fn split_layers(l: &LatticeSpec, h: &FermionSum) -> Vec<FermionSum> {
    let mut layers: Vec<FermionSum> = (0..8).map(|_| FermionSum::zero(h.n_modes())).collect();
    for t in h.terms() {
        let slot = if t.create.is_empty() {
            6
        } else if t.create.len() == 1 && t.number.is_empty() {
            let site = |m: u32| l.site_of(m as usize / 4);
            match l.bond_between(site(t.create[0]), site(t.annihilate[0])) {
                Ok(b) => b.kinetic_layer(),
                Err(_) => 7,
            }
        } else {
            7
        };
        layers[slot].add_term(&t);
    }
    layers.retain(|x| !x.is_empty());
    layers
}

/// `(C_I²/2) Σ_I :ρ_I ρ_I:` on every site.
fn add_isovector_contact(out: &mut FermionSum, l: &LatticeSpec, c_i2: f64) {
    let tau = pauli_matrices();
    for s in l.sites() {
        for t in &tau {
            for a1 in 0..2 {
                for b1 in 0..2 {
                    for d1 in 0..2 {
                        if t[b1][d1] == cx(0.0, 0.0) {
                            continue;
                        }
                        for a2 in 0..2 {
                            for b2 in 0..2 {
                                for d2 in 0..2 {
                                    let w = t[b1][d1] * t[b2][d2] * (c_i2 / 2.0);
                                    if w == cx(0.0, 0.0) {
                                        continue;
                                    }
                                    out.add_normal_ordered(
                                        w,
                                        &[
                                            Factor::create(mode(l, s, a1, b1)),
                                            Factor::annihilate(mode(l, s, a1, d1)),
                                            Factor::create(mode(l, s, a2, b2)),
                                            Factor::annihilate(mode(l, s, a2, d2)),
                                        ],
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Spin-isospin tensor of the pion-exchange kernel between two sites
/// separated by `d` lattice steps, indexed `[α'][γ'][α][γ]` for spin and
/// multiplied by `Σ_I τ_I ⊗ τ_I` in isospin outside.
fn spin_kernel(d: [i64; 3], a: f64) -> [[[[Complex64; 2]; 2]; 2]; 2] {
    let sig = pauli_matrices();
    let k = G_A / (2.0 * F_PI);
    let pref = k * k / (12.0 * PI);
    let mut out = [[[[cx(0.0, 0.0); 2]; 2]; 2]; 2];
    let r_sq = d.iter().map(|v| v * v).sum::<i64>();
    let sdots = |ap: usize, gp: usize, al: usize, ga: usize| -> Complex64 {
        (0..3).map(|s| sig[s][ap][gp] * sig[s][al][ga]).sum()
    };
    if r_sq == 0 {
        let w = -4.0 * PI / 3.0 / a.powi(3) * pref;
        for (ap, o1) in out.iter_mut().enumerate() {
            for (gp, o2) in o1.iter_mut().enumerate() {
                for (al, o3) in o2.iter_mut().enumerate() {
                    for (ga, v) in o3.iter_mut().enumerate() {
                        *v = sdots(ap, gp, al, ga) * w;
                    }
                }
            }
        }
        return out;
    }
    let rl = (r_sq as f64).sqrt();
    let r = rl * a;
    let f = M_PI * M_PI * (-M_PI * r).exp() / r;
    let g = 1.0 + 3.0 / (M_PI * r) + 3.0 / (M_PI * M_PI * r * r);
    let n = [d[0] as f64 / rl, d[1] as f64 / rl, d[2] as f64 / rl];
    let mut ns = [[cx(0.0, 0.0); 2]; 2];
    for (s, ni) in n.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                ns[i][j] += sig[s][i][j] * *ni;
            }
        }
    }
    for ap in 0..2 {
        for gp in 0..2 {
            for al in 0..2 {
                for ga in 0..2 {
                    let ss = sdots(ap, gp, al, ga);
                    let s12 = ns[ap][gp] * ns[al][ga] * 3.0 - ss;
                    out[ap][gp][al][ga] = (s12 * g + ss) * (f * pref);
                }
            }
        }
    }
    out
}

/// Long-range pion exchange between all ordered site pairs within `ell`
/// lattice spacings, on-site piece included.
pub fn build_long_range(l: &LatticeSpec, ell: usize) -> FermionSum {
    let a = convert_length(l.a_fm);
    let tau = pauli_matrices();
    let mut iso = [[[[cx(0.0, 0.0); 2]; 2]; 2]; 2];
    for t in &tau {
        for bp in 0..2 {
            for dp in 0..2 {
                for b in 0..2 {
                    for d in 0..2 {
                        iso[bp][dp][b][d] += t[bp][dp] * t[b][d];
                    }
                }
            }
        }
    }
    let mut out = FermionSum::zero(l.n_modes());
    let cut = (ell * ell) as i64;
    let sites = l.sites();
    for &x in &sites {
        for &y in &sites {
            let d = [
                y.x as i64 - x.x as i64,
                y.y as i64 - x.y as i64,
                y.z as i64 - x.z as i64,
            ];
            if d.iter().map(|v| v * v).sum::<i64>() > cut {
                continue;
            }
            let sk = spin_kernel(d, a);
            for ap in 0..2 {
                for gp in 0..2 {
                    for al in 0..2 {
                        for ga in 0..2 {
                            let s = sk[ap][gp][al][ga];
                            if s.norm() == 0.0 {
                                continue;
                            }
                            for bp in 0..2 {
                                for dp in 0..2 {
                                    for b in 0..2 {
                                        for dd in 0..2 {
                                            let w = s * iso[bp][dp][b][dd];
                                            if w.norm() == 0.0 {
                                                continue;
                                            }
                                            out.add_normal_ordered(
                                                w,
                                                &[
                                                    Factor::create(mode(l, x, ap, bp)),
                                                    Factor::annihilate(mode(l, x, gp, dp)),
                                                    Factor::create(mode(l, y, al, b)),
                                                    Factor::annihilate(mode(l, y, ga, dd)),
                                                ],
                                            );
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Number of nonzero `(spin, isospin)` index combinations the kernel
/// contributes for one ordered site pair.
pub fn long_range_pair_terms(d: [i64; 3], a_fm: f64) -> usize {
    let sk = spin_kernel(d, convert_length(a_fm));
    let tau = pauli_matrices();
    let mut n = 0;
    for ap in 0..2 {
        for gp in 0..2 {
            for al in 0..2 {
                for ga in 0..2 {
                    for bp in 0..2 {
                        for dp in 0..2 {
                            for b in 0..2 {
                                for dd in 0..2 {
                                    let iso: Complex64 = tau.iter().map(|t| t[bp][dp] * t[b][dd]).sum();
                                    if (sk[ap][gp][al][ga] * iso).norm() > 0.0 {
                                        n += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    n
}

pub fn build_ope(l: &LatticeSpec, p: &OpeParams) -> FermionSum {
    let mut out = build_free(l, p.h);
    add_pair_contact(&mut out, l, p.c);
    add_isovector_contact(&mut out, l, p.c_i2);
    out.add(&build_long_range(l, p.ell))
}

/// One axial-vector coupling slot: `coefficient · a†(create) ∂_S π_I a(annihilate)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AvSlot {
    pub spin_axis: usize,
    pub iso_axis: usize,
    pub create: Species,
    pub annihilate: Species,
    pub coefficient: Complex64,
}

/// One Weinberg-Tomozawa triple `ε_{I1 I2 I3} π_{I2} Π_{I3} a† τ_{I1} a`.
#[derive(Clone, Debug, Serialize)]
pub struct WtTriple {
    pub iso: [usize; 3],
    pub sign: f64,
    pub bilinears: Vec<(Species, Species, Complex64)>,
}

/// On-site coefficients of the free pion field, per isospin component.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FreePionTerms {
    pub pi_sq: f64,
    pub grad_sq: f64,
    pub cap_pi_sq: f64,
    pub gradient_links: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DynPiModel {
    #[serde(skip)]
    pub fermions: FermionSum,
    pub digitization: DigitizationSpec,
    pub a_coef: f64,
    pub b_coef: f64,
    pub av: Vec<AvSlot>,
    pub wt: Vec<WtTriple>,
    pub free_pion: FreePionTerms,
    pub field_registers: usize,
}

pub fn build_dynpi_descriptor(
    l: &LatticeSpec,
    p: &DynPiParams,
    eta: f64,
    e: f64,
    eps_cut: f64,
) -> Result<DynPiModel> {
    let a = convert_length(p.a_fm);
    let (ca, cb) = ab_coefficients(a);
    let digitization = boson_cutoffs(&BosonCutoffInputs {
        eta,
        e,
        eps_cut,
        a,
        l: l.lx.max(l.ly).max(l.lz),
        c: p.c,
        c_i2: p.c_i2,
    })?;
    let mut fermions = build_free(l, p.h);
    add_pair_contact(&mut fermions, l, p.c);
    add_isovector_contact(&mut fermions, l, p.c_i2);

    let m = pauli_matrices();
    let zero = cx(0.0, 0.0);
    let mut av = Vec::new();
    for s in 0..3 {
        for i in 0..3 {
            for al in 0..2 {
                for ga in 0..2 {
                    for be in 0..2 {
                        for de in 0..2 {
                            let w = m[i][be][de] * m[s][al][ga] * (G_A / (2.0 * F_PI));
                            if w != zero {
                                av.push(AvSlot {
                                    spin_axis: s,
                                    iso_axis: i,
                                    create: Species::from_spin_isospin(al, be),
                                    annihilate: Species::from_spin_isospin(ga, de),
                                    coefficient: w,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    let mut wt = Vec::new();
    for i1 in 0..3 {
        for i2 in 0..3 {
            for i3 in 0..3 {
                let sign = levi_civita(i1, i2, i3);
                if sign == 0.0 {
                    continue;
                }
                let mut bilinears = Vec::new();
                for al in 0..2 {
                    for be in 0..2 {
                        for de in 0..2 {
                            let w = m[i1][be][de] * (sign / (4.0 * F_PI * F_PI));
                            if w != zero {
                                bilinears.push((
                                    Species::from_spin_isospin(al, be),
                                    Species::from_spin_isospin(al, de),
                                    w,
                                ));
                            }
                        }
                    }
                }
                wt.push(WtTriple { iso: [i1, i2, i3], sign, bilinears });
            }
        }
    }
    let a3 = a.powi(3);
    let gradient_links = l.bonds().len();
    Ok(DynPiModel {
        fermions,
        digitization,
        a_coef: ca,
        b_coef: cb,
        av,
        wt,
        free_pion: FreePionTerms {
            pi_sq: a3 * M_PI * M_PI / 2.0,
            grad_sq: a3 / 2.0,
            cap_pi_sq: a3 / 2.0,
            gradient_links,
        },
        field_registers: 3 * l.n_sites(),
    })
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_matches_table() {
        for (a, h) in [(1.4, 10.58), (2.2, 4.29)] {
            assert!((hopping_h(a) / h - 1.0).abs() < 5e-3);
        }
    }

    #[test]
    fn ope_couplings_values() {
        let (c, ci2) = ope_couplings();
        assert!((c + 51.94).abs() < 0.01);
        assert!((ci2 - 1.7325).abs() < 1e-3);
    }

    #[test]
    fn single_site_pionless_counts() {
        let l = LatticeSpec::cubic(1, 1.4).unwrap();
        let h = build_pionless(&l, &PionlessParams::tabulated(1.4).unwrap());
        assert_eq!(h.len(), 4 + 6 + 4);
    }

    #[test]
    fn descriptor_slot_counts() {
        let l = LatticeSpec::cubic(1, 2.2).unwrap();
        let m = build_dynpi_descriptor(&l, &DynPiParams::standard(2.2), 1.0, 140.0, 1e-3).unwrap();
        assert_eq!(m.av.len(), 36);
        assert_eq!(m.wt.len(), 6);
    }
}
