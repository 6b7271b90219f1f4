//! Analytic product-formula error bounds and error-budget bookkeeping.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::constants::{F_PI, G_A, M_PI};
use crate::models::{ModelKind, PionlessParams};
use crate::trunc::{DigitizationSpec, ShellTable};

/// Per-class commutator contributions; `bound(t) = scale · total · t^{p+1}`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub order: u32,
    pub classes: Vec<(String, f64)>,
    pub total: f64,
    pub scale: f64,
}

impl BoundReport {
    fn new(order: u32, scale: f64, classes: Vec<(String, f64)>) -> Self {
        let total = classes.iter().map(|c| c.1).sum();
        BoundReport { order, classes, total, scale }
    }

    /// Coefficient of `t^{p+1}`.
    pub fn coefficient(&self) -> f64 {
        self.scale * self.total
    }

    pub fn bound(&self, t: f64) -> f64 {
        self.coefficient() * t.powi(self.order as i32 + 1)
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.classes.iter().find(|c| c.0 == label).map(|c| c.1)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("class,coefficient\n");
        for (k, v) in &self.classes {
            s.push_str(&format!("{k},{v:.12e}\n"));
        }
        s
    }
}

fn fl(eta: f64, k: f64) -> f64 {
    (eta / k).floor()
}

/// Coefficient `X` of the first-order pionless bound `t² X`.
pub fn pionless_p1_coefficient(eta: f64, p: &PionlessParams) -> f64 {
    let (h, c, d) = (p.h, p.c, p.d);
    let a1 = 2.0 * c.abs();
    let a2 = 2.0 * (3.0 * c + d).abs() + d.abs();
    let a3 = 2.0 * (6.0 * c + 4.0 * d).abs() + 4.0 * d.abs();
    15.0 * h * h * eta + 6.0 * h * (a1 * fl(eta, 2.0) + a2 * fl(eta, 3.0) + a3 * fl(eta, 4.0))
}

pub fn pionless_p1_bound(t: f64, eta: f64, p: &PionlessParams) -> f64 {
    t * t * pionless_p1_coefficient(eta, p)
}

/// Report form of the first-order pionless bound, split into kinetic and
/// kinetic-contact pieces.
pub fn pionless_p1_report(eta: f64, p: &PionlessParams) -> BoundReport {
    let kin = 15.0 * p.h * p.h * eta;
    BoundReport::new(
        1,
        1.0,
        vec![
            ("kinetic".into(), kin),
            ("kinetic_contact".into(), pionless_p1_coefficient(eta, p) - kin),
        ],
    )
}

/// Bracket of the second-order pionless bound; the bound is `t³/12` times this.
pub fn pionless_p2_bracket(eta: f64, p: &PionlessParams) -> f64 {
    let (h, c, d) = (p.h, p.c, p.d);
    let (f2, f3, f4) = (fl(eta, 2.0), fl(eta, 3.0), fl(eta, 4.0));
    let n2 = c.abs() * f2;
    let n3 = (3.0 * c + d).abs() * f3;
    let n4 = (6.0 * c + 4.0 * d).abs() * f4;
    let c3 = d.abs() * f3;
    let c4 = 4.0 * d.abs() * f4;
    let w2 = 2.0 * c.abs() * f2;
    let w3 = (d.abs() + 2.0 * (3.0 * c + d).abs()) * f3;
    let w4 = (4.0 * d.abs() + 2.0 * (6.0 * c + 4.0 * d).abs()) * f4;
    let u3 = (c / 2.0 + d / 6.0).abs();
    let u4 = (c / 2.0 + d / 3.0).abs();
    let q2 = 2.0 * c * c * f2;
    let q3 = 4.0 * u3 * (12.0 * u3 + d.abs()) * f3;
    let q4 = 24.0 * u4 * (6.0 * u4 + d.abs()) * f4;
    let q3p = (8.0 * d.abs() * u3 + 2.0 / 3.0 * d * d) * f3;
    let q4p = 8.0 * d.abs() * (6.0 * u4 + d.abs()) * f4;
    125.0 * h.powi(3) * eta
        + 216.0 * h * h * (n2 + n3 + n4 + c3 + c4)
        + 60.0 * h * h * (w2 + w3 + w4)
        + 12.0 * h * (2.0 * (q2 + q3 + q4) + q3p + q4p)
}

pub fn pionless_p2_bound(t: f64, eta: f64, p: &PionlessParams) -> f64 {
    t.powi(3) / 12.0 * pionless_p2_bracket(eta, p)
}

pub fn pionless_p2_report(eta: f64, p: &PionlessParams) -> BoundReport {
    BoundReport::new(2, 1.0 / 12.0, vec![("nested".into(), pionless_p2_bracket(eta, p))])
}

/// Couplings entering the OPE first-order bound, in MeV units.
#[derive(Clone, Copy, Debug)]
pub struct OpeBoundInputs {
    pub h: f64,
    pub c: f64,
    pub c_i2: f64,
    /// Lattice spacing in MeV⁻¹.
    pub a: f64,
}

fn kappa() -> f64 {
    G_A / (2.0 * F_PI)
}

/// Fermion-only classes shared between the OPE and dynamical-pion bounds.
fn fermion_classes(eta: f64, h: f64, c: f64, c_i2: f64) -> Vec<(String, f64)> {
    vec![
        ("kinetic".into(), 30.0 * h * h * eta),
        ("Hfree_HC1".into(), 18.0 * h * c.abs() * eta),
        ("Hfree_HC2".into(), 528.0 * h * c_i2.abs() * eta),
        ("HC1_HC1".into(), 0.0),
        ("HC1_HC2".into(), 0.0),
        ("HC2_HC2".into(), 60.0 * c_i2 * c_i2 * eta),
    ]
}

/// First-order OPE bound `(t²/2) ζ` with the long-range sum running over
/// every realized shell in `shells`.
pub fn ope_p1_bound(eta: f64, p: &OpeBoundInputs, shells: &ShellTable) -> BoundReport {
    let k2 = kappa().powi(2);
    let k4 = k2 * k2;
    let a3i = p.a.powi(-3);
    let (h, c, ci2) = (p.h, p.c.abs(), p.c_i2.abs());
    let mut cl = fermion_classes(eta, p.h, p.c, p.c_i2);
    cl.push(("Hfree_HLR0".into(), 131072.0 / 3.0 * a3i * h * k2 * eta));
    cl.push(("HC1_HLR0".into(), 7168.0 / 3.0 * a3i * c * k2 * eta));
    cl.push(("HC2_HLR0".into(), 50176.0 / 9.0 * a3i * ci2 * k2 * eta));
    cl.push(("HLR0_HLR0".into(), 152320.0 / 27.0 * a3i * a3i * k4 * eta));

    // q f (g+1) per shell
    let per: Vec<(f64, f64)> = shells
        .shells
        .iter()
        .map(|&(r_sq, q)| {
            let r = (r_sq as f64).sqrt() * p.a;
            let f = M_PI * M_PI * (-M_PI * r).exp() / r;
            let g = 1.0 + 3.0 / (M_PI * r) + 3.0 / (M_PI * M_PI * r * r);
            (q as f64, f * (g + 1.0))
        })
        .collect();
    let s1: f64 = per.iter().map(|(q, w)| q * w).sum();
    let i12 = 1.0 / (12.0 * PI);
    cl.push(("Hfree_HLR".into(), 98304.0 / PI * h * k2 * s1 * eta));
    cl.push(("HC1_HLR".into(), 1024.0 * c / PI * k2 * s1 * eta));
    cl.push(("HC2_HLR".into(), 43008.0 * ci2 / (12.0 * PI) * k2 * s1 * eta));
    cl.push(("HLR0_HLR".into(), 458752.0 / (27.0 * PI) * a3i * k4 * s1 * eta));
    let mut cross = 0.0;
    for i in 0..per.len() {
        for j in i + 1..per.len() {
            cross += per[i].0 * per[j].0 * per[i].1 * per[j].1;
        }
    }
    cl.push(("HLR_HLR".into(), 3_670_016.0 * i12 * i12 * k4 * cross * eta));
    let same: f64 = per
        .iter()
        .map(|(q, w)| 3_670_016.0 * q * (q - 1.0) * w * w + 524_288.0 * q * w * w)
        .sum();
    cl.push(("HLR_HLR_2".into(), i12 * i12 * k4 * same * eta));
    BoundReport::new(1, 0.5, cl)
}

#[derive(Clone, Copy, Debug)]
pub struct DynPiBoundInputs {
    pub h: f64,
    pub c: f64,
    pub c_i2: f64,
    pub a: f64,
    /// Sites per axis.
    pub l: usize,
}

/// First-order dynamical-pion bound `(t²/2) Ξ`.
pub fn dynpi_p1_bound(eta: f64, p: &DynPiBoundInputs, dig: &DigitizationSpec) -> BoundReport {
    let (pm, cpm) = (dig.pi_max, dig.cap_pi_max);
    dynpi_p1_bound_raw(eta, p, pm, cpm)
}

/// Same as [`dynpi_p1_bound`] with explicit field cutoffs.
pub fn dynpi_p1_bound_raw(eta: f64, p: &DynPiBoundInputs, pm: f64, cpm: f64) -> BoundReport {
    let a = p.a;
    let k = kappa();
    let f2 = F_PI * F_PI;
    let (h, ci2) = (p.h, p.c_i2.abs());
    let mut cl = fermion_classes(eta, p.h, p.c, p.c_i2);
    cl.push((
        "Hpp1_Hpp2".into(),
        (36.0 / (a * a) + 3.0 * M_PI * M_PI) * a.powi(3) * pm * cpm * p.l as f64,
    ));
    cl.push(("HFree_HAV".into(), 2592.0 * k / a * h * pm * eta));
    cl.push(("HAV_HC1".into(), 0.0));
    cl.push(("HAV_HC2".into(), 6048.0 * k / a * ci2 * pm * eta));
    cl.push(("Hpp1_HAV".into(), 36.0 * k / a * cpm * eta));
    cl.push(("Hpp2_HAV".into(), 0.0));
    cl.push(("HAV_HAV".into(), 20736.0 * k * k / (a * a) * pm * pm * eta));
    cl.push(("HFree_HWT".into(), 432.0 * h / f2 * pm * cpm * eta));
    cl.push(("HC_HWT".into(), 0.0));
    cl.push(("C2_HWT".into(), 504.0 * ci2 / f2 * pm * cpm * eta));
    cl.push(("Hpp1_HWT".into(), 0.0));
    cl.push(("Hpp2_HWT".into(), 72.0 / f2 / (a * a) * pm * pm * eta));
    cl.push((
        "HAV_HWT".into(),
        G_A / (F_PI.powi(3) * a) * (72.0 / a.powi(3) + 216.0 * pm * cpm) * pm * eta,
    ));
    let w = 1.0 / (4.0 * f2);
    cl.push((
        "HWT_HWT".into(),
        384.0 * w * w * (3.0 * pm * cpm + 2.0 / a.powi(3)) * cpm * pm * eta,
    ));
    BoundReport::new(1, 0.5, cl)
}

/// Nested-commutator bound for translation-invariant NPFO layers with
/// localities `k` and weights `j`, in the order `[γ1, γ2, ..., γ_{p+1}]`.
pub fn general_npfo_bound(p: usize, k: &[usize], j: &[f64], eta: f64) -> Result<f64> {
    if k.len() != p + 1 || j.len() != p + 1 {
        return Err(Error::Domain(format!(
            "order {p} needs {} localities and weights, got {} and {}",
            p + 1,
            k.len(),
            j.len()
        )));
    }
    if k.iter().any(|&x| x == 0) {
        return Err(Error::Domain("localities must be positive".into()));
    }
    if eta <= 0.0 {
        return Ok(0.0);
    }
    let mut out: f64 = j.iter().map(|x| x.abs()).product();
    for m in 2..=p + 1 {
        let km = k[m - 1] as f64;
        let s: f64 = k[..m - 1].iter().sum::<usize>() as f64;
        let lead = s - (m as f64 - 2.0);
        let next = s - (m as f64 - 1.0);
        out *= 2.0 * km * (km - 1.0) * lead * next * 2f64.powf(1.0 + km.min(lead) / 2.0);
    }
    let kmin = *k.iter().min().unwrap();
    let groups = (eta / kmin.div_ceil(2) as f64).ceil();
    Ok(out * groups)
}

/// General-theorem first-order estimate for the pionless layers: 15 kinetic
/// pairs plus 6 kinetic-contact pairs with the contact layer taken as a
/// three-mode NPFO of weight `|C| + |D|`.
pub fn general_pionless_p1(eta: f64, p: &PionlessParams) -> f64 {
    let kin = general_npfo_bound(1, &[2, 2], &[p.h, p.h], eta).unwrap();
    let con = general_npfo_bound(1, &[2, 3], &[p.h, p.c.abs() + p.d.abs()], eta).unwrap();
    15.0 * kin + 6.0 * con
}

/// Product-formula error `‖e^{-itH} - P_p(t)‖` from a commutator sum:
/// `t²α/2` for p = 1, `t³α/12` for p = 2, `2Υ^{p+1} t^{p+1} α/(p+1)` for
/// even p ≥ 4 with `Υ = 2·5^{p/2-1}`.
pub fn product_formula_error(p: u32, t: f64, alpha: f64) -> Result<f64> {
    match p {
        1 => Ok(t * t * alpha / 2.0),
        2 => Ok(t.powi(3) * alpha / 12.0),
        q if q >= 4 && q % 2 == 0 => {
            let ups = 2.0 * 5f64.powf(q as f64 / 2.0 - 1.0);
            Ok(2.0 * ups.powi(q as i32 + 1) * t.powi(q as i32 + 1) * alpha / (q as f64 + 1.0))
        }
        _ => Err(Error::Domain(format!("unsupported product-formula order {p}"))),
    }
}

/// Smallest integer `r` with `t^{p+1} coef / r^p ≤ budget`, returned as
/// f64 since the larger models need more steps than fit in 64 bits. Below
/// 2^53 the result is exact.
pub fn steps_for_budget(p: u32, t: f64, coef: f64, budget: f64) -> Result<f64> {
    if !(budget > 0.0) {
        return Err(Error::Domain(format!("error budget must be positive, got {budget}")));
    }
    if p == 0 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    let total = coef * t.powi(p as i32 + 1);
    if !total.is_finite() || total < 0.0 {
        return Err(Error::Domain(format!("commutator bound is not finite: {total}")));
    }
    if total <= budget {
        return Ok(1.0);
    }
    let err = |r: f64| total / r.powi(p as i32);
    let mut r = (total / budget).powf(1.0 / p as f64).ceil().max(1.0);
    if !r.is_finite() {
        return Err(Error::Domain("step count overflows".into()));
    }
    if r < 2f64.powi(53) {
        while r > 1.0 && err(r - 1.0) <= budget {
            r -= 1.0;
        }
        while err(r) > budget {
            r += 1.0;
        }
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    NearTerm,
    FaultTolerant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Evolve,
    Qpe,
}

/// Error allocation per channel.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorLedger {
    pub total: f64,
    /// Budget for `r ε_prod`.
    pub product: f64,
    /// OPE range truncation budget, or the `2√(2ε_cut)` channel for pions.
    pub truncation: Option<f64>,
    /// Pion field cutoff error implied by the truncation channel.
    pub eps_cut: Option<f64>,
    /// Budget for `r N_Rz ε_syn`.
    pub synthesis: Option<f64>,
}

impl ErrorLedger {
    pub fn channel_sum(&self) -> f64 {
        self.product + self.truncation.unwrap_or(0.0) + self.synthesis.unwrap_or(0.0)
    }
}

/// Split a total error evenly over the channels that apply to this model
/// and convention. For QPE `total` is the combined budget `√3π/2^m`.
pub fn compose_total_error(model: ModelKind, convention: Convention, total: f64) -> Result<ErrorLedger> {
    if !(total > 0.0) {
        return Err(Error::Domain(format!("total error must be positive, got {total}")));
    }
    let has_trunc = model != ModelKind::Pionless;
    let has_syn = convention == Convention::FaultTolerant;
    let n = 1 + has_trunc as usize + has_syn as usize;
    let share = total / n as f64;
    let truncation = has_trunc.then_some(share);
    let eps_cut = (model == ModelKind::Dynpi).then(|| share * share / 8.0);
    Ok(ErrorLedger {
        total,
        product: share,
        truncation,
        eps_cut,
        synthesis: has_syn.then_some(share),
    })
}

/// Combined QPE budget `√3π/2^m` for `m` bits.
pub fn qpe_error_total(m: u32) -> f64 {
    3f64.sqrt() * PI / 2f64.powi(m as i32)
}
