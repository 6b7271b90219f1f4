//! Truncation and digitization errors: the OPE interaction-range cutoff,
//! pion field cutoffs with register sizing, and lattice shell counting.
//!
//! All lengths here are in MeV⁻¹ and energies in MeV.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::constants::{F_PI, G_A, M_PI};

/// Largest cutoff multiple of `a` tried before giving up.
pub const MAX_CUTOFF_STEPS: usize = 10_000;

/// Number of points of ℤ³ with `i² + j² + k² = r_sq`.
pub fn shell_count(r_sq: u64) -> u64 {
    let m = (r_sq as f64).sqrt() as i64 + 1;
    let mut n = 0;
    for i in -m..=m {
        let ii = (i * i) as u64;
        if ii > r_sq {
            continue;
        }
        for j in -m..=m {
            let jj = ii + (j * j) as u64;
            if jj > r_sq {
                continue;
            }
            let rest = r_sq - jj;
            let k = (rest as f64).sqrt().round() as u64;
            if k * k == rest {
                n += if k == 0 { 1 } else { 2 };
            }
        }
    }
    n
}

/// Realized shells `r² → q(r)` up to a squared radius, in lattice units.
#[derive(Clone, Debug, Serialize)]
pub struct ShellTable {
    pub max_r_sq: u64,
    /// Nonempty shells in increasing r², excluding the origin.
    pub shells: Vec<(u64, u64)>,
}

impl ShellTable {
    pub fn new(max_r_sq: u64) -> Self {
        let shells = (1..=max_r_sq)
            .map(|r| (r, shell_count(r)))
            .filter(|&(_, q)| q > 0)
            .collect();
        ShellTable { max_r_sq, shells }
    }

    /// Shells within `k` lattice spacings.
    pub fn within(k: usize) -> Self {
        Self::new((k * k) as u64)
    }

    /// Sites within the cutoff, origin included.
    pub fn cumulative(&self) -> u64 {
        1 + self.shells.iter().map(|s| s.1).sum::<u64>()
    }
}

/// `(1/12π)(g_A/2f_π)² m_π² e^{-m_π r}/r`.
pub fn g1(r: f64) -> f64 {
    let k = G_A / (2.0 * F_PI);
    k * k / (12.0 * PI) * M_PI * M_PI * (-M_PI * r).exp() / r
}

/// `g1(r)·(1 + 3/(m_π r) + 3/(m_π r)²)`.
pub fn g2(r: f64) -> f64 {
    let x = M_PI * r;
    g1(r) * (1.0 + 3.0 / x + 3.0 / (x * x))
}

/// Error rate from dropping long-range terms beyond `ell`; the norm error
/// after time t is `t` times this.
pub fn ope_cutoff_error(ell: f64, eta: f64, a: f64) -> f64 {
    if eta <= 0.0 {
        return 0.0;
    }
    let r = ell + a;
    let first = eta * eta * (72.0 * g1(r) + 648.0 * g2(r));
    let second = 4.0 * PI * eta / (M_PI * M_PI * a.powi(3))
        * r
        * g1(r)
        * (720.0 * (M_PI * ell + M_PI * a + 1.0) + 3888.0);
    first.min(second)
}

/// Smallest `k ≥ 1` with `t · ope_cutoff_error(k a) ≤ eps_trunc`.
pub fn choose_ope_cutoff(eps_trunc: f64, t: f64, eta: f64, a: f64) -> Result<usize> {
    if !(eps_trunc > 0.0) {
        return Err(Error::Domain(format!("truncation budget must be positive, got {eps_trunc}")));
    }
    (1..=MAX_CUTOFF_STEPS)
        .find(|&k| t * ope_cutoff_error(k as f64 * a, eta, a) <= eps_trunc)
        .ok_or_else(|| {
            Error::Domain(format!(
                "truncation budget {eps_trunc} unreachable within {MAX_CUTOFF_STEPS} lattice spacings"
            ))
        })
}

/// The `A` and `B` combinations that must both be positive for the field
/// cutoffs to apply.
pub fn ab_coefficients(a: f64) -> (f64, f64) {
    let f2 = F_PI * F_PI;
    (
        M_PI * M_PI * a.powi(3) / 2.0 - 1.0 / (2.0 * f2 * a),
        a.powi(3) / 2.0 - a / (2.0 * f2),
    )
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DigitizationSpec {
    pub pi_max: f64,
    #[serde(rename = "Pi_max")]
    pub cap_pi_max: f64,
    pub delta_pi: f64,
    #[serde(rename = "delta_Pi")]
    pub delta_cap_pi: f64,
    pub n_b: u32,
    /// Cutoffs before rounding the register size up.
    pub raw_pi_max: f64,
    #[serde(rename = "raw_Pi_max")]
    pub raw_cap_pi_max: f64,
}

impl DigitizationSpec {
    /// `log₂(2 a³ Π_max π_max / π + 1)`; equals `n_b` after rounding.
    pub fn register_bits(&self, a: f64) -> f64 {
        (2.0 * a.powi(3) * self.cap_pi_max * self.pi_max / PI + 1.0).log2()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BosonCutoffInputs {
    pub eta: f64,
    /// Energy cap in MeV.
    pub e: f64,
    pub eps_cut: f64,
    /// Lattice spacing in MeV⁻¹.
    pub a: f64,
    /// Sites per axis.
    pub l: usize,
    pub c: f64,
    pub c_i2: f64,
}

/// Field cutoffs and register size for the digitized pions.
pub fn boson_cutoffs(p: &BosonCutoffInputs) -> Result<DigitizationSpec> {
    let (ca, cb) = ab_coefficients(p.a);
    if ca <= 0.0 || cb <= 0.0 {
        return Err(Error::Domain(format!(
            "lattice spacing {} MeV^-1 gives A = {ca:.4e}, B = {cb:.4e}; both must be positive",
            p.a
        )));
    }
    if !(p.eps_cut > 0.0) || p.e < 0.0 || p.eta < 0.0 {
        return Err(Error::Domain("field cutoffs need eps_cut > 0, E ≥ 0, eta ≥ 0".into()));
    }
    let a = p.a;
    let l3 = (p.l as f64).powi(3);
    let pre = (3.0 * l3 / p.eps_cut).sqrt() + 1.0;
    let energy = p.e + 8.0 * p.eta * p.c.abs() + 4.0 * p.eta * p.c_i2.abs();
    let av = 3.0 * G_A / (F_PI * a * ca);
    let grad = 6.0 * G_A / (M_PI * M_PI * F_PI * a.powi(4));
    let mass = 9.0 * p.eta * M_PI * M_PI * a.powi(3);
    let raw_pi = pre * (av + (energy / ca + 3.0 * p.eta * av * av + mass / ca * grad * grad).sqrt());
    let wt = 3.0 * G_A / (F_PI * a);
    let raw_cap =
        pre * (energy / cb + 3.0 * p.eta / (ca * cb) * wt * wt + mass / cb * grad * grad).sqrt();

    let a3 = a.powi(3);
    let n_b = ((2.0 * a3 * raw_cap * raw_pi / PI + 1.0).log2().ceil() as u32).max(1);
    let levels = 2f64.powi(n_b as i32) - 1.0;
    // Hold Π_max and stretch π_max so the register identity is exact.
    let pi_max = levels * PI / (2.0 * a3 * raw_cap);
    let delta_pi = 2.0 * pi_max / levels;
    let cap_pi_max = PI / (a3 * delta_pi);
    Ok(DigitizationSpec {
        pi_max,
        cap_pi_max,
        delta_pi,
        delta_cap_pi: 2.0 * cap_pi_max / levels,
        n_b,
        raw_pi_max: raw_pi,
        raw_cap_pi_max: raw_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_shells() {
        assert_eq!(shell_count(0), 1);
        assert_eq!(shell_count(1), 6);
        assert_eq!(shell_count(2), 12);
        assert_eq!(shell_count(3), 8);
        assert_eq!(shell_count(7), 0);
    }

    #[test]
    fn eta_zero_needs_one_spacing() {
        assert_eq!(choose_ope_cutoff(1e-3, 1.0, 0.0, 0.01).unwrap(), 1);
    }

    #[test]
    fn bad_spacing_rejected() {
        let p = BosonCutoffInputs { eta: 1.0, e: 10.0, eps_cut: 1e-3, a: 1.4 / 197.3269804, l: 2, c: 0.0, c_i2: 0.0 };
        assert!(matches!(boson_cutoffs(&p), Err(Error::Domain(_))));
    }
}
