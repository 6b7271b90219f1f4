//! Per-step two-qubit depth, R_z counts and expected T counts.

use serde::Serialize;

use crate::encodings::Encoding;
use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::trotter::TaskKind;

/// Depths of the individual circuit blocks making up a Trotter step.
pub mod components {
    /// VC hopping along x, y, z for one species.
    pub const VC_HOP: [u64; 3] = [16, 22, 26];
    pub const VC_HOP_CONTROLLED: [u64; 3] = [20, 26, 30];
    pub const COMPACT_HOP: u64 = 10;
    pub const COMPACT_HOP_CONTROLLED: u64 = 14;
    /// Pionless two- plus three-body contact on every site.
    pub const CONTACT: u64 = 8;
    pub const CONTACT_CONTROLLED: u64 = 22;
    /// OPE contact terms.
    pub const OPE_HC: u64 = 6;
    pub const OPE_HC_CONTROLLED: u64 = 26;
    pub const OPE_HCI2: u64 = 54;
    pub const OPE_HCI2_CONTROLLED: u64 = 98;
    /// One long-range interaction type.
    pub const LONG_RANGE: u64 = 14336;
    pub const LONG_RANGE_CONTROLLED: u64 = 16384;
}

use components::*;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepCost {
    pub model: ModelKind,
    pub encoding: Encoding,
    pub order: u32,
    pub controlled: bool,
    pub depth_2q: u64,
    pub rz_count: u64,
}

fn l3(l: usize) -> u64 {
    (l as u64).pow(3)
}

/// Free-fermion part of a first-order step: two parity layers per axis,
/// species serial for VC and parallel for the stacked compact code.
fn free_depth(encoding: Encoding, controlled: bool) -> Result<(u64, u64)> {
    match (encoding, controlled) {
        (Encoding::VerstraeteCirac, false) => Ok((2 * 4 * VC_HOP.iter().sum::<u64>(), VC_HOP[2])),
        (Encoding::VerstraeteCirac, true) => Ok((
            2 * 4 * VC_HOP_CONTROLLED.iter().sum::<u64>(),
            VC_HOP_CONTROLLED[2],
        )),
        (Encoding::Compact, false) => Ok((6 * COMPACT_HOP, COMPACT_HOP)),
        (Encoding::Compact, true) => Ok((6 * COMPACT_HOP_CONTROLLED, COMPACT_HOP_CONTROLLED)),
        (Encoding::JordanWigner, _) => Err(Error::Unsupported(
            "step costs are tabulated for the VC and compact encodings only".into(),
        )),
    }
}

/// Pionless Trotter step. The second-order step runs every block twice at
/// half time and merges the deepest block across step boundaries.
pub fn pionless_step_cost(encoding: Encoding, order: u32, controlled: bool, l: usize) -> Result<StepCost> {
    let (free, deepest_hop) = free_depth(encoding, controlled)?;
    let contact = if controlled { CONTACT_CONTROLLED } else { CONTACT };
    let p1 = free + contact;
    let depth = match order {
        1 => p1,
        2 => 2 * p1 - deepest_hop.max(contact),
        _ => return Err(Error::Unsupported(format!("pionless step costs exist for p = 1, 2; got {order}"))),
    };
    let per_site = if controlled { 84 } else { 42 };
    Ok(StepCost {
        model: ModelKind::Pionless,
        encoding,
        order,
        controlled,
        depth_2q: depth,
        rz_count: per_site * order as u64 * l3(l),
    })
}

/// `⌈4π(ℓ+1)³/3⌉` with ℓ in lattice spacings.
pub fn interaction_types(ell: usize) -> u64 {
    (4.0 * std::f64::consts::PI * ((ell + 1) as f64).powi(3) / 3.0).ceil() as u64
}

pub fn ope_step_cost(ell: usize, l: usize, controlled: bool) -> StepCost {
    let r = interaction_types(ell);
    let (free, _) = free_depth(Encoding::VerstraeteCirac, controlled).unwrap();
    let depth = if controlled {
        free + OPE_HC_CONTROLLED + OPE_HCI2_CONTROLLED + LONG_RANGE_CONTROLLED * r
    } else {
        free + OPE_HC + OPE_HCI2 + LONG_RANGE * r
    };
    let rz = (52 + 1024 * r) * l3(l);
    StepCost {
        model: ModelKind::Ope,
        encoding: Encoding::VerstraeteCirac,
        order: 1,
        controlled,
        depth_2q: depth,
        rz_count: if controlled { 2 * rz } else { rz },
    }
}

/// Which of the two printed forms of the dynamical-pion step counts to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum DynPiForm {
    /// Totals as assembled from the component circuits.
    #[default]
    Derived,
    /// Closed forms quoted in the summary statements.
    Statement,
}

pub fn dynpi_step_cost(n_b: u32, l: usize, controlled: bool, form: DynPiForm) -> StepCost {
    let n = n_b as u64;
    let half = n.div_ceil(2);
    let depth = match (form, controlled) {
        (DynPiForm::Derived, false) => {
            572u64.max((2 * n * n + 16 * half + 26 * n).saturating_sub(32)) + 98 * n * n + 958 * n + 1392
        }
        (DynPiForm::Derived, true) => {
            732u64.max((28 * n * n + 16 * half + 40 * n).saturating_sub(32)) + 146 * n * n + 1918 * n + 1440
        }
        (DynPiForm::Statement, false) => {
            97 * n * n + 959 * n + 1392 + 572u64.max((n * n + 16 * half + 27 * n).saturating_sub(32))
        }
        (DynPiForm::Statement, true) => {
            145 * n * n + 1919 * n + 1440 + 732u64.max((27 * n * n + 16 * half + 41 * n).saturating_sub(32))
        }
    };
    let rz = match form {
        DynPiForm::Derived => 33 * n * n + 90 * n + 64,
        DynPiForm::Statement => 45 * n * n + 114 * n + 76,
    } * l3(l);
    StepCost {
        model: ModelKind::Dynpi,
        encoding: Encoding::VerstraeteCirac,
        order: 1,
        controlled,
        depth_2q: depth,
        rz_count: if controlled { 2 * rz } else { rz },
    }
}

/// Per-rotation R_z breakdown of the pion-field blocks, per site.
pub fn dynpi_rz_components(n_b: u32) -> [(&'static str, u64); 5] {
    let n = n_b as u64;
    [
        ("pi_sq", 3 * (n * n + n) / 2),
        ("grad_pi_sq", 3 * (2 * n * n + n)),
        ("Pi_sq", 3 * (5 * n * n - 3 * n) / 2),
        ("axial_vector", 72 * n),
        ("weinberg_tomozawa", 6 * (3 * n * n + 3 * n + 2)),
    ]
}

/// Expected T count of synthesizing `total_rz` rotations with total error
/// `eps_total` split evenly, via repeat-until-success.
pub fn t_synthesis(total_rz: f64, eps_total: f64) -> Result<f64> {
    if !(total_rz >= 1.0) || !(eps_total > 0.0) {
        return Err(Error::Domain(format!(
            "synthesis needs at least one rotation and positive error (got {total_rz}, {eps_total})"
        )));
    }
    Ok(total_rz * (1.15 * (2.0 * total_rz / eps_total).log2() + 9.2))
}

pub fn qubit_count(model: ModelKind, encoding: Encoding, l: usize, n_b: u32, task: TaskKind) -> Result<u64> {
    let base = match (model, encoding) {
        (ModelKind::Pionless, Encoding::VerstraeteCirac) | (ModelKind::Ope, Encoding::VerstraeteCirac) => 6 * l3(l),
        (ModelKind::Pionless, Encoding::Compact) => 10 * l3(l),
        (ModelKind::Dynpi, Encoding::VerstraeteCirac) => 6 * l3(l) + 3 * l3(l) * n_b as u64,
        _ => {
            return Err(Error::Unsupported(format!(
                "no qubit layout for model {model} with encoding {encoding:?}"
            )))
        }
    };
    Ok(base + (task == TaskKind::Qpe) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pionless_table() {
        let d = |e, p, c| pionless_step_cost(e, p, c, 1).unwrap().depth_2q;
        let (vc, cp) = (Encoding::VerstraeteCirac, Encoding::Compact);
        assert_eq!([d(vc, 1, false), d(vc, 1, true), d(vc, 2, false), d(vc, 2, true)], [520, 630, 1014, 1230]);
        assert_eq!([d(cp, 1, false), d(cp, 1, true), d(cp, 2, false), d(cp, 2, true)], [68, 106, 126, 190]);
    }

    #[test]
    fn ope_single_spacing() {
        assert_eq!(interaction_types(1), 34);
        assert_eq!(ope_step_cost(1, 10, false).depth_2q, 487_996);
        assert_eq!(ope_step_cost(1, 10, true).depth_2q, 557_788);
        assert_eq!(ope_step_cost(1, 10, false).rz_count, 34_868_000);
    }

    #[test]
    fn dynpi_small_register() {
        assert_eq!(dynpi_step_cost(1, 1, false, DynPiForm::Derived).depth_2q, 3020);
        assert_eq!(dynpi_step_cost(33, 10, false, DynPiForm::Derived).rz_count, 38_971_000);
        // field blocks plus the 52 fermionic rotations shared with the OPE step
        for n in 1..40u64 {
            let sum: u64 = dynpi_rz_components(n as u32).iter().map(|c| c.1).sum();
            assert_eq!(sum + 52, 33 * n * n + 90 * n + 64);
        }
    }

    #[test]
    fn synthesis_edge() {
        assert!((t_synthesis(1.0, 2.0).unwrap() - 9.2).abs() < 1e-12);
    }
}
