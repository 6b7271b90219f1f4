//! End-to-end estimates for the crossing-time evolution and QPE tasks.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costs::{
    dynpi_step_cost, ope_step_cost, pionless_step_cost, qubit_count, t_synthesis, DynPiForm,
    StepCost,
};
use crate::encodings::Encoding;
use crate::error::{Error, Result};
use crate::models::constants::M;
use crate::models::{convert_length, DynPiParams, ModelKind, OpeParams, PionlessParams};
use crate::trotter::{
    compose_total_error, dynpi_p1_bound, ope_p1_bound, pionless_p1_report, pionless_p2_report,
    qpe_error_total, steps_for_budget, BoundReport, Convention, DynPiBoundInputs, ErrorLedger,
    OpeBoundInputs, TaskKind,
};
use crate::trunc::{boson_cutoffs, choose_ope_cutoff, BosonCutoffInputs, DigitizationSpec, ShellTable};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task: TaskKind,
    pub model: ModelKind,
    pub encoding: Encoding,
    pub order: u32,
    #[serde(rename = "L")]
    pub l: usize,
    pub a_fm: f64,
    pub eta: f64,
    /// Kinetic energy for the crossing time, MeV.
    pub e_kin: Option<f64>,
    /// Target QPE precision, MeV.
    pub delta_e: Option<f64>,
    /// Energy cap, MeV: sets the QPE time step and the pion field cutoffs.
    pub e_max: f64,
    /// QPE success probability `1 - δ`.
    pub success_prob: Option<f64>,
    /// Total error for evolution tasks.
    pub eps: f64,
    pub convention: Convention,
    /// Use the closed forms from the dynamical-pion summary statements.
    pub strict_statement: bool,
    /// Fix the OPE range (lattice spacings) instead of solving for it.
    pub ell: Option<usize>,
    /// Fix the pion register width instead of deriving it.
    pub n_b: Option<u32>,
}

impl TaskSpec {
    /// The crossing-time benchmark at the reference lattice.
    pub fn crossing_reference(model: ModelKind, encoding: Encoding, convention: Convention) -> Self {
        TaskSpec {
            task: TaskKind::Evolve,
            model,
            encoding,
            order: 1,
            l: 10,
            a_fm: 2.2,
            eta: 40.0,
            e_kin: Some(10.0),
            delta_e: None,
            e_max: 140.0,
            success_prob: None,
            eps: 0.1,
            convention,
            strict_statement: false,
            ell: None,
            n_b: None,
        }
    }

    pub fn qpe_reference(model: ModelKind, encoding: Encoding, convention: Convention) -> Self {
        TaskSpec {
            task: TaskKind::Qpe,
            e_kin: None,
            delta_e: Some(1.0),
            success_prob: Some(0.3),
            ..Self::crossing_reference(model, encoding, convention)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(Error::Domain("L must be at least 1".into()));
        }
        if !(self.a_fm > 0.0) {
            return Err(Error::Domain(format!("a_fm must be positive, got {}", self.a_fm)));
        }
        if !(self.eta >= 0.0) {
            return Err(Error::Domain(format!("eta must be nonnegative, got {}", self.eta)));
        }
        if !(self.e_max > 0.0) {
            return Err(Error::Domain(format!("e_max must be positive, got {}", self.e_max)));
        }
        if self.model != ModelKind::Pionless && self.encoding != Encoding::VerstraeteCirac {
            return Err(Error::Unsupported(format!("model {} is costed with the vc encoding only", self.model)));
        }
        if self.model != ModelKind::Pionless && self.order != 1 {
            return Err(Error::Unsupported(format!("model {} has bounds for order 1 only", self.model)));
        }
        if self.encoding == Encoding::JordanWigner {
            return Err(Error::Unsupported("no step costs for the jw encoding".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CostReport {
    pub schema_version: u32,
    pub task: TaskKind,
    pub model: ModelKind,
    pub encoding: Encoding,
    pub order: u32,
    pub convention: Convention,
    /// Evolution time in MeV⁻¹ (per controlled-U for QPE).
    pub t: f64,
    /// Trotter steps for the evolution, or per controlled-U for QPE.
    pub r: f64,
    /// Controlled-U applications summed over iterative QPE rounds.
    pub applications: Option<u64>,
    pub total_steps: f64,
    pub step: StepCost,
    pub depth_total: f64,
    pub rz_total: f64,
    pub t_count: Option<f64>,
    pub qubits: u64,
    pub ancillas: u64,
    pub ledger: ErrorLedger,
    pub bound: BoundReport,
    pub ell: Option<usize>,
    pub n_b: Option<u32>,
    pub digitization: Option<DigitizationSpec>,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub notes: Vec<String>,
}

/// `a L √(M / 2E_kin)` in MeV⁻¹.
pub fn crossing_time(a_fm: f64, l: usize, e_kin: f64) -> Result<f64> {
    if !(a_fm > 0.0 && e_kin > 0.0) || l == 0 {
        return Err(Error::Domain("crossing time needs positive a, L and E_kin".into()));
    }
    Ok(convert_length(a_fm) * l as f64 * (M / (2.0 * e_kin)).sqrt())
}

/// Ancilla bits for `m`-bit precision with failure probability `delta`.
pub fn qpe_ancilla_bits(m: u32, delta: f64) -> Result<u32> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("failure probability must be in (0, 1), got {delta}")));
    }
    Ok(m + (1.0 / (2.0 * delta) + 0.5).log2().ceil() as u32)
}

struct Core {
    bound: BoundReport,
    r: f64,
    ell: Option<usize>,
    n_b: Option<u32>,
    digitization: Option<DigitizationSpec>,
    notes: Vec<String>,
}

/// Budget split → cutoffs → commutator bound → step count.
fn solve_steps(spec: &TaskSpec, t: f64, ledger: &ErrorLedger, energy: f64) -> Result<Core> {
    let a = convert_length(spec.a_fm);
    let mut notes = Vec::new();
    let (bound, ell, n_b, digitization) = match spec.model {
        ModelKind::Pionless => {
            let p = PionlessParams::tabulated(spec.a_fm)?;
            let b = match spec.order {
                1 => pionless_p1_report(spec.eta, &p),
                2 => pionless_p2_report(spec.eta, &p),
                o => return Err(Error::Unsupported(format!("pionless bounds exist for p = 1, 2; got {o}"))),
            };
            (b, None, None, None)
        }
        ModelKind::Ope => {
            let trunc = ledger.truncation.expect("ope ledger has a truncation channel");
            let k = match spec.ell {
                Some(k) => {
                    if k == 0 {
                        return Err(Error::Domain("ell must be at least one lattice spacing".into()));
                    }
                    notes.push(format!("ell fixed at {k} spacings"));
                    k
                }
                None => choose_ope_cutoff(trunc, t, spec.eta, a)?,
            };
            let p = OpeParams::standard(spec.a_fm, k);
            if (spec.a_fm - 2.0).abs() > 0.05 {
                notes.push("contact couplings quoted at a = (100 MeV)^-1".into());
            }
            let b = ope_p1_bound(
                spec.eta,
                &OpeBoundInputs { h: p.h, c: p.c, c_i2: p.c_i2, a },
                &ShellTable::within(k),
            );
            (b, Some(k), None, None)
        }
        ModelKind::Dynpi => {
            let p = DynPiParams::standard(spec.a_fm);
            let eps_cut = ledger.eps_cut.expect("dynpi ledger has a cutoff channel");
            let dig = boson_cutoffs(&BosonCutoffInputs {
                eta: spec.eta,
                e: energy,
                eps_cut,
                a,
                l: spec.l,
                c: p.c,
                c_i2: p.c_i2,
            })?;
            let nb = match spec.n_b {
                Some(nb) => {
                    if nb == 0 {
                        return Err(Error::Domain("n_b must be at least 1".into()));
                    }
                    notes.push(format!("n_b fixed at {nb} (derived {})", dig.n_b));
                    nb
                }
                None => dig.n_b,
            };
            if (spec.a_fm - 2.0).abs() > 0.05 {
                notes.push("contact couplings quoted at a = (100 MeV)^-1".into());
            }
            let b = dynpi_p1_bound(
                spec.eta,
                &DynPiBoundInputs { h: p.h, c: p.c, c_i2: p.c_i2, a, l: spec.l },
                &dig,
            );
            (b, None, Some(nb), Some(dig))
        }
    };
    let r = steps_for_budget(spec.order, t, bound.coefficient(), ledger.product)?;
    Ok(Core { bound, r, ell, n_b, digitization, notes })
}

fn step_cost(spec: &TaskSpec, core: &Core, controlled: bool) -> Result<StepCost> {
    Ok(match spec.model {
        ModelKind::Pionless => pionless_step_cost(spec.encoding, spec.order, controlled, spec.l)?,
        ModelKind::Ope => ope_step_cost(core.ell.unwrap(), spec.l, controlled),
        ModelKind::Dynpi => {
            let form = if spec.strict_statement { DynPiForm::Statement } else { DynPiForm::Derived };
            dynpi_step_cost(core.n_b.unwrap(), spec.l, controlled, form)
        }
    })
}

pub fn estimate_evolution(spec: &TaskSpec) -> Result<CostReport> {
    spec.validate()?;
    let e_kin = spec
        .e_kin
        .ok_or_else(|| Error::Config("evolution task needs e_kin".into()))?;
    let t = crossing_time(spec.a_fm, spec.l, e_kin)?;
    if !(spec.eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {}", spec.eps)));
    }
    let ledger = compose_total_error(spec.model, spec.convention, spec.eps)?;
    let core = solve_steps(spec, t, &ledger, spec.e_max)?;
    let step = step_cost(spec, &core, false)?;
    let r = core.r;
    let rz_total = r * step.rz_count as f64;
    let t_count = match ledger.synthesis {
        Some(eps_syn) if rz_total >= 1.0 => Some(t_synthesis(rz_total, eps_syn)?),
        _ => None,
    };
    let qubits = qubit_count(spec.model, spec.encoding, spec.l, core.n_b.unwrap_or(0), TaskKind::Evolve)?;
    Ok(CostReport {
        schema_version: SCHEMA_VERSION,
        task: TaskKind::Evolve,
        model: spec.model,
        encoding: spec.encoding,
        order: spec.order,
        convention: spec.convention,
        t,
        r: core.r,
        applications: None,
        total_steps: r,
        step,
        depth_total: r * step.depth_2q as f64,
        rz_total,
        t_count,
        qubits,
        ancillas: 0,
        ledger,
        bound: core.bound,
        ell: core.ell,
        n_b: core.n_b,
        digitization: core.digitization,
        m: None,
        n: None,
        notes: core.notes,
    })
}

pub fn estimate_qpe(spec: &TaskSpec) -> Result<CostReport> {
    spec.validate()?;
    let de = spec
        .delta_e
        .ok_or_else(|| Error::Config("qpe task needs delta_e".into()))?;
    let success = spec
        .success_prob
        .ok_or_else(|| Error::Config("qpe task needs success_prob".into()))?;
    if !(de > 0.0) || de >= spec.e_max {
        return Err(Error::Domain(format!(
            "precision delta_e = {de} MeV must lie in (0, e_max = {} MeV)",
            spec.e_max
        )));
    }
    let m = (spec.e_max / de).log2().ceil().max(1.0) as u32;
    let n = qpe_ancilla_bits(m, 1.0 - success)?;
    let t = 2.0 * PI / spec.e_max;
    let ledger = compose_total_error(spec.model, spec.convention, qpe_error_total(m))?;
    let core = solve_steps(spec, t, &ledger, spec.e_max)?;
    let step = step_cost(spec, &core, true)?;
    let applications = (1u64 << n.min(63)) - 1;
    let total_steps = applications as f64 * core.r;
    let rz_total = total_steps * step.rz_count as f64;
    let t_count = match ledger.synthesis {
        Some(chan) => {
            // every controlled-U gets the same per-rotation accuracy
            let per_gate = chan / (core.r * step.rz_count as f64);
            Some(t_synthesis(rz_total, per_gate * rz_total)?)
        }
        None => None,
    };
    let qubits = qubit_count(spec.model, spec.encoding, spec.l, core.n_b.unwrap_or(0), TaskKind::Qpe)?;
    Ok(CostReport {
        schema_version: SCHEMA_VERSION,
        task: TaskKind::Qpe,
        model: spec.model,
        encoding: spec.encoding,
        order: spec.order,
        convention: spec.convention,
        t,
        r: core.r,
        applications: Some(applications),
        total_steps,
        step,
        depth_total: total_steps * step.depth_2q as f64,
        rz_total,
        t_count,
        qubits,
        ancillas: 1,
        ledger,
        bound: core.bound,
        ell: core.ell,
        n_b: core.n_b,
        digitization: core.digitization,
        m: Some(m),
        n: Some(n),
        notes: core.notes,
    })
}

pub fn estimate(spec: &TaskSpec) -> Result<CostReport> {
    match spec.task {
        TaskKind::Evolve => estimate_evolution(spec),
        TaskKind::Qpe => estimate_qpe(spec),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Eta,
    L,
    Epsilon,
    Ell,
    NB,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Eta => "eta",
            SweepAxis::L => "L",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::Ell => "ell",
            SweepAxis::NB => "n_b",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "eta" => Some(SweepAxis::Eta),
            "L" | "l" => Some(SweepAxis::L),
            "epsilon" | "eps" => Some(SweepAxis::Epsilon),
            "ell" => Some(SweepAxis::Ell),
            "n_b" | "nb" => Some(SweepAxis::NB),
            _ => None,
        }
    }

    fn apply(self, spec: &TaskSpec, v: f64) -> Result<TaskSpec> {
        let mut s = spec.clone();
        let whole = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Domain(format!("{} must be a whole number, got {v}", self.name())))
            }
        };
        match self {
            SweepAxis::Eta => s.eta = v,
            SweepAxis::L => s.l = whole(v)?,
            SweepAxis::Epsilon => s.eps = v,
            SweepAxis::Ell => s.ell = Some(whole(v)?),
            SweepAxis::NB => s.n_b = Some(whole(v)? as u32),
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub result: std::result::Result<CostReport, String>,
}

/// Evaluate every grid point; failures are kept as row-level errors and
/// the output order follows the grid regardless of `jobs`.
pub fn sweep(spec: &TaskSpec, axis: SweepAxis, grid: &[f64], jobs: usize) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        grid.par_iter()
            .map(|&v| SweepRow {
                axis,
                value: v,
                result: axis
                    .apply(spec, v)
                    .and_then(|s| estimate(&s))
                    .map_err(|e| e.to_string()),
            })
            .collect()
    });
    Ok(rows)
}

/// Inclusive arithmetic grid `from, from+step, ..., ≤ to`.
pub fn linear_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || to < from {
        return Err(Error::Config(format!("empty grid from {from} to {to} step {step}")));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| from + i as f64 * step).collect())
}
