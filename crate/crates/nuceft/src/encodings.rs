//! Fermion-to-qubit encodings on the open cubic lattice: Jordan-Wigner,
//! Verstraete-Cirac (two auxiliary modes per site) and a stacked compact
//! edge/vertex encoding with face qubits.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FermionSum;
use crate::lattice::{Axis, Bond, LatticeSpec, Site, Species};
use crate::pauli::{Pauli, PauliString, PauliSum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    #[serde(rename = "jw")]
    JordanWigner,
    #[serde(rename = "vc")]
    VerstraeteCirac,
    Compact,
}

impl Encoding {
    pub fn name(self) -> &'static str {
        match self {
            Encoding::JordanWigner => "jw",
            Encoding::VerstraeteCirac => "vc",
            Encoding::Compact => "compact",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Annihilate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum FaceType {
    Xy,
    Xz,
    Yz,
}

/// Lower corner and orientation of a lattice plaquette.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Face {
    kind: FaceType,
    x: usize,
    y: usize,
    z: usize,
}

impl Face {
    fn is_odd(&self) -> bool {
        let s = match self.kind {
            FaceType::Xy => self.x + self.y,
            FaceType::Xz => self.x + self.z,
            FaceType::Yz => self.y + self.z,
        };
        s % 2 == 0
    }
}

#[derive(Clone, Debug)]
pub struct QubitLayout {
    pub encoding: Encoding,
    pub lattice: LatticeSpec,
    /// Nominal qubits per site (4, 6 or 10).
    pub qubits_per_site: usize,
    pub total_qubits: usize,
    /// Compact only: qubits reserved per species block.
    block: usize,
    faces: HashMap<Face, usize>,
}

impl QubitLayout {
    pub fn new(encoding: Encoding, lattice: LatticeSpec) -> Self {
        let n = lattice.n_sites();
        match encoding {
            Encoding::JordanWigner => QubitLayout {
                encoding,
                lattice,
                qubits_per_site: 4,
                total_qubits: 4 * n,
                block: 0,
                faces: HashMap::new(),
            },
            Encoding::VerstraeteCirac => QubitLayout {
                encoding,
                lattice,
                qubits_per_site: 6,
                total_qubits: 6 * n,
                block: 0,
                faces: HashMap::new(),
            },
            Encoding::Compact => {
                let faces = odd_faces(&lattice);
                // 2.5 qubits per mode: n vertices plus ceil(1.5 n) face slots
                let slots = (3 * n).div_ceil(2).max(faces.len());
                let block = n + slots;
                let faces = faces.into_iter().enumerate().map(|(i, f)| (f, i)).collect();
                QubitLayout {
                    encoding,
                    lattice,
                    qubits_per_site: 10,
                    total_qubits: 4 * block,
                    block,
                    faces,
                }
            }
        }
    }

    /// Qubit holding the occupation of `(site, species)`.
    pub fn mode_qubit(&self, s: Site, sp: Species) -> usize {
        let r = self.lattice.raster(s);
        match self.encoding {
            Encoding::JordanWigner => 4 * r + sp.index(),
            Encoding::VerstraeteCirac => 6 * r + sp.index(),
            Encoding::Compact => sp.index() * self.block + r,
        }
    }

    fn aux_qubit(&self, s: Site, nu: bool) -> usize {
        6 * self.lattice.raster(s) + if nu { 5 } else { 4 }
    }

    fn face_qubit(&self, f: &Face, sp: Species) -> Option<usize> {
        self.faces
            .get(f)
            .map(|i| sp.index() * self.block + self.lattice.n_sites() + i)
    }

    /// Number of face qubits actually used per species (compact only).
    pub fn used_face_qubits(&self) -> usize {
        self.faces.len()
    }
}

fn odd_faces(l: &LatticeSpec) -> Vec<Face> {
    let mut out = Vec::new();
    for kind in [FaceType::Xy, FaceType::Xz, FaceType::Yz] {
        let (mx, my, mz) = match kind {
            FaceType::Xy => (l.lx.saturating_sub(1), l.ly.saturating_sub(1), l.lz),
            FaceType::Xz => (l.lx.saturating_sub(1), l.ly, l.lz.saturating_sub(1)),
            FaceType::Yz => (l.lx, l.ly.saturating_sub(1), l.lz.saturating_sub(1)),
        };
        for z in 0..mz {
            for y in 0..my {
                for x in 0..mx {
                    let f = Face { kind, x, y, z };
                    if f.is_odd() {
                        out.push(f);
                    }
                }
            }
        }
    }
    out
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `Z` on every qubit below `q`, then `p` on `q`.
fn jw_string(n: usize, q: usize, p: Pauli) -> PauliString {
    let mut ops: Vec<(usize, Pauli)> = (0..q).map(|k| (k, Pauli::Z)).collect();
    ops.push((q, p));
    PauliString::from_ops(n, &ops)
}

/// `(X + iY)/2` (annihilate) or `(X - iY)/2` (create) behind a JW string.
fn jw_ladder(n: usize, q: usize, kind: LadderKind) -> PauliSum {
    let sy = match kind {
        LadderKind::Annihilate => 0.5,
        LadderKind::Create => -0.5,
    };
    let mut s = PauliSum::from_string(c(0.5, 0.0), jw_string(n, q, Pauli::X));
    s.add_term(c(0.0, sy), &jw_string(n, q, Pauli::Y));
    s
}

/// Ladder operator for one mode. The compact encoding only represents
/// parity-preserving composites and rejects this request.
pub fn encode_ladder(
    layout: &QubitLayout,
    site: Site,
    sp: Species,
    kind: LadderKind,
) -> Result<PauliSum> {
    check_site(layout, site)?;
    match layout.encoding {
        Encoding::JordanWigner | Encoding::VerstraeteCirac => Ok(jw_ladder(
            layout.total_qubits,
            layout.mode_qubit(site, sp),
            kind,
        )),
        Encoding::Compact => Err(Error::Unsupported(
            "compact encoding has no single ladder operators".into(),
        )),
    }
}

fn check_site(layout: &QubitLayout, s: Site) -> Result<()> {
    if layout.lattice.contains(s) {
        Ok(())
    } else {
        Err(Error::Geometry(format!("site {s:?} outside lattice")))
    }
}

/// Auxiliary Majorana operators of the VC encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Majorana {
    Mu,
    MuBar,
    Nu,
    NuBar,
}

pub fn vc_majorana(layout: &QubitLayout, s: Site, m: Majorana) -> Result<PauliString> {
    if layout.encoding != Encoding::VerstraeteCirac {
        return Err(Error::Unsupported("auxiliary Majoranas exist only in VC".into()));
    }
    check_site(layout, s)?;
    let n = layout.total_qubits;
    Ok(match m {
        Majorana::Mu => jw_string(n, layout.aux_qubit(s, false), Pauli::X),
        Majorana::MuBar => jw_string(n, layout.aux_qubit(s, false), Pauli::Y),
        Majorana::Nu => jw_string(n, layout.aux_qubit(s, true), Pauli::X),
        Majorana::NuBar => jw_string(n, layout.aux_qubit(s, true), Pauli::Y),
    })
}

/// `i * first * second` for two Majorana strings, as a Hermitian Pauli.
fn aux_pair(first: &PauliString, second: &PauliString) -> Result<PauliString> {
    let p = first.multiply(second)?;
    Ok(p.clone().with_phase(p.phase() + 1))
}

/// Plain `a†(i)a(j) + a†(j)a(i)` through JW-style ladders.
fn plain_hop(layout: &QubitLayout, bond: &Bond, sp: Species) -> Result<PauliSum> {
    let n = layout.total_qubits;
    let (qa, qb) = (layout.mode_qubit(bond.a, sp), layout.mode_qubit(bond.b, sp));
    let ad_a = jw_ladder(n, qa, LadderKind::Create);
    let a_a = jw_ladder(n, qa, LadderKind::Annihilate);
    let ad_b = jw_ladder(n, qb, LadderKind::Create);
    let a_b = jw_ladder(n, qb, LadderKind::Annihilate);
    ad_a.mul(&a_b)?.add(&ad_b.mul(&a_a)?)
}

/// Auxiliary factor attached to a VC hop along y or z, ordered by raster index.
fn vc_bond_stabilizer(layout: &QubitLayout, p: Site, q: Site, nu: bool) -> Result<PauliString> {
    let (lo, hi) = if layout.lattice.raster(p) < layout.lattice.raster(q) {
        (p, q)
    } else {
        (q, p)
    };
    let (m, mb) = if nu {
        (Majorana::Nu, Majorana::NuBar)
    } else {
        (Majorana::Mu, Majorana::MuBar)
    };
    aux_pair(&vc_majorana(layout, lo, m)?, &vc_majorana(layout, hi, mb)?)
}

/// Hopping term `a†(i)a(j) + h.c.` for nearest neighbours.
pub fn encode_hopping(layout: &QubitLayout, i: Site, j: Site, sp: Species) -> Result<PauliSum> {
    let bond = layout.lattice.bond_between(i, j)?;
    match layout.encoding {
        Encoding::JordanWigner => plain_hop(layout, &bond, sp),
        Encoding::VerstraeteCirac => {
            let h = plain_hop(layout, &bond, sp)?;
            match bond.axis {
                Axis::X => Ok(h),
                Axis::Y | Axis::Z => {
                    let p = vc_bond_stabilizer(layout, bond.a, bond.b, bond.axis == Axis::Z)?;
                    h.mul(&PauliSum::from_string(c(1.0, 0.0), p))
                }
            }
        }
        Encoding::Compact => compact_hop(layout, &bond, sp),
    }
}

/// Edge orientation: returns `(tail, head)`.
fn compact_orientation(bond: &Bond) -> (Site, Site) {
    let (a, b) = (bond.a, bond.b);
    let s = match bond.axis {
        Axis::X => a.y + a.z,
        Axis::Y => a.x + a.z,
        Axis::Z => a.x + a.y,
    };
    if s % 2 == 0 {
        (a, b)
    } else {
        (b, a)
    }
}

/// Odd faces bordering an edge, each with the Pauli it carries for that edge.
fn compact_edge_faces(layout: &QubitLayout, bond: &Bond) -> Vec<(Face, Pauli)> {
    let a = bond.a;
    let lower = |v: usize| -> Vec<usize> {
        let mut o = Vec::new();
        if v > 0 {
            o.push(v - 1);
        }
        o.push(v);
        o
    };
    let mut cands: Vec<(Face, Pauli)> = Vec::new();
    match bond.axis {
        Axis::X => {
            for y0 in lower(a.y) {
                cands.push((Face { kind: FaceType::Xy, x: a.x, y: y0, z: a.z }, Pauli::X));
            }
            for z0 in lower(a.z) {
                cands.push((Face { kind: FaceType::Xz, x: a.x, y: a.y, z: z0 }, Pauli::X));
            }
        }
        Axis::Y => {
            for x0 in lower(a.x) {
                cands.push((Face { kind: FaceType::Xy, x: x0, y: a.y, z: a.z }, Pauli::Y));
            }
            for z0 in lower(a.z) {
                cands.push((Face { kind: FaceType::Yz, x: a.x, y: a.y, z: z0 }, Pauli::X));
            }
        }
        Axis::Z => {
            for x0 in lower(a.x) {
                cands.push((Face { kind: FaceType::Xz, x: x0, y: a.y, z: a.z }, Pauli::Y));
            }
            for y0 in lower(a.y) {
                cands.push((Face { kind: FaceType::Yz, x: a.x, y: y0, z: a.z }, Pauli::Y));
            }
        }
    }
    cands
        .into_iter()
        .filter(|(f, _)| layout.faces.contains_key(f))
        .collect()
}

/// Edge operator `E = X_tail Y_head P_faces` of the compact code.
pub fn compact_edge(layout: &QubitLayout, i: Site, j: Site, sp: Species) -> Result<PauliString> {
    if layout.encoding != Encoding::Compact {
        return Err(Error::Unsupported("edge operators exist only in the compact encoding".into()));
    }
    let bond = layout.lattice.bond_between(i, j)?;
    let (t, h) = compact_orientation(&bond);
    let mut ops = vec![
        (layout.mode_qubit(t, sp), Pauli::X),
        (layout.mode_qubit(h, sp), Pauli::Y),
    ];
    for (f, p) in compact_edge_faces(layout, &bond) {
        ops.push((layout.face_qubit(&f, sp).expect("face registered"), p));
    }
    Ok(PauliString::from_ops(layout.total_qubits, &ops))
}

/// Vertex operator `V = Z` of the compact code.
pub fn compact_vertex(layout: &QubitLayout, s: Site, sp: Species) -> Result<PauliString> {
    check_site(layout, s)?;
    Ok(PauliString::single(layout.total_qubits, layout.mode_qubit(s, sp), Pauli::Z))
}

fn compact_hop(layout: &QubitLayout, bond: &Bond, sp: Species) -> Result<PauliSum> {
    let (t, h) = compact_orientation(bond);
    let e = PauliSum::from_string(c(1.0, 0.0), compact_edge(layout, t, h, sp)?);
    let vh = PauliSum::from_string(c(1.0, 0.0), compact_vertex(layout, h, sp)?);
    let vt = PauliSum::from_string(c(1.0, 0.0), compact_vertex(layout, t, sp)?);
    // -(i/2) E (V_head - V_tail)
    Ok(e.mul(&vh.sub(&vt)?)?.scale(c(0.0, -0.5)))
}

/// `N = (1 - Z)/2` on the species qubit.
pub fn encode_number(layout: &QubitLayout, s: Site, sp: Species) -> Result<PauliSum> {
    check_site(layout, s)?;
    let n = layout.total_qubits;
    let mut out = PauliSum::identity(n, 0.5);
    out.add_term(c(-0.5, 0.0), &PauliString::single(n, layout.mode_qubit(s, sp), Pauli::Z));
    Ok(out)
}

/// VC stabilizers `i mu(a) mubar(b)` along the mu path in every xy plane and
/// `i nu(a) nubar(b)` along the nu path in every yz plane. The mu path runs
/// up each y column in turn (x ascending), the nu path up each z column in
/// turn (y ascending).
pub fn vc_stabilizers(layout: &QubitLayout) -> Result<Vec<PauliString>> {
    if layout.encoding != Encoding::VerstraeteCirac {
        return Err(Error::Unsupported("stabilizers exist only in the VC encoding".into()));
    }
    let l = layout.lattice;
    let mut out = Vec::new();
    for z in 0..l.lz {
        let path: Vec<Site> = (0..l.lx)
            .flat_map(|x| (0..l.ly).map(move |y| Site::new(x, y, z)))
            .collect();
        for w in path.windows(2) {
            out.push(aux_pair(
                &vc_majorana(layout, w[0], Majorana::Mu)?,
                &vc_majorana(layout, w[1], Majorana::MuBar)?,
            )?);
        }
    }
    for x in 0..l.lx {
        let path: Vec<Site> = (0..l.ly)
            .flat_map(|y| (0..l.lz).map(move |z| Site::new(x, y, z)))
            .collect();
        for w in path.windows(2) {
            out.push(aux_pair(
                &vc_majorana(layout, w[0], Majorana::Nu)?,
                &vc_majorana(layout, w[1], Majorana::NuBar)?,
            )?);
        }
    }
    Ok(out)
}

/// Encode a fermionic operator term by term through ladder products
/// (JW, or VC physical modes without auxiliary dressing).
pub fn encode_fermion_sum(layout: &QubitLayout, h: &FermionSum) -> Result<PauliSum> {
    if layout.encoding == Encoding::Compact {
        return Err(Error::Unsupported(
            "compact encoding supports only hopping and number terms".into(),
        ));
    }
    let n = layout.total_qubits;
    let l = layout.lattice;
    let q_of = |m: u32| {
        let s = l.site_of(m as usize / 4);
        layout.mode_qubit(s, Species::from_index(m as usize % 4))
    };
    let mut out = PauliSum::zero(n);
    for t in h.terms() {
        let mut op = PauliSum::identity(n, 1.0);
        for &m in &t.create {
            op = op.mul(&jw_ladder(n, q_of(m), LadderKind::Create))?;
        }
        for &m in &t.annihilate {
            op = op.mul(&jw_ladder(n, q_of(m), LadderKind::Annihilate))?;
        }
        for &m in &t.number {
            let mut nm = PauliSum::identity(n, 0.5);
            nm.add_term(c(-0.5, 0.0), &PauliString::single(n, q_of(m), Pauli::Z));
            op = op.mul(&nm)?;
        }
        out = out.add(&op.scale(t.weight))?;
    }
    Ok(out)
}

/// Largest hopping weight per axis over all species and bonds.
pub fn max_hopping_weights(layout: &QubitLayout) -> Result<[usize; 3]> {
    let mut w = [0usize; 3];
    for b in layout.lattice.bonds() {
        for sp in Species::ALL {
            let h = encode_hopping(layout, b.a, b.b, sp)?;
            let k = b.axis.index();
            w[k] = w[k].max(h.max_weight());
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jw_first_mode_has_no_string() {
        let l = LatticeSpec::new(2, 1, 1, 1.0).unwrap();
        let lay = QubitLayout::new(Encoding::JordanWigner, l);
        let a = encode_ladder(&lay, Site::new(0, 0, 0), Species::UpP, LadderKind::Annihilate).unwrap();
        assert_eq!(a.len(), 2);
        let x0 = PauliString::single(8, 0, Pauli::X);
        let y0 = PauliString::single(8, 0, Pauli::Y);
        assert_eq!(a.coefficient(&x0), c(0.5, 0.0));
        assert_eq!(a.coefficient(&y0), c(0.0, 0.5));
    }

    #[test]
    fn compact_rejects_ladders() {
        let l = LatticeSpec::cubic(2, 1.0).unwrap();
        let lay = QubitLayout::new(Encoding::Compact, l);
        let r = encode_ladder(&lay, Site::new(0, 0, 0), Species::UpP, LadderKind::Create);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn qubit_totals() {
        let l = LatticeSpec::cubic(10, 2.2).unwrap();
        assert_eq!(QubitLayout::new(Encoding::VerstraeteCirac, l).total_qubits, 6000);
        assert_eq!(QubitLayout::new(Encoding::Compact, l).total_qubits, 10000);
    }

    #[test]
    fn non_neighbours_rejected() {
        let l = LatticeSpec::cubic(2, 1.0).unwrap();
        let lay = QubitLayout::new(Encoding::VerstraeteCirac, l);
        let r = encode_hopping(&lay, Site::new(0, 0, 0), Site::new(1, 1, 0), Species::UpP);
        assert!(matches!(r, Err(Error::Geometry(_))));
    }
}
