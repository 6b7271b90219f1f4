//! Number-preserving fermionic operators (NPFOs), exact Fock-space
//! matrices, fixed-particle-number sectors, semi-norms and exact
//! product-formula errors.
//!
//! Canonical term layout: `a†(c_1)..a†(c_k) a(d_1)..a(d_k) N(n_1)..N(n_m)`
//! with each list ascending and the three lists pairwise disjoint.
//! Basis-state bit `m` is the occupation of mode `m`; the sign of a ladder
//! operator on mode `m` is `(-1)^(occupied modes below m)`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default mode cap for dense sector work.
pub const MODE_CAP: usize = 16;

const EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OpKind {
    Create,
    Annihilate,
    Number,
}

/// One factor of a raw fermionic product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub mode: u32,
    pub kind: OpKind,
}

impl Factor {
    pub fn create(mode: u32) -> Self {
        Factor {
            mode,
            kind: OpKind::Create,
        }
    }
    pub fn annihilate(mode: u32) -> Self {
        Factor {
            mode,
            kind: OpKind::Annihilate,
        }
    }
    pub fn number(mode: u32) -> Self {
        Factor {
            mode,
            kind: OpKind::Number,
        }
    }
}

type Key = (Vec<u32>, Vec<u32>, Vec<u32>);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FermionTerm {
    pub weight: Complex64,
    pub create: Vec<u32>,
    pub annihilate: Vec<u32>,
    pub number: Vec<u32>,
}

impl FermionTerm {
    /// Number of distinct modes touched.
    pub fn locality(&self) -> usize {
        self.create.len() + self.annihilate.len() + self.number.len()
    }

    pub fn modes(&self) -> Vec<u32> {
        let mut m: Vec<u32> = self
            .create
            .iter()
            .chain(&self.annihilate)
            .chain(&self.number)
            .copied()
            .collect();
        m.sort_unstable();
        m
    }

    pub fn is_identity(&self) -> bool {
        self.locality() == 0
    }

    fn raw(&self) -> Vec<(u32, bool)> {
        let mut v: Vec<(u32, bool)> = self.create.iter().map(|&m| (m, true)).collect();
        v.extend(self.annihilate.iter().map(|&m| (m, false)));
        for &m in &self.number {
            v.push((m, true));
            v.push((m, false));
        }
        v
    }

    /// Act on an occupation bit pattern; `None` when the result vanishes.
    fn apply(&self, state: u64) -> Option<(f64, u64)> {
        for &m in &self.number {
            if state >> m & 1 == 0 {
                return None;
            }
        }
        let mut s = state;
        let mut sign = 1.0;
        for &m in self.annihilate.iter().rev() {
            if s >> m & 1 == 0 {
                return None;
            }
            if (s & ((1u64 << m) - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            s &= !(1u64 << m);
        }
        for &m in self.create.iter().rev() {
            if s >> m & 1 == 1 {
                return None;
            }
            if (s & ((1u64 << m) - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            s |= 1u64 << m;
        }
        Some((sign, s))
    }
}

/// Sum of canonical NPFOs over a declared mode universe.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionSum {
    n_modes: usize,
    terms: BTreeMap<Key, Complex64>,
}

impl FermionSum {
    pub fn zero(n_modes: usize) -> Self {
        FermionSum {
            n_modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_modes: usize, w: f64) -> Self {
        let mut s = Self::zero(n_modes);
        s.add_key(Complex64::new(w, 0.0), (vec![], vec![], vec![]));
        s
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_key(&mut self, w: Complex64, key: Key) {
        let e = self.terms.entry(key.clone()).or_insert(Complex64::new(0.0, 0.0));
        *e += w;
        if e.norm() <= EPS {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = FermionTerm> + '_ {
        self.terms.iter().map(|((c, a, n), w)| FermionTerm {
            weight: *w,
            create: c.clone(),
            annihilate: a.clone(),
            number: n.clone(),
        })
    }

    /// Add `w` times the raw product `factors`, normal ordered (with
    /// contractions).
    pub fn add_product(&mut self, w: Complex64, factors: &[Factor]) {
        let raw = expand(factors);
        for (c, key) in normal_order_raw(w, raw, true) {
            self.add_key(c, key);
        }
    }

    /// Add `w :factors:` where `::` reorders with signs but drops every
    /// contraction.
    pub fn add_normal_ordered(&mut self, w: Complex64, factors: &[Factor]) {
        let raw = expand(factors);
        for (c, key) in normal_order_raw(w, raw, false) {
            self.add_key(c, key);
        }
    }

    pub fn add_term(&mut self, t: &FermionTerm) {
        self.add_key(
            t.weight,
            (t.create.clone(), t.annihilate.clone(), t.number.clone()),
        );
    }

    pub fn add(&self, other: &FermionSum) -> FermionSum {
        let mut out = self.clone();
        out.n_modes = self.n_modes.max(other.n_modes);
        for (k, w) in &other.terms {
            out.add_key(*w, k.clone());
        }
        out
    }

    pub fn scale(&self, k: Complex64) -> FermionSum {
        let mut out = Self::zero(self.n_modes);
        for (key, w) in &self.terms {
            out.add_key(*w * k, key.clone());
        }
        out
    }

    pub fn mul(&self, other: &FermionSum) -> FermionSum {
        let mut out = Self::zero(self.n_modes.max(other.n_modes));
        for a in self.terms() {
            let ra = a.raw();
            for b in other.terms() {
                let mut raw = ra.clone();
                raw.extend(b.raw());
                for (c, key) in normal_order_raw(a.weight * b.weight, raw, true) {
                    out.add_key(c, key);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> FermionSum {
        let mut out = Self::zero(self.n_modes);
        for ((c, a, n), w) in &self.terms {
            // reversing an ascending block of length k costs (-1)^{k(k-1)/2}
            let flips = c.len() * c.len().saturating_sub(1) / 2
                + a.len() * a.len().saturating_sub(1) / 2;
            let s = if flips % 2 == 1 { -1.0 } else { 1.0 };
            out.add_key(w.conj() * s, (a.clone(), c.clone(), n.clone()));
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.add(&self.adjoint().scale(Complex64::new(-1.0, 0.0)));
        d.terms.values().all(|w| w.norm() <= tol)
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.terms.values().map(|w| w.norm()).fold(0.0, f64::max)
    }

    pub fn max_locality(&self) -> usize {
        self.terms().map(|t| t.locality()).max().unwrap_or(0)
    }

    /// Total number operator over `n_modes` modes.
    pub fn total_number(n_modes: usize) -> FermionSum {
        let mut s = Self::zero(n_modes);
        for m in 0..n_modes as u32 {
            s.add_product(Complex64::new(1.0, 0.0), &[Factor::number(m)]);
        }
        s
    }

    /// Dense matrix of this operator inside an η sector.
    pub fn sector_matrix(&self, sector: &EtaSector) -> Result<DMatrix<Complex64>> {
        self.check_modes(sector.n_modes)?;
        let dim = sector.dim();
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (col, &s) in sector.basis.iter().enumerate() {
            for t in self.terms() {
                if let Some((sign, out)) = t.apply(s) {
                    let row = sector.index_of(out).ok_or_else(|| {
                        Error::Contract("operator does not preserve particle number".into())
                    })?;
                    m[(row, col)] += t.weight * sign;
                }
            }
        }
        Ok(m)
    }

    /// Full `2^n` Fock matrix (all particle numbers).
    pub fn fock_matrix(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n_modes > cap {
            return Err(Error::Size {
                what: "Fock-space modes",
                needed: self.n_modes,
                cap,
            });
        }
        let dim = 1usize << self.n_modes;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for s in 0..dim as u64 {
            for t in self.terms() {
                if let Some((sign, out)) = t.apply(s) {
                    m[(out as usize, s as usize)] += t.weight * sign;
                }
            }
        }
        Ok(m)
    }

    fn check_modes(&self, n: usize) -> Result<()> {
        let used = self
            .terms
            .keys()
            .flat_map(|(c, a, k)| c.iter().chain(a).chain(k))
            .map(|&m| m as usize + 1)
            .max()
            .unwrap_or(0);
        if used > n {
            Err(Error::Contract(format!(
                "term touches mode {} outside a {n}-mode sector",
                used - 1
            )))
        } else {
            Ok(())
        }
    }
}

fn expand(factors: &[Factor]) -> Vec<(u32, bool)> {
    let mut v = Vec::with_capacity(factors.len() * 2);
    for f in factors {
        match f.kind {
            OpKind::Create => v.push((f.mode, true)),
            OpKind::Annihilate => v.push((f.mode, false)),
            OpKind::Number => {
                v.push((f.mode, true));
                v.push((f.mode, false));
            }
        }
    }
    v
}

/// Normal order a raw ladder product into canonical NPFO keys.
/// `contract` selects CAR reordering (true) or the `::` convention (false).
fn normal_order_raw(w: Complex64, raw: Vec<(u32, bool)>, contract: bool) -> Vec<(Complex64, Key)> {
    let mut out = Vec::new();
    let mut work = vec![(w, raw)];
    while let Some((c, ops)) = work.pop() {
        let pos = ops.windows(2).position(|p| !p[0].1 && p[1].1);
        match pos {
            Some(p) => {
                if contract && ops[p].0 == ops[p + 1].0 {
                    let mut red = ops.clone();
                    red.drain(p..p + 2);
                    work.push((c, red));
                }
                let mut sw = ops;
                sw.swap(p, p + 1);
                work.push((-c, sw));
            }
            None => {
                if let Some(k) = canonical_key(c, &ops) {
                    out.push(k);
                }
            }
        }
    }
    out
}

/// Sort a normal-ordered product and pull matching pairs into number factors.
fn canonical_key(c: Complex64, ops: &[(u32, bool)]) -> Option<(Complex64, Key)> {
    let split = ops.iter().position(|o| !o.1).unwrap_or(ops.len());
    let mut cre: Vec<u32> = ops[..split].iter().map(|o| o.0).collect();
    let mut ann: Vec<u32> = ops[split..].iter().map(|o| o.0).collect();
    let mut sign = sort_sign(&mut cre)? * sort_sign(&mut ann)?;
    let mut num = Vec::new();
    loop {
        let shared = cre.iter().position(|m| ann.binary_search(m).is_ok());
        let Some(p) = shared else { break };
        let m = cre[p];
        let q = ann.binary_search(&m).unwrap();
        if (cre.len() - 1 - p + q) % 2 == 1 {
            sign = -sign;
        }
        cre.remove(p);
        ann.remove(q);
        num.push(m);
    }
    num.sort_unstable();
    Some((c * sign, (cre, ann, num)))
}

/// Ascending sort returning the permutation sign; `None` on a repeated mode.
fn sort_sign(v: &mut [u32]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|p| p[0] == p[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Normal order an arbitrary raw product into canonical NPFO form.
pub fn normal_order(n_modes: usize, factors: &[Factor]) -> FermionSum {
    let mut s = FermionSum::zero(n_modes);
    s.add_product(Complex64::new(1.0, 0.0), factors);
    s
}

/// `[a, b] = ab - ba` in canonical form.
pub fn fermion_commutator(a: &FermionSum, b: &FermionSum) -> FermionSum {
    a.mul(b).add(&b.mul(a).scale(Complex64::new(-1.0, 0.0)))
}

/// Occupation basis with exactly `eta` particles in `n_modes` modes.
#[derive(Clone, Debug)]
pub struct EtaSector {
    pub n_modes: usize,
    pub eta: usize,
    basis: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl EtaSector {
    pub fn new(n_modes: usize, eta: usize, cap: usize) -> Result<Self> {
        if n_modes > cap || n_modes > 63 {
            return Err(Error::Size {
                what: "sector modes",
                needed: n_modes,
                cap: cap.min(63),
            });
        }
        if eta > n_modes {
            return Err(Error::Domain(format!(
                "eta={eta} exceeds mode count {n_modes}"
            )));
        }
        let mut basis = Vec::new();
        if eta == 0 {
            basis.push(0);
        } else {
            // Gosper's hack walks every eta-subset in increasing order
            let mut v: u64 = (1u64 << eta) - 1;
            let limit = 1u64 << n_modes;
            while v < limit {
                basis.push(v);
                let t = v | (v - 1);
                let w = (!t & (!t).wrapping_neg()) - 1;
                v = (t + 1) | (w >> (v.trailing_zeros() + 1));
            }
        }
        let index = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        Ok(EtaSector {
            n_modes,
            eta,
            basis,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn index_of(&self, s: u64) -> Option<usize> {
        self.index.get(&s).copied()
    }
}

/// Largest singular value of `m`.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Fermionic semi-norm: spectral norm of `h` restricted to `eta` particles.
pub fn eta_seminorm(h: &FermionSum, eta: usize, cap: usize) -> Result<f64> {
    let sector = EtaSector::new(h.n_modes(), eta, cap)?;
    let m = h.sector_matrix(&sector)?;
    if m.is_empty() {
        return Ok(0.0);
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if (&m - m.adjoint()).iter().all(|z| z.norm() <= 1e-12 * (1.0 + scale)) {
        // Hermitian: eigenvalues are much cheaper than an SVD
        let x = m.symmetric_eigenvalues().iter().map(|l| l.abs()).fold(0.0, f64::max);
        if x.is_finite() {
            return Ok(x);
        }
        // the implicit QR iteration occasionally breaks down on degenerate spectra
        Ok(spectral_norm(&m))
    } else {
        Ok(spectral_norm(&m))
    }
}

fn check_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    let scale = 1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let d = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if d > 1e-9 * scale {
        Err(Error::Contract(format!(
            "layer is not Hermitian (max |H - H^dagger| = {d:.3e})"
        )))
    } else {
        Ok(())
    }
}

/// `exp(-i tau H)` for Hermitian `H` via eigendecomposition.
pub fn expm_hermitian(h: &DMatrix<Complex64>, tau: f64) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(0.0, -l * tau).exp()));
    v * d * v.adjoint()
}

/// First- or second-order product formula for one step of length `tau`.
pub fn product_formula_step(
    layers: &[DMatrix<Complex64>],
    tau: f64,
    order: u32,
) -> Result<DMatrix<Complex64>> {
    let dim = layers.first().map(|m| m.nrows()).unwrap_or(0);
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    match order {
        1 => {
            // P1(t) = e^{-itH_G} ... e^{-itH_1}
            for l in layers {
                u = expm_hermitian(l, tau) * u;
            }
        }
        2 => {
            for l in layers {
                u = expm_hermitian(l, tau / 2.0) * u;
            }
            for l in layers.iter().rev() {
                u = expm_hermitian(l, tau / 2.0) * u;
            }
        }
        p => return Err(Error::Domain(format!("exact oracle supports p in {{1,2}}, got {p}"))),
    }
    Ok(u)
}

/// `|| e^{-itH} - P_p(t/r)^r ||` restricted to the η sector.
pub fn exact_evolution_error(
    layers: &[FermionSum],
    t: f64,
    order: u32,
    r: u64,
    eta: usize,
    cap: usize,
) -> Result<f64> {
    if layers.is_empty() {
        return Err(Error::Domain("no layers".into()));
    }
    if r == 0 {
        return Err(Error::Domain("r must be at least 1".into()));
    }
    let n_modes = layers.iter().map(|l| l.n_modes()).max().unwrap_or(0);
    let sector = EtaSector::new(n_modes, eta, cap)?;
    let mats: Vec<DMatrix<Complex64>> = layers
        .iter()
        .map(|l| l.sector_matrix(&sector))
        .collect::<Result<_>>()?;
    for m in &mats {
        check_hermitian(m)?;
    }
    let mut h = DMatrix::<Complex64>::zeros(sector.dim(), sector.dim());
    for m in &mats {
        h += m;
    }
    let exact = expm_hermitian(&h, t);
    let step = product_formula_step(&mats, t / r as f64, order)?;
    let mut approx = DMatrix::<Complex64>::identity(sector.dim(), sector.dim());
    for _ in 0..r {
        approx = &step * approx;
    }
    Ok(spectral_norm(&(exact - approx)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn a_adag_is_one_minus_n() {
        let s = normal_order(1, &[Factor::annihilate(0), Factor::create(0)]);
        let mut want = FermionSum::identity(1, 1.0);
        want.add_product(-one(), &[Factor::number(0)]);
        assert_eq!(s, want);
    }

    #[test]
    fn adag_a_is_number() {
        let s = normal_order(1, &[Factor::create(0), Factor::annihilate(0)]);
        let t: Vec<FermionTerm> = s.terms().collect();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].number, vec![0]);
        assert_eq!(t[0].weight, one());
    }

    #[test]
    fn double_annihilation_vanishes() {
        assert!(normal_order(2, &[Factor::annihilate(1), Factor::annihilate(1)]).is_empty());
    }

    #[test]
    fn sector_sizes() {
        assert_eq!(EtaSector::new(8, 3, 16).unwrap().dim(), 56);
        assert_eq!(EtaSector::new(5, 0, 16).unwrap().dim(), 1);
        assert!(EtaSector::new(17, 2, 16).is_err());
    }

    #[test]
    fn number_term_kills_vacuum() {
        let mut h = FermionSum::zero(3);
        h.add_product(one(), &[Factor::number(1)]);
        assert_eq!(eta_seminorm(&h, 0, MODE_CAP).unwrap(), 0.0);
    }

    #[test]
    fn non_hermitian_layer_rejected() {
        let mut l = FermionSum::zero(2);
        l.add_product(one(), &[Factor::create(0), Factor::annihilate(1)]);
        let err = exact_evolution_error(&[l], 0.1, 1, 1, 1, MODE_CAP).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }
}
