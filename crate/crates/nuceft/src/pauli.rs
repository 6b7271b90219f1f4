//! Pauli strings with a Z4 phase, weighted sums of them, and the dense
//! matrix backend used by the oracle checks.
//!
//! A string is stored as `i^phase * prod_q sigma(x_q, z_q)` where
//! `sigma(1,0)=X`, `sigma(0,1)=Z`, `sigma(1,1)=Y`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default qubit cap for dense matrices.
pub const DENSE_CAP: usize = 14;

const COEF_EPS: f64 = 1e-12;

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            phase: 0,
        }
    }

    /// Single-qubit Pauli `p` on qubit `q`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(q, p);
        s
    }

    /// Build from `(qubit, Pauli)` pairs; later entries on the same qubit overwrite.
    pub fn from_ops(n: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n);
        for &(q, p) in ops {
            s.set(q, p);
        }
        s
    }

    /// Parse a label such as `"XIZY"`; character `k` acts on qubit `k`.
    pub fn from_label(label: &str) -> Result<Self> {
        let n = label.chars().count();
        let mut s = Self::identity(n);
        for (q, c) in label.chars().enumerate() {
            let p = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Config(format!("bad Pauli letter {other:?}"))),
            };
            s.set(q, p);
        }
        Ok(s)
    }

    fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (w, b) = (q / 64, 1u64 << (q % 64));
        let (xb, zb) = match p {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        };
        if xb {
            self.x[w] |= b;
        } else {
            self.x[w] &= !b;
        }
        if zb {
            self.z[w] |= b;
        } else {
            self.z[w] &= !b;
        }
    }

    pub fn get(&self, q: usize) -> Pauli {
        let (w, b) = (q / 64, 1u64 << (q % 64));
        match (self.x[w] & b != 0, self.z[w] & b != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Phase exponent `k` of the prefactor `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, k: u8) -> Self {
        self.phase = k % 4;
        self
    }

    pub fn x_mask(&self) -> &[u64] {
        &self.x
    }

    pub fn z_mask(&self) -> &[u64] {
        &self.z
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Qubits acted on non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (a, b)) in self.x.iter().zip(&self.z).enumerate() {
            let mut m = a | b;
            while m != 0 {
                let t = m.trailing_zeros() as usize;
                out.push(w * 64 + t);
                m &= m - 1;
            }
        }
        out
    }

    pub fn support_mask(&self) -> Vec<u64> {
        self.x.iter().zip(&self.z).map(|(a, b)| a | b).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        (popcount_and(&self.x, &other.z) + popcount_and(&self.z, &other.x)) % 2 == 0
    }

    /// Phase-exact product `self * other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::Dimension {
                left: self.n,
                right: other.n,
            });
        }
        let x: Vec<u64> = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z: Vec<u64> = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        // i^{|xa za| + |xb zb| + 2|za xb| - |x z|} relative to the X^x Z^z form
        let e = popcount_and(&self.x, &self.z) as i64
            + popcount_and(&other.x, &other.z) as i64
            + 2 * popcount_and(&self.z, &other.x) as i64
            - popcount_and(&x, &z) as i64
            + self.phase as i64
            + other.phase as i64;
        Ok(PauliString {
            n: self.n,
            x,
            z,
            phase: e.rem_euclid(4) as u8,
        })
    }

    /// Hermitian conjugate: only the phase changes.
    pub fn adjoint(&self) -> PauliString {
        let mut s = self.clone();
        s.phase = (4 - self.phase) % 4;
        s
    }

    pub fn label(&self) -> String {
        (0..self.n)
            .map(|q| match self.get(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            })
            .collect()
    }

    fn unphased_key(&self) -> (Vec<u64>, Vec<u64>) {
        (self.x.clone(), self.z.clone())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{pre}{}", self.label())
    }
}

/// Weighted sum of Pauli strings in canonical form: one entry per
/// `(x_mask, z_mask)`, phases folded into the coefficient, zeros dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<(Vec<u64>, Vec<u64>), Complex64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_string(coef: Complex64, s: PauliString) -> Self {
        let mut out = Self::zero(s.n);
        out.add_term(coef, &s);
        out
    }

    pub fn identity(n: usize, coef: f64) -> Self {
        Self::from_string(Complex64::new(coef, 0.0), PauliString::identity(n))
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, coef: Complex64, s: &PauliString) {
        assert_eq!(s.n, self.n, "qubit count mismatch in add_term");
        let c = coef * i_pow(s.phase);
        let key = s.unphased_key();
        let entry = self.terms.entry(key.clone()).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() <= COEF_EPS {
            self.terms.remove(&key);
        }
    }

    /// Terms as `(coefficient, phase-free string)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Complex64, PauliString)> + '_ {
        self.terms.iter().map(|((x, z), c)| {
            (
                *c,
                PauliString {
                    n: self.n,
                    x: x.clone(),
                    z: z.clone(),
                    phase: 0,
                },
            )
        })
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = self.clone();
        for (c, s) in other.terms() {
            out.add_term(c, &s);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, k: Complex64) -> PauliSum {
        let mut out = Self::zero(self.n);
        for (c, s) in self.terms() {
            out.add_term(c * k, &s);
        }
        out
    }

    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = Self::zero(self.n);
        for (ca, sa) in self.terms() {
            for (cb, sb) in other.terms() {
                let p = sa.multiply(&sb)?;
                out.add_term(ca * cb, &p);
            }
        }
        Ok(out)
    }

    /// `self*other - other*self`, computed only over anticommuting pairs.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = Self::zero(self.n);
        for (ca, sa) in self.terms() {
            for (cb, sb) in other.terms() {
                if !sa.commutes_with(&sb) {
                    let p = sa.multiply(&sb)?;
                    out.add_term(ca * cb * 2.0, &p);
                }
            }
        }
        Ok(out)
    }

    /// `self*other + other*self`.
    pub fn anticommutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = Self::zero(self.n);
        for (ca, sa) in self.terms() {
            for (cb, sb) in other.terms() {
                if sa.commutes_with(&sb) {
                    let p = sa.multiply(&sb)?;
                    out.add_term(ca * cb * 2.0, &p);
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> PauliSum {
        let mut out = Self::zero(self.n);
        for (c, s) in self.terms() {
            out.add_term(c.conj(), &s);
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.im.abs() <= COEF_EPS)
    }

    pub fn max_weight(&self) -> usize {
        self.terms().map(|(_, s)| s.weight()).max().unwrap_or(0)
    }

    /// Union of the supports of all strings.
    pub fn support_mask(&self) -> Vec<u64> {
        let mut m = vec![0u64; words(self.n)];
        for (x, z) in self.terms.keys() {
            for (w, (a, b)) in x.iter().zip(z).enumerate() {
                m[w] |= a | b;
            }
        }
        m
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms
            .get(&s.unphased_key())
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
            * i_pow(s.phase).conj()
    }

    /// Approximate equality of two sums, term by term.
    pub fn approx_eq(&self, other: &PauliSum, tol: f64) -> bool {
        match self.sub(other) {
            Ok(d) => d.terms.values().all(|c| c.norm() <= tol),
            Err(_) => false,
        }
    }

    pub fn commutes_with(&self, other: &PauliSum) -> bool {
        self.commutator(other).map(|c| c.is_empty()).unwrap_or(false)
    }

    /// Dense `2^n x 2^n` matrix; qubit `q` is bit `q` of the basis index.
    pub fn dense_matrix(&self, max_qubits: usize) -> Result<DMatrix<Complex64>> {
        if self.n > max_qubits {
            return Err(Error::Size {
                what: "dense Pauli matrix qubits",
                needed: self.n,
                cap: max_qubits,
            });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for ((x, z), c) in &self.terms {
            let xm = x.first().copied().unwrap_or(0);
            let zm = z.first().copied().unwrap_or(0);
            let base = *c * i_pow(((xm & zm).count_ones() % 4) as u8);
            for b in 0..dim as u64 {
                let sign = if (zm & b).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                m[((b ^ xm) as usize, b as usize)] += base * sign;
            }
        }
        Ok(m)
    }

    fn check(&self, other: &PauliSum) -> Result<()> {
        if self.n != other.n {
            Err(Error::Dimension {
                left: self.n,
                right: other.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn to_json(&self) -> EncodedOperatorJson {
        EncodedOperatorJson {
            n_qubits: self.n,
            terms: self
                .terms
                .iter()
                .map(|((x, z), c)| TermJson {
                    re: c.re,
                    im: c.im,
                    x: hex_mask(x),
                    z: hex_mask(z),
                })
                .collect(),
        }
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, s)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", c.re, c.im, s.label())?;
        }
        Ok(())
    }
}

/// JSON form of an encoded operator; masks are big-endian hex.
#[derive(Debug, Serialize)]
pub struct EncodedOperatorJson {
    pub n_qubits: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Serialize)]
pub struct TermJson {
    pub re: f64,
    pub im: f64,
    pub x: String,
    pub z: String,
}

fn hex_mask(words: &[u64]) -> String {
    let mut s: String = words.iter().rev().map(|w| format!("{w:016x}")).collect();
    let trimmed = s.trim_start_matches('0').to_string();
    if trimmed.is_empty() {
        s = "0".into();
        s
    } else {
        trimmed
    }
}

/// Greedy first-fit layering. Terms are visited in the given order and
/// placed in the first layer whose members all have support disjoint from
/// the new term (disjoint support implies commuting). Returns one layer
/// index per input term.
pub fn partition_commuting_layers(terms: &[PauliSum]) -> Vec<usize> {
    let mut layer_masks: Vec<Vec<u64>> = Vec::new();
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let m = t.support_mask();
        let slot = layer_masks
            .iter()
            .position(|lm| lm.iter().zip(&m).all(|(a, b)| a & b == 0));
        let k = match slot {
            Some(k) => {
                for (a, b) in layer_masks[k].iter_mut().zip(&m) {
                    *a |= b;
                }
                k
            }
            None => {
                layer_masks.push(m);
                layer_masks.len() - 1
            }
        };
        out.push(k);
    }
    out
}
