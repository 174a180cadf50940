//! Operator bases: Pauli, Gell-Mann, generalized SU(d) generators, the
//! embedded Λ_d^i blocks and the Weyl clock/shift algebra.
//!
//! SU(d) generator ordering: for n = 2..=d, for each column pair (j, n−1)
//! with j < n−1 emit the symmetric generator then the antisymmetric one,
//! then the diagonal generator λ_{n²−1}. Index 0 is the identity. This
//! reproduces the conventional SU(3) numbering 1..8.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C_ONE};

/// Label of an SU(d) basis operator: k = 0 is the identity, 1..d²−1 are the
/// traceless generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SudLabel {
    pub d: usize,
    pub k: usize,
}

/// Label (p, q) of the Weyl displacement operator D_d(p, q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeylLabel {
    pub d: usize,
    pub p: usize,
    pub q: usize,
}

/// A two-site observable label; both sites use the same basis kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ObservablePair {
    Sud(SudLabel, SudLabel),
    Weyl(WeylLabel, WeylLabel),
}

impl ObservablePair {
    pub fn sud(d1: usize, k1: usize, d2: usize, k2: usize) -> Self {
        Self::Sud(SudLabel { d: d1, k: k1 }, SudLabel { d: d2, k: k2 })
    }

    /// The joint operator on the d₁·d₂ space.
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        match self {
            Self::Sud(a, b) => Ok(crate::linalg::kron(
                &sud_generator(a.d, a.k)?,
                &sud_generator(b.d, b.k)?,
            )),
            Self::Weyl(a, b) => Ok(crate::linalg::kron(
                &weyl_d(a.d, a.p, a.q)?,
                &weyl_d(b.d, b.p, b.q)?,
            )),
        }
    }

    /// Flat text form used in CSV headers and JSON labels, e.g. "1,1" for
    /// SU(d) pairs or "0,1;2,0" for Weyl pairs.
    pub fn label_string(&self) -> String {
        match self {
            Self::Sud(a, b) => format!("{},{}", a.k, b.k),
            Self::Weyl(a, b) => format!("{},{};{},{}", a.p, a.q, b.p, b.q),
        }
    }
}

/// Pauli matrices; index 0 is the 2×2 identity.
pub fn pauli(i: usize) -> Result<ComplexMatrix> {
    let m = match i {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        2 => {
            let mut m = ComplexMatrix::zeros(2, 2);
            m.set(0, 1, Complex64::new(0.0, -1.0));
            m.set(1, 0, Complex64::new(0.0, 1.0));
            m
        }
        3 => ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
        _ => return Err(Error::IndexOutOfRange(format!("pauli index {i}"))),
    };
    Ok(m)
}

/// The eight Gell-Mann matrices (k = 1..8) plus the identity (k = 0).
pub fn gellmann3(k: usize) -> Result<ComplexMatrix> {
    if k > 8 {
        return Err(Error::IndexOutOfRange(format!("gellmann3 index {k}")));
    }
    sud_generator(3, k)
}

/// Generalized Gell-Mann generator λ_k of SU(d); k = 0 gives the identity.
///
/// Hermitian, traceless for k ≥ 1, and Tr[λ_a λ_b] = 2 δ_ab.
pub fn sud_generator(d: usize, k: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::IndexOutOfRange(format!("sud_generator d = {d}")));
    }
    if k >= d * d {
        return Err(Error::IndexOutOfRange(format!(
            "sud_generator index {k} for d = {d}"
        )));
    }
    if k == 0 {
        return Ok(ComplexMatrix::identity(d));
    }
    let mut idx = 1;
    for n in 2..=d {
        for j in 0..(n - 1) {
            if idx == k {
                // symmetric: |j⟩⟨n−1| + |n−1⟩⟨j|
                let mut m = ComplexMatrix::zeros(d, d);
                m.set(j, n - 1, C_ONE);
                m.set(n - 1, j, C_ONE);
                return Ok(m);
            }
            idx += 1;
            if idx == k {
                // antisymmetric: −i|j⟩⟨n−1| + i|n−1⟩⟨j|
                let mut m = ComplexMatrix::zeros(d, d);
                m.set(j, n - 1, Complex64::new(0.0, -1.0));
                m.set(n - 1, j, Complex64::new(0.0, 1.0));
                return Ok(m);
            }
            idx += 1;
        }
        if idx == k {
            // diagonal λ_{n²−1}: √(2/(n(n−1))) on the first n−1 levels,
            // −√(2(n−1)/n) on level n−1
            let nn = n as f64;
            let mut m = ComplexMatrix::zeros(d, d);
            let head = (2.0 / (nn * (nn - 1.0))).sqrt();
            for i in 0..(n - 1) {
                m.set(i, i, Complex64::new(head, 0.0));
            }
            m.set(n - 1, n - 1, Complex64::new(-(2.0 * (nn - 1.0) / nn).sqrt(), 0.0));
            return Ok(m);
        }
        idx += 1;
    }
    unreachable!("index bookkeeping covers 1..d^2-1");
}

/// Pauli σ_i embedded in the top-left 2×2 block of a d×d matrix.
pub fn embedded_lambda(d: usize, i: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::IndexOutOfRange(format!("embedded_lambda d = {d}")));
    }
    if !(1..=3).contains(&i) {
        return Err(Error::IndexOutOfRange(format!("embedded_lambda index {i}")));
    }
    let p = pauli(i)?;
    let mut m = ComplexMatrix::zeros(d, d);
    for r in 0..2 {
        for c in 0..2 {
            m.set(r, c, p.get(r, c));
        }
    }
    Ok(m)
}

/// Clock matrix: Z|k⟩ = ω^k |k⟩ with ω = e^{2πi/d}.
pub fn weyl_z(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let phase = 2.0 * PI * (k as f64) / (d as f64);
        m.set(k, k, Complex64::from_polar(1.0, phase));
    }
    m
}

/// Shift matrix: X|k⟩ = |k ⊕ 1⟩ with addition modulo d.
pub fn weyl_x(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        m.set((k + 1) % d, k, C_ONE);
    }
    m
}

/// Weyl displacement operator D_d(p, q) = e^{−iπpq/d} Z^p X^q.
///
/// Only odd d is supported; the phase convention is inconsistent for even
/// dimensions, so those are rejected outright.
pub fn weyl_d(d: usize, p: usize, q: usize) -> Result<ComplexMatrix> {
    if d < 2 || d.is_multiple_of(2) {
        return Err(Error::EvenDimension(d));
    }
    if p >= d || q >= d {
        return Err(Error::IndexOutOfRange(format!(
            "weyl_d label ({p}, {q}) for d = {d}"
        )));
    }
    // (Z^p X^q)|k⟩ = ω^{p(k+q)} |k+q⟩
    let phase0 = -PI * (p as f64) * (q as f64) / (d as f64);
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let row = (k + q) % d;
        let phase = phase0 + 2.0 * PI * (p as f64) * (row as f64) / (d as f64);
        m.set(row, k, Complex64::from_polar(1.0, phase));
    }
    Ok(m)
}
