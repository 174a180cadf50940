//! Characteristic functions in the SU(d) and Weyl operator bases.
//!
//! χ collects the expansion coefficients of a state over an orthogonal
//! operator basis, normalized so that Σ|χ|² equals the purity Tr ρ². The
//! function is informationally complete: [`reconstruct`] inverts it, and
//! fidelities are plain coefficient overlaps.

use num_complex::Complex64;
use serde_json::json;

use crate::bases::{sud_generator, weyl_d, ObservablePair, SudLabel, WeylLabel};
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, ATOL_HERM, C_ZERO};

/// Which operator family indexes the characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Sud,
    Weyl,
}

/// Per-site normalizer 𝖭_k for SU(d) labels: √d for the identity, √2 for
/// the traceless generators (so λ_k/𝖭_k is Hilbert-Schmidt orthonormal).
pub fn sud_normalizer(d: usize, k: usize) -> f64 {
    if k == 0 {
        (d as f64).sqrt()
    } else {
        2.0f64.sqrt()
    }
}

/// Per-site normalizer for Weyl labels: √d for every label.
pub fn weyl_normalizer(d: usize) -> f64 {
    (d as f64).sqrt()
}

/// Two-site normalizer 𝒩 = 𝖭_k·𝖭_k′ for an observable pair.
pub fn pair_normalizer(pair: &ObservablePair) -> f64 {
    match pair {
        ObservablePair::Sud(a, b) => sud_normalizer(a.d, a.k) * sud_normalizer(b.d, b.k),
        ObservablePair::Weyl(a, b) => weyl_normalizer(a.d) * weyl_normalizer(b.d),
    }
}

/// A label with its characteristic-function value and sampling weight |χ|².
#[derive(Debug, Clone, Copy)]
pub struct SupportEntry {
    pub pair: ObservablePair,
    pub chi: Complex64,
    pub weight: f64,
}

/// Characteristic function of a two-site state, stored densely over all
/// labels of the chosen basis.
#[derive(Debug, Clone)]
pub struct CharFunction {
    pub basis: BasisKind,
    pub d1: usize,
    pub d2: usize,
    values: Vec<Complex64>,
}

impl CharFunction {
    fn expected_len(basis: BasisKind, d1: usize, d2: usize) -> usize {
        match basis {
            BasisKind::Sud => d1 * d1 * d2 * d2,
            BasisKind::Weyl => d1 * d1 * d2 * d2,
        }
    }

    /// Wrap a complete value vector; the length must cover every label.
    pub fn new(basis: BasisKind, d1: usize, d2: usize, values: Vec<Complex64>) -> Result<Self> {
        let want = Self::expected_len(basis, d1, d2);
        if values.len() != want {
            return Err(Error::IncompleteFunction(format!(
                "{} values for {want} labels",
                values.len()
            )));
        }
        Ok(Self {
            basis,
            d1,
            d2,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Labels in storage order.
    pub fn pairs(&self) -> Vec<ObservablePair> {
        match self.basis {
            BasisKind::Sud => {
                let mut out = Vec::with_capacity(self.len());
                for k1 in 0..self.d1 * self.d1 {
                    for k2 in 0..self.d2 * self.d2 {
                        out.push(ObservablePair::Sud(
                            SudLabel { d: self.d1, k: k1 },
                            SudLabel { d: self.d2, k: k2 },
                        ));
                    }
                }
                out
            }
            BasisKind::Weyl => {
                let d = self.d1;
                let mut out = Vec::with_capacity(self.len());
                for p1 in 0..d {
                    for q1 in 0..d {
                        for p2 in 0..d {
                            for q2 in 0..d {
                                out.push(ObservablePair::Weyl(
                                    WeylLabel { d, p: p1, q: q1 },
                                    WeylLabel { d, p: p2, q: q2 },
                                ));
                            }
                        }
                    }
                }
                out
            }
        }
    }

    fn index_of(&self, pair: &ObservablePair) -> Option<usize> {
        match (self.basis, pair) {
            (BasisKind::Sud, ObservablePair::Sud(a, b)) if a.d == self.d1 && b.d == self.d2 => {
                Some(a.k * self.d2 * self.d2 + b.k)
            }
            (BasisKind::Weyl, ObservablePair::Weyl(a, b)) if a.d == self.d1 && b.d == self.d2 => {
                let d = self.d1;
                Some(((a.p * d + a.q) * d + b.p) * d + b.q)
            }
            _ => None,
        }
    }

    pub fn value(&self, pair: &ObservablePair) -> Result<Complex64> {
        self.index_of(pair)
            .map(|i| self.values[i])
            .ok_or(Error::BasisMismatch)
    }

    /// Shorthand for SU(d) labels.
    pub fn sud_value(&self, k1: usize, k2: usize) -> Complex64 {
        self.values[k1 * self.d2 * self.d2 + k2]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Σ|χ|², which equals Tr ρ².
    pub fn purity(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Labels with |χ| above the threshold, each carrying weight |χ|².
    pub fn support(&self, threshold: f64) -> Vec<SupportEntry> {
        self.pairs()
            .into_iter()
            .zip(&self.values)
            .filter(|(_, v)| v.norm() > threshold)
            .map(|(pair, &chi)| SupportEntry {
                pair,
                chi,
                weight: chi.norm_sqr(),
            })
            .collect()
    }

    /// JSON form: basis tag, dims and the full label/value list.
    pub fn to_json(&self) -> serde_json::Value {
        let values: Vec<serde_json::Value> = self
            .pairs()
            .iter()
            .zip(&self.values)
            .map(|(pair, v)| {
                json!({
                    "label": pair.label_string(),
                    "re": v.re,
                    "im": v.im,
                })
            })
            .collect();
        json!({
            "basis": match self.basis { BasisKind::Sud => "sud", BasisKind::Weyl => "weyl" },
            "d1": self.d1,
            "d2": self.d2,
            "values": values,
        })
    }
}

fn check_state(rho: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{what}: state is {}x{}, expected {dim}x{dim}",
            rho.rows(),
            rho.cols()
        )));
    }
    let defect = rho.hermiticity_defect();
    if defect > ATOL_HERM {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Partial trace of ρ against a second-site operator:
/// out[i1, j1] = Σ_{i2 j2} ρ[(i1 i2), (j1 j2)] · B[j2, i2].
fn contract_site2(rho: &ComplexMatrix, b: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d1, d1);
    for i1 in 0..d1 {
        for j1 in 0..d1 {
            let mut acc = C_ZERO;
            for i2 in 0..d2 {
                for j2 in 0..d2 {
                    acc += rho.get(i1 * d2 + i2, j1 * d2 + j2) * b.get(j2, i2);
                }
            }
            out.set(i1, j1, acc);
        }
    }
    out
}

/// Tr[P·A] for the site-1 stage of the two-site contraction.
fn trace_against(p: &ComplexMatrix, a: &ComplexMatrix) -> Complex64 {
    let mut acc = C_ZERO;
    for i in 0..p.rows() {
        for j in 0..p.cols() {
            acc += p.get(i, j) * a.get(j, i);
        }
    }
    acc
}

/// SU(d) characteristic function χ(k, k′) = Tr[ρ λ_k⊗λ_k′]/(𝖭_k 𝖭_k′).
pub fn char_sud(rho: &ComplexMatrix, d1: usize, d2: usize) -> Result<CharFunction> {
    check_state(rho, d1 * d2, "char_sud")?;
    let gens1: Vec<ComplexMatrix> = (0..d1 * d1)
        .map(|k| sud_generator(d1, k))
        .collect::<Result<_>>()?;
    let gens2: Vec<ComplexMatrix> = (0..d2 * d2)
        .map(|k| sud_generator(d2, k))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(d1 * d1 * d2 * d2);
    // contract site 2 once per k′, then sweep k on the small remainder
    let partials: Vec<ComplexMatrix> = gens2
        .iter()
        .map(|g| contract_site2(rho, g, d1, d2))
        .collect();
    for (k1, g1) in gens1.iter().enumerate() {
        for (k2, p) in partials.iter().enumerate() {
            let raw = trace_against(p, g1);
            values.push(raw / (sud_normalizer(d1, k1) * sud_normalizer(d2, k2)));
        }
    }
    CharFunction::new(BasisKind::Sud, d1, d2, values)
}

/// Weyl characteristic function χ(p,q;p′,q′) = Tr[ρ (D⊗D)†]/d for odd d.
pub fn char_weyl(rho: &ComplexMatrix, d: usize) -> Result<CharFunction> {
    if d < 2 || d.is_multiple_of(2) {
        return Err(Error::EvenDimension(d));
    }
    check_state(rho, d * d, "char_weyl")?;
    let mut displacements = Vec::with_capacity(d * d);
    for p in 0..d {
        for q in 0..d {
            displacements.push(weyl_d(d, p, q)?);
        }
    }
    let norm = d as f64;
    let partials: Vec<ComplexMatrix> = displacements
        .iter()
        .map(|dd| contract_site2(rho, &dd.adjoint(), d, d))
        .collect();
    let mut values = Vec::with_capacity(d * d * d * d);
    for d1_op in &displacements {
        let a = d1_op.adjoint();
        for p in &partials {
            values.push(trace_against(p, &a) / norm);
        }
    }
    CharFunction::new(BasisKind::Weyl, d, d, values)
}

/// Invert a characteristic function back to the density operator.
pub fn reconstruct(chi: &CharFunction) -> Result<ComplexMatrix> {
    let n = chi.d1 * chi.d2;
    let mut rho = ComplexMatrix::zeros(n, n);
    match chi.basis {
        BasisKind::Sud => {
            for (pair, &value) in chi.pairs().iter().zip(chi.values()) {
                if value == C_ZERO {
                    continue;
                }
                let op = pair.matrix()?;
                rho = rho.add(&op.scale(value / pair_normalizer(pair)));
            }
        }
        BasisKind::Weyl => {
            let d = chi.d1;
            for (pair, &value) in chi.pairs().iter().zip(chi.values()) {
                if value == C_ZERO {
                    continue;
                }
                if let ObservablePair::Weyl(a, b) = pair {
                    let op = kron(&weyl_d(d, a.p, a.q)?, &weyl_d(d, b.p, b.q)?);
                    rho = rho.add(&op.scale(value / (d as f64)));
                }
            }
        }
    }
    Ok(rho)
}

/// Fidelity Tr[ρ₁ρ₂] as a characteristic-function overlap: Σ χ₁χ₂ in the
/// SU(d) basis, Σ χ₁·conj(χ₂) in the Weyl basis.
pub fn fidelity_overlap(a: &CharFunction, b: &CharFunction) -> Result<f64> {
    if a.basis != b.basis || a.d1 != b.d1 || a.d2 != b.d2 {
        return Err(Error::BasisMismatch);
    }
    let sum: Complex64 = match a.basis {
        BasisKind::Sud => a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum(),
        BasisKind::Weyl => a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x * y.conj())
            .sum(),
    };
    Ok(sum.re)
}
