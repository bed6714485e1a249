//! Weyl-Heisenberg mutually unbiased bases for prime dimension and the
//! unitary operator basis diagonal in them.
//!
//! Basis ordering: index 0 is the computational (`Z`) eigenbasis, index
//! `m + 1` is the eigenbasis of `X Z^m` for `m = 0, …, d-1`. Every basis
//! vector has a real positive first component.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Clone, Debug)]
pub struct MubSet {
    d: usize,
    bases: Vec<Vec<CVector>>,
}

impl MubSet {
    /// Wraps arbitrary bases after checking their shapes; unbiasedness is
    /// left to [`verify_unbiased`].
    pub fn new(d: usize, bases: Vec<Vec<CVector>>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension must be at least 2, got {d}")));
        }
        for basis in &bases {
            if basis.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: basis.len() });
            }
            if let Some(v) = basis.iter().find(|v| v.len() != d) {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
        }
        Ok(Self { d, bases })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[Vec<CVector>] {
        &self.bases
    }

    /// Keeps the first `n` bases.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n > self.bases.len() {
            return Err(Error::DimensionMismatch { expected: n, got: self.bases.len() });
        }
        Ok(Self {
            d: self.d,
            bases: self.bases[..n].to_vec(),
        })
    }

    /// Rank-one projector `|ψ_k^(α)⟩⟨ψ_k^(α)|`.
    pub fn projector(&self, alpha: usize, k: usize) -> CMatrix {
        let v = &self.bases[alpha][k];
        v * v.adjoint()
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p))
}

fn root_of_unity(numer: i64, denom: i64) -> Complex64 {
    let t = numer.rem_euclid(denom) as f64 / denom as f64;
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// Builds all `d + 1` Weyl-Heisenberg MUBs for prime `d`.
pub fn build_weyl_mubs(d: usize) -> Result<MubSet> {
    if d < 2 || !is_prime(d) {
        return Err(Error::Domain(format!(
            "Weyl MUB construction requires a prime dimension d >= 2, got {d}"
        )));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut bases = Vec::with_capacity(d + 1);
    bases.push(
        (0..d)
            .map(|j| CVector::from_fn(d, |k, _| Complex64::new(f64::from(u8::from(k == j)), 0.0)))
            .collect(),
    );
    let (di, two_d) = (d as i64, 2 * d as i64);
    for m in 0..di {
        // Eigenvectors of X Z^m: c_k ∝ exp(2πi [k(2j + m(d-1)) + m k(k-1)] / 2d).
        let basis = (0..di)
            .map(|j| {
                CVector::from_fn(d, |k, _| {
                    let k = k as i64;
                    let phase = k * (2 * j + m * (di - 1)) + m * k * (k - 1);
                    root_of_unity(phase, two_d) * norm
                })
            })
            .collect();
        bases.push(basis);
    }
    MubSet::new(d, bases)
}

/// `{I, U_α^k, A_β,k}`: unitaries diagonal in the chosen bases plus the
/// completing operators from the bases left out.
#[derive(Clone, Debug)]
pub struct UnitaryFamily {
    pub d: usize,
    /// `unitaries[α][k] = U_α^k` for `k = 0, …, d-1`.
    pub unitaries: Vec<Vec<CMatrix>>,
    /// `complements[β][k - 1] = A_β,k` for `k = 1, …, d-1`.
    pub complements: Vec<Vec<CMatrix>>,
}

impl UnitaryFamily {
    /// Identity followed by every non-trivial operator; `d²` elements when complete.
    pub fn operator_basis(&self) -> Vec<CMatrix> {
        let mut ops = vec![CMatrix::identity(self.d, self.d)];
        for family in &self.unitaries {
            ops.extend(family.iter().skip(1).cloned());
        }
        for family in &self.complements {
            ops.extend(family.iter().cloned());
        }
        ops
    }
}

fn diagonal_unitaries(bases: &[CVector], d: usize) -> Vec<CMatrix> {
    (0..d)
        .map(|k| {
            bases.iter().enumerate().fold(CMatrix::zeros(d, d), |acc, (j, v)| {
                acc + (v * v.adjoint()) * root_of_unity((j * k) as i64, d as i64)
            })
        })
        .collect()
}

/// `U_α^k = Σ_j ω^{jk} P_j^(α)` for the bases in `m`. When `m` holds fewer
/// than `d + 1` bases (and `d` is prime) the complementary operators are
/// taken from the remaining Weyl bases.
pub fn unitaries_from_bases(m: &MubSet) -> Result<UnitaryFamily> {
    let d = m.d();
    let unitaries = m.bases().iter().map(|b| diagonal_unitaries(b, d)).collect();
    let complements = if m.n() < d + 1 {
        let full = build_weyl_mubs(d)?;
        full.bases()[m.n()..]
            .iter()
            .map(|b| diagonal_unitaries(b, d).into_iter().skip(1).collect())
            .collect()
    } else {
        Vec::new()
    };
    Ok(UnitaryFamily { d, unitaries, complements })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct UnbiasedReport {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub tolerance: f64,
    /// `(α, β, max |⟨ψ|φ⟩|² - 1/d|)` for every pair of distinct bases.
    pub pairs: Vec<(usize, usize, f64)>,
    pub max_deviation: f64,
    /// Largest `|⟨ψ_j|ψ_k⟩ - δ_jk|` within any basis.
    pub max_orthonormality_error: f64,
    pub passed: bool,
}

pub fn verify_unbiased(m: &MubSet, tol: f64) -> Result<UnbiasedReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let d = m.d();
    let target = 1.0 / d as f64;
    let bases = m.bases();
    let mut ortho: f64 = 0.0;
    for basis in bases {
        for (j, u) in basis.iter().enumerate() {
            for (k, v) in basis.iter().enumerate() {
                let expected = if j == k { 1.0 } else { 0.0 };
                ortho = ortho.max((u.dotc(v) - Complex64::new(expected, 0.0)).norm());
            }
        }
    }
    let mut pairs = Vec::new();
    for a in 0..bases.len() {
        for b in a + 1..bases.len() {
            let dev = bases[a]
                .iter()
                .flat_map(|u| bases[b].iter().map(move |v| (u.dotc(v).norm_sqr() - target).abs()))
                .fold(0.0, f64::max);
            pairs.push((a, b, dev));
        }
    }
    let max_deviation = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
    Ok(UnbiasedReport {
        d,
        n: bases.len(),
        tolerance: tol,
        pairs,
        max_deviation,
        max_orthonormality_error: ortho,
        passed: max_deviation <= tol && ortho <= tol,
    })
}
