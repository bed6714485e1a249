//! Generalized Pauli maps in eigenvalue coordinates and the membership
//! predicates for the positive (necessary), completely positive,
//! generator-achievable and entanglement-breaking classes.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Dims;
use crate::mub::{unitaries_from_bases, CMatrix, MubSet};
use crate::rational::{format_rational, rat, rational_to_f64, serde_rational, Rational};

/// Ordered field the class predicates can be evaluated in.
pub trait Scalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_ratio(num: i64, den: i64) -> Self;
}

impl Scalar for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        rat(num, den)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

/// Predicates over a full eigenvalue vector `(λ_1, …, λ_N, λ_{N+1})`.
///
/// For `N = d + 1` the last slot is ignored (it is pinned to zero).
pub mod conditions {
    use super::Scalar;
    use crate::geometry::Dims;

    /// The eigenvalues that carry geometry.
    pub fn free<T>(dims: Dims, lambdas: &[T]) -> &[T] {
        &lambdas[..dims.coords()]
    }

    /// `Σ_{β≤N} λ_β + (d+1-N) λ_{N+1}`.
    pub fn weighted_sum<T: Scalar>(dims: Dims, lambdas: &[T]) -> T {
        let head = lambdas[..dims.n]
            .iter()
            .cloned()
            .reduce(|a, b| a + b)
            .expect("N >= 3");
        if dims.is_max() {
            head
        } else {
            head + T::from_ratio(dims.tail_weight() as i64, 1) * lambdas[dims.n].clone()
        }
    }

    fn min<T: Scalar>(values: &[T]) -> T {
        values
            .iter()
            .cloned()
            .reduce(|a, b| if b < a { b } else { a })
            .expect("non-empty")
    }

    fn max<T: Scalar>(values: &[T]) -> T {
        values
            .iter()
            .cloned()
            .reduce(|a, b| if b > a { b } else { a })
            .expect("non-empty")
    }

    /// `-1/(d-1) ≤ Σ ≤ 1 + d·min λ`.
    pub fn completely_positive<T: Scalar>(dims: Dims, lambdas: &[T]) -> bool {
        let d = dims.d as i64;
        let sum = weighted_sum(dims, lambdas);
        let lower = T::from_ratio(-1, d - 1);
        let upper = T::from_ratio(1, 1) + T::from_ratio(d, 1) * min(free(dims, lambdas));
        lower <= sum && sum <= upper
    }

    /// Every eigenvalue in `[-1/(d-1), 1]`.
    pub fn positive_necessary<T: Scalar>(dims: Dims, lambdas: &[T]) -> bool {
        let lower = T::from_ratio(-1, dims.d as i64 - 1);
        let upper = T::from_ratio(1, 1);
        free(dims, lambdas).iter().all(|l| &lower <= l && l <= &upper)
    }

    pub fn generator_achievable<T: Scalar>(dims: Dims, lambdas: &[T]) -> bool {
        let zero = T::from_ratio(0, 1);
        free(dims, lambdas).iter().all(|l| l >= &zero)
    }

    /// `Σ ≤ 1`.
    pub fn eb_necessary<T: Scalar>(dims: Dims, lambdas: &[T]) -> bool {
        weighted_sum(dims, lambdas) <= T::from_ratio(1, 1)
    }

    /// `(1/d)[1 + min{-λ_max, (d-1) λ_min}]` over the free eigenvalues.
    pub fn min_output_overlap<T: Scalar>(dims: Dims, lambdas: &[T]) -> T {
        let d = dims.d as i64;
        let free = free(dims, lambdas);
        let a = -max(free);
        let b = T::from_ratio(d - 1, 1) * min(free);
        let m = if b < a { b } else { a };
        (T::from_ratio(1, 1) + m) / T::from_ratio(d, 1)
    }
}

/// A generalized Pauli map given by its eigenvalues `(λ_1, …, λ_N, λ_{N+1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChannelSpec {
    #[serde(flatten)]
    dims: Dims,
    #[serde(with = "serde_rational::vec")]
    lambdas: Vec<Rational>,
}

impl ChannelSpec {
    pub fn new(d: usize, n: usize, lambdas: Vec<Rational>) -> Result<Self> {
        let dims = Dims::new(d, n)?;
        if lambdas.len() != n + 1 {
            return Err(Error::InvalidChannel(format!(
                "expected N+1 = {} eigenvalues, got {}",
                n + 1,
                lambdas.len()
            )));
        }
        if dims.is_max() && !lambdas[n].is_zero() {
            return Err(Error::InvalidChannel(format!(
                "λ_(N+1) must vanish for N = d+1, got {}",
                format_rational(&lambdas[n])
            )));
        }
        Ok(Self { dims, lambdas })
    }

    /// Accepts either all `N + 1` eigenvalues or, for `N = d + 1`, just the
    /// `N` free ones (the pinned zero is appended).
    pub fn from_free(d: usize, n: usize, mut lambdas: Vec<Rational>) -> Result<Self> {
        if n == d + 1 && lambdas.len() == n {
            lambdas.push(Rational::zero());
        }
        Self::new(d, n, lambdas)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn d(&self) -> usize {
        self.dims.d
    }

    pub fn n(&self) -> usize {
        self.dims.n
    }

    pub fn lambdas(&self) -> &[Rational] {
        &self.lambdas
    }

    /// Eigenvalues that act as coordinates.
    pub fn free_lambdas(&self) -> &[Rational] {
        conditions::free(self.dims, &self.lambdas)
    }
}

/// `(p_0, p_1, …, p_N, p_{N+1})`, summing to one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbabilityVector {
    #[serde(with = "serde_rational::vec")]
    probs: Vec<Rational>,
}

impl ProbabilityVector {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        let total = probs.iter().fold(Rational::zero(), |acc, p| acc + p);
        if !total.is_one() {
            return Err(Error::InvalidChannel(format!(
                "probabilities sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    /// `p_0`, weight of the completely depolarizing channel.
    pub fn depolarizing(&self) -> &Rational {
        &self.probs[0]
    }

    /// `p_α` for `α = 1, …, N`.
    pub fn basis(&self, alpha: usize) -> &Rational {
        &self.probs[alpha]
    }

    /// `p_{N+1}`, weight of the identity.
    pub fn identity(&self) -> &Rational {
        self.probs.last().expect("non-empty")
    }
}

/// `λ_α = p_{N+1} + p_α`, `λ_{N+1} = p_{N+1}`.
pub fn eigenvalues_from_probabilities(
    p: &ProbabilityVector,
    d: usize,
    n: usize,
) -> Result<ChannelSpec> {
    let dims = Dims::new(d, n)?;
    if p.probs.len() != n + 2 {
        return Err(Error::InvalidChannel(format!(
            "expected N+2 = {} probabilities, got {}",
            n + 2,
            p.probs.len()
        )));
    }
    if dims.is_max() && !p.identity().is_zero() {
        return Err(Error::InvalidChannel(
            "p_(N+1) must be zero for N = d+1".to_string(),
        ));
    }
    let id = p.identity();
    let mut lambdas: Vec<Rational> = (1..=n).map(|a| id + p.basis(a)).collect();
    lambdas.push(id.clone());
    ChannelSpec::new(d, n, lambdas)
}

/// Inverse of [`eigenvalues_from_probabilities`]; entries may be negative.
pub fn probabilities_from_eigenvalues(c: &ChannelSpec) -> ProbabilityVector {
    let n = c.n();
    let id = c.lambdas[n].clone();
    let basis: Vec<Rational> = c.lambdas[..n].iter().map(|l| l - &id).collect();
    let depolarizing = basis
        .iter()
        .fold(Rational::one() - &id, |acc, p| acc - p);
    let mut probs = Vec::with_capacity(n + 2);
    probs.push(depolarizing);
    probs.extend(basis);
    probs.push(id);
    ProbabilityVector { probs }
}

pub fn is_cp(c: &ChannelSpec) -> bool {
    conditions::completely_positive(c.dims, &c.lambdas)
}

pub fn is_positive_necessary(c: &ChannelSpec) -> bool {
    conditions::positive_necessary(c.dims, &c.lambdas)
}

pub fn min_output_overlap(c: &ChannelSpec) -> Rational {
    conditions::min_output_overlap(c.dims, &c.lambdas)
}

pub fn is_generator_achievable(c: &ChannelSpec) -> bool {
    conditions::generator_achievable(c.dims, &c.lambdas)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EbVerdict {
    pub holds: bool,
    /// The condition is also sufficient here (`N ∈ {d, d+1}` with all λ ≥ 0).
    pub known_sufficient: bool,
}

pub fn is_eb_necessary(c: &ChannelSpec) -> EbVerdict {
    let n = c.n();
    let d = c.d();
    EbVerdict {
        holds: conditions::eb_necessary(c.dims, &c.lambdas),
        known_sufficient: (n == d || n == d + 1) && is_generator_achievable(c),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    #[serde(flatten)]
    pub channel: ChannelSpec,
    pub positive_necessary: bool,
    pub completely_positive: bool,
    pub generator_achievable: bool,
    pub entanglement_breaking: EbVerdict,
    #[serde(with = "serde_rational")]
    pub min_output_overlap: Rational,
}

pub fn classify(c: &ChannelSpec) -> Classification {
    Classification {
        channel: c.clone(),
        positive_necessary: is_positive_necessary(c),
        completely_positive: is_cp(c),
        generator_achievable: is_generator_achievable(c),
        entanglement_breaking: is_eb_necessary(c),
        min_output_overlap: min_output_overlap(c),
    }
}

fn check_bases(c: &ChannelSpec, m: &MubSet) -> Result<()> {
    if m.d() != c.d() {
        return Err(Error::DimensionMismatch { expected: c.d(), got: m.d() });
    }
    if m.n() < c.n() {
        return Err(Error::DimensionMismatch { expected: c.n(), got: m.n() });
    }
    Ok(())
}

/// `Λ[ρ] = p_{N+1} ρ + p_0 I Tr(ρ)/d + Σ_α p_α Σ_k P_k^(α) ρ P_k^(α)`.
///
/// The map is linear, so `rho` need not be a state.
pub fn apply(c: &ChannelSpec, m: &MubSet, rho: &CMatrix) -> Result<CMatrix> {
    check_bases(c, m)?;
    let d = c.d();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: rho.nrows().max(rho.ncols()) });
    }
    let p = probabilities_from_eigenvalues(c);
    let weight = |q: &Rational| Complex64::new(rational_to_f64(q), 0.0);
    let mut out = rho * weight(p.identity());
    out += CMatrix::identity(d, d) * (rho.trace() * weight(p.depolarizing()) / d as f64);
    for alpha in 0..c.n() {
        let pa = weight(p.basis(alpha + 1));
        if pa == Complex64::new(0.0, 0.0) {
            continue;
        }
        for k in 0..d {
            let proj = m.projector(alpha, k);
            out += &proj * rho * &proj * pa;
        }
    }
    Ok(out)
}

/// `ρ_Λ = (1/d) Σ_kl |k⟩⟨l| ⊗ Λ[|k⟩⟨l|]`.
pub fn choi_state(c: &ChannelSpec, m: &MubSet) -> Result<CMatrix> {
    check_bases(c, m)?;
    let d = c.d();
    let mut choi = CMatrix::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            let mut unit = CMatrix::zeros(d, d);
            unit[(k, l)] = Complex64::new(1.0, 0.0);
            let image = apply(c, m, &unit)?;
            for i in 0..d {
                for j in 0..d {
                    choi[(k * d + i, l * d + j)] = image[(i, j)] / d as f64;
                }
            }
        }
    }
    Ok(choi)
}

/// Smallest eigenvalue of the (Hermitian) Choi state.
pub fn choi_min_eigenvalue(c: &ChannelSpec, m: &MubSet) -> Result<f64> {
    let choi = choi_state(c, m)?;
    Ok(choi
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min))
}

/// Largest deviation `‖Λ[U] - λ U‖` over the operator basis: `λ_α` on the
/// unitaries of basis `α`, `λ_{N+1}` on the complements (Frobenius norm).
pub fn eigen_equation_residual(c: &ChannelSpec, m: &MubSet) -> Result<f64> {
    check_bases(c, m)?;
    let family = unitaries_from_bases(&m.truncated(c.n())?)?;
    let lambda = |i: usize| Complex64::new(rational_to_f64(&c.lambdas()[i]), 0.0);
    let mut worst: f64 = 0.0;
    let mut check = |op: &CMatrix, value: Complex64| -> Result<()> {
        let image = apply(c, m, op)?;
        worst = worst.max((image - op * value).norm());
        Ok(())
    };
    check(&CMatrix::identity(c.d(), c.d()), Complex64::new(1.0, 0.0))?;
    for (alpha, family) in family.unitaries.iter().enumerate() {
        for op in family.iter().skip(1) {
            check(op, lambda(alpha))?;
        }
    }
    for family in &family.complements {
        for op in family {
            check(op, lambda(c.n()))?;
        }
    }
    Ok(worst)
}

/// Channel with every free eigenvalue equal to `value`.
pub fn uniform(d: usize, n: usize, value: Rational) -> Result<ChannelSpec> {
    let dims = Dims::new(d, n)?;
    let mut lambdas = vec![value; dims.coords()];
    if dims.is_max() {
        lambdas.push(Rational::zero());
    }
    ChannelSpec::new(d, n, lambdas)
}
