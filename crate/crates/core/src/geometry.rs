//! Hilbert-Schmidt metric in eigenvalue coordinates and exact surd values
//! for the volume-element prefactor.

use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, rat, rational_to_f64, sqrt_decimal, Rational};

/// Dimension `d` and number of mutually unbiased bases `N` of a channel family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Dims {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

impl Dims {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension d must be at least 2, got {d}")));
        }
        if n < 3 || n > d + 1 {
            return Err(Error::Domain(format!(
                "number of bases N must satisfy 3 <= N <= d+1 = {}, got {n}",
                d + 1
            )));
        }
        Ok(Self { d, n })
    }

    /// `N = d + 1`: the extra eigenvalue slot is pinned to zero.
    pub fn is_max(&self) -> bool {
        self.n == self.d + 1
    }

    /// Number of free eigenvalue coordinates.
    pub fn coords(&self) -> usize {
        if self.is_max() {
            self.d + 1
        } else {
            self.n + 1
        }
    }

    /// Multiplicity `d + 1 - N` of the last eigenvalue.
    pub fn tail_weight(&self) -> usize {
        self.d + 1 - self.n
    }

    /// Lower edge `-1/(d-1)` of the positivity box.
    pub fn lower_edge(&self) -> Rational {
        rat(-1, self.d as i64 - 1)
    }
}

/// An exact number `coeff * √radicand` with a square-free radicand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurdValue {
    coeff: Rational,
    radicand: u64,
}

impl SurdValue {
    pub fn new(coeff: Rational, radicand: u64) -> Self {
        if coeff.is_zero() || radicand == 0 {
            return Self::rational(Rational::zero());
        }
        let (outside, free) = split_square(radicand);
        Self {
            coeff: coeff * Rational::from_integer(BigInt::from(outside)),
            radicand: free,
        }
    }

    pub fn rational(value: Rational) -> Self {
        Self {
            coeff: value,
            radicand: 1,
        }
    }

    /// Exact square root of a non-negative rational.
    pub fn sqrt_of(value: &Rational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::Domain(format!(
                "square root of negative rational {}",
                format_rational(value)
            )));
        }
        // √(p/q) = √(p·q) / q
        let product = value.numer() * value.denom();
        let radicand = u64::try_from(product)
            .map_err(|_| Error::Domain("radicand exceeds 64 bits".to_string()))?;
        Ok(Self::new(
            Rational::new(BigInt::one(), value.denom().clone()),
            radicand,
        ))
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radicand == 1
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.coeff)
    }

    /// The exact square, always rational.
    pub fn square(&self) -> Rational {
        &self.coeff * &self.coeff * int(self.radicand as i64)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::rational(Rational::one()), |acc, _| &acc * self)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(&self.coeff * factor, self.radicand)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.coeff) * (self.radicand as f64).sqrt()
    }

    pub fn decimal(&self, sig: usize) -> String {
        sqrt_decimal(&self.square(), self.coeff.is_negative(), sig)
    }
}

/// Splits `n = outside² · free` with `free` square-free.
fn split_square(mut n: u64) -> (u64, u64) {
    let mut outside = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut count = 0;
        while n.is_multiple_of(p) {
            n /= p;
            count += 1;
        }
        outside *= p.pow(count / 2);
        if count % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    (outside, free * n)
}

impl Mul for &SurdValue {
    type Output = SurdValue;

    fn mul(self, rhs: &SurdValue) -> SurdValue {
        let radicand = self
            .radicand
            .checked_mul(rhs.radicand)
            .expect("surd radicand overflow");
        SurdValue::new(&self.coeff * &rhs.coeff, radicand)
    }
}

impl Div for &SurdValue {
    type Output = SurdValue;

    /// Panics on division by zero.
    fn div(self, rhs: &SurdValue) -> SurdValue {
        assert!(!rhs.coeff.is_zero(), "division by zero surd");
        // a√r / (b√s) = (a / (b s)) √(r s)
        let radicand = self
            .radicand
            .checked_mul(rhs.radicand)
            .expect("surd radicand overflow");
        SurdValue::new(
            &self.coeff / (&rhs.coeff * int(rhs.radicand as i64)),
            radicand,
        )
    }
}

impl fmt::Display for SurdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", format_rational(&self.coeff))
        } else {
            write!(f, "{}*sqrt({})", format_rational(&self.coeff), self.radicand)
        }
    }
}

impl Serialize for SurdValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SurdValue", 2)?;
        st.serialize_field("coeff", &format_rational(&self.coeff))?;
        st.serialize_field("radicand", &self.radicand)?;
        st.end()
    }
}

/// Diagonal Hilbert-Schmidt metric in eigenvalue coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricData {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(with = "crate::rational::serde_rational::vec")]
    pub diag: Vec<Rational>,
}

impl MetricData {
    pub fn determinant(&self) -> Rational {
        self.diag.iter().fold(Rational::one(), |acc, g| acc * g)
    }
}

/// `g = ((d-1)/d²)·diag(1, …, 1, d+1-N)`; for `N = d+1` all `d+1` entries are `(d-1)/d²`.
pub fn metric(d: usize, n: usize) -> Result<MetricData> {
    let dims = Dims::new(d, n)?;
    let unit = rat(d as i64 - 1, (d * d) as i64);
    let diag = if dims.is_max() {
        vec![unit; d + 1]
    } else {
        let mut diag = vec![unit.clone(); n];
        diag.push(unit * int(dims.tail_weight() as i64));
        diag
    };
    Ok(MetricData { d, n, diag })
}

/// `√det g = √(d+1-N)·(√(d-1)/d)^(N+1)`, or `(√(d-1)/d)^(d+1)` when `N = d+1`.
pub fn volume_prefactor(d: usize, n: usize) -> Result<SurdValue> {
    let dims = Dims::new(d, n)?;
    let per_coord = SurdValue::new(rat(1, d as i64), d as u64 - 1);
    let base = per_coord.pow(dims.coords() as u32);
    if dims.is_max() {
        Ok(base)
    } else {
        Ok(&SurdValue::new(Rational::one(), dims.tail_weight() as u64) * &base)
    }
}

/// Closed-form upper estimate on the volume of positive trace-preserving maps.
pub fn vp_volume(d: usize, n: usize) -> Result<SurdValue> {
    let dims = Dims::new(d, n)?;
    let denominator = BigInt::from(d - 1).pow(dims.coords() as u32);
    let numerator = if dims.is_max() {
        BigInt::one()
    } else {
        BigInt::from(dims.tail_weight())
    };
    SurdValue::sqrt_of(&Rational::new(numerator, denominator))
}
