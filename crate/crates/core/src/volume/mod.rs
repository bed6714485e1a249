//! Exact Hilbert-Schmidt volumes by iterated integration over chambers,
//! plus a seeded Monte Carlo estimator.

mod conjectures;
mod montecarlo;
pub mod poly;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{volume_prefactor, Dims, SurdValue};
use crate::rational::{format_rational, int, rational_decimal, serde_rational, Rational, DECIMAL_DIGITS};
use crate::regions::{chambers, BoundChain, ClassTag};

pub use conjectures::{check_conjectures, ConjectureReport, ConjectureRow, ExactValue, NMode, Trend};
pub use montecarlo::{mc_volume, McEstimate};
pub use poly::MultiPoly;

/// Largest dimension accepted when no override is given.
pub const DEFAULT_MAX_D: usize = 8;
/// Hard ceiling on the dimension cap; symmetry factors beyond it overflow `u64`.
pub const MAX_D_CEILING: usize = 19;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_d: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_d: DEFAULT_MAX_D }
    }
}

impl Limits {
    pub fn new(max_d: usize) -> Result<Self> {
        if !(2..=MAX_D_CEILING).contains(&max_d) {
            return Err(Error::InvalidArgument(format!(
                "dimension cap must lie in 2..={MAX_D_CEILING}, got {max_d}"
            )));
        }
        Ok(Self { max_d })
    }

    /// Reads `PV_MAX_D`, falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var("PV_MAX_D") {
            Ok(text) => {
                let max_d = text.trim().parse().map_err(|_| {
                    Error::InvalidArgument(format!("PV_MAX_D must be an integer, got `{text}`"))
                })?;
                Self::new(max_d)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn check(&self, d: usize, n: usize) -> Result<()> {
        if d > self.max_d {
            return Err(Error::Unsupported {
                d,
                n,
                reason: format!("d exceeds the cap {} (raise PV_MAX_D)", self.max_d),
            });
        }
        Ok(())
    }
}

/// Whether the `(d, N)` pair has known chambers: `N = d+1`, `N = d` or `N = 3`.
pub fn is_supported(d: usize, n: usize) -> bool {
    Dims::new(d, n).is_ok() && (n == d + 1 || n == d || n == 3)
}

/// All supported `(d, N)` pairs with `d ≤ max_d`, sorted.
pub fn supported_pairs(max_d: usize) -> Vec<(usize, usize)> {
    (2..=max_d)
        .flat_map(|d| (3..=d + 1).filter(move |&n| is_supported(d, n)).map(move |n| (d, n)))
        .collect()
}

/// `∫…∫ 1`, integrating the innermost variable first.
pub fn integrate_chain(chain: &BoundChain) -> Result<Rational> {
    if !chain.is_well_formed() {
        return Err(Error::InvalidArgument(format!(
            "chain `{}` has bounds referencing later variables",
            chain.label
        )));
    }
    let n = chain.var_count();
    let mut integrand = MultiPoly::one(n.max(1));
    for (var, bound) in chain.bounds.iter().enumerate().rev() {
        let primitive = integrand.antiderivative(var);
        integrand = primitive
            .substitute(var, &bound.upper)
            .sub(&primitive.substitute(var, &bound.lower));
    }
    let value = integrand
        .as_constant()
        .expect("all variables integrated out");
    if value.is_negative() {
        return Err(Error::ChamberInconsistency {
            label: chain.label.clone(),
            value: format_rational(&value),
        });
    }
    Ok(value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sufficiency {
    KnownExact,
    /// The region comes from a necessary condition only.
    UpperBound,
}

impl Sufficiency {
    pub fn of(d: usize, n: usize, class_tag: ClassTag) -> Self {
        match class_tag {
            ClassTag::P => Sufficiency::UpperBound,
            ClassTag::CP | ClassTag::G => Sufficiency::KnownExact,
            ClassTag::EB if n == d || n == d + 1 => Sufficiency::KnownExact,
            ClassTag::EB => Sufficiency::UpperBound,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeResult {
    #[serde(rename = "class")]
    pub class_tag: ClassTag,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub symmetry_factor: u64,
    #[serde(serialize_with = "serde_rational::vec::serialize")]
    pub raw_chain_volumes: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub lambda_volume: Rational,
    pub hs_volume: SurdValue,
    pub hs_volume_decimal: String,
    pub sufficiency: Sufficiency,
}

/// Volume of one class with the default dimension cap.
pub fn class_volume(d: usize, n: usize, class_tag: ClassTag) -> Result<VolumeResult> {
    class_volume_with(&Limits::default(), d, n, class_tag)
}

pub fn class_volume_with(
    limits: &Limits,
    d: usize,
    n: usize,
    class_tag: ClassTag,
) -> Result<VolumeResult> {
    Dims::new(d, n)?;
    limits.check(d, n)?;
    let set = chambers(d, n, class_tag)?;
    let raw_chain_volumes = set
        .chains
        .par_iter()
        .map(integrate_chain)
        .collect::<Result<Vec<_>>>()?;
    let total = raw_chain_volumes
        .iter()
        .fold(Rational::zero(), |acc, v| acc + v);
    let lambda_volume = total * int(set.symmetry_factor as i64);
    let hs_volume = volume_prefactor(d, n)?.scale(&lambda_volume);
    Ok(VolumeResult {
        class_tag,
        d,
        n,
        symmetry_factor: set.symmetry_factor,
        raw_chain_volumes,
        hs_volume_decimal: hs_volume.decimal(DECIMAL_DIGITS),
        lambda_volume,
        hs_volume,
        sufficiency: Sufficiency::of(d, n, class_tag),
    })
}

/// Ratio of two already computed volumes of the same `(d, N)`.
pub fn ratio_of(num: &VolumeResult, den: &VolumeResult) -> Result<Rational> {
    if (num.d, num.n) != (den.d, den.n) {
        return Err(Error::InvalidArgument(format!(
            "volumes belong to different spaces: (d={}, N={}) vs (d={}, N={})",
            num.d, num.n, den.d, den.n
        )));
    }
    if den.lambda_volume.is_zero() {
        return Err(Error::InvalidArgument(format!(
            "volume of {} is zero, ratio undefined",
            den.class_tag
        )));
    }
    let ratio = &num.lambda_volume / &den.lambda_volume;
    let surd = &num.hs_volume / &den.hs_volume;
    assert_eq!(
        surd.as_rational(),
        Some(&ratio),
        "metric prefactor failed to cancel"
    );
    Ok(ratio)
}

pub fn volume_ratio(d: usize, n: usize, num: ClassTag, den: ClassTag) -> Result<Rational> {
    volume_ratio_with(&Limits::default(), d, n, num, den)
}

pub fn volume_ratio_with(
    limits: &Limits,
    d: usize,
    n: usize,
    num: ClassTag,
    den: ClassTag,
) -> Result<Rational> {
    let a = class_volume_with(limits, d, n, num)?;
    let b = class_volume_with(limits, d, n, den)?;
    ratio_of(&a, &b)
}

/// The three consecutive ratios `V_CP/V_P`, `V_G/V_CP`, `V_EB/V_G` for one `(d, N)`.
#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub cp_over_p: Rational,
    #[serde(with = "serde_rational")]
    pub g_over_cp: Rational,
    #[serde(with = "serde_rational")]
    pub eb_over_g: Rational,
    pub cp_over_p_decimal: String,
    pub g_over_cp_decimal: String,
    pub eb_over_g_decimal: String,
    pub eb_sufficiency: Sufficiency,
}

impl RatioRow {
    /// `(label, value)` pairs in column order.
    pub fn entries(&self) -> [(&'static str, &Rational); 3] {
        [
            ("CP/P", &self.cp_over_p),
            ("G/CP", &self.g_over_cp),
            ("EB/G", &self.eb_over_g),
        ]
    }
}

pub fn ratio_row(limits: &Limits, d: usize, n: usize) -> Result<RatioRow> {
    let vols = ClassTag::ALL
        .iter()
        .map(|&tag| class_volume_with(limits, d, n, tag))
        .collect::<Result<Vec<_>>>()?;
    let cp_over_p = ratio_of(&vols[1], &vols[0])?;
    let g_over_cp = ratio_of(&vols[2], &vols[1])?;
    let eb_over_g = ratio_of(&vols[3], &vols[2])?;
    let dec = |r: &Rational| rational_decimal(r, DECIMAL_DIGITS);
    Ok(RatioRow {
        d,
        n,
        cp_over_p_decimal: dec(&cp_over_p),
        g_over_cp_decimal: dec(&g_over_cp),
        eb_over_g_decimal: dec(&eb_over_g),
        cp_over_p,
        g_over_cp,
        eb_over_g,
        eb_sufficiency: vols[3].sufficiency,
    })
}
