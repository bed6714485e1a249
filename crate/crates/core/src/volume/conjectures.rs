//! Comparison of computed volume ratios with their closed forms.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use super::{class_volume_with, ratio_of, Limits};
use crate::error::{Error, Result};
use crate::geometry::{vp_volume, SurdValue};
use crate::rational::{factorial, format_rational, rat, rational_decimal, Rational, DECIMAL_DIGITS};
use crate::regions::ClassTag;

/// How the number of bases follows from `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NMode {
    /// `N = d + 1`
    Max,
    /// `N = d`
    D,
    /// `N = 3`
    Three,
}

impl NMode {
    pub fn n_for(self, d: usize) -> usize {
        match self {
            NMode::Max => d + 1,
            NMode::D => d,
            NMode::Three => 3,
        }
    }
}

impl fmt::Display for NMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NMode::Max => "max",
            NMode::D => "d",
            NMode::Three => "3",
        })
    }
}

impl FromStr for NMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "max" => Ok(NMode::Max),
            "d" => Ok(NMode::D),
            "3" => Ok(NMode::Three),
            other => Err(Error::InvalidArgument(format!(
                "unknown N mode `{other}` (expected max, d or 3)"
            ))),
        }
    }
}

/// An exact number: rational, or rational times a square root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactValue {
    Rational(Rational),
    Surd(SurdValue),
}

impl ExactValue {
    pub fn decimal(&self) -> String {
        match self {
            ExactValue::Rational(r) => rational_decimal(r, DECIMAL_DIGITS),
            ExactValue::Surd(s) => s.decimal(DECIMAL_DIGITS),
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Rational(r) => f.write_str(&format_rational(r)),
            ExactValue::Surd(s) => write!(f, "{s}"),
        }
    }
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExactValue::Rational(r) => s.serialize_str(&format_rational(r)),
            ExactValue::Surd(v) => v.serialize(s),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureRow {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub relation: &'static str,
    pub computed: ExactValue,
    pub expected: ExactValue,
    pub decimal: String,
    pub holds: bool,
    /// Beyond the dimensions the closed form was originally checked for.
    pub extrapolated: bool,
}

/// Behaviour of `V_G/V_CP` over the checked dimensions.
#[derive(Clone, Debug, Serialize)]
pub struct Trend {
    pub values: Vec<String>,
    pub increasing: bool,
    /// `1/e` for `N = d+1` and `N = d`; the sequence is compared against it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub below_limit: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub n_mode: NMode,
    pub rows: Vec<ConjectureRow>,
    pub all_hold: bool,
    pub g_over_cp_trend: Trend,
}

struct Closed {
    cp_over_p: Rational,
    g_over_cp: Rational,
    eb_over_g: Rational,
}

fn closed_forms(d: usize, n: usize) -> Closed {
    let di = d as i64;
    let dd = BigInt::from(d);
    let eb_over_g = rat(1, di + 1);
    if n == 3 && d >= 3 {
        Closed {
            cp_over_p: rat(di, 24 * (di - 2)),
            g_over_cp: Rational::new(
                BigInt::from((di * di - 1) * (di - 1).pow(3)),
                dd.pow(5),
            ),
            eb_over_g,
        }
    } else {
        Closed {
            cp_over_p: Rational::new(dd.clone(), factorial(d as u64 + 1)),
            g_over_cp: rat(di * di - 1, di * di)
                * Rational::new(BigInt::from(di - 1).pow(d as u32), dd.pow(d as u32)),
            eb_over_g,
        }
    }
}

fn extrapolated(mode: NMode, d: usize) -> bool {
    match mode {
        NMode::Max | NMode::D => d > 5,
        NMode::Three => d > 6,
    }
}

/// Exact verdicts per `d`; mismatches are reported rather than raised.
pub fn check_conjectures(
    limits: &Limits,
    ds: impl IntoIterator<Item = usize>,
    mode: NMode,
) -> Result<ConjectureReport> {
    let mut rows = Vec::new();
    let mut g_over_cp = Vec::new();
    for d in ds {
        let n = mode.n_for(d);
        let vols = ClassTag::ALL
            .iter()
            .map(|&tag| class_volume_with(limits, d, n, tag))
            .collect::<Result<Vec<_>>>()?;
        let closed = closed_forms(d, n);
        let flag = extrapolated(mode, d);
        let mut push = |relation, computed: ExactValue, expected: ExactValue| {
            rows.push(ConjectureRow {
                d,
                n,
                relation,
                decimal: computed.decimal(),
                holds: computed == expected,
                computed,
                expected,
                extrapolated: flag,
            });
        };
        push(
            "V_P",
            ExactValue::Surd(vols[0].hs_volume.clone()),
            ExactValue::Surd(vp_volume(d, n)?),
        );
        let ratios = [
            ("V_CP/V_P", ratio_of(&vols[1], &vols[0])?, closed.cp_over_p),
            ("V_G/V_CP", ratio_of(&vols[2], &vols[1])?, closed.g_over_cp),
            ("V_EB/V_G", ratio_of(&vols[3], &vols[2])?, closed.eb_over_g),
        ];
        for (relation, computed, expected) in ratios {
            if relation == "V_G/V_CP" {
                g_over_cp.push(computed.clone());
            }
            push(relation, ExactValue::Rational(computed), ExactValue::Rational(expected));
        }
    }
    let increasing = g_over_cp.windows(2).all(|w| w[0] < w[1]);
    let inverse_e = (-1.0f64).exp();
    let (limit, below_limit) = match mode {
        NMode::Max | NMode::D => (
            Some(format!("{inverse_e:.17}")),
            Some(
                g_over_cp
                    .iter()
                    .all(|r| crate::rational::rational_to_f64(r) < inverse_e),
            ),
        ),
        NMode::Three => (None, None),
    };
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(ConjectureReport {
        n_mode: mode,
        all_hold,
        g_over_cp_trend: Trend {
            values: g_over_cp
                .iter()
                .map(|r| rational_decimal(r, DECIMAL_DIGITS))
                .collect(),
            increasing,
            limit,
            below_limit,
        },
        rows,
    })
}
