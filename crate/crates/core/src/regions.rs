//! Integration chambers for each channel class.
//!
//! A chamber is a chain of affine bounds over ordered eigenvalues, outermost
//! variable first, so that its volume is an iterated elementary integral.
//! The full class volume is the chamber sum times the number of index
//! permutations the ordering removes.
//!
//! Both the `N = d + 1` systems and the `N = 3` systems are instances of one
//! family: sorted variables `x_0 ≤ … ≤ x_{n-1}` carrying integer weights
//! `w_i`, constrained by `-1/(d-1) ≤ Σ w_i x_i ≤ 1 + d x_0`. For `N = d + 1`
//! every weight is one. For `N = 3` the slot holding `λ_4` has weight
//! `1 + (d-3)` (the Kronecker-delta placement), the others weight one.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Dims;
use crate::rational::{int, rat, rational_to_f64, serde_rational, Rational};

/// `constant + Σ_i coeffs[i] · x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineExpr {
    #[serde(with = "serde_rational")]
    pub constant: Rational,
    #[serde(with = "serde_rational::vec")]
    pub coeffs: Vec<Rational>,
}

impl AffineExpr {
    pub fn new(constant: Rational, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { constant, coeffs }
    }

    pub fn constant(value: Rational) -> Self {
        Self::new(value, Vec::new())
    }

    pub fn var(index: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); index + 1];
        coeffs[index] = Rational::one();
        Self::new(Rational::zero(), coeffs)
    }

    pub fn coeff(&self, index: usize) -> Rational {
        self.coeffs.get(index).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest variable index with a non-zero coefficient.
    pub fn max_var(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(point)
            .fold(self.constant.clone(), |acc, (c, x)| acc + c * x)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(
            &self.constant * factor,
            self.coeffs.iter().map(|c| c * factor).collect(),
        )
    }

    pub fn to_f64(&self) -> AffineF64 {
        AffineF64 {
            constant: rational_to_f64(&self.constant),
            coeffs: self.coeffs.iter().map(rational_to_f64).collect(),
        }
    }
}

/// Floating-point copy of an [`AffineExpr`] for fast point tests.
#[derive(Clone, Debug)]
pub struct AffineF64 {
    constant: f64,
    coeffs: Vec<f64>,
}

impl AffineF64 {
    pub fn eval(&self, point: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(point)
            .fold(self.constant, |acc, (c, x)| acc + c * x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bound {
    pub lower: AffineExpr,
    pub upper: AffineExpr,
}

/// Nested bounds, outermost variable first: `bounds[i]` may only reference
/// variables `0..i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundChain {
    pub label: String,
    /// Sorted slot occupied by the extra eigenvalue, for `N = 3` chambers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub placement: Option<usize>,
    pub bounds: Vec<Bound>,
}

impl BoundChain {
    pub fn new(label: impl Into<String>, bounds: Vec<(AffineExpr, AffineExpr)>) -> Result<Self> {
        let label = label.into();
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            for e in [lo, hi] {
                if e.max_var().is_some_and(|v| v >= i) {
                    return Err(Error::InvalidArgument(format!(
                        "chain `{label}`: bound on variable {i} references a later variable"
                    )));
                }
            }
        }
        Ok(Self {
            label,
            placement: None,
            bounds: bounds
                .into_iter()
                .map(|(lower, upper)| Bound { lower, upper })
                .collect(),
        })
    }

    pub fn var_count(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_well_formed(&self) -> bool {
        self.bounds.iter().enumerate().all(|(i, b)| {
            [&b.lower, &b.upper]
                .iter()
                .all(|e| e.max_var().is_none_or(|v| v < i))
        })
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        self.bounds.iter().enumerate().all(|(i, b)| {
            let x = &point[i];
            &b.lower.eval(point) <= x && x <= &b.upper.eval(point)
        })
    }

    pub fn compile(&self) -> CompiledChain {
        CompiledChain {
            placement: self.placement,
            bounds: self
                .bounds
                .iter()
                .map(|b| (b.lower.to_f64(), b.upper.to_f64()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompiledChain {
    placement: Option<usize>,
    bounds: Vec<(AffineF64, AffineF64)>,
}

impl CompiledChain {
    /// Whether the point lies in the chamber, at least `margin` inside every bound.
    pub fn contains(&self, point: &[f64], margin: f64) -> bool {
        self.bounds.iter().enumerate().all(|(i, (lo, hi))| {
            let x = point[i];
            lo.eval(point) + margin <= x && x <= hi.eval(point) - margin
        })
    }

    /// Smallest distance (in the bound's own scale) to any of the chain's bounds.
    pub fn slack(&self, point: &[f64]) -> f64 {
        self.bounds
            .iter()
            .enumerate()
            .map(|(i, (lo, hi))| (point[i] - lo.eval(point)).min(hi.eval(point) - point[i]))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ClassTag {
    P,
    CP,
    G,
    EB,
}

impl ClassTag {
    pub const ALL: [ClassTag; 4] = [ClassTag::P, ClassTag::CP, ClassTag::G, ClassTag::EB];
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassTag::P => "P",
            ClassTag::CP => "CP",
            ClassTag::G => "G",
            ClassTag::EB => "EB",
        };
        f.write_str(s)
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p" => Ok(ClassTag::P),
            "cp" => Ok(ClassTag::CP),
            "g" => Ok(ClassTag::G),
            "eb" => Ok(ClassTag::EB),
            _ => Err(Error::InvalidArgument(format!(
                "unknown class `{s}` (expected p, cp, g or eb)"
            ))),
        }
    }
}

/// How a raw eigenvalue vector maps onto chamber coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Coordinates used as given.
    Box,
    /// All coordinates sorted ascending.
    Sorted,
    /// All coordinates sorted ascending; chains are keyed by the sorted slot
    /// of the last coordinate.
    SortedWithPlacement,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChamberSet {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "class")]
    pub class_tag: ClassTag,
    pub symmetry_factor: u64,
    pub layout: Layout,
    pub chains: Vec<BoundChain>,
}

impl Layout {
    /// Maps raw free eigenvalues to chamber coordinates and the placement key.
    pub fn canonical(self, point: &[f64]) -> (Vec<f64>, Option<usize>) {
        match self {
            Layout::Box => (point.to_vec(), None),
            Layout::Sorted => {
                let mut sorted = point.to_vec();
                sorted.sort_by(f64::total_cmp);
                (sorted, None)
            }
            Layout::SortedWithPlacement => {
                let last = point.len() - 1;
                let mut order: Vec<usize> = (0..point.len()).collect();
                order.sort_by(|&a, &b| point[a].total_cmp(&point[b]).then(a.cmp(&b)));
                let slot = order.iter().position(|&i| i == last).expect("present");
                (order.iter().map(|&i| point[i]).collect(), Some(slot))
            }
        }
    }
}

impl ChamberSet {
    pub fn var_count(&self) -> usize {
        self.chains.first().map_or(0, BoundChain::var_count)
    }

    pub fn canonical(&self, point: &[f64]) -> (Vec<f64>, Option<usize>) {
        self.layout.canonical(point)
    }

    pub fn compile(&self) -> CompiledChambers {
        CompiledChambers {
            layout: self.layout,
            chains: self.chains.iter().map(BoundChain::compile).collect(),
        }
    }
}

/// Floating-point view of a [`ChamberSet`] for Monte Carlo membership tests.
#[derive(Clone, Debug)]
pub struct CompiledChambers {
    layout: Layout,
    chains: Vec<CompiledChain>,
}

impl CompiledChambers {
    fn applicable<'a>(
        &'a self,
        point: &[f64],
    ) -> (Vec<f64>, impl Iterator<Item = &'a CompiledChain> + 'a) {
        let (coords, slot) = self.layout.canonical(point);
        let chains = self
            .chains
            .iter()
            .filter(move |c| c.placement.is_none() || c.placement == slot);
        (coords, chains)
    }

    /// Number of chains containing the point (with the given inner margin),
    /// after mapping it to ordered coordinates.
    pub fn containing(&self, point: &[f64], margin: f64) -> usize {
        let (coords, chains) = self.applicable(point);
        chains.filter(|c| c.contains(&coords, margin)).count()
    }

    /// Distance from the point to the nearest bound of any applicable chain.
    pub fn min_slack(&self, point: &[f64]) -> f64 {
        let (coords, chains) = self.applicable(point);
        chains
            .map(|c| c.slack(&coords).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Sorted, weighted variables of one chamber family.
struct OrderedFamily {
    d: i64,
    weights: Vec<i64>,
}

impl OrderedFamily {
    fn n(&self) -> usize {
        self.weights.len()
    }

    /// Sum of weights from slot `k` on.
    fn tail(&self, k: usize) -> i64 {
        self.weights[k..].iter().sum()
    }

    /// `Σ_{i<k} w_i x_i`.
    fn head_sum(&self, k: usize) -> AffineExpr {
        AffineExpr::new(
            Rational::zero(),
            self.weights[..k].iter().map(|&w| int(w)).collect(),
        )
    }

    /// `-1/(d-1)`.
    fn lower_edge(&self) -> Rational {
        rat(-1, self.d - 1)
    }

    /// `-1/(d²-1)`: below it the lower Fujiwara-Algoet bound can bind.
    fn split(&self) -> Rational {
        rat(-1, (self.d - 1) * self.tail(0))
    }

    /// `(1 + d x_0 - Σ_{i<k} w_i x_i) / W_k`.
    fn upper(&self, k: usize) -> AffineExpr {
        let mut e = self.head_sum(k).scale(&int(-1));
        e.constant = Rational::one();
        let mut coeffs = e.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        coeffs[0] += int(self.d);
        AffineExpr::new(e.constant, coeffs).scale(&rat(1, self.tail(k)))
    }

    /// `-(1/(d-1) + Σ_{i<k} w_i x_i) / W_k`.
    fn lower(&self, k: usize) -> AffineExpr {
        let mut e = self.head_sum(k);
        e.constant = rat(1, self.d - 1);
        e.scale(&rat(-1, self.tail(k)))
    }

    /// `(1 - Σ_{i<k} w_i x_i) / W_k`.
    fn eb_upper(&self, k: usize) -> AffineExpr {
        let mut e = self.head_sum(k).scale(&int(-1));
        e.constant = Rational::one();
        e.scale(&rat(1, self.tail(k)))
    }

    fn previous(k: usize) -> AffineExpr {
        AffineExpr::var(k - 1)
    }

    /// Chamber where the lower bound on the sum is inactive: `x_0 ≥ -1/(d²-1)`.
    fn unconstrained_below(&self, label: String) -> Result<BoundChain> {
        let mut bounds = vec![(AffineExpr::constant(self.split()), AffineExpr::constant(int(1)))];
        bounds.extend((1..self.n()).map(|k| (Self::previous(k), self.upper(k))));
        BoundChain::new(label, bounds)
    }

    /// Chamber where slot `m` (1-based, `2 ≤ m ≤ n`) is the first variable
    /// above the lower Fujiwara-Algoet boundary.
    fn crossing_at(&self, m: usize, label: String) -> Result<BoundChain> {
        let mut bounds = vec![(
            AffineExpr::constant(self.lower_edge()),
            AffineExpr::constant(self.split()),
        )];
        for k in 1..self.n() {
            let slot = k + 1;
            let bound = match slot.cmp(&m) {
                std::cmp::Ordering::Less => (Self::previous(k), self.lower(k)),
                std::cmp::Ordering::Equal => (self.lower(k), self.upper(k)),
                std::cmp::Ordering::Greater => (Self::previous(k), self.upper(k)),
            };
            bounds.push(bound);
        }
        BoundChain::new(label, bounds)
    }

    fn generator(&self, label: String) -> Result<BoundChain> {
        let mut bounds = vec![(AffineExpr::constant(int(0)), AffineExpr::constant(int(1)))];
        bounds.extend((1..self.n()).map(|k| (Self::previous(k), self.upper(k))));
        BoundChain::new(label, bounds)
    }

    fn entanglement_breaking(&self, label: String) -> Result<BoundChain> {
        let mut bounds = vec![(
            AffineExpr::constant(int(0)),
            AffineExpr::constant(rat(1, self.tail(0))),
        )];
        bounds.extend((1..self.n()).map(|k| (Self::previous(k), self.eb_upper(k))));
        BoundChain::new(label, bounds)
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The positivity box `[-1/(d-1), 1]^coords`.
pub fn p_box(d: usize, n: usize) -> Result<ChamberSet> {
    let dims = Dims::new(d, n)?;
    let side = (AffineExpr::constant(dims.lower_edge()), AffineExpr::constant(int(1)));
    let chain = BoundChain::new("box", vec![side; dims.coords()])?;
    Ok(ChamberSet {
        d,
        n,
        class_tag: ClassTag::P,
        symmetry_factor: 1,
        layout: Layout::Box,
        chains: vec![chain],
    })
}

fn max_family(d: usize) -> Result<OrderedFamily> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension d must be at least 2, got {d}")));
    }
    Ok(OrderedFamily {
        d: d as i64,
        weights: vec![1; d + 1],
    })
}

fn ordered_set(d: usize, n: usize, class_tag: ClassTag, chains: Vec<BoundChain>) -> ChamberSet {
    ChamberSet {
        d,
        n,
        class_tag,
        symmetry_factor: factorial(d + 1),
        layout: Layout::Sorted,
        chains,
    }
}

/// Completely positive chambers for `N = d + 1`, in the order: lowest
/// variable crossing last, crossing at `M = 2, …, d`, lower bound inactive.
pub fn cp_chambers_max_n(d: usize) -> Result<ChamberSet> {
    let family = max_family(d)?;
    let n = d + 1;
    let mut chains = vec![family.crossing_at(n, "A1".to_string())?];
    for m in 2..n {
        chains.push(family.crossing_at(m, format!("A2[M={m}]"))?);
    }
    chains.push(family.unconstrained_below("A3".to_string())?);
    Ok(ordered_set(d, n, ClassTag::CP, chains))
}

pub fn g_chambers_max_n(d: usize) -> Result<ChamberSet> {
    let family = max_family(d)?;
    let chain = family.generator("G".to_string())?;
    Ok(ordered_set(d, d + 1, ClassTag::G, vec![chain]))
}

pub fn eb_chambers_max_n(d: usize) -> Result<ChamberSet> {
    let family = max_family(d)?;
    let chain = family.entanglement_breaking("EB".to_string())?;
    Ok(ordered_set(d, d + 1, ClassTag::EB, vec![chain]))
}

const SLOT_NAMES: [&str; 4] = ["min", "mid1", "mid2", "max"];

/// Chambers for three bases: `λ_1 ≤ λ_2 ≤ λ_3` with `λ_4` in each of the
/// four sorted slots.
pub fn chambers_n3(d: usize, class_tag: ClassTag) -> Result<ChamberSet> {
    if d < 3 {
        return Err(Error::Domain(format!(
            "three-basis chambers need d >= 3, got {d}"
        )));
    }
    let mut chains = Vec::new();
    for (slot, name) in SLOT_NAMES.iter().enumerate() {
        let weights = (0..4)
            .map(|s| if s == slot { d as i64 - 2 } else { 1 })
            .collect();
        let family = OrderedFamily { d: d as i64, weights };
        let tag = format!("λ4={name}");
        let mut placed = match class_tag {
            ClassTag::CP => vec![
                family.unconstrained_below(format!("C1[{tag}]"))?,
                family.crossing_at(4, format!("C2[{tag}]"))?,
                family.crossing_at(3, format!("C3[{tag}]"))?,
                family.crossing_at(2, format!("C4[{tag}]"))?,
            ],
            ClassTag::G => vec![family.generator(format!("G[{tag}]"))?],
            ClassTag::EB => vec![family.entanglement_breaking(format!("EB[{tag}]"))?],
            ClassTag::P => {
                return Err(Error::InvalidArgument(
                    "the positivity box is not split into chambers; use p_box".to_string(),
                ))
            }
        };
        for chain in &mut placed {
            chain.placement = Some(slot);
        }
        chains.extend(placed);
    }
    Ok(ChamberSet {
        d,
        n: 3,
        class_tag,
        symmetry_factor: 6,
        layout: Layout::SortedWithPlacement,
        chains,
    })
}

/// Chambers for any supported `(d, N)`: `N = d + 1`, `N = 3` and `N = d`.
pub fn chambers(d: usize, n: usize, class_tag: ClassTag) -> Result<ChamberSet> {
    let dims = Dims::new(d, n)?;
    if class_tag == ClassTag::P {
        return p_box(d, n);
    }
    let relabel = |mut set: ChamberSet| {
        set.n = n;
        set
    };
    if dims.is_max() || (n == d && n != 3) {
        return Ok(relabel(match class_tag {
            ClassTag::CP => cp_chambers_max_n(d)?,
            ClassTag::G => g_chambers_max_n(d)?,
            ClassTag::EB => eb_chambers_max_n(d)?,
            ClassTag::P => unreachable!(),
        }));
    }
    if n == 3 {
        return chambers_n3(d, class_tag);
    }
    Err(Error::Unsupported {
        d,
        n,
        reason: "chambers are known only for N = d+1, N = d and N = 3".to_string(),
    })
}
