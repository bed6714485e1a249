//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::regions::AffineExpr;
use crate::rational::{int, Rational};

/// `Σ c_e x^e` over a fixed number of variables; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, value: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], value);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn from_affine(expr: &AffineExpr, nvars: usize) -> Self {
        let mut p = Self::constant(nvars, expr.constant.clone());
        for (i, c) in expr.coeffs.iter().enumerate() {
            assert!(i < nvars || c.is_zero(), "affine expression references x{i}");
            let mut exps = vec![0; nvars];
            exps[i] = 1;
            p.add_term(exps, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// The value if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(e, _)| e.iter().all(|&k| k == 0))
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    fn add_term(&mut self, exps: Vec<u32>, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * factor)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(self.nvars), |acc, _| acc.mul(self))
    }

    /// Antiderivative in `var` with zero constant of integration.
    pub fn antiderivative(&self, var: usize) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e[var] += 1;
                    let k = int(e[var] as i64);
                    (e, c / k)
                })
                .collect(),
        }
    }

    /// Replaces `x_var` by an affine expression in the other variables.
    pub fn substitute(&self, var: usize, expr: &AffineExpr) -> Self {
        assert!(
            expr.coeff(var).is_zero(),
            "substituted expression must not contain x{var}"
        );
        // group terms by the power of x_var
        let mut by_power: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e[var];
            let mut rest = e.clone();
            rest[var] = 0;
            by_power
                .entry(k)
                .or_insert_with(|| Self::zero(self.nvars))
                .add_term(rest, c.clone());
        }
        let base = Self::from_affine(expr, self.nvars);
        let mut out = Self::zero(self.nvars);
        let mut power = Self::one(self.nvars);
        let mut current = 0;
        for (k, coeff) in by_power {
            while current < k {
                power = power.mul(&base);
                current += 1;
            }
            out = out.add(&coeff.mul(&power));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (e, c)| {
            let mono = e
                .iter()
                .zip(point)
                .fold(Rational::one(), |m, (&k, x)| m * num_traits::pow(x.clone(), k as usize));
            acc + c * mono
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn x(i: usize, n: usize) -> MultiPoly {
        MultiPoly::from_affine(&AffineExpr::var(i), n)
    }

    #[test]
    fn arithmetic() {
        let p = x(0, 2).add(&x(1, 2)); // x + y
        let sq = p.pow(2);
        assert_eq!(sq.term_count(), 3);
        assert_eq!(sq.degree(), 2);
        assert_eq!(sq.eval(&[int(2), int(3)]), int(25));
        assert!(sq.sub(&sq).is_zero());
        assert_eq!(MultiPoly::constant(3, rat(2, 5)).as_constant(), Some(rat(2, 5)));
        assert_eq!(x(0, 1).as_constant(), None);
        assert!(MultiPoly::constant(2, int(0)).is_zero());
    }

    #[test]
    fn antiderivative_and_substitution() {
        // ∫ x dx = x²/2, then x := 1 - y gives (1 - y)²/2
        let f = x(0, 2).antiderivative(0);
        let g = f.substitute(0, &AffineExpr::new(int(1), vec![int(0), int(-1)]));
        let expected = MultiPoly::one(2).sub(&x(1, 2)).pow(2).scale(&rat(1, 2));
        assert_eq!(g, expected);
    }

    proptest! {
        #[test]
        fn substitution_commutes_with_evaluation(
            coeffs in proptest::collection::vec(-5i64..5, 6),
            a in -4i64..4, b in -4i64..4, c in -4i64..4,
            y in -6i64..6, z in -6i64..6,
        ) {
            // p(x, y, z) = Σ coeffs · monomials
            let n = 3;
            let monos = [x(0, n), x(1, n), x(2, n), x(0, n).mul(&x(1, n)), x(0, n).pow(2), x(0, n).mul(&x(2, n)).mul(&x(0, n))];
            let p = monos.iter().zip(&coeffs).fold(MultiPoly::zero(n), |acc, (m, &k)| acc.add(&m.scale(&int(k))));
            let expr = AffineExpr::new(int(a), vec![int(0), int(b), int(c)]);
            let point = [int(0), int(y), int(z)];
            let x_val = expr.eval(&point);
            let direct = p.eval(&[x_val, int(y), int(z)]);
            prop_assert_eq!(p.substitute(0, &expr).eval(&point), direct);
        }
    }
}
