//! Partial fractions over the rationals, in the form `P(z) + sum c / (1 - a z)^m`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{pow, Rational};
use crate::error::{Error, Result};
use crate::poly::{Poly, RationalFunction};
use crate::series::FormalSeries;

/// `sum_m coeffs[m-1] / (1 - rate z)^m`, with `rate != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleTerm {
    pub rate: Rational,
    pub coeffs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFraction {
    pub poly: Poly,
    /// Sorted by decreasing rate, each rate once.
    pub terms: Vec<PoleTerm>,
}

fn binom(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

impl PartialFraction {
    pub fn zero() -> Self {
        PartialFraction { poly: Poly::zero(), terms: Vec::new() }
    }

    /// `sum b_i / (1 - a_i z)` with pairwise distinct `a_i`.
    pub fn simple(pairs: &[(Rational, Rational)]) -> Result<Self> {
        let mut terms: BTreeMap<Rational, Rational> = BTreeMap::new();
        let mut poly = Poly::zero();
        let mut seen_zero = false;
        for (a, b) in pairs {
            if terms.contains_key(a) || (a.is_zero() && seen_zero) {
                return Err(Error::RepeatedRate(a.to_string()));
            }
            if a.is_zero() {
                seen_zero = true;
                poly = Poly::constant(b.clone());
            } else {
                terms.insert(a.clone(), b.clone());
            }
        }
        let terms = terms
            .into_iter()
            .rev()
            .filter(|(_, b)| !b.is_zero())
            .map(|(rate, b)| PoleTerm { rate, coeffs: vec![b] })
            .collect();
        Ok(PartialFraction { poly, terms })
    }

    /// Decomposition of `f`, if its denominator splits over the rationals and
    /// does not vanish at 0.
    pub fn from_rational_function(f: &RationalFunction) -> Option<Self> {
        let den = f.den();
        if den.eval(&Rational::zero()).is_zero() {
            return None;
        }
        let roots = den.rational_roots();
        let split: usize = roots.iter().map(|(_, m)| m).sum();
        if Some(split) != den.degree().or(Some(0)) {
            return None;
        }
        let (poly, rem) = f.num().div_rem(den).ok()?;
        let mut terms = Vec::new();
        for (alpha, m) in &roots {
            // den = (z - alpha)^m h
            let mut h = den.clone();
            for _ in 0..*m {
                h = h.div_rem(&Poly::linear_root(alpha)).ok()?.0;
            }
            let local = FormalSeries::from_poly(&rem.shift(alpha), m - 1).div(&FormalSeries::from_poly(&h.shift(alpha), m - 1)).ok()?;
            let rate = alpha.recip();
            let coeffs = (1..=*m).map(|k| local.coeff(m - k) * pow(&-&rate, k as i64)).collect();
            terms.push(PoleTerm { rate, coeffs });
        }
        terms.sort_by(|a, b| b.rate.cmp(&a.rate));
        Some(PartialFraction { poly, terms })
    }

    pub fn to_rational_function(&self) -> RationalFunction {
        let mut acc = RationalFunction::from_poly(self.poly.clone());
        for t in &self.terms {
            let base = Poly::new(vec![Rational::one(), -t.rate.clone()]);
            for (m, c) in t.coeffs.iter().enumerate() {
                let term = RationalFunction::new(Poly::constant(c.clone()), base.pow(m + 1)).expect("nonzero denominator");
                acc = acc.add(&term);
            }
        }
        acc
    }

    /// `n`-th Taylor coefficient at 0.
    pub fn coefficient(&self, n: usize) -> Rational {
        let mut s = self.poly.coeff(n);
        for t in &self.terms {
            let an = pow(&t.rate, n as i64);
            for (m, c) in t.coeffs.iter().enumerate() {
                s += c * &an * Rational::from_integer(binom(n + m, m));
            }
        }
        s
    }

    pub fn series(&self, order: usize) -> FormalSeries {
        FormalSeries::from_fn(order, |n| self.coefficient(n))
    }
}

fn base_display(rate: &Rational) -> String {
    let sign = if rate.is_positive() { '-' } else { '+' };
    let a = rate.abs();
    if a.is_one() {
        format!("1 {sign} z")
    } else {
        format!("1 {sign} {a}z")
    }
}

impl fmt::Display for PartialFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.poly.is_zero() {
            parts.push(self.poly.display_in("z"));
        }
        for t in &self.terms {
            let base = base_display(&t.rate);
            for (m, c) in t.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let den = if m == 0 { format!("({base})") } else { format!("({base})^{}", m + 1) };
                parts.push(format!("{c}/{den}"));
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

/// The associated series of `F = sum b_i e^{a_i z}`: `f = sum b_i / (1 - a_i z)`,
/// with coefficients `sum b_i a_i^n` up to `z^order`.
pub fn exp_poly_borel(pairs: &[(Rational, Rational)], order: usize) -> Result<(PartialFraction, FormalSeries)> {
    let pf = PartialFraction::simple(pairs)?;
    let series = FormalSeries::from_fn(order, |n| pairs.iter().map(|(a, b)| b * pow(a, n as i64)).sum());
    Ok((pf, series))
}
