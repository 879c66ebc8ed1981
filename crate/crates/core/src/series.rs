//! Truncated power series, Gevrey normalization and division by `z - xi`.
//!
//! A Gevrey series of order `s = p/q` has raw coefficients
//! `F_n = ([n/q]!)^p a_n`; the sequence `a_n` is its normalized view, the
//! coefficient sequence of the associated order-zero series.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factorial, ln_abs_rat, ln_big, pow, val_rat, Rational};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Coefficients of `z^0 .. z^N`, all of them exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSeries {
    coeffs: Vec<Rational>,
}

impl FormalSeries {
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series carries at least one coefficient");
        FormalSeries { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Rational) -> Self {
        Self::new((0..=order).map(f).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, |_| Rational::zero())
    }

    pub fn one(order: usize) -> Self {
        Self::from_poly(&Poly::one(), order)
    }

    pub fn from_poly(p: &Poly, order: usize) -> Self {
        Self::from_fn(order, |k| p.coeff(k))
    }

    /// Truncation order `N`: coefficients `0..=N` are valid.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        Self::from_fn(n, |k| &self.coeffs[k] + &o.coeffs[k])
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        Self::from_fn(n, |k| &self.coeffs[k] - &o.coeffs[k])
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Cauchy product.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut out = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(n + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `1/f`; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv0 = c0.recip();
        let mut out: Vec<Rational> = vec![inv0.clone()];
        for n in 1..=self.order() {
            let s: Rational = (1..=n).map(|k| &self.coeffs[k] * &out[n - k]).sum();
            out.push(-s * &inv0);
        }
        Ok(Self::new(out))
    }

    /// Generic power-series quotient `self / d`, by long division.
    pub fn div(&self, d: &Self) -> Result<Self> {
        let c0 = &d.coeffs[0];
        if c0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv0 = c0.recip();
        let n = self.order().min(d.order());
        let support: Vec<usize> = (1..=n).filter(|&k| !d.coeffs[k].is_zero()).collect();
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut s = self.coeffs[m].clone();
            for &k in support.iter().take_while(|&&k| k <= m) {
                s -= &d.coeffs[k] * &out[m - k];
            }
            out.push(s * &inv0);
        }
        Ok(Self::new(out))
    }

    /// Formal derivative; the truncation order drops by one.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |k| &self.coeffs[k + 1] * Rational::from_integer((k + 1).into()))
    }

    /// Antiderivative with zero constant term; the truncation order rises by one.
    pub fn integral(&self) -> Self {
        Self::from_fn(self.order() + 1, |k| {
            if k == 0 {
                Rational::zero()
            } else {
                &self.coeffs[k - 1] / Rational::from_integer(k.into())
            }
        })
    }

    /// `theta = z d/dz`.
    pub fn theta(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().map(|(k, c)| c * Rational::from_integer(k.into())).collect())
    }

    /// `z^k f`; exact up to order `N + k`.
    pub fn mul_z_pow(&self, k: usize) -> Self {
        Self::from_fn(self.order() + k, |n| if n < k { Rational::zero() } else { self.coeffs[n - k].clone() })
    }

    /// Multiplication by a polynomial, truncated at the series' order.
    pub fn mul_poly(&self, p: &Poly) -> Self {
        self.mul(&Self::from_poly(p, self.order()))
    }

    /// Value of the truncation at `x` (a polynomial evaluation).
    pub fn eval_truncation(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Taylor expansion of the truncation, read as a polynomial, around `xi`.
    pub fn recenter(&self, xi: &Rational) -> Self {
        let p = Poly::new(self.coeffs.clone()).shift(xi);
        Self::from_poly(&p, self.order())
    }
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = Poly::new(self.coeffs.clone()).display_in("z");
        write!(f, "{body} + O(z^{})", self.order() + 1)
    }
}

/// Basic series operations, addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
    Derivative,
    Theta,
}

pub fn series_arith(op: SeriesOp, operands: &[FormalSeries]) -> Result<FormalSeries> {
    let arity = match op {
        SeriesOp::Add | SeriesOp::Mul => 2,
        SeriesOp::Derivative | SeriesOp::Theta => 1,
    };
    if operands.len() != arity {
        return Err(Error::InconsistentBounds(format!("{op:?} takes {arity} operands, got {}", operands.len())));
    }
    Ok(match op {
        SeriesOp::Add => operands[0].add(&operands[1]),
        SeriesOp::Mul => operands[0].mul(&operands[1]),
        SeriesOp::Derivative => operands[0].derivative(),
        SeriesOp::Theta => operands[0].theta(),
    })
}

/// A Gevrey order `s = num/den` in lowest terms, `den >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GevreyOrder {
    num: i64,
    den: u64,
}

impl GevreyOrder {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = num.unsigned_abs().gcd(&den).max(1);
        GevreyOrder { num: num / g as i64, den: den / g }
    }

    pub fn integer(s: i64) -> Self {
        Self::new(s, 1)
    }

    pub fn from_rational(r: &Rational) -> Result<Self> {
        let num = r.numer().to_i64().ok_or_else(|| Error::Unsupported(format!("Gevrey order {r}")))?;
        let den = r.denom().to_u64().ok_or_else(|| Error::Unsupported(format!("Gevrey order {r}")))?;
        Ok(Self::new(num, den))
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn as_rational(&self) -> Rational {
        Rational::new(self.num.into(), self.den.into())
    }

    /// `([n/den]!)^num`.
    pub fn weight(&self, n: usize) -> Rational {
        let f = Rational::from_integer(factorial((n as u64) / self.den));
        pow(&f, self.num)
    }

    pub fn weights(&self, order: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(order + 1);
        let mut fact = BigInt::one();
        for n in 0..=order {
            let m = n as u64 / self.den;
            if n > 0 && (n as u64) % self.den == 0 {
                fact *= m;
            }
            out.push(pow(&Rational::from_integer(fact.clone()), self.num));
        }
        out
    }
}

impl fmt::Display for GevreyOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// A series together with its Gevrey order, stored through its normalized
/// coefficients `a_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GevreySeries {
    order: GevreyOrder,
    normalized: FormalSeries,
}

impl GevreySeries {
    pub fn from_normalized(normalized: FormalSeries, order: GevreyOrder) -> Self {
        GevreySeries { order, normalized }
    }

    pub fn from_raw(raw: &FormalSeries, order: GevreyOrder) -> Self {
        let w = order.weights(raw.order());
        let normalized = FormalSeries::new(raw.coeffs().iter().zip(&w).map(|(c, w)| c / w).collect());
        GevreySeries { order, normalized }
    }

    pub fn gevrey_order(&self) -> GevreyOrder {
        self.order
    }

    pub fn normalized(&self) -> &FormalSeries {
        &self.normalized
    }

    pub fn raw(&self) -> FormalSeries {
        let w = self.order.weights(self.normalized.order());
        FormalSeries::new(self.normalized.coeffs().iter().zip(&w).map(|(a, w)| a * w).collect())
    }

    pub fn truncation_order(&self) -> usize {
        self.normalized.order()
    }
}

/// The associated order-zero series `sum a_n z^n`.
pub fn borel_normalize(f: &GevreySeries) -> FormalSeries {
    f.normalized.clone()
}

/// Inverse of [`borel_normalize`]: tag `f` as the normalized view of an order-`s` series.
pub fn laplace_denormalize(f: &FormalSeries, s: GevreyOrder) -> GevreySeries {
    GevreySeries::from_normalized(f.clone(), s)
}

/// `G = (z - xi)^{-1} F`, computed on normalized coefficients through
/// `b_n = -sum_{k<=n} (w_k / w_n) xi^{k-n-1} a_k` with `w_n = ([n/q]!)^p`.
///
/// For `s < 0` integer this is `(n!/k!)^{|s|}`; for `s = p/q > 0` it is
/// `([k/q]!/[n/q]!)^p`. The truncation order is preserved.
pub fn divide_linear(f: &GevreySeries, xi: &Rational) -> Result<GevreySeries> {
    if xi.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let n_max = f.truncation_order();
    let w = f.order.weights(n_max);
    let xi_inv = xi.recip();
    let a = f.normalized.coeffs();
    // b_n = xi^{-1} ((w_{n-1} / w_n) b_{n-1} - a_n)
    let mut b: Vec<Rational> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let carried = if n == 0 { Rational::zero() } else { &w[n - 1] / &w[n] * &b[n - 1] };
        b.push((carried - &a[n]) * &xi_inv);
    }
    Ok(GevreySeries::from_normalized(FormalSeries::new(b), f.order))
}

/// Running growth statistics of a normalized coefficient sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEntry {
    pub n: usize,
    /// `max(|a_0|, ..., |a_n|)`.
    pub max_abs: Rational,
    /// Common denominator of `a_0, ..., a_n`.
    pub denom_lcm: BigInt,
    /// `max_abs^(1/n)`.
    pub conj_stat: f64,
    /// `denom_lcm^(1/n)`.
    pub den_stat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthVerdict {
    /// Both statistics stay bounded across the window.
    ConsistentWithG,
    NotG,
    /// Window too short to judge.
    Inconclusive,
}

/// Finite-window diagnostic for the growth and denominator conditions. It
/// never certifies the condition: a bounded statistic on `[N/2, N]` is only
/// evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithProfile {
    pub entries: Vec<ProfileEntry>,
    pub verdict: GrowthVerdict,
}

/// Largest tolerated ratio between the statistic at `N` and at `N/2`.
pub const PROFILE_DRIFT: f64 = 1.5;
/// Shortest window the verdict is issued on.
pub const PROFILE_MIN_WINDOW: usize = 8;

pub fn arith_profile(f: &GevreySeries) -> ArithProfile {
    sequence_profile(f.normalized.coeffs())
}

pub fn sequence_profile(a: &[Rational]) -> ArithProfile {
    let mut entries = Vec::with_capacity(a.len());
    let mut max_abs = Rational::zero();
    let mut lcm = BigInt::one();
    for (n, c) in a.iter().enumerate() {
        if c.abs() > max_abs {
            max_abs = c.abs();
        }
        lcm = lcm.lcm(c.denom());
        let (conj_stat, den_stat) = if n == 0 {
            (f64::NAN, f64::NAN)
        } else if max_abs.is_zero() {
            (0.0, (ln_big(&lcm) / n as f64).exp())
        } else {
            ((ln_abs_rat(&max_abs) / n as f64).exp(), (ln_big(&lcm) / n as f64).exp())
        };
        entries.push(ProfileEntry { n, max_abs: max_abs.clone(), denom_lcm: lcm.clone(), conj_stat, den_stat });
    }
    let verdict = if a.len() <= PROFILE_MIN_WINDOW {
        GrowthVerdict::Inconclusive
    } else {
        let last = &entries[a.len() - 1];
        let mid = &entries[(a.len() - 1) / 2];
        let bounded = |hi: f64, lo: f64| hi <= PROFILE_DRIFT * lo.max(1.0);
        if bounded(last.conj_stat, mid.conj_stat) && bounded(last.den_stat, mid.den_stat) {
            GrowthVerdict::ConsistentWithG
        } else {
            GrowthVerdict::NotG
        }
    };
    ArithProfile { entries, verdict }
}

/// Estimate of `log_p` of the p-adic radius of convergence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusEstimate {
    /// `min val_p(a_n)/n` over the tail window.
    pub raw: Rational,
    /// `raw` capped at 0, i.e. the radius capped at 1.
    pub log_radius: Rational,
    pub window: (usize, usize),
}

pub const RADIUS_MIN_NONZERO: usize = 8;

/// Observed `min val_p(a_n)/n` over the second half of the nonzero
/// coefficients with `n >= 1`. An estimate from truncated data, not a bound.
pub fn padic_radius_estimate(f: &FormalSeries, p: u64) -> Result<RadiusEstimate> {
    crate::arith::check_prime(p)?;
    if f.is_zero() {
        return Err(Error::ZeroSeries);
    }
    let nonzero: Vec<usize> = (1..=f.order()).filter(|&n| !f.coeff(n).is_zero()).collect();
    if nonzero.len() < RADIUS_MIN_NONZERO {
        return Err(Error::InsufficientCoefficients { needed: RADIUS_MIN_NONZERO, available: nonzero.len() });
    }
    let tail = &nonzero[nonzero.len() / 2..];
    let raw = tail
        .iter()
        .map(|&n| Rational::new(val_rat(f.coeff(n), p).unwrap().into(), (n as i64).into()))
        .min()
        .unwrap();
    let log_radius = if raw.is_positive() { Rational::zero() } else { raw.clone() };
    Ok(RadiusEstimate { raw, log_radius, window: (tail[0], *tail.last().unwrap()) })
}
