//! Fixed absolute precision p-adic numbers.
//!
//! A value is known modulo `p^precision`. Nonzero values are stored as
//! `p^valuation * unit` with the unit reduced modulo `p^(precision - valuation)`.
//! Values that are zero to the working precision are kept apart from the
//! exact zero, which absorbs products and carries unbounded precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{check_prime, mod_inverse, val_int, Rational};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    ExactZero,
    /// Congruent to zero modulo `p^precision`.
    Vanishing,
    Unit { valuation: i64, unit: BigInt },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicValue {
    prime: u64,
    precision: i64,
    repr: Repr,
}

fn p_pow(p: u64, e: i64) -> BigInt {
    debug_assert!(e >= 0);
    num_traits::pow(BigInt::from(p), e as usize)
}

impl PAdicValue {
    pub fn exact_zero(prime: u64) -> Self {
        PAdicValue { prime, precision: i64::MAX, repr: Repr::ExactZero }
    }

    /// Reduces `r` to absolute precision `precision`.
    pub fn from_rational(r: &Rational, prime: u64, precision: i64) -> Result<Self> {
        check_prime(prime)?;
        if r.is_zero() {
            return Ok(Self::exact_zero(prime));
        }
        let vn = val_int(r.numer(), prime).unwrap() as i64;
        let vd = val_int(r.denom(), prime).unwrap() as i64;
        let valuation = vn - vd;
        Ok(Self::with_unit(prime, precision, valuation, r.numer() / p_pow(prime, vn), r.denom() / p_pow(prime, vd)))
    }

    pub fn from_integer(n: &BigInt, prime: u64, precision: i64) -> Result<Self> {
        Self::from_rational(&Rational::from_integer(n.clone()), prime, precision)
    }

    fn with_unit(prime: u64, precision: i64, valuation: i64, num: BigInt, den: BigInt) -> Self {
        if valuation >= precision {
            return PAdicValue { prime, precision, repr: Repr::Vanishing };
        }
        let modulus = p_pow(prime, precision - valuation);
        let inv = mod_inverse(&den, &modulus).expect("unit denominator");
        let unit = (num * inv).mod_floor(&modulus);
        PAdicValue { prime, precision, repr: Repr::Unit { valuation, unit } }
    }

    /// Normalizes `p^base * residue` known modulo `p^precision`.
    fn normalize(prime: u64, precision: i64, base: i64, residue: BigInt) -> Self {
        if residue.is_zero() {
            return PAdicValue { prime, precision, repr: Repr::Vanishing };
        }
        let extra = val_int(&residue, prime).unwrap() as i64;
        let valuation = base + extra;
        if valuation >= precision {
            return PAdicValue { prime, precision, repr: Repr::Vanishing };
        }
        let unit = (residue / p_pow(prime, extra)).mod_floor(&p_pow(prime, precision - valuation));
        PAdicValue { prime, precision, repr: Repr::Unit { valuation, unit } }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Absolute precision; `None` for the exact zero.
    pub fn precision(&self) -> Option<i64> {
        match self.repr {
            Repr::ExactZero => None,
            _ => Some(self.precision),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.repr == Repr::ExactZero
    }

    /// True when the value is zero to its precision (or exactly zero).
    pub fn is_zero(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    /// Valuation if the value is distinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Unit { valuation, .. } => Some(*valuation),
            _ => None,
        }
    }

    /// Lower bound on the valuation: exact for units, the precision for
    /// vanishing values.
    pub fn valuation_lower_bound(&self) -> i64 {
        match &self.repr {
            Repr::ExactZero => i64::MAX,
            Repr::Vanishing => self.precision,
            Repr::Unit { valuation, .. } => *valuation,
        }
    }

    pub fn unit(&self) -> Option<&BigInt> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// The value modulo `p^precision` as an integer in `[0, p^precision)`,
    /// defined when the valuation is nonnegative.
    pub fn residue(&self) -> Option<BigInt> {
        match &self.repr {
            Repr::ExactZero | Repr::Vanishing => Some(BigInt::zero()),
            Repr::Unit { valuation, unit } if *valuation >= 0 => Some(unit * p_pow(self.prime, *valuation)),
            Repr::Unit { .. } => None,
        }
    }

    /// Reduction to a smaller absolute precision.
    pub fn reduce(&self, precision: i64) -> Self {
        match &self.repr {
            Repr::ExactZero => self.clone(),
            _ if precision >= self.precision => self.clone(),
            Repr::Vanishing => PAdicValue { prime: self.prime, precision, repr: Repr::Vanishing },
            Repr::Unit { valuation, unit } => {
                if *valuation >= precision {
                    PAdicValue { prime: self.prime, precision, repr: Repr::Vanishing }
                } else {
                    let unit = unit.mod_floor(&p_pow(self.prime, precision - valuation));
                    PAdicValue { prime: self.prime, precision, repr: Repr::Unit { valuation: *valuation, unit } }
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.prime, other.prime, "mixed primes");
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) => return other.clone(),
            (_, Repr::ExactZero) => return self.clone(),
            _ => {}
        }
        let precision = self.precision.min(other.precision);
        let a = self.reduce(precision);
        let b = other.reduce(precision);
        match (&a.repr, &b.repr) {
            (Repr::Vanishing, _) => b,
            (_, Repr::Vanishing) => a,
            (Repr::Unit { valuation: va, unit: ua }, Repr::Unit { valuation: vb, unit: ub }) => {
                let base = (*va).min(*vb);
                let modulus = p_pow(self.prime, precision - base);
                let sum = ua * p_pow(self.prime, va - base) + ub * p_pow(self.prime, vb - base);
                Self::normalize(self.prime, precision, base, sum.mod_floor(&modulus))
            }
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Unit { valuation, unit } => {
                let modulus = p_pow(self.prime, self.precision - valuation);
                let unit = (-unit).mod_floor(&modulus);
                PAdicValue { prime: self.prime, precision: self.precision, repr: Repr::Unit { valuation: *valuation, unit } }
            }
            _ => self.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product; the absolute precision is `min(prec_a + val_b, prec_b + val_a)`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.prime, other.prime, "mixed primes");
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => Self::exact_zero(self.prime),
            (Repr::Vanishing, Repr::Vanishing) => PAdicValue {
                prime: self.prime,
                precision: self.precision.saturating_add(other.precision),
                repr: Repr::Vanishing,
            },
            (Repr::Vanishing, Repr::Unit { valuation, .. }) => PAdicValue {
                prime: self.prime,
                precision: self.precision + valuation,
                repr: Repr::Vanishing,
            },
            (Repr::Unit { .. }, Repr::Vanishing) => other.mul(self),
            (Repr::Unit { valuation: va, unit: ua }, Repr::Unit { valuation: vb, unit: ub }) => {
                let valuation = va + vb;
                let precision = (self.precision + vb).min(other.precision + va);
                if valuation >= precision {
                    return PAdicValue { prime: self.prime, precision, repr: Repr::Vanishing };
                }
                let unit = (ua * ub).mod_floor(&p_pow(self.prime, precision - valuation));
                PAdicValue { prime: self.prime, precision, repr: Repr::Unit { valuation, unit } }
            }
        }
    }

    /// True when `self` and `r` agree modulo `p^precision`.
    pub fn congruent_to(&self, r: &Rational) -> bool {
        if self.is_exact_zero() {
            return r.is_zero();
        }
        let other = PAdicValue::from_rational(r, self.prime, self.precision).expect("prime checked at construction");
        self.sub(&other).is_zero()
    }

    /// Smallest-height rational congruent to the value, by lattice reduction
    /// of `(residue, p^precision)`. Succeeds when a rational with numerator
    /// and denominator below `sqrt(p^precision / 2)` exists.
    pub fn rational_reconstruction(&self) -> Option<Rational> {
        match &self.repr {
            Repr::ExactZero | Repr::Vanishing => Some(Rational::zero()),
            Repr::Unit { valuation, .. } => {
                let shift = (-valuation).max(0);
                let scaled = self.mul(&PAdicValue::from_integer(&p_pow(self.prime, shift), self.prime, self.precision + shift).ok()?);
                let residue = scaled.residue()?;
                let modulus = p_pow(self.prime, scaled.precision);
                let r = reconstruct_mod(&residue, &modulus)?;
                Some(r / Rational::from_integer(p_pow(self.prime, shift)))
            }
        }
    }
}

/// Wang's rational reconstruction of `a mod m`.
pub fn reconstruct_mod(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound || !r1.gcd(&s1).is_one() {
        return None;
    }
    Some(Rational::new(r1, s1))
}

impl fmt::Display for PAdicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::ExactZero => write!(f, "0"),
            Repr::Vanishing => write!(f, "O({}^{})", self.prime, self.precision),
            Repr::Unit { valuation, unit } => {
                write!(f, "{}^{} * {} + O({}^{})", self.prime, valuation, unit, self.prime, self.precision)
            }
        }
    }
}
