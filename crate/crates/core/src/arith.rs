//! Exact scalars: rationals, prime valuations, factorials and q-analogues.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `r^e` for any integer exponent. Panics on `0^e` with `e < 0`.
pub fn pow(r: &Rational, e: i64) -> Rational {
    let base = if e >= 0 { r.clone() } else { r.recip() };
    let k = e.unsigned_abs() as usize;
    // powers of coprime parts stay coprime
    Rational::new_raw(num_traits::pow(base.numer().clone(), k), num_traits::pow(base.denom().clone(), k))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Primes up to and including `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

/// `val_p(n!)` via Legendre's formula `(n - S_p(n)) / (p - 1)`.
pub fn legendre_valuation(n: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    let mut digits = 0;
    let mut m = n;
    while m > 0 {
        digits += m % p;
        m /= p;
    }
    Ok((n - digits) / (p - 1))
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn val_int(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

pub fn val_rat(r: &Rational, p: u64) -> Option<i64> {
    let vn = val_int(r.numer(), p)?;
    let vd = val_int(r.denom(), p).unwrap_or(0);
    Some(vn as i64 - vd as i64)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Natural log of a positive integer, accurate enough for growth diagnostics.
pub fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        let f: f64 = n.to_string().parse().unwrap_or(f64::INFINITY);
        return f.abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    let f: f64 = top.to_string().parse().unwrap_or(0.0);
    f.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_abs_rat(r: &Rational) -> f64 {
    ln_big(r.numer()) - ln_big(r.denom())
}

/// A dilation parameter `q` together with its q-integers.
///
/// `q` is rational, nonzero and different from `1` and `-1`, the only
/// rational roots of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QContext {
    q: Rational,
}

impl QContext {
    pub fn new(q: Rational) -> Result<Self> {
        if q.is_zero() || q.abs().is_one() {
            return Err(Error::InvalidQ(q.to_string()));
        }
        Ok(QContext { q })
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn inverse(&self) -> QContext {
        QContext { q: self.q.recip() }
    }

    pub fn q_pow(&self, e: i64) -> Rational {
        pow(&self.q, e)
    }

    /// `n_q = (1 - q^n) / (1 - q)`.
    pub fn q_integer(&self, n: u64) -> Rational {
        let one = Rational::one();
        (&one - self.q_pow(n as i64)) / (&one - &self.q)
    }

    /// `n_q! = 1_q 2_q ... n_q`, with `0_q! = 1`.
    pub fn q_factorial(&self, n: u64) -> Rational {
        (1..=n).fold(Rational::one(), |acc, m| acc * self.q_integer(m))
    }

    /// `[0_q!, 1_q!, ..., n_q!]`.
    pub fn q_factorials(&self, n: u64) -> Vec<Rational> {
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut acc = Rational::one();
        out.push(acc.clone());
        for m in 1..=n {
            acc *= self.q_integer(m);
            out.push(acc.clone());
        }
        out
    }
}

pub fn q_factorial(n: u64, ctx: &QContext) -> Rational {
    ctx.q_factorial(n)
}

/// Exact `val_p(n_q!)`.
///
/// With `q = a/b`, each factor is `(b^m - a^m) / (b^(m-1) (b - a))`, so only
/// integer valuations of `b^m - a^m` and `b - a` are needed.
pub fn q_factorial_valuation(n: u64, ctx: &QContext, p: u64) -> Result<i64> {
    Ok(*q_factorial_valuations(n, ctx, p)?.last().expect("nonempty"))
}

/// `[val_p(0_q!), ..., val_p(n_q!)]` in one pass.
pub fn q_factorial_valuations(n: u64, ctx: &QContext, p: u64) -> Result<Vec<i64>> {
    check_prime(p)?;
    let a = ctx.q().numer();
    let b = ctx.q().denom();
    if val_int(a, p) != Some(0) || val_int(b, p) != Some(0) {
        return Err(Error::PrimeDividesQ { prime: p, q: ctx.q().to_string() });
    }
    let base = val_int(&(b - a), p).expect("q != 1") as i64;
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut total = 0i64;
    out.push(total);
    let mut am = BigInt::one();
    let mut bm = BigInt::one();
    for _ in 1..=n {
        am *= a;
        bm *= b;
        let v = val_int(&(&bm - &am), p).expect("q is not a root of unity") as i64;
        total += v - base;
        out.push(total);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_val_factorial(n: u64, p: u64) -> u64 {
        if n == 0 {
            return 0;
        }
        val_int(&factorial(n), p).unwrap()
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_valuation(0, 5).unwrap(), 0);
        assert_eq!(legendre_valuation(9, 3).unwrap(), 4);
        assert_eq!(legendre_valuation(10, 2).unwrap(), 8);
        assert_eq!(factorial(9), BigInt::from(362880));
        assert_eq!(brute_val_factorial(9, 3), 4);
        assert_eq!(brute_val_factorial(10, 2), 8);
    }

    #[test]
    fn legendre_rejects_composite() {
        assert_eq!(legendre_valuation(10, 4), Err(Error::NotPrime(4)));
        assert_eq!(legendre_valuation(10, 1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn legendre_matches_floor_sum() {
        for p in primes_up_to(30) {
            for n in 0..400u64 {
                let mut s = 0;
                let mut pk = p;
                while pk <= n {
                    s += n / pk;
                    pk *= p;
                }
                assert_eq!(legendre_valuation(n, p).unwrap(), s);
            }
        }
    }

    #[test]
    fn q_factorial_examples() {
        let two = QContext::new(int(2)).unwrap();
        assert_eq!(q_factorial(0, &two), int(1));
        assert_eq!(q_factorial(2, &two), int(3));
        let half = QContext::new(rat(1, 2)).unwrap();
        assert_eq!(q_factorial(3, &half), rat(21, 8));
        assert_eq!(half.q_factorials(3)[3], rat(21, 8));
    }

    #[test]
    fn q_context_rejects_roots_of_unity() {
        assert!(QContext::new(int(1)).is_err());
        assert!(QContext::new(int(-1)).is_err());
        assert!(QContext::new(int(0)).is_err());
    }

    #[test]
    fn q_factorial_valuation_examples() {
        let two = QContext::new(int(2)).unwrap();
        assert_eq!(q_factorial_valuation(0, &two, 7).unwrap(), 0);
        // prod_{m<=6} (2^m - 1) = 1*3*7*15*31*63
        let prod: i64 = (1..=6).map(|m| (1i64 << m) - 1).product();
        assert_eq!(val_int(&BigInt::from(prod), 7), Some(2));
        assert_eq!(q_factorial_valuation(6, &two, 7).unwrap(), 2);

        let three = QContext::new(int(3)).unwrap();
        // 1 * 4 * 13 * 40 = 2080 = 2^5 * 65
        assert_eq!(q_factorial(4, &three), int(2080));
        assert_eq!(q_factorial_valuation(4, &three, 2).unwrap(), 5);
    }

    #[test]
    fn q_factorial_valuation_rejects_dividing_prime() {
        let ten = QContext::new(int(10)).unwrap();
        assert!(matches!(q_factorial_valuation(3, &ten, 5), Err(Error::PrimeDividesQ { .. })));
        let third = QContext::new(rat(1, 3)).unwrap();
        assert!(q_factorial_valuation(3, &third, 3).is_err());
    }

    #[test]
    fn q_factorial_valuation_matches_direct() {
        let ctx = QContext::new(rat(5, 3)).unwrap();
        for n in 0..30 {
            let direct = val_rat(&ctx.q_factorial(n), 2).unwrap();
            assert_eq!(q_factorial_valuation(n, &ctx, 2).unwrap(), direct);
        }
    }

    #[test]
    fn ln_big_is_close() {
        let n = factorial(300);
        let exact: f64 = (1..=300).map(|k| (k as f64).ln()).sum();
        assert!((ln_big(&n) - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn rational_add_sub_roundtrip() {
        let a = rat(-7, 12);
        let b = rat(5, 18);
        assert_eq!((&a + &b) - &b, a);
        assert_eq!(pow(&rat(2, 3), -2), rat(9, 4));
    }
}
