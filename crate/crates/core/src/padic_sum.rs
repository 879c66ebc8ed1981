//! p-adic values of factorial series `sum P(n) (n!)^s xi^n`.
//!
//! The family `s = 1`, `xi = 1` telescopes: writing
//! `P(n) = (n+1) Q(n+1) - Q(n) + c` gives
//! `sum_(n<=N) P(n) n! = Q(N+1) (N+1)! - Q(0) + c sum_(n<=N) n!`, so when
//! `c = 0` the sum is `-Q(0)` in every `Z_p`.

use num_traits::{One, Signed, Zero};

use crate::arith::{check_prime, int, val_rat, Rational};
use crate::error::{Error, Result};
use crate::guess::{guess_operator, GuessConfig, OperatorBasis};
use crate::padic::PAdicValue;
use crate::poly::Poly;
use crate::series::FormalSeries;
use crate::weyl::{trivial_singularity_check, DiffOp, TrivialCheck, Verdict};

/// `sum_(n>=0) P(n) (n!)^s xi^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorialSeriesSpec {
    pub poly: Poly,
    pub s: u32,
    pub xi: Rational,
}

impl FactorialSeriesSpec {
    /// `s = 1`, `xi = 1`.
    pub fn new(poly: Poly) -> Self {
        FactorialSeriesSpec { poly, s: 1, xi: Rational::one() }
    }

    /// `sum P(n) (n + shift)!`, rewritten as `sum P(n) (n+1)...(n+shift) n!`.
    pub fn shifted_factorial(poly: Poly, shift: usize) -> Self {
        let rising = (1..=shift).fold(Poly::one(), |acc, l| &acc * &Poly::linear_root(&int(-(l as i64))));
        Self::new(&poly * &rising)
    }

    pub fn with_weight(mut self, s: u32) -> Self {
        self.s = s;
        self
    }

    pub fn with_xi(mut self, xi: Rational) -> Self {
        self.xi = xi;
        self
    }

    pub fn is_telescoping_family(&self) -> bool {
        self.s == 1 && self.xi.is_one()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TelescopeResult {
    pub q: Poly,
    pub c: Rational,
    /// `-Q(0)`, present iff `c = 0`.
    pub universal_value: Option<Rational>,
}

impl TelescopeResult {
    /// `(n+1) Q(n+1) - Q(n) + c`.
    pub fn recompose(&self) -> Poly {
        let shifted = &Poly::from_ints(&[1, 1]) * &self.q.shift(&Rational::one());
        &(&shifted - &self.q) + &Poly::constant(self.c.clone())
    }
}

/// The unique `(Q, c)` with `P(n) = (n+1) Q(n+1) - Q(n) + c`.
///
/// The map sends `n^j` to `(n+1)^(j+1) - n^j`, monic of degree `j + 1`, so
/// the system is triangular in the coefficients of `Q`, top degree first.
pub fn telescope_decompose(p: &Poly) -> TelescopeResult {
    let mut rem = p.clone();
    let deg = p.degree().unwrap_or(0);
    let mut q = vec![Rational::zero(); deg.max(1)];
    for j in (0..deg).rev() {
        let lead = rem.coeff(j + 1);
        if lead.is_zero() {
            continue;
        }
        let image = &Poly::from_ints(&[1, 1]).pow(j + 1) - &Poly::monomial(Rational::one(), j);
        rem = &rem - &image.scale(&lead);
        q[j] = lead;
    }
    debug_assert!(rem.degree().unwrap_or(0) == 0);
    let q = Poly::new(q);
    let c = rem.coeff(0);
    let universal_value = c.is_zero().then(|| -q.eval(&Rational::zero()));
    TelescopeResult { q, c, universal_value }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicSum {
    pub value: PAdicValue,
    /// Terms `0 .. terms` were summed.
    pub terms: usize,
    pub working_precision: i64,
}

fn min_coeff_valuation(p: &Poly, prime: u64) -> i64 {
    p.coeffs().iter().filter_map(|c| val_rat(c, prime)).min().unwrap_or(0)
}

/// Smallest `N` such that `n (s/(p-1) + v) - s (log_p n + 1) >= target` for
/// every `n >= N`. That expression bounds `s val_p(n!) + n v` from below.
fn truncation_index(s: u32, p: u64, v_xi: i64, target: i64) -> usize {
    let rate = s as f64 / (p - 1) as f64 + v_xi as f64;
    let lnp = (p as f64).ln();
    // the bound increases for n >= s / (rate ln p)
    let start = ((s as f64 / (rate * lnp)).ceil() as usize).max(1);
    let bound = |n: usize| n as f64 * rate - s as f64 * ((n as f64).ln() / lnp + 1.0);
    let mut n = start;
    while bound(n) < target as f64 + 1e-9 {
        n += 1;
    }
    n
}

/// `sum_(n < terms) P(n) (n!)^s xi^n` in p-adic arithmetic at precision `w`.
pub fn padic_partial_sum(spec: &FactorialSeriesSpec, p: u64, w: i64, terms: usize) -> Result<PAdicValue> {
    check_prime(p)?;
    let mut acc = PAdicValue::exact_zero(p);
    let mut weight = PAdicValue::from_rational(&Rational::one(), p, w)?;
    let xi = PAdicValue::from_rational(&spec.xi, p, w)?;
    for n in 0..terms {
        if n > 0 {
            let m = PAdicValue::from_rational(&num_traits::pow(int(n as i64), spec.s as usize), p, w)?;
            weight = weight.mul(&m).mul(&xi);
        }
        let pn = spec.poly.eval(&int(n as i64));
        if pn.is_zero() {
            continue;
        }
        acc = acc.add(&PAdicValue::from_rational(&pn, p, w)?.mul(&weight));
    }
    Ok(acc)
}

/// The sum modulo `p^k`.
pub fn padic_sum(spec: &FactorialSeriesSpec, p: u64, k: i64) -> Result<PadicSum> {
    check_prime(p)?;
    if k < 1 {
        return Err(Error::ZeroPrecision);
    }
    if spec.s == 0 {
        return Err(Error::ZeroGevreyOrder("padic_sum"));
    }
    if spec.poly.is_zero() {
        return Ok(PadicSum { value: PAdicValue::exact_zero(p), terms: 0, working_precision: k });
    }
    if spec.xi.is_zero() {
        let value = PAdicValue::from_rational(&spec.poly.coeff(0), p, k)?;
        return Ok(PadicSum { value, terms: 1, working_precision: k });
    }
    let v_xi = val_rat(&spec.xi, p).unwrap();
    // s val(n!) grows like n s/(p-1)
    let rate = Rational::new((spec.s as i64).into(), ((p - 1) as i64).into()) + int(v_xi);
    if !rate.is_positive() {
        return Err(Error::Divergent { prime: p, valuation: v_xi });
    }
    let slack = (-min_coeff_valuation(&spec.poly, p)).max(0);
    let terms = truncation_index(spec.s, p, v_xi, k + slack);
    let w = k + slack + terms as i64 * (-v_xi).max(0) + 2;
    let sum = padic_partial_sum(spec, p, w, terms)?;
    debug_assert!(sum.precision().map_or(true, |prec| prec >= k));
    Ok(PadicSum { value: sum.reduce(k), terms, working_precision: w })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalEntry {
    pub prime: u64,
    pub value: PAdicValue,
    /// Smallest-height rational matching the residue, if any.
    pub reconstructed: Option<Rational>,
    /// Whether the value is congruent to the telescoped constant.
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalReport {
    pub telescope: TelescopeResult,
    pub precision: i64,
    pub entries: Vec<UniversalEntry>,
}

impl UniversalReport {
    pub fn all_agree(&self) -> bool {
        self.entries.iter().all(|e| e.agrees == Some(true))
    }

    pub fn summary(&self) -> String {
        match &self.telescope.universal_value {
            Some(v) if self.all_agree() => format!("universal value {v} confirmed at {} primes", self.entries.len()),
            Some(v) => format!("universal value {v} contradicted at some prime"),
            None => {
                let recs: Vec<&Option<Rational>> = self.entries.iter().map(|e| &e.reconstructed).collect();
                let same = recs.windows(2).all(|w| w[0] == w[1]) && recs.first().is_some_and(|r| r.is_some());
                if same {
                    "no universal value; per-prime sums reconstruct to the same rational".into()
                } else {
                    "no universal value; per-prime sums differ as rationals".into()
                }
            }
        }
    }
}

/// Cross-checks [`padic_sum`] against the telescoped constant prime by prime.
pub fn verify_universal(spec: &FactorialSeriesSpec, primes: &[u64], k: i64) -> Result<UniversalReport> {
    if !spec.is_telescoping_family() {
        return Err(Error::Unsupported("telescoping needs s = 1 and xi = 1".into()));
    }
    let telescope = telescope_decompose(&spec.poly);
    let entries = primes
        .iter()
        .map(|&p| {
            let value = padic_sum(spec, p, k)?.value;
            let agrees = telescope.universal_value.as_ref().map(|v| value.congruent_to(v));
            Ok(UniversalEntry { prime: p, reconstructed: value.rational_reconstruction(), value, agrees })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UniversalReport { telescope, precision: k, entries })
}

pub const EXAMPLE33_TRUNC: usize = 120;
pub const EXAMPLE33_ORDER: usize = 2;
/// In the theta basis: z times the annihilator has degree 3 there, while
/// in the `z^i D^j` basis it needs degree 4.
pub const EXAMPLE33_DEGREE: usize = 3;
pub const EXAMPLE33_MARGIN: usize = 40;

/// `1 + sum_(n>=1) n n! z^n` through `z^trunc`.
pub fn example33_series(trunc: usize) -> FormalSeries {
    let mut fact = num_bigint::BigInt::one();
    FormalSeries::from_fn(trunc, |n| {
        if n == 0 {
            return int(1);
        }
        fact *= n;
        Rational::from_integer(&fact * n)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example33Report {
    pub operator: DiffOp,
    pub check: TrivialCheck,
}

impl Example33Report {
    pub fn verdict(&self) -> Verdict {
        self.check.verdict
    }
}

/// Guess an annihilator of `f` within the example's bounds, then test
/// whether 1 is a trivial singularity with solutions vanishing there.
pub fn example33_on(f: &FormalSeries, trunc: usize) -> Result<Example33Report> {
    let cfg = GuessConfig::new(EXAMPLE33_ORDER, EXAMPLE33_DEGREE, trunc, EXAMPLE33_MARGIN).with_basis(OperatorBasis::Theta);
    if trunc < cfg.required_trunc() {
        return Err(Error::InsufficientCoefficients { needed: cfg.required_trunc() + 1, available: trunc + 1 });
    }
    let guess = guess_operator(f, &cfg)?.ok_or(Error::GuessFailed { order: EXAMPLE33_ORDER, degree: EXAMPLE33_DEGREE })?;
    let check = trivial_singularity_check(&guess.op, &Rational::one(), 1, None)?;
    Ok(Example33Report { operator: guess.op, check })
}

pub fn example33_pipeline(trunc: usize) -> Result<Example33Report> {
    example33_on(&example33_series(trunc), trunc)
}
