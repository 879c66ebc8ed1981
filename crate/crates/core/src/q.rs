//! q-series, the two q-Laplace transforms, q-difference operators and the
//! partial-fraction mechanics behind them.
//!
//! Transforms of `F = sum a_n z^n` live in `1/z`:
//! `F^# = sum q^(n(n-1)/2) a_n z^(-n-1)` and `F^+ = sum n_q! a_n z^(-n-1)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{pow, QContext, Rational};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Solve};
use crate::poly::{Poly, RationalFunction};
use crate::series::{sequence_profile, ArithProfile, FormalSeries};
use crate::weyl::{Location, NewtonPolygon, Verdict};

/// Coefficients `c_n` of `z^(-n-1)` for `n = 0..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QLaurentSeries {
    coeffs: Vec<Rational>,
}

impl QLaurentSeries {
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series carries at least one coefficient");
        QLaurentSeries { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Rational) -> Self {
        Self::new((0..=order).map(f).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, |_| Rational::zero())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.order().min(o.order()), |n| &self.coeffs[n] + &o.coeffs[n])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.order().min(o.order()), |n| &self.coeffs[n] - &o.coeffs[n])
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `z^(-1) f`; known one term further.
    pub fn div_z(&self) -> Self {
        Self::from_fn(self.order() + 1, |n| if n == 0 { Rational::zero() } else { self.coeffs[n - 1].clone() })
    }

    /// `f(r z)`.
    pub fn sigma(&self, r: &Rational) -> Self {
        let ri = r.recip();
        Self::new(self.coeffs.iter().enumerate().map(|(n, c)| c * pow(&ri, n as i64 + 1)).collect())
    }

    /// `(f(r z) - f(z)) / ((r - 1) z)`; known one term further.
    pub fn delta(&self, r: &Rational) -> Result<Self> {
        check_ratio(r)?;
        let ri = r.recip();
        let den = r - Rational::one();
        Ok(Self::from_fn(self.order() + 1, |n| {
            if n == 0 {
                return Rational::zero();
            }
            let k = n as i64;
            &self.coeffs[n - 1] * (pow(&ri, k) - Rational::one()) / &den
        }))
    }

    /// Expansion at infinity of a rational function vanishing there.
    pub fn from_rational_function(f: &RationalFunction, order: usize) -> Result<Self> {
        if f.is_zero() {
            return Ok(Self::zero(order));
        }
        let (dn, dd) = (f.num().degree().unwrap(), f.den().degree().unwrap_or(0));
        if dn >= dd {
            return Err(Error::Unsupported(format!("{f} does not vanish at infinity")));
        }
        // with w = 1/z: f = w^(dd - dn) rev(num)(w) / rev(den)(w)
        let rev = |p: &Poly, d: usize| Poly::new((0..=d).map(|k| p.coeff(d - k)).collect());
        let shift = dd - dn;
        let len = order + 1 + shift;
        let s = FormalSeries::from_poly(&rev(f.num(), dn), len).div(&FormalSeries::from_poly(&rev(f.den(), dd), len))?;
        // coefficient of z^(-n-1) is that of w^(n+1) = w^shift * s_(n+1-shift)
        Ok(Self::from_fn(order, |n| if n + 1 >= shift { s.coeff(n + 1 - shift).clone() } else { Rational::zero() }))
    }
}

impl fmt::Display for QLaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let zp = if n == 0 { "z^-1".to_string() } else { format!("z^-{}", n + 1) };
            if mag.is_one() {
                write!(f, "{zp}")?;
            } else {
                write!(f, "{mag}*{zp}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^-{})", self.order() + 2)
    }
}

fn check_ratio(r: &Rational) -> Result<()> {
    if r.is_zero() || r.is_one() {
        return Err(Error::InvalidQ(r.to_string()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QKind {
    /// `T_q = sum q^(-n(n-1)/2) z^n`.
    Tq,
    /// `E_q = sum z^n / n_q!`.
    Eq,
    /// `E_q` through its product `prod_(m>=1) (1 + (q-1) z / q^m)`.
    EqProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QMode {
    Sharp,
    Plus,
}

fn triangular(n: usize) -> i64 {
    (n * n.saturating_sub(1) / 2) as i64
}

/// `q^(n(n-1)/2)` or `n_q!`.
pub fn transform_weights(mode: QMode, ctx: &QContext, order: usize) -> Vec<Rational> {
    match mode {
        QMode::Sharp => {
            let mut w = Vec::with_capacity(order + 1);
            let mut acc = Rational::one();
            for n in 0..=order {
                if n > 1 {
                    acc *= ctx.q_pow(n as i64 - 1);
                }
                w.push(acc.clone());
            }
            w
        }
        QMode::Plus => ctx.q_factorials(order as u64),
    }
}

pub fn q_special_series(kind: QKind, ctx: &QContext, order: usize) -> FormalSeries {
    match kind {
        QKind::Tq => FormalSeries::from_fn(order, |n| ctx.q_pow(-triangular(n))),
        QKind::Eq => FormalSeries::new(ctx.q_factorials(order as u64).into_iter().map(|f| f.recip()).collect()),
        QKind::EqProduct => eq_product(ctx, order, EQ_PRODUCT_EXPLICIT.min(order)),
    }
}

/// Factors multiplied out explicitly by [`q_special_series`].
pub const EQ_PRODUCT_EXPLICIT: usize = 8;

/// The product for `E_q` through `z^order`: the first `explicit` factors are
/// multiplied out, and the tail `prod_(m > explicit) (1 + a x^m z)` with
/// `a = q - 1`, `x = 1/q` enters through Euler's expansion
/// `sum_k a^k x^(k(explicit+1) + k(k-1)/2) z^k / ((1-x)...(1-x^k))`.
pub fn eq_product(ctx: &QContext, order: usize, explicit: usize) -> FormalSeries {
    let q = ctx.q();
    let qm1 = q - Rational::one();
    let x = q.recip();
    let mut head = FormalSeries::one(order);
    for m in 1..=explicit {
        let factor = Poly::new(vec![Rational::one(), &qm1 * pow(&x, m as i64)]);
        head = head.mul_poly(&factor);
    }
    let mut tail = vec![Rational::one()];
    for k in 1..=order {
        let step = &qm1 * pow(&x, (explicit + k) as i64) / (Rational::one() - pow(&x, k as i64));
        let next = &tail[k - 1] * step;
        tail.push(next);
    }
    head.mul(&FormalSeries::new(tail))
}

pub fn q_laplace(f: &FormalSeries, mode: QMode, ctx: &QContext) -> QLaurentSeries {
    let w = transform_weights(mode, ctx, f.order());
    QLaurentSeries::new(f.coeffs().iter().zip(&w).map(|(a, w)| a * w).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QOp {
    Sigma,
    Delta,
}

/// `sigma_r` or `delta_r` on a power series; `delta` lowers the order by one.
pub fn sigma_delta_apply(op: QOp, r: &Rational, f: &FormalSeries) -> Result<FormalSeries> {
    check_ratio(r)?;
    Ok(match op {
        QOp::Sigma => FormalSeries::new(f.coeffs().iter().enumerate().map(|(k, c)| c * pow(r, k as i64)).collect()),
        QOp::Delta => {
            if f.order() == 0 {
                return Ok(FormalSeries::zero(0));
            }
            let den = r - Rational::one();
            FormalSeries::from_fn(f.order() - 1, |k| f.coeff(k + 1) * (pow(r, k as i64 + 1) - Rational::one()) / &den)
        }
    })
}

pub fn sigma_delta_apply_laurent(op: QOp, r: &Rational, f: &QLaurentSeries) -> Result<QLaurentSeries> {
    check_ratio(r)?;
    match op {
        QOp::Sigma => Ok(f.sigma(r)),
        QOp::Delta => f.delta(r),
    }
}

fn check_rates(betas: &[Rational], alphas: &[Rational], xi: &Rational) -> Result<()> {
    if betas.len() != alphas.len() + 1 {
        return Err(Error::InconsistentBounds(format!("{} coefficients for {} rates; expected one more", betas.len(), alphas.len())));
    }
    if xi.is_zero() || alphas.iter().any(Zero::is_zero) {
        return Err(Error::ZeroPoint);
    }
    for (i, a) in alphas.iter().enumerate() {
        if alphas[..i].contains(a) {
            return Err(Error::RepeatedRate(a.to_string()));
        }
    }
    Ok(())
}

/// `F = beta_0 + sum_j beta_j K(alpha_j z)` with `K = T_q` (sharp) or `E_q` (plus).
pub fn combination_series(betas: &[Rational], alphas: &[Rational], ctx: &QContext, mode: QMode, order: usize) -> FormalSeries {
    let kind = if mode == QMode::Sharp { QKind::Tq } else { QKind::Eq };
    let base = q_special_series(kind, ctx, order);
    let mut f = FormalSeries::from_poly(&Poly::constant(betas[0].clone()), order);
    for (b, a) in betas[1..].iter().zip(alphas) {
        let dilated = FormalSeries::from_fn(order, |n| base.coeff(n) * pow(a, n as i64));
        f = f.add(&dilated.scale(b));
    }
    f
}

/// `F^# = F^+ = beta_0 / z + sum_j beta_j / (z - alpha_j)`.
pub fn transform_partial_fraction(betas: &[Rational], alphas: &[Rational]) -> RationalFunction {
    let mut acc = RationalFunction::new(Poly::constant(betas[0].clone()), Poly::x()).expect("nonzero denominator");
    for (b, a) in betas[1..].iter().zip(alphas) {
        acc = acc.add(&RationalFunction::new(Poly::constant(b.clone()), Poly::linear_root(a)).expect("nonzero denominator"));
    }
    acc
}

/// Transform of `G = F / (z - xi)`, coefficient of `z^(-n-1)` for `n <= N`:
/// `-sum_(k<=n) (w_n / w_k) xi^(k-n-1) S_k` with `S_k = sum_j beta_j alpha_j^k`
/// (`alpha_0^k = [k = 0]`) and `w_n = q^(n(n-1)/2)` or `n_q!`.
///
/// Since `n(n-1) - k(k-1)` is even, the sharp weights stay in `Q`.
pub fn q_divide_transform(betas: &[Rational], alphas: &[Rational], xi: &Rational, ctx: &QContext, mode: QMode, order: usize) -> Result<QLaurentSeries> {
    check_rates(betas, alphas, xi)?;
    let w = transform_weights(mode, ctx, order);
    let s: Vec<Rational> = (0..=order)
        .map(|k| {
            let head = if k == 0 { betas[0].clone() } else { Rational::zero() };
            head + betas[1..].iter().zip(alphas).map(|(b, a)| b * pow(a, k as i64)).sum::<Rational>()
        })
        .collect();
    let xi_inv = xi.recip();
    // H_n = xi^{-1} ((w_n / w_{n-1}) H_{n-1} - S_n)
    let mut h: Vec<Rational> = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let carried = if n == 0 { Rational::zero() } else { &w[n] / &w[n - 1] * &h[n - 1] };
        h.push((carried - &s[n]) * &xi_inv);
    }
    Ok(QLaurentSeries::new(h))
}

/// Left side of the relation `H` must satisfy: `(1/(qz)) sigma_(1/q) H - xi H`
/// (sharp) or `(-1/q) delta_(1/q) H - xi H` (plus).
pub fn transform_relation(h: &QLaurentSeries, xi: &Rational, ctx: &QContext, mode: QMode) -> Result<QLaurentSeries> {
    let qi = ctx.inverse().q().clone();
    let lead = match mode {
        QMode::Sharp => h.sigma(&qi).div_z().scale(&qi),
        QMode::Plus => h.delta(&qi)?.scale(&-&qi),
    };
    Ok(lead.sub(&h.scale(xi)))
}

/// `sum_i c_i(z) sigma_q^i`, with `i` possibly negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QDiffOp {
    q: Rational,
    terms: BTreeMap<i64, RationalFunction>,
}

impl QDiffOp {
    pub fn new(ctx: &QContext) -> Self {
        QDiffOp { q: ctx.q().clone(), terms: BTreeMap::new() }
    }

    /// Adds `c sigma_r^e` where `r` is `q` or `1/q`.
    pub fn with_term(mut self, c: RationalFunction, r: &Rational, e: i64) -> Result<Self> {
        let i = if *r == self.q {
            e
        } else if *r == self.q.recip() {
            -e
        } else {
            return Err(Error::InvalidQ(format!("ratio {r} is neither q nor 1/q")));
        };
        let cur = self.terms.remove(&i).unwrap_or_else(|| RationalFunction::constant(Rational::zero()));
        let next = cur.add(&c);
        if !next.is_zero() {
            self.terms.insert(i, next);
        }
        Ok(self)
    }

    pub fn terms(&self) -> &BTreeMap<i64, RationalFunction> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `sigma_q o self`.
    pub fn sigma_left(&self) -> Self {
        let terms = self.terms.iter().map(|(i, c)| (i + 1, c.sigma(&self.q))).collect();
        QDiffOp { q: self.q.clone(), terms }
    }

    pub fn mul_left(&self, g: &RationalFunction) -> Self {
        let terms = self.terms.iter().map(|(i, c)| (*i, g.mul(c))).filter(|(_, c)| !c.is_zero()).collect();
        QDiffOp { q: self.q.clone(), terms }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (i, c) in &o.terms {
            let cur = terms.remove(i).unwrap_or_else(|| RationalFunction::constant(Rational::zero()));
            let next = cur.add(c);
            if !next.is_zero() {
                terms.insert(*i, next);
            }
        }
        QDiffOp { q: self.q.clone(), terms }
    }

    /// Operator killing every solution of `L y = g`: `g sigma_q L - sigma_q(g) L`.
    pub fn homogenize(&self, g: &RationalFunction) -> Self {
        if g.is_zero() {
            return self.clone();
        }
        self.sigma_left().mul_left(g).add(&self.mul_left(&g.sigma(&self.q).neg()))
    }
}

impl fmt::Display for QDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(i, c)| format!("({c})*S{{{i}}}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The operator `(1/(qz)) sigma_(1/q) - xi` satisfied by `G^#`.
pub fn sharp_division_operator(xi: &Rational, ctx: &QContext) -> QDiffOp {
    let qi = ctx.inverse().q().clone();
    let lead = RationalFunction::new(Poly::constant(qi.clone()), Poly::x()).expect("nonzero denominator");
    QDiffOp::new(ctx)
        .with_term(lead, &qi, 1)
        .and_then(|op| op.with_term(RationalFunction::constant(-xi), ctx.q(), 0))
        .expect("ratios come from ctx")
}

/// Polygon at infinity: the upper hull of the points `(i, deg c_i)`, with
/// segments listed by increasing slope.
pub fn qdiff_newton_polygon(a: &QDiffOp) -> Result<NewtonPolygon> {
    if a.is_zero() {
        return Err(Error::ZeroOperator("qdiff_newton_polygon"));
    }
    let pts: Vec<(i64, i64)> = a.terms.iter().map(|(i, c)| (*i, c.degree().expect("nonzero coefficient"))).collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (o, m) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop m unless it lies strictly above the chord o -> p
            let cross = (m.0 - o.0) as i128 * (p.1 - o.1) as i128 - (m.1 - o.1) as i128 * (p.0 - o.0) as i128;
            if cross >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut segments: Vec<(Rational, usize)> = hull
        .windows(2)
        .map(|w| (Rational::new((w[1].1 - w[0].1).into(), (w[1].0 - w[0].0).into()), (w[1].0 - w[0].0) as usize))
        .collect();
    segments.reverse();
    Ok(NewtonPolygon { location: Location::Infinity, segments })
}

/// `((1/q) delta_(1/q))^n (1/(z - alpha)) = (-1)^n n_q! / ((z - alpha)(z - alpha q)...(z - alpha q^n))`.
pub fn iterated_delta_partial_fraction(alpha: &Rational, n: usize, ctx: &QContext) -> Result<RationalFunction> {
    if alpha.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let den = (0..=n).fold(Poly::one(), |acc, k| &acc * &Poly::linear_root(&(alpha * ctx.q_pow(k as i64))));
    let sign = if n % 2 == 0 { Rational::one() } else { -Rational::one() };
    RationalFunction::new(Poly::constant(sign * ctx.q_factorial(n as u64)), den)
}

/// The same, by applying `(1/q) delta_(1/q)` literally `n` times.
pub fn iterated_delta_literal(alpha: &Rational, n: usize, ctx: &QContext) -> Result<RationalFunction> {
    let qi = ctx.inverse().q().clone();
    let mut f = RationalFunction::new(Poly::one(), Poly::linear_root(alpha))?;
    for _ in 0..n {
        f = f.q_delta(&qi).scale(&qi);
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lemma454Outcome {
    /// `gamma[k]` is `gamma_(k - M)`.
    Solvable { gamma: Vec<Rational>, m: i64 },
    /// `y` with `y^T A = 0` and `y^T b != 0` for the system of [`lemma454_system`].
    Unsolvable { certificate: Vec<Rational> },
    /// Solvable for a larger window: the required `m` exceeds `M`.
    UnsolvableWithinWindow { required_m: i64, certificate: Vec<Rational> },
}

/// Rows `n = -M..=N+1`, columns `gamma_(-M)..=gamma_N`, from the coefficient
/// of `1/(z - alpha q^n)` after multiplying by `alpha q^n (1 - q)`:
/// `gamma_n (1 - alpha xi q^n (1 - q)) - q gamma_(n-1) = alpha q^n (1 - q) [n = 0]`.
pub fn lemma454_system(alpha: &Rational, xi: &Rational, ctx: &QContext, m_lo: usize, n_hi: usize) -> (Matrix, Vec<Rational>) {
    let q = ctx.q();
    let one = Rational::one();
    let lam = alpha * xi * (&one - q);
    let cols = m_lo + n_hi + 1;
    let col = |n: i64| (n + m_lo as i64) as usize;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for n in -(m_lo as i64)..=(n_hi as i64 + 1) {
        let mut row = vec![Rational::zero(); cols];
        if n <= n_hi as i64 {
            row[col(n)] = &one - &lam * ctx.q_pow(n);
        }
        if n - 1 >= -(m_lo as i64) {
            row[col(n - 1)] = -q.clone();
        }
        a.push(row);
        b.push(if n == 0 { alpha * (&one - q) } else { Rational::zero() });
    }
    (a, b)
}

/// The `m >= 1` with `alpha xi (1 - q) = q^m`, if any.
pub fn lemma454_exponent(alpha: &Rational, xi: &Rational, ctx: &QContext) -> Option<i64> {
    let lam = alpha * xi * (Rational::one() - ctx.q());
    let grows = ctx.q().abs() > Rational::one();
    let mut m = 1;
    loop {
        let qm = ctx.q_pow(m);
        if qm == lam {
            return Some(m);
        }
        if (grows && qm.abs() > lam.abs()) || (!grows && qm.abs() < lam.abs()) {
            return None;
        }
        m += 1;
    }
}

/// Solves `1/(z - alpha) = ((-1/q) delta_(1/q) - xi) sum_(n=-M)^N gamma_n / (z - alpha q^n)`.
pub fn lemma454_solve(alpha: &Rational, xi: &Rational, ctx: &QContext, m_lo: usize, n_hi: usize) -> Result<Lemma454Outcome> {
    if alpha.is_zero() || xi.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let (a, b) = lemma454_system(alpha, xi, ctx, m_lo, n_hi);
    let cols = m_lo + n_hi + 1;
    Ok(match linalg::solve(&a, &b, cols) {
        Solve::Solution(gamma) => {
            let m = lemma454_exponent(alpha, xi, ctx).expect("a solution forces the exponent condition");
            Lemma454Outcome::Solvable { gamma, m }
        }
        Solve::Infeasible(certificate) => match lemma454_exponent(alpha, xi, ctx) {
            Some(m) => Lemma454Outcome::UnsolvableWithinWindow { required_m: m, certificate },
            None => Lemma454Outcome::Unsolvable { certificate },
        },
    })
}

/// `sum gamma_n / (z - alpha q^n)` pushed through `(-1/q) delta_(1/q) - xi`.
pub fn lemma454_apply(alpha: &Rational, xi: &Rational, ctx: &QContext, m_lo: usize, gamma: &[Rational]) -> Result<RationalFunction> {
    let mut g = RationalFunction::constant(Rational::zero());
    for (k, c) in gamma.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let pole = alpha * ctx.q_pow(k as i64 - m_lo as i64);
        g = g.add(&RationalFunction::new(Poly::constant(c.clone()), Poly::linear_root(&pole))?);
    }
    let qi = ctx.inverse().q().clone();
    Ok(g.q_delta(&qi).scale(&-qi).sub(&g.scale(xi)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaReport {
    pub c: Rational,
    pub xi: Rational,
    pub n: usize,
    /// `sum_(|n| <= N) c^(n(n+1)/2) xi^n`.
    pub lhs: Rational,
    /// `T(c xi)` truncated at `N`, with `T = T_(1/c)`.
    pub t_pos: Rational,
    /// `xi^(-1) T(c / xi)` truncated at `N`.
    pub t_neg: Rational,
    pub gap: Rational,
    /// Bounds on the omitted tails; `None` when the majorant does not apply.
    pub lhs_tail: Option<Rational>,
    pub rhs_tail: Option<Rational>,
    /// Combined bound at `N/2`, for the shrinking test.
    pub half_bound: Option<Rational>,
    pub verdict: Verdict,
}

/// `sum_(n>=start) c^(e(n)) x^n`-type tail, majorized by a geometric series
/// from its first term `t` and the ratio bound `rho < 1`.
fn geometric_tail(t: Rational, rho: Rational) -> Option<Rational> {
    if rho >= Rational::one() {
        return None;
    }
    Some(t / (Rational::one() - rho))
}

/// Tails of `sum_(n>N) |c|^(n(n+1)/2) |x|^n` and `sum_(k>N) |c|^(k(k-1)/2) |x|^(-k)`.
fn theta_tails(c: &Rational, x: &Rational, n: usize) -> (Option<Rational>, Option<Rational>) {
    let (c, x) = (c.abs(), x.abs());
    let n1 = n as i64 + 1;
    // consecutive ratios |c|^(n+1)|x| and |c|^k/|x| decrease with the index
    let pos = geometric_tail(pow(&c, n1 * (n1 + 1) / 2) * pow(&x, n1), pow(&c, n1 + 1) * &x);
    let neg = geometric_tail(pow(&c, n1 * (n1 - 1) / 2) * pow(&x, -n1), pow(&c, n1) / &x);
    (pos, neg)
}

fn theta_parts(c: &Rational, xi: &Rational, n: usize) -> (Rational, Rational, Rational) {
    let e = |k: i64| k * (k + 1) / 2;
    let lhs: Rational = (-(n as i64)..=n as i64).map(|k| pow(c, e(k)) * pow(xi, k)).sum();
    // T_(1/c)(w) = sum c^(k(k-1)/2) w^k
    let t = |w: &Rational| -> Rational { (0..=n as i64).map(|k| pow(c, k * (k - 1) / 2) * pow(w, k)).sum() };
    let t_pos = t(&(c * xi));
    let t_neg = t(&(c / xi)) / xi;
    (lhs, t_pos, t_neg)
}

fn theta_bound(c: &Rational, xi: &Rational, n: usize) -> (Option<Rational>, Option<Rational>) {
    let (pos, neg) = theta_tails(c, xi, n);
    let lhs_tail = pos.clone().zip(neg.clone()).map(|(a, b)| a + b);
    // the right side omits the same positive tail and the negative one from -N-2 on,
    // which the negative tail from -N-1 dominates
    let rhs_tail = pos.zip(neg).map(|(a, b)| a + b);
    (lhs_tail, rhs_tail)
}

/// Checks `sum_(n in Z) c^(n(n+1)/2) xi^n = T_(1/c)(c xi) + xi^(-1) T_(1/c)(c/xi)`
/// on exact truncations with tail bounds.
pub fn theta_bilateral_check(c: &Rational, xi: &Rational, n: usize) -> Result<ThetaReport> {
    if c.abs() >= Rational::one() || c.is_zero() {
        return Err(Error::NotContracting(c.to_string()));
    }
    if xi.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let (lhs, t_pos, t_neg) = theta_parts(c, xi, n);
    let gap = (&lhs - &t_pos - &t_neg).abs();
    let (lhs_tail, rhs_tail) = theta_bound(c, xi, n);
    let (hl, hr) = theta_bound(c, xi, n / 2);
    let half_bound = hl.zip(hr).map(|(a, b)| a + b);
    let verdict = match (&lhs_tail, &rhs_tail, &half_bound) {
        (Some(l), Some(r), Some(h)) => {
            let total = l + r;
            if gap <= total && total < *h {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        }
        _ => Verdict::Indeterminate,
    };
    Ok(ThetaReport { c: c.clone(), xi: xi.clone(), n, lhs, t_pos, t_neg, gap, lhs_tail, rhs_tail, half_bound, verdict })
}

/// Growth profile of `q^(s n(n-1)/2) a_n`; bounded statistics point at
/// q-Gevrey order `s`.
pub fn q_gevrey_profile(f: &FormalSeries, ctx: &QContext, s: i64) -> ArithProfile {
    let b: Vec<Rational> = f.coeffs().iter().enumerate().map(|(n, a)| a * ctx.q_pow(s * triangular(n))).collect();
    sequence_profile(&b)
}
