//! Differential operators `sum c_ij z^i D^j` with `D = d/dz`, their action on
//! truncated series, the coefficient recurrences they induce, and local data
//! at a point (indicial polynomial, Newton polygon, trivial singularities).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{int, Rational};
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Poly;
use crate::series::FormalSeries;

/// Normal-ordered operator: every `z` stands left of every `D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffOp {
    /// `(i, j) -> c` for `c z^i D^j`; no zero entries.
    terms: BTreeMap<(usize, usize), Rational>,
}

/// `x(x-1)...(x-j+1)` as a polynomial in `x`.
pub fn falling(j: usize) -> Poly {
    (0..j).fold(Poly::one(), |acc, l| &acc * &Poly::linear_root(&int(l as i64)))
}

fn falling_value(x: i64, j: usize) -> BigInt {
    (0..j as i64).fold(BigInt::one(), |acc, l| acc * (x - l))
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Coefficients of `p` in the basis `x^(falling j)`, by forward differences at 0.
pub fn to_falling_basis(p: &Poly) -> Vec<Rational> {
    let Some(d) = p.degree() else { return Vec::new() };
    let mut vals: Vec<Rational> = (0..=d).map(|x| p.eval(&int(x as i64))).collect();
    let mut out = Vec::with_capacity(d + 1);
    let mut fact = BigInt::one();
    for j in 0..=d {
        if j > 0 {
            fact *= j;
        }
        out.push(&vals[0] / Rational::from_integer(fact.clone()));
        for k in 0..vals.len() - 1 {
            vals[k] = &vals[k + 1] - &vals[k];
        }
        vals.pop();
    }
    out
}

impl DiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rational, i: usize, j: usize) -> Self {
        let mut op = Self::zero();
        op.add_term(i, j, c);
        op
    }

    pub fn z() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn d() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    /// `z D`.
    pub fn theta() -> Self {
        Self::monomial(Rational::one(), 1, 1)
    }

    /// `sum_j p_j(z) D^j`.
    pub fn from_coeff_polys(polys: &[Poly]) -> Self {
        let mut op = Self::zero();
        for (j, p) in polys.iter().enumerate() {
            for (i, c) in p.coeffs().iter().enumerate() {
                op.add_term(i, j, c.clone());
            }
        }
        op
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((usize, usize), Rational)>) -> Self {
        let mut op = Self::zero();
        for ((i, j), c) in terms {
            op.add_term(i, j, c);
        }
        op
    }

    fn add_term(&mut self, i: usize, j: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `j` with a nonzero term.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    /// Largest `i` with a nonzero term.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    /// Coefficient polynomial of `D^j`.
    pub fn coeff_poly(&self, j: usize) -> Poly {
        let deg = self.degree().unwrap_or(0);
        Poly::new((0..=deg).map(|i| self.coeff(i, j)).collect())
    }

    pub fn leading_coefficient(&self) -> Poly {
        self.order().map(|r| self.coeff_poly(r)).unwrap_or_else(Poly::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| weyl_multiply(&acc, self))
    }

    /// The same operator written in `x = z - xi`.
    pub fn translate(&self, xi: &Rational) -> Self {
        let Some(r) = self.order() else { return Self::zero() };
        let polys: Vec<Poly> = (0..=r).map(|j| self.coeff_poly(j).shift(xi)).collect();
        Self::from_coeff_polys(&polys)
    }

    /// `d -> P_d`, where `z^i D^j` contributes `c * rho^(falling j)` to the
    /// stratum `d = i - j`, so that the operator sends `z^rho` to
    /// `sum_d P_d(rho) z^(rho + d)`.
    pub fn strata(&self) -> BTreeMap<i64, Poly> {
        let mut out: BTreeMap<i64, Poly> = BTreeMap::new();
        for (i, j, c) in self.terms() {
            let d = i as i64 - j as i64;
            let e = out.entry(d).or_insert_with(Poly::zero);
            *e = &*e + &falling(j).scale(c);
        }
        out.retain(|_, p| !p.is_zero());
        out
    }
}

impl Add for &DiffOp {
    type Output = DiffOp;
    fn add(self, o: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (&(i, j), c) in &o.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.scale(&-Rational::one())
    }
}

impl Sub for &DiffOp {
    type Output = DiffOp;
    fn sub(self, o: &DiffOp) -> DiffOp {
        self + &-o
    }
}

impl Mul for &DiffOp {
    type Output = DiffOp;
    fn mul(self, o: &DiffOp) -> DiffOp {
        weyl_multiply(self, o)
    }
}

/// Product under `D z = z D + 1`, using
/// `D^b z^c = sum_k C(b,k) c!/(c-k)! z^(c-k) D^(b-k)`.
pub fn weyl_multiply(a: &DiffOp, b: &DiffOp) -> DiffOp {
    let mut out = DiffOp::zero();
    for (&(i1, j1), c1) in &a.terms {
        for (&(i2, j2), c2) in &b.terms {
            let c = c1 * c2;
            for k in 0..=j1.min(i2) {
                let w = binomial(j1, k) * falling_value(i2 as i64, k);
                out.add_term(i1 + i2 - k, j1 - k + j2, &c * Rational::from_integer(w));
            }
        }
    }
    out
}

/// `A f`, exact up to order `min (N - j + i)` over the terms of `A`.
pub fn apply_op(a: &DiffOp, f: &FormalSeries) -> Result<FormalSeries> {
    let n = f.order();
    let Some(r) = a.order() else { return Ok(FormalSeries::zero(n)) };
    if n <= r {
        return Err(Error::InsufficientCoefficients { needed: r + 2, available: n + 1 });
    }
    let out_order = a.terms().map(|(i, j, _)| n + i - j).min().unwrap();
    Ok(FormalSeries::from_fn(out_order, |m| {
        a.terms()
            .filter(|&(i, _, _)| m >= i)
            .map(|(i, j, c)| {
                let src = m - i + j;
                c * Rational::from_integer(falling_value(src as i64, j)) * f.coeff(src)
            })
            .sum()
    }))
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut keys: Vec<&(usize, usize)> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.1.cmp(&a.1).then(b.0.cmp(&a.0)));
        for (idx, &&(i, j)) in keys.iter().enumerate() {
            let c = &self.terms[&(i, j)];
            let mut factors: Vec<String> = Vec::new();
            match i {
                0 => {}
                1 => factors.push("z".into()),
                _ => factors.push(format!("z^{i}")),
            }
            match j {
                0 => {}
                1 => factors.push("D".into()),
                _ => factors.push(format!("D^{j}")),
            }
            let mag = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `sum_k r_k(n) u_(n+k) = 0` for every `n >= offset`, with `u_m = 0` for `m < 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    coeffs: Vec<Poly>,
    offset: i64,
}

impl Recurrence {
    /// Trims zero polynomials at both ends; a leading run of zero `r_0`
    /// is absorbed into the offset.
    pub fn new(mut coeffs: Vec<Poly>, mut offset: i64) -> Result<Self> {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroOperator("recurrence"));
        }
        while coeffs[0].is_zero() {
            coeffs.remove(0);
            offset += 1;
            for c in coeffs.iter_mut() {
                *c = c.shift(&int(-1));
            }
        }
        Ok(Recurrence { coeffs, offset })
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Left-hand side at `n`, if every `u_(n+k)` it needs is available.
    pub fn residual(&self, u: &[Rational], n: i64) -> Option<Rational> {
        if n + self.order() as i64 >= u.len() as i64 {
            return None;
        }
        let nn = int(n);
        Some(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|&(k, _)| n + k as i64 >= 0)
                .map(|(k, r)| r.eval(&nn) * &u[(n + k as i64) as usize])
                .sum(),
        )
    }

    /// Whether the relation holds at every `n >= offset` the data reaches.
    pub fn holds_on(&self, u: &[Rational]) -> bool {
        (self.offset..).map_while(|n| self.residual(u, n)).all(|r| r.is_zero())
    }

    /// Extends `initial` to `len` terms; fails where the leading polynomial vanishes.
    pub fn unroll(&self, initial: &[Rational], len: usize) -> Result<Vec<Rational>> {
        let k = self.order() as i64;
        let mut u = initial.to_vec();
        while u.len() < len {
            let m = u.len() as i64;
            let n = m - k;
            if n < self.offset {
                return Err(Error::InsufficientCoefficients { needed: (self.offset + k) as usize, available: u.len() });
            }
            let lead = self.coeffs[k as usize].eval(&int(n));
            if lead.is_zero() {
                return Err(Error::Unsupported(format!("leading coefficient vanishes at n = {n}")));
            }
            u.push(Rational::zero());
            let rest = self.residual(&u, n).unwrap();
            u[m as usize] = -rest / lead;
        }
        Ok(u)
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, r)| !r.is_zero())
            .map(|(k, r)| {
                let idx = if k == 0 { "n".to_string() } else { format!("n+{k}") };
                format!("({})*u({idx})", r.display_in("n"))
            })
            .collect();
        write!(f, "{} = 0, n >= {}", parts.join(" + "), self.offset)
    }
}

/// The coefficient of `z^(n - t0)` in `A sum u_m z^m` is `sum_k r_k(n) u_(n+k)`,
/// where `t0 = min (j - i)` and `r_k(n) = sum_(j-i = k+t0) c_ij (n+k)^(falling j)`.
pub fn op_to_recurrence(a: &DiffOp) -> Result<Recurrence> {
    if a.is_zero() {
        return Err(Error::ZeroOperator("op_to_recurrence"));
    }
    let t0 = a.terms().map(|(i, j, _)| j as i64 - i as i64).min().unwrap();
    let t1 = a.terms().map(|(i, j, _)| j as i64 - i as i64).max().unwrap();
    let mut coeffs = vec![Poly::zero(); (t1 - t0) as usize + 1];
    for (i, j, c) in a.terms() {
        let k = (j as i64 - i as i64 - t0) as usize;
        coeffs[k] = &coeffs[k] + &falling(j).shift(&int(k as i64)).scale(c);
    }
    Recurrence::new(coeffs, t0)
}

/// Inverse of [`op_to_recurrence`]. When some `r_k` cannot be written with
/// `i >= 0`, the recurrence is first multiplied by
/// `(n - n0 + 1)...(n - n0 + s)`, which has no roots at `n >= n0`.
pub fn recurrence_to_op(r: &Recurrence) -> Result<DiffOp> {
    let n0 = r.offset;
    let expand = |k: usize, p: &Poly| -> Vec<Rational> { to_falling_basis(&p.shift(&int(-(k as i64)))) };
    let deficit = r
        .coeffs
        .iter()
        .enumerate()
        .filter(|(k, p)| expand(*k, p).iter().enumerate().any(|(j, c)| !c.is_zero() && (j as i64) < *k as i64 + n0))
        .map(|(k, _)| k as i64 + n0)
        .max();
    let coeffs: Vec<Poly> = match deficit {
        Some(s) if s > 0 => {
            let pi = (1..=s).fold(Poly::one(), |acc, c| &acc * &Poly::linear_root(&int(n0 - c)));
            r.coeffs.iter().map(|p| p * &pi).collect()
        }
        _ => r.coeffs.clone(),
    };
    let mut op = DiffOp::zero();
    for (k, p) in coeffs.iter().enumerate() {
        for (j, c) in expand(k, p).into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let i = j as i64 - k as i64 - n0;
            debug_assert!(i >= 0);
            op.add_term(i as usize, j, c);
        }
    }
    Ok(op)
}

/// Transfers an annihilator of a raw Gevrey series of integer order `s` to
/// one of its normalized series `sum a_n z^n`, where `F_n = (n!)^s a_n`.
///
/// Relations at `n < 0` are dropped, so the output may admit more solutions
/// than the input.
pub fn borel_transfer(a: &DiffOp, s: i64) -> Result<DiffOp> {
    if s == 0 {
        return Err(Error::ZeroGevreyOrder("borel_transfer"));
    }
    let rec = op_to_recurrence(a)?;
    let big_k = rec.order();
    let e = s.unsigned_abs() as usize;
    let coeffs: Vec<Poly> = rec
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let range = if s > 0 { 1..=k } else { k + 1..=big_k };
            range.fold(r.clone(), |acc, l| &acc * &Poly::linear_root(&int(-(l as i64))).pow(e))
        })
        .collect();
    let offset = rec.offset.max(0);
    recurrence_to_op(&Recurrence::new(strip_content(coeffs, offset), offset)?)
}

/// Divides out the part of the common factor of the `r_k` without integer
/// roots at `n >= offset`; such a factor does not change the solutions.
fn strip_content(coeffs: Vec<Poly>, offset: i64) -> Vec<Poly> {
    let g = coeffs.iter().filter(|p| !p.is_zero()).fold(Poly::zero(), |acc, p| if acc.is_zero() { p.monic() } else { acc.gcd(p) });
    let keep = g
        .rational_roots()
        .into_iter()
        .filter(|(r, _)| r.is_integer() && r.to_integer() >= offset.into())
        .fold(Poly::one(), |acc, (r, m)| &acc * &Poly::linear_root(&r).pow(m));
    let (removable, _) = g.div_rem(&keep).expect("keep is nonzero");
    if removable.degree().unwrap_or(0) == 0 {
        return coeffs;
    }
    coeffs.into_iter().map(|p| p.div_rem(&removable).expect("common factor").0).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicialData {
    pub point: Rational,
    /// In the exponent variable `rho`.
    pub poly: Poly,
    pub exponents: Vec<(Rational, usize)>,
    /// Whether every root of `poly` is rational.
    pub all_rational: bool,
}

/// Lowest `(z - xi)`-stratum of `A` acting on `(z - xi)^rho`.
pub fn indicial_polynomial(a: &DiffOp, xi: &Rational) -> Result<IndicialData> {
    if a.is_zero() {
        return Err(Error::ZeroOperator("indicial_polynomial"));
    }
    let strata = a.translate(xi).strata();
    let poly = strata.into_iter().next().unwrap().1;
    let exponents = poly.rational_roots();
    let found: usize = exponents.iter().map(|(_, m)| m).sum();
    let all_rational = Some(found) == poly.degree();
    Ok(IndicialData { point: xi.clone(), poly, exponents, all_rational })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularPoints {
    pub leading: Poly,
    pub rational_roots: Vec<(Rational, usize)>,
}

pub fn singular_points(a: &DiffOp) -> Result<SingularPoints> {
    if a.is_zero() {
        return Err(Error::ZeroOperator("singular_points"));
    }
    let leading = a.leading_coefficient();
    let rational_roots = leading.rational_roots();
    Ok(SingularPoints { leading, rational_roots })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Zero,
    Infinity,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Location::Zero => "0",
            Location::Infinity => "inf",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub location: Location,
    /// `(slope, horizontal length)` by increasing slope.
    pub segments: Vec<(Rational, usize)>,
}

impl NewtonPolygon {
    pub fn is_regular(&self) -> bool {
        self.segments.iter().all(|(s, _)| s.is_zero())
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.segments.iter().map(|(s, _)| s.clone()).collect()
    }
}

/// Polygon of the points `(j, i - j)` at 0, or `(j, j - i)` at infinity,
/// each extended by the quadrant to its upper left.
pub fn newton_polygon(a: &DiffOp, at: Location) -> Result<NewtonPolygon> {
    if a.is_zero() {
        return Err(Error::ZeroOperator("newton_polygon"));
    }
    let mut lowest: BTreeMap<i64, i64> = BTreeMap::new();
    for (i, j, _) in a.terms() {
        let y = match at {
            Location::Zero => i as i64 - j as i64,
            Location::Infinity => j as i64 - i as i64,
        };
        let e = lowest.entry(j as i64).or_insert(y);
        *e = (*e).min(y);
    }
    let y_min = *lowest.values().min().unwrap();
    let j0 = *lowest.iter().filter(|(_, &y)| y == y_min).map(|(j, _)| j).max().unwrap();
    let order = *lowest.keys().max().unwrap();
    let mut segments = Vec::new();
    if j0 > 0 {
        segments.push((Rational::zero(), j0 as usize));
    }
    let (mut cj, mut cy) = (j0, y_min);
    while cj < order {
        let mut best: Option<(Rational, i64, i64)> = None;
        for (&j, &y) in lowest.range(cj + 1..) {
            let slope = Rational::new((y - cy).into(), (j - cj).into());
            let better = match &best {
                None => true,
                Some((bs, bj, _)) => slope < *bs || (slope == *bs && j > *bj),
            };
            if better {
                best = Some((slope, j, y));
            }
        }
        let (slope, j, y) = best.unwrap();
        segments.push((slope, (j - cj) as usize));
        cj = j;
        cy = y;
    }
    Ok(NewtonPolygon { location: at, segments })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Indeterminate => "INDETERMINATE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialCheck {
    pub verdict: Verdict,
    pub point: Rational,
    pub vanish_order: usize,
    pub op_order: usize,
    /// `None` when indeterminate.
    pub dimension: Option<usize>,
    pub indicial: IndicialData,
    /// Solutions in `x = z - xi`, truncated at `x^M`.
    pub basis: Vec<FormalSeries>,
}

pub fn default_trunc(op_order: usize, vanish_order: usize) -> usize {
    4 * (op_order + vanish_order) + 20
}

/// Dimension of the power-series solutions at `xi` in `(z - xi)^N K[[z - xi]]`.
///
/// The local recurrence is triangular: `ind(m) u_m` plus terms in
/// `u_(m-1), u_(m-2), ...` vanishes for every `m`. Each integer root
/// `m >= N` of `ind` frees `u_m` and imposes one linear condition on the
/// earlier free values; past the largest such root every `u_m` is forced.
/// The dimension is therefore exact, while the basis shown is truncated at `M`.
pub fn trivial_singularity_check(a: &DiffOp, xi: &Rational, vanish_order: usize, trunc: Option<usize>) -> Result<TrivialCheck> {
    let op_order = a.order().ok_or(Error::ZeroOperator("trivial_singularity_check"))?;
    let indicial = indicial_polynomial(a, xi)?;
    let trunc = trunc.unwrap_or_else(|| default_trunc(op_order, vanish_order));
    let roots: Vec<usize> = indicial
        .exponents
        .iter()
        .filter(|(r, _)| r.is_integer() && !r.is_negative())
        .filter_map(|(r, _)| r.to_integer().to_usize())
        .filter(|&r| r >= vanish_order)
        .collect();
    let k_max = roots.iter().copied().max().unwrap_or(0);
    if trunc < k_max.max(op_order + vanish_order) {
        return Err(Error::InsufficientCoefficients { needed: k_max.max(op_order + vanish_order) + 1, available: trunc + 1 });
    }
    let singular = a.leading_coefficient().eval(xi).is_zero();
    if singular && !indicial.all_rational {
        return Ok(TrivialCheck {
            verdict: Verdict::Indeterminate,
            point: xi.clone(),
            vanish_order,
            op_order,
            dimension: None,
            indicial,
            basis: Vec::new(),
        });
    }

    let strata = a.translate(xi).strata();
    let d_min = *strata.keys().next().unwrap();
    let ind = &strata[&d_min];
    let higher: Vec<(usize, &Poly)> = strata.iter().skip(1).map(|(d, p)| ((d - d_min) as usize, p)).collect();
    let t = roots.len();
    let zero_vec = vec![Rational::zero(); t];
    let mut u: Vec<Vec<Rational>> = Vec::with_capacity(trunc + 1);
    let mut constraints: linalg::Matrix = Vec::new();
    for m in 0..=trunc {
        if m < vanish_order {
            u.push(zero_vec.clone());
            continue;
        }
        let mut lower = zero_vec.clone();
        for &(e, p) in &higher {
            if e > m {
                continue;
            }
            let w = p.eval(&int((m - e) as i64));
            if w.is_zero() {
                continue;
            }
            for (l, x) in lower.iter_mut().zip(&u[m - e]) {
                *l += &w * x;
            }
        }
        if let Some(pos) = roots.iter().position(|&r| r == m) {
            if lower.iter().any(|x| !x.is_zero()) {
                constraints.push(lower);
            }
            let mut v = zero_vec.clone();
            v[pos] = Rational::one();
            u.push(v);
        } else {
            let w = ind.eval(&int(m as i64));
            u.push(lower.into_iter().map(|x| -x / &w).collect());
        }
    }
    let kernel: Vec<Vec<Rational>> = if constraints.is_empty() {
        (0..t).map(|p| (0..t).map(|q| if p == q { Rational::one() } else { Rational::zero() }).collect()).collect()
    } else {
        linalg::kernel(&constraints, t)
    };
    let basis = kernel
        .iter()
        .map(|c| FormalSeries::new(u.iter().map(|um| um.iter().zip(c).map(|(a, b)| a * b).sum()).collect()))
        .collect();
    let dimension = kernel.len();
    Ok(TrivialCheck {
        verdict: if dimension == op_order { Verdict::Pass } else { Verdict::Fail },
        point: xi.clone(),
        vanish_order,
        op_order,
        dimension: Some(dimension),
        indicial,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorial, rat};
    use crate::series::{GevreyOrder, GevreySeries};
    use proptest::prelude::*;

    fn op(terms: &[(usize, usize, i64)]) -> DiffOp {
        DiffOp::from_terms(terms.iter().map(|&(i, j, c)| ((i, j), int(c))))
    }

    fn exp_series(n: usize) -> FormalSeries {
        FormalSeries::from_fn(n, |k| Rational::from_integer(factorial(k as u64)).recip())
    }

    fn ones(n: usize) -> FormalSeries {
        FormalSeries::from_fn(n, |_| int(1))
    }

    #[test]
    fn commutator_and_products() {
        assert_eq!(weyl_multiply(&DiffOp::d(), &DiffOp::z()), op(&[(1, 1, 1), (0, 0, 1)]));
        assert_eq!(weyl_multiply(&DiffOp::theta(), &DiffOp::theta()), op(&[(2, 2, 1), (1, 1, 1)]));
        let a = op(&[(3, 2, 5), (0, 1, -2)]);
        assert_eq!(weyl_multiply(&a, &DiffOp::one()), a);
        assert_eq!(weyl_multiply(&DiffOp::one(), &a), a);
    }

    #[test]
    fn display_forms() {
        assert_eq!(op(&[(2, 1, 1), (1, 0, 1), (0, 0, -1)]).to_string(), "z^2*D + z - 1");
        assert_eq!(DiffOp::from_terms([((0, 2), rat(-3, 2))]).to_string(), "-3/2*D^2");
        assert_eq!(DiffOp::zero().to_string(), "0");
    }

    #[test]
    fn action_examples() {
        let d_minus_1 = op(&[(0, 1, 1), (0, 0, -1)]);
        let r = apply_op(&d_minus_1, &exp_series(12)).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.order(), 11);
        let geo = op(&[(0, 1, 1), (1, 1, -1), (0, 0, -1)]);
        assert!(apply_op(&geo, &ones(20)).unwrap().is_zero());
        let a = FormalSeries::from_fn(8, |n| rat(n as i64 * n as i64 - 3, 2));
        assert_eq!(apply_op(&DiffOp::theta(), &a).unwrap(), a.theta());
        assert!(matches!(apply_op(&d_minus_1, &FormalSeries::one(1)), Err(Error::InsufficientCoefficients { .. })));
    }

    #[test]
    fn recurrence_examples() {
        let rec = op_to_recurrence(&op(&[(0, 1, 1), (0, 0, -1)])).unwrap();
        assert_eq!(rec.coeffs(), &[Poly::from_ints(&[-1]), Poly::from_ints(&[1, 1])]);
        assert_eq!(rec.offset(), 0);
        let rec = op_to_recurrence(&op(&[(0, 1, 1), (1, 1, -1), (0, 0, -1)])).unwrap();
        assert_eq!(rec.coeffs(), &[Poly::from_ints(&[-1, -1]), Poly::from_ints(&[1, 1])]);
        let rec = op_to_recurrence(&DiffOp::theta()).unwrap();
        assert_eq!(rec.coeffs(), &[Poly::x()]);
        assert_eq!(rec.to_string(), "(n)*u(n) = 0, n >= 0");
        assert_eq!(op_to_recurrence(&DiffOp::zero()), Err(Error::ZeroOperator("op_to_recurrence")));
    }

    #[test]
    fn recurrence_without_operator_form_gets_multiplied() {
        // u(n+1) - u(n) = 0
        let r = Recurrence::new(vec![Poly::from_ints(&[-1]), Poly::one()], 0).unwrap();
        assert_eq!(recurrence_to_op(&r).unwrap(), op(&[(0, 1, 1), (1, 1, -1), (0, 0, -1)]));
    }

    #[test]
    fn unroll_follows_recurrence() {
        let rec = op_to_recurrence(&op(&[(0, 1, 1), (0, 0, -1)])).unwrap();
        let u = rec.unroll(&[int(1)], 10).unwrap();
        assert_eq!(FormalSeries::new(u.clone()), exp_series(9));
        assert!(rec.holds_on(&u));
    }

    #[test]
    fn transfer_examples() {
        let out = borel_transfer(&op(&[(0, 1, 1), (0, 0, -1)]), -1).unwrap();
        let rec = op_to_recurrence(&out).unwrap();
        // (n+1)(a(n+1) - a(n)) = 0
        assert_eq!(rec.coeffs(), &[Poly::from_ints(&[-1, -1]), Poly::from_ints(&[1, 1])]);
        assert!(apply_op(&out, &ones(30)).unwrap().is_zero());
        assert_eq!(borel_transfer(&DiffOp::one(), 2).unwrap(), DiffOp::one());
        assert_eq!(borel_transfer(&DiffOp::one(), 0), Err(Error::ZeroGevreyOrder("borel_transfer")));
    }

    #[test]
    fn transfer_of_factorial_annihilator() {
        // F = sum n! z^n satisfies (z^2 D + z - 1) F = -1
        let euler = op(&[(2, 1, 1), (1, 0, 1), (0, 0, -1)]);
        let raw = FormalSeries::from_fn(25, |n| Rational::from_integer(factorial(n as u64)));
        assert_eq!(apply_op(&euler, &raw).unwrap().truncate(24), FormalSeries::from_poly(&Poly::from_ints(&[-1]), 24));
        let a = &DiffOp::d() * &euler;
        assert!(apply_op(&a, &raw).unwrap().is_zero());
        let out = borel_transfer(&a, 1).unwrap();
        assert!(apply_op(&out, &ones(25)).unwrap().is_zero());
    }

    #[test]
    fn indicial_examples() {
        let euler = op(&[(2, 2, 1)]);
        let data = indicial_polynomial(&euler, &int(0)).unwrap();
        assert_eq!(data.exponents, vec![(int(0), 1), (int(1), 1)]);
        let data = indicial_polynomial(&op(&[(0, 1, 1), (0, 0, -1)]), &int(1)).unwrap();
        assert_eq!(data.exponents, vec![(int(0), 1)]);
        // (z - 1) D - 5/3
        let a = DiffOp::from_terms([((1, 1), int(1)), ((0, 1), int(-1)), ((0, 0), rat(-5, 3))]);
        assert_eq!(indicial_polynomial(&a, &int(1)).unwrap().exponents, vec![(rat(5, 3), 1)]);
    }

    #[test]
    fn singular_point_examples() {
        let sp = singular_points(&op(&[(0, 1, 1), (1, 1, -1), (0, 0, -1)])).unwrap();
        assert_eq!(sp.rational_roots, vec![(int(1), 1)]);
        assert!(singular_points(&op(&[(0, 1, 1), (0, 0, -1)])).unwrap().rational_roots.is_empty());
        let sp = singular_points(&op(&[(2, 1, 1), (1, 0, 1), (0, 0, -1)])).unwrap();
        assert_eq!(sp.rational_roots, vec![(int(0), 2)]);
    }

    #[test]
    fn newton_examples() {
        let p = newton_polygon(&DiffOp::theta(), Location::Zero).unwrap();
        assert_eq!(p.segments, vec![(int(0), 1)]);
        assert!(p.is_regular());
        let p = newton_polygon(&op(&[(2, 1, 1), (1, 0, 1), (0, 0, -1)]), Location::Zero).unwrap();
        assert_eq!(p.segments, vec![(int(1), 1)]);
        assert!(!p.is_regular());
        let p = newton_polygon(&op(&[(0, 1, 1), (0, 0, -1)]), Location::Infinity).unwrap();
        assert_eq!(p.slopes(), vec![int(1)]);
        // z^3 D^2 + D + 1 at 0: points (2,1), (1,-1), (0,0)
        let p = newton_polygon(&op(&[(3, 2, 1), (0, 1, 1), (0, 0, 1)]), Location::Zero).unwrap();
        assert_eq!(p.segments, vec![(int(0), 1), (int(2), 1)]);
    }

    #[test]
    fn trivial_check_examples() {
        let c = trivial_singularity_check(&op(&[(0, 1, 1), (0, 0, -1)]), &int(1), 1, None).unwrap();
        assert_eq!((c.verdict, c.dimension), (Verdict::Fail, Some(0)));
        let a = op(&[(1, 1, 1), (0, 1, -1), (0, 0, -1)]);
        let c = trivial_singularity_check(&a, &int(1), 1, None).unwrap();
        assert_eq!((c.verdict, c.dimension), (Verdict::Pass, Some(1)));
        let b = &c.basis[0];
        assert_eq!(b.coeff(0), &int(0));
        assert!(b.coeffs()[2..].iter().all(Zero::is_zero));
        // z^2 D^2 - 2 at 0: exponents 2 and -1
        let c = trivial_singularity_check(&op(&[(2, 2, 1), (0, 0, -2)]), &int(0), 1, None).unwrap();
        assert_eq!(c.dimension, Some(1));
        // z^2 D^2 - 3: roots of rho^2 - rho - 3 are irrational
        let c = trivial_singularity_check(&op(&[(2, 2, 1), (0, 0, -3)]), &int(0), 1, None).unwrap();
        assert_eq!(c.verdict, Verdict::Indeterminate);
        assert!(trivial_singularity_check(&a, &int(1), 1, Some(1)).is_err());
    }

    #[test]
    fn trivial_check_basis_is_annihilated() {
        // (z - 1)^2 D^2 - 2 (z - 1) D + 2 = x^2 D^2 - 2 x D + 2, solutions x and x^2
        let a = DiffOp::from_coeff_polys(&[Poly::from_ints(&[2]), Poly::from_ints(&[2, -2]), Poly::from_ints(&[1, -2, 1])]);
        let c = trivial_singularity_check(&a, &int(1), 1, None).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        let local = a.translate(&int(1));
        for b in &c.basis {
            assert!(apply_op(&local, b).unwrap().is_zero());
        }
    }

    #[test]
    fn dictionary_identity_order_minus_one() {
        let xi = rat(3, 2);
        let g = FormalSeries::from_fn(20, |n| rat((n as i64 * 5) % 7 - 3, 1 + n as i64 % 3));
        let gg = GevreySeries::from_normalized(g.clone(), GevreyOrder::integer(-1));
        let ff = GevreySeries::from_raw(&gg.raw().mul_poly(&Poly::new(vec![-xi.clone(), int(1)])), GevreyOrder::integer(-1));
        let a = DiffOp::from_terms([((2, 1), int(1)), ((1, 0), int(1)), ((0, 0), -xi)]);
        let lhs = apply_op(&a, &g).unwrap();
        assert_eq!(lhs, ff.normalized().truncate(lhs.order()));
    }

    fn arb_op() -> impl Strategy<Value = DiffOp> {
        proptest::collection::vec((0usize..3, 0usize..3, -4i64..5), 1..4)
            .prop_map(|v| DiffOp::from_terms(v.into_iter().map(|(i, j, c)| ((i, j), int(c)))))
    }

    fn arb_series(n: usize) -> impl Strategy<Value = FormalSeries> {
        proptest::collection::vec(-9i64..10, n + 1).prop_map(|v| FormalSeries::new(v.into_iter().map(int).collect()))
    }

    proptest! {
        #[test]
        fn multiply_is_associative(a in arb_op(), b in arb_op(), c in arb_op()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn product_acts_as_composition(a in arb_op(), b in arb_op(), f in arb_series(16)) {
            let ab = &a * &b;
            let lhs = apply_op(&ab, &f);
            let rhs = apply_op(&b, &f).and_then(|g| apply_op(&a, &g));
            if let (Ok(l), Ok(r)) = (lhs, rhs) {
                let n = l.order().min(r.order());
                prop_assert_eq!(l.truncate(n), r.truncate(n));
            }
        }

        #[test]
        fn recurrence_roundtrip(a in arb_op(), f in arb_series(14)) {
            prop_assume!(!a.is_zero());
            let back = recurrence_to_op(&op_to_recurrence(&a).unwrap()).unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(apply_op(&back, &f).ok(), apply_op(&a, &f).ok());
        }

        #[test]
        fn recurrence_matches_action(a in arb_op(), f in arb_series(14)) {
            prop_assume!(!a.is_zero());
            let rec = op_to_recurrence(&a).unwrap();
            if let Ok(af) = apply_op(&a, &f) {
                for m in 0..=af.order() {
                    let n = m as i64 + rec.offset();
                    if let Some(r) = rec.residual(f.coeffs(), n) {
                        prop_assert_eq!(&r, af.coeff(m));
                    }
                }
            }
        }

        #[test]
        fn recurrence_to_op_preserves_solutions(r0 in proptest::collection::vec(-3i64..4, 1..3), r1 in proptest::collection::vec(1i64..4, 1..3), n0 in 0i64..3) {
            let rec = Recurrence::new(vec![Poly::from_ints(&r0), Poly::new(r1.iter().map(|&c| int(c)).collect())], n0).unwrap();
            prop_assume!(rec.order() == 1);
            let start: Vec<Rational> = (0..=n0).map(|k| int(k + 1)).collect();
            if let Ok(u) = rec.unroll(&start, 16) {
                let a = recurrence_to_op(&rec).unwrap();
                let out = apply_op(&a, &FormalSeries::new(u)).unwrap();
                let t0 = a.terms().map(|(i, j, _)| j as i64 - i as i64).min().unwrap();
                // equations below n0 are not part of the relation
                let skip = (n0 - t0).max(0) as usize;
                prop_assert!(out.coeffs().iter().skip(skip).all(Zero::is_zero));
            }
        }

        #[test]
        fn double_transfer_keeps_solutions(s in prop_oneof![Just(1i64), Just(-1), Just(2)], c in 1i64..4) {
            // annihilator of e^(cz), then of its transfers
            let a = DiffOp::from_terms([((0, 1), int(1)), ((0, 0), int(-c))]);
            let f = FormalSeries::from_fn(18, |n| crate::arith::pow(&int(c), n as i64) / Rational::from_integer(factorial(n as u64)));
            let back = borel_transfer(&borel_transfer(&a, s).unwrap(), -s).unwrap();
            prop_assert!(apply_op(&back, &f).unwrap().is_zero());
        }

        #[test]
        fn ordinary_points_have_full_dimension(a in arb_op(), xi in -3i64..4) {
            let xi = int(xi);
            let r = a.order().unwrap_or(0);
            prop_assume!(r > 0 && !a.leading_coefficient().eval(&xi).is_zero());
            let c = trivial_singularity_check(&a, &xi, 0, None).unwrap();
            prop_assert_eq!(c.dimension, Some(r));
        }

        #[test]
        fn dictionary_identity(g in arb_series(15), xi in (1i64..5, 1i64..4)) {
            let xi = rat(xi.0, xi.1);
            let gg = GevreySeries::from_normalized(g.clone(), GevreyOrder::integer(-1));
            let ff = GevreySeries::from_raw(&gg.raw().mul_poly(&Poly::new(vec![-xi.clone(), int(1)])), GevreyOrder::integer(-1));
            let a = DiffOp::from_terms([((2, 1), int(1)), ((1, 0), int(1)), ((0, 0), -xi)]);
            let lhs = apply_op(&a, &g).unwrap();
            prop_assert_eq!(lhs.clone(), ff.normalized().truncate(lhs.order()));
        }
    }
}
