//! Annihilators and rational functions recovered from truncated series.

use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Solve};
use crate::pfrac::PartialFraction;
use crate::poly::{Poly, RationalFunction};
use crate::series::FormalSeries;
use crate::weyl::{apply_op, DiffOp};

/// Monomials of the ansatz: `z^i D^j` or `z^i theta^j`. The degree bound
/// applies to `i`, so the two bases bound different operator sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OperatorBasis {
    #[default]
    D,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GuessConfig {
    pub max_order: usize,
    pub max_degree: usize,
    /// Coefficients `f_0 .. f_N` are used.
    pub trunc: usize,
    /// Equations held out of the solve that the result must also satisfy.
    pub margin: usize,
    pub basis: OperatorBasis,
}

impl GuessConfig {
    pub fn new(max_order: usize, max_degree: usize, trunc: usize, margin: usize) -> Self {
        GuessConfig { max_order, max_degree, trunc, margin, basis: OperatorBasis::D }
    }

    pub fn with_basis(self, basis: OperatorBasis) -> Self {
        GuessConfig { basis, ..self }
    }

    pub fn required_trunc(&self) -> usize {
        (self.max_order + 1) * (self.max_degree + 1) + self.margin
    }
}

/// An operator that is minimal only within the searched bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guess {
    pub op: DiffOp,
    pub order: usize,
    /// Degree in `z` with respect to the configured basis.
    pub degree: usize,
    /// Dimension of the solution space at the selected `(order, degree)`.
    pub kernel_dim: usize,
    pub equations_used: usize,
    pub held_out: usize,
}

/// Canonical vector of a subspace: the first row of its reduced echelon form.
fn canonical(basis: Vec<Vec<Rational>>, ncols: usize) -> Vec<Rational> {
    let mut m = basis;
    linalg::rref(&mut m, ncols);
    m.swap_remove(0)
}

/// Searches order `0..=r`, then degree `0..=d`, for an operator killing `f`.
/// The returned operator is always in `z^i D^j` normal form.
///
/// Unknowns are ordered by `(j desc, i asc)`, and the returned operator is
/// the first row of the reduced echelon form of the kernel, so its first
/// nonzero coefficient in that order is 1.
pub fn guess_operator(f: &FormalSeries, cfg: &GuessConfig) -> Result<Option<Guess>> {
    let need = cfg.required_trunc();
    if cfg.trunc < need || f.order() < cfg.trunc {
        return Err(Error::InsufficientCoefficients { needed: need.max(cfg.trunc) + 1, available: f.order().min(cfg.trunc) + 1 });
    }
    let f = f.truncate(cfg.trunc);
    for r in 0..=cfg.max_order {
        // D^r f is known through z^(N - r); theta preserves the truncation
        let rows = match cfg.basis {
            OperatorBasis::D => cfg.trunc - r + 1,
            OperatorBasis::Theta => cfg.trunc + 1,
        };
        if rows <= cfg.margin {
            continue;
        }
        // column (i, j) holds the coefficients of z^i D^j f or z^i theta^j f
        let step = |g: &FormalSeries| match cfg.basis {
            OperatorBasis::D => g.derivative(),
            OperatorBasis::Theta => g.theta(),
        };
        let derivs: Vec<FormalSeries> = std::iter::successors(Some(f.clone()), |g| Some(step(g))).take(r + 1).collect();
        for d in 0..=cfg.max_degree {
            let cols: Vec<(usize, usize)> = (0..=r).rev().flat_map(|j| (0..=d).map(move |i| (i, j))).collect();
            let full: Matrix = (0..rows)
                .map(|n| {
                    cols.iter()
                        .map(|&(i, j)| if n >= i { derivs[j].coeff(n - i).clone() } else { Rational::zero() })
                        .collect()
                })
                .collect();
            let used = rows - cfg.margin;
            let kernel = linalg::kernel(&full[..used].to_vec(), cols.len());
            if kernel.is_empty() {
                continue;
            }
            let full_kernel = linalg::kernel(&full, cols.len());
            if full_kernel.len() != kernel.len() {
                continue;
            }
            let dim = kernel.len();
            let v = canonical(kernel, cols.len());
            let degree = cols.iter().zip(&v).filter(|(_, c)| !c.is_zero()).map(|(&(i, _), _)| i).max().unwrap();
            let op = match cfg.basis {
                OperatorBasis::D => DiffOp::from_terms(cols.iter().copied().zip(v)),
                OperatorBasis::Theta => cols
                    .iter()
                    .zip(v)
                    .filter(|(_, c)| !c.is_zero())
                    .fold(DiffOp::zero(), |acc, (&(i, j), c)| &acc + &(&DiffOp::monomial(c, i, 0) * &DiffOp::theta().pow(j))),
            };
            debug_assert!(apply_op(&op, &f).map(|g| g.is_zero()).unwrap_or(true));
            let order = op.order().unwrap();
            return Ok(Some(Guess { op, order, degree, kernel_dim: dim, equations_used: used, held_out: cfg.margin }));
        }
    }
    Ok(None)
}

/// Operator killing every solution of `L y = g`: `(g D - g') L`.
pub fn homogenize(l: &DiffOp, rhs: &Poly) -> DiffOp {
    if rhs.is_zero() {
        return l.clone();
    }
    let left = &DiffOp::from_coeff_polys(&[Poly::zero(), rhs.clone()]) - &DiffOp::from_coeff_polys(&[rhs.derivative()]);
    &left * l
}

/// Hermite-Padé approximants: polynomials `P_h` of degree `<= D`, not all
/// zero, with `ord_xi sum P_h Z_h >= N`.
///
/// The series `Z_h` are expansions in `x = z - xi`; the returned polynomials
/// are in `z`. `None` when the linear system has only the trivial solution.
pub fn hermite_pade(z: &[FormalSeries], xi: &Rational, n: usize, d: usize) -> Result<Option<Vec<Poly>>> {
    if z.is_empty() {
        return Err(Error::InconsistentBounds("hermite_pade needs at least one series".into()));
    }
    if let Some(short) = z.iter().find(|s| n > 0 && s.order() + 1 < n) {
        return Err(Error::InsufficientCoefficients { needed: n, available: short.order() + 1 });
    }
    let m = z.len();
    let ncols = m * (d + 1);
    let system: Matrix = (0..n)
        .map(|k| {
            (0..m)
                .flat_map(|h| (0..=d).map(move |e| (h, e)))
                .map(|(h, e)| if k >= e { z[h].coeff(k - e).clone() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let kernel = linalg::kernel(&system, ncols);
    if kernel.is_empty() {
        return Ok(None);
    }
    let v = canonical(kernel, ncols);
    let back = -xi;
    Ok(Some(v.chunks(d + 1).map(|c| Poly::new(c.to_vec()).shift(&back)).collect()))
}

/// `sum P_h Z_h` as a series in `x = z - xi`, with `P_h` given in `z`.
pub fn hermite_pade_residual(z: &[FormalSeries], polys: &[Poly], xi: &Rational) -> FormalSeries {
    let order = z.iter().map(FormalSeries::order).min().unwrap_or(0);
    z.iter()
        .zip(polys)
        .map(|(s, p)| s.truncate(order).mul_poly(&p.shift(xi)))
        .fold(FormalSeries::zero(order), |acc, t| acc.add(&t))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    pub function: RationalFunction,
    /// Present when the denominator splits over the rationals.
    pub partial_fraction: Option<PartialFraction>,
    /// Padé degree at which agreement was found.
    pub degree: usize,
}

/// Smallest `d <= d_max` whose `[d/d]` Padé approximant reproduces every
/// available coefficient. A degree is only tried when at least one
/// coefficient beyond the `2d + 1` determining it is available.
pub fn rational_reconstruct(f: &FormalSeries, d_max: usize) -> Option<Reconstruction> {
    let len = f.order() + 1;
    for d in 0..=d_max {
        if len < 2 * d + 2 {
            break;
        }
        let Some(q) = pade_denominator(f, d) else { continue };
        let p = Poly::new(f.mul_poly(&q).coeffs()[..=d].to_vec());
        let check = FormalSeries::from_poly(&p, f.order()).div(&FormalSeries::from_poly(&q, f.order())).ok()?;
        if &check != f {
            continue;
        }
        let function = RationalFunction::new(p, q).ok()?;
        let partial_fraction = PartialFraction::from_rational_function(&function);
        return Some(Reconstruction { function, partial_fraction, degree: d });
    }
    None
}

/// `Q` with `Q(0) = 1`, `deg Q <= d` and `f Q` free of `z^(d+1) .. z^(2d)`.
fn pade_denominator(f: &FormalSeries, d: usize) -> Option<Poly> {
    if d == 0 {
        return Some(Poly::one());
    }
    // unknowns q_1..q_d: sum_k q_k f_(n-k) = -f_n for n = d+1..2d
    let a: Matrix = (d + 1..=2 * d).map(|n| (1..=d).map(|k| f.coeff(n - k).clone()).collect()).collect();
    let b: Vec<Rational> = (d + 1..=2 * d).map(|n| -f.coeff(n).clone()).collect();
    match linalg::solve(&a, &b, d) {
        Solve::Solution(x) => {
            let mut c = vec![Rational::one()];
            c.extend(x);
            Some(Poly::new(c))
        }
        Solve::Infeasible(_) => None,
    }
}
