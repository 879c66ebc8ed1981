//! Interpreting parsed expressions as constants, term generators, series,
//! differential operators and q-difference operators.

use std::collections::{BTreeMap, HashMap};

use gevrey_core::arith::pow;
use gevrey_core::{DiffOp, FactorialSeriesSpec, FormalSeries, Poly, QContext, QDiffOp, Rational, RationalFunction};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::lang::{parse_spec, Expr, Func, ParseError, ShiftKind};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] gevrey_core::Error),
}

type Result<T> = std::result::Result<T, EvalError>;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(EvalError::Invalid(msg.into()))
}

/// Named constants such as `q` and `xi`.
pub type Env = HashMap<String, Rational>;

fn small_nonneg(r: &Rational, what: &str) -> Result<u64> {
    if !r.is_integer() || r.is_negative() {
        return invalid(format!("{what} needs a nonnegative integer, got {r}"));
    }
    r.to_integer().to_u64().ok_or_else(|| EvalError::Invalid(format!("{what} argument {r} is too large")))
}

fn factorial(n: u64) -> Rational {
    Rational::from_integer((1..=n).fold(BigInt::one(), |acc, k| acc * k))
}

/// Evaluates an expression with no free symbols beyond `env`.
pub fn eval_rational(e: &Expr, env: &Env) -> Result<Rational> {
    Ok(match e {
        Expr::Int(n) => Rational::from_integer(BigInt::from(n.clone())),
        Expr::Var(v) => env.get(v).cloned().ok_or_else(|| EvalError::UnknownSymbol(v.clone()))?,
        Expr::Neg(a) => -eval_rational(a, env)?,
        Expr::Add(a, b) => eval_rational(a, env)? + eval_rational(b, env)?,
        Expr::Sub(a, b) => eval_rational(a, env)? - eval_rational(b, env)?,
        Expr::Mul(a, b) => eval_rational(a, env)? * eval_rational(b, env)?,
        Expr::Div(a, b) => {
            let d = eval_rational(b, env)?;
            if d.is_zero() {
                return invalid("division by zero");
            }
            eval_rational(a, env)? / d
        }
        Expr::Pow(a, k) => {
            let base = eval_rational(a, env)?;
            if base.is_zero() && *k < 0 {
                return invalid("division by zero");
            }
            pow(&base, *k)
        }
        Expr::Fact(a) => factorial(small_nonneg(&eval_rational(a, env)?, "factorial")?),
        Expr::Call(Func::QFact, a) => {
            let n = small_nonneg(&eval_rational(a, env)?, "qfact")?;
            let q = env.get("q").ok_or_else(|| EvalError::UnknownSymbol("q".into()))?;
            QContext::new(q.clone())?.q_factorial(n)
        }
        Expr::Call(Func::Sum, _) => return invalid("sum(...) is a series, not a number"),
        Expr::Shift(..) => return invalid("S{...} and d{...} are operators, not numbers"),
    })
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    eval_rational(&parse_spec(text)?, &Env::new())
}

/// `poly(n) (n!)^s`, the shape accepted for factorial-series terms.
#[derive(Debug, Clone, PartialEq)]
struct Gen {
    poly: Poly,
    s: u32,
}

fn rising(k: u64) -> Poly {
    (1..=k).fold(Poly::one(), |acc, l| &acc * &Poly::from_ints(&[l as i64, 1]))
}

fn as_constant(p: &Poly) -> Option<Rational> {
    match p.degree() {
        None => Some(Rational::zero()),
        Some(0) => Some(p.coeff(0)),
        _ => None,
    }
}

fn gen(e: &Expr, env: &Env) -> Result<Gen> {
    let constant = |poly: Poly| Gen { poly, s: 0 };
    Ok(match e {
        Expr::Var(v) if v == "n" => constant(Poly::x()),
        Expr::Int(_) | Expr::Var(_) | Expr::Call(Func::QFact, _) => constant(Poly::constant(eval_rational(e, env)?)),
        Expr::Neg(a) => {
            let g = gen(a, env)?;
            Gen { poly: -&g.poly, s: g.s }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (x, y) = (gen(a, env)?, gen(b, env)?);
            let y_poly = if matches!(e, Expr::Sub(..)) { -&y.poly } else { y.poly };
            if x.poly.is_zero() {
                return Ok(Gen { poly: y_poly, s: y.s });
            }
            if y_poly.is_zero() {
                return Ok(x);
            }
            if x.s != y.s {
                return invalid("terms added together must carry the same power of n!");
            }
            Gen { poly: &x.poly + &y_poly, s: x.s }
        }
        Expr::Mul(a, b) => {
            let (x, y) = (gen(a, env)?, gen(b, env)?);
            Gen { poly: &x.poly * &y.poly, s: x.s + y.s }
        }
        Expr::Div(a, b) => {
            let x = gen(a, env)?;
            let y = gen(b, env)?;
            match as_constant(&y.poly) {
                Some(c) if y.s == 0 && !c.is_zero() => Gen { poly: x.poly.scale(&c.recip()), s: x.s },
                _ => return invalid("terms may only be divided by nonzero constants"),
            }
        }
        Expr::Pow(a, k) => {
            let x = gen(a, env)?;
            if *k < 0 {
                return invalid("negative powers are not allowed in terms");
            }
            let k = *k as usize;
            Gen { poly: x.poly.pow(k), s: x.s * k as u32 }
        }
        Expr::Fact(a) => {
            let x = gen(a, env)?;
            if x.s != 0 {
                return invalid("nested factorials are not allowed in terms");
            }
            if let Some(c) = as_constant(&x.poly) {
                return Ok(constant(Poly::constant(factorial(small_nonneg(&c, "factorial")?))));
            }
            let shift = x.poly.coeff(0);
            if x.poly.degree() != Some(1) || !x.poly.coeff(1).is_one() {
                return invalid("factorials in terms must be of the form (n + k)!");
            }
            Gen { poly: rising(small_nonneg(&shift, "factorial shift")?), s: 1 }
        }
        Expr::Call(Func::Sum, _) | Expr::Shift(..) => return invalid("terms are expressions in n"),
    })
}

/// A term such as `n^5 * (n+1)!` as `P(n) (n!)^s`; `xi` is supplied separately.
pub fn term_spec(text: &str, env: &Env) -> Result<FactorialSeriesSpec> {
    let g = gen(&parse_spec(text)?, env)?;
    Ok(FactorialSeriesSpec::new(g.poly).with_weight(g.s))
}

/// Evaluates `expr` at `n`, for the summand of `sum(...)`.
fn eval_at(e: &Expr, env: &Env, n: usize) -> Result<Rational> {
    let mut env = env.clone();
    env.insert("n".into(), Rational::from_integer(n.into()));
    eval_rational(e, &env)
}

/// A power series in `z` truncated at `z^order`.
pub fn series(text: &str, env: &Env, order: usize) -> Result<FormalSeries> {
    series_of(&parse_spec(text)?, env, order)
}

fn series_of(e: &Expr, env: &Env, order: usize) -> Result<FormalSeries> {
    let rec = |x: &Expr| series_of(x, env, order);
    Ok(match e {
        Expr::Var(v) if v == "z" => FormalSeries::from_poly(&Poly::x(), order),
        Expr::Call(Func::Sum, g) => {
            let coeffs = (0..=order).map(|n| eval_at(g, env, n)).collect::<Result<Vec<_>>>()?;
            FormalSeries::new(coeffs)
        }
        Expr::Neg(a) => rec(a)?.neg(),
        Expr::Add(a, b) => rec(a)?.add(&rec(b)?),
        Expr::Sub(a, b) => rec(a)?.sub(&rec(b)?),
        Expr::Mul(a, b) => rec(a)?.mul(&rec(b)?),
        Expr::Div(a, b) => rec(a)?.div(&rec(b)?)?,
        Expr::Pow(a, k) => {
            let base = rec(a)?;
            let base = if *k < 0 { base.inverse()? } else { base };
            (0..k.unsigned_abs()).fold(FormalSeries::one(order), |acc, _| acc.mul(&base))
        }
        Expr::Shift(..) => return invalid("S{...} and d{...} are operators, not series"),
        _ => FormalSeries::from_poly(&Poly::constant(eval_rational(e, env)?), order),
    })
}

/// A differential operator in `z`, `D = d/dz` and `theta = z D`.
/// Juxtaposition and `*` compose in the given order.
pub fn diff_op(text: &str, env: &Env) -> Result<DiffOp> {
    diff_op_of(&parse_spec(text)?, env)
}

fn diff_op_of(e: &Expr, env: &Env) -> Result<DiffOp> {
    let rec = |x: &Expr| diff_op_of(x, env);
    Ok(match e {
        Expr::Var(v) if v == "z" => DiffOp::z(),
        Expr::Var(v) if v == "D" => DiffOp::d(),
        Expr::Var(v) if v == "theta" => DiffOp::theta(),
        Expr::Neg(a) => -&rec(a)?,
        Expr::Add(a, b) => &rec(a)? + &rec(b)?,
        Expr::Sub(a, b) => &rec(a)? - &rec(b)?,
        Expr::Mul(a, b) => &rec(a)? * &rec(b)?,
        Expr::Div(a, b) => {
            let d = eval_rational(b, env).map_err(|_| EvalError::Invalid("operators may only be divided by nonzero constants".into()))?;
            if d.is_zero() {
                return invalid("division by zero");
            }
            rec(a)?.scale(&d.recip())
        }
        Expr::Pow(a, k) => {
            if *k < 0 {
                return invalid("negative powers of operators are not defined");
            }
            rec(a)?.pow(*k as usize)
        }
        Expr::Shift(..) => return invalid("S{...} and d{...} belong to q-difference operators"),
        Expr::Call(Func::Sum, _) => return invalid("sum(...) is a series, not an operator"),
        _ => DiffOp::constant(eval_rational(e, env)?),
    })
}

/// `sum_i c_i(z) sigma_q^i` with composition `(a sigma^i)(b sigma^j) = a b(q^i z) sigma^(i+j)`.
#[derive(Debug, Clone)]
struct QTerms(BTreeMap<i64, RationalFunction>);

impl QTerms {
    fn scalar(c: RationalFunction) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(0, c);
        }
        QTerms(m)
    }

    fn as_scalar(&self) -> Option<RationalFunction> {
        match self.0.len() {
            0 => Some(RationalFunction::constant(Rational::zero())),
            1 => self.0.get(&0).cloned(),
            _ => None,
        }
    }

    fn add(mut self, o: &QTerms) -> QTerms {
        for (i, c) in &o.0 {
            let next = self.0.remove(i).map_or_else(|| c.clone(), |cur| cur.add(c));
            if !next.is_zero() {
                self.0.insert(*i, next);
            }
        }
        self
    }

    fn neg(&self) -> QTerms {
        QTerms(self.0.iter().map(|(i, c)| (*i, c.neg())).collect())
    }

    fn compose(&self, o: &QTerms, q: &Rational) -> QTerms {
        let mut acc = QTerms(BTreeMap::new());
        for (i, a) in &self.0 {
            let qi = pow(q, *i);
            for (j, b) in &o.0 {
                acc = acc.add(&QTerms([(i + j, a.mul(&b.sigma(&qi)))].into_iter().collect()));
            }
        }
        acc
    }
}

/// A q-difference operator; `S{r}` is `sigma_r` and `d{r}` is
/// `(sigma_r - 1) / ((r - 1) z)`, with `r` equal to `q` or `1/q`.
pub fn q_op(text: &str, env: &Env, ctx: &QContext) -> Result<QDiffOp> {
    let terms = q_terms(&parse_spec(text)?, &with_q(env, ctx), ctx)?;
    let mut op = QDiffOp::new(ctx);
    for (i, c) in terms.0 {
        op = op.with_term(c, ctx.q(), i)?;
    }
    Ok(op)
}

/// A rational function of `z`, for right-hand sides.
pub fn rational_function(text: &str, env: &Env, ctx: &QContext) -> Result<RationalFunction> {
    q_terms(&parse_spec(text)?, &with_q(env, ctx), ctx)?.as_scalar().ok_or_else(|| EvalError::Invalid("expected a rational function of z".into()))
}

fn with_q(env: &Env, ctx: &QContext) -> Env {
    let mut env = env.clone();
    env.entry("q".into()).or_insert_with(|| ctx.q().clone());
    env
}

fn q_terms(e: &Expr, env: &Env, ctx: &QContext) -> Result<QTerms> {
    let q = ctx.q();
    let rec = |x: &Expr| q_terms(x, env, ctx);
    Ok(match e {
        Expr::Var(v) if v == "z" => QTerms::scalar(RationalFunction::from_poly(Poly::x())),
        Expr::Shift(kind, r) => {
            let r = eval_rational(r, env)?;
            let i = if r == *q {
                1
            } else if r == q.recip() {
                -1
            } else {
                return invalid(format!("shift ratio {r} is neither q nor 1/q"));
            };
            let sigma = QTerms([(i, RationalFunction::constant(Rational::one()))].into_iter().collect());
            match kind {
                ShiftKind::Sigma => sigma,
                ShiftKind::Delta => {
                    let inv = RationalFunction::new(Poly::constant((r - Rational::one()).recip()), Poly::x())?;
                    let minus_one = QTerms::scalar(RationalFunction::constant(-Rational::one()));
                    QTerms::scalar(inv).compose(&sigma.add(&minus_one), q)
                }
            }
        }
        Expr::Neg(a) => rec(a)?.neg(),
        Expr::Add(a, b) => rec(a)?.add(&rec(b)?),
        Expr::Sub(a, b) => rec(a)?.add(&rec(b)?.neg()),
        Expr::Mul(a, b) => rec(a)?.compose(&rec(b)?, q),
        Expr::Div(a, b) => {
            let d = rec(b)?.as_scalar().ok_or_else(|| EvalError::Invalid("cannot divide by an operator".into()))?;
            let inv = RationalFunction::constant(Rational::one()).div(&d)?;
            QTerms::scalar(inv).compose(&rec(a)?, q)
        }
        Expr::Pow(a, k) => {
            let base = rec(a)?;
            let base = if *k < 0 {
                let s = base.as_scalar().ok_or_else(|| EvalError::Invalid("negative powers of operators are not defined".into()))?;
                QTerms::scalar(RationalFunction::constant(Rational::one()).div(&s)?)
            } else {
                base
            };
            let one = QTerms::scalar(RationalFunction::constant(Rational::one()));
            (0..k.unsigned_abs()).fold(one, |acc, _| acc.compose(&base, q))
        }
        Expr::Call(Func::Sum, _) => return invalid("sum(...) is a series, not an operator"),
        _ => QTerms::scalar(RationalFunction::constant(eval_rational(e, env)?)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gevrey_core::arith::{int, rat};
    use gevrey_core::q::{qdiff_newton_polygon, sharp_division_operator};

    #[test]
    fn constants() {
        assert_eq!(parse_rational("1/2 - 3").unwrap(), rat(-5, 2));
        assert_eq!(parse_rational("2^-3").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("5!").unwrap(), int(120));
        assert!(matches!(parse_rational("1/0"), Err(EvalError::Invalid(_))));
        assert!(matches!(parse_rational("x"), Err(EvalError::UnknownSymbol(_))));
        let env: Env = [("q".to_string(), int(2))].into_iter().collect();
        assert_eq!(eval_rational(&parse_spec("qfact(3)").unwrap(), &env).unwrap(), int(21));
    }

    #[test]
    fn terms_become_factorial_specs() {
        let env = Env::new();
        assert_eq!(term_spec("n * n!", &env).unwrap(), FactorialSeriesSpec::new(Poly::x()));
        let s = term_spec("n^5 * (n+1)!", &env).unwrap();
        assert_eq!(s, FactorialSeriesSpec::shifted_factorial(Poly::monomial(int(1), 5), 1));
        let s = term_spec("(n!)^2 / 3 + n (n!)^2", &env).unwrap();
        assert_eq!(s, FactorialSeriesSpec::new(Poly::new(vec![rat(1, 3), int(1)])).with_weight(2));
        assert!(term_spec("n! + 1", &env).is_err());
        assert!(term_spec("(2n)!", &env).is_err());
        assert!(term_spec("1 / n", &env).is_err());
    }

    #[test]
    fn series_literals() {
        let env = Env::new();
        let f = series("1/(1 - z)", &env, 5).unwrap();
        assert_eq!(f, FormalSeries::from_fn(5, |_| int(1)));
        let g = series("sum(n * n!)", &env, 4).unwrap();
        assert_eq!(g.coeffs(), &[int(0), int(1), int(4), int(18), int(96)]);
        assert_eq!(series("(1 - z)^-2", &env, 3).unwrap().coeffs(), &[int(1), int(2), int(3), int(4)]);
    }

    #[test]
    fn operators_compose_in_order() {
        let env = Env::new();
        let a = diff_op("D z", &env).unwrap();
        assert_eq!(a, &(&DiffOp::z() * &DiffOp::d()) + &DiffOp::one());
        assert_eq!(diff_op("z^2 D + z - 1", &env).unwrap(), diff_op("z*z*D + z - 1", &env).unwrap());
        assert_eq!(diff_op("theta", &env).unwrap(), &DiffOp::z() * &DiffOp::d());
        assert_eq!(diff_op("D/2", &env).unwrap(), DiffOp::monomial(rat(1, 2), 0, 1));
        assert!(diff_op("D/z", &env).is_err());
    }

    #[test]
    fn q_operators() {
        let ctx = QContext::new(int(2)).unwrap();
        let env: Env = [("xi".to_string(), int(3))].into_iter().collect();
        let op = q_op("(1/(q*z))*S{1/q} - xi", &env, &ctx).unwrap();
        assert_eq!(op, sharp_division_operator(&int(3), &ctx));
        // d{q} = (sigma_q - 1) / ((q - 1) z), and sigma_q z = q z sigma_q
        let d = q_op("d{q}", &env, &ctx).unwrap();
        let inv_z = RationalFunction::new(Poly::one(), Poly::x()).unwrap();
        assert_eq!(d, QDiffOp::new(&ctx).with_term(inv_z.clone(), &int(2), 1).unwrap().with_term(inv_z.neg(), &int(2), 0).unwrap());
        let sz = q_op("S{q} z", &env, &ctx).unwrap();
        assert_eq!(sz, QDiffOp::new(&ctx).with_term(RationalFunction::from_poly(Poly::from_ints(&[0, 2])), &int(2), 1).unwrap());
        assert!(q_op("S{3}", &env, &ctx).is_err());
        let rhs = rational_function("1/(z - 1)", &env, &ctx).unwrap();
        let slopes = qdiff_newton_polygon(&op.homogenize(&rhs)).unwrap().slopes();
        assert_eq!(slopes, vec![int(0), int(1)]);
    }
}
