//! Subcommands. Each prints one JSON document on stdout.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gevrey_core::guess::{guess_operator, hermite_pade, hermite_pade_residual, rational_reconstruct};
use gevrey_core::padic_sum::{example33_on, example33_series, padic_sum, telescope_decompose, EXAMPLE33_TRUNC};
use gevrey_core::q::{
    lemma454_apply, lemma454_solve, q_divide_transform, q_gevrey_profile, q_laplace, q_special_series, qdiff_newton_polygon,
    theta_bilateral_check, transform_partial_fraction, transform_relation, Lemma454Outcome, EQ_PRODUCT_EXPLICIT,
};
use gevrey_core::series::{arith_profile, padic_radius_estimate, ArithProfile};
use gevrey_core::weyl::{borel_transfer, indicial_polynomial, newton_polygon, singular_points};
use gevrey_core::{
    Error as CoreError, GevreyOrder, GevreySeries, GrowthVerdict, Location, NewtonPolygon, OperatorBasis, Poly, QContext, QKind,
    QDiffOp, QLaurentSeries, QMode, Rational, RationalFunction, Verdict,
};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::eval::{self, Env, EvalError};
use crate::lang::parse_spec;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
}

impl From<crate::lang::ParseError> for CliError {
    fn from(e: crate::lang::ParseError) -> Self {
        CliError::Eval(e.into())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// A check ran and did not pass, or the requested object does not exist
    /// within the given bounds.
    Fail,
}

impl Status {
    fn from_verdict(v: Verdict) -> Self {
        if v == Verdict::Pass {
            Status::Success
        } else {
            Status::Fail
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Success
        } else {
            Status::Fail
        }
    }
}

pub struct Outcome {
    pub json: Value,
    pub status: Status,
}

fn ok(json: Value) -> Result<Outcome> {
    Ok(Outcome { json, status: Status::Success })
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    eval::parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "gevrey", version, about = "Exact computations with Gevrey series, differential and q-difference operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// p-adic values of sum_n P(n) (n!)^s xi^n, prime by prime.
    SumPadic(SumPadicArgs),
    /// Decompose P(n) = (n+1) Q(n+1) - Q(n) + c for a term P(n) n!.
    Telescope(TermArgs),
    /// Guess a linear differential operator annihilating a series.
    Guess(GuessArgs),
    /// Operator satisfied by the Borel (s = -1) or Laplace (s = 1) image.
    BorelTransfer(BorelArgs),
    /// Rational roots of the leading coefficient.
    Singular(OpArgs),
    /// Indicial polynomial and rational exponents at a point.
    Indicial(IndicialArgs),
    /// Newton polygon at 0 or infinity.
    Newton(NewtonArgs),
    /// Hermite-Pade approximants of a family of series.
    HermitePade(HermitePadeArgs),
    /// Rational function matching a truncated series.
    Reconstruct(ReconstructArgs),
    /// q-analogue checks.
    QCheck {
        #[command(subcommand)]
        check: QCheck,
    },
    /// Growth and denominator profile of the normalized coefficients.
    Profile(ProfileArgs),
    /// Annihilator of 1 + sum n n! z^n and its trivial singularity at 1.
    Example33(Example33Args),
}

#[derive(Debug, Args)]
pub struct TermArgs {
    /// Term generator in n, e.g. "n * n!" or "n^5 * (n+1)!".
    #[arg(long)]
    pub term: String,
}

#[derive(Debug, Args)]
pub struct SumPadicArgs {
    #[arg(long)]
    pub term: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub primes: Vec<u64>,
    /// Absolute precision: the result is exact modulo p^prec.
    #[arg(long, default_value_t = 20)]
    pub prec: i64,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true, default_value = "1")]
    pub xi: Rational,
    /// Worker threads; output order does not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisArg {
    D,
    Theta,
}

#[derive(Debug, Args)]
pub struct GuessArgs {
    #[arg(long)]
    pub series: String,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    /// Highest coefficient used; defaults to the smallest admissible value.
    #[arg(long, env = "GEVREY_DEFAULT_TRUNC")]
    pub trunc: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub margin: usize,
    #[arg(long, value_enum, default_value_t = BasisArg::D)]
    pub basis: BasisArg,
}

#[derive(Debug, Args)]
pub struct OpArgs {
    /// Operator in z, D and theta.
    #[arg(long)]
    pub op: String,
}

#[derive(Debug, Args)]
pub struct BorelArgs {
    #[arg(long)]
    pub op: String,
    /// -1 for Borel, 1 for Laplace.
    #[arg(long, allow_hyphen_values = true)]
    pub s: i64,
}

#[derive(Debug, Args)]
pub struct IndicialArgs {
    #[arg(long)]
    pub op: String,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true, default_value = "0")]
    pub xi: Rational,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AtArg {
    #[value(name = "0")]
    Zero,
    Inf,
}

#[derive(Debug, Args)]
pub struct NewtonArgs {
    #[arg(long)]
    pub op: String,
    #[arg(long, value_enum, default_value_t = AtArg::Zero)]
    pub at: AtArg,
}

#[derive(Debug, Args)]
pub struct HermitePadeArgs {
    /// Repeat once per series; each is read as an expansion in z - xi.
    #[arg(long, required = true)]
    pub series: Vec<String>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true, default_value = "0")]
    pub xi: Rational,
    /// Required order of vanishing at xi.
    #[arg(long)]
    pub order: usize,
    #[arg(long)]
    pub degree: usize,
    #[arg(long, env = "GEVREY_DEFAULT_TRUNC")]
    pub trunc: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub series: String,
    /// Largest numerator and denominator degree tried.
    #[arg(long, default_value_t = 10)]
    pub degree: usize,
    #[arg(long, env = "GEVREY_DEFAULT_TRUNC")]
    pub trunc: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub series: String,
    /// Gevrey order; with --q, the integer q-Gevrey order.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true, default_value = "0")]
    pub s: Rational,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub q: Option<Rational>,
    /// Primes at which to estimate the radius of convergence.
    #[arg(long, value_delimiter = ',')]
    pub primes: Vec<u64>,
    #[arg(long, env = "GEVREY_DEFAULT_TRUNC")]
    pub trunc: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Example33Args {
    #[arg(long, env = "GEVREY_DEFAULT_TRUNC")]
    pub trunc: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Sharp,
    Plus,
}

impl From<ModeArg> for QMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sharp => QMode::Sharp,
            ModeArg::Plus => QMode::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Tq,
    Eq,
    EqProduct,
}

#[derive(Debug, Subcommand)]
pub enum QCheck {
    /// q-Laplace transform of a series.
    Transform(QTransformArgs),
    /// Transform of F / (z - xi) for F = beta_0 + sum beta_j K(alpha_j z).
    Divide(QDivideArgs),
    /// Slopes at infinity of a q-difference operator, after clearing the right-hand side.
    Slopes(QSlopesArgs),
    /// Solve 1/(z - alpha) = ((-1/q) d{1/q} - xi) sum gamma_n / (z - alpha q^n).
    Lemma454(Lemma454Args),
    /// Bilateral theta identity with certified tail bounds.
    Theta(ThetaArgs),
}

#[derive(Debug, Args)]
pub struct QTransformArgs {
    #[arg(long, conflicts_with = "kind", required_unless_present = "kind")]
    pub series: Option<String>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub q: Rational,
    #[arg(long, value_enum, default_value_t = ModeArg::Sharp)]
    pub mode: ModeArg,
    #[arg(long, env = "GEVREY_DEFAULT_TRUNC")]
    pub trunc: Option<usize>,
}

#[derive(Debug, Args)]
pub struct QDivideArgs {
    /// beta_0, ..., beta_m.
    #[arg(long, value_delimiter = ',', value_parser = rational_arg, allow_hyphen_values = true, required = true)]
    pub betas: Vec<Rational>,
    /// alpha_1, ..., alpha_m.
    #[arg(long, value_delimiter = ',', value_parser = rational_arg, allow_hyphen_values = true)]
    pub alphas: Vec<Rational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub xi: Rational,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub q: Rational,
    #[arg(long, value_enum, default_value_t = ModeArg::Sharp)]
    pub mode: ModeArg,
    #[arg(long, env = "GEVREY_DEFAULT_TRUNC")]
    pub trunc: Option<usize>,
}

#[derive(Debug, Args)]
pub struct QSlopesArgs {
    /// q-difference operator in z, S{q}, S{1/q}, d{q}, d{1/q}; may use q and xi.
    #[arg(long)]
    pub op: String,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub q: Rational,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true, default_value = "1")]
    pub xi: Rational,
    /// Right-hand side g of L y = g, a rational function of z; 0 for a homogeneous operator.
    #[arg(long, default_value = "1")]
    pub rhs: String,
}

#[derive(Debug, Args)]
pub struct Lemma454Args {
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub alpha: Rational,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub xi: Rational,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub q: Rational,
    /// Poles alpha q^n run over n = -m..=n.
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ThetaArgs {
    /// Contraction factor, 0 < |c| < 1.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub c: Rational,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub xi: Rational,
    /// Truncation of both sides.
    #[arg(long, default_value_t = 30)]
    pub n: usize,
}

fn r(x: &Rational) -> Value {
    Value::String(x.to_string())
}

fn rs(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(r).collect())
}

fn roots(rs: &[(Rational, usize)], key: &str) -> Value {
    rs.iter().map(|(x, m)| json!({ key: r(x), "multiplicity": m })).collect()
}

/// Integral slopes as JSON integers, others as "num/den".
fn slope(x: &Rational) -> Value {
    match x.is_integer().then(|| x.to_integer().to_i64()).flatten() {
        Some(k) => json!(k),
        None => r(x),
    }
}

fn polygon(p: &NewtonPolygon) -> Value {
    json!({
        "location": p.location.to_string(),
        "segments": p.segments.iter().map(|(s, len)| json!({ "slope": slope(s), "length": len })).collect::<Value>(),
        "slopes": p.slopes().iter().map(slope).collect::<Value>(),
        "regular": p.is_regular(),
    })
}

fn laurent(h: &QLaurentSeries) -> Value {
    json!({ "coefficients": rs(h.coeffs()), "display": h.to_string() })
}

/// `sum c_i sigma_q^i` written back in the input language.
fn q_op_text(op: &QDiffOp, q: &Rational) -> String {
    if op.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = op
        .terms()
        .iter()
        .rev()
        .map(|(i, c)| match i {
            0 => format!("({c})"),
            1 => format!("({c})*S{{{q}}}"),
            -1 => format!("({c})*S{{1/({q})}}"),
            _ if *i > 0 => format!("({c})*S{{{q}}}^{i}"),
            _ => format!("({c})*S{{1/({q})}}^{}", -i),
        })
        .collect();
    parts.join(" + ")
}

fn q_env(q: &Rational) -> Env {
    [("q".to_string(), q.clone())].into_iter().collect()
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::SumPadic(a) => sum_padic(a),
        Command::Telescope(a) => telescope(a),
        Command::Guess(a) => guess(a),
        Command::BorelTransfer(a) => {
            let op = eval::diff_op(&a.op, &Env::new())?;
            let out = borel_transfer(&op, a.s)?;
            ok(json!({ "input": op.to_string(), "s": a.s, "operator": out.to_string() }))
        }
        Command::Singular(a) => {
            let op = eval::diff_op(&a.op, &Env::new())?;
            let sp = singular_points(&op)?;
            ok(json!({
                "operator": op.to_string(),
                "leading": sp.leading.display_in("z"),
                "singular_points": roots(&sp.rational_roots, "point"),
            }))
        }
        Command::Indicial(a) => {
            let op = eval::diff_op(&a.op, &Env::new())?;
            let ind = indicial_polynomial(&op, &a.xi)?;
            ok(json!({
                "operator": op.to_string(),
                "point": r(&ind.point),
                "indicial": ind.poly.display_in("rho"),
                "exponents": roots(&ind.exponents, "exponent"),
                "all_rational": ind.all_rational,
            }))
        }
        Command::Newton(a) => {
            let op = eval::diff_op(&a.op, &Env::new())?;
            let at = match a.at {
                AtArg::Zero => Location::Zero,
                AtArg::Inf => Location::Infinity,
            };
            let mut out = polygon(&newton_polygon(&op, at)?);
            out["operator"] = json!(op.to_string());
            ok(out)
        }
        Command::HermitePade(a) => hermite(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::QCheck { check } => match check {
            QCheck::Transform(a) => q_transform(a),
            QCheck::Divide(a) => q_divide(a),
            QCheck::Slopes(a) => q_slopes(a),
            QCheck::Lemma454(a) => lemma454(a),
            QCheck::Theta(a) => theta(a),
        },
        Command::Profile(a) => profile(a),
        Command::Example33(a) => example33(a),
    }
}

fn sum_padic(a: SumPadicArgs) -> Result<Outcome> {
    let term = parse_spec(&a.term)?;
    let spec = eval::term_spec(&a.term, &Env::new())?.with_xi(a.xi.clone());
    if spec.s == 0 {
        return Err(CliError::Usage("the term must contain a factorial".into()));
    }
    let tele = spec.is_telescoping_family().then(|| telescope_decompose(&spec.poly));
    let universal = tele.as_ref().and_then(|t| t.universal_value.clone());
    let each = |&p: &u64| padic_sum(&spec, p, a.prec);
    let sums = match a.jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build().map_err(|e| CliError::Usage(e.to_string()))?;
            pool.install(|| a.primes.par_iter().map(each).collect::<Vec<_>>())
        }
        None => a.primes.par_iter().map(each).collect(),
    };
    let mut results = Vec::new();
    let mut all_agree = true;
    for (p, sum) in a.primes.iter().zip(sums) {
        let v = sum?.value;
        let agrees = universal.as_ref().map(|u| v.congruent_to(u));
        all_agree &= agrees != Some(false);
        results.push(json!({
            "prime": p,
            "precision": a.prec,
            "valuation": v.valuation(),
            "residue": v.residue().map(|x| x.to_string()),
            "reconstructed": v.rational_reconstruction().as_ref().map(r),
            "universal_value": if agrees == Some(true) { universal.as_ref().map(r) } else { None },
        }));
    }
    let json = json!({
        "term": term.to_string(),
        "s": spec.s,
        "xi": r(&spec.xi),
        "results": results,
        "universal_value": universal.as_ref().map(r),
        "telescope": tele.map(|t| json!({ "q": t.q.display_in("n"), "c": r(&t.c) })),
    });
    Ok(Outcome { json, status: Status::from_bool(all_agree) })
}

fn telescope(a: TermArgs) -> Result<Outcome> {
    let term = parse_spec(&a.term)?;
    let spec = eval::term_spec(&a.term, &Env::new())?;
    if spec.s != 1 {
        return Err(CliError::Usage("telescoping needs a term of the form P(n) n!".into()));
    }
    let t = telescope_decompose(&spec.poly);
    ok(json!({
        "term": term.to_string(),
        "p": spec.poly.display_in("n"),
        "q": t.q.display_in("n"),
        "c": r(&t.c),
        "universal_value": t.universal_value.as_ref().map(r),
    }))
}

fn guess(a: GuessArgs) -> Result<Outcome> {
    let basis = match a.basis {
        BasisArg::D => OperatorBasis::D,
        BasisArg::Theta => OperatorBasis::Theta,
    };
    let mut cfg = gevrey_core::GuessConfig::new(a.order, a.degree, 0, a.margin).with_basis(basis);
    cfg.trunc = a.trunc.unwrap_or_else(|| cfg.required_trunc());
    let f = eval::series(&a.series, &Env::new(), cfg.trunc)?;
    let found = guess_operator(&f, &cfg)?;
    let basis_name = format!("{:?}", a.basis).to_lowercase();
    let json = match &found {
        Some(g) => json!({
            "found": true,
            "basis": basis_name,
            "trunc": cfg.trunc,
            "operator": g.op.to_string(),
            "order": g.order,
            "degree": g.degree,
            "kernel_dim": g.kernel_dim,
            "equations_used": g.equations_used,
            "held_out": g.held_out,
        }),
        None => json!({ "found": false, "basis": basis_name, "trunc": cfg.trunc }),
    };
    Ok(Outcome { json, status: Status::from_bool(found.is_some()) })
}

fn hermite(a: HermitePadeArgs) -> Result<Outcome> {
    let trunc = a.trunc.unwrap_or(a.order);
    let z = a.series.iter().map(|s| eval::series(s, &Env::new(), trunc)).collect::<std::result::Result<Vec<_>, _>>()?;
    let found = hermite_pade(&z, &a.xi, a.order, a.degree)?;
    let json = match &found {
        Some(polys) => {
            let res = hermite_pade_residual(&z, polys, &a.xi);
            json!({
                "found": true,
                "polynomials": polys.iter().map(|p| p.display_in("z")).collect::<Vec<_>>(),
                "residual_valuation": res.valuation(),
            })
        }
        None => json!({ "found": false }),
    };
    Ok(Outcome { json, status: Status::from_bool(found.is_some()) })
}

fn reconstruct(a: ReconstructArgs) -> Result<Outcome> {
    let trunc = a.trunc.unwrap_or(2 * a.degree + 11);
    let f = eval::series(&a.series, &Env::new(), trunc)?;
    let found = rational_reconstruct(&f, a.degree);
    let json = match &found {
        Some(rc) => json!({
            "found": true,
            "function": rc.function.to_string(),
            "partial_fraction": rc.partial_fraction.as_ref().map(|p| p.to_string()),
            "degree": rc.degree,
        }),
        None => json!({ "found": false }),
    };
    Ok(Outcome { json, status: Status::from_bool(found.is_some()) })
}

fn q_transform(a: QTransformArgs) -> Result<Outcome> {
    let ctx = QContext::new(a.q.clone())?;
    let trunc = a.trunc.unwrap_or(20);
    let f = match (&a.series, a.kind) {
        (_, Some(k)) => {
            let kind = match k {
                KindArg::Tq => QKind::Tq,
                KindArg::Eq => QKind::Eq,
                KindArg::EqProduct => QKind::EqProduct,
            };
            q_special_series(kind, &ctx, trunc)
        }
        (Some(s), None) => eval::series(s, &q_env(&a.q), trunc)?,
        (None, None) => return Err(CliError::Usage("give --series or --kind".into())),
    };
    let mut out = laurent(&q_laplace(&f, a.mode.into(), &ctx));
    out["q"] = r(&a.q);
    out["mode"] = json!(format!("{:?}", a.mode).to_lowercase());
    if a.kind == Some(KindArg::EqProduct) {
        out["explicit_factors"] = json!(EQ_PRODUCT_EXPLICIT);
    }
    ok(out)
}

fn q_divide(a: QDivideArgs) -> Result<Outcome> {
    let ctx = QContext::new(a.q.clone())?;
    let order = a.trunc.unwrap_or(20);
    let mode: QMode = a.mode.into();
    let h = q_divide_transform(&a.betas, &a.alphas, &a.xi, &ctx, mode, order)?;
    let lhs = transform_relation(&h, &a.xi, &ctx, mode)?;
    let target = QLaurentSeries::from_rational_function(&transform_partial_fraction(&a.betas, &a.alphas), order)?;
    let holds = lhs.truncate(order) == target;
    let mut out = laurent(&h);
    out["relation_holds"] = json!(holds);
    out["verdict"] = json!(if holds { "PASS" } else { "FAIL" });
    Ok(Outcome { json: out, status: Status::from_bool(holds) })
}

fn q_slopes(a: QSlopesArgs) -> Result<Outcome> {
    let ctx = QContext::new(a.q.clone())?;
    let mut env = q_env(&a.q);
    env.insert("xi".into(), a.xi.clone());
    let op = eval::q_op(&a.op, &env, &ctx)?;
    let rhs = eval::rational_function(&a.rhs, &env, &ctx)?;
    let homogeneous = op.homogenize(&rhs);
    let p = qdiff_newton_polygon(&homogeneous)?;
    let mut out = polygon(&p);
    out["operator"] = json!(q_op_text(&op, &a.q));
    out["homogeneous"] = json!(q_op_text(&homogeneous, &a.q));
    ok(out)
}

fn lemma454(a: Lemma454Args) -> Result<Outcome> {
    let ctx = QContext::new(a.q.clone())?;
    let out = lemma454_solve(&a.alpha, &a.xi, &ctx, a.m, a.n)?;
    Ok(match out {
        Lemma454Outcome::Solvable { gamma, m } => {
            let image = lemma454_apply(&a.alpha, &a.xi, &ctx, a.m, &gamma)?;
            let target = RationalFunction::new(Poly::one(), Poly::linear_root(&a.alpha))?;
            let verified = image == target;
            let json = json!({ "outcome": "solvable", "m": m, "gamma": rs(&gamma), "verified": verified });
            Outcome { json, status: Status::from_bool(verified) }
        }
        Lemma454Outcome::Unsolvable { certificate } => {
            Outcome { json: json!({ "outcome": "unsolvable", "certificate": rs(&certificate) }), status: Status::Success }
        }
        Lemma454Outcome::UnsolvableWithinWindow { required_m, certificate } => Outcome {
            json: json!({ "outcome": "unsolvable_within_window", "required_m": required_m, "certificate": rs(&certificate) }),
            status: Status::Success,
        },
    })
}

fn theta(a: ThetaArgs) -> Result<Outcome> {
    let t = theta_bilateral_check(&a.c, &a.xi, a.n)?;
    let json = json!({
        "c": r(&t.c),
        "xi": r(&t.xi),
        "n": t.n,
        "lhs": r(&t.lhs),
        "t_pos": r(&t.t_pos),
        "t_neg": r(&t.t_neg),
        "gap": r(&t.gap),
        "lhs_tail": t.lhs_tail.as_ref().map(r),
        "rhs_tail": t.rhs_tail.as_ref().map(r),
        "half_bound": t.half_bound.as_ref().map(r),
        "verdict": t.verdict.to_string(),
    });
    Ok(Outcome { json, status: Status::from_verdict(t.verdict) })
}

fn growth(v: GrowthVerdict) -> &'static str {
    match v {
        GrowthVerdict::ConsistentWithG => "consistent",
        GrowthVerdict::NotG => "not_g",
        GrowthVerdict::Inconclusive => "inconclusive",
    }
}

fn profile(a: ProfileArgs) -> Result<Outcome> {
    let trunc = a.trunc.unwrap_or(40);
    let env = a.q.as_ref().map(q_env).unwrap_or_default();
    let raw = eval::series(&a.series, &env, trunc)?;
    let (prof, normalized): (ArithProfile, _) = match &a.q {
        Some(q) => {
            let s = a.s.is_integer().then(|| a.s.to_integer().to_i64()).flatten();
            let s = s.ok_or_else(|| CliError::Usage("the q-Gevrey order must be an integer".into()))?;
            (q_gevrey_profile(&raw, &QContext::new(q.clone())?, s), None)
        }
        None => {
            let g = GevreySeries::from_raw(&raw, GevreyOrder::from_rational(&a.s)?);
            (arith_profile(&g), Some(g.normalized().clone()))
        }
    };
    let radius = a
        .primes
        .iter()
        .map(|&p| {
            let e = padic_radius_estimate(normalized.as_ref().unwrap_or(&raw), p)?;
            Ok(json!({ "prime": p, "raw": r(&e.raw), "log_radius": r(&e.log_radius), "window": [e.window.0, e.window.1] }))
        })
        .collect::<Result<Vec<_>>>()?;
    let entries: Vec<Value> = prof
        .entries
        .iter()
        .map(|e| json!({ "n": e.n, "max_abs": r(&e.max_abs), "denom_lcm": e.denom_lcm.to_string() }))
        .collect();
    ok(json!({ "s": r(&a.s), "q": a.q.as_ref().map(r), "verdict": growth(prof.verdict), "entries": entries, "radius": radius }))
}

fn example33(a: Example33Args) -> Result<Outcome> {
    let trunc = a.trunc.unwrap_or(EXAMPLE33_TRUNC);
    match example33_on(&example33_series(trunc), trunc) {
        Ok(rep) => {
            let json = json!({
                "verdict": rep.verdict().to_string(),
                "operator": rep.operator.to_string(),
                "point": r(&rep.check.point),
                "vanish_order": rep.check.vanish_order,
                "dimension": rep.check.dimension,
                "indicial": rep.check.indicial.poly.display_in("rho"),
                "exponents": roots(&rep.check.indicial.exponents, "exponent"),
            });
            Ok(Outcome { json, status: Status::from_verdict(rep.verdict()) })
        }
        Err(e @ CoreError::GuessFailed { .. }) => Ok(Outcome { json: json!({ "verdict": "FAIL", "reason": e.to_string() }), status: Status::Fail }),
        Err(e) => Err(e.into()),
    }
}

/// Parses `args`, runs the command, prints, and returns the exit code:
/// 0 on success, 1 on a failed check, 2 on usage or input errors.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON values serialize"));
            match out.status {
                Status::Success => 0,
                Status::Fail => 1,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
