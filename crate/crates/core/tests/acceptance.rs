//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::time::Instant;

use gevrey_core::arith::{int, pow, primes_up_to, q_factorial_valuations, rat, val_rat};
use gevrey_core::guess::{guess_operator, hermite_pade, GuessConfig};
use gevrey_core::padic_sum::{example33_pipeline, example33_series, telescope_decompose, verify_universal, EXAMPLE33_TRUNC};
use gevrey_core::q::{
    combination_series, lemma454_apply, lemma454_solve, q_divide_transform, q_laplace, q_special_series, qdiff_newton_polygon,
    sharp_division_operator, theta_bilateral_check, transform_partial_fraction, transform_relation, Lemma454Outcome,
};
use gevrey_core::series::{borel_normalize, divide_linear};
use gevrey_core::weyl::{apply_op, borel_transfer, newton_polygon};
use gevrey_core::{
    FactorialSeriesSpec, FormalSeries, GevreyOrder, GevreySeries, Location, Poly, QContext, QDiffOp, QKind, QLaurentSeries, QMode,
    Rational, RationalFunction, Verdict,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_rational(r: &mut ChaCha8Rng) -> Rational {
    rat(r.gen_range(-20..=20), r.gen_range(1..=9))
}

fn random_nonzero(r: &mut ChaCha8Rng) -> Rational {
    loop {
        let x = random_rational(r);
        if !x.is_zero() {
            return x;
        }
    }
}

fn random_series(r: &mut ChaCha8Rng, order: usize) -> FormalSeries {
    FormalSeries::from_fn(order, |_| random_rational(r))
}

/// Partial sums of `sum P(n) (n + shift)!` modulo `p^k` until they stop changing
/// over a window of 50 further terms.
fn stabilized_residue(p_coeffs: &[i64], shift: u64, prime: u64, k: usize) -> BigInt {
    let m = num_traits::pow(BigInt::from(prime), k);
    let mut fact = BigInt::one();
    for i in 1..=shift {
        fact *= i;
    }
    let mut s = BigInt::zero();
    let mut last_change = 0u64;
    let mut n = 0u64;
    loop {
        let pn: BigInt = p_coeffs.iter().rev().fold(BigInt::zero(), |acc, &c| acc * n + c);
        let next = (&s + pn * &fact).mod_floor(&m);
        if next != s {
            last_change = n;
        }
        s = next;
        n += 1;
        fact = (fact * (n + shift)).mod_floor(&m);
        if n > last_change + 50 && fact.is_zero() {
            return s;
        }
    }
}

fn c1_padic_identities() -> Outcome {
    let primes = primes_up_to(97);
    let spec = FactorialSeriesSpec::new(Poly::x());
    let report = verify_universal(&spec, &primes, 50).map_err(|e| e.to_string())?;
    check(report.all_agree() && report.entries.len() == primes.len(), "sum n n! is not -1 at every prime <= 97 mod p^50")?;
    check(report.entries.iter().all(|e| e.value.congruent_to(&int(-1))), "residue differs from -1")?;
    let t = telescope_decompose(&Poly::x());
    check(t.q == Poly::one() && t.c.is_zero() && t.universal_value == Some(int(-1)), "telescope of n is not (1, 0, -1)")?;

    // n^5 (n+1)! = n^5 (n+1) n!
    let p = &Poly::monomial(int(1), 5) * &Poly::from_ints(&[1, 1]);
    let t = telescope_decompose(&p);
    check(t.c.is_zero(), "n^5 (n+1) does not telescope")?;
    let u = t.universal_value.clone().ok_or("no universal value")?;
    for prime in [2u64, 3, 5, 7, 11] {
        let m = num_traits::pow(BigInt::from(prime), 40);
        let r = stabilized_residue(&[0, 0, 0, 0, 0, 1], 1, prime, 40);
        check(u.is_integer() && (r - u.to_integer()).mod_floor(&m).is_zero(), format!("oracle and telescope disagree at p = {prime}"))?;
    }
    check(u == int(26), format!("universal value {u}, printed 26"))?;
    Ok(format!("{} primes agree on -1 mod p^50; oracle = telescope = 26 mod p^40", primes.len()))
}

fn c2_laplace_dictionary() -> Outcome {
    let mut r = rng(2);
    let a = gevrey_core::DiffOp::from_terms([((2, 1), int(1)), ((1, 0), int(1)), ((0, 0), int(-1))]);
    for case in 0..100 {
        let g = random_series(&mut r, 101);
        let gg = GevreySeries::from_normalized(g.clone(), GevreyOrder::integer(-1));
        let big_f = gg.raw().mul_poly(&Poly::from_ints(&[-1, 1]));
        let f = borel_normalize(&GevreySeries::from_raw(&big_f, GevreyOrder::integer(-1)));
        let lhs = apply_op(&a, &g).map_err(|e| e.to_string())?;
        check(lhs.order() >= 100 && lhs.truncate(100) == f.truncate(100), format!("case {case}"))?;
    }
    Ok("100 random cases to order 100".into())
}

fn c3_division() -> Outcome {
    let mut r = rng(3);
    for s in [GevreyOrder::integer(-1), GevreyOrder::new(1, 2)] {
        for case in 0..100 {
            let f = GevreySeries::from_normalized(random_series(&mut r, 99), s);
            let xi = random_nonzero(&mut r);
            let fast = divide_linear(&f, &xi).map_err(|e| e.to_string())?;
            let den = FormalSeries::from_poly(&Poly::new(vec![-xi.clone(), int(1)]), 99);
            let raw = f.raw().div(&den).map_err(|e| e.to_string())?;
            check(fast.normalized() == &borel_normalize(&GevreySeries::from_raw(&raw, s)), format!("s = {s}, case {case}"))?;
        }
    }
    Ok("100 cases each for s = -1 and s = 1/2, 100 coefficients".into())
}

fn c4_borel_transfer() -> Outcome {
    let a = gevrey_core::DiffOp::from_terms([((0, 1), int(1)), ((0, 0), int(-1))]);
    let t = borel_transfer(&a, -1).map_err(|e| e.to_string())?;
    let ones = FormalSeries::from_fn(110, |_| int(1));
    let out = apply_op(&t, &ones).map_err(|e| e.to_string())?;
    check(out.order() >= 100 && out.truncate(100).is_zero(), "transfer does not kill the all-ones series")?;
    let back = borel_transfer(&t, 1).map_err(|e| e.to_string())?;
    // identical action: a scalar multiple of the original operator
    let c = back.coeff(0, 1) / a.coeff(0, 1);
    check(!c.is_zero() && back == a.scale(&c), format!("double transfer gave {back}"))?;
    let mut r = rng(4);
    for _ in 0..20 {
        let f = random_series(&mut r, 60);
        check(apply_op(&back, &f).unwrap() == apply_op(&a, &f).unwrap().scale(&c), "actions differ")?;
    }
    Ok(format!("transfer {t} kills 1/(1-z) to order 100; double transfer {back}"))
}

fn c5_example33() -> Outcome {
    let report = example33_pipeline(EXAMPLE33_TRUNC).map_err(|e| e.to_string())?;
    check(report.operator.order() == Some(2), "operator order is not 2")?;
    let f = example33_series(EXAMPLE33_TRUNC);
    check(apply_op(&report.operator, &f).unwrap().is_zero(), "operator does not annihilate f")?;
    check(report.verdict() == Verdict::Pass && report.check.dimension == Some(2), format!("verdict {} dimension {:?}", report.verdict(), report.check.dimension))?;
    // the same bounds in the z^i D^j basis admit no operator
    let d_basis = guess_operator(&f, &GuessConfig::new(2, 3, EXAMPLE33_TRUNC, 40)).map_err(|e| e.to_string())?;
    let note = if d_basis.is_none() { "; none exists in z^i D^j at degree 3" } else { "" };
    Ok(format!("theta-basis order 2 degree 3 annihilator, xi = 1 trivial with dimension 2{note}"))
}

fn c6_hermite_pade() -> Outcome {
    let mut r = rng(6);
    for case in 0..50 {
        let m = r.gen_range(2..=3usize);
        let d = r.gen_range(1..=5usize);
        let n = r.gen_range(1..(d + 1) * m);
        let xi = int(r.gen_range(-3..=3));
        let z: Vec<FormalSeries> = (0..m).map(|_| random_series(&mut r, n + 5)).collect();
        let polys = hermite_pade(&z, &xi, n, d).map_err(|e| e.to_string())?.ok_or(format!("case {case}: no approximant"))?;
        check(polys.iter().any(|p| !p.is_zero()), format!("case {case}: all zero"))?;
        check(polys.iter().all(|p| p.degree().map_or(true, |k| k <= d)), format!("case {case}: degree"))?;
        // expand each P_h at xi and multiply out
        let order = n + 5;
        let res = z.iter().zip(&polys).fold(FormalSeries::zero(order), |acc, (zh, p)| acc.add(&FormalSeries::from_poly(&p.shift(&xi), order).mul(zh)));
        check(res.coeffs()[..n].iter().all(Zero::is_zero), format!("case {case}: residual order < {n}"))?;
    }
    Ok("50 random instances satisfy ord >= N and deg <= D".into())
}

fn c7_q_transforms() -> Outcome {
    let pole = QLaurentSeries::from_fn(199, |_| int(1));
    for q in [int(2), int(3), rat(5, 2)] {
        let ctx = QContext::new(q.clone()).unwrap();
        check(q_laplace(&q_special_series(QKind::Tq, &ctx, 199), QMode::Sharp, &ctx) == pole, format!("T_q^# at q = {q}"))?;
        check(q_laplace(&q_special_series(QKind::Eq, &ctx, 199), QMode::Plus, &ctx) == pole, format!("E_q^+ at q = {q}"))?;
    }
    let mut r = rng(7);
    let qs = [int(2), int(3), rat(5, 2), rat(1, 3)];
    for case in 0..100 {
        let ctx = QContext::new(qs[case % qs.len()].clone()).unwrap();
        let qi = ctx.inverse().q().clone();
        let f = random_series(&mut r, 150);
        let zf = f.mul_z_pow(1).truncate(150);
        let sharp = q_laplace(&f, QMode::Sharp, &ctx).sigma(&qi).div_z().scale(&qi);
        check(q_laplace(&zf, QMode::Sharp, &ctx) == sharp.truncate(150), format!("(zF)^# case {case}"))?;
        let plus = q_laplace(&f, QMode::Plus, &ctx).delta(&qi).unwrap().scale(&-&qi);
        check(q_laplace(&zf, QMode::Plus, &ctx) == plus.truncate(150), format!("(zF)^+ case {case}"))?;
    }
    Ok("T_q^#, E_q^+ = 1/(z-1) to 200 terms; both identities on 100 series to order 150".into())
}

fn c8_q_division() -> Outcome {
    let mut r = rng(8);
    for case in 0..12 {
        let ctx = QContext::new([int(2), rat(-3, 2), rat(1, 3)][case % 3].clone()).unwrap();
        let m = r.gen_range(1..=3usize);
        let mut alphas: Vec<Rational> = Vec::new();
        while alphas.len() < m {
            let a = random_nonzero(&mut r);
            if !alphas.contains(&a) {
                alphas.push(a);
            }
        }
        let betas: Vec<Rational> = (0..=m).map(|_| random_rational(&mut r)).collect();
        let xi = random_nonzero(&mut r);
        let target = QLaurentSeries::from_rational_function(&transform_partial_fraction(&betas, &alphas), 120).map_err(|e| e.to_string())?;
        for mode in [QMode::Sharp, QMode::Plus] {
            let h = q_divide_transform(&betas, &alphas, &xi, &ctx, mode, 120).map_err(|e| e.to_string())?;
            let lhs = transform_relation(&h, &xi, &ctx, mode).map_err(|e| e.to_string())?;
            check(lhs.truncate(120) == target, format!("relation, case {case}, {mode:?}"))?;
        }
        let f = combination_series(&betas, &alphas, &ctx, QMode::Plus, 120);
        let g = divide_linear(&GevreySeries::from_normalized(f, GevreyOrder::integer(0)), &xi).map_err(|e| e.to_string())?;
        let h = q_divide_transform(&betas, &alphas, &xi, &ctx, QMode::Plus, 120).unwrap();
        check(q_laplace(g.normalized(), QMode::Plus, &ctx) == h, format!("plus oracle, case {case}"))?;
    }
    Ok("12 random instances: relation to order 120 in both modes, plus mode equals series division".into())
}

fn c9_newton_polygons() -> Outcome {
    let ctx = QContext::new(int(2)).unwrap();
    let q = ctx.q().clone();
    // G^# for F = T_q solves L y = 1/(z - 1); its homogenization has order 2
    let l = sharp_division_operator(&int(1), &ctx);
    let rhs = RationalFunction::new(Poly::one(), Poly::from_ints(&[-1, 1])).unwrap();
    let slopes = qdiff_newton_polygon(&l.homogenize(&rhs)).unwrap().slopes();
    check(slopes == vec![int(0), int(1)], format!("G^# slopes {slopes:?}"))?;
    let plain = QDiffOp::new(&ctx)
        .with_term(RationalFunction::constant(int(1)), &q, 1)
        .and_then(|o| o.with_term(RationalFunction::constant(int(-1)), &q, 0))
        .unwrap();
    check(qdiff_newton_polygon(&plain).unwrap().slopes() == vec![int(0)], "sigma_q - 1")?;
    let a = gevrey_core::DiffOp::from_terms([((2, 1), int(1)), ((1, 0), int(1)), ((0, 0), int(-1))]);
    let np = newton_polygon(&a, Location::Zero).unwrap();
    check(!np.is_regular(), "z^2 D + z - 1 reported regular at 0")?;
    Ok("{0,1} for the G^# equation, {0} for sigma_q - 1, z^2 D + z - 1 irregular at 0".into())
}

fn c10_q_factorial_valuation() -> Outcome {
    let mut checked = 0;
    for q in [2i64, 3, 10] {
        let ctx = QContext::new(int(q)).unwrap();
        for p in [2u64, 3, 5, 7, 11, 13] {
            if (q * (q - 1)) % p as i64 == 0 {
                continue;
            }
            let vals = q_factorial_valuations(2000, &ctx, p).map_err(|e| e.to_string())?;
            for (n, v) in vals.iter().enumerate() {
                check(*v >= (n as i64) / (p as i64 - 1), format!("q = {q}, p = {p}, n = {n}"))?;
            }
            for n in [0usize, 1, 7, 40, 120] {
                check(val_rat(&ctx.q_factorial(n as u64), p) == Some(vals[n]), format!("valuation mismatch q = {q}, p = {p}, n = {n}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (q, p) pairs, n <= 2000"))
}

fn c11_lemma454() -> Outcome {
    let ctx = QContext::new(int(2)).unwrap();
    let (m_lo, n_hi) = (4usize, 3usize);
    let one = Rational::one();
    // alpha xi (1 - q) = q^m  <=>  alpha xi = -2^m; planted at five grid points
    let alphas: Vec<Rational> = (1..=20).map(|k| rat(k, 1 + k % 3)).collect();
    let mut xis: Vec<Rational> = (1..=15).map(|k| rat(k - 8, 1 + (k % 4))).filter(|x| !x.is_zero()).collect();
    let planted = [(0usize, 1i64), (3, 2), (7, 3), (11, 4), (16, 1)];
    for &(i, m) in &planted {
        xis.push(-pow(&int(2), m) / &alphas[i]);
    }
    xis.truncate(20);
    while xis.len() < 20 {
        xis.push(rat(xis.len() as i64, 7));
    }
    let (mut solvable, mut total) = (0, 0);
    for a in &alphas {
        for x in &xis {
            let lam = a * x * (&one - ctx.q());
            let closed = (1..=m_lo as i64).any(|m| lam == pow(ctx.q(), m));
            let out = lemma454_solve(a, x, &ctx, m_lo, n_hi).map_err(|e| e.to_string())?;
            total += 1;
            match out {
                Lemma454Outcome::Solvable { gamma, .. } => {
                    check(closed, format!("solved but closed form says no: alpha = {a}, xi = {x}"))?;
                    let image = lemma454_apply(a, x, &ctx, m_lo, &gamma).unwrap();
                    check(image == RationalFunction::new(Poly::one(), Poly::linear_root(a)).unwrap(), "re-substitution")?;
                    solvable += 1;
                }
                _ => check(!closed, format!("closed form solvable but none found: alpha = {a}, xi = {x}"))?,
            }
        }
    }
    check(solvable >= planted.len(), "planted cases missing")?;
    Ok(format!("{total} grid points, {solvable} solvable, all re-substituted"))
}

fn c12_theta() -> Outcome {
    let bound = pow(&rat(1, 2), 100);
    for (c, xi) in [(rat(1, 2), int(1)), (rat(1, 3), rat(2, 5)), (rat(1, 5), int(3))] {
        let r = theta_bilateral_check(&c, &xi, 40).map_err(|e| e.to_string())?;
        check(r.gap < bound, format!("gap not below 2^-100 at c = {c}, xi = {xi}"))?;
        check(r.verdict == Verdict::Pass, format!("verdict {} at c = {c}, xi = {xi}", r.verdict))?;
    }
    Ok("gap < 2^-100 at N = 40 for all three pairs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("p-adic identities", c1_padic_identities),
        ("Laplace dictionary", c2_laplace_dictionary),
        ("division recurrences", c3_division),
        ("Borel transfer", c4_borel_transfer),
        ("example pipeline", c5_example33),
        ("Hermite-Pade", c6_hermite_pade),
        ("q-transforms", c7_q_transforms),
        ("q-division", c8_q_division),
        ("Newton polygons", c9_newton_polygons),
        ("q-factorial valuation", c10_q_factorial_valuation),
        ("q-difference partial fractions", c11_lemma454),
        ("theta bilateral identity", c12_theta),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
