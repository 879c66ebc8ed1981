use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gevrey_bench::{dense_series, sample_rates};
use gevrey_core::arith::{int, rat};
use gevrey_core::guess::guess_operator;
use gevrey_core::padic_sum::{example33_series, padic_sum};
use gevrey_core::q::{q_divide_transform, theta_bilateral_check};
use gevrey_core::series::divide_linear;
use gevrey_core::weyl::{apply_op, borel_transfer, weyl_multiply};
use gevrey_core::{DiffOp, FactorialSeriesSpec, GevreyOrder, GevreySeries, GuessConfig, OperatorBasis, Poly, QContext, QMode};

fn padic(c: &mut Criterion) {
    let spec = FactorialSeriesSpec::shifted_factorial(Poly::monomial(int(1), 5), 1);
    let mut g = c.benchmark_group("padic_sum");
    for p in [2u64, 11, 97] {
        g.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| b.iter(|| padic_sum(black_box(&spec), p, 50).unwrap()));
    }
    g.finish();
}

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("divide_linear");
    for order in [100usize, 400] {
        let f = GevreySeries::from_normalized(dense_series(order), GevreyOrder::new(1, 2));
        g.bench_with_input(BenchmarkId::from_parameter(order), &f, |b, f| b.iter(|| divide_linear(black_box(f), &rat(3, 2)).unwrap()));
    }
    g.finish();
}

fn weyl(c: &mut Criterion) {
    let a = &(&DiffOp::monomial(int(1), 3, 2) + &DiffOp::monomial(rat(-2, 3), 1, 1)) + &DiffOp::constant(int(5));
    let b = a.pow(3);
    c.bench_function("weyl_multiply", |bch| bch.iter(|| weyl_multiply(black_box(&a), black_box(&b))));
    c.bench_function("borel_transfer", |bch| bch.iter(|| borel_transfer(black_box(&b), -1).unwrap()));
    let f = dense_series(200);
    c.bench_function("apply_op", |bch| bch.iter(|| apply_op(black_box(&b), black_box(&f)).unwrap()));
}

fn guessing(c: &mut Criterion) {
    let f = example33_series(110);
    let cfg = GuessConfig::new(2, 3, 110, 20).with_basis(OperatorBasis::Theta);
    let mut g = c.benchmark_group("guess");
    g.sample_size(10);
    g.bench_function("theta_2x3", |b| b.iter(|| guess_operator(black_box(&f), &cfg).unwrap()));
    g.finish();
}

fn q_analogues(c: &mut Criterion) {
    let ctx = QContext::new(int(2)).unwrap();
    let (betas, alphas) = sample_rates(3);
    for mode in [QMode::Sharp, QMode::Plus] {
        c.bench_function(&format!("q_divide_{mode:?}").to_lowercase(), |b| {
            b.iter(|| q_divide_transform(&betas, &alphas, &rat(5, 3), &ctx, mode, 120).unwrap())
        });
    }
    c.bench_function("theta_check", |b| b.iter(|| theta_bilateral_check(&rat(1, 2), &int(3), black_box(40)).unwrap()));
}

criterion_group!(benches, padic, series, weyl, guessing, q_analogues);
criterion_main!(benches);
