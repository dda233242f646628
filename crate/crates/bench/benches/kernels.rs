use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use siegel_bench::{params, psi_chi, sample_points};
use siegel_core::approx::{gram_matrix, synthetic_lattice};
use siegel_core::lfunc::LEvaluator;
use siegel_core::weights::WeightPair;
use siegel_core::zeros::{auto_step, scan_zero_set};

fn l_eval(c: &mut Criterion) {
    let mut g = c.benchmark_group("l_eval");
    let pts = sample_points(16);
    for q in [7u64, 31, 97] {
        let (psi, _) = psi_chi(q).unwrap();
        let ev = LEvaluator::new(psi);
        g.bench_with_input(BenchmarkId::from_parameter(q), &pts, |b, pts| {
            b.iter(|| pts.iter().map(|&s| ev.eval(black_box(s)).unwrap()).sum::<num_complex::Complex64>())
        });
    }
    g.finish();
}

fn zero_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("zero_scan");
    g.sample_size(10);
    let p = params(20.0, 10.0).unwrap();
    for q in [7u64, 13] {
        let (psi, chi) = psi_chi(q).unwrap();
        g.bench_function(BenchmarkId::from_parameter(q), |b| {
            b.iter(|| scan_zero_set(&psi, &chi, (0.0, 10.0), auto_step(Some(p.alpha))).unwrap())
        });
    }
    g.finish();
}

fn gram(c: &mut Criterion) {
    let mut g = c.benchmark_group("gram_matrix");
    let p = params(20.0, 10.0).unwrap();
    let w = WeightPair::new(p.delta, p.d);
    for l0 in [1i64, 3, 6] {
        let th = synthetic_lattice(p.alpha, l0);
        g.bench_with_input(BenchmarkId::from_parameter(th.len()), &th, |b, th| {
            b.iter(|| gram_matrix(black_box(th), p.log_q(), &w).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, l_eval, zero_scan, gram);
criterion_main!(benches);
