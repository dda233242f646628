//! The twelve acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines reach the terminal.
//! The process fails if a criterion fails that is not listed in `KNOWN_RED`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siegel_core::approx::{residual_norm, solve_h_k, synthetic_lattice, ApproxOptions};
use siegel_core::bvp::{self, bvp_check};
use siegel_core::characters::{build_family, enumerate_psi_q, kronecker_character, Character};
use siegel_core::coefficients::{dirichlet_convolve_int, lambda_tables, nu_values, upsilon_values};
use siegel_core::functional::{
    convolve_numeric_at, exp_pair, phi, phi_star, sine_tail, u_pm, u_pm_contour, IntervalFunction, PhiData, XiEngine,
};
use siegel_core::harness::{run_pipeline, RunConfig, MANIFEST};
use siegel_core::lfunc::{delta1, fe_residual, vartheta, varsigma, KernelParams};
use siegel_core::mollifier::{MollifierContext, Sign};
use siegel_core::numeric::arith;
use siegel_core::params::{AnalysisParams, ParamOverrides};
use siegel_core::sieve_means::sieve_check;
use siegel_core::zeros::{auto_step, scan_zero_set};
use std::time::{Duration, Instant};

/// Criteria expected to fail at desk scale; see the project notes.
const KNOWN_RED: &[usize] = &[10];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn params(big_d: f64, big_q: f64, r: Option<f64>) -> AnalysisParams {
    AnalysisParams::new(big_d, big_q, &ParamOverrides { r, ..Default::default() }).unwrap()
}

/// Random (ψ, χ) pairs with ψ ∈ Ψ_q, q ≤ 100.
fn random_characters(rng: &mut ChaCha8Rng, count: usize) -> Vec<(Character, Character)> {
    let chis: Vec<Character> = [-4i64, 5, -8, 8, -3].iter().map(|&d| kronecker_character(d).unwrap()).collect();
    let moduli: Vec<u64> = (5..=100).filter(|&q| q % 2 == 1 && arith::is_squarefree(q)).collect();
    let mut out = Vec::new();
    while out.len() < count {
        let chi = &chis[rng.gen_range(0..chis.len())];
        let q = moduli[rng.gen_range(0..moduli.len())];
        let Ok(members) = enumerate_psi_q(q, chi) else { continue };
        if members.is_empty() {
            continue;
        }
        out.push((members[rng.gen_range(0..members.len())].clone(), chi.clone()));
    }
    out
}

fn functional_equation() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for (psi, _) in random_characters(&mut rng, 100) {
        let s = c(rng.gen_range(-1.0..2.0), rng.gen_range(-10.0..10.0));
        worst = worst.max(fe_residual(&psi, s).unwrap_or(f64::INFINITY));
    }
    let el = t.elapsed();
    outcome(worst < 1e-9 && el < Duration::from_secs(60), format!("max residual {worst:.2e} over 100 (ψ, s), {:.1}s", el.as_secs_f64()))
}

fn delta1_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut prod, mut unit) = (0.0f64, 0.0f64);
    for (psi, chi) in random_characters(&mut rng, 50) {
        let s = c(rng.gen_range(-0.5..1.5), rng.gen_range(-10.0..10.0));
        let a = delta1(&psi, &chi, s).unwrap();
        let b = delta1(&psi.conj(), &chi, 1.0 - s).unwrap();
        prod = prod.max((a * b - 1.0).norm());
        let t = rng.gen_range(-10.0..10.0);
        unit = unit.max((delta1(&psi, &chi, c(0.5, t)).unwrap().norm() - 1.0).abs());
    }
    outcome(prod < 1e-9 && unit < 1e-9, format!("product {prod:.2e}, unimodularity {unit:.2e} over 50 samples"))
}

fn coefficient_exactness() -> Outcome {
    let n = 100_000;
    let mut bad = 0;
    for d in [-4i64, 5, -8] {
        let chi = kronecker_character(d).unwrap();
        let conv = dirichlet_convolve_int(&nu_values(&chi, n).unwrap(), &upsilon_values(&chi, n).unwrap(), n);
        bad += (1..=n).filter(|&k| conv[k] != i64::from(k == 1)).count();
    }
    // table values against the prime-power closed form
    let alpha = 1.0 / 20f64.ln();
    let (lp, lm) = lambda_tables(alpha, 10_000).unwrap();
    let (mut err, mut excess) = (0.0f64, 0.0f64);
    for p in arith::primes_up_to(10_000) {
        let (mut pl, mut l) = (p, 1u32);
        while pl <= 10_000 {
            let target = (pl as f64).powf(alpha) * (1.0 - (p as f64).powf(-2.0 * alpha));
            err = err.max((lm.get(pl as usize) - target).abs());
            excess = excess.max(lp.get(pl as usize).abs() - lm.get(pl as usize));
            pl *= p;
            l += 1;
        }
        let _ = l;
    }
    outcome(
        bad == 0 && err < 1e-12 && excess <= 1e-12,
        format!("ν⋆υ mismatches {bad} (n ≤ 1e5, three χ); λ₋ error {err:.2e}; max |λ₊| − λ₋ = {excess:.2e}"),
    )
}

fn kernels() -> Outcome {
    let kp = KernelParams::from_q(20.0);
    let half = (varsigma(1.0) - 0.5).abs();
    let sym = (-200..=200).map(|k| 10f64.powf(k as f64 / 25.0)).map(|x| (varsigma(x) + varsigma(1.0 / x) - 1.0).abs()).fold(0.0, f64::max);
    // 1 − ϑ(x) rounds to 0 for large x, so the upper bound is checked on the
    // complement ϑ(1/x) = 1 − ϑ(x)
    let inside = (-200..=200).map(|k| 10f64.powf(k as f64 / 25.0)).all(|x| {
        let v = vartheta(x, kp);
        v > 0.0 && v <= 1.0 && vartheta(1.0 / x, kp) > 0.0
    });
    let vhalf = (vartheta(1.0, kp) - 0.5).abs();
    let x0 = 20f64.powf(0.1) * 10f64.exp();
    let tail = [1.0 + 1e-12, 1.5, 10.0, 1e3, 1e8].iter().map(|m| 1.0 - vartheta(x0 * m, kp)).fold(0.0, f64::max);
    outcome(
        half < 1e-12 && sym < 1e-12 && inside && vhalf < 1e-8 && tail < 1e-6,
        format!("|ς(1)−½| {half:.1e}, symmetry {sym:.1e}, 0<ϑ<1 {inside}, |ϑ(1)−½| {vhalf:.1e}, max 1−ϑ beyond Q^(1/10)e^10 {tail:.1e}"),
    )
}

fn convolution_identity() -> Outcome {
    let p = params(4.0, 20.0, None);
    let (lq, alpha, omega) = (p.log_q(), p.alpha, p.omega);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut random_s = || {
        let r = 3.0 * omega * rng.gen::<f64>().sqrt();
        C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
    };
    let mut worst: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    let xs = [-1.0, -0.55, -0.1, 0.35, 0.8, 1.0];
    for i in 0..100 {
        let (s, t) = (random_s(), random_s());
        let x = xs[i % xs.len()];
        let (fs, ft) = (IntervalFunction::phi_s(s, lq), IntervalFunction::phi_s(t, lq));
        // bound on the integrand |Q^{(x−y)s + yt}| over the path
        let scale = fs.at(x).norm().max(ft.at(x).norm()).max(1.0);
        let closed = alpha * (fs.at(x) - ft.at(x)) / (s - t);
        let quad = convolve_numeric_at(&fs, &ft, x);
        worst = worst.max((quad - closed).norm() / scale);
        worst_closed = worst_closed.max((exp_pair(s, t, lq, x) - closed).norm() / scale);
    }
    outcome(worst < 1e-9, format!("quadrature vs closed form {worst:.2e} (relative to integrand bound), stable form {worst_closed:.2e}, |s| ≤ 3ω = {:.2}", 3.0 * omega))
}

fn random_polys(rng: &mut ChaCha8Rng, count: usize) -> Vec<IntervalFunction> {
    (0..count)
        .map(|_| IntervalFunction::polynomial((0..5).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()))
        .collect()
}

fn bvp_identities() -> Outcome {
    let p = params(4.0, 20.0, None);
    let rep = bvp_check(&p, 10, 16).unwrap();
    let b1 = (rep.boundary_g1 - 1.0).abs().max((rep.boundary_g1_minus + 1.0).abs().min((rep.boundary_g1_minus - 1.0).abs()));
    let ode = rep.ode_residual_g1.max(rep.ode_residual_g2).max(rep.ode_residual_g3);
    let inner = rep.inner_g1_max.max(rep.inner_g2_max).max(rep.inner_g3_max);
    outcome(
        (rep.boundary_g1 - 1.0).abs() < 1e-10 && rep.g1_norm_rel_residual < 1e-10 && inner < 1e-6 && ode <= 1e-6,
        format!(
            "d = {}, R = {}: |g₁′(1)ϖ₁(1) − 1| {:.1e} (both ends {b1:.1e}), ‖g₁‖² rel {:.1e}, inner products {inner:.1e}, ODE {ode:.1e}",
            rep.d,
            rep.r,
            (rep.boundary_g1 - 1.0).abs(),
            rep.g1_norm_rel_residual
        ),
    )
}

fn phi_linearity() -> Outcome {
    let chi = kronecker_character(-4).unwrap();
    let psi = enumerate_psi_q(7, &chi).unwrap().into_iter().last().unwrap();
    let p = params(4.0, 20.0, None);
    let ctx = MollifierContext::new(&psi, &chi, 200, &p).unwrap();
    let zs = scan_zero_set(&psi, &chi, (0.0, 12.0), auto_step(Some(p.alpha))).unwrap();
    let rho = zs.records.iter().map(|r| r.rho()).next().unwrap_or(c(0.5, 6.02));
    let data = PhiData::new(&ctx, rho).unwrap();
    let mut eng = XiEngine::new(&ctx, data.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut fs = random_polys(&mut rng, 6);
    fs.push(IntervalFunction::phi0(p.log_q()));
    fs.push(IntervalFunction::phi_s(c(0.3, -0.8), p.log_q()));
    let xs: Vec<f64> = (0..=40).map(|i| -1.2 + 2.4 * i as f64 / 40.0).collect();
    fs.push(IntervalFunction::sampled(xs.clone(), xs.iter().map(|x| c((2.0 * x).sin(), x * x)).collect()).unwrap());
    let mut decomposition: f64 = 0.0;
    let mut lin: f64 = 0.0;
    let mut adaptive: f64 = 0.0;
    let rel = |a: C64, b: C64| (a - b).norm() / a.norm().max(b.norm()).max(1.0);
    let eps = p.epsilon;
    for (i, f) in fs.iter().enumerate() {
        decomposition = decomposition.max(phi(f, &data).unwrap().decomposition_residual);
        let g = &fs[(i + 3) % fs.len()];
        let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let comb = f.scaled(a).plus(g);
        let lhs = phi(&comb, &data).unwrap().value;
        lin = lin.max(rel(lhs, a * phi(f, &data).unwrap().value + phi(g, &data).unwrap().value));
        let lhs = phi_star(&comb, &data, eps).unwrap();
        lin = lin.max(rel(lhs, a * phi_star(f, &data, eps).unwrap() + phi_star(g, &data, eps).unwrap()));
        let (xf, xg, xc) = (eng.xi_fixed(&ctx, f, 256).unwrap(), eng.xi_fixed(&ctx, g, 256).unwrap(), eng.xi_fixed(&ctx, &comb, 256).unwrap());
        lin = lin.max(rel(xc, a * xf + xg));
        let (tf, tg, tc) = (eng.theta_fixed(&ctx, f, 256).unwrap(), eng.theta_fixed(&ctx, g, 256).unwrap(), eng.theta_fixed(&ctx, &comb, 256).unwrap());
        lin = lin.max(rel(tc, a * tf + tg));
        // the adaptive Θ stops at a per-f node count, so it is linear only to its tolerance
        if let (Ok(tf), Ok(tg), Ok(tc)) = (eng.theta(&ctx, f), eng.theta(&ctx, g), eng.theta(&ctx, &comb)) {
            adaptive = adaptive.max(rel(tc.value, a * tf.value + tg.value));
        }
    }
    outcome(decomposition < 1e-12 && lin < 1e-10, format!("decomposition {decomposition:.1e}, linearity of Φ, Φ*, Ξ, Θ {lin:.1e} over {} functions (adaptive Θ {adaptive:.1e})", fs.len()))
}

fn u_pm_identities() -> Outcome {
    let p = params(4.0, 20.0, None);
    let r = p.r;
    let mut sum: f64 = 0.0;
    let mut contour: f64 = 0.0;
    for k in 0..100 {
        let x = -1.0 + 2.0 * k as f64 / 99.0;
        sum = sum.max((u_pm(x, r, Sign::Plus) + u_pm(x, r, Sign::Minus) - 1.0).abs());
        contour = contour.max((u_pm_contour(x, r, Sign::Minus, 40) - u_pm(x, r, Sign::Minus)).abs());
    }
    let sine = (u_pm(p.epsilon, r, Sign::Minus) - sine_tail(p.epsilon, r)).abs();
    outcome(sum < 1e-10 && sine < 1e-8, format!("U₊+U₋−1 {sum:.1e} on 100 points, U₋(ε) vs sine-integral form {sine:.1e}, contour form {contour:.1e}"))
}

fn zero_scans() -> Outcome {
    let t = Instant::now();
    let fam = build_family(5, 20).unwrap();
    let p = params(5.0, 20.0, None);
    let step = auto_step(Some(p.alpha));
    let mut mismatch = 0i64;
    let mut drift: f64 = 0.0;
    let mut count_change = 0usize;
    let mut zeros = 0usize;
    for psi in fam.iter().take(10) {
        let a = scan_zero_set(&psi, &fam.chi, (0.0, 30.0), step).unwrap();
        let b = scan_zero_set(&psi, &fam.chi, (0.0, 30.0), step / 2.0).unwrap();
        mismatch += a.mismatch_total().abs() + b.mismatch_total().abs();
        let (mut ga, mut gb) = (a.ordinates(), b.ordinates());
        ga.sort_by(f64::total_cmp);
        gb.sort_by(f64::total_cmp);
        zeros += ga.len();
        if ga.len() != gb.len() {
            count_change += 1;
            continue;
        }
        drift = ga.iter().zip(&gb).map(|(x, y)| (x - y).abs()).fold(drift, f64::max);
    }
    let el = t.elapsed();
    outcome(
        mismatch == 0 && count_change == 0 && drift < 1e-10 && el < Duration::from_secs(300),
        format!("{zeros} zeros over 10 characters on [0, 30]: mismatch {mismatch}, count changes {count_change}, step-halving drift {drift:.1e}, {:.1}s", el.as_secs_f64()),
    )
}

fn approximation() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    let mut cs = Vec::new();
    for r in [10.0, 20.0, 40.0] {
        let p = params(4.0, 20.0, Some(r));
        let g3 = bvp::g3(&p, None).unwrap();
        let (lq, w) = (p.log_q(), g3.pair.w);
        let zero = solve_h_k(&[c(0.0, 0.0)], lq, r, &g3, &ApproxOptions::default()).unwrap();
        let exact = residual_norm(&[c(0.0, 0.0)], &zero.coefficients, lq, &w);
        ok &= exact < 1e-10;
        let mut prev = f64::INFINITY;
        let mut monotone = true;
        for l0 in 0..=6 {
            let th = synthetic_lattice(p.alpha, l0);
            let res = solve_h_k(&th, lq, r, &g3, &ApproxOptions::default()).unwrap();
            let rn = residual_norm(&th, &res.coefficients, lq, &w);
            monotone &= rn <= prev * (1.0 + 1e-9) + 1e-15;
            prev = rn;
        }
        ok &= monotone;
        // lattice truncated at |θ| ≤ ω: |±1 + πil|α ≤ R/log Q
        let l0 = ((r * r - 1.0).sqrt() / std::f64::consts::PI).floor() as i64;
        let th = synthetic_lattice(p.alpha, l0);
        let res = solve_h_k(&th, lq, r, &g3, &ApproxOptions::default()).unwrap();
        let cval = residual_norm(&th, &res.coefficients, lq, &w) / p.delta;
        cs.push(cval);
        details.push(format!("R={r}: T={{0}} {exact:.0e}, monotone {monotone}, l0={l0}, C={cval:.2e}"));
    }
    let mean = cs.iter().sum::<f64>() / cs.len() as f64;
    let stable = cs.iter().all(|v| (v - mean).abs() <= 0.5 * mean);
    outcome(ok && stable, format!("{}; C within ±50% of mean: {stable}", details.join("; ")))
}

fn large_sieve() -> Outcome {
    let mut ratios = Vec::new();
    for q in [10u64, 20, 40] {
        let fam = build_family(5, q).unwrap();
        let rep = sieve_check(&fam, 50, 19).unwrap();
        ratios.push((q, rep.max_random.max(rep.max_phases), rep.aligned));
    }
    let growth = ratios.windows(2).map(|w| w[1].1 / w[0].1).fold(0.0, f64::max);
    let table: Vec<String> = ratios.iter().map(|(q, r, a)| format!("Q={q}: max {r:.3} (aligned {a:.3})")).collect();
    outcome(growth <= 2.0, format!("{}; worst growth on doubling ×{growth:.2}", table.join(", ")))
}

fn pipeline_determinism() -> Outcome {
    let base = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: usize, max_characters: Option<usize>| {
        let mut cfg = RunConfig::minimal(5, 20, (0.0, 30.0));
        cfg.max_characters = max_characters;
        cfg.workers = Some(workers);
        cfg.output = base.path().join(name);
        let t = Instant::now();
        run_pipeline(&cfg).map(|rep| (rep, t.elapsed()))
    };
    let (Ok((a, _)), Ok((b, _))) = (run("w1", 1, Some(16)), run("w8", 8, Some(16))) else {
        return outcome(false, "pipeline run failed".into());
    };
    let mut differing = Vec::new();
    for f in &a.files {
        if f == MANIFEST {
            continue;
        }
        let x = std::fs::read(a.output.join(f)).unwrap();
        let y = std::fs::read(b.output.join(f)).unwrap();
        if x != y {
            differing.push(f.clone());
        }
    }
    let full = run("full", 8, None);
    let (full_ok, full_detail) = match &full {
        Ok((rep, el)) => (
            *el < Duration::from_secs(300),
            format!("full family ({} characters, {} anchors, {} isolated stage failures) in {:.1}s", rep.family.processed, rep.family.anchors, rep.failures.len(), el.as_secs_f64()),
        ),
        Err(e) => (false, format!("full run failed: {e}")),
    };
    outcome(
        differing.is_empty() && full_ok,
        format!("1 vs 8 workers on 16 characters: {} differing files of {}; {full_detail}", differing.len(), a.files.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("functional equation", functional_equation),
        ("Δ₁ identities", delta1_identities),
        ("coefficient exactness", coefficient_exactness),
        ("kernels", kernels),
        ("convolution identity", convolution_identity),
        ("boundary-value identities", bvp_identities),
        ("Φ decomposition and linearity", phi_linearity),
        ("U± identities", u_pm_identities),
        ("zero scans", zero_scans),
        ("approximation by exponentials", approximation),
        ("large sieve", large_sieve),
        ("pipeline determinism", pipeline_determinism),
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if filter.is_some_and(|k| k != id) {
            continue;
        }
        let t = Instant::now();
        let o = std::panic::catch_unwind(f).unwrap_or_else(|_| outcome(false, "panicked".into()));
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_RED.contains(&id) { " (known)" } else { "" };
        println!("criterion {id:>2} {status}{note} {name} [{:.1}s]: {}", t.elapsed().as_secs_f64(), o.detail);
        if !o.pass && !KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
