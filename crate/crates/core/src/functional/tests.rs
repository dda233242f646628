use super::*;
use crate::characters::{enumerate_psi_q, kronecker_character};
use crate::coefficients::{CoeffKind, CoeffTable};
use crate::params::{AnalysisParams, ParamOverrides};
use std::sync::Arc;

fn ctx(cap_f: usize) -> MollifierContext {
    let chi = kronecker_character(-4).unwrap();
    let psi = enumerate_psi_q(7, &chi).unwrap().into_iter().last().unwrap();
    let p = AnalysisParams::new(4.0, 20.0, &ParamOverrides::default()).unwrap();
    MollifierContext::new(&psi, &chi, cap_f, &p).unwrap()
}

fn one_term(base: &MollifierContext, plus_at: Option<(usize, f64)>, minus_at: Option<(usize, f64)>) -> MollifierContext {
    let n = base.lambda_plus.limit;
    let mk = |kind, at: Option<(usize, f64)>| {
        let mut v = vec![0.0; n + 1];
        if let Some((k, x)) = at {
            v[k] = x;
        }
        Arc::new(CoeffTable::synthetic(kind, v))
    };
    MollifierContext::with_tables(
        &base.psi,
        &base.chi,
        base.cap_f,
        base.nu.clone(),
        base.upsilon.clone(),
        mk(CoeffKind::LambdaPlus, plus_at),
        mk(CoeffKind::LambdaMinus, minus_at),
        &base.params,
    )
    .unwrap()
}

fn poly(seed: u64) -> IntervalFunction {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((x >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    IntervalFunction::polynomial((0..5).map(|_| c(next(), next())).collect())
}

#[test]
fn phi_decomposition_and_linearity() {
    let m = ctx(50);
    let d = PhiData::new(&m, c(0.5, 6.02)).unwrap();
    assert_eq!(phi(&IntervalFunction::zero(), &d).unwrap().value, c(0.0, 0.0));
    for k in 0..10 {
        let f = poly(k);
        let v = phi(&f, &d).unwrap();
        assert!(v.decomposition_residual < 1e-12);
        let g = poly(100 + k);
        let sum = phi(&f.plus(&g), &d).unwrap().value;
        assert!((sum - v.value - phi(&g, &d).unwrap().value).norm() < 1e-12);
    }
    // ε = 0 leaves only the n = 1 heads out of Φ
    for k in 0..3 {
        let f = poly(k);
        assert!((phi_star(&f, &d, 0.0).unwrap() - phi1(&f, &d).unwrap()).norm() < 1e-14);
    }
}

#[test]
fn phi_one_term_by_hand() {
    let base = ctx(20);
    let m = one_term(&base, Some((3, 0.4)), Some((2, -0.25)));
    let rho = c(0.5, 6.02);
    let d = PhiData::new(&m, rho).unwrap();
    let f = IntervalFunction::polynomial(vec![c(0.3, 0.0), c(1.0, -0.5), c(0.0, 0.2)]);
    let lq = 20f64.ln();
    let kp = m.kernel();
    let t3 = 0.4 * m.psi.value_u(3) * (-rho * 3f64.ln()).exp() * vartheta_log(4.0 / 3.0 * lq - 3f64.ln(), kp);
    let t2 = -0.25 * m.psi.conj().value_u(2) * (-(1.0 - rho) * 2f64.ln()).exp() * vartheta_log(2.0 / 3.0 * lq - 2f64.ln(), kp);
    let hand = t3 * f.at(1.0 - 3f64.ln() / lq) - t2 * f.at(2f64.ln() / lq - 1.0);
    assert!((phi(&f, &d).unwrap().value - hand).norm() < 1e-14);
    // Φ* keeps n = 3 only when 3 > Q^ε
    let eps = 0.05;
    let star = phi_star(&f, &d, eps).unwrap();
    let hand_star = t3 * f.at(1.0 + eps - 3f64.ln() / lq) - t2 * f.at(2f64.ln() / lq - 1.0 + eps);
    assert!((star - hand_star).norm() < 1e-14);
}

#[test]
fn norm_homogeneous_and_phi0() {
    let w = WeightPair::new(0.2, 6.0);
    let f = poly(3);
    let n1 = norm(&f, &w).unwrap();
    let n2 = norm(&f.scaled(c(0.0, -3.0)), &w).unwrap();
    assert!((n2 - 3.0 * n1).abs() < 1e-10 * n2);
    let phi0 = IntervalFunction::phi0(3.0);
    let direct = quad::adaptive(&|x: f64| w.varpi2(x), -1.0, 1.0, quad::Tolerance::new(1e-14, 1e-13)).value;
    assert!((norm(&phi0, &w).unwrap().powi(2) - direct).abs() < 1e-9 * direct);
}

#[test]
fn u_pm_identities() {
    let r = 10.0;
    assert!((u_pm(0.0, r, Sign::Minus) - 0.5).abs() < 1e-15);
    for k in 0..100 {
        let x = -1.0 + 2.0 * k as f64 / 99.0;
        let s = u_pm_contour(x, r, Sign::Plus, 40) + u_pm_contour(x, r, Sign::Minus, 40);
        assert!((s - 1.0).abs() < 1e-10, "x = {x}: {s}");
        assert!((u_pm_contour(x, r, Sign::Plus, 40) - u_pm(x, r, Sign::Plus)).abs() < 1e-10);
    }
    let eps = 2.0 * PI / r;
    assert!((u_pm(eps, r, Sign::Minus) - sine_tail(eps, r)).abs() < 1e-8);
}

#[test]
fn xi_theta_linear_and_zero() {
    let m = ctx(50);
    let d = PhiData::new(&m, c(0.5, 6.02)).unwrap();
    let mut eng = XiEngine::new(&m, d).unwrap();
    let z = IntervalFunction::zero();
    assert_eq!(eng.xi(&m, &z).unwrap().value, c(0.0, 0.0));
    assert_eq!(eng.theta(&m, &z).unwrap().value, c(0.0, 0.0));
    let f = poly(7);
    let g = IntervalFunction::phi_s(c(0.3, -0.8), m.params.log_q());
    let a = eng.theta(&m, &f).unwrap().value;
    let b = eng.theta(&m, &g).unwrap().value;
    let ab = eng.theta(&m, &f.plus(&g)).unwrap().value;
    assert!((ab - a - b).norm() < 1e-10 * ab.norm().max(1.0), "{ab} vs {}", a + b);
    let cf = eng.theta(&m, &f.scaled(c(2.0, 1.0))).unwrap().value;
    assert!((cf - c(2.0, 1.0) * a).norm() < 1e-10 * cf.norm().max(1.0));
    let shape = theta_shape(&mut eng, &m).unwrap();
    assert!(shape.residual.is_finite());
}

#[test]
fn error_functionals_zero_tables() {
    let base = ctx(20);
    let m = one_term(&base, None, None);
    let d = PhiData::new(&m, c(0.5, 6.02)).unwrap();
    let e = error_functionals(&m, &d).unwrap();
    assert_eq!(e.e1, 0.0);
    assert_eq!(e.e2, 0.0);
    assert_eq!(e.e, e.upsilon_term);
}

#[test]
fn y_values_one_term() {
    let base = ctx(20);
    // λ₋ at n = 2 feeds 𝒴₁, 𝒴₃; λ₊ at n = 3 feeds 𝒴₂, 𝒴₄
    let m = one_term(&base, Some((3, 0.4)), Some((2, -0.25)));
    let rho = c(0.5, 6.02);
    let d = PhiData::new(&m, rho).unwrap();
    let y = y_values(&d);
    let (lq, kp, eps, r) = (m.params.log_q(), m.kernel(), m.params.epsilon, m.params.r);
    let w2 = -0.25 * m.psi.value_u(2) * (-rho * 2f64.ln()).exp() * vartheta_log(4.0 / 3.0 * lq - 2f64.ln(), kp);
    let w3 = 0.4 * m.psi.conj().value_u(3) * (-(1.0 - rho) * 3f64.ln()).exp() * vartheta_log(2.0 / 3.0 * lq - 3f64.ln(), kp);
    let a2 = 2f64.ln() / lq;
    let a3 = 3f64.ln() / lq;
    assert!((y.y1 - w2 * u_pm(eps - a2, r, Sign::Plus)).norm() < 1e-14);
    assert!((y.y2 - w3 * u_pm(-2.0 + eps + a3, r, Sign::Plus)).norm() < 1e-14);
    assert!((y.y3 - w2 * u_pm(2.0 + eps - a2, r, Sign::Minus)).norm() < 1e-14);
    assert!((y.y4 - w3 * u_pm(eps + a3, r, Sign::Minus)).norm() < 1e-14);
    let e = error_functionals(&m, &d).unwrap();
    let e2 = (y.y1.norm_sqr() + y.y2.norm_sqr() + y.y3.norm_sqr() + y.y4.norm_sqr()) / eps;
    assert!((e.e2 - e2).abs() < 1e-14 * e2.max(1.0));
    assert!(e.e1 > 0.0 && e.e1.is_finite());
}
