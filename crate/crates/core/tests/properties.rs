use proptest::prelude::*;
use siegel_core::approx::{gram_matrix, synthetic_lattice};
use siegel_core::characters::{enumerate_psi_q, kronecker_character, kronecker_symbol};
use siegel_core::functional::{inner, norm, u_pm, IntervalFunction};
use siegel_core::lfunc::{hurwitz_zeta, vartheta_log, varsigma, KernelParams};
use siegel_core::mollifier::Sign;
use siegel_core::numeric::{c, C64};
use siegel_core::weights::WeightPair;

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn varsigma_reflects(lx in -8.0f64..8.0) {
        let x = lx.exp();
        prop_assert!((varsigma(x) + varsigma(1.0 / x) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vartheta_is_monotone(a in -12.0f64..12.0, gap in 1e-3f64..2.0, q in 5.0f64..1e6) {
        let kp = KernelParams::from_q(q);
        let (lo, hi) = (vartheta_log(a, kp), vartheta_log(a + gap, kp));
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo - 1e-15);
    }

    #[test]
    fn u_plus_minus_sum_to_one(x in -3.0f64..3.0, r in 1.0f64..60.0) {
        prop_assert!((u_pm(x, r, Sign::Plus) + u_pm(x, r, Sign::Minus) - 1.0).abs() < 1e-14);
        prop_assert!((u_pm(x, r, Sign::Plus) - u_pm(-x, r, Sign::Minus)).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_duplication(t in -30.0f64..30.0, sigma in 0.1f64..2.5, a in 0.05f64..1.0) {
        let s = c(sigma, t);
        prop_assume!((s - 1.0).norm() > 1e-3);
        let lhs = hurwitz_zeta(s, a / 2.0).unwrap() + hurwitz_zeta(s, (a + 1.0) / 2.0).unwrap();
        let rhs = (s * 2f64.ln()).exp() * hurwitz_zeta(s, a).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10));
    }

    #[test]
    fn kronecker_is_multiplicative(d in prop::sample::select(vec![-4i64, 5, -8, 8, -3, 12, -7]), m in 1i64..500, n in 1i64..500) {
        let chi = kronecker_character(d).unwrap();
        prop_assert!(close(chi.value(m * n), chi.value(m) * chi.value(n), 1e-15));
        prop_assert_eq!(chi.value(m).re as i32, kronecker_symbol(d, m).unwrap());
    }

    #[test]
    fn inner_product_is_hermitian(p in prop::collection::vec(-2.0f64..2.0, 6), delta in 0.05f64..0.5) {
        let w = WeightPair::new(delta, 6.0);
        let f = IntervalFunction::polynomial(vec![c(p[0], p[1]), c(p[2], 0.0), c(0.0, p[3])]);
        let g = IntervalFunction::polynomial(vec![c(p[4], 0.0), c(0.0, p[5]), c(1.0, 0.0)]);
        let (fg, gf) = (inner(&f, &g, &w).unwrap(), inner(&g, &f, &w).unwrap());
        prop_assert!(close(fg, gf.conj(), 1e-12));
        let nf = norm(&f, &w).unwrap();
        let ng = norm(&g, &w).unwrap();
        prop_assert!(fg.norm() <= nf * ng * (1.0 + 1e-10) + 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn psi_values_multiplicative(q in prop::sample::select(vec![5u64, 7, 11, 13, 35, 55]), m in 1u64..300, n in 1u64..300) {
        let chi = kronecker_character(-4).unwrap();
        for psi in enumerate_psi_q(q, &chi).unwrap() {
            prop_assert!(close(psi.value_u(m * n), psi.value_u(m) * psi.value_u(n), 1e-12));
            let v = psi.value_u(m).norm();
            prop_assert!(v < 1e-12 || (v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_is_hermitian_psd(l0 in 0i64..4, log_q in 2.0f64..6.0, delta in 0.05f64..0.3) {
        let w = WeightPair::new(delta, 6.0);
        let th = synthetic_lattice(1.0 / log_q, l0);
        let (g, rep) = gram_matrix(&th, log_q, &w).unwrap();
        prop_assert!(rep.hermitian_residual < 1e-12);
        prop_assert!(rep.min_eigenvalue > -1e-10 * rep.max_eigenvalue);
        for i in 0..th.len() {
            prop_assert!(g[(i, i)].im.abs() < 1e-12 * g[(i, i)].re);
        }
    }
}
