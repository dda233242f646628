use siegel_bench::{params, psi_chi, sample_points};
use siegel_core::lfunc::LEvaluator;

#[test]
fn fixtures_are_usable() {
    let (psi, _chi) = psi_chi(7).unwrap();
    assert_eq!(psi.modulus, 7);
    let ev = LEvaluator::new(psi);
    for s in sample_points(4) {
        assert!(ev.eval(s).unwrap().norm().is_finite());
    }
    let p = params(20.0, 10.0).unwrap();
    assert!(p.alpha > 0.0 && p.delta > 0.0);
}
