//! Gauss–Legendre rules and adaptive panel quadrature.

use super::C64;
use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, Mutex, OnceLock};

pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn compute_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pnm1 = p0;
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// n-point Gauss–Legendre rule on [-1, 1], cached.
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut g = cache.lock().unwrap();
    g.entry(n).or_insert_with(|| Arc::new(compute_rule(n))).clone()
}

pub fn fixed<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64, n: usize) -> T {
    let rule = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = T::zero();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc = acc + f(mid + h * x) * (w * h);
    }
    acc
}

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_depth: u32,
    pub order: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-13, rel: 1e-12, max_depth: 40, order: 20 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
}

/// Adaptive bisection: a panel is accepted when its estimate agrees with the
/// sum over its two halves.
pub fn adaptive<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64, tol: Tolerance) -> QuadResult<T> {
    if a == b {
        return QuadResult { value: T::zero(), error: 0.0, converged: true };
    }
    let whole = fixed(f, a, b, tol.order);
    let mut out = QuadResult { value: T::zero(), error: 0.0, converged: true };
    recurse(f, a, b, whole, tol, 0, &mut out, whole.magnitude());
    out
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: Scalar, F: Fn(f64) -> T>(
    f: &F,
    a: f64,
    b: f64,
    whole: T,
    tol: Tolerance,
    depth: u32,
    out: &mut QuadResult<T>,
    scale: f64,
) {
    let m = 0.5 * (a + b);
    let left = fixed(f, a, m, tol.order);
    let right = fixed(f, m, b, tol.order);
    let both = left + right;
    let diff = (both - whole).magnitude();
    let allowed = tol.abs.max(tol.rel * scale.max(both.magnitude()));
    if diff <= allowed || depth >= tol.max_depth || (b - a).abs() < 1e-15 * (a.abs() + b.abs()).max(1.0) {
        if diff > allowed {
            out.converged = false;
        }
        out.value = out.value + both;
        out.error += diff;
        return;
    }
    let half = Tolerance { abs: 0.5 * tol.abs, ..tol };
    recurse(f, a, m, left, half, depth + 1, out, scale);
    recurse(f, m, b, right, half, depth + 1, out, scale);
}

/// Adaptive quadrature over consecutive breakpoints.
pub fn adaptive_pieces<T: Scalar, F: Fn(f64) -> T>(f: &F, breaks: &[f64], tol: Tolerance) -> QuadResult<T> {
    let mut out = QuadResult { value: T::zero(), error: 0.0, converged: true };
    for w in breaks.windows(2) {
        let r = adaptive(f, w[0], w[1], tol);
        out.value = out.value + r.value;
        out.error += r.error;
        out.converged &= r.converged;
    }
    out
}

/// Fixed rule on `panels` equal subintervals.
pub fn composite<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64, panels: usize, n: usize) -> T {
    let h = (b - a) / panels as f64;
    let mut acc = T::zero();
    for k in 0..panels {
        let lo = a + h * k as f64;
        acc = acc + fixed(f, lo, lo + h, n);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 10, 20, 33] {
            let r = gauss_legendre(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let f = |x: f64| x.powi(deg as i32 - 1) * 3.0;
            let exact = if (deg - 1) % 2 == 0 { 6.0 / deg as f64 } else { 0.0 };
            assert!((fixed(&f, -1.0, 1.0, n) - exact).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_peaks() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let r = adaptive(&f, -1.0, 1.0, Tolerance::new(1e-12, 1e-13));
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-9 * exact, "{} vs {}", r.value, exact);
        assert!(r.converged);
    }

    #[test]
    fn complex_oscillatory() {
        let f = |x: f64| C64::new(0.0, 40.0 * x).exp();
        let r = adaptive(&f, 0.0, 1.0, Tolerance::default());
        let exact = (C64::new(0.0, 40.0).exp() - 1.0) / C64::new(0.0, 40.0);
        assert!((r.value - exact).norm() < 1e-12);
    }
}
