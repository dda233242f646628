//! Hurwitz zeta by Euler–Maclaurin summation.

use crate::error::{Error, Result};
use crate::numeric::special::expm1_over;
use crate::numeric::sum::ComplexSum;
use crate::numeric::C64;
use std::f64::consts::PI;
use std::sync::OnceLock;

const MAX_TERMS: usize = 30;

/// B_{2j}/(2j)! = (−1)^{j+1} 2ζ(2j)/(2π)^{2j}, j = 1..MAX_TERMS.
fn bernoulli_over_factorial() -> &'static [f64; MAX_TERMS] {
    static T: OnceLock<[f64; MAX_TERMS]> = OnceLock::new();
    T.get_or_init(|| {
        let mut out = [0.0; MAX_TERMS];
        for (idx, slot) in out.iter_mut().enumerate() {
            let j = idx + 1;
            let k = 2 * j as i32;
            let zeta = match j {
                1 => PI.powi(2) / 6.0,
                2 => PI.powi(4) / 90.0,
                3 => PI.powi(6) / 945.0,
                4 => PI.powi(8) / 9450.0,
                _ => (1..=2000).rev().map(|n| (n as f64).powi(-k)).sum::<f64>(),
            };
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            *slot = sign * 2.0 * zeta / (2.0 * PI).powi(k);
        }
        out
    })
}

/// Summation cut-off x = N + a chosen from |s|.
fn cutoff(s: C64, a: f64) -> usize {
    let target = 1.2 * s.norm() / PI + 10.0;
    (target - a).ceil().max(0.0) as usize
}

/// ζ(s, a) − 1/(s − 1): entire in s. Used directly by L-functions of
/// non-principal characters, where the pole parts cancel.
pub fn hurwitz_regular(s: C64, a: f64) -> C64 {
    assert!(a > 0.0 && a <= 1.0 + 1e-15, "a = {a} outside (0, 1]");
    let n = cutoff(s, a);
    let mut acc = ComplexSum::new();
    for k in (0..n).rev() {
        acc.add((-s * (k as f64 + a).ln()).exp());
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let xs = (-s * lx).exp();
    // (x^{1−s} − 1)/(s − 1)
    let u = (1.0 - s) * lx;
    acc.add(-lx * expm1_over(u));
    acc.add(0.5 * xs);
    let bern = bernoulli_over_factorial();
    let inv_x2 = 1.0 / (x * x);
    // rising factorial s(s+1)...(s+2j−2) and x^{−s−2j+1}
    let mut rising = s;
    let mut xpow = xs / x;
    let mut prev_mag = f64::INFINITY;
    for (j, b) in bern.iter().enumerate() {
        let term = rising * xpow * *b;
        let mag = term.norm();
        acc.add(term);
        if mag < 1e-18 * acc.value().norm().max(1e-300) || (mag > prev_mag && j > 3) {
            break;
        }
        prev_mag = mag;
        let m = 2.0 * (j as f64 + 1.0);
        rising = rising * (s + m - 1.0) * (s + m);
        xpow *= inv_x2;
    }
    acc.value()
}

pub fn hurwitz_zeta(s: C64, a: f64) -> Result<C64> {
    if (s - 1.0).norm() < 1e-15 {
        return Err(Error::Pole("s = 1 (Hurwitz zeta)".into()));
    }
    Ok(hurwitz_regular(s, a) + 1.0 / (s - 1.0))
}
