//! Smoothing kernels ς and ϑ, and the Mellin kernel Y of ϑ.

use crate::numeric::special::{erfc, half_erfc_antiderivative};
use crate::numeric::C64;

#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct KernelParams {
    /// log Q (so α = 1/log Q).
    pub log_q: f64,
}

impl KernelParams {
    pub fn from_q(q: f64) -> Self {
        KernelParams { log_q: q.ln() }
    }

    pub fn alpha(&self) -> f64 {
        1.0 / self.log_q
    }
}

/// ς(x) = π^{−1/2} ∫_{−∞}^{log x} e^{−y²} dy = erfc(−log x)/2.
pub fn varsigma(x: f64) -> f64 {
    assert!(x > 0.0);
    0.5 * erfc(-x.ln())
}

pub fn varsigma_log(u: f64) -> f64 {
    0.5 * erfc(-u)
}

/// ϑ(x) = 5 ∫_{−1/10}^{1/10} ς(Q^y x) dy, in closed form through the
/// antiderivative of ς∘exp.
pub fn vartheta(x: f64, kp: KernelParams) -> f64 {
    assert!(x > 0.0);
    vartheta_log(x.ln(), kp)
}

pub fn vartheta_log(lx: f64, kp: KernelParams) -> f64 {
    let w = kp.log_q / 10.0;
    let (a, b) = (lx - w, lx + w);
    if a > 0.0 {
        // 1 − ϑ, using the reflected antiderivative to avoid cancellation
        let tail = half_erfc_antiderivative(-a) - half_erfc_antiderivative(-b);
        return 1.0 - 5.0 / kp.log_q * tail;
    }
    5.0 / kp.log_q * (half_erfc_antiderivative(b) - half_erfc_antiderivative(a))
}

/// Y(s) = 5α(Q^{s/10} − Q^{−s/10}) e^{s²/4} / s².
pub fn y_kernel(s: C64, kp: KernelParams) -> C64 {
    let alpha = kp.alpha();
    let w = s * (kp.log_q / 10.0);
    5.0 * alpha * (w.exp() - (-w).exp()) * (s * s / 4.0).exp() / (s * s)
}
