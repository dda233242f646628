//! Sobolev weights ϖ₁, ϖ₂ on [−1, 1], evaluated in log space.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct WeightPair {
    pub delta: f64,
    pub d: f64,
}

impl WeightPair {
    pub fn new(delta: f64, d: f64) -> Self {
        WeightPair { delta, d }
    }

    /// P(x) = 1 + δ − x².
    pub fn p(&self, x: f64) -> f64 {
        1.0 + self.delta - x * x
    }

    pub fn ln_varpi1(&self, x: f64) -> f64 {
        (3.0 - self.d) * self.delta.ln() + self.d * self.p(x).ln()
    }

    /// ϖ₁(x) = δ^{3−d}(1 + δ − x²)^d.
    pub fn varpi1(&self, x: f64) -> f64 {
        self.ln_varpi1(x).exp()
    }

    pub fn varpi1_prime(&self, x: f64) -> f64 {
        let p = self.p(x);
        -2.0 * x * self.d * ((3.0 - self.d) * self.delta.ln() + (self.d - 1.0) * p.ln()).exp()
    }

    /// ϖ₂(x) = 2dδ^{3−d}(1 + δ + x²)(1 + δ − x²)^{d−2}.
    pub fn varpi2(&self, x: f64) -> f64 {
        let p = self.p(x);
        let l = (3.0 - self.d) * self.delta.ln() + (self.d - 2.0) * p.ln();
        2.0 * self.d * (1.0 + self.delta + x * x) * l.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_values() {
        let w = WeightPair::new(0.1, 6.0);
        assert!((w.varpi1(1.0) - 0.1f64.powi(3)).abs() < 1e-15);
        assert!((w.varpi1(0.3) - 0.1f64.powi(-3) * (1.1 - 0.09f64).powi(6)).abs() < 1e-9);
        let h = 1e-6;
        let fd = (w.varpi1(0.4 + h) - w.varpi1(0.4 - h)) / (2.0 * h);
        assert!((fd - w.varpi1_prime(0.4)).abs() < 1e-6 * fd.abs());
    }
}
