//! Coupled parameter pack (𝓛, Q, α, R, ω, δ, δ₁, d, ε).

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Optional overrides of the derived parameters.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub r: Option<f64>,
    pub d: Option<f64>,
    /// ε = 2πk/R; k defaults to the integer nearest R^{1/12}/2π (at least 1).
    pub epsilon_k: Option<u32>,
    pub delta: Option<f64>,
    pub delta1: Option<f64>,
    pub anchor_height: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AnalysisParams {
    /// 𝓛 = log D.
    pub log_d: f64,
    pub big_q: f64,
    pub alpha: f64,
    pub r: f64,
    pub omega: f64,
    pub delta: f64,
    pub delta1: f64,
    pub d: f64,
    pub epsilon: f64,
    pub epsilon_k: u32,
    /// Height t₀ of the desk analog of s₀.
    pub anchor_height: f64,
    pub warnings: Vec<String>,
}

pub const DEFAULT_R: f64 = 10.0;
pub const DEFAULT_D: f64 = 6.0;

/// Asymptotic R = π⌊log𝓛/(30π)⌋ − π/2, reported next to the desk value.
pub fn asymptotic_r(log_d: f64) -> f64 {
    PI * (log_d.max(f64::MIN_POSITIVE).ln() / (30.0 * PI)).floor() - PI / 2.0
}

pub fn epsilon_index(r: f64) -> u32 {
    ((r.powf(1.0 / 12.0) / (2.0 * PI)).round() as u32).max(1)
}

impl AnalysisParams {
    pub fn new(big_d: f64, big_q: f64, ov: &ParamOverrides) -> Result<Self> {
        if !(big_d > 1.0) {
            return invalid("D must exceed 1");
        }
        if !(big_q > 1.0) {
            return invalid("Q must exceed 1");
        }
        let log_d = big_d.ln();
        let alpha = 1.0 / big_q.ln();
        let r = ov.r.unwrap_or(DEFAULT_R);
        if !(r >= PI / 2.0) || !r.is_finite() {
            return invalid(format!("R = {r} below π/2"));
        }
        let d = ov.d.unwrap_or(DEFAULT_D);
        if !(d >= 2.0) {
            return invalid("d must be at least 2");
        }
        let delta = ov.delta.unwrap_or(r.powf(-0.9));
        let delta1 = ov.delta1.unwrap_or(r.powf(-8.0 / 9.0));
        if !(delta > 0.0 && delta1 > delta) {
            return invalid(format!("need δ₁ > δ > 0 (δ = {delta}, δ₁ = {delta1})"));
        }
        let epsilon_k = ov.epsilon_k.unwrap_or_else(|| epsilon_index(r));
        if epsilon_k == 0 {
            return invalid("ε index must be positive");
        }
        let epsilon = 2.0 * PI * epsilon_k as f64 / r;
        let mut warnings = Vec::new();
        if epsilon >= delta1 {
            warnings.push(format!("ε = {epsilon:.4} is not below δ₁ = {delta1:.4}; the R^(-11/12) regime needs larger R"));
        }
        if log_d.ln() <= 0.0 {
            warnings.push(format!("log 𝓛 = {:.4} ≤ 0: the Ω₂ lower edge −α log𝓛/10 is degenerate", log_d.ln()));
        }
        let pr = asymptotic_r(log_d);
        if pr < PI / 2.0 {
            warnings.push(format!("asymptotic R = {pr:.4} is below π/2 at this D; desk R = {r} used"));
        }
        Ok(AnalysisParams {
            log_d,
            big_q,
            alpha,
            r,
            omega: alpha * r,
            delta,
            delta1,
            d,
            epsilon,
            epsilon_k,
            anchor_height: ov.anchor_height.unwrap_or(0.0),
            warnings,
        })
    }

    pub fn log_q(&self) -> f64 {
        1.0 / self.alpha
    }

    /// Residual of εR against the nearest multiple of 2π.
    pub fn epsilon_residual(&self) -> f64 {
        let x = self.epsilon * self.r / (2.0 * PI);
        (x - x.round()).abs() * 2.0 * PI
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return invalid("α must be positive");
        }
        if !(self.r >= PI / 2.0) {
            return invalid("R below π/2");
        }
        if !(self.delta1 > self.delta && self.delta > 0.0) {
            return invalid("need δ₁ > δ > 0");
        }
        if self.epsilon_residual() > 1e-12 {
            return invalid("εR is not a multiple of 2π");
        }
        if (self.omega - self.alpha * self.r).abs() > 1e-15 * self.omega.abs() {
            return invalid("ω ≠ αR");
        }
        Ok(())
    }

    /// Asymptotic formula next to the desk value, for emitted metadata.
    pub fn provenance(&self) -> Vec<(&'static str, String, f64)> {
        vec![
            ("alpha", "1/log Q".into(), self.alpha),
            ("R", format!("pi*floor(log(log D)/(30 pi)) - pi/2 = {:.4}", asymptotic_r(self.log_d)), self.r),
            ("omega", "alpha*R".into(), self.omega),
            ("delta", "R^(-9/10)".into(), self.delta),
            ("delta1", "R^(-8/9)".into(), self.delta1),
            ("d", "d >= 425".into(), self.d),
            ("epsilon", "R^(-11/12) + O(1/R), epsilon*R in 2 pi Z".into(), self.epsilon),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling() {
        for r in [10.0, 20.0, 40.0, 1000.0] {
            let p = AnalysisParams::new(5.0, 20.0, &ParamOverrides { r: Some(r), ..Default::default() }).unwrap();
            p.validate().unwrap();
            assert!((p.alpha * 20f64.ln() - 1.0).abs() < 1e-15);
            assert!(p.delta1 > p.delta);
            assert!(p.epsilon_residual() < 1e-12);
        }
        assert!(AnalysisParams::new(5.0, 20.0, &ParamOverrides { r: Some(1.0), ..Default::default() }).is_err());
        let bad = ParamOverrides { delta: Some(0.5), delta1: Some(0.1), ..Default::default() };
        assert!(AnalysisParams::new(5.0, 20.0, &bad).is_err());
    }

    #[test]
    fn desk_warnings() {
        let p = AnalysisParams::new(2.0, 20.0, &ParamOverrides::default()).unwrap();
        assert!(p.warnings.iter().any(|w| w.contains("degenerate")));
    }
}
