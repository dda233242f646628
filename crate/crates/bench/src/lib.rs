//! Fixed inputs shared by the benches and their smoke test.

use siegel_core::characters::{enumerate_psi_q, kronecker_character, Character};
use siegel_core::error::Result;
use siegel_core::numeric::{c, C64};
use siegel_core::params::{AnalysisParams, ParamOverrides};

/// χ = χ_{-4} and the last member of Ψ_q.
pub fn psi_chi(q: u64) -> Result<(Character, Character)> {
    let chi = kronecker_character(-4)?;
    let psi = enumerate_psi_q(q, &chi)?
        .pop()
        .ok_or_else(|| siegel_core::error::Error::Missing(format!("Ψ_{q} is empty")))?;
    Ok((psi, chi))
}

pub fn params(big_q: f64, r: f64) -> Result<AnalysisParams> {
    AnalysisParams::new(4.0, big_q, &ParamOverrides { r: Some(r), ..Default::default() })
}

/// Points on the critical line and just right of it.
pub fn sample_points(n: usize) -> Vec<C64> {
    (0..n)
        .map(|i| {
            let t = 1.0 + 40.0 * i as f64 / n.max(1) as f64;
            c(if i % 2 == 0 { 0.5 } else { 0.75 }, t)
        })
        .collect()
}
