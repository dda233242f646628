//! Empirical large-sieve ratios over Ψ and zero-anchored mean values.

use crate::characters::{Character, Family};
use crate::error::{invalid, Error, Result};
use crate::numeric::sum::{rsum, ComplexSum};
use crate::numeric::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Σ_ψ |Σ_{n≤N} a_n ψ(n)|², with a_n indexed from n = 1.
pub fn sieve_lhs(family: &[Character], a: &[C64]) -> f64 {
    let parts: Vec<f64> = family
        .par_iter()
        .map(|psi| {
            let mut s = ComplexSum::new();
            for (i, &an) in a.iter().enumerate() {
                if an != C64::default() {
                    s.add(an * psi.value_u(i as u64 + 1));
                }
            }
            s.value().norm_sqr()
        })
        .collect();
    rsum(parts)
}

/// LHS / (Q² Σ|a_n|²).
pub fn large_sieve_ratio(family: &[Character], a: &[C64], big_q: u64) -> Result<f64> {
    let n = a.len() as u64;
    if n > big_q * big_q {
        return invalid(format!("N = {n} exceeds Q² = {}", big_q * big_q));
    }
    let mass = rsum(a.iter().map(|v| v.norm_sqr()));
    if mass == 0.0 {
        return Ok(0.0);
    }
    Ok(sieve_lhs(family, a) / ((big_q * big_q) as f64 * mass))
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CoeffChoice {
    RandomSigns,
    RandomPhases,
    AllOnes,
    /// a_n = conj ψ₀(n) for the first family member.
    Aligned,
}

pub fn coefficients(choice: CoeffChoice, n: usize, family: &[Character], rng: &mut ChaCha8Rng) -> Vec<C64> {
    match choice {
        CoeffChoice::RandomSigns => (0..n).map(|_| C64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)).collect(),
        CoeffChoice::RandomPhases => (0..n).map(|_| C64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>())).collect(),
        CoeffChoice::AllOnes => vec![C64::new(1.0, 0.0); n],
        CoeffChoice::Aligned => match family.first() {
            Some(psi) => (1..=n as u64).map(|k| psi.value_u(k).conj()).collect(),
            None => vec![C64::default(); n],
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SieveReport {
    pub big_q: u64,
    pub d: i64,
    pub n: usize,
    pub family_size: usize,
    pub trials: usize,
    pub max_random: f64,
    pub mean_random: f64,
    pub max_phases: f64,
    pub all_ones: f64,
    pub aligned: f64,
    pub single_term: f64,
}

/// Ratios over `trials` random ±1 and random-phase coefficient vectors plus
/// the adversarial choices, with N = Q².
pub fn sieve_check(family: &Family, trials: usize, seed: u64) -> Result<SieveReport> {
    let members = family.members();
    let q = family.spec.big_q;
    let n = (q * q) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signs = Vec::with_capacity(trials);
    let mut phases = Vec::with_capacity(trials);
    for _ in 0..trials {
        let a = coefficients(CoeffChoice::RandomSigns, n, &members, &mut rng);
        signs.push(large_sieve_ratio(&members, &a, q)?);
        let b = coefficients(CoeffChoice::RandomPhases, n, &members, &mut rng);
        phases.push(large_sieve_ratio(&members, &b, q)?);
    }
    let ones = coefficients(CoeffChoice::AllOnes, n, &members, &mut rng);
    let aligned = coefficients(CoeffChoice::Aligned, n, &members, &mut rng);
    let mut single = vec![C64::default(); n];
    single[0] = C64::new(1.0, 0.0);
    Ok(SieveReport {
        big_q: q,
        d: family.spec.d,
        n,
        family_size: members.len(),
        trials,
        max_random: signs.iter().cloned().fold(0.0, f64::max),
        mean_random: rsum(signs.iter().cloned()) / trials.max(1) as f64,
        max_phases: phases.iter().cloned().fold(0.0, f64::max),
        all_ones: large_sieve_ratio(&members, &ones, q)?,
        aligned: large_sieve_ratio(&members, &aligned, q)?,
        single_term: large_sieve_ratio(&members, &single, q)?,
    })
}

/// Zeros ρ of one character, as used by the mean-value sums.
#[derive(Clone, Debug)]
pub struct AnchoredZeros {
    pub psi: Character,
    pub zeros: Vec<C64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroMeanReport {
    pub total: f64,
    pub bound: f64,
    pub ratio: f64,
    pub anchors: usize,
}

/// P(ρ, ψ) = Σ_{n≤N} a_n ψ(n) n^{−ρ}.
pub fn dirichlet_poly(psi: &Character, a: &[C64], rho: C64) -> C64 {
    let mut s = ComplexSum::new();
    for (i, &an) in a.iter().enumerate() {
        if an == C64::default() {
            continue;
        }
        let n = (i + 1) as f64;
        s.add(an * psi.value_u(i as u64 + 1) * (-rho * n.ln()).exp());
    }
    s.value()
}

/// Σ_ψ Σ_ρ |P(ρ,ψ)|² against ln Q · Q² Σ|a_n|²/n.
pub fn zero_anchored_mean(data: &[AnchoredZeros], a: &[C64], big_q: u64) -> Result<ZeroMeanReport> {
    let n = a.len() as u64;
    if n > big_q * big_q {
        return invalid(format!("N = {n} exceeds Q² = {}", big_q * big_q));
    }
    let parts: Vec<f64> = data.par_iter().map(|z| rsum(z.zeros.iter().map(|&rho| dirichlet_poly(&z.psi, a, rho).norm_sqr()))).collect();
    let total = rsum(parts);
    let bound = (big_q as f64).ln() * (big_q * big_q) as f64 * rsum(a.iter().enumerate().map(|(i, v)| v.norm_sqr() / (i + 1) as f64));
    let anchors = data.iter().map(|z| z.zeros.len()).sum();
    Ok(ZeroMeanReport { total, bound, ratio: if bound > 0.0 { total / bound } else { 0.0 }, anchors })
}

#[derive(Clone, Debug, Serialize)]
pub struct EMeanReport {
    pub total: f64,
    pub anchors: usize,
    /// ln Q · Q² R^{−1/12} / ln R.
    pub shape: f64,
    pub ratio: f64,
}

/// Σ ℰ(ρ,ψ) over anchors against the family-mean shape.
pub fn e_mean(values: &[f64], big_q: u64, r: f64) -> Result<EMeanReport> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Missing("non-finite ℰ value".into()));
    }
    let total = rsum(values.iter().cloned());
    let shape = (big_q as f64).ln() * (big_q * big_q) as f64 * r.powf(-1.0 / 12.0) / r.ln();
    Ok(EMeanReport { total, anchors: values.len(), shape, ratio: total / shape })
}
