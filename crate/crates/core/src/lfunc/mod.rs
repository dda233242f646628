//! Dirichlet L-functions, functional-equation factors and smoothing kernels.

pub mod hurwitz;
pub mod kernels;

use crate::characters::{gauss_sum_raw, Character};
use crate::error::{invalid, Error, Result};
use crate::numeric::gamma::{ln_gamma, near_gamma_pole};
use crate::numeric::sum::ComplexSum;
use crate::numeric::C64;
use std::f64::consts::PI;

pub use hurwitz::{hurwitz_regular, hurwitz_zeta};
pub use kernels::{vartheta, vartheta_log, varsigma, varsigma_log, y_kernel, KernelParams};

/// L(s, ψ) = q^{−s} Σ_r ψ(r) ζ(s, r/q).
#[derive(Clone, Debug)]
pub struct LEvaluator {
    pub character: Character,
    /// Target absolute error (informational; the Euler–Maclaurin policy is fixed).
    pub precision: f64,
    nonzero: Vec<(f64, C64)>,
    value_sum: C64,
}

impl LEvaluator {
    pub fn new(character: Character) -> Self {
        let q = character.modulus as f64;
        let nonzero: Vec<(f64, C64)> = (1..=character.modulus)
            .filter_map(|r| {
                let v = character.value_u(r);
                (v.norm_sqr() > 0.0).then_some((r as f64 / q, v))
            })
            .collect();
        let value_sum = nonzero.iter().map(|x| x.1).sum();
        LEvaluator { character, precision: 1e-12, nonzero, value_sum }
    }

    pub fn eval(&self, s: C64) -> Result<C64> {
        let q = self.character.modulus as f64;
        let mut acc = ComplexSum::new();
        for &(a, v) in &self.nonzero {
            acc.add(v * hurwitz_regular(s, a));
        }
        let mut total = acc.value();
        if self.value_sum.norm() > 1e-9 {
            if (s - 1.0).norm() < 1e-15 {
                return Err(Error::Pole("s = 1 for a principal character".into()));
            }
            total += self.value_sum / (s - 1.0);
        }
        Ok((-s * q.ln()).exp() * total)
    }
}

pub fn l_value(ev: &LEvaluator, s: C64) -> Result<C64> {
    ev.eval(s)
}

/// Root number C(ψ) = τ(ψ)/(i^a √q).
pub fn root_number(psi: &Character) -> Result<C64> {
    if !psi.is_primitive() {
        return invalid("root number needs a primitive character");
    }
    let tau = gauss_sum_raw(psi);
    let ia = if psi.parity == 1 { C64::new(0.0, 1.0) } else { C64::new(1.0, 0.0) };
    Ok(tau / (ia * (psi.modulus as f64).sqrt()))
}

/// Functional-equation data for a primitive character.
#[derive(Clone, Debug)]
pub struct DeltaFactor {
    pub modulus: u64,
    pub parity: u8,
    pub root: C64,
}

impl DeltaFactor {
    pub fn new(psi: &Character) -> Result<Self> {
        Ok(DeltaFactor { modulus: psi.modulus, parity: psi.parity, root: root_number(psi)? })
    }

    /// Δ(s,ψ) = C(ψ)(q/π)^{1/2−s} Γ((1−s+a)/2)/Γ((s+a)/2).
    pub fn eval(&self, s: C64) -> Result<C64> {
        let a = self.parity as f64;
        let num = (1.0 - s + a) * 0.5;
        if near_gamma_pole(num, 1e-12) {
            return Err(Error::Pole(format!("Γ((1−s+a)/2) at s = {s}")));
        }
        let den = (s + a) * 0.5;
        if near_gamma_pole(den, 1e-12) {
            return Ok(C64::new(0.0, 0.0));
        }
        let lq = (self.modulus as f64 / PI).ln();
        let log = (0.5 - s) * lq + ln_gamma(num) - ln_gamma(den);
        Ok(self.root * log.exp())
    }
}

pub fn delta_factor(psi: &Character, s: C64) -> Result<C64> {
    DeltaFactor::new(psi)?.eval(s)
}

/// Δ₁(s,ψ) = Δ(s,ψ)Δ(s,ψχ).
#[derive(Clone, Debug)]
pub struct Delta1 {
    pub psi: DeltaFactor,
    pub psi_chi: DeltaFactor,
}

impl Delta1 {
    pub fn new(psi: &Character, chi: &Character) -> Result<Self> {
        let pc = psi.mul(chi);
        if !pc.is_primitive() {
            return invalid("ψχ is not primitive");
        }
        Ok(Delta1 { psi: DeltaFactor::new(psi)?, psi_chi: DeltaFactor::new(&pc)? })
    }

    pub fn eval(&self, s: C64) -> Result<C64> {
        Ok(self.psi.eval(s)? * self.psi_chi.eval(s)?)
    }
}

pub fn delta1(psi: &Character, chi: &Character, s: C64) -> Result<C64> {
    Delta1::new(psi, chi)?.eval(s)
}

/// |L(s,ψ) − Δ(s,ψ)L(1−s,ψ̄)|.
pub fn fe_residual(psi: &Character, s: C64) -> Result<f64> {
    let l = LEvaluator::new(psi.clone()).eval(s)?;
    let lbar = LEvaluator::new(psi.conj()).eval(1.0 - s)?;
    Ok((l - delta_factor(psi, s)? * lbar).norm())
}

/// Centered-difference log-derivative of Δ₁ at s (diagnostic).
pub fn delta1_log_derivative(d1: &Delta1, s: C64, h: f64) -> Result<C64> {
    let hp = d1.eval(s + h)?;
    let hm = d1.eval(s - h)?;
    let c = d1.eval(s)?;
    Ok((hp - hm) / (2.0 * h * c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{enumerate_psi_q, kronecker_character};

    #[test]
    fn leibniz() {
        let chi4 = kronecker_character(-4).unwrap();
        let ev = LEvaluator::new(chi4);
        let v = ev.eval(C64::new(1.0, 0.0)).unwrap();
        assert!((v - PI / 4.0).norm() < 1e-14);
    }

    #[test]
    fn direct_series_at_two() {
        let chi = kronecker_character(5).unwrap();
        let psi = &enumerate_psi_q(7, &chi).unwrap()[2];
        let ev = LEvaluator::new(psi.clone());
        let v = ev.eval(C64::new(2.0, 0.0)).unwrap();
        let n_max = 1_000_000u64;
        let mut acc = ComplexSum::new();
        for n in (1..=n_max).rev() {
            acc.add(psi.value_u(n) / (n as f64).powi(2));
        }
        // tail bounded by Σ_{n>N} n^{-2} < 1/N
        assert!((v - acc.value()).norm() < 1.0 / n_max as f64);
    }

    #[test]
    fn conjugation_symmetry() {
        let chi = kronecker_character(-4).unwrap();
        for psi in enumerate_psi_q(11, &chi).unwrap() {
            let s = C64::new(0.3, 4.0);
            let a = LEvaluator::new(psi.clone()).eval(s).unwrap();
            let b = LEvaluator::new(psi.conj()).eval(s.conj()).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn functional_equation_small() {
        let chi = kronecker_character(-4).unwrap();
        for q in [5u64, 7, 13] {
            for psi in enumerate_psi_q(q, &chi).unwrap() {
                let r = fe_residual(&psi, C64::new(0.3, 5.0)).unwrap();
                assert!(r < 1e-10, "q={q} r={r}");
                let d = delta_factor(&psi, C64::new(0.5, 3.0)).unwrap();
                assert!((d.norm() - 1.0).abs() < 1e-12);
                let s = C64::new(0.2, -1.7);
                let prod = delta_factor(&psi, s).unwrap() * delta_factor(&psi.conj(), 1.0 - s).unwrap();
                assert!((prod - 1.0).norm() < 1e-12);
            }
        }
        // ζ is not covered (q = 1); real character mod 3 is
        let chi3 = kronecker_character(-3).unwrap();
        assert!(fe_residual(&chi3, C64::new(-0.4, 9.0)).unwrap() < 1e-10);
    }

    #[test]
    fn delta1_unimodular() {
        let chi = kronecker_character(5).unwrap();
        for psi in enumerate_psi_q(7, &chi).unwrap() {
            let d1 = Delta1::new(&psi, &chi).unwrap();
            assert!((d1.eval(C64::new(0.5, 3.0)).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }
}
