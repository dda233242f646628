//! The linear functional Φ, the convolution algebra, the weighted Sobolev
//! inner product, and the derived functionals Φ*, Ξ, Θ, U±, 𝒳±, 𝒴, ℰ.

pub mod function;

pub use function::{conv_with_exp, convolve, convolve_at, convolve_numeric_at, exp_pair, FunctionSpec, IntervalFunction, Rule, Smoothness};

use crate::error::{Error, Result};
use crate::lfunc::vartheta_log;
use crate::mollifier::{floor_guarded, k_pm, upsilon_functional, MollifierContext, Sign, UpsilonReport};
use crate::numeric::special::{sinc, sine_integral};
use crate::numeric::sum::ComplexSum;
use crate::numeric::{c, quad, C64};
use crate::weights::WeightPair;
use serde::Serialize;
use std::f64::consts::{E, PI};

fn inner_tol() -> quad::Tolerance {
    quad::Tolerance { abs: 1e-14, rel: 1e-12, max_depth: 40, order: 24 }
}

/// <f,g> = ∫ f′ ḡ′ ϖ₁ + f ḡ ϖ₂ over [−1, 1].
pub fn inner(f: &IntervalFunction, g: &IntervalFunction, w: &WeightPair) -> Result<C64> {
    for h in [f, g] {
        if !h.covers(-1.0, 1.0) {
            return Err(Error::Domain("inner product needs functions on [−1, 1]".into()));
        }
        if !h.has_derivative() {
            return Err(Error::Missing("derivative rule for the inner product".into()));
        }
    }
    let integrand = |x: f64| {
        let d = f.deriv_at(x).unwrap_or_default() * g.deriv_at(x).unwrap_or_default().conj();
        d * w.varpi1(x) + f.at(x) * g.at(x).conj() * w.varpi2(x)
    };
    Ok(quad::adaptive_pieces(&integrand, &[-1.0, -0.5, 0.0, 0.5, 1.0], inner_tol()).value)
}

pub fn norm(f: &IntervalFunction, w: &WeightPair) -> Result<f64> {
    Ok(inner(f, f, w)?.re.max(0.0).sqrt())
}

/// A finite sum Σ w_n f(x_n) with the index n kept for range filters.
#[derive(Clone, Debug, Serialize)]
pub struct PointSum {
    pub terms: Vec<(usize, f64, C64)>,
}

impl PointSum {
    pub fn apply(&self, f: &IntervalFunction) -> Result<C64> {
        let mut acc = ComplexSum::new();
        for &(_, x, w) in &self.terms {
            acc.add(w * f.eval(x)?);
        }
        Ok(acc.value())
    }

    pub fn apply_fn<F: Fn(f64) -> C64>(&self, f: F) -> C64 {
        let mut acc = ComplexSum::new();
        for &(_, x, w) in &self.terms {
            acc.add(w * f(x));
        }
        acc.value()
    }

    fn filtered(&self, keep: impl Fn(usize) -> bool, shift: f64) -> PointSum {
        PointSum { terms: self.terms.iter().filter(|t| keep(t.0)).map(|&(n, x, w)| (n, x + shift, w)).collect() }
    }
}

/// Weights of Φ(·;ρ,ψ) and the sums built from the same coefficients.
#[derive(Clone, Debug)]
pub struct PhiData {
    pub rho: C64,
    pub log_q: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub r: f64,
    /// n ≤ Q^{3/2}: λ₊(n)ψ(n)n^{−ρ}ϑ(Q^{4/3}/n) at x = 1 − α log n.
    pub plus: PointSum,
    /// n ≤ Q: λ₋(n)ψ̄(n)n^{−(1−ρ)}ϑ(Q^{2/3}/n) at x = α log n − 1.
    pub minus: PointSum,
    /// Same ranges with λ₊ and λ₋ swapped (for 𝒳± and 𝒴).
    pub plus_swapped: PointSum,
    pub minus_swapped: PointSum,
}

impl PhiData {
    pub fn new(ctx: &MollifierContext, rho: C64) -> Result<Self> {
        let p = &ctx.params;
        let lq = p.log_q();
        let n32 = floor_guarded(p.big_q.powf(1.5));
        let n1 = floor_guarded(p.big_q);
        ctx.lambda_plus.covers(n32)?;
        ctx.lambda_minus.covers(n32)?;
        let kp = ctx.kernel();
        let pb = ctx.psi.conj();
        let mut plus = Vec::new();
        let mut plus_sw = Vec::new();
        for n in 1..=n32 {
            let ln = (n as f64).ln();
            let base = ctx.psi.value_u(n as u64) * (-rho * ln).exp() * vartheta_log(4.0 / 3.0 * lq - ln, kp);
            let x = 1.0 - ln / lq;
            plus.push((n, x, base * ctx.lambda_plus.values[n]));
            plus_sw.push((n, x, base * ctx.lambda_minus.values[n]));
        }
        let mut minus = Vec::new();
        let mut minus_sw = Vec::new();
        for n in 1..=n1 {
            let ln = (n as f64).ln();
            let base = pb.value_u(n as u64) * (-(1.0 - rho) * ln).exp() * vartheta_log(2.0 / 3.0 * lq - ln, kp);
            let x = ln / lq - 1.0;
            minus.push((n, x, base * ctx.lambda_minus.values[n]));
            minus_sw.push((n, x, base * ctx.lambda_plus.values[n]));
        }
        Ok(PhiData {
            rho,
            log_q: lq,
            alpha: p.alpha,
            epsilon: p.epsilon,
            r: p.r,
            plus: PointSum { terms: plus },
            minus: PointSum { terms: minus },
            plus_swapped: PointSum { terms: plus_sw },
            minus_swapped: PointSum { terms: minus_sw },
        })
    }

    pub fn phi_fn<F: Fn(f64) -> C64>(&self, f: F) -> C64 {
        self.plus.apply_fn(&f) - self.minus.apply_fn(&f)
    }

    /// Φ₁ as a pair of sums over n > 1.
    pub fn phi1_sums(&self) -> (PointSum, PointSum) {
        (self.plus.filtered(|n| n > 1, 0.0), self.minus.filtered(|n| n > 1, 0.0))
    }

    /// Φ* sums at shift ε: Q^ε < n ≤ Q^{3/2} and 1 < n ≤ Q.
    pub fn phi_star_sums(&self, eps: f64) -> (PointSum, PointSum) {
        let head = floor_guarded((eps * self.log_q).exp());
        (self.plus.filtered(|n| n > head, eps), self.minus.filtered(|n| n > 1, eps))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiValue {
    pub value: C64,
    pub boundary: C64,
    pub phi1: C64,
    /// |Φ − (ϑ(Q^{4/3})f(1) − ϑ(Q^{2/3})f(−1) + Φ₁)|.
    pub decomposition_residual: f64,
}

pub fn phi(f: &IntervalFunction, data: &PhiData) -> Result<PhiValue> {
    let value = data.plus.apply(f)? - data.minus.apply(f)?;
    let (p1, m1) = data.phi1_sums();
    let phi1 = p1.apply(f)? - m1.apply(f)?;
    let t_plus = data.plus.terms[0].2;
    let t_minus = data.minus.terms[0].2;
    let boundary = t_plus * f.eval(1.0)? - t_minus * f.eval(-1.0)?;
    Ok(PhiValue { value, boundary, phi1, decomposition_residual: (value - boundary - phi1).norm() })
}

pub fn phi1(f: &IntervalFunction, data: &PhiData) -> Result<C64> {
    let (p1, m1) = data.phi1_sums();
    Ok(p1.apply(f)? - m1.apply(f)?)
}

/// Φ*(f) with the shift ε.
pub fn phi_star(f: &IntervalFunction, data: &PhiData, eps: f64) -> Result<C64> {
    let (p, m) = data.phi_star_sums(eps);
    Ok(p.apply(f)? - m.apply(f)?)
}

/// Φ(φ_s) − Q^s𝒦₊(ρ+s,ψ).
pub fn phi_exponential_diagnostic(ctx: &MollifierContext, data: &PhiData, s: C64) -> Result<C64> {
    let v = data.phi_fn(|x| (s * (x * data.log_q)).exp());
    Ok(v - (s * data.log_q).exp() * k_pm(ctx, data.rho + s, Sign::Plus)?)
}

/// U₊(x) = 1/2 + Si(xR)/π and U₋ = 1 − U₊, the closed forms of the
/// half-circle integrals (1/2πi)∫_{𝒞±} Q^{xs} ds/s.
pub fn u_pm(x: f64, r: f64, sign: Sign) -> f64 {
    let si = sine_integral(x * r) / PI;
    match sign {
        Sign::Plus => 0.5 + si,
        Sign::Minus => 0.5 - si,
    }
}

/// Same by Gauss–Legendre on the half circle.
pub fn u_pm_contour(x: f64, r: f64, sign: Sign, nodes: usize) -> f64 {
    let (a, b) = match sign {
        Sign::Plus => (-PI / 2.0, PI / 2.0),
        Sign::Minus => (PI / 2.0, 3.0 * PI / 2.0),
    };
    let f = |phi: f64| (x * r * phi.cos()).exp() * (x * r * phi.sin()).cos();
    quad::composite(&f, a, b, 8, nodes) / (2.0 * PI)
}

/// (1/π)∫_R^∞ sin(εy)/y dy by periods plus the asymptotic tail.
pub fn sine_tail(eps: f64, r: f64) -> f64 {
    // substitute u = εy; integrate [εR, U] by GL per half period
    let lo = eps * r;
    let periods = 4000usize;
    let hi = (lo / PI).ceil() * PI + periods as f64 * PI;
    let f = |u: f64| u.sin() / u;
    let first = (lo / PI).ceil() * PI;
    let mut acc = quad::fixed(&f, lo, first, 30);
    let mut k = first;
    while k < hi - 1e-9 {
        acc += quad::fixed(&f, k, k + PI, 20);
        k += PI;
    }
    // ∫_U^∞ sin u/u du ≈ cos U/U − 2 sin U/U² ... with sin U = 0
    acc += hi.cos() / hi - 2.0 * hi.cos() / hi.powi(3);
    acc / PI
}

/// Half-circle nodes s = ωe^{iφ} and weights folding in ds = i s dφ.
fn half_circle(omega: f64, sign: Sign, n: usize) -> Vec<(C64, C64)> {
    let (a, b) = match sign {
        Sign::Plus => (-PI / 2.0, PI / 2.0),
        Sign::Minus => (PI / 2.0, 3.0 * PI / 2.0),
    };
    let rule = quad::gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| {
            let s = C64::from_polar(omega, mid + half * t);
            (s, c(0.0, 1.0) * s * (w * half))
        })
        .collect()
}

pub const XI_START_NODES: usize = 64;
pub const XI_MAX_NODES: usize = 1024;
pub const XI_TOL: f64 = 1e-8;

type Level = (usize, Vec<(C64, C64)>, Vec<(C64, C64)>);

fn build_level(ctx: &MollifierContext, data: &PhiData, omega: f64, n: usize) -> Result<Level> {
    let mk = |sign: Sign, pow: f64| -> Result<Vec<(C64, C64)>> {
        half_circle(omega, sign, n)
            .into_iter()
            .map(|(s, w)| Ok((s, w * k_pm(ctx, data.rho + s, Sign::Minus)? * (pow * s * data.log_q).exp())))
            .collect()
    };
    Ok((n, mk(Sign::Plus, data.epsilon)?, mk(Sign::Minus, 2.0 + data.epsilon)?))
}

/// Contour data for Ξ: nodes on 𝒞± with 𝒦₋(ρ+s) and the Q-power factors.
#[derive(Clone, Debug)]
pub struct XiEngine {
    pub data: PhiData,
    pub omega: f64,
    levels: Vec<Level>,
}

impl XiEngine {
    pub fn new(ctx: &MollifierContext, data: PhiData) -> Result<Self> {
        let omega = ctx.params.omega;
        let levels = vec![build_level(ctx, &data, omega, XI_START_NODES)?];
        Ok(XiEngine { data, omega, levels })
    }

    fn ensure_level(&mut self, ctx: &MollifierContext, idx: usize) -> Result<bool> {
        while self.levels.len() <= idx {
            let n = self.levels.last().unwrap().0 * 2;
            if n > XI_MAX_NODES {
                return Ok(false);
            }
            let lv = build_level(ctx, &self.data, self.omega, n)?;
            self.levels.push(lv);
        }
        Ok(true)
    }

    fn level_value(&self, f: &IntervalFunction, idx: usize) -> C64 {
        let (_, plus, minus) = &self.levels[idx];
        let lq = self.data.log_q;
        let eval = |nodes: &Vec<(C64, C64)>| -> C64 {
            let mut acc = ComplexSum::new();
            for &(s, w) in nodes {
                let v = self.data.phi_fn(|x| conv_with_exp(f, s, lq, x));
                acc.add(w * v);
            }
            acc.value()
        };
        lq / (2.0 * PI) * c(0.0, -1.0) * (eval(plus) - eval(minus) / (E * E))
    }

    /// Ξ(f): node count doubled from 64 until successive values agree to 1e−8.
    pub fn xi(&mut self, ctx: &MollifierContext, f: &IntervalFunction) -> Result<XiValue> {
        if !f.covers(-1.0, 1.0) {
            return Err(Error::Domain("Ξ needs f on [−1, 1]".into()));
        }
        let mut prev = self.level_value(f, 0);
        let mut idx = 1;
        let mut change = f64::INFINITY;
        loop {
            if !self.ensure_level(ctx, idx)? {
                return Err(Error::Quadrature { value: prev.norm(), change });
            }
            let cur = self.level_value(f, idx);
            change = (cur - prev).norm();
            if change <= XI_TOL * cur.norm().max(1.0) {
                return Ok(XiValue { value: cur, nodes: self.levels[idx].0, change });
            }
            prev = cur;
            idx += 1;
        }
    }

    /// Ξ at a fixed node count 64·2^k (exactly linear in f).
    pub fn xi_fixed(&mut self, ctx: &MollifierContext, f: &IntervalFunction, nodes: usize) -> Result<C64> {
        let mut idx = 0;
        let mut n = XI_START_NODES;
        while n < nodes {
            n *= 2;
            idx += 1;
        }
        if n != nodes || !self.ensure_level(ctx, idx)? {
            return Err(Error::Invalid(format!("node count {nodes} not on the doubling ladder up to {XI_MAX_NODES}")));
        }
        Ok(self.level_value(f, idx))
    }

    pub fn theta(&mut self, ctx: &MollifierContext, f: &IntervalFunction) -> Result<ThetaValue> {
        let eps = self.data.epsilon;
        let xi = self.xi(ctx, f)?;
        let ps = phi_star(f, &self.data, eps)?;
        let head = -(1.0 - E.powi(-2)) * f.eval(-1.0 + eps)?;
        Ok(ThetaValue { value: head + xi.value + ps, xi, phi_star: ps, boundary: head })
    }

    /// Θ with Ξ at a fixed node count, so exactly linear in f.
    pub fn theta_fixed(&mut self, ctx: &MollifierContext, f: &IntervalFunction, nodes: usize) -> Result<C64> {
        let eps = self.data.epsilon;
        let xi = self.xi_fixed(ctx, f, nodes)?;
        let head = -(1.0 - E.powi(-2)) * f.eval(-1.0 + eps)?;
        Ok(head + xi + phi_star(f, &self.data, eps)?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct XiValue {
    pub value: C64,
    pub nodes: usize,
    pub change: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaValue {
    pub value: C64,
    pub xi: XiValue,
    pub phi_star: C64,
    pub boundary: C64,
}

/// Θ(φ₀) against (1 − e^{−2})U₋(ε)Φ(φ₀).
#[derive(Clone, Debug, Serialize)]
pub struct ThetaShape {
    pub theta_phi0: C64,
    pub predicted: C64,
    pub residual: f64,
}

pub fn theta_shape(engine: &mut XiEngine, ctx: &MollifierContext) -> Result<ThetaShape> {
    let phi0 = IntervalFunction::phi0(engine.data.log_q);
    let th = engine.theta(ctx, &phi0)?;
    let ph = phi(&phi0, &engine.data)?.value;
    let predicted = (1.0 - E.powi(-2)) * u_pm(engine.data.epsilon, engine.data.r, Sign::Minus) * ph;
    Ok(ThetaShape { theta_phi0: th.value, predicted, residual: (th.value - predicted).norm() })
}

/// X₊(x) = sin(Rx)/(πx) + sin(R(2+x))/(πe²(2+x)).
pub fn x_plus(x: f64, r: f64) -> f64 {
    r / PI * (sinc(r * x) + sinc(r * (2.0 + x)) / (E * E))
}

/// X₋(x) = sin(Rx)/(πe²x) + sin(R(x−2))/(π(x−2)).
pub fn x_minus(x: f64, r: f64) -> f64 {
    r / PI * (sinc(r * x) / (E * E) + sinc(r * (x - 2.0)))
}

/// 𝒳₊(z) = Σ_{1<n≤Q^{3/2}} λ₋ψ n^{−ρ}ϑ(Q^{4/3}/n) X₊(z − α log n).
pub fn script_x_plus(data: &PhiData, z: f64) -> C64 {
    let mut acc = ComplexSum::new();
    for &(n, x, w) in &data.plus_swapped.terms {
        if n > 1 {
            // x = 1 − α log n
            acc.add(w * x_plus(z - (1.0 - x), data.r));
        }
    }
    acc.value()
}

/// 𝒳₋(z) = Σ_{1<n≤Q} λ₊ψ̄ n^{−(1−ρ)}ϑ(Q^{2/3}/n) X₋(z + α log n).
pub fn script_x_minus(data: &PhiData, z: f64) -> C64 {
    let mut acc = ComplexSum::new();
    for &(n, x, w) in &data.minus_swapped.terms {
        if n > 1 {
            // x = α log n − 1
            acc.add(w * x_minus(z + x + 1.0, data.r));
        }
    }
    acc.value()
}

#[derive(Clone, Debug, Serialize)]
pub struct YValues {
    pub y1: C64,
    pub y2: C64,
    pub y3: C64,
    pub y4: C64,
}

pub fn y_values(data: &PhiData) -> YValues {
    let (eps, r) = (data.epsilon, data.r);
    let al_log = |x: f64, plus: bool| if plus { 1.0 - x } else { x + 1.0 };
    let sum = |ps: &PointSum, skip_one: bool, f: &dyn Fn(f64) -> f64| -> C64 {
        let mut acc = ComplexSum::new();
        for &(n, x, w) in &ps.terms {
            if !(skip_one && n == 1) {
                acc.add(w * f(x));
            }
        }
        acc.value()
    };
    let y1 = sum(&data.plus_swapped, true, &|x| u_pm(eps - al_log(x, true), r, Sign::Plus));
    let y2 = sum(&data.minus_swapped, false, &|x| u_pm(-2.0 + eps + al_log(x, false), r, Sign::Plus));
    let y3 = sum(&data.plus_swapped, false, &|x| u_pm(2.0 + eps - al_log(x, true), r, Sign::Minus));
    let y4 = sum(&data.minus_swapped, true, &|x| u_pm(eps + al_log(x, false), r, Sign::Minus));
    YValues { y1, y2, y3, y4 }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub e1: f64,
    pub e2: f64,
    pub upsilon: UpsilonReport,
    pub upsilon_term: f64,
    pub e: f64,
    pub y: YValues,
    /// R^{−1/12}, the lower-bound scale of the fundamental inequality.
    pub threshold: f64,
    /// ℰ·R^{1/12}.
    pub ratio: f64,
}

fn e1_tol() -> quad::Tolerance {
    quad::Tolerance { abs: 1e-13, rel: 1e-10, max_depth: 40, order: 24 }
}

/// ℰ₁, ℰ₂ and ℰ = Υ/(R^{1/12} log R) + ℰ₁ + ℰ₂.
pub fn error_functionals(ctx: &MollifierContext, data: &PhiData) -> Result<ErrorReport> {
    let p = &ctx.params;
    let (eps, d1) = (p.epsilon, p.delta1);
    let integrand = |shift: f64| {
        move |y: f64| script_x_plus(data, shift - y).norm_sqr() + script_x_minus(data, shift - y).norm_sqr()
    };
    let panels = |a: f64, b: f64| -> Vec<f64> {
        let k = ((b - a) * p.r / PI).ceil().max(1.0) as usize;
        (0..=k).map(|i| a + (b - a) * i as f64 / k as f64).collect()
    };
    let top = quad::adaptive_pieces(&integrand(1.0 + eps), &panels(1.0 - 2.0 * d1, 1.0), e1_tol());
    let bot = quad::adaptive_pieces(&integrand(-1.0 + eps), &panels(-1.0, -1.0 + 2.0 * d1), e1_tol());
    let e1 = top.value + bot.value;
    let y = y_values(data);
    let e2 = (y.y1.norm_sqr() + y.y2.norm_sqr() + y.y3.norm_sqr() + y.y4.norm_sqr()) / eps;
    let upsilon = upsilon_functional(ctx, data.rho)?;
    let r = p.r;
    let upsilon_term = upsilon.total / (r.powf(1.0 / 12.0) * r.ln());
    let e = upsilon_term + e1 + e2;
    let threshold = r.powf(-1.0 / 12.0);
    Ok(ErrorReport { e1, e2, upsilon, upsilon_term, e, y, threshold, ratio: e / threshold })
}

/// |Φ₁(f)|/(‖f‖ log R).
pub fn phi1_ratio(f: &IntervalFunction, data: &PhiData, w: &WeightPair) -> Result<f64> {
    let n = norm(f, w)?;
    Ok(phi1(f, data)?.norm() / (n * data.r.ln()))
}

#[cfg(test)]
mod tests;
