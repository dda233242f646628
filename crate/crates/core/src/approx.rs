//! Approximation of φ₀ by exponentials φ_θ, θ ∈ T, and the split
//! φ₀ = h + k + r with <k, g₃> = 0.

use crate::bvp::InhomogeneousSolution;
use crate::error::{invalid, Error, Result};
use crate::functional::{inner, norm, IntervalFunction};
use crate::mollifier::{k_pm, MollifierContext, Sign};
use crate::numeric::special::erfc;
use crate::numeric::{c, quad, C64, I};
use crate::weights::WeightPair;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub const DUPLICATE_THETA: f64 = 1e-10;
pub const DEFAULT_TIKHONOV: f64 = 1e-12;

/// Composite Gauss–Legendre discretization of the Sobolev inner product:
/// <f,g> ≈ Σ w₁ f′ḡ′ + w₂ f ḡ.
#[derive(Clone, Debug)]
pub struct SobolevRule {
    pub xs: Vec<f64>,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
}

impl SobolevRule {
    /// Panels are sized so each one holds at most a quarter period of the
    /// fastest exponential.
    pub fn new(w: &WeightPair, max_freq: f64) -> Self {
        let panels = 32usize.max((max_freq * 2.0 / PI).ceil() as usize * 4);
        let rule = quad::gauss_legendre(16);
        let h = 2.0 / panels as f64;
        let mut xs = Vec::with_capacity(panels * 16);
        let mut w1 = Vec::with_capacity(panels * 16);
        let mut w2 = Vec::with_capacity(panels * 16);
        for p in 0..panels {
            let mid = -1.0 + h * (p as f64 + 0.5);
            for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let x = mid + 0.5 * h * t;
                xs.push(x);
                w1.push(0.5 * h * wt * w.varpi1(x));
                w2.push(0.5 * h * wt * w.varpi2(x));
            }
        }
        SobolevRule { xs, w1, w2 }
    }

    /// Rows √w₁ f′(x) followed by √w₂ f(x).
    fn column(&self, f: &dyn Fn(f64) -> (C64, C64)) -> Vec<C64> {
        let n = self.xs.len();
        let mut out = vec![C64::default(); 2 * n];
        for (k, &x) in self.xs.iter().enumerate() {
            let (v, d) = f(x);
            out[k] = d * self.w1[k].sqrt();
            out[n + k] = v * self.w2[k].sqrt();
        }
        out
    }

    fn exp_column(&self, theta: C64, log_q: f64) -> Vec<C64> {
        let a = theta * log_q;
        self.column(&|x| {
            let v = (a * x).exp();
            (v, a * v)
        })
    }
}

fn check_distinct(thetas: &[C64]) -> Result<()> {
    if thetas.is_empty() {
        return invalid("T must be non-empty");
    }
    for i in 0..thetas.len() {
        for j in 0..i {
            if (thetas[i] - thetas[j]).norm() < DUPLICATE_THETA {
                return invalid(format!("near-duplicate θ at {} and {}", thetas[j], thetas[i]));
            }
        }
    }
    Ok(())
}

fn max_freq(thetas: &[C64], log_q: f64) -> f64 {
    thetas.iter().map(|t| t.im.abs() * log_q).fold(1.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    pub size: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub condition: f64,
    pub hermitian_residual: f64,
}

/// Gram matrix G_ij = <φ_θj, φ_θi>.
pub fn gram_matrix(thetas: &[C64], log_q: f64, w: &WeightPair) -> Result<(DMatrix<C64>, GramReport)> {
    check_distinct(thetas)?;
    let rule = SobolevRule::new(w, max_freq(thetas, log_q));
    let cols: Vec<Vec<C64>> = thetas.par_iter().map(|&t| rule.exp_column(t, log_q)).collect();
    let n = thetas.len();
    let entries: Vec<C64> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            cols[j].iter().zip(&cols[i]).map(|(a, b)| a * b.conj()).sum()
        })
        .collect();
    let g = DMatrix::from_row_slice(n, n, &entries);
    let herm = (0..n * n).map(|k| (g[(k / n, k % n)] - g[(k % n, k / n)].conj()).norm()).fold(0.0, f64::max);
    let eig = g.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &e| (a.min(e), b.max(e)));
    let report = GramReport { size: n, min_eigenvalue: lo, max_eigenvalue: hi, condition: hi / lo.max(f64::MIN_POSITIVE), hermitian_residual: herm };
    Ok((g, report))
}

#[derive(Clone, Debug)]
pub struct ApproxOptions {
    /// Tikhonov parameter as a multiple of trace(G).
    pub tikhonov: f64,
    pub extension_samples: usize,
    pub circle_samples: usize,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions { tikhonov: DEFAULT_TIKHONOV, extension_samples: 801, circle_samples: 256 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxReport {
    pub size: usize,
    pub delta: f64,
    pub tikhonov_lambda: f64,
    pub tikhonov_default: f64,
    pub condition: f64,
    pub residual_norm: f64,
    pub residual_over_delta: f64,
    pub normal_residual: f64,
    pub k_norm: f64,
    pub r_norm: f64,
    pub k_over_delta: f64,
    pub r_over_delta: f64,
    pub k_g3: f64,
    pub k_g3_relative: f64,
    pub identity_residual: f64,
    pub max_coefficient: f64,
    pub b_sup_over_delta: f64,
    pub h_sup: f64,
    pub h_sup_over_log_r_sq: f64,
    pub h_prime_sup: f64,
    pub h_prime_over_r_log_r: f64,
}

#[derive(Clone, Debug)]
pub struct ApproxResult {
    pub thetas: Vec<C64>,
    pub coefficients: Vec<C64>,
    pub h: IntervalFunction,
    pub k: IntervalFunction,
    pub r: IntervalFunction,
    pub log_q: f64,
    pub report: ApproxReport,
}

impl ApproxResult {
    /// B(s) = Σ A(θ)/(s − θ).
    pub fn b(&self, s: C64) -> C64 {
        self.thetas.iter().zip(&self.coefficients).map(|(t, a)| a / (s - t)).sum()
    }
}

/// Least-squares coefficients of φ₀ on span{φ_θ}, through the SVD of the
/// discretized operator. Falls back to the Tikhonov filter σ/(σ² + λ),
/// λ = tikhonov·trace(G), when the plain solution is not admissible.
pub fn least_squares(thetas: &[C64], log_q: f64, w: &WeightPair, tikhonov: f64) -> Result<LeastSquares> {
    check_distinct(thetas)?;
    let rule = SobolevRule::new(w, max_freq(thetas, log_q));
    let cols: Vec<Vec<C64>> = thetas.par_iter().map(|&t| rule.exp_column(t, log_q)).collect();
    let m = cols[0].len();
    let n = thetas.len();
    let b = DMatrix::from_fn(m, n, |i, j| cols[j][i]);
    let y = DVector::from_vec(rule.exp_column(C64::default(), log_q));
    let trace: f64 = cols.iter().map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>()).sum();
    let svd = b.clone().svd(true, true);
    let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(smax > 0.0) {
        return Err(Error::Singular("Gram matrix vanishes".into()));
    }
    let uy = u.adjoint() * &y;
    let filtered = |lambda: f64| {
        let mut coef = DVector::<C64>::zeros(n);
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= f64::EPSILON * smax && lambda == 0.0 {
                continue;
            }
            let f = s / (s * s + lambda);
            for j in 0..n {
                coef[j] += vt[(k, j)].conj() * uy[k] * f;
            }
        }
        coef
    };
    let bound = 1.0 / tikhonov.max(f64::MIN_POSITIVE).sqrt();
    let admissible = |c: &DVector<C64>| c.iter().all(|v| v.re.is_finite() && v.im.is_finite() && v.norm() <= bound);
    let mut lambda = 0.0;
    let mut coef = filtered(0.0);
    if !admissible(&coef) {
        lambda = tikhonov * trace;
        coef = filtered(lambda);
        if !admissible(&coef) {
            return Err(Error::Singular(format!("no admissible regularization at λ = {lambda:.3e}")));
        }
    }
    let res = &y - &b * &coef;
    let normal_residual = (b.adjoint() * &res).iter().map(|v| v.norm()).fold(0.0, f64::max) / (smax * y.norm()).max(f64::MIN_POSITIVE);
    Ok(LeastSquares {
        coefficients: coef.iter().copied().collect(),
        lambda,
        default_lambda: tikhonov * trace,
        condition: (smax / smin.max(f64::MIN_POSITIVE)).powi(2),
        normal_residual,
        residual: res.norm(),
    })
}

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub coefficients: Vec<C64>,
    /// Tikhonov parameter actually applied (0 when the plain solve is used).
    pub lambda: f64,
    pub default_lambda: f64,
    pub condition: f64,
    pub normal_residual: f64,
    /// Discretized ‖φ₀ − h‖.
    pub residual: f64,
}

/// Discretized ‖φ₀ − Σ A φ_θ‖.
pub fn residual_norm(thetas: &[C64], coef: &[C64], log_q: f64, w: &WeightPair) -> f64 {
    let rule = SobolevRule::new(w, max_freq(thetas, log_q));
    let mut acc = 0.0;
    for (k, &x) in rule.xs.iter().enumerate() {
        let mut v = c(1.0, 0.0);
        let mut d = C64::default();
        for (&t, &a) in thetas.iter().zip(coef) {
            let e = a * (t * log_q * x).exp();
            v -= e;
            d -= e * t * log_q;
        }
        acc += rule.w1[k] * d.norm_sqr() + rule.w2[k] * v.norm_sqr();
    }
    acc.sqrt()
}

/// h on [−1, 1] by least squares, then the residual φ₀ − h split along g₃.
pub fn solve_h_k(thetas: &[C64], log_q: f64, r_param: f64, g3: &InhomogeneousSolution, opts: &ApproxOptions) -> Result<ApproxResult> {
    let w = g3.pair.w;
    let ls = least_squares(thetas, log_q, &w, opts.tikhonov)?;
    let coef = ls.coefficients.clone();
    let h = IntervalFunction::exponential(log_q, thetas.iter().zip(&coef).map(|(&t, &a)| (a, t)).collect());
    let phi0 = IntervalFunction::phi0(log_q);
    let rho0 = phi0.minus(&h);
    let g3f = g3.g3_table();
    let g3n = inner(&g3f, &g3f, &w)?.re;
    if !(g3n > 0.0) {
        return Err(Error::Singular("‖g₃‖ = 0".into()));
    }
    let proj = inner(&rho0, &g3f, &w)? / g3n;
    let r = g3f.scaled(proj);
    let k = rho0.minus(&r);
    let k_g3 = inner(&k, &g3f, &w)?.norm();
    let rho_norm = norm(&rho0, &w)?;
    let k_norm = norm(&k, &w)?;
    let r_norm = proj.norm() * g3n.sqrt();
    let identity_residual = (0..=200)
        .map(|i| {
            let x = -1.0 + i as f64 / 100.0;
            (phi0.at(x) - h.at(x) - k.at(x) - r.at(x)).norm()
        })
        .fold(0.0, f64::max);
    let max_coefficient = coef.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let omega = r_param / log_q;
    let b_sup = (0..opts.circle_samples)
        .map(|i| {
            let s = C64::from_polar(omega, 2.0 * PI * i as f64 / opts.circle_samples as f64);
            thetas.iter().zip(&coef).map(|(t, a)| a / (s - t)).sum::<C64>().norm()
        })
        .fold(0.0, f64::max);
    let (mut h_sup, mut hp_sup) = (0.0f64, 0.0f64);
    let n = opts.extension_samples.max(2);
    for i in 0..n {
        let x = -2.0 + 4.0 * i as f64 / (n - 1) as f64;
        h_sup = h_sup.max(h.at(x).norm());
        hp_sup = hp_sup.max(h.deriv_at(x)?.norm());
    }
    let delta = w.delta;
    let lr = r_param.ln();
    let report = ApproxReport {
        size: thetas.len(),
        delta,
        tikhonov_lambda: ls.lambda,
        tikhonov_default: ls.default_lambda,
        condition: ls.condition,
        residual_norm: rho_norm,
        residual_over_delta: rho_norm / delta,
        normal_residual: ls.normal_residual,
        k_norm,
        r_norm,
        k_over_delta: k_norm / delta,
        r_over_delta: r_norm / delta,
        k_g3,
        k_g3_relative: k_g3 / (k_norm * g3n.sqrt()).max(f64::MIN_POSITIVE),
        identity_residual,
        max_coefficient,
        b_sup_over_delta: b_sup / delta,
        h_sup,
        h_sup_over_log_r_sq: h_sup / (lr * lr),
        h_prime_sup: hp_sup,
        h_prime_over_r_log_r: hp_sup / (r_param * lr),
    };
    Ok(ApproxResult { thetas: thetas.to_vec(), coefficients: coef, h, k, r, log_q, report })
}

/// θ = ±α + πilα for |l| ≤ l0.
pub fn synthetic_lattice(alpha: f64, l0: i64) -> Vec<C64> {
    let mut v = Vec::new();
    for l in -l0..=l0 {
        for sgn in [-1.0, 1.0] {
            v.push(c(sgn * alpha, PI * l as f64 * alpha));
        }
    }
    v
}

/// The rectangle ±ω ± iη as four oriented Gauss–Legendre sides, returning
/// (node, ds) pairs.
fn rectangle(omega: f64, eta: f64, panels: usize, order: usize) -> Vec<(C64, C64)> {
    let corners = [c(omega, -eta), c(omega, eta), c(-omega, eta), c(-omega, -eta), c(omega, -eta)];
    let rule = quad::gauss_legendre(order);
    let mut out = Vec::new();
    for side in corners.windows(2) {
        let (a, b) = (side[0], side[1]);
        for p in 0..panels {
            let pa = a + (b - a) * (p as f64 / panels as f64);
            let pb = a + (b - a) * ((p + 1) as f64 / panels as f64);
            let half = (pb - pa) * 0.5;
            let mid = (pa + pb) * 0.5;
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                out.push((mid + half * t, half * w));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ContourReport {
    pub omega: f64,
    pub height: f64,
    pub nudges: Vec<String>,
    pub min_k_plus: f64,
    pub k_plus_at_rho: (f64, f64),
    pub projection_residual: f64,
    pub projection_relative: f64,
    pub value_at_zero: (f64, f64),
    pub inside: usize,
}

#[derive(Clone, Debug)]
pub struct ContourH {
    pub r1: IntervalFunction,
    pub report: ContourReport,
}

/// R̃₁(x) = (1/2πi)∮ φ_s(x) Q^{−s} K(s)^{−1} e^{s²(ln R)²/ω²} s^{−1} ds over
/// the rectangle ±ω ± iη, returned as an exponential sum in x.
pub fn contour_r1(kinv: &(dyn Fn(C64) -> C64 + Sync), log_q: f64, omega: f64, eta: f64, log_r: f64, nodes: usize) -> IntervalFunction {
    let cfac = log_r * log_r / (omega * omega);
    let pts = rectangle(omega, eta, (nodes / 32).max(1), 32);
    let terms: Vec<(C64, C64)> = pts
        .par_iter()
        .map(|&(s, ds)| {
            let wgt = ds / (2.0 * PI * I) * (-s * log_q).exp() * kinv(s) * (s * s * cfac).exp() / s;
            (wgt, s)
        })
        .collect();
    IntervalFunction::exponential(log_q, terms)
}

/// Right-side integral (1/2πi)∫_{(ω)} e^{as + cs²}/s ds = ½erfc(−a/(2√c)).
pub fn smoothed_step(a: f64, cfac: f64) -> f64 {
    0.5 * erfc(-a / (2.0 * cfac.sqrt()))
}

/// R̃₁ for the mollified 𝒦₊ at an anchor, with horizontal sides nudged to
/// heights where 𝒦₊ stays away from zero; the residue part R̃₁ − φ₀/𝒦₊(ρ)
/// is projected onto span{φ_θ} for the zeros θ inside.
pub fn contour_h(ctx: &MollifierContext, rho: C64, thetas: &[C64], nodes: usize) -> Result<ContourH> {
    let p = &ctx.params;
    let log_q = p.log_q();
    let omega = p.omega;
    let log_r = p.r.ln();
    let base = omega / log_r;
    let kp = |s: C64| k_pm(ctx, rho + s, Sign::Plus);
    let mut nudges = Vec::new();
    let mut chosen = None;
    for step in 0..12 {
        let factor = 1.0 + 0.05 * ((step + 1) / 2) as f64 * if step % 2 == 0 { 1.0 } else { -1.0 };
        let eta = base * factor;
        let mut lo = f64::INFINITY;
        for i in 0..=64 {
            let x = -omega + 2.0 * omega * i as f64 / 64.0;
            for y in [eta, -eta] {
                lo = lo.min(kp(c(x, y))?.norm());
            }
        }
        if lo > 0.05 {
            chosen = Some((eta, lo));
            break;
        }
        nudges.push(format!("height {eta:.5}: min |𝒦₊| = {lo:.3e}"));
    }
    let (eta, min_k) = chosen.ok_or_else(|| Error::Singular("𝒦₊ small on every candidate horizontal side".into()))?;
    let kinv = |s: C64| kp(s).map(|v| 1.0 / v).unwrap_or_default();
    let r1 = contour_r1(&kinv, log_q, omega, eta, log_r, nodes);
    let k0 = kp(C64::default())?;
    let inside: Vec<C64> = thetas.iter().copied().filter(|t| t.re.abs() < omega && t.im.abs() < eta && t.norm() > DUPLICATE_THETA).collect();
    let w = WeightPair::new(p.delta, p.d);
    let target = r1.minus(&IntervalFunction::phi0(log_q).scaled(1.0 / k0));
    let tn = norm(&target, &w)?;
    let projection_residual = if inside.is_empty() {
        tn
    } else {
        let rule = SobolevRule::new(&w, max_freq(&inside, log_q));
        let cols: Vec<Vec<C64>> = inside.iter().map(|&t| rule.exp_column(t, log_q)).collect();
        let b = DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i]);
        let tf = target.clone();
        let y = DVector::from_vec(rule.column(&|x| (tf.at(x), tf.deriv_at(x).unwrap_or_default())));
        let sol = b.clone().svd(true, true).solve(&y, 1e-14).map_err(|e| Error::Singular(e.into()))?;
        (&y - &b * sol).norm()
    };
    let v0 = r1.at(0.0);
    Ok(ContourH {
        r1,
        report: ContourReport {
            omega,
            height: eta,
            nudges,
            min_k_plus: min_k,
            k_plus_at_rho: (k0.re, k0.im),
            projection_residual,
            projection_relative: projection_residual / tn.max(f64::MIN_POSITIVE),
            value_at_zero: (v0.re, v0.im),
            inside: inside.len(),
        },
    })
}

/// R̃₁ restricted to the right side only, for comparison with the smoothed step.
pub fn right_side_integral(log_q: f64, omega: f64, log_r: f64, x: f64, half_height: f64, nodes: usize) -> C64 {
    let cfac = log_r * log_r / (omega * omega);
    let f = |t: f64| {
        let s = c(omega, t);
        ((x - 1.0) * log_q * s + s * s * cfac).exp() / s / (2.0 * PI)
    };
    quad::composite(&f, -half_height, half_height, nodes / 16, 16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::g3;
    use crate::params::{AnalysisParams, ParamOverrides};

    fn params(r: f64) -> AnalysisParams {
        AnalysisParams::new(5.0, 20.0, &ParamOverrides { r: Some(r), ..Default::default() }).unwrap()
    }

    #[test]
    fn gram_single_and_symmetry() {
        let p = params(10.0);
        let w = WeightPair::new(p.delta, p.d);
        let (g, rep) = gram_matrix(&[C64::default()], p.log_q(), &w).unwrap();
        let direct = quad::adaptive(&|x: f64| w.varpi2(x), -1.0, 1.0, quad::Tolerance::new(1e-14, 1e-13)).value;
        assert!((g[(0, 0)].re - direct).abs() < 1e-12 * direct);
        let th = [c(0.1, 0.3), c(-0.2, 0.05), c(0.0, -0.4)];
        let (g, rep3) = gram_matrix(&th, p.log_q(), &w).unwrap();
        assert!(rep3.hermitian_residual < 1e-12 * rep3.max_eigenvalue);
        assert!(rep3.min_eigenvalue > 0.0 && rep.size == 1);
        // against the adaptive inner product
        let a = IntervalFunction::phi_s(th[0], p.log_q());
        let b = IntervalFunction::phi_s(th[1], p.log_q());
        assert!((g[(0, 1)] - inner(&b, &a, &w).unwrap()).norm() < 1e-10 * g[(0, 0)].norm());
        let (g2, _) = gram_matrix(&[c(0.3, 0.0), c(-0.3, 0.0)], p.log_q(), &w).unwrap();
        assert!(g2.iter().all(|v| v.im.abs() < 1e-14 * v.norm().max(1.0)));
        assert!(gram_matrix(&[c(0.1, 0.0), c(0.1 + 1e-12, 0.0)], p.log_q(), &w).is_err());
    }

    #[test]
    fn zero_theta_recovers_phi0() {
        let p = params(10.0);
        let sol = g3(&p, None).unwrap();
        let res = solve_h_k(&[C64::default()], p.log_q(), p.r, &sol, &ApproxOptions::default()).unwrap();
        assert!((res.coefficients[0] - 1.0).norm() < 1e-10);
        assert!(res.report.residual_norm < 1e-10);
        assert!(res.report.identity_residual < 1e-12);
    }

    #[test]
    fn lattice_split_and_monotone() {
        let p = params(10.0);
        let sol = g3(&p, None).unwrap();
        let mut prev = f64::INFINITY;
        for l0 in [0, 1, 2, 4, 8, 12] {
            let th = synthetic_lattice(p.alpha, l0);
            let res = solve_h_k(&th, p.log_q(), p.r, &sol, &ApproxOptions::default()).unwrap();
            assert!(res.report.identity_residual < 1e-10);
            assert!(res.report.k_g3 < 1e-8 * res.report.k_norm.max(1.0));
            let rn = residual_norm(&th, &res.coefficients, p.log_q(), &sol.pair.w);
            assert!(rn <= prev * (1.0 + 1e-9), "l0 = {l0}: {rn} > {prev}");
            assert!(res.report.normal_residual < 1e-8);
            prev = rn;
        }
    }

    #[test]
    fn right_side_is_smoothed_step() {
        let (log_q, omega, log_r) = (3.0, 10.0 / 3.0, 10f64.ln());
        let cfac = log_r * log_r / (omega * omega);
        for x in [-0.5, 0.8, 0.95, 1.0, 1.05] {
            let v = right_side_integral(log_q, omega, log_r, x, 40.0, 4096);
            let e = smoothed_step((x - 1.0) * log_q, cfac);
            assert!((v - e).norm() < 1e-9, "x = {x}: {v} vs {e}");
        }
        // K ≡ 1 on the full rectangle: residue at 0 only; the left side
        // grows like Q^{(1−x)ω} so only x near 1 is well conditioned
        let one = |_: C64| c(1.0, 0.0);
        let r1 = contour_r1(&one, log_q, omega, omega / log_r, log_r, 512);
        for x in [0.5, 0.9, 1.0] {
            assert!((r1.at(x) - 1.0).norm() < 1e-10, "{}", r1.at(x));
        }
        // K = −Q^{−2s}, the left-side model: residue −1 at 0
        let left = move |s: C64| -(2.0 * s * log_q).exp();
        let rl = contour_r1(&left, log_q, omega, omega / log_r, log_r, 512);
        for x in [-1.0, -0.9, -0.5] {
            assert!((rl.at(x) + 1.0).norm() < 1e-10, "{}", rl.at(x));
        }
        // scaling of the exponential factor enters linearly via kinv
        let two = |_: C64| c(2.0, 0.0);
        let r2 = contour_r1(&two, log_q, omega, omega / log_r, log_r, 512);
        assert!((r2.at(0.3) - 2.0 * r1.at(0.3)).norm() < 1e-12);
    }
}
