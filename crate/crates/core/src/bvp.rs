//! Boundary-value solutions g₁, g₂, g₃ of [ϖ₁g′]′ − ϖ₂g = source and the
//! bump data 𝒯₀, 𝒯₁, 𝒯₂.

use crate::error::{invalid, Result};
use crate::functional::function::CFn;
use crate::functional::{inner, IntervalFunction};
use crate::numeric::{cr, quad, C64};
use crate::params::AnalysisParams;
use crate::weights::WeightPair;
use serde::Serialize;
use std::sync::Arc;

/// I(x) = ∫_0^x (1 + δ − y²)^d dy.
fn p_power_integral(w: &WeightPair, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let panels = ((w.d / 10.0).ceil() as usize).max(1);
    quad::composite(&|y: f64| w.p(y).powf(w.d), 0.0, x, panels, 40)
}

/// Closed-form homogeneous solutions g₁ (even) and g₂ (odd).
#[derive(Clone, Debug, Serialize)]
pub struct HomogeneousPair {
    pub w: WeightPair,
    /// 𝒜 = 4d²δ^{1−d}∫_0^1 P^d + 2dδ².
    pub a_const: f64,
}

impl HomogeneousPair {
    pub fn new(w: WeightPair) -> Result<Self> {
        if !(w.delta > 0.0 && w.delta < 1.0) {
            return invalid("δ must lie in (0, 1)");
        }
        if !(w.d >= 2.0) {
            return invalid("d must be at least 2");
        }
        let (d, dl) = (w.d, w.delta);
        let a_const = 4.0 * d * d * ((1.0 - d) * dl.ln()).exp() * p_power_integral(&w, 1.0) + 2.0 * d * dl * dl;
        Ok(HomogeneousPair { w, a_const })
    }

    pub fn g1(&self, x: f64) -> f64 {
        let (d, dl) = (self.w.d, self.w.delta);
        ((d - 2.0) * dl.ln() - d * self.w.p(x).ln()).exp() / (2.0 * d)
    }

    /// g₁′ = δ^{d−2} x P^{−d−1}.
    pub fn g1_prime(&self, x: f64) -> f64 {
        let (d, dl) = (self.w.d, self.w.delta);
        x * ((d - 2.0) * dl.ln() - (d + 1.0) * self.w.p(x).ln()).exp()
    }

    /// (ϖ₁g₁′)′ = δ(1 + δ + x²)/P².
    pub fn flux1_prime(&self, x: f64) -> f64 {
        let p = self.w.p(x);
        self.w.delta * (1.0 + self.w.delta + x * x) / (p * p)
    }

    pub fn g2(&self, x: f64) -> f64 {
        let (d, dl) = (self.w.d, self.w.delta);
        2.0 * d / (self.a_const * dl) * (-d * self.w.p(x).ln()).exp() * p_power_integral(&self.w, x)
    }

    /// g₂′ = 2d(𝒜δ)^{−1}[1 + 2dx I(x) P^{−d−1}].
    pub fn g2_prime(&self, x: f64) -> f64 {
        let (d, dl) = (self.w.d, self.w.delta);
        let i = p_power_integral(&self.w, x);
        2.0 * d / (self.a_const * dl) * (1.0 + 2.0 * d * x * i * (-(d + 1.0) * self.w.p(x).ln()).exp())
    }

    /// (ϖ₁g₂′)′ = 4d²δ^{2−d} I (1 + δ + x²)/(𝒜P²).
    pub fn flux2_prime(&self, x: f64) -> f64 {
        let (d, dl) = (self.w.d, self.w.delta);
        let p = self.w.p(x);
        4.0 * d * d * ((2.0 - d) * dl.ln()).exp() * p_power_integral(&self.w, x) * (1.0 + dl + x * x) / (self.a_const * p * p)
    }

    pub fn g1_fn(&self) -> IntervalFunction {
        let (a, b) = (self.clone(), self.clone());
        let f: CFn = Arc::new(move |x| cr(a.g1(x)));
        let df: CFn = Arc::new(move |x| cr(b.g1_prime(x)));
        IntervalFunction::custom("g1", (-1.0, 1.0), f, Some(df))
    }

    pub fn g2_fn(&self) -> IntervalFunction {
        let (a, b) = (self.clone(), self.clone());
        let f: CFn = Arc::new(move |x| cr(a.g2(x)));
        let df: CFn = Arc::new(move |x| cr(b.g2_prime(x)));
        IntervalFunction::custom("g2", (-1.0, 1.0), f, Some(df))
    }
}

pub fn g1_g2(params: &AnalysisParams) -> Result<HomogeneousPair> {
    HomogeneousPair::new(WeightPair::new(params.delta, params.d))
}

/// 𝒯₀ (quintic smoothstep on 1−2δ₁ ≤ |x| ≤ 1−δ₁), 𝒯₁, and the normalized
/// bump 𝒯₂ centred at −1+ε.
#[derive(Clone, Debug, Serialize)]
pub struct BumpData {
    pub delta1: f64,
    pub epsilon: f64,
    pub r: f64,
    pub width: f64,
    pub center: f64,
    pub warnings: Vec<String>,
}

pub fn default_bump_width(r: f64) -> f64 {
    r.powi(-10).max(1e3 * f64::EPSILON)
}

impl BumpData {
    pub fn new(delta1: f64, epsilon: f64, r: f64, width: Option<f64>) -> Result<Self> {
        let width = width.unwrap_or_else(|| default_bump_width(r));
        if !(width > 0.0) {
            return invalid("bump width must be positive");
        }
        if !(delta1 > 0.0 && delta1 < 0.5) {
            return invalid("δ₁ must lie in (0, 1/2)");
        }
        if !(epsilon > width && epsilon < 2.0 - width) {
            return invalid("𝒯₂ support leaves [−1, 1]");
        }
        let mut warnings = Vec::new();
        if !(epsilon > 0.0 && epsilon < delta1) {
            warnings.push(format!("ε = {epsilon:.4} outside (0, δ₁ = {delta1:.4})"));
        }
        Ok(BumpData { delta1, epsilon, r, width, center: -1.0 + epsilon, warnings })
    }

    pub fn t0(&self, x: f64) -> f64 {
        let a = x.abs();
        let lo = 1.0 - 2.0 * self.delta1;
        if a <= lo {
            return 0.0;
        }
        if a >= 1.0 - self.delta1 {
            return 1.0;
        }
        let t = (a - lo) / self.delta1;
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }

    pub fn t1(&self, x: f64) -> f64 {
        let t0 = self.t0(x);
        if t0 == 0.0 {
            return 0.0;
        }
        let u = if x >= 0.0 { 1.0 + self.epsilon - x } else { -1.0 + self.epsilon - x };
        (self.r * u).sin() / u * t0
    }

    pub fn t2(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        let v = 1.0 - u * u;
        35.0 / (32.0 * self.width) * v * v * v
    }

    /// 𝒯 = 𝒯₁ − 𝒯₂.
    pub fn t(&self, x: f64) -> f64 {
        self.t1(x) - self.t2(x)
    }

    /// Points where 𝒯 changes its piecewise formula.
    pub fn breakpoints(&self) -> Vec<f64> {
        let a = 1.0 - 2.0 * self.delta1;
        let b = 1.0 - self.delta1;
        let mut v = vec![-1.0, -b, -a, 0.0, a, b, 1.0, self.center - self.width, self.center, self.center + self.width];
        v.retain(|x| (-1.0..=1.0).contains(x));
        v.sort_by(|p, q| p.partial_cmp(q).unwrap());
        v.dedup_by(|p, q| (*p - *q).abs() < 1e-15);
        v
    }

    /// ∫_{−1}^{1} f 𝒯 by quadrature split at the breakpoints.
    pub fn integrate_against(&self, f: &dyn Fn(f64) -> C64) -> C64 {
        let g = |x: f64| f(x) * self.t(x);
        let mut pts = self.breakpoints();
        refine_panels(&mut pts, 0.5 / self.r.max(1.0));
        quad::adaptive_pieces(&g, &pts, quad::Tolerance::new(1e-14, 1e-13)).value
    }
}

pub fn bump_data(params: &AnalysisParams, width: Option<f64>) -> Result<BumpData> {
    BumpData::new(params.delta1, params.epsilon, params.r, width)
}

/// Splits panels longer than `max` into equal parts.
fn refine_panels(pts: &mut Vec<f64>, max: f64) {
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let k = ((w[1] - w[0]) / max).ceil().max(1.0) as usize;
        for i in 1..k {
            out.push(w[0] + (w[1] - w[0]) * i as f64 / k as f64);
        }
        out.push(w[1]);
    }
    *pts = out;
}

/// Cumulative integral F(x) = ∫_0^x f on panels, tabulated at panel ends.
#[derive(Clone, Debug)]
struct Cumulative {
    pts: Vec<f64>,
    vals: Vec<f64>,
    zero_idx: usize,
}

const CUM_ORDER: usize = 20;

impl Cumulative {
    fn new(pts: &[f64], f: &dyn Fn(f64) -> f64) -> Self {
        let zero_idx = pts.iter().position(|&x| x == 0.0).expect("panels contain 0");
        let mut vals = vec![0.0; pts.len()];
        for i in zero_idx + 1..pts.len() {
            vals[i] = vals[i - 1] + quad::fixed(&|y: f64| f(y), pts[i - 1], pts[i], CUM_ORDER);
        }
        for i in (0..zero_idx).rev() {
            vals[i] = vals[i + 1] - quad::fixed(&|y: f64| f(y), pts[i], pts[i + 1], CUM_ORDER);
        }
        Cumulative { pts: pts.to_vec(), vals, zero_idx }
    }

    fn eval(&self, x: f64, f: &dyn Fn(f64) -> f64) -> f64 {
        if x >= 0.0 {
            let k = self.pts.partition_point(|&p| p <= x).max(self.zero_idx + 1) - 1;
            let k = k.min(self.pts.len() - 1);
            self.vals[k] + quad::fixed(&|y: f64| f(y), self.pts[k], x, CUM_ORDER)
        } else {
            let k = self.pts.partition_point(|&p| p < x).min(self.zero_idx);
            self.vals[k] - quad::fixed(&|y: f64| f(y), x, self.pts[k], CUM_ORDER)
        }
    }
}

const CHEB_POINTS: usize = 24;

/// Piecewise Chebyshev interpolant on fixed panels.
#[derive(Clone, Debug)]
struct ChebTable {
    pts: Vec<f64>,
    coef: Vec<[f64; CHEB_POINTS]>,
}

impl ChebTable {
    fn new(pts: &[f64], f: &dyn Fn(f64) -> f64) -> Self {
        let n = CHEB_POINTS;
        let nodes: Vec<f64> = (0..n).map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos()).collect();
        let coef = pts
            .windows(2)
            .map(|w| {
                let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                let vals: Vec<f64> = nodes.iter().map(|&t| f(mid + half * t)).collect();
                let mut c = [0.0; CHEB_POINTS];
                for (j, cj) in c.iter_mut().enumerate() {
                    let s: f64 = (0..n).map(|k| vals[k] * (std::f64::consts::PI * j as f64 * (k as f64 + 0.5) / n as f64).cos()).sum();
                    *cj = s * if j == 0 { 1.0 } else { 2.0 } / n as f64;
                }
                c
            })
            .collect();
        ChebTable { pts: pts.to_vec(), coef }
    }

    fn eval(&self, x: f64) -> f64 {
        let k = self.pts.partition_point(|&p| p <= x).clamp(1, self.pts.len() - 1) - 1;
        let (a, b) = (self.pts[k], self.pts[k + 1]);
        let t = (2.0 * x - a - b) / (b - a);
        let c = &self.coef[k];
        let (mut b1, mut b2) = (0.0, 0.0);
        for j in (1..CHEB_POINTS).rev() {
            let b0 = 2.0 * t * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + c[0]
    }
}

/// g̃ and g₃ by variation of constants from the cumulative integrals
/// I = ∫_0^x P^d, K₀ = ∫_0^x P^{−d}𝒯 and K₁ = ∫_0^x I P^{−d}𝒯.
#[derive(Clone, Debug)]
pub struct InhomogeneousSolution {
    pub pair: HomogeneousPair,
    pub bump: BumpData,
    i_tab: Cumulative,
    k0_tab: Cumulative,
    k1_tab: Cumulative,
    /// Coefficients of g₁ and g₂ in g₃.
    pub c1: f64,
    pub c2: f64,
}

impl InhomogeneousSolution {
    pub fn new(pair: HomogeneousPair, bump: BumpData) -> Self {
        let mut pts = bump.breakpoints();
        if !pts.contains(&0.0) {
            pts.push(0.0);
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        refine_panels(&mut pts, (0.25 / bump.r).min(bump.delta1 / 8.0).min(0.02));
        let w = pair.w;
        let pd = move |x: f64| w.p(x).powf(w.d);
        let i_tab = Cumulative::new(&pts, &pd);
        let b0 = bump.clone();
        let k0f = move |x: f64| (-w.d * w.p(x).ln()).exp() * b0.t(x);
        let k0_tab = Cumulative::new(&pts, &k0f);
        let mut sol = InhomogeneousSolution { pair, bump, i_tab, k0_tab: k0_tab.clone(), k1_tab: k0_tab, c1: 0.0, c2: 0.0 };
        let s = sol.clone();
        let k1f = |x: f64| s.i(x) * (-w.d * w.p(x).ln()).exp() * s.bump.t(x);
        sol.k1_tab = Cumulative::new(&pts, &k1f);
        let v1 = w.varpi1(1.0);
        let (gp1, gm1) = (sol.g_tilde_prime(1.0), sol.g_tilde_prime(-1.0));
        sol.c1 = 0.5 * (gp1 - gm1) * v1;
        sol.c2 = 0.5 * (gp1 + gm1) * v1;
        sol
    }

    fn i(&self, x: f64) -> f64 {
        let w = self.pair.w;
        self.i_tab.eval(x, &|y| w.p(y).powf(w.d))
    }

    fn k0(&self, x: f64) -> f64 {
        let w = self.pair.w;
        self.k0_tab.eval(x, &|y| (-w.d * w.p(y).ln()).exp() * self.bump.t(y))
    }

    fn k1(&self, x: f64) -> f64 {
        let w = self.pair.w;
        self.k1_tab.eval(x, &|y| self.i(y) * (-w.d * w.p(y).ln()).exp() * self.bump.t(y))
    }

    /// g̃(x) = δ^{d−3}P^{−d}(x)[I(x)K₀(x) − K₁(x)].
    pub fn g_tilde(&self, x: f64) -> f64 {
        let w = self.pair.w;
        ((w.d - 3.0) * w.delta.ln() - w.d * w.p(x).ln()).exp() * (self.i(x) * self.k0(x) - self.k1(x))
    }

    /// g̃′ = δ^{d−3}[(P^{−d})′(IK₀ − K₁) + K₀].
    pub fn g_tilde_prime(&self, x: f64) -> f64 {
        let w = self.pair.w;
        let dpd = 2.0 * w.d * x * (-(w.d + 1.0) * w.p(x).ln()).exp();
        ((w.d - 3.0) * w.delta.ln()).exp() * (dpd * (self.i(x) * self.k0(x) - self.k1(x)) + self.k0(x))
    }

    pub fn g3(&self, x: f64) -> f64 {
        -self.g_tilde(x) + self.c1 * self.pair.g1(x) + self.c2 * self.pair.g2(x)
    }

    pub fn g3_prime(&self, x: f64) -> f64 {
        -self.g_tilde_prime(x) + self.c1 * self.pair.g1_prime(x) + self.c2 * self.pair.g2_prime(x)
    }

    pub fn g3_fn(&self) -> IntervalFunction {
        let (a, b) = (self.clone(), self.clone());
        let f: CFn = Arc::new(move |x| cr(a.g3(x)));
        let df: CFn = Arc::new(move |x| cr(b.g3_prime(x)));
        IntervalFunction::custom("g3", (-1.0, 1.0), f, Some(df))
    }

    /// g₃ through per-panel Chebyshev interpolants of g₃ and g₃′; much
    /// cheaper to evaluate than the cumulative integrals.
    pub fn g3_table(&self) -> IntervalFunction {
        let pts = self.k0_tab.pts.clone();
        let tv = Arc::new(ChebTable::new(&pts, &|x| self.g3(x)));
        let td = Arc::new(ChebTable::new(&pts, &|x| self.g3_prime(x)));
        let f: CFn = Arc::new(move |x| cr(tv.eval(x)));
        let df: CFn = Arc::new(move |x| cr(td.eval(x)));
        IntervalFunction::custom("g3", (-1.0, 1.0), f, Some(df))
    }

    pub fn g_tilde_fn(&self) -> IntervalFunction {
        let (a, b) = (self.clone(), self.clone());
        let f: CFn = Arc::new(move |x| cr(a.g_tilde(x)));
        let df: CFn = Arc::new(move |x| cr(b.g_tilde_prime(x)));
        IntervalFunction::custom("g_tilde", (-1.0, 1.0), f, Some(df))
    }

    /// |[ϖ₁g₃′]′ − ϖ₂g₃ + 𝒯| at x, relative to the larger term, with the
    /// flux derivative by a centered difference.
    pub fn ode_residual(&self, x: f64, h: f64) -> f64 {
        let w = self.pair.w;
        let flux = |y: f64| w.varpi1(y) * self.g3_prime(y);
        let d = (flux(x + h) - flux(x - h)) / (2.0 * h);
        let rhs = w.varpi2(x) * self.g3(x) - self.bump.t(x);
        let scale = d.abs().max((w.varpi2(x) * self.g3(x)).abs()).max(self.bump.t(x).abs()).max(1.0);
        (d - rhs).abs() / scale
    }
}

pub fn g3(params: &AnalysisParams, width: Option<f64>) -> Result<InhomogeneousSolution> {
    Ok(InhomogeneousSolution::new(g1_g2(params)?, bump_data(params, width)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct BvpReport {
    pub r: f64,
    pub d: f64,
    pub delta: f64,
    pub boundary_g1: f64,
    pub boundary_g1_minus: f64,
    pub boundary_g2: f64,
    pub boundary_g2_minus: f64,
    pub g1_norm_sq: f64,
    pub g1_norm_target: f64,
    pub g1_norm_rel_residual: f64,
    pub ode_residual_g1: f64,
    pub ode_residual_g2: f64,
    pub ode_residual_g3: f64,
    pub g3_neumann: (f64, f64),
    pub inner_g1_max: f64,
    pub inner_g2_max: f64,
    pub inner_g3_max: f64,
    pub g_tilde_norm: f64,
    pub g_tilde_scale: f64,
    pub warnings: Vec<String>,
}

/// Deterministic test polynomials with coefficients in [−1, 1].
pub fn test_polynomials(count: usize, degree: usize, seed: u64) -> Vec<IntervalFunction> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| IntervalFunction::polynomial((0..=degree).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()))
        .collect()
}

/// All boundary identities, ODE residuals and inner-product checks.
pub fn bvp_check(params: &AnalysisParams, polys: usize, seed: u64) -> Result<BvpReport> {
    let pair = g1_g2(params)?;
    let w = pair.w;
    let sol = g3(params, None)?;
    let grid: Vec<f64> = (1..1000).map(|i| -1.0 + 2.0 * i as f64 / 1000.0).collect();
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    let ode1 = grid.iter().map(|&x| rel(pair.flux1_prime(x), w.varpi2(x) * pair.g1(x))).fold(0.0, f64::max);
    let ode2 = grid
        .iter()
        .filter(|&&x| x.abs() > 1e-3)
        .map(|&x| rel(pair.flux2_prime(x), w.varpi2(x) * pair.g2(x)))
        .fold(0.0, f64::max);
    let h = 1e-5;
    let ode3 = grid.iter().filter(|&&x| x.abs() < 1.0 - 2.0 * h).map(|&x| sol.ode_residual(x, h)).fold(0.0, f64::max);
    let g1f = pair.g1_fn();
    let g2f = pair.g2_fn();
    let g3f = sol.g3_fn();
    let mut m1: f64 = 0.0;
    let mut m2: f64 = 0.0;
    let mut m3: f64 = 0.0;
    for f in test_polynomials(polys, 4, seed) {
        let (f1, fm1) = (f.at(1.0), f.at(-1.0));
        m1 = m1.max((inner(&f, &g1f, &w)? - (f1 + fm1)).norm());
        m2 = m2.max((inner(&f, &g2f, &w)? - (f1 - fm1)).norm());
        let direct = sol.bump.integrate_against(&|x| f.at(x));
        m3 = m3.max((inner(&f, &g3f, &w)? - direct).norm());
    }
    let g1n = inner(&g1f, &g1f, &w)?.re;
    let target = 1.0 / (params.d * params.delta * params.delta);
    let gt = crate::functional::norm(&sol.g_tilde_fn(), &w)?;
    let v1 = w.varpi1(1.0);
    let mut warnings = sol.bump.warnings.clone();
    warnings.extend(params.warnings.iter().cloned());
    Ok(BvpReport {
        r: params.r,
        d: params.d,
        delta: params.delta,
        boundary_g1: pair.g1_prime(1.0) * v1,
        boundary_g1_minus: -pair.g1_prime(-1.0) * v1,
        boundary_g2: pair.g2_prime(1.0) * v1,
        boundary_g2_minus: pair.g2_prime(-1.0) * v1,
        g1_norm_sq: g1n,
        g1_norm_target: target,
        g1_norm_rel_residual: (2.0 * pair.g1(1.0) - target).abs() / target,
        ode_residual_g1: ode1,
        ode_residual_g2: ode2,
        ode_residual_g3: ode3,
        g3_neumann: (sol.g3_prime(1.0), sol.g3_prime(-1.0)),
        inner_g1_max: m1,
        inner_g2_max: m2,
        inner_g3_max: m3,
        g_tilde_norm: gt,
        g_tilde_scale: gt / params.r.powf(49.0 / 60.0),
        warnings,
    })
}
