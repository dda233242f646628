//! Mollifier sums F, G and the quotients 𝓕, 𝓗, 𝓖, 𝒦±; membership
//! diagnostics and the functional Υ(ρ,ψ).

use crate::characters::Character;
use crate::coefficients::{lambda_tables, nu_table, upsilon_table, CoeffTable};
use crate::error::{invalid, Error, Result};
use crate::lfunc::{vartheta_log, Delta1, DeltaFactor, KernelParams, LEvaluator};
use crate::numeric::quad;
use crate::numeric::sum::{ComplexSum, KahanSum};
use crate::numeric::{c, C64};
use crate::params::AnalysisParams;
use crate::weights::WeightPair;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Dirichlet polynomial Σ a_n n^{−s} stored as (log n, a_n) over nonzero terms.
#[derive(Clone, Debug, Default)]
pub struct DirichletPoly {
    terms: Vec<(f64, C64)>,
}

impl DirichletPoly {
    pub fn new(coeff: impl Iterator<Item = (usize, C64)>) -> Self {
        DirichletPoly {
            terms: coeff.filter(|(_, a)| a.norm_sqr() > 0.0).map(|(n, a)| ((n as f64).ln(), a)).collect(),
        }
    }

    pub fn eval(&self, s: C64) -> C64 {
        let mut acc = ComplexSum::new();
        for &(ln, a) in &self.terms {
            acc.add(a * (-s * ln).exp());
        }
        acc.value()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Threshold below which |F(s,ψ)| is reported as vanishing.
pub const VANISHING_F: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct MollifierContext {
    pub psi: Character,
    pub chi: Character,
    pub psi_chi: Character,
    pub cap_f: usize,
    pub nu: Arc<CoeffTable>,
    pub upsilon: Arc<CoeffTable>,
    pub lambda_plus: Arc<CoeffTable>,
    pub lambda_minus: Arc<CoeffTable>,
    pub params: AnalysisParams,
    f: DirichletPoly,
    f_bar: DirichletPoly,
    g: DirichletPoly,
    l_psi: LEvaluator,
    l_psi_chi: LEvaluator,
    d_psi: DeltaFactor,
    d_psi_chi: DeltaFactor,
}

/// n ≤ x with a relative guard so that integer powers of Q land inside.
pub fn floor_guarded(x: f64) -> usize {
    (x * (1.0 + 1e-12)).floor().max(0.0) as usize
}

impl MollifierContext {
    pub fn new(psi: &Character, chi: &Character, cap_f: usize, params: &AnalysisParams) -> Result<Self> {
        let nu = Arc::new(nu_table(chi, cap_f)?);
        let upsilon = Arc::new(upsilon_table(chi, cap_f)?);
        let lam_n = floor_guarded(params.big_q.powf(1.5)).max(2);
        let (lp, lm) = lambda_tables(params.alpha, lam_n)?;
        Self::with_tables(psi, chi, cap_f, nu, upsilon, Arc::new(lp), Arc::new(lm), params)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_tables(
        psi: &Character,
        chi: &Character,
        cap_f: usize,
        nu: Arc<CoeffTable>,
        upsilon: Arc<CoeffTable>,
        lambda_plus: Arc<CoeffTable>,
        lambda_minus: Arc<CoeffTable>,
        params: &AnalysisParams,
    ) -> Result<Self> {
        if cap_f < 1 {
            return invalid("capF must be at least 1");
        }
        nu.covers(cap_f)?;
        upsilon.covers(cap_f)?;
        let psi_chi = psi.mul(chi);
        if !psi.is_primitive() || !psi_chi.is_primitive() {
            return invalid("ψ and ψχ must be primitive");
        }
        let pb = psi.conj();
        let f = DirichletPoly::new((1..=cap_f).map(|n| (n, nu.values[n] * psi.value_u(n as u64))));
        let f_bar = DirichletPoly::new((1..=cap_f).map(|n| (n, nu.values[n] * pb.value_u(n as u64))));
        let g = DirichletPoly::new((1..=cap_f).map(|n| (n, upsilon.values[n] * psi.value_u(n as u64))));
        Ok(MollifierContext {
            psi: psi.clone(),
            chi: chi.clone(),
            l_psi: LEvaluator::new(psi.clone()),
            l_psi_chi: LEvaluator::new(psi_chi.clone()),
            d_psi: DeltaFactor::new(psi)?,
            d_psi_chi: DeltaFactor::new(&psi_chi)?,
            psi_chi,
            cap_f,
            nu,
            upsilon,
            lambda_plus,
            lambda_minus,
            params: params.clone(),
            f,
            f_bar,
            g,
        })
    }

    /// The same context for ψ̄ (tables shared).
    pub fn conjugate(&self) -> Result<Self> {
        Self::with_tables(
            &self.psi.conj(),
            &self.chi,
            self.cap_f,
            self.nu.clone(),
            self.upsilon.clone(),
            self.lambda_plus.clone(),
            self.lambda_minus.clone(),
            &self.params,
        )
    }

    pub fn kernel(&self) -> KernelParams {
        KernelParams { log_q: self.params.log_q() }
    }

    pub fn l_psi(&self, s: C64) -> C64 {
        self.l_psi.eval(s).expect("non-principal L is entire")
    }

    pub fn l_psi_chi(&self, s: C64) -> C64 {
        self.l_psi_chi.eval(s).expect("non-principal L is entire")
    }

    pub fn delta1(&self, s: C64) -> Result<C64> {
        Ok(self.d_psi.eval(s)? * self.d_psi_chi.eval(s)?)
    }

    pub fn delta_psi(&self, s: C64) -> Result<C64> {
        self.d_psi.eval(s)
    }

    pub fn delta_psi_chi(&self, s: C64) -> Result<C64> {
        self.d_psi_chi.eval(s)
    }

    pub fn delta1_factor(&self) -> Result<Delta1> {
        Delta1::new(&self.psi, &self.chi)
    }
}

/// F(s,ψ) = Σ_{n≤capF} ν(n)ψ(n)n^{−s}.
pub fn f_sum(ctx: &MollifierContext, s: C64) -> C64 {
    ctx.f.eval(s)
}

/// F(s,ψ̄).
pub fn f_bar_sum(ctx: &MollifierContext, s: C64) -> C64 {
    ctx.f_bar.eval(s)
}

/// G(s,ψ) = Σ_{n≤capF} υ(n)ψ(n)n^{−s}.
pub fn g_sum(ctx: &MollifierContext, s: C64) -> C64 {
    ctx.g.eval(s)
}

fn nonvanishing(v: C64) -> Result<C64> {
    if v.norm() < VANISHING_F {
        return Err(Error::VanishingDenominator(v.norm()));
    }
    Ok(v)
}

/// 𝓕(s,ψ) = F(s,ψ) + Δ₁(s,ψ)F(1−s,ψ̄).
pub fn script_f(ctx: &MollifierContext, s: C64) -> Result<C64> {
    Ok(f_sum(ctx, s) + ctx.delta1(s)? * f_bar_sum(ctx, 1.0 - s))
}

/// 𝓗(s,ψ) = Δ₁(s,ψ)F(1−s,ψ̄)/F(s,ψ).
pub fn script_h(ctx: &MollifierContext, s: C64) -> Result<C64> {
    let f = nonvanishing(f_sum(ctx, s))?;
    Ok(ctx.delta1(s)? * f_bar_sum(ctx, 1.0 - s) / f)
}

/// 𝓖(s,ψ) = L(s,ψ)L(s,ψχ)/F(s,ψ).
pub fn script_g(ctx: &MollifierContext, s: C64) -> Result<C64> {
    let f = nonvanishing(f_sum(ctx, s))?;
    Ok(ctx.l_psi(s) * ctx.l_psi_chi(s) / f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// 𝒦₊(s) = L(s+α,ψ)L(s−α,ψχ)/F(s,ψ); 𝒦₋ swaps the shifts.
pub fn k_pm(ctx: &MollifierContext, s: C64, sign: Sign) -> Result<C64> {
    let a = ctx.params.alpha * sign.factor();
    let f = nonvanishing(f_sum(ctx, s))?;
    Ok(ctx.l_psi(s + a) * ctx.l_psi_chi(s - a) / f)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResiduals {
    /// Residuals of the shift identities for 𝒦₊ and 𝒦₋ through 𝓖.
    pub shift_plus: f64,
    pub shift_minus: f64,
    /// Residuals of the reflection identities through 𝒦∓(1−w, ψ̄).
    pub reflect_plus: f64,
    pub reflect_minus: f64,
    /// Smallest denominator met, so callers can discard near-singular points.
    pub min_denominator: f64,
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(1.0)
}

/// Residuals of the 𝒦± identities at w = ρ + s; `bar` is the ψ̄ context.
pub fn identity_residuals(ctx: &MollifierContext, bar: &MollifierContext, w: C64) -> Result<IdentityResiduals> {
    let al = ctx.params.alpha;
    let kp = k_pm(ctx, w, Sign::Plus)?;
    let km = k_pm(ctx, w, Sign::Minus)?;
    let f = f_sum(ctx, w);
    let rhs_sp = f_sum(ctx, w - al) / f * ctx.l_psi(w + al) / ctx.l_psi(w - al) * script_g(ctx, w - al)?;
    let rhs_sm = f_sum(ctx, w + al) / f * ctx.l_psi(w - al) / ctx.l_psi(w + al) * script_g(ctx, w + al)?;
    let fb = f_sum(bar, 1.0 - w);
    let rhs_rp = fb / f * ctx.delta_psi(w + al)? * ctx.delta_psi_chi(w - al)? * k_pm(bar, 1.0 - w, Sign::Minus)?;
    let rhs_rm = fb / f * ctx.delta_psi(w - al)? * ctx.delta_psi_chi(w + al)? * k_pm(bar, 1.0 - w, Sign::Plus)?;
    let dens = [
        f.norm(),
        f_sum(ctx, w - al).norm(),
        f_sum(ctx, w + al).norm(),
        ctx.l_psi(w - al).norm(),
        ctx.l_psi(w + al).norm(),
        fb.norm(),
    ];
    Ok(IdentityResiduals {
        shift_plus: rel(kp, rhs_sp),
        shift_minus: rel(km, rhs_sm),
        reflect_plus: rel(kp, rhs_rp),
        reflect_minus: rel(km, rhs_rm),
        min_denominator: dens.iter().cloned().fold(f64::INFINITY, f64::min),
    })
}

/// 𝒦₊𝒦₋(w+s) − (1 − e²Q^{−2s})(1 − e^{−2}Q^{−2s}).
pub fn product_diagnostic(ctx: &MollifierContext, rho: C64, s: C64) -> Result<C64> {
    let w = rho + s;
    let lhs = k_pm(ctx, w, Sign::Plus)? * k_pm(ctx, w, Sign::Minus)?;
    let q2 = (-2.0 * s * ctx.params.log_q()).exp();
    let e2 = std::f64::consts::E.powi(2);
    Ok(lhs - (1.0 - e2 * q2) * (1.0 - q2 / e2))
}

#[derive(Clone, Copy, Debug, Serialize, serde::Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_re: usize,
    pub n_im: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_re: 64, n_im: 64 }
    }
}

impl GridSpec {
    pub fn refined(self) -> Self {
        GridSpec { n_re: 2 * self.n_re, n_im: 2 * self.n_im }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rect {
    /// Interior nodes of an n_re × n_im subdivision; nested under doubling.
    pub fn nodes(&self, g: GridSpec) -> Vec<C64> {
        let mut out = Vec::new();
        for j in 1..g.n_im {
            let y = self.im.0 + (self.im.1 - self.im.0) * j as f64 / g.n_im as f64;
            for i in 1..g.n_re {
                let x = self.re.0 + (self.re.1 - self.re.0) * i as f64 / g.n_re as f64;
                out.push(c(x, y));
            }
        }
        out
    }
}

/// Desk analogs of Ω₁ and Ω₂ around s₀ = 1/2 + it₀.
pub fn omega_regions(p: &AnalysisParams) -> (Rect, Rect) {
    let t0 = p.anchor_height;
    let l = p.log_d;
    let o1 = Rect { re: (0.5 - 2.0 * p.alpha.sqrt(), 1.5), im: (t0 - 1.0 - 20.0 * l, t0 + 1.0 + 20.0 * l) };
    let o2 = Rect { re: (0.5 - 0.1 * p.alpha * l.ln(), 1.0), im: (t0 - 1.0 - 10.0 * l, t0 + 1.0 + 10.0 * l) };
    (o1, o2)
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub grid: GridSpec,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i1_threshold: f64,
    pub i2_threshold: f64,
    pub i3_threshold: f64,
    pub i1_pass: bool,
    pub i2_pass: bool,
    pub i3_pass: bool,
    pub in_psi_star: bool,
    pub omega1: Rect,
    pub omega2: Rect,
}

fn grid_sup<F: Fn(C64) -> f64 + Sync>(nodes: &[C64], f: F) -> f64 {
    let v: Vec<f64> = nodes.par_iter().map(|&s| f(s)).collect();
    v.into_iter().fold(0.0, f64::max)
}

/// Grid sups of (I1) |F|+|G| and (I2) |FG−1| over Ω₁, and (I3) |LL−𝓕| over Ω₂.
pub fn membership_diagnostics(ctx: &MollifierContext, grid: GridSpec) -> Result<MembershipReport> {
    if grid.n_re < 2 || grid.n_im < 2 {
        return invalid("grid needs at least 2 subdivisions per axis");
    }
    let (o1, o2) = omega_regions(&ctx.params);
    let n1 = o1.nodes(grid);
    let n2 = o2.nodes(grid);
    let i1 = grid_sup(&n1, |s| f_sum(ctx, s).norm() + g_sum(ctx, s).norm());
    let i2 = grid_sup(&n1, |s| (f_sum(ctx, s) * g_sum(ctx, s) - 1.0).norm());
    let i3 = grid_sup(&n2, |s| match script_f(ctx, s) {
        Ok(sf) => (ctx.l_psi(s) * ctx.l_psi_chi(s) - sf).norm(),
        Err(_) => f64::INFINITY,
    });
    let l = ctx.params.log_d;
    let i1_threshold = l.powi(3) * l.ln();
    let i2_threshold = 0.5;
    let i3_threshold = l.powf(-24.0 / 5.0);
    let (i1_pass, i2_pass, i3_pass) = (i1 < i1_threshold, i2 < i2_threshold, i3 < i3_threshold);
    Ok(MembershipReport {
        grid,
        i1,
        i2,
        i3,
        i1_threshold,
        i2_threshold,
        i3_threshold,
        i1_pass,
        i2_pass,
        i3_pass,
        in_psi_star: i1_pass && i2_pass && i3_pass,
        omega1: o1,
        omega2: o2,
    })
}

/// Partial sums 𝒰(a,b;s) = S(b) − S(a) with S(x) = Σ_{1<n≤Q^x} c_n.
#[derive(Clone, Debug)]
pub struct StepSums {
    log_q: f64,
    /// (α log n, cumulative sum through n), ascending in n over nonzero terms.
    ys: Vec<f64>,
    cum: Vec<C64>,
}

impl StepSums {
    pub fn new(log_q: f64, terms: impl Iterator<Item = (usize, C64)>) -> Self {
        let mut ys = Vec::new();
        let mut cum = Vec::new();
        let mut acc = ComplexSum::new();
        for (n, v) in terms {
            if n < 2 || v.norm_sqr() == 0.0 {
                continue;
            }
            acc.add(v);
            ys.push((n as f64).ln() / log_q);
            cum.push(acc.value());
        }
        StepSums { log_q, ys, cum }
    }

    /// S(x) = Σ_{1<n≤Q^x} c_n.
    pub fn s(&self, x: f64) -> C64 {
        let nmax = floor_guarded((x * self.log_q).exp());
        let lim = (nmax as f64).ln() / self.log_q;
        let k = self.ys.partition_point(|&y| y <= lim + 1e-15);
        if k == 0 {
            C64::new(0.0, 0.0)
        } else {
            self.cum[k - 1]
        }
    }

    pub fn u(&self, a: f64, b: f64) -> C64 {
        self.s(b) - self.s(a)
    }

    /// Jump locations α log n inside (lo, hi).
    pub fn breaks_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.ys.iter().copied().filter(|&y| y > lo && y < hi).collect()
    }
}

fn piecewise<V: Fn(f64) -> f64, W: Fn(f64) -> f64>(lo: f64, hi: f64, breaks: &[f64], value: V, weight: Option<W>) -> f64 {
    let mut pts = vec![lo];
    pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut acc = KahanSum::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let v = value(0.5 * (a + b));
        if v == 0.0 {
            continue;
        }
        let mass = match &weight {
            None => b - a,
            Some(wf) => quad::adaptive(wf, a, b, quad::Tolerance::new(1e-14, 1e-12)).value,
        };
        acc.add(v * mass);
    }
    acc.value()
}

#[derive(Clone, Debug, Serialize)]
pub struct UpsilonReport {
    pub upsilon_plus: f64,
    pub upsilon_minus: f64,
    pub upsilon_star: f64,
    pub total: f64,
    pub a2_threshold: f64,
    pub a2_holds: bool,
}

/// 𝒰₊ and 𝒰₋ step sums at s.
pub fn u_sums(ctx: &MollifierContext, s: C64) -> Result<(StepSums, StepSums)> {
    let q = ctx.params.big_q;
    let nmax = floor_guarded(q.powf(1.5));
    ctx.lambda_plus.covers(nmax)?;
    ctx.lambda_minus.covers(nmax)?;
    let kp = ctx.kernel();
    let lq = ctx.params.log_q();
    let term = |n: usize, lam: f64, shift: f64| -> C64 {
        let ln = (n as f64).ln();
        lam * ctx.psi.value_u(n as u64) * (-s * ln).exp() * vartheta_log(shift * lq - ln, kp)
    };
    let plus = StepSums::new(lq, (2..=nmax).map(|n| (n, term(n, ctx.lambda_plus.values[n], 4.0 / 3.0))));
    let minus = StepSums::new(lq, (2..=nmax).map(|n| (n, term(n, ctx.lambda_minus.values[n], 2.0 / 3.0))));
    Ok((plus, minus))
}

fn upsilon_pm(u: &StepSums, d1: f64, w: &WeightPair) -> f64 {
    let a = u.u(0.0, d1).norm_sqr() + u.u(d1, 1.0).norm_sqr();
    let b = piecewise(0.0, d1, &u.breaks_in(0.0, d1), |y| u.u(0.0, y).norm_sqr(), Some(|y: f64| (-w.ln_varpi1(1.0 - y)).exp()));
    let c = piecewise(d1, 1.0, &u.breaks_in(d1, 1.0), |y| u.u(d1, y).norm_sqr(), None::<fn(f64) -> f64>);
    a + b + c
}

/// Υ(ρ,ψ) = Υ₊ + Υ₋ + Υ*, with the (A2) comparison against (log R)².
pub fn upsilon_functional(ctx: &MollifierContext, rho: C64) -> Result<UpsilonReport> {
    let (up, um) = u_sums(ctx, rho)?;
    let p = &ctx.params;
    let w = WeightPair::new(p.delta, p.d);
    let upsilon_plus = upsilon_pm(&up, p.delta1, &w);
    let upsilon_minus = upsilon_pm(&um, p.delta1, &w);
    let eps = p.epsilon;
    let star_a = up.u(0.0, eps).norm_sqr() / (eps * eps) + up.u(1.0, 1.5).norm_sqr();
    let shifted: Vec<f64> = up.breaks_in(1.0, 1.5).iter().map(|y| y - 1.0).collect();
    let star_b = piecewise(0.0, 0.5, &shifted, |y| up.u(1.0 + y, 1.5).norm_sqr(), None::<fn(f64) -> f64>);
    let upsilon_star = star_a + star_b;
    let total = upsilon_plus + upsilon_minus + upsilon_star;
    let a2_threshold = p.r.ln().powi(2);
    Ok(UpsilonReport { upsilon_plus, upsilon_minus, upsilon_star, total, a2_threshold, a2_holds: total < a2_threshold })
}
