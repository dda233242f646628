//! Critical-line zeros of L(s,ψ)L(s,ψχ): Hardy Z scans, argument-principle
//! audit, gap statistics and the shifted set T(ρ,ψ).

use crate::characters::Character;
use crate::error::{invalid, Error, Result};
use crate::lfunc::{root_number, LEvaluator};
use crate::numeric::gamma::ln_gamma;
use crate::numeric::{c, C64};
use crate::params::AnalysisParams;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Rotation of L(1/2+it,ψ) onto the real axis.
#[derive(Clone, Debug)]
pub struct HardyZ {
    ev: LEvaluator,
    rot: C64,
    parity: f64,
    log_q_pi: f64,
}

impl HardyZ {
    pub fn new(psi: &Character) -> Result<Self> {
        let root = root_number(psi)?;
        Ok(HardyZ {
            ev: LEvaluator::new(psi.clone()),
            rot: root.sqrt().inv(),
            parity: psi.parity as f64,
            log_q_pi: (psi.modulus as f64 / PI).ln(),
        })
    }

    pub fn theta(&self, t: f64) -> f64 {
        0.5 * t * self.log_q_pi + ln_gamma(c(0.5 * (0.5 + self.parity), 0.5 * t)).im
    }

    /// Complex rotated value; the imaginary part is a numerical residual.
    pub fn rotated(&self, t: f64) -> C64 {
        let l = self.ev.eval(c(0.5, t)).expect("non-principal L is entire");
        self.rot * C64::from_polar(1.0, self.theta(t)) * l
    }

    pub fn z(&self, t: f64) -> f64 {
        self.rotated(t).re
    }

    pub fn l(&self, s: C64) -> C64 {
        self.ev.eval(s).expect("non-principal L is entire")
    }

    pub fn parity(&self) -> u8 {
        self.parity as u8
    }

    pub fn log_q_pi(&self) -> f64 {
        self.log_q_pi
    }
}

pub fn hardy_z(psi: &Character, t: f64) -> Result<f64> {
    Ok(HardyZ::new(psi)?.z(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroSource {
    Psi,
    PsiChi,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroRecord {
    pub gamma: f64,
    pub source: ZeroSource,
    pub derivative: f64,
    pub width: f64,
    pub simple: bool,
    /// Set when another zero lies within the refinement width.
    pub cluster: bool,
}

impl ZeroRecord {
    pub fn rho(&self) -> C64 {
        c(0.5, self.gamma)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorAudit {
    pub source: ZeroSource,
    pub sign_changes: usize,
    pub argument_count: i64,
    /// Distance of the argument-principle winding from the nearest integer.
    pub winding_residual: f64,
    pub mismatch: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroSet {
    pub window: (f64, f64),
    pub step: f64,
    pub records: Vec<ZeroRecord>,
    pub gaps: Vec<f64>,
    pub audits: Vec<FactorAudit>,
    /// Endpoint adjustments applied to keep the window ends off zeros.
    pub nudges: Vec<String>,
}

impl ZeroSet {
    pub fn of_source(&self, src: ZeroSource) -> impl Iterator<Item = &ZeroRecord> {
        self.records.iter().filter(move |r| r.source == src)
    }

    pub fn mismatch_total(&self) -> i64 {
        self.audits.iter().map(|a| a.mismatch.abs()).sum()
    }

    pub fn ordinates(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gamma).collect()
    }
}

pub const REFINE_WIDTH: f64 = 1e-12;
const SIMPLICITY_FLOOR: f64 = 1e-6;

fn refine(z: &HardyZ, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > REFINE_WIDTH {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = z.z(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Brackets of sign changes, resolving same-sign dips of |Z| by resampling.
fn brackets(z: &HardyZ, ts: &[f64], vals: &[f64], depth: u32, out: &mut Vec<(f64, f64, f64)>) {
    let n = ts.len();
    for k in 0..n.saturating_sub(1) {
        if vals[k] == 0.0 {
            out.push((ts[k] - REFINE_WIDTH, ts[k] + REFINE_WIDTH, z.z(ts[k] - REFINE_WIDTH)));
            continue;
        }
        if (vals[k] > 0.0) != (vals[k + 1] > 0.0) && vals[k + 1] != 0.0 {
            out.push((ts[k], ts[k + 1], vals[k]));
        }
    }
    if depth == 0 {
        return;
    }
    // same-sign local minima of |Z| that could hide a pair of close zeros
    for k in 1..n.saturating_sub(1) {
        let (l, m, r) = (vals[k - 1].abs(), vals[k].abs(), vals[k + 1].abs());
        let same = (vals[k - 1] > 0.0) == (vals[k] > 0.0) && (vals[k] > 0.0) == (vals[k + 1] > 0.0);
        if same && m < l && m < r && m < 0.25 * l.max(r) {
            let sub = 16;
            let (lo, hi) = (ts[k - 1], ts[k + 1]);
            let st: Vec<f64> = (0..=sub).map(|i| lo + (hi - lo) * i as f64 / sub as f64).collect();
            let sv: Vec<f64> = st.iter().map(|&t| z.z(t)).collect();
            let mut inner = Vec::new();
            brackets(z, &st, &sv, depth - 1, &mut inner);
            out.extend(inner);
        }
    }
}

/// Sign-change zeros of one factor in (lo, hi), ascending.
fn scan_factor(z: &HardyZ, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let ts: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = ts.par_iter().map(|&t| z.z(t)).collect();
    let mut br = Vec::new();
    brackets(z, &ts, &vals, 2, &mut br);
    br.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    br.dedup_by(|a, b| (a.0 - b.0).abs() < REFINE_WIDTH && (a.1 - b.1).abs() < REFINE_WIDTH);
    // local |Z| scale for the simplicity test
    let scale_at = |t: f64| -> f64 {
        let k = (((t - lo) / (hi - lo)) * n as f64).round() as isize;
        let mut m: f64 = 0.0;
        for j in (k - 8).max(0)..=(k + 8).min(n as isize) {
            m = m.max(vals[j as usize].abs());
        }
        m.max(1e-300)
    };
    br.par_iter()
        .map(|&(a, b, fa)| {
            let g = refine(z, a, b, fa);
            let h = 1e-5;
            let d = (z.z(g + h) - z.z(g - h)) / (2.0 * h);
            (g, d / scale_at(g))
        })
        .collect()
}

/// Unwrapped change of arg f along s(τ), τ ∈ [0, 1].
fn unwrap_arg<F: Fn(f64) -> C64>(f: &F) -> f64 {
    let mut tau = 0.0;
    let mut val = f(0.0);
    let mut total = 0.0;
    let mut dt: f64 = 1.0 / 64.0;
    let min_dt = 1e-12;
    while tau < 1.0 {
        let step = dt.min(1.0 - tau);
        let next = f(tau + step);
        let mid = f(tau + 0.5 * step);
        let full = (next / val).arg();
        let halves = (mid / val).arg() + (next / mid).arg();
        if (full.abs() < PI / 4.0 && (full - halves).abs() < 1e-9) || step < min_dt {
            total += halves;
            tau += step;
            val = next;
            if full.abs() < PI / 16.0 {
                dt = (dt * 2.0).min(1.0 / 16.0);
            }
        } else {
            dt = step * 0.5;
        }
    }
    total
}

pub const ARGUMENT_SIGMA: f64 = 3.0;

/// Zero count of L(s,ψ) in the critical strip with t1 < Im s < t2, from the
/// winding of the completed L along the right half of the rectangle.
pub fn argument_count(z: &HardyZ, t1: f64, t2: f64) -> (i64, f64) {
    let s0 = ARGUMENT_SIGMA;
    let bottom = |u: f64| z.l(c(0.5 + u * (s0 - 0.5), t1));
    let right = |u: f64| z.l(c(s0, t1 + u * (t2 - t1)));
    let top = |u: f64| z.l(c(s0 - u * (s0 - 0.5), t2));
    let darg_l = unwrap_arg(&bottom) + unwrap_arg(&right) + unwrap_arg(&top);
    let a = z.parity;
    let gamma_part = ln_gamma(c(0.5 * (0.5 + a), 0.5 * t2)).im - ln_gamma(c(0.5 * (0.5 + a), 0.5 * t1)).im;
    let conductor_part = 0.5 * (t2 - t1) * z.log_q_pi;
    let w = (darg_l + gamma_part + conductor_part) / PI;
    let n = w.round();
    (n as i64, (w - n).abs())
}

/// Moves t off a near-zero of Z, returning the adjusted point.
fn nudge(zs: &[&HardyZ], t: f64, dir: f64, notes: &mut Vec<String>) -> f64 {
    let mut t2 = t;
    for k in 0..50 {
        let ok = zs.iter().all(|z| {
            let v = z.l(c(0.5, t2)).norm();
            let probe = z.l(c(0.5, t2 + 0.05)).norm().max(z.l(c(0.5, t2 - 0.05)).norm());
            v > 1e-3 * probe.max(1e-3)
        });
        if ok {
            if k > 0 {
                notes.push(format!("endpoint {t} moved to {t2}"));
            }
            return t2;
        }
        t2 += dir * 1e-3;
    }
    t2
}

pub fn auto_step(alpha: Option<f64>) -> f64 {
    match alpha {
        Some(a) => (a / 8.0).min(0.05),
        None => 0.05,
    }
}

/// Zeros of L(1/2+it,ψ)L(1/2+it,ψχ) in the window, with per-factor audits.
pub fn scan_zero_set(psi: &Character, chi: &Character, window: (f64, f64), step: f64) -> Result<ZeroSet> {
    let (lo, hi) = window;
    if hi < lo {
        return invalid("window upper end below lower end");
    }
    if !(step > 0.0) {
        return invalid("step must be positive");
    }
    if hi == lo {
        return Ok(ZeroSet { window, step, records: vec![], gaps: vec![], audits: vec![], nudges: vec![] });
    }
    let pc = psi.mul(chi);
    let zp = HardyZ::new(psi)?;
    let zpc = HardyZ::new(&pc)?;
    let mut nudges = Vec::new();
    let lo = nudge(&[&zp, &zpc], lo, 1.0, &mut nudges);
    let hi = nudge(&[&zp, &zpc], hi, -1.0, &mut nudges);
    let mut records = Vec::new();
    let mut audits = Vec::new();
    for (z, src) in [(&zp, ZeroSource::Psi), (&zpc, ZeroSource::PsiChi)] {
        let found = scan_factor(z, lo, hi, step);
        let (count, resid) = argument_count(z, lo, hi);
        audits.push(FactorAudit {
            source: src,
            sign_changes: found.len(),
            argument_count: count,
            winding_residual: resid,
            mismatch: count - found.len() as i64,
        });
        for (g, dnorm) in found {
            records.push(ZeroRecord {
                gamma: g,
                source: src,
                derivative: dnorm.abs(),
                width: REFINE_WIDTH,
                simple: dnorm.abs() > SIMPLICITY_FLOOR,
                cluster: false,
            });
        }
    }
    records.sort_by(|a, b| a.gamma.partial_cmp(&b.gamma).unwrap());
    for i in 1..records.len() {
        if records[i].gamma - records[i - 1].gamma < 2.0 * REFINE_WIDTH {
            records[i].cluster = true;
            records[i - 1].cluster = true;
        }
    }
    let gaps = records.windows(2).map(|w| w[1].gamma - w[0].gamma).collect();
    Ok(ZeroSet { window: (lo, hi), step, records, gaps, audits, nudges })
}

#[derive(Clone, Debug, Serialize)]
pub struct GapStatistics {
    pub normalized: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub bucket_width: f64,
    pub histogram: Vec<usize>,
}

pub fn gap_statistics_of(ordinates: &[f64], alpha: f64) -> Result<GapStatistics> {
    if ordinates.len() < 2 {
        return invalid("gap statistics need at least two zeros");
    }
    let unit = PI * alpha;
    let normalized: Vec<f64> = ordinates.windows(2).map(|w| (w[1] - w[0]) / unit).collect();
    let n = normalized.len() as f64;
    let mean = normalized.iter().sum::<f64>() / n;
    let variance = normalized.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / n;
    let bucket_width = 0.25;
    let mut histogram = vec![0usize; 16];
    for g in &normalized {
        let b = ((g / bucket_width) as usize).min(histogram.len() - 1);
        histogram[b] += 1;
    }
    Ok(GapStatistics { normalized, mean, variance, bucket_width, histogram })
}

pub fn gap_statistics(zs: &ZeroSet, alpha: f64) -> Result<GapStatistics> {
    gap_statistics_of(&zs.ordinates(), alpha)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftedTheta {
    pub theta: C64,
    pub source: ZeroSource,
    /// Member of T₁ (|θ| < ω) as opposed to T₂ (ω < |θ| < 3ω).
    pub inner: bool,
    pub l: i64,
    /// −1 for the −α branch, +1 for +α.
    pub sign: i8,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftedZeroSet {
    pub anchor: f64,
    pub thetas: Vec<ShiftedTheta>,
}

impl ShiftedZeroSet {
    pub fn values(&self) -> Vec<C64> {
        self.thetas.iter().map(|t| t.theta).collect()
    }

    pub fn inner_values(&self) -> Vec<C64> {
        self.thetas.iter().filter(|t| t.inner).map(|t| t.theta).collect()
    }
}

/// Lattice classification θ ≈ ±α + πilα.
pub fn classify_theta(theta: C64, alpha: f64) -> (i64, i8, f64) {
    let sign: i8 = if theta.re < 0.0 { -1 } else { 1 };
    let l = (theta.im / (PI * alpha)).round() as i64;
    let target = c(sign as f64 * alpha, PI * alpha * l as f64);
    (l, sign, (theta - target).norm())
}

/// T(ρ,ψ) from scanned ordinates of the two factors.
pub fn shifted_from_ordinates(anchor: f64, psi_zeros: &[f64], psi_chi_zeros: &[f64], alpha: f64, omega: f64) -> ShiftedZeroSet {
    let mut thetas = Vec::new();
    for &g in psi_zeros {
        let th = c(-alpha, g - anchor);
        let r = th.norm();
        if r < 3.0 * omega && r != omega {
            let (l, sign, residual) = classify_theta(th, alpha);
            thetas.push(ShiftedTheta { theta: th, source: ZeroSource::Psi, inner: r < omega, l, sign, residual });
        }
    }
    for &g in psi_chi_zeros {
        let th = c(alpha, g - anchor);
        if th.norm() < omega {
            let (l, sign, residual) = classify_theta(th, alpha);
            thetas.push(ShiftedTheta { theta: th, source: ZeroSource::PsiChi, inner: true, l, sign, residual });
        }
    }
    thetas.sort_by(|a, b| a.theta.im.partial_cmp(&b.theta.im).unwrap().then(a.theta.re.partial_cmp(&b.theta.re).unwrap()));
    ShiftedZeroSet { anchor, thetas }
}

pub fn shifted_zero_set(rho: &ZeroRecord, zs: &ZeroSet, params: &AnalysisParams) -> Result<ShiftedZeroSet> {
    if !zs.records.iter().any(|r| (r.gamma - rho.gamma).abs() < 1e-9 && r.source == rho.source) {
        return Err(Error::Missing(format!("anchor γ = {} not in the zero set", rho.gamma)));
    }
    let p: Vec<f64> = zs.of_source(ZeroSource::Psi).map(|r| r.gamma).collect();
    let pc: Vec<f64> = zs.of_source(ZeroSource::PsiChi).map(|r| r.gamma).collect();
    Ok(shifted_from_ordinates(rho.gamma, &p, &pc, params.alpha, params.omega))
}
