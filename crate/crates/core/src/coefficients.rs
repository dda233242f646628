//! Arithmetic coefficient tables ν, υ, ι, λ± built by divisor sieves.

use crate::characters::Character;
use crate::error::{invalid, Error, Result};
use crate::numeric::arith::{divisor_count_sieve, mobius_sieve};
use crate::numeric::sum::KahanSum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKind {
    Nu,
    Upsilon,
    Iota,
    LambdaPlus,
    LambdaMinus,
}

impl std::str::FromStr for CoeffKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "nu" => CoeffKind::Nu,
            "upsilon" => CoeffKind::Upsilon,
            "iota" => CoeffKind::Iota,
            "lambda_plus" | "lambda+" => CoeffKind::LambdaPlus,
            "lambda_minus" | "lambda-" => CoeffKind::LambdaMinus,
            _ => return invalid(format!("unknown coefficient kind {s}")),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum CoeffParams {
    Character { modulus: u64 },
    Alpha(f64),
    Truncated { modulus: u64, cap_f: usize },
    Synthetic,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoeffTable {
    pub kind: CoeffKind,
    pub limit: usize,
    /// values[n] for 1 ≤ n ≤ limit; index 0 unused.
    pub values: Vec<f64>,
    /// Integer values when the kind is integer-valued.
    #[serde(skip)]
    pub exact: Option<Vec<i64>>,
    pub params: CoeffParams,
}

impl CoeffTable {
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn covers(&self, n: usize) -> Result<()> {
        if n > self.limit {
            Err(Error::TableShortfall { need: n as u64, have: self.limit as u64 })
        } else {
            Ok(())
        }
    }

    /// A table with given values on 1..=limit (tests and synthetic runs).
    pub fn synthetic(kind: CoeffKind, values: Vec<f64>) -> Self {
        let limit = values.len() - 1;
        CoeffTable { kind, limit, values, exact: None, params: CoeffParams::Synthetic }
    }

    pub fn zeroed(kind: CoeffKind, limit: usize) -> Self {
        Self::synthetic(kind, vec![0.0; limit + 1])
    }
}

fn real_character_values(chi: &Character, n: usize) -> Result<Vec<i64>> {
    if !chi.is_real() {
        return invalid("χ must be real");
    }
    Ok((0..=n).map(|k| chi.value_u(k as u64).re.round() as i64).collect())
}

fn int_table(kind: CoeffKind, v: Vec<i64>, params: CoeffParams) -> CoeffTable {
    CoeffTable {
        kind,
        limit: v.len() - 1,
        values: v.iter().map(|&x| x as f64).collect(),
        exact: Some(v),
        params,
    }
}

pub fn nu_values(chi: &Character, n: usize) -> Result<Vec<i64>> {
    let x = real_character_values(chi, n)?;
    let mut nu = vec![0i64; n + 1];
    for d in 1..=n {
        let c = x[d];
        if c == 0 {
            continue;
        }
        let mut m = d;
        while m <= n {
            nu[m] += c;
            m += d;
        }
    }
    Ok(nu)
}

pub fn upsilon_values(chi: &Character, n: usize) -> Result<Vec<i64>> {
    let x = real_character_values(chi, n)?;
    let mu = mobius_sieve(n);
    let mut u = vec![0i64; n + 1];
    for b in 1..=n {
        let cb = mu[b] as i64 * x[b];
        if cb == 0 {
            continue;
        }
        let mut a = 1;
        while a * b <= n {
            u[a * b] += mu[a] as i64 * cb;
            a += 1;
        }
    }
    Ok(u)
}

pub fn nu_table(chi: &Character, n: usize) -> Result<CoeffTable> {
    if n < 1 {
        return invalid("N must be at least 1");
    }
    Ok(int_table(CoeffKind::Nu, nu_values(chi, n)?, CoeffParams::Character { modulus: chi.modulus }))
}

pub fn upsilon_table(chi: &Character, n: usize) -> Result<CoeffTable> {
    if n < 1 {
        return invalid("N must be at least 1");
    }
    Ok(int_table(CoeffKind::Upsilon, upsilon_values(chi, n)?, CoeffParams::Character { modulus: chi.modulus }))
}

/// Integer Dirichlet convolution on 1..=n.
pub fn dirichlet_convolve_int(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n + 1];
    for i in 1..=n.min(a.len() - 1) {
        if a[i] == 0 {
            continue;
        }
        let mut j = 1;
        while i * j <= n && j < b.len() {
            out[i * j] += a[i] * b[j];
            j += 1;
        }
    }
    out
}

/// Real Dirichlet convolution on 1..=n with compensated sums.
pub fn dirichlet_convolve(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut acc = vec![KahanSum::new(); n + 1];
    for i in 1..=n.min(a.len() - 1) {
        if a[i] == 0.0 {
            continue;
        }
        let mut j = 1;
        while i * j <= n && j < b.len() {
            acc[i * j].add(a[i] * b[j]);
            j += 1;
        }
    }
    acc.iter().map(|s| s.value()).collect()
}

/// λ₊(n) = Σ_{ab=n} a^{−α} μ(b) b^{α} and λ₋ with α ↦ −α.
pub fn lambda_tables(alpha: f64, n: usize) -> Result<(CoeffTable, CoeffTable)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("α = {alpha} must lie in (0, 1)"));
    }
    let mu = mobius_sieve(n);
    let build = |al: f64| -> Vec<f64> {
        let a: Vec<f64> = (0..=n).map(|k| if k == 0 { 0.0 } else { (k as f64).powf(-al) }).collect();
        let b: Vec<f64> = (0..=n)
            .map(|k| if k == 0 { 0.0 } else { mu[k] as f64 * (k as f64).powf(al) })
            .collect();
        dirichlet_convolve(&a, &b, n)
    };
    let plus = CoeffTable {
        kind: CoeffKind::LambdaPlus,
        limit: n,
        values: build(alpha),
        exact: None,
        params: CoeffParams::Alpha(alpha),
    };
    let minus = CoeffTable {
        kind: CoeffKind::LambdaMinus,
        limit: n,
        values: build(-alpha),
        exact: None,
        params: CoeffParams::Alpha(alpha),
    };
    Ok((plus, minus))
}

/// Closed forms at prime powers: λ₊(p^l) = p^{−lα}(1 − p^{2α}), λ₋(p^l) = p^{lα}(1 − p^{−2α}).
pub fn lambda_prime_power(alpha: f64, p: u64, l: u32) -> (f64, f64) {
    let lp = (p as f64).ln();
    let plus = (-(l as f64) * alpha * lp).exp() * -(2.0 * alpha * lp).exp_m1();
    let minus = ((l as f64) * alpha * lp).exp() * -(-2.0 * alpha * lp).exp_m1();
    (plus, minus)
}

#[derive(Clone, Debug, Serialize)]
pub struct IotaTable {
    pub table: CoeffTable,
    pub cap_f: usize,
    /// Count of n with |ι(n)| > ν(n)τ(n); expected 0.
    pub bound_violations: usize,
}

/// ι = (ν≤F ⋆ υ≤F) − [n=1], on 1..=min(F², n_max).
pub fn iota_table_upto(chi: &Character, cap_f: usize, n_max: usize) -> Result<IotaTable> {
    if cap_f < 1 {
        return invalid("capF must be at least 1");
    }
    let limit = (cap_f.saturating_mul(cap_f)).min(n_max).max(1);
    let nu = nu_values(chi, limit)?;
    let up = upsilon_values(chi, cap_f.min(limit))?;
    let nu_f: Vec<i64> = nu.iter().take(cap_f.min(limit) + 1).copied().collect();
    let mut iota = dirichlet_convolve_int(&nu_f, &up, limit);
    iota[1] -= 1;
    let tau = divisor_count_sieve(limit);
    let bound_violations = (1..=limit)
        .filter(|&n| iota[n].unsigned_abs() > (nu[n].max(0) as u64) * tau[n] as u64)
        .count();
    Ok(IotaTable {
        table: int_table(CoeffKind::Iota, iota, CoeffParams::Truncated { modulus: chi.modulus, cap_f }),
        cap_f,
        bound_violations,
    })
}

pub const IOTA_MAX_LIMIT: usize = 20_000_000;

pub fn iota_table(chi: &Character, cap_f: usize) -> Result<IotaTable> {
    if cap_f.saturating_mul(cap_f) > IOTA_MAX_LIMIT {
        return invalid(format!("capF² = {} exceeds the table cap {IOTA_MAX_LIMIT}; use iota_table_upto", cap_f as u128 * cap_f as u128));
    }
    iota_table_upto(chi, cap_f, usize::MAX)
}

/// Default truncation min(D⁵, 10⁶).
pub fn default_cap_f(big_d: u64) -> usize {
    let d5 = (big_d as u128).pow(5);
    d5.min(1_000_000) as usize
}

/// Σ_{a≤n≤b} v(n)² τ(n)^{2·flag} / n.
pub fn weighted_tail_sum(table: &CoeffTable, a: usize, b: usize, with_tau: bool) -> Result<f64> {
    if a > b {
        return Ok(0.0);
    }
    if a < 1 {
        return invalid("range must start at n ≥ 1");
    }
    table.covers(b)?;
    let tau = if with_tau { divisor_count_sieve(b) } else { Vec::new() };
    let mut s = KahanSum::new();
    for n in a..=b {
        let v = table.values[n];
        let t = if with_tau { (tau[n] as f64).powi(2) } else { 1.0 };
        s.add(v * v * t / n as f64);
    }
    Ok(s.value())
}
