//! Dirichlet characters stored by CRT local indices.
//!
//! Odd prime powers p^e use a primitive root g mod p² (valid for every e), and
//! a single index k mod φ(p^e). The 2-part uses generators −1 and 5.

use crate::error::{invalid, Error, Result};
use crate::numeric::arith::{self, factorize, gcd, lcm, pow_mod, valuation};
use crate::numeric::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalIndex {
    /// p odd: ψ(g) = e(k/φ(p^e)).
    Odd { k: u64 },
    /// 2^1: only the trivial character.
    TwoOne,
    /// 2^2: ψ(−1) = (−1)^a.
    TwoTwo { a: u8 },
    /// 2^e, e ≥ 3: ψ(−1) = (−1)^a, ψ(5) = e(b/2^{e−2}).
    TwoHigh { a: u8, b: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFactor {
    pub p: u64,
    pub e: u32,
    pub index: LocalIndex,
}

impl LocalFactor {
    pub fn pe(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// Exponent f of the local conductor p^f.
    pub fn conductor_exponent(&self) -> u32 {
        match self.index {
            LocalIndex::Odd { k } => {
                if k == 0 {
                    0
                } else {
                    self.e - valuation(k, self.p).min(self.e - 1)
                }
            }
            LocalIndex::TwoOne => 0,
            LocalIndex::TwoTwo { a } => {
                if a == 0 {
                    0
                } else {
                    2
                }
            }
            LocalIndex::TwoHigh { a, b } => {
                if b == 0 {
                    if a == 0 {
                        0
                    } else {
                        2
                    }
                } else {
                    self.e - valuation(b, 2)
                }
            }
        }
    }

    fn is_trivial(&self) -> bool {
        self.conductor_exponent() == 0
    }

    fn is_real(&self) -> bool {
        match self.index {
            LocalIndex::Odd { k } => {
                let phi = self.p.pow(self.e - 1) * (self.p - 1);
                (2 * k) % phi == 0
            }
            LocalIndex::TwoHigh { b, .. } => (2 * b) % (1 << (self.e - 2)) == 0,
            _ => true,
        }
    }

    /// Index of the same character viewed mod p^{e2}, e2 ≥ e.
    fn lift(&self, e2: u32) -> LocalFactor {
        assert!(e2 >= self.e);
        let p = self.p;
        let index = match self.index {
            LocalIndex::Odd { k } => LocalIndex::Odd { k: k * p.pow(e2 - self.e) },
            LocalIndex::TwoOne => match e2 {
                1 => LocalIndex::TwoOne,
                2 => LocalIndex::TwoTwo { a: 0 },
                _ => LocalIndex::TwoHigh { a: 0, b: 0 },
            },
            LocalIndex::TwoTwo { a } => {
                if e2 == 2 {
                    LocalIndex::TwoTwo { a }
                } else {
                    LocalIndex::TwoHigh { a, b: 0 }
                }
            }
            LocalIndex::TwoHigh { a, b } => LocalIndex::TwoHigh { a, b: b << (e2 - self.e) },
        };
        LocalFactor { p, e: e2, index }
    }

    fn mul(&self, other: &LocalFactor) -> LocalFactor {
        assert_eq!(self.p, other.p);
        let e = self.e.max(other.e);
        let (x, y) = (self.lift(e), other.lift(e));
        let index = match (x.index, y.index) {
            (LocalIndex::Odd { k: k1 }, LocalIndex::Odd { k: k2 }) => {
                let phi = self.p.pow(e - 1) * (self.p - 1);
                LocalIndex::Odd { k: (k1 + k2) % phi }
            }
            (LocalIndex::TwoOne, LocalIndex::TwoOne) => LocalIndex::TwoOne,
            (LocalIndex::TwoTwo { a: a1 }, LocalIndex::TwoTwo { a: a2 }) => LocalIndex::TwoTwo { a: (a1 + a2) % 2 },
            (LocalIndex::TwoHigh { a: a1, b: b1 }, LocalIndex::TwoHigh { a: a2, b: b2 }) => {
                LocalIndex::TwoHigh { a: (a1 + a2) % 2, b: (b1 + b2) % (1 << (e - 2)) }
            }
            _ => unreachable!("lifted indices share a shape"),
        };
        LocalFactor { p: self.p, e, index }
    }

    fn conj(&self) -> LocalFactor {
        let index = match self.index {
            LocalIndex::Odd { k } => {
                let phi = self.p.pow(self.e - 1) * (self.p - 1);
                LocalIndex::Odd { k: (phi - k) % phi }
            }
            LocalIndex::TwoHigh { a, b } => {
                let m = 1u64 << (self.e - 2);
                LocalIndex::TwoHigh { a, b: (m - b) % m }
            }
            other => other,
        };
        LocalFactor { index, ..*self }
    }

    /// Order of the local group generator(s) used to scale phases.
    fn phase_denominator(&self) -> u64 {
        match self.index {
            LocalIndex::Odd { .. } => self.p.pow(self.e - 1) * (self.p - 1),
            LocalIndex::TwoOne => 1,
            LocalIndex::TwoTwo { .. } => 2,
            LocalIndex::TwoHigh { .. } => (1u64 << (self.e - 2)).max(2),
        }
    }
}

/// Discrete-log tables for one prime power: residue -> exponent vector.
struct LocalLogs {
    pe: u64,
    // for odd p: log_g(n); for 2^e: (a, b) packed as a * 2^{e-2} + b
    logs: Vec<u64>,
}

fn local_logs(p: u64, e: u32) -> LocalLogs {
    let pe = p.pow(e);
    let mut logs = vec![u64::MAX; pe as usize];
    if p == 2 {
        if e == 1 {
            logs[1] = 0;
        } else if e == 2 {
            logs[1] = 0;
            logs[3] = 1;
        } else {
            let half = 1u64 << (e - 2);
            let mut x = 1u64;
            for b in 0..half {
                logs[x as usize] = b;
                logs[(pe - x) as usize] = half + b;
                x = x * 5 % pe;
            }
        }
    } else {
        let g = arith::primitive_root_odd(p);
        let phi = pe / p * (p - 1);
        let mut x = 1u64;
        for j in 0..phi {
            logs[x as usize] = j;
            x = x * g % pe;
        }
    }
    LocalLogs { pe, logs }
}

/// Phase numerator of a local character at residue n (coprime), scaled to `den`.
fn local_phase(f: &LocalFactor, logs: &LocalLogs, n: u64, big: u64) -> u64 {
    let r = logs.logs[(n % logs.pe) as usize];
    match f.index {
        LocalIndex::Odd { k } => {
            let phi = f.phase_denominator();
            (k % phi) * r % phi * (big / phi) % big
        }
        LocalIndex::TwoOne => 0,
        LocalIndex::TwoTwo { a } => (a as u64 * r) % 2 * (big / 2) % big,
        LocalIndex::TwoHigh { a, b } => {
            let half = 1u64 << (f.e - 2);
            let (ra, rb) = (r / half, r % half);
            let pa = (a as u64 * ra) % 2 * (big / 2);
            let pb = (b * rb) % half * (big / half);
            (pa + pb) % big
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Character {
    pub modulus: u64,
    pub factors: Vec<LocalFactor>,
    pub parity: u8,
    pub conductor: u64,
    /// Common denominator N of all phases.
    pub order_den: u64,
    /// Phase numerator mod N per residue; u64::MAX marks non-coprime residues.
    #[serde(skip)]
    phases: Arc<Vec<u64>>,
    #[serde(skip)]
    values: Arc<Vec<C64>>,
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.factors == other.factors
    }
}

fn phase_value(num: u64, den: u64) -> C64 {
    if num == u64::MAX {
        return C64::new(0.0, 0.0);
    }
    let num = num % den;
    if num == 0 {
        C64::new(1.0, 0.0)
    } else if 2 * num == den {
        C64::new(-1.0, 0.0)
    } else if 4 * num == den {
        C64::new(0.0, 1.0)
    } else if 4 * num == 3 * den {
        C64::new(0.0, -1.0)
    } else {
        let ang = 2.0 * PI * num as f64 / den as f64;
        C64::new(ang.cos(), ang.sin())
    }
}

impl Character {
    /// Builds the character mod `modulus` from local factors covering its factorization.
    pub fn from_factors(modulus: u64, mut factors: Vec<LocalFactor>) -> Result<Self> {
        factors.sort_by_key(|f| f.p);
        let fact = factorize(modulus);
        if fact.len() != factors.len() || fact.iter().zip(&factors).any(|(&(p, e), f)| p != f.p || e != f.e) {
            return invalid(format!("local factors do not match modulus {modulus}"));
        }
        for f in &factors {
            let ok = match f.index {
                LocalIndex::Odd { k } => f.p != 2 && k < f.phase_denominator(),
                LocalIndex::TwoOne => f.p == 2 && f.e == 1,
                LocalIndex::TwoTwo { a } => f.p == 2 && f.e == 2 && a < 2,
                LocalIndex::TwoHigh { a, b } => f.p == 2 && f.e >= 3 && a < 2 && b < (1 << (f.e - 2)),
            };
            if !ok {
                return invalid(format!("bad local index {:?}", f));
            }
        }
        let den = factors.iter().fold(1u64, |acc, f| lcm(acc, f.phase_denominator()));
        let logs: Vec<LocalLogs> = factors.iter().map(|f| local_logs(f.p, f.e)).collect();
        let m = modulus as usize;
        let mut phases = vec![u64::MAX; m];
        for (n, slot) in phases.iter_mut().enumerate() {
            let n = n as u64;
            if gcd(n, modulus) != 1 {
                continue;
            }
            let mut acc = 0u64;
            for (f, l) in factors.iter().zip(&logs) {
                acc = (acc + local_phase(f, l, n, den)) % den;
            }
            *slot = acc;
        }
        if modulus == 1 {
            phases[0] = 0;
        }
        let values: Vec<C64> = phases.iter().map(|&p| phase_value(p, den)).collect();
        let conductor = factors.iter().map(|f| f.p.pow(f.conductor_exponent())).product();
        let minus_one = values[(modulus - 1) as usize % m];
        let parity = if modulus <= 2 || minus_one.re > 0.0 { 0 } else { 1 };
        Ok(Character {
            modulus,
            factors,
            parity,
            conductor,
            order_den: den,
            phases: Arc::new(phases),
            values: Arc::new(values),
        })
    }

    pub fn principal(modulus: u64) -> Self {
        let factors = factorize(modulus)
            .into_iter()
            .map(|(p, e)| LocalFactor { p, e, index: trivial_index(p, e) })
            .collect();
        Self::from_factors(modulus, factors).expect("principal character")
    }

    pub fn value(&self, n: i64) -> C64 {
        let r = n.rem_euclid(self.modulus as i64) as usize;
        self.values[r]
    }

    pub fn value_u(&self, n: u64) -> C64 {
        self.values[(n % self.modulus) as usize]
    }

    /// Phase numerator over `order_den`, or None when gcd(n, modulus) > 1.
    pub fn phase(&self, n: u64) -> Option<u64> {
        let p = self.phases[(n % self.modulus) as usize];
        (p != u64::MAX).then_some(p)
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn factorization(&self) -> Vec<(u64, u32)> {
        self.factors.iter().map(|f| (f.p, f.e)).collect()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.factors.iter().all(|f| f.is_trivial())
    }

    pub fn is_real(&self) -> bool {
        self.factors.iter().all(|f| f.is_real())
    }

    pub fn conj(&self) -> Character {
        let f = self.factors.iter().map(|f| f.conj()).collect();
        Character::from_factors(self.modulus, f).expect("conjugate")
    }

    /// Pointwise product, as a character mod lcm of the moduli.
    pub fn mul(&self, other: &Character) -> Character {
        let m = lcm(self.modulus, other.modulus);
        let mut out = Vec::new();
        for (p, e) in factorize(m) {
            let a = self.factors.iter().find(|f| f.p == p).copied().unwrap_or(LocalFactor {
                p,
                e: 1,
                index: trivial_index(p, 1),
            });
            let b = other.factors.iter().find(|f| f.p == p).copied().unwrap_or(LocalFactor {
                p,
                e: 1,
                index: trivial_index(p, 1),
            });
            out.push(a.lift(e).mul(&b.lift(e)));
        }
        Character::from_factors(m, out).expect("product character")
    }

    /// Index vector for display: one entry per odd prime, (a, b) per 2-part.
    pub fn index_vector(&self) -> Vec<u64> {
        let mut v = Vec::new();
        for f in &self.factors {
            match f.index {
                LocalIndex::Odd { k } => v.push(k),
                LocalIndex::TwoOne => v.push(0),
                LocalIndex::TwoTwo { a } => v.push(a as u64),
                LocalIndex::TwoHigh { a, b } => {
                    v.push(a as u64);
                    v.push(b);
                }
            }
        }
        v
    }

    /// Builds a character from an index vector in the layout of `index_vector`.
    pub fn from_index_vector(modulus: u64, idx: &[u64]) -> Result<Character> {
        let mut it = idx.iter().copied();
        let mut factors = Vec::new();
        for (p, e) in factorize(modulus) {
            let mut next = || it.next().ok_or_else(|| Error::Invalid("index vector too short".into()));
            let index = if p != 2 {
                LocalIndex::Odd { k: next()? }
            } else if e == 1 {
                next()?;
                LocalIndex::TwoOne
            } else if e == 2 {
                LocalIndex::TwoTwo { a: next()? as u8 }
            } else {
                let a = next()? as u8;
                LocalIndex::TwoHigh { a, b: next()? }
            };
            factors.push(LocalFactor { p, e, index });
        }
        if it.next().is_some() {
            return invalid("index vector too long");
        }
        Character::from_factors(modulus, factors)
    }
}

fn trivial_index(p: u64, e: u32) -> LocalIndex {
    if p != 2 {
        LocalIndex::Odd { k: 0 }
    } else if e == 1 {
        LocalIndex::TwoOne
    } else if e == 2 {
        LocalIndex::TwoTwo { a: 0 }
    } else {
        LocalIndex::TwoHigh { a: 0, b: 0 }
    }
}

/// Jacobi symbol (a/n) for odd n > 0.
fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1i32;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    let m4 = d.rem_euclid(4);
    if m4 == 1 {
        return arith::is_squarefree(d.unsigned_abs());
    }
    if m4 == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        return (r == 2 || r == 3) && arith::is_squarefree(m.unsigned_abs());
    }
    false
}

/// Kronecker symbol (d/n) for a fundamental discriminant d (or d = ±1).
pub fn kronecker_symbol(d: i64, n: i64) -> Result<i32> {
    if !(d == -1 || is_fundamental_discriminant(d)) {
        return invalid(format!("{d} is not a fundamental discriminant"));
    }
    Ok(kronecker_raw(d, n))
}

fn kronecker_raw(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut t = 1;
    let mut m = n.unsigned_abs();
    if n < 0 && d < 0 {
        t = -t;
    }
    while m.is_multiple_of(2) {
        m /= 2;
        let r = d.rem_euclid(8);
        match r {
            1 | 7 => {}
            3 | 5 => t = -t,
            _ => return 0,
        }
    }
    if m == 1 {
        return t;
    }
    t * jacobi(d, m)
}

/// Fundamental discriminant with |d| = D; positive preferred when both signs qualify.
pub fn fundamental_from_magnitude(big_d: i64) -> Result<i64> {
    if big_d < 0 {
        return if is_fundamental_discriminant(big_d) {
            Ok(big_d)
        } else {
            invalid(format!("{big_d} is not a fundamental discriminant"))
        };
    }
    if is_fundamental_discriminant(big_d) {
        Ok(big_d)
    } else if is_fundamental_discriminant(-big_d) {
        Ok(-big_d)
    } else {
        invalid(format!("no fundamental discriminant of magnitude {big_d}"))
    }
}

/// The real primitive character n ↦ (d/n) modulo |d|.
pub fn kronecker_character(d: i64) -> Result<Character> {
    if !is_fundamental_discriminant(d) {
        return invalid(format!("{d} is not a fundamental discriminant"));
    }
    let m = d.unsigned_abs();
    let mut factors = Vec::new();
    for (p, e) in factorize(m) {
        let pe = p.pow(e);
        let rest = m / pe;
        let lift = |r: u64| arith::crt_pair(r % pe, pe, 1 % rest.max(1), rest.max(1));
        let sign = |r: u64| kronecker_raw(d, lift(r) as i64);
        let index = if p != 2 {
            let g = arith::primitive_root_odd(p);
            LocalIndex::Odd { k: if sign(g) == 1 { 0 } else { (p - 1) / 2 } }
        } else if e == 2 {
            LocalIndex::TwoTwo { a: if sign(pe - 1) == 1 { 0 } else { 1 } }
        } else {
            LocalIndex::TwoHigh {
                a: if sign(pe - 1) == 1 { 0 } else { 1 },
                b: if sign(5) == 1 { 0 } else { 1 << (e - 3) },
            }
        };
        factors.push(LocalFactor { p, e, index });
    }
    Character::from_factors(m, factors)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    /// Fundamental discriminant of χ.
    pub d: i64,
    pub big_q: u64,
    pub q_list: Vec<u64>,
}

/// q in (Q, 2Q), squarefree, coprime to 6.
pub fn q_range(big_q: u64) -> Vec<u64> {
    ((big_q + 1)..(2 * big_q))
        .filter(|&q| gcd(q, 6) == 1 && arith::is_squarefree(q))
        .collect()
}

/// All ψ primitive mod q (odd, squarefree) with ψχ primitive mod [q, |d|].
pub fn enumerate_twisted_primitive(q: u64, chi: &Character) -> Result<Vec<Character>> {
    if q.is_multiple_of(2) || !arith::is_squarefree(q) {
        return invalid(format!("q = {q} must be odd and squarefree"));
    }
    let fact = factorize(q);
    let mut choices: Vec<Vec<u64>> = Vec::new();
    for &(p, _) in &fact {
        let chi_local = chi.factors.iter().find(|f| f.p == p);
        let forbidden = chi_local.map(|f| match f.index {
            LocalIndex::Odd { k }
                if f.e == 1 => {
                    (p - 1 - k) % (p - 1)
                }
            _ => u64::MAX,
        });
        let ks: Vec<u64> = (1..p - 1).filter(|&k| Some(k) != forbidden).collect();
        choices.push(ks);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    if choices.iter().any(|c| c.is_empty()) {
        return Ok(out);
    }
    loop {
        let factors = fact
            .iter()
            .zip(&idx)
            .zip(&choices)
            .map(|((&(p, e), &i), ks)| LocalFactor { p, e, index: LocalIndex::Odd { k: ks[i] } })
            .collect();
        let psi = Character::from_factors(q, factors)?;
        debug_assert!(psi.is_primitive());
        debug_assert!(psi.mul(chi).is_primitive());
        out.push(psi);
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok(out);
            }
            idx[j] += 1;
            if idx[j] < choices[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Ψ_q for q in the family range (squarefree, coprime to 6).
pub fn enumerate_psi_q(q: u64, chi: &Character) -> Result<Vec<Character>> {
    if gcd(q, 6) != 1 || !arith::is_squarefree(q) {
        return invalid(format!("q = {q} must be squarefree and coprime to 6"));
    }
    enumerate_twisted_primitive(q, chi)
}

/// |Ψ_q| = ∏_{p∤D}(p−2) ∏_{p|D}(p−3).
pub fn psi_q_count(q: u64, d: i64) -> u64 {
    factorize(q)
        .iter()
        .map(|&(p, _)| if d.unsigned_abs().is_multiple_of(p) { p.saturating_sub(3) } else { p - 2 })
        .product()
}

#[derive(Clone, Debug)]
pub struct Family {
    pub spec: FamilySpec,
    pub chi: Character,
}

impl Family {
    /// Lazily yields (q, ψ) in increasing q, then index order.
    pub fn iter(&self) -> impl Iterator<Item = Character> + '_ {
        self.spec
            .q_list
            .iter()
            .flat_map(move |&q| enumerate_psi_q(q, &self.chi).expect("q from q_range"))
    }

    pub fn members(&self) -> Vec<Character> {
        self.iter().collect()
    }

    pub fn count(&self) -> u64 {
        self.spec.q_list.iter().map(|&q| psi_q_count(q, self.spec.d)).sum()
    }

    pub fn count_ratio(&self) -> f64 {
        self.count() as f64 / (self.spec.big_q as f64).powi(2)
    }
}

/// Builds Ψ = ∪ Ψ_q; an empty q-range is an error distinct from an empty Ψ.
pub fn build_family(d: i64, big_q: u64) -> Result<Family> {
    let d = fundamental_from_magnitude(d)?;
    let chi = kronecker_character(d)?;
    let q_list = q_range(big_q);
    if q_list.is_empty() {
        return Err(Error::EmptyRange { lo: big_q, hi: 2 * big_q });
    }
    Ok(Family { spec: FamilySpec { d, big_q, q_list }, chi })
}

/// τ(ψ) = Σ ψ(r) e(r/q) for primitive ψ.
pub fn gauss_sum(psi: &Character) -> Result<C64> {
    if !psi.is_primitive() {
        return invalid("Gauss sum requested for an imprimitive character");
    }
    Ok(gauss_sum_raw(psi))
}

pub(crate) fn gauss_sum_raw(psi: &Character) -> C64 {
    let q = psi.modulus;
    let mut s = crate::numeric::sum::ComplexSum::new();
    for r in 1..=q {
        let v = psi.value_u(r);
        if v.norm_sqr() == 0.0 {
            continue;
        }
        let ang = 2.0 * PI * (r % q) as f64 / q as f64;
        s.add(v * C64::new(ang.cos(), ang.sin()));
    }
    s.value()
}

/// Primitivity by brute force: not induced from any modulus q/p.
pub fn is_primitive_bruteforce(psi: &Character) -> bool {
    let q = psi.modulus;
    if q == 1 {
        return true;
    }
    for (p, _) in factorize(q) {
        let sub = q / p;
        let induced = (1..q)
            .filter(|&n| gcd(n, q) == 1 && n % sub == 1 % sub)
            .all(|n| (psi.value_u(n) - 1.0).norm() < 1e-12);
        if induced {
            return false;
        }
    }
    true
}

pub fn character_value(psi: &Character, n: i64) -> C64 {
    psi.value(n)
}

/// Integer power helper used by tests and callers that need ψ(n) for big n.
pub fn pow_value(psi: &Character, base: u64, exp: u64) -> C64 {
    psi.value_u(pow_mod(base, exp, psi.modulus))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_characters(q: u64) -> Vec<Character> {
        // every index combination mod q
        let fact = factorize(q);
        let mut shapes: Vec<Vec<LocalIndex>> = Vec::new();
        for &(p, e) in &fact {
            let mut v = Vec::new();
            if p != 2 {
                for k in 0..p.pow(e - 1) * (p - 1) {
                    v.push(LocalIndex::Odd { k });
                }
            } else if e == 1 {
                v.push(LocalIndex::TwoOne);
            } else if e == 2 {
                v.push(LocalIndex::TwoTwo { a: 0 });
                v.push(LocalIndex::TwoTwo { a: 1 });
            } else {
                for a in 0..2 {
                    for b in 0..1 << (e - 2) {
                        v.push(LocalIndex::TwoHigh { a, b });
                    }
                }
            }
            shapes.push(v);
        }
        let mut out = vec![Vec::new()];
        for (s, &(p, e)) in shapes.iter().zip(&fact) {
            let mut next = Vec::new();
            for prefix in &out {
                for &ix in s {
                    let mut v: Vec<LocalFactor> = prefix.clone();
                    v.push(LocalFactor { p, e, index: ix });
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(|f| Character::from_factors(q, f).unwrap()).collect()
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_symbol(-4, 3).unwrap(), -1);
        assert_eq!(kronecker_symbol(8, 3).unwrap(), -1);
        assert_eq!(kronecker_symbol(5, 1).unwrap(), 1);
        assert!(kronecker_symbol(9, 5).is_err());
        assert!(kronecker_symbol(-1, 5).is_ok());
        // residue oracle for odd primes: (d/p) = Legendre symbol
        for d in [-4i64, 5, -3, 8, -8, 12, -7, 13, 21, -20] {
            for p in [3u64, 5, 7, 11, 13, 17, 19] {
                if d.unsigned_abs() % p == 0 {
                    continue;
                }
                let r = d.rem_euclid(p as i64) as u64;
                let is_sq = (1..p).any(|x| x * x % p == r);
                let expect = if is_sq { 1 } else { -1 };
                assert_eq!(kronecker_symbol(d, p as i64).unwrap(), expect, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_character_matches_symbol() {
        for d in [-4i64, 5, -3, 8, -8, 12, -7, 13, 24, -24, 40, -56] {
            let chi = kronecker_character(d).unwrap();
            assert!(chi.is_primitive(), "d={d}");
            assert!(chi.is_real());
            for n in 0..(3 * d.abs()) {
                let k = kronecker_symbol(d, n).unwrap() as f64;
                assert!((chi.value(n) - k).norm() < 1e-12, "d={d}, n={n}");
            }
            assert_eq!(chi.parity, if d < 0 { 1 } else { 0 });
        }
    }

    #[test]
    fn magnitude_to_discriminant() {
        assert_eq!(fundamental_from_magnitude(4).unwrap(), -4);
        assert_eq!(fundamental_from_magnitude(5).unwrap(), 5);
        assert_eq!(fundamental_from_magnitude(3).unwrap(), -3);
        assert_eq!(fundamental_from_magnitude(8).unwrap(), 8);
        assert_eq!(fundamental_from_magnitude(-8).unwrap(), -8);
        assert!(fundamental_from_magnitude(9).is_err());
    }

    #[test]
    fn mod3_values() {
        let chi = Character::from_factors(3, vec![LocalFactor { p: 3, e: 1, index: LocalIndex::Odd { k: 1 } }]).unwrap();
        assert_eq!(chi.value(1), C64::new(1.0, 0.0));
        assert_eq!(chi.value(2), C64::new(-1.0, 0.0));
        assert_eq!(chi.value(3), C64::new(0.0, 0.0));
        let g = gauss_sum(&chi).unwrap();
        assert!((g - C64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        let chi4 = kronecker_character(-4).unwrap();
        assert!((gauss_sum(&chi4).unwrap() - C64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn conductor_matches_bruteforce() {
        for q in [5u64, 8, 9, 12, 15, 16, 25, 27, 32, 45, 49, 60] {
            for psi in all_characters(q) {
                assert_eq!(psi.is_primitive(), is_primitive_bruteforce(&psi), "q={q} {:?}", psi.factors);
            }
        }
    }

    #[test]
    fn psi_q_counts() {
        let chi4 = kronecker_character(-4).unwrap();
        assert_eq!(enumerate_psi_q(5, &chi4).unwrap().len(), 3);
        let chi5 = kronecker_character(5).unwrap();
        assert_eq!(enumerate_psi_q(5, &chi5).unwrap().len(), 2);
        assert!(enumerate_psi_q(15, &chi5).is_err());
        assert_eq!(enumerate_twisted_primitive(15, &chi5).unwrap().len(), 2);
        // brute force over the 8 characters mod 15
        let brute = all_characters(15)
            .into_iter()
            .filter(|p| is_primitive_bruteforce(p) && is_primitive_bruteforce(&p.mul(&chi5)))
            .count();
        assert_eq!(brute, 2);
    }

    #[test]
    fn family_examples() {
        let f = build_family(4, 5).unwrap();
        assert_eq!(f.spec.q_list, vec![7]);
        assert_eq!(f.count(), 5);
        assert_eq!(f.members().len(), 5);
        let f = build_family(4, 4).unwrap();
        assert_eq!(f.spec.q_list, vec![5, 7]);
        assert_eq!(f.members().len(), 8);
        assert!(matches!(build_family(4, 2), Err(Error::EmptyRange { .. })));
    }

    #[test]
    fn twisted_members_are_primitive() {
        for d in [-4i64, 5, -3, 8, 12, -7] {
            let chi = kronecker_character(d).unwrap();
            for q in [5u64, 7, 35, 55, 77, 91] {
                let v = enumerate_psi_q(q, &chi).unwrap();
                assert_eq!(v.len() as u64, psi_q_count(q, d), "q={q} d={d}");
                for psi in &v {
                    assert!(is_primitive_bruteforce(psi));
                    assert!(is_primitive_bruteforce(&psi.mul(&chi)));
                }
            }
        }
    }

    #[test]
    fn product_values_pointwise() {
        let chi = kronecker_character(12).unwrap();
        let psi = &enumerate_psi_q(35, &chi).unwrap()[3];
        let prod = psi.mul(&chi);
        assert_eq!(prod.modulus, 420);
        for n in 0..1000 {
            assert!((prod.value(n) - psi.value(n) * chi.value(n)).norm() < 1e-12);
        }
        let conj = psi.conj();
        for n in 0..100 {
            assert!((conj.value(n) - psi.value(n).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn index_vector_roundtrip() {
        let chi = kronecker_character(-8).unwrap();
        let v = chi.index_vector();
        let back = Character::from_index_vector(8, &v).unwrap();
        assert_eq!(back, chi);
    }
}
