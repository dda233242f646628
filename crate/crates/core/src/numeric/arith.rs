//! Elementary integer arithmetic: gcd, factorization, sieves, primitive roots.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

/// Möbius function on 0..=n (index 0 unused).
pub fn mobius_sieve(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    if n >= 1 {
        mu[0] = 0;
    }
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        let mut m = p;
        while m <= n {
            if m > p {
                composite[m] = true;
            }
            mu[m] = -mu[m];
            m += p;
        }
        let pp = p.saturating_mul(p);
        let mut m = pp;
        while m <= n {
            mu[m] = 0;
            m += pp;
        }
    }
    mu
}

/// Number of divisors on 0..=n.
pub fn divisor_count_sieve(n: usize) -> Vec<u32> {
    let mut tau = vec![0u32; n + 1];
    for d in 1..=n {
        let mut m = d;
        while m <= n {
            tau[m] += 1;
            m += d;
        }
    }
    tau
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut is = vec![true; n + 1];
    is[0] = false;
    is[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Smallest primitive root mod p that is also a primitive root mod p^2,
/// hence mod every power of the odd prime p.
pub fn primitive_root_odd(p: u64) -> u64 {
    assert!(p > 2 && is_prime(p));
    let phi = p - 1;
    let fs = factorize(phi);
    let mut g = 2u64;
    loop {
        if fs.iter().all(|&(r, _)| pow_mod(g, phi / r, p) != 1)
            && pow_mod(g, p - 1, p * p) != 1
        {
            return g;
        }
        g += 1;
    }
}

/// p-adic valuation of n > 0.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Chinese remainder lift: x ≡ r (mod m), x ≡ 1 (mod n/m-part), for coprime m, k.
pub fn crt_pair(r: u64, m: u64, s: u64, k: u64) -> u64 {
    // x = r + m * t, m t ≡ s - r (mod k)
    let inv = mod_inverse(m % k, k).expect("moduli must be coprime");
    let diff = (s as i128 - r as i128).rem_euclid(k as i128) as u64;
    let t = ((diff as u128 * inv as u128) % k as u128) as u64;
    r + m * t
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}
