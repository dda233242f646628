//! Complex log-gamma via upward shift, Stirling series and reflection.

use super::C64;
use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k-1)), k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const SHIFT_TO: f64 = 15.0;

/// Principal-continuous ln Γ(z) on Re z > 0; off that half-plane the value is
/// correct modulo 2πi.
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        return reflect(z);
    }
    let mut w = z;
    let mut shift = C64::new(0.0, 0.0);
    while w.re < SHIFT_TO {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

fn stirling(z: C64) -> C64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut series = C64::new(0.0, 0.0);
    for b in STIRLING {
        series += pow * b;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series
}

fn reflect(z: C64) -> C64 {
    C64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z)
}

/// ln sin(πz), stable for large |Im z|.
pub fn ln_sin_pi(z: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    if z.im.abs() < 5.0 {
        return (z * PI).sin().ln();
    }
    // sin(πz) = (e^{iπz} - e^{-iπz}) / 2i; factor out the dominant exponential.
    if z.im > 0.0 {
        let e = (2.0 * PI * i * z).exp();
        -i * PI * z + (1.0 - e).ln() - (-2.0 * i).ln()
    } else {
        let e = (-2.0 * PI * i * z).exp();
        i * PI * z + (1.0 - e).ln() - (2.0 * i).ln()
    }
}

/// True when z is within `tol` of a pole of Γ.
pub fn near_gamma_pole(z: C64, tol: f64) -> bool {
    z.re <= tol && z.im.abs() <= tol && (z.re - z.re.round()).abs() <= tol
}

pub fn gamma(z: C64) -> C64 {
    ln_gamma(z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn real_factorials() {
        let mut f = 1.0f64;
        for n in 1..20 {
            let g = gamma(C64::new(n as f64, 0.0));
            assert!(close(g, C64::new(f, 0.0), 1e-13), "n={n}: {g}");
            f *= n as f64;
        }
        let half = gamma(C64::new(0.5, 0.0));
        assert!(close(half, C64::new(PI.sqrt(), 0.0), 1e-14));
    }

    #[test]
    fn recurrence_and_reflection() {
        for &(x, y) in &[(0.3, 2.0), (-2.7, 0.4), (1.2, -30.0), (-0.4, 25.0), (3.0, 100.0)] {
            let z = C64::new(x, y);
            let lhs = ln_gamma(z + 1.0) - ln_gamma(z) - z.ln();
            let k = (lhs.im / (2.0 * PI)).round();
            assert!((lhs - C64::new(0.0, 2.0 * PI * k)).norm() < 1e-11, "z={z} lhs={lhs}");
            let refl = gamma(z) * gamma(1.0 - z) * (z * PI).sin();
            if y.abs() < 20.0 {
                assert!(close(refl, C64::new(PI, 0.0), 1e-11), "z={z} {refl}");
            }
        }
    }

    #[test]
    fn modulus_on_imaginary_axis() {
        // |Γ(iy)|² = π / (y sinh πy)
        for y in [0.5, 2.0, 7.0, 15.0] {
            let z = C64::new(0.0, y);
            let lhs = 2.0 * ln_gamma(z).re;
            let rhs = (PI / (y * (PI * y).sinh())).ln();
            assert!((lhs - rhs).abs() < 1e-11, "y={y}");
        }
    }
}
