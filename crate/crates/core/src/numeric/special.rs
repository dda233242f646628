use super::quad;
use super::C64;

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Antiderivative of erfc(-u)/2: (u erfc(-u) + e^{-u²}/√π) / 2.
pub fn half_erfc_antiderivative(u: f64) -> f64 {
    0.5 * (u * erfc(-u) + (-u * u).exp() / std::f64::consts::PI.sqrt())
}

/// (e^u - 1) for complex u, accurate near 0.
pub fn expm1(u: C64) -> C64 {
    if u.norm() < 0.5 {
        let mut term = u;
        let mut acc = u;
        for k in 2..30 {
            term = term * u / k as f64;
            acc += term;
            if term.norm() < 1e-18 * acc.norm() {
                break;
            }
        }
        acc
    } else {
        u.exp() - 1.0
    }
}

/// (e^u - 1)/u, equal to 1 at u = 0.
pub fn expm1_over(u: C64) -> C64 {
    if u.norm() < 1e-300 {
        C64::new(1.0, 0.0)
    } else if u.norm() < 0.5 {
        let mut term = C64::new(1.0, 0.0);
        let mut acc = term;
        for k in 2..30 {
            term = term * u / k as f64;
            acc += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        acc
    } else {
        (u.exp() - 1.0) / u
    }
}

/// sin(x)/x with the removable singularity filled.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// Sine integral Si(x) = ∫_0^x sin t / t dt by panel quadrature.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    let panels = ((x / 2.0).ceil() as usize).max(1);
    quad::composite(&sinc, 0.0, x, panels, 24)
}
