//! Complex functions on an interval: exponential sums, polynomials, cubic
//! splines, linear combinations and closure-backed rules.

use crate::error::{invalid, Error, Result};
use crate::numeric::special::expm1_over;
use crate::numeric::{quad, C64};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

pub type CFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Smoothness {
    C0,
    C1,
}

/// Natural cubic spline through complex samples.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<C64>,
    m: Vec<C64>,
}

impl CubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<C64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return invalid("spline needs at least two matching samples");
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("spline abscissae must be strictly increasing");
        }
        // second derivatives by the tridiagonal system with natural ends
        let mut m = vec![C64::new(0.0, 0.0); n];
        if n > 2 {
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![C64::new(0.0, 0.0); k];
            let mut sup = vec![0.0; k];
            for i in 0..k {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                sup[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..k {
                let sub = xs[i + 1] - xs[i];
                let w = sub / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                let prev = rhs[i - 1];
                rhs[i] -= prev * w;
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - sup[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(CubicSpline { xs, ys, m })
    }

    fn locate(&self, x: f64) -> usize {
        let k = self.xs.partition_point(|&v| v <= x);
        k.clamp(1, self.xs.len() - 1) - 1
    }

    pub fn eval(&self, x: f64) -> C64 {
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        self.ys[i] * a
            + self.ys[i + 1] * b
            + (self.m[i] * (a * a * a - a) + self.m[i + 1] * (b * b * b - b)) * (h * h / 6.0)
    }

    pub fn deriv(&self, x: f64) -> C64 {
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h + (self.m[i + 1] * (3.0 * b * b - 1.0) - self.m[i] * (3.0 * a * a - 1.0)) * (h / 6.0)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }
}

#[derive(Clone)]
pub enum Rule {
    /// Σ a_j Q^{x s_j}.
    Exponential { log_q: f64, terms: Vec<(C64, C64)> },
    /// Σ c_k x^k.
    Polynomial(Vec<C64>),
    Sampled(Arc<CubicSpline>),
    Combination(Vec<(C64, IntervalFunction)>),
    /// x ↦ f(x + shift).
    Shifted(Box<IntervalFunction>, f64),
    Custom { f: CFn, df: Option<CFn>, label: String },
}

#[derive(Clone)]
pub struct IntervalFunction {
    pub rule: Rule,
    pub domain: (f64, f64),
    pub smooth: Smoothness,
}

impl fmt::Debug for IntervalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.rule {
            Rule::Exponential { terms, .. } => format!("exponential({} terms)", terms.len()),
            Rule::Polynomial(c) => format!("polynomial(degree {})", c.len().saturating_sub(1)),
            Rule::Sampled(_) => "sampled".into(),
            Rule::Combination(v) => format!("combination({})", v.len()),
            Rule::Shifted(_, s) => format!("shifted({s})"),
            Rule::Custom { label, .. } => label.clone(),
        };
        write!(f, "IntervalFunction[{kind} on {:?}]", self.domain)
    }
}

const ENTIRE: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);
const SLACK: f64 = 1e-12;

impl IntervalFunction {
    pub fn exponential(log_q: f64, terms: Vec<(C64, C64)>) -> Self {
        IntervalFunction { rule: Rule::Exponential { log_q, terms }, domain: ENTIRE, smooth: Smoothness::C1 }
    }

    /// φ_s(x) = Q^{xs}.
    pub fn phi_s(s: C64, log_q: f64) -> Self {
        Self::exponential(log_q, vec![(C64::new(1.0, 0.0), s)])
    }

    pub fn phi0(log_q: f64) -> Self {
        Self::phi_s(C64::new(0.0, 0.0), log_q)
    }

    pub fn polynomial(coeffs: Vec<C64>) -> Self {
        IntervalFunction { rule: Rule::Polynomial(coeffs), domain: ENTIRE, smooth: Smoothness::C1 }
    }

    pub fn zero() -> Self {
        Self::polynomial(vec![])
    }

    pub fn sampled(xs: Vec<f64>, ys: Vec<C64>) -> Result<Self> {
        let sp = CubicSpline::new(xs, ys)?;
        let domain = sp.range();
        Ok(IntervalFunction { rule: Rule::Sampled(Arc::new(sp)), domain, smooth: Smoothness::C1 })
    }

    pub fn custom(label: &str, domain: (f64, f64), f: CFn, df: Option<CFn>) -> Self {
        let smooth = if df.is_some() { Smoothness::C1 } else { Smoothness::C0 };
        IntervalFunction { rule: Rule::Custom { f, df, label: label.into() }, domain, smooth }
    }

    pub fn combination(parts: Vec<(C64, IntervalFunction)>) -> Self {
        let lo = parts.iter().map(|p| p.1.domain.0).fold(f64::NEG_INFINITY, f64::max);
        let hi = parts.iter().map(|p| p.1.domain.1).fold(f64::INFINITY, f64::min);
        let smooth = if parts.iter().all(|p| p.1.smooth == Smoothness::C1) { Smoothness::C1 } else { Smoothness::C0 };
        IntervalFunction { rule: Rule::Combination(parts), domain: (lo, hi), smooth }
    }

    pub fn scaled(&self, c: C64) -> Self {
        if let Rule::Exponential { log_q, terms } = &self.rule {
            return Self::exponential(*log_q, terms.iter().map(|&(a, s)| (a * c, s)).collect());
        }
        Self::combination(vec![(c, self.clone())])
    }

    pub fn plus(&self, other: &IntervalFunction) -> Self {
        Self::combination(vec![(C64::new(1.0, 0.0), self.clone()), (C64::new(1.0, 0.0), other.clone())])
    }

    pub fn minus(&self, other: &IntervalFunction) -> Self {
        Self::combination(vec![(C64::new(1.0, 0.0), self.clone()), (C64::new(-1.0, 0.0), other.clone())])
    }

    pub fn shifted(&self, shift: f64) -> Self {
        IntervalFunction {
            rule: Rule::Shifted(Box::new(self.clone()), shift),
            domain: (self.domain.0 - shift, self.domain.1 - shift),
            smooth: self.smooth,
        }
    }

    /// Marks the function as defined on a wider interval.
    pub fn with_domain(mut self, domain: (f64, f64)) -> Self {
        self.domain = domain;
        self
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.domain.0 <= lo + SLACK && self.domain.1 >= hi - SLACK
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if x < self.domain.0 - SLACK || x > self.domain.1 + SLACK {
            return Err(Error::Domain(format!("x = {x} outside [{}, {}]", self.domain.0, self.domain.1)));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<C64> {
        self.check(x)?;
        Ok(self.at(x))
    }

    /// Evaluation without the domain check.
    pub fn at(&self, x: f64) -> C64 {
        match &self.rule {
            Rule::Exponential { log_q, terms } => terms.iter().map(|&(a, s)| a * (s * (x * log_q)).exp()).sum(),
            Rule::Polynomial(c) => c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &k| acc * x + k),
            Rule::Sampled(sp) => sp.eval(x),
            Rule::Combination(v) => v.iter().map(|(c, f)| c * f.at(x)).sum(),
            Rule::Shifted(f, s) => f.at(x + s),
            Rule::Custom { f, .. } => f(x),
        }
    }

    pub fn has_derivative(&self) -> bool {
        match &self.rule {
            Rule::Custom { df, .. } => df.is_some(),
            Rule::Combination(v) => v.iter().all(|p| p.1.has_derivative()),
            Rule::Shifted(f, _) => f.has_derivative(),
            _ => true,
        }
    }

    pub fn deriv(&self, x: f64) -> Result<C64> {
        self.check(x)?;
        self.deriv_at(x)
    }

    pub fn deriv_at(&self, x: f64) -> Result<C64> {
        Ok(match &self.rule {
            Rule::Exponential { log_q, terms } => terms.iter().map(|&(a, s)| a * s * *log_q * (s * (x * log_q)).exp()).sum(),
            Rule::Polynomial(c) => {
                let mut acc = C64::new(0.0, 0.0);
                for k in (1..c.len()).rev() {
                    acc = acc * x + c[k] * k as f64;
                }
                acc
            }
            Rule::Sampled(sp) => sp.deriv(x),
            Rule::Combination(v) => {
                let mut acc = C64::new(0.0, 0.0);
                for (c, f) in v {
                    acc += c * f.deriv_at(x)?;
                }
                acc
            }
            Rule::Shifted(f, s) => f.deriv_at(x + s)?,
            Rule::Custom { df: Some(df), .. } => df(x),
            Rule::Custom { label, .. } => return Err(Error::Missing(format!("derivative rule for {label}"))),
        })
    }

    pub fn as_exponential(&self) -> Option<(f64, &[(C64, C64)])> {
        match &self.rule {
            Rule::Exponential { log_q, terms } => Some((*log_q, terms)),
            _ => None,
        }
    }
}

/// Serialized function specification.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// Σ coeff·Q^{x s}; complex numbers as [re, im].
    Exponential { terms: Vec<ExpTerm> },
    Polynomial { coeffs: Vec<[f64; 2]> },
    /// Natural cubic spline through (x, re + i·im); `im` may be omitted.
    Sampled {
        xs: Vec<f64>,
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpTerm {
    pub coeff: [f64; 2],
    pub s: [f64; 2],
}

impl FunctionSpec {
    pub fn build(&self, log_q: f64) -> Result<IntervalFunction> {
        let cz = |v: [f64; 2]| C64::new(v[0], v[1]);
        match self {
            FunctionSpec::Exponential { terms } => {
                Ok(IntervalFunction::exponential(log_q, terms.iter().map(|t| (cz(t.coeff), cz(t.s))).collect()))
            }
            FunctionSpec::Polynomial { coeffs } => Ok(IntervalFunction::polynomial(coeffs.iter().map(|&v| cz(v)).collect())),
            FunctionSpec::Sampled { xs, re, im } => {
                if re.len() != xs.len() || !(im.is_empty() || im.len() == xs.len()) {
                    return invalid("sampled spec lengths differ");
                }
                let ys = (0..xs.len()).map(|i| C64::new(re[i], im.get(i).copied().unwrap_or(0.0))).collect();
                IntervalFunction::sampled(xs.clone(), ys)
            }
        }
    }
}

fn conv_tol() -> quad::Tolerance {
    quad::Tolerance::new(1e-14, 1e-13)
}

/// ∫_0^x f(x−y) Q^{ys} dy.
pub fn conv_with_exp(f: &IntervalFunction, s: C64, log_q: f64, x: f64) -> C64 {
    if let Some((lq, terms)) = f.as_exponential() {
        if (lq - log_q).abs() <= 1e-15 * log_q.abs() {
            return terms.iter().map(|&(a, t)| a * exp_pair(t, s, log_q, x)).sum();
        }
    }
    // termwise, so the map f ↦ f * φ_s stays linear under adaptive quadrature
    if let Rule::Combination(parts) = &f.rule {
        return parts.iter().map(|(c, p)| c * conv_with_exp(p, s, log_q, x)).sum();
    }
    if x == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let g = |y: f64| f.at(x - y) * (s * (y * log_q)).exp();
    quad::adaptive(&g, 0.0, x, conv_tol()).value
}

/// (φ_a * φ_b)(x) = α(φ_a − φ_b)/(a − b), written stably as x φ_b(x) E((a−b)x log Q).
pub fn exp_pair(a: C64, b: C64, log_q: f64, x: f64) -> C64 {
    x * (b * (x * log_q)).exp() * expm1_over((a - b) * (x * log_q))
}

/// (f*g)(x) = ∫_0^x f(x−y) g(y) dy.
pub fn convolve_at(f: &IntervalFunction, g: &IntervalFunction, x: f64) -> C64 {
    if let (Some((lf, tf)), Some((lg, tg))) = (f.as_exponential(), g.as_exponential()) {
        if (lf - lg).abs() <= 1e-15 * lf.abs() {
            let mut acc = C64::new(0.0, 0.0);
            for &(a, s) in tf {
                for &(b, t) in tg {
                    acc += a * b * exp_pair(s, t, lf, x);
                }
            }
            return acc;
        }
    }
    convolve_numeric_at(f, g, x)
}

pub fn convolve_numeric_at(f: &IntervalFunction, g: &IntervalFunction, x: f64) -> C64 {
    if x == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let h = |y: f64| f.at(x - y) * g.at(y);
    quad::adaptive(&h, 0.0, x, conv_tol()).value
}

/// f*g as a function; derivative f(0)g(x) + ∫_0^x f′(x−y)g(y)dy when f has one.
pub fn convolve(f: &IntervalFunction, g: &IntervalFunction) -> IntervalFunction {
    // both factors are sampled on the segment between 0 and x
    let lo = f.domain.0.max(g.domain.0).min(0.0);
    let hi = f.domain.1.min(g.domain.1).max(0.0);
    let (f1, g1) = (f.clone(), g.clone());
    let val: CFn = Arc::new(move |x| convolve_at(&f1, &g1, x));
    let df = if f.has_derivative() {
        let (f2, g2) = (f.clone(), g.clone());
        let d: CFn = Arc::new(move |x| {
            let head = f2.at(0.0) * g2.at(x);
            if x == 0.0 {
                return head;
            }
            let h = |y: f64| f2.deriv_at(x - y).unwrap_or_default() * g2.at(y);
            head + quad::adaptive(&h, 0.0, x, conv_tol()).value
        });
        Some(d)
    } else {
        None
    };
    IntervalFunction::custom("convolution", (lo, hi), val, df)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;

    #[test]
    fn spline_reproduces_cubic_free_data() {
        let xs: Vec<f64> = (0..=40).map(|i| -1.0 + i as f64 / 20.0).collect();
        let ys: Vec<C64> = xs.iter().map(|&x| c(x.sin(), x * x)).collect();
        let f = IntervalFunction::sampled(xs, ys).unwrap();
        assert!((f.eval(0.33).unwrap() - c(0.33f64.sin(), 0.1089)).norm() < 1e-5);
        let h = 1e-6;
        for x in [-0.8, -0.2, 0.41, 0.9] {
            let fd = (f.at(x + h) - f.at(x - h)) / (2.0 * h);
            assert!((fd - f.deriv(x).unwrap()).norm() < 1e-6);
        }
        assert!(f.eval(1.5).is_err());
    }

    #[test]
    fn exponential_derivative() {
        let f = IntervalFunction::exponential(3.0, vec![(c(1.0, 2.0), c(0.3, -0.4)), (c(-0.5, 0.0), c(1.1, 0.0))]);
        let h = 1e-6;
        for x in [-0.9, 0.0, 0.7] {
            let fd = (f.at(x + h) - f.at(x - h)) / (2.0 * h);
            assert!((fd - f.deriv(x).unwrap()).norm() < 1e-6 * fd.norm().max(1.0));
        }
    }

    #[test]
    fn convolution_closed_form_vs_quadrature() {
        let lq = 20f64.ln();
        let alpha = 1.0 / lq;
        // s = α, s′ = 0 at x = 1 gives α(Q^α − 1)/α = e − 1
        let a = IntervalFunction::phi_s(c(alpha, 0.0), lq);
        let b = IntervalFunction::phi0(lq);
        assert!((convolve_at(&a, &b, 1.0) - (std::f64::consts::E - 1.0)).norm() < 1e-14);
        let s = c(0.4, 1.3);
        let t = c(-0.7, 0.2);
        let (fs, ft) = (IntervalFunction::phi_s(s, lq), IntervalFunction::phi_s(t, lq));
        for x in [-1.0, -0.3, 0.5, 1.0] {
            let closed = alpha * (fs.at(x) - ft.at(x)) / (s - t);
            assert!((convolve_numeric_at(&fs, &ft, x) - closed).norm() < 1e-12);
            assert!((convolve_at(&fs, &ft, x) - closed).norm() < 1e-13);
        }
        let p = IntervalFunction::polynomial(vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.0)]);
        for x in [-0.6, 0.8] {
            assert!((convolve_at(&p, &fs, x) - convolve_at(&fs, &p, x)).norm() < 1e-12);
            assert!((conv_with_exp(&p, s, lq, x) - convolve_at(&p, &fs, x)).norm() < 1e-12);
            assert!(convolve_at(&p, &IntervalFunction::zero(), x).norm() == 0.0);
        }
    }
}
