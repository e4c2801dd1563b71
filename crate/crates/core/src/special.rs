//! Complex special functions: log-gamma, digamma, the upper incomplete gamma
//! function in logarithmic form, the exponential integral and the
//! logarithmic integral.
//!
//! Everything here works in double precision. Large-argument functions are
//! returned as complex logarithms so callers can rescale before
//! exponentiating; only `exp` of the result is meaningful, the imaginary
//! part is determined modulo 2π unless stated otherwise.

use std::f64::consts::PI;

use num_complex::Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} / (2k (2k-1)) for k = 1..10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// B_{2k} / (2k) for k = 1..8.
const DIGAMMA: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Complex version of [`CompensatedSum`], compensating each component.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Shift `z` right until Stirling's series is accurate, returning the shifted
/// argument and the number of unit steps taken.
fn stirling_shift(z: Complex64) -> (Complex64, u32) {
    let mut w = z;
    let mut n = 0;
    while w.re < 0.5 || w.norm() < 12.0 {
        w += 1.0;
        n += 1;
    }
    (w, n)
}

/// Logarithm of the gamma function.
///
/// For `Re z > 0` this is the principal branch (continuous, real on the
/// positive axis), which the zero-counting code relies on. Elsewhere only the
/// exponential is meaningful.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let (w, n) = stirling_shift(z);
    let mut acc = (w - 0.5) * w.ln() - w + LN_SQRT_2PI;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut p = inv;
    for c in STIRLING {
        acc += p * c;
        p *= inv2;
    }
    if n > 0 {
        // Sum of logs keeps the principal branch when every factor lies in
        // the right half-plane; the product form would lose it.
        let mut shift = Complex64::new(0.0, 0.0);
        for j in 0..n {
            shift += (z + j as f64).ln();
        }
        acc -= shift;
    }
    acc
}

/// Gamma function, `exp(ln_gamma(z))`.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Digamma function ψ(z) = Γ'(z)/Γ(z).
pub fn digamma(z: Complex64) -> Complex64 {
    let (w, n) = stirling_shift(z);
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut acc = w.ln() - inv * 0.5;
    let mut p = inv2;
    for c in DIGAMMA {
        acc -= p * c;
        p *= inv2;
    }
    for j in 0..n {
        acc -= (z + j as f64).inv();
    }
    acc
}

const INC_EPS: f64 = 1e-16;
const INC_MAX_ITER: usize = 20_000;

/// Logarithm of the upper incomplete gamma function Γ(a, z), for
/// `|arg z| < π/2`.
///
/// Uses Legendre's continued fraction when `z` is large compared to `a`, and
/// otherwise Γ(a) − γ(a, z) with the power series for γ. The combination is
/// carried out in scaled form so results far below the double range survive.
pub fn ln_gamma_upper(a: Complex64, z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0, "ln_gamma_upper needs Re z > 0, got {z}");
    let near_pole = a.re <= 0.5 && (a.re - a.re.round()).abs() < 1e-3 && a.im.abs() < 1e-3;
    if near_pole || z.norm() > 1.0 + 0.95 * a.norm() {
        ln_upper_continued_fraction(a, z)
    } else {
        ln_upper_via_series(a, z)
    }
}

fn ln_upper_continued_fraction(a: Complex64, z: Complex64) -> Complex64 {
    // Modified Lentz evaluation of
    // 1/(z+1-a- 1(1-a)/(z+3-a- 2(2-a)/(z+5-a- ...)))
    // Complex::inv squares the modulus, so the guard values stay well inside
    // the double range.
    let tiny = Complex64::new(1e-150, 0.0);
    let mut b = z + 1.0 - a;
    let mut c = Complex64::new(1e150, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..INC_MAX_ITER {
        let fi = i as f64;
        let an = -fi * (fi - a);
        b += 2.0;
        d = an * d + b;
        if d.norm() < 1e-150 {
            d = tiny;
        }
        c = b + an / c;
        if c.norm() < 1e-150 {
            c = tiny;
        }
        d = d.inv();
        let del = d * c;
        h *= del;
        if (del - 1.0).norm() < INC_EPS {
            break;
        }
    }
    a * z.ln() - z + h.ln()
}

fn ln_upper_via_series(a: Complex64, z: Complex64) -> Complex64 {
    // γ(a, z) = z^a e^{-z} Σ z^n / (a (a+1) ... (a+n))
    let mut ap = a;
    let mut del = a.inv();
    let mut sum = ComplexSum::new();
    sum.add(del);
    for _ in 0..INC_MAX_ITER {
        ap += 1.0;
        del *= z / ap;
        sum.add(del);
        if del.norm() < sum.value().norm() * INC_EPS {
            break;
        }
    }
    let ln_lower = a * z.ln() - z + sum.value().ln();
    let ln_full = ln_gamma(a);
    let scale = ln_full.re.max(ln_lower.re);
    let diff = (ln_full - scale).exp() - (ln_lower - scale).exp();
    diff.ln() + scale
}

/// Upper incomplete gamma Γ(a, z) itself (may under/overflow).
pub fn gamma_upper(a: Complex64, z: Complex64) -> Complex64 {
    ln_gamma_upper(a, z).exp()
}

/// Exponential integral E₁(z) = Γ(0, z) for `Re z > 0`.
pub fn exp_integral_e1(z: Complex64) -> Complex64 {
    if z.norm() < 1.0 {
        // E1(z) = -γ - ln z - Σ (-z)^k / (k k!)
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = ComplexSum::new();
        for k in 1..200 {
            term *= -z / k as f64;
            let t = term / k as f64;
            sum.add(t);
            if t.norm() < 1e-17 * sum.value().norm().max(1e-300) {
                break;
            }
        }
        return -EULER_GAMMA - z.ln() - sum.value();
    }
    ln_upper_continued_fraction(Complex64::new(0.0, 0.0), z).exp()
}

/// Logarithmic integral li(x) = Ei(ln x) for `x > 1`.
pub fn log_integral(x: f64) -> f64 {
    assert!(x > 1.0, "log_integral needs x > 1, got {x}");
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let y = x.ln();
    // Ei(y) = γ + ln y + Σ y^k / (k k!), all terms positive.
    let mut term = 1.0;
    let mut sum = CompensatedSum::new();
    for k in 1..500 {
        term *= y / k as f64;
        let t = term / k as f64;
        sum.add(t);
        if t < 1e-17 * sum.value() {
            break;
        }
    }
    EULER_GAMMA + y.ln() + sum.value()
}

/// ζ(2k) for k ≥ 1 by direct summation with an Euler–Maclaurin tail.
pub fn zeta_even(k: u32) -> f64 {
    assert!(k >= 1);
    let p = 2.0 * k as f64;
    let n = 100.0_f64;
    let mut s = CompensatedSum::new();
    for j in (1..100).rev() {
        s.add((j as f64).powf(-p));
    }
    s.add(n.powf(1.0 - p) / (p - 1.0));
    s.add(0.5 * n.powf(-p));
    s.add(p / 12.0 * n.powf(-p - 1.0));
    s.add(-p * (p + 1.0) * (p + 2.0) / 720.0 * n.powf(-p - 3.0));
    s.value()
}

/// B_{2k} / (2k)! = (-1)^{k+1} 2 ζ(2k) / (2π)^{2k}.
pub fn bernoulli_over_factorial(k: u32) -> f64 {
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2.0 * zeta_even(k) / (2.0 * PI).powi(2 * k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ln_gamma_real_values() {
        assert_relative_eq!(gamma(c(5.0, 0.0)).re, 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(c(0.5, 0.0)).re, PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(c(-0.5, 0.0)).re, -2.0 * PI.sqrt(), max_relative = 1e-13);
        assert!(gamma(c(0.25, 0.0)).im.abs() < 1e-15);
    }

    #[test]
    fn ln_gamma_complex_against_reference() {
        // mpmath.loggamma(0.25+50j)
        let v = ln_gamma(c(0.25, 50.0));
        assert_relative_eq!(v.re, -78.598_880_432_701_84, max_relative = 1e-13);
        assert_relative_eq!(v.im, 145.208_659_524_257_23, max_relative = 1e-13);
        // principal branch stays continuous across many shifts
        let v = ln_gamma(c(1.0, 3.0));
        assert_relative_eq!(v.re, -3.244_144_299_589_756, max_relative = 1e-13);
        assert_relative_eq!(v.im, 1.053_350_771_068_613, max_relative = 1e-13);
    }

    #[test]
    fn digamma_reference_values() {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        assert_relative_eq!(digamma(c(1.0, 0.0)).re, -EULER_GAMMA, max_relative = 1e-14);
        // ψ(1/2) = -γ - 2 ln 2
        assert_relative_eq!(
            digamma(c(0.5, 0.0)).re,
            -EULER_GAMMA - 2.0 * 2f64.ln(),
            max_relative = 1e-14
        );
        // derivative of ln_gamma by central difference
        let z = c(0.7, 4.0);
        let h = 1e-5;
        let fd = (ln_gamma(z + h) - ln_gamma(z - h)) / (2.0 * h);
        assert!((fd - digamma(z)).norm() < 1e-9);
    }

    #[test]
    fn incomplete_gamma_integer_order() {
        // Γ(n, x) = (n-1)! e^{-x} Σ_{k<n} x^k/k!
        for &x in &[0.5, 3.0, 10.0, 40.0] {
            let mut s = 0.0;
            let mut t = 1.0;
            for k in 0..5 {
                if k > 0 {
                    t *= x / k as f64;
                }
                s += t;
            }
            let exact = 24.0 * (-x).exp() * s;
            let got = gamma_upper(c(5.0, 0.0), c(x, 0.0));
            assert_relative_eq!(got.re, exact, max_relative = 1e-13);
        }
    }

    #[test]
    fn incomplete_gamma_complex_reference() {
        // mpmath.gammainc(9+30j, 2*pi*exp(1.2j)) and a continued-fraction case
        let v = gamma_upper(c(9.0, 30.0), Complex64::from_polar(2.0 * PI, 1.2));
        let r = c(-2.796_924_040_211_123_5e-8, 2.007_164_223_153_125e-8);
        assert!((v - r).norm() < 1e-12 * r.norm(), "{v} vs {r}");
        let v = gamma_upper(c(3.5, -2.0), c(20.0, 5.0));
        let r = c(-2.945_704_090_130_053_6e-6, 6.449_224_153_002_847e-6);
        assert!((v - r).norm() < 1e-12 * r.norm(), "{v} vs {r}");
    }

    #[test]
    fn e1_matches_series_and_fraction() {
        // E1(1) = 0.21938393439552...
        assert_relative_eq!(
            exp_integral_e1(c(1.0, 0.0)).re,
            0.219_383_934_395_520_3,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            exp_integral_e1(c(0.5, 0.0)).re,
            0.559_773_594_776_160_8,
            max_relative = 1e-13
        );
    }

    #[test]
    fn log_integral_reference() {
        // li(100000) = 9629.8090010507...
        assert_relative_eq!(log_integral(1e5), 9_629.809_001_050_798, max_relative = 1e-13);
        assert_relative_eq!(log_integral(2.0), 1.045_163_780_117_493, max_relative = 1e-13);
    }

    #[test]
    fn bernoulli_ratios() {
        assert_relative_eq!(bernoulli_over_factorial(1), 1.0 / 12.0, max_relative = 1e-14);
        assert_relative_eq!(bernoulli_over_factorial(2), -1.0 / 720.0, max_relative = 1e-14);
        assert_relative_eq!(bernoulli_over_factorial(3), 1.0 / 30240.0, max_relative = 1e-14);
        assert_relative_eq!(zeta_even(1), PI * PI / 6.0, max_relative = 1e-14);
    }
}
