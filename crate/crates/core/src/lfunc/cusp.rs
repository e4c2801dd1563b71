//! L-functions of the level-one Hecke eigenforms, evaluated anywhere through
//! the two-term approximate functional equation with incomplete gamma weights
//! taken along a rotated ray.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use super::Scaled;
use crate::error::{Error, Result};
use crate::qexp::{cusp_form, CuspFormCoeffs};
use crate::special::{ln_gamma_upper, ComplexSum};

/// Default rotation slack: the ray angle is π/2 − slack/|t|.
pub const DEFAULT_ROTATION_SLACK: f64 = 8.0;

/// Relative size below which the envelope of the remaining terms stops the sum.
const STOP_RATIO_LN: f64 = -41.4; // ln(1e-18)

/// Coefficient data for L(w, f) = Σ a_n n^{-w}, stored in logarithmic form.
#[derive(Debug, Clone)]
pub struct CuspL {
    weight: u32,
    /// ln|a_n| (−∞ when a_n = 0), index n − 1.
    log_abs: Vec<f64>,
    sign: Vec<f64>,
    normalized: Vec<f64>,
    rotation_slack: f64,
}

impl CuspL {
    /// Computes the q-expansion of the weight-`weight` generator to `order` terms.
    pub fn new(weight: u32, order: usize) -> Result<Self> {
        Ok(Self::from_coeffs(&cusp_form(weight, order)?))
    }

    pub fn from_coeffs(c: &CuspFormCoeffs) -> Self {
        let half = (c.weight() as f64 - 1.0) / 2.0;
        let normalized = c.normalized().to_vec();
        let mut log_abs = Vec::with_capacity(normalized.len());
        let mut sign = Vec::with_capacity(normalized.len());
        for (i, a) in c.coefficients().iter().enumerate() {
            let n = (i + 1) as f64;
            if a.is_zero() {
                log_abs.push(f64::NEG_INFINITY);
                sign.push(0.0);
            } else {
                // normalized value is O(1) so its logarithm is accurate
                let alpha = normalized[i].abs();
                let la = if alpha > 0.0 {
                    alpha.ln() + half * n.ln()
                } else {
                    a.abs().to_f64().unwrap_or(f64::MAX).ln()
                };
                log_abs.push(la);
                sign.push(if a.is_negative() { -1.0 } else { 1.0 });
            }
        }
        CuspL {
            weight: c.weight(),
            log_abs,
            sign,
            normalized,
            rotation_slack: DEFAULT_ROTATION_SLACK,
        }
    }

    pub fn with_rotation_slack(mut self, slack: f64) -> Self {
        self.rotation_slack = slack;
        self
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Number of available coefficients.
    pub fn order(&self) -> usize {
        self.log_abs.len()
    }

    /// Root number i^k.
    pub fn root_number(&self) -> f64 {
        if self.weight.is_multiple_of(4) {
            1.0
        } else {
            -1.0
        }
    }

    /// α_n = a_n / n^{(k−1)/2}.
    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }

    /// Λ(w) = (2π)^{−w} Γ(w) L(w, f) in the unnormalized variable `w`.
    pub fn completed(&self, w: Complex64) -> Result<Scaled> {
        Ok(self.completed_with_error(w)?.0)
    }

    /// Λ(w) together with an estimate of its absolute rounding error, expressed
    /// in the same scale as the returned mantissa.
    pub fn completed_with_error(&self, w: Complex64) -> Result<(Scaled, f64)> {
        let k = self.weight as f64;
        let t = w.im;
        let theta = if t == 0.0 {
            0.0
        } else {
            t.signum() * (FRAC_PI_2 - self.rotation_slack / t.abs()).max(0.0)
        };
        let delta = Complex64::from_polar(1.0, theta);
        let dual = k - w;
        let eps = self.root_number();
        let half = (k - 1.0) / 2.0;
        let n_min = (w.norm().max(dual.norm()) / (2.0 * PI)).ceil() as usize + 1;

        let mut sum = ComplexSum::new();
        let mut reference: Option<f64> = None;
        let mut largest = f64::NEG_INFINITY;
        for n in 1..=self.order() {
            let x = 2.0 * PI * n as f64;
            let ln_x = x.ln();
            let g1 = -w * ln_x + ln_gamma_upper(w, x * delta);
            let g2 = -dual * ln_x + ln_gamma_upper(dual, x * delta.conj());
            // Deligne envelope, with d(n) ≤ 2√n
            let ln_n = (n as f64).ln();
            let env = (2.0f64).ln() + (half + 0.5) * ln_n + g1.re.max(g2.re);
            let r = *reference.get_or_insert(env);
            largest = largest.max(env);
            let la = self.log_abs[n - 1];
            if la.is_finite() {
                let s = self.sign[n - 1];
                let t1 = (g1 + (la - r)).exp() * s;
                let t2 = (g2 + (la - r)).exp() * (s * eps);
                sum.add(t1 + t2);
            }
            if n >= n_min && env - largest < STOP_RATIO_LN {
                let v = sum.value();
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Overflow {
                        what: "approximate functional equation".into(),
                        s: w,
                    });
                }
                let err = f64::EPSILON * (n as f64).sqrt() * (largest - r).exp();
                return Ok((Scaled::new(v, r), err));
            }
        }
        let needed = n_min + (-STOP_RATIO_LN / (2.0 * PI * theta.cos().max(1e-3))).ceil() as usize;
        Err(Error::InsufficientCoefficients {
            s: w - half,
            needed: needed.max(self.order() + 1),
            available: self.order(),
        })
    }

    /// ξ_F(s) = (2π)^{(k−1)/2} Λ(s + (k−1)/2) for the normalized F(s) = L(s + (k−1)/2, f).
    pub fn xi_scaled(&self, s: Complex64) -> Result<Scaled> {
        let half = (self.weight as f64 - 1.0) / 2.0;
        let lam = self.completed(s + half)?;
        Ok(Scaled::new(lam.mant, lam.log_scale + half * (2.0 * PI).ln()))
    }

    /// Direct partial sum Σ_{n≤terms} α_n n^{−s} (absolutely convergent for Re s > 1).
    pub fn dirichlet_sum(&self, s: Complex64, terms: usize) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (i, a) in self.normalized.iter().take(terms).enumerate().rev() {
            let n = (i + 1) as f64;
            acc.add((-s * n.ln()).exp() * *a);
        }
        acc.value()
    }
}
