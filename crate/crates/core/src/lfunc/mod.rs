//! Selberg-class instances and their completed functions
//!
//! ξ_F(s) = s^m (s−1)^m Q^s ∏ Γ(λ_j s + μ_j) F(s)
//!
//! for ζ, ζ², and the L-functions of the level-one eigenforms of weight
//! 12, 18, 22, 26 (normalized so the critical line is Re s = 1/2).

pub mod cusp;
pub mod zeta;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{digamma, ln_gamma};

pub use cusp::CuspL;
pub use zeta::{zeta_full, ZetaValue};

/// Absolute target used for ζ inside ξ evaluations.
pub const ZETA_TARGET: f64 = 1e-14;

/// Coefficients computed for registry cusp forms; enough for |Im s| ≤ 10³.
pub const DEFAULT_CUSP_ORDER: usize = 1500;

/// Names accepted by [`instance`] (products of these may be written `a*b`).
pub const INSTANCE_NAMES: [&str; 6] = ["zeta", "zeta2", "cusp12", "cusp18", "cusp22", "cusp26"];

/// A complex number stored as `mant · e^{log_scale}`, so that values far
/// outside the double range can be carried around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mant: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn new(mant: Complex64, log_scale: f64) -> Self {
        Scaled { mant, log_scale }.normalized()
    }

    /// e^{l}.
    pub fn from_ln(l: Complex64) -> Self {
        Scaled {
            mant: Complex64::from_polar(1.0, l.im),
            log_scale: l.re,
        }
    }

    /// The plain value; may be infinite or zero when out of range.
    pub fn value(&self) -> Complex64 {
        self.mant * self.log_scale.exp()
    }

    /// The value divided by e^{log_scale}.
    pub fn rescaled(&self, log_scale: f64) -> Complex64 {
        self.mant * (self.log_scale - log_scale).exp()
    }

    /// ln|value|.
    pub fn ln_abs(&self) -> f64 {
        self.mant.norm().ln() + self.log_scale
    }

    /// Multiplies by e^{l}.
    pub fn mul_exp(self, l: Complex64) -> Scaled {
        self * Scaled::from_ln(l)
    }

    fn normalized(self) -> Scaled {
        let m = self.mant.norm();
        if m > 0.0 && m.is_finite() {
            Scaled {
                mant: self.mant / m,
                log_scale: self.log_scale + m.ln(),
            }
        } else {
            self
        }
    }
}

impl std::ops::Mul for Scaled {
    type Output = Scaled;

    fn mul(self, other: Scaled) -> Scaled {
        Scaled::new(self.mant * other.mant, self.log_scale + other.log_scale)
    }
}

/// One factor Γ(λs + μ) of the functional equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaFactor {
    pub lambda: f64,
    pub mu: Complex64,
}

#[derive(Debug, Clone)]
enum Source {
    Zeta,
    Cusp(Arc<CuspL>),
    Product(Vec<SelbergData>),
}

/// An L-function together with its functional-equation data.
#[derive(Debug, Clone)]
pub struct SelbergData {
    name: String,
    pole_order: u32,
    q: f64,
    gamma_factors: Vec<GammaFactor>,
    omega: Complex64,
    source: Source,
}

/// Taylor data of ξ_F on a circle: `coeffs[j]` = ξ^{(j)}(center)/j! · ρ^j,
/// stored relative to e^{log_scale}.
#[derive(Debug, Clone)]
pub struct TaylorRing {
    pub center: Complex64,
    pub radius: f64,
    pub coeffs: Vec<Complex64>,
    pub log_scale: f64,
    /// max |ξ| on the circle, relative to e^{log_scale}.
    pub ring_max: f64,
}

impl SelbergData {
    /// The Riemann zeta function.
    pub fn zeta() -> Self {
        SelbergData {
            name: "zeta".into(),
            pole_order: 1,
            q: PI.powf(-0.5),
            gamma_factors: vec![GammaFactor {
                lambda: 0.5,
                mu: Complex64::new(0.0, 0.0),
            }],
            omega: Complex64::new(1.0, 0.0),
            source: Source::Zeta,
        }
    }

    /// F(s) = L(s + (k−1)/2, f) for the weight-k generator, from `order` coefficients.
    pub fn cusp(weight: u32, order: usize) -> Result<Self> {
        Ok(Self::from_cusp(Arc::new(CuspL::new(weight, order)?)))
    }

    pub fn from_cusp(l: Arc<CuspL>) -> Self {
        let k = l.weight();
        SelbergData {
            name: format!("cusp{k}"),
            pole_order: 0,
            q: 1.0 / (2.0 * PI),
            gamma_factors: vec![GammaFactor {
                lambda: 1.0,
                mu: Complex64::new((k as f64 - 1.0) / 2.0, 0.0),
            }],
            omega: Complex64::new(l.root_number(), 0.0),
            source: Source::Cusp(l),
        }
    }

    /// The product F₁F₂⋯: gamma factors concatenate, Q and ω multiply.
    pub fn product(name: impl Into<String>, factors: Vec<SelbergData>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("product of no factors".into()));
        }
        let mut pole_order = 0;
        let mut q = 1.0;
        let mut gamma_factors = Vec::new();
        let mut omega = Complex64::new(1.0, 0.0);
        for f in &factors {
            pole_order += f.pole_order;
            q *= f.q;
            gamma_factors.extend_from_slice(&f.gamma_factors);
            omega *= f.omega;
        }
        Ok(SelbergData {
            name: name.into(),
            pole_order,
            q,
            gamma_factors,
            omega,
            source: Source::Product(factors),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// m_F, the order of the pole at s = 1.
    pub fn pole_order(&self) -> u32 {
        self.pole_order
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn gamma_factors(&self) -> &[GammaFactor] {
        &self.gamma_factors
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    /// d_F = 2 Σ λ_j.
    pub fn degree(&self) -> f64 {
        2.0 * self.gamma_factors.iter().map(|g| g.lambda).sum::<f64>()
    }

    /// All shipped instances have real coefficients.
    pub fn is_self_dual(&self) -> bool {
        match &self.source {
            Source::Zeta | Source::Cusp(_) => true,
            Source::Product(fs) => fs.iter().all(|f| f.is_self_dual()),
        }
    }

    /// Factors of a product instance.
    pub fn factors(&self) -> Option<&[SelbergData]> {
        match &self.source {
            Source::Product(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn cusp_data(&self) -> Option<&CuspL> {
        match &self.source {
            Source::Cusp(l) => Some(l),
            _ => None,
        }
    }

    /// Checks the structural constraints on the functional-equation data.
    pub fn validate(&self) -> Result<()> {
        if (self.omega.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("|omega| = {} != 1", self.omega.norm())));
        }
        if !(self.q > 0.0) {
            return Err(Error::InvalidArgument(format!("Q = {} must be positive", self.q)));
        }
        for g in &self.gamma_factors {
            if !(g.lambda > 0.0) || g.mu.re < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "gamma factor (lambda = {}, mu = {}) out of range",
                    g.lambda, g.mu
                )));
            }
        }
        Ok(())
    }

    /// Normalized Dirichlet coefficient a_F(n), if available.
    pub fn coefficient(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        match &self.source {
            Source::Zeta => Some(1.0),
            Source::Cusp(l) => l.normalized().get(n - 1).copied(),
            Source::Product(fs) => {
                let (first, rest) = fs.split_first()?;
                let mut acc: Vec<f64> = (1..=n)
                    .map(|m| {
                        if n.is_multiple_of(m) {
                            first.coefficient(m)
                        } else {
                            Some(0.0)
                        }
                    })
                    .collect::<Option<_>>()?;
                for f in rest {
                    let mut next = vec![0.0; n];
                    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
                        let mut v = 0.0;
                        for e in (1..=d).filter(|e| d % e == 0) {
                            v += acc[e - 1] * f.coefficient(d / e)?;
                        }
                        next[d - 1] = v;
                    }
                    acc = next;
                }
                Some(acc[n - 1])
            }
        }
    }

    /// log G(s) where ξ_F = G·F, principal branch of each logarithm.
    pub fn log_gamma_factor(&self, s: Complex64) -> Complex64 {
        let m = self.pole_order as f64;
        let mut l = s * self.q.ln();
        if m > 0.0 {
            l += (s.ln() + (s - 1.0).ln()) * m;
        }
        for g in &self.gamma_factors {
            l += ln_gamma(s * g.lambda + g.mu);
        }
        l
    }

    /// (log G)'(s).
    pub fn log_gamma_factor_deriv(&self, s: Complex64) -> Complex64 {
        let m = self.pole_order as f64;
        let mut d = Complex64::new(self.q.ln(), 0.0);
        if m > 0.0 {
            d += (s.inv() + (s - 1.0).inv()) * m;
        }
        for g in &self.gamma_factors {
            d += digamma(s * g.lambda + g.mu) * g.lambda;
        }
        d
    }

    /// ξ_F(s) in scaled form; never overflows.
    pub fn xi_scaled(&self, s: Complex64) -> Result<Scaled> {
        match &self.source {
            Source::Zeta => {
                // s(s−1)π^{−s/2}Γ(s/2)ζ(s) = 2π^{−s/2}Γ(1+s/2)·(s−1)ζ(s)
                let v = zeta_full(s, ZETA_TARGET)?;
                let l = Complex64::new(2f64.ln(), 0.0) - s * (0.5 * PI.ln()) + ln_gamma(s * 0.5 + 1.0);
                Ok(Scaled::from_ln(l) * Scaled::new(v.pole_free, 0.0))
            }
            Source::Cusp(c) => c.xi_scaled(s),
            Source::Product(fs) => {
                let mut acc = Scaled::new(Complex64::new(1.0, 0.0), 0.0);
                for f in fs {
                    acc = acc * f.xi_scaled(s)?;
                }
                Ok(acc)
            }
        }
    }

    /// ξ_F(s).
    pub fn xi(&self, s: Complex64) -> Result<Complex64> {
        let v = self.xi_scaled(s)?.value();
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow {
                what: format!("xi_{}", self.name),
                s,
            })
        }
    }

    /// F(s) itself.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        match &self.source {
            Source::Zeta => zeta::zeta(s, ZETA_TARGET),
            Source::Cusp(_) => {
                let x = self.xi_scaled(s)?;
                let v = x.mant * (x.log_scale - self.log_gamma_factor(s)).exp();
                finite(v, &self.name, s)
            }
            Source::Product(fs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in fs {
                    acc *= f.eval(s)?;
                }
                finite(acc, &self.name, s)
            }
        }
    }

    /// Partial Dirichlet series Σ_{n≤terms} a_F(n) n^{−s}.
    pub fn dirichlet_sum(&self, s: Complex64, terms: usize) -> Complex64 {
        match &self.source {
            Source::Zeta => {
                let mut acc = crate::special::ComplexSum::new();
                for n in (1..=terms).rev() {
                    acc.add((-s * (n as f64).ln()).exp());
                }
                acc.value()
            }
            Source::Cusp(c) => c.dirichlet_sum(s, terms),
            Source::Product(fs) => fs.iter().map(|f| f.dirichlet_sum(s, terms)).product(),
        }
    }

    /// (ξ_F′/ξ_F)(s).
    pub fn xi_log_deriv(&self, s: Complex64) -> Result<Complex64> {
        match &self.source {
            Source::Zeta => {
                let v = zeta_full(s, ZETA_TARGET)?;
                if v.pole_free.norm() < 1e-13 {
                    return Err(Error::ZeroOfXi(s));
                }
                Ok(-0.5 * PI.ln() + digamma(s * 0.5 + 1.0) * 0.5 + v.pole_free_deriv / v.pole_free)
            }
            Source::Cusp(_) => {
                let ring = self.taylor_ring(s, LOG_DERIV_RADIUS, LOG_DERIV_POINTS)?;
                if ring.coeffs[0].norm() < 1e-12 * ring.ring_max {
                    return Err(Error::ZeroOfXi(s));
                }
                Ok(ring.coeffs[1] / (ring.coeffs[0] * ring.radius))
            }
            Source::Product(fs) => fs.iter().map(|f| f.xi_log_deriv(s)).sum(),
        }
    }

    /// Taylor coefficients of ξ_F at `center` from `points` samples on a circle
    /// of radius `radius` (trapezoidal Cauchy integral).
    pub fn taylor_ring(&self, center: Complex64, radius: f64, points: usize) -> Result<TaylorRing> {
        let samples: Vec<Scaled> = (0..points)
            .into_par_iter()
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / points as f64;
                self.xi_scaled(center + Complex64::from_polar(radius, phi))
            })
            .collect::<Result<_>>()?;
        let log_scale = samples.iter().map(|v| v.log_scale).fold(f64::NEG_INFINITY, f64::max);
        let vals: Vec<Complex64> = samples.iter().map(|v| v.rescaled(log_scale)).collect();
        let ring_max = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let coeffs = (0..points / 2)
            .map(|k| {
                let mut acc = crate::special::ComplexSum::new();
                for (j, v) in vals.iter().enumerate() {
                    let phi = -2.0 * PI * ((j * k) % points) as f64 / points as f64;
                    acc.add(v * Complex64::from_polar(1.0, phi));
                }
                acc.value() / points as f64
            })
            .collect();
        Ok(TaylorRing {
            center,
            radius,
            coeffs,
            log_scale,
            ring_max,
        })
    }

    /// Functional-equation residual ξ(s) − ω·conj(ξ(1 − conj s)), relative to 1 + |ξ(s)|.
    pub fn functional_equation_residual(&self, s: Complex64) -> Result<f64> {
        let a = self.xi(s)?;
        let b = self.xi(Complex64::new(1.0, 0.0) - s.conj())?;
        Ok((a - self.omega * b.conj()).norm() / (1.0 + a.norm()))
    }

    /// Θ(T) = Im log G(1/2 + iT).
    pub fn theta(&self, t: f64) -> f64 {
        self.log_gamma_factor(Complex64::new(0.5, t)).im
    }

    /// Smooth part of the count of zeros with 0 < γ ≤ T, given the central multiplicity.
    pub fn smooth_zero_count(&self, t: f64, m0: u32) -> f64 {
        self.theta(t) / PI - m0 as f64 / 2.0
    }

    /// Derivative in T of the smooth count.
    pub fn zero_density(&self, t: f64) -> f64 {
        self.log_gamma_factor_deriv(Complex64::new(0.5, t)).re / PI
    }

    /// Scale u₀ of the zero-density asymptotics (d/2π) log(u/u₀).
    pub fn density_scale(&self) -> f64 {
        let s: f64 = self.gamma_factors.iter().map(|g| g.lambda * g.lambda.ln()).sum();
        (-(2.0 / self.degree()) * (self.q.ln() + s)).exp()
    }
}

const LOG_DERIV_RADIUS: f64 = 0.05;
const LOG_DERIV_POINTS: usize = 32;

fn finite(v: Complex64, name: &str, s: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow {
            what: name.to_string(),
            s,
        })
    }
}

fn cusp_cache(weight: u32) -> Result<Arc<CuspL>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CuspL>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(l) = cache.lock().expect("cusp cache poisoned").get(&weight) {
        return Ok(l.clone());
    }
    let l = Arc::new(CuspL::new(weight, DEFAULT_CUSP_ORDER)?);
    cache.lock().expect("cusp cache poisoned").insert(weight, l.clone());
    Ok(l)
}

/// Looks up a shipped instance by name; `a*b` builds the product of two instances.
pub fn instance(name: &str) -> Result<SelbergData> {
    let name = name.trim();
    if name.contains('*') {
        let factors = name.split('*').map(instance).collect::<Result<Vec<_>>>()?;
        return SelbergData::product(name, factors);
    }
    match name {
        "zeta" => Ok(SelbergData::zeta()),
        "zeta2" => SelbergData::product("zeta2", vec![SelbergData::zeta(), SelbergData::zeta()]),
        _ => {
            let weight = name
                .strip_prefix("cusp")
                .and_then(|k| k.parse::<u32>().ok())
                .ok_or_else(|| Error::UnknownInstance(name.to_string()))?;
            match cusp_cache(weight) {
                Ok(l) => Ok(SelbergData::from_cusp(l)),
                Err(Error::UnsupportedWeight(_)) => Err(Error::UnknownInstance(name.to_string())),
                Err(e) => Err(e),
            }
        }
    }
}

/// ζ(s) to absolute accuracy `target_abs_err`.
pub fn zeta_eval(s: Complex64, target_abs_err: f64) -> Result<Complex64> {
    zeta::zeta(s, target_abs_err)
}

/// F_f(s) = L(s + (k−1)/2, f) for the weight-k generator, registry coefficients.
pub fn cuspform_eval(weight: u32, s: Complex64, target_abs_err: f64) -> Result<Complex64> {
    let l = cusp_cache(weight)?;
    let half = (weight as f64 - 1.0) / 2.0;
    let (lam, err) = l.completed_with_error(s + half)?;
    // F = Λ(w)/((2π)^{−w}Γ(w))
    let w = s + half;
    let ln_g = -w * (2.0 * PI).ln() + ln_gamma(w);
    let factor = (lam.log_scale - ln_g).exp();
    let v = lam.mant * factor;
    let achieved = err * factor.norm();
    if achieved > target_abs_err {
        return Err(Error::DegradedAccuracy {
            s,
            target: target_abs_err,
            achieved,
        });
    }
    finite(v, "cusp form L-function", s)
}

/// ξ_F(s).
pub fn xi_eval(f: &SelbergData, s: Complex64) -> Result<Complex64> {
    f.xi(s)
}

/// (ξ_F′/ξ_F)(s).
pub fn xi_log_deriv(f: &SelbergData, s: Complex64) -> Result<Complex64> {
    f.xi_log_deriv(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_xi_at_two() {
        let z = SelbergData::zeta();
        let v = z.xi(c(2.0, 0.0)).unwrap();
        assert!((v.re - PI / 3.0).abs() < 1e-14, "{v}");
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn zeta_xi_is_entire_at_zero_and_one() {
        let z = SelbergData::zeta();
        // ξ(1) = π^{-1/2}Γ(1/2)·Res ζ = 1 and ξ(0) = ξ(1)
        assert!((z.xi(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((z.xi(c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn scaled_arithmetic() {
        let a = Scaled::from_ln(c(800.0, 0.3));
        let b = Scaled::from_ln(c(-790.0, -0.3));
        let p = a * b;
        assert!((p.value() - c(10f64.exp(), 0.0)).norm() < 1e-9 * 10f64.exp());
        assert!(a.value().re.is_infinite());
        assert!((a.ln_abs() - 800.0).abs() < 1e-12);
    }

    #[test]
    fn registry() {
        for n in INSTANCE_NAMES {
            let f = instance(n).unwrap();
            f.validate().unwrap();
            assert_eq!(f.name(), n);
        }
        assert!(matches!(instance("cusp99"), Err(Error::UnknownInstance(_))));
        assert!(matches!(instance("eta"), Err(Error::UnknownInstance(_))));
        let p = instance("cusp18*cusp22").unwrap();
        assert_eq!(p.degree(), 4.0);
        assert_eq!(p.omega(), c(1.0, 0.0));
    }

    #[test]
    fn density_scale_is_two_pi() {
        for n in ["zeta", "cusp12", "zeta2"] {
            let u0 = instance(n).unwrap().density_scale();
            assert!((u0 - 2.0 * PI).abs() < 1e-12, "{n}: {u0}");
        }
    }

    #[test]
    fn product_coefficients_are_convolutions() {
        let z2 = instance("zeta2").unwrap();
        // d(12) = 6
        assert_eq!(z2.coefficient(12), Some(6.0));
        assert_eq!(z2.coefficient(1), Some(1.0));
    }
}
