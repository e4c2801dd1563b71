//! Exact q-expansions of level-one modular forms.
//!
//! Coefficients are arbitrary-precision integers throughout; the weight-26
//! generator already passes 2^128 before n = 10^4. Floating point only
//! appears in [`CuspFormCoeffs::normalized`].

use std::io::Write;
use std::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Weights of the cusp-form generators this module can build.
pub const CUSP_WEIGHTS: [u32; 4] = [12, 18, 22, 26];

/// Truncated power series Σ_{n=0}^{N} c_n q^n with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigInt>,
}

impl PowerSeries {
    /// Builds a series of order `coeffs.len() - 1`.
    ///
    /// Panics on an empty vector; a series always has a constant term.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![BigInt::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// Truncation order N.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(mut self, order: usize) -> Self {
        self.coeffs.truncate(order + 1);
        self
    }

    fn check_orders(&self, other: &Self) {
        assert_eq!(
            self.order(),
            other.order(),
            "series of different truncation orders cannot be combined"
        );
    }

    /// Schoolbook product truncated at the common order.
    ///
    /// Each output coefficient is accumulated in two fixed-width limb
    /// buffers (positive and negative products) instead of through
    /// allocating `BigInt` temporaries.
    pub fn mul_series(&self, other: &Self) -> Self {
        self.check_orders(other);
        let n = self.order();
        let a: Vec<Limbs> = self.coeffs.iter().map(Limbs::from_big).collect();
        let b: Vec<Limbs> = other.coeffs.iter().map(Limbs::from_big).collect();
        let width = a.iter().map(|x| x.digits.len()).max().unwrap_or(0)
            + b.iter().map(|x| x.digits.len()).max().unwrap_or(0)
            + 2;
        // Zero coefficients are frequent in the sparse factors (the Jacobi
        // series behind Δ), skip them.
        let a_nz: Vec<usize> = (0..=n).filter(|&i| !a[i].digits.is_empty()).collect();
        let mut pos = vec![0u64; width];
        let mut neg = vec![0u64; width];
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            pos.iter_mut().for_each(|x| *x = 0);
            neg.iter_mut().for_each(|x| *x = 0);
            for &i in &a_nz {
                if i > k {
                    break;
                }
                let bj = &b[k - i];
                if bj.digits.is_empty() {
                    continue;
                }
                let acc = if a[i].negative != bj.negative {
                    &mut neg
                } else {
                    &mut pos
                };
                mul_add_limbs(acc, &a[i].digits, &bj.digits);
            }
            out.push(limbs_to_big(&pos) - limbs_to_big(&neg));
        }
        Self::new(out)
    }

    /// Multiplies every coefficient by an integer.
    pub fn scale(&self, factor: i64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Writes `n,c_n` rows with exact decimal integers.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,a_n")?;
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{n},{c}")?;
        }
        Ok(())
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;

    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        self.check_orders(rhs);
        PowerSeries::new(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;

    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        self.check_orders(rhs);
        PowerSeries::new(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect())
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;

    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        self.mul_series(rhs)
    }
}

struct Limbs {
    negative: bool,
    digits: Vec<u64>,
}

impl Limbs {
    fn from_big(x: &BigInt) -> Self {
        let (sign, digits) = x.to_u64_digits();
        Self {
            negative: sign == Sign::Minus,
            digits,
        }
    }
}

/// acc += x * y on little-endian u64 limbs; `acc` must be wide enough.
fn mul_add_limbs(acc: &mut [u64], x: &[u64], y: &[u64]) {
    for (i, &xi) in x.iter().enumerate() {
        let mut carry: u128 = 0;
        for (j, &yj) in y.iter().enumerate() {
            let t = acc[i + j] as u128 + (xi as u128) * (yj as u128) + carry;
            acc[i + j] = t as u64;
            carry = t >> 64;
        }
        let mut k = i + y.len();
        while carry != 0 {
            let t = acc[k] as u128 + carry;
            acc[k] = t as u64;
            carry = t >> 64;
            k += 1;
        }
    }
}

fn limbs_to_big(limbs: &[u64]) -> BigInt {
    let mut digits = Vec::with_capacity(2 * limbs.len());
    for &l in limbs {
        digits.push(l as u32);
        digits.push((l >> 32) as u32);
    }
    BigInt::from_biguint(Sign::Plus, BigUint::new(digits))
}

/// σ_p(n) for n = 0..=order (σ_p(0) = 0), by a divisor sieve.
pub fn divisor_power_sums(p: u32, order: usize) -> Vec<BigInt> {
    let mut sigma = vec![BigInt::zero(); order + 1];
    for d in 1..=order {
        let dp = BigInt::from(d).pow(p);
        let mut m = d;
        while m <= order {
            sigma[m] += &dp;
            m += d;
        }
    }
    sigma
}

/// Number of divisors d(n) for n = 0..=order (d(0) = 0).
pub fn divisor_counts(order: usize) -> Vec<u32> {
    let mut d = vec![0u32; order + 1];
    for k in 1..=order {
        let mut m = k;
        while m <= order {
            d[m] += 1;
            m += k;
        }
    }
    d
}

/// Eisenstein series E₄ = 1 + 240 Σ σ₃(n) qⁿ or E₆ = 1 − 504 Σ σ₅(n) qⁿ.
pub fn eisenstein(weight: u32, order: usize) -> Result<PowerSeries> {
    let (factor, p) = match weight {
        4 => (240i64, 3),
        6 => (-504i64, 5),
        other => return Err(Error::UnsupportedWeight(other)),
    };
    let sigma = divisor_power_sums(p, order);
    let mut coeffs: Vec<BigInt> = sigma.into_iter().map(|s| s * factor).collect();
    coeffs[0] = BigInt::one();
    Ok(PowerSeries::new(coeffs))
}

/// Jacobi's identity ∏(1 − qⁿ)³ = Σ_{m≥0} (−1)^m (2m+1) q^{m(m+1)/2}.
fn eta_cubed(order: usize) -> PowerSeries {
    let mut s = PowerSeries::zero(order);
    let mut m = 0usize;
    loop {
        let e = m * (m + 1) / 2;
        if e > order {
            break;
        }
        let c = (2 * m + 1) as i64;
        s.coeffs[e] = BigInt::from(if m.is_multiple_of(2) { c } else { -c });
        m += 1;
    }
    s
}

/// The discriminant Δ = q ∏_{n≥1} (1 − qⁿ)²⁴ = Σ τ(n) qⁿ.
pub fn discriminant(order: usize) -> Result<PowerSeries> {
    if order < 1 {
        return Err(Error::InvalidArgument(format!(
            "discriminant needs order >= 1, got {order}"
        )));
    }
    // (1 - q^n)^24 = (Jacobi series)^8, computed to order N-1 and shifted by q.
    let j = eta_cubed(order - 1);
    let mut p = j.clone();
    for _ in 1..8 {
        p = &j * &p;
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(BigInt::zero());
    coeffs.extend(p.into_coeffs());
    Ok(PowerSeries::new(coeffs))
}

/// Fourier coefficients of the normalized generator of S_k for k ∈ {12, 18, 22, 26}.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspFormCoeffs {
    weight: u32,
    /// a_1..a_N, stored from index 0.
    a: Vec<BigInt>,
    normalized: Vec<f64>,
}

impl CuspFormCoeffs {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Truncation order N.
    pub fn order(&self) -> usize {
        self.a.len()
    }

    /// a_n for 1 ≤ n ≤ N.
    pub fn a(&self, n: usize) -> &BigInt {
        &self.a[n - 1]
    }

    /// a_1..a_N.
    pub fn coefficients(&self) -> &[BigInt] {
        &self.a
    }

    /// a_n / n^{(k-1)/2} for n = 1..N (index 0 holds n = 1).
    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }

    /// First n violating |a_n| ≤ d(n) n^{(k-1)/2}, checked exactly as
    /// a_n² ≤ d(n)² n^{k-1}.
    pub fn deligne_violation(&self) -> Option<usize> {
        let d = divisor_counts(self.order());
        let k1 = self.weight - 1;
        (1..=self.order()).find(|&n| {
            let lhs = self.a(n) * self.a(n);
            let rhs = BigInt::from(d[n]).pow(2) * BigInt::from(n).pow(k1);
            lhs > rhs
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,a_n")?;
        for (i, c) in self.a.iter().enumerate() {
            writeln!(out, "{},{c}", i + 1)?;
        }
        Ok(())
    }
}

/// Δ (k = 12), ΔE₆ (18), ΔE₄E₆ (22), ΔE₄²E₆ (26), truncated at qᴺ.
pub fn cusp_form(weight: u32, order: usize) -> Result<CuspFormCoeffs> {
    if !CUSP_WEIGHTS.contains(&weight) {
        return Err(Error::UnsupportedWeight(weight));
    }
    if order < 1 {
        return Err(Error::InvalidArgument(format!(
            "cusp_form needs order >= 1, got {order}"
        )));
    }
    let delta = discriminant(order)?;
    let series = match weight {
        12 => delta,
        18 => &delta * &eisenstein(6, order)?,
        22 => {
            let e = &eisenstein(4, order)? * &eisenstein(6, order)?;
            &delta * &e
        }
        26 => {
            let e4 = eisenstein(4, order)?;
            let e = &(&e4 * &e4) * &eisenstein(6, order)?;
            &delta * &e
        }
        _ => unreachable!(),
    };
    let a: Vec<BigInt> = series.into_coeffs().into_iter().skip(1).collect();
    debug_assert!(a[0].is_one());
    let half = (weight as f64 - 1.0) / 2.0;
    let normalized = a
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let n = (i + 1) as f64;
            big_to_f64(c) * (-half * n.ln()).exp()
        })
        .collect();
    Ok(CuspFormCoeffs { weight, a, normalized })
}

fn big_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        if c.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}
