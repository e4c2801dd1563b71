//! The Lévy–Khintchine triplet (m₀, B_F, ν_F) attached to an L-function, and
//! the exponent g_F(t) = −(m₀/2)t² + iB_F t + Σ_γ m_γ(e^{−iγt} − 1)/γ².

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfunc::SelbergData;
use crate::special::CompensatedSum;
use crate::zeros::{central_multiplicity, CentralData, ZeroList};

/// Gaussian covariance a, drift b₀ and a finite discrete Lévy measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub a: f64,
    pub b0: f64,
    /// (location, mass) pairs, ascending in location.
    pub atoms: Vec<(f64, f64)>,
    /// Height of the zeros used for the atoms; infinite (`null` in JSON) when nothing was cut.
    #[serde(rename = "T", with = "height_or_null")]
    pub truncation_height: f64,
    /// Estimated mass of the omitted atoms beyond ±T.
    #[serde(rename = "tail")]
    pub tail_mass_estimate: f64,
}

mod height_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &f64, s: S) -> Result<S::Ok, S::Error> {
        if t.is_finite() {
            s.serialize_f64(*t)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// g_F(t) with the truncation allowance recorded alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GFSample {
    pub t: f64,
    pub value: Complex64,
    pub truncation_height: f64,
    pub tail_bound: f64,
}

/// Type of the law with characteristic function exp(g).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub label: &'static str,
    pub drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

pub const COMPOUND_POISSON: &str = "compound-poisson";
pub const GAUSSIAN_PLUS_COMPOUND_POISSON: &str = "gaussian-plus-compound-poisson";

/// B_F = i ξ^{(m₀+1)}(1/2) / ((m₀+1) ξ^{(m₀)}(1/2)) from the ring data at the center,
/// as a complex number (real for self-dual instances).
pub fn compute_bf_complex(central: &CentralData) -> Result<Complex64> {
    let m = central.m0 as usize;
    if central.taylor.len() < m + 2 {
        return Err(Error::IndeterminateMultiplicity(m));
    }
    // taylor[j] = ξ^{(j)}/j! ρ^j, so the ratio below is ξ^{(m+1)}/((m+1)ξ^{(m)}) ρ
    Ok(Complex64::i() * central.taylor[m + 1] / (central.taylor[m] * central.radius))
}

/// B_F for `f`. Products use additivity over their factors.
pub fn compute_bf(f: &SelbergData, central: &CentralData) -> Result<f64> {
    if let Some(fs) = f.factors() {
        let mut acc = 0.0;
        for g in fs {
            acc += compute_bf(g, &central_multiplicity(g)?)?;
        }
        return Ok(acc);
    }
    Ok(compute_bf_complex(central)?.re)
}

/// Atoms (∓γ, m_γ/γ²) and the estimated two-sided mass beyond the height bound.
pub fn levy_measure(f: &SelbergData, zeros: &ZeroList) -> Result<(Vec<(f64, f64)>, f64)> {
    let mut neg = Vec::with_capacity(zeros.len());
    let mut pos = Vec::with_capacity(zeros.len());
    for (g, m) in zeros.iter() {
        if g == 0.0 {
            return Err(Error::Precondition("zero ordinate; the center is not an atom".into()));
        }
        let mass = m as f64 / (g * g);
        neg.push((-g, mass));
        if zeros.symmetric {
            pos.push((g, mass));
        }
    }
    neg.reverse();
    neg.extend(pos);
    Ok((neg, tail_mass(f, zeros.height_bound)))
}

/// ∫_{|u|>T} u^{−2} dN(u) with the smooth density (d/2π) log(u/u₀), both signs.
pub fn tail_mass(f: &SelbergData, t: f64) -> f64 {
    if !(t > 0.0) {
        return f64::INFINITY;
    }
    let u0 = f.density_scale();
    (f.degree() / std::f64::consts::PI * ((t / u0).ln() + 1.0) / t).max(0.0)
}

impl LevyTriplet {
    /// The triplet (m₀, B_F, ν_F) from a zero list and central data.
    pub fn from_zeros(f: &SelbergData, zeros: &ZeroList, central: &CentralData) -> Result<Self> {
        let (atoms, tail) = levy_measure(f, zeros)?;
        Ok(LevyTriplet {
            a: central.m0 as f64,
            b0: compute_bf(f, central)?,
            atoms,
            truncation_height: zeros.height_bound,
            tail_mass_estimate: tail,
        })
    }

    pub fn new(a: f64, b0: f64, atoms: Vec<(f64, f64)>) -> Self {
        LevyTriplet {
            a,
            b0,
            atoms,
            truncation_height: f64::INFINITY,
            tail_mass_estimate: 0.0,
        }
    }

    /// Σ mass, the jump rate of the compound Poisson part.
    pub fn total_mass(&self) -> f64 {
        let mut s = CompensatedSum::new();
        for &(_, m) in &self.atoms {
            s.add(m);
        }
        s.value()
    }

    /// b = b₀ + Σ mass·λ/(1 + λ²), the center in the compensated form.
    pub fn center(&self) -> f64 {
        let mut s = CompensatedSum::new();
        s.add(self.b0);
        for &(l, m) in &self.atoms {
            s.add(m * l / (1.0 + l * l));
        }
        s.value()
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0) || !self.b0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bad (a, b0) = ({}, {})",
                self.a, self.b0
            )));
        }
        for &(l, m) in &self.atoms {
            if l == 0.0 || !l.is_finite() || !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidArgument(format!("bad atom ({l}, {m})")));
            }
        }
        Ok(())
    }

    /// Componentwise sum of two triplets: atoms at shared locations add their masses.
    pub fn combine(&self, other: &LevyTriplet) -> LevyTriplet {
        let mut atoms = Vec::with_capacity(self.atoms.len() + other.atoms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.atoms.len() || j < other.atoms.len() {
            match (self.atoms.get(i), other.atoms.get(j)) {
                (Some(&(l, m)), Some(&(l2, m2))) if l == l2 => {
                    atoms.push((l, m + m2));
                    i += 1;
                    j += 1;
                }
                (Some(&x), Some(&y)) => {
                    if x.0 < y.0 {
                        atoms.push(x);
                        i += 1;
                    } else {
                        atoms.push(y);
                        j += 1;
                    }
                }
                (Some(&x), None) => {
                    atoms.push(x);
                    i += 1;
                }
                (None, Some(&y)) => {
                    atoms.push(y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        LevyTriplet {
            a: self.a + other.a,
            b0: self.b0 + other.b0,
            atoms,
            truncation_height: self.truncation_height.min(other.truncation_height),
            tail_mass_estimate: self.tail_mass_estimate + other.tail_mass_estimate,
        }
    }

    /// g(t) = −(a/2)t² + i b₀ t + Σ mass·(e^{itλ} − 1).
    pub fn exponent(&self, t: f64) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        re.add(-0.5 * self.a * t * t);
        im.add(self.b0 * t);
        for &(l, m) in &self.atoms {
            let h = 0.5 * t * l;
            let s = h.sin();
            // cos x − 1 = −2 sin²(x/2), nonpositive term by term
            re.add(-2.0 * m * s * s);
            im.add(m * (t * l).sin());
        }
        Complex64::new(re.value(), im.value())
    }

    /// Allowance for the omitted atoms: 2·tail·min(1, t²T²/4).
    pub fn tail_bound(&self, t: f64) -> f64 {
        let tt = self.truncation_height;
        let r = if tt.is_finite() {
            (t * t * tt * tt / 4.0).min(1.0)
        } else {
            1.0
        };
        2.0 * self.tail_mass_estimate * r
    }
}

/// g_F(t) from the triplet.
pub fn g_eval(triplet: &LevyTriplet, t: f64) -> GFSample {
    GFSample {
        t,
        value: triplet.exponent(t),
        truncation_height: triplet.truncation_height,
        tail_bound: triplet.tail_bound(t),
    }
}

/// exp(g(t)).
pub fn char_fn(triplet: &LevyTriplet, t: f64) -> Complex64 {
    triplet.exponent(t).exp()
}

pub fn classify(triplet: &LevyTriplet) -> Classification {
    let pure_drift = triplet.a == 0.0 && triplet.atoms.is_empty();
    Classification {
        label: if triplet.a > 0.0 {
            GAUSSIAN_PLUS_COMPOUND_POISSON
        } else {
            COMPOUND_POISSON
        },
        drift: triplet.b0,
        note: if pure_drift {
            Some("pure drift, empty Lévy measure")
        } else {
            None
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn degenerate_and_gaussian_char_fns() {
        let t0 = LevyTriplet::new(0.0, 0.0, vec![]);
        assert_eq!(char_fn(&t0, 3.7), Complex64::new(1.0, 0.0));
        let t1 = LevyTriplet::new(1.0, 0.0, vec![]);
        assert!((char_fn(&t1, 1.0) - (-0.5f64).exp()).norm() < 1e-15);
        let t2 = LevyTriplet::new(0.0, 0.0, vec![(1.0, 1.0)]);
        assert!((char_fn(&t2, PI) - (-2.0f64).exp()).norm() < 1e-15);
    }

    #[test]
    fn exponent_vanishes_at_zero() {
        let t = LevyTriplet::new(1.0, 0.3, vec![(-14.0, 0.005), (14.0, 0.005)]);
        assert_eq!(t.exponent(0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn classification_labels() {
        assert_eq!(classify(&LevyTriplet::new(0.0, 3.0, vec![])).label, COMPOUND_POISSON);
        assert!(classify(&LevyTriplet::new(0.0, 3.0, vec![])).note.is_some());
        assert_eq!(
            classify(&LevyTriplet::new(1.0, 0.0, vec![(1.0, 1.0)])).label,
            GAUSSIAN_PLUS_COMPOUND_POISSON
        );
    }

    #[test]
    fn combine_merges_shared_atoms() {
        let a = LevyTriplet::new(1.0, 0.5, vec![(-2.0, 0.25), (2.0, 0.25)]);
        let b = LevyTriplet::new(0.0, 0.5, vec![(-3.0, 0.1), (2.0, 0.25)]);
        let c = a.combine(&b);
        assert_eq!(c.a, 1.0);
        assert_eq!(c.b0, 1.0);
        assert_eq!(c.atoms, vec![(-3.0, 0.1), (-2.0, 0.25), (2.0, 0.5)]);
    }

    #[test]
    fn json_shape() {
        let mut t = LevyTriplet::new(0.0, 0.0, vec![(-14.0, 0.005)]);
        t.truncation_height = 15.0;
        t.tail_mass_estimate = 0.1;
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        assert_eq!(v["atoms"][0][0], -14.0);
        assert_eq!(v["T"], 15.0);
        assert_eq!(v["tail"], 0.1);
        let back: LevyTriplet = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }
}
