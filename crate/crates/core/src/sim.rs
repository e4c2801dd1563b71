//! Sample paths of the Lévy process with time-one characteristic function exp(g).
//!
//! Per step of length Δ the increment is b₀Δ + N(0, aΔ) + J₁ + … + J_K with
//! K ~ Poisson(ΛΔ), Λ the total mass, and the J_j drawn from the normalized
//! atoms. Path p uses ChaCha8 seeded from the seed with stream p, so paths
//! are reproducible individually and independent of thread scheduling.

use std::io::Write;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::fmt::sig15;
use crate::levy::{classify, LevyTriplet};

/// Poisson means above this are split into a sum of smaller draws.
const POISSON_SPLIT: f64 = 30.0;
/// Mean jumps per step for which P(at most one jump) = 0.999.
const RESOLVED_RATE: f64 = 0.045_40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub t_max: f64,
    pub n_steps: usize,
    pub seed: u64,
    pub n_paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    pub path_id: usize,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Sidecar describing how a set of paths was produced.
#[derive(Debug, Clone, Serialize)]
pub struct PathMetadata<'a> {
    pub family: &'a str,
    pub seed: u64,
    pub spec: PathSpec,
    pub steps_used: usize,
    pub resolve_jumps: bool,
    pub classification: &'static str,
    pub jump_rate: f64,
    /// Mass of the atoms beyond the truncation height, left out of the simulation.
    pub omitted_tail_mass: f64,
    pub triplet: &'a LevyTriplet,
}

/// Uniform on the open interval (0, 1).
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

struct Sampler {
    normal: Normal,
    sd: f64,
    rate: f64,
    cumulative: Vec<f64>,
    locations: Vec<f64>,
}

impl Sampler {
    fn new(triplet: &LevyTriplet, dt: f64) -> Result<Self> {
        triplet.validate()?;
        let mut cumulative = Vec::with_capacity(triplet.atoms.len());
        let mut acc = 0.0;
        for &(_, m) in &triplet.atoms {
            acc += m;
            cumulative.push(acc);
        }
        Ok(Sampler {
            normal: Normal::new(0.0, 1.0).expect("standard normal"),
            sd: (triplet.a * dt).sqrt(),
            rate: acc * dt,
            cumulative,
            locations: triplet.atoms.iter().map(|&(l, _)| l).collect(),
        })
    }

    fn poisson(&self, rng: &mut ChaCha8Rng) -> u64 {
        let pieces = (self.rate / POISSON_SPLIT).ceil().max(1.0) as u64;
        let mean = self.rate / pieces as f64;
        (0..pieces).map(|_| poisson_inversion(rng, mean)).sum()
    }

    fn jump(&self, rng: &mut ChaCha8Rng) -> f64 {
        let total = *self.cumulative.last().expect("jump from empty measure");
        let u = uniform(rng) * total;
        let k = self
            .cumulative
            .partition_point(|&c| c < u)
            .min(self.locations.len() - 1);
        self.locations[k]
    }

    /// Gaussian plus jump part of one increment (the drift is added separately).
    fn increment(&self, rng: &mut ChaCha8Rng) -> f64 {
        let mut x = 0.0;
        if self.sd > 0.0 {
            x += self.sd * self.normal.inverse_cdf(uniform(rng));
        }
        if self.rate > 0.0 {
            for _ in 0..self.poisson(rng) {
                x += self.jump(rng);
            }
        }
        x
    }
}

fn poisson_inversion(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    let u = uniform(rng);
    let mut p = (-mean).exp();
    let mut cdf = p;
    let mut k = 0u64;
    while u > cdf && p > 0.0 {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
    }
    k
}

/// Number of steps actually used: with `resolve_jumps` the grid is refined by
/// an integer factor until a step holds more than one jump with probability
/// below 0.001.
pub fn steps_used(triplet: &LevyTriplet, spec: &PathSpec, resolve_jumps: bool) -> usize {
    if !resolve_jumps {
        return spec.n_steps;
    }
    let per_step = triplet.total_mass() * spec.t_max / spec.n_steps as f64;
    let factor = (per_step / RESOLVED_RATE).ceil().max(1.0) as usize;
    spec.n_steps * factor
}

fn check_spec(spec: &PathSpec) -> Result<()> {
    if !(spec.t_max > 0.0 && spec.t_max.is_finite()) || spec.n_steps == 0 || spec.n_paths == 0 {
        return Err(Error::InvalidArgument(format!(
            "path spec needs t_max > 0, steps >= 1, paths >= 1; got {spec:?}"
        )));
    }
    Ok(())
}

/// `spec.n_paths` trajectories on a uniform grid over [0, t_max].
pub fn sample_paths(triplet: &LevyTriplet, spec: &PathSpec, resolve_jumps: bool) -> Result<Vec<Path>> {
    check_spec(spec)?;
    let n = steps_used(triplet, spec, resolve_jumps);
    let dt = spec.t_max / n as f64;
    let sampler = Sampler::new(triplet, dt)?;
    let times: Vec<f64> = (0..=n).map(|i| spec.t_max * i as f64 / n as f64).collect();
    Ok((0..spec.n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(p as u64);
            let mut values = Vec::with_capacity(n + 1);
            values.push(0.0);
            let mut random_part = 0.0;
            for &t in &times[1..] {
                random_part += sampler.increment(&mut rng);
                values.push(triplet.b0 * t + random_part);
            }
            Path {
                path_id: p,
                times: times.clone(),
                values,
            }
        })
        .collect())
}

/// `count` independent increments over time `dt`.
pub fn sample_increments(triplet: &LevyTriplet, dt: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("increment time {dt} must be positive")));
    }
    let sampler = Sampler::new(triplet, dt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| triplet.b0 * dt + sampler.increment(&mut rng))
        .collect())
}

/// (1/N) Σ e^{iux_k} on a grid of u, with standard-error radius 1/√N.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalCf {
    pub u: Vec<f64>,
    pub values: Vec<Complex64>,
    pub radius: f64,
}

pub fn empirical_cf(samples: &[f64], u_grid: &[f64]) -> Result<EmpiricalCf> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "empirical characteristic function of no samples".into(),
        ));
    }
    let n = samples.len() as f64;
    let values = u_grid
        .par_iter()
        .map(|&u| {
            if u == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let mut acc = crate::special::ComplexSum::new();
            for &x in samples {
                acc.add(Complex64::from_polar(1.0, u * x));
            }
            acc.value() / n
        })
        .collect();
    Ok(EmpiricalCf {
        u: u_grid.to_vec(),
        values,
        radius: 1.0 / n.sqrt(),
    })
}

/// Realized quadratic variation with jump steps removed: increments farther
/// than six robust standard deviations (1.4826·MAD) from the median are dropped.
pub fn continuous_quadratic_variation(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let d: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let med = median(&d);
    let dev: Vec<f64> = d.iter().map(|x| (x - med).abs()).collect();
    let sigma = 1.4826 * median(&dev);
    d.iter()
        .zip(&dev)
        .filter(|(_, &e)| e <= 6.0 * sigma)
        .map(|(x, _)| x * x)
        .sum()
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `path_id,time,value` rows for all paths, in path order.
pub fn write_paths_csv<W: Write>(paths: &[Path], mut out: W) -> std::io::Result<()> {
    writeln!(out, "path_id,time,value")?;
    for p in paths {
        for (t, v) in p.times.iter().zip(&p.values) {
            writeln!(out, "{},{},{}", p.path_id, sig15(*t), sig15(*v))?;
        }
    }
    Ok(())
}

pub fn metadata<'a>(
    family: &'a str,
    triplet: &'a LevyTriplet,
    spec: &PathSpec,
    resolve_jumps: bool,
) -> PathMetadata<'a> {
    PathMetadata {
        family,
        seed: spec.seed,
        spec: *spec,
        steps_used: steps_used(triplet, spec, resolve_jumps),
        resolve_jumps,
        classification: classify(triplet).label,
        jump_rate: triplet.total_mass(),
        omitted_tail_mass: triplet.tail_mass_estimate,
        triplet,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64) -> PathSpec {
        PathSpec {
            t_max: 2.0,
            n_steps: 100,
            seed,
            n_paths: 3,
        }
    }

    #[test]
    fn pure_drift_is_a_straight_line() {
        let t = LevyTriplet::new(0.0, 0.75, vec![]);
        let paths = sample_paths(&t, &spec(1), false).unwrap();
        for p in &paths {
            for (s, x) in p.times.iter().zip(&p.values) {
                assert_eq!(*x, 0.75 * s);
            }
        }
    }

    #[test]
    fn poisson_mean_and_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for mean in [0.3, 4.0] {
            let n = 200_000;
            let xs: Vec<f64> = (0..n).map(|_| poisson_inversion(&mut rng, mean) as f64).collect();
            let m = xs.iter().sum::<f64>() / n as f64;
            let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
            assert!((m - mean).abs() < 5.0 * (mean / n as f64).sqrt());
            assert!((v / mean - 1.0).abs() < 0.03);
        }
    }

    #[test]
    fn large_rate_is_split() {
        let t = LevyTriplet::new(0.0, 0.0, vec![(1.0, 100.0)]);
        let xs = sample_increments(&t, 1.0, 20_000, 3).unwrap();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((m - 100.0).abs() < 0.5);
    }

    #[test]
    fn resolving_refines_by_integer_factor() {
        let t = LevyTriplet::new(0.0, 0.0, vec![(-1.0, 0.5), (1.0, 0.5)]);
        let s = spec(0);
        let n = steps_used(&t, &s, true);
        assert_eq!(n % s.n_steps, 0);
        let rate = t.total_mass() * s.t_max / n as f64;
        assert!((-rate).exp() * (1.0 + rate) >= 0.999);
    }

    #[test]
    fn empirical_cf_basics() {
        let cf = empirical_cf(&[2.0; 10], &[0.0, 1.5]).unwrap();
        assert_eq!(cf.values[0], Complex64::new(1.0, 0.0));
        assert!((cf.values[1] - Complex64::from_polar(1.0, 3.0)).norm() < 1e-15);
        assert!(empirical_cf(&[], &[1.0]).is_err());
    }

    #[test]
    fn quadratic_variation_ignores_jumps() {
        let t = LevyTriplet::new(1.0, 0.0, vec![(-20.0, 0.5), (20.0, 0.5)]);
        let s = PathSpec {
            t_max: 5.0,
            n_steps: 50_000,
            seed: 4,
            n_paths: 1,
        };
        let p = &sample_paths(&t, &s, false).unwrap()[0];
        let qv = continuous_quadratic_variation(&p.values);
        assert!((qv / 5.0 - 1.0).abs() < 0.05, "{qv}");
    }
}
