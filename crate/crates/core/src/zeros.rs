//! Zeros of ξ_F on the critical line and the central multiplicity.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig15;
use crate::lfunc::SelbergData;

/// Largest supported height.
pub const MAX_HEIGHT: f64 = 1000.0;
/// Width at which bracketing stops.
pub const ROOT_WIDTH: f64 = 1e-9;
/// Default grid spacing; shrunk further where zeros are dense.
pub const DEFAULT_GRID_STEP: f64 = 0.1;

/// Points per expected zero spacing on the scan grid.
const POINTS_PER_SPACING: f64 = 5.0;
/// Ring radius and number of nodes for the central Taylor coefficients.
pub const CENTRAL_RADIUS: f64 = 0.05;
pub const CENTRAL_POINTS: usize = 64;
/// Relative tolerance for a nonvanishing scaled derivative at the center.
pub const CENTRAL_TOL: f64 = 1e-8;
pub const CENTRAL_MAX_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Computed,
    Loaded,
}

/// Positive ordinates γ of zeros 1/2 + iγ, ascending, with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroList {
    pub ordinates: Vec<f64>,
    pub multiplicities: Vec<u32>,
    pub height_bound: f64,
    /// Zeros at −γ are implied.
    pub symmetric: bool,
    pub provenance: Provenance,
    /// Set for zeros inferred from a touch without sign change.
    #[serde(default)]
    pub flagged: Vec<bool>,
}

impl ZeroList {
    pub fn empty(height_bound: f64, provenance: Provenance) -> Self {
        ZeroList {
            ordinates: Vec::new(),
            multiplicities: Vec::new(),
            height_bound,
            symmetric: true,
            provenance,
            flagged: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Number of zeros in (0, T] counted with multiplicity.
    pub fn total_multiplicity(&self) -> u32 {
        self.multiplicities.iter().sum()
    }

    /// (γ, m_γ) pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, u32)> + '_ {
        self.ordinates.iter().copied().zip(self.multiplicities.iter().copied())
    }

    /// Zeros counted with multiplicity up to height `t`.
    pub fn count_up_to(&self, t: f64) -> u32 {
        let k = self.ordinates.partition_point(|&g| g <= t);
        self.multiplicities[..k].iter().sum()
    }

    /// Restriction to ordinates ≤ `t`.
    pub fn truncated(&self, t: f64) -> ZeroList {
        let k = self.ordinates.partition_point(|&g| g <= t);
        ZeroList {
            ordinates: self.ordinates[..k].to_vec(),
            multiplicities: self.multiplicities[..k].to_vec(),
            height_bound: t.min(self.height_bound),
            symmetric: self.symmetric,
            provenance: self.provenance,
            flagged: self.flagged.iter().take(k).copied().collect(),
        }
    }

    /// Checks ordering and range.
    pub fn validate(&self) -> Result<()> {
        if self.ordinates.len() != self.multiplicities.len() {
            return Err(Error::InvalidArgument(
                "ordinates and multiplicities differ in length".into(),
            ));
        }
        for (i, &g) in self.ordinates.iter().enumerate() {
            if !(g > 0.0 && g <= self.height_bound) {
                return Err(Error::InvalidArgument(format!(
                    "ordinate {g} outside (0, {}]",
                    self.height_bound
                )));
            }
            if i > 0 && g <= self.ordinates[i - 1] {
                return Err(Error::InvalidArgument(format!("ordinates not ascending at index {i}")));
            }
        }
        if self.multiplicities.contains(&0) {
            return Err(Error::InvalidArgument("zero multiplicity".into()));
        }
        Ok(())
    }

    /// Writes `gamma,multiplicity` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "gamma,multiplicity")?;
        for (g, m) in self.iter() {
            writeln!(out, "{},{m}", sig15(g))?;
        }
        Ok(())
    }

    /// Union with multiplicities added where ordinates coincide to `tol`.
    pub fn merge(&self, other: &ZeroList, tol: f64) -> ZeroList {
        let mut out = ZeroList::empty(self.height_bound.min(other.height_bound), self.provenance);
        out.symmetric = self.symmetric && other.symmetric;
        let (mut i, mut j) = (0, 0);
        let a = self.truncated(out.height_bound);
        let b = other.truncated(out.height_bound);
        let flag = |l: &ZeroList, k: usize| l.flagged.get(k).copied().unwrap_or(false);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a.ordinates[i] < b.ordinates[j] - tol);
            let take_b = i >= a.len() || (j < b.len() && b.ordinates[j] < a.ordinates[i] - tol);
            if take_a {
                out.push(a.ordinates[i], a.multiplicities[i], flag(&a, i));
                i += 1;
            } else if take_b {
                out.push(b.ordinates[j], b.multiplicities[j], flag(&b, j));
                j += 1;
            } else {
                out.push(
                    a.ordinates[i],
                    a.multiplicities[i] + b.multiplicities[j],
                    flag(&a, i) || flag(&b, j),
                );
                i += 1;
                j += 1;
            }
        }
        out
    }

    fn push(&mut self, g: f64, m: u32, flagged: bool) {
        self.ordinates.push(g);
        self.multiplicities.push(m);
        self.flagged.push(flagged);
    }
}

/// Multiplicity of the zero of ξ_F at s = 1/2 and its Taylor data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralData {
    pub m0: u32,
    /// |ξ^{(m0)}(1/2)/m0!| ρ^{m0} relative to the maximum of |ξ| on the ring.
    pub residual_scale: f64,
    /// ξ^{(j)}(1/2)/j! · ρ^j relative to the ring maximum, j = 0..=6.
    pub taylor: Vec<Complex64>,
    pub radius: f64,
}

fn require_self_dual(f: &SelbergData) -> Result<()> {
    if f.is_self_dual() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "{} is not self-dual; ξ on the critical line has no real normalization",
            f.name()
        )))
    }
}

/// Rotation making ξ_F(1/2 + it) real: ξ/√ω, with √(−1) = i.
fn rotation(f: &SelbergData) -> Complex64 {
    f.omega().sqrt().inv()
}

/// ξ_F(1/2 + it)/√ω, a real-valued function of real t.
pub fn real_line_function(f: &SelbergData, t: f64) -> Result<f64> {
    require_self_dual(f)?;
    Ok((f.xi(Complex64::new(0.5, t))? * rotation(f)).re)
}

/// The real-line function divided by the positive envelope |G(1/2 + it)|.
///
/// For ζ this is Hardy's Z up to sign.
pub fn real_line_function_scaled(f: &SelbergData, t: f64) -> Result<f64> {
    require_self_dual(f)?;
    let s = Complex64::new(0.5, t);
    let x = f.xi_scaled(s)?;
    let env = f.log_gamma_factor(s).re;
    Ok((x.rescaled(env) * rotation(f)).re)
}

/// Central multiplicity from Taylor coefficients on a ring around 1/2.
pub fn central_multiplicity(f: &SelbergData) -> Result<CentralData> {
    let ring = f.taylor_ring(Complex64::new(0.5, 0.0), CENTRAL_RADIUS, CENTRAL_POINTS)?;
    let taylor: Vec<Complex64> = ring
        .coeffs
        .iter()
        .take(CENTRAL_MAX_ORDER + 2)
        .map(|c| c / ring.ring_max)
        .collect();
    for (j, c) in taylor.iter().enumerate().take(CENTRAL_MAX_ORDER + 1) {
        if c.norm() > CENTRAL_TOL {
            return Ok(CentralData {
                m0: j as u32,
                residual_scale: c.norm(),
                taylor,
                radius: ring.radius,
            });
        }
    }
    Err(Error::IndeterminateMultiplicity(CENTRAL_MAX_ORDER))
}

/// Zeros 1/2 + iγ with 0 < γ ≤ T.
///
/// The real-line function is sampled on a grid no coarser than `grid_step`
/// and a fifth of the mean zero spacing. Sign changes are bracketed down to
/// [`ROOT_WIDTH`]; grid minima of |Z| without a sign change are searched for a
/// hidden close pair or a double zero. The result is checked against the
/// smooth zero count.
pub fn find_zeros(f: &SelbergData, t_max: f64, grid_step: f64) -> Result<ZeroList> {
    require_self_dual(f)?;
    if !(t_max > 0.0 && t_max <= MAX_HEIGHT) {
        return Err(Error::Precondition(format!("height {t_max} outside (0, {MAX_HEIGHT}]")));
    }
    if !(grid_step > 0.0) {
        return Err(Error::Precondition(format!("grid step {grid_step} must be positive")));
    }
    if let Some(fs) = f.factors() {
        let mut acc: Option<ZeroList> = None;
        for g in fs {
            let z = find_zeros(g, t_max, grid_step)?;
            acc = Some(match acc {
                None => z,
                Some(a) => a.merge(&z, 1e-7),
            });
        }
        return Ok(acc.expect("product has factors"));
    }
    let m0 = central_multiplicity(f)?.m0;
    let first = scan(f, t_max, grid_step)?;
    match count_check(f, &first, m0) {
        Ok(()) => Ok(first),
        Err(_) => {
            let second = scan(f, t_max, grid_step / 2.0)?;
            count_check(f, &second, m0)?;
            Ok(second)
        }
    }
}

fn grid(f: &SelbergData, t_max: f64, step: f64) -> Vec<f64> {
    let mut ts = Vec::new();
    let mut t = 0.0f64;
    loop {
        let density = f.zero_density(t.max(1.0)).max(1e-3);
        t += step.min(1.0 / (POINTS_PER_SPACING * density));
        if t >= t_max {
            ts.push(t_max);
            break;
        }
        ts.push(t);
    }
    ts
}

struct Found {
    t: f64,
    mult: u32,
    flagged: bool,
}

fn scan(f: &SelbergData, t_max: f64, step: f64) -> Result<ZeroList> {
    let ts = grid(f, t_max, step);
    let z = |t: f64| real_line_function_scaled(f, t);
    let vals: Vec<f64> = ts.par_iter().map(|&t| z(t)).collect::<Result<_>>()?;

    // each grid cell and each local minimum is refined independently
    enum Task {
        Bracket(usize),
        Minimum(usize),
    }
    let mut tasks = Vec::new();
    for i in 0..ts.len() {
        if vals[i] == 0.0 {
            continue;
        }
        if i + 1 < ts.len() && vals[i] * vals[i + 1] < 0.0 {
            tasks.push(Task::Bracket(i));
        }
        if i > 0
            && i + 1 < ts.len()
            && vals[i - 1] * vals[i] > 0.0
            && vals[i] * vals[i + 1] > 0.0
            && vals[i].abs() < vals[i - 1].abs()
            && vals[i].abs() < vals[i + 1].abs()
        {
            tasks.push(Task::Minimum(i));
        }
    }
    let mut exact: Vec<Found> = (0..ts.len())
        .filter(|&i| vals[i] == 0.0)
        .map(|i| Found {
            t: ts[i],
            mult: 1,
            flagged: false,
        })
        .collect();
    let refined: Vec<Vec<Found>> = tasks
        .par_iter()
        .map(|task| match *task {
            Task::Bracket(i) => {
                let r = bracket_root(&z, ts[i], vals[i], ts[i + 1], vals[i + 1])?;
                Ok(vec![Found {
                    t: r,
                    mult: 1,
                    flagged: false,
                }])
            }
            Task::Minimum(i) => probe_minimum(&z, [ts[i - 1], ts[i], ts[i + 1]], [vals[i - 1], vals[i], vals[i + 1]]),
        })
        .collect::<Result<_>>()?;
    exact.extend(refined.into_iter().flatten());
    exact.sort_by(|a, b| a.t.total_cmp(&b.t));

    let mut out = ZeroList::empty(t_max, Provenance::Computed);
    for fz in exact {
        if fz.t <= 0.0 || fz.t > t_max {
            continue;
        }
        if let Some(&last) = out.ordinates.last() {
            if fz.t - last < 10.0 * ROOT_WIDTH {
                continue;
            }
        }
        out.push(fz.t, fz.mult, fz.flagged);
    }
    Ok(out)
}

/// Illinois false position; every third step is a bisection unless the
/// bracket has at least halved since the previous check.
fn bracket_root(z: &impl Fn(f64) -> Result<f64>, lo: f64, flo: f64, hi: f64, fhi: f64) -> Result<f64> {
    let (mut a, mut fa, mut b, mut fb) = (lo, flo, hi, fhi);
    let mut checkpoint = (b - a).abs();
    let mut iter = 0u32;
    while (b - a).abs() > ROOT_WIDTH {
        iter += 1;
        let mut bisect = false;
        if iter.is_multiple_of(3) {
            bisect = (b - a).abs() > 0.5 * checkpoint;
            checkpoint = (b - a).abs();
        }
        let mut c = if bisect {
            0.5 * (a + b)
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = z(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = c;
        fb = fc;
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for the minimum of sign·Z on a grid triple.
fn probe_minimum(z: &impl Fn(f64) -> Result<f64>, ts: [f64; 3], vs: [f64; 3]) -> Result<Vec<Found>> {
    const G: f64 = 0.381_966_011_250_105_1;
    let sgn = vs[1].signum();
    let env = vs[0].abs().max(vs[2].abs());
    let (mut a, mut b) = (ts[0], ts[2]);
    let (mut x, mut fx) = (ts[1], vs[1] * sgn);
    while b - a > ROOT_WIDTH {
        // probe the larger side
        let u = if x - a > b - x {
            x - G * (x - a)
        } else {
            x + G * (b - x)
        };
        let fu = z(u)?;
        if fu * sgn < 0.0 {
            let (l, fl) = (ts[0], vs[0]);
            let (r, fr) = (ts[2], vs[2]);
            let first = bracket_root(z, l, fl, u, fu)?;
            let second = bracket_root(z, u, fu, r, fr)?;
            return Ok(vec![
                Found {
                    t: first,
                    mult: 1,
                    flagged: false,
                },
                Found {
                    t: second,
                    mult: 1,
                    flagged: false,
                },
            ]);
        }
        let fu = fu * sgn;
        if fu < fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            x = u;
            fx = fu;
        } else if u < x {
            a = u;
        } else {
            b = u;
        }
    }
    if fx <= 1e-8 * env {
        Ok(vec![Found {
            t: x,
            mult: 2,
            flagged: true,
        }])
    } else {
        Ok(Vec::new())
    }
}

/// Mean of N_found − N_smooth over the top of the range; missed zeros push it below −1.
fn count_check(f: &SelbergData, zeros: &ZeroList, m0: u32) -> Result<()> {
    let t_max = zeros.height_bound;
    let lo = (t_max / 2.0).max(t_max - 50.0);
    let samples = 200;
    let mut sum = 0.0;
    let mut worst = (0.0f64, lo);
    for i in 0..samples {
        let u = lo + (t_max - lo) * (i as f64 + 0.5) / samples as f64;
        let d = zeros.count_up_to(u) as f64 - f.smooth_zero_count(u, m0);
        sum += d;
        if d.abs() > worst.0.abs() {
            worst = (d, u);
        }
    }
    let mean = sum / samples as f64;
    if mean.abs() <= 1.0 {
        return Ok(());
    }
    let spacing = 1.0 / f.zero_density(worst.1).max(1e-3);
    Err(Error::MissedZeros {
        found: zeros.total_multiplicity() as usize,
        expected: f.smooth_zero_count(t_max, m0),
        height: t_max,
        suspect_lo: (worst.1 - 2.0 * spacing).max(0.0),
        suspect_hi: (worst.1 + 2.0 * spacing).min(t_max),
    })
}

/// Reads a zero table: one positive ordinate per line, ascending; `#` lines
/// and blank lines are ignored; an optional second comma-separated column gives
/// the multiplicity; a `gamma,multiplicity` header before the first ordinate
/// is accepted.
pub fn load_zero_table(path: impl AsRef<Path>, t_declared: f64) -> Result<ZeroList> {
    let file = std::fs::File::open(path.as_ref())?;
    parse_zero_table(BufReader::new(file), t_declared)
}

pub fn parse_zero_table<R: BufRead>(reader: R, t_declared: f64) -> Result<ZeroList> {
    let mut out = ZeroList::empty(t_declared, Provenance::Loaded);
    let mut header_allowed = true;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if std::mem::take(&mut header_allowed) && text.starts_with("gamma") {
            continue;
        }
        let mut fields = text.split(',').map(str::trim);
        let g: f64 = fields.next().unwrap_or("").parse().map_err(|_| Error::ZeroTable {
            line: lineno,
            msg: format!("not a number: `{text}`"),
        })?;
        let m: u32 = match fields.next() {
            None => 1,
            Some(s) => s.parse().ok().filter(|&m| m > 0).ok_or_else(|| Error::ZeroTable {
                line: lineno,
                msg: format!("bad multiplicity `{s}`"),
            })?,
        };
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::ZeroTable {
                line: lineno,
                msg: format!("ordinate {g} is not positive"),
            });
        }
        if let Some(&last) = out.ordinates.last() {
            if g <= last {
                return Err(Error::ZeroTable {
                    line: lineno,
                    msg: format!("ordinate {g} does not exceed previous {last}"),
                });
            }
        }
        if g <= t_declared {
            out.push(g, m, false);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn illinois_finds_simple_root() {
        let f = |t: f64| Ok((t - 0.3).sin());
        let r = bracket_root(&f, 0.0, f(0.0).unwrap(), 1.0, f(1.0).unwrap()).unwrap();
        assert!((r - 0.3).abs() < ROOT_WIDTH);
    }

    #[test]
    fn minimum_probe_splits_close_pair() {
        // two roots at 0.50 and 0.51 hidden between grid points
        let f = |t: f64| Ok((t - 0.5) * (t - 0.51));
        let ts = [0.4, 0.55, 0.7];
        let vs = ts.map(|t| f(t).unwrap());
        let found = probe_minimum(&f, ts, vs).unwrap();
        assert_eq!(found.len(), 2);
        assert!((found[0].t - 0.5).abs() < 1e-8);
        assert!((found[1].t - 0.51).abs() < 1e-8);
    }

    #[test]
    fn minimum_probe_flags_double_zero() {
        let f = |t: f64| Ok((t - 0.52) * (t - 0.52));
        let ts = [0.4, 0.55, 0.7];
        let vs = ts.map(|t| f(t).unwrap());
        let found = probe_minimum(&f, ts, vs).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].mult, 2);
        assert!(found[0].flagged);
        assert!((found[0].t - 0.52).abs() < 1e-4);
    }

    #[test]
    fn minimum_probe_ignores_genuine_minimum() {
        let f = |t: f64| Ok(1.0 + (t - 0.5).powi(2));
        let ts = [0.4, 0.55, 0.7];
        let vs = ts.map(|t| f(t).unwrap());
        assert!(probe_minimum(&f, ts, vs).unwrap().is_empty());
    }

    #[test]
    fn merge_adds_multiplicities() {
        let mut a = ZeroList::empty(10.0, Provenance::Computed);
        a.push(1.0, 1, false);
        a.push(3.0, 1, false);
        let mut b = ZeroList::empty(10.0, Provenance::Computed);
        b.push(2.0, 1, false);
        b.push(3.0 + 1e-9, 1, false);
        let m = a.merge(&b, 1e-7);
        assert_eq!(m.ordinates, vec![1.0, 2.0, 3.0]);
        assert_eq!(m.multiplicities, vec![1, 1, 2]);
    }
}
