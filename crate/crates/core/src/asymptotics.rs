//! Grids approaching the boundary, power-law fits of mean profiles and
//! big-O / little-oh verdicts.
//!
//! A profile is a sequence `(x_i, V_i)` with `x_i` decreasing to zero: either
//! `x = 1 − r` for a radius family or `x = t` for an angle family. Exponents are
//! read off an unweighted least-squares line in log–log coordinates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::means::MeanValue;

/// Spread `max/min` of the ratio sequence below which a profile counts as
/// bounded against a power law. Deliberately loose: the constants of the
/// underlying inequalities are not controlled.
pub const BOUNDEDNESS_FACTOR: f64 = 20.0;

/// Largest grid index accepted by [`radius_grid`] and [`angle_grid`].
pub const MAX_GRID_K: u32 = 16;

/// Default grid indices.
pub const DEFAULT_K_MIN: u32 = 3;
pub const DEFAULT_K_MAX: u32 = 12;

/// Minimum usable points for a fit.
pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Parameter `r`, abscissa `1 − r`.
    RadiusToOne,
    /// Parameter `t`, abscissa `t`.
    AngleToZero,
}

impl GridKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GridKind::RadiusToOne => "radius_to_one",
            GridKind::AngleToZero => "angle_to_zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    /// `r` or `t`.
    pub parameter: f64,
    pub abscissa: f64,
    pub value: f64,
    pub samples_used: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanProfile {
    pub grid_kind: GridKind,
    pub points: Vec<ProfilePoint>,
}

impl MeanProfile {
    /// Profile from raw `(abscissa, value)` pairs; parameters are derived from
    /// the grid kind.
    pub fn from_pairs(grid_kind: GridKind, pairs: &[(f64, f64)]) -> Result<Self> {
        let points = pairs
            .iter()
            .map(|&(x, v)| ProfilePoint {
                parameter: match grid_kind {
                    GridKind::RadiusToOne => 1.0 - x,
                    GridKind::AngleToZero => x,
                },
                abscissa: x,
                value: v,
                samples_used: 0,
                converged: true,
            })
            .collect();
        let profile = Self { grid_kind, points };
        profile.validate()?;
        Ok(profile)
    }

    /// Evaluates `mean_at` at each radius `1 − 2^{−k}` in parallel.
    pub fn sample_radii<F>(k_min: u32, k_max: u32, mean_at: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<MeanValue> + Sync,
    {
        let radii = radius_grid(k_min, k_max)?;
        Self::sample(GridKind::RadiusToOne, &radii, mean_at)
    }

    /// Evaluates `gap_at` at each angle `2^{−k}` in parallel.
    pub fn sample_angles<F>(k_min: u32, k_max: u32, gap_at: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<MeanValue> + Sync,
    {
        let angles = angle_grid(k_min, k_max)?;
        Self::sample(GridKind::AngleToZero, &angles, gap_at)
    }

    /// Evaluates `f` at the given parameters (in parallel) and builds a profile.
    pub fn sample<F>(grid_kind: GridKind, parameters: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<MeanValue> + Sync,
    {
        let points = parameters
            .par_iter()
            .map(|&s| {
                let m = f(s)?;
                Ok(ProfilePoint {
                    parameter: s,
                    abscissa: match grid_kind {
                        GridKind::RadiusToOne => 1.0 - s,
                        GridKind::AngleToZero => s,
                    },
                    value: m.value,
                    samples_used: m.samples_used,
                    converged: m.converged,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let profile = Self { grid_kind, points };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() < MIN_POINTS {
            return Err(Error::DegenerateProfile(self.points.len()));
        }
        for w in self.points.windows(2) {
            if !(w[1].abscissa < w[0].abscissa) {
                return Err(Error::InvalidArgument(
                    "profile abscissas must be strictly decreasing".into(),
                ));
            }
        }
        for p in &self.points {
            if !(p.abscissa > 0.0) || !p.abscissa.is_finite() {
                return Err(Error::InvalidArgument(format!("abscissa {} is not positive", p.abscissa)));
            }
            if !p.value.is_finite() || p.value < 0.0 {
                return Err(Error::InvalidArgument(format!("profile value {} is not finite and nonnegative", p.value)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn abscissas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.abscissa).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Same profile with every value multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            p.value *= lambda;
        }
        out
    }

    /// All points converged.
    pub fn converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }
}

/// Radii `1 − 2^{−k}`, `k = k_min..=k_max`.
pub fn radius_grid(k_min: u32, k_max: u32) -> Result<Vec<f64>> {
    check_range(k_min, k_max)?;
    Ok((k_min..=k_max).map(|k| 1.0 - (-f64::from(k)).exp2()).collect())
}

/// Angles `2^{−k}`, `k = k_min..=k_max`.
pub fn angle_grid(k_min: u32, k_max: u32) -> Result<Vec<f64>> {
    check_range(k_min, k_max)?;
    Ok((k_min..=k_max).map(|k| (-f64::from(k)).exp2()).collect())
}

fn check_range(k_min: u32, k_max: u32) -> Result<()> {
    if k_min < 2 || k_min >= k_max || k_max > MAX_GRID_K {
        return Err(Error::InvalidArgument(format!(
            "grid range {k_min}:{k_max} must satisfy 2 <= k_min < k_max <= {MAX_GRID_K}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    BigO,
    LittleOh,
    Unbounded,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub alpha_hat: f64,
    pub log_constant: f64,
    pub residual_rms: f64,
    pub verdict: Verdict,
    /// Notes on degenerate or approximate situations.
    pub flags: Vec<String>,
}

/// Fits `V ≍ C·x^{α + offset}` by least squares in log–log coordinates.
///
/// Points with zero value are dropped; a profile that is identically zero is
/// reported as `BigO` with `alpha_hat = +∞`.
pub fn fit_exponent(profile: &MeanProfile, offset: f64) -> Result<ExponentFit> {
    if profile.points.len() < MIN_POINTS {
        return Err(Error::DegenerateProfile(profile.points.len()));
    }
    profile.validate()?;
    let usable: Vec<(f64, f64)> = profile
        .points
        .iter()
        .filter(|p| p.value > 0.0)
        .map(|p| (p.abscissa, p.value))
        .collect();
    if usable.is_empty() {
        return Ok(ExponentFit {
            alpha_hat: f64::INFINITY,
            log_constant: f64::NEG_INFINITY,
            residual_rms: 0.0,
            verdict: Verdict::BigO,
            flags: vec!["identically zero profile".into()],
        });
    }
    if usable.len() < MIN_POINTS {
        return Err(Error::DegenerateProfile(usable.len()));
    }
    let mut flags = Vec::new();
    if usable.len() < profile.points.len() {
        flags.push(format!("{} zero values dropped", profile.points.len() - usable.len()));
    }
    if !profile.converged() {
        flags.push("some profile values did not converge".into());
    }

    let lx: Vec<f64> = usable.iter().map(|p| p.0.ln()).collect();
    let lv: Vec<f64> = usable.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, residual_rms) = least_squares(&lx, &lv);

    let ratios: Vec<f64> = usable.iter().map(|&(x, v)| v / x.powf(slope)).collect();
    let spread = spread(&ratios);
    let n = ratios.len();
    let third = &ratios[n - n.div_ceil(3)..];
    let verdict = if spread < BOUNDEDNESS_FACTOR {
        if strictly_decreasing(third) {
            Verdict::LittleOh
        } else {
            Verdict::BigO
        }
    } else if third.windows(2).all(|w| w[1] > w[0]) {
        Verdict::Unbounded
    } else {
        Verdict::Inconclusive
    };

    Ok(ExponentFit {
        alpha_hat: slope - offset,
        log_constant: intercept,
        residual_rms,
        verdict,
        flags,
    })
}

/// `(slope, intercept, rms residual)` of the ordinary least-squares line.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum();
    (slope, intercept, (ss / n).sqrt())
}

fn spread(ratios: &[f64]) -> f64 {
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Strict decrease, ignoring changes at the level of rounding.
fn strictly_decreasing(v: &[f64]) -> bool {
    v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0] * (1.0 - 1e-9))
}

fn ratios_against(profile: &MeanProfile, exponent: f64) -> Vec<f64> {
    profile
        .points
        .iter()
        .map(|p| p.value / p.abscissa.powf(exponent))
        .collect()
}

/// `(max_i V_i / x_i^{α+offset}, bounded)`. Bounded means the running maximum
/// of the ratios grows by less than 10% over the last quarter of the grid.
pub fn big_o_verdict(profile: &MeanProfile, alpha: f64, offset: f64) -> Result<(f64, bool)> {
    profile.validate()?;
    let ratios = ratios_against(profile, alpha + offset);
    Ok(running_max_verdict(&ratios))
}

/// Big-O test for an arbitrary comparison function: ratios `V_i / g(x_i)`.
pub fn big_o_against<G: Fn(f64) -> f64>(profile: &MeanProfile, g: G) -> Result<(f64, bool)> {
    profile.validate()?;
    let ratios: Vec<f64> = profile.points.iter().map(|p| p.value / g(p.abscissa)).collect();
    if ratios.iter().any(|q| !q.is_finite()) {
        return Ok((f64::INFINITY, false));
    }
    Ok(running_max_verdict(&ratios))
}

fn running_max_verdict(ratios: &[f64]) -> (f64, bool) {
    let n = ratios.len();
    let mut running = Vec::with_capacity(n);
    let mut m = f64::NEG_INFINITY;
    for &q in ratios {
        m = m.max(q);
        running.push(m);
    }
    let quarter = (n / 4).max(1);
    let before = running[n - 1 - quarter];
    let last = running[n - 1];
    let bounded = if before > 0.0 {
        last < 1.10 * before
    } else {
        last == 0.0
    };
    (last, bounded)
}

/// True when `V_i / x_i^{α+offset}` decreases strictly over the last half of
/// the grid with a local decay rate of at least `x^{0.05}`. An identically
/// zero tail counts as decaying.
pub fn little_oh_verdict(profile: &MeanProfile, alpha: f64, offset: f64) -> Result<bool> {
    profile.validate()?;
    let ratios = ratios_against(profile, alpha + offset);
    let n = ratios.len();
    let start = n / 2;
    let tail = &ratios[start..];
    if tail.iter().all(|&q| q == 0.0) {
        return Ok(true);
    }
    if !strictly_decreasing(tail) || tail[tail.len() - 1] <= 0.0 {
        return Ok(false);
    }
    let x0 = profile.points[start].abscissa;
    let x1 = profile.points[n - 1].abscissa;
    let rate = (tail[0] / tail[tail.len() - 1]).ln() / (x0 / x1).ln();
    Ok(rate >= 0.05)
}

/// JSON form of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub alpha_hat: f64,
    pub log_constant: f64,
    pub residual_rms: f64,
    pub verdict: Verdict,
    pub offset: f64,
    pub boundedness_factor: f64,
    pub flags: Vec<String>,
    pub grid_kind: GridKind,
    pub grid: Vec<ProfilePoint>,
}

impl FitReport {
    pub fn new(fit: &ExponentFit, offset: f64, profile: &MeanProfile) -> Self {
        Self {
            alpha_hat: fit.alpha_hat,
            log_constant: fit.log_constant,
            residual_rms: fit.residual_rms,
            verdict: fit.verdict,
            offset,
            boundedness_factor: BOUNDEDNESS_FACTOR,
            flags: fit.flags.clone(),
            grid_kind: profile.grid_kind,
            grid: profile.points.clone(),
        }
    }
}
