//! Numerical checks of the identities and inequalities behind the
//! equivalence of the rotation, derivative and dilation conditions, and the
//! per-function equivalence reports.
//!
//! Integrals `∫_r^1 g(s) ds` whose integrand may be singular at `s = 1` are
//! split at the points `1 − 2^{−j}`. Each piece gets a Gauss–Kronrod panel and
//! the part beyond the deepest panel is extrapolated from the ratio of the
//! last two pieces. Radii on the grid `1 − 2^{−k}` reuse the same pieces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticFunction, Complex, DiscPoint};
use crate::asymptotics::{big_o_against, fit_exponent, ExponentFit, MeanProfile};
use crate::corpus::default_corpus;
use crate::error::{Error, Result};
use crate::means::{
    dilation_gap, mean_in_space, modulus_grid, rotation_gap, space_norm, QuadratureConfig, SpaceSpec,
};
use crate::quadrature::{adaptive_gk15, gauss_kronrod15, GaussLegendre};
use crate::weights::{classify_weight, eval_weight, Weight, WeightClassification};

/// Largest pairwise exponent difference still counted as agreement.
pub const AGREEMENT_TOL: f64 = 0.1;

/// Residual tolerance of the identity checks, relative to `1 + |lhs|`.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// Cap on the slack of an inequality check, relative to `1 + rhs`.
pub const SLACK_CAP: f64 = 1e-6;

/// Points per octave (times two) of the modulus-of-continuity grid used for
/// Storozhenko ratios.
pub const STOROZHENKO_GRID: usize = 16;

/// Default grid of the equivalence report.
pub const REPORT_K_MIN: u32 = 4;
pub const REPORT_K_MAX: u32 = 12;

/// The three conditions compared by the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `‖r_t(f) − f‖_X` as `t → 0`.
    A,
    /// `‖(f′)_r‖_X` as `r → 1`, fitted with offset `−1`.
    B,
    /// `‖f_r − f‖_X` as `r → 1`.
    C,
}

impl Condition {
    pub fn offset(&self) -> f64 {
        match self {
            Condition::B => -1.0,
            _ => 0.0,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Condition::A),
            "b" => Ok(Condition::B),
            "c" => Ok(Condition::C),
            other => Err(Error::InvalidArgument(format!("condition must be a, b or c, got {other:?}"))),
        }
    }
}

/// Profile of one condition on the grid `2^{−k}` (angles) or `1 − 2^{−k}`
/// (radii), `k = k_min..=k_max`.
pub fn condition_profile(
    f: &AnalyticFunction,
    space: &SpaceSpec,
    condition: Condition,
    k_min: u32,
    k_max: u32,
    cfg: &QuadratureConfig,
) -> Result<MeanProfile> {
    match condition {
        Condition::A => MeanProfile::sample_angles(k_min, k_max, |t| rotation_gap(f, t, space, cfg)),
        Condition::B => {
            let fp = f.derivative();
            MeanProfile::sample_radii(k_min, k_max, |r| mean_in_space(&fp, space, r, cfg))
        }
        Condition::C => MeanProfile::sample_radii(k_min, k_max, |r| dilation_gap(f, r, space, cfg)),
    }
}

// ---------------------------------------------------------------------------
// Auxiliary functions

/// `Φ_{[s]} = f − f_s/s`, `F_{[r]} = (f − f_r)/z` and `Ψ_{[r,s]}`.
#[derive(Debug, Clone)]
pub struct AuxiliaryFunctions<'a> {
    f: &'a AnalyticFunction,
}

impl<'a> AuxiliaryFunctions<'a> {
    pub fn new(f: &'a AnalyticFunction) -> Self {
        Self { f }
    }

    pub fn phi(&self, s: f64) -> Result<AnalyticFunction> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::InvalidArgument(format!("Phi_s needs 0 < s <= 1, got {s}")));
        }
        let fs = self.f.dilate(s)?;
        Ok(AnalyticFunction::linear_combination(
            Complex::new(1.0, 0.0),
            self.f,
            Complex::new(-1.0 / s, 0.0),
            &fs,
        ))
    }

    pub fn f_r(&self, r: f64) -> Result<AnalyticFunction> {
        self.f.sub(&self.f.dilate(r)?).divide_by_z()
    }

    /// `Ψ_{[r,s]}(z) = ∫_r^1 (f′(z) − f′(sz)) ds` through an `nodes`-point
    /// Gauss–Legendre rule in `s`.
    pub fn psi(&self, r: f64, nodes: usize) -> Psi {
        let rule = GaussLegendre::cached(nodes.max(1));
        Psi {
            f_prime: self.f.derivative(),
            rule: rule.mapped(r, 1.0).collect(),
        }
    }
}

/// Quadrature representation of `Ψ_{[r,s]}`.
#[derive(Debug, Clone)]
pub struct Psi {
    f_prime: AnalyticFunction,
    rule: Vec<(f64, f64)>,
}

impl Psi {
    pub fn eval(&self, z: Complex) -> Result<Complex> {
        let d = self.f_prime.eval_at(z)?;
        let mut acc = Complex::new(0.0, 0.0);
        for &(s, w) in &self.rule {
            acc += (d - self.f_prime.eval_at(z * s)?) * w;
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Identities

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityLabel {
    Ef1,
    Ef2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub label: IdentityLabel,
    pub point: [f64; 2],
    pub r: f64,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub residual: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(label: IdentityLabel, z: Complex, r: f64, lhs: Complex, rhs: Complex) -> Self {
        let residual = (lhs - rhs).norm();
        Self {
            label,
            point: [z.re, z.im],
            r,
            lhs: [lhs.re, lhs.im],
            rhs: [rhs.re, rhs.im],
            residual,
            passed: residual < IDENTITY_TOLERANCE * (1.0 + lhs.norm()),
        }
    }
}

fn check_r(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("r = {r} outside [0, 1)")))
    }
}

/// `f(z) − f_r(z) = ∫_r^1 z f′(sz) ds`.
pub fn check_identity_ef1(f: &AnalyticFunction, z: DiscPoint, r: f64, nodes: usize) -> Result<IdentityCheck> {
    check_r(r)?;
    let z = z.z();
    let fp = f.derivative();
    let lhs = f.eval_at(z)? - f.eval_at(z * r)?;
    let rule = GaussLegendre::cached(nodes.max(1));
    let mut rhs = Complex::new(0.0, 0.0);
    for (s, w) in rule.mapped(r, 1.0) {
        rhs += z * fp.eval_at(z * s)? * w;
    }
    Ok(IdentityCheck::new(IdentityLabel::Ef1, z, r, lhs, rhs))
}

/// `(1 − r) f′(z) = (f(z) − f_r(z))/z + ∫_r^1 (f′(z) − f′(sz)) ds`.
///
/// The quotient is evaluated through `F_{[r]}`, so `z = 0` takes its
/// removable value `a_1 (1 − r)`.
pub fn check_identity_ef2(f: &AnalyticFunction, z: DiscPoint, r: f64, nodes: usize) -> Result<IdentityCheck> {
    check_r(r)?;
    let z = z.z();
    let aux = AuxiliaryFunctions::new(f);
    let lhs = f.derivative().eval_at(z)? * (1.0 - r);
    let quotient = if z.norm() == 0.0 {
        f.coefficients().get(1).copied().unwrap_or_default() * (1.0 - r)
    } else {
        aux.f_r(r)?.eval_at(z)?
    };
    let rhs = quotient + aux.psi(r, nodes).eval(z)?;
    Ok(IdentityCheck::new(IdentityLabel::Ef2, z, r, lhs, rhs))
}

// ---------------------------------------------------------------------------
// Inequalities

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InequalityLabel {
    E1,
    E2,
    Be1,
    Be2,
    Be3,
    Be4,
    DirichletBridgeA,
    DirichletBridgeB,
    Storozhenko,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub label: InequalityLabel,
    pub r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<[f64; 2]>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub passed: bool,
}

impl InequalityCheck {
    /// `error` is the estimated quadrature error of the two sides; the slack
    /// is that estimate, floored at rounding level and capped at
    /// `1e−6·(1 + rhs)`.
    fn new(label: InequalityLabel, r: f64, lhs: f64, rhs: f64, error: f64) -> Self {
        let rounding = 64.0 * f64::EPSILON * (1.0 + lhs.abs() + rhs.abs());
        let slack = error.max(rounding).min(SLACK_CAP * (1.0 + rhs.abs()));
        Self {
            label,
            r,
            u: None,
            s: None,
            w: None,
            lhs,
            rhs,
            slack,
            passed: lhs <= rhs + slack,
        }
    }

    fn at_u(mut self, u: f64) -> Self {
        self.u = Some(u);
        self
    }

    fn at_s(mut self, s: f64) -> Self {
        self.s = Some(s);
        self
    }

    /// `rhs − lhs`.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Error estimate attached to a computed mean: zero when converged, a
/// relative `rel_tol` otherwise.
fn mean_error(value: f64, converged: bool, cfg: &QuadratureConfig) -> f64 {
    if converged {
        cfg.rel_tol.min(1e-12) * value.abs()
    } else {
        cfg.rel_tol * value.abs()
    }
}

/// `∫ g` over `[1 − 2^{−k0}, 1)` split at `1 − 2^{−j}`.
struct DyadicIntegral {
    k0: u32,
    /// `(value, error)` of the piece `[1 − 2^{−j}, 1 − 2^{−j−1}]`, `j = k0..`.
    pieces: Vec<(f64, f64)>,
    tail: f64,
    tail_error: f64,
}

impl DyadicIntegral {
    /// `depth` is the index of the deepest piece. With `reaches_one` the last
    /// piece runs all the way to `1`, which needs `g(1)` to be finite.
    fn build<G>(g: G, k0: u32, depth: u32, reaches_one: bool) -> Result<Self>
    where
        G: Fn(f64) -> Result<f64> + Sync,
    {
        let depth = depth.max(k0 + 2);
        let pieces = (k0..=depth)
            .into_par_iter()
            .map(|j| {
                let a = 1.0 - (-f64::from(j)).exp2();
                let b = if reaches_one && j == depth {
                    1.0
                } else {
                    1.0 - (-f64::from(j + 1)).exp2()
                };
                gauss_kronrod15(&g, a, b)
            })
            .collect::<Result<Vec<_>>>()?;
        let (tail, tail_error) = if reaches_one {
            (0.0, 0.0)
        } else {
            geometric_tail(&pieces)
        };
        Ok(Self {
            k0,
            pieces,
            tail,
            tail_error,
        })
    }

    /// `(∫_{1−2^{−k}}^1 g, error)`.
    fn from(&self, k: u32) -> (f64, f64) {
        let start = (k - self.k0) as usize;
        let (mut v, mut e) = (self.tail, self.tail_error);
        for &(pv, pe) in self.pieces[start..].iter().rev() {
            v += pv;
            e += pe;
        }
        (v, e)
    }
}

/// Sum of the geometric continuation of the last pieces, with the change in
/// the continuation between the last two ratios as its error.
fn geometric_tail(pieces: &[(f64, f64)]) -> (f64, f64) {
    let n = pieces.len();
    let (last, prev, prev2) = (pieces[n - 1].0, pieces[n - 2].0, pieces[n - 3].0);
    if last == 0.0 {
        return (0.0, 0.0);
    }
    let q = last / prev;
    let q_prev = prev / prev2;
    if !(q > 0.0 && q < 0.97) || !q_prev.is_finite() {
        // No usable decay: bound the rest by as many pieces again.
        let guess = last.abs() * 32.0;
        return (guess, guess);
    }
    let tail = last * q / (1.0 - q);
    let drift = ((q - q_prev) / (1.0 - q)).abs();
    (tail, tail.abs() * drift.max(1e-6))
}

/// Deepest dyadic piece used for an integrand built from `f`: sparse series
/// are cheap at any radius, dense ones cost `∝ 1/(1 − s)` per evaluation.
fn depth_for(f: &AnalyticFunction, dense_depth: u32) -> u32 {
    if f.coefficient_stream().is_dense() {
        dense_depth
    } else {
        40
    }
}

/// `k` with `r = 1 − 2^{−k}`, when `r` lies on that grid.
fn dyadic_index(r: f64) -> Option<u32> {
    let k = -(1.0 - r).log2();
    let kr = k.round();
    ((1.0..=52.0).contains(&kr) && (1.0 - (-kr).exp2()) == r).then_some(kr as u32)
}

/// `∫_r^1 g(s) ds` for several `r`, sharing one dyadic decomposition.
fn integrals_to_one<G>(g: G, radii: &[f64], depth: u32, reaches_one: bool) -> Result<Vec<(f64, f64)>>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    let k_of = |r: f64| dyadic_index(r).unwrap_or_else(|| (-(1.0 - r).log2()).ceil().max(1.0) as u32);
    let k0 = radii.iter().map(|&r| k_of(r)).min().unwrap_or(1);
    let dyadic = DyadicIntegral::build(&g, k0, depth, reaches_one)?;
    radii
        .iter()
        .map(|&r| {
            let k = k_of(r);
            let (v, e) = dyadic.from(k);
            let start = 1.0 - (-f64::from(k)).exp2();
            if r < start {
                let head = adaptive_gk15(&g, r, start, 1e-15, 1e-12, 64)?;
                Ok((v + head.value, e + head.error))
            } else {
                Ok((v, e))
            }
        })
        .collect()
}

/// Empirical constants of the derivative bound `(1 − u)·‖F′_u‖ ≤ C‖F‖` and
/// the division bound `‖(g/z)_u‖_{A^p} ≤ C_p‖g‖_{A^p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub space: SpaceSpec,
    pub derivative_c: f64,
    /// Only meaningful for Bergman spaces.
    pub division_cp: f64,
    pub samples: usize,
}

impl Calibration {
    /// Suprema over monomials `z^n` (`n ≤ 32`), the default corpus members
    /// lying in `space`, and `Φ_{[s]}` for `s ∈ {1/2, 3/4, 7/8}`, on a grid of
    /// `u` values including `u = 0`.
    pub fn measure(space: &SpaceSpec, cfg: &QuadratureConfig) -> Result<Self> {
        space.validate()?;
        let mut us: Vec<f64> = (0..16).map(|j| j as f64 / 16.0).collect();
        us.extend((4..=10).map(|k| 1.0 - (-f64::from(k)).exp2()));

        let mut functions: Vec<AnalyticFunction> = (1..=32).map(AnalyticFunction::monomial).collect();
        for entry in default_corpus() {
            let f = entry.function;
            if f.is_zero() || space_norm(&f, space, cfg).is_err() {
                continue;
            }
            let aux = AuxiliaryFunctions::new(&f);
            for s in [0.5, 0.75, 0.875] {
                functions.push(aux.phi(s)?);
            }
            functions.push(f);
        }

        let derivative_c = functions
            .par_iter()
            .map(|f| -> Result<f64> {
                let norm = space_norm(f, space, cfg)?.value;
                if !(norm > 0.0) {
                    return Ok(0.0);
                }
                let fp = f.derivative();
                let mut best: f64 = 0.0;
                for &u in &us {
                    let m = mean_in_space(&fp, space, u, cfg)?.value;
                    best = best.max((1.0 - u) * m / norm);
                }
                Ok(best)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);

        let division_cp = if let SpaceSpec::Bergman { .. } = space {
            let mut quotients: Vec<AnalyticFunction> = (1..=32).map(AnalyticFunction::monomial).collect();
            for entry in default_corpus() {
                let f = entry.function;
                if f.is_zero() || space_norm(&f, space, cfg).is_err() {
                    continue;
                }
                for r in [0.5, 0.9] {
                    quotients.push(f.sub(&f.dilate(r)?));
                }
            }
            quotients
                .par_iter()
                .map(|g| -> Result<f64> {
                    let norm = space_norm(g, space, cfg)?.value;
                    if !(norm > 0.0) {
                        return Ok(0.0);
                    }
                    let q = g.divide_by_z()?;
                    let mut best: f64 = 0.0;
                    for &u in us.iter().chain(std::iter::once(&1.0)) {
                        let m = if u == 1.0 { space_norm(&q, space, cfg)? } else { mean_in_space(&q, space, u, cfg)? };
                        best = best.max(m.value / norm);
                    }
                    Ok(best)
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max)
        } else {
            f64::NAN
        };

        Ok(Self {
            space: *space,
            derivative_c,
            division_cp,
            samples: functions.len() * us.len(),
        })
    }
}

/// (E1) and (E2) in `H^p` at each radius.
pub fn check_hardy_inequalities(
    f: &AnalyticFunction,
    p: f64,
    radii: &[f64],
    calibration: &Calibration,
    cfg: &QuadratureConfig,
) -> Result<Vec<InequalityCheck>> {
    let space = SpaceSpec::Hardy { p };
    space.validate()?;
    for &r in radii {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!("r = {r} outside (0, 1)")));
        }
    }
    let fp = f.derivative();
    let norm = space_norm(f, &space, cfg)?;
    let polynomial = f.is_polynomial();

    let mean_fp = |s: f64| mean_in_space(&fp, &space, s, cfg).map(|m| m.value);
    let e1_integrals = integrals_to_one(mean_fp, radii, depth_for(f, 16), polynomial)?;
    let gap = |s: f64| dilation_gap(f, s, &space, cfg).map(|m| m.value);
    let gap_integrals = integrals_to_one(gap, radii, depth_for(f, 14), polynomial)?;

    let c = calibration.derivative_c;
    let mut out = Vec::with_capacity(2 * radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let lhs_gap = dilation_gap(f, r, &space, cfg)?;
        let (rhs1, err1) = e1_integrals[i];
        let gap_err = mean_error(lhs_gap.value, lhs_gap.converged, cfg);
        out.push(InequalityCheck::new(InequalityLabel::E1, r, lhs_gap.value, rhs1, err1 + gap_err));

        let m = mean_in_space(&fp, &space, r, cfg)?;
        let lhs = (1.0 - r) * m.value;
        let (int_gap, err_gap) = gap_integrals[i];
        let rhs = lhs_gap.value + c * norm.value * (1.0 - r) / (2.0 * r) + c / (1.0 - r) * int_gap;
        let err = (1.0 - r) * mean_error(m.value, m.converged, cfg) + gap_err + c / (1.0 - r) * err_gap;
        out.push(InequalityCheck::new(InequalityLabel::E2, r, lhs, rhs, err));
    }
    Ok(out)
}

/// (E1) at one radius.
pub fn check_e1(f: &AnalyticFunction, p: f64, r: f64, cfg: &QuadratureConfig) -> Result<InequalityCheck> {
    let cal = Calibration {
        space: SpaceSpec::Hardy { p },
        derivative_c: 1.0,
        division_cp: f64::NAN,
        samples: 0,
    };
    Ok(check_hardy_inequalities(f, p, &[r], &cal, cfg)?.remove(0))
}

/// (E2) at one radius with the given derivative-bound constant.
pub fn check_e2(f: &AnalyticFunction, p: f64, r: f64, calibration: &Calibration, cfg: &QuadratureConfig) -> Result<InequalityCheck> {
    Ok(check_hardy_inequalities(f, p, &[r], calibration, cfg)?.remove(1))
}

/// (Be1)–(Be4) at each radius, with `u = r`. (Be3) is checked for `F = f`
/// and `F = Φ_{[s]}` at `s = r` and `s = (1 + r)/2`.
pub fn check_bergman_chain(
    f: &AnalyticFunction,
    p: f64,
    radii: &[f64],
    calibration: &Calibration,
    cfg: &QuadratureConfig,
) -> Result<Vec<InequalityCheck>> {
    let space = SpaceSpec::Bergman { p };
    space.validate()?;
    for &r in radii {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!("r = {r} outside (0, 1)")));
        }
    }
    let aux = AuxiliaryFunctions::new(f);
    let fp = f.derivative();
    let norm = space_norm(f, &space, cfg)?;
    let gap = |s: f64| dilation_gap(f, s, &space, cfg).map(|m| m.value);
    let gap_integrals = integrals_to_one(gap, radii, depth_for(f, 14), f.is_polynomial())?;
    let c = calibration.derivative_c;
    let cp = calibration.division_cp;

    let per_radius = radii
        .par_iter()
        .enumerate()
        .map(|(i, &r)| -> Result<Vec<InequalityCheck>> {
            let mut out = Vec::new();
            let a_fp = mean_in_space(&fp, &space, r, cfg)?;
            let lhs = (1.0 - r) * a_fp.value;
            let lhs_err = (1.0 - r) * mean_error(a_fp.value, a_fp.converged, cfg);

            // (Be1): Ψ through the Minkowski bound ∫_r^1 A_p(r, Φ′_{[s]}) ds.
            let fr = aux.f_r(r)?;
            let a_fr = mean_in_space(&fr, &space, r, cfg)?;
            let psi_bound = adaptive_gk15(
                |s| {
                    let d = fp.sub(&fp.dilate(s)?);
                    mean_in_space(&d, &space, r, cfg).map(|m| m.value)
                },
                r,
                1.0,
                1e-14,
                1e-11,
                200,
            )?;
            let rhs = a_fr.value + psi_bound.value;
            let err = lhs_err + mean_error(a_fr.value, a_fr.converged, cfg) + psi_bound.error;
            out.push(InequalityCheck::new(InequalityLabel::Be1, r, lhs, rhs, err).at_u(r));

            // (Be2)
            let g = f.sub(&f.dilate(r)?);
            let g_norm = space_norm(&g, &space, cfg)?;
            let err = mean_error(a_fr.value, a_fr.converged, cfg) + cp * mean_error(g_norm.value, g_norm.converged, cfg);
            out.push(InequalityCheck::new(InequalityLabel::Be2, r, a_fr.value, cp * g_norm.value, err).at_u(r));

            // (Be3)
            let mut families: Vec<(Option<f64>, AnalyticFunction)> = vec![(None, f.clone())];
            for s in [r, 0.5 * (1.0 + r)] {
                families.push((Some(s), aux.phi(s)?));
            }
            for (s, big_f) in families {
                let a = mean_in_space(&big_f.derivative(), &space, r, cfg)?;
                let n = space_norm(&big_f, &space, cfg)?;
                let rhs = c * n.value / (1.0 - r);
                let err = mean_error(a.value, a.converged, cfg) + c * mean_error(n.value, n.converged, cfg) / (1.0 - r);
                let mut check = InequalityCheck::new(InequalityLabel::Be3, r, a.value, rhs, err).at_u(r);
                if let Some(s) = s {
                    check = check.at_s(s);
                }
                out.push(check);
            }

            // (Be4)
            let (int_gap, err_gap) = gap_integrals[i];
            let rhs = cp * g_norm.value + c * norm.value * (1.0 - r) / (2.0 * r) + c / (1.0 - r) * int_gap;
            let err = lhs_err + cp * mean_error(g_norm.value, g_norm.converged, cfg) + c / (1.0 - r) * err_gap;
            out.push(InequalityCheck::new(InequalityLabel::Be4, r, lhs, rhs, err).at_u(r));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_radius.into_iter().flatten().collect())
}

/// `f_w(z) = f(wz)` for `|w| ≤ 1`.
fn complex_dilate(f: &AnalyticFunction, w: Complex) -> Result<AnalyticFunction> {
    Ok(f.dilate(w.norm())?.rotate(w.arg()))
}

/// Both triangle-inequality bridges between `‖f_w − f‖_D` and
/// `‖(f′)_w − f′‖_{A²}`, from the exact coefficient norms.
pub fn dirichlet_bridge(f: &AnalyticFunction, w: Complex) -> Result<(InequalityCheck, InequalityCheck)> {
    if !(w.norm() <= 1.0) {
        return Err(Error::InvalidArgument(format!("|w| = {} exceeds 1", w.norm())));
    }
    if w.norm() == 0.0 {
        return Err(Error::ZeroDilationParameter);
    }
    let d = SpaceSpec::Dirichlet;
    let a2 = SpaceSpec::Bergman { p: 2.0 };
    let cfg = QuadratureConfig::default();
    let fp = f.derivative();
    let f_norm = space_norm(f, &d, &cfg)?.value;
    let gap_d = space_norm(&complex_dilate(f, w)?.sub(f), &d, &cfg)?.value;
    let gap_a = space_norm(&complex_dilate(&fp, w)?.sub(&fp), &a2, &cfg)?.value;
    let one_minus = (Complex::new(1.0, 0.0) - w).norm();
    let err = 1e-12 * (gap_d + gap_a + f_norm);
    let mut a = InequalityCheck::new(InequalityLabel::DirichletBridgeA, w.norm(), gap_d, one_minus * f_norm + gap_a, err);
    let mut b = InequalityCheck::new(InequalityLabel::DirichletBridgeB, w.norm(), gap_a, one_minus / w.norm() * f_norm + gap_d, err);
    a.w = Some([w.re, w.im]);
    b.w = Some([w.re, w.im]);
    Ok((a, b))
}

/// `‖f_r − f‖_p / ω_p(1 − r, f)` along a grid of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorozhenkoSummary {
    /// `(r, gap, modulus, ratio)`.
    pub points: Vec<[f64; 4]>,
    pub max_over_min: f64,
}

/// Storozhenko ratios. All moduli come from one table of rotation gaps on the
/// nested modulus grid of the largest `δ = 1 − r`.
pub fn storozhenko_ratio(f: &AnalyticFunction, p: f64, radii: &[f64], cfg: &QuadratureConfig) -> Result<StorozhenkoSummary> {
    let space = SpaceSpec::Hardy { p };
    space.validate()?;
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no radii".into()));
    }
    let delta_max = radii.iter().map(|r| 1.0 - r).fold(0.0, f64::max);
    let ts = modulus_grid(delta_max.min(std::f64::consts::PI), STOROZHENKO_GRID);
    let gaps = ts
        .par_iter()
        .map(|&t| rotation_gap(f, t, &space, cfg).map(|g| (t, g.value)))
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::with_capacity(radii.len());
    for &r in radii {
        let delta = 1.0 - r;
        let modulus = gaps
            .iter()
            .filter(|(t, _)| *t <= delta * (1.0 + 1e-12))
            .map(|g| g.1)
            .fold(0.0, f64::max);
        if modulus == 0.0 {
            return Err(Error::ZeroModulus);
        }
        let gap = dilation_gap(f, r, &space, cfg)?.value;
        points.push([r, gap, modulus, gap / modulus]);
    }
    let max = points.iter().map(|p| p[3]).fold(f64::NEG_INFINITY, f64::max);
    let min = points.iter().map(|p| p[3]).fold(f64::INFINITY, f64::min);
    Ok(StorozhenkoSummary {
        points,
        max_over_min: max / min,
    })
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSummary {
    pub weight: String,
    pub classification: WeightClassification,
    /// `max V/ω(x)` and boundedness for (a) and (c), `max V·x/ω(x)` for (b).
    pub constant_a: f64,
    pub bounded_a: bool,
    pub constant_b: f64,
    pub bounded_b: bool,
    pub constant_c: f64,
    pub bounded_c: bool,
}

impl WeightedSummary {
    pub fn all_bounded(&self) -> bool {
        self.bounded_a && self.bounded_b && self.bounded_c
    }
}

/// Identity, inequality and two-sidedness checks attached to a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub identities: Vec<IdentityCheck>,
    pub inequalities: Vec<InequalityCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub storozhenko: Option<StorozhenkoSummary>,
    pub notes: Vec<String>,
}

impl CheckSummary {
    pub fn passed(&self) -> bool {
        self.identities.iter().all(|c| c.passed) && self.inequalities.iter().all(|c| c.passed)
    }

    /// Labels of the failing checks.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .identities
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{:?}", c.label))
            .collect();
        out.extend(self.inequalities.iter().filter(|c| !c.passed).map(|c| format!("{:?}@r={}", c.label, c.r)));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub function: String,
    pub space: SpaceSpec,
    pub alpha_target: Option<f64>,
    pub grid: [u32; 2],
    pub fit_a: ExponentFit,
    pub fit_b: ExponentFit,
    pub fit_c: ExponentFit,
    pub agreement: bool,
    pub max_pairwise_difference: f64,
    /// Every fit within the tolerance of `alpha_target`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_agreement: Option<bool>,
    /// All three profiles vanish identically.
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted: Option<WeightedSummary>,
    pub details: CheckSummary,
    #[serde(skip)]
    pub profiles: Vec<(Condition, MeanProfile)>,
}

/// Profiles and fits of conditions (a), (b), (c) for `f` in `space` on the
/// grid `k_min..=k_max`.
///
/// With a weight, `space` must be a Hardy space and the weight admissible;
/// the profiles are then compared to `ω(x)` (and `ω(x)/x` for (b)) instead of
/// powers.
pub fn equivalence_report(
    f: &AnalyticFunction,
    id: &str,
    space: &SpaceSpec,
    alpha_target: Option<f64>,
    weight: Option<&Weight>,
    grid: (u32, u32),
    cfg: &QuadratureConfig,
) -> Result<EquivalenceReport> {
    space.validate()?;
    cfg.validate()?;
    let classification = match weight {
        Some(w) => {
            if !matches!(space, SpaceSpec::Hardy { .. }) {
                return Err(Error::Hypothesis(format!(
                    "weighted comparison is defined for Hardy spaces, not {}",
                    space.label()
                )));
            }
            let c = classify_weight(w)?;
            if !c.admissible {
                return Err(Error::Hypothesis(format!(
                    "weight {} is not admissible (dini: {}, condition b: {})",
                    w.label(),
                    c.dini,
                    c.condition_b
                )));
            }
            Some(c)
        }
        None => None,
    };
    match space_norm(f, space, cfg) {
        Ok(_) => {}
        Err(Error::DivergentNorm(_)) => return Err(Error::NotInSpace(space.label())),
        Err(e) => return Err(e),
    }

    let (k_min, k_max) = grid;
    let pa = condition_profile(f, space, Condition::A, k_min, k_max, cfg)?;
    let pb = condition_profile(f, space, Condition::B, k_min, k_max, cfg)?;
    let pc = condition_profile(f, space, Condition::C, k_min, k_max, cfg)?;
    let fit_a = fit_exponent(&pa, Condition::A.offset())?;
    let fit_b = fit_exponent(&pb, Condition::B.offset())?;
    let fit_c = fit_exponent(&pc, Condition::C.offset())?;

    let alphas = [fit_a.alpha_hat, fit_b.alpha_hat, fit_c.alpha_hat];
    let degenerate = alphas.iter().all(|a| a.is_infinite());
    let max_pairwise_difference = if degenerate {
        0.0
    } else {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in i + 1..3 {
                let diff = (alphas[i] - alphas[j]).abs();
                d = d.max(if diff.is_nan() { f64::INFINITY } else { diff });
            }
        }
        d
    };
    let target_agreement = alpha_target.map(|a| alphas.iter().all(|x| (x - a).abs() <= AGREEMENT_TOL));

    let weighted = match (weight, classification) {
        (Some(w), Some(classification)) => {
            let om = |x: f64| eval_weight(w, x).unwrap_or(f64::NAN);
            let (constant_a, bounded_a) = big_o_against(&pa, om)?;
            let (constant_b, bounded_b) = big_o_against(&pb, |x| om(x) / x)?;
            let (constant_c, bounded_c) = big_o_against(&pc, om)?;
            Some(WeightedSummary {
                weight: w.label(),
                classification,
                constant_a,
                bounded_a,
                constant_b,
                bounded_b,
                constant_c,
                bounded_c,
            })
        }
        _ => None,
    };

    let mut details = CheckSummary::default();
    if degenerate {
        details.notes.push("all three profiles vanish; exponents are undefined".into());
    }
    Ok(EquivalenceReport {
        function: id.to_string(),
        space: *space,
        alpha_target,
        grid: [k_min, k_max],
        fit_a,
        fit_b,
        fit_c,
        agreement: max_pairwise_difference <= AGREEMENT_TOL,
        max_pairwise_difference,
        target_agreement,
        degenerate,
        weighted,
        details,
        profiles: vec![(Condition::A, pa), (Condition::B, pb), (Condition::C, pc)],
    })
}

/// Sample points for the identity checks, kept inside the evaluation radius.
fn identity_points(f: &AnalyticFunction) -> Vec<Complex> {
    let limit = (0.95 * f.r_max()).min(0.9);
    [
        Complex::new(0.3, 0.4),
        Complex::new(0.0, 0.6),
        Complex::new(-0.7, 0.1),
        Complex::from_polar(0.9, 2.0),
        Complex::new(0.0, 0.0),
    ]
    .into_iter()
    .map(|z| if z.norm() > limit { z * (limit / z.norm()) } else { z })
    .collect()
}

/// Runs the identity checks and the inequalities relevant to `space` on the
/// given radii.
pub fn run_checks(
    f: &AnalyticFunction,
    space: &SpaceSpec,
    radii: &[f64],
    calibration: Option<&Calibration>,
    cfg: &QuadratureConfig,
) -> Result<CheckSummary> {
    let mut summary = CheckSummary::default();
    for z in identity_points(f) {
        let z = DiscPoint::new(z)?;
        for &r in radii.iter().step_by(3) {
            summary.identities.push(check_identity_ef1(f, z, r, 128)?);
            if z.z().norm() > 0.0 {
                summary.identities.push(check_identity_ef2(f, z, r, 128)?);
            }
        }
    }
    let owned;
    let calibration = match calibration {
        Some(c) => c,
        None => {
            owned = Calibration::measure(space, cfg)?;
            &owned
        }
    };
    match space {
        SpaceSpec::Hardy { p } => {
            summary.inequalities.extend(check_hardy_inequalities(f, *p, radii, calibration, cfg)?);
            let stor_radii: Vec<f64> = radii.iter().copied().filter(|&r| 1.0 - r <= 1.0 / 16.0 + 1e-15).collect();
            if stor_radii.len() >= 2 {
                match storozhenko_ratio(f, *p, &stor_radii, cfg) {
                    Ok(s) => summary.storozhenko = Some(s),
                    Err(Error::ZeroModulus) => summary.notes.push("modulus of continuity vanishes (constant function)".into()),
                    Err(e) => return Err(e),
                }
            }
        }
        SpaceSpec::Bergman { p } => {
            summary.inequalities.extend(check_bergman_chain(f, *p, radii, calibration, cfg)?);
        }
        SpaceSpec::Dirichlet => {
            for &r in radii {
                let (a, b) = dirichlet_bridge(f, Complex::new(r, 0.0))?;
                summary.inequalities.push(a);
                summary.inequalities.push(b);
                let (a, b) = dirichlet_bridge(f, Complex::from_polar(1.0, 1.0 - r))?;
                summary.inequalities.push(a);
                summary.inequalities.push(b);
            }
        }
        SpaceSpec::DiscAlgebra => {
            summary.notes.push("no inequality checks are defined for the sup norm".into());
        }
    }
    Ok(summary)
}
