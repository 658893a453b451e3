//! Integral means, space norms and gap norms.
//!
//! `M_p(r, f)` uses the periodic trapezoid rule with sample doubling, falling
//! back to adaptive Gauss–Kronrod in θ when doubling stalls (non-smooth
//! `|f|^p` near zeros). `A_p(r, f)` integrates `M_p^p(u, f)·u` radially with
//! refined Gauss–Legendre panels. For the `p = 2` spaces the norms also have
//! exact coefficient formulas, evaluated with a geometric tail estimate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticFunction, Complex};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk15, GaussLegendre};

/// Values beyond this are treated as a divergent norm.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Deepest radius `1 − 2^{−k}` visited when a norm is taken as a limit.
const LIMIT_MAX_K: i32 = 20;

/// Which norm `‖·‖_X` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpaceSpec {
    Hardy { p: f64 },
    Bergman { p: f64 },
    Dirichlet,
    DiscAlgebra,
}

impl SpaceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::Hardy { p } | SpaceSpec::Bergman { p } => {
                if *p >= 1.0 && p.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!("exponent p = {p} must satisfy 1 <= p < inf")))
                }
            }
            _ => Ok(()),
        }
    }

    /// The integrability exponent; `2` for the Dirichlet space, `∞` for the
    /// disc algebra.
    pub fn p(&self) -> f64 {
        match self {
            SpaceSpec::Hardy { p } | SpaceSpec::Bergman { p } => *p,
            SpaceSpec::Dirichlet => 2.0,
            SpaceSpec::DiscAlgebra => f64::INFINITY,
        }
    }

    /// Hilbert-space members with an exact coefficient norm.
    pub fn has_coefficient_norm(&self) -> bool {
        match self {
            SpaceSpec::Hardy { p } | SpaceSpec::Bergman { p } => *p == 2.0,
            SpaceSpec::Dirichlet => true,
            SpaceSpec::DiscAlgebra => false,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SpaceSpec::Hardy { p } => format!("H^{p}"),
            SpaceSpec::Bergman { p } => format!("A^{p}"),
            SpaceSpec::Dirichlet => "D".to_string(),
            SpaceSpec::DiscAlgebra => "disc algebra".to_string(),
        }
    }
}

/// Sampling and tolerance settings shared by all means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub initial_samples: usize,
    pub max_samples: usize,
    pub rel_tol: f64,
    pub radial_nodes: usize,
    /// Use the exact coefficient formulas for `H^2`, `A^2` and `D` norms and
    /// means instead of quadrature.
    pub exact_p2: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            initial_samples: 256,
            max_samples: 1 << 20,
            rel_tol: 1e-9,
            radial_nodes: 128,
            exact_p2: true,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let pow2 = |n: usize| n > 0 && n.is_power_of_two();
        if !pow2(self.initial_samples) || !pow2(self.max_samples) {
            return Err(Error::InvalidArgument("sample counts must be powers of two".into()));
        }
        if self.initial_samples > self.max_samples {
            return Err(Error::InvalidArgument("initial_samples exceeds max_samples".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument("rel_tol must be positive".into()));
        }
        if self.radial_nodes == 0 {
            return Err(Error::InvalidArgument("radial_nodes must be positive".into()));
        }
        Ok(())
    }

    /// Quadrature-only variant (no coefficient shortcuts).
    pub fn quadrature_only(mut self) -> Self {
        self.exact_p2 = false;
        self
    }
}

/// A computed mean or norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    pub value: f64,
    pub samples_used: u64,
    pub converged: bool,
}

impl MeanValue {
    pub fn exact(value: f64, samples_used: u64) -> Self {
        Self {
            value,
            samples_used,
            converged: true,
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exponent p = {p} must satisfy 1 <= p < inf")))
    }
}

fn power_mean(samples: &[Complex], p: f64) -> f64 {
    let n = samples.len() as f64;
    let s: f64 = if p == 2.0 {
        samples.iter().map(|v| v.norm_sqr()).sum()
    } else {
        samples.iter().map(|v| v.norm().powf(p)).sum()
    };
    s / n
}

fn is_even_integer(p: f64) -> bool {
    p.fract() == 0.0 && (p as i64) % 2 == 0
}

/// `M_p(r, f) = ((1/2π) ∫ |f(re^{iθ})|^p dθ)^{1/p}`.
pub fn hardy_mean(f: &AnalyticFunction, p: f64, r: f64, cfg: &QuadratureConfig) -> Result<MeanValue> {
    check_p(p)?;
    cfg.validate()?;
    if r == 0.0 {
        return Ok(MeanValue::exact(f.value_at_zero().norm(), 1));
    }
    let mut n = cfg.initial_samples;
    let mut used = 0u64;
    let mut previous: Option<f64> = None;
    let mut previous_delta: Option<f64> = None;
    loop {
        let samples = f.sample_circle(r, n)?;
        used += n as u64;
        let value = power_mean(&samples, p).powf(1.0 / p);
        if let Some(prev) = previous {
            let delta = (value - prev).abs();
            if delta <= cfg.rel_tol * value || (value == 0.0 && prev == 0.0) {
                return Ok(MeanValue {
                    value,
                    samples_used: used,
                    converged: true,
                });
            }
            // Algebraic rather than spectral convergence: |f|^p has kinks.
            let stalled = !is_even_integer(p)
                && n >= 4096
                && previous_delta.is_some_and(|d| delta > 0.3 * d);
            if stalled {
                return adaptive_hardy_mean(f, p, r, cfg, used);
            }
            previous_delta = Some(delta);
        }
        if n >= cfg.max_samples {
            if !is_even_integer(p) {
                return adaptive_hardy_mean(f, p, r, cfg, used);
            }
            return Ok(MeanValue {
                value,
                samples_used: used,
                converged: false,
            });
        }
        previous = Some(value);
        n *= 2;
    }
}

fn adaptive_hardy_mean(
    f: &AnalyticFunction,
    p: f64,
    r: f64,
    cfg: &QuadratureConfig,
    already_used: u64,
) -> Result<MeanValue> {
    let res = adaptive_gk15(
        |theta| f.eval_polar(r, theta).map(|v| v.norm().powf(p)),
        -PI,
        PI,
        1e-300,
        0.1 * cfg.rel_tol,
        20_000,
    )?;
    Ok(MeanValue {
        value: (res.value / (2.0 * PI)).max(0.0).powf(1.0 / p),
        samples_used: already_used + res.evaluations as u64,
        converged: res.converged,
    })
}

/// `M_∞(r, f) = max_θ |f(re^{iθ})|`.
pub fn sup_mean(f: &AnalyticFunction, r: f64, cfg: &QuadratureConfig) -> Result<MeanValue> {
    cfg.validate()?;
    if r == 0.0 {
        return Ok(MeanValue::exact(f.value_at_zero().norm(), 1));
    }
    let mut n = cfg.initial_samples;
    let mut used = 0u64;
    let mut previous: Option<f64> = None;
    loop {
        let samples = f.sample_circle(r, n)?;
        used += n as u64;
        let (k, grid_max) = samples
            .iter()
            .enumerate()
            .map(|(k, v)| (k, v.norm()))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let h = 2.0 * PI / n as f64;
        let center = k as f64 * h;
        let (polished, evals) = golden_section_max(|t| f.eval_polar(r, t).map(|v| v.norm()), center - h, center + h)?;
        used += evals;
        let value = grid_max.max(polished);
        if let Some(prev) = previous {
            if (value - prev).abs() <= cfg.rel_tol * value || (value == 0.0 && prev == 0.0) {
                return Ok(MeanValue {
                    value,
                    samples_used: used,
                    converged: true,
                });
            }
        }
        if n >= cfg.max_samples {
            return Ok(MeanValue {
                value,
                samples_used: used,
                converged: false,
            });
        }
        previous = Some(value);
        n *= 2;
    }
}

fn golden_section_max<F>(mut g: F, mut a: f64, mut b: f64) -> Result<(f64, u64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c)?;
    let mut gd = g(d)?;
    let mut evals = 2;
    let width = b - a;
    while (b - a) > 1e-13 * width.max(1e-300) && evals < 200 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d)?;
        }
        evals += 1;
    }
    Ok((gc.max(gd), evals))
}

/// `A_p(r, f) = ((2/r²) ∫_0^r M_p^p(u, f) u du)^{1/p}`.
pub fn area_mean(f: &AnalyticFunction, p: f64, r: f64, cfg: &QuadratureConfig) -> Result<MeanValue> {
    check_p(p)?;
    cfg.validate()?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidArgument(format!("area mean radius {r} outside (0, 1]")));
    }
    let rule = GaussLegendre::cached(cfg.radial_nodes);
    let mut state = RadialState {
        f,
        p,
        cfg,
        rule: &rule,
        used: 0,
        all_converged: true,
    };
    let whole = state.panel(0.0, r)?;
    let tol = cfg.rel_tol * whole.abs();
    let (integral, refined) = state.refine(0.0, r, whole, tol, 0)?;
    let value = (2.0 / (r * r) * integral).max(0.0).powf(1.0 / p);
    Ok(MeanValue {
        value,
        samples_used: state.used,
        converged: refined && state.all_converged,
    })
}

struct RadialState<'a> {
    f: &'a AnalyticFunction,
    p: f64,
    cfg: &'a QuadratureConfig,
    rule: &'a GaussLegendre,
    used: u64,
    all_converged: bool,
}

impl RadialState<'_> {
    fn panel(&mut self, a: f64, b: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (u, w) in self.rule.mapped(a, b) {
            let m = hardy_mean(self.f, self.p, u, self.cfg)?;
            self.used += m.samples_used;
            self.all_converged &= m.converged;
            acc += w * m.value.powf(self.p) * u;
        }
        Ok(acc)
    }

    fn refine(&mut self, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Result<(f64, bool)> {
        let mid = 0.5 * (a + b);
        let left = self.panel(a, mid)?;
        let right = self.panel(mid, b)?;
        let split = left + right;
        if (split - whole).abs() <= tol {
            return Ok((split, true));
        }
        if depth >= 10 {
            return Ok((split, false));
        }
        let (l, lc) = self.refine(a, mid, left, 0.5 * tol, depth + 1)?;
        let (r, rc) = self.refine(mid, b, right, 0.5 * tol, depth + 1)?;
        Ok((l + r, lc && rc))
    }
}

/// `D(r, f) = ‖f_r‖_D = (|f(0)|² + ‖(f_r)'‖²_{A²})^{1/2}`.
pub fn dirichlet_mean(f: &AnalyticFunction, r: f64, cfg: &QuadratureConfig) -> Result<MeanValue> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!("radius {r} outside [0, 1]")));
    }
    if cfg.exact_p2 || r == 0.0 {
        let (v, terms) = coefficient_norm_with_count(&f.dilate(r)?, &SpaceSpec::Dirichlet)?;
        return Ok(MeanValue::exact(v, terms));
    }
    // (f_r)'(z) = r f'(rz), so ‖(f_r)'‖_{A²} = r A_2(r, f').
    let a = area_mean(&f.derivative(), 2.0, r, cfg)?;
    let value = (f.value_at_zero().norm_sqr() + (r * a.value).powi(2)).sqrt();
    Ok(MeanValue {
        value,
        samples_used: a.samples_used,
        converged: a.converged,
    })
}

/// `‖f_r‖_X`: the integral mean of `f` at radius `r` in the geometry of `X`.
pub fn mean_in_space(f: &AnalyticFunction, space: &SpaceSpec, r: f64, cfg: &QuadratureConfig) -> Result<MeanValue> {
    space.validate()?;
    if cfg.exact_p2 && space.has_coefficient_norm() {
        let (v, terms) = coefficient_norm_with_count(&f.dilate(r)?, space)?;
        return Ok(MeanValue::exact(v, terms));
    }
    match space {
        SpaceSpec::Hardy { p } => hardy_mean(f, *p, r, cfg),
        SpaceSpec::Bergman { p } => {
            if r == 0.0 {
                Ok(MeanValue::exact(f.value_at_zero().norm(), 1))
            } else {
                area_mean(f, *p, r, cfg)
            }
        }
        SpaceSpec::Dirichlet => dirichlet_mean(f, r, cfg),
        SpaceSpec::DiscAlgebra => sup_mean(f, r, cfg),
    }
}

/// `‖f‖_X`.
pub fn space_norm(f: &AnalyticFunction, space: &SpaceSpec, cfg: &QuadratureConfig) -> Result<MeanValue> {
    space.validate()?;
    cfg.validate()?;
    if f.is_zero() {
        return Ok(MeanValue::exact(0.0, 0));
    }
    if cfg.exact_p2 && matches!(space, SpaceSpec::Hardy { p } if *p == 2.0) && f.coefficient_stream().is_dense() {
        if let Some(singular) = f.boundary_singularities() {
            return boundary_l2_norm(f, &singular);
        }
    }
    if matches!(space, SpaceSpec::Dirichlet) || (cfg.exact_p2 && space.has_coefficient_norm()) {
        let (v, terms) = coefficient_norm_with_count(f, space)?;
        return Ok(MeanValue::exact(v, terms));
    }
    if matches!(space, SpaceSpec::DiscAlgebra) {
        if let Some(v) = aligned_sup_norm(f)? {
            return Ok(v);
        }
    }
    let boundary_ok = f.r_max() >= 1.0;
    let result = match space {
        SpaceSpec::Hardy { p } if boundary_ok => hardy_mean(f, *p, 1.0, cfg)?,
        SpaceSpec::Hardy { p } => increasing_limit(|rho| hardy_mean(f, *p, rho, cfg), cfg)?,
        SpaceSpec::Bergman { p } if boundary_ok => area_mean(f, *p, 1.0, cfg)?,
        SpaceSpec::Bergman { p } => increasing_limit(|rho| area_mean(f, *p, rho, cfg), cfg)?,
        SpaceSpec::DiscAlgebra if boundary_ok => sup_mean(f, 1.0, cfg)?,
        SpaceSpec::DiscAlgebra => increasing_limit(|rho| sup_mean(f, rho, cfg), cfg)?,
        SpaceSpec::Dirichlet => unreachable!("handled above"),
    };
    if !(result.value <= DIVERGENCE_THRESHOLD) {
        return Err(Error::DivergentNorm(format!(
            "{} norm exceeds {DIVERGENCE_THRESHOLD:e}",
            space.label()
        )));
    }
    Ok(result)
}

/// `‖f‖_∞ = Σ|a_n|` when the coefficients of a sparse series all share one
/// phase, the supremum then being attained at `z = 1`.
fn aligned_sup_norm(f: &AnalyticFunction) -> Result<Option<MeanValue>> {
    let stream = f.coefficient_stream();
    if stream.is_dense() {
        return Ok(None);
    }
    let mut phase: Option<Complex> = None;
    let mut total = 0.0;
    let mut terms = 0u64;
    for (_, a) in stream {
        let m = a.norm();
        if m == 0.0 {
            continue;
        }
        let unit = a / m;
        match phase {
            None => phase = Some(unit),
            Some(u) if (unit - u).norm() <= 1e-12 => {}
            Some(_) => return Ok(None),
        }
        total += m;
        terms += 1;
    }
    if !(total <= DIVERGENCE_THRESHOLD) {
        return Err(Error::DivergentNorm("sum of coefficient moduli diverges".into()));
    }
    Ok(Some(MeanValue::exact(total, terms)))
}

/// `‖f‖_{H²}` from boundary values of a closed form, integrating `|f|²`
/// panel by panel between its boundary singularities. Dense coefficient
/// sums converge too slowly when the singularity is weak.
fn boundary_l2_norm(f: &AnalyticFunction, singular: &[f64]) -> Result<MeanValue> {
    let mut cuts: Vec<f64> = singular.to_vec();
    if cuts.is_empty() {
        cuts.push(-PI);
    }
    let mut total = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0u64;
    let mut converged = true;
    for (i, &a) in cuts.iter().enumerate() {
        let b = cuts.get(i + 1).copied().unwrap_or(cuts[0] + 2.0 * PI);
        if b <= a {
            continue;
        }
        let panel = adaptive_gk15(|theta| f.eval_boundary(theta).map(|v| v.norm_sqr()), a, b, 1e-300, 1e-10, 4_000)?;
        total += panel.value;
        error += panel.error;
        evaluations += panel.evaluations as u64;
        converged &= panel.converged;
    }
    let value = (total / (2.0 * PI)).sqrt();
    if !value.is_finite() || value > DIVERGENCE_THRESHOLD {
        return Err(Error::DivergentNorm("H2 boundary integral".into()));
    }
    Ok(MeanValue {
        value,
        samples_used: evaluations,
        converged: converged && error <= 1e-9 * total.max(f64::MIN_POSITIVE),
    })
}

/// Limit of an increasing family of means along `ρ_k = 1 − 2^{−k}`.
///
/// Stops when consecutive values agree to `rel_tol`. Otherwise the last three
/// values are Aitken-extrapolated and the result is flagged unconverged.
fn increasing_limit<F>(mut mean_at: F, cfg: &QuadratureConfig) -> Result<MeanValue>
where
    F: FnMut(f64) -> Result<MeanValue>,
{
    let mut values: Vec<f64> = Vec::new();
    let mut used = 0u64;
    for k in 1..=LIMIT_MAX_K {
        let rho = 1.0 - (-f64::from(k)).exp2();
        let m = mean_at(rho)?;
        used += m.samples_used;
        if !(m.value <= DIVERGENCE_THRESHOLD) {
            return Err(Error::DivergentNorm(format!(
                "mean at r = {rho} is {:e}",
                m.value
            )));
        }
        values.push(m.value);
        let n = values.len();
        if n >= 3 {
            let delta = (values[n - 1] - values[n - 2]).abs();
            if delta <= cfg.rel_tol * values[n - 1] {
                return Ok(MeanValue {
                    value: values[n - 1],
                    samples_used: used,
                    converged: m.converged,
                });
            }
        }
        // Increments can grow for a while before the limit sets in, so only
        // judge divergence at the deepest radius.
        if k == LIMIT_MAX_K {
            let inc: Vec<f64> = values[n - 7..].windows(2).map(|w| w[1] - w[0]).collect();
            let growing = inc.windows(2).all(|w| w[0] > 0.0 && w[1] >= 0.97 * w[0]);
            if growing {
                return Err(Error::DivergentNorm(
                    "increments of the increasing limit do not shrink".into(),
                ));
            }
        }
        if !m.converged {
            break;
        }
    }
    let n = values.len();
    let last = values[n - 1];
    let value = if n >= 3 {
        let d1 = values[n - 2] - values[n - 3];
        let d2 = last - values[n - 2];
        let q = d2 / d1;
        if d1 != 0.0 && q > 0.0 && q < 0.97 {
            last + d2 * q / (1.0 - q)
        } else {
            last
        }
    } else {
        last
    };
    Ok(MeanValue {
        value,
        samples_used: used,
        converged: false,
    })
}

/// `‖f − f_r‖_X`.
pub fn dilation_gap(f: &AnalyticFunction, r: f64, space: &SpaceSpec, cfg: &QuadratureConfig) -> Result<MeanValue> {
    if !(0.0..1.0).contains(&r) && r != 1.0 {
        return Err(Error::InvalidArgument(format!("dilation radius {r} outside [0, 1)")));
    }
    space_norm(&f.sub(&f.dilate(r)?), space, cfg)
}

/// `‖r_t(f) − f‖_X`.
pub fn rotation_gap(f: &AnalyticFunction, t: f64, space: &SpaceSpec, cfg: &QuadratureConfig) -> Result<MeanValue> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("rotation angle {t} is not finite")));
    }
    space_norm(&f.rotate(t).sub(f), space, cfg)
}

/// Angles at which [`modulus_of_continuity`] samples the rotation gap for
/// `δ`: `grid_size/2` points per halving of `δ` down to [`MODULUS_FLOOR`],
/// plus `δ` itself. Grids for `δ` and `δ/2` are nested.
pub fn modulus_grid(delta: f64, grid_size: usize) -> Vec<f64> {
    let per_octave = (grid_size / 2).max(1);
    let mut out = Vec::new();
    let mut top = delta;
    while top >= MODULUS_FLOOR {
        for i in 0..per_octave {
            // Points in (top/2, top].
            out.push(top * (1.0 - i as f64 / (2 * per_octave) as f64));
        }
        top *= 0.5;
    }
    if out.is_empty() {
        out.push(delta);
    }
    out
}

/// Smallest angle visited by [`modulus_grid`].
pub const MODULUS_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;

/// `ω_p(δ, f) = sup_{0<t≤δ} ‖r_t(f) − f‖_p`, the supremum taken over
/// [`modulus_grid`].
pub fn modulus_of_continuity(
    f: &AnalyticFunction,
    delta: f64,
    p: f64,
    grid_size: usize,
    cfg: &QuadratureConfig,
) -> Result<MeanValue> {
    check_p(p)?;
    if !(delta > 0.0 && delta <= PI) {
        return Err(Error::InvalidArgument(format!("delta = {delta} outside (0, pi]")));
    }
    if grid_size == 0 {
        return Err(Error::InvalidArgument("grid_size must be positive".into()));
    }
    let space = SpaceSpec::Hardy { p };
    let mut best = MeanValue::exact(0.0, 0);
    let mut used = 0u64;
    let mut converged = true;
    for t in modulus_grid(delta, grid_size) {
        let g = rotation_gap(f, t, &space, cfg)?;
        used += g.samples_used;
        converged &= g.converged;
        if g.value > best.value {
            best = g;
        }
    }
    Ok(MeanValue {
        value: best.value,
        samples_used: used,
        converged,
    })
}

/// Exact `p = 2` norms from the Taylor coefficients:
/// `H²: (Σ|a_n|²)^{1/2}`, `A²: (Σ|a_n|²/(n+1))^{1/2}`,
/// `D: (|a_0|² + Σ n|a_n|²)^{1/2}`.
pub fn coefficient_norm_oracle(f: &AnalyticFunction, space: &SpaceSpec) -> Result<f64> {
    coefficient_norm_with_count(f, space).map(|x| x.0)
}

fn coefficient_norm_with_count(f: &AnalyticFunction, space: &SpaceSpec) -> Result<(f64, u64)> {
    let (sum, terms) = match space {
        SpaceSpec::Hardy { p } if *p == 2.0 => weighted_square_sum(f, |_| 1.0)?,
        SpaceSpec::Bergman { p } if *p == 2.0 => weighted_square_sum(f, |n| 1.0 / (n as f64 + 1.0))?,
        SpaceSpec::Dirichlet => weighted_square_sum(f, |n| if n == 0 { 1.0 } else { n as f64 })?,
        other => return Err(Error::UnsupportedSpace(other.label())),
    };
    Ok((sum.sqrt(), terms))
}

/// `Σ w(n)|a_n|²` over the whole Taylor series.
///
/// Contributions are grouped into octaves `n+1 ∈ [2^j, 2^{j+1})`. For
/// power-law and lacunary coefficients the octave sums are asymptotically
/// geometric, so once their ratio settles the tail is added in closed form.
/// A ratio that stays near or above one at the last octave means divergence.
pub fn weighted_square_sum<W: Fn(u64) -> f64>(f: &AnalyticFunction, weight: W) -> Result<(f64, u64)> {
    let stream = f.coefficient_stream();
    let finite = stream.is_finite();
    let octave_cap: u32 = if stream.is_dense() { 24 } else { 62 };
    let mut blocks: Vec<f64> = Vec::new();
    let mut current = 0.0;
    let mut current_octave = 0u32;
    let mut total = 0.0;
    let mut terms = 0u64;
    for (n, a) in stream {
        let octave = 63 - (n + 1).leading_zeros();
        while octave > current_octave {
            blocks.push(current);
            total += current;
            current = 0.0;
            current_octave += 1;
            if let Some(done) = octave_verdict(&blocks, total, octave_cap)? {
                return Ok((done, terms));
            }
        }
        current += weight(n) * a.norm_sqr();
        terms += 1;
    }
    blocks.push(current);
    total += current;
    if finite {
        return Ok((total, terms));
    }
    // Sparse stream ran to its last dyadic index.
    Ok((sparse_tail_verdict(&blocks, total)?, terms))
}

/// End of a sparse stream. Single octave ratios of lacunary gaps oscillate
/// (`|e^{i2^n t} − 1|` is erratic in `n`), so compare windows of octaves.
fn sparse_tail_verdict(blocks: &[f64], total: f64) -> Result<f64> {
    const WINDOW: usize = 8;
    if !total.is_finite() || total > DIVERGENCE_THRESHOLD * DIVERGENCE_THRESHOLD {
        return Err(Error::DivergentNorm(format!("coefficient sum exceeds {:e}", DIVERGENCE_THRESHOLD.powi(2))));
    }
    if blocks.len() < 2 * WINDOW || total == 0.0 {
        return Ok(total);
    }
    let n = blocks.len();
    let last: f64 = blocks[n - WINDOW..].iter().sum();
    let prev: f64 = blocks[n - 2 * WINDOW..n - WINDOW].iter().sum();
    // Below the norm tolerance; the stream itself stops at 2^62.
    if last <= 1e-10 * total {
        return Ok(total);
    }
    let q = last / prev;
    if q < 0.9 {
        Ok(total + last * q / (1.0 - q))
    } else if last <= 1e-6 * total {
        // Erratic phases, but nothing left that could move the sum.
        Ok(total)
    } else {
        Err(Error::DivergentNorm(format!("coefficient octave sums stop decaying (ratio {q:.3})")))
    }
}

fn octave_verdict(blocks: &[f64], total: f64, cap: u32) -> Result<Option<f64>> {
    if !total.is_finite() || total > DIVERGENCE_THRESHOLD * DIVERGENCE_THRESHOLD {
        return Err(Error::DivergentNorm(format!("coefficient sum exceeds {:e}", DIVERGENCE_THRESHOLD.powi(2))));
    }
    let j = blocks.len() - 1;
    if total > 0.0 && j >= 4 && blocks[j] <= 1e-17 * total && blocks[j - 1] <= 1e-17 * total {
        return Ok(Some(total));
    }
    let at_cap = j as u32 >= cap;
    if j < 6 || blocks[j - 4..=j].iter().any(|&b| b <= 0.0) {
        if at_cap {
            return Ok(Some(total));
        }
        return Ok(None);
    }
    let rho = blocks[j] / blocks[j - 1];
    if !(blocks[j - 3..=j].windows(2).all(|w| w[1] / w[0] < 0.97)) {
        if at_cap {
            return Err(Error::DivergentNorm(format!(
                "coefficient octave sums stop decaying (ratio {rho:.3})"
            )));
        }
        return Ok(None);
    }
    // First-order (Aitken) limits from the last three octaves, then a
    // second Aitken pass over those to remove the drift of the ratio.
    let partial = |i: usize| total - blocks[i + 1..=j].iter().sum::<f64>();
    let aitken = |i: usize| {
        let q = blocks[i] / blocks[i - 1];
        partial(i) + blocks[i] * q / (1.0 - q)
    };
    let (a0, a1, a2) = (aitken(j - 2), aitken(j - 1), aitken(j));
    let (d0, d1) = (a1 - a0, a2 - a1);
    let first_order_change = d1.abs();
    let (estimate, uncertainty) = if d1 == 0.0 {
        (a2, 0.0)
    } else {
        let q = d1 / d0;
        if q > 0.0 && q < 0.9 {
            let shanks = a2 + d1 * q / (1.0 - q);
            (shanks, (shanks - a2).abs() * q)
        } else {
            (a2, first_order_change)
        }
    };
    if uncertainty <= 1e-13 * total || at_cap {
        return Ok(Some(estimate));
    }
    Ok(None)
}
