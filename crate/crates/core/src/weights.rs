//! Weight functions `ω` on `[0, 1)` and their Dini / admissibility tests.
//!
//! The integrals are computed after the substitution `s = 2^{−u}`, which turns
//! the singular factors `1/s` and `1/s²` into smooth exponentials in `u`. Each
//! unit interval in `u` gets a Gauss–Legendre panel, so the values at all grid
//! points `t = 2^{−k}` come out of one set of cumulative sums.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Grid `t = 2^{−k}` used by the checks.
pub const CHECK_K_MAX: u32 = 20;

/// Start of the window on which a ratio has to settle.
const SETTLE_K: u32 = 14;

/// Allowed growth of the running supremum over the settling window.
const SETTLE_GROWTH: f64 = 0.02;

/// Increments shrinking at least this fast are treated as a convergent tail.
const GEOMETRIC_RATIO: f64 = 0.95;

/// Deepest `u` used for `∫_0^t ω(s)/s ds`.
const DINI_U_MAX: usize = 1000;

const PANEL_NODES: usize = 24;

const VALIDATION_GRID: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum WeightForm {
    /// `t^α`.
    Power { alpha: f64 },
    /// `t^α (log(e/t))^β`.
    PowerLog { alpha: f64, beta: f64 },
    /// Piecewise-linear interpolation of `(t, ω(t))` samples.
    Custom { samples: Vec<[f64; 2]> },
}

fn unit_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    #[serde(flatten)]
    pub form: WeightForm,
    /// Constant factor multiplying the form.
    #[serde(default = "unit_scale")]
    pub scale: f64,
}

impl Weight {
    pub fn power(alpha: f64) -> Result<Self> {
        Self::new(WeightForm::Power { alpha })
    }

    pub fn power_log(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(WeightForm::PowerLog { alpha, beta })
    }

    pub fn custom(samples: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(WeightForm::Custom { samples })
    }

    pub fn new(form: WeightForm) -> Result<Self> {
        let w = Self { form, scale: 1.0 };
        w.validate()?;
        Ok(w)
    }

    /// `λ·ω`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let w = Self {
            form: self.form.clone(),
            scale: self.scale * lambda,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn label(&self) -> String {
        let base = match &self.form {
            WeightForm::Power { alpha } => format!("power:{alpha}"),
            WeightForm::PowerLog { alpha, beta } => format!("powerlog:{alpha},{beta}"),
            WeightForm::Custom { samples } => format!("custom[{}]", samples.len()),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{}*{base}", self.scale)
        }
    }

    pub fn is_custom(&self) -> bool {
        matches!(self.form, WeightForm::Custom { .. })
    }

    /// Checks `ω(0) = 0`, finiteness, and monotonicity on a uniform grid of
    /// 1024 points plus the dyadic points `2^{−k}`.
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidWeight(format!("scale {} must be positive", self.scale)));
        }
        match &self.form {
            WeightForm::Power { alpha } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidWeight(format!("power exponent {alpha} must be positive")));
                }
            }
            WeightForm::PowerLog { alpha, beta } => {
                if !alpha.is_finite() || !beta.is_finite() {
                    return Err(Error::InvalidWeight("exponents must be finite".into()));
                }
                if *alpha < 0.0 || (*alpha == 0.0 && *beta >= 0.0) {
                    return Err(Error::InvalidWeight(format!(
                        "t^{alpha} log(e/t)^{beta} does not vanish at 0"
                    )));
                }
            }
            WeightForm::Custom { samples } => {
                if samples.len() < 2 {
                    return Err(Error::InvalidWeight("custom weight needs at least two samples".into()));
                }
                for s in samples {
                    if !(s[0] > 0.0 && s[0] < 1.0) || !s[1].is_finite() || s[1] < 0.0 {
                        return Err(Error::InvalidWeight(format!(
                            "sample ({}, {}) must have 0 < t < 1 and finite w >= 0",
                            s[0], s[1]
                        )));
                    }
                }
                if samples.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    return Err(Error::InvalidWeight("sample abscissas must increase".into()));
                }
            }
        }
        let mut grid: Vec<f64> = (1..VALIDATION_GRID).map(|i| i as f64 / VALIDATION_GRID as f64).collect();
        grid.extend((11..=60).map(|k| (-f64::from(k)).exp2()));
        grid.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        for t in grid {
            let v = self.value(t);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidWeight(format!("w({t}) = {v}")));
            }
            if v < prev * (1.0 - 1e-12) {
                return Err(Error::InvalidWeight(format!("not nondecreasing near t = {t}")));
            }
            prev = v;
        }
        Ok(())
    }

    /// `ω(t)` for `t ∈ [0, 1)`, without domain checks.
    fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let raw = match &self.form {
            WeightForm::Power { alpha } => t.powf(*alpha),
            WeightForm::PowerLog { alpha, beta } => {
                let ln_t = t.ln();
                (alpha * ln_t + beta * (1.0 - ln_t).ln()).exp()
            }
            WeightForm::Custom { samples } => interpolate(samples, t),
        };
        self.scale * raw
    }
}

/// Piecewise-linear interpolation. Below the first sample the weight is
/// extended as the power law through the first two samples; past the last
/// sample the last segment is continued.
fn interpolate(samples: &[[f64; 2]], t: f64) -> f64 {
    let [t0, w0] = samples[0];
    if t < t0 {
        let [t1, w1] = samples[1];
        if w0 <= 0.0 {
            return 0.0;
        }
        let gamma = if w1 > w0 { (w1 / w0).ln() / (t1 / t0).ln() } else { 0.0 };
        return w0 * (t / t0).powf(gamma);
    }
    let i = samples.partition_point(|s| s[0] <= t);
    let (a, b) = if i >= samples.len() {
        (samples[samples.len() - 2], samples[samples.len() - 1])
    } else {
        (samples[i - 1], samples[i])
    };
    let slope = (b[1] - a[1]) / (b[0] - a[0]);
    a[1] + slope * (t - a[0])
}

/// `ω(t)` for `0 < t < 1`.
pub fn eval_weight(w: &Weight, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::OutOfDomain(t));
    }
    Ok(w.value(t))
}

/// Outcome of one of the grid tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCheck {
    pub holds: bool,
    pub constant: f64,
}

/// `∫_0^t ω(s)/s ds ≤ C ω(t)`.
///
/// Returns `(true, sup ratio)` when the ratio settles on `t = 2^{−k}`,
/// `k = 1..20`, and `(false, last ratio)` otherwise.
pub fn check_dini(w: &Weight) -> Result<(bool, f64)> {
    let lower = lower_integrals(w)?;
    let ratios: Vec<f64> = (1..=CHECK_K_MAX)
        .map(|k| lower[k as usize - 1] / w.value((-f64::from(k)).exp2()))
        .collect();
    let c = settle_sup(&ratios);
    Ok((c.holds, c.constant))
}

/// `∫_t^1 ω(s)/s² ds ≤ C ω(t)/t`, on the same grid as [`check_dini`].
pub fn check_condition_b(w: &Weight) -> Result<(bool, f64)> {
    let upper = upper_integrals(w);
    let ratios: Vec<f64> = (1..=CHECK_K_MAX)
        .map(|k| {
            let t = (-f64::from(k)).exp2();
            upper[k as usize - 1] * t / w.value(t)
        })
        .collect();
    let c = settle_sup(&ratios);
    Ok((c.holds, c.constant))
}

/// `ω(t)/t ≥ C > 0`. Returns `(holds, inf ratio)`.
pub fn check_lower_bound(w: &Weight) -> (bool, f64) {
    let ratios: Vec<f64> = (0..=CHECK_K_MAX)
        .map(|k| {
            let t = if k == 0 { 1.0 - 1e-9 } else { (-f64::from(k)).exp2() };
            w.value(t) / t
        })
        .collect();
    // A lower bound for ω(t)/t is an upper bound for t/ω(t).
    let inverse: Vec<f64> = ratios.iter().map(|q| 1.0 / q).collect();
    let c = settle_sup(&inverse);
    let inf = if c.holds { 1.0 / c.constant } else { ratios.iter().cloned().fold(f64::INFINITY, f64::min) };
    (c.holds && inf > 0.0, inf)
}

/// `∫_0^{2^{−k}} ω(s)/s ds` for `k = 1..=20`.
fn lower_integrals(w: &Weight) -> Result<Vec<f64>> {
    let rule = GaussLegendre::cached(PANEL_NODES);
    // Panel j covers u ∈ [j, j+1], i.e. s ∈ [2^{−j−1}, 2^{−j}].
    let mut panels: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut tail = None;
    for j in 1..DINI_U_MAX {
        let v = LN_2 * rule.integrate(j as f64, j as f64 + 1.0, |u| w.value((-u).exp2()));
        panels.push(v);
        total += v;
        if j > CHECK_K_MAX as usize + 4 && v <= 1e-17 * total {
            tail = Some(0.0);
            break;
        }
    }
    let tail = match tail {
        Some(t) => t,
        None => {
            let n = panels.len();
            let q = panels[n - 1] / panels[n - 2];
            if !(q < 0.99) {
                return Err(Error::IntegralDiverges);
            }
            panels[n - 1] * q / (1.0 - q)
        }
    };
    // Suffix sums from the deepest panel up.
    let mut suffix = vec![0.0; panels.len() + 1];
    suffix[panels.len()] = tail;
    for j in (0..panels.len()).rev() {
        suffix[j] = suffix[j + 1] + panels[j];
    }
    Ok((1..=CHECK_K_MAX as usize).map(|k| suffix[k - 1]).collect())
}

/// `∫_{2^{−k}}^1 ω(s)/s² ds` for `k = 1..=20`.
fn upper_integrals(w: &Weight) -> Vec<f64> {
    let rule = GaussLegendre::cached(PANEL_NODES);
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(CHECK_K_MAX as usize);
    for j in 0..CHECK_K_MAX {
        let a = f64::from(j);
        // The interval touching s = 1 stops just short of it, where ω may end.
        let lo = if j == 0 { 1e-12 } else { a };
        acc += LN_2 * rule.integrate(lo, a + 1.0, |u| w.value((-u).exp2()) * u.exp2());
        out.push(acc);
    }
    out
}

/// Settling rule for a ratio sequence indexed by `k = 1..`.
///
/// Holds with the supremum when the running supremum grows by less than 2%
/// from `k = 14` to the end. Failing that, positive increments that shrink
/// geometrically still identify a finite limit, which is then reported as
/// the Aitken-extrapolated supremum.
fn settle_sup(ratios: &[f64]) -> GridCheck {
    let n = ratios.len();
    let sup = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if ratios.iter().any(|q| !q.is_finite()) {
        return GridCheck { holds: false, constant: ratios[n - 1] };
    }
    let settle = (SETTLE_K as usize - 1).min(n - 1);
    let sup_before = ratios[..=settle].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if sup <= sup_before * (1.0 + SETTLE_GROWTH) {
        return GridCheck { holds: true, constant: sup };
    }
    let inc: Vec<f64> = ratios[settle..].windows(2).map(|w| w[1] - w[0]).collect();
    let geometric = inc.iter().all(|&d| d > 0.0)
        && inc.windows(2).all(|w| w[1] <= GEOMETRIC_RATIO * w[0]);
    if geometric {
        let m = inc.len();
        let q = inc[m - 1] / inc[m - 2];
        let limit = ratios[n - 1] + inc[m - 1] * q / (1.0 - q);
        return GridCheck { holds: true, constant: limit.max(sup) };
    }
    GridCheck { holds: false, constant: ratios[n - 1] }
}

/// Everything known about a weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightClassification {
    pub weight: String,
    pub dini: bool,
    pub dini_constant: f64,
    pub condition_b: bool,
    pub condition_b_constant: f64,
    pub lower_bound_ok: bool,
    pub lower_bound_constant: f64,
    pub admissible: bool,
    /// Set for sampled weights, whose behaviour below the first sample is
    /// extrapolated.
    pub advisory: bool,
    pub notes: Vec<String>,
}

pub fn classify_weight(w: &Weight) -> Result<WeightClassification> {
    w.validate()?;
    let (dini, dini_constant) = check_dini(w)?;
    let (condition_b, condition_b_constant) = check_condition_b(w)?;
    let (lower_bound_ok, lower_bound_constant) = check_lower_bound(w);
    let mut notes = Vec::new();
    let advisory = w.is_custom();
    if advisory {
        notes.push("sampled weight: tail below the first sample is a power-law extrapolation".into());
    }
    if condition_b && !lower_bound_ok {
        notes.push("condition (b) holds but the lower bound w(t)/t >= C failed on the grid".into());
    }
    if !dini || !condition_b {
        notes.push(format!(
            "finite-grid verdict on t = 2^-k, k = 1..{CHECK_K_MAX}; failure to settle is not a proof"
        ));
    }
    Ok(WeightClassification {
        weight: w.label(),
        dini,
        dini_constant,
        condition_b,
        condition_b_constant,
        lower_bound_ok,
        lower_bound_constant,
        admissible: dini && condition_b,
        advisory,
        notes,
    })
}

/// Parses `power:a`, `powerlog:a,b` (also `power_log`), optionally followed by
/// `*scale`, or a JSON weight spec.
pub fn parse_weight(s: &str) -> Result<Weight> {
    let s = s.trim();
    if s.starts_with('{') {
        let w: Weight = serde_json::from_str(s).map_err(|e| Error::Spec(e.to_string()))?;
        w.validate()?;
        return Ok(w);
    }
    let (body, scale) = match s.split_once('*') {
        Some((a, b)) => {
            let scale: f64 = b.trim().parse().map_err(|_| Error::Spec(format!("bad weight scale in {s:?}")))?;
            (a.trim(), scale)
        }
        None => (s, 1.0),
    };
    let (kind, args) = body.split_once(':').unwrap_or((body, ""));
    let nums: Vec<f64> = args
        .split(',')
        .filter(|a| !a.trim().is_empty())
        .map(|a| a.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Spec(format!("bad weight parameters in {s:?}")))?;
    let form = match (kind.to_ascii_lowercase().as_str(), nums.as_slice()) {
        ("power", [a]) => WeightForm::Power { alpha: *a },
        ("powerlog" | "power_log", [a, b]) => WeightForm::PowerLog { alpha: *a, beta: *b },
        _ => return Err(Error::Spec(format!("unknown weight {s:?}"))),
    };
    let w = Weight { form, scale };
    w.validate()?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn evaluates_examples() {
        assert_relative_eq!(eval_weight(&Weight::power(0.5).unwrap(), 0.25).unwrap(), 0.5);
        assert_relative_eq!(eval_weight(&Weight::power(1.0).unwrap(), 0.3).unwrap(), 0.3);
        let e = std::f64::consts::E;
        let v = eval_weight(&Weight::power_log(1.0, 1.0).unwrap(), 1.0 / e).unwrap();
        assert_relative_eq!(v, 2.0 / e, epsilon = 1e-15);
        assert_relative_eq!(v, 0.7357588823428847, epsilon = 1e-15);
        assert_eq!(eval_weight(&Weight::power(1.0).unwrap(), 0.0), Err(Error::OutOfDomain(0.0)));
        assert_eq!(eval_weight(&Weight::power(1.0).unwrap(), 1.0), Err(Error::OutOfDomain(1.0)));
    }

    #[test]
    fn rejects_invalid_weights() {
        assert!(Weight::power(0.0).is_err());
        assert!(Weight::power(-1.0).is_err());
        assert!(Weight::power_log(0.0, 1.0).is_err());
        // t log(e/t)^3 decreases near t = 1.
        assert!(Weight::power_log(1.0, 3.0).is_err());
        assert!(Weight::custom(vec![[0.1, 0.5], [0.2, 0.4]]).is_err());
        assert!(Weight::custom(vec![[0.2, 0.5], [0.1, 0.6]]).is_err());
        assert!(Weight::power(0.5).unwrap().scaled(-1.0).is_err());
    }

    #[test]
    fn power_dini_constant() {
        for alpha in [0.25, 0.5, 0.75, 1.0] {
            let (ok, c) = check_dini(&Weight::power(alpha).unwrap()).unwrap();
            assert!(ok);
            assert_relative_eq!(c, 1.0 / alpha, max_relative = 1e-10);
        }
    }

    #[test]
    fn power_condition_b_constant() {
        for alpha in [0.25, 0.5, 0.75] {
            let (ok, c) = check_condition_b(&Weight::power(alpha).unwrap()).unwrap();
            assert!(ok, "alpha = {alpha}");
            assert_relative_eq!(c, 1.0 / (1.0 - alpha), max_relative = 0.05);
        }
        let (ok, _) = check_condition_b(&Weight::power(1.0).unwrap()).unwrap();
        assert!(!ok);
    }

    #[test]
    fn power_log_classification() {
        let c = classify_weight(&Weight::power_log(1.0, 1.0).unwrap()).unwrap();
        assert!(c.dini);
        assert!(c.dini_constant <= 2.0);
        assert!(!c.condition_b);
        assert!(!c.admissible);
    }

    #[test]
    fn catalog_classification() {
        let half = classify_weight(&Weight::power(0.5).unwrap()).unwrap();
        assert!(half.dini && half.condition_b && half.admissible && half.lower_bound_ok);
        let one = classify_weight(&Weight::power(1.0).unwrap()).unwrap();
        assert!(one.dini && !one.condition_b && !one.admissible);
        assert!(one.lower_bound_ok);
    }

    #[test]
    fn divergent_dini_integral() {
        // 1/log(e/t) vanishes at 0 but ω(s)/s is not integrable.
        let w = Weight::power_log(0.0, -1.0).unwrap();
        assert_eq!(check_dini(&w), Err(Error::IntegralDiverges));
    }

    #[test]
    fn quadratic_weight_fails_lower_bound() {
        let (ok, _) = check_lower_bound(&Weight::power(2.0).unwrap());
        assert!(!ok);
    }

    #[test]
    fn custom_copy_of_power_matches() {
        let samples: Vec<[f64; 2]> = (0..=400)
            .map(|i| {
                let t = (-24.0 + 24.0 * i as f64 / 400.0).exp2() * 0.999;
                [t, t.sqrt()]
            })
            .collect();
        let custom = Weight::custom(samples).unwrap();
        let exact = Weight::power(0.5).unwrap();
        let a = classify_weight(&custom).unwrap();
        let b = classify_weight(&exact).unwrap();
        assert!(a.advisory);
        assert_eq!((a.dini, a.condition_b, a.admissible), (b.dini, b.condition_b, b.admissible));
        assert_relative_eq!(a.dini_constant, b.dini_constant, max_relative = 0.01);
        assert_relative_eq!(a.condition_b_constant, b.condition_b_constant, max_relative = 0.01);
    }

    #[test]
    fn scaling_keeps_verdicts() {
        for w in [Weight::power(0.5).unwrap(), Weight::power(1.0).unwrap(), Weight::power_log(1.0, 1.0).unwrap()] {
            let base = classify_weight(&w).unwrap();
            for lambda in [0.1, 10.0] {
                let c = classify_weight(&w.scaled(lambda).unwrap()).unwrap();
                assert_eq!((c.dini, c.condition_b, c.lower_bound_ok), (base.dini, base.condition_b, base.lower_bound_ok));
            }
        }
    }

    #[test]
    fn parses_short_and_json_specs() {
        assert_eq!(parse_weight("power:0.5").unwrap(), Weight::power(0.5).unwrap());
        assert_eq!(parse_weight("powerlog:1,1").unwrap(), Weight::power_log(1.0, 1.0).unwrap());
        assert_eq!(parse_weight("power:0.5*10").unwrap().scale, 10.0);
        let w = parse_weight(r#"{"form":"power_log","alpha":1,"beta":1}"#).unwrap();
        assert_eq!(w, Weight::power_log(1.0, 1.0).unwrap());
        assert!(parse_weight("power").is_err());
        assert!(parse_weight("gauss:1").is_err());
    }
}
