//! Analytic functions on the unit disc.
//!
//! A function is stored as its first `N` Taylor coefficients. Catalog members
//! additionally carry a closed-form evaluator: a short list of terms
//! `c · B⁽ᵈ⁾(w z) / zˢ`, where `B` is one of a handful of base functions with
//! known derivatives. Derivative, dilation, rotation, division by `z` and linear
//! combinations map such lists to such lists, so a function built from the
//! catalog keeps an exact evaluator all the way to the boundary.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Default number of retained Taylor coefficients.
pub const DEFAULT_TRUNCATION: usize = 4096;

/// Target bound for the truncation error of a pure series.
pub const TRUNCATION_TOLERANCE: f64 = 1e-12;

const ZERO_TOLERANCE: f64 = 1e-14;

/// Below this radius closed forms with `1/zˢ` factors are evaluated through the
/// Taylor coefficients instead, avoiding cancellation near the origin.
const SERIES_RADIUS: f64 = 0.5;

/// Highest dyadic index visited by lacunary sums (`2^62` still fits a `u64`).
const MAX_DYADIC: u32 = 62;

/// A point strictly inside the unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint(Complex);

impl DiscPoint {
    pub fn new(z: Complex) -> Result<Self> {
        if z.norm() < 1.0 && z.re.is_finite() && z.im.is_finite() {
            Ok(Self(z))
        } else {
            Err(Error::OutsideDisc(format!("{z}")))
        }
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(Complex::from_polar(r, theta))
    }

    pub fn z(self) -> Complex {
        self.0
    }
}

/// Catalog shapes. Monomials and polynomials are stored exactly; the others
/// have closed-form evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ClosedForm {
    Monomial { n: u32 },
    Polynomial,
    /// `(1 − z)^β`, principal branch.
    BinomialPower { beta: f64 },
    /// `log(1/(1 − z))`.
    LogSingularity,
    /// `Σ 2^{−nα} z^{2^n}`.
    Lacunary { alpha: f64 },
    /// `1/(1 − z)`.
    Geometric,
}

/// A catalog shape up to a constant factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogTag {
    pub factor: Complex,
    pub form: ClosedForm,
}

impl fmt::Display for CatalogTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shape = match self.form {
            ClosedForm::Monomial { n } => format!("z^{n}"),
            ClosedForm::Polynomial => "polynomial".to_string(),
            ClosedForm::BinomialPower { beta } => format!("(1-z)^{beta}"),
            ClosedForm::LogSingularity => "log(1/(1-z))".to_string(),
            ClosedForm::Lacunary { alpha } => format!("lacunary({alpha})"),
            ClosedForm::Geometric => "1/(1-z)".to_string(),
        };
        if self.factor == Complex::new(1.0, 0.0) {
            write!(f, "{shape}")
        } else {
            write!(f, "({})*{shape}", self.factor)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Base {
    Geometric,
    Log,
    Binomial(f64),
    Lacunary(f64),
    Poly(Arc<[Complex]>),
}

impl Base {
    /// Taylor coefficients `b_0 .. b_{count-1}`.
    fn taylor(&self, count: usize) -> Vec<Complex> {
        let mut out = vec![Complex::new(0.0, 0.0); count];
        match self {
            Base::Geometric => out.iter_mut().for_each(|c| *c = Complex::new(1.0, 0.0)),
            Base::Log => {
                for (m, c) in out.iter_mut().enumerate().skip(1) {
                    *c = Complex::new(1.0 / m as f64, 0.0);
                }
            }
            Base::Binomial(beta) => {
                let mut b = 1.0;
                for (m, c) in out.iter_mut().enumerate() {
                    if m > 0 {
                        b *= (m as f64 - 1.0 - beta) / m as f64;
                    }
                    *c = Complex::new(b, 0.0);
                }
            }
            Base::Lacunary(alpha) => {
                let mut m = 1usize;
                let mut j = 0i32;
                while m < count {
                    out[m] = Complex::new((-(j as f64) * alpha).exp2(), 0.0);
                    m <<= 1;
                    j += 1;
                }
            }
            Base::Poly(p) => {
                for (c, v) in out.iter_mut().zip(p.iter()) {
                    *c = *v;
                }
            }
        }
        out
    }

    /// `B⁽ᵈ⁾(y)` with `y = exp(log_mod + i·phase)`, `|y| < 1` for transcendental bases.
    fn eval_derivative(&self, order: u32, log_mod: f64, phase: f64) -> Complex {
        match self {
            Base::Geometric => {
                let one_minus = one_minus_exp(log_mod, phase);
                let d = order as i32;
                Complex::new(factorial(order), 0.0) * one_minus.powi(-(d + 1))
            }
            Base::Log => {
                let one_minus = one_minus_exp(log_mod, phase);
                if order == 0 {
                    -one_minus.ln()
                } else {
                    Complex::new(factorial(order - 1), 0.0) * one_minus.powi(-(order as i32))
                }
            }
            Base::Binomial(beta) => {
                let one_minus = one_minus_exp(log_mod, phase);
                let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
                let coef = sign * falling(*beta, order);
                if coef == 0.0 {
                    return Complex::new(0.0, 0.0);
                }
                let exponent = beta - order as f64;
                coef * (one_minus.ln() * exponent).exp()
            }
            Base::Lacunary(alpha) => lacunary_derivative(*alpha, order, log_mod, phase),
            Base::Poly(p) => {
                let d = order as usize;
                if p.len() <= d {
                    return Complex::new(0.0, 0.0);
                }
                let y = Complex::from_polar(log_mod.exp(), phase);
                let mut acc = Complex::new(0.0, 0.0);
                for m in (d..p.len()).rev() {
                    acc = acc * y + p[m] * falling(m as f64, order);
                }
                acc
            }
        }
    }
}

fn lacunary_derivative(alpha: f64, order: u32, log_mod: f64, phase: f64) -> Complex {
    let d = order as f64;
    let mut acc = Complex::new(0.0, 0.0);
    let mut largest = 0.0f64;
    for j in 0..=MAX_DYADIC {
        let m = (j as f64).exp2();
        if m < d {
            continue;
        }
        let k = m - d;
        let magnitude = (-(j as f64) * alpha).exp2() * falling(m, order) * (k * log_mod).exp();
        if magnitude > 0.0 {
            acc += Complex::from_polar(magnitude, k * phase);
        }
        largest = largest.max(magnitude);
        // Past the peak of m^d |y|^m the terms decay doubly exponentially.
        if k * -log_mod > 40.0 + d && magnitude <= 1e-18 * largest {
            break;
        }
    }
    acc
}

/// `1 − exp(log_mod + i·phase)` without cancellation near `1`.
fn one_minus_exp(log_mod: f64, phase: f64) -> Complex {
    let rho = log_mod.exp();
    let half = (0.5 * phase).sin();
    Complex::new(-log_mod.exp_m1() + 2.0 * rho * half * half, -rho * phase.sin())
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Falling factorial `x (x−1) ⋯ (x−d+1)`.
fn falling(x: f64, d: u32) -> f64 {
    (0..d).map(|i| x - f64::from(i)).product()
}

/// One closed-form summand `coeff · B⁽ᵈ⁾(w z) / z^shift` with
/// `w = exp(log_modulus + i·arg)`.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    coeff: Complex,
    base: Base,
    order: u32,
    log_modulus: f64,
    arg: f64,
    shift: u32,
}

impl Term {
    fn plain(base: Base) -> Self {
        Term {
            coeff: Complex::new(1.0, 0.0),
            base,
            order: 0,
            log_modulus: 0.0,
            arg: 0.0,
            shift: 0,
        }
    }

    fn scale(&self) -> Complex {
        Complex::from_polar(self.log_modulus.exp(), self.arg)
    }

    fn eval(&self, log_r: f64, theta: f64) -> Complex {
        let inner = self.base.eval_derivative(
            self.order,
            self.log_modulus + log_r,
            self.arg + theta,
        );
        let mut v = self.coeff * inner;
        if self.shift > 0 {
            let s = f64::from(self.shift);
            v *= Complex::from_polar((-s * log_r).exp(), -s * theta);
        }
        v
    }

    fn derivative(&self) -> Vec<Term> {
        let mut out = Vec::with_capacity(2);
        let mut chain = self.clone();
        chain.coeff *= self.scale();
        chain.order += 1;
        out.push(chain);
        if self.shift > 0 {
            let mut quotient = self.clone();
            quotient.coeff *= -f64::from(self.shift);
            quotient.shift += 1;
            out.push(quotient);
        }
        out
    }

    /// Dense Taylor coefficients `a_0 .. a_{count-1}` of this term.
    fn taylor(&self, count: usize) -> Vec<Complex> {
        let offset = (self.order + self.shift) as usize;
        let b = self.base.taylor(count + offset);
        (0..count)
            .map(|n| {
                let m = n + offset;
                if b[m] == Complex::new(0.0, 0.0) {
                    return Complex::new(0.0, 0.0);
                }
                let k = (m - self.order as usize) as f64;
                let wk = Complex::from_polar((k * self.log_modulus).exp(), k * self.arg);
                self.coeff * b[m] * falling(m as f64, self.order) * wk
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Coefficients are the complete function (a polynomial).
    Exact,
    /// Coefficients are a truncation of an unknown longer series.
    Truncated,
    /// A closed-form term list is available.
    Closed(Arc<[Term]>),
}

/// An analytic function on the unit disc.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunction {
    coefficients: Arc<[Complex]>,
    closed_form: Option<CatalogTag>,
    repr: Repr,
    tail_bound_hint: Option<f64>,
}

impl AnalyticFunction {
    /// A polynomial with the given coefficients `a_0, a_1, …`.
    pub fn polynomial(coefficients: Vec<Complex>) -> Self {
        let coefficients = if coefficients.is_empty() {
            vec![Complex::new(0.0, 0.0)]
        } else {
            coefficients
        };
        Self {
            coefficients: coefficients.into(),
            closed_form: Some(CatalogTag {
                factor: Complex::new(1.0, 0.0),
                form: ClosedForm::Polynomial,
            }),
            repr: Repr::Exact,
            tail_bound_hint: None,
        }
    }

    pub fn real_polynomial(coefficients: &[f64]) -> Self {
        Self::polynomial(coefficients.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub fn constant(c: f64) -> Self {
        Self::real_polynomial(&[c])
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn monomial(n: u32) -> Self {
        let mut c = vec![Complex::new(0.0, 0.0); n as usize + 1];
        c[n as usize] = Complex::new(1.0, 0.0);
        let mut f = Self::polynomial(c);
        f.closed_form = Some(CatalogTag {
            factor: Complex::new(1.0, 0.0),
            form: ClosedForm::Monomial { n },
        });
        f
    }

    /// A truncated power series whose tail is unknown. Evaluation is limited
    /// to the radius where the geometric tail estimate is below
    /// [`TRUNCATION_TOLERANCE`].
    pub fn series(coefficients: Vec<Complex>, tail_bound_hint: Option<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Spec("series needs at least one coefficient".into()));
        }
        if let Some(h) = tail_bound_hint {
            if !(h >= 0.0 && h.is_finite()) {
                return Err(Error::Spec(format!("tail bound must be a nonnegative real, got {h}")));
            }
        }
        Ok(Self {
            coefficients: coefficients.into(),
            closed_form: None,
            repr: Repr::Truncated,
            tail_bound_hint,
        })
    }

    fn closed(base: Base, form: ClosedForm, truncation: usize) -> Self {
        let term = Term::plain(base);
        let coefficients = term.taylor(truncation.max(1));
        Self {
            coefficients: coefficients.into(),
            closed_form: Some(CatalogTag {
                factor: Complex::new(1.0, 0.0),
                form,
            }),
            repr: Repr::Closed(Arc::from(vec![term])),
            tail_bound_hint: None,
        }
    }

    /// `(1 − z)^β` on the principal branch.
    pub fn binomial_power(beta: f64) -> Self {
        Self::closed(Base::Binomial(beta), ClosedForm::BinomialPower { beta }, DEFAULT_TRUNCATION)
    }

    /// `log(1/(1 − z))`.
    pub fn log_singularity() -> Self {
        Self::closed(Base::Log, ClosedForm::LogSingularity, DEFAULT_TRUNCATION)
    }

    /// `1/(1 − z)`.
    pub fn geometric() -> Self {
        Self::closed(Base::Geometric, ClosedForm::Geometric, DEFAULT_TRUNCATION)
    }

    /// `Σ_{n≥0} 2^{−nα} z^{2^n}`.
    pub fn lacunary(alpha: f64) -> Self {
        Self::closed(Base::Lacunary(alpha), ClosedForm::Lacunary { alpha }, DEFAULT_TRUNCATION)
    }

    pub fn coefficients(&self) -> &[Complex] {
        &self.coefficients
    }

    pub fn truncation_length(&self) -> usize {
        self.coefficients.len()
    }

    pub fn closed_form(&self) -> Option<&CatalogTag> {
        self.closed_form.as_ref()
    }

    pub fn tail_bound_hint(&self) -> Option<f64> {
        self.tail_bound_hint
    }

    /// True when the stored coefficients are the whole function.
    pub fn is_polynomial(&self) -> bool {
        matches!(self.repr, Repr::Exact)
    }

    pub fn has_closed_form(&self) -> bool {
        matches!(self.repr, Repr::Closed(_))
    }

    /// True when every Taylor coefficient vanishes (to the coefficient
    /// tolerance) and no closed-form part remains.
    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Closed(terms) => terms.is_empty(),
            _ => self.coefficients.iter().all(|c| c.norm() <= ZERO_TOLERANCE),
        }
    }

    /// Largest radius at which evaluation is allowed.
    pub fn r_max(&self) -> f64 {
        match &self.repr {
            Repr::Exact => 1.0,
            Repr::Closed(terms) => {
                if terms.iter().any(|t| !matches!(t.base, Base::Poly(_))) {
                    // Closed forms are evaluated in the open disc only.
                    1.0 - f64::EPSILON
                } else {
                    1.0
                }
            }
            Repr::Truncated => {
                let n = self.coefficients.len();
                let tail = self.coefficients[n.saturating_sub(16)..]
                    .iter()
                    .map(|c| c.norm())
                    .fold(self.tail_bound_hint.unwrap_or(0.0), f64::max);
                if tail == 0.0 {
                    return 1.0;
                }
                let bound = |r: f64| tail * r.powi(n as i32) / (1.0 - r);
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if bound(mid) < TRUNCATION_TOLERANCE {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        let r_max = self.r_max();
        let closed_interior = self.has_closed_form() && r < 1.0;
        if r.is_finite() && r >= 0.0 && (r <= r_max || closed_interior) {
            Ok(())
        } else {
            Err(Error::RadiusTooLarge { radius: r, r_max })
        }
    }

    pub fn eval(&self, z: DiscPoint) -> Result<Complex> {
        self.eval_at(z.z())
    }

    /// Evaluate at any `z` in the closed disc allowed by [`Self::r_max`].
    pub fn eval_at(&self, z: Complex) -> Result<Complex> {
        let r = z.norm();
        if r == 0.0 {
            return Ok(self.value_at_zero());
        }
        self.eval_polar(r, z.arg())
    }

    /// `f(r e^{iθ})`.
    pub fn eval_polar(&self, r: f64, theta: f64) -> Result<Complex> {
        self.check_radius(r)?;
        match &self.repr {
            Repr::Closed(terms) if !(self.needs_series_near_zero() && r < SERIES_RADIUS) => {
                if r == 0.0 {
                    return Ok(self.value_at_zero());
                }
                let log_r = r.ln();
                Ok(terms.iter().map(|t| t.eval(log_r, theta)).sum())
            }
            _ => Ok(horner(&self.coefficients, Complex::from_polar(r, theta))),
        }
    }

    fn needs_series_near_zero(&self) -> bool {
        match &self.repr {
            Repr::Closed(terms) => terms.iter().any(|t| t.shift > 0),
            _ => false,
        }
    }

    /// Angles in `[−π, π)` where a closed form is singular (or nearly so) on
    /// the unit circle. `None` unless every term has boundary values in `L²`,
    /// so that [`Self::eval_boundary`] is meaningful off these angles.
    pub fn boundary_singularities(&self) -> Option<Vec<f64>> {
        let Repr::Closed(terms) = &self.repr else {
            return None;
        };
        let mut out = Vec::new();
        for t in terms.iter() {
            if t.log_modulus > 0.0 {
                return None;
            }
            let square_integrable = match t.base {
                Base::Poly(_) => true,
                Base::Lacunary(_) => return None,
                Base::Binomial(beta) => t.log_modulus < 0.0 || beta - f64::from(t.order) > -0.5,
                Base::Log => t.log_modulus < 0.0 || t.order == 0,
                Base::Geometric => t.log_modulus < 0.0,
            };
            if !square_integrable {
                return None;
            }
            if !matches!(t.base, Base::Poly(_)) && t.log_modulus > -0.1 {
                out.push((-t.arg + PI).rem_euclid(2.0 * PI) - PI);
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        Some(out)
    }

    /// `f(e^{iθ})` for a closed form, away from its boundary singularities.
    pub fn eval_boundary(&self, theta: f64) -> Result<Complex> {
        match &self.repr {
            Repr::Closed(terms) => Ok(terms.iter().map(|t| t.eval(0.0, theta)).sum()),
            Repr::Exact => Ok(horner(&self.coefficients, Complex::from_polar(1.0, theta))),
            Repr::Truncated => Err(Error::RadiusTooLarge {
                radius: 1.0,
                r_max: self.r_max(),
            }),
        }
    }

    pub fn value_at_zero(&self) -> Complex {
        self.coefficients[0]
    }

    /// `f'`.
    pub fn derivative(&self) -> Self {
        let coefficients: Vec<Complex> = if self.coefficients.len() <= 1 {
            vec![Complex::new(0.0, 0.0)]
        } else {
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c * n as f64)
                .collect()
        };
        let closed_form = self.closed_form.and_then(|tag| {
            let (factor, form) = match tag.form {
                ClosedForm::Monomial { n: 0 } => (Complex::new(0.0, 0.0), ClosedForm::Polynomial),
                ClosedForm::Monomial { n } => (f64::from(n).into(), ClosedForm::Monomial { n: n - 1 }),
                ClosedForm::Polynomial => (Complex::new(1.0, 0.0), ClosedForm::Polynomial),
                ClosedForm::BinomialPower { beta } => {
                    ((-beta).into(), ClosedForm::BinomialPower { beta: beta - 1.0 })
                }
                ClosedForm::Geometric => (1.0.into(), ClosedForm::BinomialPower { beta: -2.0 }),
                ClosedForm::LogSingularity => (1.0.into(), ClosedForm::Geometric),
                ClosedForm::Lacunary { .. } => return None,
            };
            Some(CatalogTag {
                factor: tag.factor * factor,
                form,
            })
        });
        let repr = match &self.repr {
            Repr::Closed(terms) => {
                Repr::Closed(terms.iter().flat_map(Term::derivative).collect::<Vec<_>>().into())
            }
            other => other.clone(),
        };
        Self {
            coefficients: coefficients.into(),
            closed_form,
            repr,
            tail_bound_hint: self.tail_bound_hint,
        }
    }

    /// Dilation `f_r(z) = f(rz)`, `0 ≤ r ≤ 1`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidArgument(format!("dilation radius {r} outside [0, 1]")));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        if r == 0.0 {
            return Ok(Self::polynomial(vec![self.value_at_zero()]));
        }
        let mut rn = 1.0;
        let coefficients: Vec<Complex> = self
            .coefficients
            .iter()
            .map(|c| {
                let v = c * rn;
                rn *= r;
                v
            })
            .collect();
        let log_r = r.ln();
        let repr = match &self.repr {
            Repr::Closed(terms) => Repr::Closed(
                terms
                    .iter()
                    .map(|t| {
                        let mut t = t.clone();
                        t.log_modulus += log_r;
                        t.coeff *= (-f64::from(t.shift) * log_r).exp();
                        t
                    })
                    .collect::<Vec<_>>()
                    .into(),
            ),
            other => other.clone(),
        };
        let closed_form = self.closed_form.and_then(|tag| match tag.form {
            ClosedForm::Monomial { n } => Some(CatalogTag {
                factor: tag.factor * r.powi(n as i32),
                form: tag.form,
            }),
            ClosedForm::Polynomial => Some(tag),
            _ => None,
        });
        Ok(Self {
            coefficients: coefficients.into(),
            closed_form,
            repr,
            tail_bound_hint: self.tail_bound_hint,
        })
    }

    /// Rotation `r_t(f)(z) = f(e^{it} z)`.
    pub fn rotate(&self, t: f64) -> Self {
        if t == 0.0 {
            return self.clone();
        }
        let coefficients: Vec<Complex> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| c * Complex::from_polar(1.0, n as f64 * t))
            .collect();
        let repr = match &self.repr {
            Repr::Closed(terms) => Repr::Closed(
                terms
                    .iter()
                    .map(|term| {
                        let mut term = term.clone();
                        term.arg += t;
                        term.coeff *= Complex::from_polar(1.0, -f64::from(term.shift) * t);
                        term
                    })
                    .collect::<Vec<_>>()
                    .into(),
            ),
            other => other.clone(),
        };
        let closed_form = self.closed_form.and_then(|tag| match tag.form {
            ClosedForm::Monomial { n } => Some(CatalogTag {
                factor: tag.factor * Complex::from_polar(1.0, f64::from(n) * t),
                form: tag.form,
            }),
            ClosedForm::Polynomial => Some(tag),
            _ => None,
        });
        Self {
            coefficients: coefficients.into(),
            closed_form,
            repr,
            tail_bound_hint: self.tail_bound_hint,
        }
    }

    /// `f(z)/z`, defined when `f(0) = 0`.
    pub fn divide_by_z(&self) -> Result<Self> {
        let scale = self
            .coefficients
            .iter()
            .take(16)
            .map(|c| c.norm())
            .fold(1.0, f64::max);
        let a0 = self.coefficients[0].norm();
        if a0 > ZERO_TOLERANCE * scale {
            return Err(Error::NonvanishingAtZero(a0));
        }
        let coefficients: Vec<Complex> = if self.coefficients.len() <= 1 {
            vec![Complex::new(0.0, 0.0)]
        } else {
            self.coefficients[1..].to_vec()
        };
        let repr = match &self.repr {
            Repr::Closed(terms) => Repr::Closed(
                terms
                    .iter()
                    .map(|t| {
                        let mut t = t.clone();
                        t.shift += 1;
                        t
                    })
                    .collect::<Vec<_>>()
                    .into(),
            ),
            other => other.clone(),
        };
        let closed_form = self.closed_form.and_then(|tag| match tag.form {
            ClosedForm::Monomial { n } if n > 0 => Some(CatalogTag {
                factor: tag.factor,
                form: ClosedForm::Monomial { n: n - 1 },
            }),
            ClosedForm::Polynomial => Some(tag),
            _ => None,
        });
        Ok(Self {
            coefficients: coefficients.into(),
            closed_form,
            repr,
            tail_bound_hint: self.tail_bound_hint,
        })
    }

    /// `c · f`.
    pub fn scale(&self, c: Complex) -> Self {
        let coefficients: Vec<Complex> = self.coefficients.iter().map(|a| a * c).collect();
        let repr = match &self.repr {
            Repr::Closed(terms) => Repr::Closed(
                terms
                    .iter()
                    .map(|t| {
                        let mut t = t.clone();
                        t.coeff *= c;
                        t
                    })
                    .collect::<Vec<_>>()
                    .into(),
            ),
            other => other.clone(),
        };
        Self {
            coefficients: coefficients.into(),
            closed_form: self.closed_form.map(|tag| CatalogTag {
                factor: tag.factor * c,
                form: tag.form,
            }),
            repr,
            tail_bound_hint: self.tail_bound_hint.map(|h| h * c.norm()),
        }
    }

    /// `a·f + b·g`.
    pub fn linear_combination(a: Complex, f: &Self, b: Complex, g: &Self) -> Self {
        let fa = f.scale(a);
        let gb = g.scale(b);
        let truncated = matches!(f.repr, Repr::Truncated) || matches!(g.repr, Repr::Truncated);
        let len = if truncated {
            f.coefficients.len().min(g.coefficients.len())
        } else {
            f.coefficients.len().max(g.coefficients.len())
        };
        let zero = Complex::new(0.0, 0.0);
        let coefficients: Vec<Complex> = (0..len)
            .map(|n| {
                fa.coefficients.get(n).copied().unwrap_or(zero)
                    + gb.coefficients.get(n).copied().unwrap_or(zero)
            })
            .collect();
        let repr = match (&fa.repr, &gb.repr) {
            (Repr::Exact, Repr::Exact) => Repr::Exact,
            (Repr::Truncated, _) | (_, Repr::Truncated) => Repr::Truncated,
            _ => {
                let mut terms = fa.terms_or_poly();
                terms.extend(gb.terms_or_poly());
                Repr::Closed(terms.into())
            }
        };
        let closed_form = match repr {
            Repr::Exact => Some(CatalogTag {
                factor: Complex::new(1.0, 0.0),
                form: ClosedForm::Polynomial,
            }),
            _ => None,
        };
        let tail_bound_hint = match (fa.tail_bound_hint, gb.tail_bound_hint) {
            (None, None) => None,
            (x, y) => Some(x.unwrap_or(0.0) + y.unwrap_or(0.0)),
        };
        Self {
            coefficients: coefficients.into(),
            closed_form,
            repr,
            tail_bound_hint,
        }
    }

    /// `f − g`.
    pub fn sub(&self, g: &Self) -> Self {
        Self::linear_combination(Complex::new(1.0, 0.0), self, Complex::new(-1.0, 0.0), g)
    }

    /// `f + g`.
    pub fn add(&self, g: &Self) -> Self {
        Self::linear_combination(Complex::new(1.0, 0.0), self, Complex::new(1.0, 0.0), g)
    }

    fn terms_or_poly(&self) -> Vec<Term> {
        match &self.repr {
            Repr::Closed(terms) => terms.to_vec(),
            _ => vec![Term::plain(Base::Poly(self.coefficients.clone()))],
        }
    }

    /// `f(r e^{2πik/N})`, `k = 0..N−1`, with `N` a power of two.
    pub fn sample_circle(&self, r: f64, n: usize) -> Result<Vec<Complex>> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("sample count {n} is not a power of two")));
        }
        self.check_radius(r)?;
        match &self.repr {
            Repr::Closed(_) if r >= SERIES_RADIUS => {
                let stream = self.coefficient_stream();
                let neg_log_r = -r.ln();
                // Folding the Taylor series is exact; use it unless a dense
                // series would need far more terms than there are samples.
                if !stream.is_dense() || 45.0 / neg_log_r <= 16.0 * n as f64 {
                    Ok(fold_and_transform(stream, r, n))
                } else {
                    let step = 2.0 * PI / n as f64;
                    (0..n).map(|k| self.eval_polar(r, k as f64 * step)).collect()
                }
            }
            _ => {
                let mut folded = vec![Complex::new(0.0, 0.0); n];
                let mut rn = 1.0;
                for (i, c) in self.coefficients.iter().enumerate() {
                    folded[i % n] += c * rn;
                    rn *= r;
                }
                Ok(inverse_dft(folded))
            }
        }
    }

    /// The full Taylor series as an ordered stream of `(n, a_n)` pairs.
    /// Finite for polynomials and truncated series; infinite for most closed
    /// forms. Indices with zero coefficient may be skipped.
    pub fn coefficient_stream(&self) -> CoefficientStream {
        match &self.repr {
            Repr::Closed(terms) => CoefficientStream::new(terms.iter().map(PartStream::from_term).collect()),
            _ => CoefficientStream::new(vec![PartStream::finite(
                self.coefficients
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != Complex::new(0.0, 0.0))
                    .map(|(n, c)| (n as u64, *c))
                    .collect(),
            )]),
        }
    }
}

fn horner(coefficients: &[Complex], z: Complex) -> Complex {
    coefficients.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// `v_k = Σ_n c_n e^{2πink/N}` (unnormalized inverse DFT).
fn inverse_dft(mut data: Vec<Complex>) -> Vec<Complex> {
    let n = data.len();
    if n > 1 {
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_inverse(n).process(&mut data);
    }
    data
}

fn fold_and_transform(stream: CoefficientStream, r: f64, n: usize) -> Vec<Complex> {
    let mut folded = vec![Complex::new(0.0, 0.0); n];
    let neg_log_r = -r.ln();
    let mask = (n - 1) as u64;
    let mut largest = 0.0f64;
    for (idx, c) in stream {
        let decay = (-(idx as f64) * neg_log_r).exp();
        let v = c * decay;
        let mag = v.norm();
        largest = largest.max(mag);
        folded[(idx & mask) as usize] += v;
        if idx as f64 * neg_log_r > 40.0 && mag <= 1e-19 * largest {
            break;
        }
    }
    inverse_dft(folded)
}

#[derive(Debug, Clone)]
enum PartStream {
    Finite {
        items: Vec<(u64, Complex)>,
        pos: usize,
    },
    Lacunary {
        term: Term,
        alpha: f64,
        j: u32,
    },
    Dense {
        term: Term,
        n: u64,
        b: f64,
        power: Complex,
        step: Complex,
        since_refresh: u32,
    },
}

impl PartStream {
    fn finite(items: Vec<(u64, Complex)>) -> Self {
        PartStream::Finite { items, pos: 0 }
    }

    fn from_term(term: &Term) -> Self {
        match &term.base {
            Base::Poly(p) => {
                let offset = (term.order + term.shift) as usize;
                let items = term
                    .taylor(p.len().saturating_sub(offset))
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| *c != Complex::new(0.0, 0.0))
                    .map(|(n, c)| (n as u64, c))
                    .collect();
                PartStream::finite(items)
            }
            Base::Lacunary(alpha) => {
                let mut s = PartStream::Lacunary {
                    term: term.clone(),
                    alpha: *alpha,
                    j: 0,
                };
                s.skip_negative_lacunary();
                s
            }
            base => {
                let m0 = (term.order + term.shift) as usize;
                let b = base.taylor(m0 + 1)[m0].re;
                let mut s = PartStream::Dense {
                    term: term.clone(),
                    n: 0,
                    b,
                    power: Complex::new(1.0, 0.0),
                    step: term.scale(),
                    since_refresh: u32::MAX,
                };
                s.refresh_power();
                s
            }
        }
    }

    fn skip_negative_lacunary(&mut self) {
        if let PartStream::Lacunary { term, j, .. } = self {
            let offset = u64::from(term.order + term.shift);
            while *j <= MAX_DYADIC && (1u64 << *j) < offset {
                *j += 1;
            }
        }
    }

    fn refresh_power(&mut self) {
        if let PartStream::Dense {
            term,
            n,
            power,
            since_refresh,
            ..
        } = self
        {
            let k = (*n + u64::from(term.shift)) as f64;
            *power = Complex::from_polar((k * term.log_modulus).exp(), k * term.arg);
            *since_refresh = 0;
        }
    }

    fn peek_index(&self) -> Option<u64> {
        match self {
            PartStream::Finite { items, pos } => items.get(*pos).map(|x| x.0),
            PartStream::Lacunary { term, j, .. } => {
                (*j <= MAX_DYADIC).then(|| (1u64 << *j) - u64::from(term.order + term.shift))
            }
            PartStream::Dense { n, .. } => Some(*n),
        }
    }

    fn advance(&mut self) -> Option<(u64, Complex)> {
        match self {
            PartStream::Finite { items, pos } => {
                let v = items.get(*pos).copied();
                *pos += 1;
                v
            }
            PartStream::Lacunary { term, alpha, j } => {
                if *j > MAX_DYADIC {
                    return None;
                }
                let m = (1u64 << *j) as f64;
                let offset = u64::from(term.order + term.shift);
                let n = (1u64 << *j) - offset;
                let k = m - f64::from(term.order);
                let mag = (-(f64::from(*j)) * *alpha).exp2()
                    * falling(m, term.order)
                    * (k * term.log_modulus).exp();
                let v = term.coeff * Complex::from_polar(mag, k * term.arg);
                *j += 1;
                Some((n, v))
            }
            PartStream::Dense { .. } => {
                let (n_now, value) = match self {
                    PartStream::Dense { term, n, b, power, .. } => {
                        let m = *n + u64::from(term.order + term.shift);
                        let v = term.coeff * *b * falling(m as f64, term.order) * *power;
                        (*n, v)
                    }
                    _ => unreachable!(),
                };
                let needs_refresh = match self {
                    PartStream::Dense {
                        term,
                        n,
                        b,
                        power,
                        step,
                        since_refresh,
                    } => {
                        let m = *n + u64::from(term.order + term.shift);
                        let m1 = (m + 1) as f64;
                        *b = match term.base {
                            Base::Geometric => 1.0,
                            Base::Log => 1.0 / m1,
                            Base::Binomial(beta) => *b * (m1 - 1.0 - beta) / m1,
                            _ => unreachable!("dense stream over sparse base"),
                        };
                        *n += 1;
                        *power *= *step;
                        *since_refresh += 1;
                        *since_refresh >= 256
                    }
                    _ => unreachable!(),
                };
                if needs_refresh {
                    self.refresh_power();
                }
                Some((n_now, value))
            }
        }
    }
}

/// Ordered merge of the Taylor coefficient streams of the closed-form terms.
#[derive(Debug, Clone)]
pub struct CoefficientStream {
    parts: Vec<PartStream>,
    dense: bool,
    finite: bool,
}

impl CoefficientStream {
    fn new(parts: Vec<PartStream>) -> Self {
        let dense = parts.iter().any(|p| matches!(p, PartStream::Dense { .. }));
        let finite = parts.iter().all(|p| matches!(p, PartStream::Finite { .. }));
        Self { parts, dense, finite }
    }

    /// Some part has infinitely many consecutive nonzero coefficients.
    pub fn is_dense(&self) -> bool {
        self.dense
    }

    /// The stream terminates (polynomials and truncated series).
    pub fn is_finite(&self) -> bool {
        self.finite
    }
}

impl Iterator for CoefficientStream {
    type Item = (u64, Complex);

    fn next(&mut self) -> Option<Self::Item> {
        let idx = self.parts.iter().filter_map(PartStream::peek_index).min()?;
        let mut acc = Complex::new(0.0, 0.0);
        for part in &mut self.parts {
            if part.peek_index() == Some(idx) {
                if let Some((_, v)) = part.advance() {
                    acc += v;
                }
            }
        }
        Some((idx, acc))
    }
}

/// Serializable description of a function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Monomial {
        n: u32,
    },
    Polynomial {
        coefficients: Vec<[f64; 2]>,
    },
    BinomialPower {
        beta: f64,
    },
    Lacunary {
        alpha: f64,
    },
    Geometric,
    Log,
    Series {
        coefficients: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_bound: Option<f64>,
    },
}

impl FunctionSpec {
    pub fn build(&self) -> Result<AnalyticFunction> {
        let to_complex = |c: &[[f64; 2]]| c.iter().map(|[re, im]| Complex::new(*re, *im)).collect::<Vec<_>>();
        Ok(match self {
            FunctionSpec::Monomial { n } => AnalyticFunction::monomial(*n),
            FunctionSpec::Polynomial { coefficients } => {
                AnalyticFunction::polynomial(to_complex(coefficients))
            }
            FunctionSpec::BinomialPower { beta } => AnalyticFunction::binomial_power(*beta),
            FunctionSpec::Lacunary { alpha } => AnalyticFunction::lacunary(*alpha),
            FunctionSpec::Geometric => AnalyticFunction::geometric(),
            FunctionSpec::Log => AnalyticFunction::log_singularity(),
            FunctionSpec::Series {
                coefficients,
                tail_bound,
            } => AnalyticFunction::series(to_complex(coefficients), *tail_bound)?,
        })
    }

    /// Parse the compact command-line form, e.g. `monomial:3`,
    /// `lacunary:0.5`, `binomial:0.5`, `poly:1,0,2`, `constant:7`, `geometric`.
    pub fn parse_short(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (s.trim(), None),
        };
        let num = |r: Option<&str>| -> Result<f64> {
            r.ok_or_else(|| Error::Spec(format!("`{head}` needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::Spec(format!("bad number in `{s}`: {e}")))
        };
        let reals = |r: Option<&str>| -> Result<Vec<[f64; 2]>> {
            r.ok_or_else(|| Error::Spec(format!("`{head}` needs coefficients")))?
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map(|v| [v, 0.0])
                        .map_err(|e| Error::Spec(format!("bad coefficient `{x}`: {e}")))
                })
                .collect()
        };
        match head {
            "monomial" | "z" => {
                let n = num(rest)?;
                if n < 0.0 || n.fract() != 0.0 || n > f64::from(u32::MAX) {
                    return Err(Error::Spec(format!("monomial degree must be a nonnegative integer, got {n}")));
                }
                Ok(FunctionSpec::Monomial { n: n as u32 })
            }
            "lacunary" => Ok(FunctionSpec::Lacunary { alpha: num(rest)? }),
            "binomial" | "binomial_power" => Ok(FunctionSpec::BinomialPower { beta: num(rest)? }),
            "geometric" => Ok(FunctionSpec::Geometric),
            "log" => Ok(FunctionSpec::Log),
            "poly" | "polynomial" => Ok(FunctionSpec::Polynomial {
                coefficients: reals(rest)?,
            }),
            "series" => Ok(FunctionSpec::Series {
                coefficients: reals(rest)?,
                tail_bound: None,
            }),
            "constant" => Ok(FunctionSpec::Polynomial {
                coefficients: vec![[rest.map(|_| num(rest)).transpose()?.unwrap_or(1.0), 0.0]],
            }),
            other => Err(Error::Spec(format!("unknown function kind `{other}`"))),
        }
    }
}
