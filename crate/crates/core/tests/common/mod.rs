//! Brute-force oracles shared by the integration tests. Everything here works
//! from explicit coefficient lists, independently of the library's
//! quadratures, streams and closed forms.
#![allow(dead_code)]

use meanlip::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Sparse coefficient list `(index, coefficient)`.
pub type Coeffs = Vec<(u64, Complex)>;

pub fn lacunary(alpha: f64, max_j: u32) -> Coeffs {
    (0..=max_j)
        .map(|j| (1u64 << j, Complex::new((-(j as f64) * alpha).exp2(), 0.0)))
        .collect()
}

pub fn derivative(c: &Coeffs) -> Coeffs {
    c.iter()
        .filter(|(m, _)| *m > 0)
        .map(|&(m, a)| (m - 1, a * m as f64))
        .collect()
}

pub fn hardy2_sq(c: &Coeffs, r: f64) -> f64 {
    c.iter().map(|(m, a)| a.norm_sqr() * r.powf(2.0 * *m as f64)).sum()
}

pub fn bergman2_sq(c: &Coeffs, r: f64) -> f64 {
    c.iter()
        .map(|(m, a)| a.norm_sqr() * r.powf(2.0 * *m as f64) / (*m as f64 + 1.0))
        .sum()
}

/// `|a_0|² + Σ m|a_m|²` at radius `r`.
pub fn dirichlet_sq(c: &Coeffs, r: f64) -> f64 {
    c.iter()
        .map(|(m, a)| {
            let w = if *m == 0 { 1.0 } else { *m as f64 };
            w * a.norm_sqr() * r.powf(2.0 * *m as f64)
        })
        .sum()
}

#[derive(Clone, Copy, Debug)]
pub enum Space2 {
    Hardy,
    Bergman,
    Dirichlet,
}

pub fn norm_sq(space: Space2, c: &Coeffs, r: f64) -> f64 {
    match space {
        Space2::Hardy => hardy2_sq(c, r),
        Space2::Bergman => bergman2_sq(c, r),
        Space2::Dirichlet => dirichlet_sq(c, r),
    }
}

/// `‖f_r − f‖` from the coefficients `a_m (r^m − 1)`.
pub fn dilation_gap(space: Space2, c: &Coeffs, r: f64) -> f64 {
    let g: Coeffs = c.iter().map(|&(m, a)| (m, a * (r.powf(m as f64) - 1.0))).collect();
    norm_sq(space, &g, 1.0).sqrt()
}

/// `‖r_t f − f‖` from the coefficients `a_m (e^{imt} − 1)`, with the phase
/// reduced exactly for power-of-two indices and dyadic `t`.
pub fn rotation_gap(space: Space2, c: &Coeffs, t: f64) -> f64 {
    let g: Coeffs = c
        .iter()
        .map(|&(m, a)| {
            let phase = (m as f64 * t).rem_euclid(2.0 * std::f64::consts::PI);
            let f = 2.0 * (0.5 * phase).sin();
            (m, a * f)
        })
        .collect();
    norm_sq(space, &g, 1.0).sqrt()
}

/// `‖(f′)_r‖`.
pub fn derivative_mean(space: Space2, c: &Coeffs, r: f64) -> f64 {
    norm_sq(space, &derivative(c), r).sqrt()
}

/// Least-squares slope of `log v` against `log x`.
pub fn loglog_slope(xs: &[f64], vs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let lv: Vec<f64> = vs.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let mv = lv.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&lv).map(|(x, v)| (x - mx) * (v - mv)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn random_polynomial(rng: &mut ChaCha8Rng, max_degree: usize) -> Vec<Complex> {
    let degree = rng.gen_range(0..=max_degree);
    (0..=degree)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn dense(c: &[Complex]) -> Coeffs {
    c.iter().enumerate().map(|(m, a)| (m as u64, *a)).collect()
}

/// Relative difference, with an absolute floor for values near zero.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
