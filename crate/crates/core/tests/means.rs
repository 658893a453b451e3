mod common;

use approx::assert_relative_eq;
use meanlip::means::{self, SpaceSpec};
use meanlip::{AnalyticFunction, Complex, Error, QuadratureConfig};
use proptest::prelude::*;

fn quad() -> QuadratureConfig {
    QuadratureConfig::default().quadrature_only()
}

fn poly_strategy(max_len: usize) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..max_len)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex::new(a, b)).collect())
}

/// `(1/(π r²)) ∫∫_{|z|<r} |f|^p dA` by a trapezoid rule in the angle and
/// composite Simpson in the radius.
fn area_oracle(c: &[Complex], p: f64, r: f64) -> f64 {
    let n_theta = 2048;
    let n_u = 2000;
    let eval = |z: Complex| c.iter().rev().fold(Complex::new(0.0, 0.0), |acc, a| acc * z + a);
    let ring = |u: f64| -> f64 {
        (0..n_theta)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / n_theta as f64;
                eval(Complex::from_polar(u, th)).norm().powf(p)
            })
            .sum::<f64>()
            / n_theta as f64
    };
    let h = r / n_u as f64;
    let mut s = 0.0;
    for i in 0..=n_u {
        let u = i as f64 * h;
        let w = if i == 0 || i == n_u { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * ring(u) * u;
    }
    (2.0 / (r * r) * s * h / 3.0).powf(1.0 / p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rotation_leaves_means_unchanged(c in poly_strategy(12), t in -3.0..3.0f64, p in prop::sample::select(vec![1.0, 2.0, 3.0])) {
        let f = AnalyticFunction::polynomial(c);
        let g = f.rotate(t);
        // |f|^p is not a trigonometric polynomial for odd p; ask for more
        // than the 1e-10 being asserted.
        let cfg = QuadratureConfig { rel_tol: 1e-12, ..quad() };
        for r in [0.3, 0.8, 1.0] {
            let a = means::hardy_mean(&f, p, r, &cfg).unwrap().value;
            let b = means::hardy_mean(&g, p, r, &cfg).unwrap().value;
            prop_assert!(common::rel(b, a) < 1e-10 || a < 1e-14);
        }
    }

    #[test]
    fn integral_means_increase_with_radius(c in poly_strategy(10), p in prop::sample::select(vec![1.0, 2.0, 4.0])) {
        let f = AnalyticFunction::polynomial(c);
        let cfg = quad();
        let mut prev_m = 0.0;
        let mut prev_a = 0.0;
        for i in 1..=8 {
            let r = i as f64 / 8.0;
            let m = means::hardy_mean(&f, p, r, &cfg).unwrap().value;
            let a = means::area_mean(&f, p, r, &cfg).unwrap().value;
            // Slack of a few quadrature tolerances.
            let slack = 4.0 * cfg.rel_tol;
            prop_assert!(m >= prev_m * (1.0 - slack));
            prop_assert!(a >= prev_a * (1.0 - slack));
            prop_assert!(a <= m * (1.0 + slack));
            prev_m = m;
            prev_a = a;
        }
    }

    #[test]
    fn exact_and_quadrature_agree(c in poly_strategy(20), r in 0.1..1.0f64) {
        let f = AnalyticFunction::polynomial(c.clone());
        let coeffs = common::dense(&c);
        for (space, which) in [
            (SpaceSpec::Hardy { p: 2.0 }, common::Space2::Hardy),
            (SpaceSpec::Bergman { p: 2.0 }, common::Space2::Bergman),
            (SpaceSpec::Dirichlet, common::Space2::Dirichlet),
        ] {
            let want = common::norm_sq(which, &coeffs, r).sqrt();
            let exact = means::mean_in_space(&f, &space, r, &QuadratureConfig::default()).unwrap().value;
            let quadrature = means::mean_in_space(&f, &space, r, &quad()).unwrap().value;
            prop_assert!(common::rel(exact, want) < 1e-12);
            prop_assert!(common::rel(quadrature, want) < 1e-10);
        }
    }
}

#[test]
fn area_mean_matches_tensor_quadrature() {
    // Zero-free on the closed disc, so |f|^p is smooth for the oracle.
    let c = vec![
        Complex::new(3.0, -0.2),
        Complex::new(1.0, 0.5),
        Complex::new(0.0, 0.0),
        Complex::new(-0.7, 0.1),
        Complex::new(0.2, 0.9),
    ];
    let f = AnalyticFunction::polynomial(c.clone());
    for p in [1.0, 2.0, 3.0, 4.0] {
        for r in [0.4, 1.0] {
            let got = means::area_mean(&f, p, r, &quad()).unwrap().value;
            let want = area_oracle(&c, p, r);
            assert!(common::rel(got, want) < 1e-8, "p={p} r={r}: {got} vs {want}");
        }
    }
}

#[test]
fn monomial_table() {
    let cfg = QuadratureConfig::default();
    for n in [0u32, 1, 3, 7] {
        let f = AnalyticFunction::monomial(n);
        for r in [0.25f64, 0.75, 1.0] {
            let rn = r.powi(n as i32);
            assert_relative_eq!(means::sup_mean(&f, r, &cfg).unwrap().value, rn, max_relative = 1e-12);
            let d = means::dirichlet_mean(&f, r, &cfg).unwrap().value;
            let want = if n == 0 { 1.0 } else { (n as f64).sqrt() * rn };
            assert_relative_eq!(d, want, max_relative = 1e-12);
        }
    }
}

#[test]
fn dilation_gap_of_z_in_every_hardy_space() {
    let z = AnalyticFunction::monomial(1);
    for p in [1.0, 1.5, 3.0, 6.0] {
        for r in [0.2, 0.99] {
            let g = means::dilation_gap(&z, r, &SpaceSpec::Hardy { p }, &QuadratureConfig::default()).unwrap();
            assert_relative_eq!(g.value, 1.0 - r, max_relative = 1e-12);
        }
    }
}

#[test]
fn binomial_hardy_norm() {
    // Σ binom(1/2, n)² = binom(1, 1/2) = 4/π.
    let f = AnalyticFunction::binomial_power(0.5);
    let n = means::space_norm(&f, &SpaceSpec::Hardy { p: 2.0 }, &QuadratureConfig::default()).unwrap();
    assert_relative_eq!(n.value, (4.0 / std::f64::consts::PI).sqrt(), max_relative = 1e-9);
}

#[test]
fn lacunary_norms_match_coefficient_sums() {
    let cfg = QuadratureConfig::default();
    let f = AnalyticFunction::lacunary(0.5);
    let c = common::lacunary(0.5, 62);
    let h = means::space_norm(&f, &SpaceSpec::Hardy { p: 2.0 }, &cfg).unwrap().value;
    assert_relative_eq!(h, common::hardy2_sq(&c, 1.0).sqrt(), max_relative = 1e-9);
    let a = means::space_norm(&f, &SpaceSpec::Bergman { p: 2.0 }, &cfg).unwrap().value;
    assert_relative_eq!(a, common::bergman2_sq(&c, 1.0).sqrt(), max_relative = 1e-9);
    // Dirichlet weights 2^j |a_j|² = 1: the norm diverges.
    assert!(matches!(
        means::space_norm(&f, &SpaceSpec::Dirichlet, &cfg),
        Err(Error::DivergentNorm(_)) | Err(Error::NotInSpace(_))
    ));
}

#[test]
fn geometric_is_not_in_hardy_two() {
    let r = means::space_norm(&AnalyticFunction::geometric(), &SpaceSpec::Hardy { p: 2.0 }, &QuadratureConfig::default());
    assert!(r.is_err());
}

#[test]
fn invalid_arguments_are_rejected() {
    let f = AnalyticFunction::monomial(2);
    let cfg = QuadratureConfig::default();
    assert!(means::hardy_mean(&f, 0.5, 0.5, &cfg).is_err());
    assert!(means::hardy_mean(&f, 2.0, -0.1, &cfg).is_err());
    assert!(means::hardy_mean(&f, 2.0, 1.5, &cfg).is_err());
    assert!(matches!(
        means::coefficient_norm_oracle(&f, &SpaceSpec::Hardy { p: 1.0 }),
        Err(Error::UnsupportedSpace(_))
    ));
}

#[test]
fn modulus_grids_nest() {
    let g = means::modulus_grid(0.5, 16);
    assert_eq!(g[0], 0.5);
    assert!(g.iter().all(|&t| t > 0.0 && t <= 0.5));
    let half = means::modulus_grid(0.25, 16);
    assert!(half.iter().all(|t| g.contains(t)));
}
