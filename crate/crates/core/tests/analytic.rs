mod common;

use meanlip::{AnalyticFunction, Complex, DiscPoint, Error, FunctionSpec};

fn horner(c: &[Complex], z: Complex) -> Complex {
    c.iter().rev().fold(Complex::new(0.0, 0.0), |acc, a| acc * z + a)
}

fn sample_points() -> Vec<Complex> {
    [(0.0, 0.0), (0.3, 1.0), (0.7, -2.0), (0.95, 2.5), (0.5, 3.1)]
        .iter()
        .map(|&(r, t)| Complex::from_polar(r, t))
        .collect()
}

fn close(a: Complex, b: Complex, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

#[test]
fn polynomial_eval_and_derivative() {
    let c = vec![Complex::new(1.0, -1.0), Complex::new(0.5, 0.0), Complex::new(0.0, 2.0), Complex::new(-3.0, 0.25)];
    let f = AnalyticFunction::polynomial(c.clone());
    let d: Vec<Complex> = (1..c.len()).map(|n| c[n] * n as f64).collect();
    for z in sample_points() {
        assert!(close(f.eval_at(z).unwrap(), horner(&c, z), 1e-14));
        assert!(close(f.derivative().eval_at(z).unwrap(), horner(&d, z), 1e-14));
    }
}

#[test]
fn dilation_rotation_and_division() {
    let f = AnalyticFunction::polynomial(vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(0.5, 0.5)]);
    let g = f.divide_by_z().unwrap();
    for z in sample_points() {
        let fz = f.eval_at(z).unwrap();
        assert!(close(f.dilate(0.6).unwrap().eval_at(z).unwrap(), f.eval_at(z * 0.6).unwrap(), 1e-14));
        let rotated = f.rotate(0.7).eval_at(z).unwrap();
        assert!(close(rotated, f.eval_at(z * Complex::from_polar(1.0, 0.7)).unwrap(), 1e-14));
        if z.norm() > 0.0 {
            assert!(close(g.eval_at(z).unwrap() * z, fz, 1e-14));
        }
    }
    let h = AnalyticFunction::constant(2.0).add(&f);
    assert!(matches!(h.divide_by_z(), Err(Error::NonvanishingAtZero(_))));
}

#[test]
fn closed_forms_match_elementary_functions() {
    let one = Complex::new(1.0, 0.0);
    let b = AnalyticFunction::binomial_power(0.5);
    let g = AnalyticFunction::geometric();
    let l = AnalyticFunction::log_singularity();
    for z in sample_points() {
        assert!(close(b.eval_at(z).unwrap(), (one - z).powf(0.5), 1e-12));
        assert!(close(g.eval_at(z).unwrap(), one / (one - z), 1e-12));
        assert!(close(l.eval_at(z).unwrap(), -(one - z).ln(), 1e-12));
    }
}

#[test]
fn lacunary_matches_partial_sums() {
    let f = AnalyticFunction::lacunary(0.5);
    let c = common::lacunary(0.5, 62);
    for z in sample_points() {
        let want: Complex = c.iter().map(|(m, a)| a * z.powf(*m as f64)).sum();
        assert!(close(f.eval_at(z).unwrap(), want, 1e-12), "{z}");
    }
}

#[test]
fn derivative_of_lacunary_streams_scaled_coefficients() {
    let f = AnalyticFunction::lacunary(0.25).derivative();
    let z = Complex::new(0.4, 0.3);
    let want: Complex = common::derivative(&common::lacunary(0.25, 62))
        .iter()
        .map(|(m, a)| a * z.powf(*m as f64))
        .sum();
    assert!(close(f.eval_at(z).unwrap(), want, 1e-12));
}

#[test]
fn disc_points_are_validated() {
    assert!(DiscPoint::new(Complex::new(0.5, 0.5)).is_ok());
    assert!(matches!(DiscPoint::new(Complex::new(1.0, 0.0)), Err(Error::OutsideDisc(_))));
    assert!(DiscPoint::from_polar(1.2, 0.0).is_err());
}

#[test]
fn spec_parsing() {
    for s in ["monomial:3", "lacunary:0.5", "binomial:0.5", "poly:1,0,2", "constant:7", "geometric", "log"] {
        let spec = FunctionSpec::parse_short(s).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: FunctionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        spec.build().unwrap();
    }
    let f = FunctionSpec::parse_short("poly:1,0,2").unwrap().build().unwrap();
    assert_eq!(f.eval_at(Complex::new(0.5, 0.0)).unwrap(), Complex::new(1.5, 0.0));
    for bad in ["bogus", "monomial:-1", "monomial:1.5", "lacunary", "poly:1,x"] {
        assert!(matches!(FunctionSpec::parse_short(bad), Err(Error::Spec(_))), "{bad}");
    }
}

#[test]
fn boundary_values_of_binomial() {
    let b = AnalyticFunction::binomial_power(0.5);
    let one = Complex::new(1.0, 0.0);
    for t in [0.3, 1.0, 2.0, -2.5] {
        let want = (one - Complex::from_polar(1.0, t)).powf(0.5);
        assert!(close(b.eval_boundary(t).unwrap(), want, 1e-12));
    }
    assert_eq!(b.boundary_singularities(), Some(vec![0.0]));
}
