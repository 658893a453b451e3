use meanlip::weights::{self, Weight, WeightForm};
use meanlip::Error;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn power_constants_follow_the_closed_forms() {
    for alpha in [0.1, 0.3, 0.6, 0.9] {
        let c = weights::classify_weight(&Weight::power(alpha).unwrap()).unwrap();
        assert!(c.admissible, "{alpha}");
        assert!(rel(c.dini_constant, 1.0 / alpha) < 0.05);
        assert!(rel(c.condition_b_constant, 1.0 / (1.0 - alpha)) < 0.05);
    }
}

#[test]
fn power_log_dini_constant_is_bracketed() {
    // With L = log(e/s), integrating by parts gives
    // ∫_0^t s^{-1/2} L^{1/2} ds = 2 t^{1/2} L(t)^{1/2} + ∫_0^t s^{-1/2} L^{-1/2} ds,
    // so the Dini ratio lies in [2, 2 + 2/L(t)] ⊂ [2, 4].
    let c = weights::classify_weight(&Weight::power_log(0.5, 0.5).unwrap()).unwrap();
    assert!(c.admissible);
    assert!(c.dini_constant >= 2.0 && c.dini_constant <= 4.0, "{}", c.dini_constant);
}

#[test]
fn decreasing_weights_are_rejected() {
    // t^{1/2} log(e/t) decreases on (1/e, 1).
    assert!(matches!(Weight::power_log(0.5, 1.0), Err(Error::InvalidWeight(_))));
}

#[test]
fn boundary_weights_are_dini_only() {
    for w in [Weight::power(1.0).unwrap(), Weight::power_log(1.0, 1.0).unwrap(), Weight::power_log(1.0, -2.0).unwrap()] {
        let c = weights::classify_weight(&w).unwrap();
        assert!(c.dini, "{}", w.label());
        assert!(!c.condition_b && !c.admissible, "{}", w.label());
    }
}

#[test]
fn scaling_changes_nothing_but_the_label() {
    let w = Weight::power(0.4).unwrap();
    let a = weights::classify_weight(&w).unwrap();
    let b = weights::classify_weight(&w.scaled(7.5).unwrap()).unwrap();
    assert_eq!(a.admissible, b.admissible);
    assert!(rel(b.dini_constant, a.dini_constant) < 1e-9);
    assert!(rel(b.condition_b_constant, a.condition_b_constant) < 1e-9);
    assert_eq!(weights::eval_weight(&w.scaled(2.0).unwrap(), 0.25).unwrap(), 2.0 * 0.25f64.powf(0.4));
}

#[test]
fn sampled_weights_are_advisory() {
    let samples: Vec<[f64; 2]> = (1..64).map(|i| {
        let t = i as f64 / 64.0;
        [t, t.sqrt()]
    }).collect();
    let c = weights::classify_weight(&Weight::custom(samples).unwrap()).unwrap();
    assert!(c.advisory);
    assert!(c.admissible);
    assert!(rel(c.dini_constant, 2.0) < 0.1);
}

#[test]
fn invalid_weights_are_rejected() {
    assert!(matches!(Weight::power(0.0), Err(Error::InvalidWeight(_))));
    assert!(matches!(Weight::power_log(0.0, 1.0), Err(Error::InvalidWeight(_))));
    assert!(Weight::custom(vec![[0.0, 0.0], [0.5, 0.3], [1.0, 0.2]]).is_err());
    assert!(Weight::custom(vec![[0.0, 0.1], [1.0, 1.0]]).is_err());
    assert!(Weight::power(0.5).unwrap().scaled(-1.0).is_err());
}

#[test]
fn parsing() {
    let w = weights::parse_weight("power:0.5").unwrap();
    assert_eq!(w.form, WeightForm::Power { alpha: 0.5 });
    let w = weights::parse_weight("powerlog:1,1*3").unwrap();
    assert_eq!(w.form, WeightForm::PowerLog { alpha: 1.0, beta: 1.0 });
    assert_eq!(w.scale, 3.0);
    let json = serde_json::to_string(&w).unwrap();
    assert_eq!(weights::parse_weight(&json).unwrap(), w);
    assert!(matches!(weights::parse_weight("cubic:2"), Err(Error::Spec(_))));
}
