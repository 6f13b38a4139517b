use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use cqbound::capacities::{gaussian_holevo, holevo_general};
use cqbound::optical::{
    bpsk_ensemble, c1_bpsk, c_bpsk, coherent_overlap, lemma1_mutual_information,
    lemma1_optimal_binary,
};

#[test]
fn ordering_chain() {
    for e in [1e-2, 1e-3] {
        let l = lemma1_optimal_binary(e).unwrap();
        let c1 = c1_bpsk(e).unwrap().exact;
        let c = c_bpsk(e).unwrap().exact;
        assert!(c1 <= l.c1_exact && l.c1_exact <= c && c <= gaussian_holevo(e).unwrap());
    }
}

#[test]
fn optimum_lies_in_the_predicted_bracket() {
    for e in [1e-3f64, 1e-4] {
        let l = (1.0 / e).ln();
        let slope = |q: f64| {
            let h = q * 1e-6;
            (lemma1_mutual_information(e, q + h).unwrap() - lemma1_mutual_information(e, q - h).unwrap()) / (2.0 * h)
        };
        assert!(slope(0.5 * e * l.sqrt()) > 0.0);
        assert!(slope(0.5 * e * l) < 0.0);
        let q = lemma1_optimal_binary(e).unwrap().q_star;
        assert!(q > 0.5 * e * l.sqrt() && q < 0.5 * e * l);
    }
}

#[test]
fn amplitudes_spend_the_budget() {
    for e in [0.05, 1e-2, 1e-3, 1e-4, 1e-5] {
        let r = lemma1_optimal_binary(e).unwrap();
        assert_abs_diff_eq!((1.0 - r.q_star) * r.alpha0.powi(2) + r.q_star * r.alpha1.powi(2), e, epsilon = 1e-9);
        assert!(r.alpha0 * r.alpha1 <= 0.0);
    }
    assert!(lemma1_optimal_binary(0.1).is_err());
    assert!(lemma1_optimal_binary(0.0).is_err());
}

#[test]
fn lemma1_asymptotic_value() {
    let e = 0.01f64;
    let l = (1.0 / e).ln();
    assert_abs_diff_eq!(0.5 * e * l, 0.023026, epsilon = 1e-6);
    let r = lemma1_optimal_binary(e).unwrap();
    assert_abs_diff_eq!(r.c1_asymptotic, e * l - e * l.ln(), epsilon = 1e-15);
}

#[test]
fn bpsk_limits() {
    assert_abs_diff_eq!(holevo_general(&bpsk_ensemble(0.0, 0.5).unwrap(), 1e-10).unwrap().value, 0.0, epsilon = 1e-12);
    assert_eq!(c_bpsk(0.0).unwrap().exact, 0.0);
    assert_abs_diff_eq!(c_bpsk(20.0).unwrap().exact, std::f64::consts::LN_2, epsilon = 1e-12);
    let g = bpsk_ensemble(0.01, 0.5).unwrap();
    assert_abs_diff_eq!(g.gram().get(0, 1).re, (-0.02f64).exp(), epsilon = 1e-15);
}

proptest! {
    #[test]
    fn overlap_magnitude_depends_on_difference_only(
        a in (-2.0f64..2.0, -2.0f64..2.0),
        b in (-2.0f64..2.0, -2.0f64..2.0),
        t in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let (a, b, t) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1), Complex64::new(t.0, t.1));
        let m = coherent_overlap(a, b).norm();
        prop_assert!((m - coherent_overlap(b, a).norm()).abs() < 1e-14);
        prop_assert!((m - coherent_overlap(a + t, b + t).norm()).abs() < 1e-12);
        prop_assert!((m - (-0.5 * (a - b).norm_sqr()).exp()).abs() < 1e-14);
    }
}
