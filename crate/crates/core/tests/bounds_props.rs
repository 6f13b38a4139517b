use std::f64::consts::LN_2;

use approx::assert_abs_diff_eq;

use cqbound::bounds::{
    bpsk_simplified_bound, cor1_bpsk_bound, sweep, thm1_bound, thm1_evaluator, thm2_bound,
    thm2_evaluator, thm3_bound, BoundModel, RateBound,
};
use cqbound::capacities::{holevo_binary, max_mutual_information};
use cqbound::exponents::{quantum_dispersion, ExponentModel, QuantumExponent};
use cqbound::optical::bpsk_ensemble;
use cqbound::spectral::{binary_entropy, binary_spectrum};
use cqbound::{DiscreteChannel, Error, GramEnsemble};

fn rate_grid_oracle<M: ExponentModel>(m: &M, coef: f64, n: u64) -> f64 {
    let c = m.capacity().value;
    let steps = (c / 1e-5).floor() as usize;
    (1..=steps)
        .map(|i| {
            let r = i as f64 * 1e-5;
            let e = m.exponent(r).unwrap().exponent;
            (1.0 - (coef * (-(n as f64) * e).exp()).min(1.0)) * r - LN_2 / n as f64
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn orthogonal_pair_at_n1() {
    let p = thm1_bound(&GramEnsemble::binary(0.5, 0.0).unwrap(), 1).unwrap();
    // 2e^{-(log 2 - R)} = e^R ≥ 1 for every admissible R
    assert_eq!(p.rate_lb, -LN_2);
    assert_eq!(p.pe_bound, Some(1.0));
}

#[test]
fn thm1_matches_rate_grid() {
    let e = GramEnsemble::binary(0.5, 0.5).unwrap();
    let model = QuantumExponent::new(&e).unwrap();
    let oracle = rate_grid_oracle(&model, 2.0, 100);
    let p = thm1_bound(&e, 100).unwrap();
    assert!(p.rate_lb >= oracle - 1e-12);
    assert!(p.rate_lb - oracle < 1e-6);
}

#[test]
fn thm2_noiseless_at_n1() {
    let p = thm2_bound(&DiscreteChannel::bsc(0.0).unwrap(), 1).unwrap();
    let oracle = (1..(LN_2 / 1e-5) as usize)
        .map(|i| {
            let r = i as f64 * 1e-5;
            (1.0 - (r - LN_2).exp()) * r - LN_2
        })
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(p.rate_lb < 0.0);
    assert_abs_diff_eq!(p.rate_lb, oracle, epsilon = 1e-9);
}

#[test]
fn thm2_matches_rate_grid() {
    let ch = DiscreteChannel::bsc(0.11).unwrap();
    let ev = thm2_evaluator(&ch).unwrap();
    let oracle = rate_grid_oracle(ev.model(), 1.0, 50);
    let p = ev.at(50).unwrap();
    assert!(p.rate_lb >= oracle - 1e-12);
    assert!(p.rate_lb - oracle < 1e-6);
}

#[test]
fn bounds_stay_below_capacity() {
    for gamma in [0.0, 0.3, 0.7, (-0.02f64).exp()] {
        let ev = thm1_evaluator(&GramEnsemble::binary(0.5, gamma).unwrap()).unwrap();
        let c = holevo_binary(gamma).unwrap();
        for n in [1, 10, 1000, 100_000, 10_000_000, 1_000_000_000] {
            let p = ev.at(n).unwrap();
            assert!(p.rate_lb <= c + 1e-9);
            assert!(p.rate_lb <= p.r_star);
            assert!((0.0..=1.0).contains(&p.pe_bound.unwrap()));
        }
    }
    let ch = DiscreteChannel::bsc(0.11).unwrap();
    let c = max_mutual_information(&ch, 1e-12).unwrap().value;
    let curve = sweep(&BoundModel::Dmc(ch), &[10, 100, 1000, 10_000, 100_000, 1_000_000]).unwrap();
    assert!(curve.is_nondecreasing(1e-12));
    assert!(curve.points().all(|p| p.rate_lb <= c + 1e-9));
    let last = curve.points().last().unwrap().rate_lb;
    assert!(last / c > 0.99);
    assert_abs_diff_eq!(c, LN_2 - binary_entropy(0.11).unwrap(), epsilon = 1e-10);
}

#[test]
fn error_coefficient_is_detectable() {
    let e = GramEnsemble::binary(0.5, 0.5).unwrap();
    let two = RateBound::new(QuantumExponent::new(&e).unwrap(), 2.0).unwrap().at(20).unwrap();
    let one = RateBound::new(QuantumExponent::new(&e).unwrap(), 1.0).unwrap().at(20).unwrap();
    assert!(one.rate_lb - two.rate_lb > 1e-3);
    let ch = DiscreteChannel::bsc(0.11).unwrap();
    let classical = thm2_bound(&ch, 20).unwrap();
    let doubled = RateBound::new(cqbound::exponents::ClassicalExponent::new(&ch).unwrap(), 2.0)
        .unwrap()
        .at(20)
        .unwrap();
    assert!(classical.rate_lb - doubled.rate_lb > 1e-3);
}

#[test]
fn closed_form_bpsk_is_below_numerical_bound() {
    let ev = thm1_evaluator(&bpsk_ensemble(0.01, 0.5).unwrap()).unwrap();
    for n in [500, 800, 1500, 2400, 5000, 9100, 15_000, 20_000] {
        let cor = cor1_bpsk_bound(0.01, n).unwrap();
        let num = ev.at(n).unwrap();
        assert!(cor.rate_lb <= num.rate_lb + 1e-12, "n={n}");
        let s = cor.s_star.unwrap();
        assert!((0.0..=1.0).contains(&s));
    }
}

#[test]
fn closed_form_bpsk_leaves_its_regime_at_large_n() {
    // R* tends to E log(1/E) + E, which exceeds the exact BPSK capacity.
    assert!(matches!(cor1_bpsk_bound(0.01, 100_000_000), Err(Error::Regime(_))));
    let ev = thm1_evaluator(&bpsk_ensemble(0.01, 0.5).unwrap()).unwrap();
    let pie = ev.at(100_000_000).unwrap().rate_lb / 0.01;
    assert!((pie / 5.554 - 1.0).abs() < 0.02);
}

#[test]
fn simplified_bpsk_values() {
    let e = 0.01f64;
    let l = (1.0 / e).ln();
    let n = (l * l * l.ln().powi(2) / e).round() as u64;
    let v = bpsk_simplified_bound(e, n).unwrap();
    let ne = n as f64 * e;
    let direct = e * l * (1.0 - ((ne * ne.ln()).ln() / ne).sqrt()) + e;
    assert_abs_diff_eq!(v, direct, epsilon = 1e-15);
    assert!(v < e * l + e);
    let e = 0.001f64;
    assert!(matches!(bpsk_simplified_bound(e, 10_000_000), Err(Error::Regime(_))));
    let v = bpsk_simplified_bound(e, 1_000_000).unwrap();
    let (l, ne) = ((1.0 / e).ln(), 1000.0f64);
    assert_abs_diff_eq!(v, e * l * (1.0 - ((ne * ne.ln()).ln() / ne).sqrt()) + e, epsilon = 1e-15);
}

#[test]
fn dispersion_form_against_closed_form_bpsk() {
    let gamma = (-0.02f64).exp();
    let c = holevo_binary(gamma).unwrap();
    let v = quantum_dispersion(&binary_spectrum(0.5, gamma).unwrap());
    let t3 = thm3_bound(c, v, 10_000).unwrap() / 0.01;
    let c1 = cor1_bpsk_bound(0.01, 10_000).unwrap().rate_lb / 0.01;
    assert!((t3 / c1 - 1.0).abs() < 0.15, "{t3} vs {c1}");
}

fn n_at_fraction(c: f64, v: f64, frac: f64) -> u64 {
    let (mut lo, mut hi) = (1u64, 1u64 << 50);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match thm3_bound(c, v, mid) {
            Ok(r) if r >= frac * c => hi = mid,
            _ => lo = mid,
        }
    }
    hi
}

#[test]
fn dispersion_form_scales_with_v_over_c2() {
    let a = n_at_fraction(0.3, 10.0, 0.9) as f64;
    let b = n_at_fraction(0.3, 40.0, 0.9) as f64;
    assert!((b / a / 4.0 - 1.0).abs() < 0.01, "{}", b / a);
    let c = n_at_fraction(0.6, 160.0, 0.9) as f64;
    assert!((c / b - 1.0).abs() < 0.01);
}

#[test]
fn small_sweeps_are_monotone() {
    let curve = sweep(&BoundModel::Binary { gamma: 0.0 }, &[1, 10, 100]).unwrap();
    assert!(curve.is_nondecreasing(1e-12));
    let curve = sweep(&BoundModel::Bpsk { energy: 0.01 }, &[500, 1000, 2400, 5000, 9100, 20_000]).unwrap();
    assert!(curve.is_nondecreasing(1e-12));
    let pies: Vec<f64> = curve.points().map(|p| p.rate_lb / 0.01).collect();
    assert!((pies[2] - 3.0).abs() < 0.05 && (pies[4] - 4.0).abs() < 0.05);
}

#[test]
fn closed_form_bpsk_monotone_up_to_ten_over_e_squared() {
    for e in [1e-2f64, 1e-3] {
        let mut n = ((1.0 / e).ln() / e).ceil() as u64;
        let mut prev = f64::NEG_INFINITY;
        while (n as f64) <= 10.0 / (e * e) {
            let v = cor1_bpsk_bound(e, n).unwrap().rate_lb;
            assert!(v >= prev - 1e-12, "E={e} n={n}");
            prev = v;
            n = (n as f64 * 1.02).ceil() as u64;
        }
    }
    // past that the closed form turns over while the numerical bound keeps rising
    let a = cor1_bpsk_bound(0.01, 300_000).unwrap().rate_lb;
    let b = cor1_bpsk_bound(0.01, 1_000_000).unwrap().rate_lb;
    assert!(b < a);
}
