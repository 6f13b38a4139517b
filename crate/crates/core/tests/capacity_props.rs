use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cqbound::bounds::{equierror_capacity, equierror_channel};
use cqbound::capacities::{
    c1_binary, gaussian_holevo, holevo_binary, holevo_general, max_mutual_information,
    mutual_information,
};
use cqbound::optical::CoherentConstellation;
use cqbound::optimize::simplex_grid;
use cqbound::spectral::{binary_entropy, ensemble_spectrum, von_neumann_entropy};
use cqbound::{DiscreteChannel, GramEnsemble};

#[test]
fn accessible_information_is_strictly_below_holevo() {
    for i in 1..=50 {
        let g = i as f64 / 51.0;
        let gap = holevo_binary(g).unwrap() - c1_binary(g).unwrap();
        assert!(gap > 0.0);
        if (0.05..=0.95).contains(&g) {
            assert!(gap > 1e-6);
        }
    }
}

#[test]
fn general_holevo_matches_binary_closed_form() {
    for i in 0..=20 {
        let g = i as f64 / 20.0;
        let opt = holevo_general(&GramEnsemble::binary(0.5, g).unwrap(), 1e-12).unwrap();
        assert_abs_diff_eq!(opt.value, holevo_binary(g).unwrap(), epsilon = 1e-8);
        if g < 1.0 {
            assert_abs_diff_eq!(opt.prior[0], 0.5, epsilon = 1e-6);
        }
    }
}

#[test]
fn coherent_triple_against_grid_oracle() {
    let a = 0.15f64;
    let c = CoherentConstellation::new(
        vec![Complex64::new(0.0, 0.0), Complex64::new(a, 0.0), Complex64::new(-a, 0.0)],
        vec![1.0 / 3.0; 3],
        a * a,
    )
    .unwrap();
    let e = c.to_ensemble().unwrap();
    let opt = holevo_general(&e, 1e-12).unwrap();
    let grid = simplex_grid(3, 100)
        .into_iter()
        .map(|p| von_neumann_entropy(&ensemble_spectrum(&e.with_prior(p).unwrap()).unwrap()))
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(opt.value >= grid - 1e-12);
    assert!(opt.value - grid < 1e-3);
    let best_pair = holevo_binary((-2.0 * a * a).exp()).unwrap();
    assert!(opt.value >= best_pair - 1e-12);
}

#[test]
fn blahut_arimoto_brackets() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let (nx, ny) = (rng.gen_range(2..6), rng.gen_range(2..6));
        let rows: Vec<Vec<f64>> = (0..nx)
            .map(|_| {
                let r: Vec<f64> = (0..ny).map(|_| rng.gen::<f64>()).collect();
                let s: f64 = r.iter().sum();
                r.iter().map(|x| x / s).collect()
            })
            .collect();
        let ch = DiscreteChannel::new(rows).unwrap();
        let c = max_mutual_information(&ch, 1e-10).unwrap().value;
        assert!(c <= (nx.min(ny) as f64).ln() + 1e-12);
        for _ in 0..10 {
            let w: Vec<f64> = (0..nx).map(|_| rng.gen::<f64>()).collect();
            let t: f64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|x| x / t).collect();
            assert!(mutual_information(&p, &ch).unwrap() <= c + 1e-10);
        }
    }
}

#[test]
fn blahut_arimoto_on_equierror_channel() {
    let ba = max_mutual_information(&equierror_channel(4, 0.1).unwrap(), 1e-12).unwrap().value;
    let closed = 4f64.ln() - 0.1 * 3f64.ln() - binary_entropy(0.1).unwrap();
    assert_abs_diff_eq!(ba, closed, epsilon = 1e-10);
    assert_abs_diff_eq!(equierror_capacity(4.0, 0.1).unwrap(), closed, epsilon = 1e-15);
}

#[test]
fn gaussian_input_dominates_bpsk() {
    for i in 1..=200 {
        let e = i as f64 * 0.01;
        assert!(gaussian_holevo(e).unwrap() >= holevo_binary((-2.0 * e).exp()).unwrap());
    }
    assert_abs_diff_eq!(gaussian_holevo(1.0).unwrap(), 2.0 * std::f64::consts::LN_2, epsilon = 1e-15);
}

#[test]
fn gaussian_small_energy_expansion() {
    for (e, limit) in [(1e-3f64, 0.05), (1e-4, 0.02), (1e-5, 0.01)] {
        let r = (gaussian_holevo(e).unwrap() - (e * (1.0 / e).ln() + e)) / e;
        assert!(r.abs() < limit, "{e}: {r}");
    }
}
