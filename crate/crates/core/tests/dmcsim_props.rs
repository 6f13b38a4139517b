use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cqbound::capacities::max_mutual_information;
use cqbound::dmcsim::{
    brute_force_cn, lemma2_check, random_inner_code, random_inner_code_in_stream,
    repetition_code, superchannel_exact, superchannel_mc, InnerCode,
};
use cqbound::spectral::binary_entropy;
use cqbound::DiscreteChannel;

fn generic_channel(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> DiscreteChannel {
    let rows = (0..nx)
        .map(|_| {
            let r: Vec<f64> = (0..ny).map(|_| rng.gen::<f64>() + 0.05).collect();
            let s: f64 = r.iter().sum();
            r.iter().map(|x| x / s).collect()
        })
        .collect();
    DiscreteChannel::new(rows).unwrap()
}

#[test]
fn exact_and_monte_carlo_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for k in 0..20u64 {
        let (nx, ny) = (rng.gen_range(2..4), rng.gen_range(2..4));
        let ch = generic_channel(&mut rng, nx, ny);
        let n = rng.gen_range(1..5);
        let m = rng.gen_range(2..6);
        let code = random_inner_code(&vec![1.0 / nx as f64; nx], n, m, k).unwrap();
        let exact = superchannel_exact(&code, &ch).unwrap();
        let mc = superchannel_mc(&code, &ch, 20_000, 100 + k).unwrap();
        assert!(
            (mc.pe - exact.pe_uniform).abs() <= 3.0 * mc.half_width.max(1e-12),
            "case {k}: {} vs {}",
            mc.pe,
            exact.pe_uniform
        );
        let c = max_mutual_information(&ch, 1e-12).unwrap().value;
        let sc_c = max_mutual_information(&exact.channel, 1e-7).unwrap().value;
        assert!(sc_c / n as f64 <= c + 1e-7);
        assert!(lemma2_check(&exact).unwrap().holds);
    }
}

#[test]
fn repetition_code_on_bsc() {
    let p: f64 = 0.11;
    let bsc = DiscreteChannel::bsc(p).unwrap();
    let code = repetition_code(3, 2, 2).unwrap();
    let exact = superchannel_exact(&code, &bsc).unwrap();
    let closed = p.powi(3) + 3.0 * p * p * (1.0 - p);
    assert_abs_diff_eq!(exact.pe_uniform, closed, epsilon = 1e-12);
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let want = if a == b { 1.0 - closed } else { closed };
        assert_abs_diff_eq!(exact.channel.prob(a, b), want, epsilon = 1e-12);
    }
    let a = superchannel_mc(&code, &bsc, 100_000, 5).unwrap();
    let b = superchannel_mc(&code, &bsc, 100_000, 5).unwrap();
    assert_eq!(a, b);
    assert!((a.pe - closed).abs() <= 3.0 * a.half_width);
}

#[test]
fn decoding_is_invariant_under_codeword_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for k in 0..40 {
        let ch = generic_channel(&mut rng, 3, 3);
        let code = random_inner_code(&[0.3, 0.3, 0.4], 3, 4, k).unwrap();
        // codewords with equal composition tie under a memoryless channel
        let mut types: Vec<Vec<usize>> = code
            .codewords()
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort();
                c
            })
            .collect();
        types.sort();
        types.dedup();
        if types.len() < 4 {
            continue;
        }
        let base = superchannel_exact(&code, &ch).unwrap();
        let perm = [2usize, 0, 3, 1];
        let permuted = InnerCode::new(perm.iter().map(|&i| code.codewords()[i].clone()).collect(), 3).unwrap();
        let sc = superchannel_exact(&permuted, &ch).unwrap();
        for (a, &pa) in perm.iter().enumerate() {
            for (b, &pb) in perm.iter().enumerate() {
                assert_abs_diff_eq!(sc.channel.prob(a, b), base.channel.prob(pa, pb), epsilon = 1e-12);
            }
        }
        checked += 1;
    }
    assert!(checked >= 5);
}

#[test]
fn random_code_symbol_frequencies() {
    let code = random_inner_code(&[0.5, 0.5], 10_000, 2, 11).unwrap();
    for cw in code.codewords() {
        let ones = cw.iter().filter(|&&x| x == 1).count() as f64;
        assert!((ones - 5000.0).abs() <= 3.0 * 50.0);
    }
    assert_ne!(
        random_inner_code_in_stream(&[0.5, 0.5], 20, 2, 11, 0).unwrap(),
        random_inner_code_in_stream(&[0.5, 0.5], 20, 2, 11, 1).unwrap()
    );
}

#[test]
fn brute_force_values() {
    let bsc = DiscreteChannel::bsc(0.11).unwrap();
    let c = std::f64::consts::LN_2 - binary_entropy(0.11).unwrap();
    let one = brute_force_cn(&bsc, 1, 2).unwrap();
    assert_abs_diff_eq!(one.cn, c, epsilon = 1e-9);
    let two = brute_force_cn(&bsc, 2, 2).unwrap();
    assert!(two.cn / 2.0 <= c + 1e-9);
    assert!(two.cn >= one.cn - 1e-12);
    assert_eq!(two.decoder.len(), 4);
}
