//! Concatenated coding over classical DMCs: random inner codes, MAP inner
//! decoding, exact and Monte-Carlo superchannels, and an exhaustive `C_N`
//! oracle for tiny instances.
//!
//! Randomness comes from ChaCha8 seeded with the user seed; trial `t` (or
//! candidate `t`) uses stream `t`, so results do not depend on scheduling.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::equierror_capacity;
use crate::capacities::{max_mutual_information, DiscreteChannel};
use crate::error::{Error, Result};
use crate::spectral::check_prior;

pub const MAX_CODE_SYMBOLS: usize = 1_000_000;
pub const MAX_EXACT_OUTPUTS: usize = 1_000_000;
pub const MAX_BRUTE_FORCE: f64 = 1e7;
pub const MIN_TRIALS: u64 = 100;
const LEMMA2_TOL: f64 = 1e-12;
const EXACT_CHUNK: usize = 4096;

/// `m` codewords of length `n` over an input alphabet of size `alphabet`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InnerCode {
    codewords: Vec<Vec<usize>>,
    alphabet: usize,
}

impl InnerCode {
    pub fn new(codewords: Vec<Vec<usize>>, alphabet: usize) -> Result<Self> {
        if codewords.len() < 2 {
            return Err(Error::domain("an inner code needs at least 2 codewords"));
        }
        let n = codewords[0].len();
        if n == 0 || codewords.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("codewords must share a positive length".into()));
        }
        if codewords.iter().flatten().any(|&x| x >= alphabet) {
            return Err(Error::Invalid(format!("symbol outside alphabet of size {alphabet}")));
        }
        Ok(InnerCode {
            codewords,
            alphabet,
        })
    }

    pub fn codewords(&self) -> &[Vec<usize>] {
        &self.codewords
    }

    pub fn n(&self) -> usize {
        self.codewords[0].len()
    }

    pub fn m(&self) -> usize {
        self.codewords.len()
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// `log(m)/n` nats per channel use.
    pub fn effective_rate(&self) -> f64 {
        (self.m() as f64).ln() / self.n() as f64
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Codeword symbols drawn i.i.d. from `prior`.
pub fn random_inner_code(prior: &[f64], n: usize, m: usize, seed: u64) -> Result<InnerCode> {
    random_inner_code_in_stream(prior, n, m, seed, 0)
}

/// As [`random_inner_code`], drawing from stream `stream` of `seed`.
pub fn random_inner_code_in_stream(
    prior: &[f64],
    n: usize,
    m: usize,
    seed: u64,
    stream: u64,
) -> Result<InnerCode> {
    check_prior(prior)?;
    if n == 0 || m < 2 {
        return Err(Error::domain(format!("need n ≥ 1 and m ≥ 2, got n={n}, m={m}")));
    }
    if n.saturating_mul(m) > MAX_CODE_SYMBOLS {
        return Err(Error::Feasibility(format!(
            "code with {n}×{m} symbols exceeds {MAX_CODE_SYMBOLS}"
        )));
    }
    let dist = WeightedIndex::new(prior).map_err(|e| Error::Invalid(e.to_string()))?;
    let mut rng = rng_for(seed, stream);
    let codewords = (0..m)
        .map(|_| (0..n).map(|_| dist.sample(&mut rng)).collect())
        .collect();
    InnerCode::new(codewords, prior.len())
}

/// Codeword `j` repeats symbol `j` `n` times.
pub fn repetition_code(n: usize, m: usize, alphabet: usize) -> Result<InnerCode> {
    if m > alphabet {
        return Err(Error::domain(format!(
            "repetition code with {m} words needs at least {m} input symbols"
        )));
    }
    InnerCode::new((0..m).map(|j| vec![j; n]).collect(), alphabet)
}

/// Channel from inner message to inner decision, with its error probability
/// under uniformly distributed messages.
#[derive(Debug, Clone, PartialEq)]
pub struct Superchannel {
    pub channel: DiscreteChannel,
    pub pe_uniform: f64,
}

impl Superchannel {
    pub fn from_channel(channel: DiscreteChannel) -> Result<Self> {
        let m = channel.inputs();
        if channel.outputs() != m {
            return Err(Error::Dimension("a superchannel must be square".into()));
        }
        let off: f64 = (0..m)
            .map(|j| (0..m).filter(|&k| k != j).map(|k| channel.prob(j, k)).sum::<f64>())
            .sum();
        Ok(Superchannel {
            channel,
            pe_uniform: off / m as f64,
        })
    }
}

fn check_code_channel(code: &InnerCode, ch: &DiscreteChannel) -> Result<()> {
    if code.alphabet() != ch.inputs() {
        return Err(Error::Dimension(format!(
            "code alphabet {} differs from channel inputs {}",
            code.alphabet(),
            ch.inputs()
        )));
    }
    Ok(())
}

fn output_space(ch: &DiscreteChannel, n: usize) -> Result<usize> {
    let size = (ch.outputs() as f64).powi(n as i32);
    if size > MAX_EXACT_OUTPUTS as f64 {
        return Err(Error::Feasibility(format!(
            "{}^{n} output sequences exceed {MAX_EXACT_OUTPUTS}",
            ch.outputs()
        )));
    }
    Ok(ch.outputs().pow(n as u32))
}

fn decode_digits(mut index: usize, base: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = index % base;
        index /= base;
    }
}

/// MAP decoding under a uniform prior, enumerating every output sequence.
/// Ties go to the lowest message index.
pub fn superchannel_exact(code: &InnerCode, ch: &DiscreteChannel) -> Result<Superchannel> {
    check_code_channel(code, ch)?;
    let (n, m) = (code.n(), code.m());
    let total = output_space(ch, n)?;
    let chunks: Vec<Vec<f64>> = (0..total.div_ceil(EXACT_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; m * m];
            let mut y = vec![0; n];
            let mut lik = vec![0.0; m];
            for idx in c * EXACT_CHUNK..((c + 1) * EXACT_CHUNK).min(total) {
                decode_digits(idx, ch.outputs(), &mut y);
                let mut best = 0;
                for (j, cw) in code.codewords().iter().enumerate() {
                    lik[j] = cw.iter().zip(&y).map(|(&x, &yy)| ch.prob(x, yy)).product();
                    if lik[j] > lik[best] {
                        best = j;
                    }
                }
                for (j, &l) in lik.iter().enumerate() {
                    acc[j * m + best] += l;
                }
            }
            acc
        })
        .collect();
    let mut acc = vec![0.0; m * m];
    for part in &chunks {
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
    }
    let rows = acc
        .chunks(m)
        .map(|r| {
            let s: f64 = r.iter().sum();
            r.iter().map(|v| v / s).collect()
        })
        .collect();
    Superchannel::from_channel(DiscreteChannel::new(rows)?)
}

/// Monte-Carlo estimate of the uniform-prior error probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub pe: f64,
    /// Normal-approximation 95% half-width.
    pub half_width: f64,
    pub trials: u64,
}

fn sample_cdfs(ch: &DiscreteChannel) -> Vec<Vec<f64>> {
    ch.transition()
        .iter()
        .map(|row| {
            let mut acc = 0.0;
            row.iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect()
        })
        .collect()
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

/// Trial `t` sends message `t mod m` through the channel and decodes it by
/// maximum likelihood (ties to the lowest index).
pub fn superchannel_mc(code: &InnerCode, ch: &DiscreteChannel, trials: u64, seed: u64) -> Result<McEstimate> {
    check_code_channel(code, ch)?;
    if trials < MIN_TRIALS {
        return Err(Error::Invalid(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let cdfs = sample_cdfs(ch);
    let log_w: Vec<Vec<f64>> = ch
        .transition()
        .iter()
        .map(|r| r.iter().map(|p| p.ln()).collect())
        .collect();
    let m = code.m() as u64;
    let errors: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t);
            let sent = &code.codewords()[(t % m) as usize];
            let y: Vec<usize> = sent.iter().map(|&x| draw(&cdfs[x], rng.gen::<f64>())).collect();
            let mut best = 0;
            let mut best_ll = f64::NEG_INFINITY;
            for (j, cw) in code.codewords().iter().enumerate() {
                let ll: f64 = cw.iter().zip(&y).map(|(&x, &yy)| log_w[x][yy]).sum();
                if ll > best_ll {
                    best = j;
                    best_ll = ll;
                }
            }
            u64::from(best as u64 != t % m)
        })
        .sum();
    let pe = errors as f64 / trials as f64;
    Ok(McEstimate {
        pe,
        half_width: 1.96 * (pe * (1.0 - pe) / trials as f64).sqrt(),
        trials,
    })
}

/// Superchannel mutual information against the equierror closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Check {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn lemma2_check(sc: &Superchannel) -> Result<Lemma2Check> {
    let lhs = match max_mutual_information(&sc.channel, LEMMA2_TOL) {
        Ok(o) => o.value,
        // lower end of the BA bracket: still a valid certificate
        Err(Error::NonConvergence { value, .. }) => value,
        Err(e) => return Err(e),
    };
    let rhs = equierror_capacity(sc.channel.inputs() as f64, sc.pe_uniform.clamp(0.0, 1.0))?;
    Ok(Lemma2Check {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-9,
    })
}

/// Best superchannel capacity over all codes and all deterministic decoders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CnResult {
    pub cn: f64,
    pub code: Vec<Vec<usize>>,
    /// Decision for each output sequence, in lexicographic order.
    pub decoder: Vec<usize>,
}

/// Exhaustive `C_N` for hard-decision inner decoders.
pub fn brute_force_cn(ch: &DiscreteChannel, n: usize, m: usize) -> Result<CnResult> {
    if n == 0 || m < 2 {
        return Err(Error::domain(format!("need n ≥ 1 and m ≥ 2, got n={n}, m={m}")));
    }
    let (nx, ny) = (ch.inputs(), ch.outputs());
    let seqs = (ny as f64).powi(n as i32);
    let log_size = (n * m) as f64 * (nx as f64).ln() + seqs * (m as f64).ln();
    if log_size > MAX_BRUTE_FORCE.ln() + 1e-9 {
        return Err(Error::Feasibility(format!(
            "{nx}^{} codes × {m}^{seqs} decoders exceed {MAX_BRUTE_FORCE}",
            n * m
        )));
    }
    let seqs = seqs as usize;
    let codes = nx.pow((n * m) as u32);
    let decoders = m.pow(seqs as u32);

    // likelihood of every output sequence for every input word
    let words = nx.pow(n as u32);
    let mut lik = vec![vec![0.0; seqs]; words];
    let (mut x, mut y) = (vec![0; n], vec![0; n]);
    for (w, row) in lik.iter_mut().enumerate() {
        decode_digits(w, nx, &mut x);
        for (s, v) in row.iter_mut().enumerate() {
            decode_digits(s, ny, &mut y);
            *v = x.iter().zip(&y).map(|(&a, &b)| ch.prob(a, b)).product();
        }
    }

    let per_code: Vec<Result<(f64, usize)>> = (0..codes)
        .into_par_iter()
        .map(|c| {
            let mut wordsel = vec![0; m];
            decode_digits(c, words, &mut wordsel);
            let mut dec = vec![0; seqs];
            let mut best = (f64::NEG_INFINITY, 0);
            for d in 0..decoders {
                decode_digits(d, m, &mut dec);
                let rows = wordsel
                    .iter()
                    .map(|&w| {
                        let mut r = vec![0.0; m];
                        for (s, &k) in dec.iter().enumerate() {
                            r[k] += lik[w][s];
                        }
                        let t: f64 = r.iter().sum();
                        r.iter().map(|v| v / t).collect()
                    })
                    .collect();
                let v = max_mutual_information(&DiscreteChannel::new(rows)?, LEMMA2_TOL)?.value;
                if v > best.0 {
                    best = (v, d);
                }
            }
            Ok(best)
        })
        .collect();

    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (c, r) in per_code.into_iter().enumerate() {
        let (v, d) = r?;
        if v > best.0 {
            best = (v, c, d);
        }
    }
    let mut wordsel = vec![0; m];
    decode_digits(best.1, words, &mut wordsel);
    let code = wordsel
        .iter()
        .map(|&w| {
            let mut cw = vec![0; n];
            decode_digits(w, nx, &mut cw);
            cw
        })
        .collect();
    let mut decoder = vec![0; seqs];
    decode_digits(best.2, m, &mut decoder);
    Ok(CnResult {
        cn: best.0,
        code,
        decoder,
    })
}

/// The random code with the lowest exact error probability among `candidates`
/// draws; candidate `k` uses stream `k` of `seed`. Ties go to the lowest `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BestCode {
    pub index: u64,
    pub code: InnerCode,
    pub superchannel: Superchannel,
}

pub fn best_random_code(
    ch: &DiscreteChannel,
    prior: &[f64],
    n: usize,
    m: usize,
    candidates: u64,
    seed: u64,
) -> Result<BestCode> {
    if candidates == 0 {
        return Err(Error::Invalid("need at least one candidate".into()));
    }
    let results: Vec<Result<(InnerCode, Superchannel)>> = (0..candidates)
        .into_par_iter()
        .map(|k| {
            let code = random_inner_code_in_stream(prior, n, m, seed, k)?;
            let sc = superchannel_exact(&code, ch)?;
            Ok((code, sc))
        })
        .collect();
    let mut best: Option<BestCode> = None;
    for (k, r) in results.into_iter().enumerate() {
        let (code, sc) = r?;
        if best.as_ref().map_or(true, |b| sc.pe_uniform < b.superchannel.pe_uniform) {
            best = Some(BestCode {
                index: k as u64,
                code,
                superchannel: sc,
            });
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Which inner code a simulation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeChoice {
    /// i.i.d. symbols from the capacity-achieving prior.
    Random,
    /// Codeword `j` is symbol `j` repeated.
    Repetition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub n: usize,
    pub m: usize,
    pub effective_rate_nats: f64,
    pub pe: f64,
    pub pe_ci95: f64,
    pub equierror_lb_nats_per_use: f64,
    /// Present when the superchannel is small enough to build exactly.
    pub lemma2: Option<Lemma2Check>,
    pub seed: u64,
}

/// Build an inner code with `m = round(e^{n·rate})` words, estimate its
/// error probability, and report the equierror rate it guarantees.
pub fn simulate(
    ch: &DiscreteChannel,
    n: usize,
    rate: f64,
    trials: u64,
    seed: u64,
    choice: CodeChoice,
) -> Result<SimulationReport> {
    if n == 0 {
        return Err(Error::domain("blocklength must be at least 1"));
    }
    if !(rate > 0.0) {
        return Err(Error::domain(format!("rate {rate} must be positive")));
    }
    let m_real = (n as f64 * rate).exp().round();
    if m_real < 2.0 {
        return Err(Error::domain(format!(
            "rate {rate} at n = {n} gives fewer than 2 messages"
        )));
    }
    if m_real * n as f64 > MAX_CODE_SYMBOLS as f64 {
        return Err(Error::Feasibility(format!(
            "code with {n}×{m_real} symbols exceeds {MAX_CODE_SYMBOLS}"
        )));
    }
    let m = m_real as usize;
    let code = match choice {
        CodeChoice::Repetition => repetition_code(n, m, ch.inputs())?,
        CodeChoice::Random => {
            let prior = max_mutual_information(ch, 1e-10)?.prior;
            random_inner_code(&prior, n, m, seed)?
        }
    };
    let est = superchannel_mc(&code, ch, trials, seed)?;
    let lemma2 = if output_space(ch, n).is_ok() && m <= crate::capacities::MAX_DMC_ALPHABET {
        Some(lemma2_check(&superchannel_exact(&code, ch)?)?)
    } else {
        None
    };
    Ok(SimulationReport {
        n,
        m,
        effective_rate_nats: code.effective_rate(),
        pe: est.pe,
        pe_ci95: est.half_width,
        equierror_lb_nats_per_use: equierror_capacity(m as f64, est.pe)? / n as f64,
        lemma2,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn random_code_is_reproducible() {
        let a = random_inner_code(&[0.5, 0.5], 3, 2, 42).unwrap();
        let b = random_inner_code(&[0.5, 0.5], 3, 2, 42).unwrap();
        assert_eq!(a, b);
        let c = random_inner_code(&[0.0, 1.0], 5, 4, 1).unwrap();
        assert!(c.codewords().iter().flatten().all(|&x| x == 1));
        assert!(random_inner_code(&[0.5, 0.5], 1001, 1000, 0).is_err());
    }

    #[test]
    fn exact_superchannels() {
        let id = DiscreteChannel::identity(3).unwrap();
        let code = InnerCode::new(vec![vec![0, 1], vec![2, 2], vec![1, 0]], 3).unwrap();
        let sc = superchannel_exact(&code, &id).unwrap();
        assert_eq!(sc.pe_uniform, 0.0);
        assert_eq!(sc.channel, DiscreteChannel::identity(3).unwrap());

        let bsc = DiscreteChannel::bsc(0.2).unwrap();
        let sc = superchannel_exact(&repetition_code(1, 2, 2).unwrap(), &bsc).unwrap();
        assert_eq!(sc.channel, bsc);

        let p: f64 = 0.11;
        let sc = superchannel_exact(&repetition_code(3, 2, 2).unwrap(), &DiscreteChannel::bsc(p).unwrap()).unwrap();
        let expected = p.powi(3) + 3.0 * p * p * (1.0 - p);
        assert_abs_diff_eq!(sc.pe_uniform, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(sc.channel.prob(0, 1), expected, epsilon = 1e-12);
    }

    #[test]
    fn mc_identity_is_exact() {
        let id = DiscreteChannel::identity(2).unwrap();
        let est = superchannel_mc(&repetition_code(4, 2, 2).unwrap(), &id, 1000, 3).unwrap();
        assert_eq!(est.pe, 0.0);
        assert_eq!(est.half_width, 0.0);
        assert!(superchannel_mc(&repetition_code(4, 2, 2).unwrap(), &id, 99, 3).is_err());
    }

    #[test]
    fn lemma2_equality_cases() {
        let sc = Superchannel::from_channel(DiscreteChannel::bsc(0.2).unwrap()).unwrap();
        let r = lemma2_check(&sc).unwrap();
        assert!(r.holds);
        assert_abs_diff_eq!(r.lhs, r.rhs, epsilon = 1e-9);
    }

    #[test]
    fn brute_force_small_cases() {
        let r = brute_force_cn(&DiscreteChannel::bsc(0.0).unwrap(), 1, 2).unwrap();
        assert_abs_diff_eq!(r.cn, std::f64::consts::LN_2, epsilon = 1e-9);
        assert!(matches!(brute_force_cn(&DiscreteChannel::bsc(0.1).unwrap(), 4, 3), Err(Error::Feasibility(_))));
    }

    #[test]
    fn simulate_validates() {
        let bsc = DiscreteChannel::bsc(0.11).unwrap();
        assert!(simulate(&bsc, 3, 0.01, 1000, 1, CodeChoice::Random).is_err());
        assert!(simulate(&bsc, 3, 0.231, 10, 1, CodeChoice::Repetition).is_err());
        let r = simulate(&bsc, 3, 0.231, 1000, 1, CodeChoice::Repetition).unwrap();
        assert_eq!(r.m, 2);
        assert!(r.lemma2.unwrap().holds);
    }
}
