//! Random-coding error exponents and channel dispersions.
//!
//! Both the quantum exponent (pure-state cq channel, `E₀(s) = -log Tr ρ^{1+s}`)
//! and Gallager's classical exponent share one shape,
//! `E(R) = max_{0≤s≤1} [max_P E₀(s, P) − sR]`, captured by [`ExponentModel`].
//! The outer maximization over `s` is a golden-section search; the inner one
//! over priors is projected gradient ascent, with an exhaustive simplex grid
//! as fallback for alphabets of at most three letters.

use serde::Serialize;

use crate::capacities::{
    grid_max, holevo_on_frame, max_mutual_information, DiscreteChannel, Optimum, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::optimize::{golden_section_max, projected_gradient_ascent};
use crate::spectral::{GramEnsemble, Spectrum, StateFrame, ZERO_EIGENVALUE};

const S_TOL: f64 = 1e-10;
const INNER_TOL: f64 = 1e-10;
const INNER_MAX_ITER: usize = 20_000;
const GRID_FALLBACK_MAX_ALPHABET: usize = 3;
const GRID_FALLBACK_RESOLUTION: usize = 512;

/// One evaluated point of an error-exponent curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentPoint {
    /// Rate in nats per channel use.
    pub rate: f64,
    /// `E(R)`, per channel use.
    pub exponent: f64,
    /// Maximizing Gallager parameter in `[0, 1]`.
    pub s_star: f64,
    /// Maximizing input distribution at `s_star`.
    pub prior_star: Vec<f64>,
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::domain(format!("Gallager parameter {s} outside [0, 1]")));
    }
    Ok(())
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `-log Σ_i σ_i^{1+s}`, evaluated in log space.
pub fn quantum_e0(spectrum: &Spectrum, s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(-log_sum_exp(spectrum.support().map(|v| (1.0 + s) * v.ln())))
}

/// Gallager's `E₀(s, P) = -log Σ_y [Σ_x P(x) P(y|x)^{1/(1+s)}]^{1+s}`.
pub fn classical_e0(prior: &[f64], ch: &DiscreteChannel, s: f64) -> Result<f64> {
    check_s(s)?;
    if prior.len() != ch.inputs() {
        return Err(Error::Dimension(format!(
            "prior has {} entries for {} inputs",
            prior.len(),
            ch.inputs()
        )));
    }
    Ok(classical_e0_with_gradient(prior, ch, s, false).0)
}

fn classical_e0_with_gradient(
    prior: &[f64],
    ch: &DiscreteChannel,
    s: f64,
    want_gradient: bool,
) -> (f64, Vec<f64>) {
    let rho = 1.0 / (1.0 + s);
    let powered: Vec<Vec<f64>> = ch
        .transition()
        .iter()
        .map(|row| row.iter().map(|&w| if w > 0.0 { w.powf(rho) } else { 0.0 }).collect())
        .collect();
    let mut a = vec![0.0; ch.outputs()];
    for (row, &p) in powered.iter().zip(prior) {
        for (ay, &w) in a.iter_mut().zip(row) {
            *ay += p * w;
        }
    }
    let log_f = log_sum_exp(a.iter().filter(|&&v| v > 0.0).map(|&v| (1.0 + s) * v.ln()));
    let value = -log_f;
    if !want_gradient {
        return (value, Vec::new());
    }
    let scaled: Vec<f64> = a
        .iter()
        .map(|&v| if v > 0.0 { (s * v.ln() - log_f).exp() } else { 0.0 })
        .collect();
    let grad = powered
        .iter()
        .map(|row| -(1.0 + s) * row.iter().zip(&scaled).map(|(w, t)| w * t).sum::<f64>())
        .collect();
    (value, grad)
}

/// A channel model for which a random-coding exponent can be evaluated.
pub trait ExponentModel: Sync {
    /// Capacity and a capacity-achieving prior.
    fn capacity(&self) -> &Optimum;

    /// `max_P E₀(s, P)` with the maximizing prior.
    fn e0_max(&self, s: f64) -> Result<Optimum>;

    /// `E(R) = max_{0≤s≤1} [max_P E₀(s, P) − sR]`.
    fn exponent(&self, rate: f64) -> Result<ExponentPoint> {
        if !(rate >= 0.0) {
            return Err(Error::domain(format!("rate {rate} must be nonnegative")));
        }
        let cap = self.capacity();
        if rate >= cap.value {
            return Ok(ExponentPoint {
                rate,
                exponent: 0.0,
                s_star: 0.0,
                prior_star: cap.prior.clone(),
            });
        }
        let best = golden_section_max(
            |s| Ok(self.e0_max(s)?.value - s * rate),
            0.0,
            1.0,
            S_TOL,
            200,
        )?;
        let inner = self.e0_max(best.x)?;
        let exponent = inner.value - best.x * rate;
        if exponent <= 0.0 {
            return Ok(ExponentPoint {
                rate,
                exponent: 0.0,
                s_star: 0.0,
                prior_star: cap.prior.clone(),
            });
        }
        Ok(ExponentPoint {
            rate,
            exponent,
            s_star: best.x,
            prior_star: inner.prior,
        })
    }
}

fn maximize_prior<F>(dim: usize, mut oracle: F) -> Result<Optimum>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    match projected_gradient_ascent(&mut oracle, vec![1.0 / dim as f64; dim], INNER_TOL, INNER_MAX_ITER) {
        Ok(m) => Ok(Optimum {
            value: m.value,
            prior: m.point,
        }),
        Err(Error::NonConvergence { .. }) if dim <= GRID_FALLBACK_MAX_ALPHABET => {
            grid_max(dim, GRID_FALLBACK_RESOLUTION, |p| Ok(oracle(p)?.0))
        }
        Err(e) => Err(e),
    }
}

/// Exponent model of a pure-state classical-quantum channel.
#[derive(Debug, Clone)]
pub struct QuantumExponent {
    frame: StateFrame,
    capacity: Optimum,
}

impl QuantumExponent {
    /// Only the states of `e` matter; its prior is ignored.
    pub fn new(e: &GramEnsemble) -> Result<Self> {
        let d = e.alphabet_size();
        if !(2..=16).contains(&d) {
            return Err(Error::domain(format!("alphabet size {d} outside [2, 16]")));
        }
        let frame = StateFrame::from_gram(e.gram())?;
        let capacity = holevo_on_frame(&frame, DEFAULT_TOL)?;
        Ok(QuantumExponent { frame, capacity })
    }

    fn e0_oracle(&self, p: &[f64], s: f64) -> Result<(f64, Vec<f64>)> {
        let dec = self.frame.decompose(p)?;
        let log_f = dec.trace_scale.ln()
            + log_sum_exp(
                dec.eigenvalues
                    .iter()
                    .filter(|&&l| l >= ZERO_EIGENVALUE)
                    .map(|&l| (1.0 + s) * l.ln()),
            );
        let inv_f = (-log_f).exp();
        let grad = (0..self.frame.alphabet_size())
            .map(|x| {
                -(1.0 + s)
                    * inv_f
                    * dec
                        .eigenvalues
                        .iter()
                        .zip(&dec.weights)
                        .map(|(&l, w)| l.max(0.0).powf(s) * w[x])
                        .sum::<f64>()
            })
            .collect();
        Ok((-log_f, grad))
    }
}

impl ExponentModel for QuantumExponent {
    fn capacity(&self) -> &Optimum {
        &self.capacity
    }

    fn e0_max(&self, s: f64) -> Result<Optimum> {
        check_s(s)?;
        maximize_prior(self.frame.alphabet_size(), |p| self.e0_oracle(p, s))
    }
}

/// Exponent model of a classical DMC (Gallager).
#[derive(Debug, Clone)]
pub struct ClassicalExponent {
    channel: DiscreteChannel,
    capacity: Optimum,
}

impl ClassicalExponent {
    pub fn new(ch: &DiscreteChannel) -> Result<Self> {
        let capacity = max_mutual_information(ch, DEFAULT_TOL)?;
        Ok(ClassicalExponent {
            channel: ch.clone(),
            capacity,
        })
    }
}

impl ExponentModel for ClassicalExponent {
    fn capacity(&self) -> &Optimum {
        &self.capacity
    }

    fn e0_max(&self, s: f64) -> Result<Optimum> {
        check_s(s)?;
        maximize_prior(self.channel.inputs(), |p| {
            Ok(classical_e0_with_gradient(p, &self.channel, s, true))
        })
    }
}

/// Error exponent of a pure-state alphabet at `rate` nats per use.
pub fn quantum_error_exponent(e: &GramEnsemble, rate: f64) -> Result<ExponentPoint> {
    QuantumExponent::new(e)?.exponent(rate)
}

/// Gallager random-coding exponent of a DMC at `rate` nats per use.
pub fn classical_error_exponent(ch: &DiscreteChannel, rate: f64) -> Result<ExponentPoint> {
    ClassicalExponent::new(ch)?.exponent(rate)
}

/// Variance of `-log σ` under the distribution `σ`.
pub fn quantum_dispersion(spectrum: &Spectrum) -> f64 {
    let (mut m1, mut m2) = (0.0, 0.0);
    for v in spectrum.support() {
        let l = v.ln();
        m1 += v * l;
        m2 += v * l * l;
    }
    (m2 - m1 * m1).max(0.0)
}

/// Variance of the information density `log(P(y|x)/P(y))` at the
/// capacity-achieving input distribution.
pub fn classical_dispersion(ch: &DiscreteChannel) -> Result<f64> {
    let cap = max_mutual_information(ch, DEFAULT_TOL)?;
    let mut prior: Vec<f64> = cap.prior.iter().map(|p| (p * 1e12).round() / 1e12).collect();
    let total: f64 = prior.iter().sum();
    prior.iter_mut().for_each(|p| *p /= total);
    let q = ch.output_distribution(&prior);

    let mut samples = Vec::new();
    for (x, row) in ch.transition().iter().enumerate() {
        if prior[x] == 0.0 {
            continue;
        }
        for (y, &w) in row.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            if q[y] < 1e-12 {
                return Err(Error::Invalid(format!(
                    "output {y} has degenerate probability {} under the capacity-achieving prior",
                    q[y]
                )));
            }
            samples.push((prior[x] * w, (w / q[y]).ln()));
        }
    }
    let mean: f64 = samples.iter().map(|(p, i)| p * i).sum();
    Ok(samples
        .iter()
        .map(|(p, i)| p * (i - mean) * (i - mean))
        .sum::<f64>())
}

/// Quadratic approximation `(R − C)² / (2V)` of the exponent near capacity.
pub fn quadratic_exponent(capacity: f64, dispersion: f64, rate: f64) -> Result<f64> {
    if !(dispersion > 0.0) {
        return Err(Error::domain(format!("dispersion {dispersion} must be positive")));
    }
    Ok((rate - capacity).powi(2) / (2.0 * dispersion))
}

/// Low-SNR asymptote `4/SNR` of `V/C²` for the real AWGN channel.
pub fn awgn_vc_ratio_lowsnr(snr: f64) -> Result<f64> {
    if !(snr > 0.0) {
        return Err(Error::domain(format!("snr {snr} must be positive")));
    }
    Ok(4.0 / snr)
}
