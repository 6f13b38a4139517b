//! Capacities and mutual information, all in nats.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{projected_gradient_ascent, simplex_grid};
use crate::spectral::{xlogx_neg, GramEnsemble, StateFrame, ZERO_EIGENVALUE};

const ROW_SUM_TOL: f64 = 1e-12;
/// Largest input/output alphabet accepted by [`max_mutual_information`].
pub const MAX_DMC_ALPHABET: usize = 4096;
/// Iteration cap for Blahut–Arimoto.
pub const BLAHUT_ARIMOTO_MAX_ITER: usize = 100_000;
/// Default convergence tolerance for the capacity optimizers.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A discrete memoryless channel `P(y|x)`; rows are indexed by input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel")]
pub struct DiscreteChannel {
    transition: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawChannel {
    transition: Vec<Vec<f64>>,
}

impl TryFrom<RawChannel> for DiscreteChannel {
    type Error = Error;

    fn try_from(raw: RawChannel) -> Result<Self> {
        DiscreteChannel::new(raw.transition)
    }
}

impl DiscreteChannel {
    pub fn new(transition: Vec<Vec<f64>>) -> Result<Self> {
        let outputs = transition.first().map_or(0, Vec::len);
        if transition.is_empty() || outputs == 0 {
            return Err(Error::Dimension("channel has no inputs or outputs".into()));
        }
        for (x, row) in transition.iter().enumerate() {
            if row.len() != outputs {
                return Err(Error::Dimension(format!(
                    "row {x} has {} outputs, expected {outputs}",
                    row.len()
                )));
            }
            if row.iter().any(|&w| !w.is_finite() || w < 0.0) {
                return Err(Error::Invalid(format!("row {x} has negative entries")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::Invalid(format!("row {x} sums to {sum}")));
            }
        }
        Ok(DiscreteChannel { transition })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("crossover {p} outside [0, 1]")));
        }
        DiscreteChannel::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn identity(size: usize) -> Result<Self> {
        DiscreteChannel::new(
            (0..size)
                .map(|i| (0..size).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    /// Parses the shorthand `bsc:p`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        match spec.split_once(':') {
            Some(("bsc", p)) => {
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad crossover in {spec:?}")))?;
                DiscreteChannel::bsc(p)
            }
            _ => Err(Error::Invalid(format!("unknown channel spec {spec:?}"))),
        }
    }

    /// Parses `{"transition": [[..], ..]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn inputs(&self) -> usize {
        self.transition.len()
    }

    pub fn outputs(&self) -> usize {
        self.transition[0].len()
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.transition[x][y]
    }

    /// Output distribution induced by `prior`.
    pub fn output_distribution(&self, prior: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.outputs()];
        for (row, &p) in self.transition.iter().zip(prior) {
            for (qy, &w) in q.iter_mut().zip(row) {
                *qy += p * w;
            }
        }
        q
    }

    fn check_prior(&self, prior: &[f64]) -> Result<()> {
        if prior.len() != self.inputs() {
            return Err(Error::Dimension(format!(
                "prior has {} entries for {} inputs",
                prior.len(),
                self.inputs()
            )));
        }
        crate::spectral::check_prior(prior)
    }
}

/// An optimizing input distribution and the optimal value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    pub value: f64,
    pub prior: Vec<f64>,
}

fn check_overlap(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::domain(format!("overlap {gamma} outside [0, 1]")));
    }
    Ok(())
}

/// Holevo capacity of two pure states with overlap magnitude `gamma`.
pub fn holevo_binary(gamma: f64) -> Result<f64> {
    check_overlap(gamma)?;
    Ok(xlogx_neg(0.5 * (1.0 - gamma)) + xlogx_neg(0.5 * (1.0 + gamma)))
}

/// Single-letter accessible information of two equiprobable pure states with
/// overlap magnitude `gamma` (optimal binary projective measurement).
pub fn c1_binary(gamma: f64) -> Result<f64> {
    check_overlap(gamma)?;
    let r = (1.0 - gamma * gamma).sqrt();
    let term = |x: f64| if x > 0.0 { 0.5 * x * x.ln() } else { 0.0 };
    Ok(term(1.0 - r) + term(1.0 + r))
}

/// Holevo capacity of a pure-state alphabet: the maximum over priors of the
/// von Neumann entropy of the average state. The prior stored in the
/// ensemble is ignored.
///
/// The entropy is concave in the prior, so projected gradient ascent from the
/// uniform prior reaches the global maximum.
pub fn holevo_general(e: &GramEnsemble, tol: f64) -> Result<Optimum> {
    let d = e.alphabet_size();
    if !(2..=16).contains(&d) {
        return Err(Error::domain(format!("alphabet size {d} outside [2, 16]")));
    }
    let frame = StateFrame::from_gram(e.gram())?;
    holevo_on_frame(&frame, tol)
}

pub(crate) fn holevo_on_frame(frame: &StateFrame, tol: f64) -> Result<Optimum> {
    let d = frame.alphabet_size();
    let oracle = |p: &[f64]| -> Result<(f64, Vec<f64>)> {
        let dec = frame.decompose(p)?;
        let entropy = dec.trace_scale
            * dec
                .eigenvalues
                .iter()
                .filter(|&&l| l >= ZERO_EIGENVALUE)
                .map(|&l| -l * l.ln())
                .sum::<f64>();
        // ∂S/∂p_x = -⟨t_x| (log ρ + 1) |t_x⟩
        let grad = (0..d)
            .map(|x| {
                dec.eigenvalues
                    .iter()
                    .zip(&dec.weights)
                    .map(|(&l, w)| (-(l.max(1e-300)).ln() - 1.0) * w[x])
                    .sum()
            })
            .collect();
        Ok((entropy, grad))
    };
    let m = projected_gradient_ascent(oracle, vec![1.0 / d as f64; d], tol, 100_000)?;
    Ok(Optimum {
        value: m.value,
        prior: m.point,
    })
}

/// Capacity of the pure-loss bosonic channel with mean photon number
/// `energy` per mode (Gaussian-distributed coherent-state inputs).
pub fn gaussian_holevo(energy: f64) -> Result<f64> {
    if !(energy >= 0.0) || !energy.is_finite() {
        return Err(Error::domain(format!("energy {energy} must be nonnegative")));
    }
    if energy == 0.0 {
        return Ok(0.0);
    }
    Ok((1.0 + energy) * energy.ln_1p() - energy * energy.ln())
}

/// Mutual information `I(P_X, P_{Y|X})` in nats.
pub fn mutual_information(prior: &[f64], ch: &DiscreteChannel) -> Result<f64> {
    ch.check_prior(prior)?;
    Ok(mutual_information_unchecked(prior, ch))
}

fn mutual_information_unchecked(prior: &[f64], ch: &DiscreteChannel) -> f64 {
    let q = ch.output_distribution(prior);
    let mut total = 0.0;
    for (row, &p) in ch.transition().iter().zip(prior) {
        if p == 0.0 {
            continue;
        }
        for (&w, &qy) in row.iter().zip(&q) {
            if w > 0.0 {
                total += p * w * (w / qy).ln();
            }
        }
    }
    total.max(0.0)
}

/// Per-input divergences `D(P(·|x) ‖ q)`.
fn input_divergences(ch: &DiscreteChannel, q: &[f64]) -> Vec<f64> {
    ch.transition()
        .iter()
        .map(|row| {
            row.iter()
                .zip(q)
                .filter(|(&w, _)| w > 0.0)
                .map(|(&w, &qy)| w * (w / qy).ln())
                .sum()
        })
        .collect()
}

fn exponential_step(p: &[f64], div: &[f64], shift: f64, mu: f64) -> Vec<f64> {
    let mut next: Vec<f64> = p.iter().zip(div).map(|(pi, di)| pi * (mu * (di - shift)).exp()).collect();
    let norm: f64 = next.iter().sum();
    for x in next.iter_mut() {
        *x /= norm;
    }
    next
}

/// Channel capacity by Blahut–Arimoto.
///
/// Iterates until the two-sided bracket `max_x D(P(·|x)‖q) − I(p)` is below
/// `tol`; the returned value is the lower end of the bracket.
pub fn max_mutual_information(ch: &DiscreteChannel, tol: f64) -> Result<Optimum> {
    if ch.inputs() > MAX_DMC_ALPHABET || ch.outputs() > MAX_DMC_ALPHABET {
        return Err(Error::domain("channel alphabet exceeds 4096"));
    }
    let nx = ch.inputs();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut div = input_divergences(ch, &ch.output_distribution(&p));
    let mut lower = 0.0;
    // step exponent: 1 is plain BA, larger values are kept while I(p) keeps rising
    let mut mu = 1.0f64;
    for _ in 0..BLAHUT_ARIMOTO_MAX_ITER {
        lower = p.iter().zip(&div).map(|(a, b)| a * b).sum::<f64>().max(0.0);
        let upper = div.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if upper - lower < tol {
            return Ok(Optimum {
                value: lower,
                prior: p,
            });
        }
        loop {
            let next = exponential_step(&p, &div, upper, mu);
            let next_div = input_divergences(ch, &ch.output_distribution(&next));
            let value: f64 = next.iter().zip(&next_div).map(|(a, b)| a * b).sum();
            if mu == 1.0 || value >= lower {
                mu = if value >= lower { (mu * 2.0).min(1e8) } else { 1.0 };
                p = next;
                div = next_div;
                break;
            }
            mu = (mu / 4.0).max(1.0);
        }
    }
    Err(Error::NonConvergence {
        method: "Blahut-Arimoto",
        iterations: BLAHUT_ARIMOTO_MAX_ITER,
        value: lower,
        best: p,
    })
}

/// Photon information efficiency: nats per mean photon.
pub fn pie(rate: f64, energy: f64) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::domain(format!("energy {energy} must be positive")));
    }
    Ok(rate / energy)
}

/// Exhaustive maximization over a simplex grid; fallback for tiny alphabets.
pub(crate) fn grid_max<F>(dim: usize, resolution: usize, mut f: F) -> Result<Optimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut best = Optimum {
        value: f64::NEG_INFINITY,
        prior: Vec::new(),
    };
    for p in simplex_grid(dim, resolution) {
        let v = f(&p)?;
        if v > best.value {
            best = Optimum { value: v, prior: p };
        }
    }
    Ok(best)
}
