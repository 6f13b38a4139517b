//! Coherent-state constellations: overlaps, BPSK, and the optimal
//! energy-constrained binary inputs for single-symbol measurement.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::capacities::{c1_binary, holevo_binary};
use crate::error::{Error, Result};
use crate::optimize::golden_section_max;
use crate::spectral::{binary_entropy, check_prior, GramEnsemble, HermitianMatrix};

/// `⟨a|b⟩ = exp(−|a|²/2 − |b|²/2 + a*b)`, magnitude `exp(−|a − b|²/2)`.
pub fn coherent_overlap(a: Complex64, b: Complex64) -> Complex64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

/// Coherent states with a prior and a mean photon number budget.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentConstellation {
    amplitudes: Vec<Complex64>,
    prior: Vec<f64>,
    energy: f64,
}

#[derive(Deserialize, Serialize)]
struct RawConstellation {
    amplitudes_re: Vec<f64>,
    #[serde(default)]
    amplitudes_im: Option<Vec<f64>>,
    prior: Vec<f64>,
    energy: f64,
}

impl CoherentConstellation {
    pub fn new(amplitudes: Vec<Complex64>, prior: Vec<f64>, energy: f64) -> Result<Self> {
        if amplitudes.len() != prior.len() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {} prior entries",
                amplitudes.len(),
                prior.len()
            )));
        }
        check_prior(&prior)?;
        if !(energy >= 0.0) || !energy.is_finite() {
            return Err(Error::domain(format!("energy budget {energy} must be nonnegative")));
        }
        let mean: f64 = amplitudes.iter().zip(&prior).map(|(a, p)| p * a.norm_sqr()).sum();
        if mean > energy + 1e-12 {
            return Err(Error::Invalid(format!(
                "mean photon number {mean} exceeds budget {energy}"
            )));
        }
        Ok(CoherentConstellation {
            amplitudes,
            prior,
            energy,
        })
    }

    /// Parses `{"amplitudes_re": [..], "amplitudes_im": [..], "prior": [..], "energy": e}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConstellation = serde_json::from_str(text)?;
        let im = raw.amplitudes_im.unwrap_or_else(|| vec![0.0; raw.amplitudes_re.len()]);
        if im.len() != raw.amplitudes_re.len() {
            return Err(Error::Dimension("amplitude parts differ in length".into()));
        }
        let amps = raw
            .amplitudes_re
            .iter()
            .zip(&im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        CoherentConstellation::new(amps, raw.prior, raw.energy)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "amplitudes_re": self.amplitudes.iter().map(|a| a.re).collect::<Vec<_>>(),
            "amplitudes_im": self.amplitudes.iter().map(|a| a.im).collect::<Vec<_>>(),
            "prior": self.prior,
            "energy": self.energy,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes.iter().zip(&self.prior).map(|(a, p)| p * a.norm_sqr()).sum()
    }

    /// Gram matrix of the coherent states, with the constellation prior.
    pub fn to_ensemble(&self) -> Result<GramEnsemble> {
        let rows: Vec<Vec<Complex64>> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                self.amplitudes
                    .iter()
                    .enumerate()
                    .map(|(j, &b)| if i == j { Complex64::new(1.0, 0.0) } else { coherent_overlap(a, b) })
                    .collect()
            })
            .collect();
        GramEnsemble::new(HermitianMatrix::from_complex_rows(&rows)?, self.prior.clone())
    }
}

fn check_energy(energy: f64) -> Result<()> {
    if !(energy >= 0.0) || !energy.is_finite() {
        return Err(Error::domain(format!("energy {energy} must be nonnegative")));
    }
    Ok(())
}

/// `{|√ℰ⟩, |−√ℰ⟩}` with prior `(1 − q, q)`; overlap `e^{−2ℰ}`.
pub fn bpsk_ensemble(energy: f64, q: f64) -> Result<GramEnsemble> {
    check_energy(energy)?;
    GramEnsemble::binary(q, (-2.0 * energy).exp())
}

/// Exact value next to its small-energy asymptote, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactAndAsymptotic {
    pub exact: f64,
    pub asymptotic: f64,
}

/// BPSK Holevo capacity; asymptote `ℰ log(1/ℰ) + ℰ`.
pub fn c_bpsk(energy: f64) -> Result<ExactAndAsymptotic> {
    check_energy(energy)?;
    let asymptotic = if energy > 0.0 {
        energy * (1.0 / energy).ln() + energy
    } else {
        0.0
    };
    Ok(ExactAndAsymptotic {
        exact: holevo_binary((-2.0 * energy).exp())?,
        asymptotic,
    })
}

/// BPSK accessible information with symbol-by-symbol measurement; asymptote `2ℰ`.
pub fn c1_bpsk(energy: f64) -> Result<ExactAndAsymptotic> {
    check_energy(energy)?;
    Ok(ExactAndAsymptotic {
        exact: c1_binary((-2.0 * energy).exp())?,
        asymptotic: 2.0 * energy,
    })
}

/// Optimal binary coherent inputs for single-symbol detection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Result {
    pub energy: f64,
    pub q_star: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub c1_exact: f64,
    pub c1_asymptotic: f64,
}

/// Mutual information of the binary antipodal pair with `P(α₁) = q` that
/// spends the whole budget, under the optimal projective measurement.
pub fn lemma1_mutual_information(energy: f64, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("prior weight {q} outside (0, 1)")));
    }
    let v = q * (1.0 - q);
    let mix = 4.0 * v * (-energy / v).exp();
    let root = (1.0 - mix).sqrt();
    let p = 0.5 * mix / (1.0 + root);
    Ok(binary_entropy(q)? - binary_entropy(p)?)
}

/// Numerically optimal `q` over `[10ℰ², 1/2]` with the induced amplitudes
/// `α₀ = √(ℰq/(1−q))`, `α₁ = −√(ℰ(1−q)/q)`.
pub fn lemma1_optimal_binary(energy: f64) -> Result<Lemma1Result> {
    if !(energy > 0.0 && energy < 0.1) {
        return Err(Error::regime(format!("energy {energy} outside (0, 0.1)")));
    }
    let lo = (10.0 * energy * energy).ln();
    let hi = 0.5f64.ln();
    let best = golden_section_max(
        |t| lemma1_mutual_information(energy, t.exp()),
        lo,
        hi,
        1e-12,
        200,
    )?;
    let q = best.x.exp();
    let l = (1.0 / energy).ln();
    Ok(Lemma1Result {
        energy,
        q_star: q,
        alpha0: (energy * q / (1.0 - q)).sqrt(),
        alpha1: -(energy * (1.0 - q) / q).sqrt(),
        c1_exact: best.value,
        c1_asymptotic: energy * l - energy * l.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn overlaps() {
        let a = Complex64::new(0.3, -0.7);
        assert_abs_diff_eq!(coherent_overlap(a, a).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(coherent_overlap(a, a).im, 0.0, epsilon = 1e-15);
        let e: f64 = 0.01;
        let s = Complex64::new(e.sqrt(), 0.0);
        assert_abs_diff_eq!(coherent_overlap(s, -s).norm(), (-2.0 * e).exp(), epsilon = 1e-15);
        let b = Complex64::new(0.4, 0.9);
        assert_abs_diff_eq!(
            coherent_overlap(Complex64::new(0.0, 0.0), b).norm(),
            (-0.5 * b.norm_sqr()).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn bpsk_values() {
        let c = c_bpsk(0.01).unwrap();
        assert_abs_diff_eq!(c.exact / 0.01, 5.55, epsilon = 0.01);
        let c1 = c1_bpsk(0.01).unwrap();
        assert_abs_diff_eq!(c1.exact / 0.01, 1.97, epsilon = 0.01);
        assert_eq!(c_bpsk(0.0).unwrap().exact, 0.0);
        assert_eq!(c_bpsk(0.0).unwrap().asymptotic, 0.0);
        assert_eq!(c1_bpsk(0.0).unwrap().exact, 0.0);
        let r = c_bpsk(1e-4).unwrap();
        assert!((r.exact / r.asymptotic - 1.0).abs() < 0.02);
        let r = c1_bpsk(1e-3).unwrap();
        assert!((r.exact / r.asymptotic - 1.0).abs() < 0.05);
        assert!(c_bpsk(-1.0).is_err());
    }

    #[test]
    fn bpsk_ensemble_overlap() {
        let e = bpsk_ensemble(0.01, 0.3).unwrap();
        assert_abs_diff_eq!(e.gram().get(0, 1).re, (-0.02f64).exp(), epsilon = 1e-15);
        assert_eq!(bpsk_ensemble(0.0, 0.5).unwrap().gram().get(0, 1).re, 1.0);
    }

    #[test]
    fn constellation_budget_and_json() {
        let s = 0.1f64;
        let amps = vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)];
        assert!(CoherentConstellation::new(amps.clone(), vec![0.5, 0.5], 0.005).is_err());
        let c = CoherentConstellation::new(amps, vec![0.5, 0.5], 0.01).unwrap();
        let back = CoherentConstellation::from_json(&c.to_json().to_string()).unwrap();
        assert_eq!(back, c);
        let g = c.to_ensemble().unwrap();
        assert_abs_diff_eq!(g.gram().get(0, 1).norm(), (-0.02f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn lemma1_at_one_percent() {
        let r = lemma1_optimal_binary(0.01).unwrap();
        assert!(r.c1_exact > c1_bpsk(0.01).unwrap().exact);
        assert!(r.c1_exact < c_bpsk(0.01).unwrap().exact);
        let budget = (1.0 - r.q_star) * r.alpha0.powi(2) + r.q_star * r.alpha1.powi(2);
        assert_abs_diff_eq!(budget, 0.01, epsilon = 1e-9);
        assert!(r.alpha0 * r.alpha1 <= 0.0);
        assert!(lemma1_optimal_binary(0.5).is_err());
    }
}
