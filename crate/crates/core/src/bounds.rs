//! Lower bounds on `C_N/N` for concatenated coding.
//!
//! [`RateBound`] evaluates `max_R [(1 − min(1, c·e^{−nE(R)}))R − log 2/n]`
//! for any [`ExponentModel`], with `c = 2` for pure-state cq channels and
//! `c = 1` for classical DMCs. It tabulates `E(R)` once, so sweeps over `n`
//! only pay for the final refinement.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::capacities::{holevo_binary, DiscreteChannel};
use crate::error::{Error, Result};
use crate::exponents::{
    quadratic_exponent, ClassicalExponent, ExponentModel, ExponentPoint, QuantumExponent,
};
use crate::optimize::golden_section_max;
use crate::spectral::{binary_entropy, GramEnsemble};

const RATE_GRID_POINTS: usize = 2000;
const RATE_GRID_MIN: f64 = 1e-6;
const REFINE_REL_TOL: f64 = 1e-12;

/// One evaluated lower bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundPoint {
    /// Inner blocklength.
    pub n: u64,
    /// Lower bound on `C_N/N`, nats per channel use. May be negative.
    pub rate_lb: f64,
    /// Inner-code rate at which the bound is attained.
    pub r_star: f64,
    /// Gallager parameter used, where the bound has one.
    pub s_star: Option<f64>,
    /// Exponent evaluated at `r_star`.
    pub exponent: f64,
    /// Bound on the inner decoding error, clamped to `[0, 1]`.
    pub pe_bound: Option<f64>,
}

impl BoundPoint {
    pub fn is_negative(&self) -> bool {
        self.rate_lb < 0.0
    }
}

fn pe_term(coefficient: f64, n: u64, exponent: f64) -> f64 {
    (coefficient * (-(n as f64) * exponent).exp()).clamp(0.0, 1.0)
}

fn objective(coefficient: f64, n: u64, rate: f64, exponent: f64) -> f64 {
    (1.0 - pe_term(coefficient, n, exponent)) * rate - LN_2 / n as f64
}

/// Rate bound evaluator with a cached exponent table.
#[derive(Debug, Clone)]
pub struct RateBound<M> {
    model: M,
    coefficient: f64,
    table: Vec<ExponentPoint>,
}

impl<M: ExponentModel> RateBound<M> {
    /// `coefficient` multiplies `e^{−nE(R)}` in the inner error bound.
    pub fn new(model: M, coefficient: f64) -> Result<Self> {
        if !(coefficient > 0.0) {
            return Err(Error::domain(format!("coefficient {coefficient} must be positive")));
        }
        let c = model.capacity().value;
        let table = if c > RATE_GRID_MIN {
            let ratio = (c / RATE_GRID_MIN).ln();
            (0..RATE_GRID_POINTS)
                .into_par_iter()
                .map(|i| {
                    let r = if i + 1 == RATE_GRID_POINTS {
                        c
                    } else {
                        RATE_GRID_MIN * (ratio * i as f64 / (RATE_GRID_POINTS - 1) as f64).exp()
                    };
                    model.exponent(r)
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(RateBound {
            model,
            coefficient,
            table,
        })
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn capacity(&self) -> f64 {
        self.model.capacity().value
    }

    /// The bound at blocklength `n`.
    pub fn at(&self, n: u64) -> Result<BoundPoint> {
        if n == 0 {
            return Err(Error::domain("blocklength must be at least 1"));
        }
        let coef = self.coefficient;
        if self.table.is_empty() {
            return Ok(BoundPoint {
                n,
                rate_lb: -LN_2 / n as f64,
                r_star: 0.0,
                s_star: Some(0.0),
                exponent: 0.0,
                pe_bound: Some(1.0),
            });
        }
        let mut best = 0;
        let mut best_value = f64::NEG_INFINITY;
        for (i, pt) in self.table.iter().enumerate() {
            let v = objective(coef, n, pt.rate, pt.exponent);
            if v > best_value {
                best = i;
                best_value = v;
            }
        }
        let lo = self.table[best.saturating_sub(1)].rate;
        let hi = self.table[(best + 1).min(self.table.len() - 1)].rate;
        let refined = golden_section_max(
            |r| Ok(objective(coef, n, r, self.model.exponent(r)?.exponent)),
            lo,
            hi,
            REFINE_REL_TOL * self.capacity(),
            200,
        )?;
        let grid_point = &self.table[best];
        let point = if refined.value > best_value
            || (refined.value == best_value && refined.x < grid_point.rate)
        {
            self.model.exponent(refined.x)?
        } else {
            grid_point.clone()
        };
        Ok(BoundPoint {
            n,
            rate_lb: objective(coef, n, point.rate, point.exponent),
            r_star: point.rate,
            s_star: Some(point.s_star),
            exponent: point.exponent,
            pe_bound: Some(pe_term(coef, n, point.exponent)),
        })
    }
}

/// Evaluator for the pure-state cq bound (inner error `2e^{−nE}`).
pub fn thm1_evaluator(e: &GramEnsemble) -> Result<RateBound<QuantumExponent>> {
    RateBound::new(QuantumExponent::new(e)?, 2.0)
}

/// Evaluator for the classical DMC bound (inner error `e^{−nE}`).
pub fn thm2_evaluator(ch: &DiscreteChannel) -> Result<RateBound<ClassicalExponent>> {
    RateBound::new(ClassicalExponent::new(ch)?, 1.0)
}

pub fn thm1_bound(e: &GramEnsemble, n: u64) -> Result<BoundPoint> {
    thm1_evaluator(e)?.at(n)
}

pub fn thm2_bound(ch: &DiscreteChannel, n: u64) -> Result<BoundPoint> {
    thm2_evaluator(ch)?.at(n)
}

fn check_energy(energy: f64) -> Result<f64> {
    if !(energy > 0.0 && energy < 1.0) {
        return Err(Error::domain(format!("energy {energy} outside (0, 1)")));
    }
    Ok((1.0 / energy).ln())
}

fn bpsk_leading_rate(energy: f64, n: u64) -> f64 {
    let l = (1.0 / energy).ln();
    let ne = n as f64 * energy;
    energy * l * (1.0 - ((ne * ne.ln()).ln() / ne).sqrt()) + energy
}

/// Closed-form BPSK bound at mean photon number `energy`.
pub fn cor1_bpsk_bound(energy: f64, n: u64) -> Result<BoundPoint> {
    let l = check_energy(energy)?;
    let nf = n as f64;
    if nf < l / energy {
        return Err(Error::regime(format!(
            "n = {n} below the minimum blocklength {:.1}",
            l / energy
        )));
    }
    let r_star = bpsk_leading_rate(energy, n);
    let s = (l.ln() - (r_star - energy).ln()) / l - 1.0;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::regime(format!("s' = {s} outside [0, 1] at n = {n}")));
    }
    let r_c = energy + energy * energy * l;
    let c = holevo_binary((-2.0 * energy).exp())?;
    if !(r_star > r_c && r_star < c) {
        return Err(Error::regime(format!(
            "R* = {r_star} outside ({r_c}, {c}) at n = {n}"
        )));
    }
    let g = (-2.0 * energy).exp();
    let a = (1.0 + s) * (0.5 * (1.0 + g)).ln();
    let b = (1.0 + s) * (0.5 * (1.0 - g)).ln();
    let m = a.max(b);
    let exponent = -(m + ((a - m).exp() + (b - m).exp()).ln()) - s * r_star;
    let pe = pe_term(2.0, n, exponent);
    Ok(BoundPoint {
        n,
        rate_lb: (1.0 - pe) * r_star - LN_2 / nf,
        r_star,
        s_star: Some(s),
        exponent,
        pe_bound: Some(pe),
    })
}

/// Leading terms of the BPSK bound, valid for
/// `ℰ^{-1} log²(1/ℰ) ≤ n ≤ ℰ^{-2}`.
pub fn bpsk_simplified_bound(energy: f64, n: u64) -> Result<f64> {
    let l = check_energy(energy)?;
    let nf = n as f64;
    let (lo, hi) = (l * l / energy, 1.0 / (energy * energy));
    if nf < lo || nf > hi {
        return Err(Error::regime(format!("n = {n} outside [{lo:.1}, {hi:.1}]")));
    }
    Ok(bpsk_leading_rate(energy, n))
}

/// Dispersion form of the bound, leading order only.
pub fn thm3_point(capacity: f64, dispersion: f64, n: u64) -> Result<BoundPoint> {
    if !(capacity > 0.0) {
        return Err(Error::domain(format!("capacity {capacity} must be positive")));
    }
    if !(dispersion > 0.0) {
        return Err(Error::domain(format!("dispersion {dispersion} must be positive")));
    }
    if n == 0 {
        return Err(Error::domain("blocklength must be at least 1"));
    }
    let nf = n as f64;
    let log_x = nf.ln() + 2.0 * capacity.ln() - dispersion.ln();
    if !(log_x > 0.0) {
        return Err(Error::regime(format!(
            "n C²/V = {} must exceed 1",
            log_x.exp()
        )));
    }
    let inv_x = (-log_x).exp();
    let rate_lb = capacity * (1.0 - (inv_x * log_x).sqrt()) - LN_2 / nf;
    let r_star = capacity * (1.0 - (inv_x * (log_x + log_x.ln()).max(0.0)).sqrt());
    Ok(BoundPoint {
        n,
        rate_lb,
        r_star,
        s_star: None,
        exponent: quadratic_exponent(capacity, dispersion, r_star)?,
        pe_bound: None,
    })
}

/// `C(1 − √((V/(nC²)) log(nC²/V))) − log 2/n`.
pub fn thm3_bound(capacity: f64, dispersion: f64, n: u64) -> Result<f64> {
    Ok(thm3_point(capacity, dispersion, n)?.rate_lb)
}

fn check_equierror(m: f64, pe: f64) -> Result<()> {
    if !(m >= 2.0) || !m.is_finite() {
        return Err(Error::domain(format!("message count {m} must be at least 2")));
    }
    if !(0.0..=1.0).contains(&pe) {
        return Err(Error::domain(format!("error probability {pe} outside [0, 1]")));
    }
    Ok(())
}

/// Capacity of the equierror superchannel with `m` messages.
pub fn equierror_capacity(m: f64, pe: f64) -> Result<f64> {
    check_equierror(m, pe)?;
    let spread = if pe > 0.0 { pe * (m - 1.0).ln() } else { 0.0 };
    Ok(m.ln() - spread - binary_entropy(pe)?)
}

/// `(1 − pe) log m − log 2`, a weaker form of [`equierror_capacity`].
pub fn equierror_capacity_weak(m: f64, pe: f64) -> Result<f64> {
    check_equierror(m, pe)?;
    Ok((1.0 - pe) * m.ln() - LN_2)
}

/// `m × m` channel with diagonal `1 − pe` and off-diagonal `pe/(m − 1)`.
pub fn equierror_channel(m: usize, pe: f64) -> Result<DiscreteChannel> {
    check_equierror(m as f64, pe)?;
    let off = pe / (m - 1) as f64;
    let rows = (0..m)
        .map(|j| (0..m).map(|k| if j == k { 1.0 - pe } else { off }).collect())
        .collect();
    DiscreteChannel::new(rows)
}

/// Model for a bound sweep.
#[derive(Debug, Clone)]
pub enum BoundModel {
    /// Equiprobable binary pure states with overlap `gamma`.
    Binary { gamma: f64 },
    /// Coherent BPSK, closed-form bound.
    Bpsk { energy: f64 },
    /// General pure-state alphabet.
    Ensemble {
        ensemble: GramEnsemble,
        energy: Option<f64>,
    },
    /// Classical DMC.
    Dmc(DiscreteChannel),
    /// Capacity and dispersion only.
    Dispersion { capacity: f64, dispersion: f64 },
}

impl BoundModel {
    pub fn describe(&self) -> String {
        match self {
            BoundModel::Binary { gamma } => format!("binary gamma={gamma}"),
            BoundModel::Bpsk { energy } => format!("bpsk energy={energy}"),
            BoundModel::Ensemble { ensemble, .. } => {
                format!("ensemble size={}", ensemble.alphabet_size())
            }
            BoundModel::Dmc(ch) => format!("dmc {}x{}", ch.inputs(), ch.outputs()),
            BoundModel::Dispersion {
                capacity,
                dispersion,
            } => format!("dispersion C={capacity} V={dispersion}"),
        }
    }

    pub fn energy(&self) -> Option<f64> {
        match self {
            BoundModel::Bpsk { energy } => Some(*energy),
            BoundModel::Ensemble { energy, .. } => *energy,
            _ => None,
        }
    }
}

/// One row of a [`BoundCurve`]: a point, or the reason it is missing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveEntry {
    pub n: u64,
    pub point: Option<BoundPoint>,
    pub error: Option<String>,
}

/// Bound evaluated over an increasing blocklength grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCurve {
    pub model: String,
    pub energy: Option<f64>,
    pub entries: Vec<CurveEntry>,
}

pub const CSV_HEADER: &str = "n,r_star,s_star,exponent,pe_bound,rate_lb_nats,pie_nats_per_photon";

impl BoundCurve {
    pub fn points(&self) -> impl Iterator<Item = &BoundPoint> {
        self.entries.iter().filter_map(|e| e.point.as_ref())
    }

    /// Whether `rate_lb` never drops by more than `tol` along the evaluated points.
    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        let v: Vec<f64> = self.points().map(|p| p.rate_lb).collect();
        v.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    pub fn to_csv(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| format!("{x:?}")).unwrap_or_default()
        }
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for e in &self.entries {
            match &e.point {
                Some(p) => out.push_str(&format!(
                    "{},{:?},{},{:?},{},{:?},{}\n",
                    p.n,
                    p.r_star,
                    opt(p.s_star),
                    p.exponent,
                    opt(p.pe_bound),
                    p.rate_lb,
                    opt(self.energy.map(|en| p.rate_lb / en)),
                )),
                None => out.push_str(&format!("{},,,,,,\n", e.n)),
            }
        }
        out
    }
}

fn evaluate_all<F>(ns: &[u64], f: F) -> Vec<CurveEntry>
where
    F: Fn(u64) -> Result<BoundPoint> + Sync,
{
    ns.par_iter()
        .map(|&n| match f(n) {
            Ok(p) => CurveEntry {
                n,
                point: Some(p),
                error: None,
            },
            Err(e) => CurveEntry {
                n,
                point: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

/// Evaluate the bound matching `model` at each blocklength in `ns`.
///
/// Model construction errors are returned; per-point errors are recorded in
/// the curve.
pub fn sweep(model: &BoundModel, ns: &[u64]) -> Result<BoundCurve> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("blocklength grid must be strictly increasing".into()));
    }
    let entries = match model {
        BoundModel::Binary { gamma } => {
            let eval = thm1_evaluator(&GramEnsemble::binary(0.5, *gamma)?)?;
            evaluate_all(ns, |n| eval.at(n))
        }
        BoundModel::Ensemble { ensemble, .. } => {
            let eval = thm1_evaluator(ensemble)?;
            evaluate_all(ns, |n| eval.at(n))
        }
        BoundModel::Dmc(ch) => {
            let eval = thm2_evaluator(ch)?;
            evaluate_all(ns, |n| eval.at(n))
        }
        BoundModel::Bpsk { energy } => {
            check_energy(*energy)?;
            evaluate_all(ns, |n| cor1_bpsk_bound(*energy, n))
        }
        BoundModel::Dispersion {
            capacity,
            dispersion,
        } => evaluate_all(ns, |n| thm3_point(*capacity, *dispersion, n)),
    };
    Ok(BoundCurve {
        model: model.describe(),
        energy: model.energy(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacities::max_mutual_information;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equierror_values() {
        assert_abs_diff_eq!(equierror_capacity(7.0, 0.0).unwrap(), 7f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(equierror_capacity(2.0, 0.5).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(equierror_capacity(4.0, 0.1).unwrap(), 0.951350158861631, epsilon = 1e-12);
        let ba = max_mutual_information(&equierror_channel(4, 0.1).unwrap(), 1e-12).unwrap();
        assert_abs_diff_eq!(ba.value, equierror_capacity(4.0, 0.1).unwrap(), epsilon = 1e-9);
        assert!(equierror_capacity_weak(4.0, 0.1).unwrap() < equierror_capacity(4.0, 0.1).unwrap());
        assert!(equierror_capacity(1.5, 0.1).is_err());
        assert!(equierror_capacity(3.0, 1.1).is_err());
    }

    #[test]
    fn equierror_channel_shapes() {
        assert_eq!(equierror_channel(2, 0.0).unwrap(), DiscreteChannel::identity(2).unwrap());
        assert_eq!(equierror_channel(2, 0.2).unwrap(), DiscreteChannel::bsc(0.2).unwrap());
        let ch = equierror_channel(3, 0.3).unwrap();
        assert_abs_diff_eq!(ch.prob(1, 1), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(ch.prob(1, 2), 0.15, epsilon = 1e-15);
    }

    #[test]
    fn thm3_limits() {
        let c = 0.3;
        let v = 1e-30;
        assert_abs_diff_eq!(thm3_bound(c, v, 1000).unwrap(), c - LN_2 / 1000.0, epsilon = 1e-12);
        assert!(thm3_bound(0.0555, 0.2105, 10).is_err());
        assert!(thm3_bound(0.0555, 0.0, 10_000).is_err());
    }

    #[test]
    fn simplified_regime_edges() {
        let e: f64 = 0.01;
        let l = (1.0 / e).ln();
        let lo = (l * l / e).ceil() as u64;
        assert!(bpsk_simplified_bound(e, lo).is_ok());
        assert!(bpsk_simplified_bound(e, lo - 1).is_err());
        assert!(bpsk_simplified_bound(e, 10_000).is_ok());
        assert!(bpsk_simplified_bound(e, 10_001).is_err());
    }

    #[test]
    fn cor1_regime_errors() {
        assert!(cor1_bpsk_bound(0.01, 100).is_err());
        assert!(cor1_bpsk_bound(0.0, 1000).is_err());
    }

    #[test]
    fn orthogonal_thm1_small_n_is_negative() {
        let p = thm1_bound(&GramEnsemble::binary(0.5, 0.0).unwrap(), 1).unwrap();
        assert!(p.is_negative());
        assert!(p.rate_lb <= 0.0);
    }

    #[test]
    fn sweep_rejects_unsorted_grid() {
        let m = BoundModel::Dispersion {
            capacity: 0.05,
            dispersion: 0.2,
        };
        assert!(sweep(&m, &[10, 5]).is_err());
        let curve = sweep(&m, &[10, 100_000]).unwrap();
        assert!(curve.entries[0].error.is_some());
        assert!(curve.entries[1].point.is_some());
        let csv = curve.to_csv();
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv.contains("\n10,,,,,,\n"));
    }
}
