//! Spectral and entropy primitives.
//!
//! A pure-state alphabet `{|ψ_x⟩}` is carried around as its Gram matrix of
//! inner products. The non-zero spectrum of `ρ = Σ_x p_x |ψ_x⟩⟨ψ_x|` equals
//! the spectrum of the weighted Gram matrix `D^{1/2} G D^{1/2}` with
//! `D = diag(p)`, so no explicit Hilbert-space vectors are ever needed for
//! entropies. All logarithms are natural.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest matrix dimension accepted by the eigensolver.
pub const MAX_EIGEN_DIM: usize = 64;

const HERMITIAN_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const SPECTRUM_NEG_TOL: f64 = 1e-12;
const SPECTRUM_SUM_TOL: f64 = 1e-10;
const PRIOR_SUM_TOL: f64 = 1e-12;
const PAIR_TOL: f64 = 1e-9;
/// Eigenvalues below this are treated as exactly zero in entropy and exponent sums.
pub const ZERO_EIGENVALUE: f64 = 1e-15;

/// Dense Hermitian matrix stored as separate row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl HermitianMatrix {
    /// Builds a matrix from row-major real and imaginary parts. Hermiticity is
    /// checked to `1e-10` and the result is symmetrized as `(M + M†)/2`.
    pub fn new(dim: usize, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        if re.len() != dim * dim || im.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries, got {} real and {} imaginary",
                dim * dim,
                re.len(),
                im.len()
            )));
        }
        if re.iter().chain(im.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("matrix has non-finite entries".into()));
        }
        let mut m = HermitianMatrix { dim, re, im };
        for i in 0..dim {
            for j in i..dim {
                let (a, b) = (i * dim + j, j * dim + i);
                let dre = m.re[a] - m.re[b];
                let dim_ = m.im[a] + m.im[b];
                if dre.abs() > HERMITIAN_TOL || dim_.abs() > HERMITIAN_TOL {
                    return Err(Error::Invalid(format!(
                        "matrix is not Hermitian at ({i}, {j})"
                    )));
                }
                let re_avg = 0.5 * (m.re[a] + m.re[b]);
                let im_avg = 0.5 * (m.im[a] - m.im[b]);
                m.re[a] = re_avg;
                m.re[b] = re_avg;
                m.im[a] = im_avg;
                m.im[b] = -im_avg;
            }
        }
        Ok(m)
    }

    /// Real symmetric matrix from rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("matrix is not square".into()));
        }
        let re: Vec<f64> = rows.iter().flatten().copied().collect();
        HermitianMatrix::new(dim, re, vec![0.0; dim * dim])
    }

    pub fn from_complex_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("matrix is not square".into()));
        }
        let re = rows.iter().flatten().map(|z| z.re).collect();
        let im = rows.iter().flatten().map(|z| z.im).collect();
        HermitianMatrix::new(dim, re, im)
    }

    pub fn identity(dim: usize) -> Self {
        let mut re = vec![0.0; dim * dim];
        for i in 0..dim {
            re[i * dim + i] = 1.0;
        }
        HermitianMatrix {
            dim,
            re,
            im: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let k = i * self.dim + j;
        Complex64::new(self.re[k], self.im[k])
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(|&v| v == 0.0)
    }

    fn frobenius_norm(&self) -> f64 {
        self.re
            .iter()
            .chain(self.im.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Real symmetric form: the matrix itself when real, otherwise the
    /// `2d × 2d` embedding `[[A, -B], [B, A]]` of `A + iB`.
    fn real_form(&self) -> (usize, Vec<f64>) {
        let d = self.dim;
        if self.is_real() {
            return (d, self.re.clone());
        }
        let n = 2 * d;
        let mut a = vec![0.0; n * n];
        for i in 0..d {
            for j in 0..d {
                let (re, im) = (self.re[i * d + j], self.im[i * d + j]);
                a[i * n + j] = re;
                a[(i + d) * n + (j + d)] = re;
                a[(i + d) * n + j] = im;
                a[i * n + (j + d)] = -im;
            }
        }
        (n, a)
    }
}

/// Eigen-decomposition of a real symmetric `n × n` matrix (row-major) by
/// cyclic Jacobi rotations.
///
/// Returns eigenvalues sorted nonincreasing and, when requested, the matching
/// eigenvectors as the columns of a row-major matrix.
pub(crate) fn symmetric_jacobi(
    mut a: Vec<f64>,
    n: usize,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    const MAX_SWEEPS: usize = 100;
    debug_assert_eq!(a.len(), n * n);

    let mut v = if want_vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        Some(v)
    } else {
        None
    };

    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = (1e-15 * norm).powi(2);

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s
    };

    let mut converged = norm == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged {
        if off(&a) <= target {
            converged = true;
            break;
        }
        if sweeps == MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            method: "jacobi eigensolver",
            iterations: MAX_SWEEPS,
            value: off(&a).sqrt(),
            best: (0..n).map(|i| a[i * n + i]).collect(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = v.map(|v| {
        let mut sorted = vec![0.0; n * n];
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                sorted[row * n + col] = v[row * n + src];
            }
        }
        sorted
    });
    Ok((values, vectors))
}

/// All eigenvalues of a Hermitian matrix, sorted nonincreasing.
///
/// Complex matrices are diagonalized through their real `2d × 2d` embedding,
/// in which every eigenvalue appears twice; pairs are merged after checking
/// they agree to `1e-9`.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    if m.dim() > MAX_EIGEN_DIM {
        return Err(Error::Dimension(format!(
            "dimension {} exceeds eigensolver limit {MAX_EIGEN_DIM}",
            m.dim()
        )));
    }
    let (n, a) = m.real_form();
    let (values, _) = symmetric_jacobi(a, n, false)?;
    if n == m.dim() {
        return Ok(values);
    }
    let scale = m.frobenius_norm().max(1.0);
    values
        .chunks(2)
        .map(|pair| {
            if (pair[0] - pair[1]).abs() > PAIR_TOL * scale {
                Err(Error::NonConvergence {
                    method: "eigenvalue pairing",
                    iterations: 0,
                    value: pair[0] - pair[1],
                    best: values.clone(),
                })
            } else {
                Ok(0.5 * (pair[0] + pair[1]))
            }
        })
        .collect()
}

/// Eigenvalue distribution of a density operator, stored nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Validates and normalizes the ordering. Values down to `-1e-12` are
    /// clamped to zero; the sum must be one within `1e-10`.
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::Invalid("empty spectrum".into()));
        }
        for v in eigenvalues.iter_mut() {
            if !v.is_finite() || *v < -SPECTRUM_NEG_TOL {
                return Err(Error::Invalid(format!("invalid eigenvalue {v}")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = eigenvalues.iter().sum();
        if (sum - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::Invalid(format!("spectrum sums to {sum}")));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvalues that count in entropy and exponent sums.
    pub(crate) fn support(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|&v| v >= ZERO_EIGENVALUE)
    }
}

#[derive(Deserialize)]
struct RawEnsemble {
    prior: Vec<f64>,
    gram_re: Vec<Vec<f64>>,
    #[serde(default)]
    gram_im: Option<Vec<Vec<f64>>>,
}

/// A pure-state alphabet given by its Gram matrix, together with a prior.
#[derive(Debug, Clone, PartialEq)]
pub struct GramEnsemble {
    gram: HermitianMatrix,
    prior: Vec<f64>,
}

impl GramEnsemble {
    pub fn new(gram: HermitianMatrix, prior: Vec<f64>) -> Result<Self> {
        let d = gram.dim();
        if prior.len() != d {
            return Err(Error::Dimension(format!(
                "prior has {} entries for {d} states",
                prior.len()
            )));
        }
        check_prior(&prior)?;
        let mut gram = gram;
        for i in 0..d {
            let z = gram.get(i, i);
            if (z.re - 1.0).abs() > HERMITIAN_TOL || z.im.abs() > HERMITIAN_TOL {
                return Err(Error::Invalid(format!(
                    "Gram diagonal entry {i} is {z}, expected 1"
                )));
            }
            gram.re[i * d + i] = 1.0;
            gram.im[i * d + i] = 0.0;
        }
        for i in 0..d {
            for j in 0..d {
                if gram.get(i, j).norm() > 1.0 + 1e-12 {
                    return Err(Error::Invalid(format!(
                        "Gram entry ({i}, {j}) has magnitude above one"
                    )));
                }
            }
        }
        let min_eig = hermitian_eigenvalues(&gram)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -PSD_TOL {
            return Err(Error::Invalid(format!(
                "Gram matrix is not positive semidefinite (eigenvalue {min_eig})"
            )));
        }
        Ok(GramEnsemble { gram, prior })
    }

    /// Two states with real overlap `gamma` and prior `(1 - q, q)`.
    pub fn binary(q: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::domain(format!("overlap {gamma} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("prior weight {q} outside [0, 1]")));
        }
        let gram = HermitianMatrix::from_real_rows(&[vec![1.0, gamma], vec![gamma, 1.0]])?;
        GramEnsemble::new(gram, vec![1.0 - q, q])
    }

    /// Ensemble with a uniform prior; used where only the states matter.
    pub fn uniform(gram: HermitianMatrix) -> Result<Self> {
        let d = gram.dim();
        GramEnsemble::new(gram, vec![1.0 / d as f64; d])
    }

    pub fn with_prior(&self, prior: Vec<f64>) -> Result<Self> {
        GramEnsemble::new(self.gram.clone(), prior)
    }

    pub fn gram(&self) -> &HermitianMatrix {
        &self.gram
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn alphabet_size(&self) -> usize {
        self.prior.len()
    }

    /// `D^{1/2} G D^{1/2}`, isospectral with the density operator.
    pub fn weighted_gram(&self) -> HermitianMatrix {
        let d = self.alphabet_size();
        let w: Vec<f64> = self.prior.iter().map(|p| p.sqrt()).collect();
        let mut re = vec![0.0; d * d];
        let mut im = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let k = i * d + j;
                re[k] = w[i] * w[j] * self.gram.re[k];
                im[k] = w[i] * w[j] * self.gram.im[k];
            }
        }
        HermitianMatrix { dim: d, re, im }
    }

    /// Parses `{"prior": [..], "gram_re": [[..]], "gram_im": [[..]]}`; the
    /// imaginary part is optional.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawEnsemble = serde_json::from_str(text)?;
        let d = raw.gram_re.len();
        let im = match raw.gram_im {
            Some(rows) => rows,
            None => vec![vec![0.0; d]; d],
        };
        if raw.gram_re.iter().chain(im.iter()).any(|r| r.len() != d) || im.len() != d {
            return Err(Error::Dimension("Gram matrix is not square".into()));
        }
        let gram = HermitianMatrix::new(
            d,
            raw.gram_re.into_iter().flatten().collect(),
            im.into_iter().flatten().collect(),
        )?;
        GramEnsemble::new(gram, raw.prior)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let d = self.alphabet_size();
        let rows = |v: &[f64]| -> Vec<Vec<f64>> { v.chunks(d).map(|c| c.to_vec()).collect() };
        serde_json::json!({
            "prior": self.prior,
            "gram_re": rows(&self.gram.re),
            "gram_im": rows(&self.gram.im),
        })
    }
}

pub(crate) fn check_prior(prior: &[f64]) -> Result<()> {
    if prior.is_empty() {
        return Err(Error::Invalid("empty prior".into()));
    }
    if prior.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(Error::Invalid("prior has negative or non-finite entries".into()));
    }
    let sum: f64 = prior.iter().sum();
    if (sum - 1.0).abs() > PRIOR_SUM_TOL {
        return Err(Error::Invalid(format!("prior sums to {sum}")));
    }
    Ok(())
}

/// Eigenvalues of a two-state density operator with prior `(1 - q, q)` and
/// overlap magnitude `gamma`.
pub fn binary_spectrum(q: f64, gamma: f64) -> Result<Spectrum> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("prior weight {q} outside [0, 1]")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::domain(format!("overlap {gamma} outside [0, 1]")));
    }
    let mix = 4.0 * q * (1.0 - q) * (1.0 - gamma * gamma);
    let root = (1.0 - mix).max(0.0).sqrt();
    // (1 - root)/2 without cancellation.
    let small = 0.5 * mix / (1.0 + root);
    let large = 0.5 * (1.0 + root);
    Spectrum::new(vec![large, small])
}

/// Spectrum of the ensemble's density operator.
pub fn ensemble_spectrum(e: &GramEnsemble) -> Result<Spectrum> {
    Spectrum::new(hermitian_eigenvalues(&e.weighted_gram())?)
}

/// `-Σ σ log σ` in nats, with `0 log 0 = 0`.
pub fn von_neumann_entropy(s: &Spectrum) -> f64 {
    -s.support().map(|v| v * v.ln()).sum::<f64>()
}

/// Binary entropy in nats.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(xlogx_neg(p) + xlogx_neg(1.0 - p))
}

/// `-x log x` with the continuous extension at zero.
pub(crate) fn xlogx_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Fixed realization of the states of a Gram ensemble, used by the prior
/// optimizers to get gradients of spectral functions.
///
/// The columns `t_x` of `G^{1/2}` satisfy `⟨t_x|t_y⟩ = G_xy`, so
/// `ρ(P) = Σ_x P_x |t_x⟩⟨t_x|` is an honest density operator that is linear in
/// the prior. Complex states are kept in their real embedding, where each
/// eigenvalue of `ρ` is doubled.
#[derive(Debug, Clone)]
pub(crate) struct StateFrame {
    dim: usize,
    states: Vec<Vec<f64>>,
    partners: Option<Vec<Vec<f64>>>,
}

/// Eigen-data of `ρ(P)` in a [`StateFrame`].
pub(crate) struct FrameDecomposition {
    /// Eigenvalues of the (possibly embedded) density operator.
    pub eigenvalues: Vec<f64>,
    /// `weights[k][x] = |⟨v_k|t_x⟩|²` for eigenvector `v_k`.
    pub weights: Vec<Vec<f64>>,
    /// Multiplier turning sums over `eigenvalues` into traces (1/2 when embedded).
    pub trace_scale: f64,
}

impl StateFrame {
    pub fn from_gram(gram: &HermitianMatrix) -> Result<Self> {
        let d = gram.dim();
        let (n, a) = gram.real_form();
        let (values, vectors) = symmetric_jacobi(a, n, true)?;
        let v = vectors.expect("vectors requested");
        let roots: Vec<f64> = values.iter().map(|&l| l.max(0.0).sqrt()).collect();
        // sqrt of the (embedded) Gram matrix.
        let mut root = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                root[i * n + j] = (0..n).map(|k| v[i * n + k] * roots[k] * v[j * n + k]).sum();
            }
        }
        let column = |c: usize| -> Vec<f64> { (0..n).map(|r| root[r * n + c]).collect() };
        let states = (0..d).map(column).collect();
        let partners = (n != d).then(|| (d..n).map(column).collect());
        Ok(StateFrame {
            dim: n,
            states,
            partners,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.states.len()
    }

    pub fn decompose(&self, prior: &[f64]) -> Result<FrameDecomposition> {
        let n = self.dim;
        let mut rho = vec![0.0; n * n];
        let mut accumulate = |vecs: &[Vec<f64>]| {
            for (u, &p) in vecs.iter().zip(prior) {
                if p == 0.0 {
                    continue;
                }
                for i in 0..n {
                    let pu = p * u[i];
                    for j in 0..n {
                        rho[i * n + j] += pu * u[j];
                    }
                }
            }
        };
        accumulate(&self.states);
        if let Some(partners) = &self.partners {
            accumulate(partners);
        }
        let (eigenvalues, vectors) = symmetric_jacobi(rho, n, true)?;
        let v = vectors.expect("vectors requested");
        let weights = (0..n)
            .map(|k| {
                self.states
                    .iter()
                    .map(|u| {
                        let dot: f64 = (0..n).map(|i| v[i * n + k] * u[i]).sum();
                        dot * dot
                    })
                    .collect()
            })
            .collect();
        let trace_scale = if self.partners.is_some() { 0.5 } else { 1.0 };
        Ok(FrameDecomposition {
            eigenvalues,
            weights,
            trace_scale,
        })
    }
}
