//! Scalar and simplex-constrained maximizers shared by the capacity,
//! exponent and bound computations.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a one-dimensional maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMax {
    pub x: f64,
    pub value: f64,
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol` or after `max_iter`
/// reductions. The endpoints are compared against the interior optimum, so a
/// maximum sitting on the boundary is returned exactly.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<ScalarMax>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo <= hi) {
        return Err(Error::domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iter = 0;
    while b - a > tol && iter < max_iter {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        iter += 1;
    }
    let mut best = if fc >= fd {
        ScalarMax { x: c, value: fc }
    } else {
        ScalarMax { x: d, value: fd }
    };
    for x in [lo, hi] {
        let v = f(x)?;
        // ties go to the lower endpoint
        if v > best.value || (v == best.value && x < best.x) {
            best = ScalarMax { x, value: v };
        }
    }
    Ok(best)
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    let mut p: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    let s: f64 = p.iter().sum();
    for x in p.iter_mut() {
        *x /= s;
    }
    p
}

/// Maximum of a function over the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMax {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Projected gradient ascent with Armijo backtracking.
///
/// `oracle` returns the objective and its gradient at a point of the
/// simplex. Convergence is declared when the projected gradient step
/// `‖Π(p + ∇f) − p‖` falls below `tol`, or when no ascent step can be found
/// above floating-point resolution.
pub fn projected_gradient_ascent<F>(
    mut oracle: F,
    start: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<SimplexMax>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    const ARMIJO: f64 = 1e-4;
    let mut p = project_to_simplex(&start);
    let (mut value, mut grad) = oracle(&p)?;
    let mut step: f64 = 1.0;

    for iter in 0..max_iter {
        let full: Vec<f64> = p.iter().zip(&grad).map(|(x, g)| x + g).collect();
        let mapped = project_to_simplex(&full);
        let gap = p
            .iter()
            .zip(&mapped)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if gap < tol {
            return Ok(SimplexMax {
                point: p,
                value,
                iterations: iter,
            });
        }

        let mut accepted = false;
        while step > 1e-16 {
            let trial: Vec<f64> = p.iter().zip(&grad).map(|(x, g)| x + step * g).collect();
            let candidate = project_to_simplex(&trial);
            let ascent: f64 = candidate
                .iter()
                .zip(&p)
                .zip(&grad)
                .map(|((c, x), g)| g * (c - x))
                .sum();
            let (v, g) = oracle(&candidate)?;
            if v.is_finite() && v >= value + ARMIJO * ascent && ascent > 0.0 {
                p = candidate;
                value = v;
                grad = g;
                accepted = true;
                step = (step * 2.0).min(1e8);
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // stationary to within rounding
            return Ok(SimplexMax {
                point: p,
                value,
                iterations: iter,
            });
        }
    }
    Err(Error::NonConvergence {
        method: "projected gradient ascent",
        iterations: max_iter,
        value,
        best: p,
    })
}

/// All points of the simplex in `dim` coordinates whose entries are
/// multiples of `1/resolution`, in lexicographic order.
pub fn simplex_grid(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, res: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if dim == 1 {
            prefix.push(left);
            out.push(prefix.iter().map(|&k| k as f64 / res as f64).collect());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(dim - 1, left - k, res, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim > 0 {
        rec(dim, resolution, resolution, &mut Vec::new(), &mut out);
    }
    out
}
