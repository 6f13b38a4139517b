//! Dispersion of BPSK next to the 1/E scaling, and the dispersion-form bound.
use cqbound::bounds::{thm1_bound, thm3_bound};
use cqbound::exponents::{awgn_vc_ratio_lowsnr, quantum_dispersion};
use cqbound::optical::{bpsk_ensemble, c_bpsk};
use cqbound::spectral::binary_spectrum;

fn main() -> cqbound::Result<()> {
    for e in [1e-2, 1e-3, 1e-4] {
        let c = c_bpsk(e)?.exact;
        let v = quantum_dispersion(&binary_spectrum(0.5, (-2.0 * e).exp())?);
        println!("E {e:<6} V/C^2 * E = {:.4}   awgn V/C^2 * snr = {:.4}", v / (c * c) * e, awgn_vc_ratio_lowsnr(e)? * e);
    }
    let c = c_bpsk(0.01)?.exact;
    let v = quantum_dispersion(&binary_spectrum(0.5, (-0.02f64).exp())?);
    let ens = bpsk_ensemble(0.01, 0.5)?;
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let t3 = thm3_bound(c, v, n).map(|r| r / 0.01).unwrap_or(f64::NAN);
        let t1 = thm1_bound(&ens, n)?.rate_lb / 0.01;
        println!("n {n:>8}  exponent PIE {t1:.4}  dispersion PIE {t3:.4}");
    }
    Ok(())
}
