//! Random-coding exponents: pure-state BPSK and the BSC.
use cqbound::exponents::{classical_error_exponent, quantum_error_exponent};
use cqbound::optical::bpsk_ensemble;
use cqbound::DiscreteChannel;

fn main() -> cqbound::Result<()> {
    let e = bpsk_ensemble(0.01, 0.5)?;
    for r in [0.005, 0.01, 0.02, 0.03, 0.04, 0.05] {
        let p = quantum_error_exponent(&e, r)?;
        println!("bpsk R {r:<6} E {:.3e}  s* {:.4}", p.exponent, p.s_star);
    }
    let bsc = DiscreteChannel::bsc(0.11)?;
    for r in [0.05, 0.1, 0.2, 0.3] {
        let p = classical_error_exponent(&bsc, r)?;
        println!("bsc  R {r:<6} E {:.3e}  s* {:.4}", p.exponent, p.s_star);
    }
    Ok(())
}
