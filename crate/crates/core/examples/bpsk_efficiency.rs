//! Holevo and symbol-by-symbol BPSK capacity per photon at low energy.
use cqbound::capacities::gaussian_holevo;
use cqbound::optical::{c1_bpsk, c_bpsk};

fn main() -> cqbound::Result<()> {
    println!("{:>8} {:>10} {:>10} {:>10}", "energy", "C/E", "C1/E", "gauss/E");
    for e in [0.1, 0.03, 0.01, 1e-3, 1e-4] {
        let c = c_bpsk(e)?.exact;
        let c1 = c1_bpsk(e)?.exact;
        println!("{e:>8} {:>10.4} {:>10.4} {:>10.4}", c / e, c1 / e, gaussian_holevo(e)? / e);
    }
    Ok(())
}
