//! Optimal on-off-like binary coherent inputs under single-symbol detection.
use cqbound::optical::{c1_bpsk, lemma1_optimal_binary};

fn main() -> cqbound::Result<()> {
    for e in [0.05, 0.01, 1e-3, 1e-4, 1e-5] {
        let r = lemma1_optimal_binary(e)?;
        let l = (1.0 / e).ln();
        println!(
            "E {e:<7} q* {:.4e} (x {:.3} of E·L/2)  C1/E {:.4}  bpsk {:.4}  asym {:.4}",
            r.q_star,
            r.q_star / (0.5 * e * l),
            r.c1_exact / e,
            c1_bpsk(e)?.exact / e,
            r.c1_asymptotic / e
        );
    }
    Ok(())
}
