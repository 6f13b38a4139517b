//! Holevo capacity against single-letter accessible information for two pure states.
use cqbound::capacities::{c1_binary, holevo_binary};

fn main() -> cqbound::Result<()> {
    for gamma in [0.0, 0.25, 0.5, 0.75, 0.9, 0.99] {
        let c = holevo_binary(gamma)?;
        let c1 = c1_binary(gamma)?;
        println!("gamma {gamma:<5} C {c:.6}  C1 {c1:.6}  ratio {:.4}", c / c1.max(1e-300));
    }
    Ok(())
}
