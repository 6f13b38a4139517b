//! Inner code over a BSC seen as a superchannel, with the equierror comparison.
use cqbound::dmcsim::{simulate, CodeChoice};
use cqbound::DiscreteChannel;

fn main() -> cqbound::Result<()> {
    let bsc = DiscreteChannel::bsc(0.11)?;
    for n in [4, 8, 12] {
        let r = simulate(&bsc, n, 0.2, 100_000, 1, CodeChoice::Random)?;
        println!(
            "n {n:>2} m {:>3} pe {:.5} ± {:.5}  equierror {:.4} nats/use  lemma2 {:?}",
            r.m, r.pe, r.pe_ci95, r.equierror_lb_nats_per_use, r.lemma2.map(|l| l.holds)
        );
    }
    let rep = simulate(&bsc, 3, 0.2, 100_000, 7, CodeChoice::Repetition)?;
    println!("repetition n=3: pe {:.5}", rep.pe);
    Ok(())
}
