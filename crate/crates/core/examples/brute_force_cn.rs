//! Exhaustive C_N for hard-decision inner decoders on a small BSC.
use cqbound::capacities::max_mutual_information;
use cqbound::dmcsim::brute_force_cn;
use cqbound::DiscreteChannel;

fn main() -> cqbound::Result<()> {
    let bsc = DiscreteChannel::bsc(0.11)?;
    println!("C = {:.6}", max_mutual_information(&bsc, 1e-12)?.value);
    for (n, m) in [(1, 2), (2, 2), (2, 3), (3, 2)] {
        let r = brute_force_cn(&bsc, n, m)?;
        println!("n {n} m {m}: C_N/N {:.6}  code {:?}", r.cn / n as f64, r.code);
    }
    Ok(())
}
