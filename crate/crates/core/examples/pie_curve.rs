//! Closed-form PIE lower bound for BPSK at E = 0.01.
use cqbound::bounds::{sweep, BoundModel};

fn main() -> cqbound::Result<()> {
    let grid: Vec<u64> = (0..=22).map(|k| (500.0 * 10f64.powf(k as f64 / 10.0)).round() as u64).collect();
    let curve = sweep(&BoundModel::Bpsk { energy: 0.01 }, &grid)?;
    for p in curve.points() {
        println!("n = {:>9}  PIE >= {:.4}", p.n, p.rate_lb / 0.01);
    }
    Ok(())
}
