//! Check the closed form against the truncated Fock-space oracle on a few
//! random baths and report the truncation the oracle settled on.
//!
//!     cargo run --release --example oracle_crosscheck

use dephasim::{
    decoherence_coherent, oracle_decoherence, sample_config, EnsembleSpec, TimeGrid,
    TruncationPolicy,
};

fn main() -> anyhow::Result<()> {
    let policy = TruncationPolicy::default();
    for seed in 0..5 {
        let bath = sample_config(&EnsembleSpec {
            n_modes: 3,
            seed,
            ..Default::default()
        })?;
        let grid = TimeGrid::new(0.0, 5.0 / bath.min_big_omega(), 50)?;
        let closed = decoherence_coherent(&bath, &grid)?;
        let oracle = oracle_decoherence(&bath, &grid, &policy)?;
        let n_max: Vec<&str> = (0..bath.modes.len())
            .map(|i| oracle.meta[&format!("n_max[{i}]")].as_str())
            .collect();
        println!(
            "seed {seed}: n_max = [{}], max |r_closed - r_oracle| = {:.2e}",
            n_max.join(", "),
            closed.sup_distance(&oracle)
        );
    }
    Ok(())
}
