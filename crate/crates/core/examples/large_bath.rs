//! A bath of 10^5 modes on a 200-point grid. Above 10^4 modes the product is
//! carried in log form, so |r| far below f64's range still has a phase.
//!
//!     cargo run --release --example large_bath

use std::time::Instant;

use dephasim::closed_form::ModeProduct;
use dephasim::{decoherence_coherent, mode_factor_explicit, sample_config, EnsembleSpec, TimeGrid};

fn main() -> anyhow::Result<()> {
    let bath = sample_config(&EnsembleSpec {
        n_modes: 100_000,
        seed: 1,
        ..Default::default()
    })?;
    let grid = TimeGrid::new(0.0, 0.05, 200)?;

    let start = Instant::now();
    let series = decoherence_coherent(&bath, &grid)?;
    println!("200 points x 1e5 modes in {:.2?}", start.elapsed());
    for i in (0..grid.points()).step_by(40) {
        println!(
            "t = {:.4}  |r| = {:.6e}",
            grid.time(i),
            series.values[i].norm()
        );
    }

    // ln|r| at a time where |r| underflows to zero.
    let t = 1.0;
    let mut product = ModeProduct::new(bath.modes.len());
    for mode in &bath.modes {
        let f = mode_factor_explicit(mode, t)?;
        product.push(0.0, f);
    }
    println!(
        "t = {t}: |r| = {:e}, ln|r| = {:.3}",
        product.value().norm(),
        product.log_abs()
    );
    Ok(())
}
