//! Short-time Gaussian decay |r| ≈ exp(-Γ²t²) for growing random baths:
//! fitted Γ² against the predicted sum over modes.
//!
//!     cargo run --release --example gaussian_law

use dephasim::{
    decoherence_coherent, fit_gaussian_rate, gaussian_rate, sample_config, EnsembleSpec, TimeGrid,
};

fn main() -> anyhow::Result<()> {
    println!(
        "{:>5} {:>12} {:>12} {:>10}",
        "N", "fitted", "predicted", "rel gap"
    );
    for n_modes in [10, 25, 50, 100, 200, 400] {
        let bath = sample_config(&EnsembleSpec {
            n_modes,
            seed: 2024,
            ..Default::default()
        })?;
        let t_cut = 0.05 / bath.max_big_omega();
        let series = decoherence_coherent(&bath, &TimeGrid::new(0.0, t_cut, 50)?)?;
        let fitted = fit_gaussian_rate(&series, t_cut)?;
        let predicted = gaussian_rate(&bath)?;
        println!(
            "{n_modes:>5} {fitted:>12.5} {predicted:>12.5} {:>10.2e}",
            (fitted - predicted).abs() / predicted
        );
    }
    Ok(())
}
