//! Two thermal closed forms differ only in the argument of coth. Evaluate
//! both against the thermal oracle and see which one it agrees with.
//!
//!     cargo run --release --example thermal_adjudication

use dephasim::oracle::oracle_mode_factor_thermal;
use dephasim::{decoherence_thermal, BathConfig, CothVariant, ModeParams, TimeGrid};
use num_complex::Complex64;

fn main() -> anyhow::Result<()> {
    let mode = ModeParams::with_population(0.3, 0.2, 1.0, Complex64::new(0.0, 0.0), 0.7);
    let grid = TimeGrid::new(0.0, 10.0, 50)?;
    for temperature in [0.2, 1.0, 5.0] {
        let bath = BathConfig::thermal(vec![mode], temperature);
        let n_max = dephasim::oracle::default_n_max(&mode, &bath.phonons);
        let oracle: Vec<Complex64> = grid
            .times()
            .into_iter()
            .map(|t| oracle_mode_factor_thermal(&mode, temperature, t, n_max))
            .collect::<Result<_, _>>()?;
        for variant in [CothVariant::PaperCoth, CothVariant::HalfCoth] {
            let closed = decoherence_thermal(&bath, &grid, variant)?;
            let err = closed
                .values
                .iter()
                .zip(&oracle)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            println!("T = {temperature:<4} {variant:?}: max error {err:.2e}");
        }
    }
    Ok(())
}
