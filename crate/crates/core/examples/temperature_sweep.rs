//! |r(t*)| at a fixed probe time as the phonon temperature rises, for both
//! coth variants. CSV on stdout.
//!
//!     cargo run --release --example temperature_sweep > sweep.csv

use dephasim::{
    decoherence_thermal, sample_config, BathConfig, CothVariant, EnsembleSpec, PhononPrep, TimeGrid,
};

fn main() -> anyhow::Result<()> {
    let bath = sample_config(&EnsembleSpec {
        n_modes: 6,
        seed: 400,
        ..Default::default()
    })?;
    let t_star = 1.0 / bath.max_big_omega();
    let probe = TimeGrid::new(t_star, t_star, 1)?;
    println!("T,abs_r_half,abs_r_paper");
    for i in 0..=40 {
        let temperature = 0.1 * 100f64.powf(i as f64 / 40.0);
        let hot = BathConfig {
            phonons: PhononPrep::Thermal { temperature },
            ..bath.clone()
        };
        let half = decoherence_thermal(&hot, &probe, CothVariant::HalfCoth)?.values[0].norm();
        let paper = decoherence_thermal(&hot, &probe, CothVariant::PaperCoth)?.values[0].norm();
        println!("{temperature:.4},{half:.8e},{paper:.8e}");
    }
    Ok(())
}
