//! The three limits of the model: vanishing coupling, stiff phonons and
//! low temperature.
//!
//!     cargo run --release --example limits

use dephasim::limits::{stiff_phonon_scan, thermal_vacuum_distance, zurek_distances};
use dephasim::{sample_config, CothVariant, EnsembleSpec, TimeGrid};

fn main() -> anyhow::Result<()> {
    let grid = TimeGrid::new(0.0, 10.0, 401)?;
    let vacuum = sample_config(&EnsembleSpec {
        lambda_radius: 0.0,
        seed: 5,
        ..Default::default()
    })?;
    let displaced = sample_config(&EnsembleSpec {
        seed: 5,
        ..Default::default()
    })?;

    // Quadratic in the coupling scale for vacuum phonons, linear otherwise.
    let a = zurek_distances(&vacuum, &grid, 4)?;
    let b = zurek_distances(&displaced, &grid, 4)?;
    for (k, (x, y)) in a.iter().zip(&b).enumerate() {
        println!("omega x 1e-{}: vacuum {x:.2e}  displaced {y:.2e}", k + 1);
    }

    for step in stiff_phonon_scan(&displaced, &grid, 4)? {
        println!(
            "max omega/Omega {:.1e}: distance {:.2e} <= bound {:.2e}",
            step.ratio, step.distance, step.bound
        );
    }

    for factor in [50.0, 10.0, 2.0] {
        let temperature = displaced.min_big_omega() / factor;
        let d = thermal_vacuum_distance(&displaced, &grid, temperature, CothVariant::HalfCoth)?;
        println!("T = Omega_min/{factor}: thermal vs vacuum {d:.2e}");
    }
    Ok(())
}
