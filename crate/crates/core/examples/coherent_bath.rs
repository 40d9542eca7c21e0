//! Build a three-mode bath by hand and tabulate r(t) for coherent phonons,
//! next to the spin-only factor and the short-time expansion.
//!
//!     cargo run --example coherent_bath

use dephasim::{
    decoherence_coherent, decoherence_short_time, spin_only_factor, BathConfig, ModeParams,
    TimeGrid,
};
use num_complex::Complex64;

fn main() -> anyhow::Result<()> {
    let modes = vec![
        ModeParams::with_population(0.3, 0.2, 1.0, Complex64::new(0.5, 0.0), 0.7),
        ModeParams::with_population(0.9, 0.12, 1.1, Complex64::new(-0.2, 0.4), 0.36),
        // Fully polarized: contributes only through its coupling ω.
        ModeParams::polarized(1.2, 0.25, 0.9),
    ];
    let bath = BathConfig::coherent(modes);
    let grid = TimeGrid::new(0.0, 10.0, 21)?;

    let exact = decoherence_coherent(&bath, &grid)?;
    let spins = spin_only_factor(&bath, &grid)?;
    let short = decoherence_short_time(&bath, &grid)?;

    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "t", "|r|", "arg r", "|r_spin|", "|r_short|"
    );
    for i in 0..grid.points() {
        let r = exact.values[i];
        println!(
            "{:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            grid.time(i),
            r.norm(),
            r.arg(),
            spins.values[i].norm(),
            short.values[i].norm()
        );
    }
    Ok(())
}
