//! Load a JSON run config the way the `dephasim` binary does and evaluate it.
//!
//!     cargo run --example run_config -- examples/configs/ensemble.json

use std::path::PathBuf;

use dephasim::cli::{load_run_config, series_csv};
use dephasim::{decoherence_coherent, decoherence_thermal, CothVariant, PhononPrep};

fn main() -> anyhow::Result<()> {
    let path: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/examples/configs/coherent.json"
            )
            .into()
        });
    let run = load_run_config(&path, None)?;
    let series = match run.config.phonons {
        PhononPrep::Coherent => decoherence_coherent(&run.config, &run.grid)?,
        PhononPrep::Thermal { .. } => {
            decoherence_thermal(&run.config, &run.grid, CothVariant::HalfCoth)?
        }
    };
    eprintln!(
        "{} modes, {} points",
        run.config.modes.len(),
        run.grid.points()
    );
    print!("{}", series_csv(&series));
    Ok(())
}
