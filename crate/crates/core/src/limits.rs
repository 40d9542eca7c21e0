//! Limit checks: phonon-free (ω → 0), stiff phonons (Ω/ω → ∞) and the
//! low-temperature agreement between thermal and vacuum-coherent phonons.

use num_complex::Complex64;

use crate::closed_form::{
    decoherence_coherent, decoherence_thermal, spin_only_factor, CothVariant,
};
use crate::error::Result;
use crate::model::{BathConfig, PhononPrep, TimeGrid};

fn as_coherent(config: &BathConfig) -> BathConfig {
    BathConfig {
        phonons: PhononPrep::Coherent,
        ..config.clone()
    }
}

/// Sup-norm distance between the coherent factor and the spin-only factor.
pub fn distance_to_spin_only(config: &BathConfig, grid: &TimeGrid) -> Result<f64> {
    let config = as_coherent(config);
    let full = decoherence_coherent(&config, grid)?;
    let spins = spin_only_factor(&config, grid)?;
    Ok(full.sup_distance(&spins))
}

/// Distances with every ω_k scaled by 10^{-k} for k = 1..=`steps`.
pub fn zurek_distances(config: &BathConfig, grid: &TimeGrid, steps: u32) -> Result<Vec<f64>> {
    (1..=steps)
        .map(|k| {
            let mut scaled = as_coherent(config);
            let factor = 10f64.powi(-(k as i32));
            for m in &mut scaled.modes {
                m.omega *= factor;
            }
            distance_to_spin_only(&scaled, grid)
        })
        .collect()
}

/// Upper bound Σ_k 8(ω_k/Ω_k)(ω_k/Ω_k + |λ_k|) on the distance to the
/// spin-only factor, valid at every time.
pub fn spin_only_bound(config: &BathConfig) -> f64 {
    config
        .modes
        .iter()
        .filter(|m| m.big_omega > 0.0)
        .map(|m| {
            let g = (m.omega / m.big_omega).abs();
            8.0 * g * (g + m.lambda.norm())
        })
        .sum()
}

/// One step of the stiff-phonon scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffStep {
    /// Largest ω_k/Ω_k after scaling.
    pub ratio: f64,
    pub distance: f64,
    pub bound: f64,
}

impl StiffStep {
    /// Reported constant C in distance ≤ C·max(ω/Ω).
    pub fn constant(&self) -> f64 {
        if self.ratio > 0.0 {
            self.distance / self.ratio
        } else {
            0.0
        }
    }
}

/// Distances with every Ω_k scaled by 10^{+k} for k = 1..=`steps`.
pub fn stiff_phonon_scan(
    config: &BathConfig,
    grid: &TimeGrid,
    steps: u32,
) -> Result<Vec<StiffStep>> {
    (1..=steps)
        .map(|k| {
            let mut scaled = as_coherent(config);
            let factor = 10f64.powi(k as i32);
            for m in &mut scaled.modes {
                m.big_omega *= factor;
            }
            let ratio = scaled
                .modes
                .iter()
                .filter(|m| m.big_omega > 0.0)
                .map(|m| (m.omega / m.big_omega).abs())
                .fold(0.0, f64::max);
            Ok(StiffStep {
                ratio,
                distance: distance_to_spin_only(&scaled, grid)?,
                bound: spin_only_bound(&scaled),
            })
        })
        .collect()
}

/// Pointwise distance between the thermal factor at `temperature` and the
/// coherent factor with every λ_k = 0.
pub fn thermal_vacuum_distance(
    config: &BathConfig,
    grid: &TimeGrid,
    temperature: f64,
    variant: CothVariant,
) -> Result<f64> {
    let mut vacuum = as_coherent(config);
    for m in &mut vacuum.modes {
        m.lambda = Complex64::new(0.0, 0.0);
    }
    let thermal = BathConfig {
        phonons: PhononPrep::Thermal { temperature },
        ..config.clone()
    };
    let a = decoherence_thermal(&thermal, grid, variant)?;
    let b = decoherence_coherent(&vacuum, grid)?;
    Ok(a.sup_distance(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_config, EnsembleSpec};

    #[test]
    fn zero_coupling_is_already_at_the_limit() {
        let spec = EnsembleSpec {
            omega_range: (0.0, 0.0),
            n_modes: 4,
            ..Default::default()
        };
        let cfg = sample_config(&spec).unwrap();
        let grid = TimeGrid::new(0.0, 10.0, 101).unwrap();
        assert!(zurek_distances(&cfg, &grid, 4)
            .unwrap()
            .iter()
            .all(|&d| d == 0.0));
        assert!(stiff_phonon_scan(&cfg, &grid, 4)
            .unwrap()
            .iter()
            .all(|s| s.distance == 0.0));
    }

    #[test]
    fn stiff_scan_respects_bound() {
        let cfg = sample_config(&EnsembleSpec {
            n_modes: 5,
            seed: 3,
            ..Default::default()
        })
        .unwrap();
        let grid = TimeGrid::new(0.0, 10.0, 201).unwrap();
        for step in stiff_phonon_scan(&cfg, &grid, 4).unwrap() {
            assert!(step.distance <= step.bound);
        }
    }

    #[test]
    fn half_temperature_is_far_from_vacuum() {
        let cfg = sample_config(&EnsembleSpec {
            n_modes: 3,
            seed: 5,
            ..Default::default()
        })
        .unwrap();
        let grid = TimeGrid::new(0.0, 10.0, 201).unwrap();
        let t = cfg.min_big_omega() / 2.0;
        let d = thermal_vacuum_distance(&cfg, &grid, t, CothVariant::PaperCoth).unwrap();
        assert!(d > 1e-3, "{d}");
    }
}
