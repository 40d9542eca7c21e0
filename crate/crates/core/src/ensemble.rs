//! Seeded random baths and the Gaussian-rate fit.
//!
//! Sampling uses ChaCha20 seeded from the 64-bit spec seed; mode `k` draws
//! from its own stream `k` of that generator, so a mode's parameters do not
//! depend on how many modes precede it and configs are reproducible across
//! platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::closed_form::thermal_spin_polarization;
use crate::error::{Error, Result};
use crate::model::{BathConfig, CentralAmplitudes, DecoherenceSeries, ModeParams, PhononPrep};

/// How bath-spin amplitudes are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpinInit {
    /// Haar-uniform pure states of a single spin.
    UniformBloch,
    /// Every bath spin up (α = 1).
    Polarized,
    /// Real amplitudes with Gibbs populations for a level splitting ±ε drawn
    /// uniformly from `epsilon_range`.
    GibbsThermal {
        epsilon_range: (f64, f64),
        temperature: f64,
    },
}

/// Distribution of random bath parameters, each i.i.d. uniform per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub n_modes: usize,
    pub omega0_range: (f64, f64),
    pub omega_range: (f64, f64),
    pub big_omega_range: (f64, f64),
    /// λ is uniform on the disk of this radius.
    pub lambda_radius: f64,
    pub spin_init: SpinInit,
    pub seed: u64,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            n_modes: 8,
            omega0_range: (0.5, 1.5),
            omega_range: (0.05, 0.3),
            big_omega_range: (0.8, 1.2),
            lambda_radius: 1.0,
            spin_init: SpinInit::UniformBloch,
            seed: 0,
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::SpecInvalid(format!(
            "{name}: need finite lo <= hi, got ({lo}, {hi})"
        )));
    }
    Ok(())
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::SpecInvalid("n_modes must be positive".into()));
        }
        check_range("omega0_range", self.omega0_range)?;
        check_range("omega_range", self.omega_range)?;
        check_range("big_omega_range", self.big_omega_range)?;
        if !(self.big_omega_range.0 > 0.0) {
            return Err(Error::SpecInvalid(
                "big_omega_range: lower bound must be positive".into(),
            ));
        }
        if !(self.lambda_radius >= 0.0) || !self.lambda_radius.is_finite() {
            return Err(Error::SpecInvalid(
                "lambda_radius must be finite and non-negative".into(),
            ));
        }
        if let SpinInit::GibbsThermal {
            epsilon_range,
            temperature,
        } = self.spin_init
        {
            check_range("epsilon_range", epsilon_range)?;
            if !(temperature > 0.0) {
                return Err(Error::SpecInvalid(
                    "spin temperature must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

#[inline]
fn uniform(rng: &mut ChaCha20Rng, (lo, hi): (f64, f64)) -> f64 {
    let u: f64 = rng.gen();
    lo + (hi - lo) * u
}

fn sample_mode(spec: &EnsembleSpec, rng: &mut ChaCha20Rng) -> Result<ModeParams> {
    let omega0 = uniform(rng, spec.omega0_range);
    let omega = uniform(rng, spec.omega_range);
    let big_omega = uniform(rng, spec.big_omega_range);

    let radius = spec.lambda_radius * rng.gen::<f64>().sqrt();
    let angle = std::f64::consts::TAU * rng.gen::<f64>();
    let lambda = Complex64::from_polar(radius, angle);

    let (alpha, beta) = match spec.spin_init {
        SpinInit::UniformBloch => {
            let cos_theta = uniform(rng, (-1.0, 1.0));
            let phi = std::f64::consts::TAU * rng.gen::<f64>();
            let p_up = 0.5 * (1.0 + cos_theta);
            (
                Complex64::new(p_up.sqrt(), 0.0),
                Complex64::from_polar((1.0 - p_up).sqrt(), phi),
            )
        }
        SpinInit::Polarized => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        SpinInit::GibbsThermal {
            epsilon_range,
            temperature,
        } => {
            let epsilon = uniform(rng, epsilon_range);
            let (p_up, p_down) = thermal_spin_polarization(epsilon, temperature)?;
            (
                Complex64::new(p_up.sqrt(), 0.0),
                Complex64::new(p_down.sqrt(), 0.0),
            )
        }
    };
    Ok(ModeParams {
        omega0,
        omega,
        big_omega,
        lambda,
        alpha,
        beta,
    })
}

/// Draws a coherent-phonon bath with a balanced central spin. The result is
/// a pure function of `spec`.
pub fn sample_config(spec: &EnsembleSpec) -> Result<BathConfig> {
    spec.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let modes = (0..spec.n_modes)
        .map(|k| {
            rng.set_stream(k as u64);
            rng.set_word_pos(0);
            sample_mode(spec, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let config = BathConfig {
        central: CentralAmplitudes::balanced(),
        modes,
        phonons: PhononPrep::Coherent,
    };
    config.validate()?;
    Ok(config)
}

/// Γ² from the least-squares fit of −ln|r(t)| = Γ² t² over 0 < t ≤ `t_cut`.
///
/// The fit goes through the origin, uses |r| only, and skips points with
/// |r| ≤ 1e-12.
pub fn fit_gaussian_rate(series: &DecoherenceSeries, t_cut: f64) -> Result<f64> {
    let (mut sxy, mut sxx, mut used) = (0.0, 0.0, 0usize);
    for (t, v) in series.times().into_iter().zip(&series.values) {
        let mag = v.norm();
        if t > 0.0 && t <= t_cut && mag > 1e-12 {
            let x = t * t;
            sxy += x * (-mag.ln());
            sxx += x * x;
            used += 1;
        }
    }
    if used < 5 {
        return Err(Error::InsufficientData(format!(
            "{used} usable points with 0 < t <= {t_cut}, need at least 5"
        )));
    }
    Ok(sxy / sxx)
}
