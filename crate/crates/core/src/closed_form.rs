//! Closed-form decoherence factors.
//!
//! Every evaluator here runs in time linear in `modes × grid points`. Each
//! per-mode factor splits into a real log-envelope and a unit-bounded spin
//! part `p↑·e^{-iθ} + p↓·e^{+iθ}`, which is what [`ModeProduct`] multiplies.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    BathConfig, BranchSign, CentralAmplitudes, ComplexAmp, DecoherenceSeries, Method, ModeParams,
    PhononPrep, TimeGrid, BOUND_TOL,
};

/// Above this many modes the product is carried as log-magnitude plus a
/// renormalized unit phasor so that Π_k |f_k| cannot underflow midway.
pub const LOG_PRODUCT_THRESHOLD: usize = 10_000;

/// Which argument the thermal coth carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CothVariant {
    /// coth(Ω/T), as printed in the published thermal formula.
    PaperCoth,
    /// coth(Ω/2T), the standard independent-boson form.
    HalfCoth,
}

impl CothVariant {
    pub fn argument(self, big_omega: f64, temperature: f64) -> f64 {
        match self {
            CothVariant::PaperCoth => big_omega / temperature,
            CothVariant::HalfCoth => big_omega / (2.0 * temperature),
        }
    }

    pub fn method(self) -> Method {
        match self {
            CothVariant::PaperCoth => Method::ThermalClosedPaperCoth,
            CothVariant::HalfCoth => Method::ThermalClosedHalfCoth,
        }
    }
}

/// coth(x) for x > 0 as 1 + 2/(e^{2x} − 1); exactly 1 once e^{2x} overflows.
pub fn coth(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    1.0 + 2.0 / (2.0 * x).exp_m1()
}

/// 1 − cos(x) without cancellation near x = 0.
#[inline]
fn one_minus_cos(x: f64) -> f64 {
    sin_and_one_minus_cos(x).1
}

/// (sin x, 1 − cos x) from a single `sin_cos`; 1 − cos x is taken as
/// sin²x/(1 + cos x) while cos x > 0 to avoid cancellation.
#[inline]
fn sin_and_one_minus_cos(x: f64) -> (f64, f64) {
    let (s, c) = libm::sincos(x);
    let omc = if c > 0.0 { s * s / (1.0 + c) } else { 1.0 - c };
    (s, omc)
}

/// `p↑·e^{-iθ} + p↓·e^{+iθ}`.
#[inline]
fn spin_mixture(p_up: f64, p_down: f64, theta: f64) -> Complex64 {
    let (s, c) = libm::sincos(theta);
    Complex64::new((p_up + p_down) * c, (p_down - p_up) * s)
}

/// ⟨u|v⟩ for coherent states |u⟩, |v⟩.
///
/// The magnitude is evaluated as e^{-|u-v|²/2}, which equals
/// |e^{-|u|²/2 - |v|²/2 + u*·v}| and can never exceed one.
pub fn coherent_overlap(u: ComplexAmp, v: ComplexAmp) -> ComplexAmp {
    let cross = u.conj() * v;
    Complex64::from_polar((-0.5 * (u - v).norm_sqr()).exp(), cross.im)
}

fn require_phonon_mode(mode: &ModeParams) -> Result<()> {
    if mode.big_omega > 0.0 {
        Ok(())
    } else {
        Err(Error::DegenerateMode {
            index: 0,
            omega: mode.omega,
        })
    }
}

/// Coherent eigenvalue u^σ(t) = (λ + σω/Ω)·e^{-iΩt} − σω/Ω reached by |λ⟩
/// under the branch Hamiltonian of sign σ.
pub fn branch_eigenvalue(mode: &ModeParams, sign: BranchSign, t: f64) -> Result<ComplexAmp> {
    require_phonon_mode(mode)?;
    let shift = sign.sigma() * mode.displacement();
    let rot = Complex64::from_polar(1.0, -mode.big_omega * t);
    Ok((mode.lambda + shift) * rot - shift)
}

/// Pure phase A^σ(t) accompanying the coherent state |u^σ(t)⟩.
pub fn branch_phase(mode: &ModeParams, sign: BranchSign, t: f64) -> Result<ComplexAmp> {
    require_phonon_mode(mode)?;
    let sigma = sign.sigma();
    let g = mode.displacement();
    let wt = mode.big_omega * t;
    let polaron = g * mode.omega * (t - wt.sin() / mode.big_omega);
    let drive = g * (mode.lambda.re * wt.sin() + mode.lambda.im * one_minus_cos(wt));
    Ok(Complex64::from_polar(
        1.0,
        polaron - sigma * mode.omega0 * t - sigma * drive,
    ))
}

/// Per-mode factor assembled from branch phases and coherent overlaps:
/// |α|²·A⁻*A⁺⟨u⁻|u⁺⟩ + |β|²·A⁺*A⁻⟨u⁺|u⁻⟩.
///
/// Modes with Ω = ω = 0 reduce to the spin-only factor.
pub fn mode_factor_coherent(mode: &ModeParams, t: f64) -> Result<ComplexAmp> {
    if mode.is_spin_only() {
        return Ok(spin_mixture(
            mode.p_up(),
            mode.p_down(),
            2.0 * mode.omega0 * t,
        ));
    }
    let u_plus = branch_eigenvalue(mode, BranchSign::Plus, t)?;
    let u_minus = branch_eigenvalue(mode, BranchSign::Minus, t)?;
    let a_plus = branch_phase(mode, BranchSign::Plus, t)?;
    let a_minus = branch_phase(mode, BranchSign::Minus, t)?;
    let up = a_minus.conj() * a_plus * coherent_overlap(u_minus, u_plus);
    let down = a_plus.conj() * a_minus * coherent_overlap(u_plus, u_minus);
    Ok(up * mode.p_up() + down * mode.p_down())
}

/// Per-mode constants of the explicit coherent factor, hoisted out of the
/// time loop.
#[derive(Debug, Clone, Copy)]
struct CoherentCoefficients {
    big_omega: f64,
    two_omega0: f64,
    /// 4(ω/Ω)²
    envelope: f64,
    /// 4(ω/Ω)·Re λ and 4(ω/Ω)·Im λ
    drive_re: f64,
    drive_im: f64,
    p_up: f64,
    p_down: f64,
}

impl CoherentCoefficients {
    fn new(mode: &ModeParams) -> Self {
        let g = if mode.is_spin_only() {
            0.0
        } else {
            mode.displacement()
        };
        CoherentCoefficients {
            big_omega: mode.big_omega,
            two_omega0: 2.0 * mode.omega0,
            envelope: 4.0 * g * g,
            drive_re: 4.0 * g * mode.lambda.re,
            drive_im: 4.0 * g * mode.lambda.im,
            p_up: mode.p_up(),
            p_down: mode.p_down(),
        }
    }

    /// Log-envelope and spin part at time t.
    #[inline]
    fn terms(&self, t: f64) -> (f64, Complex64) {
        let (sin, omc) = sin_and_one_minus_cos(self.big_omega * t);
        let theta = self.two_omega0 * t + self.drive_re * sin + self.drive_im * omc;
        (
            -self.envelope * omc,
            spin_mixture(self.p_up, self.p_down, theta),
        )
    }
}

/// Explicit per-mode coherent factor
/// e^{-4(ω/Ω)²(1−cos Ωt)}·(|α|²e^{-iθ} + |β|²e^{iθ}),
/// θ = 2ω0t + 4(ω/Ω)(Re λ sin Ωt + Im λ (1 − cos Ωt)).
pub fn mode_factor_explicit(mode: &ModeParams, t: f64) -> Result<ComplexAmp> {
    mode.validate(0)?;
    let (log_env, spin) = CoherentCoefficients::new(mode).terms(t);
    Ok(spin * log_env.exp())
}

/// Running product of per-mode factors given as (log-envelope, spin part).
#[derive(Debug, Clone, Copy)]
pub struct ModeProduct {
    log_scale: f64,
    phasor: Complex64,
    log_form: bool,
}

impl ModeProduct {
    pub fn new(n_modes: usize) -> Self {
        ModeProduct {
            log_scale: 0.0,
            phasor: Complex64::new(1.0, 0.0),
            log_form: n_modes > LOG_PRODUCT_THRESHOLD,
        }
    }

    #[inline]
    pub fn push(&mut self, log_env: f64, spin: Complex64) {
        if self.log_form {
            self.log_scale += log_env;
            self.phasor *= spin;
            let m2 = self.phasor.norm_sqr();
            if m2 < 1e-200 && m2 > 0.0 {
                let m = m2.sqrt();
                self.log_scale += m.ln();
                self.phasor /= m;
            }
        } else {
            self.phasor *= spin * log_env.exp();
        }
    }

    /// ln|r|, finite unless some factor vanished exactly.
    pub fn log_abs(&self) -> f64 {
        self.log_scale + self.phasor.norm().ln()
    }

    pub fn value(&self) -> Complex64 {
        if self.log_form {
            self.phasor * self.log_scale.exp()
        } else {
            self.phasor
        }
    }
}

fn require_coherent(config: &BathConfig) -> Result<()> {
    match config.phonons {
        PhononPrep::Coherent => Ok(()),
        PhononPrep::Thermal { .. } => Err(Error::config(
            "phonons: this evaluator needs a coherent phonon preparation",
        )),
    }
}

fn evaluate_grid<F>(grid: &TimeGrid, method: Method, f: F) -> DecoherenceSeries
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let values = (0..grid.points())
        .into_par_iter()
        .map(|i| f(grid.time(i)))
        .collect();
    DecoherenceSeries::new(*grid, values, method)
}

/// Grid points per block on the large-N coherent path.
const ROTATION_BLOCK: usize = 8;

#[inline]
fn cis(x: f64) -> Complex64 {
    let (s, c) = libm::sincos(x);
    Complex64::new(c, s)
}

/// Large-N coherent product. Within each block of grid points, e^{iΩt} and
/// e^{2iω0t} are evaluated exactly at the first point and advanced by one
/// grid step per point, which leaves a single short-argument `sincos` per
/// mode and time. Blocks start at fixed indices, so results do not depend on
/// the thread count.
fn coherent_rotated_blocks(
    coefficients: &[CoherentCoefficients],
    grid: &TimeGrid,
) -> Vec<Complex64> {
    let n = grid.points();
    let dt = if n > 1 {
        (grid.t_end() - grid.t_start()) / (n - 1) as f64
    } else {
        0.0
    };
    let steps: Vec<(Complex64, Complex64)> = coefficients
        .iter()
        .map(|c| (cis(c.big_omega * dt), cis(c.two_omega0 * dt)))
        .collect();
    let starts: Vec<usize> = (0..n).step_by(ROTATION_BLOCK).collect();
    starts
        .into_par_iter()
        .flat_map_iter(|start| {
            let len = ROTATION_BLOCK.min(n - start);
            let t0 = grid.time(start);
            let mut acc = [ModeProduct::new(coefficients.len()); ROTATION_BLOCK];
            for (c, (w, v)) in coefficients.iter().zip(&steps) {
                let mut osc = cis(c.big_omega * t0);
                let mut bare = cis(c.two_omega0 * t0);
                for a in &mut acc[..len] {
                    let sin = osc.im;
                    let omc = if osc.re > 0.0 {
                        sin * sin / (1.0 + osc.re)
                    } else {
                        1.0 - osc.re
                    };
                    let phase = bare * cis(c.drive_re * sin + c.drive_im * omc);
                    let spin = Complex64::new(
                        (c.p_up + c.p_down) * phase.re,
                        (c.p_down - c.p_up) * phase.im,
                    );
                    a.push(-c.envelope * omc, spin);
                    osc *= w;
                    bare *= v;
                }
            }
            acc.into_iter().take(len).map(|a| a.value())
        })
        .collect()
}

/// r(t) for coherent phonons, the product of the explicit per-mode factors.
pub fn decoherence_coherent(config: &BathConfig, grid: &TimeGrid) -> Result<DecoherenceSeries> {
    config.validate()?;
    require_coherent(config)?;
    let coefficients: Vec<_> = config.modes.iter().map(CoherentCoefficients::new).collect();
    if coefficients.len() > LOG_PRODUCT_THRESHOLD {
        let values = coherent_rotated_blocks(&coefficients, grid);
        return Ok(
            DecoherenceSeries::new(*grid, values, Method::CoherentClosed)
                .with_meta("modes", coefficients.len()),
        );
    }
    Ok(evaluate_grid(grid, Method::CoherentClosed, |t| {
        let mut acc = ModeProduct::new(coefficients.len());
        for c in &coefficients {
            let (log_env, spin) = c.terms(t);
            acc.push(log_env, spin);
        }
        acc.value()
    })
    .with_meta("modes", coefficients.len()))
}

/// r(t) for thermal phonons. The result does not depend on any λ_k.
pub fn decoherence_thermal(
    config: &BathConfig,
    grid: &TimeGrid,
    variant: CothVariant,
) -> Result<DecoherenceSeries> {
    config.validate()?;
    let temperature = match config.phonons {
        PhononPrep::Thermal { temperature } => temperature,
        PhononPrep::Coherent => {
            return Err(Error::config(
                "phonons: thermal evaluator needs a thermal phonon preparation",
            ))
        }
    };
    let mut weights = Vec::with_capacity(config.modes.len());
    for (i, m) in config.modes.iter().enumerate() {
        if !(m.big_omega > 0.0) {
            return Err(Error::config(format!(
                "mode {i}: thermal evaluation needs big_omega > 0"
            )));
        }
        let g = m.displacement();
        weights.push(4.0 * g * g * coth(variant.argument(m.big_omega, temperature)));
    }
    let modes = &config.modes;
    Ok(evaluate_grid(grid, variant.method(), |t| {
        let mut acc = ModeProduct::new(modes.len());
        for (m, w) in modes.iter().zip(&weights) {
            let log_env = -w * one_minus_cos(m.big_omega * t);
            acc.push(
                log_env,
                spin_mixture(m.p_up(), m.p_down(), 2.0 * m.omega0 * t),
            );
        }
        acc.value()
    })
    .with_meta("temperature", temperature))
}

/// Short-time expansion: Π e^{-2ω²t²}(|α|²e^{-iφt} + |β|²e^{iφt}), φ = 4ω Re λ + 2ω0.
pub fn decoherence_short_time(config: &BathConfig, grid: &TimeGrid) -> Result<DecoherenceSeries> {
    config.validate()?;
    require_coherent(config)?;
    let modes = &config.modes;
    Ok(evaluate_grid(grid, Method::ShortTime, |t| {
        let mut acc = ModeProduct::new(modes.len());
        for m in modes {
            let phi = 4.0 * m.omega * m.lambda.re + 2.0 * m.omega0;
            let log_env = -2.0 * m.omega * m.omega * t * t;
            acc.push(log_env, spin_mixture(m.p_up(), m.p_down(), phi * t));
        }
        acc.value()
    }))
}

/// Gaussian decay rate Γ² = Σ_k [8|α_k|²|β_k|²(2ω_k Re λ_k + ω0_k)² + 2ω_k²].
pub fn gaussian_rate(config: &BathConfig) -> Result<f64> {
    config.validate()?;
    require_coherent(config)?;
    Ok(config
        .modes
        .iter()
        .map(|m| {
            let drive = 2.0 * m.omega * m.lambda.re + m.omega0;
            8.0 * m.p_up() * m.p_down() * drive * drive + 2.0 * m.omega * m.omega
        })
        .sum())
}

/// Large-N Gaussian law |r(t)| ≈ e^{-Γ²t²}.
pub fn gaussian_envelope(config: &BathConfig, t: f64) -> Result<f64> {
    Ok((-t * t * gaussian_rate(config)?).exp())
}

/// The Gaussian envelope sampled on a grid (real, non-negative values).
pub fn gaussian_series(config: &BathConfig, grid: &TimeGrid) -> Result<DecoherenceSeries> {
    let rate = gaussian_rate(config)?;
    Ok(evaluate_grid(grid, Method::GaussianEnvelope, |t| {
        Complex64::new((-t * t * rate).exp(), 0.0)
    })
    .with_meta("gamma2", format!("{rate:.17e}")))
}

/// Phonon-free factor Π_k (|α_k|²e^{-2iω0_k t} + |β_k|²e^{2iω0_k t}).
///
/// Ignores ω, Ω and λ of every mode as well as the phonon preparation.
pub fn spin_only_factor(config: &BathConfig, grid: &TimeGrid) -> Result<DecoherenceSeries> {
    config.central.validate()?;
    if config.modes.is_empty() {
        return Err(Error::config("modes: at least one mode is required"));
    }
    for (i, m) in config.modes.iter().enumerate() {
        let spin_only = ModeParams {
            omega: 0.0,
            big_omega: 0.0,
            lambda: ComplexAmp::new(0.0, 0.0),
            ..*m
        };
        spin_only.validate(i)?;
    }
    let modes = &config.modes;
    Ok(evaluate_grid(grid, Method::SpinOnly, |t| {
        let mut acc = ModeProduct::new(modes.len());
        for m in modes {
            acc.push(0.0, spin_mixture(m.p_up(), m.p_down(), 2.0 * m.omega0 * t));
        }
        acc.value()
    }))
}

/// Reduced density matrix of the central spin in the c_z basis.
pub fn reduced_density(central: &CentralAmplitudes, r: ComplexAmp) -> Result<[[Complex64; 2]; 2]> {
    if !r.is_finite() || r.norm() > 1.0 + 1e-9 {
        return Err(Error::config(format!("|r| = {} exceeds 1", r.norm())));
    }
    let (cu, cd) = (central.c_up, central.c_down);
    let off = cu * cd.conj() * r;
    Ok([
        [Complex64::new(cu.norm_sqr(), 0.0), off],
        [off.conj(), Complex64::new(cd.norm_sqr(), 0.0)],
    ])
}

/// Gibbs populations of a bath spin with level splitting ±ε at temperature T.
pub fn thermal_spin_polarization(epsilon: f64, temperature: f64) -> Result<(f64, f64)> {
    if !(temperature > 0.0) || !epsilon.is_finite() {
        return Err(Error::config(format!(
            "thermal spin polarization needs T > 0 and finite epsilon (T = {temperature}, epsilon = {epsilon})"
        )));
    }
    // e^{x}/(2 cosh x) is the logistic function of 2x.
    let x = 2.0 * epsilon / temperature;
    let p_up = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    Ok((p_up, 1.0 - p_up))
}

/// Largest |r| in a series, for bound checks.
pub fn max_magnitude(series: &DecoherenceSeries) -> f64 {
    series.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// True when every value respects |r| ≤ 1 + 1e-12.
pub fn within_bound(series: &DecoherenceSeries) -> bool {
    max_magnitude(series) <= 1.0 + BOUND_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mode(omega0: f64, omega: f64, big_omega: f64, lambda: Complex64, p_up: f64) -> ModeParams {
        ModeParams::with_population(omega0, omega, big_omega, lambda, p_up)
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(coherent_overlap(c(0.0, 0.0), c(0.0, 0.0)), c(1.0, 0.0));
        let l = c(0.3, 0.4);
        assert_eq!(coherent_overlap(l, l), c(1.0, 0.0));
        let v = coherent_overlap(c(0.0, 0.0), c(1.0, 0.0));
        assert!((v.norm() - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v.norm() - 0.606531).abs() < 1e-6);
    }

    #[test]
    fn overlap_matches_unreduced_exponent() {
        let u = c(0.7, -0.2);
        let v = c(-0.1, 0.9);
        let direct = (-0.5 * u.norm_sqr() - 0.5 * v.norm_sqr() + u.conj() * v).exp();
        assert!((coherent_overlap(u, v) - direct).norm() < 1e-15);
    }

    #[test]
    fn branch_eigenvalue_examples() {
        let m = mode(0.0, 0.2, 1.0, c(0.0, 0.0), 1.0);
        let u = branch_eigenvalue(&m, BranchSign::Plus, PI).unwrap();
        assert!((u - c(-0.4, 0.0)).norm() < 1e-15);

        let m = mode(0.3, 0.25, 1.3, c(0.4, -0.6), 0.5);
        for s in [BranchSign::Plus, BranchSign::Minus] {
            assert!((branch_eigenvalue(&m, s, 0.0).unwrap() - m.lambda).norm() < 1e-16);
        }

        let m = mode(0.0, 0.0, 2.0, c(0.5, 0.0), 1.0);
        let u = branch_eigenvalue(&m, BranchSign::Minus, PI / 4.0).unwrap();
        assert!((u - c(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_mode_is_rejected() {
        let m = mode(0.3, 0.2, 0.0, c(0.0, 0.0), 1.0);
        assert!(matches!(
            branch_eigenvalue(&m, BranchSign::Plus, 1.0),
            Err(Error::DegenerateMode { .. })
        ));
        assert!(matches!(
            branch_phase(&m, BranchSign::Plus, 1.0),
            Err(Error::DegenerateMode { .. })
        ));
        assert!(mode_factor_coherent(&m, 1.0).is_err());
        let cfg = BathConfig::coherent(vec![m]);
        let grid = TimeGrid::new(0.0, 1.0, 3).unwrap();
        assert!(matches!(
            decoherence_coherent(&cfg, &grid),
            Err(Error::DegenerateMode { index: 0, .. })
        ));
    }

    #[test]
    fn branch_phase_examples() {
        let m = mode(0.3, 0.2, 1.0, c(0.5, 0.5), 0.7);
        for s in [BranchSign::Plus, BranchSign::Minus] {
            assert_eq!(branch_phase(&m, s, 0.0).unwrap(), c(1.0, 0.0));
        }
        let m0 = ModeParams {
            lambda: c(0.0, 0.0),
            ..m
        };
        let t = 1.7;
        let (w, bw) = (m0.omega, m0.big_omega);
        for s in [BranchSign::Plus, BranchSign::Minus] {
            let expected = Complex64::from_polar(1.0, (w * w / bw) * (t - (bw * t).sin() / bw))
                * Complex64::from_polar(1.0, -s.sigma() * m0.omega0 * t);
            let a = branch_phase(&m0, s, t).unwrap();
            assert!((a - expected).norm() < 1e-15);
            assert!((a.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn mode_factor_examples() {
        let m = mode(0.3, 0.5, 1.0, c(0.2, -0.1), 1.0);
        assert!((mode_factor_coherent(&m, 0.0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let v = mode_factor_coherent(&m, PI).unwrap();
        assert!((v.norm() - (-2.0f64).exp()).abs() < 1e-14);
        assert!((v.norm() - 0.135335).abs() < 1e-6);
    }

    #[test]
    fn single_mode_without_phonons_is_cosine() {
        let m = mode(1.0, 0.0, 1.0, c(0.3, 0.2), 0.5);
        let cfg = BathConfig::coherent(vec![m]);
        let grid = TimeGrid::new(0.0, 4.0, 41).unwrap();
        let s = decoherence_coherent(&cfg, &grid).unwrap();
        for (t, v) in grid.times().iter().zip(&s.values) {
            assert!((v - c((2.0 * t).cos(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn spin_only_mode_inside_coherent_config() {
        let m = mode(0.4, 0.0, 0.0, c(0.0, 0.0), 0.5);
        let v = mode_factor_coherent(&m, 0.9).unwrap();
        assert!((v - c((0.8f64 * 0.9).cos(), 0.0)).norm() < 1e-15);
        let cfg = BathConfig::coherent(vec![m]);
        let grid = TimeGrid::new(0.0, 1.0, 5).unwrap();
        assert!(decoherence_coherent(&cfg, &grid).is_ok());
    }

    #[test]
    fn thermal_needs_thermal_prep_and_positive_omega() {
        let grid = TimeGrid::new(0.0, 1.0, 5).unwrap();
        let m = mode(0.3, 0.2, 1.0, c(0.0, 0.0), 0.7);
        let cfg = BathConfig::coherent(vec![m]);
        assert!(decoherence_thermal(&cfg, &grid, CothVariant::HalfCoth).is_err());
        let cfg = BathConfig::thermal(vec![mode(0.3, 0.0, 0.0, c(0.0, 0.0), 0.7)], 1.0);
        assert!(decoherence_thermal(&cfg, &grid, CothVariant::HalfCoth).is_err());
        let cfg = BathConfig::thermal(vec![m], -1.0);
        assert!(decoherence_thermal(&cfg, &grid, CothVariant::PaperCoth).is_err());
    }

    #[test]
    fn coth_is_overflow_safe() {
        assert_eq!(coth(1e3), 1.0);
        assert!((coth(0.5) - 1.0 / 0.5f64.tanh()).abs() < 1e-14);
        assert!((coth(1e-3) - 1.0 / 1e-3f64.tanh()).abs() < 1e-9);
    }

    #[test]
    fn thermal_low_temperature_matches_vacuum() {
        let modes = vec![
            mode(0.3, 0.2, 1.0, c(0.0, 0.0), 0.7),
            mode(0.8, 0.1, 1.2, c(0.0, 0.0), 0.2),
        ];
        let grid = TimeGrid::new(0.0, 6.0, 31).unwrap();
        let coherent = decoherence_coherent(&BathConfig::coherent(modes.clone()), &grid).unwrap();
        let mut shifted = modes.clone();
        for m in &mut shifted {
            m.lambda = c(0.9, -0.3);
        }
        for variant in [CothVariant::PaperCoth, CothVariant::HalfCoth] {
            let th = decoherence_thermal(
                &BathConfig::thermal(shifted.clone(), 1.0 / 50.0),
                &grid,
                variant,
            )
            .unwrap();
            assert!(th.sup_distance(&coherent) < 1e-8);
        }
    }

    #[test]
    fn short_time_examples() {
        let m = mode(0.3, 0.2, 1.0, c(0.8, 0.0), 1.0);
        let cfg = BathConfig::coherent(vec![m]);
        let grid = TimeGrid::new(0.0, 2.0, 21).unwrap();
        let s = decoherence_short_time(&cfg, &grid).unwrap();
        assert_eq!(s.values[0], c(1.0, 0.0));
        for (t, v) in grid.times().iter().zip(&s.values) {
            assert!((v.norm() - (-2.0 * 0.04 * t * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_examples() {
        let cfg = BathConfig::coherent(vec![mode(1.0, 0.0, 1.0, c(0.4, 0.1), 0.5)]);
        assert!((gaussian_rate(&cfg).unwrap() - 2.0).abs() < 1e-15);
        assert!((gaussian_envelope(&cfg, 0.7).unwrap() - (-2.0f64 * 0.49).exp()).abs() < 1e-15);

        let polarized = vec![
            mode(0.5, 0.1, 1.0, c(0.3, 0.2), 1.0),
            mode(0.9, 0.25, 1.1, c(-0.5, 0.7), 1.0),
        ];
        let rate = gaussian_rate(&BathConfig::coherent(polarized.clone())).unwrap();
        assert!((rate - 2.0 * (0.01 + 0.0625)).abs() < 1e-15);
        let mut moved = polarized;
        moved[0].lambda = c(-2.0, 1.0);
        moved[1].lambda = c(0.0, 0.0);
        assert_eq!(gaussian_rate(&BathConfig::coherent(moved)).unwrap(), rate);
    }

    #[test]
    fn spin_only_examples() {
        let grid = TimeGrid::new(0.0, 3.0, 31).unwrap();
        let cfg = BathConfig::coherent(vec![mode(0.7, 0.3, 0.0, c(1.0, 1.0), 0.5)]);
        let s = spin_only_factor(&cfg, &grid).unwrap();
        for (t, v) in grid.times().iter().zip(&s.values) {
            assert!((v - c((1.4 * t).cos(), 0.0)).norm() < 1e-15);
        }
        let cfg = BathConfig::coherent(vec![
            mode(0.7, 0.3, 1.0, c(0.0, 0.0), 1.0),
            mode(1.3, 0.3, 1.0, c(0.0, 0.0), 0.0),
        ]);
        let s = spin_only_factor(&cfg, &grid).unwrap();
        assert!(s.magnitudes().iter().all(|a| (a - 1.0).abs() < 1e-15));
    }

    #[test]
    fn reduced_density_examples() {
        let central = CentralAmplitudes::balanced();
        let rho = reduced_density(&central, c(1.0, 0.0)).unwrap();
        for row in rho {
            for e in row {
                assert!((e - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
        let rho = reduced_density(&central, c(0.0, 0.0)).unwrap();
        assert_eq!(rho[0][1], c(0.0, 0.0));
        assert!((rho[1][1].re - 0.5).abs() < 1e-15);
        assert!(reduced_density(&central, c(1.0 + 1e-6, 0.0)).is_err());
    }

    #[test]
    fn polarization_examples() {
        assert_eq!(thermal_spin_polarization(0.0, 1.0).unwrap(), (0.5, 0.5));
        let (up, down) = thermal_spin_polarization(1.0, 1.0).unwrap();
        let e = 1.0f64.exp();
        assert!((up - e / (e + 1.0 / e)).abs() < 1e-15);
        assert!((up - 0.880797).abs() < 1e-6 && (down - 0.119203).abs() < 1e-6);
        let (up, down) = thermal_spin_polarization(1.0, 1e9).unwrap();
        assert!((up / down - 1.0).abs() < 1e-8);
        assert!(thermal_spin_polarization(1.0, 0.0).is_err());
        let (up, down) = thermal_spin_polarization(-800.0, 1.0).unwrap();
        assert_eq!((up, down), (0.0, 1.0));
    }

    #[test]
    fn log_form_product_survives_underflow() {
        let mut plain = Complex64::new(1.0, 0.0);
        let mut acc = ModeProduct::new(LOG_PRODUCT_THRESHOLD + 1);
        for _ in 0..20_000 {
            acc.push(-0.1, c(0.6, 0.0));
            plain *= c(0.6, 0.0) * (-0.1f64).exp();
        }
        // The plain product has lost everything but a subnormal remnant.
        assert!(plain.norm() < 1e-300);
        let expected = 20_000.0 * (-0.1 + 0.6f64.ln());
        assert!((acc.log_abs() - expected).abs() < 1e-8 * expected.abs());
        assert!(acc.value().norm() < 1e-300);
    }
}
