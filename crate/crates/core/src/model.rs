//! Domain types for the central spin, the spin bath and the phonon modes.
//!
//! Units: ħ = k_B = 1. Frequencies, energies and temperatures share one
//! arbitrary unit; times are in its inverse.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex amplitude used for spin amplitudes, coherent eigenvalues and r(t).
pub type ComplexAmp = Complex64;

/// Tolerance on |a|² + |b|² = 1 for spin amplitudes.
pub const NORM_TOL: f64 = 1e-12;

/// Slack allowed on |r(t)| ≤ 1.
pub const BOUND_TOL: f64 = 1e-12;

/// One bath spin together with the phonon mode that modulates its coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    /// Static central-spin/bath-spin coupling ω0.
    pub omega0: f64,
    /// Phonon-mediated coupling ω.
    pub omega: f64,
    /// Phonon energy Ω.
    pub big_omega: f64,
    /// Coherent-state eigenvalue λ of the phonon mode.
    pub lambda: ComplexAmp,
    /// Bath spin amplitude on |↑⟩.
    pub alpha: ComplexAmp,
    /// Bath spin amplitude on |↓⟩.
    pub beta: ComplexAmp,
}

impl ModeParams {
    /// Mode with the bath spin fully polarized up and the phonon in its vacuum.
    pub fn polarized(omega0: f64, omega: f64, big_omega: f64) -> Self {
        ModeParams {
            omega0,
            omega,
            big_omega,
            lambda: ComplexAmp::new(0.0, 0.0),
            alpha: ComplexAmp::new(1.0, 0.0),
            beta: ComplexAmp::new(0.0, 0.0),
        }
    }

    /// Mode whose bath spin has real amplitudes with |α|² = `p_up`.
    pub fn with_population(
        omega0: f64,
        omega: f64,
        big_omega: f64,
        lambda: ComplexAmp,
        p_up: f64,
    ) -> Self {
        ModeParams {
            omega0,
            omega,
            big_omega,
            lambda,
            alpha: ComplexAmp::new(p_up.sqrt(), 0.0),
            beta: ComplexAmp::new((1.0 - p_up).sqrt(), 0.0),
        }
    }

    /// Population of bath spin up, |α|².
    #[inline]
    pub fn p_up(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// Population of bath spin down. Taken as 1 − |α|² (equal to |β|² within
    /// the normalization tolerance) so that the two weights sum to exactly one.
    #[inline]
    pub fn p_down(&self) -> f64 {
        1.0 - self.alpha.norm_sqr()
    }

    /// Ratio ω/Ω, the dimensionless phonon displacement per branch.
    #[inline]
    pub fn displacement(&self) -> f64 {
        self.omega / self.big_omega
    }

    /// True when the mode has no phonon contribution at all (Ω = ω = 0).
    #[inline]
    pub fn is_spin_only(&self) -> bool {
        self.big_omega == 0.0 && self.omega == 0.0
    }

    pub fn validate(&self, index: usize) -> Result<()> {
        let finite = [self.omega0, self.omega, self.big_omega]
            .iter()
            .all(|v| v.is_finite())
            && [self.lambda, self.alpha, self.beta]
                .iter()
                .all(|z| z.is_finite());
        if !finite {
            return Err(Error::config(format!("mode {index}: non-finite parameter")));
        }
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::config(format!(
                "mode {index}: |alpha|^2 + |beta|^2 = {norm:.17e}, expected 1"
            )));
        }
        if self.big_omega < 0.0 {
            return Err(Error::config(format!(
                "mode {index}: big_omega = {} must be non-negative",
                self.big_omega
            )));
        }
        if self.big_omega == 0.0 && self.omega != 0.0 {
            return Err(Error::DegenerateMode {
                index,
                omega: self.omega,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralAmplitudes {
    pub c_up: ComplexAmp,
    pub c_down: ComplexAmp,
}

impl CentralAmplitudes {
    /// Equal-weight superposition (|↑⟩ + |↓⟩)/√2.
    pub fn balanced() -> Self {
        let a = ComplexAmp::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        CentralAmplitudes { c_up: a, c_down: a }
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.c_up.norm_sqr() + self.c_down.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::config(format!(
                "central: |c_up|^2 + |c_down|^2 = {norm:.17e}, expected 1"
            )));
        }
        Ok(())
    }
}

/// Initial state of the phonon modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhononPrep {
    /// Product of coherent states |λ_k⟩ (eigenvalues taken from each mode).
    Coherent,
    /// Thermal Gibbs state at the given temperature; every λ_k is ignored.
    Thermal { temperature: f64 },
}

impl PhononPrep {
    pub fn temperature(&self) -> Option<f64> {
        match *self {
            PhononPrep::Coherent => None,
            PhononPrep::Thermal { temperature } => Some(temperature),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathConfig {
    pub central: CentralAmplitudes,
    pub modes: Vec<ModeParams>,
    pub phonons: PhononPrep,
}

impl BathConfig {
    pub fn coherent(modes: Vec<ModeParams>) -> Self {
        BathConfig {
            central: CentralAmplitudes::balanced(),
            modes,
            phonons: PhononPrep::Coherent,
        }
    }

    pub fn thermal(modes: Vec<ModeParams>, temperature: f64) -> Self {
        BathConfig {
            central: CentralAmplitudes::balanced(),
            modes,
            phonons: PhononPrep::Thermal { temperature },
        }
    }

    /// Checks every invariant except the Ω = 0 degeneracy, which is left to
    /// the evaluators because the spin-only factor accepts it.
    pub fn validate(&self) -> Result<()> {
        self.central.validate()?;
        if self.modes.is_empty() {
            return Err(Error::config("modes: at least one mode is required"));
        }
        for (i, m) in self.modes.iter().enumerate() {
            m.validate(i)?;
        }
        if let PhononPrep::Thermal { temperature } = self.phonons {
            if !(temperature > 0.0) || !temperature.is_finite() {
                return Err(Error::config(format!(
                    "phonons: temperature = {temperature} must be positive"
                )));
            }
        }
        Ok(())
    }

    pub fn max_big_omega(&self) -> f64 {
        self.modes.iter().map(|m| m.big_omega).fold(0.0, f64::max)
    }

    pub fn min_big_omega(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.big_omega)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Product σ = c·s of the central and bath spin eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchSign {
    Plus,
    Minus,
}

impl BranchSign {
    #[inline]
    pub fn sigma(self) -> f64 {
        match self {
            BranchSign::Plus => 1.0,
            BranchSign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            BranchSign::Plus => BranchSign::Minus,
            BranchSign::Minus => BranchSign::Plus,
        }
    }
}

/// Uniform, endpoint-inclusive time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, points: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::config("time: non-finite bounds"));
        }
        if t_end < t_start {
            return Err(Error::config(format!(
                "time: end = {t_end} is before start = {t_start}"
            )));
        }
        if points == 0 {
            return Err(Error::config("time: points must be at least 1"));
        }
        Ok(TimeGrid {
            t_start,
            t_end,
            points,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn time(&self, i: usize) -> f64 {
        debug_assert!(i < self.points);
        if self.points == 1 || i == 0 {
            self.t_start
        } else if i + 1 == self.points {
            self.t_end
        } else {
            self.t_start + (self.t_end - self.t_start) * (i as f64 / (self.points - 1) as f64)
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.time(i)).collect()
    }
}

/// Which evaluator produced a [`DecoherenceSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    CoherentClosed,
    ThermalClosedPaperCoth,
    ThermalClosedHalfCoth,
    ShortTime,
    GaussianEnvelope,
    SpinOnly,
    OracleCoherent,
    OracleThermal,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::CoherentClosed => "coherent",
            Method::ThermalClosedPaperCoth => "thermal-paper",
            Method::ThermalClosedHalfCoth => "thermal-half",
            Method::ShortTime => "short-time",
            Method::GaussianEnvelope => "gaussian",
            Method::SpinOnly => "spin-only",
            Method::OracleCoherent => "oracle-coherent",
            Method::OracleThermal => "oracle-thermal",
        };
        f.write_str(s)
    }
}

/// Sampled decoherence factor r(t) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceSeries {
    pub grid: TimeGrid,
    pub values: Vec<ComplexAmp>,
    pub method: Method,
    pub meta: BTreeMap<String, String>,
}

impl DecoherenceSeries {
    pub fn new(grid: TimeGrid, values: Vec<ComplexAmp>, method: Method) -> Self {
        assert_eq!(values.len(), grid.points(), "one value per grid point");
        debug_assert!(
            values.iter().all(|v| v.norm() <= 1.0 + BOUND_TOL),
            "{method}: |r| exceeds 1"
        );
        DecoherenceSeries {
            grid,
            values,
            method,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Sup-norm distance to another series on the same grid.
    pub fn sup_distance(&self, other: &DecoherenceSeries) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
