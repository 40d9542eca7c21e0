//! Brute-force decoherence factor from truncated number-state propagation.
//!
//! The Hamiltonian commutes with the central spin and every bath spin, so
//! each phonon mode evolves under one of two branch Hamiltonians h^± and the
//! factor for a mode is assembled from overlaps of the two propagated branch
//! states. Nothing here uses the closed-form trajectories or phases.

mod fock;
mod tridiag;

use num_complex::Complex64;
use rayon::prelude::*;

pub use fock::{
    build_mode_hamiltonian, coherent_vector, propagate_fock, FockVector, Propagator,
    TridiagonalHamiltonian, TAIL_BUDGET,
};
pub use tridiag::{tridiagonal_eigen, TridiagEigen};

use crate::error::{Error, Result};
use crate::model::{
    BathConfig, BranchSign, DecoherenceSeries, Method, ModeParams, PhononPrep, TimeGrid,
};

/// Discarded Gibbs weight allowed by the thermal cutoff.
pub const GIBBS_TAIL: f64 = 1e-14;

/// How the Fock basis size is chosen per mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Starting n_max; `None` uses [`default_n_max`].
    pub n_max: Option<usize>,
    /// The doubling loop gives up beyond this n_max.
    pub ceiling: usize,
    /// Required |f(n_max) − f(2·n_max)| at the largest grid time.
    pub tolerance: f64,
    /// Largest number of modes the oracle accepts.
    pub max_modes: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            n_max: None,
            ceiling: 4096,
            tolerance: 1e-10,
            max_modes: 16,
        }
    }
}

/// Largest occupation kept in the thermal mixture: the discarded tail
/// e^{-Ω(K+1)/T} is below [`GIBBS_TAIL`].
pub fn gibbs_cutoff(big_omega: f64, temperature: f64) -> usize {
    let x = big_omega / temperature;
    let mut k = ((-GIBBS_TAIL.ln()) / x).ceil().max(1.0) as usize - 1;
    while (-(x * (k + 1) as f64)).exp() >= GIBBS_TAIL {
        k += 1;
    }
    k
}

fn padded_size(reach: f64) -> usize {
    (reach * reach + 10.0 * reach + 20.0).ceil() as usize
}

/// Starting basis size for a mode: room for the coherent excursion
/// |λ| + 2|ω|/Ω, or for the thermal cutoff plus the branch displacement.
pub fn default_n_max(mode: &ModeParams, prep: &PhononPrep) -> usize {
    let g = if mode.big_omega > 0.0 {
        (mode.omega / mode.big_omega).abs()
    } else {
        0.0
    };
    match *prep {
        PhononPrep::Coherent => padded_size(mode.lambda.norm() + 2.0 * g),
        PhononPrep::Thermal { temperature } => {
            let k = gibbs_cutoff(mode.big_omega, temperature);
            padded_size((k as f64).sqrt() + 2.0 * g)
        }
    }
}

/// Coherent-preparation oracle for one mode.
struct CoherentMode {
    plus: Propagator,
    minus: Propagator,
    psi0: FockVector,
    /// ⟨ψ0|ψ0⟩ of the truncated initial state, computed exactly as `factor`
    /// computes overlaps so that the t = 0 ratio is exactly one.
    norm_sqr: f64,
    p_up: f64,
    p_down: f64,
}

impl CoherentMode {
    fn new(mode: &ModeParams, n_max: usize, checked: bool) -> Result<Self> {
        let psi0 = if checked {
            coherent_vector(mode.lambda, n_max)?
        } else {
            fock::coherent_amplitudes(mode.lambda, n_max)
        };
        let norm_sqr = psi0.inner(&psi0).re;
        Ok(CoherentMode {
            norm_sqr,
            plus: Propagator::new(&build_mode_hamiltonian(mode, BranchSign::Plus, n_max))?,
            minus: Propagator::new(&build_mode_hamiltonian(mode, BranchSign::Minus, n_max))?,
            psi0,
            p_up: mode.p_up(),
            p_down: mode.p_down(),
        })
    }

    fn factor(&self, t: f64) -> Complex64 {
        let psi_plus = self.plus.evolve(&self.psi0, t);
        let psi_minus = self.minus.evolve(&self.psi0, t);
        let x = psi_minus.inner(&psi_plus) / self.norm_sqr;
        x * self.p_up + x.conj() * self.p_down
    }
}

/// Thermal-preparation oracle for one mode.
///
/// The Gibbs-weighted echo Σ_n p_n ⟨n|U⁻(t)† U⁺(t)|n⟩ is expanded in the two
/// branch eigenbases, Σ_jk e^{iE⁻_j t} K_jk e^{-iE⁺_k t} with the real kernel
/// K_jk = (V⁻ᵀV⁺)_jk · Σ_n p_n V⁻_nj V⁺_nk, so each time costs O(n_max²).
struct ThermalMode {
    e_plus: Vec<f64>,
    e_minus: Vec<f64>,
    kernel: Vec<f64>,
    weight_sum: f64,
    p_up: f64,
    p_down: f64,
}

impl ThermalMode {
    fn new(mode: &ModeParams, temperature: f64, n_max: usize) -> Result<Self> {
        if !(mode.big_omega > 0.0) || !(temperature > 0.0) {
            return Err(Error::config(
                "thermal oracle needs big_omega > 0 and temperature > 0",
            ));
        }
        let plus = Propagator::new(&build_mode_hamiltonian(mode, BranchSign::Plus, n_max))?;
        let minus = Propagator::new(&build_mode_hamiltonian(mode, BranchSign::Minus, n_max))?;
        let x = mode.big_omega / temperature;
        let cutoff = gibbs_cutoff(mode.big_omega, temperature).min(n_max);
        let raw: Vec<f64> = (0..=cutoff).map(|n| (-(x * n as f64)).exp()).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

        let dim = n_max + 1;
        let mut kernel = vec![0.0; dim * dim];
        for j in 0..dim {
            let vm = minus.eigenvector(j);
            let weighted: Vec<f64> = weights.iter().zip(vm).map(|(p, v)| p * v).collect();
            for k in 0..dim {
                let vp = plus.eigenvector(k);
                let overlap: f64 = vm.iter().zip(vp).map(|(a, b)| a * b).sum();
                let mixed: f64 = weighted.iter().zip(vp).map(|(a, b)| a * b).sum();
                kernel[j * dim + k] = overlap * mixed;
            }
        }
        Ok(ThermalMode {
            e_plus: plus.energies().to_vec(),
            e_minus: minus.energies().to_vec(),
            kernel,
            weight_sum: weights.iter().sum(),
            p_up: mode.p_up(),
            p_down: mode.p_down(),
        })
    }

    fn echo(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(self.weight_sum, 0.0);
        }
        let dim = self.e_plus.len();
        let right: Vec<Complex64> = self
            .e_plus
            .iter()
            .map(|e| Complex64::from_polar(1.0, -e * t))
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (j, e) in self.e_minus.iter().enumerate() {
            let row = &self.kernel[j * dim..(j + 1) * dim];
            let inner: Complex64 = row.iter().zip(&right).map(|(k, r)| r * *k).sum();
            total += inner * Complex64::from_polar(1.0, e * t);
        }
        total
    }

    fn factor(&self, t: f64) -> Complex64 {
        let x = self.echo(t) / self.weight_sum;
        x * self.p_up + x.conj() * self.p_down
    }
}

enum ModeOracle {
    Coherent(CoherentMode),
    Thermal(ThermalMode),
}

impl ModeOracle {
    fn new(mode: &ModeParams, prep: &PhononPrep, n_max: usize, checked: bool) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::TruncationTooSmall("n_max must be at least 1".into()));
        }
        Ok(match *prep {
            PhononPrep::Coherent => ModeOracle::Coherent(CoherentMode::new(mode, n_max, checked)?),
            PhononPrep::Thermal { temperature } => {
                ModeOracle::Thermal(ThermalMode::new(mode, temperature, n_max)?)
            }
        })
    }

    fn factor(&self, t: f64) -> Complex64 {
        match self {
            ModeOracle::Coherent(m) => m.factor(t),
            ModeOracle::Thermal(m) => m.factor(t),
        }
    }
}

/// |α|²⟨ψ⁻(t)|ψ⁺(t)⟩ + |β|²⟨ψ⁺(t)|ψ⁻(t)⟩ with ψ^σ(t) = e^{-ith^σ}|λ⟩.
pub fn oracle_mode_factor_coherent(mode: &ModeParams, t: f64, n_max: usize) -> Result<Complex64> {
    Ok(ModeOracle::new(mode, &PhononPrep::Coherent, n_max, true)?.factor(t))
}

/// Gibbs average of the branch echo amplitudes over the number states.
pub fn oracle_mode_factor_thermal(
    mode: &ModeParams,
    temperature: f64,
    t: f64,
    n_max: usize,
) -> Result<Complex64> {
    Ok(ModeOracle::new(mode, &PhononPrep::Thermal { temperature }, n_max, true)?.factor(t))
}

/// |f(n_max) − f(2·n_max)| at `t_max`, a bound on the basis truncation error.
pub fn truncation_error_estimate(
    mode: &ModeParams,
    prep: &PhononPrep,
    t_max: f64,
    n_max: usize,
) -> Result<f64> {
    let small = ModeOracle::new(mode, prep, n_max, false)?;
    let large = ModeOracle::new(mode, prep, 2 * n_max, false)?;
    Ok((small.factor(t_max) - large.factor(t_max)).norm())
}

/// Runs the doubling loop for one mode and returns the oracle, its n_max and
/// the final truncation estimate.
fn settle_mode(
    index: usize,
    mode: &ModeParams,
    prep: &PhononPrep,
    t_probe: f64,
    policy: &TruncationPolicy,
) -> Result<(ModeOracle, usize, f64)> {
    let mut n_max = policy
        .n_max
        .unwrap_or_else(|| default_n_max(mode, prep))
        .max(1);
    loop {
        if n_max > policy.ceiling {
            return Err(Error::TruncationTooSmall(format!(
                "mode {index}: n_max {n_max} exceeds the ceiling {}",
                policy.ceiling
            )));
        }
        let small = ModeOracle::new(mode, prep, n_max, false)?;
        let large = ModeOracle::new(mode, prep, 2 * n_max, false)?;
        let estimate = (small.factor(t_probe) - large.factor(t_probe)).norm();
        if estimate < policy.tolerance {
            if let ModeOracle::Coherent(_) = small {
                coherent_vector(mode.lambda, n_max)?;
            }
            return Ok((small, n_max, estimate));
        }
        n_max *= 2;
    }
}

/// r(t) as the product of per-mode oracle factors.
///
/// Intended for verification: each mode costs a few dense eigendecompositions,
/// and configs with more than `policy.max_modes` modes are refused.
pub fn oracle_decoherence(
    config: &BathConfig,
    grid: &TimeGrid,
    policy: &TruncationPolicy,
) -> Result<DecoherenceSeries> {
    config.validate()?;
    if config.modes.len() > policy.max_modes {
        return Err(Error::config(format!(
            "oracle accepts at most {} modes, config has {}",
            policy.max_modes,
            config.modes.len()
        )));
    }
    let t_probe = if grid.t_end().abs() >= grid.t_start().abs() {
        grid.t_end()
    } else {
        grid.t_start()
    };
    let settled = config
        .modes
        .par_iter()
        .enumerate()
        .map(|(i, m)| settle_mode(i, m, &config.phonons, t_probe, policy))
        .collect::<Result<Vec<_>>>()?;

    let values = (0..grid.points())
        .into_par_iter()
        .map(|i| {
            let t = grid.time(i);
            settled
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, (o, _, _)| acc * o.factor(t))
        })
        .collect();
    let method = match config.phonons {
        PhononPrep::Coherent => Method::OracleCoherent,
        PhononPrep::Thermal { .. } => Method::OracleThermal,
    };
    let mut series = DecoherenceSeries::new(*grid, values, method);
    for (i, (_, n_max, est)) in settled.iter().enumerate() {
        series = series
            .with_meta(&format!("n_max[{i}]"), n_max)
            .with_meta(&format!("truncation_error[{i}]"), format!("{est:.3e}"));
    }
    Ok(series)
}
