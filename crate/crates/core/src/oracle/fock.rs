//! Number-state vectors, single-mode branch Hamiltonians and their propagator.

use num_complex::Complex64;

use super::tridiag::{tridiagonal_eigen, TridiagEigen};
use crate::error::{Error, Result};
use crate::model::{BranchSign, ComplexAmp, ModeParams};

/// Largest admissible weight in the top five retained number states.
pub const TAIL_BUDGET: f64 = 1e-12;

/// Amplitudes over the number states |0⟩ … |n_max⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn from_amps(amps: Vec<Complex64>) -> Self {
        assert!(!amps.is_empty());
        FockVector { amps }
    }

    /// The number state |n⟩ in a basis truncated at `n_max`.
    pub fn number_state(n: usize, n_max: usize) -> Self {
        assert!(n <= n_max);
        let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
        amps[n] = Complex64::new(1.0, 0.0);
        FockVector { amps }
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        assert_eq!(self.amps.len(), other.amps.len(), "dimension mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Weight carried by the five highest retained number states.
    pub fn tail_weight(&self) -> f64 {
        let from = self.n_max().saturating_sub(5) + 1;
        self.amps[from.min(self.amps.len())..]
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    }
}

/// Truncated coherent state without the tail check.
pub(crate) fn coherent_amplitudes(lambda: ComplexAmp, n_max: usize) -> FockVector {
    let mut amps = Vec::with_capacity(n_max + 1);
    let mut a = Complex64::new((-0.5 * lambda.norm_sqr()).exp(), 0.0);
    amps.push(a);
    for n in 1..=n_max {
        a = a * lambda / (n as f64).sqrt();
        amps.push(a);
    }
    FockVector { amps }
}

/// Coherent state |λ⟩ with amplitudes e^{-|λ|²/2} λⁿ/√(n!) for n ≤ n_max.
pub fn coherent_vector(lambda: ComplexAmp, n_max: usize) -> Result<FockVector> {
    if n_max < 1 {
        return Err(Error::TruncationTooSmall("n_max must be at least 1".into()));
    }
    let v = coherent_amplitudes(lambda, n_max);
    let tail = v.tail_weight();
    if tail > TAIL_BUDGET {
        return Err(Error::TruncationTooSmall(format!(
            "coherent state |{lambda}> keeps tail weight {tail:.3e} at n_max = {n_max}"
        )));
    }
    Ok(v)
}

/// Branch Hamiltonian σω0 + σω(p† + p) + Ω p†p in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }
}

pub fn build_mode_hamiltonian(
    mode: &ModeParams,
    sign: BranchSign,
    n_max: usize,
) -> TridiagonalHamiltonian {
    let sigma = sign.sigma();
    let diag = (0..=n_max)
        .map(|n| sigma * mode.omega0 + mode.big_omega * n as f64)
        .collect();
    let offdiag = (0..n_max)
        .map(|n| sigma * mode.omega * ((n + 1) as f64).sqrt())
        .collect();
    TridiagonalHamiltonian { diag, offdiag }
}

/// e^{-iht} for a fixed branch Hamiltonian, diagonalized once.
#[derive(Debug, Clone)]
pub struct Propagator {
    eig: TridiagEigen,
}

impl Propagator {
    pub fn new(h: &TridiagonalHamiltonian) -> Result<Self> {
        Ok(Propagator {
            eig: tridiagonal_eigen(&h.diag, &h.offdiag)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn energies(&self) -> &[f64] {
        self.eig.values()
    }

    pub fn eigenvector(&self, j: usize) -> &[f64] {
        self.eig.vector(j)
    }

    /// e^{-iht}·ψ. At t = 0 the input is returned unchanged.
    pub fn evolve(&self, psi: &FockVector, t: f64) -> FockVector {
        let n = self.dim();
        assert_eq!(psi.amps.len(), n, "dimension mismatch");
        if t == 0.0 {
            return psi.clone();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, &e) in self.energies().iter().enumerate() {
            let v = self.eigenvector(j);
            let c: Complex64 = v.iter().zip(&psi.amps).map(|(&vn, a)| a * vn).sum();
            let c = c * Complex64::from_polar(1.0, -e * t);
            for (o, &vn) in out.iter_mut().zip(v) {
                *o += c * vn;
            }
        }
        FockVector { amps: out }
    }
}

/// One-shot e^{-iht}·ψ0.
pub fn propagate_fock(h: &TridiagonalHamiltonian, t: f64, psi0: &FockVector) -> Result<FockVector> {
    if h.dim() != psi0.amps.len() {
        return Err(Error::config(format!(
            "Hamiltonian dimension {} does not match state dimension {}",
            h.dim(),
            psi0.amps.len()
        )));
    }
    Ok(Propagator::new(h)?.evolve(psi0, t))
}
