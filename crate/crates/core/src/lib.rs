//! Exact central-spin dephasing with a phonon-mediated spin-bath coupling.
//!
//! The model couples a central two-level system to N bath spins through
//! H = c_z Σ_k [ω0_k + ω_k(p_k† + p_k)] s_kz + Σ_k Ω_k p_k† p_k.
//! Because H commutes with c_z and every s_kz, the coherence of the central
//! spin is multiplied by a decoherence factor r(t) that factorizes over modes.
//!
//! * [`closed_form`] evaluates r(t) in closed form for coherent and thermal
//!   phonons, plus the short-time, Gaussian and phonon-free limits.
//! * [`oracle`] recomputes r(t) by brute-force propagation in a truncated
//!   number basis and is the reference every closed form is checked against.
//! * [`ensemble`] samples seeded random baths and fits the Gaussian decay rate.
//! * [`limits`] checks the phonon-free, stiff-phonon and low-temperature limits.
//! * [`cli`] drives everything from JSON run configs and writes CSV.

// `!(x > 0.0)` is how NaN gets rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed_form;
pub mod ensemble;
pub mod error;
pub mod limits;
pub mod model;
pub mod oracle;

pub use closed_form::{
    branch_eigenvalue, branch_phase, coherent_overlap, decoherence_coherent,
    decoherence_short_time, decoherence_thermal, gaussian_envelope, gaussian_rate,
    mode_factor_coherent, mode_factor_explicit, reduced_density, spin_only_factor,
    thermal_spin_polarization, CothVariant,
};
pub use ensemble::{fit_gaussian_rate, sample_config, EnsembleSpec, SpinInit};
pub use error::{Error, Result};
pub use model::{
    BathConfig, BranchSign, CentralAmplitudes, ComplexAmp, DecoherenceSeries, Method, ModeParams,
    PhononPrep, TimeGrid,
};
pub use oracle::{oracle_decoherence, TruncationPolicy};
