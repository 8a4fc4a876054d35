//! Numerical toolkit for the thermal-contact quench of the free Klein–Gordon
//! field.
//!
//! Two thermal reservoirs at inverse temperatures `β₁` (left, `x¹ < 0`) and
//! `β₂` (right) are glued along `x¹ = 0` with a smooth partition of unity
//! `χ₁ + χ₂ = 1` and left to evolve freely. The crate evaluates
//!
//! * thermal, vacuum and commutator kernels ([`kms`]),
//! * the glued initial state and σ-maps ([`gluing`]),
//! * finite-time energy density, heat current and Wick square fields
//!   ([`quench`]),
//! * the asymptotic non-equilibrium steady state (NESS) for the homogeneous,
//!   phase-shift and δ-potential models, convergence scans and β₃ probes
//!   ([`ness`], [`evolution`]),
//! * large-time decay estimates ([`asymptotics`]),
//! * first-order perturbative objects: split propagators, fish terms,
//!   tadpoles, spectral amplitudes ([`perturbation`]),
//!
//! and exposes them through a small command-line layer ([`cli`]).
//!
//! # Conventions
//!
//! * Units of the mass `m` (or `β₁` when `m = 0`).
//! * Kernels are real-scalar kernels; physical observables of the complex
//!   field carry an extra factor 2 ([`model::FieldKind::observable_factor`]).
//! * Mode labels follow the thermal Wightman function
//!   `Δ₊(x,y) = (2π)^{-(d-1)}∫dp/(2ω) Σ_s n_s(ω) e^{isω(x⁰−y⁰)} e^{−isp·(x−y)}`
//!   with `n₊ = b_{β,μ}(ω)`, `n₋ = 1 + b_{β,μ}(ω)`
//!   ([`model::signed_bose`]): `p` is the physical momentum of the mode for
//!   both signs `s`.
//! * The heat current `j₁` is the physical energy flux towards `+x¹`; a hot
//!   left reservoir produces `j₁ > 0`.
//! * `Θ(0) = 1/2`.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod gluing;
pub mod kms;
pub mod model;
pub mod modes;
pub mod ness;
pub mod perturbation;
pub mod quadrature;
pub mod quench;
pub mod special;

pub use error::{Error, Result};
pub use model::{Beta, FieldKind, Family, ModelSpec, RegularityClass, Reservoir, ReservoirTriple, ThermoParams};
