//! Classical light propagation and photon transport in binary photonic
//! waveguide lattices.
//!
//! Two lattice families are modelled: binary-coupling (BC) arrays, where
//! nearest-neighbour couplings alternate between `g0 - delta` and
//! `g0 + delta`, and binary-index (BI) arrays, where the on-site detuning
//! alternates between `+beta` and `-beta`.
//!
//! - [`poly`]: Fibonacci and Morgan-Voyce polynomial families and the
//!   closed-form Fibonacci roots that generate finite lattice spectra.
//! - [`lattice`]: model parameters, finite Hamiltonians and infinite-lattice
//!   dispersion relations.
//! - [`spectral`]: closed-form and numeric spectra, the unitary propagator
//!   and an independent RK4 time-domain integrator.
//! - [`bloch`]: Floquet-Bloch impulse responses of infinite lattices by
//!   periodic trapezoidal quadrature.
//! - [`quantum`]: input states and transport observables (mean photon
//!   numbers, fidelity, centre of mass, two-photon correlations).
//! - [`cli`]: configuration-driven runs that write CSV or JSON results.

pub mod bloch;
pub mod cli;
pub mod lattice;
pub mod poly;
pub mod quantum;
pub mod spectral;

pub use num_complex::Complex64 as C64;

pub use lattice::{HamiltonianMatrix, LatticeKind, LatticeSpec, Sites};
pub use spectral::{Propagator, Spectrum, SpectrumSource};
