//! Impulse responses of infinite binary lattices from Floquet-Bloch
//! integrals.
//!
//! For a field launched into site `m`, the amplitude at site `j` after
//! distance `z` is a Brillouin-zone integral
//!
//! ```text
//! E_j^(m)(z) = (1 / 2pi) Int_{-pi}^{pi} dphi e^{i (j - m) phi} K_j^(m)(phi, z)
//! ```
//!
//! with the same sign and site conventions as the finite propagator, so
//! `E_j^(m)(z) = <j| exp(-i H z) |m>`:
//!
//! - BI: `K = cos(W z) - i (2 cos phi + (-1)^j beta) sin(W z) / W`, with
//!   `W^2 = beta^2 + 4 cos^2 phi`.
//! - BC: `K = cos(W z)` when `j - m` is even, `-i h* sin(W z) / W` for `j`
//!   odd and `m` even, `-i h sin(W z) / W` for `j` even and `m` odd, with
//!   `h = 2 (g0 cos phi - i delta sin phi)` and `W = |h|`.
//!
//! `h* / W` is the odd-site Bloch factor `((g0 cos + i delta sin) /
//! (g0 cos - i delta sin))^(1/2)` on its continuous branch; writing the
//! kernels through `h` and `sin(Wz)/W` keeps them smooth in `phi` even where
//! `W` vanishes. The integrands are smooth and `2pi`-periodic, so the
//! uniform trapezoid rule converges exponentially.

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{LatticeError, LatticeKind, LatticeSpec};
use crate::spectral::{spectrum_for, SpectralError};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlochError {
    #[error("quadrature needs an even node count >= {MIN_NODES} (got {0})")]
    InvalidNodes(usize),
    #[error("{nodes} nodes is too few for |j - m| = {offset}, z = {z}: need at least {required}")]
    TooFewNodes {
        nodes: usize,
        required: usize,
        offset: u64,
        z: f64,
    },
    #[error("propagation distance must be finite and non-negative (got {0})")]
    InvalidDistance(f64),
    #[error("site {site} is within {margin} sites of the edge of a {size}-site lattice")]
    TooCloseToEdge {
        site: usize,
        margin: usize,
        size: usize,
    },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

pub const MIN_NODES: usize = 64;

/// Smallest node count accepted without `force` for offset `|j - m|` and
/// distance `z`: `8 (|j - m| + 2z)`.
pub fn required_nodes(offset: u64, z: f64) -> usize {
    (8.0 * (offset as f64 + 2.0 * z)).ceil() as usize
}

/// Node count that satisfies the accuracy rule with a 2x margin, rounded up
/// to an even number and at least [`MIN_NODES`].
pub fn auto_nodes(offset: u64, z: f64) -> usize {
    let n = (2 * required_nodes(offset, z)).max(MIN_NODES);
    n + n % 2
}

/// Trapezoid rule on `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadrature {
    nodes: usize,
    force: bool,
}

impl Quadrature {
    pub fn new(nodes: usize) -> Result<Self, BlochError> {
        if nodes < MIN_NODES || !nodes.is_multiple_of(2) {
            return Err(BlochError::InvalidNodes(nodes));
        }
        Ok(Self {
            nodes,
            force: false,
        })
    }

    /// Skip the node-count accuracy rule.
    pub fn forced(self) -> Self {
        Self {
            force: true,
            ..self
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    fn check(&self, offset: u64, z: f64) -> Result<(), BlochError> {
        if !(z.is_finite() && z >= 0.0) {
            return Err(BlochError::InvalidDistance(z));
        }
        let required = required_nodes(offset, z);
        if !self.force && self.nodes < required {
            return Err(BlochError::TooFewNodes {
                nodes: self.nodes,
                required,
                offset,
                z,
            });
        }
        Ok(())
    }

    /// `(1 / 2pi) Int_{-pi}^{pi} f(phi) dphi` for `2pi`-periodic `f`.
    pub fn mean<F: Fn(f64) -> C64>(&self, f: F) -> C64 {
        let step = 2.0 * PI / self.nodes as f64;
        let sum: C64 = (0..self.nodes).map(|k| f(-PI + step * k as f64)).sum();
        sum / self.nodes as f64
    }
}

/// `sin(w z) / w`, continued to `z` at `w = 0`.
fn sin_over(w: f64, z: f64) -> f64 {
    let x = w * z;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        z * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0))
    } else {
        x.sin() / w
    }
}

fn is_odd(j: i64) -> bool {
    j.rem_euclid(2) == 1
}

/// BI integrand at one quasi-momentum. `beta` may be negative.
fn bi_kernel(j: i64, m: i64, z: f64, beta: f64, phi: f64) -> C64 {
    let c = phi.cos();
    let w = (beta * beta + 4.0 * c * c).sqrt();
    let onsite = if is_odd(j) { -beta } else { beta };
    let k = (j - m) as f64;
    let value = C64::new((w * z).cos(), -(2.0 * c + onsite) * sin_over(w, z));
    value * C64::from_polar(1.0, k * phi)
}

/// `h(phi) = 2 (g0 cos phi - i delta sin phi)`: the A-to-B Bloch coupling.
fn bc_coupling(phi: f64, g0: f64, delta: f64) -> C64 {
    C64::new(2.0 * g0 * phi.cos(), -2.0 * delta * phi.sin())
}

fn bc_kernel(j: i64, m: i64, z: f64, g0: f64, delta: f64, phi: f64) -> C64 {
    let h = bc_coupling(phi, g0, delta);
    let w = h.norm();
    let k = (j - m) as f64;
    let value = match (is_odd(j), is_odd(m)) {
        (a, b) if a == b => C64::new((w * z).cos(), 0.0),
        (true, false) => C64::new(0.0, -sin_over(w, z)) * h.conj(),
        _ => C64::new(0.0, -sin_over(w, z)) * h,
    };
    value * C64::from_polar(1.0, k * phi)
}

fn check_bc(g0: f64, delta: f64) -> Result<(), BlochError> {
    LatticeKind::bc(g0, delta)?;
    Ok(())
}

/// `E_j^(m)(z)` on the infinite BI lattice (`+beta` on even sites).
pub fn infinite_amplitude_bi(
    j: i64,
    m: i64,
    z: f64,
    beta: f64,
    nodes: usize,
) -> Result<C64, BlochError> {
    amplitude_bi(j, m, z, beta, &Quadrature::new(nodes)?)
}

/// `E_j^(m)(z)` on the infinite BC lattice (bond `j` couples with
/// `g0 - (-1)^j delta`).
pub fn infinite_amplitude_bc(
    j: i64,
    m: i64,
    z: f64,
    g0: f64,
    delta: f64,
    nodes: usize,
) -> Result<C64, BlochError> {
    amplitude_bc(j, m, z, g0, delta, &Quadrature::new(nodes)?)
}

pub fn amplitude_bi(
    j: i64,
    m: i64,
    z: f64,
    beta: f64,
    quad: &Quadrature,
) -> Result<C64, BlochError> {
    if !beta.is_finite() {
        return Err(LatticeError::NotFinite {
            name: "beta",
            value: beta,
        }
        .into());
    }
    quad.check(j.abs_diff(m), z)?;
    Ok(quad.mean(|phi| bi_kernel(j, m, z, beta, phi)))
}

pub fn amplitude_bc(
    j: i64,
    m: i64,
    z: f64,
    g0: f64,
    delta: f64,
    quad: &Quadrature,
) -> Result<C64, BlochError> {
    check_bc(g0, delta)?;
    quad.check(j.abs_diff(m), z)?;
    Ok(quad.mean(|phi| bc_kernel(j, m, z, g0, delta, phi)))
}

/// Source site, lattice parameters and quadrature for repeated evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochKernel {
    pub kind: LatticeKind,
    pub source: i64,
    pub quadrature: Quadrature,
}

impl BlochKernel {
    pub fn amplitude(&self, j: i64, z: f64) -> Result<C64, BlochError> {
        match self.kind {
            LatticeKind::Bi { beta } => amplitude_bi(j, self.source, z, beta, &self.quadrature),
            LatticeKind::Bc { g0, delta } => {
                amplitude_bc(j, self.source, z, g0, delta, &self.quadrature)
            }
        }
    }

    /// Amplitudes for every `(z, j)` pair, `z`-major.
    pub fn table(&self, sites: &[i64], distances: &[f64]) -> Result<Vec<C64>, BlochError> {
        distances
            .par_iter()
            .flat_map_iter(|&z| sites.iter().map(move |&j| (j, z)))
            .map(|(j, z)| self.amplitude(j, z))
            .collect()
    }
}

/// Unit-modulus odd-site factor of the BC Bloch mode,
/// `(g0 cos phi + i delta sin phi) / |g0 cos phi + i delta sin phi|`.
pub fn bc_odd_site_factor(phi: f64, g0: f64, delta: f64) -> C64 {
    let h = bc_coupling(phi, g0, delta).conj();
    if h.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        h / h.norm()
    }
}

/// Upper-band Bloch mode at `phi`: returns `(Omega, [even-site amplitude,
/// odd-site amplitude])` such that `psi_j = e^{i j phi} u_(j mod 2)` solves
/// `H psi = Omega psi` on the infinite lattice.
pub fn bloch_mode(kind: &LatticeKind, phi: f64) -> (f64, [C64; 2]) {
    let omega = kind.dispersion(phi);
    match *kind {
        LatticeKind::Bc { g0, delta } => (
            omega,
            [C64::new(1.0, 0.0), bc_odd_site_factor(phi, g0, delta)],
        ),
        LatticeKind::Bi { beta } => {
            // [[beta, 2c], [2c, -beta]] has eigenvector (omega + beta, 2c).
            let c = 2.0 * phi.cos();
            let (a, b) = if omega + beta == 0.0 && c == 0.0 {
                (1.0, 0.0)
            } else {
                (omega + beta, c)
            };
            let norm = a.hypot(b);
            (omega, [C64::new(a / norm, 0.0), C64::new(b / norm, 0.0)])
        }
    }
}

/// `|E_infinite - U_finite[j, m](z)|` for a finite lattice of `n_large`
/// sites with the parameters of `spec`. Both `j` and `m` must sit at least
/// `2z + 20` sites from either edge.
pub fn finite_vs_infinite_check(
    j: usize,
    m: usize,
    z: f64,
    spec: &LatticeSpec,
    n_large: usize,
) -> Result<f64, BlochError> {
    Ok(finite_vs_infinite_profile(&[j], m, z, spec, n_large)?[0])
}

/// [`finite_vs_infinite_check`] for many targets sharing one source.
pub fn finite_vs_infinite_profile(
    targets: &[usize],
    m: usize,
    z: f64,
    spec: &LatticeSpec,
    n_large: usize,
) -> Result<Vec<f64>, BlochError> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(BlochError::InvalidDistance(z));
    }
    let margin = (2.0 * z).ceil() as usize + 20;
    for &site in targets.iter().chain(std::iter::once(&m)) {
        if site < margin || site + margin > n_large.saturating_sub(1) {
            return Err(BlochError::TooCloseToEdge {
                site,
                margin,
                size: n_large,
            });
        }
    }
    let finite = LatticeSpec::finite(spec.kind, n_large)?;
    let column = spectrum_for(&finite)?.propagator_column(m, z)?;
    targets
        .par_iter()
        .map(|&j| {
            let offset = j.abs_diff(m) as u64;
            let kernel = BlochKernel {
                kind: spec.kind,
                source: m as i64,
                quadrature: Quadrature::new(auto_nodes(offset, z))?,
            };
            Ok((kernel.amplitude(j as i64, z)? - column[j]).norm())
        })
        .collect()
}
