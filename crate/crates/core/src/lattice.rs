//! Lattice models, finite Hamiltonians and infinite-lattice dispersion.
//!
//! Conventions:
//!
//! - BC lattices are parameterised by `g0 = (g1 + g2) / 2` and
//!   `delta = (g1 - g2) / 2`, so the physical couplings are `g0 -+ delta`.
//!   Bond `j` (between sites `j` and `j + 1`) has coupling
//!   `g0 - (-1)^j delta`.
//! - BI lattices carry on-site detuning `(-1)^j beta` with unit coupling;
//!   `beta` is the index contrast in units of the coupling.
//! - A finite lattice of `N` sites is indexed `0..N`, with `N - 1` bonds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("BC lattice needs g0 > 0 and |delta| < g0 (got g0 = {g0}, delta = {delta})")]
    BcCouplings { g0: f64, delta: f64 },
    #[error("BC couplings must be positive (got g1 = {g1}, g2 = {g2})")]
    BcPhysicalCouplings { g1: f64, g2: f64 },
    #[error("BI lattice needs beta >= 0 (got {0})")]
    NegativeBeta(f64),
    #[error("finite lattice needs at least 2 sites (got {0})")]
    TooFewSites(usize),
    #[error("operation needs a finite lattice")]
    InfiniteLattice,
    #[error("|delta| > g0 gives an imaginary band (g0 = {g0}, delta = {delta})")]
    ImaginaryBand { g0: f64, delta: f64 },
    #[error("parameter {name} must be finite (got {value})")]
    NotFinite { name: &'static str, value: f64 },
    #[error("band matrix needs {expected} off-diagonal entries, got {got}")]
    BandShape { expected: usize, got: usize },
}

fn finite(name: &'static str, value: f64) -> Result<f64, LatticeError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(LatticeError::NotFinite { name, value })
    }
}

/// Which parameter alternates across the unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LatticeKind {
    Bc { g0: f64, delta: f64 },
    Bi { beta: f64 },
}

impl LatticeKind {
    pub fn bc(g0: f64, delta: f64) -> Result<Self, LatticeError> {
        let g0 = finite("g0", g0)?;
        let delta = finite("delta", delta)?;
        if !(g0 > 0.0 && delta.abs() < g0) {
            return Err(LatticeError::BcCouplings { g0, delta });
        }
        Ok(LatticeKind::Bc { g0, delta })
    }

    /// BC lattice from the two physical couplings: `g1 = g0 + delta` sits on
    /// the odd bonds and `g2 = g0 - delta` on the even ones.
    pub fn bc_from_couplings(g1: f64, g2: f64) -> Result<Self, LatticeError> {
        let g1 = finite("g1", g1)?;
        let g2 = finite("g2", g2)?;
        if !(g1 > 0.0 && g2 > 0.0) {
            return Err(LatticeError::BcPhysicalCouplings { g1, g2 });
        }
        Self::bc(0.5 * (g1 + g2), 0.5 * (g1 - g2))
    }

    pub fn bi(beta: f64) -> Result<Self, LatticeError> {
        let beta = finite("beta", beta)?;
        if beta < 0.0 {
            return Err(LatticeError::NegativeBeta(beta));
        }
        Ok(LatticeKind::Bi { beta })
    }

    /// Propagation constant of the upper band at quasi-momentum `phi`.
    pub fn dispersion(&self, phi: f64) -> f64 {
        match *self {
            // Validated at construction.
            LatticeKind::Bc { g0, delta } => bc_omega(phi, g0, delta),
            LatticeKind::Bi { beta } => dispersion_bi(phi, beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sites {
    Finite(usize),
    Infinite,
}

/// Lattice type, parameters and size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub sites: Sites,
}

impl LatticeSpec {
    pub fn finite(kind: LatticeKind, n: usize) -> Result<Self, LatticeError> {
        if n < 2 {
            return Err(LatticeError::TooFewSites(n));
        }
        Ok(Self {
            kind,
            sites: Sites::Finite(n),
        })
    }

    pub fn infinite(kind: LatticeKind) -> Self {
        Self {
            kind,
            sites: Sites::Infinite,
        }
    }

    pub fn bi(n: usize, beta: f64) -> Result<Self, LatticeError> {
        Self::finite(LatticeKind::bi(beta)?, n)
    }

    pub fn bc(n: usize, g0: f64, delta: f64) -> Result<Self, LatticeError> {
        Self::finite(LatticeKind::bc(g0, delta)?, n)
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        match self.sites {
            Sites::Finite(n) => Some(n),
            Sites::Infinite => None,
        }
    }
}

/// Real symmetric tridiagonal matrix stored as its two bands.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    diagonal: Vec<f64>,
    offdiagonal: Vec<f64>,
}

impl HamiltonianMatrix {
    pub fn from_bands(diagonal: Vec<f64>, offdiagonal: Vec<f64>) -> Result<Self, LatticeError> {
        let n = diagonal.len();
        if n == 0 {
            return Err(LatticeError::TooFewSites(0));
        }
        if offdiagonal.len() != n - 1 {
            return Err(LatticeError::BandShape {
                expected: n - 1,
                got: offdiagonal.len(),
            });
        }
        for &v in diagonal.iter().chain(&offdiagonal) {
            finite("matrix entry", v)?;
        }
        Ok(Self {
            diagonal,
            offdiagonal,
        })
    }

    /// Zero diagonal, unit couplings.
    pub fn uniform(n: usize) -> Result<Self, LatticeError> {
        if n < 2 {
            return Err(LatticeError::TooFewSites(n));
        }
        Ok(Self {
            diagonal: vec![0.0; n],
            offdiagonal: vec![1.0; n - 1],
        })
    }

    /// Zero diagonal with couplings `-(-1)^j`: the pure-`delta` part of a BC
    /// lattice in units of `delta`.
    pub fn alternating_sign(n: usize) -> Result<Self, LatticeError> {
        if n < 2 {
            return Err(LatticeError::TooFewSites(n));
        }
        let offdiagonal = (0..n - 1).map(|j| -parity_sign(j)).collect();
        Ok(Self {
            diagonal: vec![0.0; n],
            offdiagonal,
        })
    }

    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn offdiagonal(&self) -> &[f64] {
        &self.offdiagonal
    }

    /// Entry `(i, j)` of the full matrix.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diagonal[i],
            1 => self.offdiagonal[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn to_dense(&self) -> ndarray::Array2<f64> {
        let n = self.size();
        ndarray::Array2::from_shape_fn((n, n), |(i, j)| self.get(i, j))
    }

    /// `H x` for a complex vector.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.size();
        assert_eq!(x.len(), n, "vector length must match matrix size");
        let mut y: Vec<C64> = self
            .diagonal
            .iter()
            .zip(x)
            .map(|(&d, &xi)| xi * d)
            .collect();
        for (j, &e) in self.offdiagonal.iter().enumerate() {
            y[j] += x[j + 1] * e;
            y[j + 1] += x[j] * e;
        }
        y
    }

    /// Gershgorin bound on the spectral radius (max absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        (0..self.size())
            .map(|i| {
                let left = if i > 0 {
                    self.offdiagonal[i - 1].abs()
                } else {
                    0.0
                };
                let right = self.offdiagonal.get(i).map_or(0.0, |e| e.abs());
                self.diagonal[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

/// `(-1)^j` as a float.
pub(crate) fn parity_sign(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Tridiagonal Hamiltonian of a finite lattice.
pub fn build_hamiltonian(spec: &LatticeSpec) -> Result<HamiltonianMatrix, LatticeError> {
    let n = spec.len().ok_or(LatticeError::InfiniteLattice)?;
    if n < 2 {
        return Err(LatticeError::TooFewSites(n));
    }
    let (diagonal, offdiagonal) = match spec.kind {
        LatticeKind::Bi { beta } => (
            (0..n).map(|j| parity_sign(j) * beta).collect(),
            vec![1.0; n - 1],
        ),
        LatticeKind::Bc { g0, delta } => (
            vec![0.0; n],
            (0..n - 1).map(|j| g0 - parity_sign(j) * delta).collect(),
        ),
    };
    Ok(HamiltonianMatrix {
        diagonal,
        offdiagonal,
    })
}

fn bc_omega(phi: f64, g0: f64, delta: f64) -> f64 {
    let c = phi.cos();
    let d2 = delta * delta;
    2.0 * (d2 + (g0 * g0 - d2) * c * c).max(0.0).sqrt()
}

/// BC dispersion `Omega = 2 sqrt(delta^2 + (g0^2 - delta^2) cos^2 phi)`.
pub fn dispersion_bc(phi: f64, g0: f64, delta: f64) -> Result<f64, LatticeError> {
    if delta.abs() > g0 {
        return Err(LatticeError::ImaginaryBand { g0, delta });
    }
    Ok(bc_omega(phi, g0, delta))
}

/// BI dispersion `Omega = sqrt(beta^2 + 4 cos^2 phi)`.
pub fn dispersion_bi(phi: f64, beta: f64) -> f64 {
    let c = phi.cos();
    (beta * beta + 4.0 * c * c).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Plus,
    Minus,
}

/// One branch of the dispersion relation sampled on a phi grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionCurve {
    pub phi: Vec<f64>,
    pub omega: Vec<f64>,
    pub band: Band,
}

/// `samples` equally spaced points covering `[-pi, pi]` inclusive.
pub fn phi_grid(samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let last = (samples - 1) as f64;
            (0..samples)
                .map(|k| PI * (2.0 * k as f64 - last) / last)
                .collect()
        }
    }
}

pub fn dispersion_curve(
    kind: &LatticeKind,
    phi: &[f64],
    band: Band,
) -> Result<DispersionCurve, LatticeError> {
    let sign = match band {
        Band::Plus => 1.0,
        Band::Minus => -1.0,
    };
    let omega = phi
        .iter()
        .map(|&p| match *kind {
            LatticeKind::Bc { g0, delta } => dispersion_bc(p, g0, delta).map(|w| sign * w),
            LatticeKind::Bi { beta } => Ok(sign * dispersion_bi(p, beta)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DispersionCurve {
        phi: phi.to_vec(),
        omega,
        band,
    })
}
