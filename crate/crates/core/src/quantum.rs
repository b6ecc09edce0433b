//! Input states and transport observables.
//!
//! Everything here is computed from propagator entries with the `U[out, in]`
//! convention: the amplitude arriving at site `q` from a unit excitation at
//! site `p` is `U[q, p]`.

use ndarray::Array2;
use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::LatticeSpec;
use crate::spectral::{spectrum_for, Propagator, SpectralError, Spectrum};
use crate::C64;

/// Norm tolerance for user-supplied superpositions.
const NORM_TOL: f64 = 1e-10;

/// Poisson truncation loss above which a warning is logged.
pub const POISSON_LOSS_WARN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("site {site} outside lattice of {size} sites")]
    SiteOutOfRange { site: usize, size: usize },
    #[error("two-photon inputs need distinct sites (got {0} twice)")]
    SameSite(usize),
    #[error("{kind} input needs at least {min} photons (got {got})")]
    PhotonCount {
        kind: &'static str,
        min: u32,
        got: u32,
    },
    #[error("amplitudes must have unit norm (got {0})")]
    NotNormalized(f64),
    #[error("vector length {got} does not match lattice size {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gaussian width must be positive and finite (got {0})")]
    InvalidWidth(f64),
    #[error("{kind} input needs at least {min} sites (got {got})")]
    TooFewSites {
        kind: &'static str,
        min: usize,
        got: usize,
    },
    #[error("input parameters must be finite")]
    NotFinite,
    #[error("center of mass of an empty distribution")]
    EmptyDistribution,
    #[error("negative photon number {value} at site {site}")]
    NegativeEntry { site: usize, value: f64 },
    #[error("correlation matrix needs a two-site input (product or NOON)")]
    NotTwoSite,
    #[error("observable sweeps need a finite lattice")]
    InfiniteLattice,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Initial photonic state.
///
/// `GaussianLike` and `PoissonLike` only describe a shape; they become a
/// `SinglePhotonSuperposition` once the lattice size is known
/// (see [`InputState::materialize`]).
#[derive(Debug, Clone, PartialEq)]
pub enum InputState {
    /// `(a_p^dagger)^m / sqrt(m!) |0>`.
    FockSingleSite {
        site: usize,
        photons: u32,
    },
    /// One photon spread as `sum_j alpha_j a_j^dagger |0>`.
    SinglePhotonSuperposition {
        amplitudes: Vec<C64>,
    },
    GaussianLike {
        w0: f64,
        q: f64,
    },
    PoissonLike {
        alpha: C64,
    },
    /// `a_j^dagger a_k^dagger |0>`.
    ProductTwoPhoton {
        sites: (usize, usize),
    },
    /// `(|m, 0> + e^{i m phase} |0, m>) / sqrt(2)` on sites `(j, k)`.
    Noon {
        sites: (usize, usize),
        photons: u32,
        phase: f64,
    },
}

impl InputState {
    /// Validate against a lattice of `n` sites and expand the shape-only
    /// variants into explicit amplitudes.
    pub fn materialize(&self, n: usize) -> Result<InputState, QuantumError> {
        let in_range = |site: usize| {
            if site < n {
                Ok(())
            } else {
                Err(QuantumError::SiteOutOfRange { site, size: n })
            }
        };
        let distinct = |(j, k): (usize, usize)| {
            in_range(j)?;
            in_range(k)?;
            if j == k {
                Err(QuantumError::SameSite(j))
            } else {
                Ok(())
            }
        };
        match self {
            InputState::FockSingleSite { site, photons } => {
                in_range(*site)?;
                if *photons < 1 {
                    return Err(QuantumError::PhotonCount {
                        kind: "fock",
                        min: 1,
                        got: *photons,
                    });
                }
                Ok(self.clone())
            }
            InputState::SinglePhotonSuperposition { amplitudes } => {
                if amplitudes.len() != n {
                    return Err(QuantumError::DimensionMismatch {
                        expected: n,
                        got: amplitudes.len(),
                    });
                }
                if amplitudes
                    .iter()
                    .any(|a| !a.re.is_finite() || !a.im.is_finite())
                {
                    return Err(QuantumError::NotFinite);
                }
                let norm = norm_sqr(amplitudes);
                if (norm - 1.0).abs() > NORM_TOL {
                    return Err(QuantumError::NotNormalized(norm.sqrt()));
                }
                Ok(self.clone())
            }
            InputState::GaussianLike { w0, q } => Ok(InputState::SinglePhotonSuperposition {
                amplitudes: make_gaussian_state(n, *w0, *q)?,
            }),
            InputState::PoissonLike { alpha } => Ok(InputState::SinglePhotonSuperposition {
                amplitudes: make_poisson_state(n, *alpha)?,
            }),
            InputState::ProductTwoPhoton { sites } => {
                distinct(*sites)?;
                Ok(self.clone())
            }
            InputState::Noon {
                sites,
                photons,
                phase,
            } => {
                distinct(*sites)?;
                if *photons < 2 {
                    return Err(QuantumError::PhotonCount {
                        kind: "noon",
                        min: 2,
                        got: *photons,
                    });
                }
                if !phase.is_finite() {
                    return Err(QuantumError::NotFinite);
                }
                Ok(self.clone())
            }
        }
    }

    /// Total photon number carried by the state.
    pub fn photon_count(&self) -> u32 {
        match self {
            InputState::FockSingleSite { photons, .. } | InputState::Noon { photons, .. } => {
                *photons
            }
            InputState::SinglePhotonSuperposition { .. }
            | InputState::GaussianLike { .. }
            | InputState::PoissonLike { .. } => 1,
            InputState::ProductTwoPhoton { .. } => 2,
        }
    }

    /// Sites whose propagator columns determine the observables; `None` for
    /// single-photon superpositions, which are evolved as a field instead.
    fn source_sites(&self) -> Option<Vec<usize>> {
        match self {
            InputState::FockSingleSite { site, .. } => Some(vec![*site]),
            InputState::ProductTwoPhoton { sites: (j, k) }
            | InputState::Noon { sites: (j, k), .. } => Some(vec![*j, *k]),
            _ => None,
        }
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn normalize(mut v: Vec<C64>) -> Vec<C64> {
    let norm = norm_sqr(&v).sqrt();
    for a in &mut v {
        *a /= norm;
    }
    v
}

/// Gaussian envelope of width `w0` centred on site `N / 2` (rounded down)
/// with a linear phase ramp `exp(i q k / 2)`.
pub fn make_gaussian_state(n: usize, w0: f64, q: f64) -> Result<Vec<C64>, QuantumError> {
    if n < 3 {
        return Err(QuantumError::TooFewSites {
            kind: "gaussian",
            min: 3,
            got: n,
        });
    }
    if !(w0.is_finite() && w0 > 0.0) {
        return Err(QuantumError::InvalidWidth(w0));
    }
    if !q.is_finite() {
        return Err(QuantumError::NotFinite);
    }
    let center = (n / 2) as f64;
    let amps = (0..n)
        .map(|j| {
            let k = j as f64 - center;
            C64::from_polar((-k * k / (2.0 * w0 * w0)).exp(), q * k / 2.0)
        })
        .collect();
    Ok(normalize(amps))
}

/// `ln(j!)` for `j = 0..len`.
fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for j in 0..len {
        if j > 1 {
            acc += (j as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// Probability weight `e^{-|alpha|^2} sum_{j >= n} |alpha|^{2j} / j!` lost by
/// truncating a coherent distribution to `n` sites.
pub fn poisson_truncation_loss(n: usize, alpha: C64) -> f64 {
    let mean = alpha.norm_sqr();
    if mean == 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    let mut total = 0.0;
    let mut j = n;
    loop {
        let term = (j as f64 * ln_mean - ln_fact - mean).exp();
        total += term;
        // past the mode the terms fall geometrically
        if j as f64 > mean && term <= total * 1e-17 {
            break;
        }
        j += 1;
        ln_fact += (j as f64).ln();
    }
    total
}

/// Coherent-state weights `alpha^j / sqrt(j!)` on sites `0..N`, evaluated in
/// log space and renormalized after truncation.
pub fn make_poisson_state(n: usize, alpha: C64) -> Result<Vec<C64>, QuantumError> {
    if n < 2 {
        return Err(QuantumError::TooFewSites {
            kind: "poisson",
            min: 2,
            got: n,
        });
    }
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(QuantumError::NotFinite);
    }
    if alpha.norm_sqr() == 0.0 {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[0] = C64::new(1.0, 0.0);
        return Ok(v);
    }
    let loss = poisson_truncation_loss(n, alpha);
    if loss > POISSON_LOSS_WARN {
        log::warn!("poisson input truncated to {n} sites loses {loss:.3e} of its weight");
    }
    let (r, theta) = alpha.to_polar();
    let ln_r = r.ln();
    let ln_fact = ln_factorials(n);
    let ln_mag: Vec<f64> = (0..n).map(|j| j as f64 * ln_r - 0.5 * ln_fact[j]).collect();
    let peak = ln_mag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let amps = ln_mag
        .iter()
        .enumerate()
        .map(|(j, &lm)| C64::from_polar((lm - peak).exp(), j as f64 * theta))
        .collect();
    Ok(normalize(amps))
}

/// Propagated data sufficient for every observable of one input.
enum Evolved {
    /// Single photon: the evolved amplitude vector.
    Field(Vec<C64>),
    /// Columns `U[., p]` for each source site `p`, in input order.
    Columns(Vec<Vec<C64>>),
}

fn evolve_by_propagator(u: &Propagator, input: &InputState) -> Result<Evolved, QuantumError> {
    match input {
        InputState::SinglePhotonSuperposition { amplitudes } => {
            Ok(Evolved::Field(u.apply(amplitudes)?))
        }
        _ => {
            let sites = input.source_sites().expect("materialized input");
            let cols = sites
                .iter()
                .map(|&p| u.matrix().column(p).to_vec())
                .collect();
            Ok(Evolved::Columns(cols))
        }
    }
}

fn evolve_by_spectrum(
    spectrum: &Spectrum,
    input: &InputState,
    modal: Option<&[C64]>,
    t: f64,
) -> Result<Evolved, QuantumError> {
    match (input, modal) {
        (InputState::SinglePhotonSuperposition { .. }, Some(c)) => {
            Ok(Evolved::Field(spectrum.from_modal(c, t)))
        }
        _ => {
            let sites = input.source_sites().expect("materialized input");
            let cols = sites
                .iter()
                .map(|&p| spectrum.propagator_column(p, t))
                .collect::<Result<_, _>>()?;
            Ok(Evolved::Columns(cols))
        }
    }
}

fn mean_photons_of(input: &InputState, ev: &Evolved) -> Vec<f64> {
    match (input, ev) {
        (_, Evolved::Field(a)) => a.iter().map(|x| x.norm_sqr()).collect(),
        (InputState::FockSingleSite { photons, .. }, Evolved::Columns(c)) => {
            let m = f64::from(*photons);
            c[0].iter().map(|u| m * u.norm_sqr()).collect()
        }
        (InputState::ProductTwoPhoton { .. }, Evolved::Columns(c)) => c[0]
            .iter()
            .zip(&c[1])
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect(),
        (InputState::Noon { photons, .. }, Evolved::Columns(c)) => {
            let half_m = 0.5 * f64::from(*photons);
            c[0].iter()
                .zip(&c[1])
                .map(|(a, b)| half_m * (a.norm_sqr() + b.norm_sqr()))
                .collect()
        }
        _ => unreachable!("columns are only built for site-based inputs"),
    }
}

fn fidelity_of(input: &InputState, ev: &Evolved) -> f64 {
    match (input, ev) {
        (InputState::SinglePhotonSuperposition { amplitudes }, Evolved::Field(a)) => amplitudes
            .iter()
            .zip(a)
            .map(|(x, y)| x.conj() * y)
            .sum::<C64>()
            .norm_sqr(),
        (InputState::FockSingleSite { site, photons }, Evolved::Columns(c)) => {
            c[0][*site].norm_sqr().powi(*photons as i32)
        }
        (InputState::ProductTwoPhoton { sites: (j, k) }, Evolved::Columns(c)) => {
            // permanent of the 2x2 block of U on the occupied sites
            (c[0][*j] * c[1][*k] + c[1][*j] * c[0][*k]).norm_sqr()
        }
        (
            InputState::Noon {
                sites: (j, k),
                photons,
                phase,
            },
            Evolved::Columns(c),
        ) => {
            let m = *photons as i32;
            let twist = C64::from_polar(1.0, f64::from(*photons) * phase);
            let overlap = c[0][*j].powi(m)
                + twist * c[1][*j].powi(m)
                + twist.conj() * c[0][*k].powi(m)
                + c[1][*k].powi(m);
            (0.5 * overlap).norm_sqr()
        }
        _ => unreachable!("evolved data does not match input"),
    }
}

fn center_of_mass_unchecked(n: &[f64]) -> f64 {
    let total: f64 = n.iter().sum();
    n.iter()
        .enumerate()
        .map(|(k, &x)| k as f64 * x)
        .sum::<f64>()
        / total
}

/// Mean photon number `<n_q>` at every site after propagation by `u`.
pub fn mean_photon_numbers(u: &Propagator, input: &InputState) -> Result<Vec<f64>, QuantumError> {
    let input = input.materialize(u.size())?;
    Ok(mean_photons_of(&input, &evolve_by_propagator(u, &input)?))
}

/// `|<s| U |s>|^2` for a unit-norm single-photon amplitude vector.
pub fn fidelity(u: &Propagator, state: &[C64]) -> Result<f64, QuantumError> {
    let input = InputState::SinglePhotonSuperposition {
        amplitudes: state.to_vec(),
    }
    .materialize(u.size())?;
    Ok(fidelity_of(&input, &evolve_by_propagator(u, &input)?))
}

/// `|<psi(0)|psi(t)>|^2` for any input kind, including multi-photon states.
pub fn input_fidelity(u: &Propagator, input: &InputState) -> Result<f64, QuantumError> {
    let input = input.materialize(u.size())?;
    Ok(fidelity_of(&input, &evolve_by_propagator(u, &input)?))
}

/// Photon-weighted mean site `sum_k k <n_k> / sum_k <n_k>`.
pub fn center_of_mass(mean_photons: &[f64]) -> Result<f64, QuantumError> {
    if let Some((site, &value)) = mean_photons
        .iter()
        .enumerate()
        .find(|(_, &x)| x.is_nan() || x < 0.0)
    {
        return Err(QuantumError::NegativeEntry { site, value });
    }
    if mean_photons.iter().sum::<f64>() == 0.0 {
        return Err(QuantumError::EmptyDistribution);
    }
    Ok(center_of_mass_unchecked(mean_photons))
}

/// Two-photon correlation `Gamma[p, q]` for product and NOON inputs.
///
/// The NOON expression is the one for `m = 2` photons with the interference
/// phase `e^{i m phase}`; it is evaluated as written for every `m`.
pub fn two_photon_correlation(
    u: &Propagator,
    input: &InputState,
) -> Result<Array2<f64>, QuantumError> {
    let input = input.materialize(u.size())?;
    let n = u.size();
    let (j, k) = match &input {
        InputState::ProductTwoPhoton { sites } | InputState::Noon { sites, .. } => *sites,
        _ => return Err(QuantumError::NotTwoSite),
    };
    let cj = u.matrix().column(j);
    let ck = u.matrix().column(k);
    let entry: Box<dyn Fn(usize, usize) -> f64> = match input {
        InputState::Noon { photons, phase, .. } => {
            let twist = C64::from_polar(1.0, f64::from(photons) * phase);
            Box::new(move |p, q| {
                let a = cj[p] * cj[q];
                let b = ck[p] * ck[q];
                a.norm_sqr() + b.norm_sqr() + 2.0 * (twist * a.conj() * b).re
            })
        }
        _ => Box::new(|p, q| (cj[p] * ck[q] + ck[p] * cj[q]).norm_sqr()),
    };
    let mut gamma = Array2::zeros((n, n));
    for p in 0..n {
        for q in p..n {
            let g = entry(p, q);
            gamma[[p, q]] = g;
            gamma[[q, p]] = g;
        }
    }
    Ok(gamma)
}

/// What a series holds.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesKind {
    /// Row `t` holds `<n_q>` for every site.
    MeanPhotonPerSite(Array2<f64>),
    Fidelity(Vec<f64>),
    CenterOfMass(Vec<f64>),
    /// `Gamma[p, q]` at the single time in `times`.
    CorrelationMatrix(Array2<f64>),
}

/// Time grid plus the values of one observable on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub kind: SeriesKind,
}

/// Mean photons, fidelity and center of mass over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub times: Vec<f64>,
    pub mean_photons: Array2<f64>,
    pub fidelity: Vec<f64>,
    pub center_of_mass: Vec<f64>,
    /// `sum_q <n_q>` per sample; equals the photon number up to rounding.
    pub total_photons: Vec<f64>,
}

impl Sweep {
    pub fn into_series(self) -> [ObservableSeries; 3] {
        [
            ObservableSeries {
                times: self.times.clone(),
                kind: SeriesKind::MeanPhotonPerSite(self.mean_photons),
            },
            ObservableSeries {
                times: self.times.clone(),
                kind: SeriesKind::Fidelity(self.fidelity),
            },
            ObservableSeries {
                times: self.times,
                kind: SeriesKind::CenterOfMass(self.center_of_mass),
            },
        ]
    }
}

/// Evolve `input` on a finite lattice and record the standard observables at
/// each time. Samples are independent and evaluated in parallel.
pub fn observable_sweep(
    spec: &LatticeSpec,
    input: &InputState,
    times: &[f64],
) -> Result<Sweep, QuantumError> {
    if spec.len().is_none() {
        return Err(QuantumError::InfiniteLattice);
    }
    let spectrum = spectrum_for(spec)?;
    observable_sweep_with(&spectrum, input, times)
}

/// [`observable_sweep`] on a precomputed spectrum.
pub fn observable_sweep_with(
    spectrum: &Spectrum,
    input: &InputState,
    times: &[f64],
) -> Result<Sweep, QuantumError> {
    let n = spectrum.size();
    let input = input.materialize(n)?;
    let modal = match &input {
        InputState::SinglePhotonSuperposition { amplitudes } => Some(spectrum.to_modal(amplitudes)),
        _ => None,
    };
    let rows: Vec<(Vec<f64>, f64)> = times
        .par_iter()
        .map(|&t| {
            let ev = evolve_by_spectrum(spectrum, &input, modal.as_deref(), t)?;
            Ok((mean_photons_of(&input, &ev), fidelity_of(&input, &ev)))
        })
        .collect::<Result<_, QuantumError>>()?;

    let mut mean_photons = Array2::zeros((times.len(), n));
    let mut fidelity = Vec::with_capacity(times.len());
    let mut center = Vec::with_capacity(times.len());
    let mut total = Vec::with_capacity(times.len());
    for (i, (row, f)) in rows.into_iter().enumerate() {
        total.push(row.iter().sum());
        center.push(center_of_mass_unchecked(&row));
        mean_photons
            .row_mut(i)
            .assign(&ndarray::ArrayView1::from(&row));
        fidelity.push(f);
    }
    Ok(Sweep {
        times: times.to_vec(),
        mean_photons,
        fidelity,
        center_of_mass: center,
        total_photons: total,
    })
}

/// Two-photon correlation matrix at time `t` as a series entry.
pub fn correlation_series(
    spec: &LatticeSpec,
    input: &InputState,
    t: f64,
) -> Result<ObservableSeries, QuantumError> {
    if spec.len().is_none() {
        return Err(QuantumError::InfiniteLattice);
    }
    let u = crate::spectral::propagator(&spectrum_for(spec)?, t)?;
    Ok(ObservableSeries {
        times: vec![t],
        kind: SeriesKind::CorrelationMatrix(two_photon_correlation(&u, input)?),
    })
}
