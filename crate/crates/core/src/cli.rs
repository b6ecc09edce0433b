//! Config-driven command line front end.
//!
//! A run is described by a TOML [`RunConfig`]; command-line flags override
//! individual fields. Results land in an output directory as CSV tables plus
//! a `metadata.json`, or as a single `<command>.json` holding
//! `{metadata, payload}`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numeric
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bloch::{auto_nodes, BlochError, BlochKernel, Quadrature};
use crate::lattice::{
    build_hamiltonian, dispersion_curve, phi_grid, Band, LatticeError, LatticeKind, LatticeSpec,
};
use crate::quantum::{observable_sweep, InputState, QuantumError};
use crate::spectral::{
    analytic_spectrum_bi, eigenvector_deviation, numeric_spectrum, SpectralError, Spectrum,
    SpectrumSource,
};
use crate::C64;

/// Default significant digits for CSV output.
pub const DEFAULT_PRECISION: usize = 9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    ParseConfig { path: PathBuf, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } | CliError::ParseConfig { .. } => 2,
            CliError::Numeric(_) => 3,
            CliError::Write { .. } => 1,
        }
    }

    fn config(field: &str, message: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{field}: {message}"))
    }

    fn lattice(e: LatticeError) -> Self {
        Self::config("lattice", e)
    }

    fn spectral(field: &str, e: SpectralError) -> Self {
        match e {
            SpectralError::NoConvergence { .. } | SpectralError::StepTooLarge(_) => {
                CliError::Numeric(e.to_string())
            }
            SpectralError::Lattice(e) => Self::lattice(e),
            other => Self::config(field, other),
        }
    }

    fn quantum(e: QuantumError) -> Self {
        match e {
            QuantumError::Spectral(e) => Self::spectral("time", e),
            other => Self::config("input", other),
        }
    }

    fn bloch(e: BlochError) -> Self {
        match e {
            BlochError::Spectral(e) => Self::spectral("bloch", e),
            BlochError::Lattice(e) => Self::lattice(e),
            BlochError::TooFewNodes { .. } => {
                Self::config("quadrature.nodes", format!("{e} (use --force to override)"))
            }
            BlochError::InvalidNodes(_) => Self::config("quadrature.nodes", e),
            other => Self::config("bloch", other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Bc,
    Bi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum InputSection {
    Fock {
        site: usize,
        #[serde(default = "one")]
        photons: u32,
    },
    /// Amplitudes given as parallel real and imaginary parts.
    Superposition {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
    Gaussian {
        w0: f64,
        #[serde(default)]
        q: f64,
    },
    Poisson {
        alpha_re: f64,
        #[serde(default)]
        alpha_im: f64,
    },
    Product {
        sites: [usize; 2],
    },
    Noon {
        sites: [usize; 2],
        photons: u32,
        #[serde(default)]
        phase: f64,
    },
}

impl InputSection {
    pub fn to_input(&self) -> Result<InputState, CliError> {
        Ok(match self {
            InputSection::Fock { site, photons } => InputState::FockSingleSite {
                site: *site,
                photons: *photons,
            },
            InputSection::Superposition { re, im } => {
                let im = if im.is_empty() {
                    vec![0.0; re.len()]
                } else {
                    im.clone()
                };
                if im.len() != re.len() {
                    return Err(CliError::config(
                        "input.im",
                        format!("has {} entries but input.re has {}", im.len(), re.len()),
                    ));
                }
                InputState::SinglePhotonSuperposition {
                    amplitudes: re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect(),
                }
            }
            InputSection::Gaussian { w0, q } => InputState::GaussianLike { w0: *w0, q: *q },
            InputSection::Poisson { alpha_re, alpha_im } => InputState::PoissonLike {
                alpha: C64::new(*alpha_re, *alpha_im),
            },
            InputSection::Product { sites } => InputState::ProductTwoPhoton {
                sites: (sites[0], sites[1]),
            },
            InputSection::Noon {
                sites,
                photons,
                phase,
            } => InputState::Noon {
                sites: (sites[0], sites[1]),
                photons: *photons,
                phase: *phase,
            },
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl TimeSection {
    /// Evenly spaced grid including both ends; a single sample sits at
    /// `start`.
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let start = self.start.unwrap_or(0.0);
        let stop = self.stop.unwrap_or(start);
        let samples = self.samples.unwrap_or(1);
        if !(start.is_finite() && start >= 0.0) {
            return Err(CliError::config(
                "time.start",
                format!("must be finite and >= 0 (got {start})"),
            ));
        }
        if !(stop.is_finite() && stop >= start) {
            return Err(CliError::config(
                "time.stop",
                format!("must be finite and >= start (got {stop})"),
            ));
        }
        if samples == 0 {
            return Err(CliError::config("time.samples", "must be at least 1"));
        }
        if samples == 1 {
            return Ok(vec![start]);
        }
        let last = (samples - 1) as f64;
        Ok((0..samples)
            .map(|k| {
                if k + 1 == samples {
                    stop
                } else {
                    start + (stop - start) * (k as f64 / last)
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    /// Trapezoid nodes; chosen from the accuracy rule when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default)]
    pub force: bool,
}

fn default_bloch_sites() -> [i64; 2] {
    [-10, 10]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochSection {
    #[serde(default)]
    pub source: i64,
    /// Inclusive range of target sites.
    #[serde(default = "default_bloch_sites")]
    pub sites: [i64; 2],
}

impl Default for BlochSection {
    fn default() -> Self {
        Self {
            source: 0,
            sites: default_bloch_sites(),
        }
    }
}

fn default_phi_samples() -> usize {
    201
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSection {
    #[serde(default = "default_phi_samples")]
    pub samples: usize,
}

impl Default for DispersionSection {
    fn default() -> Self {
        Self {
            samples: default_phi_samples(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    #[serde(default)]
    pub eigenvectors: bool,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_precision() -> usize {
    DEFAULT_PRECISION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: Format,
    /// Directory receiving the result files.
    #[serde(default = "default_out")]
    pub path: PathBuf,
    /// Significant digits in CSV files.
    #[serde(default = "default_precision")]
    pub precision: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            path: default_out(),
            precision: DEFAULT_PRECISION,
        }
    }
}

/// Complete description of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub lattice: LatticeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputSection>,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub bloch: BlochSection,
    #[serde(default)]
    pub dispersion: DispersionSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|message| CliError::ParseConfig {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Lattice type and parameters; `kind` may be left out when the
    /// parameters make it unambiguous.
    pub fn lattice_kind(&self) -> Result<LatticeKind, CliError> {
        let l = &self.lattice;
        let has_bc = [l.g0, l.delta, l.g1, l.g2].iter().any(Option::is_some);
        let kind = l
            .kind
            .unwrap_or(if has_bc { KindName::Bc } else { KindName::Bi });
        match kind {
            KindName::Bi => {
                for (name, v) in [("g0", l.g0), ("delta", l.delta), ("g1", l.g1), ("g2", l.g2)] {
                    if v.is_some() {
                        return Err(CliError::config(
                            &format!("lattice.{name}"),
                            "not a parameter of a bi lattice",
                        ));
                    }
                }
                LatticeKind::bi(l.beta.unwrap_or(0.0)).map_err(CliError::lattice)
            }
            KindName::Bc => {
                if l.beta.is_some() {
                    return Err(CliError::config(
                        "lattice.beta",
                        "not a parameter of a bc lattice",
                    ));
                }
                match (l.g0, l.delta, l.g1, l.g2) {
                    (Some(g0), Some(delta), None, None) => {
                        LatticeKind::bc(g0, delta).map_err(CliError::lattice)
                    }
                    (None, None, Some(g1), Some(g2)) => {
                        LatticeKind::bc_from_couplings(g1, g2).map_err(CliError::lattice)
                    }
                    (None, None, None, None) => Err(CliError::config(
                        "lattice",
                        "a bc lattice needs either {g0, delta} or {g1, g2}",
                    )),
                    _ => Err(CliError::config(
                        "lattice",
                        "give exactly one complete pair: {g0, delta} or {g1, g2}",
                    )),
                }
            }
        }
    }

    pub fn finite_lattice(&self) -> Result<LatticeSpec, CliError> {
        let n = self
            .lattice
            .n
            .ok_or_else(|| CliError::config("lattice.n", "required for a finite lattice"))?;
        LatticeSpec::finite(self.lattice_kind()?, n).map_err(CliError::lattice)
    }

    /// Configured input, or a single photon on the middle site.
    pub fn input_state(&self, n: usize) -> Result<InputState, CliError> {
        match &self.input {
            Some(section) => section.to_input(),
            None => Ok(InputState::FockSingleSite {
                site: n / 2,
                photons: 1,
            }),
        }
    }

    fn check_output(&self) -> Result<(), CliError> {
        if !(1..=17).contains(&self.output.precision) {
            return Err(CliError::config(
                "output.precision",
                format!("must be between 1 and 17 (got {})", self.output.precision),
            ));
        }
        Ok(())
    }
}

/// Flags shared by every subcommand; each overrides the matching config field.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of lattice sites.
    #[arg(long)]
    pub n: Option<usize>,
    /// Index contrast of a bi lattice (selects kind = bi).
    #[arg(long, conflicts_with_all = ["g1", "g2"])]
    pub beta: Option<f64>,
    /// First coupling of a bc lattice (selects kind = bc).
    #[arg(long, requires = "g2")]
    pub g1: Option<f64>,
    /// Second coupling of a bc lattice.
    #[arg(long, requires = "g1")]
    pub g2: Option<f64>,
    /// Start of the time (or propagation distance) grid.
    #[arg(long)]
    pub t0: Option<f64>,
    /// End of the time (or propagation distance) grid.
    #[arg(long)]
    pub t1: Option<f64>,
    /// Grid size; for `dispersion` this is the number of phi samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Accept quadrature node counts below the accuracy rule.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Spectrum,
    Propagate,
    Dispersion,
    Bloch,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Spectrum => "spectrum",
            CommandName::Propagate => "propagate",
            CommandName::Dispersion => "dispersion",
            CommandName::Bloch => "bloch",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues from the closed form and the numeric solver.
    Spectrum(Overrides),
    /// Mean photon numbers, fidelity and center of mass over time.
    Propagate(Overrides),
    /// Both bands of the infinite-lattice dispersion relation.
    Dispersion(Overrides),
    /// Infinite-lattice impulse response from the Bloch integrals.
    Bloch(Overrides),
}

#[derive(Debug, Parser)]
#[command(name = "binlat", version, about = "Binary waveguide lattice simulator")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
}

impl Overrides {
    /// Load the config file (if any) and apply the flags on top.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg);
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut RunConfig) {
        let l = &mut cfg.lattice;
        if let Some(n) = self.n {
            l.n = Some(n);
        }
        if let Some(beta) = self.beta {
            *l = LatticeSection {
                kind: Some(KindName::Bi),
                n: l.n,
                beta: Some(beta),
                ..Default::default()
            };
        }
        if let (Some(g1), Some(g2)) = (self.g1, self.g2) {
            *l = LatticeSection {
                kind: Some(KindName::Bc),
                n: l.n,
                g1: Some(g1),
                g2: Some(g2),
                ..Default::default()
            };
        }
        if let Some(t0) = self.t0 {
            cfg.time.start = Some(t0);
        }
        if let Some(t1) = self.t1 {
            cfg.time.stop = Some(t1);
        }
        if let Some(out) = &self.out {
            cfg.output.path = out.clone();
        }
        if let Some(format) = self.format {
            cfg.output.format = format;
        }
        if self.force {
            cfg.quadrature.force = true;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: CommandName,
    pub config: RunConfig,
    /// Seconds spent computing; reported on stderr, never written to files.
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumPayload {
    pub n: usize,
    pub numeric: Vec<f64>,
    /// Closed-form eigenvalues where one exists (bi lattices, uniform bc).
    pub analytic: Option<Vec<f64>>,
    pub analytic_source: Option<SpectrumSource>,
    pub max_eigenvalue_deviation: Option<f64>,
    pub max_eigenvector_deviation: Option<f64>,
    /// Row `j` holds site `j` of every numeric eigenvector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagatePayload {
    pub n: usize,
    pub times: Vec<f64>,
    /// Row per time sample, column per site.
    pub mean_photons: Vec<Vec<f64>>,
    pub fidelity: Vec<f64>,
    pub center_of_mass: Vec<f64>,
    pub total_photons: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionPayload {
    pub phi: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

/// Long-form amplitude table, one row per `(z, site)` pair, `z`-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlochPayload {
    pub source: i64,
    pub nodes: usize,
    pub z: Vec<f64>,
    pub site: Vec<i64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub abs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    Spectrum(SpectrumPayload),
    Propagate(PropagatePayload),
    Dispersion(DispersionPayload),
    Bloch(BlochPayload),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultBundle {
    pub metadata: Metadata,
    pub payload: Payload,
}

fn bundle(
    command: CommandName,
    config: &RunConfig,
    started: Instant,
    payload: Payload,
) -> ResultBundle {
    ResultBundle {
        metadata: Metadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: config.clone(),
            wall_time: started.elapsed().as_secs_f64(),
        },
        payload,
    }
}

fn spectrum_or_numeric(
    field: &str,
    r: Result<Spectrum, SpectralError>,
) -> Result<Spectrum, CliError> {
    r.map_err(|e| CliError::spectral(field, e))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn run_spectrum(config: &RunConfig) -> Result<ResultBundle, CliError> {
    let started = Instant::now();
    config.check_output()?;
    let spec = config.finite_lattice()?;
    let n = spec.len().expect("finite lattice");
    let h = build_hamiltonian(&spec).map_err(CliError::lattice)?;
    let numeric = spectrum_or_numeric("lattice", numeric_spectrum(&h))?;

    // Closed forms: the bi spectrum directly, and a bc chain without
    // dimerization is g0 times the uniform (beta = 0) chain.
    let analytic = match spec.kind {
        LatticeKind::Bi { beta } => Some((
            spectrum_or_numeric("lattice", analytic_spectrum_bi(n, beta))?,
            1.0,
        )),
        LatticeKind::Bc { g0, delta: 0.0 } => Some((
            spectrum_or_numeric("lattice", analytic_spectrum_bi(n, 0.0))?,
            g0,
        )),
        LatticeKind::Bc { .. } => None,
    };
    let (analytic_values, source, dev_value, dev_vector) = match &analytic {
        Some((s, scale)) => {
            let values: Vec<f64> = s.eigenvalues().iter().map(|v| v * scale).collect();
            let dev = max_abs_diff(&values, numeric.eigenvalues());
            let vdev = eigenvector_deviation(s, &numeric, 1e-9);
            (Some(values), Some(s.source()), Some(dev), Some(vdev))
        }
        None => (None, None, None, None),
    };
    let eigenvectors = config.spectrum.eigenvectors.then(|| {
        numeric
            .eigenvectors()
            .rows()
            .into_iter()
            .map(|r| r.to_vec())
            .collect()
    });
    Ok(bundle(
        CommandName::Spectrum,
        config,
        started,
        Payload::Spectrum(SpectrumPayload {
            n,
            numeric: numeric.eigenvalues().to_vec(),
            analytic: analytic_values,
            analytic_source: source,
            max_eigenvalue_deviation: dev_value,
            max_eigenvector_deviation: dev_vector,
            eigenvectors,
        }),
    ))
}

pub fn run_propagate(config: &RunConfig) -> Result<ResultBundle, CliError> {
    let started = Instant::now();
    config.check_output()?;
    let spec = config.finite_lattice()?;
    let n = spec.len().expect("finite lattice");
    let input = config.input_state(n)?;
    let times = config.time.grid()?;
    let sweep = observable_sweep(&spec, &input, &times).map_err(CliError::quantum)?;
    Ok(bundle(
        CommandName::Propagate,
        config,
        started,
        Payload::Propagate(PropagatePayload {
            n,
            times: sweep.times,
            mean_photons: sweep
                .mean_photons
                .rows()
                .into_iter()
                .map(|r| r.to_vec())
                .collect(),
            fidelity: sweep.fidelity,
            center_of_mass: sweep.center_of_mass,
            total_photons: sweep.total_photons,
        }),
    ))
}

pub fn run_dispersion(config: &RunConfig) -> Result<ResultBundle, CliError> {
    let started = Instant::now();
    config.check_output()?;
    let kind = config.lattice_kind()?;
    if config.dispersion.samples < 2 {
        return Err(CliError::config("dispersion.samples", "must be at least 2"));
    }
    let phi = phi_grid(config.dispersion.samples);
    let plus = dispersion_curve(&kind, &phi, Band::Plus).map_err(CliError::lattice)?;
    let minus = dispersion_curve(&kind, &phi, Band::Minus).map_err(CliError::lattice)?;
    Ok(bundle(
        CommandName::Dispersion,
        config,
        started,
        Payload::Dispersion(DispersionPayload {
            phi,
            plus: plus.omega,
            minus: minus.omega,
        }),
    ))
}

pub fn run_bloch(config: &RunConfig) -> Result<ResultBundle, CliError> {
    let started = Instant::now();
    config.check_output()?;
    let kind = config.lattice_kind()?;
    let [lo, hi] = config.bloch.sites;
    if lo > hi {
        return Err(CliError::config(
            "bloch.sites",
            format!("empty range [{lo}, {hi}]"),
        ));
    }
    let source = config.bloch.source;
    let sites: Vec<i64> = (lo..=hi).collect();
    let z = config.time.grid()?;
    let max_offset = sites.iter().map(|j| j.abs_diff(source)).max().unwrap_or(0);
    let max_z = z.iter().copied().fold(0.0, f64::max);
    let nodes = config
        .quadrature
        .nodes
        .unwrap_or_else(|| auto_nodes(max_offset, max_z));
    let mut quadrature = Quadrature::new(nodes).map_err(CliError::bloch)?;
    if config.quadrature.force {
        quadrature = quadrature.forced();
    }
    let kernel = BlochKernel {
        kind,
        source,
        quadrature,
    };
    let table = kernel.table(&sites, &z).map_err(CliError::bloch)?;
    let mut payload = BlochPayload {
        source,
        nodes,
        z: Vec::with_capacity(table.len()),
        site: Vec::with_capacity(table.len()),
        re: table.iter().map(|a| a.re).collect(),
        im: table.iter().map(|a| a.im).collect(),
        abs: table.iter().map(|a| a.norm()).collect(),
    };
    for &zz in &z {
        for &j in &sites {
            payload.z.push(zz);
            payload.site.push(j);
        }
    }
    Ok(bundle(
        CommandName::Bloch,
        config,
        started,
        Payload::Bloch(payload),
    ))
}

pub fn run(command: CommandName, config: &RunConfig) -> Result<ResultBundle, CliError> {
    match command {
        CommandName::Spectrum => run_spectrum(config),
        CommandName::Propagate => run_propagate(config),
        CommandName::Dispersion => run_dispersion(config),
        CommandName::Bloch => run_bloch(config),
    }
}

/// `x` with `digits` significant digits in scientific notation.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_finite() {
        format!("{:.*e}", digits.saturating_sub(1), x)
    } else {
        x.to_string()
    }
}

fn write_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

struct Table {
    name: &'static str,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl ResultBundle {
    fn tables(&self, digits: usize) -> Vec<Table> {
        let f = |x: f64| format_sig(x, digits);
        let opt = |x: Option<f64>| x.map(f).unwrap_or_default();
        match &self.payload {
            Payload::Spectrum(p) => {
                let mut tables = vec![Table {
                    name: "eigenvalues.csv",
                    header: vec!["index".into(), "numeric".into(), "analytic".into()],
                    rows: (0..p.n)
                        .map(|k| {
                            vec![
                                k.to_string(),
                                f(p.numeric[k]),
                                opt(p.analytic.as_ref().map(|a| a[k])),
                            ]
                        })
                        .collect(),
                }];
                if let Some(vectors) = &p.eigenvectors {
                    let mut header = vec!["site".to_string()];
                    header.extend((0..p.n).map(|k| format!("mode_{k}")));
                    tables.push(Table {
                        name: "eigenvectors.csv",
                        header,
                        rows: vectors
                            .iter()
                            .enumerate()
                            .map(|(j, row)| {
                                std::iter::once(j.to_string())
                                    .chain(row.iter().map(|&x| f(x)))
                                    .collect()
                            })
                            .collect(),
                    });
                }
                tables
            }
            Payload::Propagate(p) => {
                let mut header = vec!["time".to_string()];
                header.extend((0..p.n).map(|j| format!("site_{j}")));
                vec![
                    Table {
                        name: "mean_photons.csv",
                        header,
                        rows: p
                            .times
                            .iter()
                            .zip(&p.mean_photons)
                            .map(|(&t, row)| {
                                std::iter::once(f(t))
                                    .chain(row.iter().map(|&x| f(x)))
                                    .collect()
                            })
                            .collect(),
                    },
                    Table {
                        name: "scalars.csv",
                        header: ["time", "fidelity", "center_of_mass", "total"]
                            .map(String::from)
                            .to_vec(),
                        rows: (0..p.times.len())
                            .map(|i| {
                                vec![
                                    f(p.times[i]),
                                    f(p.fidelity[i]),
                                    f(p.center_of_mass[i]),
                                    f(p.total_photons[i]),
                                ]
                            })
                            .collect(),
                    },
                ]
            }
            Payload::Dispersion(p) => vec![Table {
                name: "dispersion.csv",
                header: ["phi", "plus", "minus"].map(String::from).to_vec(),
                rows: (0..p.phi.len())
                    .map(|i| vec![f(p.phi[i]), f(p.plus[i]), f(p.minus[i])])
                    .collect(),
            }],
            Payload::Bloch(p) => vec![Table {
                name: "bloch.csv",
                header: ["z", "site", "re", "im", "abs"].map(String::from).to_vec(),
                rows: (0..p.z.len())
                    .map(|i| {
                        vec![
                            f(p.z[i]),
                            p.site[i].to_string(),
                            f(p.re[i]),
                            f(p.im[i]),
                            f(p.abs[i]),
                        ]
                    })
                    .collect(),
            }],
        }
    }

    /// Scalar summary stored next to CSV tables.
    fn summary(&self, files: &[&str]) -> serde_json::Value {
        let mut v = serde_json::json!({ "files": files });
        if let Payload::Spectrum(p) = &self.payload {
            v["max_eigenvalue_deviation"] = serde_json::json!(p.max_eigenvalue_deviation);
            v["max_eigenvector_deviation"] = serde_json::json!(p.max_eigenvector_deviation);
            v["analytic_source"] = serde_json::json!(p.analytic_source);
        }
        if let Payload::Bloch(p) = &self.payload {
            v["nodes"] = serde_json::json!(p.nodes);
        }
        v
    }

    /// Write the result files into the configured output directory and
    /// return their paths.
    pub fn write(&self) -> Result<Vec<PathBuf>, CliError> {
        let out = &self.metadata.config.output;
        fs::create_dir_all(&out.path).map_err(|e| write_error(&out.path, e))?;
        let mut written = Vec::new();
        match out.format {
            Format::Json => {
                let path = out
                    .path
                    .join(format!("{}.json", self.metadata.command.as_str()));
                let text = serde_json::to_string_pretty(self).map_err(|e| write_error(&path, e))?;
                fs::write(&path, text + "\n").map_err(|e| write_error(&path, e))?;
                written.push(path);
            }
            Format::Csv => {
                let tables = self.tables(out.precision);
                for table in &tables {
                    let path = out.path.join(table.name);
                    let mut w = csv::Writer::from_path(&path).map_err(|e| write_error(&path, e))?;
                    w.write_record(&table.header)
                        .map_err(|e| write_error(&path, e))?;
                    for row in &table.rows {
                        w.write_record(row).map_err(|e| write_error(&path, e))?;
                    }
                    w.flush().map_err(|e| write_error(&path, e))?;
                    written.push(path);
                }
                let names: Vec<&str> = tables.iter().map(|t| t.name).collect();
                let path = out.path.join("metadata.json");
                let doc = serde_json::json!({
                    "metadata": &self.metadata,
                    "payload": self.summary(&names),
                });
                let text = serde_json::to_string_pretty(&doc).map_err(|e| write_error(&path, e))?;
                fs::write(&path, text + "\n").map_err(|e| write_error(&path, e))?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

/// Parse arguments, run, write files; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (name, overrides) = match &args.command {
        Command::Spectrum(o) => (CommandName::Spectrum, o),
        Command::Propagate(o) => (CommandName::Propagate, o),
        Command::Dispersion(o) => (CommandName::Dispersion, o),
        Command::Bloch(o) => (CommandName::Bloch, o),
    };
    let result = overrides.resolve().and_then(|mut cfg| {
        if let Some(samples) = overrides.samples {
            match name {
                CommandName::Dispersion => cfg.dispersion.samples = samples,
                _ => cfg.time.samples = Some(samples),
            }
        }
        let bundle = run(name, &cfg)?;
        let files = bundle.write()?;
        Ok((bundle, files))
    });
    match result {
        Ok((bundle, files)) => {
            log::info!(
                "{} finished in {:.3} s",
                name.as_str(),
                bundle.metadata.wall_time
            );
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
