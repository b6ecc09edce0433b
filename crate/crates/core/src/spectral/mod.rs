//! Spectra of finite lattice Hamiltonians and the unitary propagator.
//!
//! Two independent routes produce a [`Spectrum`]:
//!
//! - closed forms built from the roots of `F_{N+1}` and Morgan-Voyce
//!   polynomials ([`analytic_spectrum_bi`], [`analytic_spectrum_alternating_sign`]);
//! - an implicit-QL eigensolver for symmetric tridiagonal matrices
//!   ([`numeric_spectrum`]).
//!
//! The propagator is `U(t) = V exp(-i Lambda t) V^T` with `U[out, in]`
//! indexing, so `a(t) = U(t) a(0)`. [`propagate_ode`] integrates
//! `i da/dt = H a` directly and serves as a time-domain cross-check.

mod tridiag;

use ndarray::{Array2, ArrayView1};
use thiserror::Error;

use crate::lattice::{
    build_hamiltonian, HamiltonianMatrix, LatticeError, LatticeKind, LatticeSpec,
};
use crate::poly::{fib_roots, morgan_voyce_table, MorganVoyce};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("closed-form spectrum needs N >= 2 (got {0})")]
    TooFewSites(usize),
    #[error(
        "QL iteration did not converge for eigenvalue {index} after {sweeps} sweeps \
         (remaining coupling {residual_coupling:e})"
    )]
    NoConvergence {
        index: usize,
        sweeps: usize,
        residual_coupling: f64,
    },
    #[error("time must be finite and non-negative (got {0})")]
    InvalidTime(f64),
    #[error("step size too large: dt * |H| = {0} (need < 0.1)")]
    StepTooLarge(f64),
    #[error("initial amplitudes must have unit norm (got {0})")]
    NotNormalized(f64),
    #[error("vector length {got} does not match lattice size {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("site {site} outside lattice of {size} sites")]
    SiteOutOfRange { site: usize, size: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Which route produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SpectrumSource {
    AnalyticBI,
    AnalyticAlternatingSign,
    Numeric,
}

/// Ascending eigenvalues and the matching unit eigenvectors (as columns).
///
/// Each column is signed so its first non-negligible component is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Array2<f64>,
    source: SpectrumSource,
}

impl Spectrum {
    /// Sort by eigenvalue and fix the column sign convention.
    fn assemble(values: Vec<f64>, vectors: Array2<f64>, source: SpectrumSource) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut eigenvectors = Array2::zeros((n, n));
        for (dst, &src) in order.iter().enumerate() {
            let col = vectors.column(src);
            let sign = leading_sign(col);
            for i in 0..n {
                eigenvectors[[i, dst]] = sign * col[i];
            }
        }
        let eigenvalues = order.iter().map(|&k| values[k]).collect();
        Self {
            eigenvalues,
            eigenvectors,
            source,
        }
    }

    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `k` is the eigenvector of `eigenvalues()[k]`.
    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.eigenvectors.t().dot(&self.eigenvectors);
        max_abs_minus_identity(&gram)
    }

    /// `max |H V - V Lambda|`.
    pub fn residual(&self, h: &HamiltonianMatrix) -> f64 {
        let n = self.size();
        assert_eq!(h.size(), n, "Hamiltonian size must match spectrum");
        let dense = h.to_dense();
        let hv = dense.dot(&self.eigenvectors);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for k in 0..n {
                let r = hv[[i, k]] - self.eigenvectors[[i, k]] * self.eigenvalues[k];
                worst = worst.max(r.abs());
            }
        }
        worst
    }

    /// Modal coefficients `V^T a`.
    pub fn to_modal(&self, amps: &[C64]) -> Vec<C64> {
        let n = self.size();
        (0..n)
            .map(|k| {
                self.eigenvectors
                    .column(k)
                    .iter()
                    .zip(amps)
                    .map(|(&v, &a)| a * v)
                    .sum()
            })
            .collect()
    }

    /// Inverse of [`Spectrum::to_modal`] after applying `exp(-i lambda_k t)`.
    pub fn from_modal(&self, coeffs: &[C64], t: f64) -> Vec<C64> {
        let n = self.size();
        let phased: Vec<C64> = coeffs
            .iter()
            .zip(&self.eigenvalues)
            .map(|(&c, &l)| c * C64::from_polar(1.0, -l * t))
            .collect();
        (0..n)
            .map(|i| {
                self.eigenvectors
                    .row(i)
                    .iter()
                    .zip(&phased)
                    .map(|(&v, &c)| c * v)
                    .sum()
            })
            .collect()
    }

    /// `U(t) a` in `O(N^2)` without forming `U`.
    pub fn evolve(&self, amps: &[C64], t: f64) -> Result<Vec<C64>, SpectralError> {
        check_time(t)?;
        if amps.len() != self.size() {
            return Err(SpectralError::DimensionMismatch {
                expected: self.size(),
                got: amps.len(),
            });
        }
        Ok(self.from_modal(&self.to_modal(amps), t))
    }

    /// Column `input` of `U(t)`: the amplitudes produced by a unit excitation
    /// of site `input`.
    pub fn propagator_column(&self, input: usize, t: f64) -> Result<Vec<C64>, SpectralError> {
        check_time(t)?;
        let n = self.size();
        if input >= n {
            return Err(SpectralError::SiteOutOfRange {
                site: input,
                size: n,
            });
        }
        let coeffs: Vec<C64> = self
            .eigenvectors
            .row(input)
            .iter()
            .map(|&v| C64::new(v, 0.0))
            .collect();
        Ok(self.from_modal(&coeffs, t))
    }
}

fn leading_sign(col: ArrayView1<f64>) -> f64 {
    let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    col.iter()
        .find(|v| v.abs() > 1e-8 * scale)
        .map_or(1.0, |v| v.signum())
}

fn max_abs_minus_identity(m: &Array2<f64>) -> f64 {
    m.indexed_iter()
        .map(|((i, j), &v)| if i == j { (v - 1.0).abs() } else { v.abs() })
        .fold(0.0, f64::max)
}

fn check_time(t: f64) -> Result<(), SpectralError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(SpectralError::InvalidTime(t))
    }
}

/// Unnormalised BI normal mode for eigenvalue `lambda`, with
/// `x = beta^2 - lambda^2`:
///
/// ```text
/// u_k = (-1)^(k/2) b_(k/2)(x)                          k even
/// u_k = (-1)^((k+1)/2) (beta - lambda) B_((k-1)/2)(x)   k odd
/// ```
fn binary_index_mode(n: usize, beta: f64, lambda: f64, x: f64) -> Vec<f64> {
    let half = n / 2;
    let small = morgan_voyce_table(MorganVoyce::SmallB, half, x);
    let big = morgan_voyce_table(MorganVoyce::BigB, half, x);
    (0..n)
        .map(|k| {
            if k % 2 == 0 {
                let m = k / 2;
                alt(m) * small[m]
            } else {
                let m = (k - 1) / 2;
                alt(m + 1) * (beta - lambda) * big[m]
            }
        })
        .collect()
}

fn alt(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

fn columns_to_matrix(n: usize, columns: &[Vec<f64>]) -> Array2<f64> {
    Array2::from_shape_fn((n, columns.len()), |(i, k)| columns[k][i])
}

/// Closed-form spectrum of the `N`-site BI lattice.
///
/// Every root `2i cos(j pi / (N+1))` of `F_{N+1}` with positive imaginary
/// part gives the pair `-+ sqrt(beta^2 + 4 cos^2(j pi / (N+1)))`; for odd `N`
/// the zero root contributes the single eigenvalue `+beta`.
pub fn analytic_spectrum_bi(n: usize, beta: f64) -> Result<Spectrum, SpectralError> {
    if n < 2 {
        return Err(SpectralError::TooFewSites(n));
    }
    let roots = fib_roots(n + 1).expect("n + 1 >= 3");
    let mut values = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    for root in roots.iter().filter(|r| r.im >= 0.0) {
        let x = -root.im * root.im;
        let candidates: &[f64] = if root.im == 0.0 {
            &[beta]
        } else {
            let w = (beta * beta - x).sqrt();
            &[-w, w]
        };
        for &lambda in candidates {
            let mut v = binary_index_mode(n, beta, lambda, x);
            normalize(&mut v);
            values.push(lambda);
            columns.push(v);
        }
    }
    debug_assert_eq!(values.len(), n);
    Ok(Spectrum::assemble(
        values,
        columns_to_matrix(n, &columns),
        SpectrumSource::AnalyticBI,
    ))
}

/// Closed-form spectrum of the zero-diagonal matrix with couplings `-(-1)^j`.
///
/// The eigenvalues are the imaginary parts of the roots of `F_{N+1}`,
/// `2 cos(k pi / (N+1))`. A diagonal `+-1` gauge maps the matrix onto the
/// uniform chain, whose modes are Fibonacci polynomials at `i lambda`,
/// evaluated here through their real Morgan-Voyce forms.
pub fn analytic_spectrum_alternating_sign(n: usize) -> Result<Spectrum, SpectralError> {
    if n < 2 {
        return Err(SpectralError::TooFewSites(n));
    }
    let h = HamiltonianMatrix::alternating_sign(n)?;
    let mut gauge = vec![1.0; n];
    for (j, &e) in h.offdiagonal().iter().enumerate() {
        gauge[j + 1] = gauge[j] * e.signum();
    }
    let roots = fib_roots(n + 1).expect("n + 1 >= 3");
    let mut values = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    for root in roots {
        let lambda = root.im;
        let mut v = binary_index_mode(n, 0.0, lambda, -lambda * lambda);
        v.iter_mut().zip(&gauge).for_each(|(c, s)| *c *= s);
        normalize(&mut v);
        values.push(lambda);
        columns.push(v);
    }
    Ok(Spectrum::assemble(
        values,
        columns_to_matrix(n, &columns),
        SpectrumSource::AnalyticAlternatingSign,
    ))
}

/// Full eigendecomposition by implicit QL iteration.
pub fn numeric_spectrum(h: &HamiltonianMatrix) -> Result<Spectrum, SpectralError> {
    let n = h.size();
    let mut d = h.diagonal().to_vec();
    let mut e = h.offdiagonal().to_vec();
    e.push(0.0);
    let mut z = Array2::eye(n);
    tridiag::tql_implicit(&mut d, &mut e, &mut z).map_err(|f| SpectralError::NoConvergence {
        index: f.index,
        sweeps: f.sweeps,
        residual_coupling: f.residual_coupling,
    })?;
    Ok(Spectrum::assemble(d, z, SpectrumSource::Numeric))
}

/// Closed form for BI lattices, numeric otherwise.
pub fn spectrum_for(spec: &LatticeSpec) -> Result<Spectrum, SpectralError> {
    let n = spec.len().ok_or(LatticeError::InfiniteLattice)?;
    match spec.kind {
        LatticeKind::Bi { beta } => analytic_spectrum_bi(n, beta),
        LatticeKind::Bc { .. } => numeric_spectrum(&build_hamiltonian(spec)?),
    }
}

/// Agreement between two spectra of the same matrix.
///
/// Eigenvalues within `cluster_tol` of each other form a degenerate block;
/// simple eigenvalues are compared by `1 - |<a_k, b_k>|` and blocks by the
/// max-abs difference of their projectors. Returns the worst deviation.
pub fn eigenvector_deviation(a: &Spectrum, b: &Spectrum, cluster_tol: f64) -> f64 {
    let n = a.size();
    assert_eq!(n, b.size(), "spectra must have equal size");
    let va = a.eigenvectors();
    let vb = b.eigenvectors();
    let mut worst: f64 = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && a.eigenvalues[end] - a.eigenvalues[end - 1] < cluster_tol {
            end += 1;
        }
        if end - start == 1 {
            let dot = va.column(start).dot(&vb.column(start));
            worst = worst.max(1.0 - dot.abs());
        } else {
            for i in 0..n {
                for j in 0..n {
                    let pa: f64 = (start..end).map(|k| va[[i, k]] * va[[j, k]]).sum();
                    let pb: f64 = (start..end).map(|k| vb[[i, k]] * vb[[j, k]]).sum();
                    worst = worst.max((pa - pb).abs());
                }
            }
        }
        start = end;
    }
    worst
}

/// Dense unitary `U(t)` with `U[out, in]` indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    time: f64,
    matrix: Array2<C64>,
}

impl Propagator {
    pub fn identity(n: usize) -> Self {
        Self {
            time: 0.0,
            matrix: Array2::from_shape_fn((n, n), |(i, j)| {
                if i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Amplitude at `out` produced by a unit excitation at `input`.
    pub fn get(&self, out: usize, input: usize) -> C64 {
        self.matrix[[out, input]]
    }

    pub fn apply(&self, amps: &[C64]) -> Result<Vec<C64>, SpectralError> {
        if amps.len() != self.size() {
            return Err(SpectralError::DimensionMismatch {
                expected: self.size(),
                got: amps.len(),
            });
        }
        Ok(self
            .matrix
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(amps).map(|(&u, &a)| u * a).sum())
            .collect())
    }

    /// `U(t1) U(t2)`, the propagator for `t1 + t2`.
    pub fn compose(&self, other: &Propagator) -> Propagator {
        Propagator {
            time: self.time + other.time,
            matrix: self.matrix.dot(&other.matrix),
        }
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s: C64 = (0..n)
                    .map(|k| self.matrix[[k, i]].conj() * self.matrix[[k, j]])
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

/// `U(t) = V diag(exp(-i lambda_k t)) V^T`.
pub fn propagator(spectrum: &Spectrum, t: f64) -> Result<Propagator, SpectralError> {
    check_time(t)?;
    let n = spectrum.size();
    let v = spectrum.eigenvectors();
    let phases: Vec<C64> = spectrum
        .eigenvalues()
        .iter()
        .map(|&l| C64::from_polar(1.0, -l * t))
        .collect();
    let mut matrix = Array2::from_elem((n, n), C64::new(0.0, 0.0));
    for i in 0..n {
        let vi = v.row(i);
        for j in i..n {
            let vj = v.row(j);
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += phases[k] * (vi[k] * vj[k]);
            }
            matrix[[i, j]] = acc;
            matrix[[j, i]] = acc;
        }
    }
    Ok(Propagator { time: t, matrix })
}

/// Integrate `i da/dt = H a` with classic fixed-step RK4.
///
/// Requires `(t / steps) * |H| < 0.1` with `|H|` the Gershgorin bound, and a
/// unit-norm start vector.
pub fn propagate_ode(
    h: &HamiltonianMatrix,
    amps0: &[C64],
    t: f64,
    steps: usize,
) -> Result<Vec<C64>, SpectralError> {
    check_time(t)?;
    let n = h.size();
    if amps0.len() != n {
        return Err(SpectralError::DimensionMismatch {
            expected: n,
            got: amps0.len(),
        });
    }
    let norm = amps0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(SpectralError::NotNormalized(norm));
    }
    if t == 0.0 {
        return Ok(amps0.to_vec());
    }
    let dt = t / steps.max(1) as f64;
    let stiffness = dt * h.norm_bound();
    if steps == 0 || stiffness >= 0.1 {
        return Err(SpectralError::StepTooLarge(stiffness));
    }

    let minus_i = C64::new(0.0, -1.0);
    let rhs = |a: &[C64]| -> Vec<C64> { h.apply(a).into_iter().map(|x| minus_i * x).collect() };
    let axpy = |a: &[C64], k: &[C64], s: f64| -> Vec<C64> {
        a.iter().zip(k).map(|(&x, &y)| x + y * s).collect()
    };

    let mut a = amps0.to_vec();
    for _ in 0..steps {
        let k1 = rhs(&a);
        let k2 = rhs(&axpy(&a, &k1, 0.5 * dt));
        let k3 = rhs(&axpy(&a, &k2, 0.5 * dt));
        let k4 = rhs(&axpy(&a, &k3, dt));
        for i in 0..n {
            a[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    Ok(a)
}

/// `max |[g0 A, delta B]|` with `A` the uniform chain and `B` the
/// alternating-sign matrix, both on `n` sites.
///
/// A BC Hamiltonian is `g0 A + delta B`; rotating away the `g0 A` part by
/// `exp(i g0 A t)` leaves `delta B` unchanged only when the two commute, so a
/// nonzero value means that factorisation is approximate.
pub fn commutator_check(n: usize, g0: f64, delta: f64) -> Result<f64, SpectralError> {
    if n < 2 {
        return Err(SpectralError::TooFewSites(n));
    }
    let a = HamiltonianMatrix::uniform(n)?.to_dense() * g0;
    let b = HamiltonianMatrix::alternating_sign(n)?.to_dense() * delta;
    let comm = a.dot(&b) - b.dot(&a);
    Ok(comm.iter().fold(0.0, |m, v| m.max(v.abs())))
}
