//! Implicit QL iteration with Wilkinson-style shifts for real symmetric
//! tridiagonal matrices (the classic `tqli` scheme).

use ndarray::Array2;

/// Sweeps allowed per eigenvalue before giving up.
pub(crate) const MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NoConvergence {
    pub index: usize,
    pub sweeps: usize,
    pub residual_coupling: f64,
}

/// Diagonalise in place. On entry `d` is the diagonal and `e[i]` couples
/// `i` and `i + 1` (`e.len() == d.len()`, last entry ignored). On return `d`
/// holds the eigenvalues (unsorted) and column `k` of `z` the unit
/// eigenvector of `d[k]`. `z` must start as the identity.
pub(crate) fn tql_implicit(
    d: &mut [f64],
    e: &mut [f64],
    z: &mut Array2<f64>,
) -> Result<(), NoConvergence> {
    let n = d.len();
    debug_assert_eq!(e.len(), n);
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(NoConvergence {
                    index: l,
                    sweeps,
                    residual_coupling: e[l],
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;

            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                for k in 0..n {
                    let zi = z[[k, i]];
                    let zi1 = z[[k, i + 1]];
                    z[[k, i + 1]] = s * zi + c * zi1;
                    z[[k, i]] = c * zi - s * zi1;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
