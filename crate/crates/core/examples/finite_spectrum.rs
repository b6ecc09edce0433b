//! Closed-form spectrum of a finite binary index lattice next to the
//! numeric eigensolver.

use binlat::lattice::build_hamiltonian;
use binlat::spectral::{analytic_spectrum_bi, eigenvector_deviation, numeric_spectrum};
use binlat::LatticeSpec;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(11);
    let beta: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);

    let spec = LatticeSpec::bi(n, beta).unwrap();
    let h = build_hamiltonian(&spec).unwrap();
    let analytic = analytic_spectrum_bi(n, beta).unwrap();
    let numeric = numeric_spectrum(&h).unwrap();

    println!("N = {n}, beta = {beta}");
    println!(
        "{:>4} {:>22} {:>22} {:>10}",
        "k", "closed form", "QL", "diff"
    );
    for (k, (a, b)) in analytic
        .eigenvalues()
        .iter()
        .zip(numeric.eigenvalues())
        .enumerate()
    {
        println!("{k:>4} {a:>22.16} {b:>22.16} {:>10.1e}", (a - b).abs());
    }
    println!(
        "residual |HV - V L|: closed form {:.1e}, QL {:.1e}",
        analytic.residual(&h),
        numeric.residual(&h)
    );
    println!(
        "eigenvector deviation {:.1e}",
        eigenvector_deviation(&analytic, &numeric, 1e-9)
    );
}
