//! Both bands of the infinite binary lattices, printed as a coarse table.

use binlat::lattice::{dispersion_curve, phi_grid, Band};
use binlat::LatticeKind;

fn main() {
    let phi = phi_grid(17);
    let lattices = [
        ("bc g0=3 delta=1", LatticeKind::bc(3.0, 1.0).unwrap()),
        ("bi beta=0.5", LatticeKind::bi(0.5).unwrap()),
        ("bi beta=2", LatticeKind::bi(2.0).unwrap()),
    ];
    for (label, kind) in lattices {
        let plus = dispersion_curve(&kind, &phi, Band::Plus).unwrap();
        let minus = dispersion_curve(&kind, &phi, Band::Minus).unwrap();
        println!("{label}");
        println!("  {:>8} {:>9} {:>9}", "phi/pi", "plus", "minus");
        for (i, p) in phi.iter().enumerate() {
            println!(
                "  {:>8.3} {:>9.5} {:>9.5}",
                p / std::f64::consts::PI,
                plus.omega[i],
                minus.omega[i]
            );
        }
        let gap = plus.omega.iter().copied().fold(f64::INFINITY, f64::min)
            - minus
                .omega
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
        println!("  gap {gap:.6}\n");
    }
}
