//! Impulse response of the infinite lattices from the Bloch integrals,
//! compared with a large finite lattice.

use binlat::bloch::{auto_nodes, finite_vs_infinite_profile, BlochKernel, Quadrature};
use binlat::{LatticeKind, LatticeSpec};

fn main() {
    let z = 8.0;
    let sites: Vec<i64> = (-24..=24).collect();
    for kind in [
        LatticeKind::bi(0.5).unwrap(),
        LatticeKind::bc(1.0, 1.0 / 3.0).unwrap(),
    ] {
        let kernel = BlochKernel {
            kind,
            source: 0,
            quadrature: Quadrature::new(auto_nodes(24, z)).unwrap(),
        };
        let row = kernel.table(&sites, &[z]).unwrap();
        println!("{kind:?} at z = {z}");
        for (j, a) in sites.iter().zip(&row).step_by(4) {
            println!(
                "  j = {j:>3}  |E| = {:.6}  {}",
                a.norm(),
                "#".repeat((a.norm() * 60.0) as usize)
            );
        }
        let total: f64 = row.iter().map(|a| a.norm_sqr()).sum();
        println!("  power within |j| <= 24: {total:.12}");

        let targets: Vec<usize> = (176..=224).collect();
        let gaps = finite_vs_infinite_profile(&targets, 200, z, &LatticeSpec::infinite(kind), 401)
            .unwrap();
        println!(
            "  max gap to a 401-site lattice: {:.1e}\n",
            gaps.into_iter().fold(0.0, f64::max)
        );
    }
}
