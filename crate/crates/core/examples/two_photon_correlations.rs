//! Two-photon correlations for product and NOON inputs.

use binlat::quantum::{mean_photon_numbers, two_photon_correlation, InputState};
use binlat::spectral::{propagator, spectrum_for};
use binlat::LatticeSpec;

fn main() {
    // coincidences on a dimer vanish at t = pi/4
    let dimer = spectrum_for(&LatticeSpec::bi(2, 0.0).unwrap()).unwrap();
    for k in 0..=8 {
        let t = k as f64 * std::f64::consts::PI / 16.0;
        let g = two_photon_correlation(
            &propagator(&dimer, t).unwrap(),
            &InputState::ProductTwoPhoton { sites: (0, 1) },
        )
        .unwrap();
        println!("t = {t:.4}  Gamma[0,1] = {:.6}", g[[0, 1]]);
    }

    let spec = LatticeSpec::bc(9, 1.0, 0.3).unwrap();
    let u = propagator(&spectrum_for(&spec).unwrap(), 2.0).unwrap();
    for input in [
        InputState::ProductTwoPhoton { sites: (3, 5) },
        InputState::Noon {
            sites: (3, 5),
            photons: 2,
            phase: 0.0,
        },
    ] {
        let g = two_photon_correlation(&u, &input).unwrap();
        println!("\n{input:?}, t = 2, sum = {:.12}", g.sum());
        for row in g.rows() {
            println!(
                "  {}",
                row.iter()
                    .map(|x| format!("{x:6.3}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
        }
        let n = mean_photon_numbers(&u, &input).unwrap();
        println!(
            "  <n_q>: {}",
            n.iter()
                .map(|x| format!("{x:.3}"))
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
}
