//! A tilted Gaussian wavepacket on a binary index lattice: the center of mass
//! trembles and drifts, and the drift reverses with the tilt.

use std::f64::consts::PI;

use binlat::quantum::{observable_sweep, InputState};
use binlat::LatticeSpec;

fn main() {
    let spec = LatticeSpec::bi(101, 0.5).unwrap();
    let times: Vec<f64> = (0..=60).map(|k| 0.5 * k as f64).collect();
    let plus = observable_sweep(
        &spec,
        &InputState::GaussianLike {
            w0: 7.0,
            q: 0.55 * PI,
        },
        &times,
    )
    .unwrap();
    let minus = observable_sweep(
        &spec,
        &InputState::GaussianLike {
            w0: 7.0,
            q: -0.55 * PI,
        },
        &times,
    )
    .unwrap();

    println!(
        "{:>6} {:>10} {:>10} {:>10}",
        "t", "j_cm(+q)", "j_cm(-q)", "F(+q)"
    );
    for i in (0..times.len()).step_by(4) {
        println!(
            "{:>6.1} {:>10.4} {:>10.4} {:>10.6}",
            times[i], plus.center_of_mass[i], minus.center_of_mass[i], plus.fidelity[i]
        );
    }
    let worst = plus
        .total_photons
        .iter()
        .map(|t| (t - 1.0).abs())
        .fold(0.0, f64::max);
    println!("max |sum <n_q> - 1| = {worst:.1e}");
}
