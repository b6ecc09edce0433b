//! Run a TOML configuration through the library front end and print a
//! summary instead of writing files.
//!
//! cargo run --example config_run -- crates/core/configs/gaussian_bi.toml propagate

use binlat::cli::{run, CommandName, Payload, RunConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| "crates/core/configs/spectrum_bi.toml".into());
    let command = match args.next().as_deref().unwrap_or("spectrum") {
        "propagate" => CommandName::Propagate,
        "dispersion" => CommandName::Dispersion,
        "bloch" => CommandName::Bloch,
        _ => CommandName::Spectrum,
    };
    let config = match RunConfig::load(path.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    };
    let bundle = match run(command, &config) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    };
    match &bundle.payload {
        Payload::Spectrum(p) => {
            println!(
                "{} eigenvalues, max deviation to closed form {:?}",
                p.n, p.max_eigenvalue_deviation
            );
            println!("{:?}", p.numeric);
        }
        Payload::Propagate(p) => {
            let last = p.times.len() - 1;
            println!("{} samples up to t = {}", p.times.len(), p.times[last]);
            println!(
                "final fidelity {:.6}, center of mass {:.4}",
                p.fidelity[last], p.center_of_mass[last]
            );
        }
        Payload::Dispersion(p) => {
            let floor = p.plus.iter().copied().fold(f64::INFINITY, f64::min);
            println!("{} phi samples, upper band floor {floor}", p.phi.len());
        }
        Payload::Bloch(p) => println!("{} amplitudes with {} nodes", p.abs.len(), p.nodes),
    }
    println!("computed in {:.3} s", bundle.metadata.wall_time);
}
