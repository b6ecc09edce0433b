//! The BC Hamiltonian splits as g0 A + delta B. Removing g0 A by a rotation
//! is exact only if A and B commute; this prints max |[g0 A, delta B]|.

use binlat::spectral::commutator_check;

fn main() {
    for n in 2..=10 {
        println!("N = {n:>2}: {}", commutator_check(n, 1.0, 1.0).unwrap());
    }
    println!(
        "N = 51, g0 = 3, delta = 1: {}",
        commutator_check(51, 3.0, 1.0).unwrap()
    );
}
