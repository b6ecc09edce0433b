//! Roots of Fibonacci polynomials and how well they satisfy F_n(x) = 0.

use binlat::poly::{fib_eval, fib_root_residual, fib_roots, morgan_voyce_eval, MorganVoyce};
use binlat::C64;

fn main() {
    let n = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(8);
    println!("roots of F_{n}:");
    for r in fib_roots(n).unwrap() {
        println!(
            "  {:+.15}i   residual {:.1e}",
            r.im,
            fib_root_residual(n, r).unwrap()
        );
    }

    let y = C64::new(0.7, -0.4);
    let k = 5;
    let lhs = fib_eval(2 * k + 1, y).unwrap();
    let rhs = morgan_voyce_eval(MorganVoyce::SmallB, k, y * y);
    println!("F_{}(y) = {lhs:.12}", 2 * k + 1);
    println!("b_{k}(y^2) = {rhs:.12}");

    let worst = (2..=200)
        .flat_map(|n| {
            fib_roots(n)
                .unwrap()
                .into_iter()
                .map(move |r| fib_root_residual(n, r).unwrap())
        })
        .fold(0.0, f64::max);
    println!("worst scaled residual for n <= 200: {worst:.1e}");
}
