//! Fibonacci and Morgan-Voyce polynomials.
//!
//! Fibonacci polynomials obey `F_1 = 1`, `F_2 = x`,
//! `F_{n+1} = x F_n + F_{n-1}`. The Morgan-Voyce families `b_n` and `B_n`
//! share the recurrence `p_{n+1} = (x + 2) p_n - p_{n-1}` with
//! `b_0 = B_0 = 1`, `b_1 = x + 1` and `B_1 = x + 2`. They carry the even and
//! odd halves of the Fibonacci family:
//!
//! ```text
//! F_{2n+1}(y) = b_n(y^2)        F_{2n+2}(y) = y B_n(y^2)
//! ```
//!
//! All evaluation is by forward recurrence. For `|x| <= 2` (the range that
//! lattice spectra live in) the values grow at most polynomially in `n`;
//! [`fib_eval_scaled`] tracks a separate binary exponent for arguments where
//! the plain recurrence would overflow.

use std::f64::consts::PI;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("Fibonacci polynomials are indexed from 1, got n = {0}")]
    FibonacciIndex(usize),
    #[error("F_{0} has no roots; need n >= 2")]
    TooFewRoots(usize),
}

/// Which polynomial family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyFamily {
    Fibonacci,
    MorganVoyceSmallB,
    MorganVoyceBigB,
}

/// Selector for [`morgan_voyce_eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MorganVoyce {
    SmallB,
    BigB,
}

impl PolyFamily {
    /// Evaluate the `n`th member of the family at `x`.
    pub fn eval<T>(self, n: usize, x: T) -> Result<T, PolyError>
    where
        T: Copy + num_traits::Num,
    {
        match self {
            PolyFamily::Fibonacci => fib_eval(n, x),
            PolyFamily::MorganVoyceSmallB => Ok(morgan_voyce_eval(MorganVoyce::SmallB, n, x)),
            PolyFamily::MorganVoyceBigB => Ok(morgan_voyce_eval(MorganVoyce::BigB, n, x)),
        }
    }
}

/// `F_n(x)` by forward recurrence.
pub fn fib_eval<T>(n: usize, x: T) -> Result<T, PolyError>
where
    T: Copy + num_traits::Num,
{
    if n == 0 {
        return Err(PolyError::FibonacciIndex(n));
    }
    let mut prev = T::zero(); // F_0
    let mut cur = T::one(); // F_1
    for _ in 1..n {
        let next = x * cur + prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `b_n(x)` or `B_n(x)` by forward recurrence.
pub fn morgan_voyce_eval<T>(kind: MorganVoyce, n: usize, x: T) -> T
where
    T: Copy + num_traits::Num,
{
    let two = T::one() + T::one();
    let shift = x + two;
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = match kind {
        MorganVoyce::SmallB => x + T::one(),
        MorganVoyce::BigB => shift,
    };
    for _ in 1..n {
        let next = shift * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluate `b_0..=b_max` (or `B_0..=B_max`) in one pass.
pub fn morgan_voyce_table(kind: MorganVoyce, max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(1.0);
    if max == 0 {
        return out;
    }
    out.push(match kind {
        MorganVoyce::SmallB => x + 1.0,
        MorganVoyce::BigB => x + 2.0,
    });
    for k in 2..=max {
        let next = (x + 2.0) * out[k - 1] - out[k - 2];
        out.push(next);
    }
    out
}

/// Roots of `F_n`, `2i cos(k pi / n)` for `k = 1..n-1`, sorted by imaginary
/// part ascending.
///
/// The cosine is evaluated as `sin((n - 2k) pi / (2n))` so the set is exactly
/// symmetric about zero and the middle root of odd-degree polynomials is an
/// exact zero.
pub fn fib_roots(n: usize) -> Result<Vec<C64>, PolyError> {
    if n < 2 {
        return Err(PolyError::TooFewRoots(n));
    }
    let denom = 2.0 * n as f64;
    // k = n-1 down to 1 gives ascending imaginary parts.
    let roots = (1..n)
        .rev()
        .map(|k| {
            let m = n as i64 - 2 * k as i64;
            C64::new(0.0, 2.0 * (m as f64 * PI / denom).sin())
        })
        .collect();
    Ok(roots)
}

/// A complex value stored as `mantissa * 2^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: C64,
    pub exponent: i32,
}

impl ScaledComplex {
    pub fn to_complex(self) -> C64 {
        self.mantissa * 2f64.powi(self.exponent)
    }

    /// `log2 |value|`; `-inf` for an exact zero.
    pub fn log2_abs(self) -> f64 {
        self.mantissa.norm().log2() + f64::from(self.exponent)
    }
}

/// Result of a scaled Fibonacci evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledEval {
    pub value: ScaledComplex,
    /// Largest `|F_k(x)|`, `k <= n`, met along the recurrence; the natural
    /// scale against which rounding in `value` should be judged.
    pub peak: ScaledComplex,
}

const RESCALE_ABOVE: f64 = 1e150;

/// `F_n(x)` with the running pair rescaled by powers of two so arbitrarily
/// large `n` and `|x|` never overflow.
pub fn fib_eval_scaled(n: usize, x: C64) -> Result<ScaledEval, PolyError> {
    if n == 0 {
        return Err(PolyError::FibonacciIndex(n));
    }
    let mut prev = C64::zero();
    let mut cur = C64::one();
    let mut exponent = 0i32;
    let mut peak = ScaledComplex {
        mantissa: cur,
        exponent: 0,
    };
    for _ in 1..n {
        let next = x * cur + prev;
        prev = cur;
        cur = next;
        let mag = cur.norm().max(prev.norm());
        if mag > RESCALE_ABOVE {
            let shift = mag.log2().floor() as i32;
            let factor = 2f64.powi(-shift);
            cur *= factor;
            prev *= factor;
            exponent += shift;
        }
        let here = ScaledComplex {
            mantissa: cur,
            exponent,
        };
        if here.log2_abs() > peak.log2_abs() {
            peak = here;
        }
    }
    Ok(ScaledEval {
        value: ScaledComplex {
            mantissa: cur,
            exponent,
        },
        peak,
    })
}

/// Residual `|F_n(root)|` relative to the recurrence scale `max(1, peak)`,
/// computed in scaled mode.
pub fn fib_root_residual(n: usize, root: C64) -> Result<f64, PolyError> {
    let eval = fib_eval_scaled(n, root)?;
    let scale_log2 = eval.peak.log2_abs().max(0.0);
    Ok(2f64.powf(eval.value.log2_abs() - scale_log2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn fib_base_cases() {
        let x = C64::new(0.3, -1.7);
        assert_eq!(fib_eval(1, x).unwrap(), C64::one());
        assert_eq!(fib_eval(2, x).unwrap(), x);
        assert_eq!(fib_eval(5, 1.0).unwrap(), 5.0);
        // F_5 = x^4 + 3x^2 + 1
        assert_eq!(fib_eval(5, 2.0).unwrap(), 29.0);
    }

    #[test]
    fn fib_rejects_zero_index() {
        assert_eq!(fib_eval(0, 1.0), Err(PolyError::FibonacciIndex(0)));
        assert!(fib_eval_scaled(0, C64::one()).is_err());
        assert!(PolyFamily::Fibonacci.eval(0, 1.0).is_err());
    }

    #[test]
    fn morgan_voyce_examples() {
        let x = 0.37;
        assert_eq!(morgan_voyce_eval(MorganVoyce::SmallB, 1, x), x + 1.0);
        let arg = -4.0 * (PI / 3.0).cos().powi(2);
        assert!((morgan_voyce_eval(MorganVoyce::BigB, 1, arg) - 1.0).abs() < 1e-15);
        // b_2 = x^2 + 3x + 1
        assert_eq!(morgan_voyce_eval(MorganVoyce::SmallB, 2, 0.0), 1.0);
        assert_eq!(morgan_voyce_eval(MorganVoyce::SmallB, 2, 2.0), 11.0);
        assert_eq!(morgan_voyce_eval(MorganVoyce::BigB, 0, 5.0), 1.0);
    }

    #[test]
    fn table_matches_pointwise() {
        for kind in [MorganVoyce::SmallB, MorganVoyce::BigB] {
            let table = morgan_voyce_table(kind, 12, -2.7);
            for (n, v) in table.iter().enumerate() {
                assert_eq!(*v, morgan_voyce_eval(kind, n, -2.7));
            }
        }
    }

    #[test]
    fn roots_small_cases() {
        assert_eq!(fib_roots(2).unwrap(), vec![C64::zero()]);
        // F_4 = x^3 + 2x = x (x^2 + 2)
        let r = fib_roots(4).unwrap();
        let s2 = 2f64.sqrt();
        assert!(close(r[0], C64::new(0.0, -s2), 1e-15));
        assert_eq!(r[1], C64::zero());
        assert!(close(r[2], C64::new(0.0, s2), 1e-15));
        assert_eq!(fib_roots(1), Err(PolyError::TooFewRoots(1)));
    }

    #[test]
    fn roots_have_small_residual() {
        for root in fib_roots(8).unwrap() {
            assert!(fib_eval(8, root).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn scaled_agrees_with_plain_and_survives_overflow() {
        let x = C64::new(1.3, 0.4);
        let plain = fib_eval(30, x).unwrap();
        let scaled = fib_eval_scaled(30, x).unwrap().value.to_complex();
        assert!(close(scaled, plain, 1e-13));

        // Plain recurrence overflows here.
        let big = C64::new(40.0, 0.0);
        assert!(!fib_eval(400, big).unwrap().norm().is_finite());
        let s = fib_eval_scaled(400, big).unwrap();
        // Binet form: F_n = (r+^n - r-^n) / (r+ - r-), r-+ = (x -+ sqrt(x^2 + 4)) / 2
        let disc = (40f64 * 40.0 + 4.0).sqrt();
        let expect = 400.0 * ((40.0 + disc) / 2.0).log2() - disc.log2();
        assert!((s.value.log2_abs() - expect).abs() < 1e-6);
    }

    #[test]
    fn residual_is_scale_aware() {
        for n in [41, 60, 100] {
            for root in fib_roots(n).unwrap() {
                assert!(fib_root_residual(n, root).unwrap() < 1e-9, "n={n}");
            }
        }
        // Not a root: residual of order one.
        assert!(fib_root_residual(10, C64::new(0.0, 0.1)).unwrap() > 1e-3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rel(a: C64, b: C64) -> f64 {
            (a - b).norm() / b.norm().max(1.0)
        }

        proptest! {
            #[test]
            fn recurrence_consistent(x in -3.0f64..3.0, n in 2usize..=25) {
                let next = fib_eval(n + 1, x).unwrap();
                let expect = x * fib_eval(n, x).unwrap() + fib_eval(n - 1, x).unwrap();
                prop_assert!((next - expect).abs() <= 1e-12 * expect.abs().max(1.0));
            }

            #[test]
            fn fibonacci_morgan_voyce_identities(re in -1.5f64..1.5, im in -1.5f64..1.5, n in 0usize..=15) {
                let y = C64::new(re, im);
                let y2 = y * y;
                let odd = fib_eval(2 * n + 1, y).unwrap();
                let even = fib_eval(2 * n + 2, y).unwrap();
                prop_assert!(rel(odd, morgan_voyce_eval(MorganVoyce::SmallB, n, y2)) < 1e-10);
                prop_assert!(rel(even, y * morgan_voyce_eval(MorganVoyce::BigB, n, y2)) < 1e-10);
            }

            #[test]
            fn roots_are_imaginary_and_bounded(n in 2usize..200) {
                let roots = fib_roots(n).unwrap();
                prop_assert_eq!(roots.len(), n - 1);
                for w in roots.windows(2) {
                    prop_assert!(w[0].im <= w[1].im);
                }
                for r in roots {
                    prop_assert_eq!(r.re, 0.0);
                    prop_assert!(r.im.abs() < 2.0);
                }
            }
        }
    }
}
