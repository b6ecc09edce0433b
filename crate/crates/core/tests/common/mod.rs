//! Reference values shared by the integration tests.
//!
//! Nothing here calls into the library's numerics: the Bessel function is a
//! plain power series summed in double-double arithmetic so that the
//! cancellation at arguments near 20 costs nothing visible in f64.

#![allow(dead_code, clippy::excessive_precision)]

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn quick(a: f64, b: f64) -> Self {
        let s = a + b;
        Dd {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let r = Dd::quick(s.hi, s.lo + t.hi);
        Dd::quick(r.hi, r.lo + t.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        Dd::quick(p, err + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let r = self.add(Dd::from(q1).mul(Dd::from(-d)));
        let q2 = r.hi / d;
        Dd::quick(q1, q2)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

/// `J_n(x) = sum_k (-1)^k (x/2)^{2k+n} / (k! (k+n)!)`, valid for any integer
/// order; accurate to about 1e-15 absolute for `|x| <= 40`.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let order = n.unsigned_abs() as u64;
    let sign = if n < 0 && order % 2 == 1 { -1.0 } else { 1.0 };
    let half = Dd::from(x).div_f64(2.0);
    // leading term (x/2)^n / n!
    let mut term = Dd::from(1.0);
    for k in 1..=order {
        term = term.mul(half).div_f64(k as f64);
    }
    let q = half.mul(half).neg();
    let mut sum = term;
    let mut k = 1u64;
    loop {
        term = term.mul(q).div_f64((k * (k + order)) as f64);
        sum = sum.add(term);
        let past_peak = (k * k) as f64 > q.hi.abs();
        if past_peak && term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
        if k > 500 {
            break;
        }
        k += 1;
    }
    sign * (sum.hi + sum.lo)
}

#[test]
fn bessel_reference_points() {
    // 30-digit values
    let cases = [
        (0, 1.0, 0.765_197_686_557_966_551),
        (5, 10.0, -0.234_061_528_186_793_640),
        (20, 20.0, 0.164_747_773_775_326_532),
        (1, 20.0, 0.066_833_124_175_850_045_6),
        (7, 3.5, 0.006_743_000_315_638_398_59),
        (0, 20.0, 0.167_024_664_340_583_155),
    ];
    for (n, x, want) in cases {
        let got = bessel_j(n, x);
        assert!(
            (got - want).abs() < 1e-15,
            "J_{n}({x}) = {got}, want {want}"
        );
    }
    assert!((bessel_j(-5, 10.0) - 0.234_061_528_186_793_640).abs() < 1e-15);
    assert_eq!(bessel_j(3, 0.0), 0.0);
    assert_eq!(bessel_j(0, 0.0), 1.0);
}
