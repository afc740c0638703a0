//! Brute-force reference sums.
//!
//! Matrices are found by a full search over `0 ≤ a, d < c`, and χ comes from
//! the Dedekind-sum form of the eta transformation law rather than from the
//! Knopp formula used by the optimized path:
//! `χ(γ) = exp(πi((a+d)/12c − s(d,c))) · e(−1/8)` for `c > 0`.

use num_rational::Ratio;

use crate::arith::{gcd_u64, kronecker};
use crate::exactsum::ExactExponentialSum;
use crate::kloosterman::TwistCharacter;

/// `((x))`: `x − ⌊x⌋ − 1/2` off the integers, 0 on them.
fn sawtooth(x: Ratio<i64>) -> Ratio<i64> {
    if x.is_integer() {
        Ratio::from_integer(0)
    } else {
        x - x.floor() - Ratio::new(1, 2)
    }
}

/// `s(d, c)` straight from the definition.
pub fn dedekind_sum_direct(d: i64, c: i64) -> Ratio<i64> {
    (1..c).fold(Ratio::from_integer(0), |acc, k| {
        acc + sawtooth(Ratio::new(k, c)) * sawtooth(Ratio::new(k * d, c))
    })
}

/// χ(γ) for `c > 0` as an exponent mod 24, via the Dedekind sum.
pub fn chi_exponent_dedekind(a: i64, d: i64, c: i64) -> i64 {
    assert!(c > 0);
    let e = Ratio::new(a + d, c) - dedekind_sum_direct(d, c) * 12 - 3;
    assert!(e.is_integer(), "eta exponent must be an integer");
    e.to_integer().rem_euclid(24)
}

/// All `(a, b, d)` with `0 ≤ a, d < c` and `ad − bc = 1`, by exhaustive search.
pub fn matrices_for(c: u64) -> Vec<(i64, i64, i64)> {
    let c = c as i64;
    let mut out = Vec::new();
    for a in 0..c {
        for d in 0..c {
            let ad = a * d - 1;
            if ad.rem_euclid(c) == 0 {
                out.push((a, ad.div_euclid(c), d));
            }
        }
    }
    out
}

/// Per-`c` table of matrices with χ exponents, reusable across `(m, n)`.
#[derive(Clone, Debug)]
pub struct BruteTable {
    pub c: u64,
    /// `(a, d, j)` with `χ(γ) = e(j/24)`.
    pub entries: Vec<(i64, i64, i64)>,
}

impl BruteTable {
    pub fn new(c: u64) -> Self {
        let entries = matrices_for(c)
            .into_iter()
            .map(|(a, _b, d)| (a, d, chi_exponent_dedekind(a, d, c as i64)))
            .collect();
        BruteTable { c, entries }
    }

    /// `S(m, n, c, χ)` as an exact multiset over `24c`.
    pub fn eta_sum(&self, m: i64, n: i64) -> ExactExponentialSum {
        let q = 24 * self.c;
        let mut s = ExactExponentialSum::new(q);
        for &(a, d, j) in &self.entries {
            let k = -(j as i128) * self.c as i128
                + (24 * m as i128 - 23) * a as i128
                + (24 * n as i128 - 23) * d as i128;
            s.push(k.rem_euclid(q as i128) as i64);
        }
        s
    }

    /// `S(m, n, c, χ̄)` as an exact multiset over `24c`.
    pub fn eta_conj_sum(&self, m: i64, n: i64) -> ExactExponentialSum {
        let q = 24 * self.c;
        let mut s = ExactExponentialSum::new(q);
        for &(a, d, j) in &self.entries {
            let k = j as i128 * self.c as i128
                + (24 * m as i128 - 1) * a as i128
                + (24 * n as i128 - 1) * d as i128;
            s.push(k.rem_euclid(q as i128) as i64);
        }
        s
    }
}

/// Classical sum by searching for inverse pairs.
pub fn classical_sum_brute(m: i64, n: i64, c: u64) -> ExactExponentialSum {
    let mut s = ExactExponentialSum::new(c);
    for d in 0..c {
        for e in 0..c {
            if (d * e) % c == 1 % c && gcd_u64(d, c) == 1 {
                let k = (m as i128 * d as i128 + n as i128 * e as i128).rem_euclid(c as i128);
                s.push(k as i64);
            }
        }
    }
    s
}

/// Twisted sum by searching for inverse pairs, with ε_d and the sign
/// evaluated as complex factors before being mapped back to exponents.
pub fn twisted_sum_brute(psi: TwistCharacter, m: i64, n: i64, c: u64) -> ExactExponentialSum {
    let q = 8 * c;
    let mut s = ExactExponentialSum::new(q);
    for d in 0..c {
        if gcd_u64(d, c) != 1 {
            continue;
        }
        let e = (0..c).find(|&e| (d * e) % c == 1).expect("unit has an inverse");
        let chi = kronecker(c as i64, d as i64) * psi.eval(d as i64);
        if chi == 0 {
            continue;
        }
        let eps8 = if d % 4 == 1 { 0 } else { 2 };
        let sign8 = if chi > 0 { 0 } else { 4 };
        let k = 8 * (m as i128 * d as i128 + n as i128 * e as i128) + (eps8 + sign8) as i128 * c as i128;
        s.push(k.rem_euclid(q as i128) as i64);
    }
    s
}
