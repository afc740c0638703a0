//! Classical, eta-multiplier and twisted Kloosterman sums.
//!
//! Exact sums are built as [`ExactExponentialSum`] values. Long ranges of
//! `c` go through the floating kernel in [`fast`] and the deterministic
//! chunked reduction in [`partial`].

pub mod cache;
pub mod fast;
pub mod oracle;
pub mod partial;

use std::fmt;

use crate::arith::{divisor_count, gcd, gcd_u64, kronecker, mod_inverse};
use crate::error::{Error, Result};
use crate::exactsum::ExactExponentialSum;
use crate::multiplier::eta_exponent_positive;

pub use partial::{
    partial_sum, partial_sum_cached, smoothed_sum, windowed_sum, CheckpointGrid, PartialSumSeries,
};

/// Real character used by the twisted sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwistCharacter {
    Trivial,
    /// `χ₁₂(d) = (12/d)`.
    Chi12,
}

impl TwistCharacter {
    pub fn eval(&self, d: i64) -> i32 {
        match self {
            TwistCharacter::Trivial => 1,
            TwistCharacter::Chi12 => kronecker(12, d),
        }
    }
}

/// Which Kloosterman sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SumKind {
    Classical,
    Eta,
    EtaConjugate,
    Twisted(TwistCharacter),
}

impl SumKind {
    /// Tag byte used in cache headers.
    pub fn code(&self) -> u8 {
        match self {
            SumKind::Classical => 0,
            SumKind::Eta => 1,
            SumKind::EtaConjugate => 2,
            SumKind::Twisted(TwistCharacter::Trivial) => 3,
            SumKind::Twisted(TwistCharacter::Chi12) => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => SumKind::Classical,
            1 => SumKind::Eta,
            2 => SumKind::EtaConjugate,
            3 => SumKind::Twisted(TwistCharacter::Trivial),
            4 => SumKind::Twisted(TwistCharacter::Chi12),
            _ => return None,
        })
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "classical" => SumKind::Classical,
            "eta" => SumKind::Eta,
            "eta-conjugate" | "eta-conj" => SumKind::EtaConjugate,
            "twisted" | "twisted-trivial" => SumKind::Twisted(TwistCharacter::Trivial),
            "twisted-chi12" => SumKind::Twisted(TwistCharacter::Chi12),
            _ => return None,
        })
    }
}

impl fmt::Display for SumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SumKind::Classical => "classical",
            SumKind::Eta => "eta",
            SumKind::EtaConjugate => "eta-conjugate",
            SumKind::Twisted(TwistCharacter::Trivial) => "twisted-trivial",
            SumKind::Twisted(TwistCharacter::Chi12) => "twisted-chi12",
        };
        f.write_str(s)
    }
}

/// A validated `(m, n, c, kind)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KloostermanQuery {
    pub m: i64,
    pub n: i64,
    pub c: u64,
    pub kind: SumKind,
}

impl KloostermanQuery {
    pub fn new(m: i64, n: i64, c: u64, kind: SumKind) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidQuery("c must be a positive integer".into()));
        }
        match kind {
            SumKind::Twisted(TwistCharacter::Trivial) if c % 4 != 0 => {
                return Err(Error::BadModulus { c, reason: "twisted sums need 4 | c" })
            }
            SumKind::Twisted(TwistCharacter::Chi12) if c % 576 != 0 => {
                return Err(Error::BadModulus { c, reason: "the chi12 twist needs 576 | c" })
            }
            _ => {}
        }
        Ok(KloostermanQuery { m, n, c, kind })
    }

    pub fn compute(&self) -> Result<ExactExponentialSum> {
        Ok(match self.kind {
            SumKind::Classical => classical_sum(self.m, self.n, self.c),
            SumKind::Eta => eta_sum(self.m, self.n, self.c),
            SumKind::EtaConjugate => eta_conj_sum(self.m, self.n, self.c),
            SumKind::Twisted(psi) => twisted_sum(psi, self.m, self.n, self.c)?,
        })
    }
}

/// `Σ_{d mod c, (d,c)=1} e((md + n d̄)/c)` with modulus `c`.
pub fn classical_sum(m: i64, n: i64, c: u64) -> ExactExponentialSum {
    assert!(c >= 1, "c must be positive");
    let mut s = ExactExponentialSum::new(c);
    let ci = c as i128;
    for d in 0..c {
        if gcd_u64(d, c) != 1 {
            continue;
        }
        let dbar = mod_inverse(d as i64, c).expect("unit") as i128;
        let k = (m as i128 * d as i128 + n as i128 * dbar).rem_euclid(ci);
        s.push(k as i64);
    }
    s
}

fn reduce(x: i128, q: u64) -> i64 {
    x.rem_euclid(q as i128) as i64
}

/// Units `a` in `[0, c)` with their inverses `d` and `b = (ad − 1)/c`, in
/// ascending `a`. For `c = 1` this is the single triple `(0, 0, −1)`.
pub fn unit_triples(c: u64) -> impl Iterator<Item = (i64, i64, i64)> {
    (0..c).filter(move |&a| gcd_u64(a, c) == 1).map(move |a| {
        let d = mod_inverse(a as i64, c).expect("unit");
        let b = (a as i128 * d as i128 - 1) / c as i128;
        (a as i64, d as i64, b as i64)
    })
}

/// The eta-multiplier sum `S(m, n, c, χ)` with modulus `24c`.
///
/// Each term `χ̄(γ) e((m̃a + ñd)/c)` becomes the exponent
/// `j̄c + (24m−23)a + (24n−23)d (mod 24c)` with `χ̄(γ) = e(j̄/24)`.
pub fn eta_sum(m: i64, n: i64, c: u64) -> ExactExponentialSum {
    assert!(c >= 1, "c must be positive");
    let q = 24 * c;
    let mm = reduce(24 * m as i128 - 23, q) as i128;
    let nn = reduce(24 * n as i128 - 23, q) as i128;
    let mut s = ExactExponentialSum::new(q);
    for (a, d, b) in unit_triples(c) {
        let j = eta_exponent_positive(a, b, c as i64, d);
        let k = -(j as i128) * c as i128 + mm * a as i128 + nn * d as i128;
        s.push(reduce(k, q));
    }
    s
}

/// The conjugate-multiplier sum `S(m, n, c, χ̄)`: terms
/// `χ(γ) e(((24m−1)a + (24n−1)d)/24c)`.
pub fn eta_conj_sum(m: i64, n: i64, c: u64) -> ExactExponentialSum {
    assert!(c >= 1, "c must be positive");
    let q = 24 * c;
    let mm = reduce(24 * m as i128 - 1, q) as i128;
    let nn = reduce(24 * n as i128 - 1, q) as i128;
    let mut s = ExactExponentialSum::new(q);
    for (a, d, b) in unit_triples(c) {
        let j = eta_exponent_positive(a, b, c as i64, d);
        let k = j as i128 * c as i128 + mm * a as i128 + nn * d as i128;
        s.push(reduce(k, q));
    }
    s
}

/// `Σ_{d mod c} ε_d (c/d) Ψ(d) e((md + n d̄)/c)` with modulus `8c`; needs `4 | c`.
pub fn twisted_sum(psi: TwistCharacter, m: i64, n: i64, c: u64) -> Result<ExactExponentialSum> {
    if c == 0 || c % 4 != 0 {
        return Err(Error::BadModulus { c, reason: "twisted sums need 4 | c" });
    }
    let q = 8 * c;
    let mut s = ExactExponentialSum::new(q);
    for d in (1..c).step_by(2) {
        if gcd_u64(d, c) != 1 {
            continue;
        }
        let psi_d = psi.eval(d as i64);
        if psi_d == 0 {
            continue;
        }
        let dbar = mod_inverse(d as i64, c).expect("unit") as i128;
        let sign = kronecker(c as i64, d as i64) * psi_d;
        // ε_d is e(0/8) or e(2/8); a sign is e(4/8)
        let mut k8 = if d % 4 == 3 { 2 } else { 0 };
        if sign < 0 {
            k8 += 4;
        }
        let phase = (m as i128 * d as i128 + n as i128 * dbar).rem_euclid(c as i128);
        s.push(reduce(8 * phase + k8 as i128 * c as i128, q));
    }
    Ok(s)
}

/// Weil-shaped ratio `|S| / (τ(c) (M, N, c)^{1/2} c^{1/2})`.
///
/// `(M, N) = (m, n)` for the classical and twisted kinds, and
/// `(24m−23, 24n−23)` for the eta kinds.
pub fn weil_ratio(m: i64, n: i64, c: u64, kind: SumKind) -> Result<f64> {
    let q = KloostermanQuery::new(m, n, c, kind)?;
    let s = q.compute()?.evaluate().norm();
    let (big_m, big_n) = match kind {
        SumKind::Eta => (24 * m - 23, 24 * n - 23),
        SumKind::EtaConjugate => (24 * m - 1, 24 * n - 1),
        _ => (m, n),
    };
    let g = gcd(gcd(big_m, big_n) as i64, c as i64);
    let bound = divisor_count(c) as f64 * (g as f64).sqrt() * (c as f64).sqrt();
    Ok(s / bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn classical_examples() {
        assert!(close(classical_sum(0, 0, 6).evaluate(), Complex64::new(2.0, 0.0), 1e-14));
        assert!(close(classical_sum(1, 1, 2).evaluate(), Complex64::new(1.0, 0.0), 1e-15));
        let v = classical_sum(1, 1, 5).evaluate();
        assert!(close(v, Complex64::new((3.0 - 5f64.sqrt()) / 2.0, 0.0), 1e-14), "{v}");
    }

    #[test]
    fn eta_c_equals_one() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (m, n) in [(1, 1), (0, 0), (5, -7), (-100, 3)] {
            let s = eta_sum(m, n, 1);
            assert_eq!(s.term_count(), 1);
            assert!(close(s.evaluate(), Complex64::new(h, h), 1e-15));
        }
    }

    #[test]
    fn eta_periodic_in_m_and_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for c in 1..=100u64 {
            let m = rng.gen_range(-1000..1000);
            let n = rng.gen_range(-1000..1000);
            let s = eta_sum(m, n, c);
            assert_eq!(eta_sum(m + c as i64, n, c), s);
            assert_eq!(eta_sum(m, n + c as i64, c), s);
        }
    }

    #[test]
    fn conjugation_identity_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = rng.gen_range(-10_000..=10_000);
            let n = rng.gen_range(-10_000..=10_000);
            for c in 1..=50 {
                assert_eq!(eta_sum(m, n, c).conjugate(), eta_conj_sum(1 - m, 1 - n, c), "m={m} n={n} c={c}");
            }
        }
    }

    #[test]
    fn twisted_examples() {
        let v = twisted_sum(TwistCharacter::Trivial, 1, 1, 4).unwrap().evaluate();
        assert!(close(v, Complex64::new(-1.0, -1.0), 1e-15), "{v}");
        let v = twisted_sum(TwistCharacter::Trivial, 0, 0, 4).unwrap().evaluate();
        assert!(close(v, Complex64::new(1.0, 1.0), 1e-15), "{v}");
        assert!(matches!(twisted_sum(TwistCharacter::Trivial, 1, 1, 6), Err(Error::BadModulus { .. })));
        let s = twisted_sum(TwistCharacter::Chi12, 1, 1, 576).unwrap().evaluate().norm();
        assert!(s <= 21.0 * 24.0);
    }

    #[test]
    fn query_validation() {
        assert!(KloostermanQuery::new(1, 1, 0, SumKind::Eta).is_err());
        assert!(KloostermanQuery::new(1, 1, 4, SumKind::Twisted(TwistCharacter::Chi12)).is_err());
        assert!(KloostermanQuery::new(1, 1, 1152, SumKind::Twisted(TwistCharacter::Chi12)).is_ok());
    }

    #[test]
    fn weil_ratio_c_one() {
        assert!((weil_ratio(3, 4, 1, SumKind::Eta).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kind_codes_round_trip() {
        for k in [
            SumKind::Classical,
            SumKind::Eta,
            SumKind::EtaConjugate,
            SumKind::Twisted(TwistCharacter::Trivial),
            SumKind::Twisted(TwistCharacter::Chi12),
        ] {
            assert_eq!(SumKind::from_code(k.code()), Some(k));
            assert_eq!(SumKind::parse(&k.to_string()), Some(k));
        }
    }
}
