//! Dedekind sums, the sums `A_c(n)`, exact partition numbers and the
//! truncated Rademacher series for `p(n)`.
//!
//! The series is summed in double-double arithmetic: `p(500) ≈ 2.3·10²¹`
//! and the rounding test needs an absolute error below `1/2`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::arith::gcd;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::exactsum::ExactExponentialSum;
use crate::kloosterman::eta_sum;

/// `s(d, c) = Σ_{k=1}^{c−1} ((k/c))((kd/c))` by the reciprocity recursion.
pub fn dedekind_sum(d: i64, c: i64) -> Result<Ratio<i128>> {
    if c < 1 {
        return Err(Error::BadModulus { c: c.max(0) as u64, reason: "Dedekind sum needs c ≥ 1" });
    }
    if gcd(d, c) != 1 {
        return Err(Error::NotCoprime { d, c: c as u64 });
    }
    let mut sign = 1i128;
    let mut a = d.rem_euclid(c) as i128;
    let mut b = c as i128;
    let mut acc = Ratio::<i128>::from_integer(0);
    // s(a, b) with 0 ≤ a < b, gcd = 1; s(0, 1) = 0
    while a != 0 {
        // s(a, b) = −s(b, a) − 1/4 + (a/b + b/a + 1/(ab))/12
        let term = Ratio::new(a * a + b * b + 1, 12 * a * b) - Ratio::new(1, 4);
        acc += term * sign;
        sign = -sign;
        let r = b % a;
        b = a;
        a = r;
    }
    Ok(acc)
}

/// `A_c(n) = Σ_{d mod c, (d, c) = 1} e^{πi s(d, c)} e(−nd/c)` as an exact
/// sum over `12c`: the exponent of `d` is `6c·s(d, c) − 12nd`.
pub fn rademacher_ac_exact(n: i64, c: u64) -> ExactExponentialSum {
    let q = 12 * c;
    let mut s = ExactExponentialSum::new(q);
    if c == 1 {
        s.push(0);
        return s;
    }
    for d in 1..c as i64 {
        if gcd(d, c as i64) != 1 {
            continue;
        }
        let ds = dedekind_sum(d, c as i64).expect("coprime");
        let six_c_s = ds * (6 * c as i128);
        debug_assert!(six_c_s.is_integer());
        let k = six_c_s.to_integer() - 12 * n as i128 * d as i128;
        s.push(k.rem_euclid(q as i128) as i64);
    }
    s
}

/// `A_c(n)` in double precision (imaginary part included).
pub fn rademacher_ac(n: i64, c: u64) -> Complex64 {
    rademacher_ac_exact(n, c).evaluate()
}

/// Real part of `A_c(n)` in double-double.
pub fn rademacher_ac_dd(n: i64, c: u64) -> Dd {
    let s = rademacher_ac_exact(n, c);
    let q = s.modulus();
    let mut acc = Dd::ZERO;
    for (k, &m) in s.multiplicities().iter().enumerate() {
        if m != 0 {
            acc = acc + Dd::cos_two_pi_frac(k as i64, q).mul_f64(m as f64);
        }
    }
    acc
}

/// `p(0..=n)` by Euler's pentagonal recurrence.
pub fn partition_table(n: usize) -> Vec<BigInt> {
    let mut p: Vec<BigInt> = Vec::with_capacity(n + 1);
    p.push(BigInt::from(1));
    for m in 1..=n {
        let mut total = BigInt::zero();
        let mut k = 1usize;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let mut t = p[m - g1].clone();
            if g2 <= m {
                t += &p[m - g2];
            }
            if k % 2 == 1 {
                total += t;
            } else {
                total -= t;
            }
            k += 1;
        }
        p.push(total);
    }
    p
}

/// `p(n)` exactly.
pub fn partition_exact(n: usize) -> BigInt {
    partition_table(n).pop().expect("non-empty")
}

/// `I_{3/2}(z)` in double-double.
pub fn bessel_i_3_2_dd(z: Dd) -> Dd {
    let zf = z.to_f64();
    if zf < 0.5 {
        // (z/2)^{3/2} Σ (z²/4)^k / (k! Γ(k + 5/2)), Γ(5/2) = 3√π/4
        let half = z.mul_f64(0.5);
        let q = half.sqr();
        let mut term = Dd::ONE / (Dd::PI.sqrt().mul_f64(0.75));
        let mut sum = term;
        for k in 1..40 {
            term = (term * q) / Dd::new(k as f64 * (k as f64 + 1.5));
            sum = sum + term;
            if term.hi.abs() < 1e-34 * sum.hi.abs() {
                break;
            }
        }
        return sum * half * half.sqrt();
    }
    // √(2/(πz)) (cosh z − sinh z / z)
    let e = z.exp();
    let ei = Dd::ONE / e;
    let ch = (e + ei).mul_f64(0.5);
    let sh = (e - ei).mul_f64(0.5);
    let pref = (Dd::new(2.0) / (Dd::PI * z)).sqrt();
    pref * (ch - sh / z)
}

/// One evaluation of the truncated series against the exact value.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionResult {
    pub n: usize,
    pub exact: BigInt,
    /// The estimate rounded to double precision.
    pub estimate: f64,
    /// Nearest integer to the double-double estimate.
    pub rounded: BigInt,
    pub terms_used: u64,
    /// `|estimate − exact|`, from the double-double estimate.
    pub residual: f64,
}

impl PartitionResult {
    pub fn rounds_correctly(&self) -> bool {
        self.rounded == self.exact
    }

    /// CSV row `n,p_exact,estimate,N,residual`.
    pub fn csv_row(&self) -> String {
        format!("{},{},{:e},{},{:e}", self.n, self.exact, self.estimate, self.terms_used, self.residual)
    }
}

pub const CSV_HEADER: &str = "n,p_exact,estimate,N,residual";

/// `(2π/(24n−1)^{3/4}) Σ_{c ≤ N} A_c(n)/c · I_{3/2}(π√(24n−1)/(6c))`.
pub fn rademacher_series_dd(n: usize, terms: u64) -> Dd {
    let x = Dd::from_i64(24 * n as i64 - 1);
    let sx = x.sqrt();
    let pref = Dd::PI.mul_f64(2.0) / (sx * sx.sqrt());
    let mut acc = Dd::ZERO;
    for c in 1..=terms {
        let a = rademacher_ac_dd(n as i64, c);
        if a.hi == 0.0 && a.lo == 0.0 {
            continue;
        }
        let z = (Dd::PI * sx) / Dd::from_i64(6 * c as i64);
        acc = acc + a * bessel_i_3_2_dd(z) / Dd::from_i64(c as i64);
    }
    pref * acc
}

fn round_dd(v: Dd) -> (BigInt, Dd) {
    let hi_r = v.hi.round();
    let rest = (Dd::new(v.hi) - Dd::new(hi_r)) + Dd::new(v.lo);
    let rest_r = rest.to_f64().round();
    let base = BigInt::from(hi_r as i128) + BigInt::from(rest_r as i64);
    // v − base, exactly enough for a residual
    let frac = rest - Dd::new(rest_r);
    (base, frac)
}

/// Truncated Rademacher series with `N = terms`, checked against `p(n)`.
pub fn partition_rademacher(n: usize, terms: u64) -> Result<PartitionResult> {
    if n == 0 || terms == 0 {
        return Err(Error::InvalidQuery("partition_rademacher needs n ≥ 1 and N ≥ 1".into()));
    }
    let exact = partition_exact(n);
    Ok(evaluate_against(n, terms, exact))
}

fn evaluate_against(n: usize, terms: u64, exact: BigInt) -> PartitionResult {
    let v = rademacher_series_dd(n, terms);
    let (rounded, frac) = round_dd(v);
    // residual = |rounded + frac − exact|
    let diff = (&rounded - &exact).to_f64().unwrap_or(f64::INFINITY);
    let residual = (Dd::new(diff) + frac).abs().to_f64();
    PartitionResult { n, exact, estimate: v.to_f64(), rounded, terms_used: terms, residual }
}

/// `N = ⌈3√n⌉`.
pub fn default_terms(n: usize) -> u64 {
    (3.0 * (n as f64).sqrt()).ceil().max(1.0) as u64
}

/// Results for `n = 1..=n_max` with `N = ⌈3√n⌉`, sharing one partition table.
pub fn partition_sweep(n_max: usize) -> Vec<PartitionResult> {
    let table = partition_table(n_max);
    (1..=n_max).map(|n| evaluate_against(n, default_terms(n), table[n].clone())).collect()
}

/// `A_c(n) / S(1, 1 − n, c, χ)`, when the eta sum is not negligibly small.
pub fn kappa_ratio(n: i64, c: u64) -> Option<Complex64> {
    let s = eta_sum(1, 1 - n, c).evaluate();
    if s.norm() < 1e-8 {
        return None;
    }
    Some(rademacher_ac(n, c) / s)
}

/// Mean of `A_c(n)/S(1, 1 − n, c, χ)` over `c ≤ c_max`, `1 ≤ n ≤ n_max`,
/// skipping pairs where the eta sum vanishes.
pub fn fit_kappa(c_max: u64, n_max: i64) -> Option<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut count = 0usize;
    for c in 1..=c_max {
        for n in 1..=n_max {
            if let Some(z) = kappa_ratio(n, c) {
                acc += z;
                count += 1;
            }
        }
    }
    (count > 0).then(|| acc / count as f64)
}

/// `max |A_c(n) − κ·S(1, 1 − n, c, χ)|` over `c ≤ c_max`, `1 ≤ n ≤ n_max`.
pub fn kappa_max_residual(kappa: Complex64, c_max: u64, n_max: i64) -> f64 {
    let mut worst = 0.0f64;
    for c in 1..=c_max {
        for n in 1..=n_max {
            let s = eta_sum(1, 1 - n, c).evaluate();
            worst = worst.max((rademacher_ac(n, c) - kappa * s).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kloosterman::oracle::dedekind_sum_direct;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dedekind_examples() {
        assert_eq!(dedekind_sum(0, 1).unwrap(), Ratio::from_integer(0));
        assert_eq!(dedekind_sum(1, 3).unwrap(), Ratio::new(1, 18));
        assert!(matches!(dedekind_sum(2, 4), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn dedekind_matches_direct() {
        for c in 1..=300i64 {
            for d in -3..c {
                if gcd(d, c) != 1 {
                    continue;
                }
                let fast = dedekind_sum(d, c).unwrap();
                let direct = dedekind_sum_direct(d, c);
                assert_eq!(
                    fast,
                    Ratio::new(*direct.numer() as i128, *direct.denom() as i128),
                    "s({d},{c})"
                );
                assert_eq!((fast * (6 * c as i128)).is_integer(), true);
            }
        }
    }

    #[test]
    fn reciprocity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(20821);
        let mut done = 0;
        while done < 100 {
            let d = rng.gen_range(1..5000i64);
            let c = rng.gen_range(1..5000i64);
            if gcd(d, c) != 1 {
                continue;
            }
            let lhs = dedekind_sum(d, c).unwrap() + dedekind_sum(c, d).unwrap();
            let (d, c) = (d as i128, c as i128);
            let rhs = Ratio::new(-1, 4) + (Ratio::new(d, c) + Ratio::new(c, d) + Ratio::new(1, d * c)) / 12;
            assert_eq!(lhs, rhs);
            done += 1;
        }
    }

    #[test]
    fn ac_small_values() {
        for n in 1..20 {
            assert!((rademacher_ac(n, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        assert!((rademacher_ac(1, 2) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((rademacher_ac_dd(1, 2).to_f64() + 1.0).abs() < 1e-30);
    }

    #[test]
    fn ac_is_real() {
        let mut worst = 0.0f64;
        for c in 1..=200u64 {
            for n in 1..=50 {
                worst = worst.max(rademacher_ac(n, c).im.abs());
            }
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn partitions_match_generating_function() {
        let n = 100;
        // coin-change expansion of ∏ 1/(1 − q^k)
        let mut g = vec![BigInt::zero(); n + 1];
        g[0] = BigInt::from(1);
        for k in 1..=n {
            for i in k..=n {
                let prev = g[i - k].clone();
                g[i] += prev;
            }
        }
        let p = partition_table(n);
        assert_eq!(p, g);
        assert_eq!(p[0], BigInt::from(1));
        assert_eq!(p[5], BigInt::from(7));
        assert_eq!(p[100], "190569292".parse::<BigInt>().unwrap());
    }

    #[test]
    fn series_small_cases() {
        let r = partition_rademacher(1, 5).unwrap();
        assert!(r.rounds_correctly(), "{r:?}");
        let r = partition_rademacher(50, (2.0 * 50f64.sqrt()).ceil() as u64).unwrap();
        assert_eq!(r.exact, BigInt::from(204226));
        assert!(r.residual < 0.5 && r.rounds_correctly(), "{r:?}");
        assert!(partition_rademacher(0, 3).is_err());
    }

    #[test]
    fn bessel_i_dd_branches_agree() {
        for z in [0.49999, 0.5] {
            let a = bessel_i_3_2_dd(Dd::new(z)).to_f64();
            let b = crate::special::bessel_i(1.5, z);
            assert!((a - b).abs() < 1e-14 * b, "z={z}");
        }
        let lo = bessel_i_3_2_dd(Dd::new(0.4999999999)).to_f64();
        let hi = bessel_i_3_2_dd(Dd::new(0.5000000001)).to_f64();
        assert!((hi - lo).abs() < 1e-9);
    }

    #[test]
    fn residual_trend_decreases() {
        // median residual over n ≤ 100 at N versus 2N
        let table = partition_table(100);
        let med = |terms: u64| {
            let mut r: Vec<f64> = (1..=100).map(|n| evaluate_against(n, terms, table[n].clone()).residual).collect();
            r.sort_by(|a, b| a.partial_cmp(b).unwrap());
            r[50]
        };
        let (a, b, c) = (med(2), med(4), med(8));
        assert!(b <= a && c <= b, "{a} {b} {c}");
    }

    #[test]
    fn kappa_is_constant() {
        let k = fit_kappa(20, 30).unwrap();
        let want = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        assert!((k - want).norm() < 1e-12, "{k}");
        assert!(kappa_max_residual(k, 60, 12) < 1e-9);
    }
}
