//! Integer kernel: gcds, modular inverses, the extended Kronecker symbol,
//! divisor counts, square-free decompositions and pentagonal membership.

use num_integer::Roots;

use crate::error::{Error, Result};
use crate::multiplier::MultiplierValue;

/// Greatest common divisor of two signed integers. `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> u64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs())
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    (r0 as i64, s0 as i64, t0 as i64)
}

/// Inverse of `a` modulo `c` in `[0, c)`. For `c = 1` the result is 0.
pub fn mod_inverse(a: i64, c: u64) -> Result<u64> {
    if c == 0 {
        return Err(Error::NotInvertible { a, c });
    }
    if c == 1 {
        return Ok(0);
    }
    let am = (a as i128).rem_euclid(c as i128) as i64;
    let (g, x, _) = ext_gcd(am, c as i64);
    if g != 1 {
        return Err(Error::NotInvertible { a, c });
    }
    Ok((x as i128).rem_euclid(c as i128) as u64)
}

/// Modular exponentiation with 128-bit intermediates.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut b = (base % m) as u128;
    let mut acc = 1u128;
    let m = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: u64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a % n;
    let mut n = n;
    let mut t = 1i32;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(a/n)` for arbitrary integers.
///
/// Uses `(a/0) = ±1` only for `a = ±1`, `(a/-1) = -1` exactly when `a < 0`,
/// and `(a/2) = 0` for even `a`, otherwise `+1` for `a ≡ ±1` and `-1` for
/// `a ≡ ±3 (mod 8)`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut m = n.unsigned_abs();
    if n < 0 && a < 0 {
        result = -result;
    }
    let v = m.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        m >>= v;
        let r = a.rem_euclid(8);
        if v % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
    }
    if m == 1 {
        return result;
    }
    let am = (a as i128).rem_euclid(m as i128) as u64;
    result * jacobi(am, m)
}

/// The value `ε_d` for odd `d`, as a fourth root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpsilonD {
    pub d: i64,
    pub value: MultiplierValue,
}

impl EpsilonD {
    pub fn new(d: i64) -> Result<Self> {
        Ok(EpsilonD { d, value: epsilon(d)? })
    }
}

/// `ε_d = 1` for `d ≡ 1` and `i` for `d ≡ 3 (mod 4)`.
pub fn epsilon(d: i64) -> Result<MultiplierValue> {
    if d.rem_euclid(2) == 0 {
        return Err(Error::EvenInput(d));
    }
    let e = if d.rem_euclid(4) == 1 { 0 } else { 1 };
    Ok(MultiplierValue::new(4, e))
}

/// Prime factorization by trial division, primes in ascending order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    for p in [2u64, 3] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut p = 5u64;
    let mut step = 2;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += step;
        step = 6 - step;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Number of positive divisors τ(c).
pub fn divisor_count(c: u64) -> u64 {
    factorize(c).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Euler's totient.
pub fn euler_phi(c: u64) -> u64 {
    factorize(c)
        .iter()
        .fold(c, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

/// `N = root² · core` with `core` square-free.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub n: u64,
    pub root: u64,
    pub core: u64,
}

/// Square-free decomposition via trial division up to `N^{1/3}` and a square
/// test on the cofactor, which then has at most two prime factors.
pub fn squarefree_decompose(n: u64) -> SquarefreeDecomposition {
    assert!(n >= 1, "squarefree_decompose needs N >= 1");
    let mut rest = n;
    let mut root = 1u64;
    let mut core = 1u64;
    let limit = n.cbrt() + 1;
    let mut p = 2u64;
    while p <= limit && rest > 1 {
        if rest % p == 0 {
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            root *= p.pow(e / 2);
            if e % 2 == 1 {
                core *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        let s = rest.sqrt();
        if s * s == rest {
            root *= s;
        } else {
            core *= rest;
        }
    }
    SquarefreeDecomposition { n, root, core }
}

/// True iff `v = k(3k±1)/2` for some integer `k`, i.e. `24v + 1` is a square.
pub fn is_generalized_pentagonal(v: u64) -> bool {
    let w = 24u128 * v as u128 + 1;
    let s = w.sqrt();
    s * s == w
}

/// Smallest-prime-factor table on `0..=limit`.
#[derive(Clone, Debug)]
pub struct PrimeSieve {
    spf: Vec<u32>,
}

impl PrimeSieve {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        PrimeSieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        if n as usize > self.limit() {
            return factorize(n);
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit()).filter(|&i| self.spf[i] as usize == i).map(|i| i as u64)
    }
}

/// Table of the Jacobi symbol `(d/c)` for odd `c` and `d` in `0..c`.
pub fn jacobi_table(c: u64, factors: &[(u64, u32)]) -> Vec<i8> {
    let n = c as usize;
    let mut table = vec![1i8; n];
    for &(p, e) in factors {
        if e % 2 == 0 {
            continue;
        }
        let p = p as usize;
        let mut leg = vec![-1i8; p];
        leg[0] = 0;
        for x in 1..=p / 2 {
            leg[x * x % p] = 1;
        }
        for (d, slot) in table.iter_mut().enumerate() {
            *slot *= leg[d % p];
        }
    }
    for &(p, e) in factors {
        if e % 2 == 0 {
            let p = p as usize;
            for d in (0..n).step_by(p) {
                table[d] = 0;
            }
        }
    }
    table
}
