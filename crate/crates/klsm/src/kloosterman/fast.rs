//! Floating-point kernel for single sums at large `c`.
//!
//! Units are enumerated with a sieve, inverted in one batch, and the terms
//! for `a` and `c − a` are paired: the exponent of the `c − a` term is
//! `K − E(a)` for a constant `K`, so only `a < c/2` is visited and
//! `S = U + e(K/24c)·conj(U)`.

use num_complex::Complex64;

use crate::arith::{factorize, mod_inverse};
use crate::exactsum::unit_root;
use crate::kloosterman::{classical_sum, eta_conj_sum, eta_sum, SumKind};

/// Division by a fixed modulus through a floating reciprocal; exact for
/// dividends below 2^52 (the estimate is off by at most one and corrected),
/// with a hardware fallback above.
#[derive(Clone, Copy, Debug)]
struct FastDiv {
    m: u64,
    inv: f64,
}

const EXACT_F64: u64 = 1 << 52;

impl FastDiv {
    fn new(m: u64) -> Self {
        FastDiv { m, inv: 1.0 / m as f64 }
    }

    #[inline(always)]
    fn div_rem(&self, x: u64) -> (u64, u64) {
        if x >= EXACT_F64 {
            return (x / self.m, x % self.m);
        }
        // signed conversions are single instructions
        let m = self.m as i64;
        let q = (x as i64 as f64 * self.inv) as i64;
        let r = x as i64 - q * m;
        if r < 0 {
            ((q - 1) as u64, (r + m) as u64)
        } else if r >= m {
            ((q + 1) as u64, (r - m) as u64)
        } else {
            (q as u64, r as u64)
        }
    }

    #[inline(always)]
    fn rem(&self, x: u64) -> u64 {
        self.div_rem(x).1
    }

    #[inline(always)]
    fn div(&self, x: u64) -> u64 {
        self.div_rem(x).0
    }
}

/// Kinds the float kernel handles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FastKind {
    Classical,
    Eta,
    EtaConjugate,
}

impl FastKind {
    pub fn from_sum_kind(kind: SumKind) -> Option<Self> {
        match kind {
            SumKind::Classical => Some(FastKind::Classical),
            SumKind::Eta => Some(FastKind::Eta),
            SumKind::EtaConjugate => Some(FastKind::EtaConjugate),
            SumKind::Twisted(_) => None,
        }
    }
}

/// Jacobi symbol `(x/n)` for odd `n`, binary algorithm.
#[inline]
pub fn jacobi_u64(mut x: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    x %= n;
    let mut t = 1i32;
    while x != 0 {
        let z = x.trailing_zeros();
        x >>= z;
        if z % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        if x % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut x, &mut n);
        x %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Reusable buffers for [`FastKernel::sum_at`].
#[derive(Default)]
pub struct Scratch {
    sieve: Vec<bool>,
    units: Vec<u64>,
    prefix: Vec<u64>,
    lo: Vec<Complex64>,
    hi: Vec<Complex64>,
    /// Smallest prime factor of each index.
    spf: Vec<u32>,
    /// `(a / c_odd)` for `a ≤ c/2`.
    jac: Vec<i8>,
}

impl Scratch {
    fn ensure_spf(&mut self, upto: usize) {
        if self.spf.len() > upto {
            return;
        }
        let n = (upto + 1).next_power_of_two().max(1024);
        let mut spf = vec![0u32; n];
        for i in 2..n {
            if spf[i] == 0 {
                let mut k = i;
                while k < n {
                    if spf[k] == 0 {
                        spf[k] = i as u32;
                    }
                    k += i;
                }
            }
        }
        self.spf = spf;
    }

    /// Fill `jac[a] = (a / n)` for `a ≤ upto` by complete multiplicativity.
    fn fill_jacobi(&mut self, upto: usize, n: u64) {
        self.ensure_spf(upto);
        let jac = &mut self.jac;
        jac.clear();
        jac.resize(upto + 1, 0);
        if upto >= 1 {
            jac[1] = 1;
        }
        for a in 2..=upto {
            let p = self.spf[a] as usize;
            jac[a] = if p == a { jacobi_u64(a as u64, n) as i8 } else { jac[p] * jac[a / p] };
        }
    }
}

/// Float evaluator for one `(m, n, kind)` across many `c`.
#[derive(Clone, Copy, Debug)]
pub struct FastKernel {
    pub kind: FastKind,
    pub m: i64,
    pub n: i64,
}

struct PerModulus {
    c: u64,
    q: u64,
    c24: u64,
    odd: bool,
    /// `c = 2^s · c_odd`
    s: u32,
    c_odd: u64,
    mm: u64,
    nn: u64,
    sr_c: FastDiv,
    sr_q: FastDiv,
}

impl FastKernel {
    pub fn new(kind: FastKind, m: i64, n: i64) -> Self {
        FastKernel { kind, m, n }
    }

    fn shifts(&self) -> (i128, i128) {
        let (m, n) = (self.m as i128, self.n as i128);
        match self.kind {
            FastKind::Classical => (24 * m, 24 * n),
            FastKind::Eta => (24 * m - 23, 24 * n - 23),
            FastKind::EtaConjugate => (24 * m - 1, 24 * n - 1),
        }
    }

    fn setup(&self, c: u64) -> PerModulus {
        let q = 24 * c;
        let (mm, nn) = self.shifts();
        let s = c.trailing_zeros();
        let c_odd = c >> s;
        PerModulus {
            c,
            q,
            c24: c % 24,
            odd: c % 2 == 1,
            s,
            c_odd,
            mm: mm.rem_euclid(q as i128) as u64,
            nn: nn.rem_euclid(q as i128) as u64,
            sr_c: FastDiv::new(c),
            sr_q: FastDiv::new(q),
        }
    }

    /// χ exponent mod 24 for `(a, b; c, d)` with `c > 0`.
    #[inline]
    /// `jac` is `(a / c_odd)`.
    fn chi24(&self, p: &PerModulus, a: u64, b: u64, d: u64, jac: i8) -> u64 {
        let (a24, b24, d24, c24) = (a % 24, b % 24, d % 24, p.c24);
        let csq = (c24 * c24 + 23) % 24;
        let bdc = b24 * d24 % 24 * csq % 24;
        if p.odd {
            // (d/c) = (a/c) since ad ≡ 1
            let sign = jac;
            let e = (a24 + d24) * c24 + 24 * 24 - bdc - 3 * c24 + if sign < 0 { 12 } else { 0 };
            e % 24
        } else {
            let mut sign = 1i32;
            if p.s % 2 == 1 && (d % 8 == 3 || d % 8 == 5) {
                sign = -sign;
            }
            if p.c_odd > 1 {
                // (d / c_odd) = (a / c_odd) since ad ≡ 1
                sign *= jac as i32;
                if p.c_odd % 4 == 3 && d % 4 == 3 {
                    sign = -sign;
                }
            }
            let e = (a24 + d24) * c24 + 24 * 24 - bdc + 3 * d24 + 24 * 24 - 3 - 3 * c24 * d24 % 24
                + if sign < 0 { 12 } else { 0 };
            e % 24
        }
    }

    /// Term exponent mod `24c`.
    #[inline]
    fn exponent(&self, p: &PerModulus, a: u64, d: u64, jac: i8) -> u64 {
        let b = p.sr_c.div(a * d - 1);
        let lin = p.sr_q.rem(p.mm * a + p.nn * d);
        match self.kind {
            FastKind::Classical => lin,
            FastKind::Eta => {
                let j = self.chi24(p, a, b, d, jac);
                p.sr_q.rem(lin + (24 - j) * p.c)
            }
            FastKind::EtaConjugate => {
                let j = self.chi24(p, a, b, d, jac);
                p.sr_q.rem(lin + j * p.c)
            }
        }
    }

    /// The sum at modulus `c`, evaluated in double precision.
    pub fn sum_at(&self, c: u64, scratch: &mut Scratch) -> Complex64 {
        assert!(c >= 1);
        if c <= 2 {
            let s = match self.kind {
                FastKind::Classical => classical_sum(self.m, self.n, c),
                FastKind::Eta => eta_sum(self.m, self.n, c),
                FastKind::EtaConjugate => eta_conj_sum(self.m, self.n, c),
            };
            return s.evaluate();
        }
        let p = self.setup(c);
        let half = ((c - 1) / 2) as usize;

        // units in [1, half]
        let sieve = &mut scratch.sieve;
        sieve.clear();
        sieve.resize(half + 1, true);
        sieve[0] = false;
        for (pr, _) in factorize(c) {
            let pr = pr as usize;
            let mut k = pr;
            while k <= half {
                sieve[k] = false;
                k += pr;
            }
        }
        let units = &mut scratch.units;
        units.clear();
        units.extend((1..=half).filter(|&a| sieve[a]).map(|a| a as u64));

        if self.kind != FastKind::Classical {
            scratch.fill_jacobi(half, p.c_odd);
        }
        let units = &scratch.units;

        // batch inversion
        let prefix = &mut scratch.prefix;
        prefix.clear();
        let mut acc = 1u64;
        for &u in units.iter() {
            prefix.push(acc);
            acc = p.sr_c.rem(acc * u);
        }
        let mut inv = mod_inverse(acc as i64, c).expect("product of units is a unit");

        // e(r/q) = hi[r >> shift] · lo[r & mask]
        let shift = ((p.q as f64).sqrt().log2().ceil() as u32).max(1);
        let lsize = 1u64 << shift;
        let mask = lsize - 1;
        let hcount = (p.q >> shift) + 1;
        scratch.lo.clear();
        scratch.lo.extend((0..lsize).map(|r| unit_root(r as i64, p.q)));
        scratch.hi.clear();
        scratch.hi.extend((0..hcount).map(|h| unit_root((h << shift) as i64, p.q)));
        let (lo, hi, jt) = (&scratch.lo, &scratch.hi, &scratch.jac);

        let mut u_sum = Complex64::new(0.0, 0.0);
        for i in (0..units.len()).rev() {
            let a = units[i];
            let d = p.sr_c.rem(inv * prefix[i]);
            inv = p.sr_c.rem(inv * a);
            let j = if jt.is_empty() { 1 } else { jt[a as usize] };
            let r = self.exponent(&p, a, d, j);
            u_sum += hi[(r >> shift) as usize] * lo[(r & mask) as usize];
        }
        let j_top = if p.c_odd % 4 == 3 { -1 } else { 1 };
        let k = (self.exponent(&p, 1, 1, 1) + self.exponent(&p, c - 1, c - 1, j_top)) % p.q;
        u_sum + unit_root(k as i64, p.q) * u_sum.conj()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::kronecker;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn jacobi_matches_kronecker() {
        for n in (1..400u64).step_by(2) {
            for x in 0..n {
                assert_eq!(jacobi_u64(x, n), kronecker(x as i64, n as i64), "({x}/{n})");
            }
        }
    }

    #[test]
    fn kernel_matches_exact_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut scratch = Scratch::default();
        for kind in [FastKind::Classical, FastKind::Eta, FastKind::EtaConjugate] {
            for c in 1..=600u64 {
                let m = rng.gen_range(-10_000..=10_000);
                let n = rng.gen_range(-10_000..=10_000);
                let exact = match kind {
                    FastKind::Classical => classical_sum(m, n, c),
                    FastKind::Eta => eta_sum(m, n, c),
                    FastKind::EtaConjugate => eta_conj_sum(m, n, c),
                }
                .evaluate();
                let fast = FastKernel::new(kind, m, n).sum_at(c, &mut scratch);
                assert!((fast - exact).norm() < 1e-11, "{kind:?} m={m} n={n} c={c}: {fast} vs {exact}");
            }
        }
    }

    #[test]
    fn kernel_matches_exact_at_larger_moduli() {
        let mut scratch = Scratch::default();
        for &c in &[4096u64, 5040, 7919, 9999, 10_000, 12_288] {
            for &(m, n) in &[(1i64, 1i64), (4, 6), (2, -5)] {
                let exact = eta_sum(m, n, c).evaluate();
                let fast = FastKernel::new(FastKind::Eta, m, n).sum_at(c, &mut scratch);
                assert!((fast - exact).norm() < 1e-10, "c={c}: {fast} vs {exact}");
            }
        }
    }
}
